use crate::model::{detect_swaps, validate_schedule, Instance, Placement, Schedule};

use super::FptError;

fn swapping_agents(prev: &[usize], next: &[usize]) -> Vec<usize> {
    detect_swaps(prev, next).expect("placements of one instance").into_iter().flat_map(|(a, b)| [a, b]).collect()
}

/// Turn `m-1` placement where each `order[j]` takes the old position of
/// `order[j+1]`, cyclically.
fn rotate(prev: &[usize], order: &[usize]) -> Placement {
    let mut s = prev.to_vec();
    for (j, &b) in order.iter().enumerate() {
        s[b] = prev[order[(j + 1) % order.len()]];
    }
    s
}

fn bad_indices(prev2: &[usize], prev: &[usize], order: &[usize]) -> Vec<usize> {
    let s = rotate(prev, order);
    let involved = swapping_agents(prev2, &s);
    (0..order.len()).filter(|&j| involved.contains(&order[j])).collect()
}

fn good_ordering(prev2: &[usize], prev: &[usize], betas: &[usize]) -> Option<Vec<usize>> {
    let p = betas.len();
    let mut order = betas.to_vec();
    let mut bad = bad_indices(prev2, prev, &order);
    let mut rounds = 0;
    while let Some(&j) = bad.first() {
        rounds += 1;
        if rounds > p * p + p {
            return None;
        }
        let mut adjacent = order.clone();
        adjacent.swap(j, (j + 1) % p);
        let mut third = order.clone();
        third.swap((j + 1) % p, (j + 2) % p);
        let mut candidates = vec![adjacent, third];
        candidates.extend((0..p).flat_map(|x| (x + 1..p).map(move |y| (x, y))).map(|(x, y)| {
            let mut o = order.clone();
            o.swap(x, y);
            o
        }));
        let (next, next_bad) = candidates
            .into_iter()
            .map(|o| {
                let b = bad_indices(prev2, prev, &o);
                (o, b)
            })
            .find(|(_, b)| b.len() < bad.len())?;
        order = next;
        bad = next_bad;
    }
    Some(order)
}

/// Removes swaps from the final turn of a lifted schedule by rearranging
/// non-core agents at turn `m-1`.
///
/// Every offending pair must contain a non-core agent. With four or more
/// pairs the non-core members are rotated along a swap-free ordering; with
/// fewer, each is exchanged with a helper agent outside the core and outside
/// every offending pair, chosen by smallest id.
pub fn repair_final_swaps(inst: &Instance, partial: &Schedule, core: &[usize]) -> Result<Schedule, FptError> {
    let m = partial.makespan();
    if m == 0 {
        return Ok(partial.clone());
    }
    let prev = partial.at(&inst.start, m - 1).to_vec();
    let last = partial.at(&inst.start, m).to_vec();
    let offenders = detect_swaps(&prev, &last).expect("placements of one instance");
    if offenders.is_empty() {
        return Ok(partial.clone());
    }
    if m < 2 {
        return Err(FptError::Repair("swap in the only turn".into()));
    }
    let mut is_core = vec![false; inst.agents()];
    for &a in core {
        is_core[a] = true;
    }
    let mut betas = Vec::with_capacity(offenders.len());
    for &(a, b) in &offenders {
        match (is_core[a], is_core[b]) {
            (true, true) => return Err(FptError::Repair(format!("core agents {a} and {b} swap in the last turn"))),
            (_, false) => betas.push(b),
            (false, true) => betas.push(a),
        }
    }
    let prev2 = partial.at(&inst.start, m - 2).to_vec();

    let fixed = if betas.len() >= 4 {
        let order = good_ordering(&prev2, &prev, &betas)
            .ok_or_else(|| FptError::Repair("no swap-free rotation of the offending agents".into()))?;
        rotate(&prev, &order)
    } else {
        let mut excluded = is_core.clone();
        for &(a, b) in &offenders {
            excluded[a] = true;
            excluded[b] = true;
        }
        let pool: Vec<usize> = (0..inst.agents()).filter(|&a| !excluded[a]).collect();
        let core_agents: Vec<usize> = core.to_vec();
        let mut s = prev.clone();
        let mut helpers: Vec<usize> = Vec::with_capacity(betas.len());
        for (j, &beta) in betas.iter().enumerate() {
            let fits = |g: usize| -> bool {
                if helpers.contains(&g) {
                    return false;
                }
                let c1 = !core_agents.iter().any(|&x| prev2[x] == prev[beta] && prev[x] == prev2[g]);
                let c2 = !core_agents.iter().any(|&x| prev2[x] == prev[g] && prev[x] == prev2[beta]);
                let c3 = !betas.iter().any(|&b| prev[b] == prev2[g]);
                let c4 = !betas.iter().any(|&b| prev2[b] == prev[g]);
                let c5 = !helpers.iter().any(|&h| prev[h] == prev2[g] || prev2[h] == prev[g]);
                if !(c1 && c2 && c3 && c4 && c5) {
                    return false;
                }
                let mut trial = s.clone();
                trial[beta] = prev[g];
                trial[g] = prev[beta];
                let touched: Vec<usize> = helpers.iter().chain(&betas[..=j]).copied().chain([g]).collect();
                swapping_agents(&prev2, &trial).is_empty()
                    && !swapping_agents(&trial, &last).iter().any(|a| touched.contains(a))
            };
            let g = pool
                .iter()
                .copied()
                .find(|&g| fits(g))
                .ok_or_else(|| FptError::Repair(format!("no helper agent for offending agent {beta}")))?;
            s[beta] = prev[g];
            s[g] = prev[beta];
            helpers.push(g);
        }
        s
    };

    let mut turns = partial.turns.clone();
    turns[m - 2] = fixed;
    let out = Schedule::new(turns);
    validate_schedule(inst, &out).map_err(|v| FptError::Repair(format!("repaired schedule is infeasible: {v}")))?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    #[test]
    fn single_offender_uses_smallest_helper() {
        // Agents 0 and 1 exchange in the last turn while 2..5 drift upward.
        let g = Graph::complete(8);
        let start = vec![0, 1, 2, 3, 4, 5];
        let target = vec![1, 0, 4, 5, 6, 7];
        let inst = Instance::new(g, start, target.clone(), None).unwrap();
        let partial = Schedule::new(vec![vec![0, 1, 3, 4, 5, 6], vec![0, 1, 4, 5, 6, 7], target]);
        let out = repair_final_swaps(&inst, &partial, &[]).unwrap();
        assert_eq!(validate_schedule(&inst, &out), Ok(()));
        assert_eq!(out.turns[1][2], 1, "helper 2 takes the position of agent 1");
        assert_eq!(out.turns[1][1], 4);
    }

    #[test]
    fn stationary_helpers_are_rejected() {
        let g = Graph::complete(8);
        let start = vec![0, 1, 2, 3];
        let target = vec![1, 0, 2, 3];
        let inst = Instance::new(g, start.clone(), target.clone(), None).unwrap();
        let partial = Schedule::new(vec![start, target]);
        assert!(matches!(repair_final_swaps(&inst, &partial, &[]), Err(FptError::Repair(_))));
    }

    #[test]
    fn four_offenders_are_rotated() {
        let g = Graph::complete(10);
        let start: Vec<usize> = (0..8).collect();
        let target = vec![1, 0, 3, 2, 5, 4, 7, 6];
        let inst = Instance::new(g, start.clone(), target.clone(), None).unwrap();
        let partial = Schedule::new(vec![start.clone(), target]);
        let out = repair_final_swaps(&inst, &partial, &[0, 2, 4, 6]).unwrap();
        assert_eq!(validate_schedule(&inst, &out), Ok(()));
        for a in [0, 2, 4, 6] {
            assert_eq!(out.turns[0][a], a, "core agent {a} keeps its position");
        }
    }

    #[test]
    fn core_pairs_cannot_be_repaired() {
        let g = Graph::complete(4);
        let inst = Instance::new(g, vec![0, 1], vec![1, 0], None).unwrap();
        let partial = Schedule::new(vec![vec![0, 1], vec![1, 0]]);
        assert!(matches!(repair_final_swaps(&inst, &partial, &[0, 1]), Err(FptError::Repair(_))));
    }

    #[test]
    fn swap_free_input_is_returned_unchanged() {
        let g = Graph::complete(4);
        let inst = Instance::new(g, vec![0, 1], vec![2, 3], None).unwrap();
        let partial = Schedule::new(vec![vec![2, 3]]);
        assert_eq!(repair_final_swaps(&inst, &partial, &[]).unwrap(), partial);
    }
}
