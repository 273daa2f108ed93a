use std::collections::HashMap;

use crate::clique::solve_clique_anonymous;
use crate::graph::CliqueSplit;
use crate::model::{Placement, Schedule};

use super::pamapf::PamapfInstance;
use super::KernelError;

/// Occupancy class of one modulator vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Slot {
    Named(usize),
    Anonymous,
    Empty,
}

/// How the modulator vertices are occupied, in modulator order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlacementTypeKey(pub Vec<Slot>);

pub fn placement_type_key(pam: &PamapfInstance, placement: &[usize], modulator: &[usize]) -> PlacementTypeKey {
    let anon = pam.is_anonymous();
    key_with(&anon, placement, modulator)
}

fn key_with(anon: &[bool], placement: &[usize], modulator: &[usize]) -> PlacementTypeKey {
    let mut slots = vec![Slot::Empty; modulator.len()];
    for (a, &v) in placement.iter().enumerate() {
        if let Ok(i) = modulator.binary_search(&v) {
            slots[i] = if anon[a] { Slot::Anonymous } else { Slot::Named(a) };
        }
    }
    PlacementTypeKey(slots)
}

/// Shortens a feasible partially anonymous schedule until no placement type
/// occurs more than three times among turns `0..=m`.
///
/// Each round takes the repeated key whose first occurrence `p` is earliest,
/// replaces turns `p..=q` (with `q` its last occurrence) by an at most
/// two-turn re-solve on the clique, and relabels anonymous agents of the
/// suffix so that they continue from where the re-solve left them.
pub fn compress_schedule(pam: &PamapfInstance, split: &CliqueSplit, sched: &Schedule) -> Result<Schedule, KernelError> {
    if split.clique.len() < 4 {
        return Err(KernelError::Precondition(format!("clique has {} < 4 vertices", split.clique.len())));
    }
    let anon = pam.is_anonymous();
    let m_set = &split.modulator;
    let q_set = &split.clique;
    let mut local = vec![usize::MAX; pam.graph.n()];
    for (i, &v) in q_set.iter().enumerate() {
        local[v] = i;
    }
    let clique = pam.graph.induced(q_set);

    let mut turns: Vec<Placement> = std::iter::once(pam.start.clone()).chain(sched.turns.iter().cloned()).collect();
    loop {
        let keys: Vec<PlacementTypeKey> = turns.iter().map(|t| key_with(&anon, t, m_set)).collect();
        let mut seen: HashMap<&PlacementTypeKey, (usize, usize, usize)> = HashMap::new();
        for (i, k) in keys.iter().enumerate() {
            let e = seen.entry(k).or_insert((i, i, 0));
            e.1 = i;
            e.2 += 1;
        }
        let Some(&(p, q, _)) = seen.values().filter(|e| e.2 > 3).min_by_key(|e| e.0) else {
            break;
        };

        let (sp, sq) = (&turns[p], &turns[q]);
        let movers: Vec<usize> = (0..sp.len()).filter(|&a| local[sp[a]] != usize::MAX).collect();
        let named: Vec<(usize, usize)> =
            movers.iter().filter(|&&a| !anon[a]).map(|&a| (local[sp[a]], local[sq[a]])).collect();
        let mut anon_movers: Vec<usize> = movers.iter().copied().filter(|&a| anon[a]).collect();
        anon_movers.sort_by_key(|&b| sp[b]);
        let anon_starts: Vec<usize> = anon_movers.iter().map(|&b| local[sp[b]]).collect();
        let anon_targets: Vec<usize> =
            (0..sq.len()).filter(|&b| anon[b] && local[sq[b]] != usize::MAX).map(|b| local[sq[b]]).collect();
        let bridge = solve_clique_anonymous(&clique, &named, &anon_starts, &anon_targets)?;

        let named_movers: Vec<usize> = movers.iter().copied().filter(|&a| !anon[a]).collect();
        let order: Vec<usize> = named_movers.into_iter().chain(anon_movers).collect();
        let mut bridge_turns = Vec::with_capacity(bridge.makespan());
        for bt in &bridge.turns {
            let mut placement = sp.clone();
            for (i, &a) in order.iter().enumerate() {
                placement[a] = q_set[bt[i]];
            }
            bridge_turns.push(placement);
        }
        let end = bridge_turns.last().unwrap_or(sp).clone();

        let mut holder = vec![usize::MAX; pam.graph.n()];
        for (a, &v) in sq.iter().enumerate() {
            holder[v] = a;
        }
        let relabel: Vec<usize> = (0..end.len()).map(|a| if anon[a] { holder[end[a]] } else { a }).collect();
        debug_assert!(relabel.iter().all(|&b| b != usize::MAX));

        let mut next: Vec<Placement> = turns[..=p].to_vec();
        next.extend(bridge_turns);
        for t in &turns[q + 1..] {
            next.push(relabel.iter().map(|&b| t[b]).collect());
        }
        debug_assert!(next.len() < turns.len());
        turns = next;
    }
    turns.remove(0);
    Ok(Schedule::new(turns))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{clique_split, Graph};
    use crate::kernel::{build_pamapf, validate_pamapf};
    use crate::model::Instance;

    fn lollipop(q: usize) -> Graph {
        let mut g = Graph::complete(q);
        let m = g.add_vertex();
        g.add_edge(m, 0).unwrap();
        g.add_edge(m, 1).unwrap();
        g
    }

    #[test]
    fn keys() {
        let g = lollipop(6);
        let split = clique_split(&g);
        let inst = Instance::new(g, vec![0, 1, 2, 3, 4, 5], vec![1, 2, 3, 4, 5, 0], None).unwrap();
        let pam = build_pamapf(&inst, &split);
        assert_eq!(placement_type_key(&pam, &inst.start, &split.modulator).0, vec![Slot::Empty]);
        assert_eq!(placement_type_key(&pam, &[6, 1, 2, 3, 4, 5], &split.modulator).0, vec![Slot::Anonymous]);
        let inst2 = Instance::new(inst.graph.clone(), vec![6, 2], vec![3, 2], None).unwrap();
        let pam2 = build_pamapf(&inst2, &split);
        assert_eq!(placement_type_key(&pam2, &inst2.start, &split.modulator).0, vec![Slot::Named(0)]);
    }

    #[test]
    fn distinct_keys_unchanged() {
        let g = lollipop(5);
        let split = clique_split(&g);
        let inst = Instance::new(g, vec![5], vec![2], None).unwrap();
        let pam = build_pamapf(&inst, &split);
        let sched = Schedule::new(vec![vec![0], vec![2]]);
        assert_eq!(compress_schedule(&pam, &split, &sched).unwrap(), sched);
    }

    #[test]
    fn padded_waits_are_removed() {
        let g = lollipop(8);
        let split = clique_split(&g);
        let inst = Instance::new(g, vec![8, 2, 3, 4, 5], vec![7, 3, 4, 5, 2], None).unwrap();
        let pam = build_pamapf(&inst, &split);
        assert_eq!(pam.anonymous.len(), 4);
        let mut turns = vec![vec![8, 2, 3, 4, 5]; 5];
        turns.push(vec![0, 2, 3, 4, 5]);
        turns.push(vec![7, 2, 3, 4, 5]);
        let sched = Schedule::new(turns);
        assert_eq!(validate_pamapf(&pam, &sched), Ok(()));
        let out = compress_schedule(&pam, &split, &sched).unwrap();
        assert_eq!(validate_pamapf(&pam, &out), Ok(()));
        assert!(out.makespan() < sched.makespan());
    }
}
