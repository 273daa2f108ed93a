use crate::clique::solve_clique;
use crate::graph::{CliqueSplit, Graph};
use crate::model::{validate_moves, Instance, Placement, Rule, Schedule, Violation};

use super::KernelError;

/// Partially anonymous instance: named agents have exact targets, anonymous
/// agents only need to cover `anon_targets` together.
///
/// Agent ids are those of the originating instance. `exact_targets` keeps the
/// original targets of every agent and is read only when a solution is
/// extended back to the original instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PamapfInstance {
    pub graph: Graph,
    pub start: Placement,
    pub named: Vec<usize>,
    pub anonymous: Vec<usize>,
    pub anon_targets: Vec<usize>,
    pub exact_targets: Placement,
}

impl PamapfInstance {
    pub fn agents(&self) -> usize {
        self.start.len()
    }

    pub fn is_anonymous(&self) -> Vec<bool> {
        let mut mask = vec![false; self.agents()];
        for &b in &self.anonymous {
            mask[b] = true;
        }
        mask
    }
}

/// Agents touching the modulator stay named; the rest become anonymous
/// unless there are fewer than four of them.
pub fn build_pamapf(inst: &Instance, split: &CliqueSplit) -> PamapfInstance {
    let in_m = split.modulator_mask(inst.graph.n());
    let (touching, rest): (Vec<usize>, Vec<usize>) =
        (0..inst.agents()).partition(|&a| in_m[inst.start[a]] || in_m[inst.target[a]]);
    let (named, anonymous) = if rest.len() < 4 { ((0..inst.agents()).collect(), Vec::new()) } else { (touching, rest) };
    let mut anon_targets: Vec<usize> = anonymous.iter().map(|&b| inst.target[b]).collect();
    anon_targets.sort_unstable();
    PamapfInstance {
        graph: inst.graph.clone(),
        start: inst.start.clone(),
        named,
        anonymous,
        anon_targets,
        exact_targets: inst.target.clone(),
    }
}

/// Feasibility for the partially anonymous variant.
pub fn validate_pamapf(pam: &PamapfInstance, sched: &Schedule) -> Result<(), Violation> {
    validate_moves(&pam.graph, &pam.start, &sched.turns)?;
    let m = sched.makespan();
    let last = sched.at(&pam.start, m);
    let mut off: Vec<usize> = pam.named.iter().copied().filter(|&a| last[a] != pam.exact_targets[a]).collect();
    let mut covered: Vec<usize> = pam.anonymous.iter().map(|&b| last[b]).collect();
    covered.sort_unstable();
    if covered != pam.anon_targets {
        off.extend(pam.anonymous.iter().copied().filter(|&b| pam.anon_targets.binary_search(&last[b]).is_err()));
    }
    if off.is_empty() {
        Ok(())
    } else {
        off.sort_unstable();
        Err(Violation { turn: m, agents: off, rule: Rule::Target })
    }
}

/// Turns a partially anonymous solution into one for the original instance
/// by re-solving the anonymous agents on the clique spanned by their targets.
pub fn extend_pamapf_solution(
    pam: &PamapfInstance,
    sched: &Schedule,
    split: &CliqueSplit,
) -> Result<Schedule, KernelError> {
    if pam.anonymous.is_empty() {
        return Ok(sched.clone());
    }
    if pam.anonymous.len() < 4 {
        return Err(KernelError::Precondition(format!(
            "{} anonymous agents; extension needs none or at least four",
            pam.anonymous.len()
        )));
    }
    let in_q = {
        let mut mask = vec![false; pam.graph.n()];
        for &v in &split.clique {
            mask[v] = true;
        }
        mask
    };
    if pam.anon_targets.iter().any(|&v| !in_q[v]) {
        return Err(KernelError::Precondition("anonymous targets must lie in the clique".into()));
    }
    let last = sched.at(&pam.start, sched.makespan()).to_vec();
    let t_set = &pam.anon_targets;
    let local = |v: usize| {
        t_set
            .binary_search(&v)
            .map_err(|_| KernelError::Precondition(format!("anonymous agent ends on {v}, outside the target set")))
    };
    let start: Placement = pam.anonymous.iter().map(|&b| local(last[b])).collect::<Result<_, _>>()?;
    let target: Placement = pam.anonymous.iter().map(|&b| local(pam.exact_targets[b])).collect::<Result<_, _>>()?;
    let sub = Instance::new(pam.graph.induced(t_set), start, target, None)
        .map_err(|e| KernelError::Precondition(e.to_string()))?;
    let (_, tail) = solve_clique(&sub)?.expect("cliques with at least four vertices are always solvable");
    let mut out = sched.clone();
    for turn in tail.turns {
        let mut placement = last.clone();
        for (i, &b) in pam.anonymous.iter().enumerate() {
            placement[b] = t_set[turn[i]];
        }
        out.turns.push(placement);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::clique_split;
    use crate::model::validate_schedule;

    /// Clique on 0..q with one modulator vertex `q` adjacent to 0 and 1.
    fn lollipop(q: usize) -> Graph {
        let mut g = Graph::complete(q);
        let m = g.add_vertex();
        g.add_edge(m, 0).unwrap();
        g.add_edge(m, 1).unwrap();
        g
    }

    #[test]
    fn all_touching_means_no_anonymous() {
        let g = lollipop(4);
        let inst = Instance::new(g.clone(), vec![4], vec![2], None).unwrap();
        let pam = build_pamapf(&inst, &clique_split(&g));
        assert!(pam.anonymous.is_empty());
        assert_eq!(pam.named, vec![0]);
    }

    #[test]
    fn small_remainder_stays_named() {
        let g = lollipop(6);
        let inst = Instance::new(g.clone(), vec![6, 0, 1, 2], vec![3, 1, 2, 0], None).unwrap();
        let pam = build_pamapf(&inst, &clique_split(&g));
        assert!(pam.anonymous.is_empty());
        assert_eq!(pam.named.len(), 4);
    }

    #[test]
    fn large_remainder_becomes_anonymous() {
        let g = lollipop(8);
        let inst = Instance::new(g.clone(), vec![8, 0, 1, 2, 3, 4], vec![7, 1, 2, 3, 4, 0], None).unwrap();
        let pam = build_pamapf(&inst, &clique_split(&g));
        assert_eq!(pam.named, vec![0]);
        assert_eq!(pam.anonymous.len(), 5);
        assert_eq!(pam.anon_targets, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn extension_fixes_a_cyclic_permutation() {
        let g = lollipop(6);
        let split = clique_split(&g);
        // Four anonymous agents whose targets are a cyclic shift of their starts.
        let inst = Instance::new(g, vec![0, 1, 2, 3], vec![1, 2, 3, 0], None).unwrap();
        let pam = build_pamapf(&inst, &split);
        assert_eq!(pam.anonymous.len(), 4);
        let empty = Schedule::empty();
        assert_eq!(validate_pamapf(&pam, &empty), Ok(()));
        let full = extend_pamapf_solution(&pam, &empty, &split).unwrap();
        assert!(full.makespan() <= 2);
        assert_eq!(validate_schedule(&inst, &full), Ok(()));

        let home = Instance::new(inst.graph.clone(), vec![0, 1, 2, 3], vec![0, 1, 2, 3], None).unwrap();
        let pam = build_pamapf(&home, &split);
        assert_eq!(extend_pamapf_solution(&pam, &empty, &split).unwrap(), empty);
    }
}
