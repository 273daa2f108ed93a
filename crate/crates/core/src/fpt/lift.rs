use crate::graph::CliqueSplit;
use crate::kernel::Kernel;
use crate::model::{Instance, Placement, Schedule};

use super::repair::repair_final_swaps;
use super::FptError;

/// One turn of the matching-based lift for non-core agents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftFrame {
    pub turn: usize,
    /// Clique vertices free of core agents at `turn`.
    pub free: Vec<usize>,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    /// Perfect matching `(source, sink)` avoiding forbidden pairs and mutual
    /// exchanges.
    pub matching: Vec<(usize, usize)>,
}

impl LiftFrame {
    pub fn sink_of(&self, source: usize) -> Option<usize> {
        self.matching.iter().find(|e| e.0 == source).map(|e| e.1)
    }
}

/// Number of matched pairs `(w1, y1), (w2, y2)` with `w1 = y2` and `y1 = w2`.
pub fn mutual_exchanges(matching: &[(usize, usize)]) -> usize {
    let mut count = 0;
    for (i, &(w1, y1)) in matching.iter().enumerate() {
        if w1 == y1 {
            continue;
        }
        count += matching[i + 1..].iter().filter(|&&(w2, y2)| w2 == y1 && y2 == w1).count();
    }
    count
}

fn augment(u: usize, allowed: &[Vec<usize>], seen: &mut [bool], owner: &mut [usize]) -> bool {
    for &y in &allowed[u] {
        if seen[y] {
            continue;
        }
        seen[y] = true;
        if owner[y] == usize::MAX || augment(owner[y], allowed, seen, owner) {
            owner[y] = u;
            return true;
        }
    }
    false
}

/// Re-pairs `(w1, y1), (w2, y2)` with `w1 = y2`, `y1 = w2` as two stays until
/// no mutual exchange is left. A stay is never forbidden: a core agent that
/// keeps its vertex makes it neither a source nor a sink.
pub fn remove_mutual_exchanges(matching: &mut [(usize, usize)]) {
    let size = matching.len();
    let mut remaining = mutual_exchanges(matching);
    while remaining > 0 {
        let (i, j) = (0..size)
            .flat_map(|i| (i + 1..size).map(move |j| (i, j)))
            .find(|&(i, j)| {
                let ((w1, y1), (w2, y2)) = (matching[i], matching[j]);
                w1 != y1 && w1 == y2 && y1 == w2
            })
            .expect("counted exchange exists");
        let (y1, y2) = (matching[i].1, matching[j].1);
        matching[i].1 = y2;
        matching[j].1 = y1;
        let now = mutual_exchanges(matching);
        assert!(now < remaining, "exchange fix must reduce mutual exchanges");
        remaining = now;
    }
}

/// Builds the frame for the step from `turn` to `turn + 1`.
///
/// `occupied` are the positions of non-core agents at `turn`; they must lie
/// in `free_now`. `forbidden` lists core moves as `(to, from)`: a non-core
/// agent on `to` may not move to `from`.
pub fn build_frame(
    turn: usize,
    free_now: &[usize],
    free_next: &[usize],
    occupied: &[usize],
    forbidden: &[(usize, usize)],
) -> Result<LiftFrame, FptError> {
    let size = free_now.len().min(free_next.len());
    if occupied.len() > size {
        return Err(FptError::Lift(format!(
            "turn {turn}: {} non-core agents but only {size} free clique vertices",
            occupied.len()
        )));
    }
    let mut sources: Vec<usize> = occupied.to_vec();
    sources.extend(free_now.iter().copied().filter(|v| !occupied.contains(v)).take(size - occupied.len()));
    sources.sort_unstable();
    let mut sinks: Vec<usize> = free_next[..size].to_vec();
    sinks.sort_unstable();

    let allowed: Vec<Vec<usize>> =
        sources.iter().map(|&w| (0..size).filter(|&j| !forbidden.contains(&(w, sinks[j]))).collect()).collect();
    let mut owner = vec![usize::MAX; size];
    for u in 0..size {
        let mut seen = vec![false; size];
        if !augment(u, &allowed, &mut seen, &mut owner) {
            return Err(FptError::Lift(format!("turn {turn}: no perfect matching")));
        }
    }
    let mut matching = vec![(0, 0); size];
    for (j, &u) in owner.iter().enumerate() {
        matching[u] = (sources[u], sinks[j]);
    }

    remove_mutual_exchanges(&mut matching);
    Ok(LiftFrame { turn, free: free_now.to_vec(), sources, sinks, matching })
}

/// Clique vertices not used by core agents in `placement`.
fn free_clique(split: &CliqueSplit, n: usize, core_positions: &[usize]) -> Vec<usize> {
    let mut used = vec![false; n];
    for &v in core_positions {
        used[v] = true;
    }
    split.clique.iter().copied().filter(|&v| !used[v]).collect()
}

/// Lifts a kernel schedule to the original instance.
///
/// Core agents follow their kernel trajectories; the others are moved inside
/// the clique by per-turn matchings and the last turn is set to the targets
/// and repaired.
pub fn lift_schedule(
    inst: &Instance,
    split: &CliqueSplit,
    kernel: &Kernel,
    ksched: &Schedule,
) -> Result<Schedule, FptError> {
    let all = inst.agents();
    let core = &kernel.agents;
    let globalize = |t: &Placement| -> Placement { kernel.global_placement(t) };
    if core.len() == all {
        return Ok(Schedule::new(ksched.turns.iter().map(globalize).collect()));
    }
    let noncore: Vec<usize> = {
        let mut is_core = vec![false; all];
        for &a in core {
            is_core[a] = true;
        }
        (0..all).filter(|&a| !is_core[a]).collect()
    };
    if noncore.len() <= core.len().max(50) {
        return Err(FptError::SizeRegime { core: core.len(), rest: noncore.len() });
    }
    let n = inst.graph.n();

    // Core trajectories in original ids, turn 0 included.
    let mut core_turns: Vec<Placement> =
        std::iter::once(kernel.global_placement(&kernel.start)).chain(ksched.turns.iter().map(globalize)).collect();
    let needs_moves = noncore.iter().any(|&a| inst.start[a] != inst.target[a]);
    while needs_moves && core_turns.len() < 3 {
        core_turns.push(core_turns.last().expect("non-empty").clone());
    }
    let m = core_turns.len() - 1;

    let mut turns: Vec<Placement> = Vec::with_capacity(m);
    let mut current: Placement = inst.start.clone();
    for i in 0..m.saturating_sub(1) {
        let free_now = free_clique(split, n, &core_turns[i]);
        let free_next = free_clique(split, n, &core_turns[i + 1]);
        let occupied: Vec<usize> = noncore.iter().map(|&a| current[a]).collect();
        let forbidden: Vec<(usize, usize)> =
            (0..core.len()).map(|j| (core_turns[i + 1][j], core_turns[i][j])).filter(|e| e.0 != e.1).collect();
        let frame = build_frame(i, &free_now, &free_next, &occupied, &forbidden)?;
        let mut next = vec![0; all];
        for (j, &a) in core.iter().enumerate() {
            next[a] = core_turns[i + 1][j];
        }
        for &a in &noncore {
            next[a] = frame.sink_of(current[a]).expect("sources cover every non-core agent");
        }
        turns.push(next.clone());
        current = next;
    }
    if m > 0 {
        turns.push(inst.target.clone());
    }
    repair_final_swaps(inst, &Schedule::new(turns), core)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn frame_avoids_forbidden_edge() {
        let free: Vec<usize> = (10..15).collect();
        let forbidden = [(10, 10), (11, 12)];
        let frame = build_frame(0, &free, &free, &[10, 11], &forbidden).unwrap();
        assert_eq!(frame.matching.len(), 5);
        for &(w, y) in &frame.matching {
            assert!(!forbidden.contains(&(w, y)));
        }
        let mut sinks: Vec<usize> = frame.matching.iter().map(|e| e.1).collect();
        sinks.sort_unstable();
        assert_eq!(sinks, free);
        assert_eq!(mutual_exchanges(&frame.matching), 0);
    }

    #[test]
    fn exchange_fix_removes_mutual_pairs() {
        let mut matching = vec![(0, 1), (1, 0), (2, 3), (3, 2), (4, 4)];
        remove_mutual_exchanges(&mut matching);
        assert_eq!(matching, vec![(0, 0), (1, 1), (2, 2), (3, 3), (4, 4)]);
    }

    #[test]
    fn counts_mutual_exchanges() {
        assert_eq!(mutual_exchanges(&[(0, 1), (1, 0), (2, 2)]), 1);
        assert_eq!(mutual_exchanges(&[(0, 1), (1, 2), (2, 0)]), 0);
    }

    /// Kernel schedule built by hand: the modulator agent steps into the
    /// clique, then the clique solver finishes the core agents.
    fn hand_kernel_schedule(kernel: &Kernel, entry: usize) -> Schedule {
        let modulator_agent = (0..kernel.agents.len()).find(|&j| kernel.in_modulator[kernel.start[j]]).unwrap();
        let mut first = kernel.start.clone();
        first[modulator_agent] = kernel.vertices.binary_search(&entry).unwrap();
        let clique: Vec<usize> = (0..kernel.vertices.len()).filter(|&v| !kernel.in_modulator[v]).collect();
        let local = |v: usize| clique.binary_search(&v).unwrap();
        let sub = Instance::new(
            kernel.graph.induced(&clique),
            first.iter().map(|&v| local(v)).collect(),
            kernel.target.iter().map(|&v| local(v)).collect(),
            None,
        )
        .unwrap();
        let (_, rest) = crate::clique::solve_clique(&sub).unwrap().unwrap();
        let mut turns = vec![first];
        turns.extend(rest.turns.iter().map(|t| t.iter().map(|&v| clique[v]).collect()));
        Schedule::new(turns)
    }

    #[test]
    fn lifts_a_kernel_schedule_with_dropped_agents() {
        use crate::graph::{clique_split, Graph};
        use crate::kernel::{build_kernel, classify_types, select_core_agents};
        use crate::model::validate_schedule;

        let mut g = Graph::complete(400);
        let hub = g.add_vertex();
        g.add_edge(hub, 0).unwrap();
        g.add_edge(hub, 1).unwrap();
        let mut start = vec![hub];
        let mut target = vec![5];
        start.extend(10..230);
        target.extend(11..231);
        let inst = Instance::new(g, start, target, None).unwrap();
        let split = clique_split(&inst.graph);
        let typing = classify_types(&inst, &split);
        let core = select_core_agents(&inst, &split, &typing);
        let kernel = build_kernel(&inst, &split, &typing, &core.core).unwrap();
        assert!(kernel.agents.len() < inst.agents());
        assert_eq!(kernel.k, 0);

        let ksched = hand_kernel_schedule(&kernel, 0);
        assert_eq!(crate::model::validate_schedule(&kernel.instance(), &ksched), Ok(()));
        let lifted = lift_schedule(&inst, &split, &kernel, &ksched).unwrap();
        assert_eq!(validate_schedule(&inst, &lifted), Ok(()));
        assert_eq!(lifted.makespan(), ksched.makespan());
        for (i, turn) in ksched.turns.iter().enumerate() {
            assert_eq!(
                kernel.agents.iter().map(|&a| lifted.turns[i][a]).collect::<Vec<_>>(),
                kernel.global_placement(turn),
                "core agents follow the kernel at turn {}",
                i + 1
            );
        }
    }

    #[test]
    fn small_remainder_is_refused() {
        use crate::graph::{clique_split, Graph};
        use crate::kernel::{build_kernel, classify_types, select_core_agents};

        let mut g = Graph::complete(20);
        let hub = g.add_vertex();
        g.add_edge(hub, 0).unwrap();
        let inst = Instance::new(g, vec![hub, 3, 4], vec![2, 4, 3], None).unwrap();
        let split = clique_split(&inst.graph);
        let typing = classify_types(&inst, &split);
        let core = select_core_agents(&inst, &split, &typing);
        let mut kernel = build_kernel(&inst, &split, &typing, &core.core).unwrap();
        // Drop one agent artificially to reach the guarded branch.
        kernel.agents.pop();
        kernel.start.pop();
        kernel.target.pop();
        let ksched = Schedule::new(vec![kernel.target.clone()]);
        assert!(matches!(lift_schedule(&inst, &split, &kernel, &ksched), Err(FptError::SizeRegime { .. })));
    }

    #[test]
    fn too_many_agents_for_the_frame() {
        assert!(build_frame(3, &[1, 2], &[1], &[1, 2], &[]).is_err());
    }
}
