//! Optimal MAPF on complete graphs, plus the anonymous-target variant used by
//! schedule compression.

use thiserror::Error;

use crate::graph::Graph;
use crate::model::{Instance, Placement, Schedule};
use crate::oracle::optimal_schedule;
use crate::search::SearchError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliqueError {
    #[error("graph is not complete")]
    NotComplete,
    #[error("{agents} agents do not fit on {vertices} vertices")]
    TooManyAgents { agents: usize, vertices: usize },
    #[error("the anonymous variant needs at least 4 vertices, got {0}")]
    TooSmall(usize),
    #[error("{0}")]
    Precondition(String),
    #[error(transparent)]
    Search(#[from] SearchError),
}

/// Agent pairs `(a, b)`, `a < b`, whose start and target are exchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SwappingPairSet {
    pub pairs: Vec<(usize, usize)>,
}

impl SwappingPairSet {
    pub fn of(start: &[usize], target: &[usize]) -> Self {
        let mut owner = std::collections::HashMap::new();
        for (a, &v) in start.iter().enumerate() {
            owner.insert(v, a);
        }
        let pairs = (0..start.len())
            .filter(|&a| start[a] != target[a])
            .filter_map(|a| owner.get(&target[a]).map(|&b| (a, b)))
            .filter(|&(a, b)| a < b && target[b] == start[a])
            .collect();
        SwappingPairSet { pairs }
    }

    pub fn count(&self) -> usize {
        self.pairs.len()
    }
}

/// Optimal schedule on a complete graph.
///
/// With at least four vertices the instance is always solvable in at most two
/// turns; smaller cliques go to the oracle and may be infeasible.
pub fn solve_clique(inst: &Instance) -> Result<Option<(usize, Schedule)>, CliqueError> {
    let g = &inst.graph;
    if !g.is_complete() {
        return Err(CliqueError::NotComplete);
    }
    if inst.agents() > g.n() {
        return Err(CliqueError::TooManyAgents { agents: inst.agents(), vertices: g.n() });
    }
    if inst.is_trivial() {
        return Ok(Some((0, Schedule::empty())));
    }
    if g.n() < 4 {
        return Ok(optimal_schedule(inst, 4 * g.n() + 4)?);
    }
    let s0 = &inst.start;
    let t = &inst.target;
    let swapping = SwappingPairSet::of(s0, t);
    if swapping.count() == 0 {
        return Ok(Some((1, Schedule::new(vec![t.clone()]))));
    }
    let s1 = middle_turn(g.n(), s0, t, &swapping.pairs);
    Ok(Some((2, Schedule::new(vec![s1, t.clone()]))))
}

fn middle_turn(n: usize, s0: &[usize], t: &[usize], pairs: &[(usize, usize)]) -> Placement {
    let mut s1 = s0.to_vec();
    let p = pairs.len();
    if p >= 2 {
        // The beta agents shift along the pair list and the last alpha joins
        // the cycle, giving a rotation of length p + 1.
        let (ap, bp) = pairs[p - 1];
        s1[ap] = s0[pairs[0].1];
        for i in 0..p - 1 {
            s1[pairs[i].1] = s0[pairs[i + 1].1];
        }
        s1[bp] = s0[ap];
        return s1;
    }
    let (a1, b1) = pairs[0];
    if n > s0.len() {
        let mut used = vec![false; n];
        for &v in s0 {
            used[v] = true;
        }
        s1[a1] = used.iter().position(|&u| !u).expect("spare vertex");
        return s1;
    }
    let home = |a: usize| s0[a] == t[a];
    let others: Vec<usize> = (0..s0.len()).filter(|&a| a != a1 && a != b1).collect();
    let (a0, b0) = others
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| others[i + 1..].iter().map(move |&y| (x, y)))
        .find(|&(x, y)| home(x) == home(y))
        .expect("a qualifying auxiliary pair exists when every vertex is occupied");
    if home(a0) {
        s1[a1] = s0[a0];
        s1[a0] = s0[b0];
        s1[b0] = s0[a1];
    } else {
        let a0 = if t[a0] != s0[b0] { a0 } else { b0 };
        s1[a1] = s0[a0];
        s1[b1] = s0[a1];
        s1[a0] = s0[b1];
    }
    s1
}

/// Solves a clique instance in which the trailing agents only need to end
/// somewhere on `anon_targets`.
///
/// The schedule lists the named agents first, in the given order, followed by
/// the anonymous agents ordered by start vertex. Anonymous starts are matched
/// to anonymous targets in increasing vertex order.
pub fn solve_clique_anonymous(
    graph: &Graph,
    named: &[(usize, usize)],
    anon_starts: &[usize],
    anon_targets: &[usize],
) -> Result<Schedule, CliqueError> {
    if !graph.is_complete() {
        return Err(CliqueError::NotComplete);
    }
    if graph.n() < 4 {
        return Err(CliqueError::TooSmall(graph.n()));
    }
    if anon_starts.len() != anon_targets.len() {
        return Err(CliqueError::Precondition(format!(
            "{} anonymous starts but {} anonymous targets",
            anon_starts.len(),
            anon_targets.len()
        )));
    }
    let mut starts = anon_starts.to_vec();
    let mut targets = anon_targets.to_vec();
    starts.sort_unstable();
    targets.sort_unstable();
    let start: Placement = named.iter().map(|x| x.0).chain(starts).collect();
    let target: Placement = named.iter().map(|x| x.1).chain(targets).collect();
    let inst =
        Instance::new(graph.clone(), start, target, None).map_err(|e| CliqueError::Precondition(e.to_string()))?;
    let (_, sched) = solve_clique(&inst)?.expect("cliques with at least four vertices are always solvable");
    Ok(sched)
}
