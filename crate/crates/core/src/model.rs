//! Instances, schedules and the feasibility rules of swap-forbidden MAPF.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::graph::Graph;

/// Agent-indexed vertex array.
pub type Placement = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("start and target lists have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("vertex {0} used as start by two agents")]
    DuplicateStart(usize),
    #[error("vertex {0} used as target by two agents")]
    DuplicateTarget(usize),
    #[error("vertex {0} does not exist")]
    UnknownVertex(usize),
    #[error("placements cover {0} and {1} agents")]
    AgentSetMismatch(usize, usize),
    #[error("group {0} has {1} starts and {2} targets")]
    GroupSize(usize, usize, usize),
    #[error("vertex {0} appears in two groups")]
    GroupOverlap(usize),
}

/// A MAPF instance: graph, injective start and target maps, optional limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: Graph,
    pub start: Placement,
    pub target: Placement,
    pub limit: Option<usize>,
}

fn check_injective(vs: &[usize], n: usize, dup: fn(usize) -> ModelError) -> Result<(), ModelError> {
    let mut seen = vec![false; n];
    for &v in vs {
        if v >= n {
            return Err(ModelError::UnknownVertex(v));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(dup(v));
        }
    }
    Ok(())
}

impl Instance {
    pub fn new(graph: Graph, start: Placement, target: Placement, limit: Option<usize>) -> Result<Self, ModelError> {
        if start.len() != target.len() {
            return Err(ModelError::LengthMismatch(start.len(), target.len()));
        }
        check_injective(&start, graph.n(), ModelError::DuplicateStart)?;
        check_injective(&target, graph.n(), ModelError::DuplicateTarget)?;
        Ok(Instance { graph, start, target, limit })
    }

    pub fn agents(&self) -> usize {
        self.start.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.start == self.target
    }
}

/// Sequence of placements `s_1..s_m`; the start placement is not stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Schedule {
    pub turns: Vec<Placement>,
}

impl Schedule {
    pub fn new(turns: Vec<Placement>) -> Self {
        Schedule { turns }
    }

    pub fn empty() -> Self {
        Schedule::default()
    }

    pub fn makespan(&self) -> usize {
        self.turns.len()
    }

    /// Placement at turn `i`, where turn 0 is `start`.
    pub fn at<'a>(&'a self, start: &'a [usize], i: usize) -> &'a [usize] {
        if i == 0 {
            start
        } else {
            &self.turns[i - 1]
        }
    }
}

/// Inverse of a placement over `n` vertices.
pub fn occupancy(placement: &[usize], n: usize) -> Vec<Option<usize>> {
    let mut occ = vec![None; n];
    for (a, &v) in placement.iter().enumerate() {
        occ[v] = Some(a);
    }
    occ
}

/// Unordered agent pairs `(a, b)`, `a < b`, that exchange positions between
/// two consecutive placements.
pub fn detect_swaps(prev: &[usize], next: &[usize]) -> Result<Vec<(usize, usize)>, ModelError> {
    if prev.len() != next.len() {
        return Err(ModelError::AgentSetMismatch(prev.len(), next.len()));
    }
    let by_vertex: HashMap<usize, usize> = prev.iter().enumerate().map(|(a, &v)| (v, a)).collect();
    let mut pairs = Vec::new();
    for (a, (&p, &q)) in prev.iter().zip(next).enumerate() {
        if p == q {
            continue;
        }
        if let Some(&b) = by_vertex.get(&q) {
            if b > a && next[b] == p {
                pairs.push((a, b));
            }
        }
    }
    Ok(pairs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    Arity,
    UnknownVertex,
    Move,
    Collision,
    Swap,
    Target,
    Limit,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Arity => "arity",
            Rule::UnknownVertex => "unknown-vertex",
            Rule::Move => "move",
            Rule::Collision => "collision",
            Rule::Swap => "swap",
            Rule::Target => "target",
            Rule::Limit => "limit",
        };
        f.write_str(s)
    }
}

/// First rule broken by a schedule.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("turn {turn}: {rule} violated by agents {agents:?}")]
pub struct Violation {
    pub turn: usize,
    pub agents: Vec<usize>,
    pub rule: Rule,
}

impl Violation {
    fn new(turn: usize, agents: Vec<usize>, rule: Rule) -> Self {
        Violation { turn, agents, rule }
    }
}

/// Checks rules 1, 2 and 4 (moves, collisions, swaps) on every turn.
///
/// The target rule is not applied, so this is the check used for prefixes.
pub fn validate_moves(graph: &Graph, start: &[usize], turns: &[Placement]) -> Result<(), Violation> {
    let n = graph.n();
    let mut occ_prev: Vec<usize> = vec![usize::MAX; n];
    let mut occ_next: Vec<usize> = vec![usize::MAX; n];
    for (a, &v) in start.iter().enumerate() {
        occ_prev[v] = a;
    }
    let mut prev = start;
    for (idx, next) in turns.iter().enumerate() {
        let turn = idx + 1;
        if next.len() != start.len() {
            return Err(Violation::new(turn, vec![], Rule::Arity));
        }
        for (a, &v) in next.iter().enumerate() {
            if v >= n {
                return Err(Violation::new(turn, vec![a], Rule::UnknownVertex));
            }
            if !graph.in_closed_neighborhood(prev[a], v) {
                return Err(Violation::new(turn, vec![a], Rule::Move));
            }
        }
        let mut failure = None;
        for (a, &v) in next.iter().enumerate() {
            if occ_next[v] != usize::MAX {
                failure = Some(Violation::new(turn, vec![occ_next[v], a], Rule::Collision));
                break;
            }
            occ_next[v] = a;
        }
        if failure.is_none() {
            for (a, (&p, &q)) in prev.iter().zip(next.iter()).enumerate() {
                if p == q {
                    continue;
                }
                let b = occ_prev[q];
                if b != usize::MAX && b > a && next[b] == p {
                    failure = Some(Violation::new(turn, vec![a, b], Rule::Swap));
                    break;
                }
            }
        }
        for &v in prev {
            occ_prev[v] = usize::MAX;
        }
        if let Some(v) = failure {
            return Err(v);
        }
        for &v in next.iter() {
            occ_prev[v] = occ_next[v];
            occ_next[v] = usize::MAX;
        }
        prev = next;
    }
    Ok(())
}

pub fn validate_schedule(inst: &Instance, sched: &Schedule) -> Result<(), Violation> {
    validate_moves(&inst.graph, &inst.start, &sched.turns)?;
    let m = sched.makespan();
    let last = sched.at(&inst.start, m);
    let off: Vec<usize> = (0..inst.agents()).filter(|&a| last[a] != inst.target[a]).collect();
    if !off.is_empty() {
        return Err(Violation::new(m, off, Rule::Target));
    }
    check_limit(inst.limit, m)
}

fn check_limit(limit: Option<usize>, m: usize) -> Result<(), Violation> {
    match limit {
        Some(l) if m > l => Err(Violation::new(l + 1, vec![], Rule::Limit)),
        _ => Ok(()),
    }
}

/// One agent group of a colored instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub id: usize,
    pub starts: Vec<usize>,
    pub targets: Vec<usize>,
}

/// Colored MAPF: groups only need to fill their target sets collectively.
///
/// Agents are numbered group by group, in the order of each group's starts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColoredInstance {
    pub graph: Graph,
    pub groups: Vec<Group>,
    pub limit: Option<usize>,
}

impl ColoredInstance {
    pub fn new(graph: Graph, groups: Vec<Group>, limit: Option<usize>) -> Result<Self, ModelError> {
        let n = graph.n();
        for g in &groups {
            if g.starts.len() != g.targets.len() {
                return Err(ModelError::GroupSize(g.id, g.starts.len(), g.targets.len()));
            }
        }
        let all_starts: Vec<usize> = groups.iter().flat_map(|g| g.starts.iter().copied()).collect();
        let all_targets: Vec<usize> = groups.iter().flat_map(|g| g.targets.iter().copied()).collect();
        check_injective(&all_starts, n, ModelError::GroupOverlap)?;
        check_injective(&all_targets, n, ModelError::GroupOverlap)?;
        Ok(ColoredInstance { graph, groups, limit })
    }

    pub fn start(&self) -> Placement {
        self.groups.iter().flat_map(|g| g.starts.iter().copied()).collect()
    }

    /// Group index of every agent.
    pub fn agent_groups(&self) -> Vec<usize> {
        self.groups.iter().enumerate().flat_map(|(i, g)| std::iter::repeat_n(i, g.starts.len())).collect()
    }
}

pub fn validate_colored_schedule(inst: &ColoredInstance, sched: &Schedule) -> Result<(), Violation> {
    let start = inst.start();
    validate_moves(&inst.graph, &start, &sched.turns)?;
    let m = sched.makespan();
    let last = sched.at(&start, m);
    let mut owner = vec![usize::MAX; inst.graph.n()];
    for (i, g) in inst.groups.iter().enumerate() {
        for &v in &g.targets {
            owner[v] = i;
        }
    }
    let off: Vec<usize> =
        inst.agent_groups().into_iter().enumerate().filter(|&(a, gi)| owner[last[a]] != gi).map(|(a, _)| a).collect();
    if !off.is_empty() {
        return Err(Violation::new(m, off, Rule::Target));
    }
    check_limit(inst.limit, m)
}
