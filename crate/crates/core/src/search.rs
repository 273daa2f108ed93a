//! Breadth-first search over joint placements.
//!
//! Both the brute-force oracle and the kernel configuration search run on
//! this engine; the latter passes an admissibility filter for intermediate
//! states.

use rustc_hash::FxHashSet;
use thiserror::Error;

use crate::graph::Graph;
use crate::model::Schedule;

/// Default limit on the number of stored states.
pub const DEFAULT_STATE_GUARD: usize = 50_000_000;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("search stopped after storing {0} states (guard)")]
    StateGuard(usize),
}

/// Injective agent-indexed placement, one node of the configuration graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct JointState {
    pub positions: Vec<usize>,
}

impl JointState {
    pub fn is_injective(&self) -> bool {
        let mut seen: Vec<usize> = self.positions.clone();
        seen.sort_unstable();
        seen.windows(2).all(|w| w[0] != w[1])
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    pub schedule: Option<Schedule>,
    pub states: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    /// Largest makespan considered.
    pub cap: usize,
    /// Maximum number of stored states before giving up.
    pub guard: usize,
}

impl SearchLimits {
    pub fn new(cap: usize) -> Self {
        SearchLimits { cap, guard: DEFAULT_STATE_GUARD }
    }
}

enum Seen {
    Packed { bits: u32, set: FxHashSet<u128> },
    Wide(FxHashSet<Box<[u32]>>),
}

impl Seen {
    fn new(n: usize, agents: usize) -> Self {
        let bits = usize::BITS - n.max(1).leading_zeros();
        if bits as usize * agents <= 128 {
            Seen::Packed { bits, set: FxHashSet::default() }
        } else {
            Seen::Wide(FxHashSet::default())
        }
    }

    fn insert(&mut self, state: &[u32]) -> bool {
        match self {
            Seen::Packed { bits, set } => {
                let key = state.iter().fold(0u128, |acc, &v| (acc << *bits) | v as u128);
                set.insert(key)
            }
            Seen::Wide(set) => {
                if set.contains(state) {
                    false
                } else {
                    set.insert(state.into())
                }
            }
        }
    }
}

struct Expander<'a> {
    options: &'a [Vec<u32>],
    dist: &'a [Vec<usize>],
    prev: Vec<u32>,
    next: Vec<u32>,
    occ_prev: Vec<u32>,
    occ_next: Vec<u32>,
    slack: usize,
}

impl Expander<'_> {
    /// Enumerates successors of `prev` in lexicographic order, stopping as
    /// soon as `emit` returns true.
    fn run(&mut self, a: usize, emit: &mut dyn FnMut(&[u32]) -> bool) -> bool {
        if a == self.prev.len() {
            return emit(&self.next);
        }
        let here = self.prev[a] as usize;
        for &w in &self.options[here] {
            let wu = w as usize;
            if self.occ_next[wu] != NONE || self.dist[a][wu] > self.slack {
                continue;
            }
            let b = self.occ_prev[wu];
            if b != NONE && (b as usize) < a && self.next[b as usize] == here as u32 {
                continue;
            }
            self.next[a] = w;
            self.occ_next[wu] = a as u32;
            let stop = self.run(a + 1, emit);
            self.occ_next[wu] = NONE;
            if stop {
                return true;
            }
        }
        false
    }
}

/// Shortest schedule from `start` to `target` with makespan at most
/// `limits.cap`. Intermediate states must satisfy `admissible`; the start and
/// target placements are exempt.
pub fn shortest_schedule(
    graph: &Graph,
    start: &[usize],
    target: &[usize],
    limits: SearchLimits,
    admissible: &dyn Fn(&[u32]) -> bool,
) -> Result<SearchOutcome, SearchError> {
    let agents = start.len();
    if start == target {
        return Ok(SearchOutcome { schedule: Some(Schedule::empty()), states: 1 });
    }
    let n = graph.n();
    let dist: Vec<Vec<usize>> = target.iter().map(|&t| graph.bfs_distances(t)).collect();
    if (0..agents).any(|a| dist[a][start[a]] > limits.cap) {
        return Ok(SearchOutcome { schedule: None, states: 1 });
    }
    let options: Vec<Vec<u32>> =
        (0..n).map(|v| graph.closed_neighborhood(v).into_iter().map(|u| u as u32).collect()).collect();
    let goal: Vec<u32> = target.iter().map(|&v| v as u32).collect();

    let mut arena: Vec<u32> = start.iter().map(|&v| v as u32).collect();
    let mut parent: Vec<u32> = vec![NONE];
    let mut seen = Seen::new(n, agents);
    seen.insert(&arena);

    let mut ex = Expander {
        options: &options,
        dist: &dist,
        prev: vec![0; agents],
        next: vec![0; agents],
        occ_prev: vec![NONE; n],
        occ_next: vec![NONE; n],
        slack: 0,
    };

    let mut layer = 0..1usize;
    let mut depth = 0usize;
    let mut found: Option<usize> = None;
    let mut overflow = false;
    while !layer.is_empty() && depth < limits.cap && found.is_none() {
        ex.slack = limits.cap - depth - 1;
        let layer_end = parent.len();
        for idx in layer.clone() {
            ex.prev.copy_from_slice(&arena[idx * agents..(idx + 1) * agents]);
            for (a, &v) in ex.prev.iter().enumerate() {
                ex.occ_prev[v as usize] = a as u32;
            }
            let mut emit = |next: &[u32]| -> bool {
                let is_goal = next == goal.as_slice();
                if !is_goal && !admissible(next) {
                    return false;
                }
                if !seen.insert(next) {
                    return false;
                }
                arena.extend_from_slice(next);
                parent.push(idx as u32);
                if is_goal {
                    found = Some(parent.len() - 1);
                    return true;
                }
                if parent.len() > limits.guard {
                    overflow = true;
                    return true;
                }
                false
            };
            let stop = ex.run(0, &mut emit);
            for &v in &ex.prev {
                ex.occ_prev[v as usize] = NONE;
            }
            if overflow {
                return Err(SearchError::StateGuard(parent.len()));
            }
            if stop {
                break;
            }
        }
        layer = layer_end..parent.len();
        depth += 1;
    }

    let states = parent.len();
    let schedule = found.map(|mut idx| {
        let mut turns = Vec::new();
        while parent[idx] != NONE {
            turns.push(arena[idx * agents..(idx + 1) * agents].iter().map(|&v| v as usize).collect());
            idx = parent[idx] as usize;
        }
        turns.reverse();
        Schedule::new(turns)
    });
    Ok(SearchOutcome { schedule, states })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_and_wide_keys_agree() {
        let mut packed = Seen::new(8, 3);
        let mut wide = Seen::Wide(FxHashSet::default());
        for s in [[1u32, 2, 3], [3, 2, 1], [1, 2, 3]] {
            assert_eq!(packed.insert(&s), wide.insert(&s));
        }
        assert!(matches!(Seen::new(1 << 20, 8), Seen::Wide(_)));
    }

    #[test]
    fn joint_state_injectivity() {
        assert!(JointState { positions: vec![0, 2, 1] }.is_injective());
        assert!(!JointState { positions: vec![0, 2, 0] }.is_injective());
    }
}
