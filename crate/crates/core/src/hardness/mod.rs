//! Instance generators for the two hardness reductions on trees, with
//! witness schedules for yes-instances built from a certificate.

mod pancake;
mod three_partition;

pub use pancake::{
    build_colored_pancake_instance, build_pancake_instance, colored_pancake_forward_schedule, pancake_forward_schedule,
    PancakeInstance,
};
pub use three_partition::{
    build_three_partition_instance, preprocess_three_partition, three_partition_forward_schedule,
    ThreePartitionInstance,
};

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::Graph;
use crate::model::{ModelError, Schedule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HardnessError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error("name {0} registered twice")]
    DuplicateName(String),
    #[error("missing registry entry {0}")]
    MissingName(String),
    #[error("witness construction failed: {0}")]
    Witness(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Names for the vertices and agent groups of a generated instance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GadgetRegistry {
    vertices: BTreeMap<String, usize>,
    groups: BTreeMap<String, Vec<usize>>,
    /// Free-form markers such as `trivial-yes`.
    pub flags: Vec<String>,
}

impl GadgetRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, name: impl Into<String>, id: usize) -> Result<(), HardnessError> {
        let name = name.into();
        if self.vertices.contains_key(&name) {
            return Err(HardnessError::DuplicateName(name));
        }
        self.vertices.insert(name, id);
        Ok(())
    }

    pub fn add_group(&mut self, name: impl Into<String>, agents: Vec<usize>) -> Result<(), HardnessError> {
        let name = name.into();
        if self.groups.contains_key(&name) {
            return Err(HardnessError::DuplicateName(name));
        }
        self.groups.insert(name, agents);
        Ok(())
    }

    pub fn vertex(&self, name: &str) -> Result<usize, HardnessError> {
        self.vertices.get(name).copied().ok_or_else(|| HardnessError::MissingName(name.into()))
    }

    pub fn group(&self, name: &str) -> Result<&[usize], HardnessError> {
        self.groups.get(name).map(Vec::as_slice).ok_or_else(|| HardnessError::MissingName(name.into()))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&str, usize)> {
        self.vertices.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn groups(&self) -> impl Iterator<Item = (&str, &[usize])> {
        self.groups.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Sidecar text: vertices by id, then groups by their first agent.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for flag in &self.flags {
            writeln!(out, "flag {flag}").unwrap();
        }
        let mut vs: Vec<(&String, &usize)> = self.vertices.iter().collect();
        vs.sort_by_key(|&(name, &id)| (id, name.clone()));
        for (name, id) in vs {
            writeln!(out, "name {name} vertex {id}").unwrap();
        }
        let mut gs: Vec<(&String, &Vec<usize>)> = self.groups.iter().collect();
        gs.sort_by_key(|&(name, ids)| (ids.first().copied().unwrap_or(usize::MAX), name.clone()));
        for (name, ids) in gs {
            write!(out, "name {name} agents").unwrap();
            for id in ids {
                write!(out, " {id}").unwrap();
            }
            out.push('\n');
        }
        out
    }
}

/// Unique path between two vertices of a tree.
pub(crate) fn tree_path(graph: &Graph, from: usize, to: usize) -> Vec<usize> {
    let mut parent = vec![usize::MAX; graph.n()];
    parent[to] = to;
    let mut queue = std::collections::VecDeque::from([to]);
    while let Some(v) = queue.pop_front() {
        if v == from {
            break;
        }
        for &u in graph.neighbors(v) {
            if parent[u] == usize::MAX {
                parent[u] = v;
                queue.push_back(u);
            }
        }
    }
    let mut path = vec![from];
    let mut v = from;
    while v != to {
        v = parent[v];
        path.push(v);
    }
    path
}

const FREE: u32 = u32::MAX;

/// Per-turn positions of every agent over a fixed horizon, used to compose
/// witness schedules from independent routes while ruling out collisions and
/// swaps. Agents are invisible until their first route is committed, so
/// cyclic shifts can be composed in any order.
pub(crate) struct Timeline {
    horizon: usize,
    pos: Vec<Vec<u32>>,
    occ: Vec<Vec<u32>>,
    committed: Vec<bool>,
}

impl Timeline {
    pub(crate) fn new(n: usize, start: &[usize], horizon: usize) -> Self {
        let pos: Vec<Vec<u32>> = start.iter().map(|&v| vec![v as u32; horizon + 1]).collect();
        Timeline { horizon, pos, occ: vec![vec![FREE; n]; horizon + 1], committed: vec![false; start.len()] }
    }

    pub(crate) fn at(&self, agent: usize, turn: usize) -> usize {
        self.pos[agent][turn] as usize
    }

    #[cfg(test)]
    pub(crate) fn occupant(&self, turn: usize, v: usize) -> Option<usize> {
        match self.occ[turn][v] {
            FREE => None,
            a => Some(a as usize),
        }
    }

    fn vertex_after(route: &[usize], depart: usize, turn: usize) -> usize {
        route[turn.saturating_sub(depart).min(route.len() - 1)]
    }

    /// Whether `agent` can follow `route` from turn `depart` (where it must be
    /// at `route[0]`) and then stay at the last vertex.
    pub(crate) fn fits(&self, agent: usize, depart: usize, route: &[usize]) -> bool {
        if route.is_empty() || depart + route.len() - 1 > self.horizon || self.at(agent, depart) != route[0] {
            return false;
        }
        let me = agent as u32;
        // A first commit also claims the start vertex up to the departure.
        let from = if self.committed[agent] { depart + 1 } else { 0 };
        for t in from..=self.horizon {
            let v = Self::vertex_after(route, depart, t);
            let o = self.occ[t][v];
            if o != FREE && o != me {
                return false;
            }
            if t == 0 {
                continue;
            }
            let p = Self::vertex_after(route, depart, t - 1);
            if p != v {
                let b = self.occ[t - 1][v];
                if b != FREE && b != me && self.pos[b as usize][t] as usize == p {
                    return false;
                }
            }
        }
        true
    }

    pub(crate) fn commit(&mut self, agent: usize, depart: usize, route: &[usize]) -> Result<(), HardnessError> {
        if !self.fits(agent, depart, route) {
            return Err(HardnessError::Witness(format!("agent {agent} cannot leave at turn {depart}")));
        }
        let from = if self.committed[agent] { depart + 1 } else { 0 };
        self.committed[agent] = true;
        for t in from..=self.horizon {
            let old = self.pos[agent][t] as usize;
            if self.occ[t][old] == agent as u32 {
                self.occ[t][old] = FREE;
            }
            let v = Self::vertex_after(route, depart, t);
            self.pos[agent][t] = v as u32;
            self.occ[t][v] = agent as u32;
        }
        Ok(())
    }

    /// Earliest departure in `from..` at which `route` fits.
    pub(crate) fn earliest(&self, agent: usize, from: usize, route: &[usize]) -> Option<usize> {
        (from..=self.horizon).find(|&t| self.at(agent, t) == route[0] && self.fits(agent, t, route))
    }

    pub(crate) fn into_schedule(self) -> Schedule {
        let agents = self.pos.len();
        let turns = (1..=self.horizon).map(|t| (0..agents).map(|a| self.pos[a][t] as usize).collect()).collect();
        Schedule::new(turns)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_round_trip_text() {
        let mut reg = GadgetRegistry::new();
        reg.add_vertex("hub", 0).unwrap();
        reg.add_vertex("leaf", 1).unwrap();
        reg.add_group("movers", vec![2, 3]).unwrap();
        assert!(matches!(reg.add_vertex("hub", 5), Err(HardnessError::DuplicateName(_))));
        assert_eq!(reg.serialize(), "name hub vertex 0\nname leaf vertex 1\nname movers agents 2 3\n");
        assert_eq!(reg.vertex("leaf"), Ok(1));
        assert!(reg.group("nobody").is_err());
    }

    #[test]
    fn path_in_a_tree() {
        let g = Graph::star(3);
        assert_eq!(tree_path(&g, 1, 3), vec![1, 0, 3]);
        assert_eq!(tree_path(&g, 2, 2), vec![2]);
    }

    #[test]
    fn timeline_rejects_swaps_and_collisions() {
        // Path 0-1-2 with agents on 0 and 2.
        let mut tl = Timeline::new(3, &[0, 2], 3);
        tl.commit(1, 0, &[2]).unwrap();
        tl.commit(0, 0, &[0, 1, 2]).unwrap_err();
        tl.commit(0, 0, &[0, 1]).unwrap();
        assert!(!tl.fits(1, 0, &[2, 1]));
        assert!(!tl.fits(1, 1, &[2, 1, 0]), "agent 0 parks on 1");
        assert_eq!(tl.earliest(1, 0, &[2, 2]), Some(0));
        // Uncommitted agents do not block a cyclic shift.
        let mut ring = Timeline::new(3, &[0, 1, 2], 1);
        for a in 0..3 {
            ring.commit(a, 0, &[a, (a + 1) % 3]).unwrap();
        }
        let mut swap = Timeline::new(2, &[0, 1], 1);
        swap.commit(0, 0, &[0, 1]).unwrap();
        assert!(!swap.fits(1, 0, &[1, 0]));
        let sched = tl.into_schedule();
        assert_eq!(sched.turns, vec![vec![1, 2]; 3]);
    }
}
