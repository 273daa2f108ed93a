use std::collections::BTreeSet;

use crate::graph::{CliqueSplit, Graph};
use crate::model::{Instance, Placement};

use super::{kappa, KernelError};

/// Clique vertices sharing one modulator neighborhood.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexType {
    pub id: usize,
    pub signature: Vec<usize>,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentType {
    /// Start or target in the modulator.
    Touching,
    /// Start in the first vertex type, target in the second.
    Pair(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Typing {
    pub vertex_types: Vec<VertexType>,
    /// Vertex type of every clique vertex, `None` on the modulator.
    pub type_of: Vec<Option<usize>>,
    pub agent_types: Vec<AgentType>,
}

/// Types are numbered by their smallest member.
pub fn classify_types(inst: &Instance, split: &CliqueSplit) -> Typing {
    let g = &inst.graph;
    let mut vertex_types: Vec<VertexType> = Vec::new();
    let mut type_of = vec![None; g.n()];
    for &q in &split.clique {
        let signature: Vec<usize> = split.modulator.iter().copied().filter(|&m| g.has_edge(q, m)).collect();
        let id = match vertex_types.iter().position(|t| t.signature == signature) {
            Some(id) => id,
            None => {
                vertex_types.push(VertexType { id: vertex_types.len(), signature, members: Vec::new() });
                vertex_types.len() - 1
            }
        };
        vertex_types[id].members.push(q);
        type_of[q] = Some(id);
    }
    let agent_types = (0..inst.agents())
        .map(|a| match (type_of[inst.start[a]], type_of[inst.target[a]]) {
            (Some(s), Some(t)) => AgentType::Pair(s, t),
            _ => AgentType::Touching,
        })
        .collect();
    Typing { vertex_types, type_of, agent_types }
}

/// Result of the core-agent fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreAgents {
    /// Touching agents plus the per-type truncation.
    pub seed: Vec<usize>,
    /// Closure of `seed` under the small-type absorption rule.
    pub fixpoint: Vec<usize>,
    pub rounds: usize,
    /// Agents kept in the kernel: everyone, or `fixpoint` when it is small
    /// compared to the whole agent set.
    pub core: Vec<usize>,
}

/// Agents with start or target type `tau`, touching agents excluded.
fn agents_of_type(typing: &Typing, tau: usize) -> impl Iterator<Item = usize> + '_ {
    typing.agent_types.iter().enumerate().filter_map(move |(a, t)| match *t {
        AgentType::Pair(s, u) if s == tau || u == tau => Some(a),
        _ => None,
    })
}

pub fn select_core_agents(inst: &Instance, split: &CliqueSplit, typing: &Typing) -> CoreAgents {
    let kap = kappa(split.dc()).unwrap_or(usize::MAX);
    let mut seed: BTreeSet<usize> = BTreeSet::new();
    let mut taken: std::collections::HashMap<AgentType, usize> = std::collections::HashMap::new();
    for (a, &t) in typing.agent_types.iter().enumerate() {
        match t {
            AgentType::Touching => {
                seed.insert(a);
            }
            pair => {
                let c = taken.entry(pair).or_insert(0);
                if *c < kap {
                    *c += 1;
                    seed.insert(a);
                }
            }
        }
    }

    let mut current = seed.clone();
    let mut rounds = 0;
    loop {
        let grow = typing.vertex_types.iter().find_map(|vt| {
            if vt.members.len() > 3 * current.len() {
                return None;
            }
            let fresh: Vec<usize> = agents_of_type(typing, vt.id).filter(|a| !current.contains(a)).collect();
            (!fresh.is_empty()).then_some(fresh)
        });
        match grow {
            Some(fresh) => {
                current.extend(fresh);
                rounds += 1;
            }
            None => break,
        }
    }

    let all = inst.agents();
    let core: Vec<usize> =
        if all <= (2 * current.len()).max(100) { (0..all).collect() } else { current.iter().copied().collect() };
    CoreAgents { seed: seed.into_iter().collect(), fixpoint: current.into_iter().collect(), rounds, core }
}

/// Reduced instance on `U` with the core agents only.
///
/// Local vertex `i` is `vertices[i]` and local agent `j` is `agents[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kernel {
    pub vertices: Vec<usize>,
    pub agents: Vec<usize>,
    pub graph: Graph,
    pub start: Placement,
    pub target: Placement,
    /// Local modulator mask.
    pub in_modulator: Vec<bool>,
    /// Kept clique vertices of each vertex type (original ids).
    pub kept: Vec<Vec<usize>>,
    /// Minimum number of core agents on the modulator at intermediate turns.
    pub k: usize,
}

impl Kernel {
    pub fn instance(&self) -> Instance {
        Instance::new(self.graph.clone(), self.start.clone(), self.target.clone(), None)
            .expect("kernel maps are injective")
    }

    pub fn global_placement(&self, local: &[usize]) -> Placement {
        local.iter().map(|&v| self.vertices[v]).collect()
    }

    pub fn modulator_occupancy(&self, local: &[usize]) -> usize {
        local.iter().filter(|&&v| self.in_modulator[v]).count()
    }
}

pub fn build_kernel(
    inst: &Instance,
    split: &CliqueSplit,
    typing: &Typing,
    core: &[usize],
) -> Result<Kernel, KernelError> {
    let n = inst.graph.n();
    let cap = 3 * core.len();
    let mut endpoint = vec![false; n];
    for &a in core {
        endpoint[inst.start[a]] = true;
        endpoint[inst.target[a]] = true;
    }
    let mut keep = split.modulator_mask(n);
    let mut kept = Vec::with_capacity(typing.vertex_types.len());
    for vt in &typing.vertex_types {
        let chosen: Vec<usize> = if vt.members.len() <= cap {
            vt.members.clone()
        } else {
            let mut chosen: Vec<usize> = vt.members.iter().copied().filter(|&v| endpoint[v]).collect();
            let pad = cap - chosen.len();
            chosen.extend(vt.members.iter().copied().filter(|&v| !endpoint[v]).take(pad));
            chosen.sort_unstable();
            chosen
        };
        for &v in &chosen {
            keep[v] = true;
        }
        kept.push(chosen);
    }
    let vertices: Vec<usize> = (0..n).filter(|&v| keep[v]).collect();
    let mut local = vec![usize::MAX; n];
    for (i, &v) in vertices.iter().enumerate() {
        local[v] = i;
    }
    let map = |v: usize| -> Result<usize, KernelError> {
        match local[v] {
            usize::MAX => Err(KernelError::Precondition(format!("core endpoint {v} missing from the kernel"))),
            l => Ok(l),
        }
    };
    let mut agents = core.to_vec();
    agents.sort_unstable();
    let start = agents.iter().map(|&a| map(inst.start[a])).collect::<Result<_, _>>()?;
    let target = agents.iter().map(|&a| map(inst.target[a])).collect::<Result<_, _>>()?;
    let m_mask = split.modulator_mask(n);
    Ok(Kernel {
        graph: inst.graph.induced(&vertices),
        in_modulator: vertices.iter().map(|&v| m_mask[v]).collect(),
        vertices,
        agents,
        start,
        target,
        kept,
        k: inst.agents().saturating_sub(split.clique.len()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::clique_split;

    /// Clique on `0..q` plus one modulator vertex adjacent to `0..half`.
    fn half_attached(q: usize, half: usize) -> (Graph, CliqueSplit) {
        let mut g = Graph::complete(q);
        let m = g.add_vertex();
        for v in 0..half {
            g.add_edge(m, v).unwrap();
        }
        let split = CliqueSplit::from_modulator(q + 1, &[m]);
        (g, split)
    }

    #[test]
    fn empty_modulator_gives_one_type() {
        let g = Graph::complete(5);
        let split = clique_split(&g);
        let inst = Instance::new(g, vec![0, 1], vec![1, 0], None).unwrap();
        let typing = classify_types(&inst, &split);
        assert_eq!(typing.vertex_types.len(), 1);
        assert_eq!(typing.vertex_types[0].members, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn half_attached_modulator_gives_two_types() {
        let (g, split) = half_attached(6, 3);
        let inst = Instance::new(g, vec![6, 0], vec![4, 5], None).unwrap();
        let typing = classify_types(&inst, &split);
        assert_eq!(typing.vertex_types.len(), 2);
        assert_eq!(typing.vertex_types[0].signature, vec![6]);
        assert_eq!(typing.vertex_types[1].members, vec![3, 4, 5]);
        assert_eq!(typing.agent_types, vec![AgentType::Touching, AgentType::Pair(0, 1)]);
    }

    #[test]
    fn few_agents_keep_everyone() {
        let (g, split) = half_attached(6, 3);
        let inst = Instance::new(g, vec![6, 0], vec![4, 5], None).unwrap();
        let typing = classify_types(&inst, &split);
        let core = select_core_agents(&inst, &split, &typing);
        assert_eq!(core.core, vec![0, 1]);
    }

    #[test]
    fn large_types_stop_at_the_seed() {
        // 300 agents of one pair type, kappa(1) = 100, both types far larger
        // than three times the seed.
        let (g, split) = half_attached(1400, 700);
        let start: Vec<usize> = (0..300).collect();
        let target: Vec<usize> = (300..600).collect();
        let inst = Instance::new(g, start, target, None).unwrap();
        let typing = classify_types(&inst, &split);
        let core = select_core_agents(&inst, &split, &typing);
        assert_eq!(core.seed, (0..100).collect::<Vec<_>>());
        assert_eq!(core.fixpoint, core.seed);
        assert_eq!(core.rounds, 0);
        assert_eq!(core.core, core.seed);
    }

    #[test]
    fn small_type_is_absorbed() {
        // Type 0 has 600 vertices, exactly three times the 200-agent seed, so
        // the 50 type-0 agents cut off by kappa join in one round.
        let (g, split) = half_attached(1600, 600);
        let mut start: Vec<usize> = (0..150).collect();
        let mut target: Vec<usize> = (150..300).collect();
        start.extend(600..750);
        target.extend(750..900);
        let inst = Instance::new(g, start, target, None).unwrap();
        let typing = classify_types(&inst, &split);
        let core = select_core_agents(&inst, &split, &typing);
        assert_eq!(core.seed.len(), 200);
        assert!(!core.seed.contains(&120));
        assert_eq!(core.fixpoint.len(), 250);
        assert!(core.fixpoint.contains(&120));
        assert_eq!(core.rounds, 1);
        assert_eq!(core.core.len(), 300);
    }

    #[test]
    fn kernel_trims_large_types() {
        let (g, split) = half_attached(12, 2);
        let inst = Instance::new(g, vec![12, 5], vec![3, 9], None).unwrap();
        let typing = classify_types(&inst, &split);
        let core = select_core_agents(&inst, &split, &typing);
        let kernel = build_kernel(&inst, &split, &typing, &core.core).unwrap();
        assert_eq!(kernel.kept[0], vec![0, 1]);
        assert_eq!(kernel.kept[1].len(), 6);
        for v in [3, 5, 9] {
            assert!(kernel.kept[1].contains(&v));
        }
        assert_eq!(kernel.vertices.len(), 1 + 2 + 6);
        assert_eq!(kernel.k, 0);
        assert_eq!(kernel.global_placement(&kernel.start), inst.start);
    }

    #[test]
    fn untrimmed_kernel_is_the_instance() {
        let (g, split) = half_attached(5, 2);
        let inst = Instance::new(g, vec![5, 0, 1], vec![0, 1, 2], None).unwrap();
        let typing = classify_types(&inst, &split);
        let core = select_core_agents(&inst, &split, &typing);
        let kernel = build_kernel(&inst, &split, &typing, &core.core).unwrap();
        assert_eq!(kernel.instance(), inst);
    }
}
