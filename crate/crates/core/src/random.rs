//! Seeded random instances with a prescribed distance to clique.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{clique_split, Graph};
use crate::model::{Instance, ModelError};

/// Rejection sampling gives up after this many graphs.
const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RandomError {
    #[error("distance to clique {dc} is impossible on {vertices} vertices")]
    Parameters { vertices: usize, dc: usize },
    #[error("{agents} agents do not fit on {vertices} vertices")]
    TooManyAgents { agents: usize, vertices: usize },
    #[error("no connected graph with distance to clique {0} found")]
    Exhausted(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Connected graph on `vertices` vertices whose distance to clique is
/// exactly `dc`, plus `agents` agents with distinct random starts and
/// targets. The same arguments always give the same instance.
pub fn random_instance(vertices: usize, dc: usize, agents: usize, seed: u64) -> Result<Instance, RandomError> {
    // A connected graph on two or more vertices keeps an edge as its clique.
    if vertices == 0 || dc > vertices.saturating_sub(2) {
        return Err(RandomError::Parameters { vertices, dc });
    }
    if agents > vertices {
        return Err(RandomError::TooManyAgents { agents, vertices });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = if vertices - dc > dc { planted(vertices, dc, &mut rng) } else { rejection(vertices, dc, &mut rng)? };
    let start: Vec<usize> = index::sample(&mut rng, vertices, agents).into_vec();
    let target: Vec<usize> = index::sample(&mut rng, vertices, agents).into_vec();
    Ok(Instance::new(graph, start, target, None)?)
}

/// Clique on `n - dc` vertices plus a modulator whose `i`-th vertex misses
/// clique vertex `i`. The misses form a matching in the complement, so no
/// smaller modulator exists.
fn planted(n: usize, dc: usize, rng: &mut ChaCha8Rng) -> Graph {
    let q = n - dc;
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    let (clique, modulator) = ids.split_at(q);
    let mut g = Graph::new(n);
    for (i, &u) in clique.iter().enumerate() {
        for &v in &clique[i + 1..] {
            g.add_edge(u, v).expect("distinct vertices");
        }
    }
    for (i, &m) in modulator.iter().enumerate() {
        let others: Vec<usize> = clique
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &v)| v)
            .chain(modulator[..i].iter().copied())
            .collect();
        let mut linked = false;
        for &v in &others {
            if rng.gen_bool(0.5) {
                g.add_edge(m, v).expect("distinct vertices");
                linked |= clique.contains(&v);
            }
        }
        if !linked {
            let anchor = clique[if i == 0 { 1 } else { 0 }];
            if !g.has_edge(m, anchor) {
                g.add_edge(m, anchor).expect("distinct vertices");
            }
        }
    }
    g
}

fn rejection(n: usize, dc: usize, rng: &mut ChaCha8Rng) -> Result<Graph, RandomError> {
    for _ in 0..MAX_ATTEMPTS {
        // Sparse graphs are needed for large distances, so the density varies.
        let density = rng.gen_range(0.1..0.9);
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(density) {
                    g.add_edge(u, v).expect("distinct vertices");
                }
            }
        }
        if g.is_connected() && clique_split(&g).dc() == dc {
            return Ok(g);
        }
    }
    Err(RandomError::Exhausted(dc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prescribed_distance_to_clique() {
        for seed in 0..40 {
            for n in 1..=8usize {
                for dc in 0..=n.saturating_sub(2) {
                    let Ok(inst) = random_instance(n, dc, n.min(3), seed) else {
                        panic!("n={n} dc={dc} seed={seed}");
                    };
                    assert_eq!(clique_split(&inst.graph).dc(), dc, "n={n} seed={seed}");
                    assert!(inst.graph.is_connected());
                }
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(random_instance(7, 2, 4, 9).unwrap(), random_instance(7, 2, 4, 9).unwrap());
        assert_ne!(random_instance(7, 2, 4, 9).unwrap(), random_instance(7, 2, 4, 10).unwrap());
    }

    #[test]
    fn bad_parameters() {
        assert!(matches!(random_instance(3, 2, 1, 0), Err(RandomError::Parameters { .. })));
        assert!(matches!(random_instance(3, 0, 4, 0), Err(RandomError::TooManyAgents { .. })));
    }
}
