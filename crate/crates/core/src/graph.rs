//! Simple undirected graphs, complements, exact vertex cover and the
//! clique split used by the distance-to-clique pipeline.

use std::collections::VecDeque;

use thiserror::Error;

/// Budget used by [`min_vertex_cover`] callers that do not pass their own.
pub const DEFAULT_COVER_BUDGET: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {0} out of range for a graph on {1} vertices")]
    VertexOutOfRange(usize, usize),
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge {0}-{1} given twice")]
    ParallelEdge(usize, usize),
}

/// Simple undirected graph on vertices `0..n`.
///
/// Neighbor lists are kept sorted so that iteration order is the vertex-id
/// order everywhere downstream.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Graph {
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n] }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    pub fn complete(n: usize) -> Self {
        let adj = (0..n).map(|v| (0..n).filter(|&u| u != v).collect()).collect();
        Graph { adj }
    }

    pub fn path(n: usize) -> Self {
        let mut g = Graph::new(n);
        for v in 1..n {
            g.add_edge(v - 1, v).expect("path edges are simple");
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Graph::path(n);
        if n >= 3 {
            g.add_edge(n - 1, 0).expect("cycle closing edge is simple");
        }
        g
    }

    /// Star with center 0 and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let mut g = Graph::new(leaves + 1);
        for v in 1..=leaves {
            g.add_edge(0, v).expect("star edges are simple");
        }
        g
    }

    pub fn add_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.adj.len() - 1
    }

    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<(), GraphError> {
        let n = self.adj.len();
        if u >= n {
            return Err(GraphError::VertexOutOfRange(u, n));
        }
        if v >= n {
            return Err(GraphError::VertexOutOfRange(v, n));
        }
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Err(GraphError::ParallelEdge(u.min(v), u.max(v))),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                Ok(())
            }
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.len()
    }

    /// Sorted open neighborhood.
    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// Sorted closed neighborhood.
    pub fn closed_neighborhood(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.adj[v].len() + 1);
        let pos = self.adj[v].partition_point(|&u| u < v);
        out.extend_from_slice(&self.adj[v][..pos]);
        out.push(v);
        out.extend_from_slice(&self.adj[v][pos..]);
        out
    }

    #[inline]
    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.adj.len() && self.adj[u].binary_search(&v).is_ok()
    }

    /// `v` equals `u` or is adjacent to it.
    #[inline]
    pub fn in_closed_neighborhood(&self, u: usize, v: usize) -> bool {
        u == v || self.has_edge(u, v)
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, ns)| ns.iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
    }

    pub fn is_complete(&self) -> bool {
        let n = self.n();
        self.adj.iter().all(|ns| ns.len() + 1 == n)
    }

    /// Subgraph induced by `vertices`; local id `i` stands for `vertices[i]`.
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = vec![usize::MAX; self.n()];
        for (i, &v) in vertices.iter().enumerate() {
            local[v] = i;
        }
        let adj = vertices
            .iter()
            .map(|&v| {
                let mut ns: Vec<usize> =
                    self.adj[v].iter().filter_map(|&u| (local[u] != usize::MAX).then_some(local[u])).collect();
                ns.sort_unstable();
                ns
            })
            .collect();
        Graph { adj }
    }

    /// Hop distances from `source`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            for &u in &self.adj[v] {
                if dist[u] == usize::MAX {
                    dist[u] = dist[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        dist
    }

    pub fn is_connected(&self) -> bool {
        self.n() == 0 || self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    pub fn is_tree(&self) -> bool {
        self.n() > 0 && self.edge_count() + 1 == self.n() && self.is_connected()
    }

    pub fn leaves(&self) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.degree(v) == 1).collect()
    }
}

pub fn complement(g: &Graph) -> Graph {
    let n = g.n();
    let adj = (0..n).map(|v| (0..n).filter(|&u| u != v && !g.has_edge(u, v)).collect()).collect();
    Graph { adj }
}

pub fn is_clique(g: &Graph, s: &[usize]) -> bool {
    s.iter().enumerate().all(|(i, &u)| s[i + 1..].iter().all(|&v| u != v && g.has_edge(u, v)))
}

/// Partition of the vertices into a modulator and a clique.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueSplit {
    pub modulator: Vec<usize>,
    pub clique: Vec<usize>,
}

impl CliqueSplit {
    /// Builds a split from a modulator; the clique is the sorted remainder.
    pub fn from_modulator(n: usize, modulator: &[usize]) -> Self {
        let mut in_m = vec![false; n];
        for &v in modulator {
            in_m[v] = true;
        }
        let mut modulator = modulator.to_vec();
        modulator.sort_unstable();
        modulator.dedup();
        let clique = (0..n).filter(|&v| !in_m[v]).collect();
        CliqueSplit { modulator, clique }
    }

    pub fn dc(&self) -> usize {
        self.modulator.len()
    }

    /// Membership mask for the modulator over `0..n`.
    pub fn modulator_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.modulator {
            mask[v] = true;
        }
        mask
    }

    pub fn is_valid_for(&self, g: &Graph) -> bool {
        let mut seen = vec![0u8; g.n()];
        for &v in self.modulator.iter().chain(&self.clique) {
            if v >= g.n() {
                return false;
            }
            seen[v] += 1;
        }
        seen.iter().all(|&c| c == 1) && is_clique(g, &self.clique)
    }
}

/// Minimum-size clique modulator, taken as the lexicographically smallest
/// minimum vertex cover of the complement.
pub fn clique_split(g: &Graph) -> CliqueSplit {
    let comp = complement(g);
    let cover = min_vertex_cover(&comp, g.n()).expect("every graph has a cover of size n");
    CliqueSplit::from_modulator(g.n(), &cover)
}

/// Minimum vertex cover if its size is at most `budget`.
///
/// Among covers of minimum size the lexicographically smallest sorted vertex
/// list is returned.
pub fn min_vertex_cover(g: &Graph, budget: usize) -> Option<Vec<usize>> {
    let base = Residual::new(g);
    let size = (0..=budget.min(g.n())).find(|&k| base.clone().decide(k))?;

    let mut state = base;
    let mut remaining = size;
    for v in 0..g.n() {
        if !state.alive[v] {
            continue;
        }
        if state.deg[v] == 0 {
            state.remove(v);
            continue;
        }
        let mut trial = state.clone();
        trial.take(v);
        if remaining >= 1 && trial.clone().decide(remaining - 1) {
            state = trial;
            remaining -= 1;
        } else {
            let forced: Vec<usize> = state.alive_neighbors(v).collect();
            for u in forced {
                state.take(u);
                remaining -= 1;
            }
            state.remove(v);
        }
    }
    debug_assert_eq!(state.cover.len(), size);
    let mut cover = state.cover;
    cover.sort_unstable();
    Some(cover)
}

#[derive(Clone)]
struct Residual<'a> {
    g: &'a Graph,
    alive: Vec<bool>,
    deg: Vec<usize>,
    edges: usize,
    cover: Vec<usize>,
}

impl<'a> Residual<'a> {
    fn new(g: &'a Graph) -> Self {
        Residual {
            g,
            alive: vec![true; g.n()],
            deg: (0..g.n()).map(|v| g.degree(v)).collect(),
            edges: g.edge_count(),
            cover: Vec::new(),
        }
    }

    fn alive_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.g.neighbors(v).iter().copied().filter(move |&u| self.alive[u])
    }

    fn remove(&mut self, v: usize) {
        if !self.alive[v] {
            return;
        }
        self.alive[v] = false;
        self.edges -= self.deg[v];
        for &u in self.g.neighbors(v) {
            if self.alive[u] {
                self.deg[u] -= 1;
            }
        }
        self.deg[v] = 0;
    }

    fn take(&mut self, v: usize) {
        self.cover.push(v);
        self.remove(v);
    }

    /// Whether the residual edges admit a cover of at most `k` more vertices.
    fn decide(mut self, k: usize) -> bool {
        let mut k = k;
        let mut queue: Vec<usize> = (0..self.g.n()).filter(|&v| self.alive[v] && self.deg[v] <= 1).collect();
        while let Some(v) = queue.pop() {
            if !self.alive[v] {
                continue;
            }
            match self.deg[v] {
                0 => self.remove(v),
                1 => {
                    if k == 0 {
                        return false;
                    }
                    let u = self.alive_neighbors(v).next().expect("degree one");
                    let touched: Vec<usize> = self.alive_neighbors(u).collect();
                    self.take(u);
                    k -= 1;
                    self.remove(v);
                    queue.extend(touched.into_iter().filter(|&w| self.alive[w] && self.deg[w] <= 1));
                }
                _ => {}
            }
        }
        if self.edges == 0 {
            return true;
        }
        if k == 0 || self.edges > k * self.max_degree() {
            return false;
        }
        let (u, v) = self.first_edge();
        let mut left = self.clone();
        left.take(u);
        if left.decide(k - 1) {
            return true;
        }
        self.take(v);
        self.decide(k - 1)
    }

    fn max_degree(&self) -> usize {
        self.deg.iter().copied().max().unwrap_or(0)
    }

    fn first_edge(&self) -> (usize, usize) {
        (0..self.g.n())
            .filter(|&u| self.alive[u])
            .find_map(|u| self.alive_neighbors(u).next().map(|v| (u, v)))
            .expect("residual has an edge")
    }
}
