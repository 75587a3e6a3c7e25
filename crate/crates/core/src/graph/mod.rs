//! Undirected simple graphs, generators, vertex-weighted shortest paths and
//! Laplacian utilities.

mod generators;
mod io;
mod metric;

pub use generators::{generate, Family, FamilyName};
pub use io::{format_graph, format_weights, parse_graph, parse_weights};
pub use metric::{
    all_pairs_metric, hop_metric, vertex_weighted_distances, Metric, MetricOrigin, ShortestPaths,
    WeightFunction,
};

pub(crate) use metric::vertex_cost_dijkstra;

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Connected, undirected, simple graph on vertices `0..n`.
///
/// Edges are stored with `u < v` in lexicographic order; adjacency lists are
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    max_degree: usize,
}

impl Graph {
    /// Builds a graph, rejecting self-loops, duplicate edges, out-of-range
    /// endpoints and disconnected inputs.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let g = Self::from_edges_unchecked_connectivity(n, edges)?;
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    fn from_edges_unchecked_connectivity(
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParam("graph must have at least one vertex".into()));
        }
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::InvalidParam(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::InvalidParam(format!("self-loop at vertex {u}")));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidParam(format!(
                "duplicate edge ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let max_degree = adj.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Graph {
            n,
            edges: list,
            adj,
            max_degree,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            count += 1;
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        count == self.n
    }

    /// Connected components of the subgraph induced by `vertices`, each
    /// sorted ascending; components are ordered by their smallest vertex.
    pub fn induced_components(&self, vertices: &[usize]) -> Vec<Vec<usize>> {
        let mut inside = vec![false; self.n];
        for &v in vertices {
            inside[v] = true;
        }
        let mut seen = vec![false; self.n];
        let mut sorted = vertices.to_vec();
        sorted.sort_unstable();
        let mut comps = Vec::new();
        for &start in &sorted {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            let mut comp = vec![start];
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &self.adj[u] {
                    if inside[v] && !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Subgraph induced by a connected vertex set, relabelled `0..k` in the
    /// order given by `vertices`.
    pub fn induced(&self, vertices: &[usize]) -> Result<Graph> {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            if v >= self.n {
                return Err(Error::InvalidParam(format!("vertex {v} out of range")));
            }
            index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]));
        Graph::from_edges(vertices.len(), edges)
    }

    /// Hop distances from `source` by breadth-first search.
    pub fn bfs(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[source] = 0;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// Writes `y = L x` for the combinatorial Laplacian `L = D - A`.
    pub fn laplacian_apply<T: Scalar>(&self, x: &[T], y: &mut [T]) {
        for v in 0..self.n {
            let mut acc = T::from_count(self.adj[v].len()) * x[v];
            for &u in &self.adj[v] {
                acc -= x[u];
            }
            y[v] = acc;
        }
    }

    /// Σ_{uv ∈ E} (f(u) - f(v))², i.e. ⟨f, L f⟩.
    pub fn dirichlet_energy<T: Scalar>(&self, f: &[T]) -> T {
        self.edges
            .iter()
            .map(|&(u, v)| (f[u] - f[v]) * (f[u] - f[v]))
            .sum()
    }

    /// Number of edges with exactly one endpoint in `side`.
    pub fn cut_size(&self, side: &[bool]) -> usize {
        self.edges.iter().filter(|&&(u, v)| side[u] != side[v]).count()
    }
}

/// Rayleigh quotient Σ_{uv∈E}(f(u)-f(v))² / Σ_u (f(u)-f̄)².
///
/// Any non-constant `f` gives an upper bound on λ₂. Constant vectors are
/// rejected as a degenerate direction.
pub fn rayleigh_quotient<T: Scalar>(g: &Graph, f: &[T]) -> Result<T> {
    if f.len() != g.n() {
        return Err(Error::InvalidParam(format!(
            "vector has {} entries, graph has {} vertices",
            f.len(),
            g.n()
        )));
    }
    if f.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidParam("vector has non-finite entries".into()));
    }
    let first = f[0];
    if f.iter().all(|&x| x == first) {
        return Err(Error::Degenerate("degenerate direction: constant vector".into()));
    }
    let mean = f.iter().copied().sum::<T>() / T::from_count(f.len());
    let denom: T = f.iter().map(|&x| (x - mean) * (x - mean)).sum();
    if denom <= T::zero() {
        return Err(Error::Degenerate("degenerate direction: zero variance".into()));
    }
    Ok(g.dirichlet_energy(f) / denom)
}
