use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::Graph;
use crate::error::{Error, Result};
use crate::scalar::{rel_slack, Ordered, Scalar};

/// Non-negative vertex lengths `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction<T> {
    s: Vec<T>,
}

impl<T: Scalar> WeightFunction<T> {
    pub fn new(s: Vec<T>) -> Result<Self> {
        if let Some((v, x)) = s.iter().enumerate().find(|(_, x)| !x.is_finite() || **x < T::zero()) {
            return Err(Error::InvalidParam(format!(
                "weight of vertex {v} must be finite and non-negative, got {x}"
            )));
        }
        Ok(WeightFunction { s })
    }

    pub fn uniform(n: usize, value: T) -> Self {
        WeightFunction { s: vec![value; n] }
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn values(&self) -> &[T] {
        &self.s
    }

    pub fn get(&self, v: usize) -> T {
        self.s[v]
    }

    pub fn is_zero(&self) -> bool {
        self.s.iter().all(|x| x.is_zero())
    }

    pub fn l2_norm(&self) -> T {
        self.s.iter().map(|&x| x * x).sum::<T>().sqrt()
    }

    pub fn total(&self) -> T {
        self.s.iter().copied().sum()
    }

    /// Returns `t · s`.
    pub fn scaled(&self, t: T) -> Self {
        WeightFunction {
            s: self.s.iter().map(|&x| x * t).collect(),
        }
    }
}

/// Single-source result of the vertex-sum Dijkstra.
#[derive(Debug, Clone)]
pub struct ShortestPaths<T> {
    pub source: usize,
    /// `dist[v] = d_s(source, v)`, with `dist[source] = 0`.
    pub dist: Vec<T>,
    /// Predecessor on the chosen shortest path; `None` for the source.
    pub parent: Vec<Option<usize>>,
    /// Vertices in settling order; every parent precedes its children.
    pub order: Vec<usize>,
}

impl<T: Scalar> ShortestPaths<T> {
    /// Vertex sequence from the source to `target`.
    pub fn path_to(&self, target: usize) -> Vec<usize> {
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        path
    }
}

/// Exact single-source distances where a path costs the sum of the weights
/// of ALL its vertices, both endpoints included.
///
/// `d_s(u, u)` is fixed to 0 (semi-metric convention) even though the
/// vertex-sum formula would give `s(u)`.
///
/// Ties between equal-cost predecessors go to the smaller vertex index among
/// those settled before the vertex itself, which keeps the predecessor graph
/// a tree even with zero weights.
pub fn vertex_weighted_distances<T: Scalar>(
    g: &Graph,
    s: &WeightFunction<T>,
    source: usize,
) -> ShortestPaths<T> {
    vertex_cost_dijkstra(g, s.values(), source)
}

pub(crate) fn vertex_cost_dijkstra<T: Scalar>(g: &Graph, cost: &[T], source: usize) -> ShortestPaths<T> {
    let n = g.n();
    let mut dist = vec![T::infinity(); n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    let mut settled = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut heap = BinaryHeap::new();
    dist[source] = cost[source];
    heap.push(Reverse((Ordered(dist[source]), source)));
    while let Some(Reverse((Ordered(d), u))) = heap.pop() {
        if settled[u] || d > dist[u] {
            continue;
        }
        settled[u] = true;
        order.push(u);
        for &v in g.neighbors(u) {
            if settled[v] {
                continue;
            }
            let cand = d + cost[v];
            let better = cand < dist[v] || (cand == dist[v] && parent[v].is_some_and(|p| u < p));
            if better {
                let improved = cand < dist[v];
                dist[v] = cand;
                parent[v] = Some(u);
                if improved {
                    heap.push(Reverse((Ordered(cand), v)));
                }
            }
        }
    }
    dist[source] = T::zero();
    ShortestPaths {
        source,
        dist,
        parent,
        order,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricOrigin {
    VertexWeighted,
    Explicit,
}

/// Dense symmetric distance table with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct Metric<T> {
    n: usize,
    d: Vec<T>,
    origin: MetricOrigin,
}

impl<T: Scalar> Metric<T> {
    /// Wraps an explicit row-major `n × n` table after validating it.
    pub fn from_table(n: usize, d: Vec<T>) -> Result<Self> {
        if d.len() != n * n {
            return Err(Error::InvalidParam(format!(
                "distance table has {} entries, expected {}",
                d.len(),
                n * n
            )));
        }
        let m = Metric {
            n,
            d,
            origin: MetricOrigin::Explicit,
        };
        m.check()?;
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn origin(&self) -> MetricOrigin {
        self.origin
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> T {
        self.d[u * self.n + v]
    }

    pub fn row(&self, u: usize) -> &[T] {
        &self.d[u * self.n..(u + 1) * self.n]
    }

    pub fn max_distance(&self) -> T {
        self.d.iter().copied().fold(T::zero(), T::max)
    }

    /// Σ over unordered pairs of d^p, p = 1 or 2.
    pub fn pair_sum(&self, squared: bool) -> T {
        let mut acc = T::zero();
        for u in 0..self.n {
            for v in u + 1..self.n {
                let x = self.get(u, v);
                acc += if squared { x * x } else { x };
            }
        }
        acc
    }

    /// Closed ball `{y : d(x, y) ≤ r}`.
    pub fn ball(&self, x: usize, r: T) -> Vec<usize> {
        (0..self.n).filter(|&y| self.get(x, y) <= r).collect()
    }

    /// Largest distance inside `set`.
    pub fn diameter(&self, set: &[usize]) -> T {
        let mut diam = T::zero();
        for (i, &u) in set.iter().enumerate() {
            for &v in &set[i + 1..] {
                diam = diam.max(self.get(u, v));
            }
        }
        diam
    }

    /// Verifies symmetry, zero diagonal, non-negativity and the triangle
    /// inequality up to a relative slack of 1e-9.
    pub fn check(&self) -> Result<()> {
        let n = self.n;
        let tol = rel_slack(self.max_distance());
        for u in 0..n {
            if self.get(u, u) != T::zero() {
                return Err(Error::InvalidParam(format!("d({u},{u}) is not zero")));
            }
            for v in 0..n {
                let x = self.get(u, v);
                if !x.is_finite() || x < T::zero() {
                    return Err(Error::InvalidParam(format!("d({u},{v}) = {x} is invalid")));
                }
                if x != self.get(v, u) {
                    return Err(Error::InvalidParam(format!("d({u},{v}) is not symmetric")));
                }
            }
        }
        for w in 0..n {
            for u in 0..n {
                let uw = self.get(u, w);
                for v in 0..n {
                    if self.get(u, v) > uw + self.get(w, v) + tol {
                        return Err(Error::InvalidParam(format!(
                            "triangle inequality fails for ({u}, {v}) via {w}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Comma-separated dump, one row per line.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for u in 0..self.n {
            let row: Vec<String> = self.row(u).iter().map(|x| x.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// All-pairs `d_s`. Sources run in parallel; the table is identical to the
/// sequential result.
pub fn all_pairs_metric<T: Scalar>(g: &Graph, s: &WeightFunction<T>) -> Metric<T> {
    let n = g.n();
    let rows: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|u| vertex_weighted_distances(g, s, u).dist)
        .collect();
    let mut d = Vec::with_capacity(n * n);
    for row in rows {
        d.extend(row);
    }
    // Dijkstra from u and from v may round differently; keep the table exactly symmetric.
    for u in 0..n {
        for v in u + 1..n {
            let x = d[u * n + v].min(d[v * n + u]);
            d[u * n + v] = x;
            d[v * n + u] = x;
        }
    }
    Metric {
        n,
        d,
        origin: MetricOrigin::VertexWeighted,
    }
}

/// Shortest-path hop metric (number of edges).
pub fn hop_metric<T: Scalar>(g: &Graph) -> Metric<T> {
    let n = g.n();
    let mut d = Vec::with_capacity(n * n);
    for u in 0..n {
        d.extend(g.bfs(u).into_iter().map(T::from_count));
    }
    Metric {
        n,
        d,
        origin: MetricOrigin::Explicit,
    }
}
