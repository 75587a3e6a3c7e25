//! Path-based multicommodity flows, vertex congestion, and the metric/flow
//! duality between `min con₂` and `max Λ_s`.

mod solver;

pub use solver::{solve_min_con2, DualitySolution, IterateRecord, SolverConfig, StepRule};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{vertex_weighted_distances, Graph, WeightFunction};
use crate::scalar::{Norm, Scalar};

/// One path of a demand's routing together with the flow it carries.
#[derive(Debug, Clone, PartialEq)]
pub struct Route<T> {
    pub path: Vec<usize>,
    pub weight: T,
}

/// Unit flow for a set of demand pairs, stored path by path.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalFlow<T> {
    n: usize,
    demands: Vec<(usize, usize)>,
    routes: Vec<Vec<Route<T>>>,
}

impl<T: Scalar> FractionalFlow<T> {
    /// Validates paths against `g` and weights against the unit-flow
    /// condition (non-negative, summing to 1 within 1e-9 per demand).
    pub fn new(g: &Graph, demands: Vec<(usize, usize)>, routes: Vec<Vec<Route<T>>>) -> Result<Self> {
        if demands.len() != routes.len() {
            return Err(Error::InvalidParam(format!(
                "{} demands but {} route lists",
                demands.len(),
                routes.len()
            )));
        }
        let tol = if T::epsilon() > T::lit(1e-10) {
            T::lit(1e-5)
        } else {
            T::lit(1e-9)
        };
        for (&(a, b), list) in demands.iter().zip(&routes) {
            if a == b || a >= g.n() || b >= g.n() {
                return Err(Error::InvalidParam(format!("invalid demand ({a}, {b})")));
            }
            let mut total = T::zero();
            for r in list {
                check_path(g, &r.path, a, b)?;
                if !(r.weight >= T::zero()) || !r.weight.is_finite() {
                    return Err(Error::InvalidParam(format!(
                        "negative or non-finite weight on demand ({a}, {b})"
                    )));
                }
                total += r.weight;
            }
            if (total - T::one()).abs() > tol {
                return Err(Error::InvalidParam(format!(
                    "demand ({a}, {b}) carries {total}, expected 1"
                )));
            }
        }
        Ok(FractionalFlow {
            n: g.n(),
            demands,
            routes,
        })
    }

    pub(crate) fn from_parts_unchecked(
        n: usize,
        demands: Vec<(usize, usize)>,
        routes: Vec<Vec<Route<T>>>,
    ) -> Self {
        FractionalFlow { n, demands, routes }
    }

    /// Flow with no demands.
    pub fn empty(n: usize) -> Self {
        FractionalFlow {
            n,
            demands: Vec::new(),
            routes: Vec::new(),
        }
    }

    /// Routes every unordered pair `u < v` along its `d_s` shortest path.
    pub fn all_pairs_shortest(g: &Graph, s: &WeightFunction<T>) -> Self {
        let n = g.n();
        let per_source: Vec<Vec<Vec<usize>>> = (0..n)
            .into_par_iter()
            .map(|u| {
                let sp = vertex_weighted_distances(g, s, u);
                (u + 1..n).map(|v| sp.path_to(v)).collect()
            })
            .collect();
        let mut demands = Vec::with_capacity(n * (n - 1) / 2);
        let mut routes = Vec::with_capacity(n * (n - 1) / 2);
        for (u, paths) in per_source.into_iter().enumerate() {
            for (path, v) in paths.into_iter().zip(u + 1..n) {
                demands.push((u, v));
                routes.push(vec![Route {
                    path,
                    weight: T::one(),
                }]);
            }
        }
        FractionalFlow { n, demands, routes }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn demands(&self) -> &[(usize, usize)] {
        &self.demands
    }

    pub fn routes(&self) -> &[Vec<Route<T>>] {
        &self.routes
    }

    /// Number of stored (path, weight) entries.
    pub fn support_size(&self) -> usize {
        self.routes.iter().map(Vec::len).sum()
    }

    pub fn is_integral(&self) -> bool {
        self.routes.iter().all(|r| r.len() == 1)
    }

    /// `C_F(v) = Σ_{p ∋ v} F(p)`.
    pub fn congestion(&self) -> CongestionProfile<T> {
        let mut c = vec![T::zero(); self.n];
        for list in &self.routes {
            for r in list {
                for &v in &r.path {
                    c[v] += r.weight;
                }
            }
        }
        CongestionProfile { c }
    }
}

pub(crate) fn check_path(g: &Graph, path: &[usize], a: usize, b: usize) -> Result<()> {
    let (first, last) = match (path.first(), path.last()) {
        (Some(&f), Some(&l)) => (f, l),
        _ => return Err(Error::InvalidParam("empty path".into())),
    };
    if !((first == a && last == b) || (first == b && last == a)) {
        return Err(Error::InvalidParam(format!(
            "path {path:?} does not connect {a} and {b}"
        )));
    }
    for w in path.windows(2) {
        if !g.has_edge(w[0], w[1]) {
            return Err(Error::InvalidParam(format!(
                "path {path:?} uses non-edge ({}, {})",
                w[0], w[1]
            )));
        }
    }
    let mut sorted = path.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParam(format!("path {path:?} is not simple")));
    }
    Ok(())
}

/// Per-vertex congestion `C_F`.
#[derive(Debug, Clone, PartialEq)]
pub struct CongestionProfile<T> {
    pub c: Vec<T>,
}

impl<T: Scalar> CongestionProfile<T> {
    /// `con_p = (Σ_v C(v)^p)^{1/p}`.
    pub fn con_norm(&self, p: Norm) -> T {
        match p {
            Norm::L1 => self.c.iter().copied().sum(),
            Norm::L2 => self.c.iter().map(|&x| x * x).sum::<T>().sqrt(),
        }
    }
}

/// `Λ_s(G) = Σ_{u<v} d_s(u, v) / ‖s‖₂`.
pub fn lambda_s<T: Scalar>(g: &Graph, s: &WeightFunction<T>) -> Result<T> {
    if s.len() != g.n() {
        return Err(Error::InvalidParam(format!(
            "weight function has {} entries, graph has {} vertices",
            s.len(),
            g.n()
        )));
    }
    if s.is_zero() {
        return Err(Error::Degenerate(
            "Λ_s undefined for the zero weight function".into(),
        ));
    }
    let n = g.n();
    let sums: Vec<T> = (0..n)
        .into_par_iter()
        .map(|u| {
            let sp = vertex_weighted_distances(g, s, u);
            sp.dist[u + 1..].iter().copied().sum::<T>()
        })
        .collect();
    let total: T = sums.into_iter().sum();
    Ok(total / s.l2_norm())
}
