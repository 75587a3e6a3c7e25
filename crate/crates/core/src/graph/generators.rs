use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Graph;
use crate::error::{Error, Result};

/// Graph families used as experiment substrates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Path { n: usize },
    Cycle { n: usize },
    /// `side × side` grid.
    Grid2d { side: usize },
    /// `side × side` grid with wrap-around edges.
    Torus2d { side: usize },
    /// `side × side × side` grid.
    Grid3d { side: usize },
    /// `n` uniform points in the unit `dim`-cube, each joined to its `k`
    /// nearest neighbours, symmetrized.
    Knn {
        n: usize,
        k: usize,
        dim: usize,
        seed: u64,
    },
    Complete { n: usize },
    /// `K_{1,leaves}` with the centre at vertex 0.
    Star { leaves: usize },
}

/// Family name without parameters, as accepted on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilyName {
    Path,
    Cycle,
    Grid2d,
    Torus2d,
    Grid3d,
    Knn,
    Complete,
    Star,
}

impl FromStr for FamilyName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "path" => FamilyName::Path,
            "cycle" => FamilyName::Cycle,
            "grid2d" => FamilyName::Grid2d,
            "torus2d" => FamilyName::Torus2d,
            "grid3d" => FamilyName::Grid3d,
            "knn" | "knn_random_points" => FamilyName::Knn,
            "complete" => FamilyName::Complete,
            "star" => FamilyName::Star,
            other => return Err(Error::InvalidParam(format!("unknown family `{other}`"))),
        })
    }
}

impl fmt::Display for FamilyName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FamilyName::Path => "path",
            FamilyName::Cycle => "cycle",
            FamilyName::Grid2d => "grid2d",
            FamilyName::Torus2d => "torus2d",
            FamilyName::Grid3d => "grid3d",
            FamilyName::Knn => "knn",
            FamilyName::Complete => "complete",
            FamilyName::Star => "star",
        };
        f.write_str(s)
    }
}

impl FamilyName {
    /// Instantiates the family with a single size parameter; `k` and `dim`
    /// only matter for `knn`.
    pub fn with_size(self, size: usize, k: usize, dim: usize, seed: u64) -> Family {
        match self {
            FamilyName::Path => Family::Path { n: size },
            FamilyName::Cycle => Family::Cycle { n: size },
            FamilyName::Grid2d => Family::Grid2d { side: size },
            FamilyName::Torus2d => Family::Torus2d { side: size },
            FamilyName::Grid3d => Family::Grid3d { side: size },
            FamilyName::Knn => Family::Knn {
                n: size,
                k,
                dim,
                seed,
            },
            FamilyName::Complete => Family::Complete { n: size },
            FamilyName::Star => Family::Star { leaves: size },
        }
    }
}

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidParam(msg()))
    }
}

/// Builds a connected simple graph from the family description.
pub fn generate(family: &Family) -> Result<Graph> {
    match *family {
        Family::Path { n } => {
            require(n >= 2, || format!("path needs n >= 2, got {n}"))?;
            Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
        }
        Family::Cycle { n } => {
            require(n >= 3, || format!("cycle needs n >= 3, got {n}"))?;
            Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
        }
        Family::Grid2d { side } => {
            require(side >= 2, || format!("grid side must be >= 2, got {side}"))?;
            lattice(&[side, side], false)
        }
        Family::Torus2d { side } => {
            require(side >= 3, || format!("torus side must be >= 3, got {side}"))?;
            lattice(&[side, side], true)
        }
        Family::Grid3d { side } => {
            require(side >= 2, || format!("grid side must be >= 2, got {side}"))?;
            lattice(&[side, side, side], false)
        }
        Family::Complete { n } => {
            require(n >= 2, || format!("complete graph needs n >= 2, got {n}"))?;
            Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
        }
        Family::Star { leaves } => {
            require(leaves >= 1, || "star needs at least one leaf".to_string())?;
            Graph::from_edges(leaves + 1, (1..=leaves).map(|v| (0, v)))
        }
        Family::Knn { n, k, dim, seed } => knn_random_points(n, k, dim, seed),
    }
}

/// Axis-aligned lattice; vertex index is row-major over `dims`.
fn lattice(dims: &[usize], wrap: bool) -> Result<Graph> {
    let n: usize = dims.iter().product();
    let mut strides = vec![1usize; dims.len()];
    for a in (0..dims.len().saturating_sub(1)).rev() {
        strides[a] = strides[a + 1] * dims[a + 1];
    }
    let mut edges = Vec::new();
    for v in 0..n {
        for (&len, &stride) in dims.iter().zip(&strides) {
            let coord = (v / stride) % len;
            if coord + 1 < len {
                edges.push((v, v + stride));
            } else if wrap && len > 2 {
                edges.push((v, v - coord * stride));
            }
        }
    }
    Graph::from_edges(n, edges)
}

fn knn_random_points(n: usize, k: usize, dim: usize, seed: u64) -> Result<Graph> {
    require(k >= 1, || "knn needs k >= 1".to_string())?;
    require(dim >= 1, || "knn needs dim >= 1".to_string())?;
    require(n >= k + 1, || format!("knn needs n >= k + 1, got n = {n}, k = {k}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect();
    let sq = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum() };
    let mut edges = Vec::with_capacity(n * k);
    let mut order: Vec<usize> = Vec::with_capacity(n);
    for i in 0..n {
        order.clear();
        order.extend((0..n).filter(|&j| j != i));
        order.sort_by(|&a, &b| {
            sq(&points[i], &points[a])
                .total_cmp(&sq(&points[i], &points[b]))
                .then(a.cmp(&b))
        });
        for &j in order.iter().take(k) {
            edges.push((i.min(j), i.max(j)));
        }
    }
    edges.sort_unstable();
    edges.dedup();
    Graph::from_edges(n, edges)
}
