//! Integral flows: randomized rounding, intersection numbers, terminal
//! subsampling, and minor extraction from intersection-free routings.

mod minor;

pub use minor::{branch_set_diameter, extract_minor, verify_branch_decomposition, BranchDecomposition};

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::flow::{check_path, CongestionProfile, FractionalFlow};
use crate::graph::Graph;
use crate::scalar::{Norm, Scalar};

/// Side of a demand vertex in a bipartite demand graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// Demand graph `H = (U, D)` with an injective terminal map `U → V(G)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandGraph {
    terminals: Vec<usize>,
    edges: Vec<(usize, usize)>,
    bipartition: Option<Vec<Side>>,
}

impl DemandGraph {
    /// `terminals[i]` is the graph vertex of demand vertex `i`; edges are
    /// pairs of demand vertices.
    pub fn new(terminals: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        if let Some(t) = terminals.iter().find(|t| !seen.insert(**t)) {
            return Err(Error::InvalidParam(format!(
                "terminal map is not injective: vertex {t} used twice"
            )));
        }
        let k = terminals.len();
        let mut norm = Vec::with_capacity(edges.len());
        for (i, j) in edges {
            if i >= k || j >= k || i == j {
                return Err(Error::InvalidParam(format!("invalid demand edge ({i}, {j})")));
            }
            norm.push((i.min(j), i.max(j)));
        }
        let mut sorted = norm.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParam("duplicate demand edge".into()));
        }
        Ok(DemandGraph {
            terminals,
            edges: norm,
            bipartition: None,
        })
    }

    /// `K_k` on the given terminals, edges in lexicographic order.
    pub fn complete(terminals: Vec<usize>) -> Result<Self> {
        let k = terminals.len();
        let edges = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        Self::new(terminals, edges)
    }

    /// Bipartite demand graph; every edge must join a left and a right
    /// vertex.
    pub fn bipartite(terminals: Vec<usize>, sides: Vec<Side>, edges: Vec<(usize, usize)>) -> Result<Self> {
        if sides.len() != terminals.len() {
            return Err(Error::InvalidParam("one side label per demand vertex required".into()));
        }
        let mut h = Self::new(terminals, edges)?;
        if let Some(&(i, j)) = h.edges.iter().find(|&&(i, j)| sides[i] == sides[j]) {
            return Err(Error::InvalidParam(format!(
                "demand edge ({i}, {j}) does not cross the bipartition"
            )));
        }
        h.bipartition = Some(sides);
        Ok(h)
    }

    /// Demand graph over the distinct vertices of `pairs`, terminals sorted.
    pub fn from_vertex_pairs(pairs: &[(usize, usize)]) -> Result<Self> {
        let mut terminals: Vec<usize> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
        terminals.sort_unstable();
        terminals.dedup();
        let index = |v: usize| terminals.binary_search(&v).expect("terminal present");
        let edges = pairs.iter().map(|&(a, b)| (index(a), index(b))).collect();
        Self::new(terminals.clone(), edges)
    }

    pub fn terminals(&self) -> &[usize] {
        &self.terminals
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn bipartition(&self) -> Option<&[Side]> {
        self.bipartition.as_deref()
    }

    pub fn degree(&self, i: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == i || b == i).count()
    }

    /// Whether every pair of demand vertices is a demand edge.
    pub fn is_complete(&self) -> bool {
        let k = self.terminals.len();
        self.edges.len() == k * k.saturating_sub(1) / 2
    }

    /// Graph endpoints of demand edge `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let (i, j) = self.edges[e];
        (self.terminals[i], self.terminals[j])
    }
}

/// Exactly one path per demand edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntegralFlow {
    n: usize,
    demands: DemandGraph,
    paths: Vec<Vec<usize>>,
}

impl IntegralFlow {
    /// `paths[e]` must be a simple path in `g` joining the terminals of
    /// demand edge `e`; it is stored oriented from the first endpoint.
    pub fn new(g: &Graph, demands: DemandGraph, paths: Vec<Vec<usize>>) -> Result<Self> {
        if paths.len() != demands.edges.len() {
            return Err(Error::InvalidParam(format!(
                "{} demand edges but {} paths",
                demands.edges.len(),
                paths.len()
            )));
        }
        if let Some(&t) = demands.terminals.iter().find(|&&t| t >= g.n()) {
            return Err(Error::InvalidParam(format!("terminal {t} out of range")));
        }
        let mut oriented = Vec::with_capacity(paths.len());
        for (e, mut path) in paths.into_iter().enumerate() {
            let (a, b) = demands.endpoints(e);
            check_path(g, &path, a, b)?;
            if path[0] != a {
                path.reverse();
            }
            oriented.push(path);
        }
        Ok(IntegralFlow {
            n: g.n(),
            demands,
            paths: oriented,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn demands(&self) -> &DemandGraph {
        &self.demands
    }

    pub fn paths(&self) -> &[Vec<usize>] {
        &self.paths
    }

    pub fn congestion<T: Scalar>(&self) -> CongestionProfile<T> {
        let mut c = vec![T::zero(); self.n];
        for p in &self.paths {
            for &v in p {
                c[v] += T::one();
            }
        }
        CongestionProfile { c }
    }

    /// `con₂(φ)²` as an exact integer.
    pub fn con2_squared(&self) -> u64 {
        let mut c = vec![0u64; self.n];
        for p in &self.paths {
            for &v in p {
                c[v] += 1;
            }
        }
        c.iter().map(|x| x * x).sum()
    }

    pub fn con_norm<T: Scalar>(&self, p: Norm) -> T {
        self.congestion::<T>().con_norm(p)
    }

    /// One line per demand edge: `u v : v0 v1 ... vk` in graph vertices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (e, path) in self.paths.iter().enumerate() {
            let (a, b) = self.demands.endpoints(e);
            let body: Vec<String> = path.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{a} {b} : {}\n", body.join(" ")));
        }
        out
    }

    /// Keeps the demand edges whose endpoints both satisfy `keep`, on the
    /// sub-demand-graph spanned by the kept terminals.
    fn restrict(&self, keep: &[bool]) -> IntegralFlow {
        let mut new_index = vec![usize::MAX; keep.len()];
        let mut terminals = Vec::new();
        for (i, &t) in self.demands.terminals.iter().enumerate() {
            if keep[i] {
                new_index[i] = terminals.len();
                terminals.push(t);
            }
        }
        let mut edges = Vec::new();
        let mut paths = Vec::new();
        for (e, &(i, j)) in self.demands.edges.iter().enumerate() {
            if keep[i] && keep[j] {
                edges.push((new_index[i], new_index[j]));
                paths.push(self.paths[e].clone());
            }
        }
        let bipartition = self.demands.bipartition.as_ref().map(|sides| {
            sides
                .iter()
                .zip(keep)
                .filter(|(_, &k)| k)
                .map(|(&s, _)| s)
                .collect()
        });
        IntegralFlow {
            n: self.n,
            demands: DemandGraph {
                terminals,
                edges,
                bipartition,
            },
            paths,
        }
    }
}

/// Outcome of best-of-trials rounding.
#[derive(Debug, Clone)]
pub struct RoundingOutcome<T> {
    pub best: IntegralFlow,
    pub best_trial: usize,
    /// `con₂` of every trial, in trial order.
    pub trial_con2: Vec<T>,
}

/// Independently picks one path per demand with probability equal to its
/// flow, `trials` times, and keeps the rounding with the smallest `con₂`
/// (ties to the earliest trial). Trial `t` draws from stream `t` of the
/// seeded generator, so results do not depend on scheduling.
pub fn round_integral<T: Scalar>(
    g: &Graph,
    flow: &FractionalFlow<T>,
    trials: usize,
    seed: u64,
) -> Result<RoundingOutcome<T>> {
    if trials == 0 {
        return Err(Error::InvalidParam("need at least one rounding trial".into()));
    }
    let demands = DemandGraph::from_vertex_pairs(flow.demands())?;
    let picks: Vec<Vec<usize>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            flow.routes()
                .iter()
                .map(|list| {
                    let total: f64 = list.iter().map(|r| r.weight.to_f64_lossy()).sum();
                    let mut x = rng.random::<f64>() * total;
                    let mut choice = list.len() - 1;
                    for (k, r) in list.iter().enumerate() {
                        let w = r.weight.to_f64_lossy();
                        if x < w {
                            choice = k;
                            break;
                        }
                        x -= w;
                    }
                    choice
                })
                .collect()
        })
        .collect();
    let mut rounded = Vec::with_capacity(trials);
    for pick in &picks {
        let paths = flow
            .routes()
            .iter()
            .zip(pick)
            .map(|(list, &k)| list[k].path.clone())
            .collect();
        let f = IntegralFlow::new(g, demands.clone(), paths)?;
        rounded.push(f);
    }
    let trial_con2: Vec<T> = rounded.iter().map(|f| f.con_norm(Norm::L2)).collect();
    let best_trial = (0..trials)
        .min_by(|&a, &b| {
            rounded[a]
                .con2_squared()
                .cmp(&rounded[b].con2_squared())
                .then(a.cmp(&b))
        })
        .expect("trials > 0");
    Ok(RoundingOutcome {
        best: rounded.swap_remove(best_trial),
        best_trial,
        trial_con2,
    })
}

/// Number of unordered pairs of demand edges with four distinct endpoints
/// whose paths share at least one vertex.
pub fn intersection_number(flow: &IntegralFlow) -> u64 {
    intersecting_pairs(flow).len() as u64
}

fn intersecting_pairs(flow: &IntegralFlow) -> HashSet<(usize, usize)> {
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); flow.n];
    for (e, p) in flow.paths.iter().enumerate() {
        for &v in p {
            through[v].push(e);
        }
    }
    let edges = &flow.demands.edges;
    let disjoint = |a: usize, b: usize| {
        let (i, j) = edges[a];
        let (k, l) = edges[b];
        i != k && i != l && j != k && j != l
    };
    let mut pairs = HashSet::new();
    for list in &through {
        for (x, &a) in list.iter().enumerate() {
            for &b in &list[x + 1..] {
                if disjoint(a, b) {
                    pairs.insert((a.min(b), a.max(b)));
                }
            }
        }
    }
    pairs
}

/// Keeps each terminal independently with probability `p` and restricts the
/// flow to demand edges with both endpoints kept.
pub fn subsample_terminals(flow: &IntegralFlow, p: f64, seed: u64) -> Result<IntegralFlow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    subsample_with(flow, p, &mut rng)
}

fn subsample_with(flow: &IntegralFlow, p: f64, rng: &mut impl Rng) -> Result<IntegralFlow> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParam(format!("probability {p} outside [0, 1]")));
    }
    if !flow.demands.is_complete() {
        return Err(Error::Precondition(
            "terminal subsampling needs a complete demand graph".into(),
        ));
    }
    let keep: Vec<bool> = (0..flow.demands.terminals.len())
        .map(|_| rng.random::<f64>() < p)
        .collect();
    Ok(flow.restrict(&keep))
}

/// Sample mean and standard error of `inter` over independent subsamples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubsampleStats {
    pub samples: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `p⁴ · inter(F)`.
    pub expected: f64,
}

impl SubsampleStats {
    /// |mean − expected| in units of the standard error.
    pub fn z_score(&self) -> f64 {
        if self.std_error > 0.0 {
            (self.mean - self.expected).abs() / self.std_error
        } else if self.mean == self.expected {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Monte-Carlo estimate of `E[inter(F_p)]`; sample `i` uses stream `i`.
pub fn subsample_inter_stats(flow: &IntegralFlow, p: f64, samples: usize, seed: u64) -> Result<SubsampleStats> {
    if samples < 2 {
        return Err(Error::InvalidParam("need at least two samples".into()));
    }
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            subsample_with(flow, p, &mut rng).map(|f| intersection_number(&f) as f64)
        })
        .collect::<Result<_>>()?;
    let k = samples as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    Ok(SubsampleStats {
        samples,
        mean,
        std_error: (var / k).sqrt(),
        expected: p.powi(4) * intersection_number(flow) as f64,
    })
}

/// Repeatedly removes the terminal involved in the most intersecting pairs
/// (ties to the smallest demand index) and records `inter` after each
/// removal, starting with the full flow, until no intersections remain.
/// The trace is an upper-bound record only.
pub fn greedy_terminal_removal(flow: &IntegralFlow) -> Vec<u64> {
    let k = flow.demands.terminals.len();
    let mut keep = vec![true; k];
    let mut current = flow.clone();
    let mut trace = Vec::new();
    loop {
        let pairs = intersecting_pairs(&current);
        trace.push(pairs.len() as u64);
        if pairs.is_empty() {
            break;
        }
        // participation counted in original demand-vertex indices
        let alive: Vec<usize> = (0..k).filter(|&i| keep[i]).collect();
        let mut score = vec![0usize; alive.len()];
        for &(a, b) in &pairs {
            for e in [a, b] {
                let (i, j) = current.demands.edges[e];
                score[i] += 1;
                score[j] += 1;
            }
        }
        let (victim, _) = score
            .iter()
            .enumerate()
            .fold((0, 0), |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc });
        keep[alive[victim]] = false;
        current = flow.restrict(&keep);
    }
    trace
}
