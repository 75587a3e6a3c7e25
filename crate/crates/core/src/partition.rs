//! Δ-bounded random partitions and empirical padding measurements.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{all_pairs_metric, Graph, Metric, WeightFunction};
use crate::scalar::{rel_slack, Scalar};

/// Disjoint cover of the points by clusters of diameter at most `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddedPartition<T> {
    clusters: Vec<Vec<usize>>,
    assignment: Vec<usize>,
    delta: T,
    /// Padding parameter this partition was drawn for, if any.
    pub alpha: Option<T>,
}

impl<T: Scalar> PaddedPartition<T> {
    /// Builds a partition from a cluster label per point. Labels are
    /// renumbered in order of first appearance.
    pub fn from_labels(labels: &[usize], delta: T) -> Self {
        let mut remap = std::collections::HashMap::new();
        let mut clusters: Vec<Vec<usize>> = Vec::new();
        let mut assignment = Vec::with_capacity(labels.len());
        for (v, &l) in labels.iter().enumerate() {
            let id = *remap.entry(l).or_insert_with(|| {
                clusters.push(Vec::new());
                clusters.len() - 1
            });
            clusters[id].push(v);
            assignment.push(id);
        }
        PaddedPartition {
            clusters,
            assignment,
            delta,
            alpha: None,
        }
    }

    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.assignment[v]
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn delta(&self) -> T {
        self.delta
    }

    /// Exhaustive check of the cover property and of every cluster diameter.
    pub fn validate(&self, m: &Metric<T>) -> Result<()> {
        if self.assignment.len() != m.n() {
            return Err(Error::Internal("partition does not cover the metric".into()));
        }
        let mut seen = vec![false; m.n()];
        for (id, c) in self.clusters.iter().enumerate() {
            if c.is_empty() {
                return Err(Error::Internal(format!("cluster {id} is empty")));
            }
            for &v in c {
                if seen[v] || self.assignment[v] != id {
                    return Err(Error::Internal(format!("vertex {v} assigned inconsistently")));
                }
                seen[v] = true;
            }
            let diam = m.diameter(c);
            if diam > self.delta + rel_slack(self.delta) {
                return Err(Error::Internal(format!(
                    "cluster {id} has diameter {diam} > {}",
                    self.delta
                )));
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Internal("partition misses a vertex".into()));
        }
        Ok(())
    }

    /// Distance from `x` to the nearest point outside its cluster; infinite
    /// when the cluster is everything.
    pub fn padding_radius(&self, m: &Metric<T>, x: usize) -> T {
        let own = self.assignment[x];
        m.row(x)
            .iter()
            .zip(&self.assignment)
            .filter(|(_, &c)| c != own)
            .map(|(&d, _)| d)
            .fold(T::infinity(), T::min)
    }

    /// Whether the closed ball `B(x, delta / alpha)` lies inside `x`'s cluster.
    pub fn is_padded(&self, m: &Metric<T>, x: usize, alpha: T) -> bool {
        self.delta / alpha < self.padding_radius(m, x)
    }

    /// One line per cluster: `id : members`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, c) in self.clusters.iter().enumerate() {
            let members: Vec<String> = c.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{id} : {}\n", members.join(" ")));
        }
        out
    }
}

/// Source of Δ-bounded random partitions over a fixed metric.
pub trait PartitionSampler<T: Scalar>: Sync {
    fn metric(&self) -> &Metric<T>;

    fn sample(&self, delta: T, rng: &mut ChaCha8Rng) -> Result<PaddedPartition<T>>;
}

/// Random-radius, random-order ball carving.
#[derive(Debug, Clone, Copy)]
pub struct Ckr<'a, T> {
    pub metric: &'a Metric<T>,
}

impl<T: Scalar> PartitionSampler<T> for Ckr<'_, T> {
    fn metric(&self) -> &Metric<T> {
        self.metric
    }

    fn sample(&self, delta: T, rng: &mut ChaCha8Rng) -> Result<PaddedPartition<T>> {
        ckr_with(self.metric, delta, rng)
    }
}

/// Iterated annulus chopping refined by connected components, a heuristic
/// for graphs with an excluded minor.
#[derive(Debug, Clone, Copy)]
pub struct Chop<'a, T> {
    pub graph: &'a Graph,
    pub metric: &'a Metric<T>,
    pub rounds: usize,
}

impl<T: Scalar> PartitionSampler<T> for Chop<'_, T> {
    fn metric(&self) -> &Metric<T> {
        self.metric
    }

    fn sample(&self, delta: T, rng: &mut ChaCha8Rng) -> Result<PaddedPartition<T>> {
        chop_with(self.graph, self.metric, delta, self.rounds, rng)
    }
}

/// Which sampler to use where a choice is offered.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionKind {
    Ckr,
    Chop { rounds: usize },
}

impl FromStr for PartitionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ckr" => Ok(PartitionKind::Ckr),
            "chop" => Ok(PartitionKind::Chop { rounds: 3 }),
            other => Err(Error::InvalidParam(format!(
                "unknown partition source `{other}` (expected ckr or chop)"
            ))),
        }
    }
}

impl fmt::Display for PartitionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionKind::Ckr => write!(f, "ckr"),
            PartitionKind::Chop { .. } => write!(f, "chop"),
        }
    }
}

fn check_delta<T: Scalar>(delta: T) -> Result<()> {
    if delta > T::zero() && delta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("delta must be positive, got {delta}")))
    }
}

/// Draws `r` uniformly from `[Δ/4, Δ/2]` and a uniform order of centers;
/// each point joins the first center within distance `r`.
pub fn ckr_partition<T: Scalar>(m: &Metric<T>, delta: T, seed: u64) -> Result<PaddedPartition<T>> {
    ckr_with(m, delta, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn ckr_with<T: Scalar>(m: &Metric<T>, delta: T, rng: &mut ChaCha8Rng) -> Result<PaddedPartition<T>> {
    check_delta(delta)?;
    let n = m.n();
    let u: f64 = rng.random();
    let r = delta * (T::lit(0.25) + T::lit(0.25) * T::lit(u));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let labels: Vec<usize> = (0..n)
        .map(|x| {
            order
                .iter()
                .position(|&c| m.get(c, x) <= r)
                .expect("a point is within r of itself")
        })
        .collect();
    Ok(PaddedPartition::from_labels(&labels, delta))
}

/// Chop partition over the `d_s` metric of `g`.
pub fn chop_partition<T: Scalar>(
    g: &Graph,
    s: &WeightFunction<T>,
    delta: T,
    rounds: usize,
    seed: u64,
) -> Result<PaddedPartition<T>> {
    let m = all_pairs_metric(g, s);
    chop_with(g, &m, delta, rounds, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Each round layers the points by distance from a random root into
/// annuli of width `Δ / rounds` with a random offset, and splits every
/// current cluster wider than `Δ` along annulus boundaries and then into
/// connected components. Clusters still wider than `Δ` are carved greedily into balls
/// of radius `Δ/2` around their smallest remaining vertex.
fn chop_with<T: Scalar>(
    g: &Graph,
    m: &Metric<T>,
    delta: T,
    rounds: usize,
    rng: &mut ChaCha8Rng,
) -> Result<PaddedPartition<T>> {
    check_delta(delta)?;
    if rounds == 0 {
        return Err(Error::InvalidParam("rounds must be at least 1".into()));
    }
    if g.n() != m.n() {
        return Err(Error::InvalidParam("graph and metric sizes differ".into()));
    }
    let n = g.n();
    let width = delta / T::from_count(rounds);
    let mut labels = vec![0usize; n];
    for _ in 0..rounds {
        let root = rng.random_range(0..n);
        let offset = width * T::lit(rng.random::<f64>());
        // clusters already within Δ are left alone
        let current = PaddedPartition::from_labels(&labels, delta);
        let wide: Vec<bool> = current
            .clusters
            .iter()
            .map(|c| m.diameter(c) > delta + rel_slack(delta))
            .collect();
        if !wide.iter().any(|&w| w) {
            break;
        }
        labels = current.assignment.clone();
        let layer: Vec<usize> = (0..n)
            .map(|v| {
                if wide[labels[v]] {
                    ((m.get(root, v) + offset) / width).floor().to_usize().unwrap_or(usize::MAX)
                } else {
                    0
                }
            })
            .collect();
        let mut keyed: Vec<((usize, usize), usize)> =
            (0..n).map(|v| ((labels[v], layer[v]), v)).collect();
        keyed.sort_unstable();
        let mut next = vec![0usize; n];
        let mut id = 0;
        let mut start = 0;
        while start < n {
            let mut end = start;
            while end < n && keyed[end].0 == keyed[start].0 {
                end += 1;
            }
            let members: Vec<usize> = keyed[start..end].iter().map(|&(_, v)| v).collect();
            for comp in g.induced_components(&members) {
                for v in comp {
                    next[v] = id;
                }
                id += 1;
            }
            start = end;
        }
        labels = next;
    }

    let coarse = PaddedPartition::from_labels(&labels, delta);
    let tol = rel_slack(delta);
    let mut clipped = vec![0usize; n];
    let mut id = 0;
    for c in &coarse.clusters {
        if m.diameter(c) <= delta + tol {
            for &v in c {
                clipped[v] = id;
            }
            id += 1;
            continue;
        }
        let mut remaining = c.clone();
        while let Some(&x) = remaining.first() {
            let half = delta / T::lit(2.0);
            let (ball, rest): (Vec<usize>, Vec<usize>) =
                remaining.iter().partition(|&&y| m.get(x, y) <= half);
            for v in ball {
                clipped[v] = id;
            }
            id += 1;
            remaining = rest;
        }
    }
    Ok(PaddedPartition::from_labels(&clipped, delta))
}

/// Per-vertex padding radii over `samples` independent partitions; sample
/// `i` uses stream `i` of the seeded generator.
pub fn padding_radii<T: Scalar, S: PartitionSampler<T> + ?Sized>(
    sampler: &S,
    delta: T,
    samples: usize,
    seed: u64,
) -> Result<Vec<Vec<T>>> {
    let m = sampler.metric();
    let per_sample: Vec<Vec<T>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let p = sampler.sample(delta, &mut rng)?;
            Ok((0..m.n()).map(|x| p.padding_radius(m, x)).collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_sample)
}

/// Empirical `Pr[B(x, Δ/α) ⊆ P(x)]` for every `x`.
pub fn padding_probabilities<T: Scalar, S: PartitionSampler<T> + ?Sized>(
    sampler: &S,
    delta: T,
    alpha: T,
    samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if samples == 0 {
        return Err(Error::InvalidParam("need at least one sample".into()));
    }
    let radii = padding_radii(sampler, delta, samples, seed)?;
    let n = sampler.metric().n();
    let r = delta / alpha;
    Ok((0..n)
        .map(|x| radii.iter().filter(|row| r < row[x]).count() as f64 / samples as f64)
        .collect())
}

/// Smallest padding parameter reached with empirical probability ≥ 1/2.
#[derive(Debug, Clone, PartialEq)]
pub struct PaddingEstimate<T> {
    /// `max_x alpha_x`.
    pub alpha_hat: T,
    /// Per vertex, the infimum of `α` with `Pr[B(x, Δ/α) ⊆ P(x)] ≥ 1/2`.
    pub per_vertex: Vec<T>,
    pub samples: usize,
}

/// Padding is strict (`Δ/α < ρ_x`), so the reported values are infima: any
/// larger `α` achieves probability ≥ 1/2.
pub fn estimate_alpha<T: Scalar, S: PartitionSampler<T> + ?Sized>(
    sampler: &S,
    delta: T,
    samples: usize,
    seed: u64,
) -> Result<PaddingEstimate<T>> {
    if samples == 0 {
        return Err(Error::InvalidParam("need at least one sample".into()));
    }
    let radii = padding_radii(sampler, delta, samples, seed)?;
    let n = sampler.metric().n();
    let k = samples.div_ceil(2);
    let per_vertex: Vec<T> = (0..n)
        .map(|x| {
            let mut rho: Vec<T> = radii.iter().map(|row| row[x]).collect();
            rho.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
            delta / rho[k - 1]
        })
        .collect();
    let alpha_hat = per_vertex.iter().copied().fold(T::zero(), T::max);
    Ok(PaddingEstimate {
        alpha_hat,
        per_vertex,
        samples,
    })
}
