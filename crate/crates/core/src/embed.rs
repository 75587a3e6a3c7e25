//! Non-expansive line embeddings with large average pairwise spread.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::Metric;
use crate::partition::PartitionSampler;
use crate::scalar::{pairwise_spread, rel_slack, Norm, Scalar};

/// Lower bound `Σ|Δf|² ≥ Σd² / CLUSTERED_CONSTANT` when many points
/// crowd one small ball.
pub const CLUSTERED_CONSTANT: f64 = 160.0;

/// How the embedding was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum EmbeddingCase {
    /// Some ball of radius `Δ_p/4` holds at least a tenth of the points;
    /// `f` is the distance to the best such ball.
    Clustered { center: usize, ball_size: usize },
    /// Distance to a random union of partition clusters, best of trials.
    Partitioned { best_trial: usize },
    /// All distances are zero; `f ≡ 0`.
    Degenerate,
}

#[derive(Debug, Clone)]
pub struct LineEmbedding<T> {
    pub f: Vec<T>,
    pub p: Norm,
    pub case: EmbeddingCase,
    /// `(2/n² · Σ_{u<v} d^p)^{1/p}`.
    pub delta_p: T,
    /// `Σ_{u<v} |f(u) − f(v)|^p`.
    pub spread: T,
    /// `Σ_{u<v} d(u, v)^p`.
    pub metric_mass: T,
    /// `Σd² / CLUSTERED_CONSTANT`, set in the clustered case with p = 2.
    pub clustered_bound: Option<T>,
    /// Spread of every trial in the partitioned case, in trial order.
    pub trial_stats: Vec<T>,
}

impl<T: Scalar> LineEmbedding<T> {
    /// `Σd^p / Σ|Δf|^p`; infinite when `f` is constant on a non-trivial metric.
    pub fn distortion_ratio(&self) -> T {
        if self.spread > T::zero() {
            self.metric_mass / self.spread
        } else if self.metric_mass > T::zero() {
            T::infinity()
        } else {
            T::one()
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.case == EmbeddingCase::Degenerate
    }

    /// One line per vertex: `vertex value`.
    pub fn to_text(&self) -> String {
        self.f
            .iter()
            .enumerate()
            .map(|(v, x)| format!("{v} {x}\n"))
            .collect()
    }
}

/// `f(u) = min_{x ∈ set} d(u, x)`.
pub fn distance_to_set<T: Scalar>(m: &Metric<T>, set: &[usize]) -> Vec<T> {
    (0..m.n())
        .map(|u| {
            let row = m.row(u);
            set.iter().map(|&x| row[x]).fold(T::infinity(), T::min)
        })
        .collect()
}

/// Verifies `|f(u) − f(v)| ≤ d(u, v)` on every pair.
pub fn check_non_expansive<T: Scalar>(m: &Metric<T>, f: &[T]) -> Result<()> {
    let tol = rel_slack(m.max_distance());
    for u in 0..m.n() {
        for v in u + 1..m.n() {
            if (f[u] - f[v]).abs() > m.get(u, v) + tol {
                return Err(Error::Internal(format!(
                    "embedding expands pair ({u}, {v}): |{} - {}| > {}",
                    f[u],
                    f[v],
                    m.get(u, v)
                )));
            }
        }
    }
    Ok(())
}

fn spread<T: Scalar>(f: &[T], p: Norm) -> T {
    pairwise_spread(f, p == Norm::L2)
}

/// Embeds the sampler's metric into the line.
///
/// If a ball of radius `Δ_p/4` contains at least `n/10` points, `f` is the
/// distance to the best such ball. Otherwise each of `trials` draws takes a
/// partition at scale `Δ_p/4`, keeps every cluster with probability 1/2,
/// and uses the distance to their union; the draw with the largest spread
/// wins, ties going to the earliest trial. Trial `t` uses stream `t`, so a
/// run with more trials extends a run with fewer.
pub fn line_embed<T: Scalar, S: PartitionSampler<T> + ?Sized>(
    sampler: &S,
    p: Norm,
    trials: usize,
    seed: u64,
) -> Result<LineEmbedding<T>> {
    if trials == 0 {
        return Err(Error::InvalidParam("need at least one trial".into()));
    }
    let m = sampler.metric();
    let n = m.n();
    let squared = p == Norm::L2;
    let metric_mass = m.pair_sum(squared);
    let nf = T::from_count(n);
    let mean = T::lit(2.0) * metric_mass / (nf * nf);
    let delta_p = if squared { mean.sqrt() } else { mean };

    if metric_mass <= T::zero() {
        return Ok(LineEmbedding {
            f: vec![T::zero(); n],
            p,
            case: EmbeddingCase::Degenerate,
            delta_p,
            spread: T::zero(),
            metric_mass,
            clustered_bound: None,
            trial_stats: Vec::new(),
        });
    }

    let radius = delta_p / T::lit(4.0);
    let crowded: Vec<(usize, Vec<usize>)> = (0..n)
        .map(|x| (x, m.ball(x, radius)))
        .filter(|(_, b)| T::from_count(b.len()) * T::lit(10.0) >= nf)
        .collect();

    let embedding = if !crowded.is_empty() {
        let candidates: Vec<(usize, usize, Vec<T>, T)> = crowded
            .into_par_iter()
            .map(|(x, ball)| {
                let f = distance_to_set(m, &ball);
                let s = spread(&f, p);
                (x, ball.len(), f, s)
            })
            .collect();
        let mut best = 0;
        for (i, c) in candidates.iter().enumerate() {
            if c.3 > candidates[best].3 {
                best = i;
            }
        }
        let (center, ball_size, f, s) = candidates.into_iter().nth(best).expect("non-empty");
        let clustered_bound = squared.then(|| metric_mass / T::lit(CLUSTERED_CONSTANT));
        if let Some(bound) = clustered_bound {
            if s + rel_slack(bound) < bound {
                return Err(Error::Internal(format!(
                    "clustered embedding spread {s} below guaranteed {bound}"
                )));
            }
        }
        LineEmbedding {
            f,
            p,
            case: EmbeddingCase::Clustered { center, ball_size },
            delta_p,
            spread: s,
            metric_mass,
            clustered_bound,
            trial_stats: Vec::new(),
        }
    } else {
        let draws: Vec<(Vec<T>, T)> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(t as u64);
                let part = sampler.sample(radius, &mut rng)?;
                let keep: Vec<bool> = (0..part.clusters().len()).map(|_| rng.random_bool(0.5)).collect();
                let set: Vec<usize> = (0..n).filter(|&v| !keep[part.cluster_of(v)]).collect();
                let f = if set.is_empty() {
                    vec![T::zero(); n]
                } else {
                    distance_to_set(m, &set)
                };
                let s = spread(&f, p);
                Ok((f, s))
            })
            .collect::<Result<_>>()?;
        let trial_stats: Vec<T> = draws.iter().map(|d| d.1).collect();
        let mut best = 0;
        for (t, &s) in trial_stats.iter().enumerate() {
            if s > trial_stats[best] {
                best = t;
            }
        }
        let (f, s) = draws.into_iter().nth(best).expect("trials > 0");
        LineEmbedding {
            f,
            p,
            case: EmbeddingCase::Partitioned { best_trial: best },
            delta_p,
            spread: s,
            metric_mass,
            clustered_bound: None,
            trial_stats,
        }
    };
    check_non_expansive(m, &embedding.f)?;
    Ok(embedding)
}
