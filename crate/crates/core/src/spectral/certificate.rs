use crate::embed::{line_embed, EmbeddingCase, LineEmbedding};
use crate::error::{Error, Result};
use crate::flow::{solve_min_con2, SolverConfig};
use crate::graph::{all_pairs_metric, rayleigh_quotient, Graph, Metric, WeightFunction};
use crate::partition::{estimate_alpha, Chop, Ckr, PartitionKind, PartitionSampler};
use crate::scalar::{Norm, Scalar};

use super::eigen::lambda2_solve;

/// Settings for the embedding half of the certificate pipeline.
#[derive(Debug, Clone)]
pub struct EmbedConfig {
    pub trials: usize,
    pub seed: u64,
    pub partition: PartitionKind,
    /// Partitions drawn to estimate the padding parameter; 0 skips the
    /// estimate and the closed-form comparison bound.
    pub alpha_samples: usize,
    pub eigen_tol: f64,
}

impl Default for EmbedConfig {
    fn default() -> Self {
        EmbedConfig {
            trials: 128,
            seed: 0,
            partition: PartitionKind::Ckr,
            alpha_samples: 0,
            eigen_tol: 1e-8,
        }
    }
}

/// Certified upper bound on `λ₂` with the quantities that explain it.
#[derive(Debug, Clone)]
pub struct Lambda2Certificate<T> {
    /// Rayleigh quotient of the centered embedding; always `≥ λ₂`.
    pub upper_bound: T,
    pub weights: WeightFunction<T>,
    /// Centered embedding.
    pub f: Vec<T>,
    pub lambda2: T,
    pub lambda2_residual: T,
    pub embedding_case: EmbeddingCase,
    /// `Σd² / Σ|Δf|²` over unordered pairs.
    pub distortion_ratio: T,
    /// `Σ_{uv∈E} d_s(u, v)²`.
    pub edge_metric_energy: T,
    /// `4 d_max Σ s²`, an upper bound on the edge energy.
    pub edge_energy_cap: T,
    /// `Σ_{u<v} d_s`.
    pub pair_sum: T,
    /// `Σ_{u<v} d_s²`.
    pub pair_sq_sum: T,
    /// `(Σ d_s)² / #pairs`, the Cauchy–Schwarz lower bound on `pair_sq_sum`.
    pub pair_sq_floor: T,
    /// `Λ_s` for the weights used.
    pub lambda_s: T,
    pub alpha_hat: Option<T>,
    /// `4 d_max n³ α̂² / Λ_s²`.
    pub closed_form_bound: Option<T>,
}

/// Solves for the optimal weights and certifies with them.
pub fn lambda2_certificate<T: Scalar>(
    g: &Graph,
    solver: &SolverConfig,
    embed: &EmbedConfig,
) -> Result<(Lambda2Certificate<T>, crate::flow::DualitySolution<T>)> {
    let sol = solve_min_con2::<T>(g, solver)?;
    let cert = certify_with_weights(g, &sol.weights, embed)?;
    Ok((cert, sol))
}

fn sampler_for<'a, T: Scalar>(
    kind: PartitionKind,
    g: &'a Graph,
    m: &'a Metric<T>,
) -> Box<dyn PartitionSampler<T> + 'a> {
    match kind {
        PartitionKind::Ckr => Box::new(Ckr { metric: m }),
        PartitionKind::Chop { rounds } => Box::new(Chop {
            graph: g,
            metric: m,
            rounds,
        }),
    }
}

/// Embeds `(V, d_s)` into the line with `p = 2` and reports the Rayleigh
/// quotient of the result.
pub fn certify_with_weights<T: Scalar>(
    g: &Graph,
    s: &WeightFunction<T>,
    cfg: &EmbedConfig,
) -> Result<Lambda2Certificate<T>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition("certificate needs at least two vertices".into()));
    }
    if s.len() != n {
        return Err(Error::InvalidParam("one weight per vertex required".into()));
    }
    let m = all_pairs_metric(g, s);
    let sampler = sampler_for(cfg.partition, g, &m);
    let emb: LineEmbedding<T> = line_embed(sampler.as_ref(), Norm::L2, cfg.trials, cfg.seed)?;
    if emb.is_degenerate() {
        return Err(Error::Degenerate("embedding is constant; no certificate".into()));
    }
    let mean = emb.f.iter().copied().sum::<T>() / T::from_count(n);
    let f: Vec<T> = emb.f.iter().map(|&x| x - mean).collect();
    let upper_bound = rayleigh_quotient(g, &f)?;

    let spec = lambda2_solve(g, T::lit(cfg.eigen_tol))?;
    let slack = spec.residual + T::lit(1e-9) * T::one().max(spec.lambda2);
    if upper_bound < spec.lambda2 - slack {
        return Err(Error::Internal(format!(
            "Rayleigh quotient {upper_bound} below computed λ₂ {}",
            spec.lambda2
        )));
    }

    let edge_metric_energy: T = g
        .edges()
        .iter()
        .map(|&(u, v)| m.get(u, v) * m.get(u, v))
        .sum();
    let sum_sq: T = s.values().iter().map(|&x| x * x).sum();
    let edge_energy_cap = T::lit(4.0) * T::from_count(g.max_degree()) * sum_sq;
    let pair_sum = m.pair_sum(false);
    let pair_sq_sum = m.pair_sum(true);
    let pairs = T::from_count(n * (n - 1) / 2);
    let pair_sq_floor = pair_sum * pair_sum / pairs;
    let lambda_s = pair_sum / s.l2_norm();

    let alpha_hat = if cfg.alpha_samples > 0 {
        Some(estimate_alpha(sampler.as_ref(), emb.delta_p / T::lit(4.0), cfg.alpha_samples, cfg.seed)?.alpha_hat)
    } else {
        None
    };
    let nf = T::from_count(n);
    let closed_form_bound = alpha_hat.map(|a| {
        T::lit(4.0) * T::from_count(g.max_degree()) * nf * nf * nf * a * a / (lambda_s * lambda_s)
    });

    Ok(Lambda2Certificate {
        upper_bound,
        weights: s.clone(),
        f,
        lambda2: spec.lambda2,
        lambda2_residual: spec.residual,
        distortion_ratio: emb.distortion_ratio(),
        embedding_case: emb.case,
        edge_metric_energy,
        edge_energy_cap,
        pair_sum,
        pair_sq_sum,
        pair_sq_floor,
        lambda_s,
        alpha_hat,
        closed_form_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family};
    use crate::scalar::rel_slack;

    #[test]
    fn k2_certificate_is_exact() {
        let g = generate(&Family::Complete { n: 2 }).unwrap();
        let (c, _) = lambda2_certificate::<f64>(&g, &SolverConfig::default(), &EmbedConfig::default()).unwrap();
        assert!((c.upper_bound - 2.0).abs() < 1e-12);
    }

    #[test]
    fn path3_certificate() {
        let g = generate(&Family::Path { n: 3 }).unwrap();
        let (c, _) = lambda2_certificate::<f64>(&g, &SolverConfig::default(), &EmbedConfig::default()).unwrap();
        assert!(c.upper_bound >= 1.0 - 1e-9);
        assert!(c.upper_bound <= 12.0);
        assert!((c.lambda2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn intermediate_inequalities_hold() {
        let g = generate(&Family::Grid2d { side: 5 }).unwrap();
        let cfg = EmbedConfig {
            alpha_samples: 50,
            ..EmbedConfig::default()
        };
        let (c, _) = lambda2_certificate::<f64>(&g, &SolverConfig::default(), &cfg).unwrap();
        assert!(c.edge_metric_energy <= c.edge_energy_cap + rel_slack(c.edge_energy_cap));
        assert!(c.pair_sq_floor <= c.pair_sq_sum + rel_slack(c.pair_sq_sum));
        assert!(c.upper_bound >= c.lambda2 - 1e-9);
        assert!(c.closed_form_bound.unwrap() >= c.upper_bound);
    }

    #[test]
    fn chop_source_works() {
        let g = generate(&Family::Torus2d { side: 5 }).unwrap();
        let cfg = EmbedConfig {
            partition: PartitionKind::Chop { rounds: 3 },
            ..EmbedConfig::default()
        };
        let c = certify_with_weights(&g, &WeightFunction::uniform(25, 1.0f64), &cfg).unwrap();
        assert!(c.upper_bound >= c.lambda2 - 1e-9);
    }
}
