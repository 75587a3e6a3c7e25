//! Reports, scaling fits, and the size-ladder experiment.

use crate::embed::line_embed;
use crate::error::{Error, Result};
use crate::flow::{DualitySolution, SolverConfig};
use crate::graph::{all_pairs_metric, generate, FamilyName};
use crate::partition::{Chop, Ckr, PartitionKind};
use crate::scalar::{Norm, Scalar};
use crate::spectral::{
    fhl_sweep, lambda2_certificate, lambda2_solve, sweep_cut, EmbedConfig, Lambda2Certificate,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Ordered `key: value` document. Every section carries the producing
/// module, the library version and the seed, so each value can be traced
/// to the code and randomness that made it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Starts section `name` and tags it.
    pub fn section(&mut self, name: &str, module: &str, seed: u64) {
        self.push(&format!("{name}.module"), format!("{module} {VERSION}"));
        self.push(&format!("{name}.seed"), seed);
    }

    pub fn push(&mut self, key: &str, value: impl ToString) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }

    pub fn to_text(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
    }
}

/// Least-squares line through `(ln n, ln value)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
}

pub fn fit_scaling(points: &[(f64, f64)]) -> Result<ScalingFit> {
    if points.len() < 2 {
        return Err(Error::InvalidParam("a scaling fit needs at least two points".into()));
    }
    if let Some(&(n, v)) = points.iter().find(|&&(n, v)| !(n > 0.0 && v > 0.0)) {
        return Err(Error::InvalidParam(format!(
            "log-log fit needs positive values, got ({n}, {v})"
        )));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParam("all sizes are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(ScalingFit {
        slope,
        intercept,
        residual,
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub family: FamilyName,
    pub sizes: Vec<usize>,
    /// Neighbour count and dimension for the k-NN family.
    pub k: usize,
    pub dim: usize,
    pub seed: u64,
    pub solver: SolverConfig,
    pub trials: usize,
    pub partition: PartitionKind,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            family: FamilyName::Grid2d,
            sizes: vec![8, 16, 32],
            k: 4,
            dim: 2,
            seed: 0,
            solver: SolverConfig::default(),
            trials: 128,
            partition: PartitionKind::Ckr,
        }
    }
}

/// One rung of the ladder.
#[derive(Debug, Clone, PartialEq)]
pub struct LadderRow {
    pub size: usize,
    pub n: usize,
    pub con2: f64,
    pub lambda_s: f64,
    pub gap: f64,
    pub converged: bool,
    pub lambda2: f64,
    pub certificate: f64,
    pub cut_ratio: f64,
    pub separator_alpha: f64,
}

pub const LADDER_COLUMNS: [&str; 8] = [
    "n",
    "con2",
    "lambda_s",
    "gap",
    "lambda2",
    "certificate",
    "cut_ratio",
    "separator_alpha",
];

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub rows: Vec<LadderRow>,
    /// Log-log slope against `n` per column, in [`LADDER_COLUMNS`] order
    /// (skipping `n` and `gap`).
    pub slopes: Vec<(&'static str, Option<ScalingFit>)>,
}

impl ExperimentResult {
    pub fn slope(&self, column: &str) -> Option<f64> {
        self.slopes
            .iter()
            .find(|(c, _)| *c == column)
            .and_then(|(_, f)| f.map(|f| f.slope))
    }

    /// Header, one row per rung, then `# slope <column> <value>` lines.
    pub fn to_csv(&self) -> String {
        let mut out = LADDER_COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n, r.con2, r.lambda_s, r.gap, r.lambda2, r.certificate, r.cut_ratio, r.separator_alpha
            ));
        }
        for (c, fit) in &self.slopes {
            match fit {
                Some(f) => out.push_str(&format!("# slope {c} {}\n", f.slope)),
                None => out.push_str(&format!("# slope {c} unavailable\n")),
            }
        }
        out
    }

    pub fn report(&self, cfg: &ExperimentConfig) -> Report {
        let mut rep = Report::new();
        rep.section("experiment", "harness", cfg.seed);
        rep.push("experiment.family", cfg.family);
        let sizes: Vec<String> = cfg.sizes.iter().map(|s| s.to_string()).collect();
        rep.push("experiment.sizes", sizes.join(","));
        rep.push("experiment.solver.tol", cfg.solver.tol);
        rep.push("experiment.solver.max_iters", cfg.solver.max_iters);
        rep.push("experiment.solver.step", cfg.solver.step);
        rep.push("experiment.embed.trials", cfg.trials);
        rep.push("experiment.embed.partition", cfg.partition);
        for r in &self.rows {
            let p = format!("experiment.rung.{}", r.size);
            rep.push(&format!("{p}.n"), r.n);
            rep.push(&format!("{p}.con2"), r.con2);
            rep.push(&format!("{p}.lambda_s"), r.lambda_s);
            rep.push(&format!("{p}.gap"), r.gap);
            rep.push(&format!("{p}.converged"), r.converged);
            rep.push(&format!("{p}.lambda2"), r.lambda2);
            rep.push(&format!("{p}.certificate"), r.certificate);
            rep.push(&format!("{p}.cut_ratio"), r.cut_ratio);
            rep.push(&format!("{p}.separator_alpha"), r.separator_alpha);
        }
        for (c, fit) in &self.slopes {
            match fit {
                Some(f) => {
                    rep.push(&format!("experiment.slope.{c}"), f.slope);
                    rep.push(&format!("experiment.slope.{c}.residual"), f.residual);
                }
                None => rep.push(&format!("experiment.slope.{c}"), "unavailable"),
            }
        }
        rep
    }
}

/// Everything computed for a single graph of the ladder.
pub struct RungOutcome<T> {
    pub row: LadderRow,
    pub solution: DualitySolution<T>,
    pub certificate: Lambda2Certificate<T>,
}

/// Runs solve → certify → sweep → separator on one graph.
pub fn run_rung(cfg: &ExperimentConfig, size: usize) -> Result<RungOutcome<f64>> {
    let g = generate(&cfg.family.with_size(size, cfg.k, cfg.dim, cfg.seed))?;
    let embed = EmbedConfig {
        trials: cfg.trials,
        seed: cfg.seed,
        partition: cfg.partition,
        ..EmbedConfig::default()
    };
    let (cert, sol) = lambda2_certificate::<f64>(&g, &cfg.solver, &embed)?;
    let spec = lambda2_solve(&g, 1e-8)?;
    let cut = sweep_cut(&g, &spec.fiedler)?;
    let m = all_pairs_metric(&g, &sol.weights);
    let f1 = match cfg.partition {
        PartitionKind::Ckr => line_embed(&Ckr { metric: &m }, Norm::L1, cfg.trials, cfg.seed)?,
        PartitionKind::Chop { rounds } => line_embed(
            &Chop {
                graph: &g,
                metric: &m,
                rounds,
            },
            Norm::L1,
            cfg.trials,
            cfg.seed,
        )?,
    };
    let sep = fhl_sweep(&g, &sol.weights, &f1.f)?;
    let row = LadderRow {
        size,
        n: g.n(),
        con2: sol.dual_value,
        lambda_s: sol.primal_value,
        gap: sol.relative_gap(),
        converged: sol.converged,
        lambda2: spec.lambda2,
        certificate: cert.upper_bound,
        cut_ratio: cut.ratio,
        separator_alpha: sep.alpha,
    };
    Ok(RungOutcome {
        row,
        solution: sol,
        certificate: cert,
    })
}

/// Runs every rung in ladder order and fits log-log slopes against `n`.
/// Non-convergence of the flow solver is recorded per row, not raised.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    if cfg.sizes.is_empty() {
        return Err(Error::InvalidParam("size ladder is empty".into()));
    }
    let rows: Vec<LadderRow> = cfg
        .sizes
        .iter()
        .map(|&size| run_rung(cfg, size).map(|o| o.row))
        .collect::<Result<_>>()?;
    let column = |name: &str, r: &LadderRow| -> f64 {
        match name {
            "con2" => r.con2,
            "lambda_s" => r.lambda_s,
            "lambda2" => r.lambda2,
            "certificate" => r.certificate,
            "cut_ratio" => r.cut_ratio,
            _ => r.separator_alpha,
        }
    };
    let slopes = ["con2", "lambda_s", "lambda2", "certificate", "cut_ratio", "separator_alpha"]
        .into_iter()
        .map(|c| {
            let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n as f64, column(c, r))).collect();
            (c, fit_scaling(&pts).ok())
        })
        .collect();
    Ok(ExperimentResult { rows, slopes })
}

/// Report section for a solved duality pair.
pub fn solution_report<T: Scalar>(rep: &mut Report, name: &str, sol: &DualitySolution<T>) {
    rep.section(name, "flow", sol.seed);
    rep.push(&format!("{name}.step"), sol.step);
    rep.push(&format!("{name}.primal"), sol.primal_value);
    rep.push(&format!("{name}.dual"), sol.dual_value);
    rep.push(&format!("{name}.gap"), sol.gap);
    rep.push(&format!("{name}.relative_gap"), sol.relative_gap());
    rep.push(&format!("{name}.iterations"), sol.iterations);
    rep.push(&format!("{name}.converged"), sol.converged);
}

/// Report section for a certificate.
pub fn certificate_report<T: Scalar>(rep: &mut Report, name: &str, seed: u64, c: &Lambda2Certificate<T>) {
    rep.section(name, "spectral", seed);
    rep.push(&format!("{name}.upper_bound"), c.upper_bound);
    rep.push(&format!("{name}.lambda2"), c.lambda2);
    rep.push(&format!("{name}.lambda2_residual"), c.lambda2_residual);
    rep.push(&format!("{name}.embedding_case"), format!("{:?}", c.embedding_case));
    rep.push(&format!("{name}.distortion_ratio"), c.distortion_ratio);
    rep.push(&format!("{name}.lambda_s"), c.lambda_s);
    rep.push(&format!("{name}.edge_metric_energy"), c.edge_metric_energy);
    rep.push(&format!("{name}.edge_energy_cap"), c.edge_energy_cap);
    rep.push(&format!("{name}.pair_sum"), c.pair_sum);
    rep.push(&format!("{name}.pair_sq_sum"), c.pair_sq_sum);
    rep.push(&format!("{name}.pair_sq_floor"), c.pair_sq_floor);
    if let Some(a) = c.alpha_hat {
        rep.push(&format!("{name}.alpha_hat"), a);
    }
    if let Some(b) = c.closed_form_bound {
        rep.push(&format!("{name}.closed_form_bound"), b);
    }
}
