use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use flowspec::embed::line_embed;
use flowspec::flow::{solve_min_con2, DualitySolution, SolverConfig};
use flowspec::graph::{
    all_pairs_metric, format_graph, format_weights, generate, parse_graph, parse_weights, FamilyName, Graph,
    WeightFunction,
};
use flowspec::harness::{certificate_report, run_experiment, solution_report, ExperimentConfig, Report};
use flowspec::integral::{intersection_number, round_integral};
use flowspec::partition::{Chop, Ckr, PartitionKind};
use flowspec::scalar::Norm;
use flowspec::spectral::{certify_with_weights, fhl_sweep, lambda2_solve, sweep_cut, EmbedConfig};
use flowspec::{Error, Result};

#[derive(Parser)]
#[command(name = "flowspec", version, about = "Congestion-minimizing flows, metric embeddings and spectral bounds")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph in edge-list format.
    Gen(Opts),
    /// Minimize con₂ over all-pairs flows and report the duality pair.
    Solve(Opts),
    /// Round the solved flow to one path per pair.
    Round(Opts),
    /// Embed the weighted metric into the line.
    Embed(Opts),
    /// Compute λ₂ and a Fiedler vector.
    Eigen(Opts),
    /// Sweep cut along the Fiedler vector.
    Sweep(Opts),
    /// Balanced vertex separator from a threshold sweep of the embedding.
    Separate(Opts),
    /// Certified upper bound on λ₂ from the optimal weights.
    Certify(Opts),
    /// Run the full pipeline over a size ladder and fit scaling slopes.
    Experiment(Opts),
}

#[derive(Args, Clone)]
struct Opts {
    /// Family name (same as --family).
    #[arg(value_name = "FAMILY")]
    family_pos: Option<String>,
    /// Size or comma-separated ladder (same as --size).
    #[arg(value_name = "SIZE")]
    size_pos: Option<String>,
    /// Edge-list input file.
    #[arg(long, value_name = "FILE")]
    graph: Option<PathBuf>,
    /// path, cycle, grid2d, torus2d, grid3d, knn, complete or star.
    #[arg(long)]
    family: Option<String>,
    /// Size parameter, or K[,K...] for experiment.
    #[arg(long)]
    size: Option<String>,
    /// Neighbours per point for knn.
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Point dimension for knn.
    #[arg(long, default_value_t = 2)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative duality gap at which the solver stops.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Solver iteration cap.
    #[arg(long, default_value_t = 500)]
    iters: usize,
    /// Embedding trials (default 128) or rounding trials (default 64).
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long, default_value = "ckr")]
    partition: String,
    /// Embedding norm, 1 or 2.
    #[arg(long, default_value_t = 2)]
    p: u32,
    /// Vertex weights file; skips the solve where weights suffice.
    #[arg(long, value_name = "FILE")]
    weights: Option<PathBuf>,
    /// Directory for reports and artifacts instead of stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// CSV destination for experiment.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

impl Opts {
    fn family(&self) -> Result<Option<FamilyName>> {
        match (&self.family_pos, &self.family) {
            (Some(_), Some(_)) => Err(Error::InvalidParam("family given twice".into())),
            (Some(f), None) | (None, Some(f)) => f.parse().map(Some),
            (None, None) => Ok(None),
        }
    }

    fn sizes(&self) -> Result<Vec<usize>> {
        let text = match (&self.size_pos, &self.size) {
            (Some(_), Some(_)) => return Err(Error::InvalidParam("size given twice".into())),
            (Some(s), None) | (None, Some(s)) => s,
            (None, None) => return Err(Error::InvalidParam("--size is required with a family".into())),
        };
        text.split(',')
            .map(|t| {
                t.trim()
                    .parse()
                    .map_err(|_| Error::InvalidParam(format!("size `{t}` is not a non-negative integer")))
            })
            .collect()
    }

    fn partition(&self) -> Result<PartitionKind> {
        self.partition.parse()
    }

    fn norm(&self) -> Result<Norm> {
        match self.p {
            1 => Ok(Norm::L1),
            2 => Ok(Norm::L2),
            p => Err(Error::InvalidParam(format!("--p must be 1 or 2, got {p}"))),
        }
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            max_iters: self.iters,
            tol: self.tol,
            seed: self.seed,
            ..SolverConfig::default()
        }
    }

    fn embed(&self) -> Result<EmbedConfig> {
        Ok(EmbedConfig {
            trials: self.trials.unwrap_or(128),
            seed: self.seed,
            partition: self.partition()?,
            ..EmbedConfig::default()
        })
    }

    /// Loads `--graph` or generates from the family; records the source.
    fn load_graph(&self, rep: &mut Report) -> Result<Graph> {
        let g = match (&self.graph, self.family()?) {
            (Some(_), Some(_)) => return Err(Error::InvalidParam("give either --graph or a family, not both".into())),
            (Some(path), None) => {
                rep.push("input.graph", path.display());
                parse_graph(&fs::read_to_string(path)?)?
            }
            (None, Some(fam)) => {
                let sizes = self.sizes()?;
                let [size] = sizes[..] else {
                    return Err(Error::InvalidParam("this command takes a single size".into()));
                };
                rep.push("input.family", fam);
                rep.push("input.size", size);
                generate(&fam.with_size(size, self.k, self.dim, self.seed))?
            }
            (None, None) => return Err(Error::InvalidParam("no input: pass --graph FILE or a family and size".into())),
        };
        rep.push("input.n", g.n());
        rep.push("input.m", g.m());
        Ok(g)
    }
}

/// Where reports and artifacts go.
struct Sink {
    dir: Option<PathBuf>,
}

impl Sink {
    fn new(dir: Option<&Path>) -> Result<Self> {
        if let Some(d) = dir {
            fs::create_dir_all(d)?;
        }
        Ok(Sink {
            dir: dir.map(Path::to_path_buf),
        })
    }

    /// Artifacts are written only when an output directory is set.
    fn artifact(&self, name: &str, text: &str) -> Result<()> {
        if let Some(d) = &self.dir {
            fs::write(d.join(name), text)?;
        }
        Ok(())
    }

    fn report(&self, cmd: &str, rep: &Report) -> Result<()> {
        match &self.dir {
            Some(d) => fs::write(d.join(format!("{cmd}.txt")), rep.to_text())?,
            None => print!("{}", rep.to_text()),
        }
        Ok(())
    }
}

fn join<T: std::fmt::Display>(xs: &[T]) -> String {
    xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

/// Outcome of a command: whether every solve it depended on converged.
type Converged = bool;

/// Weights from `--weights`, or from a fresh solve recorded in the report.
fn weights_for(o: &Opts, g: &Graph, rep: &mut Report, sink: &Sink) -> Result<(WeightFunction<f64>, Converged)> {
    if let Some(path) = &o.weights {
        rep.push("input.weights", path.display());
        return Ok((parse_weights(&fs::read_to_string(path)?, g.n())?, true));
    }
    let sol = solve_min_con2::<f64>(g, &o.solver())?;
    record_solution(rep, sink, &sol)?;
    Ok((sol.weights, sol.converged))
}

fn record_solution(rep: &mut Report, sink: &Sink, sol: &DualitySolution<f64>) -> Result<()> {
    solution_report(rep, "solve", sol);
    rep.push("solve.s", join(sol.weights.values()));
    rep.push("solve.c", join(&sol.congestion.c));
    sink.artifact("weights.txt", &format_weights(&sol.weights))
}

fn run(cmd: Command) -> Result<Converged> {
    let (name, o) = match &cmd {
        Command::Gen(o) => ("gen", o),
        Command::Solve(o) => ("solve", o),
        Command::Round(o) => ("round", o),
        Command::Embed(o) => ("embed", o),
        Command::Eigen(o) => ("eigen", o),
        Command::Sweep(o) => ("sweep", o),
        Command::Separate(o) => ("separate", o),
        Command::Certify(o) => ("certify", o),
        Command::Experiment(o) => ("experiment", o),
    };
    let sink = Sink::new(o.out.as_deref())?;
    if let Command::Experiment(o) = &cmd {
        return experiment(o, &sink);
    }
    let mut rep = Report::new();
    rep.section("input", "graph", o.seed);
    let g = o.load_graph(&mut rep)?;
    let mut converged = true;
    match cmd {
        Command::Gen(_) => {
            let text = format_graph(&g);
            if parse_graph(&text)? != g {
                return Err(Error::Internal("edge list does not round-trip".into()));
            }
            match &sink.dir {
                Some(_) => sink.artifact("graph.txt", &text)?,
                None => {
                    print!("{text}");
                    return Ok(true);
                }
            }
        }
        Command::Solve(_) => {
            let sol = solve_min_con2::<f64>(&g, &o.solver())?;
            record_solution(&mut rep, &sink, &sol)?;
            converged = sol.converged;
        }
        Command::Round(_) => {
            let cfg = SolverConfig {
                store_paths: Some(true),
                ..o.solver()
            };
            let sol = solve_min_con2::<f64>(&g, &cfg)?;
            record_solution(&mut rep, &sink, &sol)?;
            converged = sol.converged;
            let flow = sol
                .flow
                .as_ref()
                .ok_or_else(|| Error::Internal("solver returned no paths".into()))?;
            let trials = o.trials.unwrap_or(64);
            let out = round_integral(&g, flow, trials, o.seed)?;
            let frac = flow.congestion();
            let con2 = frac.con_norm(Norm::L2);
            let con1 = frac.con_norm(Norm::L1);
            let rounded: f64 = out.best.con_norm(Norm::L2);
            let bound = con2 + con1.sqrt();
            if rounded > bound * (1.0 + 1e-12) {
                return Err(Error::Internal(format!(
                    "rounded con₂ {rounded} exceeds con₂ + √con₁ = {bound}"
                )));
            }
            let inter = intersection_number(&out.best);
            if out.best.con2_squared() < inter {
                return Err(Error::Internal(format!(
                    "con₂² = {} below inter = {inter}",
                    out.best.con2_squared()
                )));
            }
            rep.section("round", "integral", o.seed);
            rep.push("round.trials", trials);
            rep.push("round.best_trial", out.best_trial);
            rep.push("round.con2", rounded);
            rep.push("round.con2_squared", out.best.con2_squared());
            rep.push("round.bound", bound);
            rep.push("round.inter", inter);
            sink.artifact("paths.txt", &out.best.to_text())?;
        }
        Command::Embed(_) => {
            let (s, ok) = weights_for(o, &g, &mut rep, &sink)?;
            converged = ok;
            let m = all_pairs_metric(&g, &s);
            let emb = match o.partition()? {
                PartitionKind::Ckr => line_embed(&Ckr { metric: &m }, o.norm()?, o.embed()?.trials, o.seed)?,
                PartitionKind::Chop { rounds } => line_embed(
                    &Chop {
                        graph: &g,
                        metric: &m,
                        rounds,
                    },
                    o.norm()?,
                    o.embed()?.trials,
                    o.seed,
                )?,
            };
            rep.section("embed", "embed", o.seed);
            rep.push("embed.p", o.p);
            rep.push("embed.partition", o.partition()?);
            rep.push("embed.trials", o.embed()?.trials);
            rep.push("embed.case", format!("{:?}", emb.case));
            rep.push("embed.delta_p", emb.delta_p);
            rep.push("embed.spread", emb.spread);
            rep.push("embed.metric_mass", emb.metric_mass);
            rep.push("embed.distortion_ratio", emb.distortion_ratio());
            rep.push("embed.f", join(&emb.f));
            sink.artifact("embedding.txt", &emb.to_text())?;
        }
        Command::Eigen(_) => {
            let spec = lambda2_solve(&g, 1e-8)?;
            converged = spec.converged;
            rep.section("eigen", "spectral", o.seed);
            rep.push("eigen.lambda2", spec.lambda2);
            rep.push("eigen.method", format!("{:?}", spec.method));
            rep.push("eigen.residual", spec.residual);
            rep.push("eigen.iterations", spec.iterations);
            rep.push("eigen.converged", spec.converged);
            rep.push("eigen.fiedler", join(&spec.fiedler));
        }
        Command::Sweep(_) => {
            let spec = lambda2_solve(&g, 1e-8)?;
            converged = spec.converged;
            let cut = sweep_cut(&g, &spec.fiedler)?;
            rep.section("sweep", "spectral", o.seed);
            rep.push("sweep.lambda2", spec.lambda2);
            rep.push("sweep.ratio", cut.ratio);
            rep.push("sweep.bound", cut.bound);
            rep.push("sweep.cut_edges", cut.cut_edges);
            rep.push("sweep.side", join(&cut.side));
        }
        Command::Separate(_) => {
            let (s, ok) = weights_for(o, &g, &mut rep, &sink)?;
            converged = ok;
            let m = all_pairs_metric(&g, &s);
            let trials = o.embed()?.trials;
            let emb = match o.partition()? {
                PartitionKind::Ckr => line_embed(&Ckr { metric: &m }, Norm::L1, trials, o.seed)?,
                PartitionKind::Chop { rounds } => line_embed(
                    &Chop {
                        graph: &g,
                        metric: &m,
                        rounds,
                    },
                    Norm::L1,
                    trials,
                    o.seed,
                )?,
            };
            let sep = fhl_sweep(&g, &s, &emb.f)?;
            rep.section("separate", "spectral", o.seed);
            rep.push("separate.alpha", sep.alpha);
            rep.push("separate.bound", sep.bound);
            rep.push("separate.threshold", sep.threshold);
            rep.push("separate.degenerate", sep.degenerate);
            rep.push("separate.a", join(&sep.a));
            rep.push("separate.b", join(&sep.b));
            rep.push("separate.s", join(&sep.s));
            sink.artifact("separator.txt", &sep.to_text())?;
        }
        Command::Certify(_) => {
            let (s, ok) = weights_for(o, &g, &mut rep, &sink)?;
            converged = ok;
            let cert = certify_with_weights(&g, &s, &o.embed()?)?;
            certificate_report(&mut rep, "certify", o.seed, &cert);
        }
        Command::Experiment(_) => unreachable!("handled above"),
    }
    sink.report(name, &rep)?;
    Ok(converged)
}

fn experiment(o: &Opts, sink: &Sink) -> Result<Converged> {
    let cfg = ExperimentConfig {
        family: o.family()?.unwrap_or(FamilyName::Grid2d),
        sizes: if o.size_pos.is_none() && o.size.is_none() {
            vec![8, 16, 32]
        } else {
            o.sizes()?
        },
        k: o.k,
        dim: o.dim,
        seed: o.seed,
        solver: o.solver(),
        trials: o.trials.unwrap_or(128),
        partition: o.partition()?,
    };
    let result = run_experiment(&cfg)?;
    let csv = result.to_csv();
    match &o.csv {
        Some(path) => fs::write(path, &csv)?,
        None => print!("{csv}"),
    }
    let rep = result.report(&cfg);
    if sink.dir.is_some() || o.csv.is_some() {
        sink.report("experiment", &rep)?;
    }
    Ok(true)
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("FLOWSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidParam(format!("FLOWSPEC_THREADS `{v}` is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match configure_threads().and_then(|()| run(cli.cmd)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("flowspec: solver stopped before reaching the requested tolerance");
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("flowspec: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
