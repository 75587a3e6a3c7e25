//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::Instant;

use flowspec::embed::{line_embed, LineEmbedding};
use flowspec::flow::{solve_min_con2, DualitySolution, SolverConfig, StepRule};
use flowspec::graph::{all_pairs_metric, generate, hop_metric, Family, FamilyName, Graph, Metric, WeightFunction};
use flowspec::harness::{run_experiment, ExperimentConfig};
use flowspec::integral::{
    extract_minor, intersection_number, round_integral, subsample_inter_stats,
    subsample_terminals, IntegralFlow,
};
use flowspec::partition::{estimate_alpha, Chop, Ckr};
use flowspec::scalar::Norm;
use flowspec::spectral::{
    fhl_sweep, lambda2_dense, lambda2_iterative, lambda2_solve, recursive_edge_separator, sweep_cut, CutResult,
    SweepCutter, VertexSeparator,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Everything produced along the way that later criteria audit.
#[derive(Default)]
struct Ledger {
    integral_flows: Vec<(String, Graph, IntegralFlow)>,
    sweeps: usize,
    sweep_failures: Vec<String>,
    separators: usize,
    separator_failures: Vec<String>,
    embeddings: usize,
    embedding_failures: Vec<String>,
}

impl Ledger {
    fn record_sweep(&mut self, label: &str, g: &Graph, v: &[f64], cut: &CutResult<f64>) {
        self.sweeps += 1;
        if let Err(e) = audit_sweep(g, v, cut) {
            self.sweep_failures.push(format!("{label}: {e}"));
        }
    }

    fn record_separator(&mut self, label: &str, g: &Graph, s: &[f64], f: &[f64], sep: &VertexSeparator<f64>) {
        self.separators += 1;
        if let Err(e) = audit_separator(g, s, f, sep) {
            self.separator_failures.push(format!("{label}: {e}"));
        }
    }

    fn record_embedding(&mut self, label: &str, d: &[Vec<f64>], f: &[f64]) {
        self.embeddings += 1;
        if let Err(e) = audit_non_expansive(d, f) {
            self.embedding_failures.push(format!("{label}: {e}"));
        }
    }
}

/// Recomputes `Φ(S)` and the sweep bound from scratch.
fn audit_sweep(g: &Graph, v: &[f64], cut: &CutResult<f64>) -> Result<(), String> {
    let n = g.n();
    let mut inside = vec![false; n];
    cut.side.iter().for_each(|&u| inside[u] = true);
    let crossing = g.edges().iter().filter(|&&(a, b)| inside[a] != inside[b]).count();
    let small = cut.side.len().min(n - cut.side.len());
    if small == 0 {
        return Err("empty side".into());
    }
    let phi = crossing as f64 / small as f64;
    if (phi - cut.ratio).abs() > 1e-12 * phi.max(1.0) {
        return Err(format!("reported ratio {} but recomputed {phi}", cut.ratio));
    }
    let mean = v.iter().sum::<f64>() / n as f64;
    let c: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let energy: f64 = g.edges().iter().map(|&(a, b)| (c[a] - c[b]).powi(2)).sum();
    let norm: f64 = c.iter().map(|x| x * x).sum();
    let dmax = (0..n).map(|u| g.neighbors(u).len()).max().unwrap() as f64;
    let bound = (2.0 * dmax * energy / norm).sqrt();
    if phi > bound * (1.0 + 1e-12) {
        return Err(format!("Φ = {phi} exceeds bound {bound}"));
    }
    Ok(())
}

/// Partition, `E(A,B) = ∅`, `α` and the threshold-sweep bound, from scratch.
fn audit_separator(g: &Graph, s: &[f64], f: &[f64], sep: &VertexSeparator<f64>) -> Result<(), String> {
    let n = g.n();
    let mut label = vec![0u8; n];
    for (tag, set) in [(1u8, &sep.a), (2, &sep.b), (3, &sep.s)] {
        for &v in set {
            if label[v] != 0 {
                return Err(format!("vertex {v} in two parts"));
            }
            label[v] = tag;
        }
    }
    if label.contains(&0) {
        return Err("parts do not cover V".into());
    }
    if let Some(&(a, b)) = g
        .edges()
        .iter()
        .find(|&&(a, b)| (label[a], label[b]) == (1, 2) || (label[a], label[b]) == (2, 1))
    {
        return Err(format!("edge ({a}, {b}) joins A and B"));
    }
    let (na, nb, ns) = (sep.a.len() as f64, sep.b.len() as f64, sep.s.len() as f64);
    let alpha = ns / ((na + ns) * (nb + ns));
    if (alpha - sep.alpha).abs() > 1e-12 * alpha {
        return Err(format!("reported α {} but recomputed {alpha}", sep.alpha));
    }
    let spread: f64 = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).map(|(u, v)| (f[u] - f[v]).abs()).sum();
    if spread > 0.0 {
        let bound = 2.0 * s.iter().sum::<f64>() / spread;
        if alpha > bound * (1.0 + 1e-12) {
            return Err(format!("α = {alpha} exceeds 2Σs/Σ|Δf| = {bound}"));
        }
    }
    Ok(())
}

/// `|f(u) − f(v)| ≤ d(u, v)` on all pairs. `d` comes from an independent
/// shortest-path computation, so equality cases may differ in the last
/// ulp; the slack is 1e-12 of the largest distance.
fn audit_non_expansive(d: &[Vec<f64>], f: &[f64]) -> Result<(), String> {
    let n = f.len();
    let dmax = d.iter().flatten().cloned().fold(0.0, f64::max);
    for u in 0..n {
        for v in u + 1..n {
            if (f[u] - f[v]).abs() > d[u][v] + 1e-12 * dmax {
                return Err(format!("pair ({u}, {v}) expanded: {} > {}", (f[u] - f[v]).abs(), d[u][v]));
            }
        }
    }
    Ok(())
}

fn nalgebra_lambda2(g: &Graph) -> f64 {
    let n = g.n();
    let mut l = DMatrix::<f64>::zeros(n, n);
    for &(u, v) in g.edges() {
        l[(u, u)] += 1.0;
        l[(v, v)] += 1.0;
        l[(u, v)] -= 1.0;
        l[(v, u)] -= 1.0;
    }
    let mut ev: Vec<f64> = l.symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev[1]
}

fn embed_with(g: &Graph, m: &Metric<f64>, chop: bool, p: Norm, trials: usize, seed: u64) -> LineEmbedding<f64> {
    if chop {
        line_embed(&Chop { graph: g, metric: m, rounds: 3 }, p, trials, seed).unwrap()
    } else {
        line_embed(&Ckr { metric: m }, p, trials, seed).unwrap()
    }
}

fn corpus_solutions(corpus: &[Graph]) -> Vec<DualitySolution<f64>> {
    corpus
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let cfg = SolverConfig {
                seed: i as u64,
                ..SolverConfig::default()
            };
            solve_min_con2::<f64>(g, &cfg).unwrap()
        })
        .collect()
}

fn c1_path3_duality() -> Outcome {
    let g = generate(&Family::Path { n: 3 }).unwrap();
    let start = Instant::now();
    let cfg = SolverConfig {
        tol: 1e-10,
        max_iters: 100_000,
        ..SolverConfig::default()
    };
    let sol = solve_min_con2::<f64>(&g, &cfg).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let target = 17f64.sqrt();
    let detail = format!(
        "primal {:.12} dual {:.12} target {target:.12} converged {} in {elapsed:.3}s",
        sol.primal_value, sol.dual_value, sol.converged
    );
    let ok = sol.converged
        && (sol.primal_value - target).abs() <= 1e-6
        && (sol.dual_value - target).abs() <= 1e-6
        && elapsed < 1.0;
    if ok { Ok(detail) } else { Err(detail) }
}

fn c2_weak_duality(corpus: &[Graph], sols: &[DualitySolution<f64>]) -> Outcome {
    let mut violations = Vec::new();
    let mut converged = 0;
    for (i, sol) in sols.iter().enumerate() {
        let max_primal = sol.trace.iter().map(|r| r.primal).fold(f64::NEG_INFINITY, f64::max);
        let min_dual = sol.trace.iter().map(|r| r.dual).fold(f64::INFINITY, f64::min);
        if sol.trace.is_empty() || max_primal > min_dual + 1e-9 || sol.primal_value > sol.dual_value + 1e-9 {
            violations.push(i);
        }
        if sol.converged && sol.relative_gap() <= 1e-3 && sol.iterations <= 500 {
            converged += 1;
        }
    }
    let share = converged as f64 / corpus.len() as f64;
    let detail = format!(
        "{} graphs, {} iterates checked, {} violations, converged {converged}/{} ({:.0}%)",
        corpus.len(),
        sols.iter().map(|s| s.trace.len()).sum::<usize>(),
        violations.len(),
        corpus.len(),
        share * 100.0
    );
    if corpus.len() >= 50 && violations.is_empty() && share >= 0.9 {
        Ok(detail)
    } else {
        Err(format!("{detail}; violating graphs {violations:?}"))
    }
}

fn c3_oracle_equivalence(corpus: &[Graph]) -> Outcome {
    let mut fixtures = common::small_fixtures();
    for (i, g) in corpus.iter().enumerate().filter(|(_, g)| g.n() <= 6) {
        fixtures.push((format!("corpus{i}"), g.clone()));
    }
    let mut worst = 0.0f64;
    let mut failures = Vec::new();
    for (name, g) in &fixtures {
        let oracle = common::brute_force_con2(g, 1e-9, 400_000);
        let width = oracle.upper - oracle.lower;
        let cfg = SolverConfig {
            tol: 1e-6,
            max_iters: 200_000,
            step: StepRule::LineSearch,
            ..SolverConfig::default()
        };
        let sol = solve_min_con2::<f64>(g, &cfg).unwrap();
        // Both brackets contain the optimum, so the distance between the
        // solver value and the oracle value is bounded by the bracket widths.
        let mid = 0.5 * (oracle.upper + oracle.lower);
        let err = (sol.dual_value - mid).abs();
        worst = worst.max(err);
        if err > 1e-4 || width > 1e-5 || !sol.converged {
            failures.push(format!(
                "{name}: solver {} oracle [{}, {}] converged {}",
                sol.dual_value, oracle.lower, oracle.upper, sol.converged
            ));
        }
    }
    let detail = format!("{} graphs with n ≤ 6, worst |solver − oracle| = {worst:.2e}", fixtures.len());
    if failures.is_empty() { Ok(detail) } else { Err(format!("{detail}; {}", failures.join("; "))) }
}

fn c4_rounding(corpus: &[Graph], sols: &[DualitySolution<f64>], ledger: &mut Ledger) -> Outcome {
    let mut violations = Vec::new();
    let mut worst_slack = f64::INFINITY;
    for (i, (g, sol)) in corpus.iter().zip(sols).enumerate() {
        let flow = sol.flow.as_ref().expect("corpus graphs are small enough to keep paths");
        let mut c = vec![0.0; g.n()];
        for list in flow.routes() {
            for r in list {
                for &v in &r.path {
                    c[v] += r.weight;
                }
            }
        }
        let con2 = c.iter().map(|x| x * x).sum::<f64>().sqrt();
        let con1: f64 = c.iter().sum();
        let out = round_integral(g, flow, 64, i as u64).unwrap();
        let best = (integral_loads_norm(g, &out.best) as f64).sqrt();
        let bound = con2 + con1.sqrt();
        worst_slack = worst_slack.min(bound - best);
        if best > bound {
            violations.push(format!("graph {i}: {best} > {bound}"));
        }
        ledger.integral_flows.push((format!("rounding{i}"), g.clone(), out.best));
    }
    let detail = format!(
        "{} flows, 64 trials each, {} violations, smallest slack {worst_slack:.3}",
        corpus.len(),
        violations.len()
    );
    if violations.is_empty() { Ok(detail) } else { Err(format!("{detail}; {}", violations.join("; "))) }
}

fn integral_loads_norm(g: &Graph, flow: &IntegralFlow) -> u64 {
    common::integral_loads(g.n(), flow.paths()).iter().map(|c| c * c).sum()
}

fn c5_con2_vs_inter(ledger: &Ledger) -> Outcome {
    let (_, star) = common::star_fixture();
    let star_sq = integral_loads_norm(&generate(&Family::Star { leaves: 4 }).unwrap(), &star);
    let star_inter = common::brute_inter(star.demands().edges(), star.paths());
    let mut failures = Vec::new();
    if star_sq != 8 || star_inter != 1 {
        failures.push(format!("star: con₂² = {star_sq}, inter = {star_inter}"));
    }
    for (name, g, flow) in &ledger.integral_flows {
        let sq = integral_loads_norm(g, flow);
        let inter = common::brute_inter(flow.demands().edges(), flow.paths());
        if flow.con2_squared() != sq || intersection_number(flow) != inter {
            failures.push(format!("{name}: library and oracle disagree"));
        }
        if sq < inter {
            failures.push(format!("{name}: con₂² = {sq} < inter = {inter}"));
        }
    }
    let detail = format!(
        "{} integral flows plus star (con₂² = {star_sq}, inter = {star_inter})",
        ledger.integral_flows.len()
    );
    if failures.is_empty() { Ok(detail) } else { Err(format!("{detail}; {}", failures.join("; "))) }
}

fn c6_minor_extraction(ledger: &mut Ledger) -> Outcome {
    let mut fixtures = vec![("grid2d(4) K22".to_string(), common::grid_k22())];
    for seed in 0..20 {
        fixtures.push((format!("random{seed}"), common::intersection_free_fixture(seed)));
    }
    let mut failures = Vec::new();
    for (name, (g, flow)) in &fixtures {
        let inter = common::brute_inter(flow.demands().edges(), flow.paths());
        let result = extract_minor(g, flow).map_err(|e| e.to_string()).and_then(|bd| {
            common::check_minor(g, flow.demands().edges(), &bd.branch_sets, &bd.witness_edges)
        });
        if inter != 0 {
            failures.push(format!("{name}: fixture has inter {inter}"));
        } else if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
        ledger.integral_flows.push((name.clone(), g.clone(), flow.clone()));
    }
    let passed = fixtures.len() - failures.len();
    let detail = format!("{passed}/{} decompositions verified", fixtures.len());
    if failures.is_empty() { Ok(detail) } else { Err(format!("{detail}; {}", failures.join("; "))) }
}

fn c7_subsampling(ledger: &mut Ledger) -> Outcome {
    let (g, flow) = common::k6_in_grid();
    let inter = common::brute_inter(flow.demands().edges(), flow.paths());
    let p = 0.7;
    let samples = 2000;
    let seed = 11;
    let mut values = Vec::with_capacity(samples);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..samples {
        let sub = subsample_terminals(&flow, p, rng.random()).unwrap();
        values.push(common::brute_inter(sub.demands().edges(), sub.paths()) as f64);
        if k < 20 {
            ledger.integral_flows.push((format!("k6 subsample {k}"), g.clone(), sub));
        }
    }
    ledger.integral_flows.push(("k6 in grid".into(), g.clone(), flow.clone()));
    let mean = values.iter().sum::<f64>() / samples as f64;
    let var = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (samples - 1) as f64;
    let se = (var / samples as f64).sqrt();
    let expected = p.powi(4) * inter as f64;
    let z = (mean - expected) / se;
    let lib = subsample_inter_stats(&flow, p, samples, seed).unwrap();
    let detail = format!(
        "inter {inter}, mean {mean:.3} vs p⁴·inter {expected:.3}, SE {se:.3}, z {z:.2}; library estimator z {:.2}",
        lib.z_score()
    );
    if inter > 0 && z.abs() <= 5.0 && lib.z_score().abs() <= 5.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c8_embedding(corpus: &[Graph], sols: &[DualitySolution<f64>], ledger: &mut Ledger) -> Outcome {
    let mut failures = Vec::new();
    let mut lines = Vec::new();
    let g = generate(&Family::Grid2d { side: 8 }).unwrap();
    let sol = solve_min_con2::<f64>(&g, &SolverConfig::default()).unwrap();
    let cases: Vec<(&str, Metric<f64>, Vec<Vec<f64>>, usize)> = vec![
        ("hop", hop_metric(&g), common::hop_table(&g), 200),
        (
            "solved",
            all_pairs_metric(&g, &sol.weights),
            common::floyd_vertex_metric(&g, sol.weights.values()),
            128,
        ),
    ];
    for (name, m, d, trials) in &cases {
        for chop in [false, true] {
            let source = if chop { "chop" } else { "ckr" };
            let emb = embed_with(&g, m, chop, Norm::L2, *trials, 5);
            ledger.record_embedding(&format!("grid8 {name} {source}"), d, &emb.f);
            let radius = emb.delta_p / 4.0;
            let est = if chop {
                estimate_alpha(&Chop { graph: &g, metric: m, rounds: 3 }, radius, 200, 5)
            } else {
                estimate_alpha(&Ckr { metric: m }, radius, 200, 5)
            }
            .unwrap();
            let ratio = emb.distortion_ratio();
            let cap = (10.0 * est.alpha_hat).powi(2);
            lines.push(format!("{name}/{source} ratio {ratio:.1} ≤ (10·{:.2})² = {cap:.0}", est.alpha_hat));
            if ratio > cap {
                failures.push(format!("{name}/{source}: ratio {ratio} > {cap}"));
            }
        }
    }
    for (i, (g, sol)) in corpus.iter().zip(sols).enumerate() {
        let m = all_pairs_metric(g, &sol.weights);
        let d = common::floyd_vertex_metric(g, sol.weights.values());
        for p in [Norm::L1, Norm::L2] {
            for chop in [false, true] {
                let emb = embed_with(g, &m, chop, p, 16, i as u64);
                ledger.record_embedding(&format!("corpus{i}"), &d, &emb.f);
            }
        }
    }
    failures.extend(ledger.embedding_failures.iter().cloned());
    let detail = format!("{} embeddings non-expansive; {}", ledger.embeddings, lines.join(", "));
    if failures.is_empty() { Ok(detail) } else { Err(format!("{detail}; {}", failures.join("; "))) }
}

fn spectral_fixtures(corpus: &[Graph]) -> Vec<(String, Graph)> {
    let mut out: Vec<(String, Graph)> = corpus.iter().enumerate().map(|(i, g)| (format!("corpus{i}"), g.clone())).collect();
    let mut fams = vec![
        Family::Complete { n: 2 },
        Family::Knn { n: 60, k: 5, dim: 2, seed: 3 },
        Family::Knn { n: 50, k: 6, dim: 3, seed: 1 },
    ];
    for n in [3, 10, 33, 64] {
        fams.push(Family::Path { n });
        fams.push(Family::Cycle { n });
        fams.push(Family::Star { leaves: n - 1 });
    }
    fams.extend((3..=12).map(|n| Family::Complete { n }));
    fams.extend((2..=8).map(|side| Family::Grid2d { side }));
    fams.extend((3..=8).map(|side| Family::Torus2d { side }));
    fams.extend((2..=4).map(|side| Family::Grid3d { side }));
    for f in fams {
        if let Ok(g) = generate(&f) {
            out.push((format!("{f:?}"), g));
        }
    }
    out
}

fn c9_eigensolver(fixtures: &[(String, Graph)], ledger: &mut Ledger) -> Outcome {
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    for (name, g) in fixtures.iter().filter(|(_, g)| g.n() <= 64) {
        let oracle = nalgebra_lambda2(g);
        let dense = lambda2_dense(g, 1e-10).unwrap();
        let iter = lambda2_iterative(g, 1e-10).unwrap();
        let auto = lambda2_solve(g, 1e-8).unwrap();
        for (label, v) in [("dense", dense.lambda2), ("iterative", iter.lambda2), ("default", auto.lambda2)] {
            let err = (v - oracle).abs();
            worst = worst.max(err);
            if err > 1e-8 {
                failures.push(format!("{name} {label}: {v} vs {oracle}"));
            }
        }
        if g.n() >= 2 {
            let cut = sweep_cut(g, &auto.fiedler).unwrap();
            ledger.record_sweep(name, g, &auto.fiedler, &cut);
            let cut = sweep_cut(g, &iter.fiedler).unwrap();
            ledger.record_sweep(name, g, &iter.fiedler, &cut);
        }
    }
    for m in 2..=8usize {
        let g = generate(&Family::Grid2d { side: m }).unwrap();
        let want = 4.0 * (std::f64::consts::PI / (2.0 * m as f64)).sin().powi(2);
        let got = lambda2_solve(&g, 1e-10).unwrap().lambda2;
        worst = worst.max((got - want).abs());
        if (got - want).abs() > 1e-8 {
            failures.push(format!("grid2d({m}): {got} vs closed form {want}"));
        }
    }
    let count = fixtures.iter().filter(|(_, g)| g.n() <= 64).count();
    let detail = format!("{count} graphs × 3 solvers plus grid closed forms, worst error {worst:.1e}");
    if failures.is_empty() { Ok(detail) } else { Err(format!("{detail}; {}", failures.join("; "))) }
}

fn c10_sweep(corpus: &[Graph], ledger: &mut Ledger) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for (i, g) in corpus.iter().enumerate() {
        for _ in 0..4 {
            let v: Vec<f64> = (0..g.n()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let cut = sweep_cut(g, &v).unwrap();
            ledger.record_sweep(&format!("corpus{i} random"), g, &v, &cut);
        }
    }
    let mut separator_errors = Vec::new();
    for side in [4, 6, 8] {
        let g = generate(&Family::Grid2d { side }).unwrap();
        if let Err(e) = recursive_edge_separator(&g, &SweepCutter { tol: 1e-10 }, 1.0 / 3.0) {
            separator_errors.push(format!("grid2d({side}): {e}"));
        }
    }
    let mut failures: Vec<String> = ledger.sweep_failures.clone();
    failures.extend(separator_errors);
    let detail = format!("{} sweeps audited plus recursive separators, {} violations", ledger.sweeps, failures.len());
    if failures.is_empty() { Ok(detail) } else { Err(format!("{detail}; {}", failures.join("; "))) }
}

fn c11_fhl(corpus: &[Graph], sols: &[DualitySolution<f64>], ledger: &mut Ledger) -> Outcome {
    let mut runs: Vec<(String, Graph, WeightFunction<f64>)> = corpus
        .iter()
        .zip(sols)
        .enumerate()
        .map(|(i, (g, s))| (format!("corpus{i}"), g.clone(), s.weights.clone()))
        .collect();
    for side in [4, 6, 8] {
        let g = generate(&Family::Grid2d { side }).unwrap();
        let s = solve_min_con2::<f64>(&g, &SolverConfig::default()).unwrap().weights;
        runs.push((format!("grid2d({side})"), g, s));
    }
    let mut errors = Vec::new();
    for (label, g, s) in &runs {
        let m = all_pairs_metric(g, s);
        for p in [Norm::L1, Norm::L2] {
            for chop in [false, true] {
                let emb = embed_with(g, &m, chop, p, 32, 7);
                match fhl_sweep(g, s, &emb.f) {
                    Ok(sep) => ledger.record_separator(label, g, s.values(), &emb.f, &sep),
                    Err(e) => errors.push(format!("{label}: {e}")),
                }
            }
        }
    }
    let mut failures = ledger.separator_failures.clone();
    failures.extend(errors);
    let detail = format!("{} separators audited, {} violations", ledger.separators, failures.len());
    if failures.is_empty() { Ok(detail) } else { Err(format!("{detail}; {}", failures.join("; "))) }
}

fn c12_scaling() -> Outcome {
    let start = Instant::now();
    let cfg = ExperimentConfig {
        family: FamilyName::Grid2d,
        sizes: vec![8, 16, 32],
        ..ExperimentConfig::default()
    };
    let result = run_experiment(&cfg).unwrap();
    let elapsed = start.elapsed().as_secs_f64();
    let cert = result.slope("certificate").unwrap_or(f64::NAN);
    let con2 = result.slope("con2").unwrap_or(f64::NAN);
    let valid = result.rows.iter().all(|r| r.certificate >= r.lambda2 - 1e-9);
    let cert_ok = (-1.3..=-0.7).contains(&cert);
    let con2_ok = (1.7..=2.3).contains(&con2);
    let detail = format!(
        "certificate slope {cert:.3} (need [−1.3, −0.7]: {}), con2 slope {con2:.3} (need [1.7, 2.3]: {}), \
         certificates {:?}, {elapsed:.1}s",
        if cert_ok { "ok" } else { "MISSED" },
        if con2_ok { "ok" } else { "MISSED" },
        result.rows.iter().map(|r| format!("{:.4}", r.certificate)).collect::<Vec<_>>()
    );
    if cert_ok && con2_ok && valid && elapsed <= 120.0 {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn main() {
    let corpus = common::corpus(60, 2024);
    let sols = corpus_solutions(&corpus);
    let mut ledger = Ledger::default();
    let spectral = spectral_fixtures(&corpus);

    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut run = |id: u32, name: &'static str, f: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let out = f();
        let status = if out.is_ok() { "PASS" } else { "FAIL" };
        let text = match &out {
            Ok(s) | Err(s) => s.clone(),
        };
        println!("criterion {id:>2} {status} {name}: {text} [{:.1}s]", start.elapsed().as_secs_f64());
        results.push((id, name, out));
    };

    run(1, "path(3) strong duality", &mut c1_path3_duality);
    run(2, "weak duality on corpus", &mut || c2_weak_duality(&corpus, &sols));
    run(3, "brute-force oracle equivalence", &mut || c3_oracle_equivalence(&corpus));
    run(4, "rounding bound", &mut || c4_rounding(&corpus, &sols, &mut ledger));
    run(6, "minor extraction", &mut || c6_minor_extraction(&mut ledger));
    run(7, "subsampling law", &mut || c7_subsampling(&mut ledger));
    run(5, "con₂² ≥ inter", &mut || c5_con2_vs_inter(&ledger));
    run(8, "embedding contract", &mut || c8_embedding(&corpus, &sols, &mut ledger));
    run(9, "eigensolver accuracy", &mut || c9_eigensolver(&spectral, &mut ledger));
    run(10, "sweep guarantee", &mut || c10_sweep(&corpus, &mut ledger));
    run(11, "threshold separator guarantee", &mut || c11_fhl(&corpus, &sols, &mut ledger));
    run(12, "grid scaling ladder", &mut c12_scaling);

    let failed: Vec<u32> = results.iter().filter(|r| r.2.is_err()).map(|r| r.0).collect();
    println!(
        "acceptance: {} of {} criteria passed{}",
        results.len() - failed.len(),
        results.len(),
        if failed.is_empty() { String::new() } else { format!("; failed {failed:?}") }
    );
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
