//! Conditional-gradient solver for the minimum 2-congestion all-pairs flow.
//!
//! The objective `con₂(F)²` has gradient `2 Σ_{v∈p} C_F(v)` with respect to
//! the weight of path `p`, so the linear minimization oracle routes every
//! demand along a shortest path under vertex costs `C_F`. The same
//! shortest-path run evaluates `Λ_s` at `s = C_F / ‖C_F‖₂`, which gives the
//! lower bound of the duality pair for free:
//!
//! ```text
//! Σ_{u<v} d_c(u,v) ≤ Σ_p F(p) Σ_{x∈p} c(x) = ‖c‖²   ⇒   Λ_c ≤ con₂(F)
//! ```

use rayon::prelude::*;

use super::{CongestionProfile, FractionalFlow, Route};
use crate::error::{Error, Result};
use crate::graph::vertex_cost_dijkstra;
use crate::graph::{Graph, WeightFunction};
use crate::scalar::{rel_slack, Scalar};

/// How the oracle's routing is blended into the running flow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// Classic `2 / (k + 2)` schedule.
    Harmonic,
    /// Exact line search on the quadratic objective.
    LineSearch,
}

impl std::str::FromStr for StepRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "harmonic" => Ok(StepRule::Harmonic),
            "line-search" => Ok(StepRule::LineSearch),
            other => Err(Error::InvalidParam(format!("unknown step rule `{other}`"))),
        }
    }
}

impl std::fmt::Display for StepRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StepRule::Harmonic => "harmonic",
            StepRule::LineSearch => "line-search",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub max_iters: usize,
    /// Stop once `(dual - primal) / dual ≤ tol`.
    pub tol: f64,
    /// Recorded in reports; the solver itself is deterministic.
    pub seed: u64,
    pub step: StepRule,
    /// Keep explicit paths. `None` keeps them for graphs up to
    /// [`SolverConfig::AUTO_PATH_LIMIT`] vertices.
    pub store_paths: Option<bool>,
}

impl SolverConfig {
    pub const AUTO_PATH_LIMIT: usize = 128;

    fn keeps_paths(&self, n: usize) -> bool {
        self.store_paths.unwrap_or(n <= Self::AUTO_PATH_LIMIT)
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iters: 500,
            tol: 1e-3,
            seed: 0,
            step: StepRule::Harmonic,
            store_paths: None,
        }
    }
}

/// Values observed at one oracle call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterateRecord<T> {
    /// `Λ_s` at `s = C_F / ‖C_F‖`.
    pub primal: T,
    /// `con₂(F)` of the flow the oracle was called on.
    pub dual: T,
}

#[derive(Debug, Clone)]
pub struct DualitySolution<T> {
    /// Best flow found; `None` when paths were not stored.
    pub flow: Option<FractionalFlow<T>>,
    /// Congestion of the best flow.
    pub congestion: CongestionProfile<T>,
    /// Unit-norm weights achieving `primal_value`.
    pub weights: WeightFunction<T>,
    /// `Λ_s` of `weights`, a lower bound on `min con₂`.
    pub primal_value: T,
    /// `con₂` of the best flow, an upper bound on `min con₂`.
    pub dual_value: T,
    pub gap: T,
    pub iterations: usize,
    /// `false` when `max_iters` ran out before the gap closed to `tol`.
    pub converged: bool,
    pub trace: Vec<IterateRecord<T>>,
    pub seed: u64,
    pub step: StepRule,
}

impl<T: Scalar> DualitySolution<T> {
    pub fn relative_gap(&self) -> T {
        if self.dual_value > T::zero() {
            self.gap / self.dual_value
        } else {
            T::zero()
        }
    }
}

/// Result of one linear minimization oracle call.
struct OracleRouting<T> {
    /// Σ_{u<v} d_c(u, v).
    distance_sum: T,
    /// Congestion of the all-shortest-paths routing.
    load: Vec<T>,
    /// One shortest path per demand, in demand order.
    paths: Option<Vec<Vec<usize>>>,
}

fn oracle<T: Scalar>(g: &Graph, cost: &[T], keep_paths: bool) -> OracleRouting<T> {
    let n = g.n();
    let per_source: Vec<(T, Vec<usize>, Vec<Vec<usize>>)> = (0..n)
        .into_par_iter()
        .map(|u| {
            let sp = vertex_cost_dijkstra(g, cost, u);
            let dsum: T = sp.dist[u + 1..].iter().copied().sum();
            // Paths (u, v) with v > u through each vertex = targets in its subtree.
            let mut count: Vec<usize> = (0..n).map(|x| usize::from(x > u)).collect();
            for &x in sp.order.iter().rev() {
                if let Some(p) = sp.parent[x] {
                    count[p] += count[x];
                }
            }
            let paths = if keep_paths {
                (u + 1..n).map(|v| sp.path_to(v)).collect()
            } else {
                Vec::new()
            };
            (dsum, count, paths)
        })
        .collect();
    let mut distance_sum = T::zero();
    let mut counts = vec![0usize; n];
    let mut paths = keep_paths.then(|| Vec::with_capacity(n * n.saturating_sub(1) / 2));
    for (dsum, count, p) in per_source {
        distance_sum += dsum;
        for (acc, x) in counts.iter_mut().zip(count) {
            *acc += x;
        }
        if let Some(all) = paths.as_mut() {
            all.extend(p);
        }
    }
    OracleRouting {
        distance_sum,
        load: counts.into_iter().map(T::from_count).collect(),
        paths,
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Minimizer of `‖c + γ Δ‖²` over `γ ∈ [0, 1]`.
fn exact_step<T: Scalar>(c: &[T], delta: &[T]) -> T {
    let dd = dot(delta, delta);
    if dd <= T::zero() {
        return T::zero();
    }
    (-dot(c, delta) / dd).max(T::zero()).min(T::one())
}

/// Explicit path storage for the running flow.
struct PathFlow<T> {
    demands: Vec<(usize, usize)>,
    routes: Vec<Vec<Route<T>>>,
}

impl<T: Scalar> PathFlow<T> {
    const PRUNE: f64 = 1e-12;

    fn from_paths(n: usize, paths: Vec<Vec<usize>>) -> Self {
        let demands: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        let routes = paths
            .into_iter()
            .map(|path| {
                vec![Route {
                    path,
                    weight: T::one(),
                }]
            })
            .collect();
        PathFlow { demands, routes }
    }

    fn add_mass(list: &mut Vec<Route<T>>, path: Vec<usize>, mass: T) {
        match list.iter_mut().find(|r| r.path == path) {
            Some(r) => r.weight += mass,
            None => list.push(Route { path, weight: mass }),
        }
    }

    /// Drops entries below the pruning threshold and renormalizes each
    /// demand to unit flow.
    fn prune(&mut self) {
        let eps = T::lit(Self::PRUNE);
        for list in &mut self.routes {
            if list.iter().any(|r| r.weight < eps) {
                list.retain(|r| r.weight >= eps);
                let total: T = list.iter().map(|r| r.weight).sum();
                for r in list.iter_mut() {
                    r.weight /= total;
                }
            }
        }
    }

    fn blend(&mut self, paths: Vec<Vec<usize>>, gamma: T) {
        let keep = T::one() - gamma;
        for (list, path) in self.routes.iter_mut().zip(paths) {
            for r in list.iter_mut() {
                r.weight *= keep;
            }
            Self::add_mass(list, path, gamma);
        }
        self.prune();
    }

    fn congestion(&self, n: usize) -> Vec<T> {
        let mut c = vec![T::zero(); n];
        for list in &self.routes {
            for r in list {
                for &v in &r.path {
                    c[v] += r.weight;
                }
            }
        }
        c
    }
}

/// Minimizes `con₂` over unit all-pairs flows while tracking the best
/// `Λ_s` lower bound. See the module docs for the scheme.
pub fn solve_min_con2<T: Scalar>(g: &Graph, cfg: &SolverConfig) -> Result<DualitySolution<T>> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition(
            "flow solver needs at least two vertices".into(),
        ));
    }
    if !(cfg.tol >= 0.0) {
        return Err(Error::InvalidParam(format!("tolerance {} is invalid", cfg.tol)));
    }
    let keep_paths = cfg.keeps_paths(n);
    let tol = T::lit(cfg.tol);

    // Start from hop-shortest routing.
    let start = oracle(g, &vec![T::one(); n], keep_paths);
    let mut flow = start.paths.map(|p| PathFlow::from_paths(n, p));
    let mut c = start.load;

    let mut trace = Vec::new();
    let mut best_dual = T::infinity();
    let mut best_dual_c = c.clone();
    let mut best_dual_routes: Option<Vec<Vec<Route<T>>>> = None;
    let mut best_primal = T::neg_infinity();
    let mut best_weights = c.clone();
    let mut converged = false;
    let mut iterations = 0;

    for k in 1..=cfg.max_iters {
        iterations = k;
        let routing = oracle(g, &c, keep_paths);
        let dual = norm(&c);
        let primal = routing.distance_sum / dual;
        if primal > dual + rel_slack(dual) {
            return Err(Error::Internal(format!(
                "weak duality violated at iteration {k}: Λ = {primal} > con₂ = {dual}"
            )));
        }
        trace.push(IterateRecord { primal, dual });
        if dual < best_dual {
            best_dual = dual;
            best_dual_c.clone_from(&c);
            if cfg.step == StepRule::Harmonic {
                best_dual_routes = flow.as_ref().map(|f| f.routes.clone());
            }
        }
        if primal > best_primal {
            best_primal = primal;
            best_weights.clone_from(&c);
        }
        if best_dual - best_primal <= tol * best_dual {
            converged = true;
            break;
        }
        if k == cfg.max_iters {
            break;
        }

        match (cfg.step, flow.as_mut()) {
            (rule, Some(f)) => {
                let gamma = step_size(rule, k, &c, &routing.load);
                f.blend(routing.paths.expect("paths kept"), gamma);
                c = f.congestion(n);
            }
            (rule, None) => {
                let gamma = step_size(rule, k, &c, &routing.load);
                let keep = T::one() - gamma;
                for (x, &y) in c.iter_mut().zip(&routing.load) {
                    *x = keep * *x + gamma * y;
                }
            }
        }
    }

    // A monotone rule leaves the last evaluated flow as the best one.
    let best_flow = flow.map(|f| {
        let routes = best_dual_routes.unwrap_or(f.routes);
        FractionalFlow::from_parts_unchecked(n, f.demands, routes)
    });
    if let Some(f) = &best_flow {
        best_dual_c = f.congestion().c;
        best_dual = norm(&best_dual_c);
    }
    let scale = norm(&best_weights);
    let weights = WeightFunction::new(best_weights.iter().map(|&x| x / scale).collect())?;
    let gap = best_dual - best_primal;
    if gap < -rel_slack(best_dual) {
        return Err(Error::Internal(format!(
            "negative duality gap {gap} (primal {best_primal}, dual {best_dual})"
        )));
    }
    Ok(DualitySolution {
        flow: best_flow,
        congestion: CongestionProfile { c: best_dual_c },
        weights,
        primal_value: best_primal,
        dual_value: best_dual,
        gap,
        iterations,
        converged,
        trace,
        seed: cfg.seed,
        step: cfg.step,
    })
}

fn step_size<T: Scalar>(rule: StepRule, k: usize, c: &[T], load: &[T]) -> T {
    match rule {
        StepRule::Harmonic => T::lit(2.0) / T::from_count(k + 2),
        StepRule::LineSearch => {
            let delta: Vec<T> = load.iter().zip(c).map(|(&s, &x)| s - x).collect();
            exact_step(c, &delta)
        }
    }
}
