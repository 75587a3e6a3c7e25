use crate::embed::check_non_expansive;
use crate::error::{Error, Result};
use crate::graph::{all_pairs_metric, Graph, WeightFunction};
use crate::scalar::{pairwise_spread, rel_slack, Scalar};

use super::eigen::lambda2_solve;

/// A cut `(S, V∖S)` together with its sweep guarantee.
#[derive(Debug, Clone, PartialEq)]
pub struct CutResult<T> {
    /// The prefix side, sorted.
    pub side: Vec<usize>,
    pub cut_edges: usize,
    /// `|E(S, S̄)| / min(|S|, |S̄|)`.
    pub ratio: T,
    /// `√(2 d_max ⟨v, Lv⟩ / ‖v‖²)` for the centered sweep vector.
    pub bound: T,
}

/// Exact `Φ_G(S)`.
pub fn cut_ratio<T: Scalar>(g: &Graph, side: &[usize]) -> T {
    let mut mark = vec![false; g.n()];
    side.iter().for_each(|&v| mark[v] = true);
    let small = side.len().min(g.n() - side.len());
    T::from_count(g.cut_size(&mark)) / T::from_count(small)
}

/// Best prefix cut of the vertices ordered by `v` (ties by index).
pub fn sweep_cut<T: Scalar>(g: &Graph, v: &[T]) -> Result<CutResult<T>> {
    let n = g.n();
    if v.len() != n {
        return Err(Error::InvalidParam("sweep vector length differs from n".into()));
    }
    if n < 2 {
        return Err(Error::Precondition("sweep needs at least two vertices".into()));
    }
    let mean = v.iter().copied().sum::<T>() / T::from_count(n);
    let centered: Vec<T> = v.iter().map(|&x| x - mean).collect();
    let norm2: T = centered.iter().map(|&x| x * x).sum();
    if !(norm2 > T::zero()) {
        return Err(Error::Degenerate("sweep vector is constant".into()));
    }
    let bound = (T::lit(2.0) * T::from_count(g.max_degree()) * g.dirichlet_energy(&centered) / norm2).sqrt();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        centered[a]
            .partial_cmp(&centered[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let mut inside = vec![false; n];
    let mut cut: isize = 0;
    let mut best: Option<(T, usize, usize)> = None;
    for (i, &x) in order.iter().enumerate().take(n - 1) {
        let into = g.neighbors(x).iter().filter(|&&w| inside[w]).count() as isize;
        cut += g.degree(x) as isize - 2 * into;
        inside[x] = true;
        let size = i + 1;
        let ratio = T::from_count(cut as usize) / T::from_count(size.min(n - size));
        if best.is_none_or(|(r, _, _)| ratio < r) {
            best = Some((ratio, size, cut as usize));
        }
    }
    let (ratio, size, cut_edges) = best.expect("n >= 2 gives a prefix");
    let mut side = order[..size].to_vec();
    side.sort_unstable();
    if ratio > bound + rel_slack(bound) {
        return Err(Error::Internal(format!(
            "sweep ratio {ratio} exceeds guarantee {bound}"
        )));
    }
    Ok(CutResult {
        side,
        cut_edges,
        ratio,
        bound,
    })
}

/// Produces a cut of a connected graph.
pub trait Cutter<T: Scalar> {
    fn cut(&self, g: &Graph) -> Result<CutResult<T>>;
}

/// Sweep over the Fiedler vector.
#[derive(Debug, Clone, Copy)]
pub struct SweepCutter<T> {
    pub tol: T,
}

impl<T: Scalar> Cutter<T> for SweepCutter<T> {
    fn cut(&self, g: &Graph) -> Result<CutResult<T>> {
        let spec = lambda2_solve(g, self.tol)?;
        sweep_cut(g, &spec.fiedler)
    }
}

/// Balanced edge separator from repeated cuts.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSeparator {
    /// Sorted small side; `min(|S|, |S̄|) ≥ δn`.
    pub side: Vec<usize>,
    pub cut_edges: usize,
    /// Edges removed at each level, in order.
    pub level_costs: Vec<usize>,
}

impl EdgeSeparator {
    pub fn balance(&self, n: usize) -> f64 {
        self.side.len().min(n - self.side.len()) as f64 / n as f64
    }
}

/// Cuts the remaining piece and moves its smaller side into `S` until
/// `|S| ≥ δn`. A disconnected remainder gives up its smallest component at
/// no cost. Since each moved side is at most half the remainder, the final
/// remainder keeps more than `(1 − δ)n / 2` vertices.
pub fn recursive_edge_separator<T: Scalar, C: Cutter<T> + ?Sized>(
    g: &Graph,
    cutter: &C,
    delta: f64,
) -> Result<EdgeSeparator> {
    if !(delta > 0.0 && delta <= 1.0 / 3.0 + 1e-12) {
        return Err(Error::InvalidParam(format!("balance {delta} must lie in (0, 1/3]")));
    }
    let n = g.n();
    if n < 2 {
        return Err(Error::Precondition("separator needs at least two vertices".into()));
    }
    let target = (delta * n as f64).ceil() as usize;
    let mut taken: Vec<usize> = Vec::new();
    let mut working: Vec<usize> = (0..n).collect();
    let mut level_costs = Vec::new();
    while taken.len() < target {
        let comps = g.induced_components(&working);
        let moved: Vec<usize> = if comps.len() > 1 {
            level_costs.push(0);
            comps
                .into_iter()
                .min_by_key(|c| (c.len(), c[0]))
                .expect("at least two components")
        } else {
            let sub = g.induced(&working)?;
            let cut = cutter.cut(&sub)?;
            level_costs.push(cut.cut_edges);
            let mut mark = vec![false; working.len()];
            cut.side.iter().for_each(|&i| mark[i] = true);
            let (inside, outside): (Vec<usize>, Vec<usize>) =
                (0..working.len()).partition(|&i| mark[i]);
            let smaller = if inside.len() <= outside.len() { inside } else { outside };
            smaller.into_iter().map(|i| working[i]).collect()
        };
        let mut mark = vec![false; n];
        moved.iter().for_each(|&v| mark[v] = true);
        working.retain(|&v| !mark[v]);
        taken.extend(moved);
    }
    taken.sort_unstable();
    let mut mark = vec![false; n];
    taken.iter().for_each(|&v| mark[v] = true);
    let cut_edges = g.cut_size(&mark);
    let total: usize = level_costs.iter().sum();
    if cut_edges > total {
        return Err(Error::Internal(format!(
            "separator cuts {cut_edges} edges, more than the {total} paid"
        )));
    }
    Ok(EdgeSeparator {
        side: taken,
        cut_edges,
        level_costs,
    })
}

/// Vertex separator `V = A ∪ B ∪ S` with no edge between `A` and `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSeparator<T> {
    pub a: Vec<usize>,
    pub b: Vec<usize>,
    pub s: Vec<usize>,
    /// `|S| / (|A ∪ S| · |B ∪ S|)`.
    pub alpha: T,
    /// `2 Σ s / Σ_{u<v} |f(u) − f(v)|`.
    pub bound: T,
    pub threshold: T,
    /// `f` was constant.
    pub degenerate: bool,
}

impl<T: Scalar> VertexSeparator<T> {
    /// Three lines: `A : ...`, `B : ...`, `S : ...`.
    pub fn to_text(&self) -> String {
        let line = |name: &str, set: &[usize]| {
            let items: Vec<String> = set.iter().map(|v| v.to_string()).collect();
            format!("{name} : {}\n", items.join(" "))
        };
        line("A", &self.a) + &line("B", &self.b) + &line("S", &self.s)
    }
}

/// `|S| / (|A ∪ S| · |B ∪ S|)`.
pub fn separator_alpha<T: Scalar>(a: usize, b: usize, s: usize) -> T {
    T::from_count(s) / (T::from_count(a + s) * T::from_count(b + s))
}

/// Threshold sweep along a map `f` that is non-expansive for `d_s`.
///
/// For a threshold `t`, `A = {f + s < t − τ}`, `B = {f − s > t + τ}` and
/// `S` is the rest, where `τ` is the slack allowed in the non-expansiveness
/// check. The margin keeps `E(A, B)` empty when `f` is tight on an edge up to
/// rounding. The sets only change at the breakpoints `f(v)` and
/// `f(v) ± (s(v) + τ)`, so the breakpoints and the midpoints between
/// consecutive ones cover every distinct separator. The best one (smallest
/// `α`, non-empty `S`) is returned.
pub fn fhl_sweep<T: Scalar>(g: &Graph, s: &WeightFunction<T>, f: &[T]) -> Result<VertexSeparator<T>> {
    let n = g.n();
    if f.len() != n || s.len() != n {
        return Err(Error::InvalidParam("f and s must have one entry per vertex".into()));
    }
    let metric = all_pairs_metric(g, s);
    check_non_expansive(&metric, f).map_err(|e| Error::Precondition(format!("f is not non-expansive: {e}")))?;
    let tau = rel_slack(metric.max_distance());
    let sv = s.values();
    let in_a = |v: usize, t: T| f[v] + sv[v] < t - tau;
    let in_b = |v: usize, t: T| f[v] - sv[v] > t + tau;
    let mut points: Vec<T> = (0..n)
        .flat_map(|v| [f[v] - sv[v] - tau, f[v], f[v] + sv[v] + tau])
        .collect();
    points.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    points.dedup();
    let mut candidates = points.clone();
    candidates.extend(points.windows(2).map(|w| (w[0] + w[1]) / T::lit(2.0)));
    candidates.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));

    let mut best: Option<(T, T)> = None;
    for &t in &candidates {
        let (mut na, mut nb) = (0, 0);
        for v in 0..n {
            if in_a(v, t) {
                na += 1;
            } else if in_b(v, t) {
                nb += 1;
            }
        }
        let ns = n - na - nb;
        if ns == 0 {
            continue;
        }
        let alpha = separator_alpha::<T>(na, nb, ns);
        if best.is_none_or(|(a, _)| alpha < a) {
            best = Some((alpha, t));
        }
    }
    let (alpha, t) = best.ok_or_else(|| Error::Internal("no threshold leaves a separator".into()))?;
    let (mut a, mut b, mut sep) = (Vec::new(), Vec::new(), Vec::new());
    for v in 0..n {
        if in_a(v, t) {
            a.push(v);
        } else if in_b(v, t) {
            b.push(v);
        } else {
            sep.push(v);
        }
    }
    let mut side = vec![0u8; n];
    a.iter().for_each(|&v| side[v] = 1);
    b.iter().for_each(|&v| side[v] = 2);
    if let Some(&(u, v)) = g.edges().iter().find(|&&(u, v)| side[u] | side[v] == 3) {
        return Err(Error::Internal(format!("edge ({u}, {v}) joins A and B")));
    }
    let spread = pairwise_spread(f, false);
    let bound = if spread > T::zero() {
        T::lit(2.0) * s.total() / spread
    } else {
        T::infinity()
    };
    if alpha > bound + rel_slack(bound) {
        return Err(Error::Internal(format!("separator α {alpha} exceeds guarantee {bound}")));
    }
    Ok(VertexSeparator {
        a,
        b,
        s: sep,
        alpha,
        bound,
        threshold: t,
        degenerate: !(spread > T::zero()),
    })
}
