use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Graphs up to this size go to the dense solver.
pub const DENSE_LIMIT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumMethod {
    Dense,
    Iterative,
}

impl std::fmt::Display for SpectrumMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SpectrumMethod::Dense => "dense",
            SpectrumMethod::Iterative => "iterative",
        })
    }
}

/// Second Laplacian eigenpair.
#[derive(Debug, Clone)]
pub struct SpectrumResult<T> {
    pub lambda2: T,
    /// Unit norm, orthogonal to the all-ones vector.
    pub fiedler: Vec<T>,
    pub method: SpectrumMethod,
    /// `‖L v − λ₂ v‖₂`.
    pub residual: T,
    pub converged: bool,
    /// Jacobi sweeps or Lanczos steps.
    pub iterations: usize,
}

/// `λ₂(L_G)`: dense for `n ≤ 64`, Lanczos otherwise.
pub fn lambda2_solve<T: Scalar>(g: &Graph, tol: T) -> Result<SpectrumResult<T>> {
    if g.n() <= DENSE_LIMIT {
        lambda2_dense(g, tol)
    } else {
        lambda2_iterative(g, tol)
    }
}

fn check_size(g: &Graph) -> Result<()> {
    if g.n() < 2 {
        Err(Error::Precondition("λ₂ needs at least two vertices".into()))
    } else {
        Ok(())
    }
}

/// Center, normalize, and measure the residual of a candidate eigenvector.
fn finish<T: Scalar>(
    g: &Graph,
    mut v: Vec<T>,
    lambda: T,
    tol: T,
    method: SpectrumMethod,
    iterations: usize,
) -> SpectrumResult<T> {
    let n = v.len();
    let mean = v.iter().copied().sum::<T>() / T::from_count(n);
    v.iter_mut().for_each(|x| *x -= mean);
    let norm = v.iter().map(|&x| x * x).sum::<T>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let residual = residual(g, &v, lambda);
    SpectrumResult {
        lambda2: lambda,
        fiedler: v,
        method,
        residual,
        converged: residual <= tol,
        iterations,
    }
}

fn residual<T: Scalar>(g: &Graph, v: &[T], lambda: T) -> T {
    let mut lv = vec![T::zero(); v.len()];
    g.laplacian_apply(v, &mut lv);
    lv.iter()
        .zip(v)
        .map(|(&a, &b)| (a - lambda * b) * (a - lambda * b))
        .sum::<T>()
        .sqrt()
}

/// Full eigendecomposition of a symmetric row-major matrix by cyclic
/// Jacobi rotations. Returns eigenvalues ascending, eigenvectors as columns
/// of the returned row-major matrix, and the number of sweeps.
pub(crate) fn jacobi_eigen<T: Scalar>(a: &[T], n: usize) -> (Vec<T>, Vec<T>, usize) {
    let mut a = a.to_vec();
    let mut q = vec![T::zero(); n * n];
    for i in 0..n {
        q[i * n + i] = T::one();
    }
    let scale = a.iter().map(|&x| x * x).sum::<T>().sqrt().max(T::min_positive_value());
    let mut sweeps = 0;
    for _ in 0..100 {
        let off: T = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<T>()
            .sqrt();
        if off <= T::epsilon() * scale {
            break;
        }
        sweeps += 1;
        for p in 0..n {
            for r in p + 1..n {
                let apr = a[p * n + r];
                if apr == T::zero() {
                    continue;
                }
                let theta = (a[r * n + r] - a[p * n + p]) / (T::lit(2.0) * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akr = a[k * n + r];
                    a[k * n + p] = c * akp - s * akr;
                    a[k * n + r] = s * akp + c * akr;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let ark = a[r * n + k];
                    a[p * n + k] = c * apk - s * ark;
                    a[r * n + k] = s * apk + c * ark;
                }
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkr = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| {
        a[i * n + i]
            .partial_cmp(&a[j * n + j])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values = idx.iter().map(|&i| a[i * n + i]).collect();
    let mut vectors = vec![T::zero(); n * n];
    for (col, &i) in idx.iter().enumerate() {
        for k in 0..n {
            vectors[k * n + col] = q[k * n + i];
        }
    }
    (values, vectors, sweeps)
}

/// Dense Laplacian spectrum by Jacobi rotations.
pub fn lambda2_dense<T: Scalar>(g: &Graph, tol: T) -> Result<SpectrumResult<T>> {
    check_size(g)?;
    let n = g.n();
    let mut l = vec![T::zero(); n * n];
    for v in 0..n {
        l[v * n + v] = T::from_count(g.degree(v));
    }
    for &(u, v) in g.edges() {
        l[u * n + v] = -T::one();
        l[v * n + u] = -T::one();
    }
    let (values, vectors, sweeps) = jacobi_eigen(&l, n);
    let column = |c: usize| -> Vec<T> { (0..n).map(|k| vectors[k * n + c]).collect() };
    let mut v = column(1);
    let split = T::lit(1e-9) * T::one().max(values[n - 1]);
    if n > 2 && values[2] - values[1] <= split {
        v = best_sweep_direction(g, &v, &column(2));
    }
    Ok(finish(g, v, values[1], tol, SpectrumMethod::Dense, sweeps))
}

/// Within a repeated λ₂ the eigenvector is not unique; this picks the unit
/// combination `cos θ · x + sin θ · y` (θ on a grid of 180 angles) whose
/// sweep cut is sparsest, earliest angle on ties.
fn best_sweep_direction<T: Scalar>(g: &Graph, x: &[T], y: &[T]) -> Vec<T> {
    let mut best: Option<(T, Vec<T>)> = None;
    for step in 0..180 {
        let theta = std::f64::consts::PI * step as f64 / 180.0;
        let (c, s) = (T::lit(theta.cos()), T::lit(theta.sin()));
        let v: Vec<T> = x.iter().zip(y).map(|(&a, &b)| c * a + s * b).collect();
        if let Ok(cut) = super::cuts::sweep_cut(g, &v) {
            if best.as_ref().is_none_or(|(r, _)| cut.ratio < *r) {
                best = Some((cut.ratio, v));
            }
        }
    }
    best.map(|(_, v)| v).unwrap_or_else(|| x.to_vec())
}

/// Smallest eigenvalue of the symmetric tridiagonal matrix (diag `a`,
/// off-diagonal `b`) by Sturm-count bisection.
fn tridiag_smallest<T: Scalar>(a: &[T], b: &[T]) -> T {
    let k = a.len();
    let mut lo = T::infinity();
    let mut hi = -T::infinity();
    for i in 0..k {
        let r = if i > 0 { b[i - 1].abs() } else { T::zero() } + if i + 1 < k { b[i].abs() } else { T::zero() };
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    // number of eigenvalues strictly below x
    let count_below = |x: T| {
        let mut count = 0;
        let mut d = T::one();
        for i in 0..k {
            let off = if i > 0 { b[i - 1] * b[i - 1] } else { T::zero() };
            d = a[i] - x - if i > 0 { off / d } else { T::zero() };
            if d == T::zero() {
                d = T::epsilon() * (T::one() + x.abs());
            }
            if d < T::zero() {
                count += 1;
            }
        }
        count
    };
    for _ in 0..200 {
        let mid = (lo + hi) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo + hi) / T::lit(2.0)
}

/// Eigenvector of the tridiagonal matrix for eigenvalue `theta` by inverse
/// iteration.
fn tridiag_vector<T: Scalar>(a: &[T], b: &[T], theta: T) -> Vec<T> {
    let k = a.len();
    let shift = theta - T::epsilon() * (T::one() + theta.abs()) * T::lit(16.0);
    let mut y = vec![T::one(); k];
    for _ in 0..4 {
        // Thomas algorithm on (T - shift I) x = y
        let mut c = vec![T::zero(); k];
        let mut d = vec![T::zero(); k];
        let mut denom = a[0] - shift;
        if denom == T::zero() {
            denom = T::epsilon();
        }
        if k > 1 {
            c[0] = b[0] / denom;
        }
        d[0] = y[0] / denom;
        for i in 1..k {
            let mut m = a[i] - shift - b[i - 1] * c[i - 1];
            if m == T::zero() {
                m = T::epsilon();
            }
            if i + 1 < k {
                c[i] = b[i] / m;
            }
            d[i] = (y[i] - b[i - 1] * d[i - 1]) / m;
        }
        let mut x = vec![T::zero(); k];
        x[k - 1] = d[k - 1];
        for i in (0..k - 1).rev() {
            x[i] = d[i] - c[i] * x[i + 1];
        }
        let norm = x.iter().map(|&v| v * v).sum::<T>().sqrt();
        y = x.into_iter().map(|v| v / norm).collect();
    }
    y
}

fn dot<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| a * b).sum()
}

fn project_out_ones<T: Scalar>(x: &mut [T]) {
    let mean = x.iter().copied().sum::<T>() / T::from_count(x.len());
    x.iter_mut().for_each(|v| *v -= mean);
}

/// Lanczos with full reorthogonalization on `L` restricted to the
/// complement of the all-ones vector, restarted from the current Ritz
/// vector. Converged when `‖L v − θ v‖ ≤ tol`.
pub fn lambda2_iterative<T: Scalar>(g: &Graph, tol: T) -> Result<SpectrumResult<T>> {
    check_size(g)?;
    let n = g.n();
    if n == 2 {
        return lambda2_dense(g, tol);
    }
    let max_basis = (n - 1).min(400);
    let max_restarts = 20;
    // deterministic, non-symmetric start so no eigen-direction is missed
    let mut start: Vec<T> = (0..n)
        .map(|i| T::lit(((i as f64 + 1.0) * 0.618_033_988_75).fract() - 0.5))
        .collect();
    let mut best: Option<SpectrumResult<T>> = None;
    let mut steps = 0;
    for _ in 0..=max_restarts {
        project_out_ones(&mut start);
        let norm = dot(&start, &start).sqrt();
        if norm <= T::zero() {
            break;
        }
        let mut basis: Vec<Vec<T>> = vec![start.iter().map(|&x| x / norm).collect()];
        let mut alpha: Vec<T> = Vec::new();
        let mut beta: Vec<T> = Vec::new();
        let mut w = vec![T::zero(); n];
        let ritz;
        loop {
            let q = basis.last().expect("non-empty basis");
            g.laplacian_apply(q, &mut w);
            steps += 1;
            let a = dot(&w, q);
            alpha.push(a);
            // reorthogonalization can reintroduce the ones direction, so the
            // projection is repeated after every pass
            for _ in 0..2 {
                project_out_ones(&mut w);
                for b in &basis {
                    let c = dot(&w, b);
                    w.iter_mut().zip(b).for_each(|(x, &y)| *x -= c * y);
                }
            }
            project_out_ones(&mut w);
            let bnext = dot(&w, &w).sqrt();
            let k = alpha.len();
            let check = k % 10 == 0 || k == max_basis || bnext <= T::epsilon() * T::from_count(n);
            if check {
                let theta = tridiag_smallest(&alpha, &beta);
                let y = tridiag_vector(&alpha, &beta, theta);
                let est = (bnext * y[k - 1]).abs();
                let done = est <= tol * T::lit(0.1) || k == max_basis || bnext <= T::epsilon() * T::from_count(n);
                if done {
                    let mut v = vec![T::zero(); n];
                    for (coef, b) in y.iter().zip(&basis) {
                        v.iter_mut().zip(b).for_each(|(x, &bb)| *x += *coef * bb);
                    }
                    ritz = Some((theta, v));
                    break;
                }
            }
            beta.push(bnext);
            basis.push(w.iter().map(|&x| x / bnext).collect());
        }
        let (theta, v) = ritz.expect("loop exits with a Ritz pair");
        // Rayleigh quotient of the assembled vector is at least as accurate
        let energy = g.dirichlet_energy(&v);
        let lambda = energy / dot(&v, &v);
        let lambda = if (lambda - theta).abs() <= T::lit(1e-6) * (T::one() + theta.abs()) {
            lambda
        } else {
            theta
        };
        let result = finish(g, v, lambda, tol, SpectrumMethod::Iterative, steps);
        let better = best.as_ref().is_none_or(|b| result.residual < b.residual);
        start = result.fiedler.clone();
        if better {
            best = Some(result);
        }
        if best.as_ref().is_some_and(|b| b.converged) {
            break;
        }
    }
    best.ok_or_else(|| Error::NonConvergence("Lanczos produced no Ritz vector".into()))
}
