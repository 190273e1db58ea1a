//! Small numerical helpers: finite differences, 2×2 symmetric eigenvalues,
//! scalar root finding and minimization, and stable summation.

/// Default central-difference step for first derivatives at `x`.
pub fn default_step(x: f64) -> f64 {
    1e-6f64.max(1e-6 * x.abs())
}

/// Central difference `(f(x+h) - f(x-h)) / 2h`.
pub fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Finite-difference Hessian of `f(u, v)` from function values only, with
/// steps `hu`, `hv`.
pub fn fd_hessian<F: Fn(f64, f64) -> f64>(f: F, u: f64, v: f64, hu: f64, hv: f64) -> [[f64; 2]; 2] {
    let centre = f(u, v);
    let uu = (f(u + hu, v) - 2.0 * centre + f(u - hu, v)) / (hu * hu);
    let vv = (f(u, v + hv) - 2.0 * centre + f(u, v - hv)) / (hv * hv);
    let uv = (f(u + hu, v + hv) - f(u + hu, v - hv) - f(u - hu, v + hv) + f(u - hu, v - hv))
        / (4.0 * hu * hv);
    [[uu, uv], [uv, vv]]
}

/// `(M + Mᵀ) / 2`.
pub fn symmetrize(m: &[[f64; 2]; 2]) -> [[f64; 2]; 2] {
    let off = 0.5 * (m[0][1] + m[1][0]);
    [[m[0][0], off], [off, m[1][1]]]
}

/// Eigenvalues `(min, max)` of a symmetric 2×2 matrix.
pub fn sym_eigenvalues(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let mean = 0.5 * (m[0][0] + m[1][1]);
    let half_gap = (0.5 * (m[0][0] - m[1][1])).hypot(m[0][1]);
    (mean - half_gap, mean + half_gap)
}

/// Root of a continuous `f` on `[lo, hi]` given `f(lo) < 0 < f(hi)`,
/// bisected until the bracket is no wider than `x_tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= x_tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + 0.5 * (hi - lo)
}

/// Golden-section minimizer of a unimodal `f` on `[lo, hi]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - inv_phi * (hi - lo);
    let mut b = lo + inv_phi * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..300 {
        if hi - lo <= x_tol {
            break;
        }
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - inv_phi * (hi - lo);
            fa = f(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + inv_phi * (hi - lo);
            fb = f(b);
        }
    }
    lo + 0.5 * (hi - lo)
}

/// Pairwise (cascade) summation in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        values.iter().sum()
    } else {
        let (left, right) = values.split_at(values.len() / 2);
        pairwise_sum(left) + pairwise_sum(right)
    }
}

/// Sample mean and standard error of the mean. The standard error is 0 for
/// fewer than two samples.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let squares: Vec<f64> = values.iter().map(|v| (v - mean).powi(2)).collect();
    let variance = pairwise_sum(&squares) / (n - 1) as f64;
    (mean, (variance / n as f64).sqrt())
}
