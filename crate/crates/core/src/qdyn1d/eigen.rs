//! Lowest eigenpairs of a real symmetric tridiagonal matrix by Sturm
//! bisection followed by inverse iteration.

use crate::error::{Error, Result};

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r =
            if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < n { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The `k` lowest eigenvalues, ascending, each to full working precision.
pub fn lowest_eigenvalues(diag: &[f64], off: &[f64], k: usize) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "off-diagonal must have n-1 entries");
    let k = k.min(n);
    let (lo, hi) = gershgorin(diag, off);
    let norm = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE.max(norm * 1e-300);
    let mut out = Vec::with_capacity(k);
    let mut left = lo - 2.0 * f64::EPSILON * norm;
    for j in 0..k {
        let mut a = left;
        let mut b = hi + 2.0 * f64::EPSILON * norm;
        // invariant: count(a) <= j < count(b)
        for _ in 0..200 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if sturm_count(diag, off, mid, pivmin) > j {
                b = mid;
            } else {
                a = mid;
            }
            if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) {
                break;
            }
        }
        let lam = 0.5 * (a + b);
        out.push(lam);
        left = a;
    }
    out
}

/// Solves `(T - shift) x = rhs` by Gaussian elimination with partial
/// pivoting. Returns `None` if a pivot vanishes exactly.
fn shifted_solve(diag: &[f64], off: &[f64], shift: f64, rhs: &mut [f64], tiny: f64) -> bool {
    let n = diag.len();
    // row i holds (a[i], b[i], c[i]) at columns (i, i+1, i+2) after elimination
    let mut a: Vec<f64> = diag.iter().map(|d| d - shift).collect();
    let mut b: Vec<f64> = off.to_vec();
    b.push(0.0);
    let mut c = vec![0.0; n];
    let mut sub: Vec<f64> = off.to_vec();
    for i in 0..n - 1 {
        if sub[i].abs() > a[i].abs() {
            // swap rows i and i+1
            let (ai, bi, ci) = (a[i], b[i], c[i]);
            a[i] = sub[i];
            b[i] = a[i + 1];
            c[i] = b[i + 1];
            let next_sub = ai;
            let m = next_sub / a[i];
            a[i + 1] = bi - m * b[i];
            b[i + 1] = ci - m * c[i];
            rhs.swap(i, i + 1);
            rhs[i + 1] -= m * rhs[i];
            sub[i] = 0.0;
        } else {
            if a[i] == 0.0 {
                a[i] = tiny;
            }
            let m = sub[i] / a[i];
            a[i + 1] -= m * b[i];
            b[i + 1] -= m * c[i];
            rhs[i + 1] -= m * rhs[i];
        }
    }
    if a[n - 1] == 0.0 {
        a[n - 1] = tiny;
    }
    for i in (0..n).rev() {
        let mut s = rhs[i];
        if i + 1 < n {
            s -= b[i] * rhs[i + 1];
        }
        if i + 2 < n {
            s -= c[i] * rhs[i + 2];
        }
        rhs[i] = s / a[i];
        if !rhs[i].is_finite() {
            return false;
        }
    }
    true
}

fn normalize(v: &mut [f64]) -> f64 {
    let s = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if s > 0.0 {
        for x in v.iter_mut() {
            *x /= s;
        }
    }
    s
}

fn residual_norm(diag: &[f64], off: &[f64], lam: f64, v: &[f64]) -> f64 {
    let n = diag.len();
    let mut r2 = 0.0;
    for i in 0..n {
        let mut s = (diag[i] - lam) * v[i];
        if i > 0 {
            s += off[i - 1] * v[i - 1];
        }
        if i + 1 < n {
            s += off[i] * v[i + 1];
        }
        r2 += s * s;
    }
    r2.sqrt()
}

/// The `k` lowest eigenpairs `(lambda, v)` with unit Euclidean-norm
/// eigenvectors, ascending in `lambda`.
pub fn lowest_eigenpairs(diag: &[f64], off: &[f64], k: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    if n == 1 {
        return Ok(vec![(diag[0], vec![1.0])]);
    }
    let values = lowest_eigenvalues(diag, off, k);
    let (lo, hi) = gershgorin(diag, off);
    let norm = lo.abs().max(hi.abs());
    let tiny = f64::EPSILON * norm;
    let tol = 64.0 * (n as f64).sqrt() * f64::EPSILON * norm;
    let cluster_gap = 1e-3 * norm;

    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(values.len());
    for (j, &lam) in values.iter().enumerate() {
        // deterministic start vector with components in every direction
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * (((i * 7919 + j * 104_729) % 1013) as f64 / 1013.0 - 0.5))
            .collect();
        normalize(&mut v);
        let cluster: Vec<usize> = (0..pairs.len())
            .filter(|&p| (lam - pairs[p].0).abs() < cluster_gap)
            .collect();
        let mut res = f64::INFINITY;
        let mut iters = 0;
        while iters < 8 {
            iters += 1;
            if !shifted_solve(diag, off, lam, &mut v, tiny) {
                return Err(Error::Singular(format!(
                    "inverse iteration for eigenvalue {j} produced non-finite values"
                )));
            }
            for &p in &cluster {
                let u = &pairs[p].1;
                let d: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= d * y;
                }
            }
            if normalize(&mut v) == 0.0 {
                return Err(Error::Singular(format!(
                    "inverse iteration for eigenvalue {j} collapsed"
                )));
            }
            res = residual_norm(diag, off, lam, &v);
            if res <= tol && iters >= 2 {
                break;
            }
        }
        if res > tol {
            return Err(Error::NoConvergence {
                iterations: iters,
                residual: res,
                context: format!(
                    "inverse iteration for eigenvalue {j} ({lam:e}), tolerance {tol:e}"
                ),
            });
        }
        pairs.push((lam, v));
    }
    Ok(pairs)
}

/// Largest eigenpair, via the lowest pair of the negated matrix.
pub fn highest_eigenpair(diag: &[f64], off: &[f64]) -> Result<(f64, Vec<f64>)> {
    let nd: Vec<f64> = diag.iter().map(|d| -d).collect();
    let no: Vec<f64> = off.iter().map(|e| -e).collect();
    let (l, v) = lowest_eigenpairs(&nd, &no, 1)?.pop().expect("non-empty");
    Ok((-l, v))
}
