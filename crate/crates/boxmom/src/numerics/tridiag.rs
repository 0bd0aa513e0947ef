//! Tridiagonal kernels: complex Thomas solve, symmetric eigendecomposition
//! (implicit-shift QL), and a conjugate-orthogonal CG for complex symmetric
//! systems.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Solves a complex tridiagonal system in place (Thomas algorithm, no
/// pivoting). `diag` has length n, `off` length n-1 (symmetric off-diagonal).
///
/// The Crank–Nicolson matrices handled here are strictly diagonally dominant,
/// which keeps the elimination stable.
pub fn solve_sym_tridiag(
    diag: &[Complex64],
    off: &[Complex64],
    rhs: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n);
    assert_eq!(rhs.len(), n);
    let mut c = vec![Complex64::default(); n];
    let mut d = vec![Complex64::default(); n];
    let mut denom = diag[0];
    if denom.norm() == 0.0 {
        return Err(Error::Numerical("tridiagonal pivot is zero".into()));
    }
    c[0] = off.first().copied().unwrap_or_default() / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - off[i - 1] * c[i - 1];
        if denom.norm() == 0.0 {
            return Err(Error::Numerical(format!("tridiagonal pivot {i} is zero")));
        }
        if i < n - 1 {
            c[i] = off[i] / denom;
        }
        d[i] = (rhs[i] - off[i - 1] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        let next = d[i + 1];
        d[i] -= c[i] * next;
    }
    Ok(d)
}

/// Multiplies a symmetric tridiagonal matrix with real off-diagonal into a
/// complex vector.
pub fn mul_sym_tridiag_real_off(
    diag: &[Complex64],
    off: &[f64],
    x: &[Complex64],
) -> Vec<Complex64> {
    let n = diag.len();
    let mut y = vec![Complex64::default(); n];
    for i in 0..n {
        let mut acc = diag[i] * x[i];
        if i > 0 {
            acc += off[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            acc += off[i] * x[i + 1];
        }
        y[i] = acc;
    }
    y
}

/// Multiplies a symmetric tridiagonal matrix into a vector.
pub fn mul_sym_tridiag(diag: &[Complex64], off: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut y = vec![Complex64::default(); n];
    for i in 0..n {
        let mut acc = diag[i] * x[i];
        if i > 0 {
            acc += off[i - 1] * x[i - 1];
        }
        if i + 1 < n {
            acc += off[i] * x[i + 1];
        }
        y[i] = acc;
    }
    y
}

/// Full eigendecomposition of a real symmetric tridiagonal matrix.
///
/// Returns eigenvalues in ascending order and the orthogonal matrix of
/// eigenvectors stored row-major as `q[i * n + j]` = component i of
/// eigenvector j. Implicit-shift QL with eigenvector accumulation.
pub fn eig_sym_tridiag(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n.max(1));
    let mut d = diag.to_vec();
    // e is padded: e[i] couples i and i+1, e[n-1] unused
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(off);
    let mut q = vec![0.0; n * n];
    for i in 0..n {
        q[i * n + i] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find a small subdiagonal element to split the problem.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::Numerical("tridiagonal QL failed to converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0, 1.0);
            let mut p = 0.0;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    f = q[k * n + i + 1];
                    q[k * n + i + 1] = s * q[k * n + i] + c * f;
                    q[k * n + i] = c * q[k * n + i] - s * f;
                }
            }
            if r == 0.0 && m > l + 1 {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    // Sort ascending, permuting eigenvector columns.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap());
    let evals: Vec<f64> = idx.iter().map(|&j| d[j]).collect();
    let mut qs = vec![0.0; n * n];
    for (jnew, &jold) in idx.iter().enumerate() {
        for i in 0..n {
            qs[i * n + jnew] = q[i * n + jold];
        }
    }
    Ok((evals, qs))
}

/// Conjugate-orthogonal CG for complex symmetric systems A x = b, where A is
/// given as an operator. Uses the unconjugated bilinear form; converges when
/// A = Aᵀ, which holds for the Crank–Nicolson matrices.
pub fn cocg(
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<Complex64>> {
    let n = b.len();
    let mut x = vec![Complex64::default(); n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let bnorm: f64 = b.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if bnorm == 0.0 {
        return Ok(x);
    }
    let dot = |u: &[Complex64], v: &[Complex64]| -> Complex64 {
        u.iter().zip(v).map(|(a, b)| a * b).sum()
    };
    let mut rho = dot(&r, &r);
    for _ in 0..max_iter {
        let ap = apply(&p);
        let alpha = rho / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rnorm: f64 = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if rnorm <= tol * bnorm {
            return Ok(x);
        }
        let rho_next = dot(&r, &r);
        let beta = rho_next / rho;
        rho = rho_next;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    let rnorm: f64 = r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Err(Error::Numerical(format!(
        "COCG did not reach tolerance {tol:.1e}; relative residual {:.3e}",
        rnorm / bnorm
    )))
}
