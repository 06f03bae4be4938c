//! Small dense helpers for the k×k systems that show up in the pooled fit and
//! the per-unit projector algebra. Sizes here are tiny (k rarely exceeds 10),
//! so plain loops are used throughout.

use ndarray::{Array2, ArrayView2};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(a: ArrayView2<f64>) -> Vec<f64> {
    let k = a.nrows();
    assert_eq!(k, a.ncols(), "matrix must be square");
    let mut m = a.to_owned();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..k {
            for q in (p + 1)..k {
                off += m[[p, q]] * m[[p, q]];
            }
        }
        let scale: f64 = (0..k).map(|i| m[[i, i]] * m[[i, i]]).sum();
        if off <= 1e-30 * scale.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = m[[p, q]];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let mrp = m[[r, p]];
                    let mrq = m[[r, q]];
                    m[[r, p]] = c * mrp - s * mrq;
                    m[[r, q]] = s * mrp + c * mrq;
                }
                for r in 0..k {
                    let mpr = m[[p, r]];
                    let mqr = m[[q, r]];
                    m[[p, r]] = c * mpr - s * mqr;
                    m[[q, r]] = s * mpr + c * mqr;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..k).map(|i| m[[i, i]]).collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Ratio of the smallest to the largest eigenvalue; 0 for an empty or zero matrix.
pub fn eigenvalue_ratio(a: ArrayView2<f64>) -> f64 {
    let ev = symmetric_eigenvalues(a);
    match (ev.first(), ev.last()) {
        (Some(&lo), Some(&hi)) if hi > 0.0 => lo / hi,
        (None, None) => 1.0,
        _ => 0.0,
    }
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
pub fn cholesky(a: ArrayView2<f64>) -> Option<Array2<f64>> {
    let k = a.nrows();
    let mut l = Array2::<f64>::zeros((k, k));
    for j in 0..k {
        let mut d = a[[j, j]];
        for p in 0..j {
            d -= l[[j, p]] * l[[j, p]];
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[[j, j]] = djj;
        for i in (j + 1)..k {
            let mut s = a[[i, j]];
            for p in 0..j {
                s -= l[[i, p]] * l[[j, p]];
            }
            l[[i, j]] = s / djj;
        }
    }
    Some(l)
}

/// Solves `L y = b` in place for lower-triangular `L`.
pub fn forward_substitute(l: ArrayView2<f64>, b: &mut [f64]) {
    for i in 0..b.len() {
        let mut s = b[i];
        for p in 0..i {
            s -= l[[i, p]] * b[p];
        }
        b[i] = s / l[[i, i]];
    }
}

/// Solves `A x = b` given the lower Cholesky factor of `A`.
pub fn cholesky_solve(l: ArrayView2<f64>, b: &[f64]) -> Vec<f64> {
    let k = b.len();
    let mut y = b.to_vec();
    forward_substitute(l, &mut y);
    for i in (0..k).rev() {
        let mut s = y[i];
        for p in (i + 1)..k {
            s -= l[[p, i]] * y[p];
        }
        y[i] = s / l[[i, i]];
    }
    y
}
