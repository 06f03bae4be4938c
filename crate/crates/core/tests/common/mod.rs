#![allow(dead_code)]

use ndarray::{Array2, Array3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use xsdep::PanelData;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Array2<f64> {
    Array2::from_shape_fn((rows, cols), |_| rng.sample(StandardNormal))
}

/// Panel with random effects, random regressors and iid N(0,1) errors.
pub fn random_panel(rng: &mut impl Rng, n: usize, t: usize, kx: usize) -> PanelData {
    let x = Array3::from_shape_fn((n, t, kx), |_| rng.sample::<f64, _>(StandardNormal));
    let mut y = Array2::zeros((n, t));
    for i in 0..n {
        let mu: f64 = rng.sample(StandardNormal);
        for s in 0..t {
            let mut v = 1.0 + mu + rng.sample::<f64, _>(StandardNormal);
            for l in 0..kx {
                v += (l as f64 + 2.0) * x[[i, s, l]];
            }
            y[[i, s]] = v;
        }
    }
    PanelData::new(y, x).unwrap()
}

/// Correlation matrix of the rows from uncentered second moments (residual
/// rows are already mean zero), computed from scratch.
pub fn naive_correlation(e: &Array2<f64>) -> Array2<f64> {
    let (n, t) = e.dim();
    let centered = e;
    let mut r = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let mut sij = 0.0;
            let mut sii = 0.0;
            let mut sjj = 0.0;
            for s in 0..t {
                sij += centered[[i, s]] * centered[[j, s]];
                sii += centered[[i, s]] * centered[[i, s]];
                sjj += centered[[j, s]] * centered[[j, s]];
            }
            r[[i, j]] = sij / (sii * sjj).sqrt();
        }
    }
    r
}

pub fn quadruple_sum(r: &Array2<f64>) -> f64 {
    let n = r.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    acc += r[[i, j]] * r[[j, k]] * r[[k, l]] * r[[l, i]];
                }
            }
        }
    }
    acc
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut inv = Array2::<f64>::eye(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[[i, col]].abs().total_cmp(&m[[j, col]].abs()))
            .unwrap();
        for j in 0..n {
            m.swap([col, j], [pivot, j]);
            inv.swap([col, j], [pivot, j]);
        }
        let p = m[[col, col]];
        assert!(p.abs() > 1e-300, "singular matrix");
        for j in 0..n {
            m[[col, j]] /= p;
            inv[[col, j]] /= p;
        }
        for i in 0..n {
            if i != col {
                let f = m[[i, col]];
                for j in 0..n {
                    m[[i, j]] -= f * m[[col, j]];
                    inv[[i, j]] -= f * inv[[col, j]];
                }
            }
        }
    }
    inv
}

/// `I - X'(XX')⁻¹X` for a q×T design.
pub fn annihilator(x: &Array2<f64>) -> Array2<f64> {
    let t = x.ncols();
    let inner = invert(&x.dot(&x.t()));
    Array2::<f64>::eye(t) - x.t().dot(&inner).dot(x)
}

/// `(tr(M_r M_s), tr((M_r M_s)²))` from explicit T×T matrices.
pub fn brute_traces(mr: &Array2<f64>, ms: &Array2<f64>) -> (f64, f64) {
    let p = mr.dot(ms);
    let tr1 = p.diag().sum();
    let tr2 = p.dot(&p).diag().sum();
    (tr1, tr2)
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
