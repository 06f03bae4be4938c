//! Projector traces for the bias-adjusted LM statistic.
//!
//! With `P_r = X_r'(X_r X_r')⁻¹X_r` and `M_r = I - P_r`,
//!
//! ```text
//! tr(M_r M_s)     = T - q_r - q_s + tr(P_r P_s)
//! tr((M_r M_s)²)  = T - q_r - q_s + tr((P_r P_s)²)
//! ```
//!
//! Whitening each design (`W_r = L_r⁻¹ X_r`, `L_r L_r' = X_r X_r'`) gives
//! `P_r = W_r'W_r`, so with the q×q block `B = W_r W_s'` both projector traces
//! reduce to `‖B‖²_F` and `‖B B'‖²_F`. No T×T matrix is ever formed.

use ndarray::{s, Array2, ArrayView2};

use crate::error::{Error, Result};
use crate::linalg;
use crate::panel::{CenteredPanel, SINGULARITY_RATIO};

/// `tr(M_r M_s)` and `tr((M_r M_s)²)` for one ordered pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairTraces {
    pub tr_mm: f64,
    pub tr_mm2: f64,
}

/// Whitened per-unit designs and their stacked cross products.
#[derive(Debug, Clone)]
pub struct UnitProjectors {
    t: usize,
    /// Row offset of each unit inside `cross`.
    offsets: Vec<usize>,
    ranks: Vec<usize>,
    /// When set, every design also carries an implicit constant row that is
    /// orthogonal to the stored rows (the designs are time-demeaned).
    mean_absorbed: bool,
    cross: Array2<f64>,
}

impl UnitProjectors {
    /// `designs[r]` is the q_r×T design of unit r.
    pub fn new(designs: &[Array2<f64>]) -> Result<Self> {
        Self::build(designs, false)
    }

    /// Projectors of `[1; x̃_r]` for every unit of a centered panel. The
    /// constant row is handled analytically since x̃_r is orthogonal to it.
    pub fn from_centered(cp: &CenteredPanel) -> Result<Self> {
        let designs: Vec<_> = (0..cp.n()).map(|i| cp.unit_design(i)).collect();
        Self::build(&designs, true)
    }

    fn build(designs: &[Array2<f64>], mean_absorbed: bool) -> Result<Self> {
        let t = designs
            .first()
            .map(|d| d.ncols())
            .ok_or_else(|| Error::InvalidArgument("no unit designs".into()))?;
        let total: usize = designs.iter().map(|d| d.nrows()).sum();
        let mut stacked = Array2::<f64>::zeros((total, t));
        let mut offsets = Vec::with_capacity(designs.len());
        let mut ranks = Vec::with_capacity(designs.len());
        let mut row = 0;
        for (unit, d) in designs.iter().enumerate() {
            if d.ncols() != t {
                return Err(Error::InvalidArgument(format!(
                    "design of unit {unit} has {} columns, expected {t}",
                    d.ncols()
                )));
            }
            let q = d.nrows();
            offsets.push(row);
            ranks.push(q + usize::from(mean_absorbed));
            if q > 0 {
                let w = whiten(d.view()).ok_or(Error::SingularUnitDesign { unit })?;
                stacked.slice_mut(s![row..row + q, ..]).assign(&w);
            }
            row += q;
        }
        let cross = stacked.dot(&stacked.t());
        Ok(Self {
            t,
            offsets,
            ranks,
            mean_absorbed,
            cross,
        })
    }

    pub fn n(&self) -> usize {
        self.offsets.len()
    }

    /// Rank of unit r's projector (including the absorbed constant, if any).
    pub fn rank(&self, r: usize) -> usize {
        self.ranks[r]
    }

    pub fn pair(&self, r: usize, s: usize) -> PairTraces {
        let extra = usize::from(self.mean_absorbed);
        let (qr, qs) = (self.ranks[r] - extra, self.ranks[s] - extra);
        let (or, os) = (self.offsets[r], self.offsets[s]);
        // rows of B = cross[or.., os..]; tr(P_r P_s) = tr(BB'), tr((P_r P_s)²) = ‖BB'‖²_F
        let row = |a: usize| &self.cross.row(or + a).to_slice().expect("standard layout")[os..os + qs];
        let mut tr_pp = 0.0;
        let mut tr_pp2 = 0.0;
        for a in 0..qr {
            let ra = row(a);
            let d: f64 = ra.iter().map(|v| v * v).sum();
            tr_pp += d;
            tr_pp2 += d * d;
            for c in (a + 1)..qr {
                let v: f64 = ra.iter().zip(row(c)).map(|(x, y)| x * y).sum();
                tr_pp2 += 2.0 * v * v;
            }
        }

        // the shared constant direction adds 1 to both traces
        let shared = extra as f64;
        let base = self.t as f64 - self.ranks[r] as f64 - self.ranks[s] as f64;
        PairTraces {
            tr_mm: base + tr_pp + shared,
            tr_mm2: base + tr_pp2 + shared,
        }
    }
}

/// `L⁻¹ X` where `L L' = X X'`. `None` if `X X'` is singular.
fn whiten(x: ArrayView2<f64>) -> Option<Array2<f64>> {
    let gram = x.dot(&x.t());
    if !(linalg::eigenvalue_ratio(gram.view()) > SINGULARITY_RATIO) {
        return None;
    }
    let l = linalg::cholesky(gram.view())?;
    let mut w = x.to_owned();
    let mut col = vec![0.0; x.nrows()];
    for j in 0..x.ncols() {
        for (i, c) in col.iter_mut().enumerate() {
            *c = x[[i, j]];
        }
        linalg::forward_substitute(l.view(), &mut col);
        for (i, &c) in col.iter().enumerate() {
            w[[i, j]] = c;
        }
    }
    Some(w)
}

/// Pair mean and standard deviation of `(T-k) ρ̂²_rs` under the null.
pub fn pair_moments(traces: PairTraces, t: usize, k: usize) -> (f64, f64) {
    let tk = t as f64 - k as f64;
    let a2 = 3.0 / (tk + 2.0).powi(2);
    let a1 = a2 - 1.0 / (tk * tk);
    let mu = traces.tr_mm / tk;
    let var = traces.tr_mm.powi(2) * a1 + 2.0 * traces.tr_mm2 * a2;
    (mu, var.sqrt())
}
