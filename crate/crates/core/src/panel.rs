//! Balanced panel container, the within (time-demeaning) transform and the
//! pooled OLS fit on centered variables.
//!
//! The intercept and the unit fixed effects are never estimated: demeaning
//! each unit's series over time removes both.

use ndarray::{s, Array1, Array2, Array3, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::linalg;

/// Minimum accepted ratio between the smallest and largest eigenvalue of the
/// pooled Gram matrix.
pub const SINGULARITY_RATIO: f64 = 1e-12;

/// A balanced panel: `y` is n×T, `x` is n×T×k_x.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelData {
    y: Array2<f64>,
    x: Array3<f64>,
}

impl PanelData {
    pub fn new(y: Array2<f64>, x: Array3<f64>) -> Result<Self> {
        let (n, t) = y.dim();
        let (xn, xt, kx) = x.dim();
        if (xn, xt) != (n, t) {
            return Err(Error::InvalidPanel(format!(
                "regressor array is {xn}×{xt}×{kx} but outcome is {n}×{t}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidPanel(format!("need at least 2 units, got {n}")));
        }
        if t < kx + 2 {
            return Err(Error::InvalidPanel(format!(
                "need T >= k_x + 2, got T={t}, k_x={kx}"
            )));
        }
        if y.iter().chain(x.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidPanel("non-finite value in panel".into()));
        }
        Ok(Self { y, x })
    }

    /// Panel without regressors.
    pub fn from_outcome(y: Array2<f64>) -> Result<Self> {
        let (n, t) = y.dim();
        Self::new(y, Array3::zeros((n, t, 0)))
    }

    pub fn n(&self) -> usize {
        self.y.nrows()
    }

    pub fn t(&self) -> usize {
        self.y.ncols()
    }

    pub fn kx(&self) -> usize {
        self.x.dim().2
    }

    pub fn y(&self) -> &Array2<f64> {
        &self.y
    }

    pub fn x(&self) -> &Array3<f64> {
        &self.x
    }

    /// Same panel with units reordered so that new unit `i` is old unit `perm[i]`.
    pub fn permute_units(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n() {
            return Err(Error::InvalidArgument("permutation length mismatch".into()));
        }
        let y = self.y.select(Axis(0), perm);
        let x = self.x.select(Axis(0), perm);
        Self::new(y, x)
    }
}

/// Time-demeaned outcome and regressors.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredPanel {
    pub y_tilde: Array2<f64>,
    pub x_tilde: Array3<f64>,
}

impl CenteredPanel {
    pub fn n(&self) -> usize {
        self.y_tilde.nrows()
    }

    pub fn t(&self) -> usize {
        self.y_tilde.ncols()
    }

    pub fn kx(&self) -> usize {
        self.x_tilde.dim().2
    }

    /// Centered design of unit `i` as a k_x×T matrix.
    pub fn unit_design(&self, i: usize) -> Array2<f64> {
        self.x_tilde.slice(s![i, .., ..]).t().to_owned()
    }

    /// Residuals `ỹ - x̃'β` for an arbitrary slope vector.
    pub fn residuals_at(&self, beta: &[f64]) -> Array2<f64> {
        assert_eq!(beta.len(), self.kx(), "slope vector has wrong length");
        let mut res = self.y_tilde.clone();
        for (l, &b) in beta.iter().enumerate() {
            res.scaled_add(-b, &self.x_tilde.slice(s![.., .., l]));
        }
        res
    }

    /// Residuals for unit-specific slopes (`betas` is n×k_x).
    pub fn residuals_at_units(&self, betas: ArrayView2<f64>) -> Array2<f64> {
        let mut res = self.y_tilde.clone();
        for i in 0..self.n() {
            for l in 0..self.kx() {
                let b = betas[[i, l]];
                let xl = self.x_tilde.slice(s![i, .., l]);
                res.row_mut(i).scaled_add(-b, &xl);
            }
        }
        res
    }
}

fn demean_rows(mut a: Array2<f64>) -> Array2<f64> {
    for mut row in a.rows_mut() {
        let mean = row.sum() / row.len() as f64;
        row.mapv_inplace(|v| v - mean);
    }
    a
}

/// Subtracts each unit's time mean from its outcome and from every regressor.
pub fn center_panel(data: &PanelData) -> CenteredPanel {
    let y_tilde = demean_rows(data.y.clone());
    let mut x_tilde = data.x.clone();
    for l in 0..data.kx() {
        let col = demean_rows(data.x.slice(s![.., .., l]).to_owned());
        x_tilde.slice_mut(s![.., .., l]).assign(&col);
    }
    CenteredPanel { y_tilde, x_tilde }
}

/// Pooled within-regression output.
#[derive(Debug, Clone)]
pub struct RegressionFit {
    pub beta_hat: Array1<f64>,
    /// n×T residual matrix.
    pub residuals: Array2<f64>,
    /// Σ_t Σ_i x̃_it x̃_it'.
    pub gram: Array2<f64>,
}

/// Pooled OLS of ỹ on x̃ over all (i, t).
pub fn fit_pooled_ols(cp: &CenteredPanel) -> Result<RegressionFit> {
    let kx = cp.kx();
    let (n, t) = cp.y_tilde.dim();
    let design = cp
        .x_tilde
        .view()
        .into_shape_with_order((n * t, kx))
        .expect("standard layout");
    let response = cp
        .y_tilde
        .view()
        .into_shape_with_order(n * t)
        .expect("standard layout");

    let gram = design.t().dot(&design);
    let rhs = design.t().dot(&response);

    let beta_hat = if kx == 0 {
        Array1::zeros(0)
    } else {
        let ratio = linalg::eigenvalue_ratio(gram.view());
        if !(ratio > SINGULARITY_RATIO) {
            return Err(Error::SingularDesign { ratio });
        }
        let l = linalg::cholesky(gram.view()).ok_or(Error::SingularDesign { ratio })?;
        Array1::from(linalg::cholesky_solve(l.view(), rhs.as_slice().expect("contiguous")))
    };

    let residuals = cp.residuals_at(beta_hat.as_slice().expect("contiguous"));
    Ok(RegressionFit {
        beta_hat,
        residuals,
        gram,
    })
}
