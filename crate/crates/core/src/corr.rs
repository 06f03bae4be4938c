//! Residual covariance and correlation matrices with the power sums and trace
//! powers every test statistic is built from.

use ndarray::{Array1, Array2, ArrayView2};

use crate::error::{Error, Result};

/// A unit whose variance falls below this fraction of the panel's mean
/// variance is treated as degenerate.
pub const DEGENERATE_VARIANCE_RATIO: f64 = 1e-14;

/// Residual correlation matrix together with the summaries the tests use.
#[derive(Debug, Clone)]
pub struct CorrSummary {
    pub n: usize,
    pub t: usize,
    /// Diagonal of the covariance matrix.
    pub diag_var: Array1<f64>,
    pub corr: Array2<f64>,
    /// Σ_{r≠s} ρ_rs over ordered pairs.
    pub sum_rho: f64,
    /// Σ_{r≠s} ρ_rs² over ordered pairs.
    pub sum_rho2: f64,
    pub trace_r2: f64,
    pub trace_r4: f64,
}

/// `(1/T) Σ_t v_t v_t'` for the n×T residual matrix. The divisor is T.
pub fn residual_covariance(residuals: ArrayView2<f64>) -> Result<Array2<f64>> {
    let (n, t) = residuals.dim();
    if n < 2 || t == 0 {
        return Err(Error::InvalidArgument(format!(
            "residual matrix must be at least 2×1, got {n}×{t}"
        )));
    }
    let cov = residuals.dot(&residuals.t()) / t as f64;
    check_diagonal(&cov)?;
    Ok(cov)
}

fn check_diagonal(cov: &Array2<f64>) -> Result<()> {
    let n = cov.nrows();
    let scale = cov.diag().sum() / n as f64;
    for (unit, &v) in cov.diag().iter().enumerate() {
        if !(v > DEGENERATE_VARIANCE_RATIO * scale) || !v.is_finite() {
            return Err(Error::DegenerateUnit { unit });
        }
    }
    Ok(())
}

/// Normalizes a covariance matrix to unit diagonal and computes the sums.
pub fn correlation_summary(cov: ArrayView2<f64>, t: usize) -> Result<CorrSummary> {
    let n = cov.nrows();
    if n != cov.ncols() || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "covariance must be square with n >= 2, got {}×{}",
            n,
            cov.ncols()
        )));
    }
    let cov = cov.to_owned();
    check_diagonal(&cov)?;
    let diag_var = cov.diag().to_owned();
    let inv_sd = diag_var.mapv(|v| 1.0 / v.sqrt());

    let mut corr = Array2::<f64>::eye(n);
    let mut sum_rho = 0.0;
    let mut sum_rho2 = 0.0;
    for r in 0..n {
        for s in (r + 1)..n {
            let rho = cov[[r, s]] * inv_sd[r] * inv_sd[s];
            corr[[r, s]] = rho;
            corr[[s, r]] = rho;
            sum_rho += 2.0 * rho;
            sum_rho2 += 2.0 * rho * rho;
        }
    }

    let r2 = corr.dot(&corr);
    let trace_r2 = r2.diag().sum();
    // tr(R²·R²) = Σ_ij (R²)_ij (R²)_ji
    let mut trace_r4 = 0.0;
    for i in 0..n {
        for j in 0..n {
            trace_r4 += r2[[i, j]] * r2[[j, i]];
        }
    }

    Ok(CorrSummary {
        n,
        t,
        diag_var,
        corr,
        sum_rho,
        sum_rho2,
        trace_r2,
        trace_r4,
    })
}

/// Covariance then correlation summary for an n×T residual matrix.
pub fn summarize_residuals(residuals: ArrayView2<f64>) -> Result<CorrSummary> {
    let cov = residual_covariance(residuals)?;
    correlation_summary(cov.view(), residuals.ncols())
}

impl CorrSummary {
    /// Builds a summary directly from a correlation matrix (unit diagonal
    /// assumed) and a time dimension. Mostly useful for hand-built cases.
    pub fn from_correlation(corr: ArrayView2<f64>, t: usize) -> Result<Self> {
        correlation_summary(corr, t)
    }

    /// Aspect ratio n/T.
    pub fn c_t(&self) -> f64 {
        self.n as f64 / self.t as f64
    }

    /// Largest squared off-diagonal correlation.
    pub fn max_rho2(&self) -> f64 {
        let mut m = 0.0f64;
        for r in 0..self.n {
            for s in 0..self.n {
                if r != s {
                    m = m.max(self.corr[[r, s]].powi(2));
                }
            }
        }
        m
    }
}
