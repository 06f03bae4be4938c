use crate::error::{Error, Result};

/// Centering and scaling constants shared by the trace-based statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestConstants {
    /// n / T.
    pub c_t: f64,
    pub mu_lm_e: f64,
    pub sigma_lm_e: f64,
    pub mu_pet: f64,
    pub sigma_pet: f64,
    pub mu_rmt: f64,
    /// Variance of the LM_RMT statistic before the square root. Can be
    /// nonpositive for pathological dimensions, so it is kept as a variance.
    pub sigma2_rmt: f64,
    pub kappa: f64,
}

/// `3T(T-k+2) / ((T+2)(T-k))`.
pub fn kappa(t: usize, k: usize) -> f64 {
    let t = t as f64;
    let k = k as f64;
    3.0 * t * (t - k + 2.0) / ((t + 2.0) * (t - k))
}

/// `n(1+c) + c² - c`, shared by LM_e and LM_RMT.
pub fn mu_lm_e(n: usize, t: usize) -> f64 {
    let c = n as f64 / t as f64;
    n as f64 * (1.0 + c) + c * c - c
}

pub fn sigma_lm_e(n: usize, t: usize) -> f64 {
    2.0 * n as f64 / t as f64
}

pub fn mu_pet(n: usize, t: usize) -> f64 {
    let nf = n as f64;
    let c = nf / t as f64;
    let r = nf / (t as f64 - 1.0);
    nf * (1.0 + 6.0 * r + 6.0 * r * r + r * r * r) - 6.0 * c * (1.0 + c).powi(2) - 2.0 * c * c
}

pub fn sigma2_pet(n: usize, t: usize) -> f64 {
    let c = n as f64 / t as f64;
    8.0 * c.powi(4)
        + 96.0 * c.powi(3) * (1.0 + c).powi(2)
        + 16.0 * c * c * (3.0 * c * c + 8.0 * c + 3.0).powi(2)
}

pub fn sigma2_rmt(n: usize, t: usize, k: usize) -> f64 {
    let c = n as f64 / t as f64;
    let kap = kappa(t, k);
    4.0 * c * (1.0 + 2.0 * c) * (c + 2.0) - 4.0 * (kap - 1.0) * c * (1.0 + c).powi(2)
        + (kap - 3.0) * c * (c - 4.0).powi(2) * (c + 1.0).powi(2)
}

/// Limit of the LM_RMT variance as κ → 3; it simplifies to 4c².
pub fn sigma2_rmt_limit(n: usize, t: usize) -> f64 {
    let c = n as f64 / t as f64;
    4.0 * c * (1.0 + 2.0 * c) * (c + 2.0) - 8.0 * c * (1.0 + c).powi(2)
}

impl TestConstants {
    pub fn new(n: usize, t: usize, k: usize) -> Result<Self> {
        if n < 2 || t < 3 || t <= k {
            return Err(Error::InvalidArgument(format!(
                "constants need n >= 2, T > 2 and T > k (n={n}, T={t}, k={k})"
            )));
        }
        Ok(Self {
            c_t: n as f64 / t as f64,
            mu_lm_e: mu_lm_e(n, t),
            sigma_lm_e: sigma_lm_e(n, t),
            mu_pet: mu_pet(n, t),
            sigma_pet: sigma2_pet(n, t).sqrt(),
            mu_rmt: mu_lm_e(n, t),
            sigma2_rmt: sigma2_rmt(n, t, k),
            kappa: kappa(t, k),
        })
    }
}
