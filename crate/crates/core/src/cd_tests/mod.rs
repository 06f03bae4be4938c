//! The cross-sectional dependence statistics, their reference distributions
//! and p-values.

mod constants;
mod lm_adj;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use constants::{
    kappa, mu_lm_e, mu_pet, sigma2_pet, sigma2_rmt, sigma2_rmt_limit, sigma_lm_e, TestConstants,
};
pub use lm_adj::{pair_moments, PairTraces, UnitProjectors};

use crate::corr::{summarize_residuals, CorrSummary};
use crate::error::{Error, Result};
use crate::panel::{center_panel, fit_pooled_ols, CenteredPanel, PanelData};
use crate::special;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum TestName {
    Lm,
    Cd,
    LmAdj,
    LmP,
    LmBc,
    LmRmt,
    LmE,
    Pet,
}

impl TestName {
    /// The seven tests produced by [`run_all_tests`], in output order.
    pub const BATTERY: [TestName; 7] = [
        TestName::Lm,
        TestName::Cd,
        TestName::LmAdj,
        TestName::LmBc,
        TestName::LmRmt,
        TestName::LmE,
        TestName::Pet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TestName::Lm => "LM",
            TestName::Cd => "CD",
            TestName::LmAdj => "LM_adj",
            TestName::LmP => "LM_P",
            TestName::LmBc => "LM_bc",
            TestName::LmRmt => "LM_RMT",
            TestName::LmE => "LM_e",
            TestName::Pet => "PET",
        }
    }
}

impl fmt::Display for TestName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            TestName::Lm,
            TestName::Cd,
            TestName::LmAdj,
            TestName::LmP,
            TestName::LmBc,
            TestName::LmRmt,
            TestName::LmE,
            TestName::Pet,
        ]
        .into_iter()
        .find(|t| t.as_str().eq_ignore_ascii_case(s))
        .ok_or_else(|| Error::InvalidArgument(format!("unknown test '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NullDist {
    StdNormal,
    ChiSquare { df: u64 },
}

impl fmt::Display for NullDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NullDist::StdNormal => f.write_str("N(0,1)"),
            NullDist::ChiSquare { df } => write!(f, "chi2({df})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    UpperOneSided,
    TwoSided,
}

impl fmt::Display for Tail {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Tail::UpperOneSided => "upper",
            Tail::TwoSided => "two-sided",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub test: TestName,
    pub statistic: f64,
    pub null_dist: NullDist,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub tail: Tail,
}

impl TestResult {
    pub fn new(test: TestName, statistic: f64, null_dist: NullDist, tail: Tail, alpha: f64) -> Self {
        let p_value = p_value(statistic, null_dist, tail);
        Self {
            test,
            statistic,
            null_dist,
            p_value,
            reject: p_value < alpha,
            alpha,
            tail,
        }
    }

    /// Same statistic evaluated against a different rejection region.
    pub fn with_tail(&self, tail: Tail) -> Self {
        Self::new(self.test, self.statistic, self.null_dist, tail, self.alpha)
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self::new(self.test, self.statistic, self.null_dist, self.tail, alpha)
    }
}

fn p_value(stat: f64, dist: NullDist, tail: Tail) -> f64 {
    let (upper, lower) = match dist {
        NullDist::StdNormal => (special::normal_sf(stat), special::normal_cdf(stat)),
        NullDist::ChiSquare { df } => (
            special::chi_square_sf(stat, df as f64),
            special::chi_square_cdf(stat, df as f64),
        ),
    };
    let p = match tail {
        Tail::UpperOneSided => upper,
        Tail::TwoSided => 2.0 * upper.min(lower),
    };
    p.clamp(0.0, 1.0)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

fn check_dims(cs: &CorrSummary) -> Result<()> {
    if cs.n < 2 || cs.t < 2 {
        return Err(Error::InvalidArgument(format!(
            "need n >= 2 and T >= 2, got n={}, T={}",
            cs.n, cs.t
        )));
    }
    Ok(())
}

/// Number of unordered unit pairs as a float.
fn pairs(n: usize) -> f64 {
    (n * (n - 1)) as f64
}

/// Breusch–Pagan LM: `(T/2)(tr(R̂²) - n)` against χ²(n(n-1)/2).
pub fn lm_test(cs: &CorrSummary, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    check_dims(cs)?;
    // (T/2)(tr(R̂²) - n) = (T/2) Σ_{r≠s} ρ̂²; the sum form cannot go negative
    let stat = 0.5 * cs.t as f64 * cs.sum_rho2;
    let df = (cs.n * (cs.n - 1) / 2) as u64;
    Ok(TestResult::new(
        TestName::Lm,
        stat,
        NullDist::ChiSquare { df },
        Tail::UpperOneSided,
        alpha,
    ))
}

/// CD statistic: scaled sum of the raw correlations.
pub fn cd_test(cs: &CorrSummary, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    check_dims(cs)?;
    let stat = (cs.t as f64 / (2.0 * pairs(cs.n))).sqrt() * cs.sum_rho;
    Ok(TestResult::new(
        TestName::Cd,
        stat,
        NullDist::StdNormal,
        Tail::TwoSided,
        alpha,
    ))
}

/// Bias-adjusted LM. `k` is the degrees-of-freedom correction in `T - k`.
pub fn lm_adj_test(cp: &CenteredPanel, cs: &CorrSummary, k: usize, alpha: f64) -> Result<TestResult> {
    let projectors = UnitProjectors::from_centered(cp)?;
    lm_adj_with_projectors(&projectors, cs, k, alpha)
}

/// LM_adj given precomputed unit projectors.
pub fn lm_adj_with_projectors(
    projectors: &UnitProjectors,
    cs: &CorrSummary,
    k: usize,
    alpha: f64,
) -> Result<TestResult> {
    check_alpha(alpha)?;
    check_dims(cs)?;
    let (n, t) = (cs.n, cs.t);
    if projectors.n() != n {
        return Err(Error::InvalidArgument(format!(
            "projectors cover {} units, correlation matrix {n}",
            projectors.n()
        )));
    }
    if t <= k + 2 {
        return Err(Error::InvalidArgument(format!(
            "LM_adj needs T - k > 2 (T={t}, k={k})"
        )));
    }
    let tk = (t - k) as f64;
    let mut sum = 0.0;
    for r in 0..n {
        for s in (r + 1)..n {
            // both traces are symmetric in (r, s)
            let (mu, sigma) = pair_moments(projectors.pair(r, s), t, k);
            if !(sigma > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "LM_adj pair variance is not positive for units ({r}, {s})"
                )));
            }
            let rho = cs.corr[[r, s]];
            sum += 2.0 * (tk * rho * rho - mu) / sigma;
        }
    }
    let stat = (1.0 / (2.0 * pairs(n))).sqrt() * sum;
    Ok(TestResult::new(
        TestName::LmAdj,
        stat,
        NullDist::StdNormal,
        Tail::TwoSided,
        alpha,
    ))
}

/// `√(1/(4n(n-1))) Σ_{r≠s} (T ρ̂²_rs - 1)`, from the pairwise sum.
pub fn lm_p_statistic(cs: &CorrSummary) -> f64 {
    let np = pairs(cs.n);
    (cs.t as f64 * cs.sum_rho2 - np) / (4.0 * np).sqrt()
}

/// The trace form `(tr(R̂²) - n(1+c) + c) / (2c)` of the scaled LM statistic.
pub fn lm_p_trace_form(cs: &CorrSummary) -> f64 {
    let c = cs.c_t();
    (cs.trace_r2 - cs.n as f64 * (1.0 + c) + c) / (2.0 * c)
}

/// Bias-corrected LM: `LM_P - n / (2(T-1))`.
pub fn lm_bc_test(cs: &CorrSummary, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    check_dims(cs)?;
    let stat = lm_p_statistic(cs) - cs.n as f64 / (2.0 * (cs.t as f64 - 1.0));
    Ok(TestResult::new(
        TestName::LmBc,
        stat,
        NullDist::StdNormal,
        Tail::UpperOneSided,
        alpha,
    ))
}

/// Gaussian random-matrix LM. `k` enters only through κ.
pub fn lm_rmt_test(cs: &CorrSummary, k: usize, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    check_dims(cs)?;
    let consts = TestConstants::new(cs.n, cs.t, k)?;
    if !(consts.sigma2_rmt > 0.0) {
        return Err(Error::NonpositiveVariance {
            n: cs.n,
            t: cs.t,
            k,
            value: consts.sigma2_rmt,
        });
    }
    let stat = (cs.trace_r2 - consts.mu_rmt) / consts.sigma2_rmt.sqrt();
    Ok(TestResult::new(
        TestName::LmRmt,
        stat,
        NullDist::StdNormal,
        Tail::UpperOneSided,
        alpha,
    ))
}

/// Extended LM: `(tr(R̂²) - μ) / (2c)`, valid without error normality.
pub fn lm_e_test(cs: &CorrSummary, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    check_dims(cs)?;
    let stat = (cs.trace_r2 - mu_lm_e(cs.n, cs.t)) / sigma_lm_e(cs.n, cs.t);
    Ok(TestResult::new(
        TestName::LmE,
        stat,
        NullDist::StdNormal,
        Tail::UpperOneSided,
        alpha,
    ))
}

/// Power-enhanced test on the fourth trace power.
pub fn pet_test(cs: &CorrSummary, alpha: f64) -> Result<TestResult> {
    check_alpha(alpha)?;
    check_dims(cs)?;
    let stat = (cs.trace_r4 - mu_pet(cs.n, cs.t)) / sigma2_pet(cs.n, cs.t).sqrt();
    Ok(TestResult::new(
        TestName::Pet,
        stat,
        NullDist::StdNormal,
        Tail::UpperOneSided,
        alpha,
    ))
}

/// Fits the pooled model once and runs the full battery
/// (LM, CD, LM_adj, LM_bc, LM_RMT, LM_e, PET).
pub fn run_all_tests(data: &PanelData, k: usize, alpha: f64) -> Result<Vec<TestResult>> {
    let cp = center_panel(data);
    let fit = fit_pooled_ols(&cp)?;
    let cs = summarize_residuals(fit.residuals.view())?;
    run_battery(&cp, &cs, k, alpha)
}

/// Battery on an already fitted panel.
pub fn run_battery(cp: &CenteredPanel, cs: &CorrSummary, k: usize, alpha: f64) -> Result<Vec<TestResult>> {
    check_alpha(alpha)?;
    if cs.t <= k + 2 {
        return Err(Error::InvalidArgument(format!(
            "the test battery needs T - k > 2 (T={}, k={k})",
            cs.t
        )));
    }
    Ok(vec![
        lm_test(cs, alpha)?,
        cd_test(cs, alpha)?,
        lm_adj_test(cp, cs, k, alpha)?,
        lm_bc_test(cs, alpha)?,
        lm_rmt_test(cs, k, alpha)?,
        lm_e_test(cs, alpha)?,
        pet_test(cs, alpha)?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::{array, Array2};

    fn identity(n: usize, t: usize) -> CorrSummary {
        CorrSummary::from_correlation(Array2::eye(n).view(), t).unwrap()
    }

    fn constant_offdiag(n: usize, t: usize, rho: f64) -> CorrSummary {
        let corr = Array2::from_shape_fn((n, n), |(i, j)| if i == j { 1.0 } else { rho });
        CorrSummary::from_correlation(corr.view(), t).unwrap()
    }

    #[test]
    fn lm_examples() {
        let r = lm_test(&identity(5, 10), 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject);

        let r = lm_test(&constant_offdiag(2, 10, 0.5), 0.05).unwrap();
        assert!((r.statistic - 2.5).abs() < 1e-12);
        assert_eq!(r.null_dist, NullDist::ChiSquare { df: 1 });

        let r = lm_test(&constant_offdiag(3, 20, 0.1), 0.05).unwrap();
        assert!((r.statistic - 0.6).abs() < 1e-12);
        assert_eq!(r.null_dist, NullDist::ChiSquare { df: 3 });
    }

    #[test]
    fn cd_examples() {
        let r = cd_test(&identity(4, 10), 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);

        let r = cd_test(&constant_offdiag(2, 8, 0.5), 0.05).unwrap();
        assert!((r.statistic - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(r.tail, Tail::TwoSided);

        let corr = array![[1.0, 0.2, -0.2], [0.2, 1.0, 0.0], [-0.2, 0.0, 1.0]];
        let cs = CorrSummary::from_correlation(corr.view(), 50).unwrap();
        let r = cd_test(&cs, 0.05).unwrap();
        assert!(r.statistic.abs() < 1e-15);
    }

    #[test]
    fn lm_p_examples() {
        let s = lm_p_statistic(&identity(10, 20));
        assert!((s - (-90.0 / 360f64.sqrt())).abs() < 1e-12);
        assert!((s + 4.7434).abs() < 1e-4);
        assert!(lm_p_statistic(&constant_offdiag(2, 4, 0.5)).abs() < 1e-15);
        let s = lm_p_statistic(&constant_offdiag(2, 8, 0.5));
        assert!((s - 2.0 / 8f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn lm_bc_examples() {
        let r = lm_bc_test(&identity(10, 20), 0.05).unwrap();
        assert!((r.statistic - (-90.0 / 360f64.sqrt() - 10.0 / 38.0)).abs() < 1e-12);
        assert!((r.statistic + 5.0066).abs() < 1e-4);
        let r = lm_bc_test(&constant_offdiag(2, 4, 0.5), 0.05).unwrap();
        assert!((r.statistic + 1.0 / 3.0).abs() < 1e-12);

        let mut prev = f64::INFINITY;
        for n in 2..30 {
            let s = lm_bc_test(&identity(n, 40), 0.05).unwrap().statistic;
            assert!(s < prev);
            prev = s;
        }
    }

    #[test]
    fn lm_rmt_examples() {
        let r = lm_rmt_test(&identity(50, 100), 2, 0.05).unwrap();
        let sigma = sigma2_rmt(50, 100, 2).sqrt();
        assert!((r.statistic - (50.0 - 74.75) / sigma).abs() < 1e-12);
        assert!(lm_rmt_test(&identity(5, 4), 4, 0.05).is_err());
    }

    #[test]
    fn lm_e_examples() {
        let r = lm_e_test(&identity(50, 100), 0.05).unwrap();
        assert!((r.statistic + 24.75).abs() < 1e-12);
        assert!((r.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pet_identity() {
        let r = pet_test(&identity(100, 100), 0.05).unwrap();
        let expected = (100.0 - mu_pet(100, 100)) / 3528f64.sqrt();
        assert!((r.statistic - expected).abs() < 1e-12);
    }

    #[test]
    fn reject_iff_p_below_alpha() {
        let cs = constant_offdiag(20, 30, 0.3);
        for r in [
            lm_test(&cs, 0.05).unwrap(),
            cd_test(&cs, 0.05).unwrap(),
            lm_bc_test(&cs, 0.05).unwrap(),
            lm_e_test(&cs, 0.05).unwrap(),
            pet_test(&cs, 0.05).unwrap(),
        ] {
            assert_eq!(r.reject, r.p_value < r.alpha);
            assert!(r.reject, "{} should reject at rho=0.3", r.test);
        }
    }

    #[test]
    fn tail_override_recomputes_p_value() {
        let r = lm_e_test(&constant_offdiag(10, 50, 0.2), 0.05).unwrap();
        let two = r.with_tail(Tail::TwoSided);
        assert!((two.p_value - 2.0 * r.p_value.min(1.0 - r.p_value)).abs() < 1e-12);
        let lower = lm_e_test(&identity(50, 100), 0.05).unwrap().with_tail(Tail::TwoSided);
        assert!(lower.reject);
    }

    #[test]
    fn alpha_is_validated() {
        assert!(lm_e_test(&identity(3, 10), 0.0).is_err());
        assert!(lm_e_test(&identity(3, 10), 1.0).is_err());
    }

    #[test]
    fn test_names_round_trip() {
        for t in TestName::BATTERY {
            assert_eq!(t.as_str().parse::<TestName>().unwrap(), t);
        }
        assert_eq!("lm_p".parse::<TestName>().unwrap(), TestName::LmP);
    }
}
