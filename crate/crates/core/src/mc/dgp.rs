//! Data generating processes for the size and power experiments.
//!
//! ```text
//! y_it = a + Σ_{l=2..k} x_lit β_l + μ_i + ν_it
//! x_lit = ρ x_li,t-1 + σ_li u_lit,   σ_li² = τ_li² / (1 - ρ²),  τ_li² ~ χ²(6)/6
//! ν_it = σ_i ε_it                    (null)
//! ν_it = λ_i f_t + ε_it              (factor alternatives, AltNoise::Unit)
//! ν_it = λ_i f_t + σ_i ε_it          (factor alternatives, AltNoise::Heteroskedastic)
//! ```
//!
//! with `a = 1`, `β_l = l` (or `β_li ~ N(1, 0.04)` for heterogeneous slopes),
//! `μ_i ~ N(1, 1)` and `σ_i² ~ χ²(2)/2`. Within a replication the draws per
//! stream are, in order: τ's then AR paths (burn-in first); σ_i's then ε's;
//! loadings then factors; μ_i; β_li.

use std::fmt;
use std::str::FromStr;

use ndarray::{Array2, Array3};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, Normal, StandardNormal, StudentT, Uniform};

use super::rng::{ReplicationRng, StreamRole};
use crate::error::{Error, Result};
use crate::panel::PanelData;

pub const INTERCEPT: f64 = 1.0;
pub const DEFAULT_BURN_IN: usize = 50;
pub const DEFAULT_AR_COEF: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ErrorDist {
    /// N(0, 1).
    Normal,
    /// t₇ / √(7/5).
    StudentT7,
    /// (χ²(5) - 5) / √10.
    ChiSq5,
}

impl ErrorDist {
    pub const ALL: [ErrorDist; 3] = [ErrorDist::Normal, ErrorDist::StudentT7, ErrorDist::ChiSq5];

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorDist::Normal => "normal",
            ErrorDist::StudentT7 => "student-t7",
            ErrorDist::ChiSq5 => "chi-square5",
        }
    }
}

impl fmt::Display for ErrorDist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorDist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "normal" => Ok(ErrorDist::Normal),
            "student-t7" | "student-t" | "t7" => Ok(ErrorDist::StudentT7),
            "chi-square5" | "chi-square" | "chisq5" => Ok(ErrorDist::ChiSq5),
            other => Err(Error::InvalidArgument(format!("unknown error distribution '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SlopeMode {
    FixedEffects,
    Heterogeneous,
}

impl SlopeMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SlopeMode::FixedEffects => "fixed-effects",
            SlopeMode::Heterogeneous => "heterogeneous",
        }
    }
}

impl fmt::Display for SlopeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SlopeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "fixed-effects" | "fixed" => Ok(SlopeMode::FixedEffects),
            "heterogeneous" => Ok(SlopeMode::Heterogeneous),
            other => Err(Error::InvalidArgument(format!("unknown slope mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alternative {
    Null,
    /// Every unit loads on the factor with λ_i ~ U[-b, b], b = √(3h/n).
    Dense(f64),
    /// ⌊n^0.3⌋ units load with λ_i ~ U(0.5, 1.5).
    Sparse,
    /// ⌊n^0.5⌋ units load with λ_i ~ U(0.5, 1.5).
    LessSparse,
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alternative::Null => f.write_str("null"),
            Alternative::Dense(h) => write!(f, "dense:{h}"),
            Alternative::Sparse => f.write_str("sparse"),
            Alternative::LessSparse => f.write_str("less-sparse"),
        }
    }
}

impl FromStr for Alternative {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "null" => Ok(Alternative::Null),
            "sparse" => Ok(Alternative::Sparse),
            "less-sparse" | "lesssparse" => Ok(Alternative::LessSparse),
            _ => {
                let h = lower
                    .strip_prefix("dense:")
                    .and_then(|h| h.parse::<f64>().ok())
                    .ok_or_else(|| Error::InvalidArgument(format!("unknown alternative '{s}'")))?;
                if h > 0.0 && h.is_finite() {
                    Ok(Alternative::Dense(h))
                } else {
                    Err(Error::InvalidArgument(format!("dense strength must be positive, got {h}")))
                }
            }
        }
    }
}

/// Noise `ε_it` in `ν_it = λ_i f_t + ε_it` under alternatives. The null
/// always uses `σ_i ε_it`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AltNoise {
    /// Unit-variance `ε_it`.
    #[default]
    Unit,
    /// `σ_i ε_it` with `σ_i² ~ χ²(2)/2`, as under the null.
    Heteroskedastic,
}

impl AltNoise {
    pub fn as_str(self) -> &'static str {
        match self {
            AltNoise::Unit => "unit",
            AltNoise::Heteroskedastic => "heteroskedastic",
        }
    }
}

impl fmt::Display for AltNoise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AltNoise {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "unit" => Ok(AltNoise::Unit),
            "heteroskedastic" => Ok(AltNoise::Heteroskedastic),
            other => Err(Error::InvalidArgument(format!("unknown alternative noise '{other}'"))),
        }
    }
}

/// One simulation design.
#[derive(Debug, Clone, PartialEq)]
pub struct DgpConfig {
    pub n: usize,
    pub t: usize,
    /// Number of regressors including the intercept.
    pub k: usize,
    pub error_dist: ErrorDist,
    pub slope_mode: SlopeMode,
    pub alternative: Alternative,
    pub burn_in: usize,
    pub ar_coef: f64,
    /// Idiosyncratic noise added to the factor under alternatives.
    pub alt_noise: AltNoise,
}

impl DgpConfig {
    pub fn new(n: usize, t: usize, k: usize) -> Self {
        Self {
            n,
            t,
            k,
            error_dist: ErrorDist::Normal,
            slope_mode: SlopeMode::FixedEffects,
            alternative: Alternative::Null,
            burn_in: DEFAULT_BURN_IN,
            ar_coef: DEFAULT_AR_COEF,
            alt_noise: AltNoise::default(),
        }
    }

    pub fn with_errors(mut self, dist: ErrorDist) -> Self {
        self.error_dist = dist;
        self
    }

    pub fn with_alternative(mut self, alt: Alternative) -> Self {
        self.alternative = alt;
        self
    }

    pub fn with_slopes(mut self, mode: SlopeMode) -> Self {
        self.slope_mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidArgument(format!("n must be >= 2, got {}", self.n)));
        }
        if self.k < 1 {
            return Err(Error::InvalidArgument("k counts the intercept and must be >= 1".into()));
        }
        if self.t < self.k + 1 {
            return Err(Error::InvalidArgument(format!(
                "T must be >= k + 1 (T={}, k={})",
                self.t, self.k
            )));
        }
        if let Alternative::Dense(h) = self.alternative {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::InvalidArgument(format!("dense strength must be positive, got {h}")));
            }
        }
        if !(self.ar_coef.abs() < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "AR coefficient must lie in (-1, 1), got {}",
                self.ar_coef
            )));
        }
        Ok(())
    }

    /// Number of non-intercept regressors.
    pub fn kx(&self) -> usize {
        self.k - 1
    }
}

/// AR(1) path started at zero `burn_in` steps before the kept window.
pub fn ar1_path<R: Rng + ?Sized>(rng: &mut R, sigma: f64, t: usize, burn_in: usize, ar_coef: f64) -> Vec<f64> {
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(t);
    for step in 0..(burn_in + t) {
        let u: f64 = rng.sample(StandardNormal);
        prev = ar_coef * prev + sigma * u;
        if step >= burn_in {
            out.push(prev);
        }
    }
    out
}

/// Stationary AR(1) regressors, returned as n×T×(k-1).
pub fn gen_regressors<R: Rng + ?Sized>(
    rng: &mut R,
    n: usize,
    t: usize,
    k: usize,
    burn_in: usize,
    ar_coef: f64,
) -> Array3<f64> {
    let kx = k.saturating_sub(1);
    let chi6 = ChiSquared::new(6.0).expect("valid df");
    let mut tau2 = vec![0.0; kx * n];
    for v in tau2.iter_mut() {
        *v = chi6.sample(rng) / 6.0;
    }
    let mut x = Array3::zeros((n, t, kx));
    for l in 0..kx {
        for i in 0..n {
            let sigma = (tau2[l * n + i] / (1.0 - ar_coef * ar_coef)).sqrt();
            let path = ar1_path(rng, sigma, t, burn_in, ar_coef);
            for (s, v) in path.into_iter().enumerate() {
                x[[i, s, l]] = v;
            }
        }
    }
    x
}

/// One standardized (mean 0, variance 1) innovation.
pub fn draw_standardized<R: Rng + ?Sized>(rng: &mut R, dist: ErrorDist) -> f64 {
    match dist {
        ErrorDist::Normal => rng.sample(StandardNormal),
        ErrorDist::StudentT7 => {
            let t7 = StudentT::new(7.0).expect("valid df");
            t7.sample(rng) / (7.0f64 / 5.0).sqrt()
        }
        ErrorDist::ChiSq5 => {
            let c5 = ChiSquared::new(5.0).expect("valid df");
            (c5.sample(rng) - 5.0) / 10f64.sqrt()
        }
    }
}

/// Heteroskedastic null errors `σ_i ε_it`, n×T.
pub fn gen_errors_null<R: Rng + ?Sized>(rng: &mut R, n: usize, t: usize, dist: ErrorDist) -> Array2<f64> {
    let chi2 = ChiSquared::<f64>::new(2.0).expect("valid df");
    let sigma: Vec<f64> = (0..n).map(|_| (chi2.sample(rng) / 2.0).sqrt()).collect();
    scaled_errors(rng, &sigma, t, dist)
}

/// Unit-variance errors `ε_it`, n×T.
pub fn gen_errors_unit<R: Rng + ?Sized>(rng: &mut R, n: usize, t: usize, dist: ErrorDist) -> Array2<f64> {
    scaled_errors(rng, &vec![1.0; n], t, dist)
}

fn scaled_errors<R: Rng + ?Sized>(rng: &mut R, sigma: &[f64], t: usize, dist: ErrorDist) -> Array2<f64> {
    let mut e = Array2::zeros((sigma.len(), t));
    for (i, &sd) in sigma.iter().enumerate() {
        for s in 0..t {
            e[[i, s]] = sd * draw_standardized(rng, dist);
        }
    }
    e
}

/// Number of loaded units for the sparse designs: ⌊n^p⌋.
pub fn loaded_units(n: usize, power: f64) -> usize {
    // guard against n^0.5 landing a hair below an exact integer
    ((n as f64).powf(power) + 1e-9).floor() as usize
}

/// Factor loadings for an alternative. The null has all-zero loadings.
pub fn gen_loadings<R: Rng + ?Sized>(rng: &mut R, n: usize, alternative: Alternative) -> Vec<f64> {
    let sparse = |rng: &mut R, count: usize| {
        let u = Uniform::new(0.5, 1.5).expect("valid range");
        (0..n)
            .map(|i| if i < count { u.sample(rng) } else { 0.0 })
            .collect::<Vec<f64>>()
    };
    match alternative {
        Alternative::Null => vec![0.0; n],
        Alternative::Dense(h) => {
            let b = (3.0 * h / n as f64).sqrt();
            let u = Uniform::new_inclusive(-b, b).expect("valid range");
            (0..n).map(|_| u.sample(rng)).collect()
        }
        Alternative::Sparse => sparse(rng, loaded_units(n, 0.3)),
        Alternative::LessSparse => sparse(rng, loaded_units(n, 0.5)),
    }
}

/// A generated panel plus the ground truth behind it.
#[derive(Debug, Clone)]
pub struct SimulatedPanel {
    pub data: PanelData,
    /// Model errors ν_it (n×T), factor component included.
    pub errors: Array2<f64>,
    /// Per-unit slopes (n×k_x); identical rows under fixed effects.
    pub slopes: Array2<f64>,
    pub loadings: Vec<f64>,
}

/// Draws one panel and keeps the truth used to build it.
pub fn gen_panel_with_truth(config: &DgpConfig, rng: &ReplicationRng) -> Result<SimulatedPanel> {
    config.validate()?;
    let DgpConfig { n, t, k, .. } = *config;
    let kx = config.kx();

    let x = gen_regressors(
        &mut rng.stream(StreamRole::Regressors),
        n,
        t,
        k,
        config.burn_in,
        config.ar_coef,
    );

    let mut erng = rng.stream(StreamRole::Errors);
    let mut errors = match (config.alternative, config.alt_noise) {
        (Alternative::Null, _) | (_, AltNoise::Heteroskedastic) => gen_errors_null(&mut erng, n, t, config.error_dist),
        (_, AltNoise::Unit) => gen_errors_unit(&mut erng, n, t, config.error_dist),
    };

    let loadings = if config.alternative == Alternative::Null {
        vec![0.0; n]
    } else {
        let mut frng = rng.stream(StreamRole::Factor);
        let loadings = gen_loadings(&mut frng, n, config.alternative);
        let factor: Vec<f64> = (0..t).map(|_| frng.sample(StandardNormal)).collect();
        for i in 0..n {
            for s in 0..t {
                errors[[i, s]] += loadings[i] * factor[s];
            }
        }
        loadings
    };

    let effect = Normal::new(1.0, 1.0).expect("valid normal");
    let mut mrng = rng.stream(StreamRole::FixedEffects);
    let mu: Vec<f64> = (0..n).map(|_| effect.sample(&mut mrng)).collect();

    let mut slopes = Array2::zeros((n, kx));
    match config.slope_mode {
        SlopeMode::FixedEffects => {
            for l in 0..kx {
                // regressor l carries β = l + 2 (regressors are numbered from 2)
                slopes.column_mut(l).fill((l + 2) as f64);
            }
        }
        SlopeMode::Heterogeneous => {
            let dist = Normal::new(1.0, 0.2).expect("valid normal");
            let mut srng = rng.stream(StreamRole::Slopes);
            for l in 0..kx {
                for i in 0..n {
                    slopes[[i, l]] = dist.sample(&mut srng);
                }
            }
        }
    }

    let mut y = Array2::zeros((n, t));
    for i in 0..n {
        for s in 0..t {
            let mut v = INTERCEPT + mu[i] + errors[[i, s]];
            for l in 0..kx {
                v += x[[i, s, l]] * slopes[[i, l]];
            }
            y[[i, s]] = v;
        }
    }

    Ok(SimulatedPanel {
        data: PanelData::new(y, x)?,
        errors,
        slopes,
        loadings,
    })
}

/// Draws one panel.
pub fn gen_panel(config: &DgpConfig, rng: &ReplicationRng) -> Result<PanelData> {
    gen_panel_with_truth(config, rng).map(|sim| sim.data)
}
