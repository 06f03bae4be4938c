//! Simulation grid configs.
//!
//! ```toml
//! replications = 2000
//! alpha = 0.05
//!
//! [grid]
//! n = [50, 100]
//! T = [100]
//! k = [2]
//! error_dist = ["normal"]
//! slope_mode = ["fixed-effects"]
//! alternative = ["null", "dense:2", "sparse"]
//! ```
//!
//! Optional scalars: `burn_in`, `ar_coef` and `alt_noise` (`"unit"` or
//! `"heteroskedastic"`).
//!
//! Cells are the cross product of the listed axes. Omitted optional axes take
//! a single default value. Cell order nests `error_dist`, `slope_mode`,
//! `alternative`, `k`, `T`, `n` from outermost to innermost.

use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use serde::Deserialize;
use toml::Spanned;

use crate::error::{Error, Result};
use crate::mc::dgp::{DEFAULT_AR_COEF, DEFAULT_BURN_IN};
use crate::mc::{AltNoise, Alternative, DgpConfig, ErrorDist, SlopeMode};

pub const DEFAULT_ALPHA: f64 = 0.05;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    replications: Spanned<i64>,
    alpha: Option<Spanned<f64>>,
    grid: Spanned<RawGrid>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: Spanned<Vec<Spanned<i64>>>,
    #[serde(rename = "T")]
    t: Spanned<Vec<Spanned<i64>>>,
    k: Spanned<Vec<Spanned<i64>>>,
    error_dist: Option<Spanned<Vec<Spanned<String>>>>,
    slope_mode: Option<Spanned<Vec<Spanned<String>>>>,
    alternative: Option<Spanned<Vec<Spanned<String>>>>,
    burn_in: Option<Spanned<i64>>,
    ar_coef: Option<Spanned<f64>>,
    alt_noise: Option<Spanned<String>>,
}

/// A validated experiment grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentGrid {
    pub replications: usize,
    pub alpha: f64,
    pub cells: Vec<DgpConfig>,
}

impl ExperimentGrid {
    pub fn is_null_only(&self) -> bool {
        self.cells.iter().all(|c| c.alternative == Alternative::Null)
    }
}

struct Locator<'a> {
    src: &'a str,
}

impl Locator<'_> {
    fn line(&self, span: Range<usize>) -> usize {
        let end = span.start.min(self.src.len());
        self.src[..end].bytes().filter(|&b| b == b'\n').count() + 1
    }

    fn err(&self, span: Range<usize>, field: &str, message: impl Into<String>) -> Error {
        Error::Config {
            line: Some(self.line(span)),
            field: Some(field.to_string()),
            message: message.into(),
        }
    }

    fn counts(&self, field: &str, axis: &Spanned<Vec<Spanned<i64>>>, min: i64) -> Result<Vec<usize>> {
        if axis.get_ref().is_empty() {
            return Err(self.err(axis.span(), field, "axis must list at least one value"));
        }
        axis.get_ref()
            .iter()
            .map(|v| {
                if *v.get_ref() < min {
                    Err(self.err(v.span(), field, format!("must be >= {min}, got {}", v.get_ref())))
                } else {
                    Ok(*v.get_ref() as usize)
                }
            })
            .collect()
    }

    fn labels<T: FromStr<Err = Error>>(
        &self,
        field: &str,
        axis: Option<&Spanned<Vec<Spanned<String>>>>,
        default: T,
    ) -> Result<Vec<T>> {
        let Some(axis) = axis else {
            return Ok(vec![default]);
        };
        if axis.get_ref().is_empty() {
            return Err(self.err(axis.span(), field, "axis must list at least one value"));
        }
        axis.get_ref()
            .iter()
            .map(|v| v.get_ref().parse::<T>().map_err(|e| self.err(v.span(), field, e.to_string())))
            .collect()
    }
}

pub fn parse_grid(src: &str) -> Result<ExperimentGrid> {
    let loc = Locator { src };
    let raw: RawConfig = toml::from_str(src).map_err(|e| Error::Config {
        line: e.span().map(|s| loc.line(s)),
        field: None,
        message: e.message().to_string(),
    })?;

    let reps = &raw.replications;
    if *reps.get_ref() < 1 {
        return Err(loc.err(reps.span(), "replications", format!("must be >= 1, got {}", reps.get_ref())));
    }
    let alpha = match &raw.alpha {
        Some(a) => {
            let v = *a.get_ref();
            if !(v > 0.0 && v < 1.0) {
                return Err(loc.err(a.span(), "alpha", format!("must lie in (0, 1), got {v}")));
            }
            v
        }
        None => DEFAULT_ALPHA,
    };

    let g = raw.grid.get_ref();
    let ns = loc.counts("grid.n", &g.n, 2)?;
    let ts = loc.counts("grid.T", &g.t, 2)?;
    let ks = loc.counts("grid.k", &g.k, 1)?;
    let dists = loc.labels("grid.error_dist", g.error_dist.as_ref(), ErrorDist::Normal)?;
    let slopes = loc.labels("grid.slope_mode", g.slope_mode.as_ref(), SlopeMode::FixedEffects)?;
    let alts = loc.labels("grid.alternative", g.alternative.as_ref(), Alternative::Null)?;
    let burn_in = match &g.burn_in {
        Some(b) if *b.get_ref() < 0 => return Err(loc.err(b.span(), "grid.burn_in", "must be >= 0")),
        Some(b) => *b.get_ref() as usize,
        None => DEFAULT_BURN_IN,
    };
    let ar_coef = g.ar_coef.as_ref().map_or(DEFAULT_AR_COEF, |a| *a.get_ref());
    let alt_noise = match &g.alt_noise {
        Some(a) => a
            .get_ref()
            .parse::<AltNoise>()
            .map_err(|e| loc.err(a.span(), "grid.alt_noise", e.to_string()))?,
        None => AltNoise::default(),
    };

    let mut cells = Vec::new();
    for &dist in &dists {
        for &slope in &slopes {
            for &alt in &alts {
                for &k in &ks {
                    for &t in &ts {
                        for &n in &ns {
                            let mut cfg = DgpConfig::new(n, t, k)
                                .with_errors(dist)
                                .with_slopes(slope)
                                .with_alternative(alt);
                            cfg.burn_in = burn_in;
                            cfg.ar_coef = ar_coef;
                            cfg.alt_noise = alt_noise;
                            cfg.validate().map_err(|e| loc.err(raw.grid.span(), "grid", format!("{cfg:?}: {e}")))?;
                            cells.push(cfg);
                        }
                    }
                }
            }
        }
    }

    Ok(ExperimentGrid {
        replications: *reps.get_ref() as usize,
        alpha,
        cells,
    })
}

pub fn read_grid(path: impl AsRef<Path>) -> Result<ExperimentGrid> {
    parse_grid(&std::fs::read_to_string(path)?)
}
