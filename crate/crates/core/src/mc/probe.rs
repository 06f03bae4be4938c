//! Numerical check that residual-based trace powers track their error-based
//! counterparts: |tr(R̂²) - tr(R²)| and |tr(R̂⁴) - tr(R⁴)| should shrink as
//! n and T grow together.

use ndarray::{Array2, ArrayView2};
use rayon::prelude::*;

use super::dgp::{gen_panel_with_truth, Alternative, DgpConfig, SimulatedPanel};
use super::rng::ReplicationRng;
use crate::corr::summarize_residuals;
use crate::error::{Error, Result};
use crate::panel::{center_panel, fit_pooled_ols};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceGap {
    pub gap2: f64,
    pub gap4: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceProbeReport {
    pub config: DgpConfig,
    pub replications: usize,
    pub seed: u64,
    pub excluded: usize,
    /// Gaps of the usable replications, in replication order.
    pub gaps: Vec<TraceGap>,
}

impl TraceProbeReport {
    pub fn median_gap2(&self) -> f64 {
        median(self.gaps.iter().map(|g| g.gap2).collect())
    }

    pub fn median_gap4(&self) -> f64 {
        median(self.gaps.iter().map(|g| g.gap4).collect())
    }
}

pub fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

fn demean_rows(a: ArrayView2<f64>) -> Array2<f64> {
    let mut out = a.to_owned();
    for mut row in out.rows_mut() {
        let mean = row.sum() / row.len() as f64;
        row.mapv_inplace(|v| v - mean);
    }
    out
}

/// Trace gaps between the given residuals and the centered true errors.
pub fn trace_gaps(sim: &SimulatedPanel, residuals: ArrayView2<f64>) -> Result<TraceGap> {
    let hat = summarize_residuals(residuals)?;
    let truth = summarize_residuals(demean_rows(sim.errors.view()).view())?;
    Ok(TraceGap {
        gap2: (hat.trace_r2 - truth.trace_r2).abs(),
        gap4: (hat.trace_r4 - truth.trace_r4).abs(),
    })
}

/// Gaps for one replication using the pooled OLS residuals.
pub fn probe_replication(config: &DgpConfig, seed: u64, replication: u64) -> Result<TraceGap> {
    let sim = gen_panel_with_truth(config, &ReplicationRng::new(seed, replication))?;
    let fit = fit_pooled_ols(&center_panel(&sim.data))?;
    trace_gaps(&sim, fit.residuals.view())
}

pub fn trace_gap_probe(config: &DgpConfig, replications: usize, seed: u64) -> Result<TraceProbeReport> {
    config.validate()?;
    if config.alternative != Alternative::Null {
        return Err(Error::InvalidArgument(
            "the trace probe is defined under the null only".into(),
        ));
    }
    if replications == 0 {
        return Err(Error::InvalidArgument("replications must be >= 1".into()));
    }
    let results: Vec<Result<TraceGap>> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| probe_replication(config, seed, rep))
        .collect();
    let excluded = results.iter().filter(|r| r.is_err()).count();
    let gaps = results.into_iter().filter_map(|r| r.ok()).collect();
    Ok(TraceProbeReport {
        config: config.clone(),
        replications,
        seed,
        excluded,
        gaps,
    })
}
