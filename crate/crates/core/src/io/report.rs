//! Structured-text reports.
//!
//! The layout is a key/value header followed by `[[table]]` records, which
//! happens to be valid TOML, so any TOML reader can load it. Floats are
//! written with 17 significant digits so reruns can be compared byte for byte.

use std::fmt::Write as _;

use super::panel_csv::fmt_num;
use crate::cd_tests::TestResult;
use crate::mc::{McReport, TraceProbeReport};

#[derive(Debug, Default, Clone)]
pub struct ReportWriter {
    buf: String,
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// TOML has `nan`/`inf` literals but not Rust's spelling of them.
fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        fmt_num(v)
    }
}

impl ReportWriter {
    pub fn new(title: &str) -> Self {
        Self {
            buf: format!("# {title}\n"),
        }
    }

    pub fn str(&mut self, key: &str, value: &str) -> &mut Self {
        let _ = writeln!(self.buf, "{key} = {}", quote(value));
        self
    }

    pub fn int(&mut self, key: &str, value: impl Into<i128>) -> &mut Self {
        let _ = writeln!(self.buf, "{key} = {}", value.into());
        self
    }

    pub fn float(&mut self, key: &str, value: f64) -> &mut Self {
        let _ = writeln!(self.buf, "{key} = {}", num(value));
        self
    }

    pub fn bool(&mut self, key: &str, value: bool) -> &mut Self {
        let _ = writeln!(self.buf, "{key} = {value}");
        self
    }

    pub fn floats(&mut self, key: &str, values: &[f64]) -> &mut Self {
        let items: Vec<String> = values.iter().map(|v| num(*v)).collect();
        let _ = writeln!(self.buf, "{key} = [{}]", items.join(", "));
        self
    }

    pub fn record(&mut self, table: &str) -> &mut Self {
        let _ = write!(self.buf, "\n[[{table}]]\n");
        self
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

/// One `[[test]]` record per battery result.
pub fn write_test_records(w: &mut ReportWriter, results: &[TestResult]) {
    for r in results {
        w.record("test")
            .str("name", r.test.as_str())
            .float("statistic", r.statistic)
            .float("p_value", r.p_value)
            .str("null_dist", &r.null_dist.to_string())
            .str("tail", &r.tail.to_string())
            .bool("reject", r.reject);
    }
}

/// One `[[result]]` record per (cell, test).
pub fn write_mc_records(w: &mut ReportWriter, cell: usize, report: &McReport) {
    let cfg = &report.config;
    for (test, &rate) in &report.rejection_rate {
        w.record("result")
            .int("cell", cell as i128)
            .int("n", cfg.n as i128)
            .int("T", cfg.t as i128)
            .int("k", cfg.k as i128)
            .str("error_dist", cfg.error_dist.as_str())
            .str("slope_mode", cfg.slope_mode.as_str())
            .str("alternative", &cfg.alternative.to_string())
            .str("alt_noise", cfg.alt_noise.as_str())
            .str("test", test.as_str())
            .float("rejection_rate", rate)
            .float("mc_se", report.mc_se[test])
            .int("used", report.used() as i128)
            .int("excluded", report.excluded as i128);
    }
}

pub fn write_probe_record(w: &mut ReportWriter, cell: usize, report: &TraceProbeReport) {
    let cfg = &report.config;
    let gap2: Vec<f64> = report.gaps.iter().map(|g| g.gap2).collect();
    let gap4: Vec<f64> = report.gaps.iter().map(|g| g.gap4).collect();
    w.record("probe")
        .int("cell", cell as i128)
        .int("n", cfg.n as i128)
        .int("T", cfg.t as i128)
        .int("k", cfg.k as i128)
        .str("error_dist", cfg.error_dist.as_str())
        .str("slope_mode", cfg.slope_mode.as_str())
        .int("used", report.gaps.len() as i128)
        .int("excluded", report.excluded as i128)
        .float("median_gap2", report.median_gap2())
        .float("median_gap4", report.median_gap4())
        .floats("gap2", &gap2)
        .floats("gap4", &gap4);
}
