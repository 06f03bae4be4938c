//! Command runners behind the `xsdep` binary.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::config::{read_grid, ExperimentGrid};
use super::panel_csv::read_panel_csv;
use super::report::{write_mc_records, write_probe_record, write_test_records, ReportWriter};
use crate::cd_tests::run_all_tests;
use crate::error::{Error, Result};
use crate::mc::{run_experiment, trace_gap_probe};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Test,
    SimulateSize,
    SimulatePower,
    TraceProbe,
}

impl Command {
    pub fn as_str(self) -> &'static str {
        match self {
            Command::Test => "test",
            Command::SimulateSize => "simulate-size",
            Command::SimulatePower => "simulate-power",
            Command::TraceProbe => "trace-probe",
        }
    }
}

/// How the `k` entering LM_adj and LM_RMT is counted from a CSV with
/// `k_x` regressor columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KConvention {
    /// `k = k_x + 1`.
    #[default]
    IncludeIntercept,
    /// `k = k_x`.
    RegressorsOnly,
}

impl KConvention {
    pub fn as_str(self) -> &'static str {
        match self {
            KConvention::IncludeIntercept => "include-intercept",
            KConvention::RegressorsOnly => "regressors-only",
        }
    }

    pub fn k(self, kx: usize) -> usize {
        match self {
            KConvention::IncludeIntercept => kx + 1,
            KConvention::RegressorsOnly => kx,
        }
    }
}

impl fmt::Display for KConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "include-intercept" => Ok(KConvention::IncludeIntercept),
            "regressors-only" => Ok(KConvention::RegressorsOnly),
            other => Err(Error::InvalidArgument(format!(
                "unknown k convention '{other}' (expected include-intercept or regressors-only)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Input(PathBuf),
    Grid(ExperimentGrid),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub command: Command,
    pub source: Source,
    pub alpha: f64,
    pub seed: u64,
    pub k_convention: KConvention,
    pub output: PathBuf,
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

impl RunManifest {
    pub fn test(input: impl Into<PathBuf>, alpha: f64, k_convention: KConvention, output: impl Into<PathBuf>) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(Self {
            command: Command::Test,
            source: Source::Input(input.into()),
            alpha,
            seed: 0,
            k_convention,
            output: output.into(),
        })
    }

    /// Size or power run depending on whether the grid has any alternative.
    pub fn simulate(grid: ExperimentGrid, seed: u64, output: impl Into<PathBuf>) -> Result<Self> {
        check_alpha(grid.alpha)?;
        let command = if grid.is_null_only() {
            Command::SimulateSize
        } else {
            Command::SimulatePower
        };
        Ok(Self {
            command,
            alpha: grid.alpha,
            source: Source::Grid(grid),
            seed,
            k_convention: KConvention::IncludeIntercept,
            output: output.into(),
        })
    }

    pub fn trace_probe(grid: ExperimentGrid, seed: u64, output: impl Into<PathBuf>) -> Result<Self> {
        let mut m = Self::simulate(grid, seed, output)?;
        if m.command != Command::SimulateSize {
            return Err(Error::InvalidArgument("trace-probe grids must use the null alternative only".into()));
        }
        m.command = Command::TraceProbe;
        Ok(m)
    }

    pub fn simulate_from_file(config: impl AsRef<Path>, seed: u64, output: impl Into<PathBuf>) -> Result<Self> {
        Self::simulate(read_grid(config)?, seed, output)
    }

    pub fn trace_probe_from_file(config: impl AsRef<Path>, seed: u64, output: impl Into<PathBuf>) -> Result<Self> {
        Self::trace_probe(read_grid(config)?, seed, output)
    }

    fn grid(&self) -> Result<&ExperimentGrid> {
        match &self.source {
            Source::Grid(g) => Ok(g),
            Source::Input(_) => Err(Error::InvalidArgument(format!("{} needs a grid config", self.command.as_str()))),
        }
    }
}

pub fn render_test(m: &RunManifest) -> Result<String> {
    let Source::Input(path) = &m.source else {
        return Err(Error::InvalidArgument("test needs an input CSV".into()));
    };
    let data = read_panel_csv(path)?;
    let k = m.k_convention.k(data.kx());
    let results = run_all_tests(&data, k, m.alpha)?;

    let mut w = ReportWriter::new("cross-sectional dependence test report");
    w.str("command", m.command.as_str())
        .str("input", &path.display().to_string())
        .int("n", data.n() as i128)
        .int("T", data.t() as i128)
        .int("k_x", data.kx() as i128)
        .int("k", k as i128)
        .str("k_convention", m.k_convention.as_str())
        .float("alpha", m.alpha);
    write_test_records(&mut w, &results);
    Ok(w.finish())
}

pub fn render_simulate(m: &RunManifest) -> Result<String> {
    let grid = m.grid()?;
    let mut w = ReportWriter::new("Monte Carlo rejection frequencies");
    w.str("command", m.command.as_str())
        .int("seed", m.seed)
        .int("replications", grid.replications as i128)
        .float("alpha", grid.alpha)
        .int("cells", grid.cells.len() as i128);
    for (i, cell) in grid.cells.iter().enumerate() {
        let report = run_experiment(cell, grid.replications, grid.alpha, m.seed)?;
        write_mc_records(&mut w, i, &report);
    }
    Ok(w.finish())
}

pub fn render_trace_probe(m: &RunManifest) -> Result<String> {
    let grid = m.grid()?;
    let mut w = ReportWriter::new("trace gap probe");
    w.str("command", m.command.as_str())
        .int("seed", m.seed)
        .int("replications", grid.replications as i128)
        .int("cells", grid.cells.len() as i128);
    for (i, cell) in grid.cells.iter().enumerate() {
        let report = trace_gap_probe(cell, grid.replications, m.seed)?;
        write_probe_record(&mut w, i, &report);
    }
    Ok(w.finish())
}

pub fn render(m: &RunManifest) -> Result<String> {
    match m.command {
        Command::Test => render_test(m),
        Command::SimulateSize | Command::SimulatePower => render_simulate(m),
        Command::TraceProbe => render_trace_probe(m),
    }
}

/// Renders the report in memory and writes it in one go, so a failed run
/// leaves no partial file behind.
pub fn run(m: &RunManifest) -> Result<()> {
    let text = render(m)?;
    std::fs::write(&m.output, text)?;
    Ok(())
}
