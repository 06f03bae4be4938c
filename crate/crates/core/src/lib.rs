//! Tests for cross-sectional independence of the errors in large
//! fixed-effects panels.
//!
//! The pipeline is: [`panel`] (within transform and pooled OLS) →
//! [`corr`] (residual correlation matrix and trace powers) → [`cd_tests`]
//! (LM, CD, LM_adj, LM_bc, LM_RMT, LM_e and PET). [`mc`] simulates panels and
//! measures size and power; [`io`] reads panel CSVs, experiment configs and
//! writes reports.

pub mod cd_tests;
pub mod corr;
pub mod error;
pub mod io;
pub mod linalg;
pub mod mc;
pub mod panel;
pub mod special;

pub use cd_tests::{run_all_tests, TestName, TestResult};
pub use corr::CorrSummary;
pub use error::{Error, Result};
pub use panel::{CenteredPanel, PanelData, RegressionFit};
