//! Panel CSV ingestion, grid configs, reports and the command runners.

pub mod cli;
pub mod config;
pub mod panel_csv;
pub mod report;
