//! Monte Carlo engine: simulation designs, size/power experiments and the
//! trace-gap probe.

pub mod dgp;
pub mod experiment;
pub mod probe;
pub mod rng;

pub use dgp::{
    gen_errors_null, gen_errors_unit, gen_loadings, gen_panel, gen_panel_with_truth, gen_regressors, AltNoise, Alternative,
    DgpConfig, ErrorDist, SimulatedPanel, SlopeMode,
};
pub use experiment::{run_experiment, run_replication, simulate_statistics, McReport};
pub use probe::{trace_gap_probe, TraceGap, TraceProbeReport};
pub use rng::{ReplicationRng, StreamRole};
