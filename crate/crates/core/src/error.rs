use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid panel: {0}")]
    InvalidPanel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The pooled Gram matrix of the centered regressors is numerically singular.
    #[error("pooled design is singular (eigenvalue ratio {ratio:.3e} below 1e-12)")]
    SingularDesign { ratio: f64 },

    /// A unit's residual row has (numerically) zero variance, so its
    /// correlations are undefined.
    #[error("residual series of unit {unit} is numerically zero")]
    DegenerateUnit { unit: usize },

    #[error("per-unit design of unit {unit} is singular")]
    SingularUnitDesign { unit: usize },

    #[error("LM_RMT variance is nonpositive ({value:.6e}) at n={n}, T={t}, k={k}")]
    NonpositiveVariance { n: usize, t: usize, k: usize, value: f64 },

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse { row: usize, column: String, message: String },

    #[error("unbalanced panel: {0}")]
    UnbalancedPanel(String),

    #[error("duplicate row for unit '{unit}', time {time}")]
    DuplicateRow { unit: String, time: i64 },

    #[error("config error{}: {message}", location(.line, .field))]
    Config {
        line: Option<usize>,
        field: Option<String>,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn location(line: &Option<usize>, field: &Option<String>) -> String {
    match (line, field) {
        (Some(l), Some(f)) => format!(" at line {l} (field '{f}')"),
        (Some(l), None) => format!(" at line {l}"),
        (None, Some(f)) => format!(" (field '{f}')"),
        (None, None) => String::new(),
    }
}
