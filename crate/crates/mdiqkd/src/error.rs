//! Error type shared across the crate.

/// Crate-wide result alias.
pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A scalar argument fell outside its mathematical domain.
    #[error("{name} = {value} is outside [{min}, {max}]")]
    Domain {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    /// A probability-table entry is not a probability.
    #[error("table entry p{row}{col} = {value} is outside [0, 1]")]
    InvalidTable { row: usize, col: usize, value: f64 },

    /// The table cannot support the requested computation.
    #[error("degenerate probability table: {reason}")]
    DegenerateTable { reason: &'static str },

    /// A coefficient product fell below the floor that keeps the
    /// objectives bounded.
    #[error(
        "coefficient products below floor {floor:e}: c0*c0' = {c0_product:e}, c1*c1' = {c1_product:e}"
    )]
    DegenerateCoefficients {
        c0_product: f64,
        c1_product: f64,
        floor: f64,
    },

    /// Optimizer settings failed validation.
    #[error("invalid optimizer settings: {reason}")]
    InvalidSettings { reason: &'static str },

    /// The constrained search found no feasible coefficient point.
    #[error("no feasible coefficient point: {detail}")]
    Infeasible { detail: String },

    /// Feasible points exist but every one of them falls below the
    /// coefficient product floor, so the objectives cannot be evaluated.
    #[error("every feasible coefficient point falls below the product floor {floor:e}")]
    BelowFloor { floor: f64 },

    /// A sweep produced no rows to emit.
    #[error("cannot emit CSV for an empty sweep")]
    EmptySweep,

    #[error("table document parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
