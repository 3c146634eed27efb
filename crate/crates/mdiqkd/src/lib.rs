//! Secure-key-rate bounds for measurement-device-independent quantum key
//! distribution with uncharacterized qubits.
//!
//! The only experimental input is a 3x3 table of post-selected outcome
//! probabilities: two key-encoding states and one checking state per user,
//! an untrusted middle node announcing a binary outcome. Nothing is assumed
//! about the encoding states except that each checking state is a
//! superposition of that user's encoding states with unknown non-negative
//! coefficients. The observed statistics confine those coefficients to a
//! feasible region, and constrained maximization over that region bounds
//! the gap between the phase error rate (not directly measurable) and the
//! bit error rate (measured). The final key rate follows from the usual
//! two-entropy formula.
//!
//! Two gap bounds are provided: the `original` two-branch ratio bound and
//! an `improved` overlap bound that applies whenever its sign condition
//! holds and is typically much tighter. Everything downstream composes the
//! two, taking whichever is smaller.
//!
//! # Quick start
//!
//! ```
//! use mdiqkd::{delta_best, depolarizing_table, key_rate, phase_error_upper, OptimizerSettings};
//!
//! let table = depolarizing_table(0.01).unwrap();
//! let settings = OptimizerSettings::default();
//! let delta = delta_best(&table, &settings).unwrap();
//! let rates = phase_error_upper(&table, &delta).unwrap();
//! let result = key_rate(&rates, &table).unwrap();
//! assert!(result.rate > 0.5);
//! ```
//!
//! The `examples/` directory has one runnable program per capability:
//! single-table evaluation, the two scenario sweeps, and the
//! maximizer-versus-oracle comparison. The `mdiqkd` binary wraps the same
//! entry points behind `eval`, `sweep-depolarizing`, `sweep-darkcount` and
//! `oracle-check` subcommands.

pub mod bounds;
pub mod error;
pub mod optimizer;
pub mod rates;
pub mod scenarios;
pub mod sweep;
pub mod table;

pub use bounds::{
    delta_best, delta_best_with, delta_improved, delta_improved_with, delta_original,
    delta_original_with, is_feasible, objective_improved, objective_improved_fn,
    objective_original, objective_original_fn, trivial_clamp, CoefficientPoint, DeltaBound,
    DeltaSource, COEFFICIENT_FLOOR, DEFAULT_FEASIBILITY_TOL,
};
pub use error::{Error, Result};
pub use optimizer::{
    dense_oracle, dense_oracle_with_progress, maximize, MaximizationResult, OptimizerSettings,
    OracleProgress, SearchMode, SearchStrategy,
};
pub use rates::{
    binary_entropy, bit_error_rate, key_rate, phase_error_upper, ErrorRates, KeyRateResult,
};
pub use scenarios::{
    baseline_key_rate, darkcount_table, depolarizing_table, loss_db_to_eta, ScenarioKind,
    ScenarioPoint,
};
pub use sweep::{
    csv_bytes, emit_csv, emit_table_document, eval_table, eval_table_with, has_error_rows,
    parse_table_document, sweep_darkcount, sweep_darkcount_with, sweep_depolarizing,
    sweep_depolarizing_with, EvalReport, SweepRow,
};
pub use table::OutcomeProbabilityTable;
