//! Verify the grid-and-refine maximizer against the exhaustive dense
//! oracle on one table, for both objectives, with progress reporting.
//!
//!     cargo run --example oracle_comparison

use mdiqkd::{
    dense_oracle_with_progress, depolarizing_table, maximize, objective_improved_fn,
    objective_original_fn, OptimizerSettings, OracleProgress,
};

fn main() -> mdiqkd::Result<()> {
    let table = depolarizing_table(0.02)?;
    let settings = OptimizerSettings::default();
    let resolution = 120;

    for name in ["original", "improved"] {
        let (refined, oracle) = if name == "original" {
            (
                maximize(objective_original_fn(&table), &table, &settings)?,
                dense_oracle_with_progress(
                    objective_original_fn(&table),
                    &table,
                    resolution,
                    &settings,
                    &mut print_progress,
                )?,
            )
        } else {
            (
                maximize(objective_improved_fn(&table), &table, &settings)?,
                dense_oracle_with_progress(
                    objective_improved_fn(&table),
                    &table,
                    resolution,
                    &settings,
                    &mut print_progress,
                )?,
            )
        };
        eprintln!();
        println!("{name} objective");
        println!(
            "  maximize     : {:.12}  at {:?}  ({} feasible points)",
            refined.value, refined.argmax, refined.feasible_points_seen
        );
        println!(
            "  oracle[{resolution}]  : {:.12}  at {:?}  ({} feasible points)",
            oracle.value, oracle.argmax, oracle.feasible_points_seen
        );
        println!(
            "  refined search is {}",
            if refined.value >= oracle.value - 1e-6 {
                "sound (never below the oracle)"
            } else {
                "UNSOUND"
            }
        );
    }
    Ok(())
}

fn print_progress(p: OracleProgress) {
    eprint!("\r  scanning feasible slabs: {}/{}", p.done, p.total);
}
