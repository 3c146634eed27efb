//! Scenario sweeps and the data-interchange surface: table documents in,
//! evaluation reports and CSV sweep data out.

use crate::bounds::{delta_improved_with, delta_original_with, DeltaBound, COEFFICIENT_FLOOR};
use crate::error::{Error, Result};
use crate::optimizer::{OptimizerSettings, SearchStrategy};
use crate::rates::{bit_error_rate, key_rate, phase_error_upper, KeyRateResult};
use crate::scenarios::{baseline_key_rate, ScenarioPoint};
use crate::table::OutcomeProbabilityTable;
use rayon::prelude::*;
use std::io::Write;

/// One evaluated sweep point. The `improved` columns use the tightest
/// available bound (the improved bound composed with the original), so they
/// are never looser than the `original` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub x_value: f64,
    pub e_bit: f64,
    pub e_phase_original: f64,
    pub e_phase_improved: f64,
    pub gap_original: f64,
    pub gap_improved: f64,
    pub rate_original: f64,
    pub rate_improved: f64,
    pub rate_baseline: f64,
    pub raw_rate_original: f64,
    pub raw_rate_improved: f64,
    pub raw_rate_baseline: f64,
    pub improved_applicable: bool,
    /// Per-point failure, recorded instead of aborting the sweep.
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(x_value: f64, error: String) -> Self {
        Self {
            x_value,
            e_bit: f64::NAN,
            e_phase_original: f64::NAN,
            e_phase_improved: f64::NAN,
            gap_original: f64::NAN,
            gap_improved: f64::NAN,
            rate_original: f64::NAN,
            rate_improved: f64::NAN,
            rate_baseline: f64::NAN,
            raw_rate_original: f64::NAN,
            raw_rate_improved: f64::NAN,
            raw_rate_baseline: f64::NAN,
            improved_applicable: false,
            error: Some(error),
        }
    }
}

/// Evaluates both bounds and the full rate chain for one table.
fn evaluate_point(
    x_value: f64,
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
    strategy: SearchStrategy,
) -> Result<SweepRow> {
    let mass = table.key_mass_checked()?;
    let e_bit = bit_error_rate(table)?;

    let original = delta_original_with(table, settings, strategy)?;
    let improved = if table.p00() > 0.0 && table.p11() > 0.0 {
        delta_improved_with(table, settings, strategy)?
    } else {
        None
    };
    let improved_applicable = improved.is_some();
    let best = DeltaBound::tighter(original, improved);

    let rates_original = phase_error_upper(table, &original)?;
    let rates_improved = phase_error_upper(table, &best)?;
    let key_original = key_rate(&rates_original, table)?;
    let key_improved = key_rate(&rates_improved, table)?;
    let key_baseline = baseline_key_rate(table)?;

    Ok(SweepRow {
        x_value,
        e_bit,
        e_phase_original: rates_original.e_phase_upper,
        e_phase_improved: rates_improved.e_phase_upper,
        gap_original: original.delta / (2.0 * mass),
        gap_improved: best.delta / (2.0 * mass),
        rate_original: key_original.rate,
        rate_improved: key_improved.rate,
        rate_baseline: key_baseline.rate,
        raw_rate_original: key_original.raw_rate,
        raw_rate_improved: key_improved.raw_rate,
        raw_rate_baseline: key_baseline.raw_rate,
        improved_applicable,
        error: None,
    })
}

fn grid(min: f64, max: f64, steps: u32) -> Vec<f64> {
    if steps == 1 {
        return vec![min];
    }
    (0..steps)
        .map(|k| min + (max - min) * (k as f64 / (steps - 1) as f64))
        .collect()
}

fn run_sweep<T>(
    xs: Vec<f64>,
    settings: &OptimizerSettings,
    strategy: SearchStrategy,
    make_point: T,
) -> Vec<SweepRow>
where
    T: Fn(f64) -> Result<ScenarioPoint> + Sync,
{
    // Points are independent; collect preserves x-order, so the output is
    // identical for any worker count.
    xs.into_par_iter()
        .map(|x| {
            let row = make_point(x)
                .and_then(|point| evaluate_point(point.x_value, &point.table, settings, strategy));
            row.unwrap_or_else(|e| SweepRow::failed(x, e.to_string()))
        })
        .collect()
}

/// Depolarizing-channel sweep over bit error rates, both bounds per point.
pub fn sweep_depolarizing(
    e_b_min: f64,
    e_b_max: f64,
    steps: u32,
    settings: &OptimizerSettings,
) -> Result<Vec<SweepRow>> {
    sweep_depolarizing_with(
        e_b_min,
        e_b_max,
        steps,
        settings,
        SearchStrategy::GridRefine,
    )
}

/// [`sweep_depolarizing`] with an explicit search strategy.
pub fn sweep_depolarizing_with(
    e_b_min: f64,
    e_b_max: f64,
    steps: u32,
    settings: &OptimizerSettings,
    strategy: SearchStrategy,
) -> Result<Vec<SweepRow>> {
    if !(0.0 <= e_b_min && e_b_min <= e_b_max && e_b_max <= 0.5) {
        return Err(Error::Domain {
            name: "e_b range",
            value: e_b_min.min(e_b_max),
            min: 0.0,
            max: 0.5,
        });
    }
    require_steps(steps)?;
    settings.validate()?;
    Ok(run_sweep(
        grid(e_b_min, e_b_max, steps),
        settings,
        strategy,
        ScenarioPoint::depolarizing,
    ))
}

/// Dark-count-detector sweep over channel loss in dB. The raw-rate columns
/// carry `rate * P`, the y-axis of loss plots.
pub fn sweep_darkcount(
    loss_db_min: f64,
    loss_db_max: f64,
    steps: u32,
    dark_rate: f64,
    settings: &OptimizerSettings,
) -> Result<Vec<SweepRow>> {
    sweep_darkcount_with(
        loss_db_min,
        loss_db_max,
        steps,
        dark_rate,
        settings,
        SearchStrategy::GridRefine,
    )
}

/// [`sweep_darkcount`] with an explicit search strategy.
pub fn sweep_darkcount_with(
    loss_db_min: f64,
    loss_db_max: f64,
    steps: u32,
    dark_rate: f64,
    settings: &OptimizerSettings,
    strategy: SearchStrategy,
) -> Result<Vec<SweepRow>> {
    if !(0.0 <= loss_db_min && loss_db_min <= loss_db_max) {
        return Err(Error::Domain {
            name: "loss_db range",
            value: loss_db_min.min(loss_db_max),
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    if !(0.0..=1.0).contains(&dark_rate) {
        return Err(Error::Domain {
            name: "dark_rate",
            value: dark_rate,
            min: 0.0,
            max: 1.0,
        });
    }
    require_steps(steps)?;
    settings.validate()?;
    Ok(run_sweep(
        grid(loss_db_min, loss_db_max, steps),
        settings,
        strategy,
        move |loss_db| ScenarioPoint::darkcount(loss_db, dark_rate),
    ))
}

fn require_steps(steps: u32) -> Result<()> {
    if steps == 0 {
        return Err(Error::Domain {
            name: "steps",
            value: 0.0,
            min: 1.0,
            max: f64::INFINITY,
        });
    }
    Ok(())
}

/// Whether any row carries a recorded per-point failure.
pub fn has_error_rows(rows: &[SweepRow]) -> bool {
    rows.iter().any(|r| r.error.is_some())
}

// ---------------------------------------------------------------------
// Table documents
// ---------------------------------------------------------------------

#[derive(serde::Serialize, serde::Deserialize)]
struct TableDocument {
    p: [[f64; 3]; 3],
}

/// Parses a table document: a JSON object with a single key `"p"` holding
/// the 3x3 probability array, row index = Alice's state.
pub fn parse_table_document(text: &str) -> Result<OutcomeProbabilityTable> {
    let doc: TableDocument = serde_json::from_str(text)?;
    OutcomeProbabilityTable::new(doc.p)
}

/// Re-emits a table as a document. Values round-trip exactly: the shortest
/// decimal form that recovers each double is written.
pub fn emit_table_document(table: &OutcomeProbabilityTable) -> String {
    let doc = TableDocument {
        p: *table.entries(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("finite floats always serialize");
    text.push('\n');
    text
}

// ---------------------------------------------------------------------
// Single-table evaluation
// ---------------------------------------------------------------------

/// Full evaluation of one table: both bounds with their maximizing
/// coefficients, phase bounds, key rates, and the settings that produced
/// them.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EvalReport {
    pub e_bit: f64,
    pub delta_original: DeltaBound,
    pub delta_improved: Option<DeltaBound>,
    pub delta_best: DeltaBound,
    pub improved_applicable: bool,
    pub e_phase_original: f64,
    pub e_phase_improved: f64,
    pub key_rate_original: KeyRateResult,
    pub key_rate_improved: KeyRateResult,
    pub key_rate_baseline: KeyRateResult,
    pub settings: OptimizerSettings,
    pub coefficient_floor: f64,
}

/// Parses and evaluates a table document.
pub fn eval_table(text: &str, settings: &OptimizerSettings) -> Result<EvalReport> {
    eval_table_with(text, settings, SearchStrategy::GridRefine)
}

/// [`eval_table`] with an explicit search strategy.
pub fn eval_table_with(
    text: &str,
    settings: &OptimizerSettings,
    strategy: SearchStrategy,
) -> Result<EvalReport> {
    let table = parse_table_document(text)?;
    settings.validate()?;
    let original = delta_original_with(&table, settings, strategy)?;
    let improved = if table.p00() > 0.0 && table.p11() > 0.0 {
        delta_improved_with(&table, settings, strategy)?
    } else {
        None
    };
    let best = DeltaBound::tighter(original, improved);
    let rates_original = phase_error_upper(&table, &original)?;
    let rates_best = phase_error_upper(&table, &best)?;
    Ok(EvalReport {
        e_bit: bit_error_rate(&table)?,
        delta_original: original,
        delta_improved: improved,
        delta_best: best,
        improved_applicable: improved.is_some(),
        e_phase_original: rates_original.e_phase_upper,
        e_phase_improved: rates_best.e_phase_upper,
        key_rate_original: key_rate(&rates_original, &table)?,
        key_rate_improved: key_rate(&rates_best, &table)?,
        key_rate_baseline: baseline_key_rate(&table)?,
        settings: *settings,
        coefficient_floor: COEFFICIENT_FLOOR,
    })
}

// ---------------------------------------------------------------------
// CSV emission
// ---------------------------------------------------------------------

const CSV_HEADER: &str = "x_value,e_bit,e_phase_original,e_phase_improved,gap_original,\
gap_improved,rate_original,rate_improved,rate_baseline,raw_rate_original,\
raw_rate_improved,raw_rate_baseline,improved_applicable,error";

/// Full double precision, locale-independent: 17 significant digits.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_escape(text: &str) -> String {
    if text.contains([',', '"', '\n']) {
        format!("\"{}\"", text.replace('"', "\"\""))
    } else {
        text.to_owned()
    }
}

/// Writes a header line then one line per row, LF endings, deterministic
/// bytes for identical inputs. Failed rows keep their x-value and error
/// message; the numeric cells stay empty.
pub fn emit_csv<W: Write>(rows: &[SweepRow], mut dest: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptySweep);
    }
    dest.write_all(CSV_HEADER.as_bytes())?;
    dest.write_all(b"\n")?;
    for row in rows {
        let line = match &row.error {
            Some(message) => format!(
                "{},,,,,,,,,,,,,{}",
                fmt_f64(row.x_value),
                csv_escape(message)
            ),
            None => format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},",
                fmt_f64(row.x_value),
                fmt_f64(row.e_bit),
                fmt_f64(row.e_phase_original),
                fmt_f64(row.e_phase_improved),
                fmt_f64(row.gap_original),
                fmt_f64(row.gap_improved),
                fmt_f64(row.rate_original),
                fmt_f64(row.rate_improved),
                fmt_f64(row.rate_baseline),
                fmt_f64(row.raw_rate_original),
                fmt_f64(row.raw_rate_improved),
                fmt_f64(row.raw_rate_baseline),
                row.improved_applicable,
            ),
        };
        dest.write_all(line.as_bytes())?;
        dest.write_all(b"\n")?;
    }
    dest.flush()?;
    Ok(())
}

/// Renders a sweep to an in-memory CSV byte buffer.
pub fn csv_bytes(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    emit_csv(rows, &mut buf)?;
    Ok(buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::depolarizing_table;

    fn quick() -> OptimizerSettings {
        OptimizerSettings {
            coarse_resolution: 12,
            refinement_rounds: 2,
            ..OptimizerSettings::default()
        }
    }

    #[test]
    fn single_step_sweep_is_noiseless_point() {
        let rows = sweep_depolarizing(0.0, 0.0, 1, &OptimizerSettings::default()).unwrap();
        assert_eq!(rows.len(), 1);
        let row = &rows[0];
        assert!(row.error.is_none());
        assert!((row.rate_original - 1.0).abs() < 1e-8);
        assert!((row.rate_improved - 1.0).abs() < 1e-8);
    }

    #[test]
    fn improved_columns_dominate() {
        let rows = sweep_depolarizing(0.005, 0.03, 3, &quick()).unwrap();
        for row in &rows {
            assert!(row.error.is_none());
            assert!(row.rate_improved >= row.rate_original);
            assert!(row.gap_improved <= row.gap_original + 1e-12);
            assert!(row.improved_applicable);
        }
    }

    #[test]
    fn sweep_rows_ordered_by_x() {
        let rows = sweep_darkcount(0.0, 20.0, 5, 1e-5, &quick()).unwrap();
        assert_eq!(rows.len(), 5);
        for pair in rows.windows(2) {
            assert!(pair[0].x_value < pair[1].x_value);
        }
    }

    #[test]
    fn zero_dark_rate_curves_coincide() {
        // Without dark counts there are no cross clicks at all: the bit
        // error rate is exactly zero and both gap bounds collapse, so all
        // three raw-rate curves agree.
        let rows = sweep_darkcount(10.0, 10.0, 1, 0.0, &quick()).unwrap();
        let row = &rows[0];
        assert!(row.error.is_none());
        assert_eq!(row.e_bit, 0.0);
        assert_eq!(row.raw_rate_original, row.raw_rate_baseline);
        assert_eq!(row.raw_rate_improved, row.raw_rate_baseline);
    }

    #[test]
    fn eval_report_improved_dominates() {
        let text = emit_table_document(&depolarizing_table(0.03).unwrap());
        let report = eval_table(&text, &quick()).unwrap();
        assert!(report.key_rate_improved.rate >= report.key_rate_original.rate);
        assert!(report.improved_applicable);
        assert!(report.delta_best.delta <= report.delta_original.delta);
    }

    #[test]
    fn sweep_range_validation() {
        let s = OptimizerSettings::default();
        assert!(sweep_depolarizing(0.2, 0.1, 5, &s).is_err());
        assert!(sweep_depolarizing(0.0, 0.6, 5, &s).is_err());
        assert!(sweep_depolarizing(0.0, 0.1, 0, &s).is_err());
        assert!(sweep_darkcount(-1.0, 10.0, 5, 1e-5, &s).is_err());
        assert!(sweep_darkcount(0.0, 10.0, 5, 1.5, &s).is_err());
    }

    #[test]
    fn document_round_trip_is_exact() {
        // Awkward values: subnormal-ish fractions that stress shortest-form
        // float printing.
        let p = [
            [0.1, 0.2 / 3.0, 1.0 - 1e-16],
            [1e-300, 0.4999999999999999, 0.07],
            [f64::MIN_POSITIVE, 0.25, 0.3333333333333333],
        ];
        let table = OutcomeProbabilityTable::new(p).unwrap();
        let text = emit_table_document(&table);
        let back = parse_table_document(&text).unwrap();
        assert_eq!(table.entries(), back.entries());
    }

    #[test]
    fn parse_rejects_bad_documents() {
        assert!(matches!(
            parse_table_document("{\"q\": []}"),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            parse_table_document("{\"p\": [[1.5,0,0],[0,0,0],[0,0,0]]}"),
            Err(Error::InvalidTable { .. })
        ));
    }

    #[test]
    fn eval_report_noiseless() {
        let text = emit_table_document(&depolarizing_table(0.0).unwrap());
        let report = eval_table(&text, &OptimizerSettings::default()).unwrap();
        assert!((report.key_rate_original.rate - 1.0).abs() < 1e-8);
        assert!((report.key_rate_improved.rate - 1.0).abs() < 1e-8);
        assert!(report.improved_applicable);
        assert_eq!(report.coefficient_floor, COEFFICIENT_FLOOR);
        assert!(report.delta_original.argmax.is_some());
    }

    #[test]
    fn csv_shape_and_determinism() {
        let rows = sweep_depolarizing(0.0, 0.02, 2, &quick()).unwrap();
        let first = csv_bytes(&rows).unwrap();
        let second = csv_bytes(&rows).unwrap();
        assert_eq!(first, second);

        let text = String::from_utf8(first).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3); // header + 2 rows
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[0].split(',').count(), 14);
        assert_eq!(lines[1].split(',').count(), 14);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_error_row_keeps_x_and_message() {
        let rows = vec![SweepRow::failed(0.25, "have, comma".to_owned())];
        let text = String::from_utf8(csv_bytes(&rows).unwrap()).unwrap();
        let line = text.lines().nth(1).unwrap();
        assert!(line.starts_with(&fmt_f64(0.25)));
        assert!(line.ends_with("\"have, comma\""));
    }

    #[test]
    fn csv_rejects_empty() {
        assert!(matches!(csv_bytes(&[]), Err(Error::EmptySweep)));
    }

    #[test]
    fn full_precision_formatting() {
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
        // 17 significant digits round-trip any double
        let x = 0.12345678901234568_f64;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
    }
}
