//! Channel models that generate the simulation probability tables, plus the
//! characterized-source baseline used for comparison.

use crate::error::{Error, Result};
use crate::rates::{bit_error_rate, key_rate, ErrorRates, KeyRateResult};
use crate::table::OutcomeProbabilityTable;

/// Which channel model produced a scenario point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ScenarioKind {
    Depolarizing,
    DarkCount,
}

/// One evaluated scenario input: the swept x-value (bit error rate for the
/// depolarizing model, loss in dB for the dark-count model) and its table.
#[derive(Debug, Clone, Copy)]
pub struct ScenarioPoint {
    pub x_value: f64,
    pub table: OutcomeProbabilityTable,
    pub label: ScenarioKind,
}

impl ScenarioPoint {
    pub fn depolarizing(e_b: f64) -> Result<Self> {
        Ok(Self {
            x_value: e_b,
            table: depolarizing_table(e_b)?,
            label: ScenarioKind::Depolarizing,
        })
    }

    pub fn darkcount(loss_db: f64, dark_rate: f64) -> Result<Self> {
        Ok(Self {
            x_value: loss_db,
            table: darkcount_table(loss_db_to_eta(loss_db)?, dark_rate)?,
            label: ScenarioKind::DarkCount,
        })
    }
}

/// Table for a depolarized channel on one arm, parameterized directly by
/// the bit error rate it produces: `p00 = p11 = (1 - e_b)/2`,
/// `p01 = p10 = p22 = e_b/2`, all checking windows `1/4`.
pub fn depolarizing_table(e_b: f64) -> Result<OutcomeProbabilityTable> {
    if !(0.0..=0.5).contains(&e_b) {
        return Err(Error::Domain {
            name: "e_b",
            value: e_b,
            min: 0.0,
            max: 0.5,
        });
    }
    let diag = (1.0 - e_b) / 2.0;
    let cross = e_b / 2.0;
    OutcomeProbabilityTable::new([
        [diag, cross, 0.25],
        [cross, diag, 0.25],
        [0.25, 0.25, cross],
    ])
}

/// Table for four single-photon detectors with transmission `eta` per arm
/// and dark-count rate `d` per gate.
pub fn darkcount_table(eta: f64, d: f64) -> Result<OutcomeProbabilityTable> {
    for (name, v) in [("eta", eta), ("d", d)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::Domain {
                name,
                value: v,
                min: 0.0,
                max: 1.0,
            });
        }
    }
    let no_dark = (1.0 - d) * (1.0 - d);
    let signal = eta * eta * no_dark / 2.0;
    let one_lost = 2.0 * eta * (1.0 - eta) * d * no_dark;
    let both_lost = 2.0 * (1.0 - eta) * (1.0 - eta) * d * d * no_dark;
    let diag = signal + one_lost + both_lost;
    let cross = one_lost + both_lost;
    let check = (diag + cross) / 2.0;
    OutcomeProbabilityTable::new([
        [diag, cross, check],
        [cross, diag, check],
        [check, check, cross],
    ])
}

/// Converts a channel loss figure in dB to a transmission: `10^(-dB/10)`.
pub fn loss_db_to_eta(loss_db: f64) -> Result<f64> {
    let ok = loss_db >= 0.0; // NaN rejected here as well
    if !ok {
        return Err(Error::Domain {
            name: "loss_db",
            value: loss_db,
            min: 0.0,
            max: f64::INFINITY,
        });
    }
    Ok(10f64.powf(-loss_db / 10.0))
}

/// Key rate of the original protocol with an ideal source, where the phase
/// error rate equals the bit error rate. The reference curve against which
/// both bounds are compared.
pub fn baseline_key_rate(table: &OutcomeProbabilityTable) -> Result<KeyRateResult> {
    let e_bit = bit_error_rate(table)?;
    key_rate(&ErrorRates::new(e_bit, e_bit)?, table)
}
