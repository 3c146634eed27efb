//! Binary entropy, bit/phase error rates, and the final key-rate formula.

use crate::bounds::DeltaBound;
use crate::error::{Error, Result};
use crate::table::OutcomeProbabilityTable;

/// Bit error rate together with the upper bound on the phase error rate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ErrorRates {
    pub e_bit: f64,
    pub e_phase_upper: f64,
}

impl ErrorRates {
    /// Both rates must be probabilities and the phase bound can never fall
    /// below the bit error rate (the gap term is non-negative).
    pub fn new(e_bit: f64, e_phase_upper: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&e_bit) {
            return Err(Error::Domain {
                name: "e_bit",
                value: e_bit,
                min: 0.0,
                max: 1.0,
            });
        }
        if !(0.0..=1.0).contains(&e_phase_upper) || e_phase_upper < e_bit {
            return Err(Error::Domain {
                name: "e_phase_upper",
                value: e_phase_upper,
                min: e_bit,
                max: 1.0,
            });
        }
        Ok(Self {
            e_bit,
            e_phase_upper,
        })
    }
}

/// Secret-key rate per post-selected event, plus the raw rate per emitted
/// pair (`rate * P`) and the two entropy terms that produced it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct KeyRateResult {
    pub rate: f64,
    pub raw_rate: f64,
    pub h_bit: f64,
    pub h_phase: f64,
}

/// Binary Shannon entropy `H(x) = -x log2 x - (1-x) log2 (1-x)`.
///
/// The endpoints return exactly 0 (the continuous extension `0 log 0 = 0`).
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain {
            name: "x",
            value: x,
            min: 0.0,
            max: 1.0,
        });
    }
    if x == 0.0 || x == 1.0 {
        return Ok(0.0);
    }
    Ok(-x * x.log2() - (1.0 - x) * (1.0 - x).log2())
}

/// Fraction of post-selected key events where the two bits disagree:
/// `(p01 + p10) / (p00 + p01 + p10 + p11)`.
pub fn bit_error_rate(table: &OutcomeProbabilityTable) -> Result<f64> {
    let mass = table.key_mass_checked()?;
    Ok((table.p01() + table.p10()) / mass)
}

/// Upper-bounds the phase error rate as `e_bit + delta / (2P)`, clamped
/// into [0, 1]. The bound can exceed 1 for a loose delta; a probability
/// cannot.
pub fn phase_error_upper(
    table: &OutcomeProbabilityTable,
    delta: &DeltaBound,
) -> Result<ErrorRates> {
    let mass = table.key_mass_checked()?;
    let e_bit = (table.p01() + table.p10()) / mass;
    let e_phase = (e_bit + delta.delta / (2.0 * mass)).min(1.0);
    ErrorRates::new(e_bit, e_phase)
}

/// Final key rate `R = max(0, 1 - H(e_bit) - H(e_phase))`.
///
/// The phase entropy is evaluated at `min(e_phase_upper, 1/2)`: the phase
/// rate is only an upper bound, and past 1/2 the entropy would start
/// decreasing again, crediting a looser bound with a higher rate. Pinning
/// the entropy term at its maximum keeps the rate a sound lower bound and
/// monotone in the phase bound.
pub fn key_rate(rates: &ErrorRates, table: &OutcomeProbabilityTable) -> Result<KeyRateResult> {
    let mass = table.key_mass_checked()?;
    let h_bit = binary_entropy(rates.e_bit)?;
    let h_phase = binary_entropy(rates.e_phase_upper.min(0.5))?;
    let rate = (1.0 - h_bit - h_phase).max(0.0);
    Ok(KeyRateResult {
        rate,
        raw_rate: rate * mass,
        h_bit,
        h_phase,
    })
}
