//! The post-selected outcome probability table, the sole experimental input.

use crate::error::{Error, Result};

/// Slack allowed on entries before rejection; scenario generators produce
/// floating-point round-off just outside [0, 1].
pub const VALIDATION_SLACK: f64 = 1e-12;

/// 3x3 table of conditional probabilities `p[i][j]`: the probability that
/// the measurement node announces outcome 1 given Alice sent state `i` and
/// Bob sent state `j`, for `i, j` in `{0, 1, 2}`. States 0 and 1 are the
/// key-encoding states, state 2 is the checking state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutcomeProbabilityTable {
    p: [[f64; 3]; 3],
}

impl OutcomeProbabilityTable {
    /// Validates every entry into [0, 1], tolerating round-off up to
    /// [`VALIDATION_SLACK`] (such entries are clamped onto the boundary).
    pub fn new(p: [[f64; 3]; 3]) -> Result<Self> {
        let mut clamped = p;
        for (i, row) in p.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                if !(-VALIDATION_SLACK..=1.0 + VALIDATION_SLACK).contains(&v) {
                    return Err(Error::InvalidTable {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
                clamped[i][j] = v.clamp(0.0, 1.0);
            }
        }
        Ok(Self { p: clamped })
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.p[i][j]
    }

    pub fn entries(&self) -> &[[f64; 3]; 3] {
        &self.p
    }

    /// Key-generation mass `P = p00 + p01 + p10 + p11`.
    pub fn key_mass(&self) -> f64 {
        self.p[0][0] + self.p[0][1] + self.p[1][0] + self.p[1][1]
    }

    /// Key mass, or an error when it vanishes. Every rate operation
    /// conditions on outcome-1 events in the key basis, so `P > 0` is
    /// required throughout.
    pub fn key_mass_checked(&self) -> Result<f64> {
        let mass = self.key_mass();
        if mass > 0.0 {
            Ok(mass)
        } else {
            Err(Error::DegenerateTable {
                reason: "key-generation mass p00 + p01 + p10 + p11 is zero",
            })
        }
    }

    pub fn p00(&self) -> f64 {
        self.p[0][0]
    }
    pub fn p01(&self) -> f64 {
        self.p[0][1]
    }
    pub fn p02(&self) -> f64 {
        self.p[0][2]
    }
    pub fn p10(&self) -> f64 {
        self.p[1][0]
    }
    pub fn p11(&self) -> f64 {
        self.p[1][1]
    }
    pub fn p12(&self) -> f64 {
        self.p[1][2]
    }
    pub fn p20(&self) -> f64 {
        self.p[2][0]
    }
    pub fn p21(&self) -> f64 {
        self.p[2][1]
    }
    pub fn p22(&self) -> f64 {
        self.p[2][2]
    }
}
