//! Feasibility constraints on the checking-state coefficients and the two
//! objectives whose constrained maxima bound the phase-bit gap quantity.
//!
//! The users' checking states are superpositions of their encoding states
//! with unknown non-negative coefficients `(c0, c1)` and `(c0', c1')`. The
//! observed outcome probabilities confine those coefficients to a feasible
//! region; maximizing either objective over that region yields an upper
//! bound on the gap quantity `delta`, which in turn bounds the phase error
//! rate through [`crate::rates::phase_error_upper`].
//!
//! Two bounds are implemented:
//!
//! - **original**: maximizes a two-branch ratio objective and uses the
//!   maximum directly as the bound on `delta`.
//! - **improved**: maximizes a signed overlap objective. When the maximum
//!   `omega_max` is negative, the magnitude of the adversary-state overlap
//!   is at least `|omega_max|`, which tightens the bound to
//!   `p00 + p11 - 2 sqrt(p00 p11) |omega_max|`. When the maximum is
//!   non-negative the improved bound is inapplicable and the original bound
//!   stands alone.

use crate::error::{Error, Result};
use crate::optimizer::{self, OptimizerSettings, SearchStrategy};
use crate::table::OutcomeProbabilityTable;
use std::cmp::Ordering;

/// Coefficient products below this floor make the ratio objectives blow
/// up; such points are excluded from the search and from direct objective
/// evaluation. Recorded in evaluation reports.
pub const COEFFICIENT_FLOOR: f64 = 1e-6;

/// Default additive slack on each squared-term feasibility inequality.
pub const DEFAULT_FEASIBILITY_TOL: f64 = 1e-9;

/// A candidate for the unknown checking-state superposition coefficients:
/// `(c0, c1)` for one user, `(c0p, c1p)` for the other.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct CoefficientPoint {
    pub c0: f64,
    pub c1: f64,
    pub c0p: f64,
    pub c1p: f64,
}

impl CoefficientPoint {
    /// All components must be non-negative (and finite).
    pub fn new(c0: f64, c1: f64, c0p: f64, c1p: f64) -> Result<Self> {
        for (name, v) in [("c0", c0), ("c1", c1), ("c0p", c0p), ("c1p", c1p)] {
            let ok = v.is_finite() && v >= 0.0;
            if !ok {
                return Err(Error::Domain {
                    name,
                    value: v,
                    min: 0.0,
                    max: f64::INFINITY,
                });
            }
        }
        Ok(Self { c0, c1, c0p, c1p })
    }

    /// Total order used for deterministic tie-breaking among equal maxima.
    pub fn lex_cmp(&self, other: &Self) -> Ordering {
        let a = [self.c0, self.c1, self.c0p, self.c1p];
        let b = [other.c0, other.c1, other.c0p, other.c1p];
        for (x, y) in a.iter().zip(&b) {
            match x.partial_cmp(y) {
                Some(Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        Ordering::Equal
    }
}

/// Which bound produced a delta value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum DeltaSource {
    Original,
    Improved,
    /// The Cauchy-Schwarz ceiling `(sqrt(p00) + sqrt(p11))^2`, applied when
    /// the maximized objective exceeds it.
    TrivialClamp,
}

/// Computed upper bound on the phase-bit gap quantity.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct DeltaBound {
    pub delta: f64,
    pub source: DeltaSource,
    /// Maximized improved objective, when that route was taken.
    pub omega_max: Option<f64>,
    /// Maximized original objective, when that route was taken.
    pub f_max: Option<f64>,
    /// Coefficient point achieving the maximum.
    pub argmax: Option<CoefficientPoint>,
}

impl DeltaBound {
    /// Picks the tighter of the original bound and, when present, the
    /// improved bound. Ties go to the improved bound.
    pub fn tighter(original: DeltaBound, improved: Option<DeltaBound>) -> DeltaBound {
        match improved {
            Some(imp) if imp.delta <= original.delta => imp,
            _ => original,
        }
    }
}

/// Square roots of the key-block entries, precomputed once per table.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TableRoots {
    pub s00: f64,
    pub s01: f64,
    pub s10: f64,
    pub s11: f64,
    pub s22: f64,
    pub p00: f64,
    pub p11: f64,
}

impl TableRoots {
    pub fn of(table: &OutcomeProbabilityTable) -> Self {
        Self {
            s00: table.p00().sqrt(),
            s01: table.p01().sqrt(),
            s10: table.p10().sqrt(),
            s11: table.p11().sqrt(),
            s22: table.p22().sqrt(),
            p00: table.p00(),
            p11: table.p11(),
        }
    }
}

#[inline]
fn within(lower: f64, value: f64, upper: f64, tol: f64) -> bool {
    lower <= value + tol && value <= upper + tol
}

/// Feasibility of `(c0, c1)` against the constraints that involve only the
/// first user's coefficients.
#[inline]
pub(crate) fn feasible_first(
    roots: &TableRoots,
    table: &OutcomeProbabilityTable,
    c0: f64,
    c1: f64,
    tol: f64,
) -> bool {
    let diff = (c0 - c1) * (c0 - c1);
    let sum = (c0 + c1) * (c0 + c1);
    if !within(diff, 1.0, sum, tol) {
        return false;
    }
    let lo = roots.s00 * c0 - roots.s10 * c1;
    let hi = roots.s00 * c0 + roots.s10 * c1;
    if !within(lo * lo, table.p20(), hi * hi, tol) {
        return false;
    }
    let lo = roots.s01 * c0 - roots.s11 * c1;
    let hi = roots.s01 * c0 + roots.s11 * c1;
    within(lo * lo, table.p21(), hi * hi, tol)
}

/// Feasibility of `(c0p, c1p)` against the constraints that involve only
/// the second user's coefficients.
#[inline]
pub(crate) fn feasible_second(
    roots: &TableRoots,
    table: &OutcomeProbabilityTable,
    c0p: f64,
    c1p: f64,
    tol: f64,
) -> bool {
    let diff = (c0p - c1p) * (c0p - c1p);
    let sum = (c0p + c1p) * (c0p + c1p);
    if !within(diff, 1.0, sum, tol) {
        return false;
    }
    let lo = roots.s00 * c0p - roots.s01 * c1p;
    let hi = roots.s00 * c0p + roots.s01 * c1p;
    if !within(lo * lo, table.p02(), hi * hi, tol) {
        return false;
    }
    let lo = roots.s10 * c0p - roots.s11 * c1p;
    let hi = roots.s10 * c0p + roots.s11 * c1p;
    within(lo * lo, table.p12(), hi * hi, tol)
}

/// Whether a coefficient point satisfies the normalization window and the
/// four checking-statistics windows, each with additive slack `tol`.
///
/// The constraint set factorizes: three windows touch only `(c0, c1)` and
/// three touch only `(c0p, c1p)`.
pub fn is_feasible(c: &CoefficientPoint, table: &OutcomeProbabilityTable, tol: f64) -> bool {
    let roots = TableRoots::of(table);
    feasible_first(&roots, table, c.c0, c.c1, tol)
        && feasible_second(&roots, table, c.c0p, c.c1p, tol)
}

/// A line `a*x + b*y = t` in one coefficient plane, from tightening one
/// side of a feasibility window.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BoundaryLine {
    a: f64,
    b: f64,
    t: f64,
}

impl BoundaryLine {
    fn normalized(a: f64, b: f64, t: f64) -> Option<Self> {
        let norm = a.hypot(b);
        if norm == 0.0 {
            return None;
        }
        Some(Self {
            a: a / norm,
            b: b / norm,
            t: t / norm,
        })
    }
}

fn window_lines(u: f64, v: f64, target: f64, out: &mut Vec<BoundaryLine>) {
    let t = target.sqrt();
    out.extend(BoundaryLine::normalized(u, -v, t));
    out.extend(BoundaryLine::normalized(u, -v, -t));
    out.extend(BoundaryLine::normalized(u, v, t));
}

pub(crate) fn boundary_lines_first(
    roots: &TableRoots,
    table: &OutcomeProbabilityTable,
) -> Vec<BoundaryLine> {
    let mut lines = Vec::with_capacity(9);
    window_lines(1.0, 1.0, 1.0, &mut lines); // |c0 - c1| <= 1 <= c0 + c1
    window_lines(roots.s00, roots.s10, table.p20(), &mut lines);
    window_lines(roots.s01, roots.s11, table.p21(), &mut lines);
    lines
}

pub(crate) fn boundary_lines_second(
    roots: &TableRoots,
    table: &OutcomeProbabilityTable,
) -> Vec<BoundaryLine> {
    let mut lines = Vec::with_capacity(9);
    window_lines(1.0, 1.0, 1.0, &mut lines);
    window_lines(roots.s00, roots.s01, table.p02(), &mut lines);
    window_lines(roots.s10, roots.s11, table.p12(), &mut lines);
    lines
}

/// Pairwise intersections of tightened window boundaries, restricted to the
/// search box. Degenerate tables can collapse the feasible region to
/// isolated points that no uniform grid contains; those points are always
/// intersections of boundary lines, so they are injected into every scan.
pub(crate) fn corner_candidates(lines: &[BoundaryLine], lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for (i, p) in lines.iter().enumerate() {
        for q in &lines[i + 1..] {
            let det = p.a * q.b - q.a * p.b;
            if det.abs() < 1e-12 {
                continue;
            }
            let x = (p.t * q.b - q.t * p.b) / det;
            let y = (p.a * q.t - q.a * p.t) / det;
            if (lo..=hi).contains(&x) && (lo..=hi).contains(&y) {
                pts.push((x, y));
            }
        }
    }
    pts
}

#[derive(Debug, Clone, Copy)]
struct ObjectiveTerms {
    cross: f64, // sqrt(p22) + sqrt(p01) c0 c1p + sqrt(p10) c1 c0p
    x: f64,     // c0 c0p
    y: f64,     // c1 c1p
}

#[inline]
fn objective_terms(roots: &TableRoots, c: &CoefficientPoint) -> ObjectiveTerms {
    ObjectiveTerms {
        cross: roots.s22 + roots.s01 * (c.c0 * c.c1p) + roots.s10 * (c.c1 * c.c0p),
        x: c.c0 * c.c0p,
        y: c.c1 * c.c1p,
    }
}

#[inline]
fn original_value(roots: &TableRoots, t: ObjectiveTerms) -> f64 {
    let asym = (t.x - t.y).abs();
    let first = (t.cross + roots.s11 * asym) / t.x;
    let second = (t.cross + roots.s00 * asym) / t.y;
    (first * first).min(second * second)
}

#[inline]
fn improved_value(roots: &TableRoots, t: ObjectiveTerms) -> f64 {
    let numerator = t.cross * t.cross - roots.p00 * t.x * t.x - roots.p11 * t.y * t.y;
    numerator / (2.0 * (roots.s00 * roots.s11) * t.x * t.y)
}

/// Two-branch ratio objective of the original bound.
///
/// Requires both coefficient products `c0*c0p` and `c1*c1p` at or above
/// [`COEFFICIENT_FLOOR`]; the ratio is unbounded as either denominator
/// vanishes and the underlying derivation excludes zero coefficients.
pub fn objective_original(c: &CoefficientPoint, table: &OutcomeProbabilityTable) -> Result<f64> {
    let roots = TableRoots::of(table);
    let t = objective_terms(&roots, c);
    if t.x < COEFFICIENT_FLOOR || t.y < COEFFICIENT_FLOOR {
        return Err(Error::DegenerateCoefficients {
            c0_product: t.x,
            c1_product: t.y,
            floor: COEFFICIENT_FLOOR,
        });
    }
    Ok(original_value(&roots, t))
}

/// Signed overlap objective of the improved bound.
///
/// Requires `p00 > 0`, `p11 > 0` and the four-way coefficient product at or
/// above [`COEFFICIENT_FLOOR`].
pub fn objective_improved(c: &CoefficientPoint, table: &OutcomeProbabilityTable) -> Result<f64> {
    if table.p00() <= 0.0 || table.p11() <= 0.0 {
        return Err(Error::DegenerateTable {
            reason: "improved objective needs p00 > 0 and p11 > 0",
        });
    }
    let roots = TableRoots::of(table);
    let t = objective_terms(&roots, c);
    if t.x * t.y < COEFFICIENT_FLOOR {
        return Err(Error::DegenerateCoefficients {
            c0_product: t.x,
            c1_product: t.y,
            floor: COEFFICIENT_FLOOR,
        });
    }
    Ok(improved_value(&roots, t))
}

/// Evaluation closure for [`objective_original`] suitable for the
/// maximizer: points below the product floor map to `-inf` so they can
/// never win a scan.
pub fn objective_original_fn(
    table: &OutcomeProbabilityTable,
) -> impl Fn(&CoefficientPoint) -> f64 + '_ {
    let roots = TableRoots::of(table);
    move |c| {
        let t = objective_terms(&roots, c);
        if t.x < COEFFICIENT_FLOOR || t.y < COEFFICIENT_FLOOR {
            f64::NEG_INFINITY
        } else {
            original_value(&roots, t)
        }
    }
}

/// Evaluation closure for [`objective_improved`], masked the same way.
pub fn objective_improved_fn(
    table: &OutcomeProbabilityTable,
) -> impl Fn(&CoefficientPoint) -> f64 + '_ {
    let roots = TableRoots::of(table);
    move |c| {
        let t = objective_terms(&roots, c);
        if t.x * t.y < COEFFICIENT_FLOOR {
            f64::NEG_INFINITY
        } else {
            improved_value(&roots, t)
        }
    }
}

/// Ceiling on the gap quantity from the overlap magnitude alone.
pub fn trivial_clamp(table: &OutcomeProbabilityTable) -> f64 {
    let s = table.p00().sqrt() + table.p11().sqrt();
    s * s
}

/// Original bound: constrained maximum of [`objective_original`], capped by
/// [`trivial_clamp`].
pub fn delta_original(
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
) -> Result<DeltaBound> {
    delta_original_with(table, settings, SearchStrategy::GridRefine)
}

/// [`delta_original`] with an explicit search strategy.
pub fn delta_original_with(
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
    strategy: SearchStrategy,
) -> Result<DeltaBound> {
    let clamp = trivial_clamp(table);
    let objective = objective_original_fn(table);
    let found = match optimizer::run(&objective, table, settings, strategy) {
        Ok(found) => found,
        // Feasible points exist but all sit below the product floor; the
        // clamp is still a valid bound.
        Err(Error::BelowFloor { .. }) => {
            return Ok(DeltaBound {
                delta: clamp,
                source: DeltaSource::TrivialClamp,
                omega_max: None,
                f_max: None,
                argmax: None,
            });
        }
        Err(e) => return Err(e),
    };
    if found.value <= clamp {
        Ok(DeltaBound {
            delta: found.value.max(0.0),
            source: DeltaSource::Original,
            omega_max: None,
            f_max: Some(found.value),
            argmax: Some(found.argmax),
        })
    } else {
        Ok(DeltaBound {
            delta: clamp,
            source: DeltaSource::TrivialClamp,
            omega_max: None,
            f_max: Some(found.value),
            argmax: Some(found.argmax),
        })
    }
}

/// Improved bound: constrained maximum of [`objective_improved`]. Returns
/// `None` when the maximum is non-negative (the sign condition behind the
/// bound fails) and the bound therefore does not apply.
pub fn delta_improved(
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
) -> Result<Option<DeltaBound>> {
    delta_improved_with(table, settings, SearchStrategy::GridRefine)
}

/// [`delta_improved`] with an explicit search strategy.
pub fn delta_improved_with(
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
    strategy: SearchStrategy,
) -> Result<Option<DeltaBound>> {
    if table.p00() <= 0.0 || table.p11() <= 0.0 {
        return Err(Error::DegenerateTable {
            reason: "improved bound needs p00 > 0 and p11 > 0",
        });
    }
    let objective = objective_improved_fn(table);
    let found = match optimizer::run(&objective, table, settings, strategy) {
        Ok(found) => found,
        // No admissible point means no certificate that the overlap is
        // bounded away from zero: the improved route cannot be used.
        Err(Error::BelowFloor { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    if found.value >= 0.0 {
        return Ok(None);
    }
    let overlap = found.value.abs();
    let delta =
        (table.p00() + table.p11() - 2.0 * (table.p00() * table.p11()).sqrt() * overlap).max(0.0);
    Ok(Some(DeltaBound {
        delta,
        source: DeltaSource::Improved,
        omega_max: Some(found.value),
        f_max: None,
        argmax: Some(found.argmax),
    }))
}

/// Tightest available bound: the minimum of the original bound and, where
/// applicable, the improved bound. This is the delta fed to the phase
/// error estimate.
pub fn delta_best(
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
) -> Result<DeltaBound> {
    delta_best_with(table, settings, SearchStrategy::GridRefine)
}

/// [`delta_best`] with an explicit search strategy.
pub fn delta_best_with(
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
    strategy: SearchStrategy,
) -> Result<DeltaBound> {
    let original = delta_original_with(table, settings, strategy)?;
    let improved = if table.p00() > 0.0 && table.p11() > 0.0 {
        delta_improved_with(table, settings, strategy)?
    } else {
        None
    };
    Ok(DeltaBound::tighter(original, improved))
}
