//! Constrained maximization of a scalar objective over the feasible
//! coefficient region.
//!
//! The feasible set factorizes into independent constraints on `(c0, c1)`
//! and on `(c0p, c1p)`, so the scan enumerates feasible pairs per factor
//! and evaluates the objective on their cross product. Every scan also
//! injects the pairwise intersections of tightened constraint boundaries:
//! degenerate tables (for example a noiseless channel) collapse the
//! feasible region to isolated points that no uniform grid contains, and
//! those points are exactly boundary-line intersections.
//!
//! Grids use `resolution` subdivisions per axis (`resolution + 1` points
//! including both box edges), so grids at resolutions 10, 20 and 40 nest
//! exactly and the oracle maximum is monotone along them.

use crate::bounds::{
    self, CoefficientPoint, TableRoots, COEFFICIENT_FLOOR, DEFAULT_FEASIBILITY_TOL,
};
use crate::error::{Error, Result};
use crate::table::OutcomeProbabilityTable;

/// Knobs for the grid-and-refine maximizer.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct OptimizerSettings {
    /// Upper edge of the search box on every coordinate. The lower edge is
    /// the coefficient floor.
    pub box_max: f64,
    /// Subdivisions per axis in the coarse scan.
    pub coarse_resolution: u32,
    /// Shrinking local searches around each surviving seed.
    pub refinement_rounds: u32,
    /// Width multiplier per refinement round, in (0, 1).
    pub refinement_shrink: f64,
    /// Additive slack on each feasibility inequality.
    pub feasibility_tol: f64,
    /// Number of best coarse points kept for refinement.
    pub top_k_seeds: usize,
}

impl Default for OptimizerSettings {
    fn default() -> Self {
        Self {
            box_max: 4.0,
            coarse_resolution: 25,
            refinement_rounds: 3,
            refinement_shrink: 0.2,
            feasibility_tol: DEFAULT_FEASIBILITY_TOL,
            top_k_seeds: 8,
        }
    }
}

impl OptimizerSettings {
    pub fn validate(&self) -> Result<()> {
        let box_ok = self.box_max.is_finite() && self.box_max > COEFFICIENT_FLOOR;
        if !box_ok {
            return Err(Error::InvalidSettings {
                reason: "box_max must be finite and exceed the coefficient floor",
            });
        }
        if self.coarse_resolution < 2 {
            return Err(Error::InvalidSettings {
                reason: "coarse_resolution must be at least 2",
            });
        }
        let shrink_ok = self.refinement_shrink > 0.0 && self.refinement_shrink < 1.0;
        if !shrink_ok {
            return Err(Error::InvalidSettings {
                reason: "refinement_shrink must lie in (0, 1)",
            });
        }
        // NaN fails the comparison and lands here too
        let tol_ok = self.feasibility_tol >= 0.0;
        if !tol_ok {
            return Err(Error::InvalidSettings {
                reason: "feasibility_tol must be non-negative",
            });
        }
        if self.top_k_seeds == 0 {
            return Err(Error::InvalidSettings {
                reason: "top_k_seeds must be at least 1",
            });
        }
        Ok(())
    }
}

/// How a maximization result was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum SearchMode {
    GridRefine,
    DenseOracle,
}

/// Which search to run when computing a bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStrategy {
    GridRefine,
    DenseOracle { resolution: u32 },
}

/// Best feasible value found, with the point achieving it.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct MaximizationResult {
    pub value: f64,
    pub argmax: CoefficientPoint,
    /// Feasible 4-D combinations examined across all passes.
    pub feasible_points_seen: u64,
    pub mode: SearchMode,
}

/// Progress of a long oracle run, reported per slab of the outer factor.
#[derive(Debug, Clone, Copy)]
pub struct OracleProgress {
    pub done: u64,
    pub total: u64,
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    value: f64,
    point: CoefficientPoint,
}

/// Strictly better under (value desc, lexicographically smallest point).
/// The total order makes the reduction independent of evaluation order.
fn better(a: &Candidate, b: &Candidate) -> bool {
    a.value > b.value
        || (a.value == b.value && a.point.lex_cmp(&b.point) == std::cmp::Ordering::Less)
}

struct TopSeeds {
    cap: usize,
    items: Vec<Candidate>,
}

impl TopSeeds {
    fn new(cap: usize) -> Self {
        Self {
            cap,
            items: Vec::with_capacity(cap + 1),
        }
    }

    fn offer(&mut self, value: f64, point: CoefficientPoint) {
        let cand = Candidate { value, point };
        if self.items.len() == self.cap && !better(&cand, self.items.last().unwrap()) {
            return;
        }
        let mut idx = self.items.len();
        for (i, existing) in self.items.iter().enumerate() {
            if existing.value == cand.value && existing.point == cand.point {
                return; // corner duplicated onto a grid point
            }
            if better(&cand, existing) {
                idx = i;
                break;
            }
        }
        self.items.insert(idx, cand);
        self.items.truncate(self.cap);
    }

    fn best(&self) -> Option<&Candidate> {
        self.items.first()
    }
}

fn axis_grid(lo: f64, hi: f64, resolution: u32) -> Vec<f64> {
    (0..=resolution)
        .map(|k| lo + (hi - lo) * (k as f64 / resolution as f64))
        .collect()
}

fn feasible_pairs(
    axis: &[f64],
    corners: &[(f64, f64)],
    mut feasible: impl FnMut(f64, f64) -> bool,
) -> Vec<(f64, f64)> {
    let mut pairs = Vec::new();
    for &a in axis {
        for &b in axis {
            if feasible(a, b) {
                pairs.push((a, b));
            }
        }
    }
    for &(a, b) in corners {
        if feasible(a, b) {
            pairs.push((a, b));
        }
    }
    pairs
}

/// One window family of a factor: max of (lower excess, upper excess, 0).
fn window_violation(lo_term: f64, value: f64, hi_term: f64) -> f64 {
    (lo_term * lo_term - value)
        .max(value - hi_term * hi_term)
        .max(0.0)
}

type ViolationFn<'a> = Box<dyn Fn(f64, f64) -> f64 + 'a>;

/// Feasible `(c0, c1)`-style pairs of one factor.
type FactorPairs = Vec<(f64, f64)>;

fn diagnose_factor(
    roots: &TableRoots,
    table: &OutcomeProbabilityTable,
    axis: &[f64],
    first_factor: bool,
) -> String {
    let families: [(&str, ViolationFn); 3] = if first_factor {
        [
            (
                "normalization window on (c0, c1)",
                Box::new(|a: f64, b: f64| window_violation(a - b, 1.0, a + b)),
            ),
            (
                "p20 window",
                Box::new(|a, b| {
                    window_violation(
                        roots.s00 * a - roots.s10 * b,
                        table.p20(),
                        roots.s00 * a + roots.s10 * b,
                    )
                }),
            ),
            (
                "p21 window",
                Box::new(|a, b| {
                    window_violation(
                        roots.s01 * a - roots.s11 * b,
                        table.p21(),
                        roots.s01 * a + roots.s11 * b,
                    )
                }),
            ),
        ]
    } else {
        [
            (
                "normalization window on (c0p, c1p)",
                Box::new(|a: f64, b: f64| window_violation(a - b, 1.0, a + b)),
            ),
            (
                "p02 window",
                Box::new(|a, b| {
                    window_violation(
                        roots.s00 * a - roots.s01 * b,
                        table.p02(),
                        roots.s00 * a + roots.s01 * b,
                    )
                }),
            ),
            (
                "p12 window",
                Box::new(|a, b| {
                    window_violation(
                        roots.s10 * a - roots.s11 * b,
                        table.p12(),
                        roots.s10 * a + roots.s11 * b,
                    )
                }),
            ),
        ]
    };

    let mut best_pair = (axis[0], axis[0]);
    let mut best_worst = f64::INFINITY;
    for &a in axis {
        for &b in axis {
            let worst = families.iter().map(|(_, f)| f(a, b)).fold(0.0, f64::max);
            if worst < best_worst {
                best_worst = worst;
                best_pair = (a, b);
            }
        }
    }
    let violated: Vec<&str> = families
        .iter()
        .filter(|(_, f)| f(best_pair.0, best_pair.1) > 0.0)
        .map(|(name, _)| *name)
        .collect();
    format!(
        "closest grid point ({:.6}, {:.6}) still violates {} by {:.3e}",
        best_pair.0,
        best_pair.1,
        violated.join(" and "),
        best_worst
    )
}

struct Scan<'a> {
    objective: &'a dyn Fn(&CoefficientPoint) -> f64,
    roots: TableRoots,
    table: &'a OutcomeProbabilityTable,
    tol: f64,
    lo: f64,
    hi: f64,
    seen: u64,
}

impl<'a> Scan<'a> {
    fn factor_pairs(&mut self, axis: &[f64], with_corners: bool) -> (FactorPairs, FactorPairs) {
        let (corners_a, corners_b) = if with_corners {
            let lines_a = bounds::boundary_lines_first(&self.roots, self.table);
            let lines_b = bounds::boundary_lines_second(&self.roots, self.table);
            (
                bounds::corner_candidates(&lines_a, self.lo, self.hi),
                bounds::corner_candidates(&lines_b, self.lo, self.hi),
            )
        } else {
            (Vec::new(), Vec::new())
        };
        let roots = self.roots;
        let table = self.table;
        let tol = self.tol;
        let fa = feasible_pairs(axis, &corners_a, |a, b| {
            bounds::feasible_first(&roots, table, a, b, tol)
        });
        let fb = feasible_pairs(axis, &corners_b, |a, b| {
            bounds::feasible_second(&roots, table, a, b, tol)
        });
        (fa, fb)
    }

    /// Cross-evaluates two factor sets, folding every finite value into
    /// `seeds` and reporting progress per outer chunk.
    fn cross(
        &mut self,
        fa: &[(f64, f64)],
        fb: &[(f64, f64)],
        seeds: &mut TopSeeds,
        progress: &mut dyn FnMut(OracleProgress),
    ) {
        let total = fa.len() as u64;
        let stride = (fa.len() / 16).max(1);
        for (row, &(c0, c1)) in fa.iter().enumerate() {
            for &(c0p, c1p) in fb {
                let point = CoefficientPoint { c0, c1, c0p, c1p };
                let value = (self.objective)(&point);
                if value.is_finite() {
                    seeds.offer(value, point);
                }
            }
            if (row + 1) % stride == 0 {
                progress(OracleProgress {
                    done: row as u64 + 1,
                    total,
                });
            }
        }
        self.seen += fa.len() as u64 * fb.len() as u64;
    }

    fn infeasible_error(&mut self, axis: &[f64], fa_empty: bool, fb_empty: bool) -> Error {
        let mut parts = Vec::new();
        if fa_empty {
            parts.push(diagnose_factor(&self.roots, self.table, axis, true));
        }
        if fb_empty {
            parts.push(diagnose_factor(&self.roots, self.table, axis, false));
        }
        Error::Infeasible {
            detail: parts.join("; "),
        }
    }
}

fn search(
    objective: &dyn Fn(&CoefficientPoint) -> f64,
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
    resolution: u32,
    refine: bool,
    progress: &mut dyn FnMut(OracleProgress),
) -> Result<MaximizationResult> {
    settings.validate()?;
    if resolution < 2 {
        return Err(Error::InvalidSettings {
            reason: "resolution must be at least 2",
        });
    }
    let lo = COEFFICIENT_FLOOR;
    let hi = settings.box_max;
    let mut scan = Scan {
        objective,
        roots: TableRoots::of(table),
        table,
        tol: settings.feasibility_tol,
        lo,
        hi,
        seen: 0,
    };

    let axis = axis_grid(lo, hi, resolution);
    let (fa, fb) = scan.factor_pairs(&axis, true);
    if fa.is_empty() || fb.is_empty() {
        return Err(scan.infeasible_error(&axis, fa.is_empty(), fb.is_empty()));
    }

    let seed_cap = if refine { settings.top_k_seeds } else { 1 };
    let mut seeds = TopSeeds::new(seed_cap);
    scan.cross(&fa, &fb, &mut seeds, progress);
    let Some(coarse_best) = seeds.best().copied() else {
        // Feasible points exist, yet every objective value was masked.
        return Err(Error::BelowFloor {
            floor: COEFFICIENT_FLOOR,
        });
    };

    let mut best = coarse_best;
    if refine {
        let span = hi - lo;
        for seed in seeds.items.clone() {
            let mut local_best = seed;
            let mut width = span;
            for _ in 0..settings.refinement_rounds {
                width *= settings.refinement_shrink;
                let center = local_best.point;
                let local_axis = |c: f64| {
                    let l = (c - width / 2.0).max(lo);
                    let h = (c + width / 2.0).min(hi);
                    axis_grid(l, h, resolution)
                };
                let ax_first: Vec<f64> = local_axis(center.c0);
                let ax_c1 = local_axis(center.c1);
                let ax_c0p = local_axis(center.c0p);
                let ax_c1p = local_axis(center.c1p);

                let mut fa_local = Vec::new();
                for &a in &ax_first {
                    for &b in &ax_c1 {
                        if bounds::feasible_first(&scan.roots, table, a, b, scan.tol) {
                            fa_local.push((a, b));
                        }
                    }
                }
                let mut fb_local = Vec::new();
                for &a in &ax_c0p {
                    for &b in &ax_c1p {
                        if bounds::feasible_second(&scan.roots, table, a, b, scan.tol) {
                            fb_local.push((a, b));
                        }
                    }
                }
                scan.seen += fa_local.len() as u64 * fb_local.len() as u64;
                for &(c0, c1) in &fa_local {
                    for &(c0p, c1p) in &fb_local {
                        let point = CoefficientPoint { c0, c1, c0p, c1p };
                        let value = (objective)(&point);
                        if value.is_finite() {
                            let cand = Candidate { value, point };
                            if better(&cand, &local_best) {
                                local_best = cand;
                            }
                        }
                    }
                }
            }
            if better(&local_best, &best) {
                best = local_best;
            }
        }
    }

    Ok(MaximizationResult {
        value: best.value,
        argmax: best.point,
        feasible_points_seen: scan.seen,
        mode: if refine {
            SearchMode::GridRefine
        } else {
            SearchMode::DenseOracle
        },
    })
}

/// Coarse scan of the box at `coarse_resolution` subdivisions per axis,
/// followed by shrinking local grid searches around the best
/// `top_k_seeds` feasible points. Deterministic for fixed inputs.
pub fn maximize<F>(
    objective: F,
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
) -> Result<MaximizationResult>
where
    F: Fn(&CoefficientPoint) -> f64,
{
    search(
        &objective,
        table,
        settings,
        settings.coarse_resolution,
        true,
        &mut |_| {},
    )
}

/// Exhaustive scan at the given resolution with no refinement; the slow
/// verification mode used to cross-check [`maximize`].
pub fn dense_oracle<F>(
    objective: F,
    table: &OutcomeProbabilityTable,
    resolution: u32,
    settings: &OptimizerSettings,
) -> Result<MaximizationResult>
where
    F: Fn(&CoefficientPoint) -> f64,
{
    search(&objective, table, settings, resolution, false, &mut |_| {})
}

/// [`dense_oracle`] with a progress callback for long runs.
pub fn dense_oracle_with_progress<F>(
    objective: F,
    table: &OutcomeProbabilityTable,
    resolution: u32,
    settings: &OptimizerSettings,
    progress: &mut dyn FnMut(OracleProgress),
) -> Result<MaximizationResult>
where
    F: Fn(&CoefficientPoint) -> f64,
{
    search(&objective, table, settings, resolution, false, progress)
}

/// Strategy dispatch used by the bound computations.
pub(crate) fn run(
    objective: &dyn Fn(&CoefficientPoint) -> f64,
    table: &OutcomeProbabilityTable,
    settings: &OptimizerSettings,
    strategy: SearchStrategy,
) -> Result<MaximizationResult> {
    match strategy {
        SearchStrategy::GridRefine => search(
            objective,
            table,
            settings,
            settings.coarse_resolution,
            true,
            &mut |_| {},
        ),
        SearchStrategy::DenseOracle { resolution } => {
            search(objective, table, settings, resolution, false, &mut |_| {})
        }
    }
}
