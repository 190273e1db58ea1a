//! Brute-force grid oracles.
//!
//! [`p3_exhaustive`] searches user 1's slot-1 power with user 2 responding
//! optimally and user 1's slot-2 power set by its rate constraint.
//! [`joint_oracle`] searches the original four-power problem directly: for a
//! fixed pair `(p11, p22)` each user's cross-slot power enters the objective
//! linearly and is pinned by that user's rate constraint, so a 2-D grid over
//! `(p11, p22)` covers the problem exactly.
//!
//! Both oracles scan a uniform grid whose end points are the OMA powers,
//! then zoom twice into a ±2-cell window around the incumbent at 10× finer
//! resolution. Ties go to the lowest grid index.

use rayon::prelude::*;
use serde::Serialize;

use crate::closed_form::{oma_power, u2_best_response};
use crate::error::{ModelError, Result};
use crate::model::{total_power, ChannelPair, PowerAllocation, RateTarget};

pub const MIN_GRID_POINTS: usize = 100;
pub const REFINEMENT_PASSES: usize = 2;
pub const REFINEMENT_ZOOM: usize = 10;
pub const REFINEMENT_HALF_WIDTH: usize = 2;

/// How a grid search was laid out.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub grid_n: usize,
    pub refinement_passes: usize,
    /// Search range per dimension of the initial grid.
    pub ranges: Vec<(f64, f64)>,
    /// Step per dimension of the initial grid.
    pub coarse_steps: Vec<f64>,
    /// Step per dimension of the last refinement pass.
    pub final_steps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub alloc: PowerAllocation,
    /// Sum of all four powers.
    pub total: f64,
    /// The quantity the search minimized (user 1's power for `P3`, the
    /// total for the joint oracle).
    pub objective: f64,
    pub grid_spec: GridSpec,
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < MIN_GRID_POINTS {
        Err(ModelError::GridTooSmall {
            got: grid_n,
            min: MIN_GRID_POINTS,
        })
    } else {
        Ok(())
    }
}

/// `n` points from `lo` to `hi` inclusive, with `hi` hit exactly.
fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + i as f64 * step })
        .collect()
}

/// Window of ±`REFINEMENT_HALF_WIDTH` cells around `centre`, clipped to
/// `[lo, hi]`, sampled at `REFINEMENT_ZOOM` times the current resolution.
fn zoom_window(centre: f64, step: f64, lo: f64, hi: f64) -> Vec<f64> {
    let half = REFINEMENT_HALF_WIDTH as f64 * step;
    let (a, b) = ((centre - half).max(lo), (centre + half).min(hi));
    let cells = ((b - a) / step * REFINEMENT_ZOOM as f64).round().max(1.0) as usize;
    linspace(a, b, cells + 1)
}

/// `e^R / (1 + p·h) - 1` written as `h·(p_oma - p)/(1 + p·h)`: the SINR
/// factor a user still needs from its other slot after spending `p` on gain
/// `h`. Zero at the OMA power and clamped at zero beyond it.
fn remaining_sinr(p: f64, h: f64, p_oma: f64) -> f64 {
    (h * (p_oma - p)).max(0.0) / (1.0 + p * h)
}

/// User 1's power `x + y` at slot-1 power `x`, with user 2 responding
/// optimally to `x` and `y` the smallest slot-2 power meeting user 1's rate.
pub fn p3_objective(x: f64, ch: &ChannelPair, rate: RateTarget) -> (f64, PowerAllocation) {
    let (h1, h2) = (ch.h1(), ch.h2());
    let u2 = u2_best_response(x, h2, rate);
    let y = remaining_sinr(x, h1, oma_power(h1, rate)) * (u2.p22 * h2 + 1.0) / h2;
    let alloc = PowerAllocation {
        p11: x,
        p12: y,
        p21: u2.p21,
        p22: u2.p22,
    };
    (x + y, alloc)
}

/// Index and value of the smallest entry; ties go to the lowest index.
fn argmin(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .copied()
        .enumerate()
        .fold(
            (0, f64::INFINITY),
            |best, (i, v)| if v < best.1 { (i, v) } else { best },
        )
}

/// Exhaustive search over user 1's slot-1 power on `[0, (e^R - 1)/h1]`.
pub fn p3_exhaustive(ch: &ChannelPair, rate: RateTarget, grid_n: usize) -> Result<OracleResult> {
    check_grid(grid_n)?;
    let x_max = oma_power(ch.h1(), rate);
    let evaluate = |grid: &[f64]| -> Vec<f64> {
        grid.par_iter()
            .map(|&x| p3_objective(x, ch, rate).0)
            .collect()
    };

    let mut grid = linspace(0.0, x_max, grid_n);
    let coarse_step = x_max / (grid_n - 1) as f64;
    let (i, mut best) = argmin(&evaluate(&grid));
    let mut best_x = grid[i];
    let mut step = coarse_step;
    for _ in 0..REFINEMENT_PASSES {
        grid = zoom_window(best_x, step, 0.0, x_max);
        step /= REFINEMENT_ZOOM as f64;
        let (i, value) = argmin(&evaluate(&grid));
        if value < best {
            best = value;
            best_x = grid[i];
        }
    }

    let (objective, alloc) = p3_objective(best_x, ch, rate);
    Ok(OracleResult {
        total: total_power(&alloc),
        alloc,
        objective,
        grid_spec: GridSpec {
            grid_n,
            refinement_passes: REFINEMENT_PASSES,
            ranges: vec![(0.0, x_max)],
            coarse_steps: vec![coarse_step],
            final_steps: vec![step],
        },
    })
}

/// Cheapest feasible four-power allocation for a fixed `(p11, p22)`.
fn joint_allocation(p11: f64, p22: f64, ch: &ChannelPair, oma: (f64, f64)) -> PowerAllocation {
    let (h1, h2) = (ch.h1(), ch.h2());
    PowerAllocation {
        p11,
        p12: remaining_sinr(p11, h1, oma.0) * (p22 * h2 + 1.0) / h2,
        p21: remaining_sinr(p22, h2, oma.1) * (p11 * h2 + 1.0) / h2,
        p22,
    }
}

/// Row-major argmin over `rows × cols`, evaluated in parallel; ties go to
/// the lowest `(row, col)`.
fn argmin_2d(
    rows: &[f64],
    cols: &[f64],
    f: impl Fn(f64, f64) -> f64 + Sync,
) -> ((usize, usize), f64) {
    rows.par_iter()
        .enumerate()
        .map(|(i, &u)| {
            let (j, v) = cols
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |best, (j, &w)| {
                    let value = f(u, w);
                    if value < best.1 {
                        (j, value)
                    } else {
                        best
                    }
                });
            ((i, j), v)
        })
        .reduce(
            || ((usize::MAX, usize::MAX), f64::INFINITY),
            |a, b| {
                if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) {
                    b
                } else {
                    a
                }
            },
        )
}

/// Grid search of the joint problem over `(p11, p22)`.
pub fn joint_oracle(ch: &ChannelPair, rate: RateTarget, grid_n: usize) -> Result<OracleResult> {
    check_grid(grid_n)?;
    let oma = (oma_power(ch.h1(), rate), oma_power(ch.h2(), rate));
    let total_at = |p11: f64, p22: f64| total_power(&joint_allocation(p11, p22, ch, oma));

    let mut rows = linspace(0.0, oma.0, grid_n);
    let mut cols = linspace(0.0, oma.1, grid_n);
    let coarse = (oma.0 / (grid_n - 1) as f64, oma.1 / (grid_n - 1) as f64);
    let ((i, j), mut best) = argmin_2d(&rows, &cols, total_at);
    let mut incumbent = (rows[i], cols[j]);
    let mut step = coarse;
    for _ in 0..REFINEMENT_PASSES {
        rows = zoom_window(incumbent.0, step.0, 0.0, oma.0);
        cols = zoom_window(incumbent.1, step.1, 0.0, oma.1);
        step = (
            step.0 / REFINEMENT_ZOOM as f64,
            step.1 / REFINEMENT_ZOOM as f64,
        );
        let ((i, j), value) = argmin_2d(&rows, &cols, total_at);
        if value < best {
            best = value;
            incumbent = (rows[i], cols[j]);
        }
    }

    let alloc = joint_allocation(incumbent.0, incumbent.1, ch, oma);
    let total = total_power(&alloc);
    Ok(OracleResult {
        alloc,
        total,
        objective: total,
        grid_spec: GridSpec {
            grid_n,
            refinement_passes: REFINEMENT_PASSES,
            ranges: vec![(0.0, oma.0), (0.0, oma.1)],
            coarse_steps: vec![coarse.0, coarse.1],
            final_steps: vec![step.0, step.1],
        },
    })
}
