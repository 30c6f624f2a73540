//! Finite-difference check that a grid kernel solves
//!
//! ```text
//! dK/dt - (1/2) sum_j a_j sum_{u,k in block j} b_{uk;j} d^2K/dx_u dx_k - sum_k psi_k dK/dx_k = 0
//! ```
//!
//! for `t > 0`. All coefficients multiply from the left. The drift enters with
//! the sign for which the inverse transform of `exp_l(z(y, t))` is the
//! fundamental solution.

use rayon::prelude::*;
use serde::Serialize;

use super::eval::eval_kernel;
use super::grid::GridSpec;
use crate::algebra::CCDNumber;
use crate::error::{Error, Result};
use crate::spectral::MeasureSpec;

/// Below this time a ball of radius `3 h` around the origin is skipped.
const SMALL_TIME: f64 = 0.1;

const MIN_POINTS: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub max_residual: f64,
    /// Grid point where the maximum occurs (empty when no point was checked).
    pub argmax: Vec<f64>,
    pub points_checked: usize,
    pub origin_excluded: bool,
    pub time_step: f64,
}

/// Fourth-order stencil weights for first and second derivatives.
const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];

/// Max over interior points of `||dK/dt + B K - sigma K||`, evaluating the
/// kernel at `t - dt`, `t`, `t + dt`.
pub fn pde_residual(
    spec: &MeasureSpec,
    grid: &GridSpec,
    time_step: f64,
    force: bool,
) -> Result<ResidualReport> {
    if grid.n() != spec.n() {
        return Err(Error::dim("grid axes", spec.n(), grid.n()));
    }
    if let Some(a) = grid.axes().iter().find(|a| a.points < MIN_POINTS) {
        return Err(Error::InsufficientResolution(format!(
            "{} points on an axis, at least {MIN_POINTS} needed",
            a.points
        )));
    }
    if !(time_step > 0.0) {
        return Err(Error::InvalidGrid(format!("time step must be positive, got {time_step}")));
    }
    let t = grid.t();
    let origin_excluded = t < SMALL_TIME;
    if t + time_step < 0.0 {
        return Ok(ResidualReport {
            max_residual: 0.0,
            argmax: Vec::new(),
            points_checked: 0,
            origin_excluded,
            time_step,
        });
    }
    let before = eval_kernel(spec, &grid.with_t(t - time_step), force)?;
    let now = eval_kernel(spec, grid, force)?;
    let after = eval_kernel(spec, &grid.with_t(t + time_step), force)?;

    let shape = grid.shape();
    let steps: Vec<f64> = grid.axes().iter().map(|a| a.step()).collect();
    let strides: Vec<usize> = (0..shape.len())
        .map(|a| shape[a + 1..].iter().product())
        .collect();
    let exclusion = 3.0 * steps.iter().cloned().fold(0.0, f64::max);
    let drift = spec.drift();
    let level = spec.level();
    let values = &now.values;

    let at = |flat: usize, axis: usize, off: isize| -> usize {
        (flat as isize + off * strides[axis] as isize) as usize
    };
    let first = |flat: usize, axis: usize| -> CCDNumber {
        let mut acc = CCDNumber::zero(level);
        for (w, off) in D1.iter().zip(-2isize..=2) {
            if *w != 0.0 {
                acc += &values[at(flat, axis, off)].scale(*w);
            }
        }
        acc.scale(1.0 / (12.0 * steps[axis]))
    };
    let second = |flat: usize, u: usize, k: usize| -> CCDNumber {
        let mut acc = CCDNumber::zero(level);
        if u == k {
            for (w, off) in D2.iter().zip(-2isize..=2) {
                acc += &values[at(flat, u, off)].scale(*w);
            }
            return acc.scale(1.0 / (12.0 * steps[u] * steps[u]));
        }
        for (wu, ou) in D1.iter().zip(-2isize..=2) {
            for (wk, ok) in D1.iter().zip(-2isize..=2) {
                let w = wu * wk;
                if w != 0.0 {
                    acc += &values[at(at(flat, u, ou), k, ok)].scale(w);
                }
            }
        }
        acc.scale(1.0 / (144.0 * steps[u] * steps[k]))
    };

    let interior: Vec<usize> = (0..grid.total_points())
        .filter(|&flat| {
            let idx = grid.unravel(flat);
            let inside = idx.iter().zip(&shape).all(|(&i, &n)| i >= 2 && i + 2 < n);
            if !inside {
                return false;
            }
            if origin_excluded {
                let x = grid.x_at(&idx);
                return x.iter().map(|v| v * v).sum::<f64>().sqrt() >= exclusion;
            }
            true
        })
        .collect();

    let residuals: Vec<f64> = interior
        .par_iter()
        .map(|&flat| {
            let mut r = (&after.values[flat] - &before.values[flat]).scale(0.5 / time_step);
            for (j, block) in spec.blocks().iter().enumerate() {
                let range = spec.block_range(j);
                let mut lap = CCDNumber::zero(level);
                for u in range.clone() {
                    for k in range.clone() {
                        let b = block.b()[(u - range.start, k - range.start)];
                        if b != 0.0 {
                            lap += &second(flat, u, k).scale(b);
                        }
                    }
                }
                r = &r - &(block.a() * &lap).scale(0.5);
            }
            for (k, psi) in drift.iter().enumerate() {
                if !psi.is_zero() {
                    r = &r - &(psi * &first(flat, k));
                }
            }
            r.norm()
        })
        .collect();

    let (pos, max_residual) = residuals
        .iter()
        .enumerate()
        .fold((None, 0.0), |(p, m), (i, &v)| if v > m || p.is_none() { (Some(i), v) } else { (p, m) });
    Ok(ResidualReport {
        max_residual,
        argmax: pos.map_or_else(Vec::new, |i| grid.x_at(&grid.unravel(interior[i]))),
        points_checked: interior.len(),
        origin_excluded,
        time_step,
    })
}
