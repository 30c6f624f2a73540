//! Mean and covariance of `mu_{Ut, pt}` from one- and two-dimensional
//! marginal densities.
//!
//! The measure splits into a density on the real slice (shift `Re p_0`) and a
//! point mass at the remaining part `p'` of the shift. The real-slice moments
//! are trapezoid sums over kernel grids; the point mass contributes `p' t` to
//! the mean and nothing to centered second moments.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::algebra::CCDNumber;
use crate::cylinder::marginal;
use crate::error::{Error, Result};
use crate::kernel::{eval_density, Axis, GridSpec, KernelField};
use crate::spectral::{diagonalize, BlockSpec, Matrix, MeasureSpec};

/// Largest admissible `||x^2 density||` on the edge of a marginal grid.
pub const TAIL_GUARD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceRoute {
    /// Two-dimensional marginals in the original coordinates.
    Direct,
    /// Diagonalize each `B_j`, integrate in eigen-coordinates, rotate back.
    Diagonalized,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    /// Difference from the same quantity on a grid with half the points.
    pub error: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MomentReport {
    pub t: f64,
    pub route: CovarianceRoute,
    pub mean: Vec<CCDNumber>,
    pub mean_error: Vec<f64>,
    pub covariance: Vec<Vec<CCDNumber>>,
    pub covariance_error: Vec<Vec<f64>>,
    /// `p t`.
    pub expected_mean: Vec<CCDNumber>,
    /// `U t`.
    pub expected_covariance: Vec<Vec<CCDNumber>>,
}

/// `{"i0": {"re": .., "im": ..}, "i1": ...}`.
pub fn ccd_to_json(z: &CCDNumber) -> Value {
    let mut m = Map::new();
    for k in 0..z.dim() {
        let c = z.plane(k);
        m.insert(format!("i{k}"), json!({"re": c.re, "im": c.im}));
    }
    Value::Object(m)
}

impl MomentReport {
    pub fn max_mean_deviation(&self) -> f64 {
        self.mean
            .iter()
            .zip(&self.expected_mean)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_covariance_deviation(&self) -> f64 {
        self.covariance
            .iter()
            .flatten()
            .zip(self.expected_covariance.iter().flatten())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let vec = |v: &[CCDNumber]| Value::Array(v.iter().map(ccd_to_json).collect());
        let mat = |m: &[Vec<CCDNumber>]| Value::Array(m.iter().map(|r| vec(r)).collect());
        json!({
            "t": self.t,
            "route": self.route,
            "mean": vec(&self.mean),
            "mean_error": self.mean_error,
            "covariance": mat(&self.covariance),
            "covariance_error": self.covariance_error,
            "expected_mean": vec(&self.expected_mean),
            "expected_covariance": mat(&self.expected_covariance),
            "max_mean_deviation": self.max_mean_deviation(),
            "max_covariance_deviation": self.max_covariance_deviation(),
        })
    }
}

fn check_grid(spec: &MeasureSpec, grid: &GridSpec) -> Result<()> {
    if grid.n() != spec.n() {
        return Err(Error::dim("grid axes", spec.n(), grid.n()));
    }
    if !(grid.t() > 0.0) {
        return Err(Error::NonPositiveTime(grid.t()));
    }
    Ok(())
}

/// Real-slice part of the shift: `Re p_0` per coordinate.
fn real_slice(p: &[CCDNumber]) -> Vec<CCDNumber> {
    let level = p.first().map_or(0, CCDNumber::level);
    p.iter().map(|v| CCDNumber::scalar(level, v.re_scalar())).collect()
}

/// Marginal on 1-based coordinates with the shift cut down to its real slice.
fn slice_marginal(spec: &MeasureSpec, coords: &[usize]) -> Result<MeasureSpec> {
    let m = marginal(spec, coords)?;
    m.with_p(real_slice(m.p()))
}

fn sub_grid(grid: &GridSpec, coords: &[usize]) -> Result<GridSpec> {
    let axes: Vec<Axis> = coords.iter().map(|&c| grid.axes()[c - 1]).collect();
    GridSpec::new(axes, grid.t())
}

fn guard_tail(field: &KernelField, centers: &[f64]) -> Result<()> {
    let grid = &field.grid;
    let mut worst: f64 = 0.0;
    for (i, v) in field.values.iter().enumerate() {
        let idx = grid.unravel(i);
        if !grid.on_boundary(&idx) {
            continue;
        }
        let r2: f64 = grid
            .x_at(&idx)
            .iter()
            .zip(centers)
            .map(|(x, c)| (x - c) * (x - c))
            .sum();
        worst = worst.max(r2 * v.norm());
    }
    if worst > TAIL_GUARD {
        return Err(Error::GridTooSmall(format!(
            "integrand reaches {worst:e} on the grid boundary (limit {TAIL_GUARD:e}); enlarge L"
        )));
    }
    if field.boundary_decay > TAIL_GUARD {
        return Err(Error::GridTooSmall(format!(
            "transform reaches {:e} at the dual-grid edge (limit {TAIL_GUARD:e}); increase N",
            field.boundary_decay
        )));
    }
    Ok(())
}

/// `sum_x w(x) density(x) h^n`.
fn weighted_integral(field: &KernelField, w: impl Fn(&[f64]) -> f64) -> CCDNumber {
    let grid = &field.grid;
    let mut acc = CCDNumber::zero(field.level);
    for (i, v) in field.values.iter().enumerate() {
        let weight = w(&grid.x_at(&grid.unravel(i)));
        if weight != 0.0 {
            acc += &v.scale(weight);
        }
    }
    acc.scale(grid.cell_volume())
}

/// Integrate on `grid` and on the grid with half the points; returns the fine
/// value and the absolute difference. The guard applies to the fine grid only.
fn with_error(
    spec: &MeasureSpec,
    grid: &GridSpec,
    centers: &[f64],
    w: impl Fn(&[f64]) -> f64 + Copy,
) -> Result<(CCDNumber, f64)> {
    let fine = eval_density(spec, grid)?;
    guard_tail(&fine, centers)?;
    let value = weighted_integral(&fine, w);
    let error = match grid.rescaled(-1) {
        Ok(coarse) => (&value - &weighted_integral(&eval_density(spec, &coarse)?, w)).abs(),
        Err(_) => f64::NAN,
    };
    Ok((value, error))
}

/// Mean of `mu_{Ut, pt}`; `grid` supplies one axis per coordinate and `t`.
pub fn estimate_mean(spec: &MeasureSpec, grid: &GridSpec) -> Result<Estimate<Vec<CCDNumber>>> {
    check_grid(spec, grid)?;
    let t = grid.t();
    let results = (1..=spec.n())
        .into_par_iter()
        .map(|c| {
            let m = slice_marginal(spec, &[c])?;
            let g = sub_grid(grid, &[c])?;
            let center = m.p()[0].re_scalar() * t;
            let (v, e) = with_error(&m, &g, &[center], |x| x[0])?;
            let point_mass = (&spec.p()[c - 1] - &m.p()[0]).scale(t);
            Ok((&v + &point_mass, e))
        })
        .collect::<Result<Vec<_>>>()?;
    let (value, error) = results.into_iter().unzip();
    Ok(Estimate { value, error })
}

/// Covariance entries with their error estimates.
type CovarianceGrid = (Vec<Vec<CCDNumber>>, Vec<Vec<f64>>);

/// Centered second moments in the coordinates of `spec`, all pairs `k <= h`.
fn covariance_direct(spec: &MeasureSpec, grid: &GridSpec) -> Result<CovarianceGrid> {
    let n = spec.n();
    let t = grid.t();
    let centers: Vec<f64> = spec.p().iter().map(|p| p.re_scalar() * t).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (k..n).map(move |h| (k, h))).collect();
    let entries = pairs
        .par_iter()
        .map(|&(k, h)| {
            if k == h {
                let m = slice_marginal(spec, &[k + 1])?;
                let g = sub_grid(grid, &[k + 1])?;
                let c = centers[k];
                with_error(&m, &g, &[c], move |x| (x[0] - c) * (x[0] - c))
            } else {
                let m = slice_marginal(spec, &[k + 1, h + 1])?;
                let g = sub_grid(grid, &[k + 1, h + 1])?;
                let (ck, ch) = (centers[k], centers[h]);
                with_error(&m, &g, &[ck, ch], move |x| (x[0] - ck) * (x[1] - ch))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let mut cov = vec![vec![CCDNumber::zero(spec.level()); n]; n];
    let mut err = vec![vec![0.0; n]; n];
    for (&(k, h), (v, e)) in pairs.iter().zip(entries) {
        cov[k][h] = v.clone();
        cov[h][k] = v;
        err[k][h] = e;
        err[h][k] = e;
    }
    Ok((cov, err))
}

/// Spec in eigen-coordinates `x' = Q x` (block-diagonal `Q`), with `Q`.
fn rotated(spec: &MeasureSpec) -> Result<(MeasureSpec, Matrix)> {
    let n = spec.n();
    let mut q = Matrix::zeros(n, n);
    let mut blocks = Vec::with_capacity(spec.blocks().len());
    for (j, block) in spec.blocks().iter().enumerate() {
        let d = diagonalize(block.b())?;
        let o = spec.block_range(j).start;
        for r in 0..block.m() {
            for c in 0..block.m() {
                q[(o + r, o + c)] = d.q[(r, c)];
            }
        }
        let psi = rotate_vec(&d.q, block.psi());
        blocks.push(BlockSpec::new(block.a().clone(), Matrix::diagonal(&d.lambdas), psi)?);
    }
    let p = rotate_vec(&q, spec.p());
    Ok((MeasureSpec::new(blocks, p)?, q))
}

fn rotate_vec(q: &Matrix, v: &[CCDNumber]) -> Vec<CCDNumber> {
    let level = v.first().map_or(0, CCDNumber::level);
    (0..q.rows())
        .map(|r| {
            let mut acc = CCDNumber::zero(level);
            for (c, x) in v.iter().enumerate() {
                if q[(r, c)] != 0.0 {
                    acc += &x.scale(q[(r, c)]);
                }
            }
            acc
        })
        .collect()
}

/// Covariance of `mu_{Ut, pt}` with a per-entry error estimate.
pub fn estimate_covariance(
    spec: &MeasureSpec,
    grid: &GridSpec,
    route: CovarianceRoute,
) -> Result<Estimate<Vec<Vec<CCDNumber>>>> {
    check_grid(spec, grid)?;
    let (value, error) = match route {
        CovarianceRoute::Direct => covariance_direct(spec, grid)?,
        CovarianceRoute::Diagonalized => {
            let (rot, q) = rotated(spec)?;
            let (c, e) = covariance_direct(&rot, grid)?;
            let n = spec.n();
            let level = spec.level();
            // C = Q^t C' Q
            let mut value = vec![vec![CCDNumber::zero(level); n]; n];
            let mut error = vec![vec![0.0; n]; n];
            for k in 0..n {
                for h in 0..n {
                    for u in 0..n {
                        for v in 0..n {
                            let w = q[(u, k)] * q[(v, h)];
                            if w != 0.0 {
                                value[k][h] += &c[u][v].scale(w);
                                error[k][h] += w.abs() * e[u][v];
                            }
                        }
                    }
                }
            }
            (value, error)
        }
    };
    Ok(Estimate {
        value,
        error: error.into_iter().flatten().collect(),
    })
}

pub fn estimate_moments(spec: &MeasureSpec, grid: &GridSpec, route: CovarianceRoute) -> Result<MomentReport> {
    let t = grid.t();
    let mean = estimate_mean(spec, grid)?;
    let cov = estimate_covariance(spec, grid, route)?;
    let n = spec.n();
    Ok(MomentReport {
        t,
        route,
        mean: mean.value,
        mean_error: mean.error,
        covariance: cov.value,
        covariance_error: cov.error.chunks(n).map(<[f64]>::to_vec).collect(),
        expected_mean: spec.p().iter().map(|p| p.scale(t)).collect(),
        expected_covariance: spec
            .u_matrix()
            .into_iter()
            .map(|r| r.into_iter().map(|u| u.scale(t)).collect())
            .collect(),
    })
}
