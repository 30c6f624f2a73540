use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::fourier::{from_planes, to_planes, transform_planes, Direction};
use super::grid::{Axis, GridSpec, MIN_TIME};
use crate::algebra::CCDNumber;
use crate::charfunc::{functional_exponent, symbol};
use crate::error::{Error, Result};
use crate::explog::exp_l_closed;
use crate::spectral::{check_alpha, diagonalize, AdmissibilityReport, MeasureSpec};

/// Target magnitude of the transformed integrand at the edge of the dual grid.
pub const DECAY_TARGET: f64 = 1e-12;

/// `-ln` of the relative tail kept outside the spatial extent by [`suggest_grid`].
const SPATIAL_TAIL_LOG: f64 = 32.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelField {
    pub grid: GridSpec,
    pub level: u8,
    #[serde(skip)]
    pub values: Vec<CCDNumber>,
    /// Largest `||integrand||` on the boundary of the dual grid.
    pub boundary_decay: f64,
}

impl KernelField {
    pub fn zeros(grid: GridSpec, level: u8) -> Self {
        let values = vec![CCDNumber::zero(level); grid.total_points()];
        Self {
            grid,
            level,
            values,
            boundary_decay: 0.0,
        }
    }

    pub fn value_at(&self, idx: &[usize]) -> &CCDNumber {
        &self.values[self.grid.ravel(idx)]
    }

    /// Grid integral of the whole field.
    pub fn integral(&self) -> CCDNumber {
        let mut acc = CCDNumber::zero(self.level);
        for v in &self.values {
            acc += v;
        }
        acc.scale(self.grid.cell_volume())
    }

    /// Grid integral of the `i_0` real component.
    pub fn mass(&self) -> f64 {
        self.values.iter().map(CCDNumber::re_scalar).sum::<f64>() * self.grid.cell_volume()
    }

    /// Sum over the `2^(r+1)` real components of `int |component| dx`.
    pub fn variation(&self) -> f64 {
        let s: f64 = self
            .values
            .iter()
            .flat_map(|v| v.interleaved().collect::<Vec<_>>())
            .map(f64::abs)
            .sum();
        s * self.grid.cell_volume()
    }

    /// Largest absolute real-component difference from `f` over the grid.
    pub fn max_abs_deviation(&self, f: impl Fn(&[f64]) -> CCDNumber + Sync) -> f64 {
        (0..self.values.len())
            .into_par_iter()
            .map(|i| {
                let x = self.grid.x_at(&self.grid.unravel(i));
                (&self.values[i] - &f(&x)).max_abs()
            })
            .reduce(|| 0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(CCDNumber::is_finite)
    }
}

/// Sample `g` on the dual grid and apply the inverse transform.
fn inverse_of<G>(grid: &GridSpec, level: u8, g: G) -> Result<KernelField>
where
    G: Fn(&[f64]) -> Result<CCDNumber> + Sync,
{
    let samples: Vec<CCDNumber> = (0..grid.total_points())
        .into_par_iter()
        .map(|i| g(&grid.y_at(&grid.unravel(i))))
        .collect::<Result<_>>()?;
    let boundary_decay = samples
        .iter()
        .enumerate()
        .filter(|(i, _)| grid.on_boundary(&grid.unravel(*i)))
        .map(|(_, v)| v.norm())
        .fold(0.0, f64::max);
    let mut planes = to_planes(&samples, level);
    transform_planes(grid, &mut planes, Direction::Inverse);
    let field = KernelField {
        grid: grid.clone(),
        level,
        values: from_planes(&planes, level),
        boundary_decay,
    };
    if !field.is_finite() {
        return Err(Error::NonFinite("kernel field".into()));
    }
    Ok(field)
}

fn check_inputs(spec: &MeasureSpec, grid: &GridSpec) -> Result<()> {
    if grid.n() != spec.n() {
        return Err(Error::dim("grid axes", spec.n(), grid.n()));
    }
    Ok(())
}

fn require_admissible(report: &AdmissibilityReport) -> Result<()> {
    if report.pass {
        Ok(())
    } else {
        Err(Error::Inadmissible {
            blocks: report.failing_blocks(),
        })
    }
}

/// Fundamental solution on `grid` at time `grid.t()`.
///
/// Zero for `t < 0`; times in `[0, MIN_TIME)` are refused. Specs failing
/// condition (alpha) are refused unless `force` is set.
pub fn eval_kernel(spec: &MeasureSpec, grid: &GridSpec, force: bool) -> Result<KernelField> {
    check_inputs(spec, grid)?;
    let t = grid.t();
    if t < 0.0 {
        return Ok(KernelField::zeros(grid.clone(), spec.level()));
    }
    if t < MIN_TIME {
        return Err(Error::TimeTooSmall(t));
    }
    if !force {
        require_admissible(&check_alpha(spec)?)?;
    }
    inverse_of(grid, spec.level(), |y| {
        Ok(exp_l_closed(&symbol(spec, y, t)?.value))
    })
}

/// Inverse transform of the characteristic functional of `mu_{Ut, pt}`,
/// i.e. the density of its real-slice part.
pub fn eval_density(spec: &MeasureSpec, grid: &GridSpec) -> Result<KernelField> {
    check_inputs(spec, grid)?;
    let t = grid.t();
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    if t < MIN_TIME {
        return Err(Error::TimeTooSmall(t));
    }
    require_admissible(&check_alpha(spec)?)?;
    inverse_of(grid, spec.level(), |y| {
        Ok(exp_l_closed(&functional_exponent(spec, y, t)?))
    })
}

/// Grid sized from the admissibility data of each block.
///
/// Per block the kernel is a combination of Gaussians with complex variances
/// `c = Re(a_0) +- I q`; the spatial extent covers the widest of them
/// (effective variance `|c|^2 / Re c`) plus the drift or shift, and the point
/// count brings the integrand below [`DECAY_TARGET`] at the dual-grid edge.
pub fn suggest_grid(spec: &MeasureSpec, t: f64) -> Result<GridSpec> {
    if !(t >= MIN_TIME) {
        return Err(Error::TimeTooSmall(t));
    }
    let report = check_alpha(spec)?;
    require_admissible(&report)?;
    let drift = spec.drift();
    let mut axes = Vec::with_capacity(spec.n());
    for (j, (block, adm)) in spec.blocks().iter().zip(&report.blocks).enumerate() {
        let d = diagonalize(block.b())?;
        let lambda_max = *d.lambdas.last().unwrap();
        let lambda_min = d.lambdas[0];
        let i = Complex64::new(0.0, 1.0);
        let spread = [adm.re_a0 + i * adm.q, adm.re_a0 - i * adm.q]
            .iter()
            .map(|c| c.norm_sqr() / c.re)
            .fold(0.0, f64::max);
        let y_edge =
            (2.0 * (std::f64::consts::SQRT_2 / DECAY_TARGET).ln() / (adm.margin * lambda_min * t))
                .sqrt();
        for k in spec.block_range(j) {
            let shift = drift[k].abs().max(spec.p()[k].abs()) * t;
            let extent = ((2.0 * spread * lambda_max * t * SPATIAL_TAIL_LOG).sqrt() + shift).ceil();
            let needed = (2.0 * extent * y_edge / std::f64::consts::PI).ceil() as usize;
            axes.push(Axis::new(extent, needed.next_power_of_two().max(16))?);
        }
    }
    GridSpec::new(axes, t)
}
