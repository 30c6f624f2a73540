use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Smallest positive time evaluated; the kernel tends to a delta as `t -> 0+`.
pub const MIN_TIME: f64 = 1e-3;

/// Cap on the total number of grid points.
pub const MAX_POINTS: usize = 1 << 22;

/// One axis: `x in [-L, L)` sampled at `N` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub extent: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(extent: f64, points: usize) -> Result<Self> {
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(Error::InvalidGrid(format!("extent must be positive, got {extent}")));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "point count must be a power of two >= 2, got {points}"
            )));
        }
        Ok(Self { extent, points })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.extent / self.points as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        -self.extent + k as f64 * self.step()
    }

    pub fn dual_step(&self) -> f64 {
        PI / self.extent
    }

    pub fn y(&self, j: usize) -> f64 {
        (j as f64 - (self.points / 2) as f64) * self.dual_step()
    }

    /// Index of the sample at `-x_k`, using periodicity for `k = 0`.
    pub fn mirror(&self, k: usize) -> usize {
        (self.points - k) % self.points
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    axes: Vec<Axis>,
    t: f64,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>, t: f64) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::InvalidGrid("at least one axis is required".into()));
        }
        if !t.is_finite() {
            return Err(Error::InvalidGrid(format!("time must be finite, got {t}")));
        }
        for a in &axes {
            Axis::new(a.extent, a.points)?;
        }
        let total = axes
            .iter()
            .try_fold(1usize, |acc, a| acc.checked_mul(a.points))
            .filter(|&p| p <= MAX_POINTS)
            .ok_or_else(|| {
                Error::InvalidGrid(format!("more than {MAX_POINTS} points in total"))
            })?;
        debug_assert!(total > 0);
        Ok(Self { axes, t })
    }

    /// Same extent and point count on every axis.
    pub fn uniform(n: usize, extent: f64, points: usize, t: f64) -> Result<Self> {
        Self::new(vec![Axis::new(extent, points)?; n], t)
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn with_t(&self, t: f64) -> Self {
        Self {
            axes: self.axes.clone(),
            t,
        }
    }

    /// Same extents, point counts multiplied by `2^shift` (or divided when negative).
    pub fn rescaled(&self, shift: i32) -> Result<Self> {
        let axes = self
            .axes
            .iter()
            .map(|a| {
                let points = if shift >= 0 {
                    a.points << shift
                } else {
                    a.points >> (-shift)
                };
                Axis::new(a.extent, points)
            })
            .collect::<Result<_>>()?;
        Self::new(axes, self.t)
    }

    pub fn total_points(&self) -> usize {
        self.axes.iter().map(|a| a.points).product()
    }

    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(Axis::step).product()
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    /// Row-major multi-index of a flat index (last axis fastest).
    pub fn unravel(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.n()];
        for (slot, a) in idx.iter_mut().zip(&self.axes).rev() {
            *slot = flat % a.points;
            flat /= a.points;
        }
        idx
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, a)| acc * a.points + i)
    }

    pub fn x_at(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.axes).map(|(&k, a)| a.x(k)).collect()
    }

    pub fn y_at(&self, idx: &[usize]) -> Vec<f64> {
        idx.iter().zip(&self.axes).map(|(&j, a)| a.y(j)).collect()
    }

    /// True when some coordinate of the multi-index is on the first or last sample.
    pub fn on_boundary(&self, idx: &[usize]) -> bool {
        idx.iter()
            .zip(&self.axes)
            .any(|(&k, a)| k == 0 || k + 1 == a.points)
    }

    /// Flat index of the point at `-x`.
    pub fn mirror(&self, flat: usize) -> usize {
        let idx: Vec<usize> = self
            .unravel(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&k, a)| a.mirror(k))
            .collect();
        self.ravel(&idx)
    }
}
