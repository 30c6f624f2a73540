//! Componentwise transforms: each of the `2^r` complex planes
//! (coefficient of `i_k` in the real half, plus `I` times the coefficient of
//! `i_k` in the `I` half) is transformed as an ordinary complex function.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::grid::GridSpec;
use crate::algebra::CCDNumber;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    /// `x -> y`, kernel `exp(+I y x)`.
    Forward,
    /// `y -> x`, kernel `exp(-I y x) / (2 pi)`.
    Inverse,
}

pub(crate) fn to_planes(values: &[CCDNumber], level: u8) -> Vec<Vec<Complex64>> {
    (0..1usize << level)
        .map(|k| values.iter().map(|v| v.plane(k)).collect())
        .collect()
}

pub(crate) fn from_planes(planes: &[Vec<Complex64>], level: u8) -> Vec<CCDNumber> {
    let len = planes.first().map_or(0, Vec::len);
    (0..len)
        .map(|i| {
            let mut z = CCDNumber::zero(level);
            for (k, plane) in planes.iter().enumerate() {
                z.set_plane(k, plane[i]);
            }
            z
        })
        .collect()
}

fn sign(k: usize) -> f64 {
    if k & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Transform every plane in place along every axis.
pub(crate) fn transform_planes(grid: &GridSpec, planes: &mut [Vec<Complex64>], dir: Direction) {
    let mut planner = FftPlanner::new();
    let plans: Vec<Arc<dyn Fft<f64>>> = grid
        .axes()
        .iter()
        .map(|a| match dir {
            Direction::Forward => planner.plan_fft_inverse(a.points),
            Direction::Inverse => planner.plan_fft_forward(a.points),
        })
        .collect();
    planes
        .par_iter_mut()
        .for_each(|plane| transform_plane(grid, plane, &plans, dir));
}

fn transform_plane(
    grid: &GridSpec,
    data: &mut [Complex64],
    plans: &[Arc<dyn Fft<f64>>],
    dir: Direction,
) {
    let shape = grid.shape();
    let total = data.len();
    for (axis, plan) in plans.iter().enumerate() {
        let n = shape[axis];
        let half = n / 2;
        let stride: usize = shape[axis + 1..].iter().product();
        let a = grid.axes()[axis];
        let scale = match dir {
            Direction::Forward => a.step(),
            Direction::Inverse => 1.0 / (n as f64 * a.step()),
        };
        let mut buf = vec![Complex64::new(0.0, 0.0); n];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for outer in 0..total / (n * stride) {
            for inner in 0..stride {
                let base = outer * n * stride + inner;
                // forward: input carries (-1)^k, output (-1)^(j - N/2);
                // inverse: the same two factors with roles swapped
                for (k, slot) in buf.iter_mut().enumerate() {
                    let s = match dir {
                        Direction::Forward => sign(k),
                        Direction::Inverse => sign(k + half),
                    };
                    *slot = data[base + k * stride] * s;
                }
                plan.process_with_scratch(&mut buf, &mut scratch);
                for (k, v) in buf.iter().enumerate() {
                    let s = match dir {
                        Direction::Forward => sign(k + half),
                        Direction::Inverse => sign(k),
                    };
                    data[base + k * stride] = v * (s * scale);
                }
            }
        }
    }
}

fn transform(grid: &GridSpec, values: &[CCDNumber], dir: Direction) -> Result<Vec<CCDNumber>> {
    if values.len() != grid.total_points() {
        return Err(Error::dim("grid samples", grid.total_points(), values.len()));
    }
    let Some(first) = values.first() else {
        return Ok(Vec::new());
    };
    let level = first.level();
    if let Some(bad) = values.iter().find(|v| v.level() != level) {
        return Err(Error::LevelMismatch(level, bad.level()));
    }
    let mut planes = to_planes(values, level);
    transform_planes(grid, &mut planes, dir);
    Ok(from_planes(&planes, level))
}

/// `(F f)(y_j) = sum_k f(x_k) exp(I (y_j, x_k)) h^n`, samples on the dual grid.
pub fn fourier_forward(grid: &GridSpec, values: &[CCDNumber]) -> Result<Vec<CCDNumber>> {
    transform(grid, values, Direction::Forward)
}

/// `f(x_k) = (2 pi)^-n sum_j F(y_j) exp(-I (y_j, x_k)) dy^n`.
pub fn fourier_inverse(grid: &GridSpec, values: &[CCDNumber]) -> Result<Vec<CCDNumber>> {
    transform(grid, values, Direction::Inverse)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_ccd;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn sample(grid: &GridSpec, f: impl Fn(&[f64]) -> CCDNumber) -> Vec<CCDNumber> {
        (0..grid.total_points())
            .map(|i| f(&grid.x_at(&grid.unravel(i))))
            .collect()
    }

    #[test]
    fn gaussian_transform() {
        let grid = GridSpec::uniform(1, 12.0, 256, 1.0).unwrap();
        let f = sample(&grid, |x| CCDNumber::scalar(1, (-x[0] * x[0] / 2.0).exp()));
        let ft = fourier_forward(&grid, &f).unwrap();
        for (j, v) in ft.iter().enumerate() {
            let y = grid.axes()[0].y(j);
            let expected = (2.0 * PI).sqrt() * (-y * y / 2.0).exp();
            assert!((v.re_scalar() - expected).abs() < 1e-12);
            assert!(v.im.re().abs() < 1e-12);
        }
    }

    #[test]
    fn shifted_gaussian_picks_up_phase() {
        let grid = GridSpec::uniform(1, 16.0, 256, 1.0).unwrap();
        let c = 1.25;
        let f = sample(&grid, |x| CCDNumber::scalar(0, (-(x[0] - c).powi(2) / 2.0).exp()));
        let ft = fourier_forward(&grid, &f).unwrap();
        for (j, v) in ft.iter().enumerate() {
            let y = grid.axes()[0].y(j);
            let expected =
                Complex64::new(0.0, c * y).exp() * ((2.0 * PI).sqrt() * (-y * y / 2.0).exp());
            assert!((v.complex_part() - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn roundtrip_random_2d() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let grid = GridSpec::new(
            vec![
                super::super::grid::Axis::new(3.0, 16).unwrap(),
                super::super::grid::Axis::new(5.0, 8).unwrap(),
            ],
            1.0,
        )
        .unwrap();
        let f: Vec<CCDNumber> = (0..grid.total_points()).map(|_| random_ccd(&mut rng, 2)).collect();
        let back = fourier_inverse(&grid, &fourier_forward(&grid, &f).unwrap()).unwrap();
        for (a, b) in f.iter().zip(&back) {
            assert!((a - b).max_abs() < 1e-12);
        }
    }

    #[test]
    fn basis_factor_passes_through() {
        let grid = GridSpec::uniform(1, 10.0, 128, 1.0).unwrap();
        let g = sample(&grid, |x| CCDNumber::scalar(3, (-x[0] * x[0]).exp() * (1.0 + x[0])));
        let e5 = CCDNumber::basis(3, 5);
        let f: Vec<CCDNumber> = g.iter().map(|v| &e5 * v).collect();
        let fg = fourier_forward(&grid, &g).unwrap();
        let ff = fourier_forward(&grid, &f).unwrap();
        for (a, b) in fg.iter().zip(&ff) {
            assert!((&(&e5 * a) - b).max_abs() < 1e-14);
        }
    }

    #[test]
    fn length_mismatch() {
        let grid = GridSpec::uniform(1, 1.0, 8, 1.0).unwrap();
        assert!(fourier_forward(&grid, &[CCDNumber::zero(0)]).is_err());
    }
}
