//! Closed-form kernel for specs whose coefficients and drifts are real scalars.

use std::f64::consts::PI;

use crate::spectral::{diagonalize, Diagonalization, MeasureSpec};
use crate::error::Result;

/// Product of Gaussians: block `j` has covariance `a_j B_j t` and mean
/// `-psi_j t` (the transport direction fixed by the kernel's symbol).
#[derive(Clone, Debug)]
pub struct GaussianOracle {
    blocks: Vec<(f64, Diagonalization, Vec<f64>)>,
}

impl GaussianOracle {
    /// `None` unless every `a_j` is a positive real scalar and every drift
    /// entry is a real scalar.
    pub fn for_spec(spec: &MeasureSpec) -> Result<Option<Self>> {
        let real_scalar = |z: &crate::CCDNumber| {
            z.im.is_zero() && z.re.coeffs()[1..].iter().all(|&c| c == 0.0)
        };
        let mut blocks = Vec::with_capacity(spec.blocks().len());
        for block in spec.blocks() {
            if !real_scalar(block.a()) || block.a().re_scalar() <= 0.0 {
                return Ok(None);
            }
            if !block.psi().iter().all(real_scalar) {
                return Ok(None);
            }
            let psi = block.psi().iter().map(|p| p.re_scalar()).collect();
            blocks.push((block.a().re_scalar(), diagonalize(block.b())?, psi));
        }
        Ok(Some(Self { blocks }))
    }

    pub fn value(&self, x: &[f64], t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let mut offset = 0;
        let mut out = 1.0;
        for (a, d, psi) in &self.blocks {
            let m = psi.len();
            let centered: Vec<f64> = (0..m).map(|k| x[offset + k] + psi[k] * t).collect();
            let rotated = d.q.matvec(&centered);
            let mut quad = 0.0;
            let mut det = 1.0;
            for (r, l) in rotated.iter().zip(&d.lambdas) {
                let var = a * l * t;
                quad += r * r / var;
                det *= 2.0 * PI * var;
            }
            out *= (-0.5 * quad).exp() / det.sqrt();
            offset += m;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{eval_kernel, GridSpec};
    use crate::spectral::{BlockSpec, Matrix};
    use crate::CCDNumber;

    #[test]
    fn matches_grid_kernel_in_two_dimensions() {
        let b = Matrix::from_rows(vec![vec![1.0, 0.4], vec![0.4, 0.7]]).unwrap();
        let block = BlockSpec::new(
            CCDNumber::scalar(1, 1.5),
            b,
            vec![CCDNumber::scalar(1, 0.5), CCDNumber::zero(1)],
        )
        .unwrap();
        let spec = MeasureSpec::centered(vec![block]).unwrap();
        let oracle = GaussianOracle::for_spec(&spec).unwrap().unwrap();
        let grid = GridSpec::uniform(2, 10.0, 128, 0.8).unwrap();
        let k = eval_kernel(&spec, &grid, false).unwrap();
        let err = k.max_abs_deviation(|x| CCDNumber::scalar(1, oracle.value(x, 0.8)));
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn hypercomplex_coefficients_have_no_oracle() {
        let a = &CCDNumber::scalar(2, 2.0) + &CCDNumber::i_basis(2, 1);
        let spec =
            MeasureSpec::centered(vec![BlockSpec::without_drift(a, Matrix::identity(1)).unwrap()])
                .unwrap();
        assert!(GaussianOracle::for_spec(&spec).unwrap().is_none());
    }
}
