//! The time-scaled symbol `z(y, t)`, the characteristic functional of
//! `mu_{Ut, pt}`, and decay diagnostics for truncating Fourier integrals.
//!
//! Sign conventions: the characteristic functional carries `+I (p, y)`, the
//! kernel symbol carries `-I (s, y) t`. The two agree when `p = -s`
//! (see [`MeasureSpec::with_shift_from_drift`]). Pairings `(p, y)` with real
//! `y` are plain bilinear sums, no conjugation.

use serde::Serialize;

use crate::algebra::CCDNumber;
use crate::error::{Error, Result};
use crate::explog::{exp_l_closed, ExpDecomposition};
use crate::spectral::MeasureSpec;

#[derive(Clone, Debug, PartialEq)]
pub struct SymbolValue {
    pub value: CCDNumber,
    /// Real scalar part `u0(y, t)`.
    pub u0: f64,
    /// Imaginary part of `nu` for the non-scalar part of the value.
    pub nu1: f64,
}

impl SymbolValue {
    fn from_value(value: CCDNumber) -> Self {
        let d = ExpDecomposition::of(&value);
        Self {
            u0: d.u0,
            nu1: d.nu.im,
            value,
        }
    }
}

/// `sum_k c_k y_k` for hypercomplex `c` and real `y`.
pub(crate) fn pair(c: &[CCDNumber], y: &[f64], level: u8) -> CCDNumber {
    let mut acc = CCDNumber::zero(level);
    for (ck, &yk) in c.iter().zip(y) {
        if yk != 0.0 {
            acc += &ck.scale(yk);
        }
    }
    acc
}

/// `-(1/2) sum_j a_j (B_j y_j, y_j) t`.
fn quadratic_part(spec: &MeasureSpec, y: &[f64], t: f64) -> Result<CCDNumber> {
    let forms = spec.block_quad_forms(y)?;
    let mut acc = CCDNumber::zero(spec.level());
    for (block, q) in spec.blocks().iter().zip(forms) {
        acc += &block.a().scale(-0.5 * q * t);
    }
    Ok(acc)
}

/// `z(y, t) = -sum_j { (1/2) a_j (B_j y_j, y_j) + I (s_j, y_j) } t`.
pub fn symbol(spec: &MeasureSpec, y: &[f64], t: f64) -> Result<SymbolValue> {
    let quad = quadratic_part(spec, y, t)?;
    let drift = pair(&spec.drift(), y, spec.level()).mul_i().scale(-t);
    Ok(SymbolValue::from_value(&quad + &drift))
}

/// Exponent `-(1/2) t (U y, y) + I t (p, y)` of the characteristic functional.
pub fn functional_exponent(spec: &MeasureSpec, y: &[f64], t: f64) -> Result<CCDNumber> {
    let quad = quadratic_part(spec, y, t)?;
    let shift = pair(spec.p(), y, spec.level()).mul_i().scale(t);
    Ok(&quad + &shift)
}

/// Characteristic functional of `mu_{Ut, pt}` at `y`.
pub fn char_functional(spec: &MeasureSpec, y: &[f64], t: f64) -> Result<CCDNumber> {
    Ok(exp_l_closed(&functional_exponent(spec, y, t)?))
}

/// Default radii `1, 2, 4, ..., 64`.
pub fn default_radii() -> Vec<f64> {
    (0..7).map(|k| f64::from(1u32 << k)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayReport {
    pub radii: Vec<f64>,
    /// `||exp_l(z(rho d, t))||` per radius.
    pub magnitudes: Vec<f64>,
    /// `(|u0|^2 - |nu1|^2) / |u0|^2` per radius; empirical estimates of `C_1`.
    pub c1_ratios: Vec<f64>,
    /// Smallest radius from which the magnitudes never increase again
    /// (strictly decreasing or underflowed to zero). Empirical `C_2`.
    pub decreasing_from: Option<f64>,
}

impl DecayReport {
    pub fn last_magnitude(&self) -> f64 {
        self.magnitudes.last().copied().unwrap_or(f64::NAN)
    }
}

pub fn decay_margin(
    spec: &MeasureSpec,
    direction: &[f64],
    t: f64,
    radii: &[f64],
) -> Result<DecayReport> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    if direction.len() != spec.n() {
        return Err(Error::dim("direction", spec.n(), direction.len()));
    }
    let len = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
    if !(len > 0.0) {
        return Err(Error::dim("nonzero direction entries", 1, 0));
    }
    let unit: Vec<f64> = direction.iter().map(|d| d / len).collect();

    let mut magnitudes = Vec::with_capacity(radii.len());
    let mut c1_ratios = Vec::with_capacity(radii.len());
    for &rho in radii {
        let y: Vec<f64> = unit.iter().map(|d| d * rho).collect();
        let s = symbol(spec, &y, t)?;
        magnitudes.push(exp_l_closed(&s.value).norm());
        let u0sq = s.u0 * s.u0;
        c1_ratios.push(if u0sq > 0.0 {
            (u0sq - s.nu1 * s.nu1) / u0sq
        } else {
            f64::NAN
        });
    }

    let mut start = magnitudes.len();
    while start > 1 {
        let (prev, next) = (magnitudes[start - 2], magnitudes[start - 1]);
        if next < prev || (next == 0.0 && prev == 0.0) {
            start -= 1;
        } else {
            break;
        }
    }
    let decreasing_from = (start < magnitudes.len()).then(|| radii[start - 1]);

    Ok(DecayReport {
        radii: radii.to_vec(),
        magnitudes,
        c1_ratios,
        decreasing_from,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{BlockSpec, Matrix};
    use num_complex::Complex64;

    fn scalar_spec(a: CCDNumber, psi: CCDNumber, p: CCDNumber) -> MeasureSpec {
        let block = BlockSpec::new(a, Matrix::identity(1), vec![psi]).unwrap();
        MeasureSpec::new(vec![block], vec![p]).unwrap()
    }

    fn heat() -> MeasureSpec {
        scalar_spec(CCDNumber::one(2), CCDNumber::zero(2), CCDNumber::zero(2))
    }

    #[test]
    fn symbol_examples() {
        assert!(symbol(&heat(), &[0.0], 1.0).unwrap().value.is_zero());
        let s = symbol(&heat(), &[2.0], 1.0).unwrap();
        assert_eq!(s.value, CCDNumber::scalar(2, -2.0));
        assert_eq!(s.u0, -2.0);

        let spec = scalar_spec(CCDNumber::one(2), CCDNumber::basis(2, 1), CCDNumber::zero(2));
        let s = symbol(&spec, &[1.0], 1.0).unwrap();
        let expected = &CCDNumber::scalar(2, -0.5) - &CCDNumber::i_basis(2, 1);
        assert_eq!(s.value, expected);
    }

    #[test]
    fn symbol_is_linear_in_t() {
        let a = &CCDNumber::scalar(2, 2.0) + &CCDNumber::i_basis(2, 1);
        let spec = scalar_spec(a, CCDNumber::basis(2, 3), CCDNumber::zero(2));
        let s1 = symbol(&spec, &[0.7], 1.0).unwrap().value;
        let s3 = symbol(&spec, &[0.7], 3.0).unwrap().value;
        assert!((&s1.scale(3.0) - &s3).max_abs() < 1e-15);
    }

    #[test]
    fn functional_at_zero_is_one() {
        let spec = scalar_spec(
            CCDNumber::one(2),
            CCDNumber::zero(2),
            CCDNumber::scalar(2, 1.5),
        );
        assert_eq!(char_functional(&spec, &[0.0], 1.0).unwrap(), CCDNumber::one(2));
    }

    #[test]
    fn scalar_gaussian_functional() {
        for &y in &[-2.0, -0.3, 0.9, 3.1] {
            let v = char_functional(&heat(), &[y], 1.0).unwrap();
            assert!((v.re_scalar() - (-y * y / 2.0_f64).exp()).abs() < 1e-15);
            let c = 0.8;
            let shifted = scalar_spec(CCDNumber::one(2), CCDNumber::zero(2), CCDNumber::scalar(2, c));
            let v = char_functional(&shifted, &[y], 1.0).unwrap();
            let expected = Complex64::new(0.0, c * y).exp() * (-y * y / 2.0_f64).exp();
            assert!((v.complex_part() - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn drift_and_shift_agree_when_p_is_minus_s() {
        let a = &CCDNumber::scalar(2, 2.0) + &CCDNumber::i_basis(2, 1);
        let spec = scalar_spec(a, &CCDNumber::basis(2, 2) + &CCDNumber::scalar(2, 0.3), CCDNumber::zero(2))
            .with_shift_from_drift();
        for &y in &[-1.0, 0.25, 2.0] {
            let from_symbol = exp_l_closed(&symbol(&spec, &[y], 0.6).unwrap().value);
            let from_functional = char_functional(&spec, &[y], 0.6).unwrap();
            assert!((&from_symbol - &from_functional).max_abs() < 1e-15);
        }
    }

    #[test]
    fn real_decay_follows_gaussian() {
        let r = decay_margin(&heat(), &[1.0], 1.0, &default_radii()).unwrap();
        for (rho, m) in r.radii.iter().zip(&r.magnitudes) {
            let expected = 2f64.sqrt() * (-rho * rho / 2.0).exp();
            assert!((m - expected).abs() <= 1e-15 * expected.max(1e-300));
        }
        assert_eq!(r.decreasing_from, Some(1.0));
    }

    #[test]
    fn decay_rejects_non_positive_time() {
        assert!(matches!(
            decay_margin(&heat(), &[1.0], 0.0, &[1.0]),
            Err(Error::NonPositiveTime(_))
        ));
    }

    #[test]
    fn inadmissible_coefficient_does_not_decay() {
        let spec = scalar_spec(CCDNumber::unit_i(2), CCDNumber::zero(2), CCDNumber::zero(2));
        let r = decay_margin(&spec, &[1.0], 1.0, &default_radii()).unwrap();
        for m in &r.magnitudes {
            assert!((m - 2f64.sqrt()).abs() < 1e-12);
        }
    }
}
