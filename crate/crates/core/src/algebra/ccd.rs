//! Complexified Cayley-Dickson numbers `z = x + I y`.
//!
//! `I` is a central imaginary unit (`I^2 = -1`, `I b = b I` for every `b` in
//! the real algebra), kept separate from the algebra's own basis elements
//! `i_1, i_2, ...`. Complex scalars `alpha + I beta` therefore act on both
//! halves at once and commute with everything.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use super::cd::CDNumber;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CCDNumber {
    pub re: CDNumber,
    pub im: CDNumber,
}

impl CCDNumber {
    pub fn new(re: CDNumber, im: CDNumber) -> Result<Self> {
        if re.level() != im.level() {
            return Err(Error::LevelMismatch(re.level(), im.level()));
        }
        Ok(Self { re, im })
    }

    pub fn zero(level: u8) -> Self {
        Self {
            re: CDNumber::zero(level),
            im: CDNumber::zero(level),
        }
    }

    pub fn one(level: u8) -> Self {
        Self::real(CDNumber::one(level))
    }

    pub fn real(re: CDNumber) -> Self {
        let im = CDNumber::zero(re.level());
        Self { re, im }
    }

    /// The complex scalar `c.re + I c.im`.
    pub fn from_complex(level: u8, c: Complex64) -> Self {
        Self {
            re: CDNumber::scalar(level, c.re),
            im: CDNumber::scalar(level, c.im),
        }
    }

    pub fn scalar(level: u8, value: f64) -> Self {
        Self::real(CDNumber::scalar(level, value))
    }

    /// The central unit `I`.
    pub fn unit_i(level: u8) -> Self {
        Self::from_complex(level, Complex64::new(0.0, 1.0))
    }

    /// The basis element `i_k` of the real algebra.
    pub fn basis(level: u8, k: usize) -> Self {
        Self::real(CDNumber::basis(level, k))
    }

    /// `I i_k`.
    pub fn i_basis(level: u8, k: usize) -> Self {
        Self {
            re: CDNumber::zero(level),
            im: CDNumber::basis(level, k),
        }
    }

    pub fn level(&self) -> u8 {
        self.re.level()
    }

    pub fn dim(&self) -> usize {
        self.re.dim()
    }

    /// Coefficient of `i_0` in the real half.
    pub fn re_scalar(&self) -> f64 {
        self.re.re()
    }

    /// The complex-scalar part `Re(x) + I Re(y)`.
    pub fn complex_part(&self) -> Complex64 {
        Complex64::new(self.re.re(), self.im.re())
    }

    /// `z* = x* - I y`.
    pub fn conj(&self) -> Self {
        Self {
            re: self.re.conj(),
            im: -&self.im,
        }
    }

    /// `|z|^2 = |x|^2 + |y|^2`.
    pub fn abs_sqr(&self) -> f64 {
        self.re.norm_sqr() + self.im.norm_sqr()
    }

    pub fn abs(&self) -> f64 {
        super::cd::scaled_hypot(self.re.coeffs().iter().chain(self.im.coeffs()))
    }

    /// `||z|| = sqrt(2|x|^2 + 2|y|^2)`, so `||1|| = sqrt(2)`.
    pub fn norm(&self) -> f64 {
        std::f64::consts::SQRT_2 * self.abs()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    /// Largest absolute real component.
    pub fn max_abs(&self) -> f64 {
        self.re.max_abs().max(self.im.max_abs())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            re: self.re.scale(s),
            im: self.im.scale(s),
        }
    }

    /// Multiply by the complex scalar `c`.
    pub fn scale_complex(&self, c: Complex64) -> Self {
        Self {
            re: &self.re.scale(c.re) - &self.im.scale(c.im),
            im: &self.im.scale(c.re) + &self.re.scale(c.im),
        }
    }

    /// `I z`.
    pub fn mul_i(&self) -> Self {
        Self {
            re: -&self.im,
            im: self.re.clone(),
        }
    }

    /// `(p + I q)(u + I v) = (pu - qv) + I (pv + qu)`.
    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.level() != other.level() {
            return Err(Error::LevelMismatch(self.level(), other.level()));
        }
        let pu = self.re.checked_mul(&other.re)?;
        let qv = self.im.checked_mul(&other.im)?;
        let pv = self.re.checked_mul(&other.im)?;
        let qu = self.im.checked_mul(&other.re)?;
        Ok(Self {
            re: &pu - &qv,
            im: &pv + &qu,
        })
    }

    pub fn embed(&self, level: u8) -> Result<Self> {
        Ok(Self {
            re: self.re.embed(level)?,
            im: self.im.embed(level)?,
        })
    }

    /// Component plane `k` as a complex number: coefficient of `i_k` in the
    /// real half plus `I` times the coefficient of `i_k` in the imaginary half.
    pub fn plane(&self, k: usize) -> Complex64 {
        Complex64::new(self.re.coeffs()[k], self.im.coeffs()[k])
    }

    pub fn set_plane(&mut self, k: usize, c: Complex64) {
        self.re.coeffs_mut()[k] = c.re;
        self.im.coeffs_mut()[k] = c.im;
    }

    /// Real components in the order `i0.re, i0.im, i1.re, i1.im, ...`.
    pub fn interleaved(&self) -> impl Iterator<Item = f64> + '_ {
        self.re
            .coeffs()
            .iter()
            .zip(self.im.coeffs())
            .flat_map(|(&a, &b)| [a, b])
    }
}

impl Add for &CCDNumber {
    type Output = CCDNumber;
    fn add(self, rhs: &CCDNumber) -> CCDNumber {
        CCDNumber {
            re: &self.re + &rhs.re,
            im: &self.im + &rhs.im,
        }
    }
}

impl Add for CCDNumber {
    type Output = CCDNumber;
    fn add(self, rhs: CCDNumber) -> CCDNumber {
        &self + &rhs
    }
}

impl AddAssign<&CCDNumber> for CCDNumber {
    fn add_assign(&mut self, rhs: &CCDNumber) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Sub for &CCDNumber {
    type Output = CCDNumber;
    fn sub(self, rhs: &CCDNumber) -> CCDNumber {
        CCDNumber {
            re: &self.re - &rhs.re,
            im: &self.im - &rhs.im,
        }
    }
}

impl Sub for CCDNumber {
    type Output = CCDNumber;
    fn sub(self, rhs: CCDNumber) -> CCDNumber {
        &self - &rhs
    }
}

impl Neg for &CCDNumber {
    type Output = CCDNumber;
    fn neg(self) -> CCDNumber {
        self.scale(-1.0)
    }
}

impl Neg for CCDNumber {
    type Output = CCDNumber;
    fn neg(self) -> CCDNumber {
        self.scale(-1.0)
    }
}

/// Panics on a level mismatch; see [`CCDNumber::checked_mul`].
impl Mul for &CCDNumber {
    type Output = CCDNumber;
    fn mul(self, rhs: &CCDNumber) -> CCDNumber {
        self.checked_mul(rhs)
            .unwrap_or_else(|e| panic!("complexified product: {e}"))
    }
}

impl Mul for CCDNumber {
    type Output = CCDNumber;
    fn mul(self, rhs: CCDNumber) -> CCDNumber {
        &self * &rhs
    }
}

impl Mul<f64> for &CCDNumber {
    type Output = CCDNumber;
    fn mul(self, rhs: f64) -> CCDNumber {
        self.scale(rhs)
    }
}

impl Mul<f64> for CCDNumber {
    type Output = CCDNumber;
    fn mul(self, rhs: f64) -> CCDNumber {
        self.scale(rhs)
    }
}

impl Mul<Complex64> for &CCDNumber {
    type Output = CCDNumber;
    fn mul(self, rhs: Complex64) -> CCDNumber {
        self.scale_complex(rhs)
    }
}

impl fmt::Display for CCDNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::config::format_literal(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn central_unit_squares_to_minus_one() {
        let i = CCDNumber::unit_i(3);
        assert_eq!(&i * &i, CCDNumber::scalar(3, -1.0));
    }

    #[test]
    fn central_unit_commutes_with_basis() {
        let i = CCDNumber::unit_i(3);
        for k in 0..8 {
            let e = CCDNumber::basis(3, k);
            assert!((&(&i * &e) - &(&e * &i)).is_zero());
        }
    }

    #[test]
    fn norms() {
        assert_eq!(CCDNumber::one(2).norm(), 2f64.sqrt());
        assert_eq!(CCDNumber::zero(2).norm(), 0.0);
        let z = CCDNumber::from_complex(2, Complex64::new(3.0, 4.0));
        assert!((z.norm() - 50f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn conjugate_flips_central_part() {
        let z = CCDNumber::new(
            CDNumber::from_coeffs(1, vec![1.0, 2.0]).unwrap(),
            CDNumber::from_coeffs(1, vec![3.0, 4.0]).unwrap(),
        )
        .unwrap();
        let c = z.conj();
        assert_eq!(c.re.coeffs(), &[1.0, -2.0]);
        assert_eq!(c.im.coeffs(), &[-3.0, -4.0]);
        assert_eq!(z.re_scalar(), 1.0);
    }

    #[test]
    fn complex_scaling_matches_product() {
        let z = CCDNumber::new(
            CDNumber::from_coeffs(2, vec![0.3, -1.0, 0.2, 2.0]).unwrap(),
            CDNumber::from_coeffs(2, vec![1.1, 0.4, -0.7, 0.0]).unwrap(),
        )
        .unwrap();
        let c = Complex64::new(0.6, -1.3);
        let direct = &CCDNumber::from_complex(2, c) * &z;
        let scaled = z.scale_complex(c);
        assert!((&direct - &scaled).max_abs() < 1e-15);
        assert_eq!(z.mul_i(), &CCDNumber::unit_i(2) * &z);
    }
}
