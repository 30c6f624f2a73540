//! Real Cayley-Dickson numbers.
//!
//! An element of the level-`r` algebra is stored densely as `2^r` real
//! coefficients, coefficient `k` attached to the basis element `i_k`
//! (`i_0 = 1`). The level-`r` algebra is built from level `r - 1` by the
//! doubling rule
//!
//! ```text
//! (a, b)(c, d) = (ac - d*b, da + bc*)
//! ```
//!
//! where the first half of the coefficients holds `a` and the second half
//! holds `b`, so `i_{2^(r-1)}` is the new doubling generator `(0, 1)`.
//! With this convention `i_1 i_2 = i_3`, every basis element squares to
//! `-1`, and the norm is multiplicative through the octonions (`r <= 3`).

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Largest supported level: 128 real components.
pub const MAX_LEVEL: u8 = 6;

/// Levels up to this one multiply through a precomputed basis table.
pub const TABLE_LEVEL: u8 = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct CDNumber {
    level: u8,
    coeffs: Vec<f64>,
}

impl CDNumber {
    pub fn from_coeffs(level: u8, coeffs: Vec<f64>) -> Result<Self> {
        check_level(level)?;
        let dim = 1usize << level;
        if coeffs.len() != dim {
            return Err(Error::dim("Cayley-Dickson coefficients", dim, coeffs.len()));
        }
        Ok(Self { level, coeffs })
    }

    pub fn zero(level: u8) -> Self {
        assert!(level <= MAX_LEVEL, "level {level} exceeds {MAX_LEVEL}");
        Self {
            level,
            coeffs: vec![0.0; 1 << level],
        }
    }

    pub fn scalar(level: u8, value: f64) -> Self {
        let mut x = Self::zero(level);
        x.coeffs[0] = value;
        x
    }

    pub fn one(level: u8) -> Self {
        Self::scalar(level, 1.0)
    }

    /// The basis element `i_k`.
    pub fn basis(level: u8, k: usize) -> Self {
        let mut x = Self::zero(level);
        assert!(k < x.coeffs.len(), "basis index {k} out of range at level {level}");
        x.coeffs[k] = 1.0;
        x
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<f64> {
        self.coeffs
    }

    /// Coefficient of `i_0`.
    pub fn re(&self) -> f64 {
        self.coeffs[0]
    }

    /// `x - Re(x)`.
    pub fn im(&self) -> Self {
        let mut x = self.clone();
        x.coeffs[0] = 0.0;
        x
    }

    pub fn conj(&self) -> Self {
        Self {
            level: self.level,
            coeffs: conj_slice(&self.coeffs),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// `|x| = sqrt(x x*)`.
    pub fn abs(&self) -> f64 {
        scaled_hypot(&self.coeffs)
    }

    /// Euclidean inner product of the coefficient vectors.
    pub fn dot(&self, other: &Self) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            level: self.level,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Canonical embedding into a higher level.
    pub fn embed(&self, level: u8) -> Result<Self> {
        check_level(level)?;
        if level < self.level {
            return Err(Error::LevelMismatch(self.level, level));
        }
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(1 << level, 0.0);
        Ok(Self { level, coeffs })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let mut out = vec![0.0; self.coeffs.len()];
        if self.level <= TABLE_LEVEL {
            mul_table(self.level, &self.coeffs, &other.coeffs, &mut out);
        } else {
            mul_doubling(&self.coeffs, &other.coeffs, &mut out);
        }
        Ok(Self {
            level: self.level,
            coeffs: out,
        })
    }

    /// Product through the doubling recursion regardless of level.
    pub fn mul_recursive(&self, other: &Self) -> Result<Self> {
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        let mut out = vec![0.0; self.coeffs.len()];
        mul_doubling(&self.coeffs, &other.coeffs, &mut out);
        Ok(Self {
            level: self.level,
            coeffs: out,
        })
    }

    pub(crate) fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!(
            self.level, other.level,
            "Cayley-Dickson level mismatch: {} vs {}",
            self.level, other.level
        );
        Self {
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }
}

/// `sqrt(sum v^2)` without intermediate under- or overflow.
pub(crate) fn scaled_hypot<'a>(values: impl IntoIterator<Item = &'a f64> + Clone) -> f64 {
    let m = values.clone().into_iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    values
        .into_iter()
        .map(|v| (v / m) * (v / m))
        .sum::<f64>()
        .sqrt()
        * m
}

pub(crate) fn check_level(level: u8) -> Result<()> {
    if level > MAX_LEVEL {
        Err(Error::LevelTooHigh(level as u32))
    } else {
        Ok(())
    }
}

fn conj_slice(x: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().map(|c| -c).collect();
    out[0] = x[0];
    out
}

/// `out = x * y` via `(a, b)(c, d) = (ac - d*b, da + bc*)`.
fn mul_doubling(x: &[f64], y: &[f64], out: &mut [f64]) {
    let n = x.len();
    if n == 1 {
        out[0] = x[0] * y[0];
        return;
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let d_conj = conj_slice(d);
    let c_conj = conj_slice(c);

    let mut t1 = vec![0.0; h];
    let mut t2 = vec![0.0; h];
    let (lo, hi) = out.split_at_mut(h);

    mul_doubling(a, c, &mut t1);
    mul_doubling(&d_conj, b, &mut t2);
    for k in 0..h {
        lo[k] = t1[k] - t2[k];
    }
    mul_doubling(d, a, &mut t1);
    mul_doubling(b, &c_conj, &mut t2);
    for k in 0..h {
        hi[k] = t1[k] + t2[k];
    }
}

/// `i_j i_k = sign * i_(j xor k)`; signs stored row-major per level.
fn sign_tables() -> &'static [Vec<f64>] {
    static TABLES: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLES.get_or_init(|| {
        (0..=TABLE_LEVEL)
            .map(|level| {
                let n = 1usize << level;
                let mut signs = vec![0.0; n * n];
                let mut ej = vec![0.0; n];
                let mut ek = vec![0.0; n];
                let mut prod = vec![0.0; n];
                for j in 0..n {
                    ej.fill(0.0);
                    ej[j] = 1.0;
                    for k in 0..n {
                        ek.fill(0.0);
                        ek[k] = 1.0;
                        mul_doubling(&ej, &ek, &mut prod);
                        let s = prod[j ^ k];
                        debug_assert!(s == 1.0 || s == -1.0);
                        signs[j * n + k] = s;
                    }
                }
                signs
            })
            .collect()
    })
}

fn mul_table(level: u8, x: &[f64], y: &[f64], out: &mut [f64]) {
    let n = x.len();
    let signs = &sign_tables()[level as usize];
    for (j, &xj) in x.iter().enumerate() {
        if xj == 0.0 {
            continue;
        }
        let row = &signs[j * n..(j + 1) * n];
        for (k, &yk) in y.iter().enumerate() {
            out[j ^ k] += row[k] * xj * yk;
        }
    }
}

impl Add for &CDNumber {
    type Output = CDNumber;
    fn add(self, rhs: &CDNumber) -> CDNumber {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Add for CDNumber {
    type Output = CDNumber;
    fn add(self, rhs: CDNumber) -> CDNumber {
        &self + &rhs
    }
}

impl Sub for &CDNumber {
    type Output = CDNumber;
    fn sub(self, rhs: &CDNumber) -> CDNumber {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Sub for CDNumber {
    type Output = CDNumber;
    fn sub(self, rhs: CDNumber) -> CDNumber {
        &self - &rhs
    }
}

impl AddAssign<&CDNumber> for CDNumber {
    fn add_assign(&mut self, rhs: &CDNumber) {
        assert_eq!(self.level, rhs.level, "Cayley-Dickson level mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&CDNumber> for CDNumber {
    fn sub_assign(&mut self, rhs: &CDNumber) {
        assert_eq!(self.level, rhs.level, "Cayley-Dickson level mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Neg for &CDNumber {
    type Output = CDNumber;
    fn neg(self) -> CDNumber {
        self.scale(-1.0)
    }
}

impl Neg for CDNumber {
    type Output = CDNumber;
    fn neg(self) -> CDNumber {
        self.scale(-1.0)
    }
}

/// Panics on a level mismatch; use [`CDNumber::checked_mul`] to get an error instead.
impl Mul for &CDNumber {
    type Output = CDNumber;
    fn mul(self, rhs: &CDNumber) -> CDNumber {
        self.checked_mul(rhs)
            .unwrap_or_else(|e| panic!("Cayley-Dickson product: {e}"))
    }
}

impl Mul for CDNumber {
    type Output = CDNumber;
    fn mul(self, rhs: CDNumber) -> CDNumber {
        &self * &rhs
    }
}

impl Mul<f64> for &CDNumber {
    type Output = CDNumber;
    fn mul(self, rhs: f64) -> CDNumber {
        self.scale(rhs)
    }
}

impl Mul<f64> for CDNumber {
    type Output = CDNumber;
    fn mul(self, rhs: f64) -> CDNumber {
        self.scale(rhs)
    }
}

/// Shortest round-trip text for a magnitude, scientific outside `[1e-5, 1e16)`.
pub(crate) fn fmt_magnitude(c: f64) -> String {
    let c = c.abs();
    if c == 0.0 || (1e-5..1e16).contains(&c) {
        format!("{c}")
    } else {
        format!("{c:e}")
    }
}

impl fmt::Display for CDNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            match (first, c < 0.0) {
                (true, true) => f.write_str("-")?,
                (true, false) => {}
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            f.write_str(&fmt_magnitude(c))?;
            if k > 0 {
                write!(f, "i{k}")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(level: u8, k: usize) -> CDNumber {
        CDNumber::basis(level, k)
    }

    #[test]
    fn i1_squared_is_minus_one() {
        for level in 1..=MAX_LEVEL {
            assert_eq!(&b(level, 1) * &b(level, 1), CDNumber::scalar(level, -1.0));
        }
    }

    #[test]
    fn quaternion_table() {
        // i1 i2 = i3, i2 i3 = i1, i3 i1 = i2 under the chosen doubling rule.
        assert_eq!(&b(2, 1) * &b(2, 2), b(2, 3));
        assert_eq!(&b(2, 2) * &b(2, 3), b(2, 1));
        assert_eq!(&b(2, 3) * &b(2, 1), b(2, 2));
        assert_eq!(&b(2, 2) * &b(2, 1), -b(2, 3));
    }

    #[test]
    fn table_matches_recursion() {
        for level in 0..=TABLE_LEVEL {
            let n = 1 << level;
            for j in 0..n {
                for k in 0..n {
                    let x = b(level, j);
                    let y = b(level, k);
                    assert_eq!(x.checked_mul(&y).unwrap(), x.mul_recursive(&y).unwrap());
                }
            }
        }
    }

    #[test]
    fn basis_laws_all_levels() {
        for level in 0..=MAX_LEVEL {
            let n = 1 << level;
            for l in 0..n {
                assert_eq!(&b(level, 0) * &b(level, l), b(level, l));
                assert_eq!(&b(level, l) * &b(level, 0), b(level, l));
                if l == 0 {
                    continue;
                }
                assert_eq!(&b(level, l) * &b(level, l), CDNumber::scalar(level, -1.0));
                for k in 1..n {
                    if k != l {
                        assert_eq!(&b(level, l) * &b(level, k), -(&b(level, k) * &b(level, l)));
                    }
                }
            }
        }
    }

    #[test]
    fn conj_and_abs() {
        assert_eq!(b(2, 1).conj(), -b(2, 1));
        let x = CDNumber::from_coeffs(2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(x.abs(), 2.0);
    }

    #[test]
    fn level_mismatch_is_rejected() {
        let err = b(2, 1).checked_mul(&b(3, 1)).unwrap_err();
        assert!(matches!(err, Error::LevelMismatch(2, 3)));
        assert!(CDNumber::from_coeffs(2, vec![0.0; 3]).is_err());
        assert!(CDNumber::from_coeffs(7, vec![0.0; 128]).is_err());
    }

    #[test]
    fn embedding_preserves_products() {
        let x = CDNumber::from_coeffs(2, vec![0.5, -1.0, 2.0, 0.25]).unwrap();
        let y = CDNumber::from_coeffs(2, vec![1.5, 0.0, -0.75, 3.0]).unwrap();
        let lifted = &x.embed(4).unwrap() * &y.embed(4).unwrap();
        assert_eq!(lifted, (&x * &y).embed(4).unwrap());
    }

    #[test]
    fn display() {
        let x = CDNumber::from_coeffs(2, vec![2.0, 1.0, 0.0, -0.5]).unwrap();
        assert_eq!(x.to_string(), "2 + 1i1 - 0.5i3");
        let y = CDNumber::from_coeffs(1, vec![-1e-20, 3e17]).unwrap();
        assert_eq!(y.to_string(), "-1e-20 + 3e17i1");
        assert_eq!(CDNumber::zero(1).to_string(), "0");
    }
}
