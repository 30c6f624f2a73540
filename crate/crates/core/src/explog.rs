//! The left-ordered exponential on `A_{r,C}`.
//!
//! Powers are taken right to left, `z^n = z (z^(n-1))`. Writing
//! `z = u0 + I v0 + w` with `w = u' + I v'` and `Re(u') = Re(v') = 0`, the
//! square `w^2` is a complex scalar, so the series collapses to
//!
//! ```text
//! exp_l(z) = exp(u0 + I v0) (cos(nu) + (w / nu) sin(nu)),   w^2 = (I nu)^2
//! ```
//!
//! with `nu` taken on the principal square-root branch.

use num_complex::Complex64;

use crate::algebra::{CCDNumber, CDNumber};

/// Hard cap on series terms.
pub const SERIES_TERM_CAP: usize = 200;

/// Below this `|nu|` the ratio `sin(nu)/nu` comes from its Taylor polynomial.
pub const SINC_TAYLOR_RADIUS: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct ExpDecomposition {
    pub u0: f64,
    pub v0: f64,
    /// Pure-imaginary real half `u'`.
    pub uprime: CDNumber,
    /// Pure-imaginary `I` half `v'`.
    pub vprime: CDNumber,
    /// Principal root of `|u'|^2 - |v'|^2 - 2 I Re(u'v')`.
    pub nu: Complex64,
}

impl ExpDecomposition {
    pub fn of(z: &CCDNumber) -> Self {
        let u0 = z.re.re();
        let v0 = z.im.re();
        let uprime = z.re.im();
        let vprime = z.im.im();
        // Re(u'v') = -<u', v'> for pure imaginaries; +0.0 keeps the branch cut
        // on the principal side when the product vanishes.
        let re_uv = -uprime.dot(&vprime);
        let nu_sq = Complex64::new(
            uprime.norm_sqr() - vprime.norm_sqr() + 0.0,
            -2.0 * re_uv + 0.0,
        );
        Self {
            u0,
            v0,
            uprime,
            vprime,
            nu: nu_sq.sqrt(),
        }
    }

    /// `w = u' + I v'`.
    pub fn w(&self) -> CCDNumber {
        CCDNumber {
            re: self.uprime.clone(),
            im: self.vprime.clone(),
        }
    }

    /// `w^2 = -|u'|^2 + |v'|^2 + 2 I Re(u'v')` as a complex scalar.
    pub fn w_squared(&self) -> Complex64 {
        -(self.nu * self.nu)
    }

    pub fn reassemble(&self) -> CCDNumber {
        let mut z = self.w();
        z.re.coeffs_mut()[0] = self.u0;
        z.im.coeffs_mut()[0] = self.v0;
        z
    }

    /// `exp_l(t z)` from the decomposition of `z`.
    pub fn exp_scaled(&self, t: f64) -> CCDNumber {
        let tnu = self.nu * t;
        let exponent = Complex64::new(self.u0, self.v0) * t;
        // with a large |Im nu| the factors exp(u0) and cos(nu) can under- and
        // overflow separately, so pull exp(|Im nu|) into the scalar factor
        let b = tnu.im.abs();
        let (scalar, cos, sinc_nu) = if b > 1.0 {
            let i = Complex64::new(0.0, 1.0);
            let plus = (i * tnu - b).exp();
            let minus = (-i * tnu - b).exp();
            (
                (exponent + b).exp(),
                (plus + minus) / 2.0,
                (plus - minus) / (2.0 * i * tnu),
            )
        } else {
            (exponent.exp(), tnu.cos(), sinc(tnu))
        };
        let mut out = self.w().scale_complex(scalar * sinc_nu * t);
        let c = scalar * cos;
        out.re.coeffs_mut()[0] += c.re;
        out.im.coeffs_mut()[0] += c.im;
        out
    }
}

/// `sin(nu) / nu`, continuous at zero.
pub fn sinc(nu: Complex64) -> Complex64 {
    if nu.norm() < SINC_TAYLOR_RADIUS {
        let n2 = nu * nu;
        Complex64::new(1.0, 0.0) - n2 / 6.0 + n2 * n2 / 120.0 - n2 * n2 * n2 / 5040.0
    } else {
        nu.sin() / nu
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSum {
    pub value: CCDNumber,
    /// Upper bound on the norm of the omitted tail.
    pub tail_bound: f64,
    /// Number of powers summed after the constant term.
    pub terms_used: usize,
}

/// Partial sums of `1 + sum_n z^n / n!` with left-ordered powers.
///
/// Stops after `terms` powers, at [`SERIES_TERM_CAP`], or once the tail bound
/// drops below `1e-16` of the partial sum's norm.
pub fn exp_l_series(z: &CCDNumber, terms: usize) -> SeriesSum {
    let level = z.level();
    let r = z.norm();
    let limit = terms.clamp(1, SERIES_TERM_CAP);

    let mut sum = CCDNumber::one(level);
    let mut power = CCDNumber::one(level);
    // power_bound = r^n / n!
    let mut power_bound = 1.0;
    let mut used = 0;
    let mut tail = f64::INFINITY;
    for n in 1..=limit {
        power = z * &power;
        power = power.scale(1.0 / n as f64);
        sum += &power;
        power_bound *= r / n as f64;
        used = n;
        tail = tail_after(r, n, power_bound);
        if tail < 1e-16 * sum.norm() {
            break;
        }
    }
    SeriesSum {
        value: sum,
        tail_bound: tail,
        terms_used: used,
    }
}

/// Bound on `sum_{k > n} r^k / k!` given `last = r^n / n!`.
fn tail_after(r: f64, n: usize, last: f64) -> f64 {
    // term ratios r / (k + 1) only shrink, so a geometric bound applies once below 1
    let mut k = n + 1;
    let mut term = last * r / k as f64;
    let mut total = 0.0;
    loop {
        let ratio = r / (k + 1) as f64;
        if ratio < 1.0 {
            return total + term / (1.0 - ratio);
        }
        total += term;
        k += 1;
        term *= r / k as f64;
    }
}

pub fn exp_l_closed(z: &CCDNumber) -> CCDNumber {
    ExpDecomposition::of(z).exp_scaled(1.0)
}

/// `chi_z(t) = exp_l(z t)`, evaluated with the decomposition of `z`.
pub fn character(z: &CCDNumber, t: f64) -> CCDNumber {
    ExpDecomposition::of(z).exp_scaled(t)
}

/// `d/dt exp_l(z t) = z exp_l(z t)`.
pub fn ddt_exp_l(z: &CCDNumber, t: f64) -> CCDNumber {
    z * &character(z, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::random_ccd;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn rel_err(a: &CCDNumber, b: &CCDNumber) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    #[test]
    fn zero_and_real_arguments() {
        assert_eq!(exp_l_series(&CCDNumber::zero(3), 40).value, CCDNumber::one(3));
        assert_eq!(exp_l_closed(&CCDNumber::zero(3)), CCDNumber::one(3));
        for t in [-5.0, -1.3, 0.4, 5.0] {
            let z = CCDNumber::scalar(2, t);
            let s = exp_l_series(&z, 40).value;
            assert!((s.re_scalar() - f64::exp(t)).abs() < 1e-12 * f64::exp(t).max(1.0));
        }
    }

    #[test]
    fn quarter_turn_gives_i1() {
        let z = CCDNumber::basis(3, 1).scale(PI / 2.0);
        let s = exp_l_series(&z, 40).value;
        assert!((&s - &CCDNumber::basis(3, 1)).max_abs() < 1e-12);
        let c = exp_l_closed(&z);
        assert!((&c - &CCDNumber::basis(3, 1)).max_abs() < 1e-12);
    }

    #[test]
    fn euler_formula_on_complex_scalars() {
        let z = CCDNumber::from_complex(3, Complex64::new(0.3, 1.1));
        let expected = Complex64::new(0.3, 1.1).exp();
        let c = exp_l_closed(&z);
        assert!((c.complex_part() - expected).norm() < 1e-15);
        assert!(c.re.im().is_zero() && c.im.im().is_zero());
    }

    #[test]
    fn decomposition_reassembles_and_w_squared_is_scalar() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for level in 0..=5u8 {
            let z = random_ccd(&mut rng, level);
            let d = ExpDecomposition::of(&z);
            assert_eq!(d.reassemble(), z);
            let w = d.w();
            let w2 = &w * &w;
            let non_scalar = w2.re.im().max_abs().max(w2.im.im().max_abs());
            assert!(non_scalar < 1e-12, "level {level}: {non_scalar}");
            assert!((w2.complex_part() - d.w_squared()).norm() < 1e-12);
        }
    }

    #[test]
    fn closed_form_matches_series() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for level in 0..=4u8 {
            for _ in 0..100 {
                let z = random_ccd(&mut rng, level);
                let z = z.scale(rng.gen_range(0.0..3.0) / z.norm().max(1e-12));
                let s = exp_l_series(&z, 60);
                let c = exp_l_closed(&z);
                assert!(rel_err(&c, &s.value) < 1e-10);
                assert!((&c - &s.value).norm() <= s.tail_bound + 1e-13 * s.value.norm());
            }
        }
    }

    #[test]
    fn complex_nu_case() {
        // z = i_1 + I i_2: Re(u'v') = 0, |u'| = |v'|, nu = 0.
        let z = &CCDNumber::basis(3, 1) + &CCDNumber::i_basis(3, 2);
        assert!(ExpDecomposition::of(&z).nu.norm() < 1e-15);
        assert!(rel_err(&exp_l_closed(&z), &exp_l_series(&z, 60).value) < 1e-10);
        // z = i_1 + I (0.5 i_1 + i_2): Re(u'v') = -0.5, complex nu.
        let mut v = CDNumber::basis(3, 2);
        v.coeffs_mut()[1] = 0.5;
        let z = CCDNumber {
            re: CDNumber::basis(3, 1),
            im: v,
        };
        let nu = ExpDecomposition::of(&z).nu;
        assert!(nu.im.abs() > 0.1 && nu.re.abs() > 0.1);
        assert!(rel_err(&exp_l_closed(&z), &exp_l_series(&z, 60).value) < 1e-10);
    }

    #[test]
    fn near_zero_nu_uses_taylor_branch() {
        let z = CCDNumber::basis(2, 3).scale(1e-8);
        let c = exp_l_closed(&z);
        assert!((c.re_scalar() - 1.0).abs() < 1e-15);
        assert!((c.re.coeffs()[3] - 1e-8).abs() < 1e-22);
    }

    #[test]
    fn nu_sign_does_not_matter() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let z = random_ccd(&mut rng, 3);
            let d = ExpDecomposition::of(&z);
            let mut flipped = d.clone();
            flipped.nu = -d.nu;
            assert!(rel_err(&flipped.exp_scaled(1.0), &d.exp_scaled(1.0)) < 1e-13);
        }
    }

    #[test]
    fn character_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let z = random_ccd(&mut rng, 3);
        assert_eq!(character(&z, 0.0), CCDNumber::one(3));
        let prod = &character(&z, 0.3) * &character(&z, 0.7);
        assert!(rel_err(&prod, &character(&z, 1.0)) < 1e-10);
        assert!(rel_err(&character(&z, 1.0), &exp_l_series(&z, 60).value) < 1e-10);
        let x = CCDNumber::scalar(3, 0.8);
        assert!((character(&x, 2.0).re_scalar() - 1.6f64.exp()).abs() < 1e-14);
    }

    #[test]
    fn derivative_law() {
        assert_eq!(ddt_exp_l(&CCDNumber::one(2), 0.0), CCDNumber::one(2));
        let z = CCDNumber::basis(2, 1);
        let d = ddt_exp_l(&z, PI);
        assert!((&d + &CCDNumber::basis(2, 1)).max_abs() < 1e-14);
    }
}
