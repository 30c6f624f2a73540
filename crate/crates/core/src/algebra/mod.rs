//! Cayley-Dickson algebras `A_r` and their complexifications `A_{r,C}`.

mod ccd;
mod cd;

pub use ccd::CCDNumber;
pub(crate) use cd::fmt_magnitude;
pub use cd::{CDNumber, MAX_LEVEL, TABLE_LEVEL};

use rand::Rng;

/// Random element with coefficients uniform in `[-1, 1)`.
pub fn random_cd<R: Rng + ?Sized>(rng: &mut R, level: u8) -> CDNumber {
    let coeffs = (0..1usize << level).map(|_| rng.gen_range(-1.0..1.0)).collect();
    CDNumber::from_coeffs(level, coeffs).expect("valid level")
}

pub fn random_ccd<R: Rng + ?Sized>(rng: &mut R, level: u8) -> CCDNumber {
    CCDNumber {
        re: random_cd(rng, level),
        im: random_cd(rng, level),
    }
}

/// First pair `(e_a + e_b, e_c + sign e_d)` whose product vanishes, scanning
/// `a < b`, `c < d` over the imaginary units in increasing order.
pub fn zero_divisor_pair(level: u8) -> Option<(CDNumber, CDNumber)> {
    let dim = 1usize << level;
    let unit_pair = |a: usize, b: usize, sign: f64| {
        let mut x = CDNumber::basis(level, a);
        x.coeffs_mut()[b] = sign;
        x
    };
    for a in 1..dim {
        for b in a + 1..dim {
            let x = unit_pair(a, b, 1.0);
            for c in 1..dim {
                for d in c + 1..dim {
                    for sign in [1.0, -1.0] {
                        let y = unit_pair(c, d, sign);
                        if (&x * &y).max_abs() == 0.0 {
                            return Some((x, y));
                        }
                    }
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rel(a: &CDNumber, b: &CDNumber) -> f64 {
        (a - b).abs() / (1.0 + b.abs())
    }

    #[test]
    fn conjugation_reverses_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for level in 0..=MAX_LEVEL {
            for _ in 0..20 {
                let x = random_cd(&mut rng, level);
                let y = random_cd(&mut rng, level);
                assert!(rel(&(&x * &y).conj(), &(&y.conj() * &x.conj())) < 1e-12);
                assert!(((&x * &y).re() - (&y * &x).re()).abs() < 1e-12);
                assert!(((&x * &x.conj()).re() - x.norm_sqr()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn associativity_and_alternativity_by_level() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for level in 0..=4u8 {
            let mut worst_assoc: f64 = 0.0;
            let mut worst_alt: f64 = 0.0;
            for _ in 0..50 {
                let x = random_cd(&mut rng, level);
                let y = random_cd(&mut rng, level);
                let z = random_cd(&mut rng, level);
                worst_assoc = worst_assoc.max(rel(&(&(&x * &y) * &z), &(&x * &(&y * &z))));
                worst_alt = worst_alt.max(rel(&(&(&x * &x) * &y), &(&x * &(&x * &y))));
            }
            if level <= 2 {
                assert!(worst_assoc < 1e-12, "level {level}");
            } else {
                assert!(worst_assoc > 1e-3, "level {level} should be nonassociative");
            }
            if level <= 3 {
                assert!(worst_alt < 1e-12, "level {level}");
            } else {
                assert!(worst_alt > 1e-3, "level {level} should be non-alternative");
            }
        }
    }

    /// Dimension of the subspace commuting with every basis element,
    /// from the rank of the stacked commutator maps.
    fn center_dim(dim: usize, commutator: impl Fn(usize, usize) -> Vec<f64>, basis_count: usize) -> usize {
        // rows: (generator, output component); columns: input basis element
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for g in 0..basis_count {
            let cols: Vec<Vec<f64>> = (0..dim).map(|c| commutator(g, c)).collect();
            let out_len = cols[0].len();
            for r in 0..out_len {
                rows.push(cols.iter().map(|col| col[r]).collect());
            }
        }
        dim - rank(rows)
    }

    fn rank(mut rows: Vec<Vec<f64>>) -> usize {
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for col in 0..ncols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][col].abs() > 1e-9) else {
                continue;
            };
            rows.swap(rank, pivot);
            let p = rows[rank].clone();
            for r in 0..rows.len() {
                if r != rank {
                    let f = rows[r][col] / p[col];
                    for c in 0..ncols {
                        rows[r][c] -= f * p[c];
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn center_is_reals_and_complex_scalars() {
        for level in 2..=4u8 {
            let dim = 1usize << level;
            let real_center = center_dim(
                dim,
                |g, c| {
                    let e = CDNumber::basis(level, g);
                    let x = CDNumber::basis(level, c);
                    (&(&e * &x) - &(&x * &e)).into_coeffs()
                },
                dim,
            );
            assert_eq!(real_center, 1, "level {level}");

            let ccd_basis = |c: usize| {
                if c < dim {
                    CCDNumber::basis(level, c)
                } else {
                    CCDNumber::i_basis(level, c - dim)
                }
            };
            let complex_center = center_dim(
                2 * dim,
                |g, c| {
                    let e = ccd_basis(g);
                    let x = ccd_basis(c);
                    let d = &(&e * &x) - &(&x * &e);
                    d.interleaved().collect()
                },
                2 * dim,
            );
            assert_eq!(complex_center, 2, "level {level}");
        }
    }

    #[test]
    fn complexified_norm_is_submultiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let z = random_ccd(&mut rng, 3);
            let w = random_ccd(&mut rng, 3);
            assert!((&z * &w).norm() <= z.norm() * w.norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn zero_divisors_appear_at_sedenions() {
        for level in 0..=3 {
            assert!(zero_divisor_pair(level).is_none());
        }
        let (x, y) = zero_divisor_pair(4).unwrap();
        assert_eq!((&x * &y).abs(), 0.0);
        assert!((x.abs() * y.abs() - 2.0).abs() < 1e-15);
    }
}
