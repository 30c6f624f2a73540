use hypergauss::config::{format_literal, parse_literal};
use hypergauss::cylinder::{variation, DiscreteMeasure};
use hypergauss::explog::{character, exp_l_closed, exp_l_series};
use hypergauss::kernel::{fourier_forward, fourier_inverse, GridSpec};
use hypergauss::spectral::{check_alpha, diagonalize};
use hypergauss::{BlockSpec, CCDNumber, CDNumber, Matrix, MeasureSpec};
use proptest::prelude::*;

fn cd(level: u8) -> impl Strategy<Value = CDNumber> {
    prop::collection::vec(-2.0..2.0f64, 1usize << level)
        .prop_map(move |c| CDNumber::from_coeffs(level, c).unwrap())
}

fn ccd(level: u8) -> impl Strategy<Value = CCDNumber> {
    (cd(level), cd(level)).prop_map(|(re, im)| CCDNumber { re, im })
}

fn cd_any() -> impl Strategy<Value = (CDNumber, CDNumber, CDNumber)> {
    (0u8..=5).prop_flat_map(|l| (cd(l), cd(l), cd(l)))
}

fn ccd_any() -> impl Strategy<Value = CCDNumber> {
    (0u8..=4).prop_flat_map(ccd)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn conjugation_reverses_products((x, y, _) in cd_any()) {
        let lhs = (&x * &y).conj();
        let rhs = &y.conj() * &x.conj();
        prop_assert!((&lhs - &rhs).abs() <= 1e-12 * (1.0 + x.abs() * y.abs()));
    }

    #[test]
    fn products_distribute((x, y, z) in cd_any(), c in -3.0..3.0f64) {
        let lhs = &(&x.scale(c) + &y) * &z;
        let rhs = &(&x * &z).scale(c) + &(&y * &z);
        prop_assert!((&lhs - &rhs).abs() <= 1e-12 * (1.0 + (c.abs() * x.abs() + y.abs()) * z.abs()));
    }

    #[test]
    fn norm_is_multiplicative_through_octonions(l in 0u8..=3, seed in any::<u64>()) {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let x = hypergauss::algebra::random_cd(&mut rng, l);
        let y = hypergauss::algebra::random_cd(&mut rng, l);
        let expected = x.abs() * y.abs();
        prop_assert!(((&x * &y).abs() - expected).abs() <= 1e-12 * expected.max(1e-300));
    }

    #[test]
    fn complexified_norm_is_submultiplicative(z in ccd(3), w in ccd(3)) {
        prop_assert!((&z * &w).norm() <= z.norm() * w.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn exp_closed_form_matches_series(z in ccd_any()) {
        let z = if z.norm() > 3.0 { z.scale(3.0 / z.norm()) } else { z };
        let series = exp_l_series(&z, 60).value;
        prop_assert!((&exp_l_closed(&z) - &series).norm() <= 1e-10 * series.norm());
    }

    #[test]
    fn character_is_multiplicative(z in ccd_any(), t in -1.0..1.0f64, s in -1.0..1.0f64) {
        let joint = character(&z, t + s);
        let product = &character(&z, t) * &character(&z, s);
        prop_assert!((&product - &joint).norm() <= 1e-10 * joint.norm().max(1e-300));
    }

    #[test]
    fn literals_round_trip(z in ccd_any()) {
        prop_assert_eq!(parse_literal(&format_literal(&z), z.level()).unwrap(), z);
    }

    #[test]
    fn admissibility_is_invariant_under_positive_scaling(a in ccd(2), c in 0.1..10.0f64) {
        prop_assume!(!a.is_zero());
        let spec = |a: CCDNumber| {
            MeasureSpec::centered(vec![BlockSpec::without_drift(a, Matrix::identity(1)).unwrap()]).unwrap()
        };
        let r1 = check_alpha(&spec(a.clone())).unwrap();
        let r2 = check_alpha(&spec(a.scale(c))).unwrap();
        prop_assume!(r1.blocks[0].margin.abs() > 1e-9 * (1.0 + a.norm()));
        prop_assert_eq!(r1.pass, r2.pass);
        prop_assert!((r2.blocks[0].margin - c * r1.blocks[0].margin).abs() <= 1e-10 * c * (1.0 + a.norm()));
    }

    #[test]
    fn diagonalization_reconstructs(rows in prop::collection::vec(prop::collection::vec(-1.0..1.0f64, 4), 4)) {
        let a = Matrix::from_rows(rows).unwrap();
        let mut b = a.transpose().matmul(&a);
        for k in 0..4 {
            let mut r = b.to_rows();
            r[k][k] += 0.1;
            b = Matrix::from_rows(r).unwrap();
        }
        let d = diagonalize(&b).unwrap();
        let rebuilt = d.q.transpose().matmul(&Matrix::diagonal(&d.lambdas)).matmul(&d.q);
        prop_assert!(rebuilt.max_abs_diff(&b) <= 1e-10 * b.max_abs());
        prop_assert!(d.lambdas.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((d.lambdas.iter().sum::<f64>() - b.trace()).abs() <= 1e-10 * b.trace());
    }

    #[test]
    fn grid_indices_round_trip(n0 in 1usize..5, n1 in 1usize..5, flat in 0usize..1024) {
        let grid = GridSpec::new(
            vec![
                hypergauss::kernel::Axis::new(3.0, 1 << n0).unwrap(),
                hypergauss::kernel::Axis::new(5.0, 1 << n1).unwrap(),
            ],
            1.0,
        ).unwrap();
        let flat = flat % grid.total_points();
        prop_assert_eq!(grid.ravel(&grid.unravel(flat)), flat);
        prop_assert_eq!(grid.mirror(grid.mirror(flat)), flat);
    }

    #[test]
    fn fourier_round_trip(values in prop::collection::vec(ccd(1), 32)) {
        let grid = GridSpec::uniform(1, 4.0, 32, 1.0).unwrap();
        let back = fourier_inverse(&grid, &fourier_forward(&grid, &values).unwrap()).unwrap();
        for (a, b) in values.iter().zip(&back) {
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }

    #[test]
    fn variation_is_a_norm(
        w1 in prop::collection::vec(ccd(1), 1..6),
        w2 in prop::collection::vec(ccd(1), 1..6),
        c in -3.0..3.0f64,
    ) {
        let atoms = |w: &[CCDNumber], offset: f64| -> Vec<(Vec<f64>, CCDNumber)> {
            w.iter().enumerate().map(|(k, z)| (vec![k as f64 + offset], z.clone())).collect()
        };
        let mu = DiscreteMeasure::new(1, 1, atoms(&w1, 0.0)).unwrap();
        let nu = DiscreteMeasure::new(1, 1, atoms(&w2, 0.5)).unwrap();
        let sum = mu.add_scaled(&nu, 1.0).unwrap();
        prop_assert!(variation(&sum) <= variation(&mu) + variation(&nu) + 1e-12);
        prop_assert!((variation(&mu.scale(c)) - c.abs() * variation(&mu)).abs() <= 1e-12 * (1.0 + variation(&mu)));
    }
}
