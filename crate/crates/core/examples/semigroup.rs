//! theta(t) theta(s) = theta(t + s) at random probe points.

use hypergauss::charfunc::{char_functional, decay_margin, default_radii};
use hypergauss::cylinder::{probe_points, semigroup_check};
use hypergauss::{BlockSpec, CCDNumber, Matrix, MeasureSpec};

fn main() -> hypergauss::Result<()> {
    let spec = MeasureSpec::centered(vec![
        BlockSpec::without_drift(
            &CCDNumber::scalar(2, 2.0) + &CCDNumber::i_basis(2, 1),
            Matrix::identity(1),
        )?,
        BlockSpec::new(CCDNumber::one(2), Matrix::identity(1), vec![CCDNumber::basis(2, 2)])?,
    ])?
    .with_shift_from_drift();

    println!("theta(y) at y = (1, -0.5), t = 1: {}", char_functional(&spec, &[1.0, -0.5], 1.0)?);
    let probes = probe_points(spec.n(), 100, 7, 3.0);
    for (t, s) in [(0.3, 0.7), (0.5, 0.5)] {
        println!("t = {t}, s = {s}: deviation {:e}", semigroup_check(&spec, t, s, &probes)?);
    }

    let decay = decay_margin(&spec, &[1.0, 0.0], 1.0, &default_radii())?;
    for (rho, m) in decay.radii.iter().zip(&decay.magnitudes) {
        println!("rho = {rho:>4}: ||exp_l(z)|| = {m:e}");
    }
    Ok(())
}
