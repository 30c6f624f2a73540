//! Condition (alpha) for the three reference coefficients.

use hypergauss::spectral::check_alpha;
use hypergauss::{BlockSpec, CCDNumber, Matrix, MeasureSpec};

fn main() -> hypergauss::Result<()> {
    let cases = [
        ("1", CCDNumber::one(2)),
        ("I", CCDNumber::unit_i(2)),
        ("2 + I i1", &CCDNumber::scalar(2, 2.0) + &CCDNumber::i_basis(2, 1)),
        ("0.5 + I i1", &CCDNumber::scalar(2, 0.5) + &CCDNumber::i_basis(2, 1)),
    ];
    for (label, a) in cases {
        let spec = MeasureSpec::centered(vec![BlockSpec::without_drift(a, Matrix::identity(1))?])?;
        let r = check_alpha(&spec)?;
        let b = &r.blocks[0];
        println!(
            "a = {label:<11} pass = {:<5} boundary = {:<5} margin = {:+.3}",
            r.pass, b.boundary, b.margin
        );
    }
    Ok(())
}
