//! Projective consistency of a marginal family, and a perturbed copy.

use hypergauss::cylinder::{consistency_check, ConsistencyOptions, FamilySpec, MemberMeasure};
use hypergauss::{BlockSpec, CCDNumber, Matrix, MeasureSpec};

fn main() -> hypergauss::Result<()> {
    let b = Matrix::from_rows(vec![vec![2.0, 0.5], vec![0.5, 1.0]])?;
    let spec = MeasureSpec::centered(vec![
        BlockSpec::without_drift(&CCDNumber::scalar(2, 2.0) + &CCDNumber::i_basis(2, 1), b)?,
        BlockSpec::without_drift(CCDNumber::one(2), Matrix::identity(1))?,
    ])?;
    let subsets = [vec![1, 2, 3], vec![1, 2], vec![2, 3], vec![1]];
    let mut family = FamilySpec::from_marginals(vec![0.5, 1.0, 2.0], &spec, &subsets)?;
    let opts = ConsistencyOptions::default();

    let r = consistency_check(&family, &opts)?;
    println!("marginal family consistent: {}, variation bound {:?}", r.consistent, r.bound);

    // replace member {1} by a version whose coefficient is off by 1e-3
    let a = &CCDNumber::scalar(2, 2.001) + &CCDNumber::i_basis(2, 1);
    let bad = MeasureSpec::centered(vec![BlockSpec::without_drift(a, Matrix::diagonal(&[2.0]))?])?;
    family.members_mut()[3].measure = MemberMeasure::Spec(bad);
    let r = consistency_check(&family, &opts)?;
    println!("perturbed family consistent: {}", r.consistent);
    for v in &r.violations {
        println!("  {v}");
    }
    Ok(())
}
