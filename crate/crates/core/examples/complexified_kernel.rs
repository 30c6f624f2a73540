//! Kernel for a = 2 + I i1: a mixture of two real Gaussians with
//! hypercomplex weights, K = (1 - I i1)/2 G_t + (1 + I i1)/2 G_3t.

use std::f64::consts::PI;

use hypergauss::kernel::{eval_kernel, pde_residual, suggest_grid, GridSpec};
use hypergauss::{BlockSpec, CCDNumber, Matrix, MeasureSpec};

fn gauss(x: f64, var: f64) -> f64 {
    (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt()
}

fn main() -> hypergauss::Result<()> {
    let a = &CCDNumber::scalar(2, 2.0) + &CCDNumber::i_basis(2, 1);
    let spec = MeasureSpec::centered(vec![BlockSpec::without_drift(a, Matrix::identity(1))?])?;
    let t = 1.0;
    println!("suggested grid: {:?}", suggest_grid(&spec, t)?.axes());

    let grid = GridSpec::uniform(1, 24.0, 1024, t)?;
    let k = eval_kernel(&spec, &grid, false)?;
    let w = CCDNumber::i_basis(2, 1).scale(0.5);
    let lo = &CCDNumber::scalar(2, 0.5) - &w;
    let hi = &CCDNumber::scalar(2, 0.5) + &w;
    let dev = k.max_abs_deviation(|x| &lo.scale(gauss(x[0], t)) + &hi.scale(gauss(x[0], 3.0 * t)));
    println!("max deviation from the two-Gaussian form: {dev:e}");
    println!("integral: {}", k.integral());

    let fine = GridSpec::uniform(1, 24.0, 2048, t)?;
    let r = pde_residual(&spec, &fine, 1e-3, false)?;
    println!("PDE residual: {:e}", r.max_residual);
    Ok(())
}
