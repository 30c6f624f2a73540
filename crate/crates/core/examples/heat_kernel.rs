//! Heat kernel from the grid inversion, compared with the Gaussian.

use hypergauss::kernel::{eval_kernel, pde_residual, GridSpec};
use hypergauss::{BlockSpec, CCDNumber, Matrix, MeasureSpec};

fn main() -> hypergauss::Result<()> {
    let spec = MeasureSpec::centered(vec![BlockSpec::without_drift(
        CCDNumber::one(0),
        Matrix::identity(1),
    )?])?;
    let grid = GridSpec::uniform(1, 12.0, 1024, 1.0)?;
    let k = eval_kernel(&spec, &grid, false)?;
    let c = (2.0 * std::f64::consts::PI).sqrt().recip();
    let dev = k.max_abs_deviation(|x| CCDNumber::scalar(0, c * (-x[0] * x[0] / 2.0).exp()));
    println!("max deviation from the Gaussian: {dev:e}");
    println!("mass: {:.15}", k.mass());
    println!("frequency boundary magnitude: {:e}", k.boundary_decay);

    let r = pde_residual(&spec, &grid, 1e-3, false)?;
    println!("PDE residual: {:e} over {} points", r.max_residual, r.points_checked);

    let past = eval_kernel(&spec, &grid.with_t(-1.0), false)?;
    println!("negative time gives zero: {}", past.values.iter().all(CCDNumber::is_zero));
    Ok(())
}
