//! Mean and covariance recovered from the density, both covariance routes.

use hypergauss::kernel::suggest_grid;
use hypergauss::moments::{estimate_moments, CovarianceRoute};
use hypergauss::{BlockSpec, CCDNumber, Matrix, MeasureSpec};

fn main() -> hypergauss::Result<()> {
    let b = Matrix::from_rows(vec![vec![2.0, 0.5], vec![0.5, 1.0]])?;
    let spec = MeasureSpec::new(
        vec![
            BlockSpec::without_drift(&CCDNumber::scalar(2, 2.0) + &CCDNumber::i_basis(2, 1), b)?,
            BlockSpec::without_drift(CCDNumber::scalar(2, 1.5), Matrix::identity(1))?,
        ],
        vec![
            CCDNumber::scalar(2, 0.5),
            CCDNumber::basis(2, 3).scale(0.25),
            CCDNumber::scalar(2, -1.0),
        ],
    )?;
    let grid = suggest_grid(&spec, 1.0)?;
    for route in [CovarianceRoute::Direct, CovarianceRoute::Diagonalized] {
        let r = estimate_moments(&spec, &grid, route)?;
        println!(
            "{route:?}: mean deviation {:e}, covariance deviation {:e}",
            r.max_mean_deviation(),
            r.max_covariance_deviation()
        );
    }
    let r = estimate_moments(&spec, &grid, CovarianceRoute::Diagonalized)?;
    for (k, row) in r.covariance.iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|c| format!("{c:>14}")).collect();
        println!("C[{}] = {}", k + 1, cells.join(" "));
    }
    Ok(())
}
