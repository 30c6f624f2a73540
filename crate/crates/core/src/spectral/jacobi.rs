//! Cyclic Jacobi eigen-solver for real symmetric matrices.

use super::matrix::Matrix;
use crate::error::Result;

const MAX_SWEEPS: usize = 100;

/// Orthogonal `Q` and ascending eigenvalues with `Q B Q^t = diag(lambdas)`.
///
/// Row `k` of `Q` is the unit eigenvector for `lambdas[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagonalization {
    pub q: Matrix,
    pub lambdas: Vec<f64>,
}

pub fn diagonalize(b: &Matrix) -> Result<Diagonalization> {
    b.check_symmetric()?;
    let n = b.rows();
    let mut a = b.clone();
    // symmetrize exactly so rotations see a truly symmetric matrix
    for r in 0..n {
        for c in r + 1..n {
            let m = 0.5 * (a[(r, c)] + a[(c, r)]);
            a[(r, c)] = m;
            a[(c, r)] = m;
        }
    }
    // columns of v accumulate eigenvectors: A = V D V^t
    let mut v = Matrix::identity(n);
    let threshold = 1e-14 * b.frobenius();

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                // signum(0.0) == 1.0, so theta = 0 rotates by pi/4
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let lambdas = order.iter().map(|&k| a[(k, k)]).collect();
    let mut q = Matrix::zeros(n, n);
    for (row, &k) in order.iter().enumerate() {
        for c in 0..n {
            q[(row, c)] = v[(c, k)];
        }
    }
    Ok(Diagonalization { q, lambdas })
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)] * a[(r, c)];
            }
        }
    }
    s.sqrt()
}

/// Apply the rotation `J(p, q)` so that `a <- J^t a J` and `v <- v J`.
fn rotate(a: &mut Matrix, v: &mut Matrix, p: usize, q: usize, c: f64, s: f64) {
    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = c * akp - s * akq;
        a[(k, q)] = s * akp + c * akq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = c * apk - s * aqk;
        a[(q, k)] = s * apk + c * aqk;
    }
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}
