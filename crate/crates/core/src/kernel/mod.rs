//! Fourier operators on rectangular grids and the fundamental solution
//!
//! ```text
//! K(x, t) = theta(t) (2 pi)^-n  int exp_l(z(y, t)) exp(-I (y, x)) dy
//! ```
//!
//! Transforms use angular frequency with no `2 pi` in the exponent:
//! `F f(y) = int f(x) exp(I (y, x)) dx` and the `(2 pi)^-n` factor sits in the
//! inverse. On an axis with extent `L` and `N` points the samples are
//! `x_k = -L + k h` with `h = 2L / N`, and the dual samples are
//! `y_j = (j - N/2) dy` with `dy = pi / L`, so `h dy = 2 pi / N` and both
//! directions reduce to a plain DFT with alternating signs.

mod eval;
mod fourier;
mod grid;
mod io;
mod oracle;
mod residual;

pub use eval::{eval_density, eval_kernel, suggest_grid, KernelField, DECAY_TARGET};
pub use fourier::{fourier_forward, fourier_inverse};
pub use grid::{Axis, GridSpec, MAX_POINTS, MIN_TIME};
pub use oracle::GaussianOracle;
pub use io::{read_binary, write_binary, write_csv, FORMAT_VERSION};
pub use residual::{pde_residual, ResidualReport};
