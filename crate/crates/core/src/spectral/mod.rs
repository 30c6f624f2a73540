//! Block operator data: the symmetric positive definite matrices `B_j`, their
//! coefficients `a_j`, drift coefficients, the shift `p`, and the
//! admissibility condition on each `a_j`.

mod jacobi;
mod matrix;

pub use jacobi::{diagonalize, Diagonalization};
pub use matrix::Matrix;

use num_complex::Complex64;
use serde::Serialize;

use crate::algebra::CCDNumber;
use crate::error::{Error, Result};

/// Margins with absolute value below this are reported as boundary cases.
pub const ALPHA_BOUNDARY_TOL: f64 = 1e-12;

/// One summand `a_j B_j` of the operator, acting on `m_j` consecutive coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpec {
    a: CCDNumber,
    b: Matrix,
    psi: Vec<CCDNumber>,
}

impl BlockSpec {
    pub fn new(a: CCDNumber, b: Matrix, psi: Vec<CCDNumber>) -> Result<Self> {
        if !b.is_square() {
            return Err(Error::dim("block matrix columns", b.rows(), b.cols()));
        }
        if b.rows() == 0 {
            return Err(Error::dim("block dimension", 1, 0));
        }
        if psi.len() != b.rows() {
            return Err(Error::dim("drift coefficients", b.rows(), psi.len()));
        }
        let level = a.level();
        if let Some(bad) = psi.iter().find(|s| s.level() != level) {
            return Err(Error::LevelMismatch(level, bad.level()));
        }
        Ok(Self { a, b, psi })
    }

    /// Block with zero drift.
    pub fn without_drift(a: CCDNumber, b: Matrix) -> Result<Self> {
        let level = a.level();
        let m = b.rows();
        Self::new(a, b, vec![CCDNumber::zero(level); m])
    }

    pub fn m(&self) -> usize {
        self.b.rows()
    }

    pub fn a(&self) -> &CCDNumber {
        &self.a
    }

    pub fn b(&self) -> &Matrix {
        &self.b
    }

    pub fn psi(&self) -> &[CCDNumber] {
        &self.psi
    }

    pub fn level(&self) -> u8 {
        self.a.level()
    }

    /// `(B y, y)`.
    pub fn quad_form(&self, y: &[f64]) -> Result<f64> {
        if y.len() != self.m() {
            return Err(Error::dim("quadratic form argument", self.m(), y.len()));
        }
        Ok(quad_form_unchecked(&self.b, y))
    }
}

pub(crate) fn quad_form_unchecked(b: &Matrix, y: &[f64]) -> f64 {
    let mut s = 0.0;
    for (r, yr) in y.iter().enumerate() {
        let row = b.row(r);
        s += yr * row.iter().zip(y).map(|(a, b)| a * b).sum::<f64>();
    }
    s
}

/// Ordered blocks plus the shift `p`; defines `U = (+)_j a_j B_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasureSpec {
    level: u8,
    blocks: Vec<BlockSpec>,
    p: Vec<CCDNumber>,
    /// `offsets[j]` is the first coordinate of block `j`; last entry is `n`.
    offsets: Vec<usize>,
}

impl MeasureSpec {
    /// Validates levels, dimensions, finiteness, nonzero `a_j`, and that every
    /// `B_j` is symmetric positive definite.
    pub fn new(blocks: Vec<BlockSpec>, p: Vec<CCDNumber>) -> Result<Self> {
        let first = blocks.first().ok_or_else(|| Error::dim("blocks", 1, 0))?;
        let level = first.level();
        let mut offsets = vec![0];
        for (j, block) in blocks.iter().enumerate() {
            if block.level() != level {
                return Err(Error::LevelMismatch(level, block.level()));
            }
            if block.a.is_zero() {
                return Err(Error::ZeroCoefficient { block: j + 1 });
            }
            let finite = block.a.is_finite()
                && block.psi.iter().all(CCDNumber::is_finite)
                && block.b.to_rows().iter().flatten().all(|v| v.is_finite());
            if !finite {
                return Err(Error::NonFinite(format!("block {}", j + 1)));
            }
            let min_eig = min_eigenvalue(&block.b)?;
            if !(min_eig > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    block: j + 1,
                    eigenvalue: min_eig,
                });
            }
            offsets.push(offsets[j] + block.m());
        }
        let n = *offsets.last().unwrap();
        if p.len() != n {
            return Err(Error::dim("shift p", n, p.len()));
        }
        if let Some(bad) = p.iter().find(|x| x.level() != level) {
            return Err(Error::LevelMismatch(level, bad.level()));
        }
        Ok(Self {
            level,
            blocks,
            p,
            offsets,
        })
    }

    /// Spec with zero shift.
    pub fn centered(blocks: Vec<BlockSpec>) -> Result<Self> {
        let level = blocks.first().map_or(0, BlockSpec::level);
        let n = blocks.iter().map(BlockSpec::m).sum();
        Self::new(blocks, vec![CCDNumber::zero(level); n])
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    pub fn n(&self) -> usize {
        *self.offsets.last().unwrap()
    }

    pub fn blocks(&self) -> &[BlockSpec] {
        &self.blocks
    }

    pub fn p(&self) -> &[CCDNumber] {
        &self.p
    }

    /// Block boundaries `beta_0 = 0, beta_1, ..., beta_m = n`.
    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn block_range(&self, j: usize) -> std::ops::Range<usize> {
        self.offsets[j]..self.offsets[j + 1]
    }

    /// Index of the block containing coordinate `k`.
    pub fn block_of(&self, k: usize) -> usize {
        self.offsets.partition_point(|&o| o <= k) - 1
    }

    /// Drift vector `s`, the concatenation of every block's `psi`.
    pub fn drift(&self) -> Vec<CCDNumber> {
        self.blocks.iter().flat_map(|b| b.psi.iter().cloned()).collect()
    }

    pub fn with_p(&self, p: Vec<CCDNumber>) -> Result<Self> {
        Self::new(self.blocks.clone(), p)
    }

    /// The same operator with shift `p = -s`.
    pub fn with_shift_from_drift(&self) -> Self {
        let p = self.drift().iter().map(|s| -s).collect();
        Self::new(self.blocks.clone(), p).expect("same dimensions")
    }

    /// Entry `(k, h)` of `U`: `a_j b_{kh;j}` inside block `j`, zero across blocks.
    pub fn u_entry(&self, k: usize, h: usize) -> CCDNumber {
        let j = self.block_of(k);
        if self.block_of(h) != j {
            return CCDNumber::zero(self.level);
        }
        let o = self.offsets[j];
        let block = &self.blocks[j];
        block.a.scale(block.b[(k - o, h - o)])
    }

    /// `U` as an `n x n` array.
    pub fn u_matrix(&self) -> Vec<Vec<CCDNumber>> {
        let n = self.n();
        (0..n).map(|k| (0..n).map(|h| self.u_entry(k, h)).collect()).collect()
    }

    /// `(B_j y_j, y_j)` for every block.
    pub fn block_quad_forms(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.n() {
            return Err(Error::dim("argument y", self.n(), y.len()));
        }
        Ok(self
            .blocks
            .iter()
            .enumerate()
            .map(|(j, b)| quad_form_unchecked(&b.b, &y[self.block_range(j)]))
            .collect())
    }
}

fn min_eigenvalue(b: &Matrix) -> Result<f64> {
    let d = diagonalize(b)?;
    Ok(d.lambdas[0])
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlockAdmissibility {
    /// 1-based block index.
    pub block: usize,
    /// Principal root of `|Im a_{j,0}|^2 - |Im a_{j,1}|^2 - 2 I Re(a_{j,0} a_{j,1})`.
    pub q: Complex64,
    pub phi: f64,
    pub re_a0: f64,
    /// `Re(a_{j,0}) - |q| |sin phi|`; must be strictly positive.
    pub margin: f64,
    pub pass: bool,
    /// `|margin|` below the boundary tolerance; verdicts there are unreliable.
    pub boundary: bool,
    pub min_eigenvalue: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub blocks: Vec<BlockAdmissibility>,
    pub pass: bool,
    /// Whether `Re(psi_a psi_b*) = 0` for every pair of distinct drift entries.
    /// Informational only.
    pub psi_orthogonal: bool,
}

impl AdmissibilityReport {
    pub fn failing_blocks(&self) -> Vec<usize> {
        self.blocks.iter().filter(|b| !b.pass).map(|b| b.block).collect()
    }

    pub fn min_margin(&self) -> f64 {
        self.blocks.iter().map(|b| b.margin).fold(f64::INFINITY, f64::min)
    }
}

pub fn check_alpha(spec: &MeasureSpec) -> Result<AdmissibilityReport> {
    check_alpha_with(spec, ALPHA_BOUNDARY_TOL)
}

pub fn check_alpha_with(spec: &MeasureSpec, boundary_tol: f64) -> Result<AdmissibilityReport> {
    let mut blocks = Vec::with_capacity(spec.blocks.len());
    for (j, block) in spec.blocks.iter().enumerate() {
        let min_eig = min_eigenvalue(&block.b)?;
        if !(min_eig > 0.0) {
            return Err(Error::NotPositiveDefinite {
                block: j + 1,
                eigenvalue: min_eig,
            });
        }
        let (q, phi) = alpha_q(&block.a);
        let re_a0 = block.a.re.re();
        let margin = re_a0 - q.norm() * phi.sin().abs();
        blocks.push(BlockAdmissibility {
            block: j + 1,
            q,
            phi,
            re_a0,
            margin,
            pass: margin > 0.0,
            boundary: margin.abs() < boundary_tol,
            min_eigenvalue: min_eig,
        });
    }
    let pass = blocks.iter().all(|b| b.pass);
    Ok(AdmissibilityReport {
        blocks,
        pass,
        psi_orthogonal: drift_orthogonal(&spec.drift(), 1e-12),
    })
}

/// `q` and `phi = arg q`, with `arg 0 = 0`.
fn alpha_q(a: &CCDNumber) -> (Complex64, f64) {
    let a0 = &a.re;
    let a1 = &a.im;
    let re_a0a1 = (a0 * a1).re();
    let q_sq = Complex64::new(
        a0.im().norm_sqr() - a1.im().norm_sqr() + 0.0,
        -2.0 * re_a0a1 + 0.0,
    );
    let q = q_sq.sqrt();
    let phi = if q.norm() == 0.0 { 0.0 } else { q.arg() };
    (q, phi)
}

fn drift_orthogonal(s: &[CCDNumber], tol: f64) -> bool {
    for (k, a) in s.iter().enumerate() {
        for b in &s[k + 1..] {
            if (a * &b.conj()).re_scalar().abs() > tol {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_spec(a: CCDNumber) -> MeasureSpec {
        let b = BlockSpec::without_drift(a, Matrix::identity(1)).unwrap();
        MeasureSpec::centered(vec![b]).unwrap()
    }

    #[test]
    fn real_coefficient_passes() {
        let r = check_alpha(&scalar_spec(CCDNumber::one(2))).unwrap();
        assert!(r.pass);
        assert_eq!(r.blocks[0].q, Complex64::new(0.0, 0.0));
        assert_eq!(r.blocks[0].margin, 1.0);
    }

    #[test]
    fn pure_central_unit_is_boundary_failure() {
        let r = check_alpha(&scalar_spec(CCDNumber::unit_i(2))).unwrap();
        assert!(!r.pass);
        assert_eq!(r.blocks[0].margin, 0.0);
        assert!(r.blocks[0].boundary);
    }

    #[test]
    fn complexified_example_passes_with_unit_margin() {
        let a = &CCDNumber::scalar(2, 2.0) + &CCDNumber::i_basis(2, 1);
        let r = check_alpha(&scalar_spec(a)).unwrap();
        let b = &r.blocks[0];
        assert!(r.pass);
        assert!((b.q - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((b.phi - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((b.margin - 1.0).abs() < 1e-15);
        assert!(!b.boundary);
    }

    #[test]
    fn non_spd_is_named() {
        let b = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let bad = BlockSpec::without_drift(CCDNumber::one(2), b).unwrap();
        let good = BlockSpec::without_drift(CCDNumber::one(2), Matrix::identity(1)).unwrap();
        let err = MeasureSpec::centered(vec![good, bad]).unwrap_err();
        match err {
            Error::NotPositiveDefinite { block, eigenvalue } => {
                assert_eq!(block, 2);
                assert!((eigenvalue + 1.0).abs() < 1e-12);
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn quad_form_examples() {
        let block = BlockSpec::without_drift(CCDNumber::one(2), Matrix::identity(2)).unwrap();
        assert_eq!(block.quad_form(&[1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(block.quad_form(&[0.0, 0.0]).unwrap(), 0.0);
        let block =
            BlockSpec::without_drift(CCDNumber::one(2), Matrix::diagonal(&[2.0, 3.0])).unwrap();
        assert_eq!(block.quad_form(&[1.0, 1.0]).unwrap(), 5.0);
        assert!(block.quad_form(&[1.0]).is_err());
    }

    #[test]
    fn offsets_and_u_entries() {
        let b1 = BlockSpec::without_drift(
            CCDNumber::scalar(2, 2.0),
            Matrix::from_rows(vec![vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap(),
        )
        .unwrap();
        let b2 = BlockSpec::without_drift(CCDNumber::basis(2, 0), Matrix::identity(1)).unwrap();
        let spec = MeasureSpec::centered(vec![b1, b2]).unwrap();
        assert_eq!(spec.offsets(), &[0, 2, 3]);
        assert_eq!(spec.block_of(1), 0);
        assert_eq!(spec.block_of(2), 1);
        assert_eq!(spec.u_entry(0, 1), CCDNumber::scalar(2, 1.0));
        assert!(spec.u_entry(1, 2).is_zero());
    }

    #[test]
    fn drift_orthogonality_report() {
        let psi = vec![CCDNumber::basis(2, 1), CCDNumber::basis(2, 2)];
        let block =
            BlockSpec::new(CCDNumber::one(2), Matrix::identity(2), psi).unwrap();
        let spec = MeasureSpec::centered(vec![block]).unwrap();
        assert!(check_alpha(&spec).unwrap().psi_orthogonal);
        let psi = vec![CCDNumber::basis(2, 1), CCDNumber::basis(2, 1)];
        let block = BlockSpec::new(CCDNumber::one(2), Matrix::identity(2), psi).unwrap();
        let spec = MeasureSpec::centered(vec![block]).unwrap();
        assert!(!check_alpha(&spec).unwrap().psi_orthogonal);
    }
}
