//! Complex Hermitian matrix kernels.
//!
//! Everything downstream (sample covariances, null estimates, coherence
//! blocks) is a Hermitian matrix, so the kernels here work on a thin newtype
//! over `nalgebra::DMatrix<Complex64>` that keeps the matrix exactly
//! Hermitian after construction.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative eigenvalue floor, scaled by the dimension.
pub const CONDITIONING_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix {
    inner: DMatrix<Complex64>,
}

impl HermitianMatrix {
    /// Builds a Hermitian matrix from a square dense matrix, replacing it by
    /// `(A + Aᴴ) / 2`.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::InvalidSpec(format!(
                "Hermitian matrix must be square and non-empty, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self::symmetrized(m))
    }

    pub(crate) fn symmetrized(mut m: DMatrix<Complex64>) -> Self {
        let n = m.nrows();
        for i in 0..n {
            m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (m[(i, j)] + m[(j, i)].conj()) * 0.5;
                m[(i, j)] = avg;
                m[(j, i)] = avg.conj();
            }
        }
        Self { inner: m }
    }

    /// Wraps a matrix that is Hermitian by construction.
    pub(crate) fn from_hermitian_unchecked(m: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self { inner: m }
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidSpec("rows must form a square matrix".into()));
        }
        Self::from_matrix(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    pub fn identity(dim: usize) -> Self {
        Self { inner: DMatrix::identity(dim, dim) }
    }

    pub fn zeros(dim: usize) -> Self {
        Self { inner: DMatrix::zeros(dim, dim) }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self {
            inner: DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    Complex64::new(diag[i], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.inner.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.inner
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn real_diagonal(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.inner[(i, i)].re).collect()
    }

    pub fn trace(&self) -> f64 {
        self.real_diagonal().iter().sum()
    }

    /// The `(row, col)` sub-block of size `size × size`. Off-diagonal
    /// sub-blocks are generally not Hermitian, so this returns a plain matrix.
    pub fn sub_block(&self, row: usize, col: usize, size: usize) -> DMatrix<Complex64> {
        self.inner.view((row * size, col * size), (size, size)).into_owned()
    }

    /// The `k`-th diagonal sub-block of size `size × size`.
    pub fn diagonal_block(&self, k: usize, size: usize) -> HermitianMatrix {
        Self::from_hermitian_unchecked(self.sub_block(k, k, size))
    }

    /// Keeps only the diagonal entries.
    pub fn diagonal_part(&self) -> HermitianMatrix {
        Self::from_real_diagonal(&self.real_diagonal())
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.inner[(i, j)].norm_sqr() == 0.0))
    }

    pub fn scale(&self, c: f64) -> HermitianMatrix {
        Self::from_hermitian_unchecked(&self.inner * Complex64::new(c, 0.0))
    }

    pub fn add(&self, other: &HermitianMatrix) -> HermitianMatrix {
        Self::from_hermitian_unchecked(&self.inner + &other.inner)
    }

    /// `U · H · Uᴴ`, Hermitian by construction for any square `U`.
    pub fn congruence(&self, u: &DMatrix<Complex64>) -> HermitianMatrix {
        Self::symmetrized(u * &self.inner * u.adjoint())
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eig: Vec<f64> = self.inner.clone().symmetric_eigenvalues().iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        eig
    }

    /// Largest absolute deviation from Hermitian symmetry relative to the
    /// largest entry magnitude.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim();
        let scale = self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.inner[(i, j)] - self.inner[(j, i)].conj()).norm());
            }
        }
        worst / scale
    }
}

fn check_spectrum(eig: &[f64]) -> Result<()> {
    let n = eig.len();
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let max = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(max > 0.0) || !(min > n as f64 * CONDITIONING_FLOOR * max) {
        return Err(Error::NotPositiveDefinite { min_eig: min, max_eig: max });
    }
    Ok(())
}

fn spectral_function(h: &HermitianMatrix, f: impl Fn(f64) -> f64) -> Result<HermitianMatrix> {
    let n = h.dim();
    if n == 1 {
        let v = h.get(0, 0).re;
        check_spectrum(&[v])?;
        return Ok(HermitianMatrix::from_real_diagonal(&[f(v)]));
    }
    if h.is_diagonal() {
        let d = h.real_diagonal();
        check_spectrum(&d)?;
        let mapped: Vec<f64> = d.into_iter().map(f).collect();
        return Ok(HermitianMatrix::from_real_diagonal(&mapped));
    }
    let eig = h.inner.clone().symmetric_eigen();
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    check_spectrum(&values)?;
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, &lambda) in values.iter().enumerate() {
        let s = Complex64::new(f(lambda), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= s;
        }
    }
    Ok(HermitianMatrix::symmetrized(scaled * v.adjoint()))
}

/// Inverse square root `H^(-1/2)` via Hermitian eigendecomposition.
pub fn inv_sqrt(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    spectral_function(h, |l| 1.0 / l.sqrt())
}

/// Positive square root `H^(1/2)` of a positive definite matrix.
pub fn sqrt(h: &HermitianMatrix) -> Result<HermitianMatrix> {
    spectral_function(h, f64::sqrt)
}

/// Natural log-determinant, the sum of log-eigenvalues.
pub fn logdet(h: &HermitianMatrix) -> Result<f64> {
    let eig = if h.is_diagonal() { h.real_diagonal() } else { h.eigenvalues() };
    check_spectrum(&eig)?;
    Ok(eig.iter().map(|l| l.ln()).sum())
}

/// Squared Frobenius norm.
pub fn frob_sq(h: &HermitianMatrix) -> f64 {
    frob_sq_dense(h.as_matrix())
}

/// Squared Frobenius norm of an arbitrary complex matrix.
pub fn frob_sq_dense(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}

/// Block-diagonal matrix with Hermitian diagonal blocks of equal size.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockDiagonalMatrix {
    block_dim: usize,
    blocks: Vec<HermitianMatrix>,
}

impl BlockDiagonalMatrix {
    pub fn new(blocks: Vec<HermitianMatrix>) -> Result<Self> {
        let block_dim = blocks
            .first()
            .map(HermitianMatrix::dim)
            .ok_or(Error::EmptyInput("block-diagonal matrix needs at least one block"))?;
        if let Some(bad) = blocks.iter().find(|b| b.dim() != block_dim) {
            return Err(Error::InvalidSpec(format!(
                "all blocks must have dimension {block_dim}, found {}",
                bad.dim()
            )));
        }
        Ok(Self { block_dim, blocks })
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn blocks(&self) -> &[HermitianMatrix] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.block_dim * self.blocks.len()
    }

    pub fn logdet(&self) -> Result<f64> {
        self.blocks.iter().map(logdet).sum()
    }

    pub fn to_dense(&self) -> HermitianMatrix {
        let b = self.block_dim;
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (k, blk) in self.blocks.iter().enumerate() {
            m.view_mut((k * b, k * b), (b, b)).copy_from(blk.as_matrix());
        }
        HermitianMatrix::from_hermitian_unchecked(m)
    }
}
