//! Hermitian block matrices whose 2×2 diagonal blocks are real multiples of
//! `I₂` and whose off-diagonal blocks are Alamouti blocks.
//!
//! Both the regularised Gram matrix and its inverse have this shape, so
//! they are stored compressed: `m` real diagonal scalars plus the strictly
//! upper block triangle, packed column by column. With column-major packing
//! the leading principal `(m-1)`-block submatrix is a prefix of the storage
//! and the last block column is the tail.

use crate::alamouti::AlamoutiBlock;
use crate::dense::DenseComplexMatrix;
use crate::error::{Error, Result};
use crate::flops;
use num_complex::Complex64;

/// Default entry-wise tolerance for [`BlockHermitian::from_dense`].
pub const STRUCTURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockHermitian {
    diag: Vec<f64>,
    /// Block (i, j), i < j, lives at `j*(j-1)/2 + i`.
    upper: Vec<AlamoutiBlock>,
}

#[inline]
fn tri(j: usize) -> usize {
    j * j.saturating_sub(1) / 2
}

impl BlockHermitian {
    pub fn new(diag: Vec<f64>, upper: Vec<AlamoutiBlock>) -> Result<Self> {
        let m = diag.len();
        if upper.len() != tri(m) {
            return Err(Error::InvalidDimensions(format!(
                "{} off-diagonal blocks for block dimension {m}, expected {}",
                upper.len(),
                tri(m)
            )));
        }
        Ok(Self { diag, upper })
    }

    pub fn empty() -> Self {
        Self { diag: Vec::new(), upper: Vec::new() }
    }

    /// `r·I_{2m}`
    pub fn scaled_identity(m: usize, r: f64) -> Self {
        Self { diag: vec![r; m], upper: vec![AlamoutiBlock::ZERO; tri(m)] }
    }

    /// Block dimension `m`; the dense form is `2m × 2m`.
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn upper(&self, i: usize, j: usize) -> AlamoutiBlock {
        debug_assert!(i < j && j < self.dim());
        self.upper[tri(j) + i]
    }

    /// Block `(i, j)` for any `i, j`, expanding diagonal and lower blocks.
    pub fn block(&self, i: usize, j: usize) -> AlamoutiBlock {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => AlamoutiBlock::scalar(self.diag[i]),
            Less => self.upper(i, j),
            Greater => self.upper(j, i).adjoint(),
        }
    }

    /// Blocks `(0..j, j)` above the diagonal in column `j`.
    pub fn column_above(&self, j: usize) -> &[AlamoutiBlock] {
        &self.upper[tri(j)..tri(j) + j]
    }

    /// Append a block row/column: `above` holds blocks `(0..m, m)`.
    pub fn push(&mut self, above: &[AlamoutiBlock], diag: f64) {
        assert_eq!(above.len(), self.dim());
        self.upper.extend_from_slice(above);
        self.diag.push(diag);
    }

    /// Split off the last block row/column, returning
    /// `(leading submatrix, last column above the diagonal, last diagonal)`.
    pub fn split_last(mut self) -> (BlockHermitian, Vec<AlamoutiBlock>, f64) {
        let m = self.dim();
        assert!(m >= 1, "split_last on empty block matrix");
        let d = self.diag.pop().unwrap_or_default();
        let col = self.upper.split_off(tri(m - 1));
        (self, col, d)
    }

    /// Leading principal `(m-1)`-block submatrix.
    pub fn truncated(&self) -> BlockHermitian {
        let m = self.dim();
        assert!(m >= 1);
        Self { diag: self.diag[..m - 1].to_vec(), upper: self.upper[..tri(m - 1)].to_vec() }
    }

    /// Symmetric interchange of block rows/columns `a` and `b`. Moves data
    /// only.
    pub fn swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        let m = self.dim();
        let perm: Vec<usize> = (0..m).map(|i| if i == a { b } else if i == b { a } else { i }).collect();
        let mut upper = Vec::with_capacity(self.upper.len());
        for j in 0..m {
            for i in 0..j {
                upper.push(self.block(perm[i], perm[j]));
            }
        }
        self.diag.swap(a, b);
        self.upper = upper;
    }

    /// Block matrix times block column vector. Diagonal blocks are applied
    /// as real scalings.
    pub fn mul_blocks(&self, v: &[AlamoutiBlock]) -> Vec<AlamoutiBlock> {
        let m = self.dim();
        assert_eq!(v.len(), m);
        (0..m)
            .map(|i| {
                let mut acc = v[i].scale(self.diag[i]);
                for (k, vk) in v.iter().enumerate() {
                    if k != i {
                        acc = acc.add(&self.block(i, k).mul(vk));
                    }
                }
                acc
            })
            .collect()
    }

    /// Block matrix times a `2m` complex vector.
    pub fn mul_vector(&self, z: &[Complex64]) -> Vec<Complex64> {
        let m = self.dim();
        assert_eq!(z.len(), 2 * m);
        let mut out = Vec::with_capacity(2 * m);
        for i in 0..m {
            let d = self.diag[i];
            let mut acc = [flops::scale(d, z[2 * i]), flops::scale(d, z[2 * i + 1])];
            for k in 0..m {
                if k != i {
                    let p = self.block(i, k).apply([z[2 * k], z[2 * k + 1]]);
                    acc = [flops::add(acc[0], p[0]), flops::add(acc[1], p[1])];
                }
            }
            out.extend_from_slice(&acc);
        }
        out
    }

    /// `self − x·yᴴ`, for block vectors whose outer product `x·yᴴ` is known
    /// to be Hermitian with scalar diagonal blocks. Only the stored upper
    /// triangle and the real diagonal are computed.
    pub fn minus_outer(&self, x: &[AlamoutiBlock], y: &[AlamoutiBlock]) -> BlockHermitian {
        let m = self.dim();
        assert!(x.len() == m && y.len() == m);
        let diag = (0..m).map(|i| flops::rsub(self.diag[i], x[i].re_mul_adjoint_diag(&y[i]))).collect();
        let mut upper = Vec::with_capacity(self.upper.len());
        for j in 0..m {
            let yj = y[j].adjoint();
            for (i, xi) in x.iter().enumerate().take(j) {
                upper.push(self.upper(i, j).sub(&xi.mul(&yj)));
            }
        }
        BlockHermitian { diag, upper }
    }

    pub fn is_finite(&self) -> bool {
        self.diag.iter().all(|d| d.is_finite()) && self.upper.iter().all(AlamoutiBlock::is_finite)
    }

    /// Dense `2m × 2m` expansion.
    pub fn to_dense(&self) -> DenseComplexMatrix {
        let m = self.dim();
        let mut d = DenseComplexMatrix::zeros(2 * m, 2 * m);
        for i in 0..m {
            for j in 0..m {
                let b = self.block(i, j).to_dense();
                for (r, row) in b.iter().enumerate() {
                    for (c, v) in row.iter().enumerate() {
                        d[(2 * i + r, 2 * j + c)] = *v;
                    }
                }
            }
        }
        d
    }

    /// Compress a dense matrix, checking every entry of the required
    /// pattern to within `tol` (absolute).
    pub fn from_dense(d: &DenseComplexMatrix, tol: f64) -> Result<Self> {
        if !d.is_square() || d.rows() % 2 != 0 {
            return Err(Error::InvalidDimensions(format!(
                "{}x{} is not square with even dimension",
                d.rows(),
                d.cols()
            )));
        }
        let m = d.rows() / 2;
        let violation = |row: usize, col: usize, reason: String| Error::StructureViolation { row, col, reason };
        let near = |a: Complex64, b: Complex64| (a - b).norm() <= tol;

        for i in 0..d.rows() {
            for j in i..d.cols() {
                if !near(d[(i, j)], d[(j, i)].conj()) {
                    return Err(violation(i / 2, j / 2, format!("not Hermitian at entry ({i}, {j})")));
                }
            }
        }

        let zero = Complex64::new(0.0, 0.0);
        let mut diag = Vec::with_capacity(m);
        for i in 0..m {
            let (p, q) = (2 * i, 2 * i + 1);
            let s = d[(p, p)];
            if !near(d[(q, q)], s) || !near(d[(p, q)], zero) || !near(d[(q, p)], zero) {
                return Err(violation(i, i, "diagonal block is not a scalar multiple of I2".into()));
            }
            if s.im.abs() > tol || s.re < -tol {
                return Err(violation(i, i, format!("diagonal scalar {s} is not non-negative real")));
            }
            diag.push(s.re);
        }

        let mut upper = Vec::with_capacity(tri(m));
        for j in 0..m {
            for i in 0..j {
                let (p, q) = (2 * i, 2 * j);
                let a1 = d[(p, q)];
                let a2 = d[(p + 1, q)];
                if !near(d[(p, q + 1)], -a2.conj()) || !near(d[(p + 1, q + 1)], a1.conj()) {
                    return Err(violation(i, j, "off-diagonal block is not Alamouti".into()));
                }
                upper.push(AlamoutiBlock::new(a1, a2));
            }
        }
        Ok(Self { diag, upper })
    }
}

/// Free-function form of [`BlockHermitian::to_dense`].
pub fn sbm_to_dense(a: &BlockHermitian) -> DenseComplexMatrix {
    a.to_dense()
}

/// Free-function form of [`BlockHermitian::from_dense`].
pub fn sbm_from_dense(d: &DenseComplexMatrix, tol: f64) -> Result<BlockHermitian> {
    BlockHermitian::from_dense(d, tol)
}
