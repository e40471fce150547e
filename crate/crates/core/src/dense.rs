//! Row-major dense complex matrices.
//!
//! Used by the baseline detectors and as the expansion target for the
//! structured types. Arithmetic methods are flop-counted; the accessors and
//! norms are not.

use crate::error::{Error, Result};
use crate::flops;
use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct DenseComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl DenseComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::InvalidDimensions(format!(
                "{} entries for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.is_finite())
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Keep only the listed columns, in the listed order.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |i, j| self[(i, cols[j])])
    }

    /// Leading `k×k` principal submatrix.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, k, |i, j| self[(i, j)])
    }

    /// `P·A·Pᵀ` where `perm[i]` is the source row/column of output row/column `i`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        Self::from_fn(perm.len(), perm.len(), |i, j| self[(perm[i], perm[j])])
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖self − other‖_F`, uncounted.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i..self.cols).all(|j| (self[(i, j)] - self[(j, i)].conj()).norm() <= tol))
    }

    /// Matrix product.
    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidDimensions(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                out[(i, j)] = dot(self.row(i).iter().copied(), (0..rhs.rows).map(|k| rhs[(k, j)]));
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.cols != v.len() {
            return Err(Error::InvalidDimensions(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows).map(|i| dot(self.row(i).iter().copied(), v.iter().copied())).collect())
    }

    /// `selfᴴ·v` without forming the adjoint.
    pub fn adjoint_matvec(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if self.rows != v.len() {
            return Err(Error::InvalidDimensions(format!(
                "cannot apply adjoint of {}x{} matrix to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.cols)
            .map(|j| dot((0..self.rows).map(|i| self[(i, j)].conj()), v.iter().copied()))
            .collect())
    }

    /// `selfᴴ·self + alpha·I`, Hermitian, upper triangle computed and mirrored.
    pub fn regularized_gram(&self, alpha: f64) -> Self {
        let n = self.cols;
        let mut g = Self::zeros(n, n);
        for i in 0..n {
            let d = (0..self.rows).map(|k| flops::norm_sqr(self[(k, i)])).reduce(flops::radd).unwrap_or(0.0);
            g[(i, i)] = Complex64::new(flops::radd(d, alpha), 0.0);
            for j in i + 1..n {
                let v = dot((0..self.rows).map(|k| self[(k, i)].conj()), (0..self.rows).map(|k| self[(k, j)]));
                g[(i, j)] = v;
                g[(j, i)] = v.conj();
            }
        }
        g
    }

    /// Inverse of a Hermitian positive-definite matrix via an LDLᴴ
    /// factorisation. The returned matrix is exactly Hermitian.
    pub fn inverse_hpd(&self) -> Result<Self> {
        let n = self.rows;
        let (l, d) = self.ldl()?;
        let mut inv = Self::zeros(n, n);
        // Column j of the inverse solves A x = e_j. Only rows >= j are
        // needed for the upper triangle via symmetry, but the full solve keeps
        // the code simple.
        for j in 0..n {
            let mut e = vec![ZERO; n];
            e[j] = ONE;
            let x = ldl_solve(&l, &d, &e);
            for i in 0..n {
                inv[(i, j)] = x[i];
            }
        }
        for i in 0..n {
            inv[(i, i)] = Complex64::new(inv[(i, i)].re, 0.0);
            for j in i + 1..n {
                inv[(j, i)] = inv[(i, j)].conj();
            }
        }
        Ok(inv)
    }

    /// Solve `A x = b` for Hermitian positive-definite `A`.
    pub fn solve_hpd(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        if b.len() != self.rows {
            return Err(Error::InvalidDimensions(format!(
                "right-hand side of length {} for {}x{} system",
                b.len(),
                self.rows,
                self.cols
            )));
        }
        let (l, d) = self.ldl()?;
        Ok(ldl_solve(&l, &d, b))
    }

    /// Unit lower-triangular `L` and real diagonal `D` with `A = L D Lᴴ`.
    fn ldl(&self) -> Result<(Self, Vec<f64>)> {
        if !self.is_square() {
            return Err(Error::InvalidDimensions(format!("{}x{} matrix is not square", self.rows, self.cols)));
        }
        let n = self.rows;
        let mut l = Self::identity(n);
        let mut d = vec![0.0; n];
        let scale = (0..n).map(|i| self[(i, i)].re.abs()).fold(0.0, f64::max);
        for j in 0..n {
            let mut dj = self[(j, j)].re;
            for k in 0..j {
                dj = flops::rsub(dj, flops::rmul(flops::norm_sqr(l[(j, k)]), d[k]));
            }
            if !(dj > 1e-14 * scale) {
                return Err(Error::SingularPivot { index: j, pivot: dj });
            }
            d[j] = dj;
            let inv_dj = flops::recip(dj);
            for i in j + 1..n {
                let mut v = self[(i, j)];
                for k in 0..j {
                    // L[i,k]·D[k]·conj(L[j,k])
                    v = flops::sub(v, flops::mul(flops::scale(d[k], l[(i, k)]), l[(j, k)].conj()));
                }
                l[(i, j)] = flops::scale(inv_dj, v);
            }
        }
        Ok((l, d))
    }
}

fn ldl_solve(l: &DenseComplexMatrix, d: &[f64], b: &[Complex64]) -> Vec<Complex64> {
    let n = b.len();
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] = flops::sub(y[i], flops::mul(l[(i, k)], y[k]));
        }
    }
    for i in 0..n {
        y[i] = flops::scale(flops::recip(d[i]), y[i]);
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] = flops::sub(y[i], flops::mul(l[(k, i)].conj(), y[k]));
        }
    }
    y
}

/// Counted inner product `Σ a_k·b_k` (no implicit conjugation).
pub fn dot(a: impl Iterator<Item = Complex64>, b: impl Iterator<Item = Complex64>) -> Complex64 {
    a.zip(b).map(|(x, y)| flops::mul(x, y)).reduce(flops::add).unwrap_or(ZERO)
}

impl std::ops::Index<(usize, usize)> for DenseComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for DenseComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}
