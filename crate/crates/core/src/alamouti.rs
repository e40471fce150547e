//! Compressed 2×2 Alamouti (quaternion) blocks.
//!
//! A block `(a1, a2)` stands for the dense matrix
//!
//! ```text
//! [ a1  -conj(a2) ]
//! [ a2   conj(a1) ]
//! ```
//!
//! The set is closed under sum, product and adjoint, and every operation
//! here works on the two stored entries only. Costs are charged at the
//! compressed size: a product is 4 complex multiplies and 2 complex adds.

use crate::flops;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AlamoutiBlock {
    pub a1: Complex64,
    pub a2: Complex64,
}

impl AlamoutiBlock {
    pub const ZERO: AlamoutiBlock = AlamoutiBlock {
        a1: Complex64::new(0.0, 0.0),
        a2: Complex64::new(0.0, 0.0),
    };

    pub const IDENTITY: AlamoutiBlock = AlamoutiBlock {
        a1: Complex64::new(1.0, 0.0),
        a2: Complex64::new(0.0, 0.0),
    };

    pub fn new(a1: Complex64, a2: Complex64) -> Self {
        Self { a1, a2 }
    }

    /// `r·I₂`
    pub fn scalar(r: f64) -> Self {
        Self::new(Complex64::new(r, 0.0), Complex64::new(0.0, 0.0))
    }

    /// Row-major dense form.
    pub fn to_dense(&self) -> [[Complex64; 2]; 2] {
        [[self.a1, -self.a2.conj()], [self.a2, self.a1.conj()]]
    }

    /// Recover the compressed form from the first column of a dense block.
    /// No check is made that the second column matches.
    pub fn from_first_column(d: &[[Complex64; 2]; 2]) -> Self {
        Self::new(d[0][0], d[1][0])
    }

    /// Conjugate transpose; free.
    pub fn adjoint(&self) -> Self {
        Self::new(self.a1.conj(), -self.a2)
    }

    /// `|a1|² + |a2|²`, the determinant of the dense form.
    pub fn det(&self) -> f64 {
        self.a1.norm_sqr() + self.a2.norm_sqr()
    }

    pub fn is_finite(&self) -> bool {
        self.a1.is_finite() && self.a2.is_finite()
    }

    /// Block product. 4 complex mults, 2 complex adds.
    pub fn mul(&self, rhs: &AlamoutiBlock) -> AlamoutiBlock {
        AlamoutiBlock {
            a1: flops::sub(flops::mul(self.a1, rhs.a1), flops::mul(self.a2.conj(), rhs.a2)),
            a2: flops::add(flops::mul(self.a2, rhs.a1), flops::mul(self.a1.conj(), rhs.a2)),
        }
    }

    pub fn add(&self, rhs: &AlamoutiBlock) -> AlamoutiBlock {
        AlamoutiBlock {
            a1: flops::add(self.a1, rhs.a1),
            a2: flops::add(self.a2, rhs.a2),
        }
    }

    pub fn sub(&self, rhs: &AlamoutiBlock) -> AlamoutiBlock {
        AlamoutiBlock {
            a1: flops::sub(self.a1, rhs.a1),
            a2: flops::sub(self.a2, rhs.a2),
        }
    }

    /// Real scalar times block. 4 real mults.
    pub fn scale(&self, r: f64) -> AlamoutiBlock {
        AlamoutiBlock {
            a1: flops::scale(r, self.a1),
            a2: flops::scale(r, self.a2),
        }
    }

    /// Dense block times a 2-vector.
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            flops::sub(flops::mul(self.a1, v[0]), flops::mul(self.a2.conj(), v[1])),
            flops::add(flops::mul(self.a2, v[0]), flops::mul(self.a1.conj(), v[1])),
        ]
    }

    /// `Re` of the (1,1) entry of `self · other^H`, i.e. the scalar of the
    /// diagonal block when the product is known to be scalar·I.
    pub fn re_mul_adjoint_diag(&self, other: &AlamoutiBlock) -> f64 {
        // (1,1) of X·Yᴴ = x1·conj(y1) + conj(x2)·y2
        flops::radd(
            flops::re_mul_conj(self.a1, other.a1),
            flops::re_mul_conj(other.a2, self.a2),
        )
    }
}

/// Free-function form of [`AlamoutiBlock::mul`].
pub fn ab_mul(x: &AlamoutiBlock, y: &AlamoutiBlock) -> AlamoutiBlock {
    x.mul(y)
}

/// Free-function form of [`AlamoutiBlock::adjoint`].
pub fn ab_adjoint(x: &AlamoutiBlock) -> AlamoutiBlock {
    x.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dense_mul(x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        out
    }

    fn close(x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2], scale: f64) -> bool {
        x.iter()
            .flatten()
            .zip(y.iter().flatten())
            .all(|(a, b)| (a - b).norm() <= 1e-12 * scale.max(1.0))
    }

    #[test]
    fn identity_is_neutral() {
        let x = AlamoutiBlock::new(c(0.3, -1.2), c(2.0, 0.5));
        assert_eq!(ab_mul(&AlamoutiBlock::IDENTITY, &x), x);
    }

    #[test]
    fn j_squared_is_minus_one() {
        let j = AlamoutiBlock::new(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(ab_mul(&j, &j), AlamoutiBlock::scalar(-1.0));
    }

    #[test]
    fn adjoint_examples() {
        assert_eq!(ab_adjoint(&AlamoutiBlock::IDENTITY), AlamoutiBlock::IDENTITY);
        let j = AlamoutiBlock::new(c(0.0, 0.0), c(1.0, 0.0));
        assert_eq!(ab_adjoint(&j), AlamoutiBlock::new(c(0.0, 0.0), c(-1.0, 0.0)));
        let x = AlamoutiBlock::new(c(0.0, 1.0), c(1.0, 1.0));
        assert_eq!(ab_adjoint(&x), AlamoutiBlock::new(c(0.0, -1.0), c(-1.0, -1.0)));
    }

    #[test]
    fn product_cost_is_compressed() {
        let x = AlamoutiBlock::new(c(1.0, 2.0), c(3.0, 4.0));
        let (_, f) = flops::counted(|| x.mul(&x));
        assert_eq!(f, flops::FlopCounter::new(16, 12));
    }

    #[test]
    fn closure_over_many_random_blocks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut draw = || c(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        for _ in 0..2000 {
            let x = AlamoutiBlock::new(draw(), draw());
            let y = AlamoutiBlock::new(draw(), draw());
            let s = x.det().max(y.det());
            assert!(close(x.mul(&y).to_dense(), dense_mul(x.to_dense(), y.to_dense()), s));
            let sum = x.add(&y).to_dense();
            let (xd, yd) = (x.to_dense(), y.to_dense());
            for i in 0..2 {
                for j in 0..2 {
                    assert!((sum[i][j] - (xd[i][j] + yd[i][j])).norm() <= 1e-12 * s.max(1.0));
                }
            }
            let adj = x.adjoint().to_dense();
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(adj[i][j], xd[j][i].conj());
                }
            }
        }
    }

    proptest! {
        #[test]
        fn gram_of_block_is_scalar(a in -5.0f64..5.0, b in -5.0f64..5.0, d in -5.0f64..5.0, e in -5.0f64..5.0) {
            let x = AlamoutiBlock::new(c(a, b), c(d, e));
            let g = x.mul(&x.adjoint());
            let n = a * a + b * b + d * d + e * e;
            prop_assert!((g.a1 - c(n, 0.0)).norm() <= 1e-12 * n.max(1.0));
            prop_assert!(g.a2.norm() <= 1e-12 * n.max(1.0));
            prop_assert!((x.det() - n).abs() <= 1e-12 * n.max(1.0));
        }

        #[test]
        fn diag_of_product_with_adjoint(a in -5.0f64..5.0, b in -5.0f64..5.0, d in -5.0f64..5.0, e in -5.0f64..5.0,
                                        f in -5.0f64..5.0, g in -5.0f64..5.0, h in -5.0f64..5.0, k in -5.0f64..5.0) {
            let x = AlamoutiBlock::new(c(a, b), c(d, e));
            let y = AlamoutiBlock::new(c(f, g), c(h, k));
            let full = x.mul(&y.adjoint());
            prop_assert!((x.re_mul_adjoint_diag(&y) - full.a1.re).abs() < 1e-10);
        }
    }
}
