//! QPSK mapping and hard slicing.

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Hard-decision quantiser applied to soft symbol estimates.
pub trait Slicer {
    fn slice(&self, y: Complex64) -> Complex64;
}

impl<F: Fn(Complex64) -> Complex64> Slicer for F {
    fn slice(&self, y: Complex64) -> Complex64 {
        self(y)
    }
}

/// Gray-mapped, unit-energy QPSK.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Qpsk;

impl Qpsk {
    pub const BITS_PER_SYMBOL: usize = 2;

    /// `(b0, b1) → ((1 − 2·b0) + i(1 − 2·b1)) / √2`
    pub fn map(b0: bool, b1: bool) -> Complex64 {
        let level = |b: bool| if b { -FRAC_1_SQRT_2 } else { FRAC_1_SQRT_2 };
        Complex64::new(level(b0), level(b1))
    }

    /// Inverse of [`Qpsk::map`] on the decision regions; zero maps to bit 0.
    pub fn demap(y: Complex64) -> (bool, bool) {
        (y.re < 0.0, y.im < 0.0)
    }
}

impl Slicer for Qpsk {
    fn slice(&self, y: Complex64) -> Complex64 {
        qpsk_slice(y)
    }
}

/// Nearest QPSK point. A zero real or imaginary part slices to `+`.
pub fn qpsk_slice(y: Complex64) -> Complex64 {
    let (b0, b1) = Qpsk::demap(y);
    Qpsk::map(b0, b1)
}

/// Map bits pairwise onto QPSK symbols in order.
pub fn qpsk_modulate(bits: &[bool]) -> Result<Vec<Complex64>> {
    if bits.len() % 2 != 0 {
        return Err(Error::OddBitCount(bits.len()));
    }
    Ok(bits.chunks_exact(2).map(|p| Qpsk::map(p[0], p[1])).collect())
}

pub fn qpsk_demodulate(symbols: &[Complex64]) -> Vec<bool> {
    symbols
        .iter()
        .flat_map(|&s| {
            let (b0, b1) = Qpsk::demap(s);
            [b0, b1]
        })
        .collect()
}
