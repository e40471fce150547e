//! Real-flop accounting.
//!
//! Every arithmetic primitive used by the detectors goes through the
//! functions in this module, which charge a thread-local tally:
//!
//! | primitive                 | real mults | real adds |
//! |---------------------------|-----------:|----------:|
//! | complex × complex         | 4          | 2         |
//! | complex ± complex         | 0          | 2         |
//! | real × complex            | 2          | 0         |
//! | real × real, real ÷ real  | 1          | 0         |
//! | real ± real               | 0          | 1         |
//! | `|a|²`                    | 2          | 1         |
//! | `Re(a·conj(b))`           | 2          | 1         |
//!
//! Negation and conjugation are free. A division or square root is charged
//! as one real multiplication.
//!
//! A [`FlopScope`] snapshots the tally when opened and reports the delta, so
//! scopes nest freely. Tallies are per thread; a scope only sees work done
//! on the thread that opened it.

use num_complex::Complex64;
use std::cell::Cell;
use std::ops::{Add, AddAssign, Sub};

/// Running totals of real multiplications and real additions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct FlopCounter {
    pub real_mults: u64,
    pub real_adds: u64,
}

impl FlopCounter {
    pub const ZERO: FlopCounter = FlopCounter { real_mults: 0, real_adds: 0 };

    pub fn new(real_mults: u64, real_adds: u64) -> Self {
        Self { real_mults, real_adds }
    }

    /// Mults plus adds.
    pub fn total(&self) -> u64 {
        self.real_mults + self.real_adds
    }
}

impl Add for FlopCounter {
    type Output = FlopCounter;
    fn add(self, rhs: Self) -> Self {
        FlopCounter {
            real_mults: self.real_mults + rhs.real_mults,
            real_adds: self.real_adds + rhs.real_adds,
        }
    }
}

impl AddAssign for FlopCounter {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl Sub for FlopCounter {
    type Output = FlopCounter;
    fn sub(self, rhs: Self) -> Self {
        FlopCounter {
            real_mults: self.real_mults - rhs.real_mults,
            real_adds: self.real_adds - rhs.real_adds,
        }
    }
}

thread_local! {
    static MULTS: Cell<u64> = const { Cell::new(0) };
    static ADDS: Cell<u64> = const { Cell::new(0) };
}

#[inline]
fn charge(mults: u64, adds: u64) {
    MULTS.with(|c| c.set(c.get() + mults));
    ADDS.with(|c| c.set(c.get() + adds));
}

fn snapshot() -> FlopCounter {
    FlopCounter {
        real_mults: MULTS.with(Cell::get),
        real_adds: ADDS.with(Cell::get),
    }
}

/// Scoped accounting handle. Work done on this thread between
/// [`flop_scope`] and [`FlopScope::counter`] is reported by the latter.
#[derive(Debug)]
pub struct FlopScope {
    start: FlopCounter,
}

impl FlopScope {
    /// Flops charged since the scope was opened.
    pub fn counter(&self) -> FlopCounter {
        snapshot() - self.start
    }
}

/// Open a new accounting scope on the current thread.
pub fn flop_scope() -> FlopScope {
    FlopScope { start: snapshot() }
}

/// Run `f` and return its result together with the flops it charged.
pub fn counted<T>(f: impl FnOnce() -> T) -> (T, FlopCounter) {
    let scope = flop_scope();
    let out = f();
    (out, scope.counter())
}

#[inline]
pub fn mul(a: Complex64, b: Complex64) -> Complex64 {
    charge(4, 2);
    a * b
}

#[inline]
pub fn add(a: Complex64, b: Complex64) -> Complex64 {
    charge(0, 2);
    a + b
}

#[inline]
pub fn sub(a: Complex64, b: Complex64) -> Complex64 {
    charge(0, 2);
    a - b
}

/// `acc + a·b`: one complex multiply and one complex add.
#[inline]
pub fn mul_add(acc: Complex64, a: Complex64, b: Complex64) -> Complex64 {
    add(acc, mul(a, b))
}

/// Real scalar times complex.
#[inline]
pub fn scale(r: f64, a: Complex64) -> Complex64 {
    charge(2, 0);
    a * r
}

#[inline]
pub fn rmul(a: f64, b: f64) -> f64 {
    charge(1, 0);
    a * b
}

#[inline]
pub fn rdiv(a: f64, b: f64) -> f64 {
    charge(1, 0);
    a / b
}

#[inline]
pub fn recip(a: f64) -> f64 {
    charge(1, 0);
    1.0 / a
}

#[inline]
pub fn rsqrt(a: f64) -> f64 {
    charge(1, 0);
    a.sqrt()
}

#[inline]
pub fn radd(a: f64, b: f64) -> f64 {
    charge(0, 1);
    a + b
}

#[inline]
pub fn rsub(a: f64, b: f64) -> f64 {
    charge(0, 1);
    a - b
}

/// `|a|²`
#[inline]
pub fn norm_sqr(a: Complex64) -> f64 {
    charge(2, 1);
    a.norm_sqr()
}

/// `Re(a·conj(b))`, the real part of a conjugated product.
#[inline]
pub fn re_mul_conj(a: Complex64, b: Complex64) -> f64 {
    charge(2, 1);
    a.re * b.re + a.im * b.im
}
