//! MMSE detectors for the equivalent G-STBC channel.
//!
//! [`detect_gstbc`] is the fast recursive group-wise OSIC detector working
//! on compressed Alamouti block matrices. The rest are references:
//!
//! * [`detect_fixed_order`]: the same recursion without ordering.
//! * [`detect_linear_mmse`]: one dense MMSE filter, no cancellation.
//! * [`detect_osic_symbolwise`]: brute-force symbol-by-symbol OSIC.
//! * [`detect_sic_groupwise_symbolwise`]: symbol-by-symbol SIC that follows
//!   the group-wise order, cancelling the second symbol of a layer before
//!   detecting the first. It makes the same hard decisions as
//!   [`detect_gstbc`].

mod baseline;
mod recursive;

pub use baseline::{detect_linear_mmse, detect_osic_symbolwise, detect_sic_groupwise_symbolwise};
pub use recursive::{
    detect_fixed_order, detect_gstbc, detect_gstbc_traced, init_covariance, init_gram, matched_filter,
    DetectorWorkspace, PIVOT_RTOL,
};

use crate::channel::EquivalentChannel;
use crate::error::{Error, Result};
use crate::flops::FlopCounter;
use crate::modulation::Slicer;
use num_complex::Complex64;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// Hard decisions in original symbol order `s_11, s_12, …, s_M2`.
    pub decisions: Vec<Complex64>,
    /// Pre-slicing estimates, same order.
    pub soft: Vec<Complex64>,
    /// Symbol indices (0-based, original order) in the order they were
    /// decided. Jointly detected symbols appear in index order.
    pub order: Vec<usize>,
    pub flops: FlopCounter,
}

impl DetectionResult {
    /// Layers in the order they were first touched.
    pub fn layer_order(&self) -> Vec<usize> {
        let mut out: Vec<usize> = Vec::new();
        for &s in &self.order {
            if !out.contains(&(s / 2)) {
                out.push(s / 2);
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetectorKind {
    Proposed,
    FixedOrder,
    LinearMmse,
    OsicSymbolwise,
    SicGroupwise,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 5] = [
        DetectorKind::Proposed,
        DetectorKind::FixedOrder,
        DetectorKind::LinearMmse,
        DetectorKind::OsicSymbolwise,
        DetectorKind::SicGroupwise,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DetectorKind::Proposed => "proposed",
            DetectorKind::FixedOrder => "fixed_order",
            DetectorKind::LinearMmse => "linear_mmse",
            DetectorKind::OsicSymbolwise => "osic_symbolwise",
            DetectorKind::SicGroupwise => "sic_groupwise",
        }
    }

    pub fn detect<S: Slicer + ?Sized>(
        &self,
        hp: &EquivalentChannel,
        x: &[Complex64],
        alpha: f64,
        slicer: &S,
    ) -> Result<DetectionResult> {
        match self {
            DetectorKind::Proposed => detect_gstbc(hp, x, alpha, slicer),
            DetectorKind::FixedOrder => detect_fixed_order(hp, x, alpha, slicer),
            DetectorKind::LinearMmse => detect_linear_mmse(hp, x, alpha, slicer),
            DetectorKind::OsicSymbolwise => detect_osic_symbolwise(hp, x, alpha, slicer),
            DetectorKind::SicGroupwise => detect_sic_groupwise_symbolwise(hp, x, alpha, slicer),
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        DetectorKind::ALL
            .into_iter()
            .find(|d| d.name() == s)
            .ok_or_else(|| Error::ConfigInvalid(format!("unknown detector '{s}'")))
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::NonPositiveAlpha(alpha))
    }
}

fn check_inputs(hp: &EquivalentChannel, x: &[Complex64], alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    let (n, m) = (hp.receive_antennas(), hp.layers());
    if n < m {
        return Err(Error::InvalidDimensions(format!("N = {n} receive antennas < M = {m} layers")));
    }
    if x.len() != 2 * n {
        return Err(Error::InvalidDimensions(format!("received vector of length {} for N = {n}", x.len())));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for d in DetectorKind::ALL {
            assert_eq!(d.name().parse::<DetectorKind>().unwrap(), d);
        }
        assert!("zf".parse::<DetectorKind>().is_err());
    }

    #[test]
    fn layer_order_dedups() {
        let r = DetectionResult { decisions: vec![], soft: vec![], order: vec![3, 2, 0, 1], flops: FlopCounter::ZERO };
        assert_eq!(r.layer_order(), vec![1, 0]);
    }
}
