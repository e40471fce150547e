//! Dense reference detectors. These recompute everything from the dense
//! equivalent channel at every step; they are slow on purpose.

use super::{check_inputs, DetectionResult};
use crate::channel::EquivalentChannel;
use crate::dense::{dot, DenseComplexMatrix};
use crate::error::Result;
use crate::flops;
use crate::modulation::Slicer;
use num_complex::Complex64;

/// `y = (H'ᴴH' + αI)⁻¹H'ᴴx'`, sliced.
pub fn detect_linear_mmse<S: Slicer + ?Sized>(
    hp: &EquivalentChannel,
    x: &[Complex64],
    alpha: f64,
    slicer: &S,
) -> Result<DetectionResult> {
    check_inputs(hp, x, alpha)?;
    let scope = flops::flop_scope();
    let h = hp.dense();
    let g = h.regularized_gram(alpha);
    let soft = g.solve_hpd(&h.adjoint_matvec(x)?)?;
    let decisions = soft.iter().map(|&y| slicer.slice(y)).collect();
    Ok(DetectionResult { decisions, soft, order: (0..h.cols()).collect(), flops: scope.counter() })
}

/// Position of the smallest real diagonal entry among `candidates`, lowest
/// position on ties.
fn argmin_diag(q: &DenseComplexMatrix, candidates: impl Iterator<Item = usize>) -> usize {
    let mut best: Option<(usize, f64)> = None;
    for (pos, idx) in candidates.enumerate() {
        let v = q[(idx, idx)].re;
        if best.is_none_or(|(_, b)| v < b) {
            best = Some((pos, v));
        }
    }
    best.map(|(p, _)| p).unwrap_or(0)
}

/// MMSE estimate of column `idx` of `hk` from the current residual.
fn estimate(hk: &DenseComplexMatrix, q: &DenseComplexMatrix, xr: &[Complex64], idx: usize) -> Result<Complex64> {
    let b = hk.adjoint_matvec(xr)?;
    Ok(dot(q.row(idx).iter().copied(), b.into_iter()))
}

fn cancel(xr: &mut [Complex64], column: &[Complex64], s_hat: Complex64) {
    for (r, h) in xr.iter_mut().zip(column) {
        *r = flops::sub(*r, flops::mul(*h, s_hat));
    }
}

struct Tracker<'a, S: ?Sized> {
    slicer: &'a S,
    decisions: Vec<Complex64>,
    soft: Vec<Complex64>,
    order: Vec<usize>,
}

impl<'a, S: Slicer + ?Sized> Tracker<'a, S> {
    fn new(slicer: &'a S, n: usize) -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self { slicer, decisions: vec![z; n], soft: vec![z; n], order: Vec::with_capacity(n) }
    }

    fn decide(&mut self, symbol: usize, y: Complex64) -> Complex64 {
        let s = self.slicer.slice(y);
        self.soft[symbol] = y;
        self.decisions[symbol] = s;
        self.order.push(symbol);
        s
    }

    fn finish(self, flops: flops::FlopCounter) -> DetectionResult {
        DetectionResult { decisions: self.decisions, soft: self.soft, order: self.order, flops }
    }
}

/// Symbol-wise MMSE-OSIC by brute force: at each of the `2M` steps the
/// covariance of the remaining columns is recomputed and inverted densely,
/// and the symbol with the smallest error variance is detected and
/// cancelled from `x'`.
pub fn detect_osic_symbolwise<S: Slicer + ?Sized>(
    hp: &EquivalentChannel,
    x: &[Complex64],
    alpha: f64,
    slicer: &S,
) -> Result<DetectionResult> {
    check_inputs(hp, x, alpha)?;
    let scope = flops::flop_scope();
    let h = hp.dense();
    let mut remaining: Vec<usize> = (0..h.cols()).collect();
    let mut xr = x.to_vec();
    let mut track = Tracker::new(slicer, h.cols());

    while !remaining.is_empty() {
        let hk = h.select_columns(&remaining);
        let q = hk.regularized_gram(alpha).inverse_hpd()?;
        let pos = argmin_diag(&q, 0..remaining.len());
        let y = estimate(&hk, &q, &xr, pos)?;
        let s = track.decide(remaining[pos], y);
        cancel(&mut xr, &hk.column(pos), s);
        remaining.remove(pos);
    }
    Ok(track.finish(scope.counter()))
}

/// Symbol-wise SIC under the group-wise order. The layer with the smallest
/// error variance is chosen exactly as the recursive detector chooses it;
/// its second symbol is detected and cancelled, then its first symbol is
/// re-estimated from the reduced model and cancelled. Layer positions are
/// permuted the same way as in the recursive detector so tie-breaking
/// agrees.
pub fn detect_sic_groupwise_symbolwise<S: Slicer + ?Sized>(
    hp: &EquivalentChannel,
    x: &[Complex64],
    alpha: f64,
    slicer: &S,
) -> Result<DetectionResult> {
    check_inputs(hp, x, alpha)?;
    let scope = flops::flop_scope();
    let h = hp.dense();
    let mut layers: Vec<usize> = (0..hp.layers()).collect();
    let mut xr = x.to_vec();
    let mut track = Tracker::new(slicer, h.cols());

    while !layers.is_empty() {
        let m = layers.len();
        let cols: Vec<usize> = layers.iter().flat_map(|&l| [2 * l, 2 * l + 1]).collect();
        let hk = h.select_columns(&cols);
        let q = hk.regularized_gram(alpha).inverse_hpd()?;
        let k = argmin_diag(&q, (0..m).map(|j| 2 * j + 1));
        let layer = layers[k];

        let y2 = estimate(&hk, &q, &xr, 2 * k + 1)?;
        let s2 = track.decide(2 * layer + 1, y2);
        cancel(&mut xr, &hk.column(2 * k + 1), s2);

        layers.swap(k, m - 1);
        layers.pop();
        let mut cols: Vec<usize> = layers.iter().flat_map(|&l| [2 * l, 2 * l + 1]).collect();
        cols.push(2 * layer);
        let hk = h.select_columns(&cols);
        let q = hk.regularized_gram(alpha).inverse_hpd()?;
        let idx = cols.len() - 1;
        let y1 = estimate(&hk, &q, &xr, idx)?;
        let s1 = track.decide(2 * layer, y1);
        cancel(&mut xr, &hk.column(idx), s1);
    }
    Ok(track.finish(scope.counter()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_equivalent, generate_channel, stream_rng, transmit_with_rng, ChannelMatrix};
    use crate::detect::{detect_fixed_order, detect_gstbc};
    use crate::modulation::{qpsk_modulate, Qpsk};
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn instance(n: usize, m: usize, seed: u64, sigma_n2: f64) -> (EquivalentChannel, Vec<Complex64>, Vec<Complex64>) {
        let mut rng = stream_rng(seed, 0);
        let h = ChannelMatrix::random(n, m, &mut rng).unwrap();
        let bits: Vec<bool> = (0..4 * m).map(|_| rng.random()).collect();
        let s = qpsk_modulate(&bits).unwrap();
        let x = transmit_with_rng(&h, &s, sigma_n2, &mut rng).unwrap();
        (build_equivalent(&h), s, x)
    }

    #[test]
    fn zero_input_gives_zero_estimates() {
        let hp = build_equivalent(&generate_channel(3, 2, 1).unwrap());
        let x = vec![c(0.0, 0.0); 6];
        let r = detect_linear_mmse(&hp, &x, 0.1, &Qpsk).unwrap();
        assert!(r.soft.iter().all(|y| *y == c(0.0, 0.0)));
    }

    #[test]
    fn linear_mmse_approaches_zero_forcing() {
        for seed in 0..20 {
            let (hp, s, x) = instance(2, 2, seed, 0.0);
            let r = detect_linear_mmse(&hp, &x, 1e-12, &Qpsk).unwrap();
            for (y, t) in r.soft.iter().zip(&s) {
                assert!((y - t).norm() <= 1e-6, "seed {seed}: {y} vs {t}");
            }
        }
    }

    #[test]
    fn noiseless_recovery() {
        for seed in 0..50 {
            let (hp, s, x) = instance(3, 2, seed, 0.0);
            for f in [detect_osic_symbolwise::<Qpsk>, detect_sic_groupwise_symbolwise::<Qpsk>, detect_gstbc::<Qpsk>, detect_fixed_order::<Qpsk>] {
                assert_eq!(f(&hp, &x, 1e-9, &Qpsk).unwrap().decisions, s);
            }
        }
    }

    #[test]
    fn single_layer_all_agree() {
        for seed in 0..50 {
            let (hp, _, x) = instance(1, 1, seed, 0.5);
            let g = detect_gstbc(&hp, &x, 0.5, &Qpsk).unwrap();
            let o = detect_osic_symbolwise(&hp, &x, 0.5, &Qpsk).unwrap();
            let l = detect_linear_mmse(&hp, &x, 0.5, &Qpsk).unwrap();
            let sg = detect_sic_groupwise_symbolwise(&hp, &x, 0.5, &Qpsk).unwrap();
            assert_eq!(o.decisions, g.decisions);
            assert_eq!(l.decisions, g.decisions);
            assert_eq!(sg.decisions, g.decisions);
        }
    }

    /// With one layer and one antenna both error variances are equal and the
    /// two symbols are orthogonal, so either detection order gives the
    /// linear MMSE decisions.
    #[test]
    fn two_symbol_case_enumerated() {
        for seed in 0..50 {
            let (hp, _, x) = instance(1, 1, seed, 0.3);
            let lin = detect_linear_mmse(&hp, &x, 0.3, &Qpsk).unwrap();
            let osic = detect_osic_symbolwise(&hp, &x, 0.3, &Qpsk).unwrap();
            assert_eq!(osic.order, vec![0, 1]);
            let h = hp.dense();
            for first in [0usize, 1] {
                let second = 1 - first;
                let q = h.regularized_gram(0.3).inverse_hpd().unwrap();
                let y1 = estimate(h, &q, &x, first).unwrap();
                let mut xr = x.clone();
                cancel(&mut xr, &h.column(first), Qpsk.slice(y1));
                let hk = h.select_columns(&[second]);
                let q2 = hk.regularized_gram(0.3).inverse_hpd().unwrap();
                let y2 = estimate(&hk, &q2, &xr, 0).unwrap();
                assert!((y1 - lin.soft[first]).norm() < 1e-12);
                assert!((y2 - lin.soft[second]).norm() < 1e-12);
                assert_eq!(Qpsk.slice(y2), osic.decisions[second]);
            }
        }
    }

    #[test]
    fn groupwise_sic_matches_recursive() {
        for seed in 0..300 {
            let (hp, _, x) = instance(4, 3, seed, 0.2);
            let a = detect_gstbc(&hp, &x, 0.2, &Qpsk).unwrap();
            let b = detect_sic_groupwise_symbolwise(&hp, &x, 0.2, &Qpsk).unwrap();
            assert_eq!(a.decisions, b.decisions, "seed {seed}");
            assert_eq!(a.layer_order(), b.layer_order());
            for (u, v) in a.soft.iter().zip(&b.soft) {
                assert!((u - v).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn fixed_order_ignores_mse() {
        // layer 1 (the last) is much weaker, so the fixed order starts with
        // it while the ordered detector starts with layer 0
        let mut rng = stream_rng(99, 0);
        let h = ChannelMatrix::random(2, 2, &mut rng).unwrap();
        let mut g = h.gains().clone();
        for n in 0..2 {
            for k in 2..4 {
                g[(n, k)] *= 0.05;
            }
        }
        let hp = build_equivalent(&ChannelMatrix::new(g).unwrap());
        let s = qpsk_modulate(&[false, true, true, true, false, false, true, false]).unwrap();
        let x = hp.apply(&s).unwrap();
        let q = hp.dense().regularized_gram(0.1).inverse_hpd().unwrap();
        assert!(q[(3, 3)].re > 10.0 * q[(1, 1)].re);
        let a = detect_gstbc(&hp, &x, 0.1, &Qpsk).unwrap();
        let f = detect_fixed_order(&hp, &x, 0.1, &Qpsk).unwrap();
        assert_eq!(a.layer_order(), vec![0, 1]);
        assert_eq!(f.layer_order(), vec![1, 0]);
    }
}
