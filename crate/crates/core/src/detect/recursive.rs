//! Fast recursive group-wise MMSE-OSIC.
//!
//! Initialisation computes `z' = H̄ᴴx'`, the regularised block Gram
//! `R̄ = H̄ᴴH̄ + αI` and its inverse `Q̄` by growing the inverse one block
//! row/column at a time. The recursion then, for each remaining layer count
//! `m`, picks the block with the smallest diagonal of `Q̄` (least MSE),
//! swaps it to the last position, estimates its two symbols from the last
//! block row of `Q̄`, cancels them from `z'` using the last block column of
//! `R̄`, and deflates `Q̄` to the inverse of the leading submatrix of `R̄`.
//! Every quantity stays in compressed Alamouti form throughout.

use super::{check_alpha, check_inputs, DetectionResult};
use crate::alamouti::AlamoutiBlock;
use crate::block::BlockHermitian;
use crate::channel::EquivalentChannel;
use crate::error::{Error, Result};
use crate::flops;
use crate::modulation::Slicer;
use num_complex::Complex64;

/// A pivot at or below this fraction of its scale is treated as a loss of
/// positive definiteness.
pub const PIVOT_RTOL: f64 = 1e-12;

/// Tolerated imaginary residue in the scalar of the covariance growth step,
/// relative to the diagonal entry of `R̄` it is subtracted from.
const REALITY_RTOL: f64 = 1e-9;

/// `z' = H̄ᴴx'`.
pub fn matched_filter(hp: &EquivalentChannel, x: &[Complex64]) -> Result<Vec<Complex64>> {
    let (n_rx, m) = (hp.receive_antennas(), hp.layers());
    if x.len() != 2 * n_rx {
        return Err(Error::InvalidDimensions(format!("received vector of length {} for N = {n_rx}", x.len())));
    }
    let mut z = Vec::with_capacity(2 * m);
    for l in 0..m {
        let mut acc: Option<[Complex64; 2]> = None;
        for n in 0..n_rx {
            let (a, b) = hp.pair(n, l);
            let (x1, x2) = (x[2 * n], x[2 * n + 1]);
            // [[a*, b], [b*, -a]] · [x1, x2]
            let t = [
                flops::add(flops::mul(a.conj(), x1), flops::mul(b, x2)),
                flops::sub(flops::mul(b.conj(), x1), flops::mul(a, x2)),
            ];
            acc = Some(match acc {
                None => t,
                Some(s) => [flops::add(s[0], t[0]), flops::add(s[1], t[1])],
            });
        }
        z.extend_from_slice(&acc.unwrap_or_default());
    }
    Ok(z)
}

/// `R̄ = H̄ᴴH̄ + αI` in compressed form.
pub fn init_gram(hp: &EquivalentChannel, alpha: f64) -> Result<BlockHermitian> {
    check_alpha(alpha)?;
    let (n_rx, m) = (hp.receive_antennas(), hp.layers());
    let mut r = BlockHermitian::empty();
    for j in 0..m {
        let column: Vec<AlamoutiBlock> = (0..j)
            .map(|i| {
                let mut acc: Option<AlamoutiBlock> = None;
                for n in 0..n_rx {
                    let (a, b) = hp.pair(n, i);
                    let (c, d) = hp.pair(n, j);
                    // Bᴴ·C for B = [[a, b], [b*, -a*]], C = [[c, d], [d*, -c*]]
                    let t = AlamoutiBlock::new(
                        flops::add(flops::mul(a.conj(), c), flops::mul(b, d.conj())),
                        flops::sub(flops::mul(b.conj(), c), flops::mul(a, d.conj())),
                    );
                    acc = Some(match acc {
                        None => t,
                        Some(s) => s.add(&t),
                    });
                }
                acc.unwrap_or_default()
            })
            .collect();
        let energy = (0..n_rx)
            .map(|n| {
                let (a, b) = hp.pair(n, j);
                flops::radd(flops::norm_sqr(a), flops::norm_sqr(b))
            })
            .reduce(flops::radd)
            .unwrap_or(0.0);
        r.push(&column, flops::radd(energy, alpha));
    }
    Ok(r)
}

/// `Q̄ = R̄⁻¹`, grown one block at a time from `Q̄_1 = I/υ'_1`.
///
/// At step `m` with `v̄` the new block column of `R̄` and `u = Q̄_{m-1}v̄`:
/// `ω' = 1/(υ'_m − v'ᴴu')` (first columns only), `w̄ = −ω'u` and
/// `T̄ = Q̄_{m-1} − u·w̄ᴴ`.
pub fn init_covariance(rbar: &BlockHermitian) -> Result<BlockHermitian> {
    let m_total = rbar.dim();
    let mut q = BlockHermitian::empty();
    if m_total == 0 {
        return Ok(q);
    }
    let d0 = rbar.diag(0);
    if !(d0 > 0.0) || !d0.is_finite() {
        return Err(Error::SingularPivot { index: 0, pivot: d0 });
    }
    q.push(&[], flops::recip(d0));

    for j in 1..m_total {
        let v = rbar.column_above(j);
        let u = q.mul_blocks(v);
        let quad = v
            .iter()
            .zip(&u)
            .map(|(vi, ui)| flops::radd(flops::re_mul_conj(ui.a1, vi.a1), flops::re_mul_conj(ui.a2, vi.a2)))
            .reduce(flops::radd)
            .unwrap_or(0.0);
        let upsilon = rbar.diag(j);
        let pivot = flops::rsub(upsilon, quad);

        // Diagnostic only, not part of the algorithm's arithmetic.
        let residue: f64 = v.iter().zip(&u).map(|(vi, ui)| (vi.a1.conj() * ui.a1 + vi.a2.conj() * ui.a2).im).sum();
        if !(pivot > PIVOT_RTOL * upsilon) || residue.abs() > REALITY_RTOL * upsilon || !pivot.is_finite() {
            return Err(Error::SingularPivot { index: j, pivot });
        }

        let omega = flops::recip(pivot);
        let w: Vec<AlamoutiBlock> = u.iter().map(|ui| ui.scale(-omega)).collect();
        let mut next = q.minus_outer(&u, &w);
        next.push(&w, omega);
        q = next;
    }
    Ok(q)
}

/// State of the recursion with `m` undetected layers. `rbar`, `qbar`, `z`
/// are permuted so that position `k` holds layer `perm[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorWorkspace {
    pub rbar: BlockHermitian,
    pub qbar: BlockHermitian,
    pub z: Vec<Complex64>,
    pub perm: Vec<usize>,
    pub alpha: f64,
}

impl DetectorWorkspace {
    /// Initialisation phase: matched filter, Gram and covariance.
    pub fn initialise(hp: &EquivalentChannel, x: &[Complex64], alpha: f64) -> Result<Self> {
        check_inputs(hp, x, alpha)?;
        let z = matched_filter(hp, x)?;
        let rbar = init_gram(hp, alpha)?;
        let qbar = init_covariance(&rbar)?;
        Ok(Self { rbar, qbar, z, perm: (0..hp.layers()).collect(), alpha })
    }

    /// Undetected layers.
    pub fn m(&self) -> usize {
        self.z.len() / 2
    }

    /// Block position with the smallest covariance diagonal among the `m`
    /// remaining; ties go to the lowest position.
    pub fn select_layer(&self) -> usize {
        let mut best = 0;
        for k in 1..self.m() {
            if self.qbar.diag(k) < self.qbar.diag(best) {
                best = k;
            }
        }
        best
    }

    /// Swap block position `k` with the last position in `R̄`, `Q̄`, `z'`
    /// and the layer permutation.
    pub fn permute(&mut self, k: usize) {
        let last = self.m() - 1;
        assert!(k <= last);
        if k == last {
            return;
        }
        self.rbar.swap(k, last);
        self.qbar.swap(k, last);
        self.z.swap(2 * k, 2 * last);
        self.z.swap(2 * k + 1, 2 * last + 1);
        self.perm.swap(k, last);
    }

    /// Estimates of the last layer's two symbols: the last two columns of
    /// `Q̄` conjugate-transposed against `z'`.
    pub fn estimate_layer(&self) -> [Complex64; 2] {
        let last = self.m() - 1;
        let d = self.qbar.diag(last);
        let mut y = [flops::scale(d, self.z[2 * last]), flops::scale(d, self.z[2 * last + 1])];
        for (i, blk) in self.qbar.column_above(last).iter().enumerate() {
            let t = blk.adjoint().apply([self.z[2 * i], self.z[2 * i + 1]]);
            y = [flops::add(y[0], t[0]), flops::add(y[1], t[1])];
        }
        y
    }

    /// Remove the last layer's contribution from `z'` with decisions
    /// `s_hat`, and drop the last block row/column of `R̄`.
    pub fn cancel_layer(&mut self, s_hat: [Complex64; 2]) {
        let last = self.m() - 1;
        let col = self.rbar.column_above(last).to_vec();
        self.z.truncate(2 * last);
        for (i, blk) in col.iter().enumerate() {
            let t = blk.apply(s_hat);
            self.z[2 * i] = flops::sub(self.z[2 * i], t[0]);
            self.z[2 * i + 1] = flops::sub(self.z[2 * i + 1], t[1]);
        }
        self.rbar = self.rbar.truncated();
    }

    /// `Q̄_{m-1} = T̄ − w̄·w̄ᴴ/ω'` from the partition of `Q̄_m`.
    pub fn deflate_covariance(&mut self) -> Result<()> {
        let m = self.qbar.dim();
        assert!(m >= 2, "deflating a single-block covariance");
        let scale = self.qbar.diagonal().iter().copied().fold(0.0, f64::max);
        let (t, w, omega) = std::mem::replace(&mut self.qbar, BlockHermitian::empty()).split_last();
        if !(omega > PIVOT_RTOL * scale) || !omega.is_finite() {
            return Err(Error::SingularPivot { index: m - 1, pivot: omega });
        }
        let g = flops::recip(omega);
        let wg: Vec<AlamoutiBlock> = w.iter().map(|wi| wi.scale(g)).collect();
        self.qbar = t.minus_outer(&wg, &w);
        Ok(())
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ordering {
    MinMse,
    Fixed,
}

fn run<S: Slicer + ?Sized>(
    hp: &EquivalentChannel,
    x: &[Complex64],
    alpha: f64,
    slicer: &S,
    ordering: Ordering,
    observer: &mut dyn FnMut(&DetectorWorkspace),
) -> Result<DetectionResult> {
    let scope = flops::flop_scope();
    let mut ws = DetectorWorkspace::initialise(hp, x, alpha)?;
    let big_m = ws.m();
    let zero = Complex64::new(0.0, 0.0);
    let mut decisions = vec![zero; 2 * big_m];
    let mut soft = vec![zero; 2 * big_m];
    let mut order = Vec::with_capacity(2 * big_m);

    loop {
        observer(&ws);
        let m = ws.m();
        let k = match ordering {
            Ordering::MinMse => ws.select_layer(),
            Ordering::Fixed => m - 1,
        };
        ws.permute(k);
        let y = ws.estimate_layer();
        let s_hat = [slicer.slice(y[0]), slicer.slice(y[1])];
        let layer = ws.perm[m - 1];
        soft[2 * layer..2 * layer + 2].copy_from_slice(&y);
        decisions[2 * layer..2 * layer + 2].copy_from_slice(&s_hat);
        order.extend([2 * layer, 2 * layer + 1]);
        if m == 1 {
            break;
        }
        ws.cancel_layer(s_hat);
        ws.deflate_covariance()?;
    }

    Ok(DetectionResult { decisions, soft, order, flops: scope.counter() })
}

/// Fast recursive group-wise MMSE-OSIC.
pub fn detect_gstbc<S: Slicer + ?Sized>(
    hp: &EquivalentChannel,
    x: &[Complex64],
    alpha: f64,
    slicer: &S,
) -> Result<DetectionResult> {
    run(hp, x, alpha, slicer, Ordering::MinMse, &mut |_| {})
}

/// [`detect_gstbc`] with `observer` called on the workspace at the start of
/// every depth `m = M, …, 1`, before the layer is selected.
pub fn detect_gstbc_traced<S: Slicer + ?Sized>(
    hp: &EquivalentChannel,
    x: &[Complex64],
    alpha: f64,
    slicer: &S,
    observer: &mut dyn FnMut(&DetectorWorkspace),
) -> Result<DetectionResult> {
    run(hp, x, alpha, slicer, Ordering::MinMse, observer)
}

/// The same recursion, always taking the last remaining layer.
pub fn detect_fixed_order<S: Slicer + ?Sized>(
    hp: &EquivalentChannel,
    x: &[Complex64],
    alpha: f64,
    slicer: &S,
) -> Result<DetectionResult> {
    run(hp, x, alpha, slicer, Ordering::Fixed, &mut |_| {})
}
