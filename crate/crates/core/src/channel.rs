//! Rayleigh flat-fading G-STBC channel and its equivalent linear model.
//!
//! `M` Alamouti layers drive `2M` transmit antennas; `N` antennas receive
//! over two slots. Stacking each antenna's first-slot sample with the
//! conjugate of its second-slot sample gives `x' = H' s' + n'`, where `H'`
//! is `2N × 2M` and every 2×2 sub-block has the form `[[a, b], [b*, −a*]]`.

use crate::dense::DenseComplexMatrix;
use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Counter-based generator for Monte Carlo stream `index` under `seed`.
/// Streams are independent of the order in which they are drawn.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Circularly-symmetric complex Gaussian with the given total variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> Complex64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(s * re, s * im)
}

/// Physical `N × 2M` channel gains `h_nk`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    gains: DenseComplexMatrix,
}

impl ChannelMatrix {
    pub fn new(gains: DenseComplexMatrix) -> Result<Self> {
        let (n, cols) = (gains.rows(), gains.cols());
        if cols % 2 != 0 || cols == 0 {
            return Err(Error::InvalidDimensions(format!("channel has {cols} transmit antennas; need 2M with M >= 1")));
        }
        if n < cols / 2 {
            return Err(Error::InvalidDimensions(format!("N = {n} receive antennas < M = {} layers", cols / 2)));
        }
        if !gains.is_finite() {
            return Err(Error::InvalidDimensions("channel gains must be finite".into()));
        }
        Ok(Self { gains })
    }

    /// I.i.d. unit-variance Rayleigh gains drawn from `rng`.
    pub fn random<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Self> {
        check_dims(n, m)?;
        let gains = DenseComplexMatrix::from_fn(n, 2 * m, |_, _| complex_gaussian(rng, 1.0));
        Ok(Self { gains })
    }

    pub fn receive_antennas(&self) -> usize {
        self.gains.rows()
    }

    pub fn layers(&self) -> usize {
        self.gains.cols() / 2
    }

    pub fn gains(&self) -> &DenseComplexMatrix {
        &self.gains
    }
}

fn check_dims(n: usize, m: usize) -> Result<()> {
    if m < 1 || n < m {
        return Err(Error::InvalidDimensions(format!("need N >= M >= 1, got N = {n}, M = {m}")));
    }
    Ok(())
}

/// Seeded [`ChannelMatrix::random`].
pub fn generate_channel(n: usize, m: usize, seed: u64) -> Result<ChannelMatrix> {
    ChannelMatrix::random(n, m, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// The `2N × 2M` equivalent channel `H'`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentChannel {
    dense: DenseComplexMatrix,
}

impl EquivalentChannel {
    /// Wrap a dense matrix after checking the per-block `[[a, b], [b*, −a*]]`
    /// pattern to within `tol`.
    pub fn from_dense(dense: DenseComplexMatrix, tol: f64) -> Result<Self> {
        if dense.rows() % 2 != 0 || dense.cols() % 2 != 0 || dense.cols() == 0 {
            return Err(Error::InvalidDimensions(format!(
                "equivalent channel must be 2N x 2M, got {}x{}",
                dense.rows(),
                dense.cols()
            )));
        }
        for n in 0..dense.rows() / 2 {
            for m in 0..dense.cols() / 2 {
                let (r, c) = (2 * n, 2 * m);
                let (a, b) = (dense[(r, c)], dense[(r, c + 1)]);
                if (dense[(r + 1, c)] - b.conj()).norm() > tol || (dense[(r + 1, c + 1)] + a.conj()).norm() > tol {
                    return Err(Error::StructureViolation {
                        row: n,
                        col: m,
                        reason: "equivalent-channel block is not [[a, b], [b*, -a*]]".into(),
                    });
                }
            }
        }
        Ok(Self { dense })
    }

    pub fn receive_antennas(&self) -> usize {
        self.dense.rows() / 2
    }

    pub fn layers(&self) -> usize {
        self.dense.cols() / 2
    }

    /// First-row entries `(a, b)` of the block for receive antenna `n` and
    /// layer `m`; the block is `[[a, b], [b*, −a*]]`.
    #[inline]
    pub fn pair(&self, n: usize, m: usize) -> (Complex64, Complex64) {
        (self.dense[(2 * n, 2 * m)], self.dense[(2 * n, 2 * m + 1)])
    }

    pub fn dense(&self) -> &DenseComplexMatrix {
        &self.dense
    }

    /// `H'·s'`, uncounted.
    pub fn apply(&self, s: &[Complex64]) -> Result<Vec<Complex64>> {
        if s.len() != self.dense.cols() {
            return Err(Error::InvalidDimensions(format!(
                "symbol vector of length {} for {} layers",
                s.len(),
                self.layers()
            )));
        }
        Ok((0..self.dense.rows()).map(|i| self.dense.row(i).iter().zip(s).map(|(h, x)| h * x).sum()).collect())
    }
}

/// Build `H'` from the physical channel.
pub fn build_equivalent(h: &ChannelMatrix) -> EquivalentChannel {
    let g = h.gains();
    let (n, cols) = (g.rows(), g.cols());
    let dense = DenseComplexMatrix::from_fn(2 * n, cols, |r, c| {
        let ant = r / 2;
        if r % 2 == 0 {
            g[(ant, c)]
        } else if c % 2 == 0 {
            g[(ant, c + 1)].conj()
        } else {
            -g[(ant, c - 1)].conj()
        }
    });
    EquivalentChannel { dense }
}

/// Receiver noise: variance per complex entry and the seed of its stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub sigma_n2: f64,
    pub seed: u64,
}

/// Two-slot Alamouti transmission with a seeded noise stream.
pub fn transmit(h: &ChannelMatrix, s: &[Complex64], noise: NoiseSpec) -> Result<Vec<Complex64>> {
    transmit_with_rng(h, s, noise.sigma_n2, &mut ChaCha8Rng::seed_from_u64(noise.seed))
}

/// Compute the `N × 2` received block, add noise of variance `sigma_n2`
/// per complex entry, then stack as `x_11, x_12*, x_21, x_22*, …`.
pub fn transmit_with_rng<R: Rng + ?Sized>(
    h: &ChannelMatrix,
    s: &[Complex64],
    sigma_n2: f64,
    rng: &mut R,
) -> Result<Vec<Complex64>> {
    let m = h.layers();
    if s.len() != 2 * m {
        return Err(Error::InvalidDimensions(format!("symbol vector of length {} for {m} layers", s.len())));
    }
    if !(sigma_n2 >= 0.0) {
        return Err(Error::InvalidDimensions(format!("noise variance {sigma_n2} must be non-negative")));
    }
    let g = h.gains();
    let mut x = Vec::with_capacity(2 * h.receive_antennas());
    for n in 0..h.receive_antennas() {
        let mut slot1 = Complex64::new(0.0, 0.0);
        let mut slot2 = Complex64::new(0.0, 0.0);
        for l in 0..m {
            let (s1, s2) = (s[2 * l], s[2 * l + 1]);
            let (h1, h2) = (g[(n, 2 * l)], g[(n, 2 * l + 1)]);
            // antenna 2l-1 sends (s1, -s2*), antenna 2l sends (s2, s1*)
            slot1 += h1 * s1 + h2 * s2;
            slot2 += -h1 * s2.conj() + h2 * s1.conj();
        }
        if sigma_n2 > 0.0 {
            slot1 += complex_gaussian(rng, sigma_n2);
            slot2 += complex_gaussian(rng, sigma_n2);
        }
        x.push(slot1);
        x.push(slot2.conj());
    }
    Ok(x)
}

/// Noise variance per complex dimension for a given Eb/N0 in dB with QPSK
/// and unit symbol energy (`Eb = σ_s²/2`, `N0 = σ_n²`).
pub fn sigma_n2_from_ebn0_db(ebn0_db: f64) -> f64 {
    let ebn0 = 10f64.powf(ebn0_db / 10.0);
    1.0 / (2.0 * ebn0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modulation::qpsk_modulate;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fixed_seed_is_deterministic() {
        assert_eq!(generate_channel(4, 2, 9).unwrap(), generate_channel(4, 2, 9).unwrap());
        assert_ne!(generate_channel(4, 2, 9).unwrap(), generate_channel(4, 2, 10).unwrap());
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(matches!(generate_channel(1, 2, 0), Err(Error::InvalidDimensions(_))));
        assert!(matches!(generate_channel(3, 0, 0), Err(Error::InvalidDimensions(_))));
    }

    #[test]
    fn unit_average_power() {
        let mut rng = stream_rng(1, 0);
        let n = 100_000;
        let mean = (0..n).map(|_| complex_gaussian(&mut rng, 1.0).norm_sqr()).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.02, "{mean}");
    }

    #[test]
    fn single_layer_equivalent() {
        let h = ChannelMatrix::new(DenseComplexMatrix::from_vec(1, 2, vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap()).unwrap();
        let hp = build_equivalent(&h);
        let expected = DenseComplexMatrix::from_vec(2, 2, vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(hp.dense(), &expected);
    }

    #[test]
    fn zero_channel() {
        let h = ChannelMatrix::new(DenseComplexMatrix::zeros(3, 4)).unwrap();
        let hp = build_equivalent(&h);
        assert_eq!(hp.dense(), &DenseComplexMatrix::zeros(6, 4));
        let s = qpsk_modulate(&[true, false, false, true, true, true, false, false]).unwrap();
        let x = transmit(&h, &s, NoiseSpec { sigma_n2: 0.0, seed: 0 }).unwrap();
        assert!(x.iter().all(|v| *v == c(0.0, 0.0)));
    }

    #[test]
    fn noiseless_transmission_equals_equivalent_model() {
        for seed in 0..200u64 {
            let (n, m) = (1 + (seed % 5) as usize + 1, 1 + (seed % 3) as usize);
            let n = n.max(m);
            let mut rng = stream_rng(seed, 1);
            let h = ChannelMatrix::random(n, m, &mut rng).unwrap();
            let s: Vec<_> = (0..2 * m).map(|_| complex_gaussian(&mut rng, 1.0)).collect();
            let x = transmit(&h, &s, NoiseSpec { sigma_n2: 0.0, seed }).unwrap();
            let hp = build_equivalent(&h);
            let y = hp.apply(&s).unwrap();
            let scale = y.iter().map(|v| v.norm()).fold(1.0, f64::max);
            for (a, b) in x.iter().zip(&y) {
                assert!((a - b).norm() <= 1e-12 * scale);
            }
            EquivalentChannel::from_dense(hp.dense().clone(), 0.0).unwrap();
        }
    }

    #[test]
    fn column_pairs_are_orthogonal_with_equal_norms() {
        let hp = build_equivalent(&generate_channel(5, 3, 4).unwrap());
        let d = hp.dense();
        for m in 0..3 {
            let (u, v) = (d.column(2 * m), d.column(2 * m + 1));
            let ip: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            let nu: f64 = u.iter().map(|a| a.norm_sqr()).sum();
            let nv: f64 = v.iter().map(|a| a.norm_sqr()).sum();
            assert!(ip.norm() < 1e-12 * nu);
            assert!((nu - nv).abs() < 1e-12 * nu);
        }
    }

    #[test]
    fn noise_only_has_requested_variance() {
        let h = generate_channel(4, 2, 0).unwrap();
        let s = vec![c(0.0, 0.0); 4];
        let mut rng = stream_rng(3, 0);
        let mut acc = 0.0;
        let mut count = 0;
        for _ in 0..20_000 {
            for v in transmit_with_rng(&h, &s, 1.0, &mut rng).unwrap() {
                acc += v.norm_sqr();
                count += 1;
            }
        }
        let var = acc / count as f64;
        assert!((var - 1.0).abs() < 0.02, "{var}");
    }

    #[test]
    fn structure_check_catches_wrong_sign() {
        let mut d = build_equivalent(&generate_channel(2, 1, 0).unwrap()).dense().clone();
        d[(1, 1)] = -d[(1, 1)];
        assert!(EquivalentChannel::from_dense(d, 1e-12).is_err());
    }

    #[test]
    fn ebn0_conversion() {
        assert!((sigma_n2_from_ebn0_db(0.0) - 0.5).abs() < 1e-15);
        assert!((sigma_n2_from_ebn0_db(10.0) - 0.05).abs() < 1e-15);
    }
}
