//! Monte Carlo BER sweeps, flop reports and CSV output.
//!
//! Trial `t` of a sweep draws its channel, bits and noise from the
//! counter-based stream `(seed, t)`. The same stream is reused at every SNR
//! point and for every detector, so curves are compared on identical
//! channel realisations, and the per-point reduction is an integer sum,
//! so results do not depend on how trials are scheduled across threads.

use crate::channel::{build_equivalent, sigma_n2_from_ebn0_db, stream_rng, transmit_with_rng, ChannelMatrix};
use crate::complexity;
use crate::detect::DetectorKind;
use crate::error::{Error, Result};
use crate::flops::FlopCounter;
use crate::modulation::{qpsk_demodulate, qpsk_modulate, Qpsk};
use rand::Rng;
use rayon::prelude::*;
use std::fmt::Write as _;

pub const CSV_HEADER: &str = "detector,snr_db,bits,bit_errors,ber,frames,frame_errors";

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub m: usize,
    pub n: usize,
    /// Eb/N0 points in dB.
    pub snr_db: Vec<f64>,
    pub trials_per_point: u64,
    pub detectors: Vec<DetectorKind>,
    pub seed: u64,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m < 1 || self.n < self.m {
            return Err(Error::ConfigInvalid(format!("need N >= M >= 1, got N = {}, M = {}", self.n, self.m)));
        }
        if self.trials_per_point < 1 {
            return Err(Error::ConfigInvalid("trials per point must be at least 1".into()));
        }
        if self.snr_db.is_empty() || self.snr_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::ConfigInvalid("SNR grid must be non-empty and finite".into()));
        }
        if self.detectors.is_empty() {
            return Err(Error::ConfigInvalid("no detectors selected".into()));
        }
        Ok(())
    }
}

/// Inclusive SNR grid `start, start + step, …, stop`, rounded to 1e-6 dB so
/// the values survive a CSV round trip.
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(Error::ConfigInvalid(format!("bad SNR range {start}..{stop} step {step}")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| ((start + i as f64 * step) * 1e6).round() / 1e6).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerRecord {
    pub detector: String,
    pub snr_db: f64,
    pub bit_errors: u64,
    pub bits: u64,
    pub ber: f64,
    pub frame_errors: u64,
    pub frames: u64,
}

impl BerRecord {
    pub fn new(detector: &str, snr_db: f64, bit_errors: u64, bits: u64, frame_errors: u64, frames: u64) -> Self {
        let ber = if bits == 0 { 0.0 } else { bit_errors as f64 / bits as f64 };
        Self { detector: detector.to_string(), snr_db, bit_errors, bits, ber, frame_errors, frames }
    }

    /// Binomial standard error of the BER estimate.
    pub fn std_error(&self) -> f64 {
        if self.bits == 0 {
            return 0.0;
        }
        (self.ber * (1.0 - self.ber) / self.bits as f64).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    bit_errors: u64,
    frame_errors: u64,
}

fn add_tallies(a: Vec<Tally>, b: Vec<Tally>) -> Vec<Tally> {
    a.into_iter()
        .zip(b)
        .map(|(x, y)| Tally { bit_errors: x.bit_errors + y.bit_errors, frame_errors: x.frame_errors + y.frame_errors })
        .collect()
}

/// One channel use: returns per-detector error tallies.
fn run_trial(cfg: &SimConfig, trial: u64, sigma_n2: f64) -> Result<Vec<Tally>> {
    let mut rng = stream_rng(cfg.seed, trial);
    let h = ChannelMatrix::random(cfg.n, cfg.m, &mut rng)?;
    let bits: Vec<bool> = (0..4 * cfg.m).map(|_| rng.random()).collect();
    let s = qpsk_modulate(&bits)?;
    let x = transmit_with_rng(&h, &s, sigma_n2, &mut rng)?;
    let hp = build_equivalent(&h);
    let alpha = sigma_n2;
    cfg.detectors
        .iter()
        .map(|d| {
            let r = d.detect(&hp, &x, alpha, &Qpsk)?;
            let errors = qpsk_demodulate(&r.decisions).iter().zip(&bits).filter(|(a, b)| a != b).count() as u64;
            Ok(Tally { bit_errors: errors, frame_errors: u64::from(errors > 0) })
        })
        .collect()
}

/// BER of every selected detector at every SNR point. `alpha` is set to the
/// true noise variance; symbol energy is 1.
pub fn run_ber_sweep(cfg: &SimConfig) -> Result<Vec<BerRecord>> {
    cfg.validate()?;
    let bits_per_trial = 4 * cfg.m as u64;
    let mut out = Vec::with_capacity(cfg.snr_db.len() * cfg.detectors.len());
    for &snr in &cfg.snr_db {
        let sigma_n2 = sigma_n2_from_ebn0_db(snr);
        let zero = vec![Tally::default(); cfg.detectors.len()];
        let totals = (0..cfg.trials_per_point)
            .into_par_iter()
            .map(|t| run_trial(cfg, t, sigma_n2))
            .try_reduce(|| zero.clone(), |a, b| Ok(add_tallies(a, b)))?;
        for (d, t) in cfg.detectors.iter().zip(totals) {
            out.push(BerRecord::new(
                d.name(),
                snr,
                t.bit_errors,
                bits_per_trial * cfg.trials_per_point,
                t.frame_errors,
                cfg.trials_per_point,
            ));
        }
    }
    Ok(out)
}

/// Format with 10 significant digits, `%g` style.
pub fn format_sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.9e}");
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let exp: i32 = exp.parse().unwrap_or(0);
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..10).contains(&exp) {
        trim(&format!("{:.*}", (9 - exp) as usize, x))
    } else {
        format!("{}e{}", trim(mantissa), exp)
    }
}

/// CSV text: a `#` comment with the SNR definition and seed, the header,
/// then one row per record.
pub fn emit_csv(records: &[BerRecord], seed: u64) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# snr_db = Eb/N0 in dB with Eb = sigma_s^2/2 (QPSK, sigma_s^2 = 1), N0 = sigma_n^2 per complex sample, alpha = sigma_n^2; seed = {seed}"
    );
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.detector,
            format_sig10(r.snr_db),
            r.bits,
            r.bit_errors,
            format_sig10(r.ber),
            r.frames,
            r.frame_errors
        );
    }
    s
}

/// Inverse of [`emit_csv`]. `ber` is recomputed from the counts and checked
/// against the printed value.
pub fn parse_csv(text: &str) -> Result<Vec<BerRecord>> {
    let mut out = Vec::new();
    let mut saw_header = false;
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |column: usize, message: String| Error::Parse { line: line_no, column, message };
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line.trim() != CSV_HEADER {
                return Err(err(1, format!("expected header '{CSV_HEADER}'")));
            }
            saw_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(err(1, format!("expected 7 fields, found {}", fields.len())));
        }
        let col_of = |k: usize| fields[..k].iter().map(|f| f.len() + 1).sum::<usize>() + 1;
        let int = |k: usize| fields[k].parse::<u64>().map_err(|e| err(col_of(k), format!("'{}': {e}", fields[k])));
        let real = |k: usize| fields[k].parse::<f64>().map_err(|e| err(col_of(k), format!("'{}': {e}", fields[k])));
        let rec = BerRecord::new(fields[0], real(1)?, int(3)?, int(2)?, int(6)?, int(5)?);
        let printed = real(4)?;
        if (printed - rec.ber).abs() > 1e-9 * rec.ber.max(f64::MIN_POSITIVE) {
            return Err(err(col_of(4), format!("ber {printed} disagrees with counts")));
        }
        out.push(rec);
    }
    if !saw_header {
        return Err(Error::Parse { line: 1, column: 1, message: "missing CSV header".into() });
    }
    Ok(out)
}

/// SNR at which the curve crosses `target`, by linear interpolation of
/// `log10(BER)` between the first bracketing pair of points. `None` when
/// the curve never crosses `target` on the grid.
pub fn snr_at_ber(points: &[(f64, f64)], target: f64) -> Option<f64> {
    points.windows(2).find_map(|w| {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        if b0 == target {
            return Some(s0);
        }
        if b0 > target && b1 <= target && b1 > 0.0 {
            let (l0, l1, lt) = (b0.log10(), b1.log10(), target.log10());
            Some(s0 + (lt - l0) / (l1 - l0) * (s1 - s0))
        } else {
            None
        }
    })
}

/// `(snr, ber)` pairs of one detector, in record order.
pub fn curve(records: &[BerRecord], detector: &str) -> Vec<(f64, f64)> {
    records.iter().filter(|r| r.detector == detector).map(|r| (r.snr_db, r.ber)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlopReport {
    pub detector: DetectorKind,
    pub m: usize,
    pub n: usize,
    pub measured: FlopCounter,
    /// Published reference for this detector and size, when one exists:
    /// the exact DSTTD count for `M = 2`, the leading terms otherwise.
    pub formula_mults: Option<f64>,
    pub formula_adds: Option<f64>,
    /// `(measured − formula) / formula` on real multiplications.
    pub deviation: Option<f64>,
}

/// Count one detection call on a random instance.
pub fn run_flop_report(m: usize, n: usize, detector: DetectorKind) -> Result<FlopReport> {
    let mut rng = stream_rng(0, 0);
    let h = ChannelMatrix::random(n, m, &mut rng)?;
    let bits: Vec<bool> = (0..4 * m).map(|_| rng.random()).collect();
    let s = qpsk_modulate(&bits)?;
    let x = transmit_with_rng(&h, &s, 0.1, &mut rng)?;
    let r = detector.detect(&build_equivalent(&h), &x, 0.1, &Qpsk)?;

    let formula = match detector {
        DetectorKind::Proposed | DetectorKind::FixedOrder if m == 2 => Some(complexity::proposed_dsttd(n)),
        DetectorKind::Proposed | DetectorKind::FixedOrder => {
            let v = complexity::proposed_gstbc_leading(m, n);
            Some((v, v))
        }
        _ => None,
    };
    Ok(FlopReport {
        detector,
        m,
        n,
        measured: r.flops,
        formula_mults: formula.map(|f| f.0),
        formula_adds: formula.map(|f| f.1),
        deviation: formula.map(|f| (r.flops.real_mults as f64 - f.0) / f.0),
    })
}
