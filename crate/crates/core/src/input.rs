//! Plain-text single-instance input for the `detect` command.
//!
//! ```text
//! N M alpha
//! <N rows of 2M complex gains>
//! <2N received samples x'>
//! [<2M transmitted symbols s'>]
//! ```
//!
//! Complex entries are written `re+imi` (`1.5-0.25i`, `-2+0i`, `3`) and
//! separated by whitespace. Blank lines and lines starting with `#` are
//! skipped. The optional last line carries the transmitted symbols so a
//! result can be checked against them.

use crate::channel::{build_equivalent, ChannelMatrix, EquivalentChannel};
use crate::dense::DenseComplexMatrix;
use crate::detect::{DetectionResult, DetectorKind};
use crate::error::{Error, Result};
use crate::modulation::Qpsk;
use num_complex::Complex64;
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectInput {
    pub channel: ChannelMatrix,
    pub alpha: f64,
    pub received: Vec<Complex64>,
    pub transmitted: Option<Vec<Complex64>>,
}

impl DetectInput {
    pub fn equivalent(&self) -> EquivalentChannel {
        build_equivalent(&self.channel)
    }
}

/// A non-comment line split into tokens, keeping 1-based line and column.
struct Line<'a> {
    number: usize,
    tokens: Vec<(usize, &'a str)>,
}

fn tokenize(text: &str) -> Vec<Line<'_>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            let mut tokens = Vec::new();
            let mut start = None;
            for (j, c) in l.char_indices().chain(std::iter::once((l.len(), ' '))) {
                match (c.is_whitespace(), start) {
                    (true, Some(s)) => {
                        tokens.push((l[..s].chars().count() + 1, &l[s..j]));
                        start = None;
                    }
                    (false, None) => start = Some(j),
                    _ => {}
                }
            }
            Line { number: i + 1, tokens }
        })
        .collect()
}

/// Parse `re+imi`, `re-imi`, `imi` or a bare real.
pub fn parse_complex(tok: &str) -> Option<Complex64> {
    let Some(body) = tok.strip_suffix('i') else {
        return tok.parse::<f64>().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (body[..k].parse::<f64>().ok()?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        s => s.parse::<f64>().ok()?,
    };
    Some(Complex64::new(re, im))
}

/// Shortest text that parses back to exactly `z`.
pub fn format_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { "" } else { "+" };
    format!("{}{sign}{}i", z.re, z.im)
}

fn parse_error(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, column, message: message.into() }
}

fn complex_row(line: &Line<'_>, expected: usize, what: &str) -> Result<Vec<Complex64>> {
    if line.tokens.len() != expected {
        return Err(parse_error(
            line.number,
            1,
            format!("{what} has {} entries, expected {expected}", line.tokens.len()),
        ));
    }
    line.tokens
        .iter()
        .map(|&(col, tok)| {
            parse_complex(tok).ok_or_else(|| parse_error(line.number, col, format!("bad complex number '{tok}'")))
        })
        .collect()
}

pub fn parse_detect_input(text: &str) -> Result<DetectInput> {
    let lines = tokenize(text);
    let header = lines.first().ok_or_else(|| parse_error(1, 1, "empty input"))?;
    if header.tokens.len() != 3 {
        return Err(parse_error(header.number, 1, "first line must be 'N M alpha'"));
    }
    let dim = |k: usize| -> Result<usize> {
        let (col, tok) = header.tokens[k];
        tok.parse::<usize>().map_err(|_| parse_error(header.number, col, format!("bad dimension '{tok}'")))
    };
    let (n, m) = (dim(0)?, dim(1)?);
    let (alpha_col, alpha_tok) = header.tokens[2];
    let alpha: f64 =
        alpha_tok.parse().map_err(|_| parse_error(header.number, alpha_col, format!("bad alpha '{alpha_tok}'")))?;
    if n == 0 || m == 0 {
        return Err(parse_error(header.number, 1, "N and M must be positive"));
    }

    let body = &lines[1..];
    let last_line = lines.last().map_or(1, |l| l.number);
    if body.len() < n + 1 {
        return Err(parse_error(last_line + 1, 1, format!("expected {n} channel rows and a received line")));
    }
    if body.len() > n + 2 {
        return Err(parse_error(body[n + 2].number, 1, "unexpected trailing line"));
    }
    let mut gains = Vec::with_capacity(n * 2 * m);
    for (r, line) in body[..n].iter().enumerate() {
        gains.extend(complex_row(line, 2 * m, &format!("row {} of H", r + 1))?);
    }
    let received = complex_row(&body[n], 2 * n, "received line")?;
    let transmitted = body.get(n + 1).map(|l| complex_row(l, 2 * m, "transmitted line")).transpose()?;
    let channel = ChannelMatrix::new(DenseComplexMatrix::from_vec(n, 2 * m, gains)?)?;
    Ok(DetectInput { channel, alpha, received, transmitted })
}

/// Inverse of [`parse_detect_input`].
pub fn write_detect_input(input: &DetectInput) -> String {
    let g = input.channel.gains();
    let mut s = format!("{} {} {}\n", g.rows(), g.cols() / 2, input.alpha);
    let join = |v: &[Complex64]| v.iter().map(|&z| format_complex(z)).collect::<Vec<_>>().join(" ");
    for r in 0..g.rows() {
        s.push_str(&join(g.row(r)));
        s.push('\n');
    }
    s.push_str(&join(&input.received));
    s.push('\n');
    if let Some(t) = &input.transmitted {
        s.push_str(&join(t));
        s.push('\n');
    }
    s
}

/// Parse `text` and run `detector` with QPSK slicing. `alpha_override`
/// replaces the file's regularisation when given.
pub fn run_single_detection(
    text: &str,
    detector: DetectorKind,
    alpha_override: Option<f64>,
) -> Result<(DetectInput, DetectionResult)> {
    let mut input = parse_detect_input(text)?;
    if let Some(a) = alpha_override {
        input.alpha = a;
    }
    let result = detector.detect(&input.equivalent(), &input.received, input.alpha, &Qpsk)?;
    Ok((input, result))
}

/// Human-readable report of one detection.
pub fn render_detection(input: &DetectInput, detector: DetectorKind, r: &DetectionResult) -> String {
    let join = |v: &[Complex64]| v.iter().map(|&z| format_complex(z)).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    let _ = writeln!(s, "detector: {detector}");
    let _ = writeln!(s, "decisions: {}", join(&r.decisions));
    let order: Vec<String> = r.order.iter().map(|i| format!("s{}{}", i / 2 + 1, i % 2 + 1)).collect();
    let _ = writeln!(s, "order: {}", order.join(" "));
    let _ = writeln!(s, "soft: {}", join(&r.soft));
    let _ = writeln!(s, "flops: {} real mults, {} real adds", r.flops.real_mults, r.flops.real_adds);
    if let Some(t) = &input.transmitted {
        let errors = t.iter().zip(&r.decisions).filter(|(a, b)| (**a - **b).norm() > 1e-9).count();
        let _ = writeln!(s, "symbol errors: {errors} of {}", t.len());
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{generate_channel, transmit, NoiseSpec};
    use crate::modulation::qpsk_slice;

    #[test]
    fn complex_tokens() {
        let c = Complex64::new;
        assert_eq!(parse_complex("1.5-0.25i"), Some(c(1.5, -0.25)));
        assert_eq!(parse_complex("-2+0i"), Some(c(-2.0, 0.0)));
        assert_eq!(parse_complex("3"), Some(c(3.0, 0.0)));
        assert_eq!(parse_complex("-i"), Some(c(0.0, -1.0)));
        assert_eq!(parse_complex("2.5i"), Some(c(0.0, 2.5)));
        assert_eq!(parse_complex("1e-3+2E+1i"), Some(c(1e-3, 20.0)));
        assert_eq!(parse_complex("1+2j"), None);
        assert_eq!(parse_complex("x+1i"), None);
        for z in [c(0.1, -7.25), c(-3.0, 1e-12), c(0.0, 0.0)] {
            assert_eq!(parse_complex(&format_complex(z)), Some(z));
        }
    }

    #[test]
    fn zero_file_gives_zero_soft() {
        let text = "2 1 0.1\n0+0i 0+0i\n0+0i 0+0i\n0 0 0 0\n";
        let (_, r) = run_single_detection(text, DetectorKind::Proposed, None).unwrap();
        assert!(r.soft.iter().all(|z| z.norm() == 0.0));
        assert!(r.decisions.iter().all(|&d| d == qpsk_slice(Complex64::new(0.0, 0.0))));
    }

    #[test]
    fn crafted_noiseless_file_round_trips() {
        let h = generate_channel(3, 2, 9).unwrap();
        let s = crate::modulation::qpsk_modulate(&[true, false, false, false, true, true, false, true]).unwrap();
        let x = transmit(&h, &s, NoiseSpec { sigma_n2: 0.0, seed: 0 }).unwrap();
        let input = DetectInput { channel: h, alpha: 1e-9, received: x, transmitted: Some(s.clone()) };
        let text = write_detect_input(&input);
        let parsed = parse_detect_input(&text).unwrap();
        assert_eq!(parsed.transmitted.as_deref(), Some(&s[..]));
        for d in DetectorKind::ALL {
            let (inp, r) = run_single_detection(&text, d, None).unwrap();
            assert_eq!(r.decisions, s, "{d}");
            assert!(render_detection(&inp, d, &r).contains("symbol errors: 0 of 4"));
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        let short_row = "2 1 0.1\n1+0i 0+0i\n1+0i\n0 0 0 0\n";
        match parse_detect_input(short_row) {
            Err(Error::Parse { line: 3, message, .. }) => assert!(message.contains("row 2"), "{message}"),
            other => panic!("{other:?}"),
        }
        let bad_token = "1 1 0.1\n1+0i 0+zi\n0 0\n";
        assert!(matches!(parse_detect_input(bad_token), Err(Error::Parse { line: 2, column: 6, .. })));
        assert!(matches!(parse_detect_input(""), Err(Error::Parse { .. })));
        assert!(matches!(parse_detect_input("1 x 0.1\n"), Err(Error::Parse { line: 1, column: 3, .. })));
        assert!(matches!(parse_detect_input("1 1 0.1\n1 0\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn alpha_override_and_validation() {
        let text = "1 1 -1\n1 0\n1 1\n";
        assert!(matches!(
            run_single_detection(text, DetectorKind::Proposed, None),
            Err(Error::NonPositiveAlpha(_))
        ));
        assert!(run_single_detection(text, DetectorKind::Proposed, Some(0.5)).is_ok());
    }
}
