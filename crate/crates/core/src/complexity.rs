//! Closed-form real-flop counts used to check the instrumented detectors
//! and to compare against published detectors that are not implemented
//! here.

/// Leading terms of the recursive G-STBC detector, `8M²N + (32/3)M³`, for
/// both real multiplications and real additions.
pub fn proposed_gstbc_leading(m: usize, n: usize) -> f64 {
    let (m, n) = (m as f64, n as f64);
    8.0 * m * m * n + 32.0 / 3.0 * m * m * m
}

/// Leading terms of the sorted-QR G-STBC detector, `32M³ + 16M²N`, for both
/// real multiplications and real additions.
pub fn sorted_qr_gstbc_leading(m: usize, n: usize) -> f64 {
    let (m, n) = (m as f64, n as f64);
    32.0 * m * m * m + 16.0 * m * m * n
}

/// Exact published count of the recursive detector for DSTTD (`M = 2`):
/// `(8M²N + 8MN + 8N + 67, 8M²N + 8MN + 8N + 40)` real (mults, adds).
pub fn proposed_dsttd(n: usize) -> (f64, f64) {
    let (m, n) = (2.0, n as f64);
    let core = 8.0 * m * m * n + 8.0 * m * n + 8.0 * n;
    (core + 67.0, core + 40.0)
}

/// Published count of the one-step fixed-order SIC detector for DSTTD:
/// `((8/3)N³ + 14N² + (79/3)N − 25, (8/3)N³ + 10N² + (46/3)N − 9)` real
/// (mults, adds).
pub fn one_step_sic_dsttd(n: usize) -> (f64, f64) {
    let n = n as f64;
    (
        8.0 / 3.0 * n.powi(3) + 14.0 * n * n + 79.0 / 3.0 * n - 25.0,
        8.0 / 3.0 * n.powi(3) + 10.0 * n * n + 46.0 / 3.0 * n - 9.0,
    )
}

/// Sorted-QR over recursive leading terms for `M = N` (ratio of the cubic
/// coefficients, `48 / (56/3)`).
pub fn sorted_qr_speedup_square() -> f64 {
    // with M = N both reduce to c·M³
    sorted_qr_gstbc_leading(1, 1) / proposed_gstbc_leading(1, 1)
}

/// Total-flop speedup of the recursive DSTTD detector over the one-step SIC
/// detector with `n` receive antennas. Values below 1 mean the one-step
/// detector is cheaper.
pub fn dsttd_speedup(n: usize) -> f64 {
    let (pm, pa) = proposed_dsttd(n);
    let (om, oa) = one_step_sic_dsttd(n);
    (om + oa) / (pm + pa)
}
