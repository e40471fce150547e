use clap::{Parser, Subcommand};
use gstbc::detect::DetectorKind;
use gstbc::input::{render_detection, run_single_detection};
use gstbc::sim::{emit_csv, run_ber_sweep, run_flop_report, snr_grid, SimConfig};
use gstbc::Error;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "gstbc", version, about = "Group-wise MMSE-OSIC detection for G-STBC / DSTTD")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo BER sweep over Eb/N0, written as CSV.
    Ber {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        snr_start: f64,
        #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
        snr_stop: f64,
        #[arg(long, default_value_t = 2.0)]
        snr_step: f64,
        /// Channel uses per SNR point.
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Comma-separated detector names.
        #[arg(long, value_delimiter = ',', default_value = "proposed,fixed_order,osic_symbolwise")]
        detectors: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Count real multiplications and additions of one detection.
    Flops {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "proposed")]
        detector: String,
    },
    /// Run one detection from a text input file.
    Detect {
        #[arg(long)]
        input: std::path::PathBuf,
        #[arg(long, default_value = "proposed")]
        detector: String,
        /// Overrides the alpha in the input file.
        #[arg(long)]
        alpha: Option<f64>,
    },
}

fn run(cli: Cli) -> gstbc::Result<()> {
    match cli.command {
        Command::Ber { m, n, snr_start, snr_stop, snr_step, trials, detectors, seed, out } => {
            let detectors = detectors.iter().map(|d| d.trim().parse()).collect::<gstbc::Result<Vec<_>>>()?;
            let cfg = SimConfig {
                m,
                n,
                snr_db: snr_grid(snr_start, snr_stop, snr_step)?,
                trials_per_point: trials,
                detectors,
                seed,
            };
            let csv = emit_csv(&run_ber_sweep(&cfg)?, seed);
            match out {
                Some(path) => std::fs::write(&path, csv)
                    .map_err(|e| Error::ConfigInvalid(format!("cannot write {}: {e}", path.display())))?,
                None => print!("{csv}"),
            }
        }
        Command::Flops { m, n, detector } => {
            let r = run_flop_report(m, n, detector.parse::<DetectorKind>()?)?;
            println!("detector: {}  M = {m}  N = {n}", r.detector);
            println!("measured: {} real mults, {} real adds", r.measured.real_mults, r.measured.real_adds);
            match (r.formula_mults, r.formula_adds, r.deviation) {
                (Some(fm), Some(fa), Some(dev)) => {
                    let kind = if m == 2 { "exact DSTTD formula" } else { "leading terms" };
                    println!("{kind}: {fm:.1} real mults, {fa:.1} real adds");
                    println!("deviation (mults): {:+.2}%", 100.0 * dev);
                }
                _ => println!("no closed-form reference for this detector"),
            }
        }
        Command::Detect { input, detector, alpha } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| Error::ConfigInvalid(format!("cannot read {}: {e}", input.display())))?;
            let detector: DetectorKind = detector.parse()?;
            let (inp, r) = run_single_detection(&text, detector, alpha)?;
            print!("{}", render_detection(&inp, detector, &r));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
