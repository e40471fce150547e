//! Fast recursive group-wise MMSE-OSIC detection for G-STBC and DSTTD.
//!
//! `M` Alamouti layers are sent from `2M` antennas to `N ≥ M` receive
//! antennas. The equivalent channel `H'` is built from 2×2 Alamouti blocks,
//! so its Gram matrix and that matrix's inverse are block matrices with
//! scalar diagonal blocks and Alamouti off-diagonal blocks. The recursive
//! detector in [`detect`] keeps every intermediate quantity in that
//! compressed form.
//!
//! All arithmetic on the detection path is routed through [`flops`], so
//! exact real multiplication and addition counts come out of every call.

pub mod alamouti;
pub mod block;
pub mod channel;
pub mod complexity;
pub mod dense;
pub mod detect;
pub mod error;
pub mod flops;
pub mod input;
pub mod modulation;
pub mod sim;

pub use alamouti::AlamoutiBlock;
pub use block::BlockHermitian;
pub use channel::{build_equivalent, generate_channel, transmit, ChannelMatrix, EquivalentChannel, NoiseSpec};
pub use dense::DenseComplexMatrix;
pub use detect::{DetectionResult, DetectorKind};
pub use error::{Error, Result};
pub use flops::{flop_scope, FlopCounter};
pub use modulation::{qpsk_modulate, qpsk_slice, Qpsk, Slicer};

pub use num_complex::Complex64;
