//! Shared fixtures for the criterion benchmarks.

use phylsec_core::{FadingParams, Snr};

/// Node counts exercised by the benchmarks.
pub const NODE_COUNTS: [usize; 3] = [2, 4, 8];

/// Default scenario channel at 6 dB main-to-eavesdropper ratio.
pub fn reference_params() -> FadingParams {
    FadingParams::from_mer(0.5, 2.0, 2.0, 6.0, Default::default()).expect("valid fixture")
}

/// 12 dB transmit SNR.
pub fn reference_snr() -> Snr {
    Snr::from_db(12.0).expect("valid fixture")
}
