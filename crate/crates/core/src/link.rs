//! Capacity formulas for single links, AF two-hop links and the relay
//! selection metric.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::db_to_linear;
use crate::error::{Error, Result};

/// Linear signal-to-noise ratio, finite and non-negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Snr(f64);

impl Snr {
    pub const ZERO: Snr = Snr(0.0);

    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::invalid(format!(
                "SNR must be finite and >= 0, got {value}"
            )));
        }
        Ok(Snr(value))
    }

    pub fn from_db(db: f64) -> Result<Self> {
        if !db.is_finite() {
            return Err(Error::invalid(format!("SNR must be finite, got {db} dB")));
        }
        Snr::new(db_to_linear(db))
    }

    /// Scales by a non-negative power gain. Both factors are non-negative so
    /// the result stays a valid SNR unless it overflows.
    #[inline]
    pub fn scaled(self, gain: f64) -> Snr {
        debug_assert!(gain >= 0.0);
        Snr(self.0 * gain)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Snr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Spectral efficiency in bits/s/Hz. Secrecy capacities may be negative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Capacity(pub f64);

impl Capacity {
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `max(C, 0)`.
    #[inline]
    pub fn positive_part(self) -> Capacity {
        Capacity(self.0.max(0.0))
    }
}

/// Pre-log factor in front of `log2(1 + snr)`. Half-duplex relaying spends
/// two slots per symbol and halves it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Prelog {
    #[default]
    Full,
    Half,
}

impl Prelog {
    pub fn from_half(half: bool) -> Self {
        if half {
            Prelog::Half
        } else {
            Prelog::Full
        }
    }

    #[inline]
    pub fn factor(self) -> f64 {
        match self {
            Prelog::Full => 1.0,
            Prelog::Half => 0.5,
        }
    }
}

/// `prelog * log2(1 + snr)`.
#[inline]
pub fn channel_capacity(snr: Snr, prelog: Prelog) -> Capacity {
    Capacity(prelog.factor() * snr.0.ln_1p() / std::f64::consts::LN_2)
}

/// `c_main - c_wiretap`, sign preserved.
#[inline]
pub fn secrecy_capacity(c_main: Capacity, c_wiretap: Capacity) -> Capacity {
    Capacity(c_main.0 - c_wiretap.0)
}

/// Exact end-to-end SNR of a two-hop amplify-and-forward link with a noisy
/// relay: `g1 g2 / (g1 + g2 + 1)`.
#[inline]
pub fn af_end_to_end_snr(gamma1: Snr, gamma2: Snr) -> Snr {
    let (a, b) = (gamma1.0, gamma2.0);
    Snr(a * b / (a + b + 1.0))
}

/// Relay ranking metric `g_si g_id / (g_si + g_id)`; 0 for a dead relay.
#[inline]
pub fn relay_selection_metric(g_si: f64, g_id: f64) -> f64 {
    let s = g_si + g_id;
    if s > 0.0 {
        g_si * g_id / s
    } else {
        0.0
    }
}
