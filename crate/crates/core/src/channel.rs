//! Rayleigh block-fading power gains and dB conversions.
//!
//! Every link gain `|h|^2` is exponential with a configured mean. Trials are
//! seeded from `(master_seed, stream_id)` through a ChaCha8 stream, so a
//! trial's draws depend only on its own stream id and never on which worker
//! evaluates it or in which order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Mean power gains of every link in the relay network.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingParams {
    /// source -> destination
    pub sigma2_sd: f64,
    /// source -> relay
    pub sigma2_sr: f64,
    /// relay -> destination
    pub sigma2_rd: f64,
    /// source -> eavesdropper
    pub sigma2_se: f64,
    /// relay -> eavesdropper
    pub sigma2_re: f64,
}

/// How the relay -> eavesdropper mean gain is chosen when sweeping MER.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RelayEveGain {
    /// Track `sigma2_se` at every MER point.
    Rule(EqualToSe),
    /// Fixed value, independent of MER.
    Explicit(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EqualToSe {
    EqualToSe,
}

impl Default for RelayEveGain {
    fn default() -> Self {
        RelayEveGain::Rule(EqualToSe::EqualToSe)
    }
}

impl FadingParams {
    /// Builds parameters, rejecting negative or non-finite means. Zero means
    /// are accepted here (degenerate links); see [`FadingParams::check_runnable`].
    pub fn new(
        sigma2_sd: f64,
        sigma2_sr: f64,
        sigma2_rd: f64,
        sigma2_se: f64,
        sigma2_re: f64,
    ) -> Result<Self> {
        let p = FadingParams {
            sigma2_sd,
            sigma2_sr,
            sigma2_rd,
            sigma2_se,
            sigma2_re,
        };
        p.validate()?;
        Ok(p)
    }

    /// Every mean finite and non-negative.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.named() {
            check_variance(name, v)?;
        }
        Ok(())
    }

    /// Parameters at a given main-to-eavesdropper ratio: `sigma2_se = sigma2_sd / 10^(mer_db/10)`.
    pub fn from_mer(
        sigma2_sd: f64,
        sigma2_sr: f64,
        sigma2_rd: f64,
        mer_db: f64,
        relay_eve: RelayEveGain,
    ) -> Result<Self> {
        let sigma2_se = mer_to_sigma_se2(sigma2_sd, mer_db)?;
        let sigma2_re = match relay_eve {
            RelayEveGain::Rule(EqualToSe::EqualToSe) => sigma2_se,
            RelayEveGain::Explicit(v) => v,
        };
        FadingParams::new(sigma2_sd, sigma2_sr, sigma2_rd, sigma2_se, sigma2_re)
    }

    /// Linear main-to-eavesdropper ratio `sigma2_sd / sigma2_se`.
    pub fn mer(&self) -> f64 {
        self.sigma2_sd / self.sigma2_se
    }

    /// All means strictly positive.
    pub fn check_runnable(&self) -> Result<()> {
        for (name, v) in self.named() {
            check_variance(name, v)?;
            if v == 0.0 {
                return Err(Error::invalid(format!("{name} must be > 0, got 0")));
            }
        }
        Ok(())
    }

    fn named(&self) -> [(&'static str, f64); 5] {
        [
            ("sigma2_sd", self.sigma2_sd),
            ("sigma2_sr", self.sigma2_sr),
            ("sigma2_rd", self.sigma2_rd),
            ("sigma2_se", self.sigma2_se),
            ("sigma2_re", self.sigma2_re),
        ]
    }
}

fn check_variance(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v < 0.0 {
        return Err(Error::invalid(format!(
            "{name} must be finite and >= 0, got {v}"
        )));
    }
    Ok(())
}

/// Identifies one independent random stream: one per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        SeedSpec {
            master_seed,
            stream_id,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// `10^(x_db/10)`.
#[inline]
pub fn db_to_linear(x_db: f64) -> f64 {
    10f64.powf(x_db / 10.0)
}

/// Eavesdropper mean gain for a target MER.
pub fn mer_to_sigma_se2(sigma2_sd: f64, mer_db: f64) -> Result<f64> {
    if !(sigma2_sd.is_finite() && sigma2_sd > 0.0) {
        return Err(Error::invalid(format!(
            "sigma2_sd must be finite and > 0, got {sigma2_sd}"
        )));
    }
    if !mer_db.is_finite() {
        return Err(Error::invalid(format!("MER must be finite, got {mer_db}")));
    }
    Ok(sigma2_sd / db_to_linear(mer_db))
}

/// One exponential draw with the given mean by inverting the CDF.
///
/// Exactly one uniform is consumed per call, including when `variance` is 0,
/// so the layout of a trial's stream never depends on the parameters.
pub fn sample_rayleigh_power<R: Rng + ?Sized>(variance: f64, rng: &mut R) -> Result<f64> {
    check_variance("variance", variance)?;
    Ok(exp_draw(variance, rng))
}

#[inline]
pub(crate) fn exp_draw<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    if mean == 0.0 {
        return 0.0;
    }
    // u in [0, 1) so ln(1 - u) is finite and <= 0
    -mean * (-u).ln_1p()
}

/// Gains of one relay: source -> relay, relay -> destination, relay -> eavesdropper.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RelayGains {
    pub g_si: f64,
    pub g_id: f64,
    pub g_ie: f64,
}

/// One fading realization of the relay network.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrialGains {
    pub g_sd: f64,
    pub g_se: f64,
    pub relays: Vec<RelayGains>,
}

impl TrialGains {
    /// Overwrites `self` with fresh draws, reusing the relay buffer.
    ///
    /// Draw order is fixed: `g_sd`, `g_se`, then `(g_si, g_id, g_ie)` per relay.
    pub fn resample<R: Rng + ?Sized>(&mut self, params: &FadingParams, m: usize, rng: &mut R) {
        self.g_sd = exp_draw(params.sigma2_sd, rng);
        self.g_se = exp_draw(params.sigma2_se, rng);
        self.relays.clear();
        self.relays.extend((0..m).map(|_| RelayGains {
            g_si: exp_draw(params.sigma2_sr, rng),
            g_id: exp_draw(params.sigma2_rd, rng),
            g_ie: exp_draw(params.sigma2_re, rng),
        }));
    }
}

/// Draws `2 + 3m` independent gains for one trial.
pub fn draw_trial_gains(params: &FadingParams, m: usize, seed: SeedSpec) -> Result<TrialGains> {
    params.validate()?;
    let mut gains = TrialGains::default();
    gains.resample(params, m, &mut seed.rng());
    Ok(gains)
}

/// Per-antenna main and wiretap gains for transmit antenna selection.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AntennaGains {
    pub main: Vec<f64>,
    pub eve: Vec<f64>,
}

impl AntennaGains {
    /// Antenna `k` draws its main gain then its wiretap gain.
    pub fn resample<R: Rng + ?Sized>(&mut self, params: &FadingParams, m: usize, rng: &mut R) {
        self.main.clear();
        self.eve.clear();
        for _ in 0..m {
            self.main.push(exp_draw(params.sigma2_sd, rng));
            self.eve.push(exp_draw(params.sigma2_se, rng));
        }
    }
}

/// Downlink gains to `m` users plus the single source -> eavesdropper gain.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MultiuserGains {
    pub users: Vec<f64>,
    pub g_se: f64,
}

impl MultiuserGains {
    pub fn resample<R: Rng + ?Sized>(&mut self, params: &FadingParams, m: usize, rng: &mut R) {
        self.g_se = exp_draw(params.sigma2_se, rng);
        self.users.clear();
        self.users
            .extend((0..m).map(|_| exp_draw(params.sigma2_sd, rng)));
    }
}
