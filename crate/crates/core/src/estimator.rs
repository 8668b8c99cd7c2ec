//! Monte Carlo estimation of ergodic secrecy capacity and intercept
//! probability.
//!
//! Trials are split into fixed-size chunks. Each chunk owns a contiguous
//! range of stream ids, accumulates its own partial statistics, and the
//! partials are merged in chunk order on the calling thread. Chunking does not
//! depend on the number of worker threads, so results are bitwise identical
//! for any rayon pool size.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{AntennaGains, FadingParams, MultiuserGains, TrialGains};
use crate::error::{Error, Result};
use crate::link::{Prelog, Snr};
use crate::schemes::{
    direct_transmission_trial, multiuser_trial, relay_transmission_trial,
    transmit_antenna_selection_trial, CsiMode, EveMode, SchedulePolicy, TrialOutcome,
};

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.96;

/// Trials per work item.
const CHUNK: u64 = 4096;

/// Monte Carlo statistic with a normal-approximation 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub ci95_low: f64,
    pub ci95_high: f64,
    pub n_trials: u64,
}

impl Estimate {
    pub fn new(mean: f64, std_err: f64, n_trials: u64) -> Self {
        Estimate {
            mean,
            std_err,
            ci95_low: mean - Z95 * std_err,
            ci95_high: mean + Z95 * std_err,
            n_trials,
        }
    }

    /// Binomial proportion `events / n` with standard error `sqrt(p(1-p)/n)`.
    pub fn proportion(events: u64, n: u64) -> Self {
        let p = events as f64 / n as f64;
        Estimate::new(p, (p * (1.0 - p) / n as f64).sqrt(), n)
    }

    /// Number of events behind a proportion estimate.
    pub fn events(&self) -> u64 {
        (self.mean * self.n_trials as f64).round() as u64
    }

    /// Intervals do not intersect.
    pub fn separated_from(&self, other: &Estimate) -> bool {
        self.ci95_low > other.ci95_high || other.ci95_low > self.ci95_high
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    Direct,
    RelaySelection,
    TasMain,
    TasGlobal,
    MultiuserMax,
    MultiuserRr,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Direct,
        SchemeId::RelaySelection,
        SchemeId::TasMain,
        SchemeId::TasGlobal,
        SchemeId::MultiuserMax,
        SchemeId::MultiuserRr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::Direct => "direct",
            SchemeId::RelaySelection => "relay_selection",
            SchemeId::TasMain => "tas_main",
            SchemeId::TasGlobal => "tas_global",
            SchemeId::MultiuserMax => "multiuser_max",
            SchemeId::MultiuserRr => "multiuser_rr",
        }
    }

    /// Whether the scheme uses `M` relays, antennas or users.
    pub fn uses_nodes(self) -> bool {
        self != SchemeId::Direct
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown scheme `{s}`")))
    }
}

/// A scheme together with its node count and mode switches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SchemeSpec {
    pub scheme: SchemeId,
    /// Relays, transmit antennas or users. Ignored by `direct`.
    pub m: usize,
    pub prelog: Prelog,
    pub eve_mode: EveMode,
}

impl SchemeSpec {
    pub fn direct() -> Self {
        SchemeSpec::new(SchemeId::Direct, 0)
    }

    /// Full prelog, phase-2-only eavesdropper.
    pub fn new(scheme: SchemeId, m: usize) -> Self {
        SchemeSpec {
            scheme,
            m,
            prelog: Prelog::Full,
            eve_mode: EveMode::Phase2Only,
        }
    }

    pub fn with_prelog(mut self, prelog: Prelog) -> Self {
        self.prelog = prelog;
        self
    }

    pub fn with_eve_mode(mut self, eve_mode: EveMode) -> Self {
        self.eve_mode = eve_mode;
        self
    }

    pub fn csi_mode(&self) -> Option<CsiMode> {
        match self.scheme {
            SchemeId::TasMain => Some(CsiMode::MainOnly),
            SchemeId::TasGlobal => Some(CsiMode::Global),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.scheme.uses_nodes() && self.m == 0 {
            return Err(match self.scheme {
                SchemeId::RelaySelection => Error::NoRelay,
                s => Error::invalid(format!("scheme {s} needs M >= 1")),
            });
        }
        Ok(())
    }
}

/// Evaluates trials of one scheme, reusing gain buffers between trials.
#[derive(Debug, Clone)]
pub struct TrialKernel {
    spec: SchemeSpec,
    params: FadingParams,
    gamma_s: Snr,
    key: <ChaCha8Rng as SeedableRng>::Seed,
    relay: TrialGains,
    antennas: AntennaGains,
    users: MultiuserGains,
}

impl TrialKernel {
    pub fn new(spec: SchemeSpec, params: FadingParams, gamma_s: Snr, seed: u64) -> Result<Self> {
        spec.validate()?;
        params.check_runnable()?;
        Ok(TrialKernel {
            spec,
            params,
            gamma_s,
            key: ChaCha8Rng::seed_from_u64(seed).get_seed(),
            relay: TrialGains::default(),
            antennas: AntennaGains::default(),
            users: MultiuserGains::default(),
        })
    }

    /// Outcome of trial `index`; a pure function of `(seed, index)`.
    pub fn trial(&mut self, index: u64) -> TrialOutcome {
        // same stream as SeedSpec::new(seed, index).rng(), without re-deriving the key
        let mut rng = ChaCha8Rng::from_seed(self.key);
        rng.set_stream(index);
        let (spec, g) = (self.spec, self.gamma_s);
        // spec was validated in new(), so the scheme functions cannot fail
        let out = match spec.scheme {
            SchemeId::Direct => {
                self.relay.resample(&self.params, 0, &mut rng);
                Ok(direct_transmission_trial(g, &self.relay))
            }
            SchemeId::RelaySelection => {
                self.relay.resample(&self.params, spec.m, &mut rng);
                relay_transmission_trial(g, &self.relay, spec.prelog, spec.eve_mode)
            }
            SchemeId::TasMain | SchemeId::TasGlobal => {
                self.antennas.resample(&self.params, spec.m, &mut rng);
                transmit_antenna_selection_trial(
                    g,
                    &self.antennas.main,
                    &self.antennas.eve,
                    spec.csi_mode().expect("TAS scheme"),
                )
            }
            SchemeId::MultiuserMax | SchemeId::MultiuserRr => {
                self.users.resample(&self.params, spec.m, &mut rng);
                let policy = if spec.scheme == SchemeId::MultiuserMax {
                    SchedulePolicy::MaxCapacity
                } else {
                    SchedulePolicy::RoundRobin
                };
                multiuser_trial(g, &self.users, policy, index)
            }
        };
        out.expect("validated scheme")
    }
}

/// Streaming statistics over a run of trials.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
    intercepts: u64,
}

impl Accumulator {
    fn push(&mut self, out: &TrialOutcome) {
        let x = out.c_secrecy.positive_part().value();
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
        self.intercepts += out.intercepted as u64;
    }

    fn merge(self, other: Accumulator) -> Accumulator {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let w = other.n as f64 / n as f64;
        Accumulator {
            n,
            mean: self.mean + delta * w,
            m2: self.m2 + other.m2 + delta * delta * self.n as f64 * w,
            intercepts: self.intercepts + other.intercepts,
        }
    }
}

/// Both metrics of one sweep point, from the same trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointEstimate {
    pub ergodic_secrecy_capacity: Estimate,
    pub intercept_probability: Estimate,
}

/// Runs `n` trials on the current rayon pool and estimates both metrics.
pub fn estimate_point(
    spec: SchemeSpec,
    params: &FadingParams,
    gamma_s: Snr,
    n: u64,
    seed: u64,
) -> Result<PointEstimate> {
    if n == 0 {
        return Err(Error::invalid("trial count must be >= 1"));
    }
    let kernel = TrialKernel::new(spec, *params, gamma_s, seed)?;
    let chunks = n.div_ceil(CHUNK);
    let partials: Vec<Accumulator> = (0..chunks)
        .into_par_iter()
        .map_with(kernel, |kernel, c| {
            let mut acc = Accumulator::default();
            for t in c * CHUNK..((c + 1) * CHUNK).min(n) {
                acc.push(&kernel.trial(t));
            }
            acc
        })
        .collect();
    let total = partials
        .into_iter()
        .fold(Accumulator::default(), Accumulator::merge);

    let variance = if total.n > 1 {
        total.m2 / (total.n - 1) as f64
    } else {
        0.0
    };
    Ok(PointEstimate {
        ergodic_secrecy_capacity: Estimate::new(
            total.mean,
            (variance / total.n as f64).sqrt(),
            total.n,
        ),
        intercept_probability: Estimate::proportion(total.intercepts, total.n),
    })
}

/// Estimate of `E[max(C_s, 0)]`.
pub fn ergodic_secrecy_capacity(
    spec: SchemeSpec,
    params: &FadingParams,
    gamma_s: Snr,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    Ok(estimate_point(spec, params, gamma_s, n, seed)?.ergodic_secrecy_capacity)
}

/// Estimate of `Pr(C_s < 0)`.
pub fn intercept_probability(
    spec: SchemeSpec,
    params: &FadingParams,
    gamma_s: Snr,
    n: u64,
    seed: u64,
) -> Result<Estimate> {
    Ok(estimate_point(spec, params, gamma_s, n, seed)?.intercept_probability)
}

/// Exact intercept probability of direct transmission over Rayleigh fading,
/// `sigma2_se / (sigma2_sd + sigma2_se)`, independent of transmit power.
pub fn direct_intercept_closed_form(sigma2_sd: f64, sigma2_se: f64) -> Result<f64> {
    for (name, v) in [("sigma2_sd", sigma2_sd), ("sigma2_se", sigma2_se)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(format!(
                "{name} must be finite and > 0, got {v}"
            )));
        }
    }
    Ok(sigma2_se / (sigma2_sd + sigma2_se))
}

/// Writes one CSV line per trial for debugging a single point.
pub fn dump_trials<W: Write>(
    spec: SchemeSpec,
    params: &FadingParams,
    gamma_s: Snr,
    n: u64,
    seed: u64,
    out: W,
) -> Result<()> {
    let mut kernel = TrialKernel::new(spec, *params, gamma_s, seed)?;
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Csv {
        path: "<trial dump>".into(),
        source: e,
    };
    w.write_record([
        "trial",
        "selected_index",
        "c_main",
        "c_wiretap",
        "c_secrecy",
        "intercepted",
    ])
    .map_err(io)?;
    for t in 0..n {
        let o = kernel.trial(t);
        w.write_record([
            t.to_string(),
            o.selected_index.map(|i| i.to_string()).unwrap_or_default(),
            o.c_main.value().to_string(),
            o.c_wiretap.value().to_string(),
            o.c_secrecy.value().to_string(),
            o.intercepted.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<trial dump>".into(),
        source: e,
    })
}

/// Runs `f` on a dedicated pool with `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {threads} worker threads: {e}")))?;
    Ok(pool.install(f))
}
