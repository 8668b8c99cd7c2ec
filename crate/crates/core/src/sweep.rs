//! MER sweeps over schemes and node counts, and log-log slope estimation.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::channel::FadingParams;
use crate::config::{ScenarioConfig, MIN_TRIALS};
use crate::error::{Error, Result};
use crate::estimator::{estimate_point, Estimate, SchemeId, SchemeSpec};
use crate::link::{Prelog, Snr};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    ErgodicSecrecyCapacity,
    InterceptProbability,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::ErgodicSecrecyCapacity, Metric::InterceptProbability];

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::ErgodicSecrecyCapacity => "ergodic_secrecy_capacity",
            Metric::InterceptProbability => "intercept_probability",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub scheme: SchemeId,
    /// Node count; 0 for direct transmission.
    pub m: usize,
    pub mer_db: f64,
    pub metric: Metric,
    pub estimate: Estimate,
}

impl SweepRow {
    fn sort_key_cmp(&self, other: &SweepRow) -> Ordering {
        self.metric
            .as_str()
            .cmp(other.metric.as_str())
            .then_with(|| self.scheme.as_str().cmp(other.scheme.as_str()))
            .then_with(|| self.m.cmp(&other.m))
            .then_with(|| self.mer_db.total_cmp(&other.mer_db))
    }
}

/// Rows kept sorted by `(metric, scheme, m, mer_db)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SweepResult {
    rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Sorts the rows and rejects duplicate `(scheme, m, mer_db, metric)` keys.
    pub fn from_rows(mut rows: Vec<SweepRow>) -> Result<Self> {
        rows.sort_by(SweepRow::sort_key_cmp);
        if let Some(w) = rows
            .windows(2)
            .find(|w| w[0].sort_key_cmp(&w[1]) == Ordering::Equal)
        {
            return Err(Error::invalid(format!(
                "duplicate row for {} M={} MER={} dB {}",
                w[0].scheme, w[0].m, w[0].mer_db, w[0].metric
            )));
        }
        Ok(SweepResult { rows })
    }

    pub fn rows(&self) -> &[SweepRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Distinct `(scheme, m)` curves, in row order.
    pub fn curves(&self) -> Vec<(SchemeId, usize)> {
        let mut out: Vec<(SchemeId, usize)> = Vec::new();
        for r in &self.rows {
            if !out.contains(&(r.scheme, r.m)) {
                out.push((r.scheme, r.m));
            }
        }
        out
    }

    /// `(mer_db, estimate)` points of one curve, by increasing MER.
    pub fn curve(&self, scheme: SchemeId, m: usize, metric: Metric) -> Vec<(f64, Estimate)> {
        self.rows
            .iter()
            .filter(|r| r.scheme == scheme && r.m == m && r.metric == metric)
            .map(|r| (r.mer_db, r.estimate))
            .collect()
    }

    /// Estimate at one point, if present.
    pub fn get(&self, scheme: SchemeId, m: usize, mer_db: f64, metric: Metric) -> Option<Estimate> {
        self.rows
            .iter()
            .find(|r| r.scheme == scheme && r.m == m && r.metric == metric && r.mer_db == mer_db)
            .map(|r| r.estimate)
    }

    /// Intercept-probability slope of every curve over its top `window` MER points.
    pub fn intercept_slopes(&self, window: usize) -> Vec<(SchemeId, usize, Result<f64>)> {
        self.curves()
            .into_iter()
            .map(|(s, m)| {
                let pts: Vec<(f64, f64)> = self
                    .curve(s, m, Metric::InterceptProbability)
                    .into_iter()
                    .map(|(mer, e)| (mer, e.mean))
                    .collect();
                (s, m, estimate_diversity_slope(&pts, window))
            })
            .collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one sweep point. Depends only on the master seed and the point's
/// own coordinates, so adding schemes or grid points leaves other rows unchanged.
pub fn point_seed(master_seed: u64, scheme: SchemeId, m: usize, mer_db: f64) -> u64 {
    let mut h = splitmix64(master_seed);
    h = splitmix64(h ^ scheme as u64);
    h = splitmix64(h ^ m as u64);
    splitmix64(h ^ mer_db.to_bits())
}

/// Runs every scheme x M x MER point with `n_trials` each, on the current
/// rayon pool. Nothing is returned unless every point succeeds.
pub fn run_sweep(config: &ScenarioConfig) -> Result<SweepResult> {
    config.validate()?;
    if config.n_trials < MIN_TRIALS {
        return Err(Error::InsufficientResolution(format!(
            "n_trials = {} is below the minimum of {MIN_TRIALS}",
            config.n_trials
        )));
    }
    let gamma_s = Snr::from_db(config.gamma_s_db)?;
    let mut rows = Vec::new();
    for &scheme in &config.schemes {
        let ms: &[usize] = if scheme.uses_nodes() {
            &config.relay_counts
        } else {
            &[0]
        };
        for &m in ms {
            let spec = SchemeSpec::new(scheme, m)
                .with_prelog(Prelog::from_half(config.prelog_half))
                .with_eve_mode(config.eve_mode);
            for &mer_db in &config.mer_grid_db {
                let params = FadingParams::from_mer(
                    config.sigma2_sd,
                    config.sigma2_sr,
                    config.sigma2_rd,
                    mer_db,
                    config.sigma2_re_rule,
                )?;
                let seed = point_seed(config.master_seed, scheme, m, mer_db);
                let est = estimate_point(spec, &params, gamma_s, config.n_trials, seed)?;
                for (metric, estimate) in [
                    (Metric::ErgodicSecrecyCapacity, est.ergodic_secrecy_capacity),
                    (Metric::InterceptProbability, est.intercept_probability),
                ] {
                    rows.push(SweepRow {
                        scheme,
                        m,
                        mer_db,
                        metric,
                        estimate,
                    });
                }
            }
        }
    }
    SweepResult::from_rows(rows)
}

/// Least-squares slope of `log10(P)` against `log10(MER)` over the `window`
/// highest-MER points. A diversity order `d` shows up as a slope near `-d`.
pub fn estimate_diversity_slope(points: &[(f64, f64)], window: usize) -> Result<f64> {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    pts.truncate(window);
    if pts.len() < 2 {
        return Err(Error::InsufficientResolution(format!(
            "slope needs at least 2 points, have {}",
            pts.len()
        )));
    }
    if let Some(&(mer, p)) = pts.iter().find(|(_, p)| *p <= 0.0 || p.is_nan()) {
        return Err(Error::InsufficientResolution(format!(
            "intercept probability {p} at MER {mer} dB; raise n_trials"
        )));
    }
    let xy: Vec<(f64, f64)> = pts
        .iter()
        .map(|&(mer, p)| (mer / 10.0, p.log10()))
        .collect();
    let n = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / n;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::invalid("slope window has no MER spread"));
    }
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Ok(sxy / sxx)
}
