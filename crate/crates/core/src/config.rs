//! JSON scenario description for a MER sweep.
//!
//! Every field is optional; missing fields take the values of the reference
//! relay case study (12 dB transmit SNR, `sigma2_sd = 0.5`,
//! `sigma2_sr = sigma2_rd = 2`, M in {2, 4, 8}).

use serde::{Deserialize, Serialize};

use crate::channel::RelayEveGain;
use crate::error::ConfigError;
use crate::estimator::SchemeId;
use crate::schemes::EveMode;

/// Fewest trials per point for which statistical outputs are produced.
pub const MIN_TRIALS: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub gamma_s_db: f64,
    pub sigma2_sd: f64,
    pub sigma2_sr: f64,
    pub sigma2_rd: f64,
    pub mer_grid_db: Vec<f64>,
    pub relay_counts: Vec<usize>,
    pub schemes: Vec<SchemeId>,
    pub n_trials: u64,
    pub master_seed: u64,
    pub prelog_half: bool,
    pub eve_mode: EveMode,
    pub sigma2_re_rule: RelayEveGain,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            gamma_s_db: 12.0,
            sigma2_sd: 0.5,
            sigma2_sr: 2.0,
            sigma2_rd: 2.0,
            mer_grid_db: (0..=10).map(|i| 3.0 * i as f64).collect(),
            relay_counts: vec![2, 4, 8],
            schemes: vec![SchemeId::Direct, SchemeId::RelaySelection],
            n_trials: 1_000_000,
            master_seed: 1,
            prelog_half: false,
            eve_mode: EveMode::Phase2Only,
            sigma2_re_rule: RelayEveGain::default(),
        }
    }
}

impl ScenarioConfig {
    /// Parses and validates a JSON document. Errors carry the line of the
    /// offending token or field.
    pub fn from_json_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = serde_json::from_str(text).map_err(|e| ConfigError {
            line: Some(e.line()).filter(|&l| l > 0),
            column: Some(e.column()).filter(|&c| c > 0),
            field: None,
            message: e.to_string(),
        })?;
        cfg.validate().map_err(|mut e| {
            if let Some(field) = &e.field {
                e.line = field_line(text, field);
            }
            e
        })?;
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |field: &str, message: String| {
            Err(ConfigError {
                line: None,
                column: None,
                field: Some(field.to_string()),
                message,
            })
        };
        if !self.gamma_s_db.is_finite() {
            return fail(
                "gamma_s_db",
                format!("must be finite, got {}", self.gamma_s_db),
            );
        }
        for (name, v) in [
            ("sigma2_sd", self.sigma2_sd),
            ("sigma2_sr", self.sigma2_sr),
            ("sigma2_rd", self.sigma2_rd),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return fail(name, format!("must be finite and > 0, got {v}"));
            }
        }
        if let RelayEveGain::Explicit(v) = self.sigma2_re_rule {
            if !(v.is_finite() && v > 0.0) {
                return fail("sigma2_re_rule", format!("must be finite and > 0, got {v}"));
            }
        }
        if self.mer_grid_db.is_empty() {
            return fail("mer_grid_db", "must not be empty".into());
        }
        if let Some(v) = self.mer_grid_db.iter().find(|v| !v.is_finite()) {
            return fail("mer_grid_db", format!("values must be finite, got {v}"));
        }
        if let Some(w) = self.mer_grid_db.windows(2).find(|w| w[0] >= w[1]) {
            return fail(
                "mer_grid_db",
                format!("must be strictly increasing, found {} then {}", w[0], w[1]),
            );
        }
        if self.schemes.is_empty() {
            return fail("schemes", "must list at least one scheme".into());
        }
        if let Some(dup) = first_duplicate(&self.schemes) {
            return fail("schemes", format!("scheme `{dup}` listed twice"));
        }
        if self.schemes.iter().any(|s| s.uses_nodes()) {
            if self.relay_counts.is_empty() {
                return fail(
                    "relay_counts",
                    "must not be empty for node-based schemes".into(),
                );
            }
            if self.relay_counts.contains(&0) {
                return fail("relay_counts", "every count must be >= 1".into());
            }
            if let Some(dup) = first_duplicate(&self.relay_counts) {
                return fail("relay_counts", format!("count {dup} listed twice"));
            }
        }
        if self.n_trials == 0 {
            return fail("n_trials", "must be >= 1".into());
        }
        Ok(())
    }
}

fn first_duplicate<T: PartialEq + Copy>(xs: &[T]) -> Option<T> {
    xs.iter()
        .enumerate()
        .find(|(i, x)| xs[..*i].contains(x))
        .map(|(_, x)| *x)
}

/// 1-based line where `"field"` first appears as a key.
fn field_line(text: &str, field: &str) -> Option<usize> {
    let key = format!("\"{field}\"");
    text.lines().position(|l| l.contains(&key)).map(|i| i + 1)
}
