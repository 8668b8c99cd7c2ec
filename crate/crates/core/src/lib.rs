//! Physical-layer secrecy over Rayleigh fading.
//!
//! Monte Carlo estimation of ergodic secrecy capacity and intercept
//! probability for direct transmission, best-relay amplify-and-forward
//! relaying, transmit antenna selection and multiuser scheduling, plus the
//! closed-form intercept probability of direct transmission used as an
//! oracle.
//!
//! ```
//! use phylsec_core::{
//!     direct_intercept_closed_form, intercept_probability, FadingParams, SchemeSpec, Snr,
//! };
//!
//! let params = FadingParams::from_mer(0.5, 2.0, 2.0, 10.0, Default::default()).unwrap();
//! let gamma_s = Snr::from_db(12.0).unwrap();
//! let est = intercept_probability(SchemeSpec::direct(), &params, gamma_s, 100_000, 7).unwrap();
//! let exact = direct_intercept_closed_form(params.sigma2_sd, params.sigma2_se).unwrap();
//! assert!((est.mean - exact).abs() < 4.0 * est.std_err);
//! ```

pub mod channel;
pub mod config;
pub mod error;
pub mod estimator;
pub mod link;
pub mod output;
pub mod schemes;
pub mod sweep;

pub use channel::{
    db_to_linear, draw_trial_gains, mer_to_sigma_se2, sample_rayleigh_power, AntennaGains,
    FadingParams, MultiuserGains, RelayEveGain, RelayGains, SeedSpec, TrialGains,
};
pub use config::{ScenarioConfig, MIN_TRIALS};
pub use error::{ConfigError, Error, Result};
pub use estimator::{
    direct_intercept_closed_form, dump_trials, ergodic_secrecy_capacity, estimate_point,
    intercept_probability, with_threads, Estimate, PointEstimate, SchemeId, SchemeSpec,
    TrialKernel,
};
pub use link::{
    af_end_to_end_snr, channel_capacity, relay_selection_metric, secrecy_capacity, Capacity,
    Prelog, Snr,
};
pub use output::{emit_csv, emit_wide_tables, parse_csv, read_csv, write_csv, CSV_HEADER};
pub use schemes::{
    best_relay_selection, direct_transmission_trial, multiuser_schedule, multiuser_trial,
    relay_transmission_trial, transmit_antenna_selection_trial, CsiMode, EveMode, SchedulePolicy,
    TrialOutcome,
};
pub use sweep::{estimate_diversity_slope, run_sweep, Metric, SweepResult, SweepRow};
