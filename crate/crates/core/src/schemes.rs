//! Per-trial evaluation of each transmission scheme.
//!
//! Every function maps one fading realization to a [`TrialOutcome`]. Ties
//! in any selection are broken towards the lowest index.

use serde::{Deserialize, Serialize};

pub use crate::channel::{AntennaGains, MultiuserGains, RelayGains, TrialGains};
use crate::error::{Error, Result};
use crate::link::{
    af_end_to_end_snr, channel_capacity, relay_selection_metric, secrecy_capacity, Capacity,
    Prelog, Snr,
};

/// Capacities of one realization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialOutcome {
    pub c_main: Capacity,
    pub c_wiretap: Capacity,
    pub c_secrecy: Capacity,
    /// Selected relay, antenna or user; `None` for direct transmission.
    pub selected_index: Option<usize>,
    /// Secrecy capacity strictly below zero.
    pub intercepted: bool,
}

impl TrialOutcome {
    pub fn new(c_main: Capacity, c_wiretap: Capacity, selected_index: Option<usize>) -> Self {
        let c_secrecy = secrecy_capacity(c_main, c_wiretap);
        TrialOutcome {
            c_main,
            c_wiretap,
            c_secrecy,
            selected_index,
            intercepted: c_secrecy.value() < 0.0,
        }
    }
}

/// What the eavesdropper listens to during relayed transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EveMode {
    /// Only the relay's retransmission.
    #[default]
    Phase2Only,
    /// Source broadcast and relay retransmission, maximal-ratio combined.
    CombinePhases,
}

/// Channel knowledge available to the antenna selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsiMode {
    MainOnly,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulePolicy {
    MaxCapacity,
    RoundRobin,
}

/// Lowest index of the maximum; `None` for an empty iterator.
fn argmax<I: IntoIterator<Item = f64>>(values: I) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((i, v)),
        }
    }
    best.map(|(i, _)| i)
}

/// Source transmits at full power straight to the destination.
pub fn direct_transmission_trial(gamma_s: Snr, gains: &TrialGains) -> TrialOutcome {
    TrialOutcome::new(
        channel_capacity(gamma_s.scaled(gains.g_sd), Prelog::Full),
        channel_capacity(gamma_s.scaled(gains.g_se), Prelog::Full),
        None,
    )
}

/// Relay maximizing `g_si g_id / (g_si + g_id)`. Wiretap gains are never read.
pub fn best_relay_selection(gains: &TrialGains) -> Result<usize> {
    argmax(
        gains
            .relays
            .iter()
            .map(|r| relay_selection_metric(r.g_si, r.g_id)),
    )
    .ok_or(Error::NoRelay)
}

/// Best-relay AF transmission with the power budget split equally between
/// source and relay.
pub fn relay_transmission_trial(
    gamma_s: Snr,
    gains: &TrialGains,
    prelog: Prelog,
    eve_mode: EveMode,
) -> Result<TrialOutcome> {
    let i = best_relay_selection(gains)?;
    let relay = gains.relays[i];
    let half = Snr::new(gamma_s.value() / 2.0)?;

    let hop1 = half.scaled(relay.g_si);
    let hop2 = half.scaled(relay.g_id);
    let eve_hop = half.scaled(relay.g_ie);

    let main = af_end_to_end_snr(hop1, hop2);
    let mut eve = af_end_to_end_snr(hop1, eve_hop);
    if eve_mode == EveMode::CombinePhases {
        eve = Snr::new(eve.value() + half.scaled(gains.g_se).value())?;
    }
    Ok(TrialOutcome::new(
        channel_capacity(main, prelog),
        channel_capacity(eve, prelog),
        Some(i),
    ))
}

fn check_antennas(main_gains: &[f64], eve_gains: &[f64]) -> Result<()> {
    if main_gains.is_empty() {
        return Err(Error::invalid(
            "antenna selection needs at least one antenna",
        ));
    }
    if main_gains.len() != eve_gains.len() {
        return Err(Error::invalid(format!(
            "antenna gain lists differ in length: {} main vs {} wiretap",
            main_gains.len(),
            eve_gains.len()
        )));
    }
    Ok(())
}

/// Single transmit antenna chosen per realization; receivers have one antenna.
pub fn transmit_antenna_selection_trial(
    gamma_s: Snr,
    main_gains: &[f64],
    eve_gains: &[f64],
    csi: CsiMode,
) -> Result<TrialOutcome> {
    check_antennas(main_gains, eve_gains)?;
    let cap = |g: f64| channel_capacity(gamma_s.scaled(g), Prelog::Full);
    let k = match csi {
        CsiMode::MainOnly => argmax(main_gains.iter().copied()),
        CsiMode::Global => argmax(
            main_gains
                .iter()
                .zip(eve_gains)
                .map(|(&m, &e)| secrecy_capacity(cap(m), cap(e)).value()),
        ),
    }
    .expect("non-empty antenna list");
    Ok(TrialOutcome::new(
        cap(main_gains[k]),
        cap(eve_gains[k]),
        Some(k),
    ))
}

/// User served in this slot.
pub fn multiuser_schedule(user_gains: &[f64], policy: SchedulePolicy, slot: u64) -> Result<usize> {
    if user_gains.is_empty() {
        return Err(Error::invalid("scheduling needs at least one user"));
    }
    Ok(match policy {
        // capacity is increasing in gain, so the gain argmax is the capacity argmax
        SchedulePolicy::MaxCapacity => argmax(user_gains.iter().copied()).expect("non-empty"),
        SchedulePolicy::RoundRobin => (slot % user_gains.len() as u64) as usize,
    })
}

/// Downlink to the scheduled user with a single eavesdropper overhearing the source.
pub fn multiuser_trial(
    gamma_s: Snr,
    gains: &MultiuserGains,
    policy: SchedulePolicy,
    slot: u64,
) -> Result<TrialOutcome> {
    let k = multiuser_schedule(&gains.users, policy, slot)?;
    Ok(TrialOutcome::new(
        channel_capacity(gamma_s.scaled(gains.users[k]), Prelog::Full),
        channel_capacity(gamma_s.scaled(gains.g_se), Prelog::Full),
        Some(k),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::db_to_linear;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn snr(v: f64) -> Snr {
        Snr::new(v).unwrap()
    }

    fn relays(triples: &[(f64, f64, f64)]) -> TrialGains {
        TrialGains {
            g_sd: 0.3,
            g_se: 0.2,
            relays: triples
                .iter()
                .map(|&(g_si, g_id, g_ie)| RelayGains { g_si, g_id, g_ie })
                .collect(),
        }
    }

    #[test]
    fn direct_equal_gains_not_intercepted() {
        for g in [0.0, 0.1, 1.0, 7.5] {
            let gains = TrialGains {
                g_sd: 0.4,
                g_se: 0.4,
                relays: vec![],
            };
            let out = direct_transmission_trial(snr(g), &gains);
            assert_eq!(out.c_secrecy.value(), 0.0);
            assert!(!out.intercepted);
            assert_eq!(out.selected_index, None);
        }
    }

    #[test]
    fn direct_at_12_db() {
        let gains = TrialGains {
            g_sd: 1.0,
            g_se: 0.0,
            relays: vec![],
        };
        let out = direct_transmission_trial(snr(db_to_linear(12.0)), &gains);
        assert_relative_eq!(
            out.c_main.value(),
            4.074_585_234_905_427,
            max_relative = 1e-12
        );
        assert_eq!(out.c_wiretap.value(), 0.0);
        assert_relative_eq!(
            out.c_secrecy.value(),
            4.074_585_234_905_427,
            max_relative = 1e-12
        );
    }

    #[test]
    fn direct_zero_snr() {
        let gains = TrialGains {
            g_sd: 3.0,
            g_se: 1.0,
            relays: vec![],
        };
        let out = direct_transmission_trial(Snr::ZERO, &gains);
        assert_eq!(out.c_main.value(), 0.0);
        assert_eq!(out.c_wiretap.value(), 0.0);
        assert_eq!(out.c_secrecy.value(), 0.0);
    }

    #[test]
    fn best_relay_examples() {
        let g = relays(&[(1.0, 1.0, 9.0), (4.0, 4.0, 0.0), (0.1, 10.0, 0.0)]);
        assert_eq!(best_relay_selection(&g).unwrap(), 1);
        assert_eq!(
            best_relay_selection(&relays(&[(0.2, 0.3, 0.0)])).unwrap(),
            0
        );
        assert_eq!(
            best_relay_selection(&relays(&[(2.0, 3.0, 1.0), (2.0, 3.0, 0.0)])).unwrap(),
            0
        );
        assert!(matches!(
            best_relay_selection(&relays(&[])),
            Err(Error::NoRelay)
        ));
    }

    #[test]
    fn relay_trial_hand_evaluation() {
        // values from an independent arbitrary-precision evaluation of the AF chain
        let g = relays(&[(2.0, 2.0, 0.5)]);
        let out = relay_transmission_trial(
            snr(db_to_linear(12.0)),
            &g,
            Prelog::Half,
            EveMode::Phase2Only,
        )
        .unwrap();
        assert_relative_eq!(
            out.c_main.value(),
            1.559_022_993_679_56,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            out.c_wiretap.value(),
            1.003_144_445_190_334,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            out.c_secrecy.value(),
            0.555_878_548_489_226,
            max_relative = 1e-11
        );
        assert_eq!(out.selected_index, Some(0));
        assert!(!out.intercepted);
    }

    #[test]
    fn relay_dead_network() {
        let g = TrialGains {
            g_sd: 0.0,
            g_se: 0.0,
            relays: vec![RelayGains::default(); 3],
        };
        for mode in [EveMode::Phase2Only, EveMode::CombinePhases] {
            let out = relay_transmission_trial(snr(15.0), &g, Prelog::Half, mode).unwrap();
            assert_eq!(out.c_main.value(), 0.0);
            assert!(!out.intercepted);
        }
    }

    #[test]
    fn relay_without_relays_errors() {
        let g = relays(&[]);
        assert!(matches!(
            relay_transmission_trial(snr(1.0), &g, Prelog::Full, EveMode::Phase2Only),
            Err(Error::NoRelay)
        ));
    }

    #[test]
    fn tas_examples() {
        let pick = |m: &[f64], e: &[f64], csi| {
            transmit_antenna_selection_trial(snr(10.0), m, e, csi)
                .unwrap()
                .selected_index
                .unwrap()
        };
        assert_eq!(pick(&[0.3, 1.2], &[0.0, 0.0], CsiMode::MainOnly), 1);
        assert_eq!(pick(&[1.0, 1.0], &[0.9, 0.1], CsiMode::Global), 1);
        assert_eq!(pick(&[0.5], &[0.9], CsiMode::Global), 0);
        assert_eq!(pick(&[0.5], &[0.9], CsiMode::MainOnly), 0);
        assert!(transmit_antenna_selection_trial(snr(1.0), &[], &[], CsiMode::Global).is_err());
        assert!(
            transmit_antenna_selection_trial(snr(1.0), &[1.0], &[1.0, 2.0], CsiMode::Global)
                .is_err()
        );
    }

    #[test]
    fn schedule_examples() {
        use SchedulePolicy::*;
        assert_eq!(
            multiuser_schedule(&[0.2, 0.9, 0.4], MaxCapacity, 0).unwrap(),
            1
        );
        assert_eq!(
            multiuser_schedule(&[0.2, 0.9, 0.4], RoundRobin, 5).unwrap(),
            2
        );
        assert_eq!(multiuser_schedule(&[0.5, 0.5], MaxCapacity, 7).unwrap(), 0);
        assert!(multiuser_schedule(&[], RoundRobin, 0).is_err());
    }

    #[test]
    fn multiuser_trial_uses_scheduled_user() {
        let g = MultiuserGains {
            users: vec![0.1, 2.0, 0.3],
            g_se: 0.25,
        };
        let out = multiuser_trial(snr(4.0), &g, SchedulePolicy::MaxCapacity, 0).unwrap();
        assert_eq!(out.selected_index, Some(1));
        assert_relative_eq!(out.c_main.value(), 9f64.log2(), max_relative = 1e-14);
        assert_relative_eq!(out.c_wiretap.value(), 1.0, max_relative = 1e-14);
    }

    fn gain() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.0), 0.0..20.0f64]
    }

    fn relay_gains(max_m: usize) -> impl Strategy<Value = TrialGains> {
        (
            gain(),
            gain(),
            prop::collection::vec((gain(), gain(), gain()), 1..=max_m),
        )
            .prop_map(|(g_sd, g_se, rs)| TrialGains {
                g_sd,
                g_se,
                relays: rs
                    .into_iter()
                    .map(|(g_si, g_id, g_ie)| RelayGains { g_si, g_id, g_ie })
                    .collect(),
            })
    }

    fn antennas() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
        (1usize..9).prop_flat_map(|m| {
            (
                prop::collection::vec(gain(), m),
                prop::collection::vec(gain(), m),
            )
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(2000))]

        #[test]
        fn tas_argmax_dominance((main, eve) in antennas(), g in 0.0..100.0f64) {
            let g = snr(g);
            let global = transmit_antenna_selection_trial(g, &main, &eve, CsiMode::Global).unwrap();
            let main_only = transmit_antenna_selection_trial(g, &main, &eve, CsiMode::MainOnly).unwrap();
            prop_assert!(global.c_secrecy.value() >= main_only.c_secrecy.value());
            for k in 0..main.len() {
                let fixed = transmit_antenna_selection_trial(g, &main[k..=k], &eve[k..=k], CsiMode::Global).unwrap();
                prop_assert!(main_only.c_main.value() >= fixed.c_main.value());
                prop_assert!(global.c_secrecy.value() >= fixed.c_secrecy.value());
            }
        }

        #[test]
        fn relay_choice_ignores_wiretap(
            gains in relay_gains(8),
            se in gain(),
            ies in prop::collection::vec(gain(), 8),
        ) {
            let before = best_relay_selection(&gains).unwrap();
            let mut perturbed = gains.clone();
            perturbed.g_se = se;
            for (r, ie) in perturbed.relays.iter_mut().zip(ies) {
                r.g_ie = ie;
            }
            prop_assert_eq!(before, best_relay_selection(&perturbed).unwrap());
        }

        #[test]
        fn combining_never_helps_secrecy(gains in relay_gains(8), g in 0.0..100.0f64, half in any::<bool>()) {
            let prelog = Prelog::from_half(half);
            let p2 = relay_transmission_trial(snr(g), &gains, prelog, EveMode::Phase2Only).unwrap();
            let cb = relay_transmission_trial(snr(g), &gains, prelog, EveMode::CombinePhases).unwrap();
            prop_assert!(cb.c_wiretap.value() >= p2.c_wiretap.value());
            prop_assert_eq!(cb.c_main, p2.c_main);
        }

        #[test]
        fn intercept_flag_ignores_prelog(gains in relay_gains(8), g in 0.0..100.0f64, combine in any::<bool>()) {
            let mode = if combine { EveMode::CombinePhases } else { EveMode::Phase2Only };
            let full = relay_transmission_trial(snr(g), &gains, Prelog::Full, mode).unwrap();
            let half = relay_transmission_trial(snr(g), &gains, Prelog::Half, mode).unwrap();
            prop_assert_eq!(full.intercepted, half.intercepted);
            prop_assert_eq!(full.selected_index, half.selected_index);
        }

        #[test]
        fn secrecy_is_main_minus_wiretap(
            gains in relay_gains(8),
            (main, eve) in antennas(),
            g in 0.0..100.0f64,
            slot in any::<u64>(),
        ) {
            let g = snr(g);
            let users = MultiuserGains { users: main.clone(), g_se: gains.g_se };
            let outcomes = [
                direct_transmission_trial(g, &gains),
                relay_transmission_trial(g, &gains, Prelog::Half, EveMode::Phase2Only).unwrap(),
                relay_transmission_trial(g, &gains, Prelog::Full, EveMode::CombinePhases).unwrap(),
                transmit_antenna_selection_trial(g, &main, &eve, CsiMode::MainOnly).unwrap(),
                transmit_antenna_selection_trial(g, &main, &eve, CsiMode::Global).unwrap(),
                multiuser_trial(g, &users, SchedulePolicy::MaxCapacity, slot).unwrap(),
                multiuser_trial(g, &users, SchedulePolicy::RoundRobin, slot).unwrap(),
            ];
            for o in outcomes {
                let diff = o.c_main.value() - o.c_wiretap.value();
                prop_assert!((o.c_secrecy.value() - diff).abs() <= 1e-12);
                prop_assert_eq!(o.intercepted, o.c_secrecy.value() < 0.0);
                prop_assert!(o.c_main.value() >= 0.0 && o.c_wiretap.value() >= 0.0);
            }
        }
    }
}
