mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;
use resilnet_core::metrics::{
    crf, detect_disruptions, phase_weighted_resilience, recovery_area_resilience, segment_phases, DisruptionWindow,
    PhaseDurations,
};
use resilnet_core::ServiceTrace;

#[test]
fn crf_monotone_with_exact_endpoints_on_random_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0;
    while checked < 1000 {
        let (times, values) = random_trace(&mut rng, 12);
        let trace = ServiceTrace::new(times.clone(), values.clone()).unwrap();
        for w in detect_disruptions(&trace).into_iter().filter(|w| w.terminated) {
            let total = trapezoid(&times, &values, w.detect_index, w.recover_index);
            let mut prev = 0.0;
            for k in w.detect_index..=w.recover_index {
                let c = crf(&trace, &w, times[k]).unwrap();
                let oracle = trapezoid(&times, &values, w.detect_index, k) / total;
                assert!((c - oracle).abs() < 1e-12);
                assert!(c >= prev);
                prev = c;
                if k < w.recover_index {
                    let mid = 0.5 * (times[k] + times[k + 1]);
                    let cm = crf(&trace, &w, mid).unwrap();
                    assert!(cm >= c && cm <= crf(&trace, &w, times[k + 1]).unwrap() + 1e-15);
                }
            }
            assert_eq!(crf(&trace, &w, w.t_detect).unwrap(), 0.0);
            assert_eq!(crf(&trace, &w, w.t_recover).unwrap(), 1.0);
            checked += 1;
        }
    }
}

#[test]
fn equal_area_recoveries_differ_in_crf() {
    // Fast-then-slow vs slow-then-fast: same area, different trajectories.
    let early = ServiceTrace::from_unit_steps(vec![1.0, 0.0, 0.8, 0.2, 1.0]).unwrap();
    let late = ServiceTrace::from_unit_steps(vec![1.0, 0.0, 0.2, 0.8, 1.0]).unwrap();
    let we = detect_disruptions(&early)[0];
    let wl = detect_disruptions(&late)[0];
    let ae = recovery_area_resilience(&early, &we).unwrap().value;
    let al = recovery_area_resilience(&late, &wl).unwrap().value;
    assert!((ae - al).abs() < 1e-15);
    let ce = crf(&early, &we, 2.0).unwrap();
    let cl = crf(&late, &wl, 2.0).unwrap();
    assert!((ce - cl).abs() > 0.1, "{ce} vs {cl}");
}

#[test]
fn values_above_one_clip_only_in_area() {
    let t = ServiceTrace::from_unit_steps(vec![1.0, 0.5, 1.0, 1.5, 1.0]).unwrap();
    let w = DisruptionWindow::spanning(&t, 1.0, 4.0).unwrap();
    // min(s,1): (0.75 + 1 + 1) / 3
    assert!((recovery_area_resilience(&t, &w).unwrap().value - 2.75 / 3.0).abs() < 1e-12);
    // CRF keeps the excess: area 0.75 + 1.25 + 1.25 = 3.25.
    assert!((crf(&t, &w, 2.0).unwrap() - 0.75 / 3.25).abs() < 1e-12);
}

fn arb_trace() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..15).prop_flat_map(|n| {
        (prop::collection::vec(0.1f64..3.0, n), prop::collection::vec(0.0f64..1.3, n)).prop_map(|(gaps, mut values)| {
            let mut t = 0.0;
            let times = gaps
                .iter()
                .map(|g| {
                    let now = t;
                    t += g;
                    now
                })
                .collect();
            let last = values.len() - 1;
            values[last] = 1.0;
            (times, values)
        })
    })
}

proptest! {
    #[test]
    fn phases_partition_window((times, values) in arb_trace(), alpha in 0.05f64..0.95) {
        let trace = ServiceTrace::new(times, values).unwrap();
        for w in detect_disruptions(&trace) {
            prop_assert!(w.terminated);
            prop_assert!(w.t_detect <= w.t_trough && w.t_trough <= w.t_recover);
            let p = segment_phases(&trace, &w, alpha).unwrap();
            prop_assert!(p.absorption >= 0.0 && p.adoption >= 0.0 && p.recovery >= 0.0);
            prop_assert!((p.total() - w.duration()).abs() <= 1e-12 * w.t_recover.abs().max(1.0));
        }
    }

    #[test]
    fn area_invariant_under_time_rescaling((times, values) in arb_trace(), c in 0.1f64..20.0) {
        let a = ServiceTrace::new(times.clone(), values.clone()).unwrap();
        let b = ServiceTrace::new(times.iter().map(|t| t * c).collect(), values).unwrap();
        for (wa, wb) in detect_disruptions(&a).iter().zip(detect_disruptions(&b).iter()) {
            let (Ok(sa), Ok(sb)) = (recovery_area_resilience(&a, wa), recovery_area_resilience(&b, wb)) else {
                continue;
            };
            prop_assert!((sa.value - sb.value).abs() <= 1e-9);
            prop_assert!(sa.value > 0.0 && sa.value <= 1.0);
        }
    }

    #[test]
    fn phase_weighted_strictly_decreasing(
        d in prop::array::uniform3(0.0f64..20.0),
        raw in prop::array::uniform3(0.01f64..1.0),
        which in 0usize..3,
        extra in 0.01f64..5.0,
        tau in 0.5f64..30.0,
    ) {
        let total: f64 = raw.iter().sum();
        let w = [raw[0] / total, raw[1] / total, 1.0 - raw[0] / total - raw[1] / total];
        prop_assume!(w[which] > 1e-6);
        let base = PhaseDurations { absorption: d[0], adoption: d[1], recovery: d[2] };
        let mut longer = d;
        longer[which] += extra;
        let longer = PhaseDurations { absorption: longer[0], adoption: longer[1], recovery: longer[2] };
        let a = phase_weighted_resilience(&base, w, tau).unwrap().value;
        let b = phase_weighted_resilience(&longer, w, tau).unwrap().value;
        prop_assert!(b < a);
        prop_assert!(a > 0.0 && a <= 1.0);
    }
}
