use proptest::prelude::*;
use tractlab_core::{RateMode, SmoothnessSequence, HALF_INV_LN3};

fn rules() -> impl Strategy<Value = String> {
    prop_oneof![
        (0u64..6).prop_map(|r| format!("const:{r}")),
        (0.05f64..3.0).prop_map(|a| format!("log-euler:a={a}")),
        Just("log-threshold".to_string()),
        (0.1f64..1.5).prop_map(|s| format!("power-wiener:s={s}")),
        (0.1f64..3.0, 0.05f64..1.0).prop_map(|(c, s)| format!("power:c={c},s={s}")),
        prop::collection::vec(0u64..4, 1..6).prop_map(|mut v| {
            v.sort();
            format!(
                "explicit:{}",
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            )
        }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sequences_are_non_decreasing(rule in rules(), k in 1u64..100_000) {
        let seq: SmoothnessSequence = rule.parse().unwrap();
        prop_assert!(seq.value(k) <= seq.value(k + 1));
    }

    #[test]
    fn log_euler_is_a_ceiling(a in 0.05f64..3.0, k in 1u64..1_000_000) {
        let seq: SmoothnessSequence = format!("log-euler:a={a}").parse().unwrap();
        let kf = k as f64;
        let x = 1.0 + a * (1.0 + kf * kf.ln()).ln();
        let v = seq.value(k) as f64;
        prop_assert!((v - x).abs() < 1.0 + 1e-9, "{v} {x}");
    }

    #[test]
    fn text_form_round_trips(rule in rules()) {
        let seq: SmoothnessSequence = rule.parse().unwrap();
        let again: SmoothnessSequence = seq.to_string().parse().unwrap();
        prop_assert_eq!(seq, again);
    }
}

#[test]
fn monotone_on_long_prefixes() {
    for rule in [
        "log-euler:a=0.3",
        "log-threshold",
        "power-wiener:s=0.5",
        "power:c=2,s=0.3",
    ] {
        let seq: SmoothnessSequence = rule.parse().unwrap();
        let p = seq.prefix(100_001);
        assert!(p.windows(2).all(|w| w[0] <= w[1]), "{rule}");
    }
}

#[test]
fn log_rate_decreases_toward_a() {
    // r_k / ln k ≈ a + (1 + a ln ln k)/ln k, so the prefix estimate sits above
    // a and approaches it only logarithmically.
    for a in [0.3, HALF_INV_LN3, 1.0] {
        let seq: SmoothnessSequence = format!("log-euler:a={a}").parse().unwrap();
        let mut last = f64::INFINITY;
        for k in [1_000u64, 10_000, 100_000, 1_000_000] {
            let v = seq.rate_estimate(RateMode::LogRate, k).unwrap();
            let lk = (k as f64).ln();
            assert!(
                v >= a && v <= a + (2.0 + a * lk.ln()) / lk,
                "a={a} k={k}: {v}"
            );
            assert!(v <= last);
            last = v;
        }
    }
}
