use proptest::prelude::*;
use tractlab_core::tractability::{
    classify, euler_quasi_criterion, euler_quasi_summand, euler_spt_exponent, log_grid,
    qpt_log_criterion_with, quasi_trajectory, trend_slope, wiener_quasi_summand, ClassifyConfig,
    Notion, Ratios, Trend, Verdict, WienerMode,
};
use tractlab_core::{Process, SmoothnessSequence, HALF_INV_LN3};

fn seq(s: &str) -> SmoothnessSequence {
    s.parse().unwrap()
}

fn euler_family() -> Vec<SmoothnessSequence> {
    [
        "const:0".to_string(),
        "const:2".to_string(),
        "log-threshold".to_string(),
        "log-euler:a=0.3".to_string(),
        format!("log-euler:a={HALF_INV_LN3}"),
        "log-euler:a=1".to_string(),
        "power:c=1,s=0.5".to_string(),
    ]
    .iter()
    .map(|s| seq(s))
    .collect()
}

#[test]
fn implication_chain_holds_on_test_family() {
    let grid = log_grid(1_000_000, 4);
    let config = ClassifyConfig::default();
    let mut cases: Vec<(Process, SmoothnessSequence)> = euler_family()
        .into_iter()
        .map(|s| (Process::Euler, s))
        .collect();
    for s in [
        "const:1",
        "log-euler:a=1",
        "power-wiener:s=0.5",
        "power-wiener:s=0.75",
    ] {
        cases.push((Process::Wiener, seq(s)));
    }
    for (process, s) in &cases {
        let report = classify(*process, s, &grid, &config).unwrap();
        let violations = report.implication_violations();
        assert!(violations.is_empty(), "{process} {s}: {violations:?}");
    }
}

#[test]
fn euler_table_verdicts() {
    let grid = log_grid(1_000_000, 4);
    let config = ClassifyConfig::default();
    let verdicts = |s: &str| {
        let r = classify(Process::Euler, &seq(s), &grid, &config).unwrap();
        Notion::ALL.map(|n| r.verdict(n))
    };
    use Verdict::*;
    assert_eq!(verdicts("const:0"), [EvidenceAgainst; 4]);
    assert_eq!(
        verdicts("log-euler:a=0.3"),
        [
            EvidenceAgainst,
            EvidenceAgainst,
            EvidenceAgainst,
            EvidenceFor
        ]
    );
    let boundary = verdicts(&format!("log-euler:a={HALF_INV_LN3}"));
    assert_eq!(boundary[0], EvidenceAgainst);
    assert_eq!(boundary[2], EvidenceFor);
    assert_eq!(verdicts("log-euler:a=1"), [EvidenceFor; 4]);
}

#[test]
fn general_and_specialized_quasi_criteria_agree() {
    // The general product form (its log, unnormalized) is bounded exactly
    // when the specialized Euler criterion is.
    let grid = log_grid(1_000_000, 4);
    let config = ClassifyConfig::default();
    let ratios = Ratios::new(Process::Euler, WienerMode::Fitted).unwrap();
    for s in euler_family() {
        let special: Vec<f64> = quasi_trajectory(Process::Euler, &s, &grid, 1e-9)
            .unwrap()
            .iter()
            .map(|e| e.estimate)
            .collect();
        let general: Vec<f64> = grid
            .iter()
            .map(|&d| {
                qpt_log_criterion_with(&ratios, &s, 0.25, d, 1e-9)
                    .unwrap()
                    .estimate
            })
            .collect();
        let a = config.bounded_trend(trend_slope(&grid, &special));
        let b = config.bounded_trend(trend_slope(&grid, &general));
        assert_ne!(a, Trend::Unclear, "{s}");
        assert_eq!(a, b, "{s}");
    }
}

#[test]
fn boundary_exponent_is_exact() {
    for r1 in 0..6u64 {
        let a = (r1 as f64 + 1.0) / 3f64.ln();
        let p = euler_spt_exponent(r1, a).unwrap();
        assert_eq!(p, 2.0 / (2.0 * r1 as f64 + 1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quasi_summands_do_not_increase(r in 1u64..10_000) {
        prop_assert!(euler_quasi_summand(r + 1) <= euler_quasi_summand(r));
        prop_assert!(wiener_quasi_summand(r + 1) <= wiener_quasi_summand(r));
    }

    #[test]
    fn smoother_sequences_give_smaller_criteria(a in 0.05f64..2.0, extra in 0.0f64..2.0, d in 1u128..1_000_000_000) {
        let rough = seq(&format!("log-euler:a={a}"));
        let smooth = seq(&format!("log-euler:a={}", a + extra));
        let x = euler_quasi_criterion(&smooth, d).unwrap();
        let y = euler_quasi_criterion(&rough, d).unwrap();
        prop_assert!(x <= y * (1.0 + 1e-12));
    }
}
