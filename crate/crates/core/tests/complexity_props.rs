use proptest::prelude::*;
use tractlab_core::complexity::{
    curse_lower_bound, error_of_n, n_eps, Certification, ComplexityOptions,
};
use tractlab_core::spectra::{euler_eigenvalue, euler_trace, WienerOptions};
use tractlab_core::{Process, SmoothnessSequence};

/// Dense-grid n(ε, d) for Euler smoothness values `rs`, with every index up
/// to `j_max`. Panics unless every product left off the grid is smaller
/// than the last one taken, which makes the answer exact.
fn dense_n(eps: f64, rs: &[u32], j_max: u64) -> usize {
    let mut vals = vec![1.0];
    for &r in rs {
        let lam: Vec<f64> = (1..=j_max).map(|j| euler_eigenvalue::<f64>(j, r)).collect();
        vals = vals
            .iter()
            .flat_map(|&a| lam.iter().map(move |&l| a * l))
            .collect();
    }
    vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let trace: f64 = rs.iter().map(|&r| euler_trace::<f64>(r)).product();
    let target = (1.0 - eps * eps) * trace;
    let mut acc = 0.0;
    for (i, v) in vals.iter().enumerate() {
        acc += v;
        if acc >= target {
            let largest_off_grid = rs
                .iter()
                .enumerate()
                .map(|(k, &r)| {
                    let others: f64 = rs
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != k)
                        .map(|(_, &s)| euler_eigenvalue::<f64>(1, s))
                        .product();
                    euler_eigenvalue::<f64>(j_max + 1, r) * others
                })
                .fold(0.0, f64::max);
            assert!(
                largest_off_grid < *v,
                "grid too small for eps={eps} rs={rs:?}"
            );
            return i + 1;
        }
    }
    panic!("grid too small for eps={eps} rs={rs:?}");
}

fn explicit(rs: &[u32]) -> SmoothnessSequence {
    let body: Vec<String> = rs.iter().map(|r| r.to_string()).collect();
    format!("explicit:{}", body.join(",")).parse().unwrap()
}

#[test]
fn matches_dense_oracle() {
    let opts = ComplexityOptions::default();
    for rs in [
        vec![0],
        vec![1],
        vec![0, 0],
        vec![0, 1],
        vec![1, 1],
        vec![0, 0, 0],
        vec![0, 1, 1],
        vec![1, 1, 1],
    ] {
        for eps in [0.9, 0.5, 0.2] {
            let res = n_eps(eps, rs.len(), Process::Euler, &explicit(&rs), &opts).unwrap();
            assert_eq!(res.certification, Certification::Certified);
            let j_max = if rs.len() == 3 { 120 } else { 400 };
            assert_eq!(res.n, dense_n(eps, &rs, j_max), "eps={eps} rs={rs:?}");
        }
    }
}

fn check_consistency(
    eps: f64,
    d: usize,
    process: Process,
    seq: &SmoothnessSequence,
) -> Result<(), TestCaseError> {
    let opts = ComplexityOptions::default();
    let res = n_eps(eps, d, process, seq, &opts).unwrap();
    prop_assert!((0.0..=1.0).contains(&res.achieved_squared_error_fraction));
    if res.certification == Certification::Certified {
        prop_assert!(res.achieved_squared_error_fraction <= eps * eps);
        let lb = curse_lower_bound(eps, d, process, &seq, WienerOptions::default()).unwrap();
        prop_assert!(
            res.n as f64 >= lb.exp().ceil() - 1e-9,
            "{} {}",
            res.n,
            lb.exp()
        );
        if res.n > 0 {
            let e = error_of_n(res.n, d, process, seq, &opts).unwrap();
            let again = n_eps(
                (e.normalized_error * (1.0 + 1e-12)).min(1.0),
                d,
                process,
                seq,
                &opts,
            )
            .unwrap();
            prop_assert!(again.n <= res.n);
            let before = error_of_n(res.n - 1, d, process, seq, &opts).unwrap();
            prop_assert!(before.lower > eps * eps * (1.0 - 1e-9));
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn euler_consistent_with_error_of_n(eps in 0.15f64..0.95, d in 1usize..4, r in 0u64..3) {
        check_consistency(eps, d, Process::Euler, &SmoothnessSequence::constant(r))?;
    }
}

#[test]
fn wiener_consistent_with_error_of_n() {
    for (eps, d, r) in [(0.5, 2, 1)] {
        check_consistency(eps, d, Process::Wiener, &SmoothnessSequence::constant(r)).unwrap();
    }
}
