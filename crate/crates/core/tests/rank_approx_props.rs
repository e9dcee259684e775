use tractlab_core::rank_approx::{
    approximation_numbers, check_lemma3, fit_tail3_constant, multiplicativity_checks,
    rank1_pointwise_check, rank1_sq_error_l2, rank2_covariance_spectrum, rank2_pointwise_check,
    rank2_sq_error_l2, sample_paths, spectral_tail_check, LEMMA_SLACK,
};
use tractlab_core::scalar::ln_factorial;
use tractlab_core::spectra::{wiener_kernel, wiener_spectrum, WienerOptions};

fn fact_sq(r: u32) -> f64 {
    (2.0 * ln_factorial::<f64>(r as u64)).exp()
}

fn bounded_spread(vals: &[f64], factor: f64) -> bool {
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(0.0, f64::max);
    lo > 0.0 && hi / lo < factor
}

#[test]
fn pointwise_bounds_hold_on_grid() {
    for r in 2..=12u32 {
        for i in 0..=100 {
            let t = i as f64 / 100.0;
            let c = rank1_pointwise_check(r, t).unwrap();
            assert!(c.holds(LEMMA_SLACK), "{c:?}");
            if r >= 3 {
                let c = rank2_pointwise_check(r, t).unwrap();
                assert!(c.holds(LEMMA_SLACK), "{c:?}");
            }
        }
    }
}

#[test]
fn l2_bounds_and_orders() {
    let mut one = Vec::new();
    let mut two = Vec::new();
    for r in 3..=12u32 {
        let a = rank1_sq_error_l2(r).unwrap();
        let b = rank2_sq_error_l2(r).unwrap();
        assert!(a.holds(LEMMA_SLACK) && b.holds(LEMMA_SLACK), "{a:?} {b:?}");
        assert!(b.computed <= a.computed);
        one.push(a.computed * fact_sq(r) * (r as f64).powi(4));
        two.push(b.computed * fact_sq(r) * (r as f64).powi(6));
    }
    assert!(bounded_spread(&one, 10.0), "{one:?}");
    assert!(bounded_spread(&two, 10.0), "{two:?}");
}

#[test]
fn spectral_tails_stay_below_rank_errors() {
    for r in 2..=12u32 {
        assert!(spectral_tail_check(r, 1).unwrap().holds(LEMMA_SLACK));
        if r >= 3 {
            assert!(spectral_tail_check(r, 2).unwrap().holds(LEMMA_SLACK));
        }
    }
    let c1 = fit_tail3_constant(&(3..=12).collect::<Vec<_>>()).unwrap();
    assert!(c1 > 0.0 && c1.is_finite());
}

#[test]
fn second_eigenvalue_order() {
    let wiener: Vec<f64> = (4..=12u32)
        .map(|r| {
            let s = wiener_spectrum::<f64>(r, 2, WienerOptions::default()).unwrap();
            s.log_eigenvalues()[1].exp() * fact_sq(r) * (r as f64).powi(4)
        })
        .collect();
    assert!(bounded_spread(&wiener, 3.0), "{wiener:?}");
    let rank_two: Vec<f64> = (3..=12u32)
        .map(|r| rank2_covariance_spectrum(r).unwrap().second * fact_sq(r) * (r as f64).powi(4))
        .collect();
    assert!(bounded_spread(&rank_two, 3.0), "{rank_two:?}");
}

#[test]
fn power_bound_examples() {
    let c = 2.0 / std::f64::consts::PI;
    assert!(check_lemma3(1, 1, c).unwrap().holds(0.0));
    assert!(check_lemma3(5, 3, c).unwrap().holds(0.0));
    // a₃(I²) ≤ a₂(I)²
    let m = multiplicativity_checks(1, 3).unwrap();
    assert!(m.iter().all(|c| c.holds(0.0)), "{m:?}");
    let a = approximation_numbers(3, 20).unwrap();
    assert!(a.values.windows(2).all(|w| w[1] <= w[0]));
    assert!(a.lower.iter().zip(&a.upper).all(|(l, u)| l <= u));
}

#[test]
fn sampled_variance_vanishes_at_origin() {
    // K(t, t) = t^{2r+1}/((2r+1) r!²)
    let grid = [1e-3, 0.5, 1.0];
    let samples = sample_paths(2, &grid, 20_000, 11).unwrap();
    let var = samples
        .iter()
        .map(|p| p.values[0] * p.values[0])
        .sum::<f64>()
        / samples.len() as f64;
    let k: f64 = wiener_kernel(1e-3, 1e-3, 2).unwrap();
    assert!((k - 1e-15 / 20.0).abs() < 1e-28);
    assert!((var / k - 1.0).abs() < 0.05, "{var} {k}");
}
