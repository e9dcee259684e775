//! Low-rank approximations of the integrated Wiener process
//! `W_r(t) = ∫₀¹ (t−u)₊^r / r! dW(u)`, the bounds they imply for the Wiener
//! spectrum, approximation numbers of integration operators, and exact
//! Gaussian path sampling.
//!
//! The squared errors are explicit integrals over the white-noise variable
//! `u`, so everything here is deterministic quadrature except
//! [`sample_paths`].

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{pivoted_cholesky, Matrix};
use crate::quad::{adaptive, AdaptiveOptions};
use crate::scalar::ln_factorial;
use crate::spectra::{
    wiener_kernel, wiener_log_trace, wiener_spectrum, UnivariateSpectrum, WienerOptions,
};

/// One comparison of a computed quantity against a proven upper bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaCheck {
    pub r: u32,
    pub quantity: String,
    /// Evaluation point, for pointwise quantities.
    pub t: Option<f64>,
    pub n: Option<u32>,
    pub computed: f64,
    pub bound: f64,
    /// `computed / bound`; for log-domain checks, `exp(ln computed − ln bound)`.
    pub ratio: f64,
}

impl LemmaCheck {
    fn new(r: u32, quantity: &str, computed: f64, bound: f64) -> Self {
        let ratio = if bound > 0.0 {
            computed / bound
        } else if computed == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            r,
            quantity: quantity.to_string(),
            t: None,
            n: None,
            computed,
            bound,
            ratio,
        }
    }

    fn at(mut self, t: f64) -> Self {
        self.t = Some(t);
        self
    }

    /// `ratio ≤ 1 + slack`.
    pub fn holds(&self, slack: f64) -> bool {
        self.ratio <= 1.0 + slack
    }
}

/// Slack allowed on the proven bounds.
pub const LEMMA_SLACK: f64 = 1e-10;

fn inv_fact_sq(r: u32) -> f64 {
    (-2.0 * ln_factorial::<f64>(r as u64)).exp()
}

fn quad(f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(b > a) {
        return Ok(0.0);
    }
    let res = adaptive(
        f,
        a,
        b,
        &[],
        AdaptiveOptions {
            abs_tol: 0.0,
            rel_tol,
            max_intervals: 2000,
        },
    );
    if !res.converged && res.error > 1e3 * rel_tol * res.value.abs() {
        return Err(Error::NoConvergence(format!("quadrature on [{a}, {b}]")));
    }
    Ok(res.value)
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return invalid(format!("t = {t} must lie in [0, 1]"));
    }
    Ok(())
}

/// `h = (1−t)u / (t(1−u))`, in `[0, 1]` for `u ≤ t`.
fn ratio_h(t: f64, u: f64) -> f64 {
    (1.0 - t) * u / (t * (1.0 - u))
}

/// `E|W_r(t) − V_{r,1}(t)|²` with `V_{r,1}(t) = t^r W_r(1)`.
pub fn rank1_sq_error_pointwise(r: u32, t: f64) -> Result<f64> {
    check_t(t)?;
    let rf = r as f64;
    // On [0, t]: t^{2r}(1−u)^{2r} [1 − (1−h)^r]², the bracket via expm1.
    let inner = |u: f64| {
        if r == 0 {
            return 0.0;
        }
        let h = ratio_h(t, u);
        let g = -(rf * (-h).ln_1p()).exp_m1();
        let base = t.powi(2 * r as i32) * (1.0 - u).powi(2 * r as i32);
        base * g * g
    };
    let outer = |u: f64| t.powi(2 * r as i32) * (1.0 - u).powi(2 * r as i32);
    let a = if t > 0.0 {
        quad(inner, 0.0, t, 1e-13)?
    } else {
        0.0
    };
    let b = quad(outer, t, 1.0, 1e-13)?;
    Ok((a + b) * inv_fact_sq(r))
}

/// `(1/r!²) · 3r²/(2r−2)³ · t^{2r−2}(1−t)²`, valid for `r ≥ 2`.
pub fn rank1_pointwise_bound(r: u32, t: f64) -> f64 {
    let rf = r as f64;
    inv_fact_sq(r) * 3.0 * rf * rf / (2.0 * rf - 2.0).powi(3)
        * t.powi(2 * r as i32 - 2)
        * (1.0 - t).powi(2)
}

/// `(1/r!²) · 6r²/(2r−2)⁶`.
pub fn rank1_l2_bound(r: u32) -> f64 {
    let rf = r as f64;
    inv_fact_sq(r) * 6.0 * rf * rf / (2.0 * rf - 2.0).powi(6)
}

fn need_r(r: u32, min: u32, what: &str) -> Result<()> {
    if r < min {
        return invalid(format!("{what} needs r >= {min}, got {r}"));
    }
    Ok(())
}

pub fn rank1_pointwise_check(r: u32, t: f64) -> Result<LemmaCheck> {
    need_r(r, 2, "rank-1 bound")?;
    let v = rank1_sq_error_pointwise(r, t)?;
    Ok(LemmaCheck::new(r, "rank1-pointwise", v, rank1_pointwise_bound(r, t)).at(t))
}

/// `E‖W_r − V_{r,1}‖²₂`, by integrating the pointwise error over `t`.
pub fn rank1_sq_error_l2_value(r: u32) -> Result<f64> {
    let mut failure = None;
    let v = quad(
        |t| {
            rank1_sq_error_pointwise(r, t).unwrap_or_else(|e| {
                failure = Some(e);
                0.0
            })
        },
        0.0,
        1.0,
        1e-11,
    )?;
    failure.map_or(Ok(v), Err)
}

/// Compares `E‖W_r − V_{r,1}‖²₂` with its proven bound.
pub fn rank1_sq_error_l2(r: u32) -> Result<LemmaCheck> {
    need_r(r, 2, "rank-1 bound")?;
    Ok(LemmaCheck::new(
        r,
        "rank1-l2",
        rank1_sq_error_l2_value(r)?,
        rank1_l2_bound(r),
    ))
}

/// `1 − rh − (1−h)^r`, by the binomial series when `rh` is small.
fn second_order_gap(r: u32, h: f64) -> f64 {
    let rf = r as f64;
    if rf * h < 0.25 {
        // −Σ_{k=2}^{r} C(r,k)(−h)^k
        let mut c = rf * (rf - 1.0) / 2.0;
        let mut p = h * h;
        let mut s = 0.0;
        for k in 2..=r {
            let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
            s += sign * c * p;
            c *= (rf - k as f64) / (k as f64 + 1.0);
            p *= h;
        }
        s
    } else {
        1.0 - rf * h - (1.0 - h).powi(r as i32)
    }
}

/// `E|W_r(t) − V_{r,2}(t)|²` with
/// `V_{r,2}(t) = (1/r!) ∫ [t^r(1−u)^r − r t^{r−1}(1−t) u (1−u)^{r−1}] dW(u)`.
pub fn rank2_sq_error_pointwise(r: u32, t: f64) -> Result<f64> {
    check_t(t)?;
    need_r(r, 1, "rank-2 approximation")?;
    let ri = r as i32;
    let rf = r as f64;
    let inner = |u: f64| {
        let g = second_order_gap(r, ratio_h(t, u));
        t.powi(2 * ri) * (1.0 - u).powi(2 * ri) * g * g
    };
    let outer = |u: f64| {
        let v = t.powi(ri) * (1.0 - u).powi(ri)
            - rf * t.powi(ri - 1) * (1.0 - t) * u * (1.0 - u).powi(ri - 1);
        v * v
    };
    let a = if t > 0.0 {
        quad(inner, 0.0, t, 1e-13)?
    } else {
        0.0
    };
    let b = quad(outer, t, 1.0, 1e-13)?;
    Ok((a + b) * inv_fact_sq(r))
}

/// `(1/r!²) · 14r²(r−1)²/(2r−4)⁵ · t^{2r−4}(1−t)⁴`, valid for `r ≥ 3`.
pub fn rank2_pointwise_bound(r: u32, t: f64) -> f64 {
    let rf = r as f64;
    inv_fact_sq(r) * 14.0 * rf * rf * (rf - 1.0).powi(2) / (2.0 * rf - 4.0).powi(5)
        * t.powi(2 * r as i32 - 4)
        * (1.0 - t).powi(4)
}

/// `(1/r!²) · 24·14·r²(r−1)²/(2r−4)¹⁰`.
pub fn rank2_l2_bound(r: u32) -> f64 {
    let rf = r as f64;
    inv_fact_sq(r) * 24.0 * 14.0 * rf * rf * (rf - 1.0).powi(2) / (2.0 * rf - 4.0).powi(10)
}

pub fn rank2_pointwise_check(r: u32, t: f64) -> Result<LemmaCheck> {
    need_r(r, 3, "rank-2 bound")?;
    let v = rank2_sq_error_pointwise(r, t)?;
    Ok(LemmaCheck::new(r, "rank2-pointwise", v, rank2_pointwise_bound(r, t)).at(t))
}

/// `E‖W_r − V_{r,2}‖²₂`.
pub fn rank2_sq_error_l2_value(r: u32) -> Result<f64> {
    need_r(r, 1, "rank-2 approximation")?;
    let mut failure = None;
    let v = quad(
        |t| {
            rank2_sq_error_pointwise(r, t).unwrap_or_else(|e| {
                failure = Some(e);
                0.0
            })
        },
        0.0,
        1.0,
        1e-11,
    )?;
    failure.map_or(Ok(v), Err)
}

pub fn rank2_sq_error_l2(r: u32) -> Result<LemmaCheck> {
    need_r(r, 3, "rank-2 bound")?;
    Ok(LemmaCheck::new(
        r,
        "rank2-l2",
        rank2_sq_error_l2_value(r)?,
        rank2_l2_bound(r),
    ))
}

/// `Σ_{j>m} λ_{j,r}` is the best rank-`m` mean squared error, so it cannot
/// exceed the error of `V_{r,m}`. The tail is taken as trace minus the
/// Ritz values, which over-estimates it and keeps the check conservative.
pub fn spectral_tail_check(r: u32, rank: usize) -> Result<LemmaCheck> {
    let (approx, label) = match rank {
        1 => (rank1_sq_error_l2_value(r)?, "tail-after-1-vs-rank1"),
        2 => (rank2_sq_error_l2_value(r)?, "tail-after-2-vs-rank2"),
        _ => return invalid("rank must be 1 or 2"),
    };
    let sp = wiener_spectrum::<f64>(r, 4, WienerOptions::default())?;
    let trace = wiener_log_trace(r).exp();
    let top: f64 = sp.log_eigenvalues()[..rank].iter().map(|l| l.exp()).sum();
    Ok(LemmaCheck::new(r, label, trace - top, approx))
}

/// `max_r (Σ_{j≥3} λ_{j,r}) · r!² r⁶` over `r ∈ rs`, the smallest constant
/// `C₁` with `Σ_{j≥3} λ_{j,r} ≤ C₁/(r!² r⁶)` on that range.
pub fn fit_tail3_constant(rs: &[u32]) -> Result<f64> {
    let vals: Vec<f64> = rs
        .par_iter()
        .map(|&r| {
            let sp = wiener_spectrum::<f64>(r, 4, WienerOptions::default())?;
            let l = sp.log_eigenvalues();
            let tail = wiener_log_trace(r).exp() - l[0].exp() - l[1].exp();
            Ok(tail.max(0.0) * (2.0 * ln_factorial::<f64>(r as u64)).exp() * (r as f64).powi(6))
        })
        .collect::<Result<_>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

/// Closed-form Gram data of the rank-2 expansion `ξ₁ψ₁ − rξ₂ψ₂` and the two
/// non-zero eigenvalues of its covariance operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankTwoSpectrum {
    pub largest: f64,
    pub second: f64,
}

/// Eigenvalues of the covariance operator of `V_{r,2}`: those of
/// `G_ξ · D G_ψ D` with `D = diag(1, −r)`, where `G_ξ` and `G_ψ` are the
/// Gram matrices of `{ξ₁, ξ₂}` and `{ψ₁, ψ₂}`.
pub fn rank2_covariance_spectrum(r: u32) -> Result<RankTwoSpectrum> {
    need_r(r, 1, "rank-2 approximation")?;
    let q = |n: i64, d: i64| BigRational::new(BigInt::from(n), BigInt::from(d));
    let r = r as i64;
    // E ξ₁² = 1/(2r+1), E ξ₁ξ₂ = B(2, 2r), E ξ₂² = B(3, 2r−1)
    let x11 = q(1, 2 * r + 1);
    let x12 = q(1, 2 * r * (2 * r + 1));
    let x22 = q(2, (2 * r - 1) * 2 * r * (2 * r + 1));
    // ∫ψ_aψ_b without the 1/r!² factor: the same three Beta integrals.
    let (p11, p12, p22) = (x11.clone(), x12.clone(), x22.clone());
    let rr = q(r, 1);
    // B = D G_ψ D
    let b11 = p11;
    let b12 = -(rr.clone() * p12);
    let b22 = rr.clone() * rr * p22;
    let m11 = x11.clone() * b11.clone() + x12.clone() * b12.clone();
    let m22 = x12.clone() * b12.clone() + x22.clone() * b22.clone();
    let tr = m11 + m22;
    let det = (x11 * x22 - x12.clone() * x12) * (b11 * b22 - b12.clone() * b12);
    let scale = inv_fact_sq(r as u32);
    let trf = tr.to_f64().unwrap_or(f64::NAN);
    let detf = det.to_f64().unwrap_or(f64::NAN);
    let disc = (trf * trf - 4.0 * detf).max(0.0).sqrt();
    let largest = 0.5 * (trf + disc);
    let second = detf / largest;
    Ok(RankTwoSpectrum {
        largest: largest * scale,
        second: second * scale,
    })
}

/// Sup over `τ ∈ [τ₀, 1]` (on `tau_grid + 1` equispaced points) of
/// `Σ_{j≥3} λ_{j,r}^τ / λ_{2,r}^τ`.
pub fn tau_ratio_sup(r: u32, tau0: f64, tau_grid: usize) -> Result<f64> {
    let sp = tau_spectrum(r)?;
    tau_ratio_sup_on(&sp, tau0, tau_grid)
}

fn tau_spectrum(r: u32) -> Result<UnivariateSpectrum<f64>> {
    wiener_spectrum::<f64>(
        r,
        8,
        WienerOptions {
            tolerance: 1e-4,
            ..WienerOptions::default()
        },
    )
}

/// [`tau_ratio_sup`] on a given spectrum.
pub fn tau_ratio_sup_on(sp: &UnivariateSpectrum<f64>, tau0: f64, tau_grid: usize) -> Result<f64> {
    if !(tau0 > 0.6 && tau0 <= 1.0) {
        return invalid(format!("τ₀ = {tau0} must lie in (3/5, 1]"));
    }
    if tau_grid == 0 || sp.len() < 3 {
        return invalid("need a positive τ grid and at least three eigenvalues");
    }
    let mut best = f64::NEG_INFINITY;
    for i in 0..=tau_grid {
        let tau = tau0 + (1.0 - tau0) * i as f64 / tau_grid as f64;
        best = best.max(tau_ratio(sp, tau)?);
    }
    Ok(best)
}

/// `Σ_{j≥3} λ_j^τ / λ_2^τ`. At `τ = 1` the tail beyond the computed values
/// is the certified trace remainder; below 1 it is the asymptotic model.
pub fn tau_ratio(sp: &UnivariateSpectrum<f64>, tau: f64) -> Result<f64> {
    let l = sp.log_eigenvalues();
    let l2 = l[1];
    let mut s: f64 = l[2..].iter().map(|x| (tau * (x - l2)).exp()).sum();
    let tail = if tau == 1.0 {
        sp.log_tail()
    } else {
        sp.log_power_tail(tau)?
    };
    s += (tail - tau * l2).exp();
    Ok(s)
}

// ---------------------------------------------------------------------------
// Approximation numbers
// ---------------------------------------------------------------------------

/// `a_n(I^r) = √λ_{n,r−1}` for the `r`-fold integration operator on
/// `L²[0,1]`.
pub fn approximation_number(n: u32, r: u32) -> Result<f64> {
    if n == 0 || r == 0 {
        return invalid("n and r must be positive");
    }
    let sp = wiener_spectrum::<f64>(r - 1, n as usize, lemma3_options())?;
    Ok((0.5 * sp.log_eigenvalues()[n as usize - 1]).exp())
}

fn lemma3_options() -> WienerOptions {
    // Fifty eigenvalues at r = 5 carry two-grid differences around 1e-6,
    // so the certified bounds below use the error estimates explicitly.
    WienerOptions {
        tolerance: 1e-4,
        ..WienerOptions::default()
    }
}

/// Approximation numbers `a_1..a_count` of `I^r` with upper and lower
/// bounds from the two-grid error estimates.
#[derive(Debug, Clone)]
pub struct ApproximationNumbers {
    pub r: u32,
    pub values: Vec<f64>,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
}

pub fn approximation_numbers(r: u32, count: usize) -> Result<ApproximationNumbers> {
    if r == 0 || count == 0 {
        return invalid("r and count must be positive");
    }
    let sp = wiener_spectrum::<f64>(r - 1, count, lemma3_options())?;
    let errs = &sp.method().error_estimates;
    let lam = sp.eigenvalues();
    let err = |i: usize| errs.get(i).copied().unwrap_or(0.0);
    Ok(ApproximationNumbers {
        r,
        values: lam.iter().map(|l| l.sqrt()).collect(),
        // Ritz values are lower bounds of the true eigenvalues.
        lower: lam.iter().map(|l| l.sqrt()).collect(),
        upper: lam
            .iter()
            .enumerate()
            .map(|(i, l)| (l + err(i)).sqrt())
            .collect(),
    })
}

/// As many approximation numbers of `I^r` as the eigensolver certifies, up
/// to `max_count`: the count is halved until the solve succeeds.
pub fn available_approximation_numbers(r: u32, max_count: usize) -> Result<ApproximationNumbers> {
    let mut count = max_count;
    loop {
        match approximation_numbers(r, count) {
            Ok(a) => return Ok(a),
            Err(Error::Discretization { .. } | Error::NonPositiveEigenvalue { .. })
                if count > 1 =>
            {
                count /= 2
            }
            Err(e) => return Err(e),
        }
    }
}

/// `a_n(I) ≤ C/n`.
pub fn check_an_i1(n: u32, c: f64) -> Result<LemmaCheck> {
    let a = approximation_number(n, 1)?;
    let mut chk = LemmaCheck::new(1, "an-I1", a, c / n as f64);
    chk.n = Some(n);
    Ok(chk)
}

/// `ln(C^r (2r)^{2r} n^{−r})`.
pub fn lemma3_log_bound(n: u32, r: u32, c: f64) -> f64 {
    let rf = r as f64;
    rf * c.ln() + 2.0 * rf * (2.0 * rf).ln() - rf * (n as f64).ln()
}

fn log_check(r: u32, n: u32, quantity: &str, log_computed: f64, log_bound: f64) -> LemmaCheck {
    LemmaCheck {
        r,
        quantity: quantity.to_string(),
        t: None,
        n: Some(n),
        computed: log_computed.exp(),
        bound: log_bound.exp(),
        ratio: (log_computed - log_bound).exp(),
    }
}

/// `a_n(I^r) ≤ C^r (2r)^{2r} n^{−r}`, compared in the log domain using the
/// upper bound of `a_n`.
pub fn check_lemma3(n: u32, r: u32, c: f64) -> Result<LemmaCheck> {
    let a = approximation_numbers(r, n as usize)?;
    Ok(lemma3_from(&a, n, c))
}

fn lemma3_from(a: &ApproximationNumbers, n: u32, c: f64) -> LemmaCheck {
    let up = a.upper[n as usize - 1];
    log_check(a.r, n, "lemma3", up.ln(), lemma3_log_bound(n, a.r, c))
}

/// Every `a_n(I^r)` bound for `r ≤ r_max`, `n ≤ n_max`.
pub fn lemma3_table(r_max: u32, n_max: u32, c: f64) -> Result<Vec<LemmaCheck>> {
    let tables: Vec<ApproximationNumbers> = (1..=r_max)
        .into_par_iter()
        .map(|r| approximation_numbers(r, n_max as usize))
        .collect::<Result<_>>()?;
    Ok(tables
        .iter()
        .flat_map(|a| (1..=n_max).map(move |n| lemma3_from(a, n, c)))
        .collect())
}

/// `a_{2n−1}(I^{2r}) ≤ a_n(I^r)²` for `r ≤ r_max` and every `n` for which
/// both sides are available (see [`available_approximation_numbers`], with
/// at most `count` values per order). The left side uses the upper bound,
/// the right side the lower bound.
pub fn multiplicativity_checks(r_max: u32, count: usize) -> Result<Vec<LemmaCheck>> {
    let orders: Vec<u32> = (1..=2 * r_max).collect();
    let tables: Vec<ApproximationNumbers> = orders
        .par_iter()
        .map(|&r| available_approximation_numbers(r, count))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for r in 1..=r_max {
        let single = &tables[r as usize - 1];
        let double = &tables[2 * r as usize - 1];
        let pairs = single.values.len().min((double.values.len() + 1) / 2);
        for n in 1..=pairs as u32 {
            let lhs = double.upper[2 * n as usize - 2];
            let rhs = single.lower[n as usize - 1];
            out.push(log_check(
                r,
                n,
                "multiplicativity",
                lhs.ln(),
                2.0 * rhs.ln(),
            ));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

/// One sampled path on a fixed grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub r: u32,
    pub seed: u64,
    /// Stream index of this sample within the seed.
    pub index: u64,
    pub method: String,
}

/// `count` exact draws of `(W_r(t_1), …, W_r(t_m))`.
///
/// The Gram matrix of the kernel, scaled to unit diagonal, is factored by
/// pivoted Cholesky (pivots below `1e-12` are dropped) and applied to
/// standard normal vectors. Sample `i` draws from ChaCha8 stream `i` of
/// `seed`, so parallel generation reproduces serial output.
pub fn sample_paths(r: u32, grid: &[f64], count: usize, seed: u64) -> Result<Vec<PathSample>> {
    if count == 0 {
        return invalid("count must be positive");
    }
    if grid.is_empty()
        || grid[0] <= 0.0
        || *grid.last().unwrap() > 1.0
        || grid.windows(2).any(|w| w[1] <= w[0])
    {
        return invalid("grid must be strictly increasing in (0, 1]");
    }
    let m = grid.len();
    // Factor the correlation matrix so the pivot tolerance is relative to
    // each point's own variance; near t = 0 the variances are tiny.
    let sd: Vec<f64> = grid
        .iter()
        .map(|&t| wiener_kernel(t, t, r).map(f64::sqrt))
        .collect::<Result<_>>()?;
    if let Some(i) = sd.iter().position(|&s| !(s > 0.0)) {
        return invalid(format!(
            "variance at t = {} underflows for r = {r}",
            grid[i]
        ));
    }
    let mut corr = Matrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = wiener_kernel(grid[i], grid[j], r)? / (sd[i] * sd[j]);
            corr.set(i, j, v);
            corr.set(j, i, v);
        }
    }
    let chol = pivoted_cholesky(&corr, 1e-12)?;
    let rank = chol.rank();
    let method = format!("pivoted-cholesky rank {rank}; chacha8 stream per sample");
    Ok((0..count as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(index);
            let z: Vec<f64> = (0..rank).map(|_| StandardNormal.sample(&mut rng)).collect();
            let values = (0..m)
                .map(|i| {
                    sd[i]
                        * chol
                            .factor
                            .row(i)
                            .iter()
                            .zip(&z)
                            .map(|(a, b)| a * b)
                            .sum::<f64>()
                })
                .collect();
            PathSample {
                grid: grid.to_vec(),
                values,
                r,
                seed,
                index,
                method: method.clone(),
            }
        })
        .collect())
}
