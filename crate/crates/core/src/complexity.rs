//! Average-case information complexity `n(ε, d)`: the smallest `n` whose
//! largest `n` product eigenvalues leave at most `ε²` of the trace product.
//!
//! Everything is trace-normalized. With computed values that never exceed
//! the true ones and a bound `L` on the truncated mass, the captured fraction
//! `F*_n` of the true top `n` satisfies `F_n ≤ F*_n ≤ F_n + L`, which gives
//! the bracket `[n_lo, n_hi]` reported below.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::smoothness::SmoothnessSequence;
use crate::spectra::{spectrum, Process, UnivariateSpectrum, WienerOptions};
use crate::sum::Neumaier;
use crate::tensor::{log_trace_product, truncation_loss_fraction, ProductEnumerator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Certification {
    Certified,
    TruncationLimited,
}

/// Knobs for the univariate truncation and the enumeration budget.
#[derive(Debug, Clone, Copy)]
pub struct ComplexityOptions {
    /// Largest number of products to enumerate.
    pub budget: usize,
    /// Required truncation loss as a multiple of `ε²`.
    pub loss_factor: f64,
    pub initial_len: usize,
    pub max_euler_len: usize,
    pub max_wiener_len: usize,
    pub wiener: WienerOptions,
}

impl Default for ComplexityOptions {
    fn default() -> Self {
        Self {
            budget: 50_000_000,
            loss_factor: 1e-3,
            initial_len: 16,
            max_euler_len: 1 << 20,
            max_wiener_len: 128,
            wiener: WienerOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnumerationStats {
    pub enumerated: usize,
    pub max_frontier: usize,
    /// Truncation length per distinct smoothness value.
    pub truncation: Vec<(u64, usize)>,
    pub truncation_loss_fraction: f64,
    pub log_trace_product: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityResult {
    pub eps: f64,
    pub d: usize,
    pub n: usize,
    /// Upper bound on the remaining squared error over the initial one.
    pub achieved_squared_error_fraction: f64,
    pub certification: Certification,
    /// `n` is known to lie in `[lo, hi]`; `lo == hi` when certified.
    pub bracket: (usize, usize),
    pub stats: EnumerationStats,
}

/// Univariate spectra for the smoothness values of the first `d` variables,
/// built once per distinct `r` and grown until their tail fraction is below
/// `share` (or the length cap is reached).
#[derive(Debug, Clone)]
pub struct SpectrumSet {
    process: Process,
    by_r: BTreeMap<u64, UnivariateSpectrum<f64>>,
    r_of_k: Vec<u64>,
}

impl SpectrumSet {
    pub fn build(
        process: Process,
        seq: &SmoothnessSequence,
        d: usize,
        share: f64,
        opts: &ComplexityOptions,
    ) -> Result<Self> {
        let r_of_k = seq.prefix(d);
        let mut by_r = BTreeMap::new();
        for &r in &r_of_k {
            if by_r.contains_key(&r) {
                continue;
            }
            by_r.insert(r, grow_spectrum(process, r, share, opts)?);
        }
        Ok(Self {
            process,
            by_r,
            r_of_k,
        })
    }

    /// Rebuilds every spectrum with a tighter tail share.
    pub fn refine(&mut self, share: f64, opts: &ComplexityOptions) -> Result<bool> {
        let mut grew = false;
        for (&r, s) in self.by_r.iter_mut() {
            let next = grow_spectrum(self.process, r, share, opts)?;
            if next.len() > s.len() {
                grew = true;
                *s = next;
            }
        }
        Ok(grew)
    }

    pub fn factors(&self) -> Vec<&UnivariateSpectrum<f64>> {
        self.r_of_k.iter().map(|r| &self.by_r[r]).collect()
    }

    pub fn truncation(&self) -> Vec<(u64, usize)> {
        self.by_r.iter().map(|(&r, s)| (r, s.len())).collect()
    }
}

fn cap_for(process: Process, r: u64, opts: &ComplexityOptions) -> usize {
    match process {
        Process::Euler => opts.max_euler_len,
        Process::Wiener if r == 0 => opts.max_euler_len,
        Process::Wiener => opts.max_wiener_len,
    }
}

fn grow_spectrum(
    process: Process,
    r: u64,
    share: f64,
    opts: &ComplexityOptions,
) -> Result<UnivariateSpectrum<f64>> {
    let r32 = u32::try_from(r)
        .map_err(|_| Error::InvalidArgument(format!("smoothness {r} too large")))?;
    let cap = cap_for(process, r, opts);
    let mut len = opts.initial_len.min(cap);
    loop {
        let s = spectrum::<f64>(process, r32, len, opts.wiener)?;
        if s.tail_fraction() <= share || len >= cap {
            return Ok(s);
        }
        len = (len * 2).min(cap);
    }
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return invalid(format!("eps must lie in (0, 1], got {eps}"));
    }
    Ok(())
}

/// Certified `n(ε, d)` with a bracket when truncation prevents certification.
pub fn n_eps(
    eps: f64,
    d: usize,
    process: Process,
    seq: &SmoothnessSequence,
    opts: &ComplexityOptions,
) -> Result<ComplexityResult> {
    check_eps(eps)?;
    if d == 0 {
        return invalid("d must be positive");
    }
    if eps >= 1.0 {
        return Ok(ComplexityResult {
            eps,
            d,
            n: 0,
            achieved_squared_error_fraction: 1.0,
            certification: Certification::Certified,
            bracket: (0, 0),
            stats: EnumerationStats::default(),
        });
    }
    let eps2 = eps * eps;
    let mut share = opts.loss_factor * eps2 / d as f64;
    let mut set = SpectrumSet::build(process, seq, d, share, opts)?;
    loop {
        let result = n_eps_on(eps, &set, opts)?;
        if result.certification == Certification::Certified {
            return Ok(result);
        }
        share /= 16.0;
        if !set.refine(share, opts)? {
            return Ok(result);
        }
    }
}

/// One enumeration pass over fixed truncated spectra.
pub fn n_eps_on(eps: f64, set: &SpectrumSet, opts: &ComplexityOptions) -> Result<ComplexityResult> {
    check_eps(eps)?;
    let factors = set.factors();
    let d = factors.len();
    let target = 1.0 - eps * eps;
    let log_trace = log_trace_product(&factors);
    let loss = truncation_loss_fraction(&factors);
    let mut stats = EnumerationStats {
        truncation: set.truncation(),
        truncation_loss_fraction: loss,
        log_trace_product: log_trace,
        ..Default::default()
    };
    if eps >= 1.0 {
        return Ok(ComplexityResult {
            eps,
            d,
            n: 0,
            achieved_squared_error_fraction: 1.0,
            certification: Certification::Certified,
            bracket: (0, 0),
            stats,
        });
    }
    // With exact eigenvalues, once the current product is at least as large
    // as anything outside the truncated grid, the enumerated prefix is the
    // true prefix and no truncation slack is needed.
    let log_outside = outside_bound(&factors);
    let mut it = ProductEnumerator::from_refs(factors)?;
    let mut captured = Neumaier::new();
    let mut n_lo = None;
    let mut n = 0usize;
    loop {
        if n >= opts.budget {
            return Err(Error::BudgetExhausted {
                budget: opts.budget,
            });
        }
        let Some(p) = it.next() else {
            // every truncated product used without reaching the target
            return Err(Error::GridExhausted {
                requested: n as u128 + 1,
                available: n as u128,
            });
        };
        n += 1;
        stats.max_frontier = stats.max_frontier.max(it.frontier_len());
        captured.add((p.log_value - log_trace).exp());
        let f = captured.value();
        if n_lo.is_none() && f + loss >= target {
            n_lo = Some(n);
        }
        if f >= target {
            stats.enumerated = n;
            let exact = log_outside.is_some_and(|b| p.log_value >= b);
            let lo = if exact { n } else { n_lo.unwrap_or(n) };
            let certification = if lo == n {
                Certification::Certified
            } else {
                Certification::TruncationLimited
            };
            return Ok(ComplexityResult {
                eps,
                d,
                n,
                achieved_squared_error_fraction: (1.0 - f).clamp(0.0, 1.0),
                certification,
                bracket: (lo, n),
                stats,
            });
        }
    }
}

/// Largest log product with some coordinate beyond its truncation, if all
/// factors are exact.
fn outside_bound(factors: &[&UnivariateSpectrum<f64>]) -> Option<f64> {
    let firsts: Vec<f64> = factors.iter().map(|s| s.log_eigenvalues()[0]).collect();
    let total: f64 = firsts.iter().sum();
    let mut best = f64::NEG_INFINITY;
    for (k, s) in factors.iter().enumerate() {
        best = best.max(s.log_next_exact()? + (total - firsts[k]));
    }
    // guard against rounding in the regrouped sum
    Some(best + 1e-12 * best.abs().max(1.0))
}

/// Normalized squared error of the optimal `n`-term algorithm as an interval
/// `[lower, upper]`, plus `√upper`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorOfN {
    pub lower: f64,
    pub upper: f64,
    pub normalized_error: f64,
}

pub fn error_of_n(
    n: usize,
    d: usize,
    process: Process,
    seq: &SmoothnessSequence,
    opts: &ComplexityOptions,
) -> Result<ErrorOfN> {
    if d == 0 {
        return invalid("d must be positive");
    }
    if n == 0 {
        return Ok(ErrorOfN {
            lower: 1.0,
            upper: 1.0,
            normalized_error: 1.0,
        });
    }
    if n > opts.budget {
        return Err(Error::BudgetExhausted {
            budget: opts.budget,
        });
    }
    let set = SpectrumSet::build(process, seq, d, 1e-12 / d as f64, opts)?;
    let factors = set.factors();
    let log_trace = log_trace_product(&factors);
    let loss = truncation_loss_fraction(&factors);
    let mut captured = Neumaier::new();
    let mut count = 0;
    for p in ProductEnumerator::from_refs(factors)?.take(n) {
        captured.add((p.log_value - log_trace).exp());
        count += 1;
    }
    if count < n {
        return Err(Error::GridExhausted {
            requested: n as u128,
            available: count as u128,
        });
    }
    let f = captured.value();
    let upper = (1.0 - f).clamp(0.0, 1.0);
    let lower = (1.0 - f - loss).clamp(0.0, 1.0);
    Ok(ErrorOfN {
        lower,
        upper,
        normalized_error: upper.sqrt(),
    })
}

/// `ln(1 − ε²) + Σ_k (ln Λ(k) − ln λ_{1,r_k})`, the log of a lower bound on `n(ε, d)`.
pub fn curse_lower_bound(
    eps: f64,
    d: usize,
    process: Process,
    seq: &SmoothnessSequence,
    wiener: WienerOptions,
) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return invalid(format!("eps must lie in (0, 1), got {eps}"));
    }
    let mut cache: BTreeMap<u64, f64> = BTreeMap::new();
    let mut acc = Neumaier::new();
    acc.add((-eps * eps).ln_1p());
    for r in seq.prefix(d) {
        let term = match cache.get(&r) {
            Some(&t) => t,
            None => {
                let r32 = u32::try_from(r)
                    .map_err(|_| Error::InvalidArgument(format!("smoothness {r} too large")))?;
                let s = spectrum::<f64>(process, r32, 1, wiener)?;
                let t = s.log_trace() - s.log_eigenvalues()[0];
                cache.insert(r, t);
                t
            }
        };
        acc.add(term);
    }
    Ok(acc.value())
}

pub const COMPLEXITY_SCHEMA: &str = "tractlab.v1.complexity";

/// JSON form `{eps, d, n, errorFraction, certified, bracket}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ComplexityRecord {
    pub eps: f64,
    pub d: usize,
    pub n: usize,
    pub error_fraction: f64,
    pub certified: bool,
    pub bracket: [usize; 2],
}

impl From<&ComplexityResult> for ComplexityRecord {
    fn from(r: &ComplexityResult) -> Self {
        Self {
            eps: r.eps,
            d: r.d,
            n: r.n,
            error_fraction: r.achieved_squared_error_fraction,
            certified: r.certification == Certification::Certified,
            bracket: [r.bracket.0, r.bracket.1],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn euler_const(r: u64) -> SmoothnessSequence {
        SmoothnessSequence::constant(r)
    }

    #[test]
    fn eps_one_needs_nothing() {
        let r = n_eps(
            1.0,
            3,
            Process::Euler,
            &euler_const(0),
            &ComplexityOptions::default(),
        )
        .unwrap();
        assert_eq!(r.n, 0);
        assert_eq!(r.certification, Certification::Certified);
        assert!(n_eps(
            1.5,
            3,
            Process::Euler,
            &euler_const(0),
            &ComplexityOptions::default()
        )
        .is_err());
        assert!(n_eps(
            0.0,
            3,
            Process::Euler,
            &euler_const(0),
            &ComplexityOptions::default()
        )
        .is_err());
    }

    #[test]
    fn one_dimensional_half() {
        // trace 1/2, λ₁ = 4/π²: one term leaves 0.0947 ≤ 0.125
        let r = n_eps(
            0.5,
            1,
            Process::Euler,
            &euler_const(0),
            &ComplexityOptions::default(),
        )
        .unwrap();
        assert_eq!(r.n, 1);
        assert_eq!(r.certification, Certification::Certified);
        assert!(r.achieved_squared_error_fraction <= 0.25);
    }

    #[test]
    fn error_of_n_examples() {
        let opts = ComplexityOptions::default();
        let e0 = error_of_n(0, 1, Process::Euler, &euler_const(0), &opts).unwrap();
        assert_eq!(e0.normalized_error, 1.0);
        let e1 = error_of_n(1, 1, Process::Euler, &euler_const(0), &opts).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        let expect = ((0.5 - 4.0 / pi2) / 0.5).sqrt();
        assert!((e1.normalized_error - expect).abs() < 1e-9);
        assert!(e1.lower <= e1.upper);
    }

    #[test]
    fn curse_bound_for_min_kernel() {
        let lb = curse_lower_bound(
            0.5,
            4,
            Process::Euler,
            &euler_const(0),
            WienerOptions::default(),
        )
        .unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((lb - (0.75f64.ln() + 4.0 * (pi2 / 8.0).ln())).abs() < 1e-13);
    }

    #[test]
    fn record_has_expected_fields() {
        let r = n_eps(
            0.5,
            2,
            Process::Euler,
            &euler_const(0),
            &ComplexityOptions::default(),
        )
        .unwrap();
        let json = serde_json::to_string(&ComplexityRecord::from(&r)).unwrap();
        for key in [
            "\"eps\"",
            "\"d\"",
            "\"n\"",
            "\"errorFraction\"",
            "\"certified\"",
            "\"bracket\"",
        ] {
            assert!(json.contains(key), "{json}");
        }
    }
}
