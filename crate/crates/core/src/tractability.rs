//! Tractability criteria evaluated over finite prefixes `k ≤ d`, and the
//! trend tests that turn criterion trajectories into verdicts.
//!
//! Every criterion is a sup over all `d` (or a convergence statement about
//! an infinite series); a prefix can only supply evidence, and the report
//! types say so.
//!
//! All per-coordinate quantities depend on `r_k` alone and are
//! non-increasing in `r`, so a sum over `k` is computed by bisecting `[a, b]`
//! until `r` is constant on a block (exact) or the summand varies by less
//! than a relative tolerance across it (midpoint with a rigorous bracket).
//! This handles prefixes far beyond what term-by-term summation allows.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::ln_plus;
use crate::smoothness::{RateMode, Rule, SmoothnessSequence, HALF_INV_LN3};
use crate::spectra::{odd_power_tail, wiener_spectrum, Process, WienerOptions};
use crate::sum::Neumaier;

fn ln3() -> f64 {
    3f64.ln()
}

fn ln_plus_d(d: u128) -> f64 {
    ln_plus(d as f64)
}

// ---------------------------------------------------------------------------
// Normalized univariate spectra
// ---------------------------------------------------------------------------

/// Normalized univariate spectrum `q_j = λ_j / λ_1` for `j ≥ 2`.
#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    /// `q_j = (2j−1)^{−s}`; the Euler case with `s = 2r+2`.
    Odd { s: f64 },
    /// Explicit `q_2..q_J`, continued by `q_j = q_J ((2J−1)/(2j−1))^s`.
    Table { q: Vec<f64>, s: f64 },
}

impl Profile {
    pub fn euler(r: u64) -> Self {
        Profile::Odd {
            s: 2.0 * r as f64 + 2.0,
        }
    }

    /// Decay exponent of the tail.
    pub fn exponent(&self) -> f64 {
        match self {
            Profile::Odd { s } | Profile::Table { s, .. } => *s,
        }
    }

    pub fn q2(&self) -> f64 {
        match self {
            Profile::Odd { s } => (-s * ln3()).exp(),
            Profile::Table { q, .. } => q.first().copied().unwrap_or(0.0),
        }
    }

    fn check_tau(&self, tau: f64) -> Result<()> {
        if !(tau > 0.0) || !(self.exponent() * tau > 1.0) {
            return invalid(format!(
                "τ = {tau} is outside the convergence range (need τ > {})",
                1.0 / self.exponent()
            ));
        }
        Ok(())
    }

    /// `(ln c, J)` for the modelled tail `q_j = c (2j−1)^{−s}`, `j > J`.
    fn table_tail(q: &[f64], s: f64) -> Option<(f64, u64)> {
        let last = *q.last()?;
        if last <= 0.0 {
            return None;
        }
        let jj = q.len() as u64 + 1;
        Some((last.ln() + s * ((2 * jj - 1) as f64).ln(), jj))
    }

    /// `Σ_{j≥2} q_j^τ`.
    pub fn tail_pow(&self, tau: f64) -> Result<f64> {
        self.check_tau(tau)?;
        match self {
            Profile::Odd { s } => Ok(odd_power_tail(s * tau, 2, false)?.0.exp()),
            Profile::Table { q, s } => {
                let mut acc = Neumaier::new();
                for &x in q {
                    acc.add(x.powf(tau));
                }
                if let Some((lc, jj)) = Self::table_tail(q, *s) {
                    let (ls, _) = odd_power_tail(s * tau, jj + 1, false)?;
                    acc.add((tau * lc + ls).exp());
                }
                Ok(acc.value())
            }
        }
    }

    /// `Σ_{j≥2} q_j ln q_j` (non-positive).
    fn weighted_log(&self) -> Result<f64> {
        match self {
            Profile::Odd { s } => Ok(-s * odd_power_tail(*s, 2, true)?.0.exp()),
            Profile::Table { q, s } => {
                let mut acc = Neumaier::new();
                for &x in q {
                    if x > 0.0 {
                        acc.add(x * x.ln());
                    }
                }
                if let Some((lc, jj)) = Self::table_tail(q, *s) {
                    let (ls, _) = odd_power_tail(*s, jj + 1, false)?;
                    let (lw, _) = odd_power_tail(*s, jj + 1, true)?;
                    acc.add(lc * (lc + ls).exp() - s * (lc + lw).exp());
                }
                Ok(acc.value())
            }
        }
    }

    /// `Σ_{j≥1} (λ_j/Λ) ln(Λ/λ_j)` with `Λ = Σ_j λ_j`.
    pub fn entropy(&self) -> Result<f64> {
        let t = self.tail_pow(1.0)?;
        let w = self.weighted_log()?;
        Ok(t.ln_1p() - w / (1.0 + t))
    }

    /// The `j = 2` term of [`Self::entropy`] alone.
    pub fn entropy_j2(&self) -> Result<f64> {
        let q2 = self.q2();
        if q2 <= 0.0 {
            return Ok(0.0);
        }
        let big_q = 1.0 + self.tail_pow(1.0)?;
        Ok(q2 / big_q * (big_q.ln() - q2.ln()))
    }
}

// ---------------------------------------------------------------------------
// Wiener ratio model
// ---------------------------------------------------------------------------

/// Largest `r` whose Wiener ratios are taken from the eigensolver directly.
pub const WIENER_RAW_MAX_R: u64 = 16;
const WIENER_RAW_LEN: usize = 8;
const WIENER_MODEL_LEN: usize = 6;

/// How Wiener ratios `λ_j/λ_1` are obtained for criterion sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WienerMode {
    /// Solver values up to [`WIENER_RAW_MAX_R`], then `q_j = κ_j r^{−2(j−1)}`
    /// with `κ_j` fitted at the last solved `r`.
    Fitted,
    /// Solver values for every `r` (slow; for cross-validation on short
    /// prefixes).
    Raw,
}

impl fmt::Display for WienerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WienerMode::Fitted => "fitted",
            WienerMode::Raw => "raw",
        })
    }
}

impl FromStr for WienerMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fitted" => Ok(WienerMode::Fitted),
            "raw" => Ok(WienerMode::Raw),
            _ => Err(Error::Parse {
                what: "wiener mode",
                input: s.into(),
                reason: "expected fitted or raw".into(),
            }),
        }
    }
}

/// Wiener ratio profile straight from the eigensolver.
pub fn wiener_raw_profile(r: u64, count: usize, tolerance: f64) -> Result<Profile> {
    if r == 0 {
        return Ok(Profile::Odd { s: 2.0 });
    }
    let r32 = u32::try_from(r)
        .map_err(|_| Error::InvalidArgument(format!("r = {r} is too large for the solver")))?;
    let opts = WienerOptions {
        tolerance,
        ..WienerOptions::default()
    };
    let sp = wiener_spectrum::<f64>(r32, count, opts)?;
    let l = sp.log_eigenvalues();
    let q = l[1..].iter().map(|x| (x - l[0]).exp()).collect();
    Ok(Profile::Table {
        q,
        s: 2.0 * r as f64 + 2.0,
    })
}

/// Solver profiles for `r ≤ WIENER_RAW_MAX_R` plus the fitted constants.
#[derive(Debug, Clone)]
pub struct WienerModel {
    raw: Vec<Profile>,
    kappa: Vec<f64>,
}

impl WienerModel {
    pub fn build() -> Result<Self> {
        let raw: Vec<Profile> = (0..=WIENER_RAW_MAX_R)
            .into_par_iter()
            .map(|r| wiener_raw_profile(r, WIENER_RAW_LEN, 1e-6))
            .collect::<Result<_>>()?;
        let rr = WIENER_RAW_MAX_R as f64;
        let kappa = match &raw[WIENER_RAW_MAX_R as usize] {
            Profile::Table { q, .. } => q
                .iter()
                .take(WIENER_MODEL_LEN - 1)
                .enumerate()
                .map(|(i, x)| x * rr.powi(2 * (i as i32 + 1)))
                .collect(),
            Profile::Odd { .. } => unreachable!("r > 0 gives a table"),
        };
        Ok(Self { raw, kappa })
    }

    /// `κ_j` for `j = 2..`.
    pub fn kappa(&self) -> &[f64] {
        &self.kappa
    }

    pub fn profile(&self, r: u64) -> Profile {
        if r <= WIENER_RAW_MAX_R {
            return self.raw[r as usize].clone();
        }
        let rf = r as f64;
        let q = self
            .kappa
            .iter()
            .enumerate()
            .map(|(i, k)| k * rf.powi(-2 * (i as i32 + 1)))
            .collect();
        Profile::Table {
            q,
            s: 2.0 * rf + 2.0,
        }
    }
}

static WIENER_MODEL: OnceLock<std::result::Result<WienerModel, Error>> = OnceLock::new();

/// The process-wide fitted Wiener model, built on first use.
pub fn wiener_model() -> Result<&'static WienerModel> {
    WIENER_MODEL
        .get_or_init(WienerModel::build)
        .as_ref()
        .map_err(Clone::clone)
}

/// Source of normalized profiles for one process.
pub struct Ratios {
    process: Process,
    mode: WienerMode,
    cache: RefCell<HashMap<u64, Profile>>,
}

impl Ratios {
    pub fn new(process: Process, mode: WienerMode) -> Result<Self> {
        if process == Process::Wiener {
            wiener_model()?;
        }
        Ok(Self {
            process,
            mode,
            cache: RefCell::new(HashMap::new()),
        })
    }

    pub fn process(&self) -> Process {
        self.process
    }

    pub fn profile(&self, r: u64) -> Result<Profile> {
        match self.process {
            Process::Euler => Ok(Profile::euler(r)),
            Process::Wiener => {
                if self.mode == WienerMode::Fitted || r <= WIENER_RAW_MAX_R {
                    return Ok(wiener_model()?.profile(r));
                }
                if let Some(p) = self.cache.borrow().get(&r) {
                    return Ok(p.clone());
                }
                let p = wiener_raw_profile(r, WIENER_MODEL_LEN, 1e-4)?;
                self.cache.borrow_mut().insert(r, p.clone());
                Ok(p)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Summation over k
// ---------------------------------------------------------------------------

/// An estimate with an absolute error bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub estimate: f64,
    pub error: f64,
}

impl Enclosure {
    pub fn exact(v: f64) -> Self {
        Self {
            estimate: v,
            error: 0.0,
        }
    }

    pub fn scale(self, c: f64) -> Self {
        Self {
            estimate: self.estimate * c,
            error: self.error * c.abs(),
        }
    }

    pub fn shift(self, c: f64) -> Self {
        Self {
            estimate: self.estimate + c,
            error: self.error,
        }
    }
}

struct Accum {
    value: Neumaier<f64>,
    error: f64,
}

impl Accum {
    fn new() -> Self {
        Self {
            value: Neumaier::new(),
            error: 0.0,
        }
    }

    fn get(&self) -> Enclosure {
        Enclosure {
            estimate: self.value.value(),
            error: self.error,
        }
    }
}

struct LevelSum<'a, G> {
    seq: &'a SmoothnessSequence,
    g: G,
    rel_tol: f64,
    memo: Option<(u64, f64)>,
}

impl<G: FnMut(u64) -> Result<f64>> LevelSum<'_, G> {
    fn eval(&mut self, r: u64) -> Result<f64> {
        if let Some((mr, v)) = self.memo {
            if mr == r {
                return Ok(v);
            }
        }
        let v = (self.g)(r)?;
        self.memo = Some((r, v));
        Ok(v)
    }

    fn add(&mut self, a: u128, b: u128, acc: &mut Accum) -> Result<()> {
        if a > b {
            return Ok(());
        }
        let ra = self.seq.value_at(a);
        let rb = self.seq.value_at(b);
        let ga = self.eval(ra)?;
        let gb = self.eval(rb)?;
        self.block(a, b, (ra, ga), (rb, gb), acc)
    }

    fn block(
        &mut self,
        a: u128,
        b: u128,
        lo: (u64, f64),
        hi: (u64, f64),
        acc: &mut Accum,
    ) -> Result<()> {
        let n = (b - a + 1) as f64;
        if lo.0 == hi.0 {
            acc.value.add(n * lo.1);
            return Ok(());
        }
        if b - a < 32 {
            for k in a..=b {
                let r = self.seq.value_at(k);
                let v = self.eval(r)?;
                acc.value.add(v);
            }
            return Ok(());
        }
        let spread = (lo.1 - hi.1).abs();
        if spread <= self.rel_tol * lo.1.abs().max(hi.1.abs()) {
            acc.value.add(n * 0.5 * (lo.1 + hi.1));
            acc.error += n * 0.5 * spread;
            return Ok(());
        }
        let mid = a + (b - a) / 2;
        let rm = self.seq.value_at(mid);
        let gm = self.eval(rm)?;
        let rn = self.seq.value_at(mid + 1);
        let gn = self.eval(rn)?;
        self.block(a, mid, lo, (rm, gm), acc)?;
        self.block(mid + 1, b, (rn, gn), hi, acc)
    }
}

/// `Σ_{k=a}^{b} g(r_k)` for `g` non-increasing in `r`. With `rel_tol = 0`
/// the sum is exact up to rounding.
pub fn sum_over_k<G: FnMut(u64) -> Result<f64>>(
    seq: &SmoothnessSequence,
    a: u128,
    b: u128,
    g: G,
    rel_tol: f64,
) -> Result<Enclosure> {
    let mut s = LevelSum {
        seq,
        g,
        rel_tol,
        memo: None,
    };
    let mut acc = Accum::new();
    s.add(a.max(1), b, &mut acc)?;
    Ok(acc.get())
}

/// Partial sums `Σ_{k≤d} g(r_k)` at every `d` of an ascending grid.
pub fn partial_sums<G: FnMut(u64) -> Result<f64>>(
    seq: &SmoothnessSequence,
    d_grid: &[u128],
    g: G,
    rel_tol: f64,
) -> Result<Vec<Enclosure>> {
    check_grid(d_grid)?;
    let mut s = LevelSum {
        seq,
        g,
        rel_tol,
        memo: None,
    };
    let mut acc = Accum::new();
    let mut prev = 0u128;
    let mut out = Vec::with_capacity(d_grid.len());
    for &d in d_grid {
        s.add(prev + 1, d, &mut acc)?;
        prev = d;
        out.push(acc.get());
    }
    Ok(out)
}

fn check_grid(d_grid: &[u128]) -> Result<()> {
    if d_grid.is_empty() {
        return invalid("d grid is empty");
    }
    if d_grid[0] == 0 || d_grid.windows(2).any(|w| w[1] <= w[0]) {
        return invalid("d grid must be strictly ascending and start at d >= 1");
    }
    Ok(())
}

/// Roughly `per_decade` log-spaced integers from 1 to `d_max` (inclusive).
pub fn log_grid(d_max: u128, per_decade: usize) -> Vec<u128> {
    let top = (d_max.max(1) as f64).log10();
    let steps = ((top * per_decade as f64).ceil() as usize).max(1);
    let mut out: Vec<u128> = (0..=steps)
        .map(|i| 10f64.powf(top * i as f64 / steps as f64).round() as u128)
        .collect();
    out.push(d_max.max(1));
    out.retain(|&d| d >= 1 && d <= d_max.max(1));
    out.sort_unstable();
    out.dedup();
    out
}

/// Default tolerance for sums over `k`: exact on runs, `1e-9` relative
/// across blocks where `r` changes.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

/// `(1 + r) 3^{−2r}`.
pub fn euler_quasi_summand(r: u64) -> f64 {
    let rf = r as f64;
    (1.0 + rf) * (-2.0 * rf * ln3()).exp()
}

/// `(1 + r)^{−2} ln₊r`.
pub fn wiener_quasi_summand(r: u64) -> f64 {
    let rf = r as f64;
    ln_plus(rf) / ((1.0 + rf) * (1.0 + rf))
}

/// `3^{−2τr}`.
pub fn spt_summand(r: u64, tau: f64) -> f64 {
    (-2.0 * tau * r as f64 * ln3()).exp()
}

fn check_d(d: u128) -> Result<()> {
    if d == 0 {
        return invalid("d must be at least 1");
    }
    Ok(())
}

/// `(1/ln₊d) Σ_{k≤d} (1+r_k) 3^{−2r_k}`.
pub fn euler_quasi_criterion(seq: &SmoothnessSequence, d: u128) -> Result<f64> {
    check_d(d)?;
    let s = sum_over_k(seq, 1, d, |r| Ok(euler_quasi_summand(r)), 0.0)?;
    Ok(s.estimate / ln_plus_d(d))
}

/// `(1/ln₊d) Σ_{k≤d} (1+r_k)^{−2} ln₊r_k`.
pub fn wiener_quasi_criterion(seq: &SmoothnessSequence, d: u128) -> Result<f64> {
    check_d(d)?;
    let s = sum_over_k(seq, 1, d, |r| Ok(wiener_quasi_summand(r)), 0.0)?;
    Ok(s.estimate / ln_plus_d(d))
}

/// The quasi criterion of `process` over a grid of `d`.
pub fn quasi_trajectory(
    process: Process,
    seq: &SmoothnessSequence,
    d_grid: &[u128],
    rel_tol: f64,
) -> Result<Vec<Enclosure>> {
    let sums = match process {
        Process::Euler => partial_sums(seq, d_grid, |r| Ok(euler_quasi_summand(r)), rel_tol)?,
        Process::Wiener => partial_sums(seq, d_grid, |r| Ok(wiener_quasi_summand(r)), rel_tol)?,
    };
    Ok(sums
        .into_iter()
        .zip(d_grid)
        .map(|(s, &d)| s.scale(1.0 / ln_plus_d(d)))
        .collect())
}

fn check_open_unit(name: &str, tau: f64) -> Result<()> {
    if !(tau > 0.0 && tau < 1.0) {
        return invalid(format!("{name} must lie in (0, 1), got {tau}"));
    }
    Ok(())
}

/// `Σ_{k≤K} 3^{−2τ r_k}`.
pub fn spt_sum_euler(seq: &SmoothnessSequence, tau: f64, k_max: u128) -> Result<f64> {
    check_open_unit("τ", tau)?;
    check_d(k_max)?;
    Ok(sum_over_k(seq, 1, k_max, |r| Ok(spt_summand(r, tau)), 0.0)?.estimate)
}

/// Partial sums of [`spt_sum_euler`] over a grid.
pub fn spt_trajectory(
    seq: &SmoothnessSequence,
    tau: f64,
    d_grid: &[u128],
    rel_tol: f64,
) -> Result<Vec<Enclosure>> {
    check_open_unit("τ", tau)?;
    partial_sums(seq, d_grid, |r| Ok(spt_summand(r, tau)), rel_tol)
}

/// Exponent of strong polynomial tractability for the Euler process,
/// `max(2/(2r₁+1), 2/(2a ln 3 − 1))`; `a = ∞` is allowed.
pub fn euler_spt_exponent(r1: u64, a_e: f64) -> Result<f64> {
    if a_e.is_nan() || a_e <= HALF_INV_LN3 {
        return invalid(format!(
            "rate {a_e} does not exceed 1/(2 ln 3); no strong polynomial tractability"
        ));
    }
    let first = 2.0 / (2.0 * r1 as f64 + 1.0);
    if a_e.is_infinite() {
        return Ok(first);
    }
    let denom = 2.0 * a_e * ln3() - 1.0;
    // a = (r₁+1)/ln 3 makes both arguments equal; keep rounding from
    // picking the wrong one.
    if (denom - (2.0 * r1 as f64 + 1.0)).abs() <= 1e-12 * denom {
        return Ok(first);
    }
    Ok(first.max(2.0 / denom))
}

/// Interval `[lo, hi]` for the Wiener exponent of strong polynomial
/// tractability when `r_k ≳ k^s`, `s > 1/2`.
pub fn wiener_spt_exponent_bounds(r1: u64, s: f64) -> Result<(f64, f64)> {
    if !(s > 0.5) || !s.is_finite() {
        return invalid(format!("s = {s} must exceed 1/2"));
    }
    let v = 2.0 / (2.0 * s - 1.0);
    let lo = (2.0 / (2.0 * r1 as f64 + 1.0)).max(v);
    let hi = v.max(3.0);
    if hi - lo <= 1e-12 * hi {
        return Ok((hi, hi));
    }
    Ok((lo, hi))
}

fn check_tau_for(seq: &SmoothnessSequence, tau: f64) -> Result<()> {
    check_open_unit("τ", tau)?;
    let r1 = seq.value(1);
    if !(tau > 1.0 / (2.0 * r1 as f64 + 2.0)) {
        return invalid(format!(
            "τ = {tau} must exceed 1/(2r₁+2) = {}",
            1.0 / (2.0 * r1 as f64 + 2.0)
        ));
    }
    Ok(())
}

/// `(1/τ) ln Σλ^τ − ln Σλ` for one factor.
pub fn poly_factor(p: &Profile, tau: f64) -> Result<f64> {
    let a = p.tail_pow(tau)?;
    let b = p.tail_pow(1.0)?;
    Ok(a.ln_1p() / tau - b.ln_1p())
}

/// `ln Σλ^τ − τ ln Σλ` for one factor.
pub fn quasi_factor(p: &Profile, tau: f64) -> Result<f64> {
    let a = p.tail_pow(tau)?;
    let b = p.tail_pow(1.0)?;
    Ok(a.ln_1p() - tau * b.ln_1p())
}

/// Partial sums of `Σ_{k≤d} ln[(Σ_j λ_{j,k}^τ)^{1/τ} / Σ_j λ_{j,k}]`.
pub fn log_poly_trajectory(
    ratios: &Ratios,
    seq: &SmoothnessSequence,
    tau: f64,
    d_grid: &[u128],
    rel_tol: f64,
) -> Result<Vec<Enclosure>> {
    check_tau_for(seq, tau)?;
    partial_sums(
        seq,
        d_grid,
        |r| poly_factor(&ratios.profile(r)?, tau),
        rel_tol,
    )
}

/// `ln` of the polynomial-tractability candidate
/// `(Σ λ_{d,j}^τ)^{1/τ} / Σ λ_{d,j} · d^{−q}`, from the product form.
pub fn poly_log_criterion(
    process: Process,
    seq: &SmoothnessSequence,
    tau: f64,
    q: f64,
    d: u128,
) -> Result<f64> {
    check_d(d)?;
    if !(q >= 0.0) {
        return invalid("q must be non-negative");
    }
    let ratios = Ratios::new(process, WienerMode::Fitted)?;
    let s = log_poly_trajectory(&ratios, seq, tau, &[d], DEFAULT_REL_TOL)?[0];
    Ok(s.estimate - q * (d as f64).ln())
}

/// The polynomial-tractability candidate itself (may overflow to `inf`).
pub fn poly_criterion(
    process: Process,
    seq: &SmoothnessSequence,
    tau: f64,
    q: f64,
    d: u128,
) -> Result<f64> {
    poly_log_criterion(process, seq, tau, q, d).map(f64::exp)
}

/// `((τC/(1−τ))^{τ/(1−τ)} + 1) d^{qτ/(1−τ)} ε^{−2τ/(1−τ)}`.
pub fn poly_n_bound(c: f64, tau: f64, q: f64, d: u128, eps: f64) -> f64 {
    let e = tau / (1.0 - tau);
    ((tau * c / (1.0 - tau)).powf(e) + 1.0) * (d as f64).powf(q * e) * eps.powf(-2.0 * e)
}

fn check_weak_tau(process: Process, tau: f64) -> Result<()> {
    let lo = match process {
        Process::Euler => 0.5,
        Process::Wiener => 0.6,
    };
    if !(tau > lo && tau < 1.0) {
        return invalid(format!(
            "τ = {tau} must lie in ({lo}, 1) for the {process} weak criterion"
        ));
    }
    Ok(())
}

/// Partial sums of `Σ_{k≤d} Σ_{j≥2} (λ_{j,k}/λ_{1,k})^τ`, divided by `d`.
pub fn weak_trajectory(
    ratios: &Ratios,
    seq: &SmoothnessSequence,
    tau: f64,
    d_grid: &[u128],
    rel_tol: f64,
) -> Result<Vec<Enclosure>> {
    check_weak_tau(ratios.process(), tau)?;
    let sums = partial_sums(seq, d_grid, |r| ratios.profile(r)?.tail_pow(tau), rel_tol)?;
    Ok(sums
        .into_iter()
        .zip(d_grid)
        .map(|(s, &d)| s.scale(1.0 / d as f64))
        .collect())
}

/// `(1/d) Σ_{k≤d} Σ_{j≥2} (λ_{j,k}/λ_{1,k})^τ`.
pub fn weak_criterion(
    process: Process,
    seq: &SmoothnessSequence,
    tau: f64,
    d: u128,
) -> Result<f64> {
    check_d(d)?;
    let ratios = Ratios::new(process, WienerMode::Fitted)?;
    Ok(weak_trajectory(&ratios, seq, tau, &[d], DEFAULT_REL_TOL)?[0].estimate)
}

/// `ln` of `Σ λ_{d,j}^{τ} / (Σ λ_{d,j})^{τ}` with `τ = 1 − δ/ln₊d`.
pub fn qpt_log_criterion_general(
    process: Process,
    seq: &SmoothnessSequence,
    delta: f64,
    d: u128,
) -> Result<f64> {
    let ratios = Ratios::new(process, WienerMode::Fitted)?;
    qpt_log_criterion_with(&ratios, seq, delta, d, DEFAULT_REL_TOL).map(|e| e.estimate)
}

/// [`qpt_log_criterion_general`] with an explicit ratio source.
pub fn qpt_log_criterion_with(
    ratios: &Ratios,
    seq: &SmoothnessSequence,
    delta: f64,
    d: u128,
    rel_tol: f64,
) -> Result<Enclosure> {
    check_d(d)?;
    if !(delta > 0.0) {
        return invalid("δ must be positive");
    }
    let tau = 1.0 - delta / ln_plus_d(d);
    let r1 = seq.value(1);
    if !(tau > 1.0 / (2.0 * r1 as f64 + 2.0)) {
        return invalid(format!(
            "exponent 1 − δ/ln₊d = {tau} does not exceed 1/(2r₁+2)"
        ));
    }
    sum_over_k(
        seq,
        1,
        d,
        |r| quasi_factor(&ratios.profile(r)?, tau),
        rel_tol,
    )
}

/// The general quasi-polynomial criterion (may overflow to `inf`).
pub fn qpt_criterion_general(
    process: Process,
    seq: &SmoothnessSequence,
    delta: f64,
    d: u128,
) -> Result<f64> {
    qpt_log_criterion_general(process, seq, delta, d).map(f64::exp)
}

/// Necessary-condition sums for quasi-polynomial tractability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NecessarySums {
    /// `(1/ln₊d) Σ_k Σ_j (λ_{j,k}/Λ_k) ln(Λ_k/λ_{j,k})`
    pub full: f64,
    /// Only the `j = 2` terms.
    pub j2: f64,
}

pub fn qpt_necessary_sum(
    process: Process,
    seq: &SmoothnessSequence,
    d: u128,
) -> Result<NecessarySums> {
    check_d(d)?;
    let ratios = Ratios::new(process, WienerMode::Fitted)?;
    let full = sum_over_k(seq, 1, d, |r| ratios.profile(r)?.entropy(), DEFAULT_REL_TOL)?;
    let j2 = sum_over_k(
        seq,
        1,
        d,
        |r| ratios.profile(r)?.entropy_j2(),
        DEFAULT_REL_TOL,
    )?;
    let l = ln_plus_d(d);
    Ok(NecessarySums {
        full: full.estimate / l,
        j2: j2.estimate / l,
    })
}

// ---------------------------------------------------------------------------
// Trend tests
// ---------------------------------------------------------------------------

/// Least-squares slope of `ln W` against `ln ln₊d` over the top decade of
/// the grid. `−∞` if the trajectory has vanished; `None` if there are too
/// few points or non-positive values.
pub fn trend_slope(d_grid: &[u128], values: &[f64]) -> Option<f64> {
    let d_max = *d_grid.last()? as f64;
    let pts: Vec<(f64, f64)> = d_grid
        .iter()
        .zip(values)
        .filter(|(&d, _)| d as f64 >= d_max / 10.0)
        .map(|(&d, &v)| (ln_plus(d as f64).ln(), v))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    if pts.last()?.1 == 0.0 {
        return Some(f64::NEG_INFINITY);
    }
    if pts.iter().any(|p| !(p.1 > 0.0)) {
        return None;
    }
    slope(&pts.iter().map(|&(x, v)| (x, v.ln())).collect::<Vec<_>>())
}

fn slope(pts: &[(f64, f64)]) -> Option<f64> {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return None;
    }
    Some(sxy / sxx)
}

/// Block sums `B_m = Σ_{2^m ≤ k < 2^{m+1}} t(r_k)` and the exponent `β` of
/// the fit `B_m ≈ m^{−β}` over the upper half of the blocks. For a
/// non-increasing series, `Σ t` converges iff `Σ B_m` does, so `β > 1`
/// indicates convergence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condensation {
    pub blocks: Vec<f64>,
    pub beta: f64,
}

pub fn condensation<G: FnMut(u64) -> Result<f64>>(
    seq: &SmoothnessSequence,
    k_max: u128,
    g: G,
    rel_tol: f64,
) -> Result<Condensation> {
    let m_count = (u128::BITS - (k_max.saturating_add(1)).leading_zeros() - 1) as usize;
    if m_count < 4 {
        return invalid("condensation test needs K >= 15");
    }
    let mut s = LevelSum {
        seq,
        g,
        rel_tol,
        memo: None,
    };
    let mut blocks = Vec::with_capacity(m_count);
    for m in 0..m_count {
        let a = 1u128 << m;
        let mut acc = Accum::new();
        s.add(a, 2 * a - 1, &mut acc)?;
        blocks.push(acc.get().estimate);
    }
    let beta = if *blocks.last().unwrap() == 0.0 {
        f64::INFINITY
    } else {
        let from = (m_count / 2).max(1);
        let pts: Vec<(f64, f64)> = (from..m_count)
            .filter(|&m| blocks[m] > 0.0)
            .map(|m| ((m as f64).ln(), blocks[m].ln()))
            .collect();
        -slope(&pts).unwrap_or(f64::NAN)
    };
    Ok(Condensation { blocks, beta })
}

// ---------------------------------------------------------------------------
// Verdicts
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    EvidenceFor,
    EvidenceAgainst,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::EvidenceFor => "EvidenceFor",
            Verdict::EvidenceAgainst => "EvidenceAgainst",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

/// Tractability notions, strongest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Notion {
    Spt,
    Pt,
    Qpt,
    Weak,
}

impl Notion {
    pub const ALL: [Notion; 4] = [Notion::Spt, Notion::Pt, Notion::Qpt, Notion::Weak];
}

impl fmt::Display for Notion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Notion::Spt => "spt",
            Notion::Pt => "pt",
            Notion::Qpt => "qpt",
            Notion::Weak => "weak",
        })
    }
}

impl FromStr for Notion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spt" => Ok(Notion::Spt),
            "pt" => Ok(Notion::Pt),
            "qpt" => Ok(Notion::Qpt),
            "weak" => Ok(Notion::Weak),
            _ => Err(Error::Parse {
                what: "notion",
                input: s.into(),
                reason: "expected spt, pt, qpt or weak".into(),
            }),
        }
    }
}

/// Outcome of a boundedness trend test on a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Bounded,
    Divergent,
    Unclear,
}

impl fmt::Display for Trend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Trend::Bounded => "bounded",
            Trend::Divergent => "divergent",
            Trend::Unclear => "unclear",
        })
    }
}

/// Thresholds for the trend tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyConfig {
    /// `τ` values tried for the series and polynomial criteria.
    pub taus: Vec<f64>,
    pub weak_tau: f64,
    /// Trend slope below which a trajectory counts as bounded.
    pub bounded_slope: f64,
    /// Trend slope above which a trajectory counts as divergent.
    pub divergent_slope: f64,
    /// Condensation exponent at or above which a series counts as convergent.
    pub convergent_beta: f64,
    /// Condensation exponent at or below which a series counts as divergent.
    pub divergent_beta: f64,
    pub rel_tol: f64,
    pub wiener_mode: WienerMode,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self {
            taus: vec![0.7, 0.9, 0.99],
            weak_tau: 0.9,
            bounded_slope: 0.05,
            divergent_slope: 0.2,
            convergent_beta: 1.5,
            divergent_beta: 0.9,
            rel_tol: 1e-7,
            wiener_mode: WienerMode::Fitted,
        }
    }
}

impl ClassifyConfig {
    pub fn bounded_trend(&self, slope: Option<f64>) -> Trend {
        match slope {
            Some(s) if s < self.bounded_slope => Trend::Bounded,
            Some(s) if s > self.divergent_slope => Trend::Divergent,
            _ => Trend::Unclear,
        }
    }

    /// Weak tractability wants the normalized trajectory to vanish: a slope
    /// below `−divergent_slope` counts as decay, one above `−bounded_slope`
    /// as no decay.
    pub fn vanishing_trend(&self, slope: Option<f64>) -> Trend {
        match slope {
            Some(s) if s < -self.divergent_slope => Trend::Bounded,
            Some(s) if s > -self.bounded_slope => Trend::Divergent,
            _ => Trend::Unclear,
        }
    }

    pub fn series_trend(&self, beta: f64) -> Trend {
        if beta >= self.convergent_beta {
            Trend::Bounded
        } else if beta <= self.divergent_beta {
            Trend::Divergent
        } else {
            Trend::Unclear
        }
    }
}

/// A criterion evaluated over the report's `d` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub name: String,
    pub values: Vec<Enclosure>,
    /// Top-decade slope of `ln value` against `ln ln₊d`.
    pub slope: Option<f64>,
}

/// Condensation result for one series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesTest {
    pub name: String,
    pub tau: f64,
    pub beta: f64,
    pub trend: Trend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NotionVerdict {
    pub notion: Notion,
    pub verdict: Verdict,
    /// Names of the trajectories or series tests behind the verdict.
    pub basis: Vec<String>,
    pub detail: String,
}

/// Exponent data for strong polynomial tractability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentData {
    pub r1: u64,
    /// Prefix estimate of the rate (`min r_k/ln k` for Euler, the rule's `s`
    /// for Wiener).
    pub rate: f64,
    pub lo: f64,
    pub hi: f64,
}

pub const EVIDENCE_NOTE: &str = "finite-prefix evidence; not a proof of the asymptotic statement";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TractabilityReport {
    pub process: Process,
    pub sequence: String,
    pub d_grid: Vec<u128>,
    pub trajectories: Vec<Trajectory>,
    pub series: Vec<SeriesTest>,
    pub verdicts: Vec<NotionVerdict>,
    pub exponent: Option<ExponentData>,
    pub note: String,
}

impl TractabilityReport {
    pub fn verdict(&self, notion: Notion) -> Verdict {
        self.verdicts
            .iter()
            .find(|v| v.notion == notion)
            .map_or(Verdict::Inconclusive, |v| v.verdict)
    }

    pub fn trajectory(&self, name: &str) -> Option<&Trajectory> {
        self.trajectories.iter().find(|t| t.name == name)
    }

    /// Breaks of `SPT ⇒ PT ⇒ QPT ⇒ weak`: evidence for a stronger notion
    /// must come with evidence for every weaker one, and evidence against a
    /// weaker notion with evidence against every stronger one.
    pub fn implication_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, &strong) in Notion::ALL.iter().enumerate() {
            for &weak in &Notion::ALL[i + 1..] {
                let (vs, vw) = (self.verdict(strong), self.verdict(weak));
                if vs == Verdict::EvidenceFor && vw != Verdict::EvidenceFor {
                    out.push(format!("{strong} is {vs} but {weak} is {vw}"));
                } else if vw == Verdict::EvidenceAgainst && vs != Verdict::EvidenceAgainst {
                    out.push(format!("{weak} is {vw} but {strong} is {vs}"));
                }
            }
        }
        out
    }
}

fn named(name: String, values: Vec<Enclosure>, d_grid: &[u128]) -> Trajectory {
    let est: Vec<f64> = values.iter().map(|e| e.estimate).collect();
    let slope = trend_slope(d_grid, &est);
    Trajectory {
        name,
        values,
        slope,
    }
}

fn slope_detail(slope: Option<f64>) -> String {
    match slope {
        Some(s) => format!("slope {s:.4}"),
        None => "slope undefined".to_string(),
    }
}

fn verdict_of(trend: Trend) -> Verdict {
    match trend {
        Trend::Bounded => Verdict::EvidenceFor,
        Trend::Divergent => Verdict::EvidenceAgainst,
        Trend::Unclear => Verdict::Inconclusive,
    }
}

/// Runs the criteria for every notion over `d_grid` and applies the trend
/// tests.
///
/// * SPT: condensation test on `Σ_k 3^{−2τ r_k}` (Euler) or on the
///   per-factor polynomial criterion terms (Wiener), for each `τ`.
/// * PT: evidence for SPT, or else the polynomial criterion normalized by
///   `ln₊d`; since both processes have PT ⇔ SPT, a bounded normalized
///   criterion alongside divergent SPT series is reported as inconclusive.
/// * QPT: the specialized quasi criterion.
/// * weak: the normalized weak criterion must vanish.
pub fn classify(
    process: Process,
    seq: &SmoothnessSequence,
    d_grid: &[u128],
    config: &ClassifyConfig,
) -> Result<TractabilityReport> {
    check_grid(d_grid)?;
    let d_max = *d_grid.last().unwrap();
    let ratios = Ratios::new(process, config.wiener_mode)?;
    let tol = config.rel_tol;
    let r1 = seq.value(1);
    let taus: Vec<f64> = config
        .taus
        .iter()
        .copied()
        .filter(|&t| t > 0.0 && t < 1.0 && t > 1.0 / (2.0 * r1 as f64 + 2.0))
        .collect();

    let mut trajectories = Vec::new();
    let mut series = Vec::new();
    let mut verdicts = Vec::new();

    // SPT
    for &tau in &taus {
        let (name, cond) = match process {
            Process::Euler => {
                let name = format!("spt-sum:tau={tau}");
                trajectories.push(named(
                    name.clone(),
                    spt_trajectory(seq, tau, d_grid, tol)?,
                    d_grid,
                ));
                (
                    name,
                    condensation(seq, d_max, |r| Ok(spt_summand(r, tau)), tol)?,
                )
            }
            Process::Wiener => {
                let name = format!("log-poly:tau={tau}");
                (
                    name,
                    condensation(seq, d_max, |r| poly_factor(&ratios.profile(r)?, tau), tol)?,
                )
            }
        };
        series.push(SeriesTest {
            name,
            tau,
            beta: cond.beta,
            trend: config.series_trend(cond.beta),
        });
    }
    let spt = if series.iter().any(|s| s.trend == Trend::Bounded) {
        Verdict::EvidenceFor
    } else if !series.is_empty() && series.iter().all(|s| s.trend == Trend::Divergent) {
        Verdict::EvidenceAgainst
    } else {
        Verdict::Inconclusive
    };
    verdicts.push(NotionVerdict {
        notion: Notion::Spt,
        verdict: spt,
        basis: series.iter().map(|s| s.name.clone()).collect(),
        detail: series
            .iter()
            .map(|s| format!("tau={} beta={:.4} {}", s.tau, s.beta, s.trend))
            .collect::<Vec<_>>()
            .join("; "),
    });

    // PT
    let mut pt_trends = Vec::new();
    let mut pt_basis = Vec::new();
    for &tau in &taus {
        let logc = log_poly_trajectory(&ratios, seq, tau, d_grid, tol)?;
        let normalized: Vec<Enclosure> = logc
            .iter()
            .zip(d_grid)
            .map(|(e, &d)| e.scale(1.0 / ln_plus_d(d)))
            .collect();
        let t = named(format!("log-poly-normalized:tau={tau}"), normalized, d_grid);
        pt_trends.push(config.bounded_trend(t.slope));
        pt_basis.push(t.name.clone());
        trajectories.push(named(format!("log-poly:tau={tau}"), logc, d_grid));
        trajectories.push(t);
    }
    let pt_bounded = pt_trends.iter().any(|t| *t == Trend::Bounded);
    let pt_divergent = !pt_trends.is_empty() && pt_trends.iter().all(|t| *t == Trend::Divergent);
    let (pt, pt_detail) = match spt {
        Verdict::EvidenceFor => (
            Verdict::EvidenceFor,
            "implied by the SPT evidence".to_string(),
        ),
        _ if pt_divergent => (
            Verdict::EvidenceAgainst,
            "normalized polynomial criterion diverges for every tau".to_string(),
        ),
        Verdict::EvidenceAgainst if pt_bounded => (
            Verdict::Inconclusive,
            "normalized polynomial criterion looks bounded while the SPT series diverge"
                .to_string(),
        ),
        _ if pt_bounded => (
            Verdict::EvidenceFor,
            "normalized polynomial criterion bounded".to_string(),
        ),
        _ => (
            Verdict::Inconclusive,
            "no tau gives a clear trend".to_string(),
        ),
    };
    verdicts.push(NotionVerdict {
        notion: Notion::Pt,
        verdict: pt,
        basis: pt_basis,
        detail: pt_detail,
    });

    // QPT
    let quasi = named(
        format!("{process}-quasi"),
        quasi_trajectory(process, seq, d_grid, tol)?,
        d_grid,
    );
    let qpt_trend = config.bounded_trend(quasi.slope);
    verdicts.push(NotionVerdict {
        notion: Notion::Qpt,
        verdict: verdict_of(qpt_trend),
        basis: vec![quasi.name.clone()],
        detail: slope_detail(quasi.slope),
    });
    trajectories.push(quasi);

    // weak
    let weak = named(
        format!("weak:tau={}", config.weak_tau),
        weak_trajectory(&ratios, seq, config.weak_tau, d_grid, tol)?,
        d_grid,
    );
    let weak_trend = config.vanishing_trend(weak.slope);
    verdicts.push(NotionVerdict {
        notion: Notion::Weak,
        verdict: verdict_of(weak_trend),
        basis: vec![weak.name.clone()],
        detail: slope_detail(weak.slope),
    });
    trajectories.push(weak);

    let exponent = if spt == Verdict::EvidenceFor {
        exponent_data(process, seq, d_max)
    } else {
        None
    };

    Ok(TractabilityReport {
        process,
        sequence: seq.to_string(),
        d_grid: d_grid.to_vec(),
        trajectories,
        series,
        verdicts,
        exponent,
        note: EVIDENCE_NOTE.to_string(),
    })
}

fn exponent_data(process: Process, seq: &SmoothnessSequence, d_max: u128) -> Option<ExponentData> {
    let r1 = seq.value(1);
    match process {
        Process::Euler => {
            let k = u64::try_from(d_max).unwrap_or(u64::MAX).max(2);
            let rate = match seq.rule() {
                Rule::Constant(_) => return None,
                _ => seq.rate_estimate(RateMode::LogRate, k).ok()?,
            };
            let p = euler_spt_exponent(r1, rate).ok()?;
            Some(ExponentData {
                r1,
                rate,
                lo: p,
                hi: p,
            })
        }
        Process::Wiener => {
            let s = match seq.rule() {
                Rule::PowerWiener { s } | Rule::Power { s, .. } => *s,
                _ => return None,
            };
            let (lo, hi) = wiener_spt_exponent_bounds(r1, s).ok()?;
            Some(ExponentData {
                r1,
                rate: s,
                lo,
                hi,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> SmoothnessSequence {
        s.parse().unwrap()
    }

    #[test]
    fn quasi_criteria_closed_forms() {
        let zero = SmoothnessSequence::constant(0);
        assert_eq!(euler_quasi_criterion(&zero, 2).unwrap(), 2.0);
        let v = euler_quasi_criterion(&zero, 1000).unwrap();
        assert!((v - 1000.0 / 1000f64.ln()).abs() < 1e-12);
        let w = wiener_quasi_criterion(&zero, 1000).unwrap();
        assert!((w - 1000.0 / 1000f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn geometric_spt_sum() {
        // r_k = k, τ = 1/2: Σ 3^{−k} → 1/2
        let s = seq("power:c=1,s=1");
        let v = spt_sum_euler(&s, 0.5, 200).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert_eq!(
            spt_sum_euler(&SmoothnessSequence::constant(0), 0.3, 77).unwrap(),
            77.0
        );
    }

    #[test]
    fn approximate_sums_bracket_exact() {
        let s = seq("power-wiener:s=0.4");
        let exact = sum_over_k(&s, 1, 10_000_000, |r| Ok(wiener_quasi_summand(r)), 0.0).unwrap();
        let approx = sum_over_k(&s, 1, 10_000_000, |r| Ok(wiener_quasi_summand(r)), 1e-3).unwrap();
        assert!(approx.error > 0.0);
        assert!((approx.estimate - exact.estimate).abs() <= approx.error + 1e-12);
    }

    #[test]
    fn exponents() {
        assert_eq!(euler_spt_exponent(0, f64::INFINITY).unwrap(), 2.0);
        for r1 in 0..6 {
            let a = (r1 as f64 + 1.0) / 3f64.ln();
            assert_eq!(
                euler_spt_exponent(r1, a).unwrap(),
                2.0 / (2.0 * r1 as f64 + 1.0)
            );
        }
        assert!(euler_spt_exponent(0, HALF_INV_LN3 + 1e-6).unwrap() > 1e5);
        assert!(euler_spt_exponent(0, 0.4).is_err());
        assert_eq!(wiener_spt_exponent_bounds(1, 0.75).unwrap(), (4.0, 4.0));
        assert_eq!(wiener_spt_exponent_bounds(0, 1.0).unwrap(), (2.0, 3.0));
        assert_eq!(
            wiener_spt_exponent_bounds(1, 5.0 / 6.0).unwrap(),
            (3.0, 3.0)
        );
        assert!(wiener_spt_exponent_bounds(1, 0.5).is_err());
    }

    #[test]
    fn euler_profile_matches_direct_sums() {
        let p = Profile::euler(1);
        let direct: f64 = (2..200_000u64)
            .map(|j| ((2 * j - 1) as f64).powf(-4.0 * 0.9))
            .sum();
        assert!((p.tail_pow(0.9).unwrap() / direct - 1.0).abs() < 1e-9);
        // entropy from its definition
        let lam: Vec<f64> = (1..200_000u64)
            .map(|j| ((2 * j - 1) as f64).powf(-4.0))
            .collect();
        let big: f64 = lam.iter().sum();
        let h: f64 = lam.iter().map(|l| l / big * (big / l).ln()).sum();
        assert!((p.entropy().unwrap() - h).abs() < 1e-12);
        assert!(p.entropy_j2().unwrap() <= p.entropy().unwrap());
    }

    #[test]
    fn table_profile_tail_matches_odd() {
        // A table holding the exact Euler ratios reproduces the Odd sums.
        let s = 6.0;
        let q: Vec<f64> = (2..=7u64).map(|j| ((2 * j - 1) as f64).powf(-s)).collect();
        let t = Profile::Table { q, s };
        let o = Profile::Odd { s };
        for tau in [0.5, 0.8, 1.0] {
            assert!((t.tail_pow(tau).unwrap() / o.tail_pow(tau).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!((t.entropy().unwrap() / o.entropy().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poly_criterion_examples() {
        for r in [0u64, 2] {
            let v = poly_criterion(
                Process::Euler,
                &SmoothnessSequence::constant(r),
                0.9,
                0.0,
                1,
            )
            .unwrap();
            assert!(v > 1.0);
        }
        let rk = seq("power:c=1,s=1");
        let a = poly_log_criterion(Process::Euler, &rk, 0.9, 0.0, 1000).unwrap();
        let b = poly_log_criterion(Process::Euler, &rk, 0.9, 0.0, 1_000_000).unwrap();
        assert!((a - b).abs() < 1e-12);
        let z = SmoothnessSequence::constant(0);
        let c10 = poly_log_criterion(Process::Euler, &z, 0.9, 0.0, 10).unwrap();
        let c20 = poly_log_criterion(Process::Euler, &z, 0.9, 0.0, 20).unwrap();
        assert!((c20 - 2.0 * c10).abs() < 1e-12);
        assert!(poly_criterion(Process::Euler, &z, 0.5, 0.0, 3).is_err());
    }

    #[test]
    fn poly_bound_sanity() {
        let c = poly_criterion(
            Process::Euler,
            &SmoothnessSequence::constant(0),
            0.9,
            0.0,
            1,
        )
        .unwrap();
        assert!(poly_n_bound(c, 0.9, 0.0, 1, 0.5) >= 1.0);
        assert!(poly_n_bound(c, 0.9, 0.0, 1, 1.0) >= 1.0);
    }

    #[test]
    fn weak_criterion_examples() {
        let z = SmoothnessSequence::constant(2);
        let inner = Profile::euler(2).tail_pow(0.8).unwrap();
        assert!((weak_criterion(Process::Euler, &z, 0.8, 1).unwrap() - inner).abs() < 1e-16);
        assert!((weak_criterion(Process::Euler, &z, 0.8, 10_000).unwrap() - inner).abs() < 1e-15);
        let rk = seq("power:c=1,s=1");
        let a = weak_criterion(Process::Euler, &rk, 0.8, 100).unwrap();
        let b = weak_criterion(Process::Euler, &rk, 0.8, 10_000).unwrap();
        assert!(b < a);
        assert!(weak_criterion(Process::Euler, &rk, 0.5, 10).is_err());
        assert!(weak_criterion(Process::Wiener, &rk, 0.6, 10).is_err());
    }

    #[test]
    fn necessary_sums() {
        let z = SmoothnessSequence::constant(0);
        let h = Profile::euler(0).entropy().unwrap();
        let s = qpt_necessary_sum(Process::Euler, &z, 10_000).unwrap();
        assert!((s.full - 10_000.0 * h / 10_000f64.ln()).abs() < 1e-9);
        assert!(s.j2 <= s.full);
        let big = qpt_necessary_sum(Process::Euler, &SmoothnessSequence::constant(40), 1).unwrap();
        assert!(big.full < 1e-30);
    }

    #[test]
    fn qpt_general_examples() {
        let rk = seq("power:c=1,s=1");
        let a = qpt_log_criterion_general(Process::Euler, &rk, 0.5, 1000).unwrap();
        let b = qpt_log_criterion_general(Process::Euler, &rk, 0.5, 1_000_000).unwrap();
        assert!(b <= a + 1e-12);
        let z = SmoothnessSequence::constant(0);
        let c = qpt_log_criterion_general(Process::Euler, &z, 0.5, 1000).unwrap();
        let e = qpt_log_criterion_general(Process::Euler, &z, 0.5, 1_000_000).unwrap();
        assert!(e > 100.0 * c);
        assert!(
            qpt_criterion_general(Process::Euler, &SmoothnessSequence::constant(2), 0.5, 1)
                .unwrap()
                >= 1.0
        );
        assert!(qpt_log_criterion_general(Process::Euler, &z, 0.6, 1).is_err());
    }

    #[test]
    fn condensation_separates_series() {
        let conv = condensation(
            &seq("log-euler:a=1"),
            1 << 20,
            |r| Ok(spt_summand(r, 0.9)),
            1e-9,
        )
        .unwrap();
        assert!(conv.beta > 1.5, "{conv:?}");
        let div = condensation(
            &seq("log-threshold"),
            1 << 20,
            |r| Ok(spt_summand(r, 0.9)),
            1e-9,
        )
        .unwrap();
        assert!(div.beta < 0.9, "{div:?}");
        let geo = condensation(
            &seq("power:c=1,s=1"),
            1 << 20,
            |r| Ok(spt_summand(r, 0.9)),
            1e-9,
        )
        .unwrap();
        assert!(geo.beta.is_infinite() || geo.beta > 10.0);
    }

    #[test]
    fn log_grid_shape() {
        let g = log_grid(1_000_000, 4);
        assert_eq!(g[0], 1);
        assert_eq!(*g.last().unwrap(), 1_000_000);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }
}
