//! Covariance kernels, eigenvalues and traces of the univariate integrated
//! Euler and Wiener processes.
//!
//! Euler eigenvalues are closed-form: `λ_j = (π(j − ½))^{−(2r+2)}`. Wiener
//! eigenvalues are computed numerically. The default solver is a Legendre
//! Galerkin (Rayleigh–Ritz) scheme built on the factorization
//! `K(x, y) = ∫ g(x, u) g(y, u) du` with `g(x, u) = (x − u)₊^r / r!`, so the
//! eigenvalues are squared singular values of a small matrix and every Ritz
//! value is a lower bound. Plain Nyström on Gauss–Legendre nodes is kept as
//! an independent cross-check.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{jacobi_eigen, singular_values, Matrix};
use crate::quad::{shifted_legendre_orthonormal, GaussLegendre};
use crate::scalar::{ln_factorial, Real};
use crate::sum::{log_sum_exp, Neumaier};

/// Largest smoothness for which the Euler kernel is evaluated.
pub const MAX_EULER_KERNEL_R: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Process {
    Euler,
    Wiener,
}

impl fmt::Display for Process {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Process::Euler => "euler",
            Process::Wiener => "wiener",
        })
    }
}

impl FromStr for Process {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "euler" => Ok(Process::Euler),
            "wiener" => Ok(Process::Wiener),
            _ => Err(Error::Parse {
                what: "process",
                input: s.into(),
                reason: "expected euler or wiener".into(),
            }),
        }
    }
}

// ---------------------------------------------------------------------------
// Odd power sums
// ---------------------------------------------------------------------------

const BERNOULLI: [f64; 8] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
];

/// Sum `Σ_{j≥j0} (2j−1)^{−p}` (or, with `weighted`, `Σ (2j−1)^{−p} ln(2j−1)`),
/// returned as `(ln S, relative error bound)`.
///
/// Explicit terms up to a cutoff, then Euler–Maclaurin with seven correction
/// terms; the first omitted correction bounds the remainder.
pub fn odd_power_tail(p: f64, j0: u64, weighted: bool) -> Result<(f64, f64)> {
    if !(p > 1.0) || !p.is_finite() {
        return invalid(format!("odd power sum diverges for exponent {p}"));
    }
    let j0 = j0.max(1);
    let cutoff = j0.max((p / 2.0).ceil() as u64 + 16);
    let base = (2 * j0 - 1) as f64;
    let lb = base.ln();
    // Scale every term by base^p so the leading term is O(1).
    let term = |j: u64| -> f64 {
        let x = (2 * j - 1) as f64;
        let t = (-p * (x.ln() - lb)).exp();
        if weighted {
            t * x.ln()
        } else {
            t
        }
    };
    let mut acc = Neumaier::new();
    // For p large against j0 the terms collapse geometrically and the
    // ascending direct sum terminates long before the cutoff.
    if cutoff > j0 {
        let mut j = j0;
        while j < cutoff {
            let t = term(j);
            acc.add(t);
            let x = (2 * j + 1) as f64;
            let mut rest = term(j + 1) * x / (2.0 * (p - 1.0));
            if weighted {
                rest *= 1.0 + 1.0 / ((p - 1.0) * x.ln());
            }
            let s = acc.value();
            if rest + term(j + 1) <= 1e-17 * s {
                return Ok((
                    s.ln() - p * lb,
                    (rest + term(j + 1)) / s + 8.0 * f64::EPSILON,
                ));
            }
            j += 1;
        }
        acc = Neumaier::new();
    }
    for j in (j0..cutoff).rev() {
        acc.add(term(j));
    }
    let n = cutoff as f64;
    let x = 2.0 * n - 1.0;
    let lx = x.ln();
    let scaled = |e: f64| (-e * lx + p * lb).exp();
    // integral ∫_N^∞
    let integral = scaled(p - 1.0) / (2.0 * (p - 1.0));
    let integral = if weighted {
        integral * (lx + 1.0 / (p - 1.0))
    } else {
        integral
    };
    acc.add(integral);
    acc.add(term(cutoff) / 2.0);
    // −Σ B_{2k}/(2k)! f^{(2k−1)}(N), f^{(m)}(N) = (−2)^m (p)_m x^{−p−m}
    let mut rising = 1.0; // (p)_m
    let mut harmonic = 0.0; // Σ_{i<m} 1/(p+i)
    let mut fact = 1.0; // (2k)!
    let mut last = 0.0;
    let mut m = 0u32;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let order = 2 * k as u32 + 1;
        while m < order {
            rising *= p + m as f64;
            harmonic += 1.0 / (p + m as f64);
            m += 1;
        }
        fact *= ((2 * k + 1) * (2 * k + 2)) as f64;
        let mag = 2f64.powi(order as i32) * rising * scaled(p + order as f64);
        let deriv = -mag * if weighted { lx - harmonic } else { 1.0 };
        let corr = -b / fact * deriv;
        if k + 1 < BERNOULLI.len() {
            acc.add(corr);
        } else {
            last = corr.abs();
        }
    }
    let s = acc.value();
    if !(s > 0.0) {
        return Err(Error::NoConvergence(format!("odd power sum at p = {p}")));
    }
    let rel = last / s + 8.0 * f64::EPSILON;
    Ok((s.ln() - p * lb, rel))
}

// ---------------------------------------------------------------------------
// Euler
// ---------------------------------------------------------------------------

/// `ln λ_{j,r}^E = −(2r+2) ln(π(j − ½))`.
pub fn euler_log_eigenvalue<T: Real>(j: u64, r: u32) -> T {
    assert!(j >= 1, "eigenvalue index starts at 1");
    let s = T::lit(2.0 * r as f64 + 2.0);
    -s * (T::PI() * (T::lit(j as f64) - T::lit(0.5))).ln()
}

/// `λ_{j,r}^E`, underflowing to zero.
pub fn euler_eigenvalue<T: Real>(j: u64, r: u32) -> T {
    euler_log_eigenvalue::<T>(j, r).exp()
}

/// `ln Σ_{j≥j0} (λ_{j,r}^E)^τ` with its relative error bound.
pub fn euler_log_power_tail(r: u32, tau: f64, j0: u64) -> Result<(f64, f64)> {
    let s = 2.0 * r as f64 + 2.0;
    let (ls, err) = odd_power_tail(s * tau, j0, false)?;
    Ok((s * tau * (2.0 / std::f64::consts::PI).ln() + ls, err))
}

/// `ln Σ_j λ_{j,r}^E`.
pub fn euler_log_trace(r: u32) -> f64 {
    euler_log_power_tail(r, 1.0, 1)
        .expect("exponent 2r+2 > 1")
        .0
}

pub fn euler_trace<T: Real>(r: u32) -> T {
    T::lit(euler_log_trace(r).exp())
}

/// Euler polynomial `E_n` with exact rational coefficients.
#[derive(Debug, Clone)]
pub struct EulerPolynomial {
    /// Coefficients in ascending powers of `x`.
    coeffs: Vec<BigRational>,
}

impl EulerPolynomial {
    /// Uses `E_n(x) = Σ_k C(n,k) E_k(0) x^{n−k}` with
    /// `2 E_n(0) = −Σ_{k<n} C(n,k) E_k(0)`, both read off the generating
    /// function `2 e^{xt} / (e^t + 1)`.
    pub fn new(n: usize) -> Self {
        let binom = binomial_row(n);
        let mut at_zero: Vec<BigRational> = Vec::with_capacity(n + 1);
        at_zero.push(BigRational::one());
        for m in 1..=n {
            let row = binomial_row(m);
            let mut s = BigRational::zero();
            for (k, e) in at_zero.iter().enumerate() {
                s += e * BigRational::from_integer(row[k].clone());
            }
            at_zero.push(-s / BigRational::from_integer(BigInt::from(2)));
        }
        let mut coeffs = vec![BigRational::zero(); n + 1];
        for k in 0..=n {
            coeffs[n - k] = &at_zero[k] * BigRational::from_integer(binom[k].clone());
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn eval_exact(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }
}

fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        let next = &row[k] * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(next);
    }
    row
}

fn check_unit(x: f64, name: &str) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        invalid(format!("{name} = {x} lies outside [0, 1]"))
    }
}

/// Euler covariance kernel of smoothness `r`, evaluated exactly in rational
/// arithmetic from the double inputs (the closed form cancels badly in
/// floating point near the diagonal).
#[derive(Debug, Clone)]
pub struct EulerKernel {
    r: u32,
    poly: EulerPolynomial,
    scale: BigRational,
}

impl EulerKernel {
    pub fn new(r: u32) -> Result<Self> {
        if r > MAX_EULER_KERNEL_R {
            return invalid(format!(
                "Euler kernel is only evaluated for r <= {MAX_EULER_KERNEL_R}"
            ));
        }
        let n = 2 * r as usize + 1;
        let mut fact = BigInt::one();
        for k in 2..=n {
            fact *= BigInt::from(k);
        }
        let sign = if r % 2 == 0 { -1 } else { 1 };
        let scale = BigRational::new(
            BigInt::from(sign) * (BigInt::one() << (2 * r as usize)),
            fact,
        );
        Ok(Self {
            r,
            poly: EulerPolynomial::new(n),
            scale,
        })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn eval<T: Real>(&self, x: T, y: T) -> Result<T> {
        let (x, y) = (x.as_f64(), y.as_f64());
        check_unit(x, "x")?;
        check_unit(y, "y")?;
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let xr = BigRational::from_float(x).expect("finite");
        let yr = BigRational::from_float(y).expect("finite");
        let d = if xr > yr { &xr - &yr } else { &yr - &xr };
        let a = self.poly.eval_exact(&(d * &half));
        let b = self.poly.eval_exact(&((xr + yr) * &half));
        let v = (a - b) * &self.scale;
        Ok(T::lit(v.to_f64().unwrap_or(f64::NAN)))
    }
}

pub fn euler_kernel<T: Real>(x: T, y: T, r: u32) -> Result<T> {
    EulerKernel::new(r)?.eval(x, y)
}

// ---------------------------------------------------------------------------
// Wiener
// ---------------------------------------------------------------------------

/// `K^W(x, y) = ∫₀^{min} (x−u)^r (y−u)^r du / r!²`, expanded with
/// `a = min(x, y)`, `δ = |x − y|` into the positive sum
/// `Σ_i C(r,i) δ^{r−i} a^{r+i+1} / (r+i+1) / r!²`.
pub fn wiener_kernel<T: Real>(x: T, y: T, r: u32) -> Result<T> {
    check_unit(x.as_f64(), "x")?;
    check_unit(y.as_f64(), "y")?;
    Ok(wiener_kernel_unchecked(x, y, r))
}

pub(crate) fn wiener_kernel_unchecked<T: Real>(x: T, y: T, r: u32) -> T {
    let a = x.min(y);
    let delta = (x - y).abs();
    if a <= T::zero() {
        return T::zero();
    }
    let la = a.ln();
    let ld = delta.ln();
    let lrf: T = ln_factorial(r as u64);
    let mut lbin = T::zero();
    let mut acc = Neumaier::new();
    for i in 0..=r {
        if i > 0 {
            lbin = lbin + T::lit((r - i + 1) as f64).ln() - T::lit(i as f64).ln();
        }
        let p = T::lit((r + i + 1) as f64);
        let ld_term = if i == r {
            T::zero()
        } else {
            T::lit((r - i) as f64) * ld
        };
        if i < r && delta == T::zero() {
            continue;
        }
        acc.add((lbin + ld_term + p * la - p.ln() - lrf - lrf).exp());
    }
    acc.value()
}

/// `ln(1 / ((2r+2)(2r+1) r!²))`.
pub fn wiener_log_trace(r: u32) -> f64 {
    let rf = r as f64;
    -(2.0 * rf + 2.0).ln() - (2.0 * rf + 1.0).ln() - 2.0 * ln_factorial::<f64>(r as u64)
}

pub fn wiener_trace<T: Real>(r: u32) -> T {
    T::lit(wiener_log_trace(r).exp())
}

/// Leading prediction `1/(r!²(2r+2)(2r+1))` for `λ₁` and the scale
/// `1/(r!² r⁴)` for `λ₂`.
pub fn wiener_largest_predictions(r: u32) -> Result<(f64, f64)> {
    if r < 1 {
        return invalid("predictions need r >= 1");
    }
    let l2 = -2.0 * ln_factorial::<f64>(r as u64) - 4.0 * (r as f64).ln();
    Ok((wiener_log_trace(r).exp(), l2.exp()))
}

pub fn kernel<T: Real>(process: Process, x: T, y: T, r: u32) -> Result<T> {
    match process {
        Process::Euler => euler_kernel(x, y, r),
        Process::Wiener => wiener_kernel(x, y, r),
    }
}

pub fn log_trace(process: Process, r: u32) -> f64 {
    match process {
        Process::Euler => euler_log_trace(r),
        Process::Wiener => wiener_log_trace(r),
    }
}

// ---------------------------------------------------------------------------
// Spectrum type
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodKind {
    ClosedForm,
    Galerkin,
    Nystrom,
}

/// How a spectrum was obtained.
#[derive(Debug, Clone, PartialEq)]
pub struct Method {
    pub kind: MethodKind,
    /// Basis size (Galerkin) or node count (Nyström) of the finer grid.
    pub grid: usize,
    pub tolerance: f64,
    /// Absolute two-grid error estimate per eigenvalue (zero when exact).
    pub error_estimates: Vec<f64>,
    /// Relative residual of the finite-dimensional eigenproblem.
    pub residual: f64,
}

impl Method {
    fn closed_form(count: usize) -> Self {
        Self {
            kind: MethodKind::ClosedForm,
            grid: 0,
            tolerance: 0.0,
            error_estimates: vec![0.0; count],
            residual: 0.0,
        }
    }
}

/// Descending eigenvalues of one univariate covariance operator, stored in
/// log domain, with the exact trace and a bound on the omitted mass.
#[derive(Debug, Clone)]
pub struct UnivariateSpectrum<T> {
    process: Process,
    r: u32,
    log_eigenvalues: Vec<T>,
    log_trace: T,
    log_tail: T,
    method: Method,
}

impl<T> AsRef<UnivariateSpectrum<T>> for UnivariateSpectrum<T> {
    fn as_ref(&self) -> &Self {
        self
    }
}

impl<T: Real> UnivariateSpectrum<T> {
    pub fn process(&self) -> Process {
        self.process
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn len(&self) -> usize {
        self.log_eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_eigenvalues.is_empty()
    }

    pub fn log_eigenvalues(&self) -> &[T] {
        &self.log_eigenvalues
    }

    /// Eigenvalues in value space (may underflow to zero for large `r`).
    pub fn eigenvalues(&self) -> Vec<T> {
        self.log_eigenvalues.iter().map(|l| l.exp()).collect()
    }

    pub fn log_trace(&self) -> T {
        self.log_trace
    }

    pub fn trace(&self) -> T {
        self.log_trace.exp()
    }

    /// Bound on `Σ_{j>J} λ_j`, in log domain.
    pub fn log_tail(&self) -> T {
        self.log_tail
    }

    pub fn tail(&self) -> T {
        self.log_tail.exp()
    }

    pub fn method(&self) -> &Method {
        &self.method
    }

    /// `ln λ_{J+1}` when the eigenvalues are known in closed form.
    pub fn log_next_exact(&self) -> Option<T> {
        if self.method.kind == MethodKind::ClosedForm {
            Some(euler_log_eigenvalue(self.len() as u64 + 1, self.r))
        } else {
            None
        }
    }

    /// Tail as a fraction of the trace.
    pub fn tail_fraction(&self) -> T {
        (self.log_tail - self.log_trace).exp()
    }

    /// Checks positivity, ordering and the trace/tail sandwich.
    pub fn check_invariants(&self) -> Result<()> {
        for (i, w) in self.log_eigenvalues.windows(2).enumerate() {
            if w[1] > w[0] {
                return invalid(format!("eigenvalue {} exceeds its predecessor", i + 2));
            }
        }
        if self.log_eigenvalues.iter().any(|l| !l.is_finite()) {
            return invalid("non-finite log eigenvalue");
        }
        let partial = log_sum_exp(&self.log_eigenvalues);
        let slack = T::lit(1e-12);
        if partial > self.log_trace + slack {
            return invalid("partial sum exceeds the trace");
        }
        let covered = log_sum_exp(&[partial, self.log_tail]);
        if covered < self.log_trace - slack {
            return invalid("partial sum plus tail falls short of the trace");
        }
        Ok(())
    }

    /// `ln Σ_{j>J} λ_j^τ`, estimated by scaling the Euler-shaped asymptotic
    /// tail `(π(j−½))^{−(2r+2)}` to match the last computed eigenvalue. Exact
    /// for Euler spectra.
    pub fn log_power_tail(&self, tau: f64) -> Result<f64> {
        let j = self.len() as u64;
        let (lt, _) = euler_log_power_tail(self.r, tau, j + 1)?;
        match self.process {
            Process::Euler => Ok(lt),
            Process::Wiener => {
                let shift = self.log_eigenvalues[j as usize - 1].as_f64()
                    - euler_log_eigenvalue::<f64>(j, self.r);
                Ok(lt + tau * shift)
            }
        }
    }

    /// `ln Σ_j λ_j^τ`: explicit part plus [`Self::log_power_tail`].
    pub fn log_power_sum(&self, tau: f64) -> Result<f64> {
        if self.process == Process::Euler {
            return euler_log_power_tail(self.r, tau, 1).map(|x| x.0);
        }
        let mut logs: Vec<f64> = self
            .log_eigenvalues
            .iter()
            .map(|l| tau * l.as_f64())
            .collect();
        logs.push(self.log_power_tail(tau)?);
        Ok(log_sum_exp(&logs))
    }

    pub fn to_record(&self) -> SpectrumRecord {
        SpectrumRecord {
            schema: SPECTRUM_SCHEMA.to_string(),
            process: self.process,
            r: self.r,
            log_eigenvalues: self.log_eigenvalues.iter().map(|x| x.as_f64()).collect(),
            log_trace: self.log_trace.as_f64(),
            log_tail: self.log_tail.as_f64(),
            method: MethodRecord {
                kind: self.method.kind,
                n: self.method.grid,
                tolerance: self.method.tolerance,
            },
        }
    }
}

pub const SPECTRUM_SCHEMA: &str = "tractlab.v1.spectrum";

/// Versioned JSON form of a spectrum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SpectrumRecord {
    pub schema: String,
    pub process: Process,
    pub r: u32,
    pub log_eigenvalues: Vec<f64>,
    pub log_trace: f64,
    pub log_tail: f64,
    pub method: MethodRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRecord {
    pub kind: MethodKind,
    #[serde(rename = "N")]
    pub n: usize,
    pub tolerance: f64,
}

/// Exact Euler spectrum with `count` eigenvalues.
pub fn euler_spectrum<T: Real>(r: u32, count: usize) -> Result<UnivariateSpectrum<T>> {
    if count == 0 {
        return invalid("spectrum needs at least one eigenvalue");
    }
    let log_eigenvalues = (1..=count as u64)
        .map(|j| euler_log_eigenvalue::<T>(j, r))
        .collect();
    let (lt, err) = euler_log_power_tail(r, 1.0, count as u64 + 1)?;
    Ok(UnivariateSpectrum {
        process: Process::Euler,
        r,
        log_eigenvalues,
        log_trace: T::lit(euler_log_trace(r)),
        // inflate by the remainder bound so the tail stays an upper bound
        log_tail: T::lit(lt + err.ln_1p()),
        method: Method::closed_form(count),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discretization {
    Galerkin,
    Nystrom,
}

/// Settings for the numerical Wiener eigensolver.
#[derive(Debug, Clone, Copy)]
pub struct WienerOptions {
    /// Coarse grid size; the fine grid has twice as many points. `None`
    /// picks `max(4J, 64)`.
    pub grid: Option<usize>,
    /// Largest admissible two-grid difference for `λ_J`, relative to `λ_J`.
    pub tolerance: f64,
    pub discretization: Discretization,
}

impl Default for WienerOptions {
    fn default() -> Self {
        Self {
            grid: None,
            tolerance: 1e-6,
            discretization: Discretization::Galerkin,
        }
    }
}

impl WienerOptions {
    pub fn grid_for(&self, count: usize) -> usize {
        self.grid.unwrap_or_else(|| (4 * count).max(64))
    }
}

/// Wiener spectrum with `count` eigenvalues. For `r = 0` the kernel is
/// `min(x, y)` and the closed-form values are returned.
pub fn wiener_spectrum<T: Real>(
    r: u32,
    count: usize,
    opts: WienerOptions,
) -> Result<UnivariateSpectrum<T>> {
    if r == 0 {
        let mut s = euler_spectrum::<T>(0, count)?;
        s.process = Process::Wiener;
        return Ok(s);
    }
    wiener_spectrum_numeric(r, count, opts)
}

/// Numerical Wiener spectrum (no closed-form shortcut), solved on a coarse
/// and a fine grid; the fine-grid values are returned and the difference is
/// recorded as the error estimate.
pub fn wiener_spectrum_numeric<T: Real>(
    r: u32,
    count: usize,
    opts: WienerOptions,
) -> Result<UnivariateSpectrum<T>> {
    if count == 0 {
        return invalid("spectrum needs at least one eigenvalue");
    }
    let n = opts.grid_for(count);
    if n < 4 * count {
        return invalid(format!("grid size {n} must be at least 4J = {}", 4 * count));
    }
    let solve = |m: usize| -> Result<(Vec<T>, f64)> {
        match opts.discretization {
            Discretization::Galerkin => Ok((galerkin_log_eigenvalues::<T>(r, m, count)?, 0.0)),
            Discretization::Nystrom => {
                let res = nystrom_log_eigenvalues::<T>(r, m, count)?;
                Ok((res.log_eigenvalues, res.residual))
            }
        }
    };
    let (coarse, fine) = rayon::join(|| solve(n), || solve(2 * n));
    let (coarse, _) = coarse?;
    let (fine, residual) = fine?;
    for (i, l) in fine.iter().enumerate() {
        if !l.is_finite() {
            return Err(Error::NonPositiveEigenvalue {
                index: i + 1,
                value: 0.0,
            });
        }
    }
    // Jacobi rotations keep relative accuracy, so the roundoff allowance
    // scales with each eigenvalue rather than with λ₁, and with the size of
    // the fine problem.
    let unit = 4.0 * (2 * n) as f64 * T::epsilon().as_f64();
    let error_estimates: Vec<f64> = coarse
        .iter()
        .zip(&fine)
        .map(|(c, f)| {
            let fv = f.as_f64().exp();
            (fv - c.as_f64().exp()).abs() + unit * fv
        })
        .collect();
    let last = count - 1;
    let rel = error_estimates[last] / fine[last].as_f64().exp();
    if !(rel <= opts.tolerance) {
        return Err(Error::Discretization {
            index: count,
            estimate: rel,
            tolerance: opts.tolerance,
        });
    }
    let log_trace = wiener_log_trace(r);
    // Ritz values are lower bounds, so trace minus their sum bounds the tail.
    let partial: f64 = log_sum_exp(&fine.iter().map(|x| x.as_f64()).collect::<Vec<_>>());
    // The subtraction loses everything below a few ulps of the trace, so the
    // bound carries that much slack.
    let frac = -(partial - log_trace).exp_m1();
    if frac < -1e-12 {
        return invalid(format!("computed eigenvalues exceed the trace for r = {r}"));
    }
    let log_tail = log_trace + (frac.max(0.0) + 16.0 * f64::EPSILON).ln();
    Ok(UnivariateSpectrum {
        process: Process::Wiener,
        r,
        log_eigenvalues: fine,
        log_trace: T::lit(log_trace),
        log_tail: T::lit(log_tail),
        method: Method {
            kind: match opts.discretization {
                Discretization::Galerkin => MethodKind::Galerkin,
                Discretization::Nystrom => MethodKind::Nystrom,
            },
            grid: 2 * n,
            tolerance: opts.tolerance,
            error_estimates,
            residual,
        },
    })
}

/// Ritz values of the Wiener covariance operator on the span of the first
/// `basis` orthonormal shifted Legendre polynomials, as log eigenvalues
/// (descending, `count` of them).
pub fn galerkin_log_eigenvalues<T: Real>(r: u32, basis: usize, count: usize) -> Result<Vec<T>> {
    if count > basis {
        return invalid("more eigenvalues requested than basis functions");
    }
    let rr = r as usize;
    // u-quadrature exact for degree 2(basis + r) products
    let q = basis + rr + 2;
    let outer = GaussLegendre::<T>::new(q);
    let (us, ws) = outer.on_interval(T::zero(), T::one());
    // inner integrand p_m(x)(x−u)^r has degree ≤ basis − 1 + r
    let inner = GaussLegendre::<T>::new((basis + rr) / 2 + 2);
    let mut columns = vec![vec![T::zero(); q]; basis];
    let mut buf = vec![T::zero(); basis];
    for (qi, (&u, &w)) in us.iter().zip(&ws).enumerate() {
        let (xs, wx) = inner.on_interval(u, T::one());
        let sw = w.sqrt();
        let mut acc: Vec<Neumaier<T>> = vec![Neumaier::new(); basis];
        for (&x, &wxi) in xs.iter().zip(&wx) {
            shifted_legendre_orthonormal(basis, x, &mut buf);
            let g = wxi * (x - u).powi(r as i32);
            for m in 0..basis {
                acc[m].add(buf[m] * g);
            }
        }
        for m in 0..basis {
            columns[m][qi] = sw * acc[m].value();
        }
    }
    let sv = singular_values(columns, 80)?;
    let lrf: T = ln_factorial(r as u64);
    let out: Vec<T> = sv
        .iter()
        .take(count)
        .map(|s| T::lit(2.0) * s.ln() - lrf - lrf)
        .collect();
    if let Some(i) = out.iter().position(|l| !l.is_finite()) {
        return Err(Error::NonPositiveEigenvalue {
            index: i + 1,
            value: sv[i].as_f64(),
        });
    }
    Ok(out)
}

/// Plain Nyström eigenvalues with their relative residual.
#[derive(Debug, Clone)]
pub struct NystromResult<T> {
    pub log_eigenvalues: Vec<T>,
    pub residual: f64,
}

/// Nyström discretization on `nodes` Gauss–Legendre points: the symmetrized
/// matrix `W^{1/2} K W^{1/2}` (kernel scaled by `r!²`) is solved by cyclic
/// Jacobi and checked to relative residual `1e-12`.
pub fn nystrom_log_eigenvalues<T: Real>(
    r: u32,
    nodes: usize,
    count: usize,
) -> Result<NystromResult<T>> {
    if count > nodes {
        return invalid("more eigenvalues requested than nodes");
    }
    let rule = GaussLegendre::<T>::new(nodes);
    let (x, w) = rule.on_interval(T::zero(), T::one());
    let lrf: T = ln_factorial(r as u64);
    let scale = (lrf + lrf).exp();
    let sw: Vec<T> = w.iter().map(|v| v.sqrt()).collect();
    let a = Matrix::from_fn(nodes, nodes, |i, j| {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        sw[i] * sw[j] * wiener_kernel_unchecked(x[i], x[j], r) * scale
    });
    let eig = jacobi_eigen(&a, 60)?;
    let residual = eig.relative_residual(&a, count).as_f64();
    if residual > 1e-12 && T::epsilon().as_f64() < 1e-10 {
        return Err(Error::NoConvergence(format!(
            "Nyström eigenpairs (residual {residual:e})"
        )));
    }
    let mut out = Vec::with_capacity(count);
    for (i, &v) in eig.values.iter().take(count).enumerate() {
        if !(v > T::zero()) {
            return Err(Error::NonPositiveEigenvalue {
                index: i + 1,
                value: v.as_f64(),
            });
        }
        out.push(v.ln() - lrf - lrf);
    }
    Ok(NystromResult {
        log_eigenvalues: out,
        residual,
    })
}

/// Spectrum of either process.
pub fn spectrum<T: Real>(
    process: Process,
    r: u32,
    count: usize,
    opts: WienerOptions,
) -> Result<UnivariateSpectrum<T>> {
    match process {
        Process::Euler => euler_spectrum(r, count),
        Process::Wiener => wiener_spectrum(r, count, opts),
    }
}
