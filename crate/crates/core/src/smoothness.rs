//! Smoothness sequences `k ↦ r_k` (non-negative, non-decreasing integers).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// `1 / (2 ln 3)`, the threshold rate for the Euler sequences.
pub const HALF_INV_LN3: f64 = 0.455_119_613_313_418_696_807_120_082_868;

/// Distance to an integer under which a real value is treated as that integer
/// before taking the ceiling.
const CEIL_GUARD: f64 = 1e-9;

/// `⌈x⌉`, snapping values within `1e-9` of an integer onto it so that
/// rounding noise in the inner expression cannot bump the result by one.
pub fn guarded_ceil(x: f64) -> u64 {
    let n = x.round();
    let v = if (x - n).abs() <= CEIL_GUARD {
        n
    } else {
        x.ceil()
    };
    if v <= 0.0 {
        0
    } else if v >= u64::MAX as f64 {
        u64::MAX
    } else {
        v as u64
    }
}

/// Rule generating the sequence.
#[derive(Debug, Clone, PartialEq)]
pub enum Rule {
    Constant(u64),
    /// `⌈1 + a ln(1 + k ln k)⌉`
    LogEuler {
        a: f64,
    },
    /// `⌈ln₊k / (2 ln 3)⌉`
    LogThreshold,
    /// `⌈k^s ln²(1 + k)⌉`
    PowerWiener {
        s: f64,
    },
    /// `⌈c k^s⌉`
    Power {
        c: f64,
        s: f64,
    },
    /// Explicit prefix, extended by repeating the last value.
    Explicit(Vec<u64>),
}

/// A validated smoothness sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothnessSequence {
    rule: Rule,
}

/// A maximal run of indices `first..=last` sharing the value `r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub r: u64,
    pub first: u64,
    pub last: u64,
}

impl Run {
    pub fn len(&self) -> u64 {
        self.last - self.first + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Which prefix rate to estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateMode {
    /// `min_{2≤k≤K} r_k / ln k`
    LogRate,
    /// `min_{1≤k≤K} r_k / k^s`
    PowerRate(f64),
}

impl SmoothnessSequence {
    pub fn new(rule: Rule) -> Result<Self> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidArgument(format!(
                    "{name} must be positive and finite, got {v}"
                )))
            }
        };
        match &rule {
            Rule::Constant(_) | Rule::LogThreshold => {}
            Rule::LogEuler { a } => positive("a", *a)?,
            Rule::PowerWiener { s } => positive("s", *s)?,
            Rule::Power { c, s } => {
                positive("c", *c)?;
                positive("s", *s)?;
            }
            Rule::Explicit(list) => {
                if list.is_empty() {
                    return Err(Error::InvalidArgument("explicit sequence is empty".into()));
                }
                if let Some(w) = list.windows(2).position(|w| w[1] < w[0]) {
                    return Err(Error::InvalidArgument(format!(
                        "explicit sequence decreases at position {}",
                        w + 2
                    )));
                }
            }
        }
        Ok(Self { rule })
    }

    pub fn constant(r: u64) -> Self {
        Self {
            rule: Rule::Constant(r),
        }
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    /// `r_k` for `k ≥ 1`.
    pub fn value(&self, k: u64) -> u64 {
        self.value_at(k as u128)
    }

    /// `r_k` for indices beyond `u64`, as needed by criterion sums over
    /// astronomically long prefixes.
    pub fn value_at(&self, k: u128) -> u64 {
        assert!(k >= 1, "smoothness index starts at 1");
        let kf = k as f64;
        match &self.rule {
            Rule::Constant(r) => *r,
            Rule::LogEuler { a } => {
                let klnk = if k == 1 { 0.0 } else { kf * kf.ln() };
                guarded_ceil(1.0 + a * klnk.ln_1p())
            }
            Rule::LogThreshold => guarded_ceil(kf.ln().max(1.0) * HALF_INV_LN3),
            Rule::PowerWiener { s } => {
                let l = kf.ln_1p();
                guarded_ceil(kf.powf(*s) * l * l)
            }
            Rule::Power { c, s } => guarded_ceil(c * kf.powf(*s)),
            Rule::Explicit(list) => {
                let i = (k - 1).min(list.len() as u128 - 1) as usize;
                list[i]
            }
        }
    }

    /// First `n` values `r_1..r_n`.
    pub fn prefix(&self, n: usize) -> Vec<u64> {
        (1..=n as u64).map(|k| self.value(k)).collect()
    }

    /// Largest `k' ∈ [k, k_max]` with `r_{k'} = r_k`, by galloping search.
    pub fn run_end(&self, k: u64, k_max: u64) -> u64 {
        let v = self.value(k);
        if let Rule::Constant(_) = self.rule {
            return k_max;
        }
        if let Rule::Explicit(list) = &self.rule {
            if k >= list.len() as u64 {
                return k_max;
            }
        }
        let mut lo = k;
        let mut step = 1u64;
        let hi = loop {
            let probe = lo.saturating_add(step).min(k_max);
            if probe == lo {
                return lo;
            }
            if self.value(probe) != v {
                break probe;
            }
            lo = probe;
            if probe == k_max {
                return k_max;
            }
            step = step.saturating_mul(2);
        };
        // value(lo) == v, value(hi) != v
        let (mut a, mut b) = (lo, hi);
        while b - a > 1 {
            let mid = a + (b - a) / 2;
            if self.value(mid) == v {
                a = mid;
            } else {
                b = mid;
            }
        }
        a
    }

    /// Iterator over maximal constant runs covering `1..=k_max`.
    pub fn runs(&self, k_max: u64) -> Runs<'_> {
        Runs {
            seq: self,
            next: 1,
            k_max,
        }
    }

    /// Finite-prefix proxy for the liminf rates; prefix evidence only.
    pub fn rate_estimate(&self, mode: RateMode, k_max: u64) -> Result<f64> {
        if k_max < 2 {
            return Err(Error::InvalidArgument("rate estimate needs K >= 2".into()));
        }
        // Within a run the ratio is smallest at the last index.
        let mut best = f64::INFINITY;
        for run in self.runs(k_max) {
            let k = run.last as f64;
            let v = match mode {
                RateMode::LogRate => {
                    if run.last < 2 {
                        continue;
                    }
                    run.r as f64 / k.ln()
                }
                RateMode::PowerRate(s) => run.r as f64 / k.powf(s),
            };
            best = best.min(v);
        }
        Ok(best)
    }
}

pub struct Runs<'a> {
    seq: &'a SmoothnessSequence,
    next: u64,
    k_max: u64,
}

impl Iterator for Runs<'_> {
    type Item = Run;

    fn next(&mut self) -> Option<Run> {
        if self.next == 0 || self.next > self.k_max {
            return None;
        }
        let first = self.next;
        let last = self.seq.run_end(first, self.k_max);
        self.next = last.checked_add(1).unwrap_or(0);
        Some(Run {
            r: self.seq.value(first),
            first,
            last,
        })
    }
}

impl fmt::Display for SmoothnessSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.rule {
            Rule::Constant(r) => write!(f, "const:{r}"),
            Rule::LogEuler { a } => write!(f, "log-euler:a={a}"),
            Rule::LogThreshold => write!(f, "log-threshold"),
            Rule::PowerWiener { s } => write!(f, "power-wiener:s={s}"),
            Rule::Power { c, s } => write!(f, "power:c={c},s={s}"),
            Rule::Explicit(list) => {
                write!(f, "explicit:")?;
                for (i, v) in list.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for SmoothnessSequence {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let fail = |reason: &str| Error::Parse {
            what: "smoothness rule",
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let s = input.trim();
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let params = |args: &str| -> Result<Vec<(String, f64)>> {
            args.split(',')
                .filter(|p| !p.trim().is_empty())
                .map(|p| {
                    let (k, v) = p
                        .split_once('=')
                        .ok_or_else(|| fail("expected key=value"))?;
                    let v: f64 = v.trim().parse().map_err(|_| fail("bad number"))?;
                    Ok((k.trim().to_string(), v))
                })
                .collect()
        };
        let get = |ps: &[(String, f64)], key: &str| -> Result<f64> {
            ps.iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| fail(&format!("missing parameter {key}")))
        };
        let rule = match name.trim() {
            "const" | "constant" => Rule::Constant(
                args.trim()
                    .parse()
                    .map_err(|_| fail("expected a non-negative integer"))?,
            ),
            "log-euler" => Rule::LogEuler {
                a: get(&params(args)?, "a")?,
            },
            "log-threshold" => {
                if !args.trim().is_empty() {
                    return Err(fail("log-threshold takes no parameters"));
                }
                Rule::LogThreshold
            }
            "power-wiener" => Rule::PowerWiener {
                s: get(&params(args)?, "s")?,
            },
            "power" => {
                let ps = params(args)?;
                Rule::Power {
                    c: get(&ps, "c").unwrap_or(1.0),
                    s: get(&ps, "s")?,
                }
            }
            "explicit" => Rule::Explicit(
                args.split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<u64>()
                            .map_err(|_| fail("expected non-negative integers"))
                    })
                    .collect::<Result<_>>()?,
            ),
            _ => return Err(fail("unknown rule")),
        };
        Self::new(rule)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seq(s: &str) -> SmoothnessSequence {
        s.parse().unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(seq("const:2").value(7), 2);
        assert_eq!(seq("log-euler:a=1").value(1), 1);
        // 2 ln²5 = 5.1806
        assert_eq!(seq("power-wiener:s=0.5").value(4), 6);
        assert_eq!(seq("power:c=1,s=1").value(37), 37);
    }

    #[test]
    fn log_threshold_values() {
        let s = seq("log-threshold");
        // ln₊ k = 1 for k ≤ e, so r = ⌈0.455⌉ = 1
        assert_eq!(s.value(1), 1);
        assert_eq!(s.value(2), 1);
        // ln k / (2 ln 3) ≤ 1 iff k ≤ 9
        assert_eq!(s.value(9), 1);
        assert_eq!(s.value(10), 2);
        assert_eq!(s.value(81), 2);
        assert_eq!(s.value(82), 3);
    }

    #[test]
    fn guard_snaps_near_integers() {
        assert_eq!(guarded_ceil(3.0 + 1e-12), 3);
        assert_eq!(guarded_ceil(3.0 - 1e-12), 3);
        assert_eq!(guarded_ceil(3.0 + 1e-6), 4);
        assert_eq!(guarded_ceil(-0.5), 0);
    }

    #[test]
    fn explicit_extends_with_last_value() {
        let s = seq("explicit:0,1,1,2");
        assert_eq!(s.prefix(6), vec![0, 1, 1, 2, 2, 2]);
        assert!("explicit:2,1".parse::<SmoothnessSequence>().is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!("log-euler:a=0".parse::<SmoothnessSequence>().is_err());
        assert!("power-wiener:s=-1".parse::<SmoothnessSequence>().is_err());
        assert!("power:c=1".parse::<SmoothnessSequence>().is_err());
        assert!("bogus:1".parse::<SmoothnessSequence>().is_err());
    }

    #[test]
    fn text_form_round_trips() {
        for s in [
            "const:2",
            "log-euler:a=0.91",
            "log-threshold",
            "power-wiener:s=0.5",
            "power:c=2,s=0.5",
            "explicit:0,1,1,2",
        ] {
            assert_eq!(seq(s).to_string(), s);
            assert_eq!(seq(&seq(s).to_string()), seq(s));
        }
    }

    #[test]
    fn runs_cover_prefix() {
        for s in [
            "log-euler:a=0.3",
            "power-wiener:s=0.4",
            "explicit:0,1,1,2",
            "const:3",
            "log-threshold",
        ] {
            let q = seq(s);
            let mut k = 1;
            for run in q.runs(5000) {
                assert_eq!(run.first, k);
                for j in run.first..=run.last {
                    assert_eq!(q.value(j), run.r, "{s} at {j}");
                }
                if run.last < 5000 {
                    assert_ne!(q.value(run.last + 1), run.r);
                }
                k = run.last + 1;
            }
            assert_eq!(k, 5001);
        }
    }

    #[test]
    fn rate_examples() {
        let v = SmoothnessSequence::constant(3)
            .rate_estimate(RateMode::LogRate, 1_000_000)
            .unwrap();
        assert!((v - 3.0 / 1e6_f64.ln()).abs() < 1e-15);
        let v = seq("log-euler:a=1")
            .rate_estimate(RateMode::LogRate, 10_000)
            .unwrap();
        assert!((1.0..=1.5).contains(&v), "{v}");
        let v = seq("power:c=1,s=1")
            .rate_estimate(RateMode::PowerRate(1.0), 100)
            .unwrap();
        assert_eq!(v, 1.0);
    }
}
