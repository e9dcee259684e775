//! Quadrature: fixed-order Gauss–Legendre rules and a globally adaptive
//! Gauss–Kronrod (7/15) integrator.

use crate::scalar::Real;
use crate::sum::Neumaier;

/// Gauss–Legendre rule with `n` nodes on the reference interval `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre<T> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// Builds the rule by Newton iteration on the three-term recurrence.
    /// Nodes are computed in double precision and then converted.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0_f64; n];
        let mut weights = vec![0.0_f64; n];
        let nf = n as f64;
        for i in 0..(n + 1) / 2 {
            // Tricomi initial guess.
            let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
            let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1e-300) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self {
            nodes: nodes.into_iter().map(T::lit).collect(),
            weights: weights.into_iter().map(T::lit).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Reference nodes on `[-1, 1]`, ascending.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: T, b: T) -> (Vec<T>, Vec<T>) {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let x = self.nodes.iter().map(|&t| mid + half * t).collect();
        let w = self.weights.iter().map(|&w| w * half).collect();
        (x, w)
    }

    pub fn integrate<F: FnMut(T) -> T>(&self, a: T, b: T, mut f: F) -> T {
        let half = (b - a) / T::lit(2.0);
        let mid = (a + b) / T::lit(2.0);
        let mut acc = Neumaier::new();
        for (&t, &w) in self.nodes.iter().zip(&self.weights) {
            acc.add(w * f(mid + half * t));
        }
        acc.value() * half
    }
}

/// `(P_n(x), P_n'(x))` by the Bonnet recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Orthonormal shifted Legendre polynomials `p_0..p_{m-1}` on `[0, 1]` at `x`.
pub fn shifted_legendre_orthonormal<T: Real>(m: usize, x: T, out: &mut [T]) {
    debug_assert!(out.len() >= m);
    if m == 0 {
        return;
    }
    let y = T::lit(2.0) * x - T::one();
    let mut p0 = T::one();
    out[0] = T::one();
    if m == 1 {
        return;
    }
    let mut p1 = y;
    out[1] = p1 * T::lit(3.0).sqrt();
    for k in 2..m {
        let kf = T::lit(k as f64);
        let p2 = ((T::lit(2.0) * kf - T::one()) * y * p1 - (kf - T::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
        out[k] = p1 * (T::lit(2.0) * kf + T::one()).sqrt();
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and limits for [`adaptive`].
#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Integral<T> {
    pub value: T,
    /// Sum of per-interval `|K15 - G7|` differences; conservative.
    pub error: T,
    pub intervals: usize,
    pub converged: bool,
}

fn gk15<T: Real, F: FnMut(T) -> T>(f: &mut F, a: T, b: T) -> (T, T) {
    let half = (b - a) / T::lit(2.0);
    let mid = (a + b) / T::lit(2.0);
    let fc = f(mid);
    let mut k = Neumaier::new();
    let mut g = Neumaier::new();
    k.add(T::lit(WGK[7]) * fc);
    g.add(T::lit(WG[3]) * fc);
    for i in 0..7 {
        let dx = half * T::lit(XGK[i]);
        let f1 = f(mid - dx);
        let f2 = f(mid + dx);
        k.add(T::lit(WGK[i]) * (f1 + f2));
        if i % 2 == 1 {
            g.add(T::lit(WG[i / 2]) * (f1 + f2));
        }
    }
    let kv = k.value() * half;
    let gv = g.value() * half;
    (kv, (kv - gv).abs())
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`, with the
/// interval initially split at every point of `breaks` inside `(a, b)`.
pub fn adaptive<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    a: T,
    b: T,
    breaks: &[T],
    opts: AdaptiveOptions,
) -> Integral<T> {
    let mut cuts = vec![a];
    let mut inner: Vec<T> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).expect("NaN breakpoint"));
    cuts.extend(inner);
    cuts.push(b);

    let mut pieces: Vec<(T, T, T, T)> = Vec::new();
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&mut f, w[0], w[1]);
            pieces.push((w[0], w[1], v, e));
        }
    }
    loop {
        let total: T = compensate(pieces.iter().map(|p| p.2));
        let err: T = compensate(pieces.iter().map(|p| p.3));
        let tol = T::lit(opts.abs_tol).max(T::lit(opts.rel_tol) * total.abs());
        if err <= tol || pieces.len() >= opts.max_intervals {
            return Integral {
                value: total,
                error: err,
                intervals: pieces.len(),
                converged: err <= tol,
            };
        }
        let (idx, _) = pieces
            .iter()
            .enumerate()
            .fold((0, T::neg_infinity()), |acc, (i, p)| {
                if p.3 > acc.1 {
                    (i, p.3)
                } else {
                    acc
                }
            });
        let (lo, hi, _, _) = pieces.swap_remove(idx);
        let mid = (lo + hi) / T::lit(2.0);
        if !(mid > lo && mid < hi) {
            // Interval can no longer be split in this precision.
            return Integral {
                value: total,
                error: err,
                intervals: pieces.len() + 1,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

fn compensate<T: Real, I: Iterator<Item = T>>(it: I) -> T {
    it.collect::<Neumaier<T>>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        let rule = GaussLegendre::<f64>::new(10);
        // Degree 19 is the exactness limit.
        let v = rule.integrate(0.0, 1.0, |x| x.powi(19));
        assert!((v - 1.0 / 20.0).abs() < 1e-15);
        let w: f64 = rule.weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_large_rule_is_accurate() {
        let rule = GaussLegendre::<f64>::new(400);
        let v = rule.integrate(0.0, std::f64::consts::PI, f64::sin);
        assert!((v - 2.0).abs() < 1e-13);
        for w in rule.nodes().windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn single_precision_rule() {
        let rule = GaussLegendre::<f32>::new(8);
        let v = rule.integrate(0.0, 1.0, |x| x * x);
        assert!((v - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn adaptive_handles_kink() {
        let r = adaptive(
            |x: f64| (x - 0.3).abs(),
            0.0,
            1.0,
            &[0.3],
            AdaptiveOptions::default(),
        );
        assert!(r.converged);
        assert!((r.value - (0.045 + 0.245)).abs() < 1e-14);
    }

    #[test]
    fn adaptive_sqrt_singularity() {
        let opts = AdaptiveOptions {
            rel_tol: 1e-10,
            ..Default::default()
        };
        let r = adaptive(|x: f64| x.sqrt(), 0.0, 1.0, &[], opts);
        assert!(r.converged);
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn shifted_legendre_is_orthonormal() {
        let rule = GaussLegendre::<f64>::new(30);
        let (x, w) = rule.on_interval(0.0, 1.0);
        let m = 12;
        let mut gram = vec![0.0; m * m];
        let mut buf = vec![0.0; m];
        for (&xi, &wi) in x.iter().zip(&w) {
            shifted_legendre_orthonormal(m, xi, &mut buf);
            for a in 0..m {
                for b in 0..m {
                    gram[a * m + b] += wi * buf[a] * buf[b];
                }
            }
        }
        for a in 0..m {
            for b in 0..m {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * m + b] - expect).abs() < 1e-13);
            }
        }
    }
}
