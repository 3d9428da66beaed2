//! Adaptive Gauss–Kronrod quadrature for complex-valued integrands.
//!
//! Every routine is deterministic: panels are bisected in a fixed greedy
//! order (largest error first, lowest index on ties) and the final value is
//! summed in left-to-right panel order.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};

/// Absolute/relative stopping rule: a result is accepted once
/// `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Tolerance {
    pub const fn new(abs: f64, rel: f64) -> Self {
        Self { abs, rel }
    }

    pub const fn absolute(abs: f64) -> Self {
        Self { abs, rel: 0.0 }
    }

    pub const fn relative(rel: f64) -> Self {
        Self { abs: 0.0, rel }
    }

    pub fn target(&self, magnitude: f64) -> f64 {
        self.abs.max(self.rel * magnitude)
    }

    pub(crate) fn scaled(&self, factor: f64) -> Self {
        Self {
            abs: self.abs * factor,
            rel: self.rel * factor,
        }
    }
}

impl From<f64> for Tolerance {
    fn from(abs: f64) -> Self {
        Self::absolute(abs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub abs_error_estimate: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn zero() -> Self {
        Self {
            value: Complex64::new(0.0, 0.0),
            abs_error_estimate: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    /// Turns a non-converged result into [`Error::ToleranceNotMet`].
    pub fn require_converged(self, requested: f64) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::ToleranceNotMet {
                achieved: self.abs_error_estimate,
                requested,
            })
        }
    }

    /// Sum of two independent pieces of one integral.
    pub fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
            evaluations: self.evaluations + other.evaluations,
            converged: self.converged && other.converged,
        }
    }

    pub fn scale(self, factor: Complex64) -> Self {
        Self {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.norm(),
            ..self
        }
    }
}

// Gauss–Kronrod 7/15 nodes and weights (QUADPACK qk15).
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
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

/// Nodes of the 15-point Kronrod rule on `[a, b]` with their Kronrod and
/// embedded 7-point Gauss weights (zero at nodes outside the Gauss rule).
pub(crate) fn kronrod15(a: f64, b: f64) -> [(f64, f64, f64); 15] {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut out = [(center, WGK[7] * half, WG[3] * half); 15];
    for j in 0..7 {
        let wg = if j % 2 == 1 { WG[j / 2] * half } else { 0.0 };
        out[2 * j] = (center - half * XGK[j], WGK[j] * half, wg);
        out[2 * j + 1] = (center + half * XGK[j], WGK[j] * half, wg);
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

fn gk15<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = f_center.norm() * WGK[7];
    let mut fv1 = [Complex64::new(0.0, 0.0); 7];
    let mut fv2 = [Complex64::new(0.0, 0.0); 7];

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += (f1 + f2) * WGK[j];
        res_abs += (f1.norm() + f2.norm()) * WGK[j];
        if j % 2 == 1 {
            res_g += (f1 + f2) * WG[j / 2];
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).norm();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).norm() + (fv2[j] - mean).norm());
    }

    let width = half.abs();
    let value = res_k * half;
    res_abs *= width;
    res_asc *= width;

    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    if !value.re.is_finite() || !value.im.is_finite() {
        err = f64::INFINITY;
    }
    Panel { a, b, value, err }
}

#[derive(PartialEq)]
struct HeapEntry {
    err: f64,
    index: usize,
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.index.cmp(&self.index))
    }
}

/// Globally adaptive 7/15-point Gauss–Kronrod integrator.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    tol: Tolerance,
    max_subdivisions: usize,
}

impl Integrator {
    pub fn new(tol: impl Into<Tolerance>) -> Self {
        Self {
            tol: tol.into(),
            max_subdivisions: 4000,
        }
    }

    /// Maximum number of bisections on top of the initial partition.
    pub fn max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }

    pub fn tolerance(&self) -> Tolerance {
        self.tol
    }

    pub fn integrate<F: Fn(f64) -> Complex64>(&self, f: F, a: f64, b: f64) -> QuadratureResult {
        self.integrate_panels(f, &[a, b])
    }

    /// Integrates over `[breakpoints[0], breakpoints[last]]` starting from the
    /// partition given by the (increasing) breakpoints.
    pub fn integrate_panels<F: Fn(f64) -> Complex64>(&self, f: F, breakpoints: &[f64]) -> QuadratureResult {
        if breakpoints.len() < 2 {
            return QuadratureResult::zero();
        }
        let mut panels: Vec<Panel> = breakpoints
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| gk15(&f, w[0], w[1]))
            .collect();
        if panels.is_empty() {
            return QuadratureResult::zero();
        }
        let mut evaluations = 15 * panels.len();
        let mut heap: BinaryHeap<HeapEntry> = panels
            .iter()
            .enumerate()
            .map(|(index, p)| HeapEntry { err: p.err, index })
            .collect();
        let mut total: Complex64 = panels.iter().map(|p| p.value).sum();
        let mut total_err: f64 = panels.iter().map(|p| p.err).sum();
        let mut bisections = 0;

        loop {
            if total_err <= self.tol.target(total.norm()) {
                // Confirm with exact sums before stopping.
                total = panels.iter().map(|p| p.value).sum();
                total_err = panels.iter().map(|p| p.err).sum();
                if total_err <= self.tol.target(total.norm()) {
                    break;
                }
            }
            if bisections >= self.max_subdivisions {
                break;
            }
            let Some(HeapEntry { index, .. }) = heap.pop() else {
                break;
            };
            let parent = panels[index];
            let mid = 0.5 * (parent.a + parent.b);
            let scale = parent.a.abs().max(parent.b.abs()).max(f64::MIN_POSITIVE);
            if parent.b - parent.a <= 64.0 * f64::EPSILON * scale || mid <= parent.a || mid >= parent.b {
                // Too narrow to split; the panel keeps its error.
                continue;
            }
            let left = gk15(&f, parent.a, mid);
            let right = gk15(&f, mid, parent.b);
            evaluations += 30;
            bisections += 1;
            total += left.value + right.value - parent.value;
            total_err += left.err + right.err - parent.err;
            panels[index] = left;
            heap.push(HeapEntry { err: left.err, index });
            panels.push(right);
            heap.push(HeapEntry {
                err: right.err,
                index: panels.len() - 1,
            });
        }

        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value: Complex64 = panels.iter().map(|p| p.value).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        QuadratureResult {
            value,
            abs_error_estimate: err,
            evaluations,
            converged: err <= self.tol.target(value.norm()),
        }
    }
}

/// `∫_a^b f(t) dt` by global adaptive bisection.
pub fn integrate_finite<F: Fn(f64) -> Complex64>(f: F, a: f64, b: f64, tol: impl Into<Tolerance>) -> QuadratureResult {
    if a == b {
        return QuadratureResult::zero();
    }
    if a > b {
        let r = Integrator::new(tol).integrate(f, b, a);
        return r.scale(Complex64::new(-1.0, 0.0));
    }
    Integrator::new(tol).integrate(f, a, b)
}

/// Caller-declared envelope `|f(u)| <= constant / (1 + |u|)^exponent`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    pub exponent: f64,
    pub constant: f64,
}

impl Decay {
    pub fn new(exponent: f64, constant: f64) -> Self {
        Self { exponent, constant }
    }

    /// Bound on `∫_U^∞ constant / u^exponent du`.
    pub fn tail_bound(&self, cutoff: f64) -> f64 {
        self.constant / ((self.exponent - 1.0) * cutoff.powf(self.exponent - 1.0))
    }
}

const MAX_HALFLINE_CUTOFF: f64 = 1e13;

/// `∫_{-∞}^0 f(u) du` through `u = -s/(1-s)`, truncated at `|u| = U` where
/// the declared decay bounds the remaining tail, which is added to the error.
pub fn integrate_left_halfline<F: Fn(f64) -> Complex64>(
    f: F,
    decay: Decay,
    tol: impl Into<Tolerance>,
) -> Result<QuadratureResult> {
    let tol = tol.into();
    if !(decay.exponent > 1.0) {
        return Err(invalid(
            "decay_exponent",
            format!("must exceed 1, got {}", decay.exponent),
        ));
    }
    if !(decay.constant >= 0.0) {
        return Err(invalid("decay_constant", "must be nonnegative"));
    }
    let budget = if tol.abs > 0.0 {
        0.25 * tol.abs
    } else {
        0.25 * tol.rel * decay.constant.max(f64::MIN_POSITIVE)
    };
    let cutoff = if decay.constant == 0.0 {
        1.0
    } else {
        (decay.constant / ((decay.exponent - 1.0) * budget))
            .powf(1.0 / (decay.exponent - 1.0))
            .clamp(1.0, MAX_HALFLINE_CUTOFF)
    };
    let tail = decay.tail_bound(cutoff);
    let s_max = cutoff / (1.0 + cutoff);
    let mapped = |s: f64| {
        let one_minus = 1.0 - s;
        f(-s / one_minus) / (one_minus * one_minus)
    };
    let inner = Integrator::new(tol.scaled(0.75)).integrate(mapped, 0.0, s_max);
    let err = inner.abs_error_estimate + tail;
    Ok(QuadratureResult {
        value: inner.value,
        abs_error_estimate: err,
        evaluations: inner.evaluations,
        converged: inner.converged && err <= tol.target(inner.value.norm()),
    })
}

/// `∫_0^∞ f(x) dx`, the mirror image of [`integrate_left_halfline`].
pub fn integrate_right_halfline<F: Fn(f64) -> Complex64>(
    f: F,
    decay: Decay,
    tol: impl Into<Tolerance>,
) -> Result<QuadratureResult> {
    integrate_left_halfline(|u| f(-u), decay, tol)
}

/// `e^{-2πiωt}` with the phase reduced modulo one period.
pub fn unit_phase(omega: f64, t: f64) -> Complex64 {
    let turns = omega * t;
    let frac = turns - turns.round();
    Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * frac)
}

/// Uniform breakpoints on `[a, b]` with spacing at most `width`.
pub fn uniform_breakpoints(a: f64, b: f64, width: f64) -> Vec<f64> {
    let n = ((b - a) / width).ceil().max(1.0) as usize;
    (0..=n)
        .map(|j| if j == n { b } else { a + (b - a) * j as f64 / n as f64 })
        .collect()
}

/// `∫_a^b f(t) e^{-2πiωt} dt` with initial panels no wider than a quarter
/// period `1/(4|ω|)`.
pub fn oscillatory_integral<F: Fn(f64) -> Complex64>(
    f: F,
    omega: f64,
    a: f64,
    b: f64,
    tol: impl Into<Tolerance>,
) -> QuadratureResult {
    if a == b {
        return QuadratureResult::zero();
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let width = if omega == 0.0 {
        hi - lo
    } else {
        1.0 / (4.0 * omega.abs())
    };
    let breaks = uniform_breakpoints(lo, hi, width);
    let r = Integrator::new(tol).integrate_panels(|t| f(t) * unit_phase(omega, t), &breaks);
    r.scale(Complex64::new(sign, 0.0))
}

const CHIRP_MAX_CUTOFF: f64 = 1e4;

/// `∫_a^∞ A(ρ) e^{-2πisρ²} dρ` for a smooth amplitude decaying at least like
/// `ρ^{-2}`.
///
/// `[a, R]` is split into panels spanning a quarter turn of the chirp phase
/// (merged with a fixed grid resolving the amplitude) and the part beyond `R`
/// is replaced by two integration-by-parts terms; the second term is charged
/// to the error estimate.
pub fn chirp_integral<F: Fn(f64) -> Complex64>(
    amplitude: F,
    s: f64,
    a: f64,
    tol: impl Into<Tolerance>,
) -> Result<QuadratureResult> {
    let tol = tol.into();
    if s == 0.0 || !s.is_finite() {
        return Err(invalid("s", format!("chirp rate must be finite and nonzero, got {s}")));
    }
    if !(a >= 0.0) {
        return Err(invalid("a", format!("lower limit must be nonnegative, got {a}")));
    }
    let budget = if tol.abs > 0.0 { tol.abs } else { tol.rel };
    let omega = 4.0 * std::f64::consts::PI * s;
    let p = |rho: f64| amplitude(rho) / Complex64::new(0.0, -omega * rho);
    let tail_terms = |r: f64| {
        let h = 1e-3 * r;
        let dp = (p(r + h) - p(r - h)) / (2.0 * h);
        let p1 = dp / Complex64::new(0.0, -omega * r);
        (p(r), p1)
    };

    let mut cutoff = (0.05 / (s * s * budget))
        .powf(1.0 / 6.0)
        .clamp(20.0, CHIRP_MAX_CUTOFF)
        .max(a + 4.0);
    let (mut p0, mut p1) = tail_terms(cutoff);
    while p1.norm() > 0.25 * budget && cutoff < CHIRP_MAX_CUTOFF {
        cutoff = (cutoff * 1.5).min(CHIRP_MAX_CUTOFF);
        (p0, p1) = tail_terms(cutoff);
    }

    let mut breaks = Vec::new();
    let mut x = a;
    while x < a + 4.0 {
        breaks.push(x);
        x += 0.25;
    }
    while x < cutoff {
        breaks.push(x);
        x *= 1.2;
    }
    let quarter = 1.0 / (4.0 * s.abs());
    let first = (a * a / quarter).floor() as u64 + 1;
    let last = (cutoff * cutoff / quarter).ceil() as u64;
    breaks.extend((first..last).map(|j| (j as f64 * quarter).sqrt()));
    breaks.push(cutoff);
    breaks.retain(|&b| b >= a && b <= cutoff);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let body =
        Integrator::new(tol.scaled(0.5)).integrate_panels(|rho| amplitude(rho) * unit_phase(s, rho * rho), &breaks);
    let tail = -unit_phase(s, cutoff * cutoff) * (p0 - p1);
    let err = body.abs_error_estimate + p1.norm();
    Ok(QuadratureResult {
        value: body.value + tail,
        abs_error_estimate: err,
        evaluations: body.evaluations + 4,
        converged: body.converged && err <= tol.target(body.value.norm()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn polynomial_is_exact() {
        let r = integrate_finite(|t| c(t * t), 0.0, 1.0, 1e-14);
        assert!(r.converged);
        assert!((r.value.re - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let r = integrate_finite(c, 1.0, 0.0, 1e-14);
        assert!((r.value.re + 0.5).abs() < 1e-15);
    }

    #[test]
    fn squared_sine_has_mean_one_half() {
        let r = integrate_finite(|t| c((2.0 * PI * 9.0 * t).sin().powi(2)), 0.0, 1.0, 1e-13);
        assert!((r.value.re - 0.5).abs() < 1e-12);
    }

    #[test]
    fn deep_zero_integrand_self_converges() {
        // ∫₀¹ e^{-1/t} dt; reference through u = 1/t: ∫₁^∞ e^{-u}/u² du.
        let f = |t: f64| c(if t > 0.0 { (-1.0 / t).exp() } else { 0.0 });
        let loose = integrate_finite(f, 0.0, 1.0, 1e-10);
        let tight = integrate_finite(f, 0.0, 1.0, 1e-12);
        let substituted = integrate_right_halfline(
            |v: f64| {
                let u = 1.0 + v;
                c((-u).exp() / (u * u))
            },
            Decay::new(2.0, 1.0),
            1e-13,
        )
        .unwrap();
        assert!((loose.value - tight.value).norm() < 1e-10);
        assert!((tight.value - substituted.value).norm() < 1e-12);
        assert!((tight.value.re - 0.148_495_506_775_922_05).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_is_refined() {
        let r = integrate_finite(|t| c(1.0 / t.sqrt()), 0.0, 1.0, 1e-10);
        assert!(r.converged, "{r:?}");
        assert!((r.value.re - 2.0).abs() < 1e-9);
    }

    #[test]
    fn left_halfline_examples() {
        let exp = integrate_left_halfline(|u| c(u.exp()), Decay::new(2.0, 2.0), 1e-12).unwrap();
        assert!((exp.value.re - 1.0).abs() < 1e-11);
        let alg = integrate_left_halfline(|u| c(1.0 / (1.0 + u.abs()).powi(2)), Decay::new(2.0, 1.0), 1e-10).unwrap();
        assert!((alg.value.re - 1.0).abs() < alg.abs_error_estimate.max(1e-10));
        // ∫_{-∞}^0 2u²/(1+|u|)⁴ du = 2/3 (antiderivative of x²/(1+x)⁴ is
        // -(1/(1+x) - 1/(1+x)² + 1/(3(1+x)³))).
        let quartic = integrate_left_halfline(
            |u| c(2.0 * u * u / (1.0 + u.abs()).powi(4)),
            Decay::new(2.0, 2.0),
            1e-10,
        )
        .unwrap();
        assert!((quartic.value.re - 2.0 / 3.0).abs() < 1e-9, "{quartic:?}");
    }

    #[test]
    fn halfline_rejects_slow_decay() {
        let err = integrate_left_halfline(c, Decay::new(1.0, 1.0), 1e-6).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { .. }));
    }

    #[test]
    fn oscillatory_examples() {
        let full = oscillatory_integral(|_| c(1.0), 3.0, 0.0, 1.0, 1e-14);
        assert!(full.value.norm() < 1e-14);
        let flat = oscillatory_integral(|_| c(1.0), 0.0, 0.0, 1.0, 1e-14);
        assert!((flat.value.re - 1.0).abs() < 1e-15);
        let ramp = oscillatory_integral(c, 1.0, 0.0, 1.0, 1e-14);
        let expected = Complex64::new(0.0, 1.0 / (2.0 * PI));
        assert!((ramp.value - expected).norm() < 1e-14);
    }

    #[test]
    fn chirp_gaussian_closed_form() {
        // ∫₀^∞ ρ e^{-ρ²} e^{-2πisρ²} dρ = 1 / (2 (1 + 2πis)).
        for s in [0.3, 1.0, -2.0] {
            let r = chirp_integral(|rho| c(rho * (-rho * rho).exp()), s, 0.0, 1e-12).unwrap();
            let exact = Complex64::new(0.5, 0.0) / Complex64::new(1.0, 2.0 * PI * s);
            assert!((r.value - exact).norm() < 1e-11, "s {s}: {r:?}");
        }
    }

    #[test]
    fn chirp_algebraic_amplitude_uses_tail() {
        // ∫₀^∞ 2ρ/(1+ρ²)² e^{-2πisρ²} dρ = 1 - iω e^{iω} E₁(iω), ω = 2πs.
        let cases = [
            (1.0, Complex64::new(0.040_904_745_420_745_19, -0.141_752_818_404_890_16)),
            (0.3, Complex64::new(0.215_205_801_377_360_67, -0.295_749_763_631_256_67)),
        ];
        for (s, exact) in cases {
            let r = chirp_integral(|rho| c(2.0 * rho / (1.0 + rho * rho).powi(2)), s, 0.0, 1e-10).unwrap();
            assert!((r.value - exact).norm() < 1e-9, "s {s}: {r:?}");
            assert!(r.converged);
        }
        assert!(chirp_integral(|_| c(1.0), 0.0, 0.0, 1e-6).is_err());
    }

    #[test]
    fn halving_tolerance_never_increases_error() {
        let corpus: Vec<Box<dyn Fn(f64) -> Complex64>> = vec![
            Box::new(|t| c((-1.0 / t).exp())),
            Box::new(|t| c(t.sqrt().ln().abs().sqrt())),
            Box::new(|t| Complex64::from_polar(1.0, 40.0 * t * t)),
            Box::new(|t| c(1.0 / (1e-3 + (t - 0.3).powi(2)))),
        ];
        for f in &corpus {
            let mut tol = 1e-4;
            let mut previous = f64::INFINITY;
            for _ in 0..12 {
                let r = integrate_finite(f, 0.0, 1.0, tol);
                assert!(r.abs_error_estimate <= previous, "tol {tol}");
                previous = r.abs_error_estimate;
                tol /= 2.0;
            }
        }
    }

    #[test]
    fn linearity_within_error_estimates() {
        let f = |t: f64| Complex64::from_polar(1.0, 7.0 * t) / (1.0 + t);
        let g = |t: f64| c((3.0 * t).cos() * t.sqrt());
        let (alpha, beta) = (Complex64::new(0.5, -2.0), Complex64::new(-1.5, 0.25));
        let rf = integrate_finite(f, 0.0, 2.0, 1e-9);
        let rg = integrate_finite(g, 0.0, 2.0, 1e-9);
        let rs = integrate_finite(|t| alpha * f(t) + beta * g(t), 0.0, 2.0, 1e-9);
        let combo = alpha * rf.value + beta * rg.value;
        let bound =
            2.0 * (alpha.norm() * rf.abs_error_estimate + beta.norm() * rg.abs_error_estimate + rs.abs_error_estimate);
        assert!((rs.value - combo).norm() <= bound);
    }

    #[test]
    #[allow(clippy::type_complexity)]
    fn halfline_matches_manual_substitution() {
        let corpus: Vec<(Box<dyn Fn(f64) -> Complex64>, Decay)> = vec![
            (Box::new(|u: f64| c(u.exp())), Decay::new(2.0, 2.0)),
            (Box::new(|u: f64| c(1.0 / (1.0 + u * u))), Decay::new(2.0, 2.0)),
            (Box::new(|u: f64| c((1.0 - u).powf(-2.5))), Decay::new(2.5, 1.0)),
            (
                Box::new(|u: f64| Complex64::from_polar(1.0, u) / (1.0 - u).powi(3)),
                Decay::new(3.0, 1.0),
            ),
            (
                Box::new(|u: f64| c((-u * u).exp() * (1.0 + u.abs()))),
                Decay::new(3.0, 2.0),
            ),
        ];
        for (f, decay) in &corpus {
            let half = integrate_left_halfline(f, *decay, 1e-10).unwrap();
            let manual = integrate_finite(
                |s| {
                    let one_minus = 1.0 - s;
                    f(-s / one_minus) / (one_minus * one_minus)
                },
                0.0,
                1.0,
                1e-10,
            );
            let bound = half.abs_error_estimate + manual.abs_error_estimate;
            assert!((half.value - manual.value).norm() <= bound.max(1e-12));
        }
    }
}
