//! The entire function
//!
//! ```text
//! h(z) = e^{iπz} sin(πz) / (F(z) F(−z)),   F(w) = cos(π√w / 2),
//! ```
//!
//! and the lacunary sine series `H(t) = 2i Σ_k h((2k+1)²) sin(2π(2k+1)² t)`
//! built from its values at the odd squares. `H` has a deep zero at `t = 0`:
//! `|H(t)| ≤ C₁ e^{−C₂/|t|}`.
//!
//! With `ĥ(t) = ∫ e^{−2πitx} h(x) dx` supported in `[0, 1]` and `h(−n²) = −h(n²)`,
//! Poisson summation gives `ĥ(t) = −H(t)` on `(0, 1)`.

use std::f64::consts::{LN_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quadrature::{integrate_finite, uniform_breakpoints, Integrator, Tolerance};
use crate::weights::Weight;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Half-width of the neighbourhoods of `±(2m+1)²` evaluated by the local rule.
pub const SINGULAR_RADIUS: f64 = 1e-2;

/// `F(w) = cos(π√w/2) = Σ (−1)ⁿ (π²/4)ⁿ wⁿ / (2n)!`, an entire function of `w`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvenCosSqrt {
    pub degree: usize,
    pub switchover: f64,
}

impl Default for EvenCosSqrt {
    fn default() -> Self {
        Self {
            degree: 40,
            switchover: 2.0,
        }
    }
}

impl EvenCosSqrt {
    pub fn eval(&self, w: Complex64) -> Complex64 {
        if w.norm() <= self.switchover {
            self.eval_series(w)
        } else {
            eval_direct(w)
        }
    }

    /// Horner evaluation of the power series.
    pub fn eval_series(&self, w: Complex64) -> Complex64 {
        let x = -PI * PI / 4.0 * w;
        let mut acc = Complex64::new(1.0, 0.0);
        for n in (1..=self.degree).rev() {
            acc = 1.0 + acc * x / ((2 * n - 1) * (2 * n)) as f64;
        }
        acc
    }
}

/// `cos(π√w/2)` with the principal root; cosine is even, so any root works.
pub fn eval_direct(w: Complex64) -> Complex64 {
    (PI / 2.0 * w.sqrt()).cos()
}

pub fn eval_f(w: Complex64) -> Complex64 {
    EvenCosSqrt::default().eval(w)
}

/// `(m, sign)` when `z` lies within [`SINGULAR_RADIUS`] of `sign·(2m+1)²`.
fn near_odd_square(z: Complex64) -> Option<(u64, f64)> {
    if z.re == 0.0 {
        return None;
    }
    let r = z.re.abs().sqrt();
    let m = ((r - 1.0) / 2.0).round().max(0.0);
    let n0 = 2.0 * m + 1.0;
    let sign = z.re.signum();
    if (z - sign * n0 * n0).norm() < SINGULAR_RADIUS {
        Some((m as u64, sign))
    } else {
        None
    }
}

/// `e^{iπz}` as `(−1)ⁿ e^{iπζ}`, `ζ = z − n`, `n = round(Re z)`.
fn exp_i_pi(z: Complex64) -> (Complex64, Complex64) {
    let n = z.re.round();
    let zeta = z - n;
    let parity = if n.rem_euclid(2.0) == 0.0 { 1.0 } else { -1.0 };
    ((I * PI * zeta).exp() * parity, zeta)
}

/// `h(z)`; the removable singularities at `±(2m+1)²` use the local rule
///
/// ```text
/// sin(πz)/F(z)  = (−1)^m · 2(√z + n₀) · sinc(πε) / sinc(πd/2),   ε = z − n₀²,  d = ε/(√z + n₀)
/// sin(πz)/F(−z) = (−1)^m · (−2)(√−z + n₀) · sinc(πε) / sinc(πd/2), ε = z + n₀², d = −ε/(√−z + n₀)
/// ```
///
/// which is exact, not a truncated expansion.
pub fn eval_h(z: Complex64) -> Complex64 {
    let (e, zeta) = exp_i_pi(z);
    if let Some((m, sign)) = near_odd_square(z) {
        let n0 = (2 * m + 1) as f64;
        let parity = if m % 2 == 0 { 1.0 } else { -1.0 };
        let eps = z - sign * n0 * n0;
        let sinc_eps = crate::sinc(PI * eps);
        if sign > 0.0 {
            let root = z.sqrt() + n0;
            let d = eps / root;
            let ratio = parity * 2.0 * root * sinc_eps / crate::sinc(PI * d / 2.0);
            e * ratio / eval_f(-z)
        } else {
            let root = (-z).sqrt() + n0;
            let d = -eps / root;
            let ratio = -parity * 2.0 * root * sinc_eps / crate::sinc(PI * d / 2.0);
            e * ratio / eval_f(z)
        }
    } else {
        // e^{iπz} sin(πz) = e^{iπζ} sin(πζ): the parities cancel.
        let numerator = (I * PI * zeta).exp() * (PI * zeta).sin();
        numerator / (eval_f(z) * eval_f(-z))
    }
}

/// `log |sin(a + ib)|` from `|sin|² = sin²a + sinh²b`, safe for large `|b|`.
fn ln_abs_sin(w: Complex64) -> f64 {
    ln_hypot_sinh(w.re.sin(), w.im)
}

/// `log |cos(a + ib)|` from `|cos|² = cos²a + sinh²b`.
fn ln_abs_cos(w: Complex64) -> f64 {
    ln_hypot_sinh(w.re.cos(), w.im)
}

/// `½ log(s² + sinh²b)`.
fn ln_hypot_sinh(s: f64, b: f64) -> f64 {
    let b = b.abs();
    if b < 20.0 {
        0.5 * (s * s + b.sinh().powi(2)).ln()
    } else {
        let ln_sinh = b - LN_2 + (-(-2.0 * b).exp()).ln_1p();
        ln_sinh + 0.5 * (s * s * (-2.0 * ln_sinh).exp()).ln_1p()
    }
}

/// `log |h(z)|`, finite far into the complex plane where `h` itself would
/// overflow or underflow.
pub fn ln_abs_h(z: Complex64) -> f64 {
    if near_odd_square(z).is_some() {
        return eval_h(z).norm().ln();
    }
    let half_pi = PI / 2.0;
    -PI * z.im + ln_abs_sin(PI * z) - ln_abs_cos(half_pi * z.sqrt()) - ln_abs_cos(half_pi * (-z).sqrt())
}

/// `|h(x)| ≤ π(2√|x| + 1) / cosh(π√|x|/2)` on the real axis.
pub fn real_axis_envelope(x: f64) -> f64 {
    let r = x.abs().sqrt();
    PI * (2.0 * r + 1.0) / (PI * r / 2.0).cosh()
}

/// `∫_X^∞` of the real-axis envelope, via `x = v²` and `1/cosh ≤ 2e^{−·}`.
fn real_axis_envelope_tail(cutoff: f64) -> f64 {
    let v = cutoff.sqrt();
    let a = PI / 2.0;
    let e = (-a * v).exp();
    let first = e * (v / a + 1.0 / (a * a));
    let second = e * (v * v / a + 2.0 * v / (a * a) + 2.0 / (a * a * a));
    // ∫ 2π(2v+1)·2e^{−av}·2v dv = 8π ∫ (2v² + v) e^{−av} dv.
    8.0 * PI * (2.0 * second + first)
}

/// `h((2k+1)²)` for `k = k_min..=m`; every value is real.
pub fn series_coefficients(k_min: usize, m: usize) -> Result<Vec<f64>> {
    if m < k_min {
        return Err(invalid("M", format!("must be at least k_min = {k_min}, got {m}")));
    }
    (k_min..=m)
        .map(|k| {
            let n = (2 * k + 1) as f64;
            let v = eval_h(Complex64::new(n * n, 0.0));
            if v.im.abs() > 1e-12 * v.re.abs().max(1e-300) {
                return Err(Error::Inapplicable(format!("h({}) has imaginary part {}", n * n, v.im)));
            }
            Ok(v.re)
        })
        .collect()
}

/// Closed form `h((2k+1)²) = −(−1)^k 4(2k+1) / cosh(π(2k+1)/2)`.
pub fn coefficient_closed_form(k: usize) -> f64 {
    let n = (2 * k + 1) as f64;
    let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
    sign * 4.0 * n / (PI * n / 2.0).cosh()
}

/// Least-squares fit `log|H(t)| ≈ log C₁ − C₂ x` against an abscissa `x`
/// (`1/t`, or `1/(1−t)` near `t = 1`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub c1: f64,
    pub c2: f64,
    pub slope: f64,
    pub intercept: f64,
    pub correlation: f64,
    pub points_used: usize,
}

/// Truncated series `H(t) = 2i Σ_{k=k_min}^{M} c_k sin(2π(2k+1)² t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeepZeroSeries {
    k_min: usize,
    m: usize,
    coeffs: Vec<f64>,
    truncation_bound: f64,
    fit: Option<DecayFit>,
}

impl DeepZeroSeries {
    pub fn new(k_min: usize, m: usize) -> Result<Self> {
        let coeffs = series_coefficients(k_min, m)?;
        // Ratios of consecutive closed-form terms are below e^{-π}·3, so 60
        // further terms exhaust double precision.
        let truncation_bound = (m + 1..m + 61).map(|k| 2.0 * coefficient_closed_form(k).abs()).sum();
        Ok(Self {
            k_min,
            m,
            coeffs,
            truncation_bound,
            fit: None,
        })
    }

    /// The series with no terms, `H ≡ 0`.
    pub fn zero() -> Self {
        Self {
            k_min: 0,
            m: 0,
            coeffs: Vec::new(),
            truncation_bound: 0.0,
            fit: None,
        }
    }

    pub fn k_min(&self) -> usize {
        self.k_min
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// `c_k` for `k = k_min..=M`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `(2k+1)²` paired with `c_k`.
    pub fn frequencies(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.coeffs.iter().enumerate().map(move |(i, &c)| {
            let n = (2 * (self.k_min + i) + 1) as u64;
            (n * n, c)
        })
    }

    /// `Σ_{k>M} 2|c_k| ≥ sup_t |H(t) − H_M(t)|`.
    pub fn truncation_bound(&self) -> f64 {
        self.truncation_bound
    }

    pub fn fit(&self) -> Option<&DecayFit> {
        self.fit.as_ref()
    }

    pub fn with_fit(mut self, fit: DecayFit) -> Self {
        self.fit = Some(fit);
        self
    }

    /// `H(t)`; periodic with period one.
    pub fn eval(&self, t: f64) -> Complex64 {
        Complex64::new(0.0, 2.0 * self.eval_real(t))
    }

    /// `H(t)/(2i)`, the real sine series.
    pub fn eval_real(&self, t: f64) -> f64 {
        let mut acc = 0.0;
        for (n2, c) in self.frequencies() {
            let turns = n2 as f64 * t;
            acc += c * (2.0 * PI * (turns - turns.round())).sin();
        }
        acc
    }

    /// Fourier coefficient `Ĥ(n) = ∫₀¹ H(t) e^{−2πint} dt`, exact from the
    /// coefficients: `c_k` at `n = (2k+1)²`, `−c_k` at `n = −(2k+1)²`.
    pub fn fourier_coefficient(&self, n: i64) -> Complex64 {
        let key = n.unsigned_abs();
        for (n2, c) in self.frequencies() {
            if n2 == key {
                return Complex64::new(c * n.signum() as f64, 0.0);
            }
        }
        Complex64::new(0.0, 0.0)
    }

    /// `∫₀¹ |H|² = Σ 2c_k²`.
    pub fn l2_norm_squared(&self) -> f64 {
        self.coeffs.iter().map(|c| 2.0 * c * c).sum()
    }

    /// Largest `(2k+1)²` with `|c_k|` above `threshold`.
    pub fn effective_bandwidth(&self, threshold: f64) -> u64 {
        self.frequencies()
            .filter(|(_, c)| c.abs() > threshold)
            .map(|(n2, _)| n2)
            .max()
            .unwrap_or(1)
    }
}

/// `ĥ(t) = ∫ e^{−2πitx} h(x) dx`, truncated at `|x| = cutoff` with the
/// real-axis envelope bounding the remainder.
pub fn eval_h_integral(t: f64, cutoff: f64, tol: impl Into<Tolerance>) -> QuadratureOutcome {
    let tol = tol.into();
    let f = |x: f64| eval_h(Complex64::new(x, 0.0));
    let width = if t == 0.0 {
        0.25
    } else {
        0.25f64.min(1.0 / (4.0 * t.abs()))
    };
    // e^{iπx} sin(πx) carries frequencies 0 and 1, so quarter-unit panels
    // resolve the phase for |t| ≤ 1.
    let breaks = uniform_breakpoints(-cutoff, cutoff, width);
    let r = Integrator::new(tol).integrate_panels(|x| f(x) * crate::quadrature::unit_phase(t, x), &breaks);
    let tail = 2.0 * real_axis_envelope_tail(cutoff);
    QuadratureOutcome {
        value: r.value,
        quadrature_error: r.abs_error_estimate,
        truncation_error: tail,
        converged: r.converged,
    }
}

/// A quadrature value with its numerical and truncation error separated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOutcome {
    pub value: Complex64,
    pub quadrature_error: f64,
    pub truncation_error: f64,
    pub converged: bool,
}

impl QuadratureOutcome {
    pub fn total_error(&self) -> f64 {
        self.quadrature_error + self.truncation_error
    }
}

/// Default cutoff for [`eval_h_integral`]; the envelope tail beyond it is below `1e-15`.
pub const H_INTEGRAL_CUTOFF: f64 = 900.0;

/// Comparison of the series with the Fourier integral at one `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRoute {
    pub t: f64,
    pub series: Complex64,
    /// `−ĥ(t)`.
    pub integral: Complex64,
    pub discrepancy: f64,
    pub combined_bound: f64,
}

impl TwoRoute {
    pub fn agrees(&self) -> bool {
        self.discrepancy <= self.combined_bound
    }
}

pub fn two_route_check(series: &DeepZeroSeries, t: f64, tol: f64) -> TwoRoute {
    let s = series.eval(t);
    let r = eval_h_integral(t, H_INTEGRAL_CUTOFF, tol);
    let integral = -r.value;
    TwoRoute {
        t,
        series: s,
        integral,
        discrepancy: (s - integral).norm(),
        // Rounding in the series is bounded by a few ulps of Σ2|c_k|.
        combined_bound: series.truncation_bound()
            + r.total_error()
            + 16.0 * f64::EPSILON * series.coeffs().iter().map(|c| 2.0 * c.abs()).sum::<f64>(),
    }
}

/// `n` points in `[t_min, t_max]` spaced uniformly in `1/t`.
pub fn inverse_spaced_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    let (a, b) = (1.0 / t_max, 1.0 / t_min);
    (0..n)
        .map(|i| {
            let x = a + (b - a) * i as f64 / (n - 1).max(1) as f64;
            1.0 / x
        })
        .rev()
        .collect()
}

fn fit_line(points: &[(f64, f64)]) -> Result<DecayFit> {
    if points.len() < 4 {
        return Err(Error::Inapplicable(format!(
            "only {} usable points for the decay fit, need 4",
            points.len()
        )));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    Ok(DecayFit {
        c1: intercept.exp(),
        c2: -slope,
        slope,
        intercept,
        correlation: sxy / (sxx * syy).sqrt(),
        points_used: points.len(),
    })
}

/// Fit of `log|H(t)|` against `1/t`; samples below `1e-300` are dropped.
pub fn decay_fit(series: &DeepZeroSeries, t_grid: &[f64]) -> Result<DecayFit> {
    if t_grid.len() < 8 {
        return Err(invalid(
            "t_grid",
            format!("need at least 8 points, got {}", t_grid.len()),
        ));
    }
    if let Some(t) = t_grid.iter().find(|&&t| !(t > 0.0 && t <= 0.25)) {
        return Err(invalid("t_grid", format!("point {t} outside (0, 0.25]")));
    }
    let points: Vec<(f64, f64)> = t_grid
        .iter()
        .filter_map(|&t| {
            let v = series.eval(t).norm();
            (v > 1e-300 && v.is_finite()).then(|| (1.0 / t, v.ln()))
        })
        .collect();
    fit_line(&points)
}

/// Fit of `log|H(1−s)|` against `1/s` for the given offsets `s = 1 − t`.
pub fn decay_fit_near_one(series: &DeepZeroSeries, offsets: &[f64]) -> Result<DecayFit> {
    if offsets.len() < 8 {
        return Err(invalid(
            "offsets",
            format!("need at least 8 points, got {}", offsets.len()),
        ));
    }
    let points: Vec<(f64, f64)> = offsets
        .iter()
        .filter_map(|&s| {
            let v = series.eval(1.0 - s).norm();
            (v > 1e-300 && v.is_finite()).then(|| (1.0 / s, v.ln()))
        })
        .collect();
    fit_line(&points)
}

/// Constants for `|h(x+iy)| ≤ A e^{−κ√|y|} e^{2π max(−y,0)} / (1+x²)` on a grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeFit {
    /// Fitted rate `κ` (slope of the scaled log-modulus against `√|y|`, negated).
    pub kappa: f64,
    /// `max |h|(1+x²) e^{κ√|y|} e^{−2π max(−y,0)}` over the grid.
    pub amplitude: f64,
    pub points_used: usize,
}

/// Fits `κ` by least squares and reports the resulting amplitude bound.
/// Grid points inside the singular neighbourhoods are rejected.
pub fn estimate_envelope_constants(grid: &[(f64, f64)]) -> Result<EnvelopeFit> {
    if grid.is_empty() {
        return Err(invalid("grid", "empty"));
    }
    let mut pts = Vec::with_capacity(grid.len());
    for &(x, y) in grid {
        let z = Complex64::new(x, y);
        if near_odd_square(z).is_some() {
            return Err(invalid("grid", format!("({x}, {y}) lies in a singular neighbourhood")));
        }
        let scaled = ln_abs_h(z) + (1.0 + x * x).ln() - 2.0 * PI * (-y).max(0.0);
        pts.push((y.abs().sqrt(), scaled));
    }
    let kappa = if pts.iter().any(|p| p.0 != pts[0].0) {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        -(sxy / sxx)
    } else {
        0.0
    };
    let amplitude = pts
        .iter()
        .map(|p| p.1 + kappa * p.0)
        .fold(f64::NEG_INFINITY, f64::max)
        .exp();
    Ok(EnvelopeFit {
        kappa,
        amplitude,
        points_used: pts.len(),
    })
}

/// `e^{2πty} ∫ |h(x+iy)| dx ≥ |H(t)|` for `t > 0`, with `y = 1/(32t²)`.
///
/// Shifting the Fourier integral to `Im z = y` turns the cancellation in the
/// sine series into a positive integrand; this `y` balances `e^{2πty}`
/// against the decay `|h(x+iy)| ≈ 2e^{−π√(2y)/2}`.
pub fn shifted_line_bound(t: f64, tol: f64) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(invalid("t", format!("must lie in (0,1), got {t}")));
    }
    let y = (1.0 / (32.0 * t * t)).max(1.0);
    let shift = 2.0 * PI * t * y;
    // |h(x+iy)| ≲ e^{−π√|x|/2} once |x| ≫ y².
    let cutoff = (8.0 * y).max((4.0 * t * y + 80.0 / PI).powi(2)).max(100.0);
    let mut breaks: Vec<f64> = Vec::new();
    let mut x = 1.0;
    while x < cutoff {
        breaks.push(x);
        breaks.push(-x);
        x *= 1.25;
    }
    breaks.extend([0.0, cutoff, -cutoff]);
    breaks.sort_by(f64::total_cmp);
    let r = Integrator::new(Tolerance::relative(tol)).integrate_panels(
        |x| Complex64::new((ln_abs_h(Complex64::new(x, y)) + shift).exp(), 0.0),
        &breaks,
    );
    if !r.converged || !r.value.re.is_finite() {
        return Err(Error::ToleranceNotMet {
            achieved: r.abs_error_estimate,
            requested: tol * r.value.norm(),
        });
    }
    Ok(r.value.re * (1.0 + tol))
}

/// `∫₀¹ |H|²/w` split at `t_floor`: quadrature of the series above, and the
/// shifted-line bound squared below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Membership {
    /// `∫_{t_floor}^1 |H|²/w`.
    pub value: f64,
    pub quadrature_error: f64,
    /// Upper bound on `∫_0^{t_floor} |H|²/w`.
    pub small_t_bound: f64,
    pub t_floor: f64,
    /// Largest `|H(t)|²/w(t)` on the sample grid and where it occurs.
    pub max_integrand: f64,
    pub argmax: f64,
}

impl Membership {
    pub fn upper_bound(&self) -> f64 {
        self.value + self.quadrature_error + self.small_t_bound
    }
}

/// Default split point for [`membership_check`]: above it the series is
/// evaluated to well under its own magnitude in double precision.
pub const MEMBERSHIP_T_FLOOR: f64 = 0.01;

/// Checks `H ∈ L²(T, 1/w)`.
///
/// For the exponential weight `exp(−c/t)` the integrand `|H|² e^{c/t}` is
/// sampled for boundedness, integrated on `[t_floor, 1]` and bounded on
/// `(0, t_floor)`; constant weights are integrated on the whole interval.
pub fn membership_check(series: &DeepZeroSeries, w: &Weight, t_floor: f64) -> Result<Membership> {
    w.validate()?;
    let floor = match w {
        Weight::Exp { c } => {
            if let Some(fit) = series.fit() {
                if *c > 2.0 * fit.c2 * (1.0 + 1e-12) {
                    return Err(invalid(
                        "weight",
                        format!("c = {c} exceeds twice the fitted rate {}", fit.c2),
                    ));
                }
            }
            if !(t_floor > 0.0 && t_floor < 1.0) {
                return Err(invalid("t_floor", format!("must lie in (0,1), got {t_floor}")));
            }
            t_floor
        }
        Weight::Constant { .. } => 0.0,
        Weight::Tabulated { .. } => {
            return Err(Error::Inapplicable(
                "membership needs an exponential or constant weight".into(),
            ))
        }
    };
    if series.coeffs().is_empty() {
        return Ok(Membership {
            value: 0.0,
            quadrature_error: 0.0,
            small_t_bound: 0.0,
            t_floor: floor,
            max_integrand: 0.0,
            argmax: 0.5,
        });
    }

    let integrand = |t: f64| {
        let h = series.eval_real(t);
        if h == 0.0 {
            return 0.0;
        }
        (2.0 * (2.0 * h.abs()).ln() - w.ln_eval(t)).exp()
    };

    let samples = {
        let mut g = inverse_spaced_grid(floor.max(1e-3), 0.5, 400);
        g.extend((1..=2000).map(|i| floor + (1.0 - floor) * i as f64 / 2001.0));
        g
    };
    let (mut max_integrand, mut argmax) = (0.0f64, 0.5);
    for &t in &samples {
        let v = integrand(t);
        if !v.is_finite() {
            return Err(Error::Unbounded {
                location: t,
                detail: "non-finite |H|^2/w".into(),
            });
        }
        if v > max_integrand {
            max_integrand = v;
            argmax = t;
        }
    }

    let band = series.effective_bandwidth(1e-16 * series.coeffs()[0].abs()) as f64;
    let breaks = uniform_breakpoints(floor, 1.0, 1.0 / (8.0 * band));
    let main =
        Integrator::new(Tolerance::new(1e-14, 1e-10)).integrate_panels(|t| Complex64::new(integrand(t), 0.0), &breaks);
    if !main.converged {
        return Err(Error::ToleranceNotMet {
            achieved: main.abs_error_estimate,
            requested: 1e-10 * main.value.norm(),
        });
    }

    let small_t_bound = if floor > 0.0 {
        let bound = integrate_finite(
            |t| {
                if t <= 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let b = shifted_line_bound(t, 1e-6).unwrap_or(f64::INFINITY);
                Complex64::new((2.0 * b.ln() - w.ln_eval(t)).exp(), 0.0)
            },
            0.0,
            floor,
            Tolerance::new(1e-300, 1e-6),
        );
        if !bound.value.re.is_finite() {
            return Err(Error::Unbounded {
                location: floor,
                detail: "shifted-line bound diverges below t_floor".into(),
            });
        }
        bound.value.re + bound.abs_error_estimate
    } else {
        0.0
    };

    Ok(Membership {
        value: main.value.re,
        quadrature_error: main.abs_error_estimate,
        small_t_bound,
        t_floor: floor,
        max_integrand,
        argmax,
    })
}

/// Companion weight exponent `c = 2·(fraction·C₂)` for `w = exp(−c/t)`.
pub fn companion_weight(fit: &DecayFit, fraction: f64) -> Result<Weight> {
    crate::weights::make_exp_weight(2.0 * fraction * fit.c2)
}
