//! The slit-plane product
//!
//! ```text
//! φ(z) = z² / (1 + √z)⁸ · Π_{γ ∈ Γ} (1 − √(z/γ)) / (1 + √(z/γ)),   z ∈ ℂ ∖ (−∞, 0],
//! ```
//!
//! which vanishes exactly on `Γ`, has modulus below `|z|²/|1+√z|⁸` and decays
//! like `|z|^{-2}`. Its boundary values on the cut are `φ±(t)`, and the jump
//! `g = (φ₊ − φ₋)·1_{(−∞,0)} = 2i Im φ₊` reproduces `φ` through its Cauchy
//! transform.
//!
//! On the cut `√z = ±i√|t|`, so every factor has modulus one and
//!
//! ```text
//! φ₊(t) = t²/(1+|t|)⁴ · exp(iθ(√|t|)),   θ(s) = −8 atan s − 2 Σ atan(s/√γ).
//! ```
//!
//! Integrals against `g` are taken either in `u` directly or after `u = −ρ²`,
//! where `∫_{−∞}^0 f(u) g(u) du = ∫_0^∞ f(−ρ²) Q(ρ) dρ` with `Q(ρ) = 2ρ g(−ρ²)`.
//! The second form turns the Fourier kernel `e^{2πisu}` into the chirp
//! `e^{−2πisρ²}`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::frequency_sets::{sqrt_sum_diagnostic, FrequencySet, Verdict};
use crate::quadrature::{
    chirp_integral, integrate_finite, integrate_left_halfline, unit_phase, Decay, QuadratureResult, Tolerance,
};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const TWO_PI_I: Complex64 = Complex64 { re: 0.0, im: 2.0 * PI };

/// How the factors beyond the retained ones are accounted for.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Tail {
    /// `Γ` is exactly the retained elements.
    None,
    /// Further elements `γ ≥ next` with `Σ γ^{-1/2} ≤ sqrt_sum`.
    Bounded { next: f64, sqrt_sum: f64 },
}

/// Truncated product `φ` for a removed set `Γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlaschkeAnnihilator {
    gamma: FrequencySet,
    roots: Vec<f64>,
    inv_roots: Vec<f64>,
    tail: Tail,
}

/// `φ(z)` with the multiplicative error bound `exp(tail) − 1` of the truncation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    pub value: Complex64,
    pub rel_error_bound: f64,
}

impl BlaschkeAnnihilator {
    /// Exact product over the elements of `gamma` (which may be empty).
    pub fn finite(gamma: FrequencySet) -> Self {
        let roots: Vec<f64> = gamma.elements().iter().map(|g| g.sqrt()).collect();
        let inv_roots = roots.iter().map(|r| 1.0 / r).collect();
        Self {
            gamma,
            roots,
            inv_roots,
            tail: Tail::None,
        }
    }

    /// The generated elements as a truncation of the infinite family described
    /// by the set's generator, with a certified bound on the dropped factors.
    pub fn truncated(gamma: FrequencySet) -> Result<Self> {
        let report = sqrt_sum_diagnostic(&gamma);
        if report.verdict != Verdict::Converges {
            return Err(Error::Inapplicable(format!(
                "sum of 1/sqrt(gamma) for {}: {}, so the product is not certified to converge",
                gamma.generator(),
                report.verdict
            )));
        }
        let sqrt_sum = report.tail_bound.unwrap_or(f64::INFINITY);
        let tail = if sqrt_sum == 0.0 {
            Tail::None
        } else {
            Tail::Bounded {
                next: gamma.generated_range(),
                sqrt_sum,
            }
        };
        let mut ann = Self::finite(gamma);
        ann.tail = tail;
        Ok(ann)
    }

    pub fn gamma(&self) -> &FrequencySet {
        &self.gamma
    }

    /// Number of retained factors `K`.
    pub fn truncation(&self) -> usize {
        self.inv_roots.len()
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Bound on `|Σ_{dropped γ} log((1 − √(z/γ))/(1 + √(z/γ)))|` for `|z| = modulus`.
    ///
    /// Uses `|log((1−x)/(1+x))| ≤ 2|x|/(1−|x|²)`, so it is finite only below the
    /// first dropped element.
    pub fn tail_bound(&self, modulus: f64) -> f64 {
        match self.tail {
            Tail::None => 0.0,
            Tail::Bounded { next, sqrt_sum } => {
                if modulus >= next {
                    f64::INFINITY
                } else {
                    2.0 * modulus.sqrt() * sqrt_sum / (1.0 - modulus / next)
                }
            }
        }
    }

    /// `log` of the product, summed factor by factor.
    fn log_phi(&self, z: Complex64) -> Complex64 {
        let r = z.sqrt();
        let mut acc = 2.0 * z.ln() - 8.0 * (1.0 + r).ln();
        for &root in &self.roots {
            acc += (root - r).ln() - (root + r).ln();
        }
        acc
    }

    pub fn eval_phi(&self, z: Complex64) -> Result<PhiValue> {
        if z.im == 0.0 && z.re <= 0.0 {
            return Err(Error::Inapplicable(format!(
                "z = {z} lies on the cut; use eval_phi_boundary"
            )));
        }
        let rel_error_bound = self.tail_bound(z.norm()).exp_m1();
        if z.im == 0.0 && self.gamma.contains(z.re) {
            return Ok(PhiValue {
                value: Complex64::new(0.0, 0.0),
                rel_error_bound,
            });
        }
        let log = self.log_phi(z);
        let value = if log.re == f64::NEG_INFINITY || log.re.is_nan() {
            Complex64::new(0.0, 0.0)
        } else {
            let turns = log.im / (2.0 * PI);
            Complex64::from_polar(log.re.exp(), 2.0 * PI * (turns - turns.round()))
        };
        Ok(PhiValue { value, rel_error_bound })
    }

    /// Phase `θ(s)` of `φ₊(−s²)` (unreduced).
    fn theta(&self, s: f64) -> f64 {
        let mut acc = -8.0 * s.atan();
        for &a in &self.inv_roots {
            acc -= 2.0 * (s * a).atan();
        }
        acc
    }

    /// `θ'(s)`.
    fn theta_prime(&self, s: f64) -> f64 {
        let mut acc = -8.0 / (1.0 + s * s);
        for &a in &self.inv_roots {
            acc -= 2.0 * a / (1.0 + (s * a).powi(2));
        }
        acc
    }

    /// `φ₊(t) = lim_{ε↓0} φ(t + iε)` for `t ≤ 0`.
    pub fn eval_phi_boundary(&self, t: f64) -> Result<Complex64> {
        if !(t <= 0.0) {
            return Err(invalid("t", format!("boundary values live on t <= 0, got {t}")));
        }
        let s = (-t).sqrt();
        Ok(Complex64::from_polar(modulus_on_cut(t), self.theta(s)))
    }

    /// `φ₋(t) = conj φ₊(t)`.
    pub fn eval_phi_minus(&self, t: f64) -> Result<Complex64> {
        self.eval_phi_boundary(t).map(|v| v.conj())
    }

    pub fn jump(&self) -> JumpFunction {
        JumpFunction { ann: self.clone() }
    }
}

/// `t²/(1+|t|)⁴`, the exact modulus of `φ±` on the cut.
pub fn modulus_on_cut(t: f64) -> f64 {
    let d = 1.0 + t.abs();
    (t / (d * d)).powi(2)
}

/// Smallest power-family truncation `K` with `tail_bound(modulus) ≤ tol`, if
/// one below `max_count` exists.
pub fn required_count(rho: f64, modulus: f64, tol: f64, max_count: usize) -> Option<usize> {
    let fits = |k: usize| {
        let next = ((k + 1) as f64).powf(rho).floor();
        let s = crate::frequency_sets::power_sqrt_tail(rho, k);
        modulus < next && 2.0 * modulus.sqrt() * s / (1.0 - modulus / next) <= tol
    };
    if !fits(max_count) {
        return None;
    }
    let (mut lo, mut hi) = (1usize, max_count);
    if fits(lo) {
        return Some(lo);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

/// The jump `g(t) = 2i Im φ₊(t)` for `t < 0`, zero elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpFunction {
    ann: BlaschkeAnnihilator,
}

/// Outcome of the three routes to `(e_q ∗ G₊)(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionCheck {
    /// `∫_0^t e^{2πiq(t−s)} G(s) ds`.
    pub direct: QuadratureResult,
    /// `(1/2πi) ∫ (e^{2πiut} − e^{2πiqt}) / (u − q) · g(u) du`.
    pub kernel_form: QuadratureResult,
    /// `(1/2πi) ∫ e^{2πiut} / (u − q) · g(u) du`, valid when `q ∈ Γ`.
    pub reduced_form: Option<QuadratureResult>,
    /// Largest pairwise distance between the available values.
    pub residual: f64,
}

impl JumpFunction {
    pub fn annihilator(&self) -> &BlaschkeAnnihilator {
        &self.ann
    }

    pub fn eval_g(&self, t: f64) -> Complex64 {
        if !(t < 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        self.g_at_root((-t).sqrt())
    }

    /// `g(−s²)`.
    fn g_at_root(&self, s: f64) -> Complex64 {
        let t = s * s;
        Complex64::new(0.0, 2.0 * modulus_on_cut(t) * self.ann.theta(s).sin())
    }

    /// `Q(ρ) = 2ρ g(−ρ²)`.
    fn q(&self, rho: f64) -> Complex64 {
        2.0 * rho * self.g_at_root(rho)
    }

    /// Envelope `2t²/(1+|t|)⁴ ≥ |g(t)|`.
    pub fn envelope(t: f64) -> f64 {
        if t < 0.0 {
            2.0 * modulus_on_cut(t)
        } else {
            0.0
        }
    }

    /// `∫_{−∞}^0 f(u) g(u) du` for `|f| ≤ f_bound` on the half-line.
    fn integrate_against<F: Fn(f64) -> Complex64>(
        &self,
        f: F,
        f_bound: f64,
        tol: Tolerance,
    ) -> Result<QuadratureResult> {
        integrate_left_halfline(
            |u| {
                let g = self.eval_g(u);
                if g.im == 0.0 {
                    g
                } else {
                    f(u) * g
                }
            },
            Decay::new(2.0, 2.0 * f_bound),
            tol,
        )
    }

    /// `‖g‖_{L¹}`.
    pub fn l1_norm(&self, tol: impl Into<Tolerance>) -> Result<QuadratureResult> {
        integrate_left_halfline(
            |u| Complex64::new(self.eval_g(u).norm(), 0.0),
            Decay::new(2.0, 2.0),
            tol,
        )
    }

    /// `∫_{−∞}^0 g(u)/(u − z) du` for `z` off the support of `g`.
    pub fn cauchy_transform(&self, z: Complex64, tol: impl Into<Tolerance>) -> Result<QuadratureResult> {
        let tol = tol.into();
        if z.im == 0.0 && z.re < 0.0 {
            return Err(Error::Inapplicable(format!("z = {z} lies on the support of g")));
        }
        // |u − z| ≥ dist(z, (−∞,0]).
        let dist = if z.re >= 0.0 { z.norm() } else { z.im.abs() };
        if dist == 0.0 {
            // g(u) = O(u²) makes the integrand bounded at z = 0.
            return self.integrate_against(|u| Complex64::new(1.0 / u, 0.0), 1.0, tol);
        }
        self.integrate_against(|u| 1.0 / (u - z), 1.0 / dist, tol)
    }

    /// `|∫ g(u)/(u − q) du|` at a real point `q > 0`.
    pub fn cauchy_residual_at(&self, q: f64, tol: impl Into<Tolerance>) -> Result<QuadratureResult> {
        if !(q > 0.0) {
            return Err(invalid("q", format!("must be positive, got {q}")));
        }
        self.cauchy_transform(Complex64::new(q, 0.0), tol)
    }

    /// `|∫ g(u)/(u − γ) du|` for a retained `γ`; zero in exact arithmetic.
    pub fn gamma_vanishing_residual(&self, gamma_value: f64, tol: impl Into<Tolerance>) -> Result<QuadratureResult> {
        if self.ann.gamma.is_empty() {
            return Err(Error::Inapplicable("Γ is empty".into()));
        }
        if !self.ann.gamma.contains(gamma_value) {
            return Err(invalid(
                "gamma_value",
                format!("{gamma_value} is not a retained element of Γ"),
            ));
        }
        self.cauchy_residual_at(gamma_value, tol)
    }

    /// `|φ(z) − (1/2πi) ∫ g(t)/(t − z) dt| / (|φ(z)| + floor)`.
    pub fn cauchy_identity_residual(&self, z: Complex64, floor: f64, tol: impl Into<Tolerance>) -> Result<f64> {
        let phi = self.ann.eval_phi(z)?.value;
        let transform = self.cauchy_transform(z, tol)?;
        Ok((phi - transform.value / TWO_PI_I).norm() / (phi.norm() + floor))
    }

    /// `G(s) = ∫_{−∞}^0 e^{2πisu} g(u) du`.
    pub fn compute_g_transform(&self, s: f64, tol: impl Into<Tolerance>) -> Result<QuadratureResult> {
        let tol = tol.into();
        if s == 0.0 {
            return self.integrate_against(|_| Complex64::new(1.0, 0.0), 1.0, tol);
        }
        chirp_integral(|rho| self.q(rho), s, 0.0, tol)
    }

    /// Compares three expressions for `(e_q ∗ G₊)(t)`, `t ∈ (0, 2]`.
    pub fn convolution_identity(&self, q: f64, t: f64, tol: impl Into<Tolerance>) -> Result<ConvolutionCheck> {
        let tol = tol.into();
        if !(t > 0.0 && t <= 2.0) {
            return Err(invalid("t", format!("must lie in (0, 2], got {t}")));
        }

        let inner_tol = tol.scaled(1.0 / (4.0 * t.max(1.0)));
        let failure = std::cell::Cell::new(None);
        let direct = integrate_finite(
            |s| match self.compute_g_transform(s, inner_tol) {
                Ok(r) => unit_phase(-q, t - s) * r.value,
                Err(e) => {
                    failure.set(Some(e));
                    Complex64::new(0.0, 0.0)
                }
            },
            0.0,
            t,
            tol,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }

        let kernel_form = self.kernel_form(q, t, tol)?;
        let reduced_form = if self.ann.gamma.contains(q) {
            Some(chirp_integral(|rho| self.q(rho) / (-rho * rho - q), t, 0.0, tol)?.scale(1.0 / TWO_PI_I))
        } else {
            None
        };

        let mut values = vec![direct.value, kernel_form.value];
        values.extend(reduced_form.map(|r| r.value));
        let mut residual: f64 = 0.0;
        for i in 0..values.len() {
            for j in i + 1..values.len() {
                residual = residual.max((values[i] - values[j]).norm());
            }
        }
        Ok(ConvolutionCheck {
            direct,
            kernel_form,
            reduced_form,
            residual,
        })
    }

    /// `(1/2πi) ∫ (e^{2πiut} − e^{2πiqt})/(u − q) g(u) du`.
    ///
    /// Near `u = q` the kernel is evaluated as
    /// `2πit e^{2πiqt} e^{iπδt} sinc(πδt)`, `δ = u − q`. Beyond `ρ_s` (with
    /// `u = −ρ² ≤ −ρ_s² < q`) it is split into a chirp and a plain Cauchy integral.
    fn kernel_form(&self, q: f64, t: f64, tol: Tolerance) -> Result<QuadratureResult> {
        let split = 2.0 + 2.0 * q.abs().sqrt();
        let eq = unit_phase(-q, t);
        let near = integrate_finite(
            |rho| {
                let delta = -rho * rho - q;
                let x = Complex64::new(PI * delta * t, 0.0);
                self.q(rho) * eq * unit_phase(-0.5 * delta, t) * crate::sinc(x)
            },
            0.0,
            split,
            tol.scaled(1.0 / (3.0)),
        )
        .scale(TWO_PI_I * t);
        let far_chirp = chirp_integral(|rho| self.q(rho) / (-rho * rho - q), t, split, tol.scaled(1.0 / (3.0)))?;
        let shift = split * split;
        let far_plain = integrate_left_halfline(
            |v| self.eval_g(v - shift) / (v - shift - q),
            Decay::new(2.0, 2.0 / (shift + q)),
            tol.scaled(1.0 / (3.0)),
        )?;
        Ok(near
            .combine(far_chirp)
            .combine(far_plain.scale(-eq))
            .scale(1.0 / TWO_PI_I))
    }

    /// `(Q(ρ), Q'(ρ))`, exposed for diagnostics of the chirp amplitude.
    pub fn q_and_derivative(&self, rho: f64) -> (Complex64, Complex64) {
        let r2 = rho * rho;
        let d = 1.0 + r2;
        let m = rho.powi(5) / d.powi(4);
        let dm = (5.0 * rho.powi(4) * d - 8.0 * rho.powi(6)) / d.powi(5);
        let th = self.ann.theta(rho);
        let q = 4.0 * I * m * th.sin();
        let dq = 4.0 * I * (dm * th.sin() + m * th.cos() * self.ann.theta_prime(rho));
        (q, dq)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency_sets::gen_power_set;

    fn cubes(k: usize) -> BlaschkeAnnihilator {
        BlaschkeAnnihilator::finite(gen_power_set(3.0, k).unwrap())
    }

    #[test]
    fn vanishes_on_gamma() {
        let ann = cubes(10);
        for &g in ann.gamma().elements() {
            assert_eq!(
                ann.eval_phi(Complex64::new(g, 0.0)).unwrap().value,
                Complex64::new(0.0, 0.0)
            );
        }
    }

    #[test]
    fn conjugate_symmetry() {
        let ann = cubes(50);
        for z in [
            Complex64::new(1.0, 1.0),
            Complex64::new(-3.0, 0.5),
            Complex64::new(40.0, -7.0),
        ] {
            let a = ann.eval_phi(z.conj()).unwrap().value;
            let b = ann.eval_phi(z).unwrap().value.conj();
            assert!((a - b).norm() <= 1e-12 * b.norm());
        }
    }

    #[test]
    fn modulus_bound_at_i() {
        let ann = cubes(50);
        let z = I;
        let phi = ann.eval_phi(z).unwrap().value.norm();
        let bound = 1.0 / (1.0 + z.sqrt()).norm().powi(8);
        assert!(phi <= bound);
        assert!((phi - 4.769e-4).abs() < 1e-6);
    }

    #[test]
    fn known_values() {
        let ann = cubes(50);
        let phi2 = ann.eval_phi(Complex64::new(2.0, 0.0)).unwrap().value;
        assert!((phi2.re + 1.2237e-5).abs() < 1e-8 && phi2.im.abs() < 1e-20);
        let plus = ann.eval_phi_boundary(-1.0).unwrap();
        assert!((plus - Complex64::new(-0.03073, 0.05442)).norm() < 1e-4);
    }

    #[test]
    fn boundary_matches_limit_from_above() {
        let ann = cubes(20);
        for t in [-0.3, -1.0, -7.5, -150.0] {
            let limit = ann.eval_phi(Complex64::new(t, 1e-13 * t.abs())).unwrap().value;
            let boundary = ann.eval_phi_boundary(t).unwrap();
            assert!((limit - boundary).norm() < 1e-9 * boundary.norm(), "t {t}");
            let below = ann.eval_phi(Complex64::new(t, -1e-13 * t.abs())).unwrap().value;
            assert!((below - ann.eval_phi_minus(t).unwrap()).norm() < 1e-9 * boundary.norm());
        }
    }

    #[test]
    fn boundary_examples() {
        let ann = cubes(50);
        assert!((ann.eval_phi_boundary(-1.0).unwrap().norm() - 1.0 / 16.0).abs() < 1e-16);
        assert_eq!(ann.eval_phi_boundary(0.0).unwrap(), Complex64::new(0.0, 0.0));
        let p = ann.eval_phi_boundary(-2.0).unwrap();
        assert_eq!(ann.eval_phi_minus(-2.0).unwrap(), p.conj());
        assert!(ann.eval_phi_boundary(1.0).is_err());
        assert!(ann.eval_phi(Complex64::new(-1.0, 0.0)).is_err());
    }

    #[test]
    fn jump_examples() {
        let j = cubes(50).jump();
        assert_eq!(j.eval_g(1.0), Complex64::new(0.0, 0.0));
        assert!(j.eval_g(-1.0).norm() <= 2.0 / 16.0);
        let g = j.eval_g(-0.5);
        assert_eq!(g.re, 0.0);
        assert!(g.im != 0.0);
    }

    #[test]
    fn jump_envelope_on_log_grid() {
        let j = cubes(50).jump();
        for k in 0..=600 {
            let t = -(10f64.powf(-3.0 + k as f64 / 100.0));
            let ratio = j.eval_g(t).norm() / JumpFunction::envelope(t);
            assert!(ratio <= 1.0 + 1e-14, "t {t}: {ratio}");
        }
    }

    #[test]
    fn boundary_derivative_continuous_at_zero() {
        let ann = cubes(50);
        for h in [1e-3, 1e-4, 1e-5] {
            let left = ann.eval_phi_boundary(-h).unwrap().norm() / h;
            assert!(left < 2.0 * h);
        }
    }

    #[test]
    fn tail_bound_behaviour() {
        let set = gen_power_set(3.0, 50).unwrap();
        let ann = BlaschkeAnnihilator::truncated(set).unwrap();
        let mut prev = 0.0;
        for m in [0.0, 0.5, 1.0, 10.0, 1e3, 1e5] {
            let b = ann.tail_bound(m);
            assert!(b >= prev);
            prev = b;
        }
        assert_eq!(ann.tail_bound(51f64.powi(3)), f64::INFINITY);
        assert!(BlaschkeAnnihilator::truncated(gen_power_set(2.0, 50).unwrap()).is_err());
        assert_eq!(cubes(50).tail_bound(1e4), 0.0);
        let k = required_count(3.0, 1.0, 1e-3, 1 << 30).unwrap();
        assert!(k > 1000);
        assert!(required_count(3.0, 1.0, 1e-8, 1 << 30).is_none());
    }

    #[test]
    fn truncated_product_within_certified_bound() {
        let small = BlaschkeAnnihilator::truncated(gen_power_set(3.0, 20).unwrap()).unwrap();
        let large = cubes(2000);
        for z in [Complex64::new(0.5, 0.5), Complex64::new(3.0, 1.0)] {
            let a = small.eval_phi(z).unwrap();
            let b = large.eval_phi(z).unwrap().value;
            assert!((a.value - b).norm() <= a.rel_error_bound * a.value.norm());
        }
    }

    #[test]
    fn cauchy_representation() {
        for ann in [BlaschkeAnnihilator::finite(FrequencySet::empty()), cubes(50)] {
            let j = ann.jump();
            for z in [I, Complex64::new(1.0, 1.0), Complex64::new(-2.0, 0.3)] {
                let r = j
                    .cauchy_identity_residual(z, 1e-300, Tolerance::new(1e-14, 1e-6))
                    .unwrap();
                assert!(r < 1e-4, "z {z}: {r}");
            }
        }
    }

    #[test]
    fn large_z_decay() {
        let ann = cubes(50);
        let z = Complex64::new(0.0, 1e6);
        assert!(ann.eval_phi(z).unwrap().value.norm() * 1e12 <= 1.0);
    }

    #[test]
    fn transform_symmetries() {
        let j = cubes(50).jump();
        let tol = Tolerance::new(1e-10, 0.0);
        let g0 = j.compute_g_transform(0.0, tol).unwrap();
        assert!(g0.value.re.abs() < 1e-12);
        let l1 = j.l1_norm(1e-9).unwrap().value.re;
        assert!((l1 - 0.42441).abs() < 1e-4);
        let gp = j.compute_g_transform(1.0, tol).unwrap().value;
        let gm = j.compute_g_transform(-1.0, tol).unwrap().value;
        assert!((gp.conj() + gm).norm() < 1e-9);
        for s in [0.0, 1.0, 10.0] {
            assert!(j.compute_g_transform(s, tol).unwrap().value.norm() <= l1);
        }
    }

    #[test]
    fn chirp_route_matches_direct_route() {
        let j = cubes(10).jump();
        let s = 0.4;
        let chirp = j.compute_g_transform(s, Tolerance::absolute(1e-11)).unwrap();
        // Plain oscillatory quadrature in u; the dropped part beyond -10⁴ is
        // of order |g(-10⁴)|/(2πs) < 1e-8.
        let direct = crate::quadrature::oscillatory_integral(|u| j.eval_g(u), -s, -1e4, 0.0, 1e-11);
        assert!((chirp.value - direct.value).norm() < 1e-7, "{chirp:?} {direct:?}");
    }

    #[test]
    fn derivative_of_q_matches_difference_quotient() {
        let j = cubes(50).jump();
        for rho in [0.3, 2.0, 40.0] {
            let (_, dq) = j.q_and_derivative(rho);
            let h = 1e-6 * rho;
            let fd = (j.q(rho + h) - j.q(rho - h)) / (2.0 * h);
            assert!((dq - fd).norm() < 1e-6 * dq.norm().max(1e-10));
        }
    }

    #[test]
    fn cauchy_transform_vanishes_on_gamma_only() {
        let j = cubes(50).jump();
        let tol = Tolerance::new(1e-10, 1e-6);
        for g in [1.0, 8.0, 27.0] {
            assert!(j.gamma_vanishing_residual(g, tol).unwrap().value.norm() < 1e-9);
        }
        assert!(j.cauchy_residual_at(2.0, tol).unwrap().value.norm() > 1e-5);
        assert!(j.gamma_vanishing_residual(2.0, tol).is_err());
        let empty = BlaschkeAnnihilator::finite(FrequencySet::empty()).jump();
        assert!(empty.gamma_vanishing_residual(1.0, tol).is_err());
    }

    #[test]
    fn convolution_routes_agree() {
        let j = cubes(50).jump();
        let c = j.convolution_identity(1.0, 0.25, Tolerance::new(1e-6, 1e-6)).unwrap();
        assert!(c.reduced_form.is_some());
        assert!(c.residual < 1e-6, "{c:?}");
        let c = j.convolution_identity(-1.0, 0.25, Tolerance::new(1e-6, 1e-6)).unwrap();
        assert!(c.reduced_form.is_none() && c.residual < 1e-6);
        assert!(j.convolution_identity(0.0, 3.0, 1e-6).is_err());
    }
}
