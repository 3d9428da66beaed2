//! Weighted least-squares projections onto truncated exponential systems.
//!
//! For a frequency list `f_1, …, f_d` and weight `w` on `(0, 1)` the Gram
//! matrix is `G[m][n] = ⟨e_n, e_m⟩_w = ŵ(f_m − f_n)` with
//! `ŵ(k) = ∫₀¹ w(t) e^{−2πikt} dt`, and the right-hand side is
//! `b[m] = ⟨f, e_m⟩_w`. The distance from `f` to the span is
//! `‖f‖²_w − bᴴ(G + δI)⁻¹b` with a small diagonal floor `δ`.
//!
//! Frequency lists are ordered by `|n|` (positive first), so the list for a
//! smaller cutoff is a prefix of the list for a larger one and a single
//! Cholesky factorization yields the whole residual curve.

use std::cell::RefCell;
use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::deep_zero::{membership_check, DeepZeroSeries, MEMBERSHIP_T_FLOOR};
use crate::error::{invalid, Error, Result};
use crate::frequency_sets::{complement_in_range, FrequencySet};
use crate::quadrature::{kronrod15, oscillatory_integral, uniform_breakpoints, Integrator, Tolerance};
use crate::weights::Weight;

/// Default relative diagonal floor: `δ = DEFAULT_FLOOR · ŵ(0)`.
pub const DEFAULT_FLOOR: f64 = 1e-10;

/// `ŵ(k) = ∫₀¹ w(t) e^{−2πikt} dt`.
///
/// Only `k ≥ 0` is integrated; `ŵ(−k)` is the conjugate of `ŵ(k)`.
pub fn weight_fourier_coeff(w: &Weight, k: i64, tol: f64) -> Result<Complex64> {
    if k < 0 {
        return weight_fourier_coeff(w, -k, tol).map(|v| v.conj());
    }
    match w {
        Weight::Constant { v } => Ok(if k == 0 {
            Complex64::new(*v, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }),
        _ => {
            let r = oscillatory_integral(|t| Complex64::new(w.eval(t), 0.0), k as f64, 0.0, 1.0, tol);
            Ok(r.require_converged(tol)?.value)
        }
    }
}

/// Memoised `ŵ(k)`.
struct Spectrum<'a> {
    w: &'a Weight,
    tol: f64,
    cache: RefCell<BTreeMap<u64, Complex64>>,
}

impl<'a> Spectrum<'a> {
    fn new(w: &'a Weight, tol: f64) -> Self {
        Self {
            w,
            tol,
            cache: RefCell::new(BTreeMap::new()),
        }
    }

    fn get(&self, k: i64) -> Result<Complex64> {
        let key = k.unsigned_abs();
        let cached = self.cache.borrow().get(&key).copied();
        let v = match cached {
            Some(v) => v,
            None => {
                let v = weight_fourier_coeff(self.w, key as i64, self.tol)?;
                self.cache.borrow_mut().insert(key, v);
                v
            }
        };
        Ok(if k < 0 { v.conj() } else { v })
    }
}

fn gram_from(freqs: &[i64], spec: &Spectrum) -> Result<DMatrix<Complex64>> {
    let d = freqs.len();
    let mut g = DMatrix::zeros(d, d);
    for m in 0..d {
        for n in m..d {
            let v = spec.get(freqs[m] - freqs[n])?;
            g[(m, n)] = v;
            g[(n, m)] = v.conj();
        }
    }
    Ok(g)
}

/// `G[m][n] = ŵ(freqs[m] − freqs[n])`, Hermitian by construction.
pub fn gram_matrix(freqs: &[i64], w: &Weight, tol: f64) -> Result<DMatrix<Complex64>> {
    check_distinct(freqs)?;
    gram_from(freqs, &Spectrum::new(w, tol))
}

fn check_distinct(freqs: &[i64]) -> Result<()> {
    let mut sorted = freqs.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|p| p[0] == p[1]) {
        return Err(invalid("freqs", "frequencies must be distinct"));
    }
    Ok(())
}

/// One term `a · e^{2πi·freq·t}` of a trigonometric target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub freq: i64,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

impl TrigTerm {
    pub fn amplitude(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

/// Function to be approximated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Target {
    /// `Φ = H/w` for the deep-zero series with indices `k_min..=m`.
    Annihilator { k_min: usize, m: usize },
    /// A trigonometric polynomial.
    Trig { terms: Vec<TrigTerm> },
    /// A real polynomial in `t`, coefficients by increasing degree.
    Polynomial { coeffs: Vec<f64> },
}

impl Target {
    pub fn validate(&self) -> Result<()> {
        match self {
            Target::Annihilator { k_min, m } => {
                if m < k_min {
                    return Err(invalid("m", format!("must be at least k_min = {k_min}")));
                }
            }
            Target::Trig { terms } => {
                if terms.is_empty() {
                    return Err(invalid("terms", "empty"));
                }
                let freqs: Vec<i64> = terms.iter().map(|t| t.freq).collect();
                check_distinct(&freqs)?;
            }
            Target::Polynomial { coeffs } => {
                if coeffs.is_empty() || coeffs.iter().any(|c| !c.is_finite()) {
                    return Err(invalid("coeffs", "need at least one finite coefficient"));
                }
            }
        }
        Ok(())
    }

    /// Scales the target by a real factor.
    pub fn scaled(&self, alpha: f64) -> Target {
        match self {
            Target::Annihilator { .. } => self.clone(),
            Target::Trig { terms } => Target::Trig {
                terms: terms
                    .iter()
                    .map(|t| TrigTerm {
                        freq: t.freq,
                        re: alpha * t.re,
                        im: alpha * t.im,
                    })
                    .collect(),
            },
            Target::Polynomial { coeffs } => Target::Polynomial {
                coeffs: coeffs.iter().map(|c| alpha * c).collect(),
            },
        }
    }
}

fn poly_eval(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// `‖f‖²_w` and `b[m] = ⟨f, e_m⟩_w` for the frequency list.
struct TargetData {
    norm_sq: f64,
    inner: Vec<Complex64>,
}

fn target_data(target: &Target, freqs: &[i64], w: &Weight, spec: &Spectrum, tol: f64) -> Result<TargetData> {
    target.validate()?;
    match target {
        Target::Annihilator { k_min, m } => {
            let series = DeepZeroSeries::new(*k_min, *m)?;
            let norm_sq = membership_check(&series, w, MEMBERSHIP_T_FLOOR)?.value;
            // ⟨Φ, e_m⟩_w = ∫ H e^{−2πimt}: the weight cancels.
            let inner = annihilator_inner(&series, freqs, tol)?;
            Ok(TargetData { norm_sq, inner })
        }
        Target::Trig { terms } => {
            let mut norm = Complex64::new(0.0, 0.0);
            for a in terms {
                for b in terms {
                    norm += a.amplitude() * b.amplitude().conj() * spec.get(b.freq - a.freq)?;
                }
            }
            let inner = freqs
                .iter()
                .map(|&m| {
                    terms
                        .iter()
                        .map(|a| Ok(a.amplitude() * spec.get(m - a.freq)?))
                        .sum::<Result<Complex64>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TargetData {
                norm_sq: norm.re,
                inner,
            })
        }
        Target::Polynomial { coeffs } => {
            let norm = Integrator::new(Tolerance::new(tol, tol)).integrate(
                |t| Complex64::new(poly_eval(coeffs, t).powi(2) * w.eval(t), 0.0),
                0.0,
                1.0,
            );
            let norm_sq = norm.require_converged(tol)?.value.re;
            let inner = freqs
                .iter()
                .map(|&m| {
                    let r = oscillatory_integral(
                        |t| Complex64::new(poly_eval(coeffs, t) * w.eval(t), 0.0),
                        m as f64,
                        0.0,
                        1.0,
                        tol,
                    );
                    Ok(r.require_converged(tol)?.value)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TargetData { norm_sq, inner })
        }
    }
}

/// `∫₀¹ H(t) e^{−2πimt} dt` for every `m`, from one table of `H` on a fixed
/// panel grid fine enough for the largest `|m|`. The Kronrod–Gauss difference
/// summed over panels is the error estimate.
fn annihilator_inner(series: &DeepZeroSeries, freqs: &[i64], tol: f64) -> Result<Vec<Complex64>> {
    let band = series.effective_bandwidth(1e-17 * series.coeffs().first().map_or(1.0, |c| c.abs()));
    let top = freqs.iter().map(|m| m.unsigned_abs()).max().unwrap_or(0);
    let width = 1.0 / (4.0 * (band + top) as f64);
    let breaks = uniform_breakpoints(0.0, 1.0, width);
    let mut nodes = Vec::with_capacity(15 * breaks.len());
    for p in breaks.windows(2) {
        for (t, wk, wg) in kronrod15(p[0], p[1]) {
            nodes.push((t, wk, wg, series.eval(t)));
        }
    }
    freqs
        .iter()
        .map(|&m| {
            let mut value = Complex64::new(0.0, 0.0);
            let mut err = 0.0;
            for panel in nodes.chunks(15) {
                let (mut k, mut g) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for &(t, wk, wg, h) in panel {
                    let v = h * crate::quadrature::unit_phase(m as f64, t);
                    k += v * wk;
                    g += v * wg;
                }
                value += k;
                err += (k - g).norm();
            }
            if err > tol {
                return Err(Error::ToleranceNotMet {
                    achieved: err,
                    requested: tol,
                });
            }
            Ok(value)
        })
        .collect()
}

/// Result of one projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    /// Distance to the span with the diagonal floor applied.
    pub residual: f64,
    /// Same without the floor, when `G` itself factors.
    pub residual_unfloored: Option<f64>,
    pub target_norm: f64,
    /// Expansion coefficients `(G + δI)⁻¹ b`.
    pub coefficients: Vec<Complex64>,
    /// Residual of every leading sub-list, in order.
    pub prefix_residuals: Vec<f64>,
    pub condition_estimate: f64,
}

struct Factored {
    l: DMatrix<Complex64>,
    y: DVector<Complex64>,
    condition: f64,
}

fn factor_and_reduce(g: &DMatrix<Complex64>, b: &[Complex64], shift: f64) -> Result<Factored> {
    let d = g.nrows();
    let mut a = g.clone();
    for i in 0..d {
        a[(i, i)] += shift;
    }
    let Some(chol) = nalgebra::Cholesky::new(a.clone()) else {
        return Err(Error::Factorization {
            pivot: failing_pivot(&a),
            condition: f64::INFINITY,
        });
    };
    let l = chol.unpack();
    let diag: Vec<f64> = (0..d).map(|i| l[(i, i)].re).collect();
    let hi = diag.iter().copied().fold(0.0, f64::max);
    let lo = diag.iter().copied().fold(f64::INFINITY, f64::min);
    let condition = if d == 0 { 1.0 } else { (hi / lo).powi(2) };
    let y = l
        .solve_lower_triangular(&DVector::from_column_slice(b))
        .ok_or(Error::Factorization { pivot: 0, condition })?;
    Ok(Factored { l, y, condition })
}

/// Smallest leading block that does not factor.
fn failing_pivot(a: &DMatrix<Complex64>) -> usize {
    let (mut ok, mut bad) = (0, a.nrows());
    while bad - ok > 1 {
        let mid = (ok + bad) / 2;
        if nalgebra::Cholesky::new(a.view((0, 0), (mid, mid)).into_owned()).is_some() {
            ok = mid;
        } else {
            bad = mid;
        }
    }
    bad - 1
}

fn prefix_residuals(norm_sq: f64, y: &DVector<Complex64>) -> Vec<f64> {
    let norm = norm_sq.max(0.0).sqrt();
    let mut acc = 0.0;
    y.iter()
        .map(|v| {
            acc += v.norm_sqr();
            (norm_sq - acc).max(0.0).sqrt().min(norm)
        })
        .collect()
}

/// Distance from a target with data `(norm_sq, b)` to the span whose Gram
/// matrix is `g`, with diagonal floor `floor · G[0][0]`.
pub fn solve_projection(g: &DMatrix<Complex64>, b: &[Complex64], norm_sq: f64, floor: f64) -> Result<Projection> {
    if !(floor >= 0.0 && floor.is_finite()) {
        return Err(invalid(
            "floor",
            format!("must be finite and non-negative, got {floor}"),
        ));
    }
    if g.nrows() != b.len() || !g.is_square() {
        return Err(invalid("b", "dimension mismatch with the Gram matrix"));
    }
    let target_norm = norm_sq.max(0.0).sqrt();
    if b.is_empty() {
        return Ok(Projection {
            residual: target_norm,
            residual_unfloored: Some(target_norm),
            target_norm,
            coefficients: Vec::new(),
            prefix_residuals: Vec::new(),
            condition_estimate: 1.0,
        });
    }
    let shift = floor * g[(0, 0)].re;
    let f = factor_and_reduce(g, b, shift)?;
    let prefix = prefix_residuals(norm_sq, &f.y);
    let coefficients =
        f.l.adjoint()
            .solve_upper_triangular(&f.y)
            .ok_or(Error::Factorization {
                pivot: 0,
                condition: f.condition,
            })?
            .iter()
            .copied()
            .collect();
    let residual_unfloored = if shift > 0.0 {
        factor_and_reduce(g, b, 0.0)
            .ok()
            .and_then(|u| prefix_residuals(norm_sq, &u.y).last().copied())
    } else {
        prefix.last().copied()
    };
    Ok(Projection {
        residual: *prefix.last().unwrap(),
        residual_unfloored,
        target_norm,
        coefficients,
        prefix_residuals: prefix,
        condition_estimate: f.condition,
    })
}

/// Distance in `L²(T, w)` from `target` to the span of `e^{2πint}`, `n ∈ freqs`.
pub fn weighted_residual(target: &Target, freqs: &[i64], w: &Weight, floor: f64, tol: f64) -> Result<Projection> {
    w.validate()?;
    check_distinct(freqs)?;
    let spec = Spectrum::new(w, tol);
    let g = gram_from(freqs, &spec)?;
    let data = target_data(target, freqs, w, &spec, tol)?;
    solve_projection(&g, &data.inner, data.norm_sq, floor)
}

/// `(ℕ ∖ Γ) ∩ [1, N]`, plus `−1, …, −N` when `negative` is set, ordered by
/// `|n|` with the positive frequency first.
pub fn probe_frequencies(gamma: &FrequencySet, n: u64, negative: bool) -> Vec<i64> {
    let mut out: Vec<i64> = complement_in_range(gamma, n).into_iter().map(|k| k as i64).collect();
    if negative {
        out.extend((1..=n as i64).map(|k| -k));
        out.sort_by_key(|&k| (k.unsigned_abs(), k < 0));
    }
    out
}

fn default_floor() -> f64 {
    DEFAULT_FLOOR
}

fn default_tol() -> f64 {
    1e-12
}

/// One probe experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeConfig {
    pub weight: Weight,
    pub gamma: FrequencySet,
    pub n_list: Vec<u64>,
    pub target: Target,
    /// Relative diagonal floor; the shift is `floor · ŵ(0)`.
    #[serde(default = "default_floor")]
    pub floor: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Also include the frequencies `−1, …, −N`.
    #[serde(default)]
    pub negative_frequencies: bool,
}

impl ProbeConfig {
    pub fn validate(&self) -> Result<()> {
        self.weight.validate()?;
        self.target.validate()?;
        if self.n_list.is_empty() || self.n_list[0] < 1 {
            return Err(invalid("n_list", "need at least one cutoff, each at least 1"));
        }
        if self.n_list.windows(2).any(|p| p[1] <= p[0]) {
            return Err(invalid("n_list", "cutoffs must increase strictly"));
        }
        if !(self.floor >= 0.0 && self.floor.is_finite()) {
            return Err(invalid(
                "floor",
                format!("must be finite and non-negative, got {}", self.floor),
            ));
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return Err(invalid("tol", format!("must lie in (0,1), got {}", self.tol)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualRecord {
    pub n: u64,
    pub dimension: usize,
    pub residual: f64,
    pub residual_unfloored: Option<f64>,
    pub target_norm: f64,
    pub ratio: f64,
    /// `(max/min Cholesky pivot)²`, a lower bound on the condition number
    /// of the floored Gram matrix.
    pub condition_estimate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualCurve {
    pub records: Vec<ResidualRecord>,
}

impl ResidualCurve {
    pub fn min_ratio(&self) -> f64 {
        self.records.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min)
    }

    pub fn max_ratio(&self) -> f64 {
        self.records.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest increase between consecutive residuals (0 for a nonincreasing curve).
    pub fn max_increase(&self) -> f64 {
        self.records
            .windows(2)
            .map(|p| (p[1].residual - p[0].residual).max(0.0))
            .fold(0.0, f64::max)
    }
}

/// Residuals for each cutoff of the configuration, from one factorization.
pub fn residual_curve(config: &ProbeConfig) -> Result<ResidualCurve> {
    config.validate()?;
    let n_max = *config.n_list.last().unwrap();
    let freqs = probe_frequencies(&config.gamma, n_max, config.negative_frequencies);
    let spec = Spectrum::new(&config.weight, config.tol);
    let g = gram_from(&freqs, &spec)?;
    let data = target_data(&config.target, &freqs, &config.weight, &spec, config.tol)?;
    let target_norm = data.norm_sq.max(0.0).sqrt();

    let shift = if freqs.is_empty() {
        0.0
    } else {
        config.floor * g[(0, 0)].re
    };
    let floored = if freqs.is_empty() {
        None
    } else {
        Some(factor_and_reduce(&g, &data.inner, shift)?)
    };
    let unfloored = if shift > 0.0 {
        factor_and_reduce(&g, &data.inner, 0.0).ok()
    } else {
        None
    };
    let prefix = floored
        .as_ref()
        .map(|f| prefix_residuals(data.norm_sq, &f.y))
        .unwrap_or_default();
    let prefix_plain = unfloored.as_ref().map(|f| prefix_residuals(data.norm_sq, &f.y));

    let records = config
        .n_list
        .iter()
        .map(|&n| {
            let d = freqs.iter().filter(|k| k.unsigned_abs() <= n).count();
            let residual = if d == 0 { target_norm } else { prefix[d - 1] };
            let residual_unfloored = match (&prefix_plain, shift > 0.0) {
                (Some(p), _) => Some(if d == 0 { target_norm } else { p[d - 1] }),
                (None, false) => Some(residual),
                (None, true) => None,
            };
            let condition_estimate = if d == 0 {
                1.0
            } else {
                let l = &floored.as_ref().unwrap().l;
                let diag = (0..d).map(|i| l[(i, i)].re);
                let hi = diag.clone().fold(0.0, f64::max);
                let lo = diag.fold(f64::INFINITY, f64::min);
                (hi / lo).powi(2)
            };
            ResidualRecord {
                n,
                dimension: d,
                residual,
                residual_unfloored,
                target_norm,
                ratio: if target_norm > 0.0 { residual / target_norm } else { 0.0 },
                condition_estimate,
            }
        })
        .collect();
    Ok(ResidualCurve { records })
}

/// Effect of putting one frequency of the annihilator's spectrum back into
/// the span at the largest cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AddBack {
    pub q: i64,
    pub ratio_before: f64,
    pub ratio_after: f64,
    pub drop: f64,
    /// Lower bound for `drop`: the squared residual falls by at least
    /// `|Ĥ(q)|² / (ŵ(0) + δ)`, the mass of `Φ` along `e_q` alone.
    pub predicted_drop: f64,
}

impl AddBack {
    pub fn pass(&self) -> bool {
        self.drop >= self.predicted_drop
    }
}

/// Compares the residual ratio at the largest cutoff with and without `q`.
pub fn add_back_check(config: &ProbeConfig, q: i64) -> Result<AddBack> {
    config.validate()?;
    let Target::Annihilator { k_min, m } = config.target else {
        return Err(Error::Inapplicable(
            "the add-back check needs the annihilator target".into(),
        ));
    };
    let n_max = *config.n_list.last().unwrap();
    let freqs = probe_frequencies(&config.gamma, n_max, config.negative_frequencies);
    if freqs.contains(&q) {
        return Err(invalid("q", format!("{q} is already in the span")));
    }
    let mut plus = freqs.clone();
    plus.push(q);
    let before = weighted_residual(&config.target, &freqs, &config.weight, config.floor, config.tol)?;
    let after = weighted_residual(&config.target, &plus, &config.weight, config.floor, config.tol)?;
    let norm = after.target_norm;
    let ratio_before = before.residual / norm;
    let ratio_after = after.residual / norm;

    let hq = DeepZeroSeries::new(k_min, m)?.fourier_coefficient(q);
    let w0 = weight_fourier_coeff(&config.weight, 0, config.tol)?.re;
    let mass = hq.norm_sqr() / ((w0 + config.floor * w0) * norm * norm);
    let predicted_drop = ratio_before - (ratio_before * ratio_before - mass).max(0.0).sqrt();
    Ok(AddBack {
        q,
        ratio_before,
        ratio_after,
        drop: ratio_before - ratio_after,
        predicted_drop,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnihilatorEntry {
    pub n: i64,
    pub computed: Complex64,
    pub expected: Complex64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnihilatorReport {
    pub entries: Vec<AnnihilatorEntry>,
    pub tol: f64,
}

impl AnnihilatorReport {
    pub fn max_error(&self) -> f64 {
        self.entries.iter().map(|e| e.error).fold(0.0, f64::max)
    }

    pub fn pass(&self) -> bool {
        self.max_error() <= self.tol
    }
}

/// `⟨Φ, e_n⟩_w = ∫₀¹ H(t) e^{−2πint} dt` by quadrature for `n` in the range,
/// against the exact values `±c_k` at `n = ±(2k+1)²` and zero elsewhere.
pub fn annihilator_test(
    series: &DeepZeroSeries,
    w: &Weight,
    n_range: std::ops::RangeInclusive<i64>,
    tol: f64,
) -> Result<AnnihilatorReport> {
    membership_check(series, w, MEMBERSHIP_T_FLOOR)?;
    let freqs: Vec<i64> = n_range.collect();
    let computed_all = annihilator_inner(series, &freqs, 1e-12)?;
    let mut entries = Vec::new();
    for (&n, &computed) in freqs.iter().zip(&computed_all) {
        let expected = series.fourier_coefficient(n);
        let error = (computed - expected).norm();
        entries.push(AnnihilatorEntry {
            n,
            computed,
            expected,
            error,
        });
    }
    let report = AnnihilatorReport { entries, tol };
    if let Some(bad) = report.entries.iter().find(|e| e.error > tol) {
        return Err(Error::Inapplicable(format!(
            "annihilator coefficient at n = {} off by {:e} (tol {tol:e})",
            bad.n, bad.error
        )));
    }
    Ok(report)
}

/// Options for [`convolution_stability_check`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityOptions {
    /// The weighted integrals are evaluated on `[t_floor, 1]`.
    pub t_floor: f64,
    /// Caller's bound on `∫_0^{t_floor} |F|²/w`.
    pub f_small_t_bound: f64,
    /// Highest frequency present in `F`; sets the panel width.
    pub bandwidth: f64,
    pub rel_tol: f64,
}

impl Default for StabilityOptions {
    fn default() -> Self {
        Self {
            t_floor: 0.0,
            f_small_t_bound: 0.0,
            bandwidth: 1.0,
            rel_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvolutionStability {
    /// `∫_{t_floor}^1 |F∗ψ|²/w`.
    pub value: f64,
    /// Bound on the same integral over `(0, t_floor)`.
    pub small_t_bound: f64,
    pub error_estimate: f64,
    /// `‖ψ‖²·∫₀¹|F|²/w`.
    pub ceiling: f64,
    pub psi_norm_sq: f64,
    pub f_weighted_norm_sq: f64,
}

impl ConvolutionStability {
    pub fn within_ceiling(&self) -> bool {
        self.value + self.small_t_bound <= self.ceiling + self.error_estimate
    }
}

/// `∫₀¹ p(t)² dt` for a real polynomial.
fn poly_norm_sq(p: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, a) in p.iter().enumerate() {
        for (j, b) in p.iter().enumerate() {
            s += a * b / (i + j + 1) as f64;
        }
    }
    s
}

/// `∫ |F∗ψ|²/w` and `∫ |F|²/w` on `[t_floor, 1]` with panels of width `h`.
///
/// `(F∗ψ)(t) = ∫₀ᵗ F(s)ψ(t−s) ds = Σ_j p_j Σ_i C(j,i) t^{j−i} (−1)^i M_i(t)`
/// with cumulative moments `M_i(t) = ∫₀ᵗ F(s) sⁱ ds`.
fn convolution_integrals<F: Fn(f64) -> Complex64>(f: &F, psi: &[f64], w: &Weight, t_floor: f64, h: f64) -> (f64, f64) {
    let deg = psi.len();
    let mut breaks = if t_floor > 0.0 {
        uniform_breakpoints(0.0, t_floor, h)
    } else {
        vec![0.0]
    };
    breaks.pop();
    breaks.extend(uniform_breakpoints(t_floor, 1.0, h));
    let binom = |n: usize, k: usize| -> f64 { (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64) };

    let moments_on = |a: f64, b: f64| -> Vec<Complex64> {
        let mut m = vec![Complex64::new(0.0, 0.0); deg];
        for (s, wt, _) in kronrod15(a, b) {
            let v = f(s) * wt;
            let mut p = 1.0;
            for mi in m.iter_mut() {
                *mi += v * p;
                p *= s;
            }
        }
        m
    };

    let mut cumulative = vec![Complex64::new(0.0, 0.0); deg];
    let (mut conv_int, mut f_int) = (0.0, 0.0);
    for pair in breaks.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        if a >= t_floor {
            for (t, wt, _) in kronrod15(a, b) {
                let partial = moments_on(a, t);
                let mut conv = Complex64::new(0.0, 0.0);
                for (j, pj) in psi.iter().enumerate() {
                    for i in 0..=j {
                        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                        conv += pj * binom(j, i) * t.powi((j - i) as i32) * sign * (cumulative[i] + partial[i]);
                    }
                }
                let inv_w = (-w.ln_eval(t)).exp();
                conv_int += wt * conv.norm_sqr() * inv_w;
                f_int += wt * f(t).norm_sqr() * inv_w;
            }
        }
        for (c, m) in cumulative.iter_mut().zip(moments_on(a, b)) {
            *c += m;
        }
    }
    (conv_int, f_int)
}

/// Convolution-stability diagnostic: for `F` supported in `[0, ∞)` and a
/// polynomial `ψ` on `(0, 1)`,
/// `∫₀¹ |F∗ψ|²/w ≤ ‖ψ‖² ∫₀¹ |F|²/w` whenever `w` is nondecreasing.
pub fn convolution_stability_check<F: Fn(f64) -> Complex64>(
    f: F,
    psi: &[f64],
    w: &Weight,
    opts: StabilityOptions,
) -> Result<ConvolutionStability> {
    w.validate()?;
    if psi.is_empty() {
        return Err(invalid("psi", "empty polynomial"));
    }
    if !(opts.t_floor >= 0.0 && opts.t_floor < 1.0) {
        return Err(invalid("t_floor", format!("must lie in [0,1), got {}", opts.t_floor)));
    }
    if !(opts.bandwidth > 0.0) {
        return Err(invalid("bandwidth", "must be positive"));
    }
    let psi_norm_sq = poly_norm_sq(psi);
    let mut h = 1.0 / (8.0 * opts.bandwidth.max(1.0));
    let mut prev = convolution_integrals(&f, psi, w, opts.t_floor, h);
    let mut refinements = 0;
    loop {
        h /= 2.0;
        let next = convolution_integrals(&f, psi, w, opts.t_floor, h);
        let err = (next.0 - prev.0).abs().max((next.1 - prev.1).abs());
        let scale = next.0.abs().max(next.1.abs());
        prev = next;
        refinements += 1;
        if err <= opts.rel_tol * scale || scale == 0.0 {
            let (value, f_norm) = prev;
            let f_weighted_norm_sq = f_norm + opts.f_small_t_bound;
            let out = ConvolutionStability {
                value,
                small_t_bound: psi_norm_sq * opts.t_floor * opts.f_small_t_bound,
                error_estimate: err * (1.0 + psi_norm_sq),
                ceiling: psi_norm_sq * f_weighted_norm_sq,
                psi_norm_sq,
                f_weighted_norm_sq,
            };
            if !out.within_ceiling() {
                return Err(Error::ToleranceNotMet {
                    achieved: out.value + out.small_t_bound,
                    requested: out.ceiling,
                });
            }
            return Ok(out);
        }
        if refinements >= 4 {
            return Err(Error::ToleranceNotMet {
                achieved: err,
                requested: opts.rel_tol * scale,
            });
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frequency_sets::gen_power_set;
    use crate::weights::{make_constant_weight, make_exp_weight};

    fn one() -> Weight {
        make_constant_weight(1.0).unwrap()
    }

    fn trig(terms: &[(i64, f64)]) -> Target {
        Target::Trig {
            terms: terms.iter().map(|&(freq, re)| TrigTerm { freq, re, im: 0.0 }).collect(),
        }
    }

    #[test]
    fn weight_coefficients() {
        let w = one();
        assert_eq!(weight_fourier_coeff(&w, 0, 1e-12).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(weight_fourier_coeff(&w, 3, 1e-12).unwrap(), Complex64::new(0.0, 0.0));
        let e = make_exp_weight(1.0).unwrap();
        let w0 = weight_fourier_coeff(&e, 0, 1e-14).unwrap();
        assert!((w0.re - 0.148_495_506_775_922_05).abs() < 1e-13);
        let p = weight_fourier_coeff(&e, 5, 1e-14).unwrap();
        assert_eq!(weight_fourier_coeff(&e, -5, 1e-14).unwrap(), p.conj());
    }

    #[test]
    fn gram_examples() {
        let g = gram_matrix(&[1, 2, 5], &one(), 1e-12).unwrap();
        assert_eq!(g, DMatrix::identity(3, 3));
        let e = make_exp_weight(1.0).unwrap();
        let g = gram_matrix(&[1, 2], &e, 1e-14).unwrap();
        assert_eq!(g[(0, 0)], g[(1, 1)]);
        // G[0][1] = ŵ(1 − 2) = conj ŵ(1), and G[1][0] = ŵ(1).
        assert_eq!(g[(1, 0)], weight_fourier_coeff(&e, 1, 1e-14).unwrap());
        assert!(gram_matrix(&[1, 1], &e, 1e-12).is_err());
    }

    #[test]
    fn trivial_projections() {
        let r = weighted_residual(&trig(&[(1, 1.0)]), &[1], &one(), 0.0, 1e-12).unwrap();
        assert!(r.residual < 1e-12);
        assert!((r.coefficients[0] - 1.0).norm() < 1e-12);
        let r = weighted_residual(&trig(&[(2, 1.0)]), &[1], &one(), 0.0, 1e-12).unwrap();
        assert!((r.residual - 1.0).abs() < 1e-12);
    }

    #[test]
    fn contained_frequency_curve() {
        let cfg = ProbeConfig {
            weight: one(),
            gamma: FrequencySet::empty(),
            n_list: vec![3, 5],
            target: trig(&[(3, 1.0)]),
            floor: DEFAULT_FLOOR,
            tol: 1e-12,
            negative_frequencies: false,
        };
        let curve = residual_curve(&cfg).unwrap();
        for r in &curve.records {
            // The floor δ = 1e-10 leaves √δ/(1+δ)^½ of the target behind.
            assert!((r.residual - 1e-5).abs() < 1e-9, "{r:?}");
            assert!(r.residual_unfloored.unwrap() < 1e-12);
        }
    }

    #[test]
    fn fourier_truncation_with_unit_weight() {
        let target = trig(&[(1, 0.5), (4, -1.0), (7, 0.25), (-2, 0.75)]);
        let freqs = [1, 2, 3, 7];
        let r = weighted_residual(&target, &freqs, &one(), 0.0, 1e-12).unwrap();
        let tail: f64 = 1.0f64 + 0.75 * 0.75;
        assert!((r.residual - tail.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn negative_frequencies_are_nested() {
        let g = gen_power_set(2.0, 10).unwrap();
        let a = probe_frequencies(&g, 5, true);
        let b = probe_frequencies(&g, 10, true);
        assert_eq!(&b[..a.len()], &a[..]);
        assert_eq!(a, vec![-1, 2, -2, 3, -3, -4, 5, -5]);
    }

    #[test]
    fn annihilator_coefficients() {
        let s = DeepZeroSeries::new(0, 20).unwrap();
        let rep = annihilator_test(&s, &one(), -12..=12, 1e-8).unwrap();
        assert!(rep.pass());
        let at = |n: i64| rep.entries.iter().find(|e| e.n == n).unwrap();
        assert!(at(2).computed.norm() < 1e-8);
        assert!(at(4).computed.norm() < 1e-8);
        assert!((at(9).computed.re - s.coeffs()[1]).abs() < 1e-8);
    }

    #[test]
    fn convolution_polynomial_oracle() {
        let r = convolution_stability_check(|t| Complex64::new(t, 0.0), &[1.0], &one(), StabilityOptions::default())
            .unwrap();
        assert!((r.value - 0.05).abs() < 1e-12, "{r:?}");
        assert!((r.ceiling - 1.0 / 3.0).abs() < 1e-12);
        let z = convolution_stability_check(
            |_| Complex64::new(0.0, 0.0),
            &[1.0],
            &one(),
            StabilityOptions::default(),
        )
        .unwrap();
        assert_eq!(z.value, 0.0);
    }
}
