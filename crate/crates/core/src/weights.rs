//! Weights on `(0,1)` with a deep right-hand zero at `t = 0`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::{Integrator, Tolerance};

/// A positive weight on `(0,1)`.
///
/// Deserialises from `{"kind":"exp","c":1.0}`, `{"kind":"constant","v":1.0}`
/// or `{"kind":"tabulated","samples":[[t, w], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Weight {
    /// `w(t) = exp(-c/t)`.
    Exp {
        c: f64,
    },
    Constant {
        v: f64,
    },
    /// Linear interpolation through `(t, w)` samples, constant beyond the ends.
    Tabulated {
        samples: Vec<(f64, f64)>,
    },
}

pub fn make_exp_weight(c: f64) -> Result<Weight> {
    let w = Weight::Exp { c };
    w.validate()?;
    Ok(w)
}

pub fn make_constant_weight(v: f64) -> Result<Weight> {
    let w = Weight::Constant { v };
    w.validate()?;
    Ok(w)
}

pub fn make_tabulated_weight(samples: Vec<(f64, f64)>) -> Result<Weight> {
    let w = Weight::Tabulated { samples };
    w.validate()?;
    Ok(w)
}

impl Weight {
    /// Checks the parameters; deserialised weights should be validated before use.
    pub fn validate(&self) -> Result<()> {
        match self {
            Weight::Exp { c } => {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(invalid("c", format!("must be finite and positive, got {c}")));
                }
            }
            Weight::Constant { v } => {
                if !(v.is_finite() && *v > 0.0) {
                    return Err(invalid("v", format!("must be finite and positive, got {v}")));
                }
            }
            Weight::Tabulated { samples } => {
                if samples.len() < 2 {
                    return Err(invalid("samples", "need at least two samples"));
                }
                for (i, &(t, w)) in samples.iter().enumerate() {
                    if !(t > 0.0 && t <= 1.0) {
                        return Err(invalid("samples", format!("abscissa {t} outside (0,1]")));
                    }
                    if !(w.is_finite() && w > 0.0) {
                        return Err(invalid("samples", format!("value {w} is not positive")));
                    }
                    if i > 0 && t <= samples[i - 1].0 {
                        return Err(invalid("samples", "abscissae must increase strictly"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Weight::Exp { c } => {
                if t > 0.0 {
                    (-c / t).exp()
                } else {
                    0.0
                }
            }
            Weight::Constant { v } => *v,
            Weight::Tabulated { samples } => interpolate(samples, t),
        }
    }

    /// `log w(t)`, finite even where `w(t)` underflows.
    pub fn ln_eval(&self, t: f64) -> f64 {
        match self {
            Weight::Exp { c } => {
                if t > 0.0 {
                    -c / t
                } else {
                    f64::NEG_INFINITY
                }
            }
            _ => self.eval(t).ln(),
        }
    }

    /// `∫_ε^1 log w(t) dt` when known in closed form.
    pub fn closed_form_log_integral(&self, eps: f64) -> Option<f64> {
        match self {
            Weight::Exp { c } => Some(-c * (1.0 / eps).ln()),
            Weight::Constant { v } => Some(v.ln() * (1.0 - eps)),
            Weight::Tabulated { .. } => None,
        }
    }

    /// `∫_ε^1 log w(t) dt` by quadrature, with one panel per decade of `t`
    /// and one per tabulation interval.
    pub fn log_integral_quadrature(&self, eps: f64, tol: impl Into<Tolerance>) -> Result<f64> {
        check_eps(eps)?;
        let tol = tol.into();
        let mut breaks = vec![eps];
        let mut x = 1.0;
        while x > eps {
            breaks.push(x);
            x /= 10.0;
        }
        if let Weight::Tabulated { samples } = self {
            breaks.extend(samples.iter().map(|s| s.0).filter(|&t| t > eps && t < 1.0));
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let r = Integrator::new(tol).integrate_panels(|t| Complex64::new(self.ln_eval(t), 0.0), &breaks);
        Ok(r.require_converged(tol.target(r.value.norm()))?.value.re)
    }

    /// Upper bound `sup w` on `(0,1)`.
    pub fn sup(&self) -> f64 {
        match self {
            Weight::Exp { c } => (-c).exp(),
            Weight::Constant { v } => *v,
            Weight::Tabulated { samples } => samples.iter().map(|s| s.1).fold(0.0, f64::max),
        }
    }
}

fn interpolate(samples: &[(f64, f64)], t: f64) -> f64 {
    let i = samples.partition_point(|s| s.0 < t);
    if i == 0 {
        return samples[0].1;
    }
    if i == samples.len() {
        return samples[i - 1].1;
    }
    let (t0, w0) = samples[i - 1];
    let (t1, w1) = samples[i];
    w0 + (w1 - w0) * (t - t0) / (t1 - t0)
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid("eps", format!("must lie in (0,1), got {eps}")));
    }
    Ok(())
}

/// `∫_ε^1 log w(t) dt`, in closed form when available.
pub fn log_integral(w: &Weight, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    match w.closed_form_log_integral(eps) {
        Some(v) => Ok(v),
        None => w.log_integral_quadrature(eps, Tolerance::new(1e-12, 1e-10)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    Pass,
    Fail,
    /// Numerically consistent but not certified.
    TrendOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionAReport {
    pub positive: Clause,
    pub nondecreasing: Clause,
    pub bounded: Clause,
    pub log_integral_diverges: Clause,
    /// `(ε, ∫_ε^1 log w)` for `ε = 10^-2, ..., 10^-8`.
    pub log_integrals: Vec<(f64, f64)>,
    /// First grid pair `(t_i, t_{i+1})` where `w` decreases, if any.
    pub first_decrease: Option<(f64, f64)>,
}

impl ConditionAReport {
    pub fn pass(&self) -> bool {
        [
            self.positive,
            self.nondecreasing,
            self.bounded,
            self.log_integral_diverges,
        ]
        .iter()
        .all(|c| *c == Clause::Pass)
    }
}

/// Positivity, monotonicity, boundedness and divergence of the log integral.
///
/// Monotonicity is checked on a geometric grid in `[10^-8, 1]` refined
/// toward `0`, merged with the tabulation nodes.
pub fn validate_condition_a(w: &Weight, grid_size: usize) -> Result<ConditionAReport> {
    if grid_size < 16 {
        return Err(invalid("grid_size", format!("must be at least 16, got {grid_size}")));
    }
    w.validate()?;
    let mut grid: Vec<f64> = (0..grid_size)
        .map(|j| 10f64.powf(-8.0 * (1.0 - j as f64 / (grid_size - 1) as f64)))
        .collect();
    if let Weight::Tabulated { samples } = w {
        grid.extend(samples.iter().map(|s| s.0));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup();

    let logs: Vec<f64> = grid.iter().map(|&t| w.ln_eval(t)).collect();
    let positive = if logs.iter().all(|l| l.is_finite()) {
        Clause::Pass
    } else {
        Clause::Fail
    };
    let first_decrease = logs
        .windows(2)
        .position(|p| p[1] < p[0])
        .map(|i| (grid[i], grid[i + 1]));
    let nondecreasing = if first_decrease.is_none() {
        Clause::Pass
    } else {
        Clause::Fail
    };
    let bounded = if w.sup().is_finite() {
        Clause::Pass
    } else {
        Clause::Fail
    };

    let log_integrals: Vec<(f64, f64)> = (2..=8)
        .map(|p| {
            let eps = 10f64.powi(-p);
            log_integral(w, eps).map(|v| (eps, v))
        })
        .collect::<Result<_>>()?;
    let log_integral_diverges = match w {
        // −c·ln(1/ε) is itself the linear minorant in ln(1/ε).
        Weight::Exp { .. } => Clause::Pass,
        Weight::Constant { .. } => Clause::Fail,
        Weight::Tabulated { .. } => {
            if log_integrals.windows(2).all(|p| p[1].1 < p[0].1) {
                Clause::TrendOnly
            } else {
                Clause::Fail
            }
        }
    };

    Ok(ConditionAReport {
        positive,
        nondecreasing,
        bounded,
        log_integral_diverges,
        log_integrals,
        first_decrease,
    })
}

/// Both sides of Jensen's inequality on `(ε, 1)` with normalised measure
/// `dt / (1 - ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenPair {
    /// `exp(mean of 2 log|Φ| - log w)`.
    pub lhs: f64,
    /// `mean of |Φ|² / w`.
    pub rhs: f64,
    /// `Φ` vanished at a quadrature node, so the log mean is `-∞`.
    pub phi_vanishes: bool,
}

pub fn jensen_diagnostic(
    phi: impl Fn(f64) -> Complex64,
    w: &Weight,
    eps: f64,
    tol: impl Into<Tolerance>,
) -> Result<JensenPair> {
    check_eps(eps)?;
    let tol = tol.into();
    let length = 1.0 - eps;
    let integrator = Integrator::new(tol);
    let mut breaks = vec![eps, 1.0];
    if let Weight::Tabulated { samples } = w {
        breaks.extend(samples.iter().map(|s| s.0).filter(|&t| t > eps && t < 1.0));
    }
    breaks.sort_by(f64::total_cmp);

    let vanished = std::cell::Cell::new(false);
    let log_mean = integrator.integrate_panels(
        |t| {
            let a = phi(t).norm();
            if a == 0.0 {
                vanished.set(true);
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new(2.0 * a.ln() - w.ln_eval(t), 0.0)
        },
        &breaks,
    );
    let ratio_mean = integrator.integrate_panels(
        |t| {
            let a = phi(t).norm();
            if a == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            Complex64::new((2.0 * a.ln() - w.ln_eval(t)).exp(), 0.0)
        },
        &breaks,
    );
    let rhs = ratio_mean
        .require_converged(tol.target(ratio_mean.value.norm()))?
        .value
        .re
        / length;
    if vanished.get() {
        return Ok(JensenPair {
            lhs: 0.0,
            rhs,
            phi_vanishes: true,
        });
    }
    let log_mean = log_mean.require_converged(tol.target(log_mean.value.norm()))?;
    Ok(JensenPair {
        lhs: (log_mean.value.re / length).exp(),
        rhs,
        phi_vanishes: false,
    })
}
