//! JSON experiment configurations, discriminated by a top-level `kind`.

use serde::{Deserialize, Serialize};
use szego_core::frequency_sets::{gen_interval_blocks, gen_power_set, gen_prime_power_set};
use szego_core::probe::Target;
use szego_core::weights::{make_constant_weight, make_exp_weight, make_tabulated_weight};
use szego_core::{FrequencySet, Weight};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Config {
    Sets(SetsConfig),
    Weights(WeightsConfig),
    Blaschke(BlaschkeConfig),
    Deepzero(DeepZeroConfig),
    Probe(ProbeRunConfig),
}

impl Config {
    pub fn kind(&self) -> &'static str {
        match self {
            Config::Sets(_) => "sets",
            Config::Weights(_) => "weights",
            Config::Blaschke(_) => "blaschke",
            Config::Deepzero(_) => "deepzero",
            Config::Probe(_) => "probe",
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: Config = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every parameter without running the experiment.
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            Config::Sets(c) => {
                if c.sets.is_empty() {
                    return Err(CliError::Config("`sets` must not be empty".into()));
                }
                for s in &c.sets {
                    s.build()?;
                }
                if let Some(b) = &c.condition_b {
                    if !(b.c > 0.0) {
                        return Err(CliError::Config(format!(
                            "invalid parameter `c`: must be positive, got {}",
                            b.c
                        )));
                    }
                    if let Some(x) = b.grid.iter().find(|&&x| !(x > std::f64::consts::E)) {
                        return Err(CliError::Config(format!(
                            "invalid parameter `grid`: point {x} is not above e"
                        )));
                    }
                }
            }
            Config::Weights(c) => {
                if c.weights.is_empty() {
                    return Err(CliError::Config("`weights` must not be empty".into()));
                }
                for w in &c.weights {
                    w.validate()?;
                }
                if c.grid_size < 16 {
                    return Err(CliError::Config(
                        "invalid parameter `grid_size`: must be at least 16".into(),
                    ));
                }
            }
            Config::Blaschke(c) => {
                c.gamma.build()?;
                check_tol("tol", c.tol)?;
                if c.boundary_t.iter().any(|&t| !(t < 0.0)) {
                    return Err(CliError::Config(
                        "invalid parameter `boundary_t`: points must be negative".into(),
                    ));
                }
                if c.cauchy_points.iter().any(|p| p[1] == 0.0 && p[0] <= 0.0) {
                    return Err(CliError::Config(
                        "invalid parameter `cauchy_points`: point on the cut".into(),
                    ));
                }
                if let Some(conv) = &c.convolution {
                    if conv.t.iter().any(|&t| !(t > 0.0 && t <= 2.0)) {
                        return Err(CliError::Config("invalid parameter `t`: must lie in (0, 2]".into()));
                    }
                }
            }
            Config::Deepzero(c) => c.validate()?,
            Config::Probe(c) => {
                let gamma = c.gamma.build()?;
                c.weight.validate()?;
                c.target.validate()?;
                check_tol("tol", c.tol)?;
                let n_max = c.n_list.last().copied().unwrap_or(0);
                if c.n_list.is_empty() || c.n_list[0] < 1 || c.n_list.windows(2).any(|p| p[1] <= p[0]) {
                    return Err(CliError::Config(
                        "invalid parameter `n_list`: cutoffs must be positive and strictly increasing".into(),
                    ));
                }
                let range = gamma.generated_range();
                if range.is_finite()
                    && range <= n_max as f64
                    && !matches!(c.gamma, SetSpec::Explicit { .. } | SetSpec::Empty)
                {
                    return Err(CliError::Config(format!(
                        "invalid parameter `gamma`: generated range {range} does not cover N = {n_max}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn check_tol(name: &str, tol: Option<f64>) -> Result<(), CliError> {
    match tol {
        Some(t) if !(t > 0.0 && t < 1.0) => Err(CliError::Config(format!(
            "invalid parameter `{name}`: must lie in (0,1), got {t}"
        ))),
        _ => Ok(()),
    }
}

/// A removed frequency set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Power { rho: f64, count: usize },
    PrimeThinned { rho: f64, count: usize },
    Blocks { starts: Vec<u64>, lengths: Vec<u64> },
    Explicit { elements: Vec<f64> },
    Empty,
}

impl SetSpec {
    pub fn build(&self) -> Result<FrequencySet, CliError> {
        Ok(match self {
            SetSpec::Power { rho, count } => gen_power_set(*rho, *count)?,
            SetSpec::PrimeThinned { rho, count } => gen_prime_power_set(*rho, *count)?,
            SetSpec::Blocks { starts, lengths } => gen_interval_blocks(starts, lengths)?,
            SetSpec::Explicit { elements } => FrequencySet::explicit(elements.clone())?,
            SetSpec::Empty => FrequencySet::empty(),
        })
    }

    pub fn rho(&self) -> Option<f64> {
        match self {
            SetSpec::Power { rho, .. } | SetSpec::PrimeThinned { rho, .. } => Some(*rho),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetsConfig {
    pub sets: Vec<SetSpec>,
    #[serde(default)]
    pub condition_b: Option<ConditionBSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionBSpec {
    pub c: f64,
    pub grid: Vec<f64>,
    /// Thin power sets with `ρ ≤ 2` before checking.
    #[serde(default = "yes")]
    pub thin: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsConfig {
    pub weights: Vec<Weight>,
    #[serde(default = "default_grid_size")]
    pub grid_size: usize,
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
}

fn default_grid_size() -> usize {
    64
}

fn default_scan_points() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlaschkeConfig {
    pub gamma: SetSpec,
    /// Treat a generated power set as the truncation of its infinite family
    /// and carry the tail bound; by default the listed elements are all of `Γ`.
    #[serde(default)]
    pub truncated: bool,
    /// Quadrature tolerance; `SZEGO_TOL` or `1e-6` when absent.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default = "default_boundary_t")]
    pub boundary_t: Vec<f64>,
    #[serde(default = "default_modulus_tol")]
    pub modulus_tol: f64,
    #[serde(default = "default_scan")]
    pub scan: ScanSpec,
    #[serde(default = "default_cauchy_points")]
    pub cauchy_points: Vec<[f64; 2]>,
    #[serde(default = "default_cauchy_tol")]
    pub cauchy_tol: f64,
    #[serde(default = "default_vanishing_count")]
    pub vanishing_count: usize,
    #[serde(default = "default_vanishing_ratio")]
    pub vanishing_ratio: f64,
    /// A point outside `Γ` whose residual should exceed ten times the threshold.
    #[serde(default = "default_control")]
    pub control: Option<f64>,
    #[serde(default = "default_convolution")]
    pub convolution: Option<ConvolutionSpec>,
}

/// Log-spaced scan of the cut `t ∈ [−t_max, −t_min]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvolutionSpec {
    /// Defaults to the smallest element of `Γ`, then `0` and `−1`.
    #[serde(default)]
    pub q: Option<Vec<f64>>,
    pub t: Vec<f64>,
    pub tol: f64,
}

fn default_boundary_t() -> Vec<f64> {
    vec![-0.5, -1.0, -10.0, -100.0]
}

fn default_modulus_tol() -> f64 {
    1e-5
}

fn default_scan() -> ScanSpec {
    ScanSpec {
        t_min: 1e-3,
        t_max: 1e3,
        points: 200,
    }
}

fn default_cauchy_points() -> Vec<[f64; 2]> {
    vec![
        [0.0, 1.0],
        [1.0, 1.0],
        [-2.0, 0.3],
        [5.0, 0.0],
        [0.5, -2.0],
        [-10.0, 4.0],
        [30.0, 1.0],
        [2.0, 0.0],
        [-0.5, -0.1],
        [100.0, 50.0],
    ]
}

fn default_cauchy_tol() -> f64 {
    1e-4
}

fn default_vanishing_count() -> usize {
    5
}

fn default_vanishing_ratio() -> f64 {
    1e-4
}

fn default_control() -> Option<f64> {
    Some(2.0)
}

fn default_convolution() -> Option<ConvolutionSpec> {
    Some(ConvolutionSpec {
        q: None,
        t: vec![0.25, 1.0],
        tol: 1e-3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeepZeroConfig {
    #[serde(rename = "M", default = "default_m")]
    pub m: usize,
    #[serde(default)]
    pub k_min: usize,
    #[serde(default = "default_t_min")]
    pub t_min: f64,
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Companion weight `exp(−2·fraction·C₂/t)`.
    #[serde(default = "default_fraction")]
    pub fraction: f64,
    #[serde(default = "default_two_route_t")]
    pub two_route_t: Vec<f64>,
    #[serde(default)]
    pub tol: Option<f64>,
}

impl Default for DeepZeroConfig {
    fn default() -> Self {
        Self {
            m: default_m(),
            k_min: 0,
            t_min: default_t_min(),
            t_max: default_t_max(),
            points: default_points(),
            fraction: default_fraction(),
            two_route_t: default_two_route_t(),
            tol: None,
        }
    }
}

impl DeepZeroConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |name: &str, reason: String| Err(CliError::Config(format!("invalid parameter `{name}`: {reason}")));
        if self.m < self.k_min {
            return bad("M", format!("must be at least k_min = {}", self.k_min));
        }
        if self.k_min > 1 {
            return bad("k_min", format!("must be 0 or 1, got {}", self.k_min));
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max && self.t_max <= 0.25) {
            return bad(
                "t_min",
                format!("need 0 < t_min < t_max ≤ 0.25, got [{}, {}]", self.t_min, self.t_max),
            );
        }
        if self.points < 8 {
            return bad("points", format!("need at least 8, got {}", self.points));
        }
        if !(self.fraction > 0.0 && self.fraction <= 1.0) {
            return bad("fraction", format!("must lie in (0,1], got {}", self.fraction));
        }
        if self.two_route_t.iter().any(|&t| !(t > 0.0 && t < 1.0)) {
            return bad("two_route_t", "points must lie in (0,1)".into());
        }
        check_tol("tol", self.tol)
    }
}

fn default_m() -> usize {
    20
}

fn default_t_min() -> f64 {
    0.02
}

fn default_t_max() -> f64 {
    0.2
}

fn default_points() -> usize {
    20
}

fn default_fraction() -> f64 {
    0.9
}

fn default_two_route_t() -> Vec<f64> {
    vec![0.1, 0.3, 0.5, 0.7, 0.9]
}

/// A weight, or the companion weight of a deep-zero series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Exp {
        c: f64,
    },
    Constant {
        v: f64,
    },
    Tabulated {
        samples: Vec<(f64, f64)>,
    },
    /// `exp(−2·fraction·C₂/t)` with `C₂` fitted on the default deep-zero grid.
    Companion {
        #[serde(default = "default_fraction")]
        fraction: f64,
        #[serde(rename = "M", default = "default_m")]
        m: usize,
        #[serde(default)]
        k_min: usize,
    },
}

impl WeightSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        match self {
            WeightSpec::Exp { c } => make_exp_weight(*c).map(|_| ())?,
            WeightSpec::Constant { v } => make_constant_weight(*v).map(|_| ())?,
            WeightSpec::Tabulated { samples } => make_tabulated_weight(samples.clone()).map(|_| ())?,
            WeightSpec::Companion { fraction, m, k_min } => DeepZeroConfig {
                m: *m,
                k_min: *k_min,
                fraction: *fraction,
                ..DeepZeroConfig::default()
            }
            .validate()?,
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeRunConfig {
    pub gamma: SetSpec,
    pub weight: WeightSpec,
    pub target: Target,
    pub n_list: Vec<u64>,
    #[serde(default = "default_floor")]
    pub floor: f64,
    /// Quadrature tolerance; `SZEGO_TOL` or `1e-12` when absent.
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub negative_frequencies: bool,
    /// Gate: every residual ratio must be at least this.
    #[serde(default)]
    pub flatness_threshold: Option<f64>,
    /// Gate: residuals must not increase by more than `1e-8` plus the floor effect.
    #[serde(default)]
    pub require_monotone: bool,
    /// Frequency put back into the span at the largest cutoff; the ratio must
    /// drop by at least the predicted projection mass.
    #[serde(default)]
    pub add_back: Option<i64>,
}

fn default_floor() -> f64 {
    szego_core::probe::DEFAULT_FLOOR
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let Config::Deepzero(c) = Config::from_json(r#"{"kind":"deepzero"}"#).unwrap() else {
            panic!("wrong kind");
        };
        assert_eq!(c, DeepZeroConfig::default());
        let Config::Blaschke(b) =
            Config::from_json(r#"{"kind":"blaschke","gamma":{"kind":"power","rho":3,"count":50}}"#).unwrap()
        else {
            panic!("wrong kind");
        };
        assert_eq!(b.boundary_t, vec![-0.5, -1.0, -10.0, -100.0]);
        assert_eq!(b.cauchy_points.len(), 10);
        assert!(!b.truncated);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            (r#"{"kind":"deepzero","k_min":2}"#, "`k_min`"),
            (r#"{"kind":"deepzero","t_min":0.3}"#, "`t_min`"),
            (r#"{"kind":"deepzero","tol":1.5}"#, "`tol`"),
            (
                r#"{"kind":"sets","sets":[{"kind":"power","rho":0.5,"count":3}]}"#,
                "`rho`",
            ),
            (
                r#"{"kind":"sets","sets":[{"kind":"power","rho":3,"count":3}],"condition_b":{"c":3,"grid":[2]}}"#,
                "`grid`",
            ),
            (
                r#"{"kind":"probe","gamma":{"kind":"power","rho":2,"count":3},"weight":{"kind":"exp","c":1},
                "target":{"kind":"polynomial","coeffs":[1]},"n_list":[50]}"#,
                "`gamma`",
            ),
            (
                r#"{"kind":"probe","gamma":{"kind":"empty"},"weight":{"kind":"exp","c":1},
                "target":{"kind":"polynomial","coeffs":[1]},"n_list":[50,20]}"#,
                "`n_list`",
            ),
            (r#"{"kind":"deepzero","extra":1}"#, "`extra`"),
        ];
        for (text, field) in cases {
            let e = Config::from_json(text).unwrap_err().to_string();
            assert!(e.contains(field), "{text}: {e}");
        }
    }

    #[test]
    fn round_trips_through_json() {
        let c = Config::Deepzero(DeepZeroConfig::default());
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains(r#""M":20"#));
        assert_eq!(Config::from_json(&text).unwrap(), c);
    }
}
