//! Experiment execution: one function per configuration kind.
//!
//! Each experiment returns its tables and clauses; [`run_config`] owns the
//! file layout and the manifest lifecycle.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde_json::json;
use sha2::{Digest, Sha256};
use szego_core::blaschke::BlaschkeAnnihilator;
use szego_core::deep_zero::{
    companion_weight, decay_fit, decay_fit_near_one, inverse_spaced_grid, membership_check, two_route_check,
    MEMBERSHIP_T_FLOOR,
};
use szego_core::frequency_sets::{condition_b_check, sqrt_sum_diagnostic, thin_to_condition_b, Generator, Verdict};
use szego_core::probe::{add_back_check, residual_curve, ProbeConfig, Target};
use szego_core::weights::{validate_condition_a, Clause as WeightClause};
use szego_core::{Complex64, DeepZeroSeries, FrequencySet, Tolerance, Weight};

use crate::config::{BlaschkeConfig, Config, DeepZeroConfig, ProbeRunConfig, SetsConfig, WeightSpec, WeightsConfig};
use crate::format::CsvTable;
use crate::manifest::{Clause, Manifest, Status};
use crate::CliError;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunOptions {
    /// Tolerance used when a configuration leaves `tol` unset (`SZEGO_TOL`).
    pub default_tol: Option<f64>,
}

#[derive(Debug, Default)]
struct Artifacts {
    files: Vec<(String, Vec<u8>)>,
    clauses: Vec<Clause>,
    summary: serde_json::Value,
    tolerances: BTreeMap<String, f64>,
}

impl Artifacts {
    fn csv(&mut self, name: &str, table: &CsvTable) {
        self.files.push((name.to_string(), table.render().into_bytes()));
    }

    fn json(&mut self, name: &str, value: &serde_json::Value) {
        let mut text = serde_json::to_string_pretty(value).expect("JSON values serialise");
        text.push('\n');
        self.files.push((name.to_string(), text.into_bytes()));
    }

    fn tol(&mut self, name: &str, value: f64) {
        self.tolerances.insert(name.to_string(), value);
    }
}

pub const FAILURE_FILE: &str = "failure.json";

/// Runs one experiment into `out`.
///
/// The manifest is written first with status `incomplete` and rewritten at
/// the end. A gated clause that fails gives status `tolerance_failure`; an
/// error gives status `failed`, a `failure.json` diagnostic and `Err`.
pub fn run_config(cfg: &Config, out: &Path, opts: &RunOptions) -> Result<Manifest, CliError> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Config(format!("cannot create output directory {}: {e}", out.display())))?;
    let parameters = serde_json::to_value(cfg).map_err(|e| CliError::Io(e.to_string()))?;
    let mut manifest = Manifest::new(cfg.kind(), parameters);
    let canonical = serde_json::to_vec(cfg).map_err(|e| CliError::Io(e.to_string()))?;
    manifest.config_sha256 = Some(hex::encode(Sha256::digest(&canonical)));
    manifest.write(out)?;

    let start = Instant::now();
    let result = match cfg {
        Config::Sets(c) => run_sets(c),
        Config::Weights(c) => run_weights(c),
        Config::Blaschke(c) => run_blaschke(c, opts.default_tol),
        Config::Deepzero(c) => run_deepzero(c, opts.default_tol),
        Config::Probe(c) => run_probe(c, opts.default_tol),
    };
    manifest
        .timings
        .insert("compute_seconds".into(), start.elapsed().as_secs_f64());

    let artifacts = match result {
        Ok(a) => a,
        Err(e) => {
            manifest.status = Status::Failed;
            manifest.error = Some(e.to_string());
            let diag = json!({
                "kind": cfg.kind(),
                "error": e.to_string(),
                "exit_code": e.exit_code(),
            });
            let mut text = serde_json::to_string_pretty(&diag).expect("JSON values serialise");
            text.push('\n');
            manifest.write_output(out, FAILURE_FILE, text.as_bytes())?;
            manifest.write(out)?;
            return Err(e);
        }
    };

    let start = Instant::now();
    for (name, bytes) in &artifacts.files {
        manifest.write_output(out, name, bytes)?;
    }
    manifest
        .timings
        .insert("write_seconds".into(), start.elapsed().as_secs_f64());
    manifest.clauses = artifacts.clauses;
    manifest.summary = artifacts.summary;
    manifest.tolerances = artifacts.tolerances;
    manifest.status = if manifest.any_gate_failed() {
        Status::ToleranceFailure
    } else {
        Status::Complete
    };
    manifest.write(out)?;
    Ok(manifest)
}

fn verdict_code(v: Verdict) -> f64 {
    match v {
        Verdict::Converges => 1.0,
        Verdict::Diverges => -1.0,
        Verdict::Undetermined => 0.0,
    }
}

fn set_label(set: &FrequencySet) -> String {
    match set.generator() {
        Generator::Power { rho, .. } => format!("Gamma_rho rho={rho}"),
        g => format!("set {g}"),
    }
}

fn run_sets(c: &SetsConfig) -> Result<Artifacts, CliError> {
    let mut a = Artifacts::default();
    let mut summary = CsvTable::new(&[
        "index",
        "rho",
        "count",
        "partial_sqrt_sum",
        "tail_bound",
        "verdict_code",
    ]);
    let mut counting = CsvTable::new(&["set_index", "thinned", "x", "count", "bound", "pass", "within_range"]);
    let mut entries = Vec::new();

    for (i, spec) in c.sets.iter().enumerate() {
        let set = spec.build()?;
        let report = sqrt_sum_diagnostic(&set);
        summary.push(vec![
            i as f64,
            spec.rho().unwrap_or(f64::NAN),
            set.len() as f64,
            report.partial_sum(),
            report.tail_bound.unwrap_or(f64::NAN),
            verdict_code(report.verdict),
        ]);
        a.clauses.push(Clause::note(
            format!("{} verdict", set_label(&set)),
            report.verdict.to_string(),
        ));
        let mut entry = json!({
            "index": i,
            "generator": set.generator().to_string(),
            "report": report,
        });

        if let Some(b) = &c.condition_b {
            let plain = condition_b_check(&set, b.c, &b.grid)?;
            push_counting(&mut counting, i, false, &plain);
            a.clauses.push(Clause::note(
                format!("condition B C={} {}", b.c, set_label(&set)),
                if plain.pass { "holds" } else { "fails" },
            ));
            entry["condition_b"] = json!(plain);

            let thinnable = matches!(set.generator(), Generator::Power { rho, .. } if *rho <= 2.0);
            if b.thin && thinnable {
                let thinning = thin_to_condition_b(&set, b.c)?;
                let check = condition_b_check(&thinning.set, b.c, &b.grid)?;
                push_counting(&mut counting, i, true, &check);
                let worst = check
                    .points
                    .iter()
                    .map(|p| p.count as f64 / p.bound)
                    .fold(0.0, f64::max);
                a.clauses.push(Clause::check(
                    format!("condition B C={} thinned {} max count/bound", b.c, set_label(&set)),
                    worst,
                    1.0,
                    check.pass,
                ));
                let thinned_report = sqrt_sum_diagnostic(&thinning.set);
                a.clauses.push(Clause::note(
                    format!("thinned {} verdict", set_label(&set)),
                    thinned_report.verdict.to_string(),
                ));
                entry["thinning"] = json!({
                    "note": thinning.note,
                    "generator": thinning.set.generator().to_string(),
                    "count": thinning.set.len(),
                    "condition_b": check,
                    "report": thinned_report,
                });
            }
        }
        entries.push(entry);
    }

    a.csv("sets_summary.csv", &summary);
    if c.condition_b.is_some() {
        a.csv("condition_b.csv", &counting);
    }
    a.summary = json!({ "sets": entries });
    Ok(a)
}

fn push_counting(table: &mut CsvTable, index: usize, thinned: bool, r: &szego_core::frequency_sets::ConditionBReport) {
    for p in &r.points {
        table.push(vec![
            index as f64,
            f64::from(u8::from(thinned)),
            p.x,
            p.count as f64,
            p.bound,
            f64::from(u8::from(p.pass)),
            f64::from(u8::from(p.within_generated_range)),
        ]);
    }
}

fn clause_word(c: WeightClause) -> &'static str {
    match c {
        WeightClause::Pass => "pass",
        WeightClause::Fail => "fail",
        WeightClause::TrendOnly => "trend only",
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

fn run_weights(c: &WeightsConfig) -> Result<Artifacts, CliError> {
    let mut a = Artifacts::default();
    let mut scan = CsvTable::new(&["index", "t", "w", "log_w"]);
    let mut logs = CsvTable::new(&["index", "eps", "log_integral"]);
    let mut reports = Vec::new();
    let grid = log_grid(1e-4, 1.0, c.scan_points.max(2));
    for (i, w) in c.weights.iter().enumerate() {
        for &t in &grid {
            scan.push(vec![i as f64, t, w.eval(t), w.ln_eval(t)]);
        }
        let r = validate_condition_a(w, c.grid_size)?;
        for &(eps, v) in &r.log_integrals {
            logs.push(vec![i as f64, eps, v]);
        }
        a.clauses.push(Clause::note(
            format!("weight {i} condition A"),
            format!(
                "positive {}, nondecreasing {}, bounded {}, log integral diverges {}",
                clause_word(r.positive),
                clause_word(r.nondecreasing),
                clause_word(r.bounded),
                clause_word(r.log_integral_diverges)
            ),
        ));
        reports.push(json!({ "index": i, "weight": w, "condition_a": r, "pass": r.pass() }));
    }
    a.csv("weights_scan.csv", &scan);
    a.csv("log_integrals.csv", &logs);
    a.summary = json!({ "weights": reports });
    Ok(a)
}

fn run_blaschke(c: &BlaschkeConfig, default_tol: Option<f64>) -> Result<Artifacts, CliError> {
    let tol = c.tol.or(default_tol).unwrap_or(1e-6);
    let gamma = c.gamma.build()?;
    let ann = if c.truncated {
        BlaschkeAnnihilator::truncated(gamma.clone())?
    } else {
        BlaschkeAnnihilator::finite(gamma.clone())
    };
    let jump = ann.jump();
    let mut a = Artifacts::default();
    a.tol("quadrature", tol);
    a.tol("modulus", c.modulus_tol);
    a.tol("cauchy_identity", c.cauchy_tol);
    a.tol("vanishing_ratio", c.vanishing_ratio);

    // Boundary modulus against t²/(1+|t|)⁴.
    let mut deviation: f64 = 0.0;
    let mut tail: f64 = 0.0;
    for &t in &c.boundary_t {
        let v = ann.eval_phi_boundary(t)?;
        let ratio = v.norm() * (1.0 + t.abs()).powi(4) / (t * t);
        deviation = deviation.max((ratio - 1.0).abs());
        tail = tail.max(ann.tail_bound(t.abs()).exp_m1());
    }
    a.clauses.push(Clause::check(
        "boundary modulus max deviation",
        deviation,
        c.modulus_tol,
        deviation <= c.modulus_tol,
    ));
    a.clauses
        .push(Clause::check("truncation tail bound", tail, 1e-8, tail < 1e-8));

    let mut boundary = CsvTable::new(&["t", "re_phi_plus", "im_phi_plus", "abs_g", "bound", "modulus_ratio"]);
    for s in log_grid(c.scan.t_min, c.scan.t_max, c.scan.points).into_iter().rev() {
        let t = -s;
        let v = ann.eval_phi_boundary(t)?;
        boundary.push(vec![
            t,
            v.re,
            v.im,
            jump.eval_g(t).norm(),
            szego_core::JumpFunction::envelope(t),
            v.norm() * (1.0 + s).powi(4) / (s * s),
        ]);
    }
    a.csv("boundary_scan.csv", &boundary);

    // Cauchy representation, for Γ and for the empty baseline.
    let cauchy_tol = Tolerance::new(1e-14, tol);
    let baseline = BlaschkeAnnihilator::finite(FrequencySet::empty()).jump();
    let mut identity = CsvTable::new(&["case", "z_re", "z_im", "residual"]);
    let mut worst: f64 = 0.0;
    for (case, j) in [(0.0, &jump), (1.0, &baseline)] {
        for p in &c.cauchy_points {
            let z = Complex64::new(p[0], p[1]);
            let r = j.cauchy_identity_residual(z, 1e-300, cauchy_tol)?;
            worst = worst.max(r);
            identity.push(vec![case, p[0], p[1], r]);
        }
    }
    a.csv("identity_scan.csv", &identity);
    a.clauses.push(Clause::check(
        "max Cauchy-identity relative residual",
        worst,
        c.cauchy_tol,
        worst < c.cauchy_tol,
    ));

    let mut summary = json!({
        "gamma": gamma.generator().to_string(),
        "count": gamma.len(),
        "boundary_modulus_deviation": deviation,
        "tail_bound": tail,
        "max_cauchy_residual": worst,
    });

    // Vanishing of the Cauchy transform on Γ, with a control point off Γ.
    if !gamma.is_empty() && c.vanishing_count > 0 {
        let vtol = Tolerance::new(1e-10, tol);
        let l1 = jump.l1_norm(vtol)?.value.re;
        let mut vanishing = CsvTable::new(&["case", "q", "residual", "ratio"]);
        let mut max_ratio: f64 = 0.0;
        for &g in gamma.elements().iter().take(c.vanishing_count) {
            let r = jump.gamma_vanishing_residual(g, vtol)?.value.norm();
            max_ratio = max_ratio.max(r / l1);
            vanishing.push(vec![0.0, g, r, r / l1]);
        }
        a.clauses.push(Clause::check(
            "vanishing on Gamma max residual/L1",
            max_ratio,
            c.vanishing_ratio,
            max_ratio < c.vanishing_ratio,
        ));
        summary["l1_norm"] = json!(l1);
        summary["vanishing_max_ratio"] = json!(max_ratio);
        if let Some(q) = c.control {
            if gamma.contains(q) {
                return Err(CliError::Config(format!(
                    "invalid parameter `control`: {q} is an element of Gamma"
                )));
            }
            let r = jump.cauchy_residual_at(q, vtol)?.value.norm();
            vanishing.push(vec![1.0, q, r, r / l1]);
            let need = 10.0 * c.vanishing_ratio;
            a.clauses.push(Clause::check(
                format!("control point q={q} residual/L1 (must exceed)"),
                r / l1,
                need,
                r / l1 > need,
            ));
            summary["control_ratio"] = json!(r / l1);
        }
        a.csv("vanishing.csv", &vanishing);
    }

    // Convolution routes.
    if let Some(conv) = &c.convolution {
        let qs = match &conv.q {
            Some(qs) => qs.clone(),
            None => {
                let mut qs = Vec::new();
                qs.extend(gamma.elements().first().copied());
                qs.extend([0.0, -1.0]);
                qs
            }
        };
        let ctol = Tolerance::new(conv.tol * 1e-3, tol);
        let mut table = CsvTable::new(&[
            "q",
            "t",
            "direct_re",
            "direct_im",
            "kernel_re",
            "kernel_im",
            "reduced_re",
            "reduced_im",
            "residual",
        ]);
        let mut worst: f64 = 0.0;
        for &q in &qs {
            for &t in &conv.t {
                let r = jump.convolution_identity(q, t, ctol)?;
                worst = worst.max(r.residual);
                let red = r.reduced_form.map(|x| x.value);
                table.push(vec![
                    q,
                    t,
                    r.direct.value.re,
                    r.direct.value.im,
                    r.kernel_form.value.re,
                    r.kernel_form.value.im,
                    red.map_or(f64::NAN, |v| v.re),
                    red.map_or(f64::NAN, |v| v.im),
                    r.residual,
                ]);
            }
        }
        a.csv("convolution.csv", &table);
        a.tol("convolution", conv.tol);
        a.clauses.push(Clause::check(
            "max convolution route discrepancy",
            worst,
            conv.tol,
            worst < conv.tol,
        ));
        summary["max_convolution_discrepancy"] = json!(worst);
    }
    a.summary = summary;
    Ok(a)
}

fn run_deepzero(c: &DeepZeroConfig, default_tol: Option<f64>) -> Result<Artifacts, CliError> {
    let tol = c.tol.or(default_tol).unwrap_or(1e-12);
    let mut a = Artifacts::default();
    a.tol("integral", tol);

    let series = DeepZeroSeries::new(c.k_min, c.m)?;
    let grid = inverse_spaced_grid(c.t_min, c.t_max, c.points);
    let fit = decay_fit(&series, &grid)?;

    let mut scan = CsvTable::new(&["t", "abs_H", "log_abs_H", "inv_t"]);
    for &t in &grid {
        let v = series.eval(t).norm();
        scan.push(vec![t, v, v.ln(), 1.0 / t]);
    }
    a.csv("deepzero_scan.csv", &scan);

    a.clauses.push(Clause::info("C2 fit", fit.c2));
    a.clauses.push(Clause::check(
        "decay fit slope (must be negative)",
        fit.slope,
        0.0,
        fit.slope < 0.0,
    ));
    a.clauses.push(Clause::check(
        "decay fit |correlation|",
        fit.correlation.abs(),
        0.99,
        fit.correlation.abs() > 0.99,
    ));

    let doubled = decay_fit(&DeepZeroSeries::new(c.k_min, 2 * c.m)?, &grid)?;
    let drift = (doubled.c2 - fit.c2).abs() / fit.c2.abs();
    a.clauses.push(Clause::check(
        format!("C2 relative change M={} to M={}", c.m, 2 * c.m),
        drift,
        0.1,
        drift <= 0.1,
    ));

    let near_one = decay_fit_near_one(&series, &grid)?;
    a.clauses.push(Clause::check(
        "fit near t=1 slope (must be negative)",
        near_one.slope,
        0.0,
        near_one.slope < 0.0,
    ));
    a.clauses.push(Clause::check(
        "fit near t=1 |correlation|",
        near_one.correlation.abs(),
        0.99,
        near_one.correlation.abs() > 0.99,
    ));

    // Series against the Fourier integral of h, for both starting indices.
    let mut routes = CsvTable::new(&[
        "k_min",
        "t",
        "series_re",
        "series_im",
        "integral_re",
        "integral_im",
        "discrepancy",
        "bound",
    ]);
    let mut worst = BTreeMap::new();
    for k_min in [c.k_min, 1 - c.k_min] {
        let s = DeepZeroSeries::new(k_min, c.m.max(1))?;
        let mut w: f64 = 0.0;
        for &t in &c.two_route_t {
            let r = two_route_check(&s, t, tol);
            w = w.max(r.discrepancy / r.combined_bound);
            routes.push(vec![
                k_min as f64,
                t,
                r.series.re,
                r.series.im,
                r.integral.re,
                r.integral.im,
                r.discrepancy,
                r.combined_bound,
            ]);
        }
        worst.insert(k_min, w);
    }
    a.csv("two_route.csv", &routes);
    let own = worst[&c.k_min];
    let other_k = 1 - c.k_min;
    let other = worst[&other_k];
    a.clauses.push(Clause::check(
        format!("two-route k_min={} max discrepancy/bound", c.k_min),
        own,
        1.0,
        own <= 1.0,
    ));
    a.clauses.push(Clause::info(
        format!("two-route k_min={other_k} max discrepancy/bound"),
        other,
    ));
    let resolution = match (own <= 1.0, other <= 1.0) {
        (true, false) => format!(
            "k_min={} matches the Fourier integral, k_min={other_k} does not",
            c.k_min
        ),
        (false, true) => format!(
            "k_min={other_k} matches the Fourier integral, k_min={} does not",
            c.k_min
        ),
        (true, true) => "both starting indices match".to_string(),
        (false, false) => "neither starting index matches".to_string(),
    };
    a.clauses.push(Clause::note("k_min resolution", resolution.clone()));

    // Membership of H in L²(1/w) for the companion weight.
    let w = companion_weight(&fit, c.fraction)?;
    let fitted = series.clone().with_fit(fit);
    let m = membership_check(&fitted, &w, MEMBERSHIP_T_FLOOR)?;
    let bound = m.upper_bound();
    a.clauses.push(Clause::check(
        "membership integral of |H|^2/w upper bound",
        bound,
        f64::INFINITY,
        bound.is_finite(),
    ));
    a.clauses.push(Clause::check(
        "membership integrand max on sample grid",
        m.max_integrand,
        f64::INFINITY,
        m.max_integrand.is_finite(),
    ));

    let summary = json!({
        "c1": fit.c1,
        "c2": fit.c2,
        "slope": fit.slope,
        "intercept": fit.intercept,
        "correlation": fit.correlation,
        "M": c.m,
        "k_min": c.k_min,
        "c2_doubled_M": doubled.c2,
        "near_one": near_one,
        "two_route_max_ratio": worst.iter().map(|(k, v)| (k.to_string(), *v)).collect::<BTreeMap<_, _>>(),
        "k_min_resolution": resolution,
        "companion_weight": w,
        "membership": m,
    });
    a.json("summary.json", &summary);
    a.summary = summary;
    Ok(a)
}

/// Builds the weight a configuration describes, fitting `C₂` for the companion weight.
pub fn resolve_weight(spec: &WeightSpec) -> Result<Weight, CliError> {
    Ok(match spec {
        WeightSpec::Exp { c } => Weight::Exp { c: *c },
        WeightSpec::Constant { v } => Weight::Constant { v: *v },
        WeightSpec::Tabulated { samples } => Weight::Tabulated {
            samples: samples.clone(),
        },
        WeightSpec::Companion { fraction, m, k_min } => {
            let d = DeepZeroConfig::default();
            let series = DeepZeroSeries::new(*k_min, *m)?;
            let fit = decay_fit(&series, &inverse_spaced_grid(d.t_min, d.t_max, d.points))?;
            companion_weight(&fit, *fraction)?
        }
    })
}

fn run_probe(c: &ProbeRunConfig, default_tol: Option<f64>) -> Result<Artifacts, CliError> {
    let tol = c.tol.or(default_tol).unwrap_or(1e-12);
    let mut a = Artifacts::default();
    a.tol("quadrature", tol);
    a.tol("floor", c.floor);
    let weight = resolve_weight(&c.weight)?;
    let config = ProbeConfig {
        weight: weight.clone(),
        gamma: c.gamma.build()?,
        n_list: c.n_list.clone(),
        target: c.target.clone(),
        floor: c.floor,
        tol,
        negative_frequencies: c.negative_frequencies,
    };
    let curve = residual_curve(&config)?;

    let mut table = CsvTable::new(&[
        "N",
        "residual",
        "target_norm",
        "ratio",
        "cond_estimate",
        "residual_unfloored",
    ]);
    let mut regularization: f64 = 0.0;
    for r in &curve.records {
        let plain = r.residual_unfloored.unwrap_or(f64::NAN);
        table.push(vec![
            r.n as f64,
            r.residual,
            r.target_norm,
            r.ratio,
            r.condition_estimate,
            plain,
        ]);
        regularization = regularization.max(match r.residual_unfloored {
            Some(p) => (r.residual - p).abs(),
            None => c.floor.sqrt() * r.target_norm,
        });
        if let Some(p) = r.residual_unfloored {
            if (r.residual - p).abs() > 1e-6 * p.abs().max(f64::MIN_POSITIVE) {
                a.clauses
                    .push(Clause::info(format!("N={} residual without floor", r.n), p));
            }
        }
    }
    a.csv("residuals.csv", &table);

    let min = curve.min_ratio();
    let max = curve.max_ratio();
    if matches!(c.target, Target::Annihilator { .. }) {
        a.clauses.push(match c.flatness_threshold {
            Some(th) => Clause::check("annihilator flatness min ratio", min, th, min >= th),
            None => Clause::info("annihilator flatness min ratio", min),
        });
    } else if let Some(th) = c.flatness_threshold {
        a.clauses.push(Clause::check("residual min ratio", min, th, min >= th));
    }
    a.clauses
        .push(Clause::note("residual-ratio range", format!("[{min:e}, {max:e}]")));

    let increase = curve.max_increase();
    if c.require_monotone {
        let allowed = 1e-8 + regularization;
        a.tol("monotone", allowed);
        a.clauses.push(Clause::check(
            "residual max increase",
            increase,
            allowed,
            increase <= allowed,
        ));
    }

    let mut summary = json!({
        "weight": weight,
        "records": curve.records,
        "min_ratio": min,
        "max_ratio": max,
        "max_increase": increase,
        "regularization_tolerance": regularization,
    });
    if let Some(q) = c.add_back {
        let r = add_back_check(&config, q)?;
        a.clauses.push(Clause::check(
            format!("ratio drop after adding back frequency {q} (must reach predicted)"),
            r.drop,
            r.predicted_drop,
            r.pass(),
        ));
        summary["add_back"] = json!(r);
    }
    a.summary = summary;
    Ok(a)
}
