//! Removed frequency sets `Γ ⊂ (0, ∞)`: generators, the `Σ 1/√γ` sparseness
//! diagnostic, the counting-function condition `#(Γ ∩ (0,x)) ≤ C√x / log x`
//! and complements inside `[1, N]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// How a [`FrequencySet`] was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Generator {
    /// `{⌊k^ρ⌋ : 1 ≤ k ≤ count}`.
    Power { rho: f64, count: usize },
    /// Union of integer intervals `[start, start + length]`.
    Blocks { starts: Vec<u64>, lengths: Vec<u64> },
    /// Elements supplied by the caller.
    Explicit,
    /// `{⌊p^ρ⌋ : p ≤ count prime}`.
    PrimeThinned { rho: f64, count: usize },
    /// Greedy subset of a power set kept under the counting bound with constant `c`.
    GreedyThinned { rho: f64, count: usize, c: f64 },
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Power { rho, count } => write!(f, "power(rho={rho}, count={count})"),
            Generator::Blocks { starts, lengths } => {
                write!(f, "blocks(starts={}, lengths={})", join(starts), join(lengths))
            }
            Generator::Explicit => f.write_str("explicit"),
            Generator::PrimeThinned { rho, count } => {
                write!(f, "prime_thinned(rho={rho}, count={count})")
            }
            Generator::GreedyThinned { rho, count, c } => {
                write!(f, "greedy_thinned(rho={rho}, count={count}, c={c})")
            }
        }
    }
}

fn join(values: &[u64]) -> String {
    let parts: Vec<String> = values.iter().map(u64::to_string).collect();
    format!("[{}]", parts.join(" "))
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "explicit" {
            return Ok(Generator::Explicit);
        }
        let bad = |reason: &str| Error::Parse {
            line: 1,
            reason: format!("generator `{s}`: {reason}"),
        };
        let open = s.find('(').ok_or_else(|| bad("missing `(`"))?;
        let body = s[open + 1..].strip_suffix(')').ok_or_else(|| bad("missing `)`"))?;
        let mut fields = std::collections::BTreeMap::new();
        for part in body.split(", ") {
            let (key, value) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            fields.insert(key.trim(), value.trim());
        }
        let num = |key: &str| -> Result<f64> {
            fields
                .get(key)
                .and_then(|v| v.parse::<f64>().ok())
                .ok_or_else(|| bad(&format!("field `{key}`")))
        };
        let count = |key: &str| -> Result<usize> {
            fields
                .get(key)
                .and_then(|v| v.parse::<usize>().ok())
                .ok_or_else(|| bad(&format!("field `{key}`")))
        };
        let list = |key: &str| -> Result<Vec<u64>> {
            let raw = fields.get(key).ok_or_else(|| bad(&format!("field `{key}`")))?;
            let inner = raw
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| bad(&format!("field `{key}` is not a list")))?;
            inner
                .split_whitespace()
                .map(|v| v.parse::<u64>().map_err(|_| bad(&format!("field `{key}`"))))
                .collect()
        };
        match &s[..open] {
            "power" => Ok(Generator::Power {
                rho: num("rho")?,
                count: count("count")?,
            }),
            "prime_thinned" => Ok(Generator::PrimeThinned {
                rho: num("rho")?,
                count: count("count")?,
            }),
            "greedy_thinned" => Ok(Generator::GreedyThinned {
                rho: num("rho")?,
                count: count("count")?,
                c: num("c")?,
            }),
            "blocks" => Ok(Generator::Blocks {
                starts: list("starts")?,
                lengths: list("lengths")?,
            }),
            _ => Err(bad("unknown generator")),
        }
    }
}

/// A finite, strictly increasing set of positive frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySet {
    elements: Vec<f64>,
    generator: Generator,
    duplicates_removed: usize,
}

impl FrequencySet {
    /// Builds a set from arbitrary positive values; the input is sorted and
    /// deduplicated.
    pub fn explicit(mut values: Vec<f64>) -> Result<Self> {
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(invalid(
                "elements",
                format!("frequencies must be finite and positive, got {bad}"),
            ));
        }
        values.sort_by(f64::total_cmp);
        let before = values.len();
        values.dedup();
        Ok(Self {
            duplicates_removed: before - values.len(),
            elements: values,
            generator: Generator::Explicit,
        })
    }

    pub fn empty() -> Self {
        Self {
            elements: Vec::new(),
            generator: Generator::Explicit,
            duplicates_removed: 0,
        }
    }

    pub fn elements(&self) -> &[f64] {
        &self.elements
    }

    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Number of generator values that collapsed onto an earlier element.
    pub fn duplicates_removed(&self) -> usize {
        self.duplicates_removed
    }

    /// Number of indices `k` the generator ran over.
    pub fn count_limit(&self) -> usize {
        match &self.generator {
            Generator::Power { count, .. }
            | Generator::PrimeThinned { count, .. }
            | Generator::GreedyThinned { count, .. } => *count,
            _ => self.elements.len(),
        }
    }

    /// Smallest gap between consecutive elements (`∞` for fewer than two).
    pub fn min_gap(&self) -> f64 {
        self.elements
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.elements.binary_search_by(|g| g.total_cmp(&x)).is_ok()
    }

    /// `#(Γ ∩ (0, x))`.
    pub fn count_below(&self, x: f64) -> usize {
        self.elements.partition_point(|&g| g < x)
    }

    /// Largest `x` such that every member of the underlying infinite family
    /// below `x` has been generated.
    pub fn generated_range(&self) -> f64 {
        match &self.generator {
            Generator::Power { rho, count }
            | Generator::PrimeThinned { rho, count }
            | Generator::GreedyThinned { rho, count, .. } => floor_power(*count as u64 + 1, *rho),
            _ => self.elements.last().copied().unwrap_or(0.0),
        }
    }

    /// Serialises as a `# generator: ...` header followed by one element per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("# generator: {}\n", self.generator);
        for g in &self.elements {
            out.push_str(&format!("{g}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut generator = Generator::Explicit;
        let mut values = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some(desc) = comment.trim().strip_prefix("generator:") {
                    generator = desc.parse().map_err(|e| match e {
                        Error::Parse { reason, .. } => Error::Parse { line: i + 1, reason },
                        other => other,
                    })?;
                }
                continue;
            }
            let v: f64 = line.parse().map_err(|_| Error::Parse {
                line: i + 1,
                reason: format!("not a number: `{line}`"),
            })?;
            values.push(v);
        }
        let mut set = Self::explicit(values)?;
        set.generator = generator;
        Ok(set)
    }
}

/// `⌊k^ρ⌋` with integer arithmetic whenever `ρ` is an integer and the result fits.
fn floor_power(k: u64, rho: f64) -> f64 {
    if rho.fract() == 0.0 && rho <= 64.0 {
        if let Some(v) = k.checked_pow(rho as u32) {
            if v < (1u64 << 53) {
                return v as f64;
            }
        }
    }
    let x = (k as f64).powf(rho);
    let nearest = x.round();
    // powf can land one ulp below an exact integer power such as 4^1.5.
    if (x - nearest).abs() <= 8.0 * f64::EPSILON * x {
        nearest
    } else {
        x.floor()
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if !(rho > 1.0) || !rho.is_finite() {
        return Err(invalid("rho", format!("must be a finite value > 1, got {rho}")));
    }
    Ok(())
}

fn check_count(count: usize) -> Result<()> {
    if count == 0 {
        return Err(invalid("count", "must be at least 1"));
    }
    Ok(())
}

fn from_indices(indices: impl Iterator<Item = u64>, rho: f64, generator: Generator) -> FrequencySet {
    let mut elements: Vec<f64> = indices.map(|k| floor_power(k, rho)).collect();
    let before = elements.len();
    elements.dedup();
    FrequencySet {
        duplicates_removed: before - elements.len(),
        elements,
        generator,
    }
}

/// `{⌊k^ρ⌋ : 1 ≤ k ≤ count}` with duplicates removed.
pub fn gen_power_set(rho: f64, count: usize) -> Result<FrequencySet> {
    check_rho(rho)?;
    check_count(count)?;
    Ok(from_indices(1..=count as u64, rho, Generator::Power { rho, count }))
}

/// `{⌊p^ρ⌋ : p ≤ count prime}`.
pub fn gen_prime_power_set(rho: f64, count: usize) -> Result<FrequencySet> {
    check_rho(rho)?;
    check_count(count)?;
    Ok(from_indices(
        primes_up_to(count as u64).into_iter(),
        rho,
        Generator::PrimeThinned { rho, count },
    ))
}

/// Primes `≤ n` by the sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut j = i * i;
        while j <= n {
            composite[j] = true;
            j += i;
        }
    }
    primes
}

/// Union of the integer intervals `[s_m, s_m + L_m]`.
pub fn gen_interval_blocks(starts: &[u64], lengths: &[u64]) -> Result<FrequencySet> {
    if starts.len() != lengths.len() {
        return Err(invalid(
            "block_lengths",
            format!("{} starts but {} lengths", starts.len(), lengths.len()),
        ));
    }
    if starts.contains(&0) {
        return Err(invalid("block_starts", "frequencies must be positive"));
    }
    for m in 1..starts.len() {
        if lengths[m] <= lengths[m - 1] {
            return Err(invalid(
                "block_lengths",
                format!("lengths must increase strictly (block {m})"),
            ));
        }
        if starts[m] <= starts[m - 1] + lengths[m - 1] {
            return Err(invalid(
                "block_starts",
                format!(
                    "block {m} starting at {} overlaps [{}, {}]",
                    starts[m],
                    starts[m - 1],
                    starts[m - 1] + lengths[m - 1]
                ),
            ));
        }
    }
    let elements = starts
        .iter()
        .zip(lengths)
        .flat_map(|(&s, &l)| (s..=s + l).map(|v| v as f64))
        .collect();
    Ok(FrequencySet {
        elements,
        generator: Generator::Blocks {
            starts: starts.to_vec(),
            lengths: lengths.to_vec(),
        },
        duplicates_removed: 0,
    })
}

/// Partial sums `Σ ψ(γ)` after each element.
pub fn psi_partial_sums(set: &FrequencySet, psi: impl Fn(f64) -> f64) -> Vec<f64> {
    set.elements
        .iter()
        .scan(0.0, |acc, &g| {
            *acc += psi(g);
            Some(*acc)
        })
        .collect()
}

/// Outcome of the `Σ 1/√γ` test for the infinite family a set belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Converges,
    Diverges,
    Undetermined,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converges => "converges",
            Verdict::Diverges => "diverges",
            Verdict::Undetermined => "undetermined",
        })
    }
}

/// Analytic argument backing a verdict beyond the generated elements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TailArgument {
    /// The set is exactly the listed elements.
    Finite,
    /// `Σ_{k>K} ⌊k^ρ⌋^{-1/2} ≤ (1 - K^{-ρ})^{-1/2} ∫_K^∞ x^{-ρ/2} dx`, finite for `ρ > 2`.
    IntegralComparison { rho: f64 },
    /// `⌊k^ρ⌋^{-1/2} ≥ k^{-ρ/2} ≥ 1/k` for `ρ ≤ 2`: harmonic minorant.
    HarmonicMinorant { rho: f64 },
    /// `⌊p^ρ⌋^{-1/2} ≥ 1/p` for `ρ ≤ 2`, and `Σ_p 1/p` diverges (Mertens).
    Mertens { rho: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparsityReport {
    /// `(K, Σ_{first K elements} 1/√γ)` at `K = 1, 2, 4, ...` and at the full length.
    pub partial_sqrt_sums: Vec<(usize, f64)>,
    /// Bound on the sum over the family beyond the generated elements.
    pub tail_bound: Option<f64>,
    pub verdict: Verdict,
    pub argument: Option<TailArgument>,
}

impl SparsityReport {
    pub fn partial_sum(&self) -> f64 {
        self.partial_sqrt_sums.last().map_or(0.0, |p| p.1)
    }

    /// `[partial, partial + tail]` when the tail is bounded.
    pub fn bracket(&self) -> Option<(f64, f64)> {
        self.tail_bound.map(|t| (self.partial_sum(), self.partial_sum() + t))
    }
}

/// `Σ_{k>K} ⌊k^ρ⌋^{-1/2}` bound by integral comparison (`ρ > 2`, `K ≥ 1`).
pub fn power_sqrt_tail(rho: f64, k: usize) -> f64 {
    if !(rho > 2.0) {
        return f64::INFINITY;
    }
    let k = (k as f64).max(1.0);
    let floor_correction = if k >= 2.0 {
        (1.0 - k.powf(-rho)).powf(-0.5)
    } else {
        // ⌊k^ρ⌋ ≥ k^ρ/2 for k ≥ 2 covers the K = 1 case crudely but safely.
        std::f64::consts::SQRT_2
    };
    floor_correction * k.powf(1.0 - rho / 2.0) / (rho / 2.0 - 1.0)
}

/// `Σ 1/√γ` over the elements, with a verdict for the family the generator describes.
pub fn sqrt_sum_diagnostic(set: &FrequencySet) -> SparsityReport {
    let mut partial = Vec::new();
    let mut acc = 0.0;
    let mut checkpoint = 1;
    for (i, g) in set.elements.iter().enumerate() {
        acc += 1.0 / g.sqrt();
        let k = i + 1;
        if k == checkpoint || k == set.len() {
            partial.push((k, acc));
            while checkpoint <= k {
                checkpoint *= 2;
            }
        }
    }

    let (tail_bound, verdict, argument) = match *set.generator() {
        Generator::Explicit => (Some(0.0), Verdict::Converges, Some(TailArgument::Finite)),
        Generator::Power { rho, count } => {
            if rho > 2.0 {
                (
                    Some(power_sqrt_tail(rho, count)),
                    Verdict::Converges,
                    Some(TailArgument::IntegralComparison { rho }),
                )
            } else {
                (
                    Some(f64::INFINITY),
                    Verdict::Diverges,
                    Some(TailArgument::HarmonicMinorant { rho }),
                )
            }
        }
        Generator::PrimeThinned { rho, count } => {
            if rho > 2.0 {
                (
                    Some(power_sqrt_tail(rho, count)),
                    Verdict::Converges,
                    Some(TailArgument::IntegralComparison { rho }),
                )
            } else {
                (
                    Some(f64::INFINITY),
                    Verdict::Diverges,
                    Some(TailArgument::Mertens { rho }),
                )
            }
        }
        Generator::GreedyThinned { rho, count, .. } if rho > 2.0 => (
            Some(power_sqrt_tail(rho, count)),
            Verdict::Converges,
            Some(TailArgument::IntegralComparison { rho }),
        ),
        Generator::GreedyThinned { .. } | Generator::Blocks { .. } => (None, Verdict::Undetermined, None),
    };

    SparsityReport {
        partial_sqrt_sums: partial,
        tail_bound,
        verdict,
        argument,
    }
}

/// `C √x / log x`.
pub fn counting_bound(c: f64, x: f64) -> f64 {
    c * x.sqrt() / x.ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CountingPoint {
    pub x: f64,
    pub count: usize,
    pub bound: f64,
    pub pass: bool,
    /// `false` when `x` lies beyond the generated part of the family, so the
    /// count may be incomplete.
    pub within_generated_range: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionBReport {
    pub c: f64,
    pub points: Vec<CountingPoint>,
    pub pass: bool,
}

/// Compares `#(Γ ∩ (0,x))` with `C √x / log x` on each grid point.
pub fn condition_b_check(set: &FrequencySet, c: f64, x_grid: &[f64]) -> Result<ConditionBReport> {
    if !(c > 0.0) {
        return Err(invalid("C", format!("must be positive, got {c}")));
    }
    if let Some(x) = x_grid.iter().find(|&&x| !(x > std::f64::consts::E)) {
        return Err(invalid("x_grid", format!("grid point {x} is not above e")));
    }
    let range = set.generated_range();
    let points: Vec<CountingPoint> = x_grid
        .iter()
        .map(|&x| {
            let count = set.count_below(x);
            let bound = counting_bound(c, x);
            CountingPoint {
                x,
                count,
                bound,
                pass: count as f64 <= bound,
                within_generated_range: x <= range,
            }
        })
        .collect();
    Ok(ConditionBReport {
        c,
        pass: points.iter().all(|p| p.pass),
        points,
    })
}

/// Checks the counting bound for every `x ∈ (e, upper]`, not just on a grid.
///
/// Between consecutive elements the count is constant and the bound
/// `C√x/log x` is unimodal with its minimum at `x = e²`, so each gap needs a
/// single evaluation.
pub fn condition_b_holds_everywhere(set: &FrequencySet, c: f64, upper: f64) -> bool {
    let e = std::f64::consts::E;
    let e2 = e * e;
    let els = set.elements();
    for (i, &g) in els.iter().enumerate() {
        let lo = g.max(e);
        let hi = els.get(i + 1).copied().unwrap_or(f64::INFINITY).min(upper);
        if lo >= hi {
            continue;
        }
        let x = e2.clamp(lo, hi);
        // On the open side x → lo⁺ the bound tends to its value at lo.
        if (i + 1) as f64 > counting_bound(c, x) {
            return false;
        }
    }
    true
}

#[derive(Debug, Clone, PartialEq)]
pub struct Thinning {
    pub set: FrequencySet,
    pub note: String,
}

/// Subset of a power set with `ρ ≤ 2` whose counting function obeys
/// `#(Γ₁ ∩ (0,x)) ≤ C√x/log x` on the generated range while `Σ 1/√γ` over
/// the thinned family still diverges.
///
/// Prime indices are tried first; if they violate the bound the subset is
/// built greedily and its verdict is left undetermined.
pub fn thin_to_condition_b(set: &FrequencySet, c: f64) -> Result<Thinning> {
    if !(c > 0.0) {
        return Err(invalid("C", format!("must be positive, got {c}")));
    }
    let Generator::Power { rho, count } = *set.generator() else {
        return Err(Error::Inapplicable(format!(
            "thinning needs a power generator, got {}",
            set.generator()
        )));
    };
    if rho > 2.0 {
        return Ok(Thinning {
            set: set.clone(),
            note: format!("rho={rho} > 2: sum of 1/sqrt(gamma) already converges, set unchanged"),
        });
    }
    let range = set.generated_range();
    let primes = gen_prime_power_set(rho, count)?;
    if condition_b_holds_everywhere(&primes, c, range) {
        return Ok(Thinning {
            set: primes,
            note: format!("kept prime indices; bound holds on (e, {range}]"),
        });
    }

    let e2 = std::f64::consts::E.powi(2);
    let mut kept = Vec::new();
    for &g in primes.elements() {
        if (kept.len() + 1) as f64 <= counting_bound(c, g.max(e2)) {
            kept.push(g);
        }
    }
    Ok(Thinning {
        set: FrequencySet {
            elements: kept,
            generator: Generator::GreedyThinned { rho, count, c },
            duplicates_removed: 0,
        },
        note: "prime indices violate the bound; kept a greedy subset of them".to_string(),
    })
}

/// Integers in `[1, n]` that are not elements of the set, increasing.
pub fn complement_in_range(set: &FrequencySet, n: u64) -> Vec<u64> {
    (1..=n).filter(|&k| !set.contains(k as f64)).collect()
}
