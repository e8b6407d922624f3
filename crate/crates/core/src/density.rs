//! Natural-density counting and the three-valued verdicts that interpret
//! `lim (1/n) |{k <= n : P(k)}| = 0` at a finite horizon.
//!
//! Counts are integers and densities exact rationals; floating point only
//! enters through the predicates themselves.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::config::{tail_start, AnalysisConfig, FIRST_CHECKPOINT};

/// Maximum number of witness indices attached to a violated verdict.
pub const MAX_WITNESSES: usize = 10;

/// A deterministic test on positive indices.
pub struct IndexPredicate<'a> {
    test: Box<dyn Fn(u64) -> bool + 'a>,
    description: String,
}

impl<'a> IndexPredicate<'a> {
    pub fn new(description: impl Into<String>, test: impl Fn(u64) -> bool + 'a) -> Self {
        Self {
            test: Box::new(test),
            description: description.into(),
        }
    }

    /// Predicate over a 0-based slice of flags, index `k` reading `flags[k - 1]`.
    pub fn from_flags(description: impl Into<String>, flags: &'a [bool]) -> Self {
        Self::new(description, move |k| flags[(k - 1) as usize])
    }

    pub fn test(&self, k: u64) -> bool {
        (self.test)(k)
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

impl fmt::Debug for IndexPredicate<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexPredicate({})", self.description)
    }
}

pub fn count(pred: &IndexPredicate<'_>, n: u64) -> u64 {
    (1..=n).filter(|&k| pred.test(k)).count() as u64
}

/// `|{k <= n : test(k)}| / n`, exactly.
pub fn counting_density(pred: &IndexPredicate<'_>, n: u64) -> Ratio<u64> {
    assert!(n >= 1, "density needs n >= 1");
    Ratio::new(count(pred, n), n)
}

/// Count of satisfying indices up to `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Checkpoint {
    pub n: u64,
    pub count: u64,
}

impl Checkpoint {
    pub fn density(&self) -> Ratio<u64> {
        if self.n == 0 {
            Ratio::from_integer(0)
        } else {
            Ratio::new(self.count, self.n)
        }
    }
}

impl Serialize for Checkpoint {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Checkpoint", 3)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("count", &self.count)?;
        st.serialize_field("density", &format_ratio(self.density()))?;
        st.end()
    }
}

/// Exact rational rendered as `numerator/denominator` (reduced), or as an
/// integer when the denominator is 1.
pub fn format_ratio(r: Ratio<u64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DensityTrace {
    pub checkpoints: Vec<Checkpoint>,
    /// Count just before the tail window `[ceil(N/2), N]`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_base: Option<Checkpoint>,
}

impl DensityTrace {
    /// Counts the predicate once up to the last checkpoint, recording the
    /// running count at each checkpoint and just before the tail window.
    pub fn compute(pred: &IndexPredicate<'_>, checkpoints: &[u64]) -> Self {
        let Some(&last) = checkpoints.last() else {
            return Self::default();
        };
        let base_n = tail_start(last) - 1;
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut next = checkpoints.iter().peekable();
        let mut running = 0u64;
        let mut base = Checkpoint { n: 0, count: 0 };
        for k in 1..=last {
            if pred.test(k) {
                running += 1;
            }
            if k == base_n {
                base = Checkpoint { n: k, count: running };
            }
            while next.peek().is_some_and(|&&c| c == k) {
                out.push(Checkpoint { n: k, count: running });
                next.next();
            }
        }
        Self {
            checkpoints: out,
            tail_base: Some(base),
        }
    }

    pub fn last(&self) -> Option<Checkpoint> {
        self.checkpoints.last().copied()
    }

    pub fn final_density(&self) -> Ratio<u64> {
        self.last().map(|c| c.density()).unwrap_or_else(|| Ratio::from_integer(0))
    }

    pub fn counts(&self) -> Vec<u64> {
        self.checkpoints.iter().map(|c| c.count).collect()
    }

    /// Number of satisfying indices inside the tail window.
    pub fn tail_count(&self) -> Option<(u64, u64)> {
        let last = self.last()?;
        let base = self.tail_base?;
        Some((last.count - base.count, last.n - base.n))
    }
}

/// Geometric checkpoints (ratio 2 from 16, widened if that would exceed
/// `max_count`), always ending at `horizon`.
pub fn checkpoints(horizon: u64, max_count: usize) -> Vec<u64> {
    if horizon <= FIRST_CHECKPOINT || max_count <= 1 {
        return vec![horizon];
    }
    let octaves = (horizon as f64 / FIRST_CHECKPOINT as f64).log2();
    let natural = octaves.ceil() as usize + 1;
    let ratio = if natural <= max_count {
        2.0
    } else {
        (horizon as f64 / FIRST_CHECKPOINT as f64).powf(1.0 / (max_count - 1) as f64)
    };
    let mut out = Vec::new();
    let mut c = FIRST_CHECKPOINT as f64;
    while (c.round() as u64) < horizon {
        let v = c.round() as u64;
        if out.last().is_none_or(|&l| v > l) {
            out.push(v);
        }
        c *= ratio;
    }
    out.push(horizon);
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Satisfied,
    Violated,
    Inconclusive,
}

impl Status {
    pub fn is_decisive(self) -> bool {
        self != Status::Inconclusive
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Satisfied => "satisfied",
            Status::Violated => "violated",
            Status::Inconclusive => "inconclusive",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One block of a lacunary scheme with its mean or fraction.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BlockEntry {
    pub r: u64,
    pub start: u64,
    pub end: u64,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<u64>,
}

/// Finite-horizon answer to a limit-style predicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Verdict {
    pub status: Status,
    pub horizon: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    pub witness_indices: Vec<u64>,
    pub trace: DensityTrace,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub blocks: Vec<BlockEntry>,
    /// Sup-type statistic for verdicts that are not density based.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub statistic: Option<f64>,
    pub note: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub parts: Vec<Verdict>,
}

impl Verdict {
    pub fn new(status: Status, horizon: u64) -> Self {
        Self {
            status,
            horizon,
            epsilon: None,
            witness_indices: Vec::new(),
            trace: DensityTrace::default(),
            blocks: Vec::new(),
            statistic: None,
            note: String::new(),
            parts: Vec::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn with_epsilon(mut self, eps: f64) -> Self {
        self.epsilon = Some(eps);
        self
    }

    pub fn append_note(&mut self, extra: &str) {
        if self.note.is_empty() {
            self.note = extra.to_owned();
        } else {
            self.note = format!("{}; {extra}", self.note);
        }
    }

    pub fn is_satisfied(&self) -> bool {
        self.status == Status::Satisfied
    }

    pub fn is_violated(&self) -> bool {
        self.status == Status::Violated
    }

    pub fn final_density(&self) -> Ratio<u64> {
        self.trace.final_density()
    }

    /// Every leaf verdict, depth first.
    pub fn leaves(&self) -> Vec<&Verdict> {
        if self.parts.is_empty() {
            vec![self]
        } else {
            self.parts.iter().flat_map(|p| p.leaves()).collect()
        }
    }

    fn adopt(rep: &Verdict, status: Status, parts: Vec<Verdict>, note: String) -> Verdict {
        Verdict {
            status,
            horizon: rep.horizon,
            epsilon: rep.epsilon,
            witness_indices: rep.witness_indices.clone(),
            trace: rep.trace.clone(),
            blocks: rep.blocks.clone(),
            statistic: rep.statistic,
            note,
            parts,
        }
    }

    /// Conjunction: satisfied iff every part is satisfied, violated if any
    /// part is violated, inconclusive otherwise. The combined verdict mirrors
    /// the deciding part (first violated, else first inconclusive, else the
    /// part with the largest final density).
    pub fn all_of(parts: Vec<Verdict>, note: impl Into<String>) -> Verdict {
        assert!(!parts.is_empty(), "all_of needs at least one part");
        let status = if parts.iter().any(Verdict::is_violated) {
            Status::Violated
        } else if parts.iter().all(Verdict::is_satisfied) {
            Status::Satisfied
        } else {
            Status::Inconclusive
        };
        let rep = match status {
            Status::Satisfied => {
                let mut best = 0;
                for (i, p) in parts.iter().enumerate() {
                    if p.final_density() > parts[best].final_density() {
                        best = i;
                    }
                }
                best
            }
            s => parts.iter().position(|p| p.status == s).unwrap_or(0),
        };
        let rep = parts[rep].clone();
        Verdict::adopt(&rep, status, parts, note.into())
    }

    /// Disjunction: satisfied iff some part is satisfied, violated iff every
    /// part is violated, inconclusive otherwise.
    pub fn any_of(parts: Vec<Verdict>, note: impl Into<String>) -> Verdict {
        assert!(!parts.is_empty(), "any_of needs at least one part");
        let status = if parts.iter().any(Verdict::is_satisfied) {
            Status::Satisfied
        } else if parts.iter().all(Verdict::is_violated) {
            Status::Violated
        } else {
            Status::Inconclusive
        };
        let rep = match status {
            Status::Violated => 0,
            s => parts.iter().position(|p| p.status == s).unwrap_or(0),
        };
        let rep = parts[rep].clone();
        Verdict::adopt(&rep, status, parts, note.into())
    }
}

/// The rational a threshold was written as: the shortest decimal that
/// round-trips to `t` (so `0.2` means exactly 1/5, not the nearest double).
pub(crate) fn decimal_rational(t: f64) -> BigRational {
    let text = format!("{t:e}");
    let (mantissa, exp) = text.split_once('e').expect("`{:e}` always has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let negative = mantissa.starts_with('-');
    let digits_part = mantissa.trim_start_matches('-');
    let (int_part, frac_part) = digits_part.split_once('.').unwrap_or((digits_part, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().expect("decimal digits");
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if negative {
        r = -r;
    }
    r
}

/// Exact comparison `num/den <= t`.
pub(crate) fn ratio_le(num: u64, den: u64, t: f64) -> bool {
    BigRational::new(BigInt::from(num), BigInt::from(den)) <= decimal_rational(t)
}

/// Exact comparison `num/den >= t`.
pub(crate) fn ratio_ge(num: u64, den: u64, t: f64) -> bool {
    BigRational::new(BigInt::from(num), BigInt::from(den)) >= decimal_rational(t)
}

/// Applies the finite-horizon density rule to a computed trace.
///
/// * satisfied: no satisfying index inside the tail window `[ceil(N/2), N]`,
///   or both the final density and the density within the tail window are at
///   most the pass tolerance;
/// * violated: final density at least the fail threshold;
/// * inconclusive otherwise.
///
/// Both satisfied conditions are monotone in the index set: a predicate whose
/// satisfying set is contained in another's never gets a worse status.
pub fn decide(trace: &DensityTrace, config: &AnalysisConfig) -> Status {
    let Some(last) = trace.last() else {
        return Status::Inconclusive;
    };
    let (tail_count, tail_len) = trace.tail_count().unwrap_or((last.count, last.n));
    let frozen = tail_count == 0;
    let small = ratio_le(last.count, last.n, config.pass_tolerance)
        && (tail_len == 0 || ratio_le(tail_count, tail_len, config.pass_tolerance));
    if frozen || small {
        Status::Satisfied
    } else if ratio_ge(last.count, last.n, config.fail_threshold) {
        Status::Violated
    } else {
        Status::Inconclusive
    }
}

/// Up to [`MAX_WITNESSES`] satisfying indices, scanning back from `horizon`.
pub fn witnesses_near(pred: &IndexPredicate<'_>, horizon: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=horizon)
        .rev()
        .filter(|&k| pred.test(k))
        .take(MAX_WITNESSES)
        .collect();
    out.reverse();
    out
}

/// Density verdict for `pred` at the configured horizon.
pub fn density_limit_verdict(pred: &IndexPredicate<'_>, config: &AnalysisConfig) -> Verdict {
    let horizon = config.horizon;
    let trace = DensityTrace::compute(pred, &checkpoints(horizon, config.checkpoint_count));
    let status = decide(&trace, config);
    let mut v = Verdict::new(status, horizon);
    if status == Status::Violated {
        v.witness_indices = witnesses_near(pred, horizon);
    }
    let d = trace.final_density();
    v.note = format!("{}: final density {}", pred.description(), format_ratio(d));
    v.trace = trace;
    v
}

/// Density verdict over precomputed flags, with the horizon set to the
/// number of flags.
pub fn flags_verdict(
    description: impl Into<String>,
    flags: &[bool],
    epsilon: Option<f64>,
    config: &AnalysisConfig,
) -> Verdict {
    let cfg = AnalysisConfig {
        horizon: flags.len() as u64,
        ..config.clone()
    };
    let pred = IndexPredicate::from_flags(description, flags);
    let mut v = density_limit_verdict(&pred, &cfg);
    v.epsilon = epsilon;
    v
}
