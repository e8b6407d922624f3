//! Finite-horizon classifiers for the sequence classes built from
//! consecutive differences `Δx_k = x_k - x_{k+1}`.
//!
//! One-sided conditions count `Δx_k >= ε` (upward) and `x_{k+1} - x_k >= ε`
//! (downward); a tie at exactly `ε` counts against the sequence.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::config::{tail_start, AnalysisConfig};
use crate::density::{flags_verdict, Status, Verdict, MAX_WITNESSES};
use crate::error::{Error, Result};
use crate::methods::{ordinary_limit, statistical_limit_estimate};
use crate::sequence::Sequence;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum SequenceClass {
    Convergent,
    Cauchy,
    QuasiCauchy,
    StatConvergent,
    StatQuasiCauchy,
    UpHalfQuasiCauchy,
    DownHalfQuasiCauchy,
    /// The set written ΔS⁺.
    StatUpHalfQuasiCauchy,
    /// The set written ΔS⁻.
    StatDownHalfQuasiCauchy,
    HalfStatQuasiCauchy,
    UpHalfCauchy,
    DownHalfCauchy,
    SlowlyOscillating,
}

impl SequenceClass {
    pub const ALL: [SequenceClass; 13] = [
        SequenceClass::Convergent,
        SequenceClass::Cauchy,
        SequenceClass::QuasiCauchy,
        SequenceClass::StatConvergent,
        SequenceClass::StatQuasiCauchy,
        SequenceClass::UpHalfQuasiCauchy,
        SequenceClass::DownHalfQuasiCauchy,
        SequenceClass::StatUpHalfQuasiCauchy,
        SequenceClass::StatDownHalfQuasiCauchy,
        SequenceClass::HalfStatQuasiCauchy,
        SequenceClass::UpHalfCauchy,
        SequenceClass::DownHalfCauchy,
        SequenceClass::SlowlyOscillating,
    ];

    pub fn label(self) -> &'static str {
        match self {
            SequenceClass::Convergent => "convergent",
            SequenceClass::Cauchy => "cauchy",
            SequenceClass::QuasiCauchy => "quasiCauchy",
            SequenceClass::StatConvergent => "statConvergent",
            SequenceClass::StatQuasiCauchy => "statQuasiCauchy",
            SequenceClass::UpHalfQuasiCauchy => "upHalfQuasiCauchy",
            SequenceClass::DownHalfQuasiCauchy => "downHalfQuasiCauchy",
            SequenceClass::StatUpHalfQuasiCauchy => "statUpHalfQuasiCauchy",
            SequenceClass::StatDownHalfQuasiCauchy => "statDownHalfQuasiCauchy",
            SequenceClass::HalfStatQuasiCauchy => "halfStatQuasiCauchy",
            SequenceClass::UpHalfCauchy => "upHalfCauchy",
            SequenceClass::DownHalfCauchy => "downHalfCauchy",
            SequenceClass::SlowlyOscillating => "slowlyOscillating",
        }
    }
}

impl fmt::Display for SequenceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SequenceClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SequenceClass::ALL
            .iter()
            .copied()
            .find(|c| c.label().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown sequence class `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassEntry {
    pub class: SequenceClass,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ClassReport {
    pub sequence_name: String,
    pub entries: Vec<ClassEntry>,
    pub config: AnalysisConfig,
}

impl ClassReport {
    pub fn get(&self, class: SequenceClass) -> Option<&Verdict> {
        self.entries.iter().find(|e| e.class == class).map(|e| &e.verdict)
    }

    pub fn status(&self, class: SequenceClass) -> Option<Status> {
        self.get(class).map(|v| v.status)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Up,
    Down,
    Both,
}

impl Side {
    fn hits(self, a: f64, b: f64, eps: f64) -> bool {
        match self {
            Side::Up => a - b >= eps,
            Side::Down => b - a >= eps,
            Side::Both => (a - b).abs() >= eps,
        }
    }

    fn describe(self, eps: f64) -> String {
        match self {
            Side::Up => format!("x_k - x_(k+1) >= {eps}"),
            Side::Down => format!("x_(k+1) - x_k >= {eps}"),
            Side::Both => format!("|x_k - x_(k+1)| >= {eps}"),
        }
    }
}

/// `x_1..=x_{N+1}` with the horizon clipped for finite sequences.
fn with_lookahead(seq: &Sequence, config: &AnalysisConfig) -> Result<(u64, Vec<f64>, Option<String>)> {
    config.validate()?;
    let (n, clip) = seq.clipped_horizon(config.horizon, 1)?;
    Ok((n, seq.values_upto(n + 1)?, clip))
}

fn finish(mut v: Verdict, clip: Option<String>) -> Verdict {
    if let Some(c) = clip {
        v.append_note(&c);
    }
    v
}

fn difference_verdict(values: &[f64], side: Side, config: &AnalysisConfig, what: &str) -> Verdict {
    let parts = config
        .epsilon_grid
        .iter()
        .map(|&eps| {
            let flags: Vec<bool> = values.windows(2).map(|w| side.hits(w[0], w[1], eps)).collect();
            flags_verdict(side.describe(eps), &flags, Some(eps), config)
        })
        .collect();
    Verdict::all_of(parts, what)
}

/// Density of `{k : x_k - x_{k+1} >= ε}` for every ε of the grid.
pub fn stat_upward_hqc_verdict(seq: &Sequence, config: &AnalysisConfig) -> Result<Verdict> {
    let (_, values, clip) = with_lookahead(seq, config)?;
    Ok(finish(
        difference_verdict(&values, Side::Up, config, "statistically upward half quasi-Cauchy"),
        clip,
    ))
}

/// Density of `{k : x_{k+1} - x_k >= ε}` for every ε of the grid.
pub fn stat_downward_hqc_verdict(seq: &Sequence, config: &AnalysisConfig) -> Result<Verdict> {
    let (_, values, clip) = with_lookahead(seq, config)?;
    Ok(finish(
        difference_verdict(&values, Side::Down, config, "statistically downward half quasi-Cauchy"),
        clip,
    ))
}

/// Density of `{k : |Δx_k| >= ε}` for every ε of the grid.
pub fn stat_qc_verdict(seq: &Sequence, config: &AnalysisConfig) -> Result<Verdict> {
    let (_, values, clip) = with_lookahead(seq, config)?;
    Ok(finish(
        difference_verdict(&values, Side::Both, config, "statistically quasi-Cauchy"),
        clip,
    ))
}

/// Satisfied iff either one-sided verdict is; violated iff both are.
pub fn half_stat_qc_verdict(seq: &Sequence, config: &AnalysisConfig) -> Result<Verdict> {
    let (_, values, clip) = with_lookahead(seq, config)?;
    let up = difference_verdict(&values, Side::Up, config, "statistically upward half quasi-Cauchy");
    let down = difference_verdict(&values, Side::Down, config, "statistically downward half quasi-Cauchy");
    Ok(finish(
        Verdict::any_of(vec![up, down], "half statistically quasi-Cauchy"),
        clip,
    ))
}

fn last_witnesses(indices: impl DoubleEndedIterator<Item = u64>) -> Vec<u64> {
    let mut w: Vec<u64> = indices.rev().take(MAX_WITNESSES).collect();
    w.reverse();
    w
}

/// Sup of a signed difference over the tail window `k in [ceil(N/2), N]`.
fn tail_difference_verdict(
    n: u64,
    values: &[f64],
    side: Side,
    config: &AnalysisConfig,
    what: &str,
) -> Verdict {
    let start = tail_start(n);
    let diff = |k: u64| {
        let (a, b) = (values[k as usize - 1], values[k as usize]);
        match side {
            Side::Up => a - b,
            Side::Down => b - a,
            Side::Both => (a - b).abs(),
        }
    };
    let stat = (start..=n).map(diff).fold(0.0f64, f64::max);
    let status = if config.sup_passes(stat) {
        Status::Satisfied
    } else if config.sup_fails(stat) {
        Status::Violated
    } else {
        Status::Inconclusive
    };
    let mut v = Verdict::new(status, n).with_note(format!(
        "{what}: tail [{start}, {n}] max difference {stat:e}"
    ));
    v.statistic = Some(stat);
    if status == Status::Violated {
        v.witness_indices =
            last_witnesses((start..=n).filter(|&k| diff(k) >= config.fail_threshold));
    }
    v
}

/// `Δx_k -> 0`, judged on the tail window.
pub fn quasi_cauchy_verdict(seq: &Sequence, config: &AnalysisConfig) -> Result<Verdict> {
    let (n, values, clip) = with_lookahead(seq, config)?;
    Ok(finish(
        tail_difference_verdict(n, &values, Side::Both, config, "quasi-Cauchy"),
        clip,
    ))
}

/// Eventually `x_n - x_{n+1} < ε`, judged on the tail window.
pub fn up_half_quasi_cauchy_verdict(seq: &Sequence, config: &AnalysisConfig) -> Result<Verdict> {
    let (n, values, clip) = with_lookahead(seq, config)?;
    Ok(finish(
        tail_difference_verdict(n, &values, Side::Up, config, "upward half quasi-Cauchy"),
        clip,
    ))
}

/// Eventually `x_{n+1} - x_n < ε`, judged on the tail window.
pub fn down_half_quasi_cauchy_verdict(seq: &Sequence, config: &AnalysisConfig) -> Result<Verdict> {
    let (n, values, clip) = with_lookahead(seq, config)?;
    Ok(finish(
        tail_difference_verdict(n, &values, Side::Down, config, "downward half quasi-Cauchy"),
        clip,
    ))
}

/// `max_{n <= m} (x_n - x_m)` over the tail window `[ceil(N/2), N+1]`,
/// computed with a running minimum from the end. `Down` measures
/// `x_m - x_n` instead.
fn half_cauchy(n: u64, values: &[f64], side: Side, config: &AnalysisConfig) -> Verdict {
    let start = tail_start(n) as usize - 1;
    let window = &values[start..];
    let sign = if side == Side::Up { 1.0 } else { -1.0 };
    let mut best = (0.0f64, start, start);
    let mut extreme = (sign * window[window.len() - 1], window.len() - 1);
    for i in (0..window.len()).rev() {
        let v = sign * window[i];
        if v < extreme.0 {
            extreme = (v, i);
        }
        let gap = v - extreme.0;
        if gap > best.0 {
            best = (gap, start + i, start + extreme.1);
        }
    }
    let stat = best.0;
    let status = if config.sup_passes(stat) {
        Status::Satisfied
    } else if config.sup_fails(stat) {
        Status::Violated
    } else {
        Status::Inconclusive
    };
    let what = if side == Side::Up {
        "upward half Cauchy: max x_n - x_m"
    } else {
        "downward half Cauchy: max x_m - x_n"
    };
    let mut v = Verdict::new(status, n).with_note(format!(
        "{what} over m >= n in [{}, {}] is {stat:e}",
        start + 1,
        n + 1
    ));
    v.statistic = Some(stat);
    if status == Status::Violated {
        v.witness_indices = vec![best.1 as u64 + 1, best.2 as u64 + 1];
    }
    v
}

pub fn up_half_cauchy_verdict(seq: &Sequence, config: &AnalysisConfig) -> Result<Verdict> {
    let (n, values, clip) = with_lookahead(seq, config)?;
    Ok(finish(half_cauchy(n, &values, Side::Up, config), clip))
}

pub fn down_half_cauchy_verdict(seq: &Sequence, config: &AnalysisConfig) -> Result<Verdict> {
    let (n, values, clip) = with_lookahead(seq, config)?;
    Ok(finish(half_cauchy(n, &values, Side::Down, config), clip))
}

/// Oscillation `max - min` over the tail window `[ceil(N/2), N]`.
pub fn cauchy_verdict(seq: &Sequence, config: &AnalysisConfig) -> Result<Verdict> {
    config.validate()?;
    let (n, clip) = seq.clipped_horizon(config.horizon, 0)?;
    let values = seq.values_upto(n)?;
    let start = tail_start(n) as usize - 1;
    let tail = &values[start..];
    let (mut lo, mut hi) = (0, 0);
    for (i, v) in tail.iter().enumerate() {
        if *v < tail[lo] {
            lo = i;
        }
        if *v > tail[hi] {
            hi = i;
        }
    }
    let osc = tail[hi] - tail[lo];
    let status = if config.sup_passes(osc) {
        Status::Satisfied
    } else if config.sup_fails(osc) {
        Status::Violated
    } else {
        Status::Inconclusive
    };
    let mut v = Verdict::new(status, n).with_note(format!(
        "Cauchy: tail [{}, {n}] oscillation {osc:e}",
        start + 1
    ));
    v.statistic = Some(osc);
    if status == Status::Violated {
        let mut w = vec![(start + lo) as u64 + 1, (start + hi) as u64 + 1];
        w.sort_unstable();
        v.witness_indices = w;
    }
    Ok(finish(v, clip))
}

/// `sup_{n in range} max_{n < k <= [λn]} |x_k - x_n|`, with windows clipped to
/// the available terms. Returns the sup and the `(n, k)` attaining it.
fn window_sup(values: &[f64], lambda: f64, from: u64, to: u64) -> (f64, u64, u64) {
    let avail = values.len() as u64;
    let mut maxq: VecDeque<u64> = VecDeque::new();
    let mut minq: VecDeque<u64> = VecDeque::new();
    let mut pushed = from; // next index to push is pushed + 1
    let mut best = (0.0f64, from, from);
    let x = |k: u64| values[k as usize - 1];
    for n in from..=to {
        let hi = ((lambda * n as f64).floor() as u64).min(avail);
        while pushed < hi {
            pushed += 1;
            let v = x(pushed);
            while maxq.back().is_some_and(|&b| x(b) <= v) {
                maxq.pop_back();
            }
            maxq.push_back(pushed);
            while minq.back().is_some_and(|&b| x(b) >= v) {
                minq.pop_back();
            }
            minq.push_back(pushed);
        }
        while maxq.front().is_some_and(|&f| f <= n) {
            maxq.pop_front();
        }
        while minq.front().is_some_and(|&f| f <= n) {
            minq.pop_front();
        }
        let xn = x(n);
        if let Some(&k) = maxq.front() {
            if x(k) - xn > best.0 {
                best = (x(k) - xn, n, k);
            }
        }
        if let Some(&k) = minq.front() {
            if xn - x(k) > best.0 {
                best = (xn - x(k), n, k);
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct OscillationProfile {
    pub lambda: f64,
    /// Window sup over the tail `[ceil(N/2), N]`.
    pub tail_sup: f64,
    /// Window sup over `[ceil(N/4), ceil(N/2))`, used to detect growth in `n`.
    pub early_sup: f64,
}

/// Slow oscillation from the window sups `g(λ)` over the λ grid.
///
/// The outer limit `λ -> 1+` is estimated by extending the line through the
/// two smallest grid points (in `ln λ`) to `λ = 1`. Satisfied iff that
/// estimate is within the pass tolerance and `g(λ_min)` is not growing with
/// `n`; violated iff the estimate reaches the fail threshold or `g(λ_min)`
/// both grows and reaches it.
pub fn slowly_oscillating_verdict(
    seq: &Sequence,
    lambda_grid: &[f64],
    config: &AnalysisConfig,
) -> Result<Verdict> {
    config.validate()?;
    if lambda_grid.is_empty() {
        return Err(Error::Config("lambda grid is empty".into()));
    }
    if lambda_grid.iter().any(|l| !(*l > 1.0 && *l <= 2.0)) || lambda_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(
            "lambda grid must be strictly descending within (1, 2]".into(),
        ));
    }
    let (n, mut clip) = seq.clipped_horizon(config.horizon, 0)?;
    let wanted = (lambda_grid[0] * n as f64).floor() as u64;
    let avail = match seq.len() {
        Some(len) if len < wanted => {
            let c = format!("windows clipped at index {len}");
            clip = Some(match clip {
                Some(prev) => format!("{prev}; {c}"),
                None => c,
            });
            len
        }
        _ => wanted,
    };
    let values = seq.values_upto(avail.max(n))?;
    let start = tail_start(n);
    let early_start = n.div_ceil(4).max(1);
    let profile: Vec<(OscillationProfile, (u64, u64))> = lambda_grid
        .iter()
        .map(|&lambda| {
            let (tail_sup, wn, wk) = window_sup(&values, lambda, start, n);
            let early_sup = if early_start < start {
                window_sup(&values, lambda, early_start, start - 1).0
            } else {
                tail_sup
            };
            (
                OscillationProfile {
                    lambda,
                    tail_sup,
                    early_sup,
                },
                (wn, wk),
            )
        })
        .collect();
    let (last, witness) = profile.last().cloned().expect("non-empty grid");
    let estimate = if profile.len() >= 2 {
        let prev = &profile[profile.len() - 2].0;
        let (l1, l2) = (prev.lambda.ln(), last.lambda.ln());
        last.tail_sup - (prev.tail_sup - last.tail_sup) * l2 / (l1 - l2)
    } else {
        last.tail_sup
    }
    .max(0.0);
    let growing = last.tail_sup > 1.5 * last.early_sup + config.pass_tolerance;
    let status = if !growing && estimate <= config.pass_tolerance {
        Status::Satisfied
    } else if estimate >= config.fail_threshold
        || (growing && last.tail_sup >= config.fail_threshold)
    {
        Status::Violated
    } else {
        Status::Inconclusive
    };
    let sups: Vec<String> = profile
        .iter()
        .map(|(p, _)| format!("g({})={:.4e}", p.lambda, p.tail_sup))
        .collect();
    let mut v = Verdict::new(status, n).with_note(format!(
        "slowly oscillating: {}; limit estimate {estimate:.4e}{}",
        sups.join(", "),
        if growing { "; window sup grows with n" } else { "" }
    ));
    v.statistic = Some(estimate);
    if status == Status::Violated {
        v.witness_indices = vec![witness.0, witness.1];
    }
    Ok(finish(v, clip))
}

/// Materializes enough terms once so that every classifier reads from memory.
fn prefetched(seq: &Sequence, config: &AnalysisConfig) -> Result<Sequence> {
    if seq.is_finite() {
        return Ok(seq.clone());
    }
    let lambda_max = config.lambda_grid.first().copied().unwrap_or(1.0);
    let need = ((lambda_max * config.horizon as f64).floor() as u64).max(config.horizon + 1);
    Ok(Sequence::from_values(seq.name(), seq.values_upto(need)?))
}

/// Verdict for a single class label.
pub fn class_verdict(seq: &Sequence, class: SequenceClass, config: &AnalysisConfig) -> Result<Verdict> {
    match class {
        SequenceClass::Convergent => {
            let mv = ordinary_limit(seq, config)?;
            let mut v = mv.verdict;
            if let Some(l) = mv.limit_estimate {
                v.append_note(&format!("limit estimate {l}"));
            }
            Ok(v)
        }
        SequenceClass::Cauchy => cauchy_verdict(seq, config),
        SequenceClass::QuasiCauchy => quasi_cauchy_verdict(seq, config),
        SequenceClass::StatConvergent => Ok(statistical_limit_estimate(seq, config)?.verdict),
        SequenceClass::StatQuasiCauchy => stat_qc_verdict(seq, config),
        SequenceClass::UpHalfQuasiCauchy => up_half_quasi_cauchy_verdict(seq, config),
        SequenceClass::DownHalfQuasiCauchy => down_half_quasi_cauchy_verdict(seq, config),
        SequenceClass::StatUpHalfQuasiCauchy => stat_upward_hqc_verdict(seq, config),
        SequenceClass::StatDownHalfQuasiCauchy => stat_downward_hqc_verdict(seq, config),
        SequenceClass::HalfStatQuasiCauchy => half_stat_qc_verdict(seq, config),
        SequenceClass::UpHalfCauchy => up_half_cauchy_verdict(seq, config),
        SequenceClass::DownHalfCauchy => down_half_cauchy_verdict(seq, config),
        SequenceClass::SlowlyOscillating => slowly_oscillating_verdict(seq, &config.lambda_grid, config),
    }
}

/// One verdict per requested label, in the order given.
pub fn classify(seq: &Sequence, labels: &[SequenceClass], config: &AnalysisConfig) -> Result<ClassReport> {
    if labels.is_empty() {
        return Err(Error::Config("no classes requested".into()));
    }
    config.validate()?;
    let data = prefetched(seq, config)?;
    let entries = labels
        .iter()
        .map(|&class| {
            Ok(ClassEntry {
                class,
                verdict: class_verdict(&data, class, config)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ClassReport {
        sequence_name: seq.name().to_owned(),
        entries,
        config: config.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;

    fn alternating() -> Sequence {
        Sequence::from_fn("alt", |n| if n % 2 == 0 { 1.0 } else { -1.0 })
    }

    fn cfg(n: u64) -> AnalysisConfig {
        AnalysisConfig::with_horizon(n)
    }

    #[test]
    fn class_labels_round_trip() {
        for c in SequenceClass::ALL {
            assert_eq!(c.label().parse::<SequenceClass>().unwrap(), c);
            assert_eq!(serde_json::to_value(c).unwrap(), c.label());
        }
        assert!("nope".parse::<SequenceClass>().is_err());
    }

    #[test]
    fn upward_examples() {
        let c = cfg(10_000);
        let v = stat_upward_hqc_verdict(&Sequence::identity(), &c).unwrap();
        assert_eq!(v.status, Status::Satisfied);
        assert!(v.leaves().iter().all(|p| p.trace.last().unwrap().count == 0));

        let v = stat_upward_hqc_verdict(&Sequence::identity().reflect(), &c).unwrap();
        assert_eq!(v.status, Status::Violated);
        assert_eq!(v.epsilon, Some(1.0));
        assert_eq!(v.final_density(), Ratio::from_integer(1));

        let v = stat_upward_hqc_verdict(&alternating(), &c).unwrap();
        assert_eq!(v.status, Status::Violated);
        assert_eq!(v.epsilon, Some(1.0));
        assert_eq!(v.final_density(), Ratio::new(1, 2));
        assert!(v.witness_indices.iter().all(|k| k % 2 == 0));
    }

    #[test]
    fn downward_examples() {
        let c = cfg(10_000);
        let v = stat_downward_hqc_verdict(&Sequence::identity(), &c).unwrap();
        assert_eq!(v.status, Status::Violated);
        assert_eq!(v.final_density(), Ratio::from_integer(1));
        assert_eq!(
            stat_downward_hqc_verdict(&Sequence::identity().reflect(), &c).unwrap().status,
            Status::Satisfied
        );
        let ones = Sequence::from_fn("sq01", |n| {
            let r = (n as f64).sqrt().round() as u64;
            f64::from(u8::from(r * r == n))
        });
        let v = stat_downward_hqc_verdict(&ones, &c).unwrap();
        assert_eq!(v.status, Status::Satisfied);
        for leaf in v.leaves() {
            // Upward jumps happen only just before a square: at most floor(sqrt(n)).
            for cp in &leaf.trace.checkpoints {
                assert!(cp.count <= (cp.n as f64).sqrt().floor() as u64 + 1);
            }
        }
    }

    #[test]
    fn half_stat_examples() {
        let c = cfg(10_000);
        assert_eq!(half_stat_qc_verdict(&Sequence::identity(), &c).unwrap().status, Status::Satisfied);
        let v = half_stat_qc_verdict(&alternating(), &c).unwrap();
        assert_eq!(v.status, Status::Violated);
        assert!(!v.witness_indices.is_empty());
        assert_eq!(half_stat_qc_verdict(&Sequence::constant(2.0), &c).unwrap().status, Status::Satisfied);
    }

    #[test]
    fn stat_qc_examples() {
        let c = cfg(100_000);
        let sqrt = Sequence::from_fn("sqrt", |n| (n as f64).sqrt());
        assert_eq!(stat_qc_verdict(&sqrt, &c).unwrap().status, Status::Satisfied);
        let sub = sqrt.subsequence(&crate::IndexMap::squares()).unwrap();
        let v = stat_qc_verdict(&sub, &c).unwrap();
        assert_eq!(v.status, Status::Violated);
        assert_eq!(v.epsilon, Some(1.0));
        assert_eq!(stat_qc_verdict(&alternating(), &c).unwrap().status, Status::Violated);
    }

    #[test]
    fn quasi_cauchy_examples() {
        let c = cfg(10_000);
        let sqrt = Sequence::from_fn("sqrt", |n| (n as f64).sqrt());
        let v = quasi_cauchy_verdict(&sqrt, &c).unwrap();
        assert_eq!(v.status, Status::Satisfied);
        // Algebraic bound: |Δ| <= 1 / (2 sqrt(N/2)) on the tail.
        assert!(v.statistic.unwrap() <= 1.0 / (2.0 * 5000f64.sqrt()));
        assert_eq!(quasi_cauchy_verdict(&Sequence::identity(), &c).unwrap().status, Status::Violated);
        let mut acc = 0.0;
        let mut k = 0u64;
        let harmonic = Sequence::from_recurrence("H", move || {
            k += 1;
            acc += 1.0 / k as f64;
            acc
        });
        let v = quasi_cauchy_verdict(&harmonic, &c).unwrap();
        assert_eq!(v.status, Status::Satisfied);
        assert!((v.statistic.unwrap() - 1.0 / 5001.0).abs() < 1e-12);
    }

    #[test]
    fn half_cauchy_examples() {
        let c = cfg(10_000);
        assert_eq!(up_half_cauchy_verdict(&Sequence::identity(), &c).unwrap().status, Status::Satisfied);
        assert_eq!(
            up_half_cauchy_verdict(&Sequence::identity().reflect(), &c).unwrap().status,
            Status::Violated
        );
        let v = up_half_cauchy_verdict(&alternating(), &c).unwrap();
        assert_eq!(v.status, Status::Violated);
        assert_eq!(v.statistic, Some(2.0));
        assert_eq!(down_half_cauchy_verdict(&Sequence::identity(), &c).unwrap().status, Status::Violated);
        assert_eq!(
            down_half_cauchy_verdict(&Sequence::identity().reflect(), &c).unwrap().status,
            Status::Satisfied
        );
    }

    #[test]
    fn slowly_oscillating_examples() {
        let c = cfg(100_000);
        let grid = c.lambda_grid.clone();
        let mut acc = 0.0;
        let mut k = 0u64;
        let harmonic = Sequence::from_recurrence("H", move || {
            k += 1;
            acc += 1.0 / k as f64;
            acc
        });
        let v = slowly_oscillating_verdict(&harmonic, &grid, &c).unwrap();
        assert_eq!(v.status, Status::Satisfied, "{}", v.note);
        let cos = Sequence::from_fn("cos6log", |n| (6.0 * ((n + 1) as f64).ln()).cos());
        let v = slowly_oscillating_verdict(&cos, &grid, &c).unwrap();
        assert_eq!(v.status, Status::Satisfied, "{}", v.note);
        let v = slowly_oscillating_verdict(&Sequence::identity(), &grid, &c).unwrap();
        assert_eq!(v.status, Status::Violated, "{}", v.note);
        let v = slowly_oscillating_verdict(&alternating(), &grid, &c).unwrap();
        assert_eq!(v.status, Status::Violated, "{}", v.note);
    }

    #[test]
    fn window_sup_brute_force() {
        let values: Vec<f64> = (1..=300u64).map(|n| ((n * 7919) % 101) as f64 / 10.0).collect();
        for &lambda in &[2.0, 1.5, 1.1] {
            let (fast, _, _) = window_sup(&values, lambda, 20, 150);
            let mut slow = 0.0f64;
            for n in 20..=150u64 {
                let hi = ((lambda * n as f64).floor() as u64).min(300);
                for k in n + 1..=hi {
                    slow = slow.max((values[k as usize - 1] - values[n as usize - 1]).abs());
                }
            }
            assert_eq!(fast, slow);
        }
    }

    #[test]
    fn classify_constant_all_satisfied() {
        let rep = classify(&Sequence::constant(3.0), &SequenceClass::ALL, &cfg(20_000)).unwrap();
        for e in &rep.entries {
            assert_eq!(e.verdict.status, Status::Satisfied, "{}", e.class);
        }
    }

    #[test]
    fn classify_identity() {
        let rep = classify(&Sequence::identity(), &SequenceClass::ALL, &cfg(20_000)).unwrap();
        let satisfied: Vec<SequenceClass> = rep
            .entries
            .iter()
            .filter(|e| e.verdict.is_satisfied())
            .map(|e| e.class)
            .collect();
        assert_eq!(
            satisfied,
            vec![
                SequenceClass::UpHalfQuasiCauchy,
                SequenceClass::StatUpHalfQuasiCauchy,
                SequenceClass::HalfStatQuasiCauchy,
                SequenceClass::UpHalfCauchy,
            ]
        );
    }

    #[test]
    fn classify_cos_pi_sqrt() {
        let s = Sequence::from_fn("cos(pi sqrt n)", |n| (std::f64::consts::PI * (n as f64).sqrt()).cos());
        let rep = classify(
            &s,
            &[SequenceClass::StatQuasiCauchy, SequenceClass::Cauchy],
            &AnalysisConfig::default(),
        )
        .unwrap();
        assert_eq!(rep.status(SequenceClass::StatQuasiCauchy), Some(Status::Satisfied));
        assert_eq!(rep.status(SequenceClass::Cauchy), Some(Status::Violated));
    }

    #[test]
    fn finite_sequence_is_clipped() {
        let s = Sequence::from_values("v", vec![1.0, -1.0, 1.0, -1.0, 1.0, -1.0]);
        let v = half_stat_qc_verdict(&s, &cfg(1000)).unwrap();
        assert_eq!(v.horizon, 5);
        assert!(v.note.contains("clipped"));
        assert_eq!(v.status, Status::Violated);
    }

    #[test]
    fn classify_requires_labels() {
        assert!(classify(&Sequence::identity(), &[], &cfg(10)).is_err());
    }
}
