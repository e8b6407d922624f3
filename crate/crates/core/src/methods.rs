//! Ordinary, statistical, lacunary statistical (S_θ) and N_θ convergence,
//! evaluated at a finite horizon.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::config::{tail_start, AnalysisConfig};
use crate::density::{flags_verdict, ratio_ge, ratio_le, BlockEntry, Status, Verdict, MAX_WITNESSES};
use crate::error::{Error, Result};
use crate::sequence::Sequence;

/// Minimum materialized boundary ratio `k_r / k_{r-1} - 1`.
pub const DEFAULT_RATIO_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    #[serde(rename = "ordinary")]
    Ordinary,
    #[serde(rename = "stat")]
    Statistical,
    #[serde(rename = "stheta")]
    LacunaryStatistical,
    #[serde(rename = "ntheta")]
    NTheta,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Ordinary => "ordinary",
            Method::Statistical => "stat",
            Method::LacunaryStatistical => "stheta",
            Method::NTheta => "ntheta",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ordinary" => Ok(Method::Ordinary),
            "stat" | "statistical" => Ok(Method::Statistical),
            "stheta" | "lacunary" => Ok(Method::LacunaryStatistical),
            "ntheta" => Ok(Method::NTheta),
            other => Err(Error::Parse(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MethodVerdict {
    pub method: Method,
    pub limit_estimate: Option<f64>,
    pub verdict: Verdict,
}

/// Lacunary boundaries `0 = k_0 < k_1 < ... < k_R` defining the blocks
/// `I_r = (k_{r-1}, k_r]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LacunaryScheme {
    boundaries: Vec<u64>,
}

impl LacunaryScheme {
    pub fn new(boundaries: Vec<u64>) -> Result<Self> {
        Self::with_ratio_margin(boundaries, DEFAULT_RATIO_MARGIN)
    }

    /// Validates the boundaries, requiring `k_r / k_{r-1} >= 1 + margin` for
    /// every materialized `r >= 2`.
    pub fn with_ratio_margin(boundaries: Vec<u64>, margin: f64) -> Result<Self> {
        if boundaries.len() < 2 {
            return Err(Error::Scheme("need k_0 and at least one more boundary".into()));
        }
        if boundaries[0] != 0 {
            return Err(Error::Scheme("k_0 must be 0".into()));
        }
        if let Some(i) = boundaries.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Scheme(format!(
                "boundaries must increase strictly (k_{} = {} after {})",
                i + 1,
                boundaries[i + 1],
                boundaries[i]
            )));
        }
        for r in 2..boundaries.len() {
            let q = boundaries[r] as f64 / boundaries[r - 1] as f64;
            if q < 1.0 + margin {
                return Err(Error::Scheme(format!(
                    "ratio q_{r} = {q} is below 1 + {margin}"
                )));
            }
        }
        Ok(Self { boundaries })
    }

    pub fn boundaries(&self) -> &[u64] {
        &self.boundaries
    }

    /// Number of blocks `R`.
    pub fn block_count(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn last(&self) -> u64 {
        *self.boundaries.last().expect("validated non-empty")
    }

    /// `(r, first index, last index)` for each block `I_r`.
    pub fn blocks(&self) -> impl Iterator<Item = (u64, u64, u64)> + '_ {
        self.boundaries
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i as u64 + 1, w[0] + 1, w[1]))
    }

    pub fn block_lengths(&self) -> Vec<u64> {
        self.boundaries.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// `q_r = k_r / k_{r-1}` for `r >= 2`.
    pub fn ratios(&self) -> Vec<f64> {
        self.boundaries
            .windows(2)
            .skip(1)
            .map(|w| w[1] as f64 / w[0] as f64)
            .collect()
    }
}

/// Boundaries `[0, F_3, F_4, ..., F_{R+2}]` with `F_1 = F_2 = 1`.
pub fn fibonacci_scheme(r: usize) -> Result<LacunaryScheme> {
    if r < 2 {
        return Err(Error::Parameter("Fibonacci scheme needs R >= 2".into()));
    }
    let (mut prev, mut cur) = (1u64, 2u64); // F_2, F_3
    let mut boundaries = Vec::with_capacity(r + 1);
    boundaries.push(0);
    boundaries.push(cur);
    for _ in 1..r {
        let next = prev
            .checked_add(cur)
            .ok_or_else(|| Error::Range(format!("Fibonacci scheme with R = {r}")))?;
        prev = cur;
        cur = next;
        boundaries.push(cur);
    }
    LacunaryScheme::new(boundaries)
}

/// Smallest Fibonacci scheme whose last boundary reaches `horizon`.
pub fn fibonacci_scheme_covering(horizon: u64) -> Result<LacunaryScheme> {
    let mut r = 2;
    loop {
        let s = fibonacci_scheme(r)?;
        if s.last() >= horizon {
            return Ok(s);
        }
        r += 1;
    }
}

fn with_clip_note(mut v: Verdict, note: Option<String>) -> Verdict {
    if let Some(n) = note {
        v.append_note(&n);
    }
    v
}

/// Estimate `x_N`; satisfied when the tail window stays within tolerance of
/// it, violated when the tail oscillation reaches the fail threshold.
pub fn ordinary_limit(seq: &Sequence, config: &AnalysisConfig) -> Result<MethodVerdict> {
    config.validate()?;
    let (n, clip) = seq.clipped_horizon(config.horizon, 0)?;
    let values = seq.values_upto(n)?;
    let ell = values[n as usize - 1];
    let start = tail_start(n);
    let tail = &values[start as usize - 1..];
    let (mut lo, mut hi) = (0usize, 0usize);
    let mut dev = 0.0f64;
    for (i, &v) in tail.iter().enumerate() {
        dev = dev.max((v - ell).abs());
        if v < tail[lo] {
            lo = i;
        }
        if v > tail[hi] {
            hi = i;
        }
    }
    let osc = tail[hi] - tail[lo];
    let status = if config.sup_passes(dev) {
        Status::Satisfied
    } else if config.sup_fails(osc) {
        Status::Violated
    } else {
        Status::Inconclusive
    };
    let mut v = Verdict::new(status, n).with_note(format!(
        "tail [{start}, {n}]: max |x_k - x_N| = {dev:e}, oscillation {osc:e}"
    ));
    v.statistic = Some(dev);
    if status == Status::Violated {
        let mut w = vec![start + lo as u64, start + hi as u64];
        w.sort_unstable();
        v.witness_indices = w;
    }
    Ok(MethodVerdict {
        method: Method::Ordinary,
        limit_estimate: Some(ell),
        verdict: with_clip_note(v, clip),
    })
}

fn deviation_verdicts(values: &[f64], ell: f64, config: &AnalysisConfig) -> Verdict {
    let parts: Vec<Verdict> = config
        .epsilon_grid
        .iter()
        .map(|&eps| {
            let flags: Vec<bool> = values.iter().map(|x| (x - ell).abs() >= eps).collect();
            flags_verdict(format!("|x_k - {ell}| >= {eps}"), &flags, Some(eps), config)
        })
        .collect();
    Verdict::all_of(parts, format!("statistical convergence to {ell}"))
}

/// Density verdicts of `{k : |x_k - ell| >= eps}` over the epsilon grid.
pub fn statistical_limit_verdict(
    seq: &Sequence,
    ell: f64,
    config: &AnalysisConfig,
) -> Result<MethodVerdict> {
    config.validate()?;
    let (n, clip) = seq.clipped_horizon(config.horizon, 0)?;
    let values = seq.values_upto(n)?;
    Ok(MethodVerdict {
        method: Method::Statistical,
        limit_estimate: Some(ell),
        verdict: with_clip_note(deviation_verdicts(&values, ell, config), clip),
    })
}

/// Lower median of the tail window, an actual term of the sequence.
fn tail_median(values: &[f64]) -> f64 {
    let start = tail_start(values.len() as u64) as usize - 1;
    let mut tail = values[start..].to_vec();
    let mid = (tail.len() - 1) / 2;
    let (_, m, _) = tail.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

/// Candidate limit from the tail median, then the statistical verdict at it.
pub fn statistical_limit_estimate(seq: &Sequence, config: &AnalysisConfig) -> Result<MethodVerdict> {
    config.validate()?;
    let (n, clip) = seq.clipped_horizon(config.horizon, 0)?;
    let values = seq.values_upto(n)?;
    let ell = tail_median(&values);
    let mut verdict = deviation_verdicts(&values, ell, config);
    verdict.append_note(&format!("candidate limit is the tail median {ell}"));
    Ok(MethodVerdict {
        method: Method::Statistical,
        limit_estimate: Some(ell),
        verdict: with_clip_note(verdict, clip),
    })
}

fn complete_blocks(scheme: &LacunaryScheme, horizon: u64) -> Result<Vec<(u64, u64, u64)>> {
    if scheme.last() < horizon {
        return Err(Error::SchemeTooShort {
            last: scheme.last(),
            horizon,
        });
    }
    let blocks: Vec<_> = scheme.blocks().take_while(|&(_, _, end)| end <= horizon).collect();
    if blocks.is_empty() {
        return Err(Error::Config(format!(
            "no complete lacunary block fits in horizon {horizon}"
        )));
    }
    Ok(blocks)
}

/// Blocks judged for the satisfied rule: the final quarter (at least two).
fn tail_blocks(count: usize) -> usize {
    count.div_ceil(4).max(2).min(count)
}

/// Block rule: satisfied iff every block in the final quarter is within the
/// pass tolerance, violated iff the final block reaches the fail threshold.
fn block_status(
    blocks: &[BlockEntry],
    config: &AnalysisConfig,
    exact: impl Fn(&BlockEntry, f64) -> bool,
    exact_ge: impl Fn(&BlockEntry, f64) -> bool,
) -> Status {
    let tail = &blocks[blocks.len() - tail_blocks(blocks.len())..];
    let last = blocks.last().expect("non-empty blocks");
    if tail.iter().all(|b| exact(b, config.pass_tolerance)) {
        Status::Satisfied
    } else if exact_ge(last, config.fail_threshold) {
        Status::Violated
    } else {
        Status::Inconclusive
    }
}

fn block_witnesses(start: u64, end: u64, hit: impl Fn(u64) -> bool) -> Vec<u64> {
    let mut w: Vec<u64> = (start..=end).rev().filter(|&k| hit(k)).take(MAX_WITNESSES).collect();
    w.reverse();
    w
}

/// Block means `(1/h_r) Σ_{k in I_r} |x_k - ell|` over complete blocks.
pub fn ntheta_verdict(
    seq: &Sequence,
    scheme: &LacunaryScheme,
    ell: f64,
    config: &AnalysisConfig,
) -> Result<MethodVerdict> {
    config.validate()?;
    let (n, clip) = seq.clipped_horizon(config.horizon, 0)?;
    let blocks = complete_blocks(scheme, n)?;
    let last_end = blocks.last().map(|b| b.2).unwrap_or(n);
    let values = seq.values_upto(last_end)?;
    let dev = |k: u64| (values[k as usize - 1] - ell).abs();
    let entries: Vec<BlockEntry> = blocks
        .iter()
        .map(|&(r, start, end)| {
            let sum: f64 = (start..=end).map(dev).sum();
            BlockEntry {
                r,
                start,
                end,
                value: sum / (end - start + 1) as f64,
                count: None,
            }
        })
        .collect();
    let status = block_status(
        &entries,
        config,
        |b, t| b.value <= t,
        |b, t| b.value >= t,
    );
    let mut v = Verdict::new(status, n);
    let last = entries.last().expect("non-empty");
    v.statistic = Some(last.value);
    v.note = format!(
        "N_theta block means over {} complete blocks; final block mean {:e}",
        entries.len(),
        last.value
    );
    if status == Status::Violated {
        v.witness_indices = block_witnesses(last.start, last.end, |k| dev(k) > 0.0);
    }
    v.blocks = entries;
    Ok(MethodVerdict {
        method: Method::NTheta,
        limit_estimate: Some(ell),
        verdict: with_clip_note(v, clip),
    })
}

/// Block fractions `(1/h_r) |{k in I_r : |x_k - ell| >= eps}|` per epsilon.
pub fn lacunary_statistical_verdict(
    seq: &Sequence,
    scheme: &LacunaryScheme,
    ell: f64,
    config: &AnalysisConfig,
) -> Result<MethodVerdict> {
    config.validate()?;
    let (n, clip) = seq.clipped_horizon(config.horizon, 0)?;
    let blocks = complete_blocks(scheme, n)?;
    let last_end = blocks.last().map(|b| b.2).unwrap_or(n);
    let values = seq.values_upto(last_end)?;
    let parts = config
        .epsilon_grid
        .iter()
        .map(|&eps| {
            let hit = |k: u64| (values[k as usize - 1] - ell).abs() >= eps;
            let entries: Vec<BlockEntry> = blocks
                .iter()
                .map(|&(r, start, end)| {
                    let c = (start..=end).filter(|&k| hit(k)).count() as u64;
                    BlockEntry {
                        r,
                        start,
                        end,
                        value: c as f64 / (end - start + 1) as f64,
                        count: Some(c),
                    }
                })
                .collect();
            let len = |b: &BlockEntry| b.end - b.start + 1;
            let status = block_status(
                &entries,
                config,
                |b, t| ratio_le(b.count.unwrap_or(0), len(b), t),
                |b, t| ratio_ge(b.count.unwrap_or(0), len(b), t),
            );
            let last = entries.last().expect("non-empty");
            let mut v = Verdict::new(status, n).with_epsilon(eps);
            v.statistic = Some(last.value);
            v.note = format!(
                "S_theta block fractions of |x_k - {ell}| >= {eps}; final block {}/{}",
                last.count.unwrap_or(0),
                len(last)
            );
            if status == Status::Violated {
                v.witness_indices = block_witnesses(last.start, last.end, hit);
            }
            v.blocks = entries;
            v
        })
        .collect();
    let verdict = Verdict::all_of(parts, format!("lacunary statistical convergence to {ell}"));
    Ok(MethodVerdict {
        method: Method::LacunaryStatistical,
        limit_estimate: Some(ell),
        verdict: with_clip_note(verdict, clip),
    })
}

/// A method together with the data it needs.
#[derive(Debug, Clone, PartialEq)]
pub enum MethodSpec {
    Ordinary,
    Statistical,
    LacunaryStatistical(LacunaryScheme),
    NTheta(LacunaryScheme),
}

impl MethodSpec {
    pub fn method(&self) -> Method {
        match self {
            MethodSpec::Ordinary => Method::Ordinary,
            MethodSpec::Statistical => Method::Statistical,
            MethodSpec::LacunaryStatistical(_) => Method::LacunaryStatistical,
            MethodSpec::NTheta(_) => Method::NTheta,
        }
    }

    /// Verdict of this method at a given limit. The ordinary method ignores
    /// `ell` and uses its own estimate.
    pub fn verdict_at(&self, seq: &Sequence, ell: f64, config: &AnalysisConfig) -> Result<MethodVerdict> {
        match self {
            MethodSpec::Ordinary => ordinary_limit(seq, config),
            MethodSpec::Statistical => statistical_limit_verdict(seq, ell, config),
            MethodSpec::LacunaryStatistical(s) => lacunary_statistical_verdict(seq, s, ell, config),
            MethodSpec::NTheta(s) => ntheta_verdict(seq, s, ell, config),
        }
    }

    /// Verdict with the limit chosen by the method's own estimator where it
    /// has one (ordinary: `x_N`, statistical: tail median) or supplied.
    pub fn verdict(&self, seq: &Sequence, ell: Option<f64>, config: &AnalysisConfig) -> Result<MethodVerdict> {
        match (self, ell) {
            (MethodSpec::Ordinary, _) => ordinary_limit(seq, config),
            (MethodSpec::Statistical, None) => statistical_limit_estimate(seq, config),
            (_, Some(l)) => self.verdict_at(seq, l, config),
            (_, None) => {
                let l = ordinary_limit(seq, config)?
                    .limit_estimate
                    .expect("ordinary estimate");
                self.verdict_at(seq, l, config)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RegularityEntry {
    pub sequence: String,
    pub ordinary_limit: Option<f64>,
    pub verdict: Option<MethodVerdict>,
    pub passed: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RegularityReport {
    pub method: Method,
    pub entries: Vec<RegularityEntry>,
    pub failures: Vec<String>,
}

impl RegularityReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks that `method` is satisfied at the ordinary limit of every corpus
/// member; members whose ordinary limit is not satisfied are failures.
pub fn regularity_spotcheck(
    method: &MethodSpec,
    corpus: &[Sequence],
    config: &AnalysisConfig,
) -> Result<RegularityReport> {
    let mut entries = Vec::with_capacity(corpus.len());
    let mut failures = Vec::new();
    for seq in corpus {
        let ordinary = ordinary_limit(seq, config)?;
        if !ordinary.verdict.is_satisfied() {
            failures.push(seq.name().to_owned());
            entries.push(RegularityEntry {
                sequence: seq.name().to_owned(),
                ordinary_limit: None,
                verdict: None,
                passed: false,
                note: format!("ordinary limit not established: {}", ordinary.verdict.status),
            });
            continue;
        }
        let ell = ordinary.limit_estimate.expect("ordinary estimate");
        let mv = method.verdict_at(seq, ell, config)?;
        let passed = mv.verdict.is_satisfied();
        if !passed {
            failures.push(seq.name().to_owned());
        }
        entries.push(RegularityEntry {
            sequence: seq.name().to_owned(),
            ordinary_limit: Some(ell),
            note: format!("{} at {ell}: {}", method.method(), mv.verdict.status),
            verdict: Some(mv),
            passed,
        });
    }
    Ok(RegularityReport {
        method: method.method(),
        entries,
        failures,
    })
}
