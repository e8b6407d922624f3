//! Compactness probes. A set is statistically upward (downward) compact
//! exactly when it is bounded below (above); the witnesses below are the
//! sequences that break compactness for unbounded sets, and the extractor
//! produces the subsequence that compactness promises.

use serde::Serialize;

use crate::classify::stat_upward_hqc_verdict;
use crate::config::AnalysisConfig;
use crate::density::Verdict;
use crate::error::{Error, Result};
use crate::sequence::{IndexMap, Prefix, Sequence};
use crate::set::RealSet;

/// Canonical gap between consecutive witness terms.
pub const WITNESS_STEP: f64 = 2.0;
/// Bisection stops splitting once a half would keep fewer indices.
const MIN_BISECTION_INDICES: usize = 16;

pub fn stat_upward_compact(set: &RealSet) -> Result<bool> {
    set.bounded_below()
}

pub fn stat_downward_compact(set: &RealSet) -> Result<bool> {
    set.bounded_above()
}

pub fn bounded(set: &RealSet) -> Result<bool> {
    Ok(stat_upward_compact(set)? && stat_downward_compact(set)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CompactnessReport {
    pub set: String,
    pub bounded_below: bool,
    pub bounded_above: bool,
    pub stat_upward_compact: bool,
    pub stat_downward_compact: bool,
    pub bounded: bool,
}

pub fn probe(set: &RealSet) -> Result<CompactnessReport> {
    let below = set.bounded_below()?;
    let above = set.bounded_above()?;
    Ok(CompactnessReport {
        set: set.to_string(),
        bounded_below: below,
        bounded_above: above,
        stat_upward_compact: stat_upward_compact(set)?,
        stat_downward_compact: stat_downward_compact(set)?,
        bounded: bounded(set)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Descending,
    Ascending,
}

fn next_witness(set: &RealSet, x: f64, dir: Direction) -> Result<f64> {
    let next = match dir {
        Direction::Descending => set.largest_at_most(x - WITNESS_STEP),
        Direction::Ascending => set.smallest_at_least(x + WITNESS_STEP),
    };
    next.filter(|v| v.is_finite()).ok_or_else(|| {
        Error::NoWitness(format!("no member of {set} at distance {WITNESS_STEP} beyond {x}"))
    })
}

fn check_unbounded(set: &RealSet, dir: Direction) -> Result<()> {
    let bounded = match dir {
        Direction::Descending => set.bounded_below()?,
        Direction::Ascending => set.bounded_above()?,
    };
    if bounded {
        return Err(Error::NoWitness(format!(
            "{set} is bounded {}, so every sequence in it has a {} half quasi-Cauchy subsequence",
            if dir == Direction::Descending { "below" } else { "above" },
            if dir == Direction::Descending {
                "statistically upward"
            } else {
                "statistically downward"
            },
        )));
    }
    Ok(())
}

fn witness(set: &RealSet, n: u64, dir: Direction) -> Result<Prefix> {
    if n == 0 {
        return Err(Error::Parameter("witness length must be at least 1".into()));
    }
    check_unbounded(set, dir)?;
    let mut values = Vec::with_capacity(n as usize);
    let mut x = set.nearest_to_zero()?;
    values.push(x);
    for _ in 1..n {
        x = next_witness(set, x, dir)?;
        values.push(x);
    }
    Sequence::from_values("witness", values).materialize(n)
}

/// `x_1, …, x_n` in the set with `x_{j+1} <= x_j - 2`, starting from the
/// member nearest 0. Fails for sets bounded below.
pub fn descending_witness(set: &RealSet, n: u64) -> Result<Prefix> {
    witness(set, n, Direction::Descending)
}

/// Mirror of [`descending_witness`]: `x_{j+1} >= x_j + 2`.
pub fn ascending_witness(set: &RealSet, n: u64) -> Result<Prefix> {
    witness(set, n, Direction::Ascending)
}

fn witness_sequence(set: &RealSet, dir: Direction) -> Result<Sequence> {
    check_unbounded(set, dir)?;
    let start = set.nearest_to_zero()?;
    let owned = set.clone();
    let mut current: Option<f64> = None;
    let name = match dir {
        Direction::Descending => format!("descending-witness({set})"),
        Direction::Ascending => format!("ascending-witness({set})"),
    };
    Ok(Sequence::from_recurrence(name, move || {
        let x = match current {
            None => start,
            // The set was checked unbounded in this direction, so a member
            // exists; NaN is reported as a non-finite term if the scan fails.
            Some(prev) => next_witness(&owned, prev, dir).unwrap_or(f64::NAN),
        };
        current = Some(x);
        x
    }))
}

/// The witness extended indefinitely by the same rule.
pub fn descending_witness_sequence(set: &RealSet) -> Result<Sequence> {
    witness_sequence(set, Direction::Descending)
}

pub fn ascending_witness_sequence(set: &RealSet) -> Result<Sequence> {
    witness_sequence(set, Direction::Ascending)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum ExtractionStrategy {
    /// Nested bisection of the value range down to a band narrower than
    /// half the finest epsilon.
    Bisection,
    /// Longest nondecreasing subsequence of the prefix.
    Nondecreasing,
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub map: IndexMap,
    pub strategy: ExtractionStrategy,
    /// Upward verdict of the extracted subsequence, recomputed as a check.
    pub verdict: Verdict,
}

fn bisect(values: &[f64], width: f64) -> Option<Vec<u64>> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let (mut lo, mut hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    while hi - lo >= width {
        let mid = lo + (hi - lo) / 2.0;
        let (upper, lower): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| values[i] >= mid);
        let (keep, nlo, nhi) = if upper.len() >= lower.len() {
            (upper, mid, hi)
        } else {
            (lower, lo, mid)
        };
        if keep.len() < MIN_BISECTION_INDICES {
            return None;
        }
        idx = keep;
        lo = nlo;
        hi = nhi;
    }
    Some(idx.into_iter().map(|i| i as u64 + 1).collect())
}

/// Patience sorting for the longest nondecreasing subsequence; 1-based indices.
fn longest_nondecreasing(values: &[f64]) -> Vec<u64> {
    let mut tails: Vec<usize> = Vec::new();
    let mut parent: Vec<Option<usize>> = vec![None; values.len()];
    for (i, &v) in values.iter().enumerate() {
        let pos = tails.partition_point(|&t| values[t] <= v);
        parent[i] = pos.checked_sub(1).map(|p| tails[p]);
        if pos == tails.len() {
            tails.push(i);
        } else {
            tails[pos] = i;
        }
    }
    let mut out = Vec::with_capacity(tails.len());
    let mut cur = tails.last().copied();
    while let Some(i) = cur {
        out.push(i as u64 + 1);
        cur = parent[i];
    }
    out.reverse();
    out
}

/// Selects a subsequence of the horizon prefix whose upward verdict is
/// satisfied: a narrow value band when the prefix clusters, otherwise a
/// nondecreasing run. Prefixes reaching below `-fail_threshold * horizon`
/// are treated as unbounded below and refused.
pub fn extract_stat_upward_hqc_subsequence(seq: &Sequence, config: &AnalysisConfig) -> Result<Extraction> {
    config.validate()?;
    let (n, _) = seq.clipped_horizon(config.horizon, 0)?;
    let values = seq.values_upto(n)?;
    let floor = -config.fail_threshold * n as f64;
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| **v < floor) {
        return Err(Error::Refused(format!(
            "x_{} = {v} is below {floor}; the prefix does not look bounded below",
            i + 1
        )));
    }
    let (indices, strategy) = match bisect(&values, config.finest_epsilon() / 2.0) {
        Some(ix) => (ix, ExtractionStrategy::Bisection),
        None => (longest_nondecreasing(&values), ExtractionStrategy::Nondecreasing),
    };
    if indices.len() < 2 {
        return Err(Error::Refused(format!(
            "only {} index could be selected from a prefix of {n}",
            indices.len()
        )));
    }
    let map = IndexMap::explicit(indices)?;
    let sub = seq.subsequence(&map)?;
    let len = map.len().expect("explicit map");
    let check = AnalysisConfig {
        horizon: len - 1,
        ..config.clone()
    };
    let verdict = stat_upward_hqc_verdict(&sub, &check)?;
    Ok(Extraction {
        map,
        strategy,
        verdict,
    })
}
