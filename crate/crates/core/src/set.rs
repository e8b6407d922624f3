//! Subsets of the real line: finite unions of intervals (points are
//! degenerate closed intervals) plus sample-backed sets that declare their
//! bounds.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// How many generator samples are checked against the declared bounds.
const GENERATOR_CHECK: u64 = 1024;
/// How far a generator is scanned when looking for a member.
const GENERATOR_SCAN: u64 = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub lo_closed: bool,
    pub hi: f64,
    pub hi_closed: bool,
}

impl Interval {
    /// `None` when the interval is empty. Infinite endpoints are always open.
    pub fn new(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Result<Option<Self>> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::Parse("interval endpoint is NaN".into()));
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Ok(None);
        }
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        if lo > hi || (lo == hi && !(lo_closed && hi_closed)) {
            return Ok(None);
        }
        Ok(Some(Self {
            lo,
            lo_closed,
            hi,
            hi_closed,
        }))
    }

    pub fn point(v: f64) -> Result<Self> {
        if !v.is_finite() {
            return Err(Error::Parse(format!("point {v} is not finite")));
        }
        Ok(Self {
            lo: v,
            lo_closed: true,
            hi: v,
            hi_closed: true,
        })
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = x > self.lo || (x == self.lo && self.lo_closed);
        let below = x < self.hi || (x == self.hi && self.hi_closed);
        above && below
    }

    fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Largest member `<= x`, if any. An open upper endpoint moves inward by
    /// 1 (or to the midpoint for short intervals).
    fn largest_at_most(&self, x: f64) -> Option<f64> {
        if x < self.lo || (x == self.lo && !self.lo_closed) {
            return None;
        }
        if self.contains(x) {
            return Some(x);
        }
        if self.hi_closed {
            return Some(self.hi);
        }
        Some(self.inside_below(self.hi))
    }

    fn smallest_at_least(&self, x: f64) -> Option<f64> {
        if x > self.hi || (x == self.hi && !self.hi_closed) {
            return None;
        }
        if self.contains(x) {
            return Some(x);
        }
        if self.lo_closed {
            return Some(self.lo);
        }
        Some(self.inside_above(self.lo))
    }

    fn inside_below(&self, hi: f64) -> f64 {
        let v = hi - 1.0;
        if self.contains(v) {
            v
        } else {
            self.lo + (hi - self.lo) / 2.0
        }
    }

    fn inside_above(&self, lo: f64) -> f64 {
        let v = lo + 1.0;
        if self.contains(v) {
            v
        } else {
            lo + (self.hi - lo) / 2.0
        }
    }

    fn nearest_to_zero(&self) -> f64 {
        if self.contains(0.0) {
            0.0
        } else if self.lo >= 0.0 {
            self.smallest_at_least(self.lo).expect("non-empty interval")
        } else {
            self.largest_at_most(self.hi).expect("non-empty interval")
        }
    }

    fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.partial_cmp(&other.lo) {
            Some(Ordering::Greater) => (self.lo, self.lo_closed),
            Some(Ordering::Less) => (other.lo, other.lo_closed),
            _ => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Less) => (self.hi, self.hi_closed),
            Some(Ordering::Greater) => (other.hi, other.hi_closed),
            _ => (self.hi, self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, lo_closed, hi, hi_closed).ok().flatten()
    }
}

fn fmt_endpoint(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            fmt_endpoint(self.lo),
            fmt_endpoint(self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DeclaredBound {
    Finite(f64),
    Unbounded,
}

/// A set known only through samples `s(1), s(2), …` plus declared bounds.
#[derive(Clone)]
pub struct GeneratorSet {
    name: String,
    sample: Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    lower: Option<DeclaredBound>,
    upper: Option<DeclaredBound>,
}

impl fmt::Debug for GeneratorSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneratorSet")
            .field("name", &self.name)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .finish()
    }
}

impl GeneratorSet {
    /// Checks the first samples for finiteness and against the declared bounds.
    pub fn new<F>(
        name: impl Into<String>,
        sample: F,
        lower: Option<DeclaredBound>,
        upper: Option<DeclaredBound>,
    ) -> Result<Self>
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        let name = name.into();
        for k in 1..=GENERATOR_CHECK {
            let v = sample(k);
            let below = matches!(lower, Some(DeclaredBound::Finite(b)) if v < b);
            let above = matches!(upper, Some(DeclaredBound::Finite(b)) if v > b);
            if !v.is_finite() || below || above {
                return Err(Error::Range(format!(
                    "generator set `{name}` sample {k} = {v} contradicts its declared bounds"
                )));
            }
        }
        Ok(Self {
            name,
            sample: Arc::new(sample),
            lower,
            upper,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn sample(&self, k: u64) -> f64 {
        (self.sample)(k)
    }

    fn scan(&self, accept: impl Fn(f64) -> bool) -> Option<f64> {
        (1..=GENERATOR_SCAN).map(|k| self.sample(k)).find(|v| accept(*v))
    }
}

/// A finite union of normalized intervals together with any number of
/// generator-backed sets.
#[derive(Debug, Clone, Default)]
pub struct RealSet {
    intervals: Vec<Interval>,
    generators: Vec<GeneratorSet>,
}

impl RealSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn reals() -> Self {
        Self::interval(f64::NEG_INFINITY, false, f64::INFINITY, false).expect("valid")
    }

    pub fn interval(lo: f64, lo_closed: bool, hi: f64, hi_closed: bool) -> Result<Self> {
        Ok(Self::from_intervals(
            Interval::new(lo, lo_closed, hi, hi_closed)?.into_iter().collect(),
        ))
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::interval(lo, true, hi, true)
    }

    pub fn points(values: &[f64]) -> Result<Self> {
        Ok(Self::from_intervals(
            values.iter().map(|&v| Interval::point(v)).collect::<Result<_>>()?,
        ))
    }

    pub fn generator(g: GeneratorSet) -> Self {
        Self {
            intervals: Vec::new(),
            generators: vec![g],
        }
    }

    /// The positive integers, declared bounded below by 1 and unbounded above.
    pub fn naturals() -> Self {
        Self::arithmetic(1.0, 1.0).expect("valid progression")
    }

    /// `{a, a + d, a + 2d, …}` with bounds declared from the sign of `d`.
    pub fn arithmetic(start: f64, step: f64) -> Result<Self> {
        if !(start.is_finite() && step.is_finite() && step != 0.0) {
            return Err(Error::Parameter("progression needs a finite start and nonzero step".into()));
        }
        let (lower, upper) = if step > 0.0 {
            (DeclaredBound::Finite(start), DeclaredBound::Unbounded)
        } else {
            (DeclaredBound::Unbounded, DeclaredBound::Finite(start))
        };
        let name = format!("{{{start},{},...}}", start + step);
        Ok(Self::generator(GeneratorSet::new(
            name,
            move |k| start + step * (k - 1) as f64,
            Some(lower),
            Some(upper),
        )?))
    }

    fn from_intervals(mut v: Vec<Interval>) -> Self {
        v.sort_by(|a, b| {
            a.lo.total_cmp(&b.lo)
                .then_with(|| b.lo_closed.cmp(&a.lo_closed))
        });
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            if let Some(last) = out.last_mut() {
                let touches = last.hi > iv.lo || (last.hi == iv.lo && (last.hi_closed || iv.lo_closed));
                if touches {
                    match last.hi.partial_cmp(&iv.hi) {
                        Some(Ordering::Less) => {
                            last.hi = iv.hi;
                            last.hi_closed = iv.hi_closed;
                        }
                        Some(Ordering::Equal) => last.hi_closed |= iv.hi_closed,
                        _ => {}
                    }
                    if last.lo == iv.lo {
                        last.lo_closed |= iv.lo_closed;
                    }
                    continue;
                }
            }
            out.push(iv);
        }
        Self {
            intervals: out,
            generators: Vec::new(),
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn generators(&self) -> &[GeneratorSet] {
        &self.generators
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty() && self.generators.is_empty()
    }

    pub fn union(&self, other: &RealSet) -> RealSet {
        let mut out = Self::from_intervals(
            self.intervals.iter().chain(&other.intervals).copied().collect(),
        );
        out.generators = self.generators.iter().chain(&other.generators).cloned().collect();
        out
    }

    /// Intersection of interval representations; generator-backed sets are refused.
    pub fn intersection(&self, other: &RealSet) -> Result<RealSet> {
        if !self.generators.is_empty() || !other.generators.is_empty() {
            return Err(Error::Refused(
                "intersection with a generator-backed set is not representable".into(),
            ));
        }
        let mut parts = Vec::new();
        for a in &self.intervals {
            for b in &other.intervals {
                parts.extend(a.intersect(b));
            }
        }
        Ok(Self::from_intervals(parts))
    }

    /// Exact for intervals; generators answer by scanning their samples.
    pub fn contains(&self, x: f64) -> bool {
        self.intervals.iter().any(|iv| iv.contains(x))
            || self
                .generators
                .iter()
                .any(|g| (1..=GENERATOR_CHECK).any(|k| g.sample(k) == x))
    }

    fn declared(&self, upper: bool) -> Result<bool> {
        let mut bounded = true;
        for g in &self.generators {
            let b = if upper { g.upper } else { g.lower };
            match b {
                None => {
                    return Err(Error::Undecidable(format!(
                        "generator set `{}` declares no {} bound",
                        g.name,
                        if upper { "upper" } else { "lower" }
                    )))
                }
                Some(DeclaredBound::Unbounded) => bounded = false,
                Some(DeclaredBound::Finite(_)) => {}
            }
        }
        Ok(bounded)
    }

    pub fn bounded_below(&self) -> Result<bool> {
        let generators = self.declared(false)?;
        let intervals = self.intervals.first().is_none_or(|iv| iv.lo.is_finite());
        Ok(generators && intervals)
    }

    pub fn bounded_above(&self) -> Result<bool> {
        let generators = self.declared(true)?;
        let intervals = self.intervals.last().is_none_or(|iv| iv.hi.is_finite());
        Ok(generators && intervals)
    }

    /// The member nearest 0; ties go to the non-negative side.
    pub fn nearest_to_zero(&self) -> Result<f64> {
        let mut best: Option<f64> = None;
        let mut consider = |v: f64| {
            best = Some(match best {
                Some(b) if b.abs() < v.abs() || (b.abs() == v.abs() && b >= v) => b,
                _ => v,
            });
        };
        for iv in &self.intervals {
            consider(iv.nearest_to_zero());
        }
        for g in &self.generators {
            for k in 1..=GENERATOR_CHECK {
                consider(g.sample(k));
            }
        }
        best.ok_or(Error::EmptyDomain)
    }

    /// Largest representable member `<= x`.
    pub fn largest_at_most(&self, x: f64) -> Option<f64> {
        let from_intervals = self.intervals.iter().rev().find_map(|iv| iv.largest_at_most(x));
        let from_generators = self
            .generators
            .iter()
            .filter_map(|g| g.scan(|v| v <= x))
            .reduce(f64::max);
        match (from_intervals, from_generators) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }

    /// Smallest representable member `>= x`.
    pub fn smallest_at_least(&self, x: f64) -> Option<f64> {
        let from_intervals = self.intervals.iter().find_map(|iv| iv.smallest_at_least(x));
        let from_generators = self
            .generators
            .iter()
            .filter_map(|g| g.scan(|v| v >= x))
            .reduce(f64::min);
        match (from_intervals, from_generators) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }
}

impl fmt::Display for RealSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("{}");
        }
        let all_points = !self.intervals.is_empty() && self.intervals.iter().all(Interval::is_point);
        let mut parts: Vec<String> = if all_points {
            let vs: Vec<String> = self.intervals.iter().map(|iv| iv.lo.to_string()).collect();
            vec![format!("{{{}}}", vs.join(","))]
        } else {
            self.intervals.iter().map(|iv| iv.to_string()).collect()
        };
        parts.extend(self.generators.iter().map(|g| g.name.clone()));
        f.write_str(&parts.join(" U "))
    }
}

impl Serialize for RealSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn parse_number(s: &str) -> Result<f64> {
    let t = s.trim();
    match t {
        "inf" | "+inf" | "infinity" | "+infinity" | "∞" | "+∞" => Ok(f64::INFINITY),
        "-inf" | "-infinity" | "-∞" | "−∞" => Ok(f64::NEG_INFINITY),
        _ => {
            let v: f64 = t
                .replace('−', "-")
                .parse()
                .map_err(|_| Error::Parse(format!("bad number `{t}` in set literal")))?;
            if v.is_nan() {
                return Err(Error::Parse("NaN in set literal".into()));
            }
            Ok(v)
        }
    }
}

fn parse_piece(s: &str) -> Result<RealSet> {
    let t = s.trim();
    match t {
        "R" | "ℝ" | "reals" => return Ok(RealSet::reals()),
        "N" | "ℕ" | "naturals" => return Ok(RealSet::naturals()),
        "{}" | "∅" => return Ok(RealSet::empty()),
        _ => {}
    }
    if let Some(inner) = t.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
        let items: Vec<&str> = inner.split(',').map(str::trim).collect();
        if items.last().is_some_and(|l| *l == "..." || *l == "…") {
            let values = items[..items.len() - 1]
                .iter()
                .map(|v| parse_number(v))
                .collect::<Result<Vec<f64>>>()?;
            if values.len() < 2 || values.iter().any(|v| !v.is_finite()) {
                return Err(Error::Parse(format!(
                    "progression `{t}` needs at least two finite leading terms"
                )));
            }
            let step = values[1] - values[0];
            if values.windows(2).any(|w| w[1] - w[0] != step) {
                return Err(Error::Parse(format!("`{t}` is not an arithmetic progression")));
            }
            return RealSet::arithmetic(values[0], step);
        }
        let values = items
            .iter()
            .filter(|v| !v.is_empty())
            .map(|v| parse_number(v))
            .collect::<Result<Vec<f64>>>()?;
        return RealSet::points(&values);
    }
    let mut chars = t.chars();
    let open = chars.next();
    let close = t.chars().last();
    let lo_closed = match open {
        Some('[') => true,
        Some('(') => false,
        _ => return Err(Error::Parse(format!("unrecognized set literal `{t}`"))),
    };
    let hi_closed = match close {
        Some(']') => true,
        Some(')') => false,
        _ => return Err(Error::Parse(format!("unterminated interval `{t}`"))),
    };
    let body = &t[1..t.len() - 1];
    let (a, b) = body
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("interval `{t}` needs two endpoints")))?;
    let (lo, hi) = (parse_number(a)?, parse_number(b)?);
    if lo > hi {
        return Err(Error::Parse(format!("interval `{t}` has lower endpoint above upper")));
    }
    RealSet::interval(lo, lo_closed, hi, hi_closed)
}

impl std::str::FromStr for RealSet {
    type Err = Error;

    /// Accepts `[a,b]`, `(a,inf)`, `{v1,v2}`, `{1,2,3,...}`, `R`, `N`, joined
    /// by `U` or `∪`.
    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.replace('∪', " U ");
        let pieces: Vec<&str> = normalized.split(" U ").collect();
        if pieces.iter().all(|p| p.trim().is_empty()) {
            return Err(Error::Parse("empty set literal".into()));
        }
        pieces
            .into_iter()
            .map(parse_piece)
            .try_fold(RealSet::empty(), |acc, p| Ok(acc.union(&p?)))
    }
}
