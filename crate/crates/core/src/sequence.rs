//! Lazy real sequences and the structural transformations used to build
//! witnesses: differences, subsequences, interleavings and reflection.
//!
//! Indices are 1-based. A [`Sequence`] is cheap to clone; clones share the
//! evaluator and, for recurrence-backed sequences, the memo cache.

use std::fmt;
use std::sync::{Arc, Mutex};

use crate::classify::SequenceClass;
use crate::density::Status;
use crate::error::{Error, Result};

type Evaluator = dyn Fn(u64) -> Result<f64> + Send + Sync;
type Selector = dyn Fn(u64) -> Option<u64> + Send + Sync;

/// A class label together with the status the source literature claims for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Claim {
    pub class: SequenceClass,
    pub expected: Status,
}

impl Claim {
    pub const fn new(class: SequenceClass, expected: Status) -> Self {
        Self { class, expected }
    }
}

#[derive(Clone)]
pub struct Sequence {
    name: Arc<str>,
    eval: Arc<Evaluator>,
    len: Option<u64>,
    claims: Vec<Claim>,
}

impl fmt::Debug for Sequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Sequence")
            .field("name", &self.name)
            .field("len", &self.len)
            .field("claims", &self.claims)
            .finish()
    }
}

struct RecurrenceCache {
    values: Vec<f64>,
    step: Box<dyn FnMut() -> f64 + Send>,
}

fn check_finite(name: &str, index: u64, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite {
            name: name.to_owned(),
            index,
            value,
        })
    }
}

impl Sequence {
    /// Closed-form sequence `n -> f(n)`.
    pub fn from_fn<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(u64) -> f64 + Send + Sync + 'static,
    {
        let name: Arc<str> = name.into().into();
        let label = name.clone();
        Self {
            name,
            eval: Arc::new(move |n| check_finite(&label, n, f(n))),
            len: None,
            claims: Vec::new(),
        }
    }

    /// Sequence produced term by term by a stateful generator.
    ///
    /// Terms are memoized, so evaluating index `n` costs `O(n)` once and
    /// `O(1)` afterwards regardless of evaluation order.
    pub fn from_recurrence<G>(name: impl Into<String>, step: G) -> Self
    where
        G: FnMut() -> f64 + Send + 'static,
    {
        let name: Arc<str> = name.into().into();
        let label = name.clone();
        let cache = Mutex::new(RecurrenceCache {
            values: Vec::new(),
            step: Box::new(step),
        });
        let eval = move |n: u64| {
            let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
            let cache = &mut *guard;
            let idx = usize::try_from(n - 1).map_err(|_| Error::IndexOverflow { position: n })?;
            while cache.values.len() <= idx {
                let v = (cache.step)();
                cache.values.push(v);
            }
            check_finite(&label, n, cache.values[idx])
        };
        Self {
            name,
            eval: Arc::new(eval),
            len: None,
            claims: Vec::new(),
        }
    }

    /// Finite sequence backed by explicit values.
    pub fn from_values(name: impl Into<String>, values: Vec<f64>) -> Self {
        let name: Arc<str> = name.into().into();
        let label = name.clone();
        let len = values.len() as u64;
        let values: Arc<[f64]> = values.into();
        Self {
            name,
            eval: Arc::new(move |n| check_finite(&label, n, values[(n - 1) as usize])),
            len: Some(len),
            claims: Vec::new(),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::from_fn(format!("constant({c})"), move |_| c)
    }

    pub fn identity() -> Self {
        Self::from_fn("identity", |n| n as f64)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of terms for finite (file- or list-backed) sequences.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> Option<u64> {
        self.len
    }

    pub fn is_finite(&self) -> bool {
        self.len.is_some()
    }

    pub fn claims(&self) -> &[Claim] {
        &self.claims
    }

    pub fn with_claims(mut self, claims: Vec<Claim>) -> Self {
        self.claims = claims;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into().into();
        self
    }

    pub fn value(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return Err(Error::IndexZero);
        }
        if let Some(len) = self.len {
            if n > len {
                return Err(Error::OutOfRange {
                    name: self.name.to_string(),
                    index: n,
                    len,
                });
            }
        }
        (self.eval)(n)
    }

    /// Evaluates `x_1, ..., x_n` in order.
    pub fn materialize(&self, n: u64) -> Result<Prefix> {
        if n == 0 {
            return Err(Error::Config("prefix length must be at least 1".into()));
        }
        let values = (1..=n).map(|k| self.value(k)).collect::<Result<Vec<_>>>()?;
        Ok(Prefix {
            values,
            source_name: self.name.to_string(),
        })
    }

    /// Horizon usable when `extra` look-ahead terms are needed past it.
    /// Finite sequences clip the request; the second element describes the
    /// clipping when it happened.
    pub(crate) fn clipped_horizon(&self, requested: u64, extra: u64) -> Result<(u64, Option<String>)> {
        match self.len {
            None => Ok((requested, None)),
            Some(len) => {
                let available = len.saturating_sub(extra);
                if available == 0 {
                    return Err(Error::Config(format!(
                        "sequence `{}` has {len} terms, too few for this analysis",
                        self.name
                    )));
                }
                if available < requested {
                    Ok((
                        available,
                        Some(format!(
                            "horizon clipped from {requested} to {available} ({len} terms available)"
                        )),
                    ))
                } else {
                    Ok((requested, None))
                }
            }
        }
    }

    /// Values `x_1..=x_n` as a plain vector (no length-0 restriction).
    pub(crate) fn values_upto(&self, n: u64) -> Result<Vec<f64>> {
        (1..=n).map(|k| self.value(k)).collect()
    }

    /// `n -> x_n - x_{n+1}`.
    pub fn forward_difference(&self) -> Self {
        let inner = self.clone();
        Self {
            name: format!("diff({})", self.name).into(),
            eval: Arc::new(move |n| Ok(inner.value(n)? - inner.value(n + 1)?)),
            len: self.len.map(|l| l.saturating_sub(1)),
            claims: Vec::new(),
        }
    }

    /// `k -> x_{selector(k)}`.
    pub fn subsequence(&self, map: &IndexMap) -> Result<Self> {
        let len = match (self.len, map.len()) {
            (None, m) => m,
            (Some(l), _) => Some(map.count_at_most(l)?),
        };
        let inner = self.clone();
        let map_c = map.clone();
        Ok(Self {
            name: format!("{}[{}]", self.name, map.label()).into(),
            eval: Arc::new(move |k| inner.value(map_c.get(k)?)),
            len,
            claims: Vec::new(),
        })
    }

    /// `(x_1, c, x_1, c, x_2, c, x_2, c, ...)`.
    pub fn interleave_with_constant(&self, ell: f64) -> Self {
        let inner = self.clone();
        Self {
            name: format!("interleave({}, {ell})", self.name).into(),
            eval: Arc::new(move |k| {
                if k % 2 == 0 {
                    Ok(ell)
                } else {
                    inner.value((k - 1) / 4 + 1)
                }
            }),
            len: self.len.map(|l| l.saturating_mul(4)),
            claims: Vec::new(),
        }
    }

    /// `(a_1, b_1, a_2, b_2, ...)`.
    pub fn interleave_pairs(a: &Sequence, b: &Sequence) -> Self {
        let (ac, bc) = (a.clone(), b.clone());
        let len = match (a.len, b.len) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x.saturating_mul(2)),
            (Some(x), Some(y)) => Some(x.min(y).saturating_mul(2)),
        };
        Self {
            name: format!("pairs({}, {})", a.name, b.name).into(),
            eval: Arc::new(move |k| {
                let n = k.div_ceil(2);
                if k % 2 == 1 {
                    ac.value(n)
                } else {
                    bc.value(n)
                }
            }),
            len,
            claims: Vec::new(),
        }
    }

    /// `n -> -x_n`.
    pub fn reflect(&self) -> Self {
        let inner = self.clone();
        Self {
            name: format!("reflect({})", self.name).into(),
            eval: Arc::new(move |n| inner.value(n).map(|v| -v)),
            len: self.len,
            claims: Vec::new(),
        }
    }

    /// Pointwise image `n -> f(x_n)`; non-finite images are reported at the
    /// offending index.
    pub fn map<F>(&self, name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let inner = self.clone();
        let name: Arc<str> = name.into().into();
        let label = name.clone();
        Self {
            name,
            eval: Arc::new(move |n| check_finite(&label, n, f(inner.value(n)?))),
            len: self.len,
            claims: Vec::new(),
        }
    }

    /// Pointwise combination `n -> f(a_n, b_n)`.
    pub fn zip_with<F>(a: &Sequence, b: &Sequence, name: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        let (ac, bc) = (a.clone(), b.clone());
        let name: Arc<str> = name.into().into();
        let label = name.clone();
        let len = match (a.len, b.len) {
            (None, None) => None,
            (Some(x), None) | (None, Some(x)) => Some(x),
            (Some(x), Some(y)) => Some(x.min(y)),
        };
        Self {
            name,
            eval: Arc::new(move |n| check_finite(&label, n, f(ac.value(n)?, bc.value(n)?))),
            len,
            claims: Vec::new(),
        }
    }
}

/// The first `N` terms of a sequence.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Prefix {
    pub values: Vec<f64>,
    pub source_name: String,
}

impl Prefix {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based access.
    pub fn get(&self, n: u64) -> Option<f64> {
        n.checked_sub(1).and_then(|i| self.values.get(i as usize)).copied()
    }
}

#[derive(Clone)]
enum MapKind {
    Func(Arc<Selector>),
    Explicit(Arc<[u64]>),
}

/// Strictly increasing map from positions to indices, selecting a subsequence.
#[derive(Clone)]
pub struct IndexMap {
    kind: MapKind,
    label: Arc<str>,
}

impl fmt::Debug for IndexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MapKind::Func(_) => write!(f, "IndexMap({})", self.label),
            MapKind::Explicit(v) => write!(f, "IndexMap({:?})", v),
        }
    }
}

impl IndexMap {
    /// Selector given as a function; monotonicity is checked at evaluation
    /// time against the previous position. `None` signals overflow.
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(u64) -> Option<u64> + Send + Sync + 'static,
    {
        Self {
            kind: MapKind::Func(Arc::new(f)),
            label: label.into().into(),
        }
    }

    /// Finite selector. Fails unless the indices are positive and strictly
    /// increasing.
    pub fn explicit(indices: Vec<u64>) -> Result<Self> {
        if indices.first() == Some(&0) {
            return Err(Error::IndexZero);
        }
        if let Some(pos) = indices.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::NonIncreasingMap {
                position: pos as u64 + 2,
            });
        }
        let label = format!("explicit:{}", indices.len());
        Ok(Self {
            kind: MapKind::Explicit(indices.into()),
            label: label.into(),
        })
    }

    pub fn identity() -> Self {
        Self::from_fn("k", Some)
    }

    pub fn squares() -> Self {
        Self::from_fn("k^2", |k| k.checked_mul(k))
    }

    pub fn powers_of_ten() -> Self {
        Self::from_fn("10^k", |k| 10u64.checked_pow(u32::try_from(k).ok()?))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Number of positions for finite maps.
    pub fn len(&self) -> Option<u64> {
        match &self.kind {
            MapKind::Func(_) => None,
            MapKind::Explicit(v) => Some(v.len() as u64),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn indices(&self) -> Option<&[u64]> {
        match &self.kind {
            MapKind::Explicit(v) => Some(v),
            MapKind::Func(_) => None,
        }
    }

    fn raw(&self, k: u64) -> Result<u64> {
        match &self.kind {
            MapKind::Func(f) => f(k).ok_or(Error::IndexOverflow { position: k }),
            MapKind::Explicit(v) => v
                .get((k - 1) as usize)
                .copied()
                .ok_or_else(|| Error::OutOfRange {
                    name: self.label.to_string(),
                    index: k,
                    len: v.len() as u64,
                }),
        }
    }

    pub fn get(&self, k: u64) -> Result<u64> {
        if k == 0 {
            return Err(Error::IndexZero);
        }
        let idx = self.raw(k)?;
        if idx == 0 {
            return Err(Error::IndexZero);
        }
        if let MapKind::Func(_) = self.kind {
            if k > 1 && self.raw(k - 1)? >= idx {
                return Err(Error::NonIncreasingMap { position: k });
            }
        }
        Ok(idx)
    }

    /// `k -> self(inner(k))`.
    pub fn compose(&self, inner: &IndexMap) -> IndexMap {
        let (outer, inner_c) = (self.clone(), inner.clone());
        let label = format!("{}∘{}", self.label, inner.label);
        match (&self.kind, &inner.kind) {
            (_, MapKind::Explicit(v)) => {
                let composed: Result<Vec<u64>> = v.iter().map(|&k| outer.get(k)).collect();
                match composed {
                    Ok(c) => IndexMap {
                        kind: MapKind::Explicit(c.into()),
                        label: label.into(),
                    },
                    Err(_) => IndexMap::from_fn(label, move |k| {
                        outer.get(inner_c.get(k).ok()?).ok()
                    }),
                }
            }
            _ => IndexMap::from_fn(label, move |k| outer.get(inner_c.get(k).ok()?).ok()),
        }
    }

    /// How many positions select an index `<= bound`.
    fn count_at_most(&self, bound: u64) -> Result<u64> {
        match &self.kind {
            MapKind::Explicit(v) => Ok(v.partition_point(|&i| i <= bound) as u64),
            MapKind::Func(_) => {
                let mut k = 0;
                loop {
                    match self.get(k + 1) {
                        Ok(i) if i <= bound => k += 1,
                        Ok(_) | Err(Error::IndexOverflow { .. }) => return Ok(k),
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
}
