//! Does a real function preserve a sequence class?
//!
//! A preservation property `A -> B` holds for `f` on a corpus when every
//! corpus member in class `A` has its image `f(x_k)` in class `B`. All checks
//! are finite-horizon and reuse the classifiers; nothing here is assumed from
//! theory, every verdict is recomputed on the actual images.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Signed;
use rayon::prelude::*;
use serde::Serialize;

use crate::classify::{class_verdict, stat_upward_hqc_verdict, SequenceClass};
use crate::config::AnalysisConfig;
use crate::density::{checkpoints, decimal_rational, flags_verdict, Status, Verdict};
use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::methods::statistical_limit_verdict;
use crate::sequence::{IndexMap, Sequence};
use crate::set::RealSet;

type RealFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Horizon multiple at which a violated image is re-examined.
pub const RECHECK_FACTOR: u64 = 2;

#[derive(Clone)]
pub struct FunctionUnderTest {
    name: String,
    domain: RealSet,
    eval: Arc<RealFn>,
}

impl fmt::Debug for FunctionUnderTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionUnderTest")
            .field("name", &self.name)
            .field("domain", &self.domain.to_string())
            .finish()
    }
}

impl FunctionUnderTest {
    pub fn new<F>(name: impl Into<String>, domain: RealSet, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            domain,
            eval: Arc::new(f),
        }
    }

    pub fn from_expr(src: &str, domain: RealSet) -> Result<Self> {
        let e = Expr::parse(src)?;
        Ok(Self::new(src.trim(), domain, move |x| e.eval(x)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &RealSet {
        &self.domain
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    /// `f(x_1), …, f(x_len)` after checking domain membership and finiteness.
    fn image_values(&self, name: &str, values: &[f64]) -> Result<Vec<f64>> {
        values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let index = i as u64 + 1;
                if !self.domain.contains(v) {
                    return Err(Error::Domain {
                        function: self.name.clone(),
                        sequence: name.to_owned(),
                        index,
                        value: v,
                    });
                }
                let y = self.eval(v);
                if !y.is_finite() {
                    return Err(Error::NonFinite {
                        name: format!("{}({name})", self.name),
                        index,
                        value: y,
                    });
                }
                Ok(y)
            })
            .collect()
    }

    /// The image of the first `len` terms as a finite sequence.
    pub fn image(&self, seq: &Sequence, len: u64) -> Result<Sequence> {
        let len = seq.len().map_or(len, |l| l.min(len));
        let values = self.image_values(seq.name(), &seq.values_upto(len)?)?;
        Ok(Sequence::from_values(format!("{}({})", self.name, seq.name()), values))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    /// ΔS⁺ to ΔS⁺.
    UpToUp,
    /// ΔS⁺ to convergent.
    UpToConvergent,
    /// Convergent to convergent.
    Convergent,
    /// Convergent to ΔS⁺.
    ConvergentToUp,
    /// Statistically convergent to statistically convergent.
    Statistical,
    DownToDown,
    DownToConvergent,
    ConvergentToDown,
}

impl Property {
    pub const ALL: [Property; 8] = [
        Property::UpToUp,
        Property::UpToConvergent,
        Property::Convergent,
        Property::ConvergentToUp,
        Property::Statistical,
        Property::DownToDown,
        Property::DownToConvergent,
        Property::ConvergentToDown,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Property::UpToUp => "dS+",
            Property::UpToConvergent => "dS+c",
            Property::Convergent => "c",
            Property::ConvergentToUp => "cdS+",
            Property::Statistical => "st",
            Property::DownToDown => "dS-",
            Property::DownToConvergent => "dS-c",
            Property::ConvergentToDown => "cdS-",
        }
    }

    pub fn antecedent(self) -> SequenceClass {
        use SequenceClass as C;
        match self {
            Property::UpToUp | Property::UpToConvergent => C::StatUpHalfQuasiCauchy,
            Property::DownToDown | Property::DownToConvergent => C::StatDownHalfQuasiCauchy,
            Property::Convergent | Property::ConvergentToUp | Property::ConvergentToDown => C::Convergent,
            Property::Statistical => C::StatConvergent,
        }
    }

    pub fn consequent(self) -> SequenceClass {
        use SequenceClass as C;
        match self {
            Property::UpToUp | Property::ConvergentToUp => C::StatUpHalfQuasiCauchy,
            Property::DownToDown | Property::ConvergentToDown => C::StatDownHalfQuasiCauchy,
            Property::UpToConvergent | Property::DownToConvergent | Property::Convergent => C::Convergent,
            Property::Statistical => C::StatConvergent,
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for Property {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.replace('−', "-");
        Property::ALL
            .into_iter()
            .find(|p| p.label() == s)
            .ok_or_else(|| Error::Parse(format!("unknown preservation property `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PreservationResult {
    pub property: Property,
    pub verdict: Verdict,
    /// Members whose image was classified.
    pub evaluated: Vec<String>,
    /// Members whose antecedent verdict was not satisfied, with that status.
    pub skipped: Vec<(String, Status)>,
    /// First member whose image failed the consequent class.
    pub witness_sequence: Option<String>,
}

/// A corpus with each member's terms and antecedent verdicts computed once.
pub struct Corpus {
    config: AnalysisConfig,
    members: Vec<(Sequence, Vec<f64>)>,
    antecedents: HashMap<(usize, SequenceClass), Status>,
}

impl Corpus {
    pub fn new(members: Vec<Sequence>, config: &AnalysisConfig) -> Result<Self> {
        config.validate()?;
        let needed = [
            SequenceClass::StatUpHalfQuasiCauchy,
            SequenceClass::StatDownHalfQuasiCauchy,
            SequenceClass::Convergent,
            SequenceClass::StatConvergent,
        ];
        type Member = ((Sequence, Vec<f64>), Vec<(SequenceClass, Status)>);
        let computed: Vec<Member> = members
            .into_par_iter()
            .map(|seq| {
                let len = seq.len().map_or(config.horizon + 1, |l| l.min(config.horizon + 1));
                let values = seq.values_upto(len)?;
                let data = Sequence::from_values(seq.name(), values.clone());
                let statuses = needed
                    .iter()
                    .map(|&c| Ok((c, class_verdict(&data, c, config)?.status)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(((seq, values), statuses))
            })
            .collect::<Result<_>>()?;
        let mut antecedents = HashMap::new();
        let mut members = Vec::with_capacity(computed.len());
        for (i, (member, statuses)) in computed.into_iter().enumerate() {
            for (c, s) in statuses {
                antecedents.insert((i, c), s);
            }
            members.push(member);
        }
        Ok(Self {
            config: config.clone(),
            members,
            antecedents,
        })
    }

    pub fn config(&self) -> &AnalysisConfig {
        &self.config
    }

    pub fn names(&self) -> Vec<&str> {
        self.members.iter().map(|(s, _)| s.name()).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn status(&self, i: usize, class: SequenceClass) -> Status {
        self.antecedents[&(i, class)]
    }

    /// Members whose first terms all lie in `domain`.
    pub fn within(&self, domain: &RealSet) -> Corpus {
        let keep: Vec<usize> = (0..self.members.len())
            .filter(|&i| self.members[i].1.iter().all(|&v| domain.contains(v)))
            .collect();
        let mut antecedents = HashMap::new();
        for (j, &i) in keep.iter().enumerate() {
            for ((m, c), s) in &self.antecedents {
                if *m == i {
                    antecedents.insert((j, *c), *s);
                }
            }
        }
        Corpus {
            config: self.config.clone(),
            members: keep.iter().map(|&i| self.members[i].clone()).collect(),
            antecedents,
        }
    }
}

fn preservation_on(f: &FunctionUnderTest, prop: Property, corpus: &Corpus) -> Result<PreservationResult> {
    let config = &corpus.config;
    let antecedent = prop.antecedent();
    let consequent = prop.consequent();
    let mut skipped = Vec::new();
    let mut chosen = Vec::new();
    for (i, (seq, _)) in corpus.members.iter().enumerate() {
        match corpus.status(i, antecedent) {
            Status::Satisfied => chosen.push(i),
            s => skipped.push((seq.name().to_owned(), s)),
        }
    }
    let outcomes: Vec<(String, Option<Verdict>, Status)> = chosen
        .par_iter()
        .map(|&i| {
            let (seq, values) = &corpus.members[i];
            let name = seq.name().to_owned();
            let image = f.image_values(seq.name(), values)?;
            let image = Sequence::from_values(format!("{}({})", f.name, seq.name()), image);
            let v = class_verdict(&image, consequent, config)?;
            if v.status != Status::Violated {
                return Ok((name, Some(v), Status::Satisfied));
            }
            // A violation must survive a longer horizon, where the member
            // must still satisfy the antecedent; the longer run decides.
            let longer = AnalysisConfig {
                horizon: config.horizon.saturating_mul(RECHECK_FACTOR),
                ..config.clone()
            };
            let len = seq.len().map_or(longer.horizon + 1, |l| l.min(longer.horizon + 1));
            let data = Sequence::from_values(seq.name(), seq.values_upto(len)?);
            let pre = class_verdict(&data, antecedent, &longer)?.status;
            if pre != Status::Satisfied {
                return Ok((name, None, pre));
            }
            let image = f.image(&data, len)?;
            let mut again = class_verdict(&image, consequent, &longer)?;
            if again.status != Status::Violated {
                again.append_note(&format!(
                    "violation at horizon {} not confirmed at {}",
                    config.horizon, longer.horizon
                ));
            }
            Ok((name, Some(again), Status::Satisfied))
        })
        .collect::<Result<_>>()?;
    let mut images: Vec<(String, Verdict)> = Vec::with_capacity(outcomes.len());
    for (name, v, pre) in outcomes {
        match v {
            Some(v) => images.push((name, v)),
            None => skipped.push((name, pre)),
        }
    }
    let violated = images.iter().find(|(_, v)| v.status == Status::Violated);
    let inconclusive = images.iter().find(|(_, v)| v.status == Status::Inconclusive);
    let (mut verdict, witness) = match (violated, inconclusive) {
        (Some((name, v)), _) => {
            let mut out = v.clone();
            out.note = format!(
                "f = {} maps {name} ({antecedent}) to a sequence that is not {consequent}: {}",
                f.name, v.note
            );
            (out, Some(name.clone()))
        }
        (None, Some((name, v))) => {
            let mut out = v.clone();
            out.note = format!("image of {name} is inconclusive for {consequent}: {}", v.note);
            (out, None)
        }
        (None, None) => (
            Verdict::new(Status::Satisfied, config.horizon).with_note(format!(
                "all {} {antecedent} members map into {consequent}",
                images.len()
            )),
            None,
        ),
    };
    if !skipped.is_empty() {
        verdict.append_note(&format!("{} member(s) skipped", skipped.len()));
    }
    Ok(PreservationResult {
        property: prop,
        verdict,
        evaluated: images.into_iter().map(|(n, _)| n).collect(),
        skipped,
        witness_sequence: witness,
    })
}

/// Classifies the images of the corpus members that satisfy the antecedent.
/// A violated image is re-examined at twice the horizon and the longer run
/// decides; members that drop out of the antecedent there are skipped. Fails with a domain error when such a member leaves the domain of `f`.
pub fn preservation_verdict(
    f: &FunctionUnderTest,
    prop: Property,
    corpus: &[Sequence],
    config: &AnalysisConfig,
) -> Result<PreservationResult> {
    preservation_on(f, prop, &Corpus::new(corpus.to_vec(), config)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ImplicationCheck {
    pub from: Property,
    pub to: Property,
    /// Both directions are asserted.
    pub equivalence: bool,
    pub consistent: bool,
}

/// The implications between properties that hold for every function.
pub const ASSERTED_IMPLICATIONS: [(Property, Property, bool); 10] = [
    (Property::UpToConvergent, Property::UpToUp, false),
    (Property::UpToUp, Property::ConvergentToUp, false),
    (Property::UpToConvergent, Property::Convergent, false),
    (Property::Convergent, Property::ConvergentToUp, true),
    (Property::DownToConvergent, Property::DownToDown, false),
    (Property::DownToDown, Property::ConvergentToDown, false),
    (Property::DownToConvergent, Property::Convergent, false),
    (Property::Convergent, Property::ConvergentToDown, true),
    (Property::UpToUp, Property::Statistical, false),
    (Property::DownToDown, Property::Statistical, false),
];

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct LatticeReport {
    pub function: String,
    pub domain: String,
    pub per_property: Vec<PreservationResult>,
    pub implications: Vec<ImplicationCheck>,
    /// Members left out because they leave the domain of the function.
    pub outside_domain: Vec<String>,
}

impl LatticeReport {
    pub fn get(&self, prop: Property) -> Option<&PreservationResult> {
        self.per_property.iter().find(|r| r.property == prop)
    }

    pub fn status(&self, prop: Property) -> Option<Status> {
        self.get(prop).map(|r| r.verdict.status)
    }

    pub fn consistent(&self) -> bool {
        self.implications.iter().all(|c| c.consistent)
    }

    pub fn all_decisive(&self) -> bool {
        self.per_property.iter().all(|r| r.verdict.status.is_decisive())
    }
}

/// All eight property verdicts plus the consistency of each asserted
/// implication: an implication is contradicted only when its premise is
/// satisfied and its conclusion violated.
pub fn implication_lattice_report(f: &FunctionUnderTest, corpus: &Corpus) -> Result<LatticeReport> {
    let usable = corpus.within(&f.domain);
    let inside: Vec<&str> = usable.names();
    let outside_domain = corpus
        .names()
        .into_iter()
        .filter(|n| !inside.contains(n))
        .map(str::to_owned)
        .collect();
    let per_property = Property::ALL
        .iter()
        .map(|&p| preservation_on(f, p, &usable))
        .collect::<Result<Vec<_>>>()?;
    let status = |p: Property| {
        per_property
            .iter()
            .find(|r| r.property == p)
            .map(|r| r.verdict.status)
            .expect("every property evaluated")
    };
    let contradicts = |a: Property, b: Property| status(a) == Status::Satisfied && status(b) == Status::Violated;
    let implications = ASSERTED_IMPLICATIONS
        .iter()
        .map(|&(from, to, equivalence)| ImplicationCheck {
            from,
            to,
            equivalence,
            consistent: !(contradicts(from, to) || (equivalence && contradicts(to, from))),
        })
        .collect();
    Ok(LatticeReport {
        function: f.name.clone(),
        domain: f.domain.to_string(),
        per_property,
        implications,
        outside_domain,
    })
}

/// Builds `(x_1, ℓ, x_1, ℓ, x_2, ℓ, …)`, applies `f`, and requires both that
/// the image is statistically upward half quasi-Cauchy and that
/// `{k : |f(z_k) - f(ℓ)| >= ε}` has density zero for every ε of the grid.
pub fn interleave_continuity_check(
    f: &FunctionUnderTest,
    seq: &Sequence,
    ell: f64,
    config: &AnalysisConfig,
) -> Result<Verdict> {
    let pre = statistical_limit_verdict(seq, ell, config)?.verdict;
    if !pre.is_satisfied() {
        return Err(Error::Precondition(format!(
            "{} is not statistically convergent to {ell} at horizon {} ({})",
            seq.name(),
            config.horizon,
            pre.status
        )));
    }
    let fl = f.eval(ell);
    if !f.domain.contains(ell) || !fl.is_finite() {
        return Err(Error::Domain {
            function: f.name.clone(),
            sequence: "limit".into(),
            index: 0,
            value: ell,
        });
    }
    let z = seq.interleave_with_constant(ell);
    let image = f.image(&z, config.horizon + 1)?;
    let upward = stat_upward_hqc_verdict(&image, config)?;
    let values = image.materialize(config.horizon)?.values;
    let near = config
        .epsilon_grid
        .iter()
        .map(|&eps| {
            let flags: Vec<bool> = values.iter().map(|y| (y - fl).abs() >= eps).collect();
            flags_verdict(format!("|f(z_k) - f({ell})| >= {eps}"), &flags, Some(eps), config)
        })
        .collect();
    let near = Verdict::all_of(near, format!("image statistically convergent to f({ell}) = {fl}"));
    Ok(Verdict::all_of(
        vec![upward, near],
        format!("interleaving {} with {ell} under {}", seq.name(), f.name),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UcPair {
    pub n: u64,
    pub x: f64,
    pub y: f64,
    pub fx: f64,
    pub fy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UcSearch {
    pub function: String,
    pub eps0: f64,
    pub n_max: u64,
    pub pairs: Vec<UcPair>,
    /// Scales `n` at which no pair was found.
    pub missing: Vec<u64>,
}

impl UcSearch {
    /// A pair at every scale up to `n_max`.
    pub fn certifies_non_uniform(&self) -> bool {
        self.missing.is_empty()
    }

    pub fn none_found(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub const UC_GRID_PER_UNIT: f64 = 1024.0;
const GOLDEN_STEPS: usize = 60;

/// Exact check of `|x - y| < 1/n` and `|f(x) - f(y)| >= eps0` on the
/// evaluated values.
pub fn pair_qualifies(n: u64, x: f64, y: f64, fx: f64, fy: f64, eps0: f64) -> bool {
    if ![x, y, fx, fy].iter().all(|v| v.is_finite()) {
        return false;
    }
    let r = |v: f64| BigRational::from_float(v).expect("finite");
    let gap = (r(y) - r(x)).abs() * BigRational::from_integer(n.into());
    let jump = (r(fy) - r(fx)).abs();
    gap < BigRational::from_integer(1.into()) && jump >= decimal_rational(eps0)
}

fn search_scale(f: &FunctionUnderTest, n: u64, eps0: f64) -> Option<UcPair> {
    let w = 8.0 + 2.0 * n as f64;
    let window = RealSet::closed(-w, w).expect("valid window");
    let region = f.domain.intersection(&window).ok()?;
    let h = (1.0 / n as f64) * (1.0 - 1.0 / UC_GRID_PER_UNIT);
    let step = 1.0 / UC_GRID_PER_UNIT;
    let jump = |x: f64| (f.eval(x + h) - f.eval(x)).abs();
    let mut best: Option<(f64, f64)> = None;
    for iv in region.intervals() {
        let start = if iv.lo_closed { iv.lo } else { iv.lo + step / 2.0 };
        let mut i = 0u64;
        loop {
            let x = start + i as f64 * step;
            if x + h > iv.hi || !iv.contains(x + h) {
                break;
            }
            let j = jump(x);
            if j.is_finite() && best.is_none_or(|(b, _)| j > b) {
                best = Some((j, x));
            }
            i += 1;
        }
    }
    let (_, mut x) = best?;
    let pair = |x: f64| UcPair {
        n,
        x,
        y: x + h,
        fx: f.eval(x),
        fy: f.eval(x + h),
    };
    let qualifies = |p: &UcPair| pair_qualifies(n, p.x, p.y, p.fx, p.fy, eps0) && f.domain.contains(p.x) && f.domain.contains(p.y);
    let p = pair(x);
    if qualifies(&p) {
        return Some(p);
    }
    // Golden-section refinement of the jump around the best grid point.
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (x - step, x + step);
    for _ in 0..GOLDEN_STEPS {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if jump(c) >= jump(d) {
            b = d;
        } else {
            a = c;
        }
    }
    x = (a + b) / 2.0;
    let p = pair(x);
    qualifies(&p).then_some(p)
}

/// For each `n <= n_max`, looks for `x, y` in the domain with `|x - y| < 1/n`
/// and `|f(x) - f(y)| >= eps0` on a grid of 1024 points per unit over
/// `[-(8 + 2n), 8 + 2n]`, refined by golden-section search. Every returned
/// pair is verified in exact rational arithmetic.
pub fn uniform_continuity_witness_search(f: &FunctionUnderTest, n_max: u64, eps0: f64) -> Result<UcSearch> {
    if n_max == 0 {
        return Err(Error::Parameter("nmax must be at least 1".into()));
    }
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(Error::Parameter("eps0 must be positive".into()));
    }
    if f.domain.is_empty() {
        return Err(Error::EmptyDomain);
    }
    if !f.domain.generators().is_empty() {
        return Err(Error::Refused(
            "witness search needs an interval or point domain".into(),
        ));
    }
    let found: Vec<(u64, Option<UcPair>)> = (1..=n_max)
        .into_par_iter()
        .map(|n| (n, search_scale(f, n, eps0)))
        .collect();
    let mut pairs = Vec::new();
    let mut missing = Vec::new();
    for (n, p) in found {
        match p {
            Some(p) => pairs.push(p),
            None => missing.push(n),
        }
    }
    Ok(UcSearch {
        function: f.name.clone(),
        eps0,
        n_max,
        pairs,
        missing,
    })
}

/// Checks `y_{n_k} - y_{n_{k+1}} = (y_{n_k} - x_{n_k}) + (x_{n_k} - x_{n_{k+1}}) + (x_{n_{k+1}} - y_{n_{k+1}})` for `k <= horizon`, summing left to right in
/// exact rational arithmetic on the evaluated terms.
pub fn three_sum_decomposition_check(x: &Sequence, y: &Sequence, map: &IndexMap, horizon: u64) -> Result<bool> {
    let r = |v: f64| BigRational::from_float(v).expect("sequence terms are finite");
    for k in 1..=horizon {
        let (i, j) = (map.get(k)?, map.get(k + 1)?);
        let (xi, xj, yi, yj) = (r(x.value(i)?), r(x.value(j)?), r(y.value(i)?), r(y.value(j)?));
        let lhs = &yi - &yj;
        let rhs = (&yi - &xi) + (&xi - &xj) + (&xj - &yj);
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

type MemberFn = dyn Fn(u64, f64) -> f64 + Send + Sync;

/// `f_n -> f` uniformly, with `|f_n - f| <= gap` for `n >= index`.
#[derive(Clone)]
pub struct FunctionSequence {
    name: String,
    members: Arc<MemberFn>,
    limit: FunctionUnderTest,
    uniform_index: u64,
    uniform_gap: f64,
}

impl fmt::Debug for FunctionSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FunctionSequence")
            .field("name", &self.name)
            .field("limit", &self.limit)
            .field("uniform_index", &self.uniform_index)
            .field("uniform_gap", &self.uniform_gap)
            .finish()
    }
}

impl FunctionSequence {
    /// Samples the domain (within `[-64, 64]`, 64 points per unit) and a few
    /// members past `uniform_index` to check the declared gap.
    pub fn new<F>(
        name: impl Into<String>,
        members: F,
        limit: FunctionUnderTest,
        uniform_index: u64,
        uniform_gap: f64,
    ) -> Result<Self>
    where
        F: Fn(u64, f64) -> f64 + Send + Sync + 'static,
    {
        if uniform_index == 0 || !(uniform_gap > 0.0) {
            return Err(Error::Parameter("uniform index and gap must be positive".into()));
        }
        let window = RealSet::closed(-64.0, 64.0)?;
        let region = limit.domain.intersection(&window)?;
        let probe_members = [uniform_index, uniform_index + 1, 2 * uniform_index, 10 * uniform_index];
        for iv in region.intervals() {
            let mut x = if iv.lo_closed { iv.lo } else { iv.lo + 1.0 / 128.0 };
            while iv.contains(x) {
                for &m in &probe_members {
                    let (a, b) = (members(m, x), limit.eval(x));
                    // Allow for the rounding of the two evaluations.
                    let slack = 4.0 * f64::EPSILON * a.abs().max(b.abs());
                    let d = (a - b).abs();
                    if !(d <= uniform_gap + slack) {
                        return Err(Error::Precondition(format!(
                            "|f_{m}({x}) - f({x})| = {d} exceeds the declared gap {uniform_gap}"
                        )));
                    }
                }
                x += 1.0 / 64.0;
            }
        }
        Ok(Self {
            name: name.into(),
            members: Arc::new(members),
            limit,
            uniform_index,
            uniform_gap,
        })
    }

    pub fn member(&self, n: u64, x: f64) -> f64 {
        (self.members)(n, x)
    }

    pub fn limit(&self) -> &FunctionUnderTest {
        &self.limit
    }

    pub fn uniform_index(&self) -> u64 {
        self.uniform_index
    }

    pub fn uniform_gap(&self) -> f64 {
        self.uniform_gap
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct InclusionCheckpoint {
    pub n: u64,
    /// `#{k <= n : f(x_k) - f(x_{k+1}) >= ε}`.
    pub target: u64,
    /// The three cover counts at `ε/3`.
    pub cover: [u64; 3],
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct UniformLimitReport {
    pub checkpoints: Vec<InclusionCheckpoint>,
    /// Every target index lies in one of the three cover sets.
    pub inclusion_holds: bool,
    /// Upward verdict of `f(x_k)`.
    pub verdict: Verdict,
}

/// Verifies, index by index, that `f(x_k) - f(x_{k+1}) >= ε` forces one of
/// `|f(x_k) - f_N(x_k)|`, `f_N(x_k) - f_N(x_{k+1})`, `|f_N(x_{k+1}) - f(x_{k+1})|`
/// to reach `ε/3`, with all differences in exact rational arithmetic, and
/// reports the resulting counts at every checkpoint.
pub fn uniform_limit_preservation(
    fseq: &FunctionSequence,
    seq: &Sequence,
    eps: f64,
    config: &AnalysisConfig,
) -> Result<UniformLimitReport> {
    config.validate()?;
    let third = decimal_rational(eps) / BigRational::from_integer(3.into());
    let r = |v: f64| BigRational::from_float(v).expect("finite");
    if r(fseq.uniform_gap) >= third {
        return Err(Error::Precondition(format!(
            "uniform gap {} is not below eps/3",
            fseq.uniform_gap
        )));
    }
    let pre = stat_upward_hqc_verdict(seq, config)?;
    if !pre.is_satisfied() {
        return Err(Error::Precondition(format!(
            "{} is not statistically upward half quasi-Cauchy ({})",
            seq.name(),
            pre.status
        )));
    }
    let f = &fseq.limit;
    let image = f.image(seq, config.horizon + 1)?;
    let n = image.len().expect("finite image") - 1;
    let xs = seq.values_upto(n + 1)?;
    let fx = image.materialize(n + 1)?.values;
    let gx: Vec<f64> = xs.iter().map(|&x| fseq.member(fseq.uniform_index, x)).collect();
    let eps_exact = decimal_rational(eps);
    let mut counts = [0u64; 4];
    let mut inclusion = true;
    let marks = checkpoints(n, config.checkpoint_count);
    let mut next_mark = marks.iter().peekable();
    let mut rows = Vec::with_capacity(marks.len());
    for k in 0..n as usize {
        let (a, b, a2, b2) = (r(fx[k]), r(fx[k + 1]), r(gx[k]), r(gx[k + 1]));
        let target = &a - &b >= eps_exact;
        let c1 = (&a - &a2).abs() >= third;
        let c2 = &a2 - &b2 >= third;
        let c3 = (&b2 - &b).abs() >= third;
        for (slot, hit) in counts.iter_mut().zip([target, c1, c2, c3]) {
            *slot += u64::from(hit);
        }
        if target && !(c1 || c2 || c3) {
            inclusion = false;
        }
        if next_mark.peek().is_some_and(|&&m| m == k as u64 + 1) {
            next_mark.next();
            rows.push(InclusionCheckpoint {
                n: k as u64 + 1,
                target: counts[0],
                cover: [counts[1], counts[2], counts[3]],
                holds: counts[0] <= counts[1] + counts[2] + counts[3],
            });
        }
    }
    let verdict = stat_upward_hqc_verdict(&image, &AnalysisConfig { horizon: n, ..config.clone() })?;
    Ok(UniformLimitReport {
        inclusion_holds: inclusion && rows.iter().all(|c| c.holds),
        checkpoints: rows,
        verdict,
    })
}

/// The function set used for lattice checks.
pub fn shipped_functions() -> Vec<FunctionUnderTest> {
    ["x", "x + 5", "2*x", "x^2", "step(0)", "1"]
        .iter()
        .map(|src| FunctionUnderTest::from_expr(src, RealSet::reals()).expect("valid expression"))
        .collect()
}

/// Functions separating properties that do not imply each other: each entry
/// names the implication that fails and the function whose lattice shows the
/// premise satisfied and the conclusion violated.
pub fn counterexamples() -> Vec<(Property, Property, FunctionUnderTest)> {
    let id = FunctionUnderTest::from_expr("x", RealSet::reals()).expect("valid expression");
    vec![
        (Property::UpToUp, Property::UpToConvergent, id.clone()),
        (Property::DownToDown, Property::DownToConvergent, id),
    ]
}
