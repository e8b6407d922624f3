//! Named example sequences with the class memberships claimed for them.
//!
//! Claims are only listed where the classifiers at the default configuration
//! can confirm them; see the tests and the acceptance suite.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::SequenceClass as C;
use crate::density::Status::{Satisfied as Sat, Violated as Vio};
use crate::error::{Error, Result};
use crate::sequence::{Claim, Sequence};

pub type Params = BTreeMap<String, f64>;

type Builder = fn(&Params) -> Result<Sequence>;

pub struct NamedSequence {
    pub name: &'static str,
    pub description: &'static str,
    /// Accepted parameters and their defaults.
    pub parameters: &'static [(&'static str, f64)],
    pub claims: &'static [Claim],
    build: Builder,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CatalogueEntry {
    pub name: &'static str,
    pub description: &'static str,
    pub parameters: BTreeMap<&'static str, f64>,
    pub claims: Vec<Claim>,
}

fn running_sum(name: &str, term: fn(u64) -> f64) -> Sequence {
    let mut k = 0u64;
    let mut acc = 0.0;
    Sequence::from_recurrence(name, move || {
        k += 1;
        acc += term(k);
        acc
    })
}

fn iterated_ln(depth: u32) -> impl Fn(u64) -> f64 + Send + Sync {
    move |n| {
        // Each layer is y -> ln(y + e), which keeps every argument above 1.
        (0..depth).fold(n as f64, |y, _| (y + std::f64::consts::E).ln())
    }
}

fn param(p: &Params, key: &str, default: f64) -> f64 {
    p.get(key).copied().unwrap_or(default)
}

const ENTRIES: &[NamedSequence] = &[
    NamedSequence {
        name: "sqrt",
        description: "sqrt(n)",
        parameters: &[],
        claims: &[Claim::new(C::StatQuasiCauchy, Sat), Claim::new(C::QuasiCauchy, Sat)],
        build: |_| Ok(Sequence::from_fn("sqrt", |n| (n as f64).sqrt())),
    },
    NamedSequence {
        name: "log10",
        description: "log10(n)",
        parameters: &[],
        claims: &[Claim::new(C::SlowlyOscillating, Sat), Claim::new(C::Cauchy, Vio)],
        build: |_| Ok(Sequence::from_fn("log10", |n| (n as f64).log10())),
    },
    NamedSequence {
        name: "ln",
        description: "ln(n)",
        parameters: &[],
        claims: &[Claim::new(C::SlowlyOscillating, Sat), Claim::new(C::Cauchy, Vio)],
        build: |_| Ok(Sequence::from_fn("ln", |n| (n as f64).ln())),
    },
    NamedSequence {
        name: "iterated-ln",
        description: "depth-fold composition of y -> ln(y + e) applied to n",
        parameters: &[("depth", 2.0)],
        claims: &[Claim::new(C::SlowlyOscillating, Sat)],
        build: |p| {
            let d = param(p, "depth", 2.0);
            if !((1.0..=16.0).contains(&d) && d.fract() == 0.0) {
                return Err(Error::Parameter(format!(
                    "iterated-ln depth must be an integer in 1..=16, got {d}"
                )));
            }
            Ok(Sequence::from_fn(format!("iterated-ln({d})"), iterated_ln(d as u32)))
        },
    },
    NamedSequence {
        name: "harmonic-partial",
        description: "sum_{k<=n} 1/k",
        parameters: &[],
        claims: &[
            Claim::new(C::SlowlyOscillating, Sat),
            Claim::new(C::Cauchy, Vio),
            Claim::new(C::QuasiCauchy, Sat),
        ],
        build: |_| Ok(running_sum("harmonic-partial", |k| 1.0 / k as f64)),
    },
    NamedSequence {
        name: "cos-6-log",
        description: "cos(6 log(n + 1)), natural logarithm",
        parameters: &[],
        claims: &[Claim::new(C::SlowlyOscillating, Sat), Claim::new(C::Cauchy, Vio)],
        build: |_| Ok(Sequence::from_fn("cos-6-log", |n| (6.0 * ((n + 1) as f64).ln()).cos())),
    },
    NamedSequence {
        name: "cos-pi-sqrt",
        description: "cos(pi sqrt(n))",
        parameters: &[],
        claims: &[
            Claim::new(C::QuasiCauchy, Sat),
            Claim::new(C::SlowlyOscillating, Vio),
            Claim::new(C::Cauchy, Vio),
        ],
        build: |_| {
            Ok(Sequence::from_fn("cos-pi-sqrt", |n| {
                (std::f64::consts::PI * (n as f64).sqrt()).cos()
            }))
        },
    },
    NamedSequence {
        name: "nested-harmonic",
        description: "sum_{k<=n} (1/k) sum_{j<=k} 1/j",
        parameters: &[],
        claims: &[Claim::new(C::QuasiCauchy, Sat), Claim::new(C::Cauchy, Vio)],
        build: |_| {
            let (mut k, mut inner, mut outer) = (0u64, 0.0, 0.0);
            Ok(Sequence::from_recurrence("nested-harmonic", move || {
                k += 1;
                inner += 1.0 / k as f64;
                outer += inner / k as f64;
                outer
            }))
        },
    },
    NamedSequence {
        name: "fibonacci-ratio",
        description: "F_(n+1) / F_n",
        parameters: &[],
        claims: &[
            Claim::new(C::Convergent, Sat),
            Claim::new(C::Cauchy, Sat),
            Claim::new(C::StatConvergent, Sat),
        ],
        build: |_| {
            let mut r: Option<f64> = None;
            Ok(Sequence::from_recurrence("fibonacci-ratio", move || {
                let next = r.map_or(1.0, |v| 1.0 + 1.0 / v);
                r = Some(next);
                next
            }))
        },
    },
    NamedSequence {
        name: "identity",
        description: "n",
        parameters: &[],
        claims: &[
            Claim::new(C::StatUpHalfQuasiCauchy, Sat),
            Claim::new(C::StatDownHalfQuasiCauchy, Vio),
            Claim::new(C::UpHalfCauchy, Sat),
        ],
        build: |_| Ok(Sequence::identity()),
    },
    NamedSequence {
        name: "negated-identity",
        description: "-n",
        parameters: &[],
        claims: &[
            Claim::new(C::StatUpHalfQuasiCauchy, Vio),
            Claim::new(C::StatDownHalfQuasiCauchy, Sat),
            Claim::new(C::DownHalfCauchy, Sat),
        ],
        build: |_| Ok(Sequence::from_fn("negated-identity", |n| -(n as f64))),
    },
    NamedSequence {
        name: "constant",
        description: "c",
        parameters: &[("c", 1.0)],
        claims: &[Claim::new(C::Convergent, Sat), Claim::new(C::StatQuasiCauchy, Sat)],
        build: |p| {
            let c = param(p, "c", 1.0);
            if !c.is_finite() {
                return Err(Error::Parameter("constant value must be finite".into()));
            }
            Ok(Sequence::constant(c))
        },
    },
    NamedSequence {
        name: "alternating",
        description: "(-1)^n",
        parameters: &[],
        claims: &[Claim::new(C::HalfStatQuasiCauchy, Vio), Claim::new(C::StatQuasiCauchy, Vio)],
        build: |_| Ok(Sequence::from_fn("alternating", |n| if n % 2 == 0 { 1.0 } else { -1.0 })),
    },
    NamedSequence {
        name: "ones-at-squares",
        description: "1 when n is a perfect square, else 0",
        parameters: &[],
        claims: &[
            Claim::new(C::StatConvergent, Sat),
            Claim::new(C::StatQuasiCauchy, Sat),
            Claim::new(C::Convergent, Vio),
        ],
        build: |_| {
            Ok(Sequence::from_fn("ones-at-squares", |n| {
                let r = (n as f64).sqrt() as u64;
                f64::from(u8::from((r.saturating_sub(1)..=r + 1).any(|s| s * s == n)))
            }))
        },
    },
    NamedSequence {
        name: "reciprocal",
        description: "1/n",
        parameters: &[],
        claims: &[Claim::new(C::Convergent, Sat), Claim::new(C::StatQuasiCauchy, Sat)],
        build: |_| Ok(Sequence::from_fn("reciprocal", |n| 1.0 / n as f64)),
    },
    NamedSequence {
        name: "alternating-reciprocal",
        description: "(-1)^n / n",
        parameters: &[],
        claims: &[Claim::new(C::Convergent, Sat), Claim::new(C::StatQuasiCauchy, Sat)],
        build: |_| {
            Ok(Sequence::from_fn("alternating-reciprocal", |n| {
                (if n % 2 == 0 { 1.0 } else { -1.0 }) / n as f64
            }))
        },
    },
    NamedSequence {
        name: "descending-witness",
        description: "-2(n - 1), the canonical witness in the reals",
        parameters: &[],
        claims: &[Claim::new(C::StatUpHalfQuasiCauchy, Vio)],
        build: |_| Ok(Sequence::from_fn("descending-witness", |n| -2.0 * (n - 1) as f64)),
    },
    NamedSequence {
        name: "uc-pair-interleave",
        description: "(1 + 1/2, 1, 2 + 1/4, 2, ...): pairs (n + 1/(2n), n) whose squares differ by more than 1",
        parameters: &[],
        claims: &[Claim::new(C::StatUpHalfQuasiCauchy, Sat), Claim::new(C::QuasiCauchy, Vio)],
        build: |_| {
            let a = Sequence::from_fn("a", |n| n as f64 + 1.0 / (2.0 * n as f64));
            Ok(Sequence::interleave_pairs(&a, &Sequence::identity()).renamed("uc-pair-interleave"))
        },
    },
];

fn lookup(name: &str) -> Result<&'static NamedSequence> {
    ENTRIES
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::UnknownSequence(name.to_owned()))
}

/// Builds a catalogue member. Missing parameters take their defaults;
/// unknown parameter names are rejected.
pub fn get(name: &str, params: &Params) -> Result<Sequence> {
    let entry = lookup(name)?;
    if let Some(bad) = params.keys().find(|k| !entry.parameters.iter().any(|(p, _)| p == k)) {
        return Err(Error::Parameter(format!("`{name}` has no parameter `{bad}`")));
    }
    Ok((entry.build)(params)?.with_claims(entry.claims.to_vec()))
}

pub fn names() -> Vec<&'static str> {
    ENTRIES.iter().map(|e| e.name).collect()
}

pub fn list() -> Vec<CatalogueEntry> {
    ENTRIES
        .iter()
        .map(|e| CatalogueEntry {
            name: e.name,
            description: e.description,
            parameters: e.parameters.iter().copied().collect(),
            claims: e.claims.to_vec(),
        })
        .collect()
}

/// Every member at its default parameters, in catalogue order.
pub fn all() -> Vec<Sequence> {
    ENTRIES
        .iter()
        .map(|e| get(e.name, &Params::new()).expect("defaults are valid"))
        .collect()
}

/// Members whose claims include ordinary convergence.
pub fn convergent_members() -> Vec<Sequence> {
    all()
        .into_iter()
        .filter(|s| s.claims().contains(&Claim::new(C::Convergent, Sat)))
        .collect()
}

/// `base + scale * weight(n) * u_n` with `u_n` uniform in `[-1, 1]` from a
/// seeded stream.
fn jittered(base: Sequence, seed: u64, scale: f64, weight: fn(u64) -> f64) -> Sequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = 0u64;
    let name = format!("{}~jitter({seed})", base.name());
    let noise = Sequence::from_recurrence("noise", move || {
        n += 1;
        scale * weight(n) * rng.random_range(-1.0..=1.0)
    });
    Sequence::zip_with(&base, &noise, name, |a, b| a + b)
}

/// The catalogue plus seeded perturbations of a few members, used as the
/// default corpus for preservation checks.
pub fn default_corpus(seed: u64) -> Vec<Sequence> {
    let mut out = all();
    let p = Params::new();
    out.push(jittered(get("sqrt", &p).expect("registered"), seed, 1e-3, |_| 1.0));
    out.push(jittered(get("reciprocal", &p).expect("registered"), seed + 1, 1.0, |n| {
        1.0 / (n as f64 * n as f64)
    }));
    out.push(jittered(get("cos-6-log", &p).expect("registered"), seed + 2, 1e-3, |_| 1.0));
    out.push(jittered(get("identity", &p).expect("registered"), seed + 3, 0.25, |_| 1.0));
    out
}

pub const DEFAULT_CORPUS_SEED: u64 = 7;
