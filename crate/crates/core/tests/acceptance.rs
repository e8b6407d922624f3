//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the binary exits non-zero if any fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wardlab::catalogue::{self, Params};
use wardlab::classify::{
    cauchy_verdict, half_stat_qc_verdict, slowly_oscillating_verdict, stat_downward_hqc_verdict, stat_qc_verdict,
    stat_upward_hqc_verdict,
};
use wardlab::compact::{
    bounded, descending_witness, descending_witness_sequence, extract_stat_upward_hqc_subsequence, probe,
    stat_downward_compact, stat_upward_compact,
};
use wardlab::config::DEFAULT_EPSILON_GRID;
use wardlab::continuity::{
    implication_lattice_report, shipped_functions, uniform_continuity_witness_search, uniform_limit_preservation,
    Corpus, FunctionSequence, FunctionUnderTest, Property,
};
use wardlab::density::count;
use wardlab::methods::{
    fibonacci_scheme_covering, ordinary_limit, regularity_spotcheck, statistical_limit_estimate, MethodSpec,
};
use wardlab::{AnalysisConfig, IndexMap, IndexPredicate, RealSet, Sequence, Status, Verdict};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn within(limit: Duration, start: Instant) -> Result<Duration, String> {
    let took = start.elapsed();
    if took > limit {
        Err(format!("took {took:?}, limit {limit:?}"))
    } else {
        Ok(took)
    }
}

fn leaf_at(v: &Verdict, eps: f64) -> Result<&Verdict, String> {
    v.leaves()
        .into_iter()
        .find(|l| l.epsilon == Some(eps))
        .ok_or_else(|| format!("no leaf at eps = {eps}"))
}

fn density(v: &Verdict) -> f64 {
    v.final_density().to_f64().unwrap_or(f64::NAN)
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn fibonacci_ratio_limit() -> Outcome {
    const GOLDEN: f64 = 1.6180339887;
    // Independent oracle: integer recurrence, ratio of the last two terms.
    let (mut a, mut b) = (1u128, 1u128);
    for _ in 2..80 {
        (a, b) = (b, a + b);
    }
    let oracle = b as f64 / a as f64;
    ensure!((oracle - GOLDEN).abs() < 1e-9, "oracle {oracle} is off");

    let start = Instant::now();
    let seq = catalogue::get("fibonacci-ratio", &Params::new()).map_err(err)?;
    let cfg = AnalysisConfig::with_horizon(100);
    let ord = ordinary_limit(&seq, &cfg).map_err(err)?;
    let st = statistical_limit_estimate(&seq, &cfg).map_err(err)?;
    let took = within(Duration::from_millis(10), start)?;
    for (what, mv) in [("ordinary", &ord), ("statistical", &st)] {
        let l = mv.limit_estimate.ok_or(format!("{what}: no estimate"))?;
        ensure!((l - oracle).abs() < 1e-9, "{what} estimate {l} vs {oracle}");
        ensure!(mv.verdict.is_satisfied(), "{what} verdict {}", mv.verdict.status);
    }
    Ok(format!("ell = {:.10} in {took:?}", ord.limit_estimate.unwrap()))
}

fn counting_identity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2048);
    let mut checks = 0u64;
    for _ in 0..1000 {
        // Values on a 1/4 grid so that differences land exactly on the
        // epsilon boundaries some of the time.
        let values: Vec<f64> = (0..2048).map(|_| rng.random_range(-8i32..=8) as f64 / 4.0).collect();
        let d = Sequence::from_values("x", values).forward_difference();
        let delta = d.materialize(2047).map_err(err)?.values;
        let at = |k: u64| delta[k as usize - 1];
        for eps in DEFAULT_EPSILON_GRID {
            let both = count(&IndexPredicate::new("|d|>=e", |k| at(k).abs() >= eps), 2047);
            let up = count(&IndexPredicate::new("d>=e", |k| at(k) >= eps), 2047);
            let down = count(&IndexPredicate::new("-d>=e", |k| -at(k) >= eps), 2047);
            ensure!(both == up + down, "{both} != {up} + {down} at eps {eps}");
            checks += 1;
        }
    }
    let took = within(Duration::from_secs(5), start)?;
    Ok(format!("{checks} identities in {took:?}"))
}

fn reflection_duality() -> Outcome {
    let cfg = AnalysisConfig::default();
    let members = catalogue::all();
    for seq in &members {
        let up = stat_upward_hqc_verdict(&seq.reflect(), &cfg).map_err(err)?;
        let down = stat_downward_hqc_verdict(seq, &cfg).map_err(err)?;
        let (lu, ld) = (up.leaves(), down.leaves());
        ensure!(lu.len() == ld.len(), "{}: leaf counts differ", seq.name());
        for (a, b) in lu.iter().zip(&ld) {
            ensure!(a.trace == b.trace, "{}: traces differ at eps {:?}", seq.name(), a.epsilon);
        }
        ensure!(up.status == down.status, "{}: {} vs {}", seq.name(), up.status, down.status);
    }
    Ok(format!("{} members, traces identical", members.len()))
}

fn classification_table() -> Outcome {
    let start = Instant::now();
    let cfg = AnalysisConfig::default();
    let get = |name: &str| catalogue::get(name, &Params::new()).map_err(err);
    let expect = |what: &str, got: Status, want: Status| -> Result<(), String> {
        if got == want {
            Ok(())
        } else {
            Err(format!("{what}: expected {want}, got {got}"))
        }
    };

    let sqrt = get("sqrt")?;
    expect("sqrt statQC", stat_qc_verdict(&sqrt, &cfg).map_err(err)?.status, Status::Satisfied)?;
    let sub = sqrt.subsequence(&IndexMap::squares()).map_err(err)?;
    let sub_v = stat_qc_verdict(&sub, &cfg).map_err(err)?;
    let at1 = leaf_at(&sub_v, 1.0)?;
    expect("sqrt(k^2) statQC at eps 1", at1.status, Status::Violated)?;
    ensure!(density(at1) >= 0.9, "sqrt(k^2) density {}", density(at1));

    let id = get("identity")?;
    expect("identity up", stat_upward_hqc_verdict(&id, &cfg).map_err(err)?.status, Status::Satisfied)?;
    expect("identity down", stat_downward_hqc_verdict(&id, &cfg).map_err(err)?.status, Status::Violated)?;

    let alt = get("alternating")?;
    expect("alternating halfStat", half_stat_qc_verdict(&alt, &cfg).map_err(err)?.status, Status::Violated)?;
    for (side, v) in [
        ("up", stat_upward_hqc_verdict(&alt, &cfg).map_err(err)?),
        ("down", stat_downward_hqc_verdict(&alt, &cfg).map_err(err)?),
    ] {
        let d = density(leaf_at(&v, 1.0)?);
        ensure!((d - 0.5).abs() <= 0.01, "alternating {side} density {d}");
    }

    for name in ["harmonic-partial", "cos-6-log"] {
        let s = get(name)?;
        let so = slowly_oscillating_verdict(&s, &cfg.lambda_grid, &cfg).map_err(err)?;
        expect(&format!("{name} slowlyOscillating"), so.status, Status::Satisfied)?;
        expect(&format!("{name} cauchy"), cauchy_verdict(&s, &cfg).map_err(err)?.status, Status::Violated)?;
    }
    let took = within(Duration::from_secs(30), start)?;
    Ok(format!("all rows reproduced in {took:?}"))
}

fn compactness_probes() -> Outcome {
    for (src, up, down) in [
        ("[0,inf)", true, false),
        ("(-inf,0]", false, true),
        ("[-1,1]", true, true),
        ("R", false, false),
    ] {
        let set: RealSet = src.parse().map_err(err)?;
        let r = probe(&set).map_err(err)?;
        ensure!(
            r.stat_upward_compact == up && r.stat_downward_compact == down,
            "{src}: upward {} downward {}",
            r.stat_upward_compact,
            r.stat_downward_compact
        );
        ensure!(r.bounded == (up && down), "{src}: bounded {}", r.bounded);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for i in 0..50 {
        let mut set = RealSet::empty();
        for _ in 0..rng.random_range(1..=4) {
            let lo = rng.random_range(-100.0..100.0);
            let hi = lo + rng.random_range(0.0..50.0);
            let (lo, hi) = match rng.random_range(0..4) {
                0 => (f64::NEG_INFINITY, hi),
                1 => (lo, f64::INFINITY),
                _ => (lo, hi),
            };
            let piece = RealSet::interval(lo, rng.random(), hi, rng.random()).map_err(err)?;
            set = set.union(&piece);
        }
        let (up, down) = (stat_upward_compact(&set).map_err(err)?, stat_downward_compact(&set).map_err(err)?);
        ensure!(bounded(&set).map_err(err)? == (up && down), "random set {i}: {set}");
    }
    Ok("4 fixed sets and 50 random sets".into())
}

fn witness_soundness() -> Outcome {
    let reals = RealSet::reals();
    let w = descending_witness(&reals, 100).map_err(err)?;
    ensure!(w.values.len() == 100, "witness has {} terms", w.values.len());
    for (j, pair) in w.values.windows(2).enumerate() {
        ensure!(pair[0] - pair[1] == 2.0, "gap at j = {} is {}", j + 1, pair[0] - pair[1]);
    }
    let ext = descending_witness_sequence(&reals).map_err(err)?;
    let v = stat_upward_hqc_verdict(&ext, &AnalysisConfig::default()).map_err(err)?;
    let at1 = leaf_at(&v, 1.0)?;
    ensure!(at1.status == Status::Violated, "extended sequence at eps 1: {}", at1.status);
    ensure!(density(at1) >= 0.99, "density {}", density(at1));
    Ok(format!("gaps 2, final density {}", density(at1)))
}

fn bounded_below_sample(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    match rng.random_range(0..4) {
        0 => (0..len).map(|_| rng.random_range(0.0..10.0)).collect(),
        1 => (0..len).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 } * rng.random_range(0.5..1.0)).collect(),
        2 => {
            let mut x = 0.0f64;
            (0..len)
                .map(|_| {
                    x = (x + rng.random_range(-1.0..1.0)).abs();
                    x
                })
                .collect()
        }
        _ => (1..=len).map(|k| (k as f64).sqrt() * rng.random_range(0.0..1.0)).collect(),
    }
}

fn extraction_soundness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let cfg = AnalysisConfig::with_horizon(4096);
    let mut strategies = std::collections::BTreeMap::new();
    for i in 0..100 {
        let values = bounded_below_sample(&mut rng, 4097);
        let seq = Sequence::from_values(format!("sample-{i}"), values);
        let e = extract_stat_upward_hqc_subsequence(&seq, &cfg).map_err(|e| format!("sample {i}: {e}"))?;
        let ix = e.map.indices().ok_or(format!("sample {i}: map is not explicit"))?;
        ensure!(ix.windows(2).all(|w| w[0] < w[1]), "sample {i}: map not strictly increasing");
        let sub = seq.subsequence(&e.map).map_err(err)?;
        let check = AnalysisConfig::with_horizon(ix.len() as u64 - 1);
        let v = stat_upward_hqc_verdict(&sub, &check).map_err(err)?;
        ensure!(v.is_satisfied(), "sample {i}: subsequence verdict {} ({})", v.status, v.note);
        *strategies.entry(format!("{:?}", e.strategy)).or_insert(0) += 1;
    }
    Ok(format!("100 extractions verified, strategies {strategies:?}"))
}

fn uc_witnesses() -> Outcome {
    let square = |domain: &str| FunctionUnderTest::from_expr("x^2", domain.parse().map_err(err)?).map_err(err);
    let s = uniform_continuity_witness_search(&square("[0,inf)")?, 100, 1.0).map_err(err)?;
    ensure!(s.missing.is_empty(), "no pair for n in {:?}", s.missing);
    for n in 1..=100 {
        let p = s.pairs.iter().find(|p| p.n == n).ok_or(format!("no pair for n = {n}"))?;
        let (fx, fy) = (p.x * p.x, p.y * p.y);
        ensure!((p.x - p.y).abs() < 1.0 / n as f64, "n = {n}: |x - y| = {}", (p.x - p.y).abs());
        ensure!((fx - fy).abs() >= 1.0, "n = {n}: |f(x) - f(y)| = {}", (fx - fy).abs());
    }
    let id = FunctionUnderTest::from_expr("x", RealSet::reals()).map_err(err)?;
    ensure!(uniform_continuity_witness_search(&id, 100, 1.0).map_err(err)?.none_found(), "x on R found pairs");
    let boxed = uniform_continuity_witness_search(&square("[0,10]")?, 100, 1.0).map_err(err)?;
    let late: Vec<u64> = boxed.pairs.iter().map(|p| p.n).filter(|&n| n > 20).collect();
    ensure!(late.is_empty(), "x^2 on [0,10] has pairs for n = {late:?}");
    Ok(format!("100 pairs checked; [0,10] pairs stop at n = {}", boxed.pairs.iter().map(|p| p.n).max().unwrap_or(0)))
}

fn uniform_limit_inclusion() -> Outcome {
    let cfg = AnalysisConfig::with_horizon(10_000);
    let n = 11u64;
    let gap = 1.0 / n as f64;
    ensure!(gap < 0.1, "gap {gap}");
    let cases = [
        (
            FunctionSequence::new(
                "x + 1/n",
                |k, x| x + 1.0 / k as f64,
                FunctionUnderTest::from_expr("x", RealSet::reals()).map_err(err)?,
                n,
                gap,
            )
            .map_err(err)?,
            Sequence::identity(),
        ),
        (
            FunctionSequence::new(
                "x^2 + 1/n",
                |k, x| x * x + 1.0 / k as f64,
                FunctionUnderTest::from_expr("x^2", RealSet::closed(0.0, 1.0).map_err(err)?).map_err(err)?,
                n,
                gap,
            )
            .map_err(err)?,
            Sequence::from_fn("1/k", |k| 1.0 / k as f64),
        ),
    ];
    let mut rows = 0;
    for (fs, seq) in &cases {
        let rep = uniform_limit_preservation(fs, seq, 0.3, &cfg).map_err(err)?;
        ensure!(rep.inclusion_holds, "inclusion fails for {:?}", fs);
        ensure!(!rep.checkpoints.is_empty(), "no checkpoints");
        ensure!(rep.checkpoints.last().unwrap().n == 10_000, "last checkpoint {}", rep.checkpoints.last().unwrap().n);
        for c in &rep.checkpoints {
            ensure!(c.target <= c.cover.iter().sum::<u64>(), "n = {}: {} > {:?}", c.n, c.target, c.cover);
        }
        rows += rep.checkpoints.len();
    }
    Ok(format!("{rows} checkpoints hold up to 10^4"))
}

fn lattice_consistency() -> Outcome {
    let cfg = AnalysisConfig::default();
    let corpus = Corpus::new(catalogue::default_corpus(catalogue::DEFAULT_CORPUS_SEED), &cfg).map_err(err)?;
    let mut step_witness = None;
    for f in shipped_functions() {
        let r = implication_lattice_report(&f, &corpus).map_err(err)?;
        if let Some(imp) = r.implications.iter().find(|i| !i.consistent) {
            return Err(format!("{}: {} => {} contradicted", f.name(), imp.from, imp.to));
        }
        if f.name() == "step(0)" {
            let p = r.get(Property::UpToUp).ok_or("no dS+ result")?;
            ensure!(p.verdict.status == Status::Violated, "step(0) dS+ is {}", p.verdict.status);
            step_witness = p.witness_sequence.clone();
        }
    }
    let w = step_witness.ok_or("step(0) dS+ has no witness")?;
    Ok(format!("6 functions consistent; step(0) dS+ witness {w}"))
}

fn regularity() -> Outcome {
    let start = Instant::now();
    let cfg = AnalysisConfig::default();
    let members = catalogue::convergent_members();
    let names: Vec<&str> = members.iter().map(|s| s.name()).collect();
    for want in ["constant", "reciprocal", "fibonacci-ratio"] {
        ensure!(names.iter().any(|n| n.starts_with(want)), "{want} missing from convergent members {names:?}");
    }
    let scheme = fibonacci_scheme_covering(cfg.horizon).map_err(err)?;
    for spec in [MethodSpec::Statistical, MethodSpec::LacunaryStatistical(scheme.clone()), MethodSpec::NTheta(scheme)] {
        let r = regularity_spotcheck(&spec, &members, &cfg).map_err(err)?;
        ensure!(r.all_passed(), "{} fails on {:?}", spec.method().as_str(), r.failures);
    }
    let took = within(Duration::from_secs(5), start)?;
    Ok(format!("3 methods on {} members in {took:?}", members.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("fibonacci ratio limit", fibonacci_ratio_limit),
        ("counting identity", counting_identity),
        ("reflection duality", reflection_duality),
        ("classification table", classification_table),
        ("compactness probes", compactness_probes),
        ("witness soundness", witness_soundness),
        ("extraction soundness", extraction_soundness),
        ("uniform continuity witnesses", uc_witnesses),
        ("uniform limit inclusion", uniform_limit_inclusion),
        ("lattice consistency", lattice_consistency),
        ("regularity spot-check", regularity),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
