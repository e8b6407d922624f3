mod input;
mod report;

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;
use wardlab::catalogue;
use wardlab::classify::classify;
use wardlab::compact::{ascending_witness, descending_witness, probe};
use wardlab::config::{
    DEFAULT_EPSILON_GRID, DEFAULT_FAIL_THRESHOLD, DEFAULT_HORIZON, DEFAULT_LAMBDA_GRID, DEFAULT_PASS_TOLERANCE,
};
use wardlab::continuity::{implication_lattice_report, uniform_continuity_witness_search, Corpus, FunctionUnderTest};
use wardlab::density::{density_limit_verdict, format_ratio};
use wardlab::methods::{fibonacci_scheme_covering, Method, MethodSpec};
use wardlab::{AnalysisConfig, Error, RealSet, SequenceClass, Status};

use report::{verdict_rows, CommandEcho, Format, Outcome, Report};

#[derive(Parser)]
#[command(name = "wardlab", version, about = "Finite-horizon verdicts for statistical and ward-type sequence classes")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Number of terms examined.
    #[arg(long, global = true, env = "WARDLAB_DEFAULT_HORIZON")]
    horizon: Option<u64>,
    /// Epsilon grid, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    eps: Vec<f64>,
    /// Largest final density (or sup statistic) that still counts as zero.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Smallest final density (or sup statistic) that counts as a violation.
    #[arg(long, global = true)]
    fail: Option<f64>,
    /// Lambda grid for slow oscillation, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    lambda: Vec<f64>,
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Write the report into this directory instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a sequence against the sequence classes.
    Classify {
        /// Catalogue name, @file.csv, or an expression in n.
        #[arg(long)]
        seq: String,
        /// Class labels, comma separated; all classes by default.
        #[arg(long, value_delimiter = ',')]
        classes: Vec<SequenceClass>,
        /// Catalogue parameter, name=value.
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Limit verdict under one summability method.
    Limit {
        #[arg(long)]
        seq: String,
        #[arg(long)]
        method: Method,
        /// fib:R or @file with one boundary per line.
        #[arg(long)]
        theta: Option<String>,
        /// Candidate limit; estimated when omitted.
        #[arg(long, allow_hyphen_values = true)]
        ell: Option<f64>,
        #[arg(long = "param")]
        params: Vec<String>,
    },
    /// Natural density of an index set.
    Density {
        /// squares, evens, or @file listing member indices.
        #[arg(long)]
        pred: String,
    },
    /// Which class preservation properties a function has on a corpus.
    Lattice {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, default_value = "R")]
        domain: String,
        /// `default`, or catalogue names.
        #[arg(long, num_args = 1.., default_value = "default")]
        corpus: Vec<String>,
    },
    /// Compactness of a set, via boundedness.
    Compact {
        #[arg(long)]
        set: String,
        /// Also list n terms of each witness sequence that exists.
        #[arg(long)]
        witness: Option<u64>,
    },
    /// Pairs showing that a function is not uniformly continuous.
    Ucwitness {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        domain: String,
        #[arg(long)]
        eps0: f64,
        #[arg(long)]
        nmax: u64,
    },
    /// List the named sequences.
    Catalogue,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify { .. } => "classify",
            Command::Limit { .. } => "limit",
            Command::Density { .. } => "density",
            Command::Lattice { .. } => "lattice",
            Command::Compact { .. } => "compact",
            Command::Ucwitness { .. } => "ucwitness",
            Command::Catalogue => "catalogue",
        }
    }
}

fn config(c: &Common) -> Result<AnalysisConfig> {
    let mut eps = if c.eps.is_empty() { DEFAULT_EPSILON_GRID.to_vec() } else { c.eps.clone() };
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    let mut lambda = if c.lambda.is_empty() { DEFAULT_LAMBDA_GRID.to_vec() } else { c.lambda.clone() };
    lambda.sort_by(|a, b| b.total_cmp(a));
    lambda.dedup();
    let cfg = AnalysisConfig {
        horizon: c.horizon.unwrap_or(DEFAULT_HORIZON),
        epsilon_grid: eps,
        pass_tolerance: c.tol.unwrap_or(DEFAULT_PASS_TOLERANCE),
        fail_threshold: c.fail.unwrap_or(DEFAULT_FAIL_THRESHOLD),
        lambda_grid: lambda,
        ..AnalysisConfig::default()
    };
    cfg.validate()?;
    Ok(cfg)
}

/// File-backed sequences are finite: shrink the horizon to what they can
/// support (`extra` terms beyond the horizon) and say so.
fn clip(cfg: &mut AnalysisConfig, len: Option<u64>, extra: u64) -> Result<()> {
    if let Some(len) = len {
        if len <= extra {
            bail!("the sequence has {len} terms; at least {} are needed", extra + 1);
        }
        if cfg.horizon + extra > len {
            eprintln!(
                "note: horizon clipped from {} to {} (the sequence has {len} terms)",
                cfg.horizon,
                len - extra
            );
            cfg.horizon = len - extra;
        }
    }
    Ok(())
}

fn status_line(out: &mut String, label: &str, status: Status, detail: &str) {
    let _ = writeln!(out, "  {label:<26} {:<13} {detail}", status.as_str());
}

fn run_classify(seq: &str, classes: &[SequenceClass], params: &[String], cfg: &mut AnalysisConfig) -> Result<Outcome> {
    let s = input::sequence(seq, &input::params(params)?)?;
    clip(cfg, s.len(), 1)?;
    let labels = if classes.is_empty() { SequenceClass::ALL.to_vec() } else { classes.to_vec() };
    let report = classify(&s, &labels, cfg)?;
    let mut text = format!("{} (horizon {})\n", report.sequence_name, cfg.horizon);
    let mut rows = Vec::new();
    for e in &report.entries {
        status_line(&mut text, e.class.label(), e.verdict.status, &e.verdict.note);
        if e.verdict.status == Status::Violated && !e.verdict.witness_indices.is_empty() {
            let _ = writeln!(text, "  {:<26} witnesses {:?}", "", e.verdict.witness_indices);
        }
        rows.extend(verdict_rows(e.class.label(), &e.verdict));
    }
    let settled = report.entries.iter().all(|e| e.verdict.status.is_decisive());
    Ok(Outcome {
        results: vec![serde_json::to_value(&report)?],
        rows: Some(rows),
        text,
        settled,
    })
}

fn run_limit(
    seq: &str,
    method: Method,
    theta: Option<&str>,
    ell: Option<f64>,
    params: &[String],
    cfg: &mut AnalysisConfig,
) -> Result<Outcome> {
    let s = input::sequence(seq, &input::params(params)?)?;
    clip(cfg, s.len(), 0)?;
    let scheme = || match theta {
        Some(t) => input::scheme(t),
        None => Ok(fibonacci_scheme_covering(cfg.horizon)?),
    };
    let spec = match method {
        Method::Ordinary => MethodSpec::Ordinary,
        Method::Statistical => MethodSpec::Statistical,
        Method::LacunaryStatistical => MethodSpec::LacunaryStatistical(scheme()?),
        Method::NTheta => MethodSpec::NTheta(scheme()?),
    };
    if theta.is_some() && matches!(method, Method::Ordinary | Method::Statistical) {
        bail!("--theta only applies to the stheta and ntheta methods");
    }
    let mv = spec.verdict(&s, ell, cfg)?;
    let mut text = format!("{} under {} (horizon {})\n", s.name(), method, cfg.horizon);
    let limit = mv.limit_estimate.map(|l| format!("limit {l}")).unwrap_or_default();
    status_line(&mut text, method.as_str(), mv.verdict.status, &limit);
    let _ = writeln!(text, "  {}", mv.verdict.note);
    Ok(Outcome {
        rows: Some(verdict_rows(method.as_str(), &mv.verdict)),
        settled: mv.verdict.status.is_decisive(),
        results: vec![serde_json::to_value(&mv)?],
        text,
    })
}

fn run_density(pred: &str, cfg: &AnalysisConfig) -> Result<Outcome> {
    let set = input::IndexSet::parse(pred)?;
    let p = set.predicate();
    let v = density_limit_verdict(&p, cfg);
    let mut text = format!("density of {} (horizon {})\n", p.description(), cfg.horizon);
    status_line(&mut text, "zero density", v.status, &format!("final density {}", format_ratio(v.final_density())));
    Ok(Outcome {
        rows: Some(verdict_rows(p.description(), &v)),
        settled: v.status.is_decisive(),
        results: vec![json!({ "predicate": p.description(), "verdict": v })],
        text,
    })
}

fn run_lattice(function: &str, domain: &str, corpus: &[String], cfg: &AnalysisConfig) -> Result<Outcome> {
    let domain: RealSet = domain.parse()?;
    let f = FunctionUnderTest::from_expr(function, domain)?;
    let members = match corpus {
        [one] if one == "default" => catalogue::default_corpus(catalogue::DEFAULT_CORPUS_SEED),
        names => names
            .iter()
            .map(|n| catalogue::get(n, &Default::default()))
            .collect::<wardlab::Result<_>>()?,
    };
    let corpus = Corpus::new(members, cfg)?;
    let r = implication_lattice_report(&f, &corpus)?;
    let mut text = format!("{} on {} ({} corpus members)\n", r.function, r.domain, corpus.len());
    let mut rows = Vec::new();
    for p in &r.per_property {
        let detail = p.witness_sequence.as_deref().map(|w| format!("witness {w}")).unwrap_or_default();
        status_line(&mut text, p.property.label(), p.verdict.status, &detail);
        rows.extend(verdict_rows(p.property.label(), &p.verdict));
    }
    for i in &r.implications {
        let arrow = if i.equivalence { "<=>" } else { "=>" };
        let _ = writeln!(
            text,
            "  {} {arrow} {}: {}",
            i.from.label(),
            i.to.label(),
            if i.consistent { "consistent" } else { "CONTRADICTED" }
        );
    }
    if !r.outside_domain.is_empty() {
        let _ = writeln!(text, "  outside the domain: {}", r.outside_domain.join(", "));
    }
    Ok(Outcome {
        settled: r.all_decisive() && r.consistent(),
        results: vec![serde_json::to_value(&r)?],
        rows: Some(rows),
        text,
    })
}

fn run_compact(set: &str, witness: Option<u64>) -> Result<Outcome> {
    let set: RealSet = set.parse()?;
    let r = probe(&set)?;
    let mut result = serde_json::to_value(&r)?;
    let mut text = format!("{}\n", r.set);
    for (label, v) in [
        ("boundedBelow", r.bounded_below),
        ("boundedAbove", r.bounded_above),
        ("statUpwardCompact", r.stat_upward_compact),
        ("statDownwardCompact", r.stat_downward_compact),
        ("bounded", r.bounded),
    ] {
        let _ = writeln!(text, "  {label:<20} {v}");
    }
    if let Some(n) = witness {
        for (key, w) in [
            ("descendingWitness", descending_witness(&set, n)),
            ("ascendingWitness", ascending_witness(&set, n)),
        ] {
            match w {
                Ok(p) => {
                    let _ = writeln!(text, "  {key:<20} {:?}", p.values);
                    result[key] = json!(p.values);
                }
                Err(Error::NoWitness(_)) => {}
                Err(e) => return Err(e.into()),
            }
        }
    }
    Ok(Outcome {
        results: vec![result],
        rows: None,
        text,
        settled: true,
    })
}

fn run_ucwitness(function: &str, domain: &str, eps0: f64, nmax: u64) -> Result<Outcome> {
    let f = FunctionUnderTest::from_expr(function, domain.parse()?)?;
    let s = uniform_continuity_witness_search(&f, nmax, eps0)?;
    let mut text = format!("{} on {domain}, eps0 = {eps0}\n", s.function);
    for p in &s.pairs {
        let _ = writeln!(text, "  n = {:<5} x = {:<24} y = {:<24} |f(x) - f(y)| = {}", p.n, p.x, p.y, (p.fx - p.fy).abs());
    }
    let _ = writeln!(
        text,
        "  {} of {nmax} indices have a pair{}",
        s.pairs.len(),
        if s.certifies_non_uniform() { "; not uniformly continuous" } else { "" }
    );
    Ok(Outcome {
        results: vec![serde_json::to_value(&s)?],
        rows: None,
        text,
        settled: true,
    })
}

fn run_catalogue() -> Result<Outcome> {
    let entries = catalogue::list();
    let mut text = String::new();
    for e in &entries {
        let _ = writeln!(text, "{:<24} {}", e.name, e.description);
    }
    Ok(Outcome {
        results: entries.iter().map(serde_json::to_value).collect::<serde_json::Result<_>>()?,
        rows: None,
        text,
        settled: true,
    })
}

fn run(cli: Cli, args: Vec<String>) -> Result<bool> {
    let mut cfg = config(&cli.common)?;
    let name = cli.command.name();
    let outcome = match &cli.command {
        Command::Classify { seq, classes, params } => run_classify(seq, classes, params, &mut cfg)?,
        Command::Limit { seq, method, theta, ell, params } => {
            run_limit(seq, *method, theta.as_deref(), *ell, params, &mut cfg)?
        }
        Command::Density { pred } => run_density(pred, &cfg)?,
        Command::Lattice { function, domain, corpus } => run_lattice(function, domain, corpus, &cfg)?,
        Command::Compact { set, witness } => run_compact(set, *witness)?,
        Command::Ucwitness { function, domain, eps0, nmax } => run_ucwitness(function, domain, *eps0, *nmax)?,
        Command::Catalogue => run_catalogue()?,
    };
    let report = Report {
        schema_version: report::SCHEMA_VERSION,
        command: CommandEcho { name, args },
        config: (&cfg).into(),
        results: outcome.results.clone(),
        timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
    };
    let bytes = report::render(&report, &outcome, cli.common.format)?;
    report::emit(&bytes, name, cli.common.format, cli.common.out.as_deref())?;
    Ok(outcome.settled)
}

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli, args.into_iter().skip(1).collect()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
