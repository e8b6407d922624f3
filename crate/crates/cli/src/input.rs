use std::collections::BTreeSet;
use std::fs::File;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use wardlab::catalogue::{self, Params};
use wardlab::expr::Expr;
use wardlab::methods::{fibonacci_scheme, LacunaryScheme};
use wardlab::{IndexPredicate, Sequence};

/// Numbers from a one-value-per-line CSV file. A first line that does not
/// parse as a number is taken as a header.
fn read_numbers(path: &Path) -> Result<Vec<String>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut out = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: unreadable line {}", path.display(), i + 1))?;
        if record.len() != 1 {
            bail!(
                "{}:{}: expected one value per line, found {} fields",
                path.display(),
                i + 1,
                record.len()
            );
        }
        out.push((i + 1, record[0].to_owned()));
    }
    if let Some((_, first)) = out.first() {
        if first.parse::<f64>().is_err() {
            out.remove(0);
        }
    }
    let mut values = Vec::with_capacity(out.len());
    for (line, text) in out {
        if text.is_empty() {
            continue;
        }
        values.push(
            text.parse::<f64>()
                .map(|_| text.clone())
                .map_err(|_| anyhow!("{}:{line}: `{text}` is not a number", path.display()))?,
        );
    }
    Ok(values)
}

pub fn read_values(path: &Path) -> Result<Vec<f64>> {
    let values: Vec<f64> = read_numbers(path)?
        .iter()
        .map(|s| s.parse().expect("validated"))
        .collect();
    if let Some(v) = values.iter().find(|v| !v.is_finite()) {
        bail!("{}: non-finite value {v}", path.display());
    }
    if values.is_empty() {
        bail!("{}: no values", path.display());
    }
    Ok(values)
}

fn read_indices(path: &Path) -> Result<Vec<u64>> {
    read_numbers(path)?
        .iter()
        .map(|s| {
            s.parse::<u64>()
                .map_err(|_| anyhow!("{}: `{s}` is not a non-negative integer", path.display()))
        })
        .collect()
}

/// Resolves `--seq`: `@file.csv`, a catalogue name, or an expression in `n`.
pub fn sequence(spec: &str, params: &Params) -> Result<Sequence> {
    if let Some(path) = spec.strip_prefix('@') {
        let values = read_values(Path::new(path))?;
        return Ok(Sequence::from_values(path, values));
    }
    if catalogue::names().contains(&spec) {
        return Ok(catalogue::get(spec, params)?);
    }
    if !params.is_empty() {
        bail!("--param only applies to catalogue sequences");
    }
    let bare_name = spec.chars().all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_');
    if bare_name && !matches!(spec, "n" | "x" | "pi" | "e") && spec.parse::<f64>().is_err() {
        bail!("unknown catalogue sequence `{spec}`; run `wardlab catalogue` for names");
    }
    let expr = Expr::parse(spec).map_err(|e| {
        anyhow!("`{spec}` is not a catalogue name, a @file or a valid expression ({e}); run `wardlab catalogue` for names")
    })?;
    Ok(Sequence::from_fn(spec, move |n| expr.eval(n as f64)))
}

pub fn params(pairs: &[String]) -> Result<Params> {
    pairs
        .iter()
        .map(|p| {
            let (k, v) = p
                .split_once('=')
                .ok_or_else(|| anyhow!("parameter `{p}` is not of the form name=value"))?;
            let v: f64 = v.trim().parse().map_err(|_| anyhow!("parameter `{k}` has non-numeric value `{v}`"))?;
            Ok((k.trim().to_owned(), v))
        })
        .collect()
}

/// Index sets for `density --pred`.
pub enum IndexSet {
    Squares,
    Evens,
    Listed(String, BTreeSet<u64>),
}

impl IndexSet {
    pub fn parse(spec: &str) -> Result<Self> {
        match spec {
            "squares" => Ok(IndexSet::Squares),
            "evens" => Ok(IndexSet::Evens),
            _ => match spec.strip_prefix('@') {
                Some(path) => {
                    let members = read_indices(Path::new(path))?;
                    if members.contains(&0) {
                        bail!("{path}: index 0 is not valid (indices start at 1)");
                    }
                    Ok(IndexSet::Listed(path.to_owned(), members.into_iter().collect()))
                }
                None => bail!("unknown predicate `{spec}` (expected squares, evens or @file)"),
            },
        }
    }

    pub fn predicate(&self) -> IndexPredicate<'_> {
        match self {
            IndexSet::Squares => IndexPredicate::new("squares", |k| {
                let r = (k as f64).sqrt() as u64;
                (r.saturating_sub(1)..=r + 1).any(|s| s * s == k)
            }),
            IndexSet::Evens => IndexPredicate::new("evens", |k| k % 2 == 0),
            IndexSet::Listed(name, set) => IndexPredicate::new(name.clone(), move |k| set.contains(&k)),
        }
    }
}

/// `fib:R` or `@file` with one boundary per line.
pub fn scheme(spec: &str) -> Result<LacunaryScheme> {
    if let Some(r) = spec.strip_prefix("fib:") {
        let r: usize = r.parse().map_err(|_| anyhow!("`{spec}`: R must be a positive integer"))?;
        return Ok(fibonacci_scheme(r)?);
    }
    if let Some(path) = spec.strip_prefix('@') {
        return Ok(LacunaryScheme::new(read_indices(Path::new(path))?)?);
    }
    bail!("unknown scheme `{spec}` (expected fib:R or @file)")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_line_is_optional() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("v.csv");
        std::fs::write(&p, "x\n1.5\n\n-2\n").unwrap();
        assert_eq!(read_values(&p).unwrap(), vec![1.5, -2.0]);
        std::fs::write(&p, "3\n4\n").unwrap();
        assert_eq!(read_values(&p).unwrap(), vec![3.0, 4.0]);
        std::fs::write(&p, "1,5\n").unwrap();
        assert!(read_values(&p).is_err());
    }

    #[test]
    fn squares_predicate() {
        let set = IndexSet::parse("squares").unwrap();
        let p = set.predicate();
        let hits: Vec<u64> = (1..=50).filter(|&k| p.test(k)).collect();
        assert_eq!(hits, vec![1, 4, 9, 16, 25, 36, 49]);
        assert!(IndexSet::parse("primes").is_err());
    }

    #[test]
    fn parameters_and_schemes() {
        let p = params(&["depth=3".into()]).unwrap();
        assert_eq!(p["depth"], 3.0);
        assert!(params(&["depth".into()]).is_err());
        assert!(params(&["depth=deep".into()]).is_err());
        assert_eq!(scheme("fib:5").unwrap().boundaries(), &[0, 2, 3, 5, 8, 13]);
        assert!(scheme("geo:2").is_err());
    }

    #[test]
    fn sequence_resolution() {
        let none = Params::new();
        assert_eq!(sequence("sqrt", &none).unwrap().value(4).unwrap(), 2.0);
        assert_eq!(sequence("n^2 + 1", &none).unwrap().value(3).unwrap(), 10.0);
        let err = sequence("squirt", &none).unwrap_err().to_string();
        assert!(err.contains("unknown catalogue sequence"), "{err}");
        assert!(sequence("n^2", &params(&["c=2".into()]).unwrap()).is_err());
    }
}
