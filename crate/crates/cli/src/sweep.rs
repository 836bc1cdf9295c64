use std::fmt::Write as _;

use anyhow::{bail, Context, Result};
use clap::Args;
use nilsoliton_core::io::AnyBracket;
use nilsoliton_core::{catalog, Rational};
use rayon::prelude::*;
use serde_json::json;

use crate::report::{self, Settings, Verdict};
use crate::{emit, parse_params, Global};

#[derive(Args, Clone)]
pub struct SweepArgs {
    /// Catalog family, e.g. ex7 or type_pq_random.
    family: String,
    /// Range start for the swept parameter.
    #[arg(long, allow_hyphen_values = true)]
    from: Option<String>,
    /// Range end (inclusive).
    #[arg(long, allow_hyphen_values = true)]
    to: Option<String>,
    #[arg(long, default_value = "1")]
    step: String,
    /// Explicit comma-separated values instead of a range.
    #[arg(long, allow_hyphen_values = true)]
    values: Option<String>,
    /// Sweep seeds `--seed .. --seed + N` as the last parameter.
    #[arg(long)]
    seeds: Option<u64>,
    /// Parameters placed before the swept one, comma-separated.
    #[arg(long, allow_hyphen_values = true)]
    fixed: Option<String>,
}

struct Row {
    param: String,
    verdict: Option<Verdict>,
    f: Option<f64>,
    phi_type: Option<String>,
    error: Option<String>,
}

fn sweep_values(args: &SweepArgs, g: &Global) -> Result<Vec<Rational>> {
    if let Some(n) = args.seeds {
        return Ok((g.seed..g.seed + n).map(|s| Rational::from_integer(s.into())).collect());
    }
    if let Some(v) = &args.values {
        return parse_params(v.split(',').map(str::trim));
    }
    let (Some(from), Some(to)) = (&args.from, &args.to) else {
        bail!("sweep needs --values, --seeds or --from/--to");
    };
    let from = parse_params(std::iter::once(from.as_str()))?.remove(0);
    let to = parse_params(std::iter::once(to.as_str()))?.remove(0);
    let step = parse_params(std::iter::once(args.step.as_str()))?.remove(0);
    if step <= Rational::from_integer(0.into()) {
        bail!("--step must be positive");
    }
    let mut out = Vec::new();
    let mut t = from;
    while t <= to {
        out.push(t.clone());
        t += &step;
    }
    Ok(out)
}

fn one(family: &str, prefix: &[Rational], t: &Rational, g: &Global) -> Row {
    let mut params = prefix.to_vec();
    params.push(t.clone());
    let mut row = Row { param: t.to_string(), verdict: None, f: None, phi_type: None, error: None };
    let result = catalog::get(family, &params).map_err(anyhow::Error::from).and_then(|mu| {
        let mu = match g.mode {
            Some(m) => AnyBracket::Rational(mu).into_mode(m),
            None => AnyBracket::Rational(mu),
        };
        let input = json!({ "source": format!("catalog:{family}"), "params": params.iter().map(|p| p.to_string()).collect::<Vec<_>>() });
        let s = Settings { tol: g.tol, max_iter: g.max_iter, full: false };
        Ok(match &mu {
            AnyBracket::Rational(b) => report::build(b, input, &s)?,
            AnyBracket::Float(b) => report::build(b, input, &s)?,
        })
    });
    match result {
        Ok(r) => {
            row.verdict = Some(r.verdict);
            row.f = r.f_limit;
            row.phi_type = r.phi_type;
        }
        Err(e) => row.error = Some(format!("{e:#}")),
    }
    row
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn run(args: &SweepArgs, g: &Global) -> Result<()> {
    let values = sweep_values(args, g)?;
    let prefix = match &args.fixed {
        Some(f) => parse_params(f.split(',').map(str::trim).filter(|s| !s.is_empty()))?,
        None => Vec::new(),
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(g.jobs).build().context("starting worker pool")?;
    // par_iter + collect keeps input order
    let rows: Vec<Row> = pool.install(|| values.par_iter().map(|t| one(&args.family, &prefix, t, g)).collect());

    let mut csv = String::from("param,verdict,F,phi_type,error\n");
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            csv_field(&r.param),
            r.verdict.map(Verdict::as_str).unwrap_or(""),
            r.f.map(|f| format!("{f:.10}")).unwrap_or_default(),
            csv_field(r.phi_type.as_deref().unwrap_or("")),
            csv_field(r.error.as_deref().unwrap_or("")),
        );
    }
    emit(&g.out, &csv)?;

    let mut counts = std::collections::BTreeMap::<&str, usize>::new();
    for r in &rows {
        *counts.entry(r.verdict.map(Verdict::as_str).unwrap_or("error")).or_default() += 1;
    }
    let mut types = std::collections::BTreeMap::<&str, usize>::new();
    for r in &rows {
        if let Some(t) = &r.phi_type {
            *types.entry(t.as_str()).or_default() += 1;
        }
    }
    let n = rows.len().max(1) as f64;
    let fractions: std::collections::BTreeMap<&str, f64> = types.iter().map(|(t, c)| (*t, *c as f64 / n)).collect();
    eprintln!("{}", json!({ "total": rows.len(), "verdicts": counts, "types": types, "type_fractions": fractions }));
    Ok(())
}
