mod report;
mod sweep;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use nilsoliton_core::io::{self, AnyBracket, ScalarMode};
use nilsoliton_core::kempf_ness::MinimizeOptions;
use nilsoliton_core::pre_einstein::{self, OrbitOptions};
use nilsoliton_core::soliton::{self, DescentOptions, FlowOptions};
use nilsoliton_core::{catalog, nice, poly, scalar, strata, BracketTensor, Error, Rational, Scalar};
use serde_json::{json, Value};

use report::{num, Settings};

#[derive(Parser)]
#[command(name = "nilsoliton", version, about = "Decide whether a nilpotent Lie algebra is an Einstein nilradical")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Zero threshold for float computations.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Override the scalar mode of the input.
    #[arg(long, global = true)]
    mode: Option<ScalarMode>,
    /// Iteration budget for orbit searches.
    #[arg(long, global = true, default_value_t = 20000)]
    max_iter: usize,
    /// First seed for seeded sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for sweeps (0 = all cores).
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Verdict report; numeric stages run only when no exact criterion applies.
    Check { input: String },
    /// Verdict report with every stage, including the Ricci flow.
    Report { input: String },
    /// Normalized bracket flow; writes the "t,F,grad_norm" trajectory as CSV.
    Flow {
        input: String,
        #[arg(long, default_value_t = 0.05)]
        step: f64,
        #[arg(long, default_value_t = 1e4)]
        max_t: f64,
        #[arg(long, default_value_t = 10)]
        sample_every: usize,
        /// Also write every sampled bracket as JSON lines.
        #[arg(long)]
        snapshots: Option<PathBuf>,
    },
    /// Gradient descent of F along the GL(n)-orbit.
    Descent { input: String },
    /// Pre-Einstein derivation, necessary conditions and the orbit test.
    Phi {
        input: String,
        /// Skip the orbit closedness test.
        #[arg(long)]
        no_orbit: bool,
    },
    /// Stratum datum and inequalities for beta (default: beta of the bracket).
    Stratum {
        input: String,
        /// Comma-separated diagonal of beta, e.g. "-1,-1/2,0,1/2".
        #[arg(long)]
        beta: Option<String>,
        /// Run the numeric semistability search.
        #[arg(long)]
        semistable: bool,
    },
    /// Nice-basis test and the positivity criterion.
    Nice { input: String },
    /// Catalog of named algebras.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Sign of the Pfaffian-form discriminant of a type (2,4) bracket.
    Pfaffian { input: String },
    /// Moment map of a ternary cubic, e.g. "x1^2*x3 + x1*x2^2".
    Poly {
        cubic: Option<String>,
        /// Report the critical value on the locus 5a^2 = 27b^2 of a x1^2x3 + b x2^3.
        #[arg(long)]
        locus: bool,
    },
    /// Run `check` over a family of catalog parameters; writes CSV.
    Sweep(sweep::SweepArgs),
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Get {
        name: String,
        /// Parameters, integers or rationals like 3/2.
        #[arg(long, num_args = 0.., allow_hyphen_values = true)]
        params: Vec<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let code = match e.chain().find_map(|c| c.downcast_ref::<Error>()) {
                Some(Error::Parse(_)) => 2,
                Some(Error::NotALieBracket { .. }) => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

/// An input is a path to an algebra file or `catalog:NAME[:P1,P2,...]`.
fn load(input: &str, mode: Option<ScalarMode>) -> Result<(AnyBracket, Value)> {
    let (mu, source) = if let Some(spec) = input.strip_prefix("catalog:") {
        let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
        let params = parse_params(params.split(',').filter(|s| !s.is_empty()))?;
        (AnyBracket::Rational(catalog::get(name, &params)?), input.to_string())
    } else {
        let text = fs::read_to_string(input).with_context(|| format!("reading {input}"))?;
        (io::parse_algebra(&text).with_context(|| format!("parsing {input}"))?, input.to_string())
    };
    let mu = match mode {
        Some(m) => mu.into_mode(m),
        None => mu,
    };
    let desc = json!({ "source": source, "dim": mu.dim(), "scalar_mode": mu.mode() });
    Ok((mu, desc))
}

fn parse_params<'a>(items: impl Iterator<Item = &'a str>) -> Result<Vec<Rational>> {
    items.map(|s| scalar::parse_rational(s).map_err(Into::into)).collect()
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn emit_json(out: &Option<PathBuf>, v: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    emit(out, &text)
}

macro_rules! with_bracket {
    ($mu:expr, |$b:ident| $body:expr) => {
        match $mu {
            AnyBracket::Rational($b) => $body,
            AnyBracket::Float($b) => $body,
        }
    };
}

fn run(cli: Cli) -> Result<()> {
    let g = cli.global;
    match cli.command {
        Command::Check { input } => check(&g, &input, false),
        Command::Report { input } => check(&g, &input, true),
        Command::Flow { input, step, max_t, sample_every, snapshots } => {
            let (mu, _) = load(&input, g.mode)?;
            let opts = FlowOptions {
                step,
                max_t,
                tol: g.tol.max(1e-12),
                sample_every: sample_every.max(1),
                snapshots: snapshots.is_some(),
                ..FlowOptions::default()
            };
            let flow = with_bracket!(&mu, |b| soliton::integrate_flow_partial(b, &opts))?;
            let mut csv = Vec::new();
            flow.write_csv(&mut csv)?;
            emit(&g.out, std::str::from_utf8(&csv)?)?;
            if let Some(path) = snapshots {
                let lines: Vec<String> = flow.snapshots.iter().map(|s| io::to_json(s).replace('\n', "")).collect();
                fs::write(&path, lines.join("\n") + "\n").with_context(|| format!("writing {}", path.display()))?;
            }
            eprintln!("{}", serde_json::to_string(&report::flow_json(&flow))?);
            Ok(())
        }
        Command::Descent { input } => {
            let (mu, desc) = load(&input, g.mode)?;
            let opts = DescentOptions { max_iter: g.max_iter, ..DescentOptions::default() };
            let out = with_bracket!(&mu, |b| soliton::orbit_descent(b, &opts))?;
            let mut v = report::descent_json(&out);
            v["input"] = desc;
            v["best"] = serde_json::from_str(&io::to_json(&out.best))?;
            emit_json(&g.out, &v)
        }
        Command::Phi { input, no_orbit } => {
            let (mu, desc) = load(&input, g.mode)?;
            let v = with_bracket!(&mu, |b| phi_block(b, &g, !no_orbit))?;
            let mut v = v;
            v["input"] = desc;
            emit_json(&g.out, &v)
        }
        Command::Stratum { input, beta, semistable } => {
            let (mu, desc) = load(&input, g.mode)?;
            let beta = match beta {
                Some(s) => parse_params(s.split(','))?,
                None => with_bracket!(&mu, |b| strata::beta_mu(b))?.beta,
            };
            let semi = MinimizeOptions { max_iter: g.max_iter, ..MinimizeOptions::default() };
            let tol = if mu.mode() == ScalarMode::Rational { 0.0 } else { g.tol };
            let r = with_bracket!(&mu, |b| strata::stratum_checks(b, &beta, tol, semistable.then_some(&semi)))?;
            let mut v = report::stratum_json(&r);
            v["input"] = desc;
            emit_json(&g.out, &v)
        }
        Command::Nice { input } => {
            let (mu, desc) = load(&input, g.mode)?;
            let v = with_bracket!(&mu, |b| nice_block(b))?;
            let mut v = v;
            v["input"] = desc;
            emit_json(&g.out, &v)
        }
        Command::Catalog { action } => match action {
            CatalogAction::List => emit_json(&g.out, &catalog::list()),
            CatalogAction::Get { name, params } => {
                let params = parse_params(params.iter().map(String::as_str))?;
                let mu = catalog::get(&name, &params)?;
                let text = match g.mode {
                    Some(ScalarMode::Float) => io::to_json(&mu.to_f64()),
                    _ => io::to_json(&mu),
                };
                emit(&g.out, &(text.trim_end().to_string() + "\n"))
            }
        },
        Command::Pfaffian { input } => {
            let (mu, desc) = load(&input, g.mode)?;
            let tol = if mu.mode() == ScalarMode::Rational { 0.0 } else { g.tol };
            let v = with_bracket!(&mu, |b| pfaffian_block(b, tol, desc))?;
            emit_json(&g.out, &v)
        }
        Command::Poly { cubic, locus } => {
            let mut v = json!({});
            if let Some(text) = cubic {
                v = match g.mode {
                    Some(ScalarMode::Float) => poly_block::<f64>(&text, g.tol)?,
                    _ => poly_block::<Rational>(&text, g.tol)?,
                };
            } else if !locus {
                bail!("give a cubic or --locus");
            }
            if locus {
                let l = poly::p_ab_locus();
                v["locus"] = json!({
                    "computed": l.computed.to_string(),
                    "quoted": l.quoted.to_string(),
                    "agrees": l.agrees,
                    "critical": l.critical,
                });
            }
            emit_json(&g.out, &v)
        }
        Command::Sweep(args) => sweep::run(&args, &g),
    }
}

fn check(g: &Global, input: &str, full: bool) -> Result<()> {
    let (mu, desc) = load(input, g.mode)?;
    let s = Settings { tol: g.tol, max_iter: g.max_iter, full };
    let r = with_bracket!(&mu, |b| report::build(b, desc, &s))?;
    emit_json(&g.out, &r)
}

fn phi_block<T: Scalar>(mu: &BracketTensor<T>, g: &Global, orbit: bool) -> Result<Value> {
    let tol = if T::EXACT { 0.0 } else { g.tol };
    let pre = pre_einstein::pre_einstein_derivation(mu, tol)?;
    let nc = pre_einstein::necessary_conditions(mu, &pre, tol)?;
    let ty = pre_einstein::eigenvalue_type(&pre.phi, g.tol).ok().map(|t| t.to_string());
    let mut v = json!({
        "phi": {
            "eigenvalues": pre.eigenvalues.iter().map(|(x, _)| num(x)).collect::<Vec<_>>(),
            "multiplicities": pre.eigenvalues.iter().map(|(_, m)| *m).collect::<Vec<_>>(),
            "matrix": report::matrix(&pre.phi),
        },
        "type": ty,
        "necessary": nc,
        "nikolayevsky": null,
    });
    if orbit {
        let opts = OrbitOptions {
            minimize: MinimizeOptions { max_iter: g.max_iter, ..MinimizeOptions::default() },
            ..OrbitOptions::default()
        };
        v["nikolayevsky"] = report::nikolayevsky_json(&pre_einstein::nikolayevsky_test(mu, tol, &opts)?);
    }
    Ok(v)
}

fn pfaffian_block<T: Scalar>(mu: &BracketTensor<T>, tol: f64, desc: Value) -> Result<Value> {
    let h = catalog::pfaffian_hessian(mu)?;
    let sign = catalog::pfaffian_sign(mu, tol)?;
    let class = match sign {
        1 => "h3 (x) C",
        -1 => "h3 + h3",
        _ => "degenerate",
    };
    Ok(json!({ "input": desc, "h": num(&h), "sign": sign, "class": class }))
}

fn nice_block<T: Scalar>(mu: &BracketTensor<T>) -> Result<Value> {
    if let Some(violation) = nice::nice_violation(mu) {
        let ((a, b), (c, d)) = violation.pairs();
        return Ok(json!({
            "nice": false,
            "violation": format!("pairs ({}, {}) and ({}, {})", a + 1, b + 1, c + 1, d + 1),
        }));
    }
    let up = nice::upos_solve(mu)?;
    let mut v = json!({ "nice": true, "U": up.gram.u, "upos": report::upos_json(&up) });
    if let Some(x) = &up.x {
        let c = nice::construct_nilsoliton(mu, x)?;
        v["nilsoliton"] = json!({
            "bracket": serde_json::from_str::<Value>(&io::to_json(&c.nu))?,
            "realizable": c.realizable,
        });
    }
    Ok(v)
}

fn poly_block<T: Scalar>(text: &str, tol: f64) -> Result<Value> {
    let p: poly::CubicForm<T> = poly::parse_cubic(text)?;
    let c = poly::critical_check(&p, tol)?;
    Ok(json!({
        "p": p.to_string(),
        "m": report::matrix(&c.moment),
        "F": num(&c.f),
        "critical": c.is_critical,
        "residual": report::float(c.residual),
    }))
}
