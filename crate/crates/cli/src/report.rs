//! Assembly of the verdict report from the individual stages.

use std::collections::BTreeMap;

use nilsoliton_core::bracket::{self, BracketTensor};
use nilsoliton_core::kempf_ness::MinimizeOptions;
use nilsoliton_core::nice::{self, UposResult, UposVerdict};
use nilsoliton_core::pre_einstein::{self, NikolayevskyResult, OrbitMethod, OrbitOptions, OrbitVerdict};
use nilsoliton_core::soliton::{self, DescentOptions, DescentVerdict, FlowOptions};
use nilsoliton_core::{curvature, strata, Matrix, Rational, Result, Scalar};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    EinsteinNilradicalCertified,
    NotEinsteinNilradicalCertified,
    NumericEvidencePositive,
    NumericEvidenceNegative,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::EinsteinNilradicalCertified => "einstein_nilradical_certified",
            Self::NotEinsteinNilradicalCertified => "not_einstein_nilradical_certified",
            Self::NumericEvidencePositive => "numeric_evidence_positive",
            Self::NumericEvidenceNegative => "numeric_evidence_negative",
            Self::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Settings {
    pub tol: f64,
    pub max_iter: usize,
    /// Run every numeric stage, not only those needed for a verdict.
    pub full: bool,
}

#[derive(Debug, Serialize)]
pub struct VerdictReport {
    pub input: Value,
    pub gate: Value,
    pub ricci: Value,
    pub certificate: Value,
    pub phi: Value,
    #[serde(rename = "type")]
    pub phi_type: Option<String>,
    pub necessary: Value,
    pub nikolayevsky: Value,
    pub nice: bool,
    #[serde(rename = "U")]
    pub u: Value,
    pub upos: Value,
    pub stratum: Value,
    pub descent: Value,
    pub flow: Value,
    pub verdict: Verdict,
    /// The stage whose result fixed the verdict.
    pub verdict_source: String,
    /// How each block was obtained: "exact", "numeric", "skipped" or an error.
    pub evidence: BTreeMap<&'static str, String>,
    /// `F` at the nilsoliton when one was found or certified.
    #[serde(skip)]
    pub f_limit: Option<f64>,
}

pub fn num<T: Scalar>(v: &T) -> Value {
    if T::EXACT {
        Value::String(v.to_string())
    } else {
        serde_json::Number::from_f64(v.to_f64()).map_or(Value::Null, Value::Number)
    }
}

pub fn float(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

pub fn matrix<T: Scalar>(m: &Matrix<T>) -> Value {
    Value::Array((0..m.rows()).map(|r| Value::Array(m.row(r).iter().map(num).collect())).collect())
}

fn rationals(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn mode<T: Scalar>() -> &'static str {
    if T::EXACT {
        "exact"
    } else {
        "numeric"
    }
}

pub fn upos_json(up: &UposResult) -> Value {
    let mut obj = json!({ "verdict": up.verdict });
    if let Some(x) = &up.x {
        obj["x"] = rationals(x);
    }
    if let Some(y) = &up.farkas {
        obj["farkas"] = rationals(y);
    }
    obj
}

pub fn nikolayevsky_json(r: &NikolayevskyResult) -> Value {
    json!({
        "verdict": r.verdict.to_string(),
        "final_norm": float(r.final_norm),
        "moment_defect": float(r.moment_defect),
        "method": r.method,
        "status": r.status,
        "iterations": r.iterations,
        "g_phi_dim": r.g_phi_dim,
        "stabilizer_gap_ratio": r.stabilizer_gap_ratio.map(float),
    })
}

pub fn stratum_json(r: &strata::StratumReport) -> Value {
    json!({
        "beta": r.beta,
        "beta_norm2": r.beta_norm2,
        "membership": r.membership,
        "checks": {
            "trace_check": r.trace_check,
            "derivation_orthogonality": float(r.derivation_orthogonality),
            "derivation_orthogonal": r.derivation_orthogonal,
            "adbeta_min": float(r.adbeta_min),
            "adbeta_nonnegative": r.adbeta_nonnegative,
            "delta_value": float(r.delta_value),
            "delta_nonnegative": r.delta_nonnegative,
            "delta_in_der": r.delta_in_der,
            "beta_shift_positive": r.beta_shift_positive,
        },
        "semistable": r.semistable.as_ref().map(|s| json!({
            "verdict": s.verdict,
            "final_norm": float(s.final_norm),
            "moment_defect": float(s.moment_defect),
            "iterations": s.iterations,
        })),
        "F_vs_beta": { "F": float(r.f), "beta_norm2": r.beta_norm2, "holds": r.f_ge_beta },
    })
}

pub fn certificate_json<T: Scalar>(c: &soliton::NilsolitonCertificate<T>) -> Value {
    json!({
        "c": num(&c.c),
        "D": matrix(&c.d),
        "residual": num(&c.residual),
        "type": c.eigenvalue_type.as_ref().map(ToString::to_string),
    })
}

pub fn descent_json(d: &soliton::DescentOutcome) -> Value {
    json!({
        "verdict": d.verdict,
        "F": float(d.f),
        "residual": float(d.residual),
        "iterations": d.iterations,
        "g_norm": float(d.g_norm),
        "invariants_constant": d.invariants_constant,
    })
}

pub fn flow_json(f: &soliton::Flow) -> Value {
    let cert = soliton::soliton_certificate(&f.limit, 1e-9);
    json!({
        "F": float(f.f),
        "t": float(f.t),
        "steps": f.steps,
        "converged": f.converged,
        "grad_norm": float(f.grad_norm),
        "limit_residual": float(cert.residual_f64),
        "limit_type": cert.eigenvalue_type.as_ref().map(ToString::to_string),
    })
}

/// Full pipeline. Errors only on a failed Lie or nilpotency gate; later
/// stages record their failures in `evidence`.
pub fn build<T: Scalar>(mu: &BracketTensor<T>, input: Value, s: &Settings) -> Result<VerdictReport> {
    let tol = if T::EXACT { 0.0 } else { s.tol };
    bracket::ensure_lie(mu, tol)?;
    let nil = bracket::nilpotency(mu, tol)?;
    if !nil.is_nilpotent {
        return Err(nilsoliton_core::Error::NotNilpotent);
    }
    let ders = bracket::derivations(mu, tol);
    let mut ev: BTreeMap<&'static str, String> = BTreeMap::new();
    let mut r = VerdictReport {
        input,
        gate: json!({
            "lie": true,
            "nilpotent": true,
            "step": nil.step,
            "series_dims": nil.series_dims,
            "dim_der": ders.len(),
        }),
        ricci: Value::Null,
        certificate: Value::Null,
        phi: Value::Null,
        phi_type: None,
        necessary: Value::Null,
        nikolayevsky: Value::Null,
        nice: false,
        u: Value::Null,
        upos: Value::Null,
        stratum: Value::Null,
        descent: Value::Null,
        flow: Value::Null,
        verdict: Verdict::Inconclusive,
        verdict_source: "none".into(),
        evidence: BTreeMap::new(),
        f_limit: None,
    };
    ev.insert("gate", mode::<T>().into());

    // ricci and the soliton certificate
    let ricci = curvature::ricci(mu, tol)?;
    let ext = if mu.is_zero() { Ok(curvature::abelian_extension::<T>(mu.dim())) } else { curvature::rank_one_extension(mu, tol) };
    let einstein = match ext.and_then(|ext| curvature::extension_einstein(&ext, s.tol.max(1e-12))) {
        Ok(e) => json!({ "is_einstein": e.is_einstein, "c": float(e.c), "residual": float(e.residual) }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    r.ricci = json!({ "ric": matrix(&ricci.ric), "scal": num(&ricci.scal), "F": num(&ricci.f), "einstein": einstein });
    ev.insert("ricci", mode::<T>().into());
    let cert = soliton::soliton_certificate(mu, s.tol);
    r.certificate = certificate_json(&cert);
    ev.insert("certificate", mode::<T>().into());
    let exact_soliton = T::EXACT && cert.residual.is_zero();
    let float_soliton = !T::EXACT && cert.residual_f64 <= s.tol.max(1e-9);
    if exact_soliton || float_soliton {
        r.f_limit = Some(ricci.f.to_f64());
    }

    // pre-Einstein derivation and the necessary conditions
    let mut necessary_failed = false;
    let mut pre_ok = None;
    match pre_einstein::pre_einstein_derivation(mu, tol) {
        Ok(pre) => {
            r.phi = json!({
                "eigenvalues": pre.eigenvalues.iter().map(|(v, _)| num(v)).collect::<Vec<_>>(),
                "multiplicities": pre.eigenvalues.iter().map(|(_, m)| *m).collect::<Vec<_>>(),
                "residual": float(pre.residual),
                "semisimple_fallback": pre.semisimple_fallback,
            });
            r.phi_type = pre_einstein::eigenvalue_type(&pre.phi, s.tol).ok().map(|t| t.to_string());
            match pre_einstein::necessary_conditions(mu, &pre, tol) {
                Ok(nc) => {
                    necessary_failed = !nc.passed;
                    r.necessary = serde_json::to_value(&nc).unwrap_or(Value::Null);
                    ev.insert("necessary", mode::<T>().into());
                }
                Err(e) => {
                    ev.insert("necessary", format!("error: {e}"));
                }
            }
            ev.insert("phi", mode::<T>().into());
            pre_ok = Some(pre);
        }
        Err(e) => {
            ev.insert("phi", format!("error: {e}"));
        }
    }

    // nice basis and positivity
    r.nice = nice::is_nice(mu) && !mu.is_zero();
    let mut upos_verdict = None;
    if r.nice {
        match nice::upos_solve(mu) {
            Ok(up) => {
                r.u = json!(up.gram.u);
                r.upos = upos_json(&up);
                if up.verdict == UposVerdict::EinsteinNilradical {
                    if let Some(x) = &up.x {
                        if let Ok(c) = nice::construct_nilsoliton(mu, x) {
                            r.f_limit.get_or_insert(curvature::functional_f(&c.nu));
                        }
                    }
                }
                upos_verdict = Some(up.verdict);
                ev.insert("upos", "exact".into());
            }
            Err(e) => {
                ev.insert("upos", format!("error: {e}"));
            }
        }
    } else {
        ev.insert("upos", "skipped: basis not nice".into());
    }

    // stratum datum
    if !mu.is_zero() {
        let semi = MinimizeOptions { max_iter: s.max_iter, ..MinimizeOptions::default() };
        let beta = strata::beta_mu(mu).map(|b| b.beta);
        match beta.and_then(|b| strata::stratum_checks(mu, &b, tol, s.full.then_some(&semi))) {
            Ok(st) => {
                r.stratum = stratum_json(&st);
                ev.insert("stratum", if s.full { format!("{} (semistability numeric)", mode::<T>()) } else { mode::<T>().into() });
            }
            Err(e) => {
                ev.insert("stratum", format!("error: {e}"));
            }
        }
    }

    // exact verdicts first
    if exact_soliton {
        r.verdict = Verdict::EinsteinNilradicalCertified;
        r.verdict_source = "certificate".into();
    } else if let Some(v) = upos_verdict {
        r.verdict = match v {
            UposVerdict::EinsteinNilradical => Verdict::EinsteinNilradicalCertified,
            UposVerdict::NotEinsteinNilradical => Verdict::NotEinsteinNilradicalCertified,
        };
        r.verdict_source = "upos".into();
    } else if necessary_failed && T::EXACT {
        r.verdict = Verdict::NotEinsteinNilradicalCertified;
        r.verdict_source = "necessary".into();
    }
    let decided = r.verdict != Verdict::Inconclusive;

    // numeric stages
    let run_numeric = s.full || !decided;
    let mut orbit = None;
    if run_numeric && !mu.is_zero() && pre_ok.is_some() {
        let opts = OrbitOptions {
            minimize: MinimizeOptions { max_iter: s.max_iter, ..MinimizeOptions::default() },
            ..OrbitOptions::default()
        };
        match pre_einstein::nikolayevsky_test(mu, tol, &opts) {
            Ok(nk) => {
                r.nikolayevsky = nikolayevsky_json(&nk);
                let how = if nk.method == OrbitMethod::TorusLp { "exact (torus LP)" } else { "numeric" };
                ev.insert("nikolayevsky", how.into());
                orbit = Some(nk.verdict);
            }
            Err(e) => {
                ev.insert("nikolayevsky", format!("error: {e}"));
            }
        }
    } else {
        ev.insert("nikolayevsky", "skipped".into());
    }
    let mut descent_certified = false;
    let mut descent_f = None;
    let orbit_not_closed = orbit == Some(OrbitVerdict::NotClosed);
    // descent is pointless once the orbit is known not to be closed
    if run_numeric && !mu.is_zero() && (s.full || !orbit_not_closed) {
        let opts = DescentOptions { max_iter: s.max_iter, ..DescentOptions::default() };
        match soliton::orbit_descent(mu, &opts) {
            Ok(d) => {
                r.descent = descent_json(&d);
                descent_certified = d.verdict == DescentVerdict::CertifiedSoliton;
                if descent_certified {
                    descent_f = Some(d.f);
                }
                ev.insert("descent", "numeric".into());
            }
            Err(e) => {
                ev.insert("descent", format!("error: {e}"));
            }
        }
    } else {
        ev.insert("descent", "skipped".into());
    }
    if s.full && !mu.is_zero() {
        let opts = FlowOptions::default();
        match soliton::integrate_flow_partial(mu, &opts) {
            Ok(f) => {
                r.flow = flow_json(&f);
                ev.insert("flow", "numeric".into());
            }
            Err(e) => {
                ev.insert("flow", format!("error: {e}"));
            }
        }
    } else {
        ev.insert("flow", "skipped".into());
    }
    if let Some(f) = descent_f {
        r.f_limit.get_or_insert(f);
    }

    if !decided {
        let positive = descent_certified || orbit == Some(OrbitVerdict::Closed) || float_soliton;
        let negative = orbit_not_closed || necessary_failed;
        (r.verdict, r.verdict_source) = match (positive, negative) {
            (true, false) => (
                Verdict::NumericEvidencePositive,
                if float_soliton { "certificate" } else if descent_certified { "descent" } else { "nikolayevsky" }.into(),
            ),
            (false, true) => (Verdict::NumericEvidenceNegative, if orbit_not_closed { "nikolayevsky" } else { "necessary" }.into()),
            (true, true) => (Verdict::Inconclusive, "conflicting numeric evidence".into()),
            (false, false) => (Verdict::Inconclusive, "none".into()),
        };
    }
    r.evidence = ev;
    Ok(r)
}
