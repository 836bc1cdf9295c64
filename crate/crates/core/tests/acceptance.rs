#![allow(clippy::neg_cmp_op_on_partial_ord)] // ensure!(a < b) must fail on NaN

//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nilsoliton_core::bracket::{self, BracketTensor};
use nilsoliton_core::catalog;
use nilsoliton_core::curvature;
use nilsoliton_core::minnorm;
use nilsoliton_core::nice::{self, UposVerdict};
use nilsoliton_core::poly;
use nilsoliton_core::pre_einstein;
use nilsoliton_core::soliton::{self, DescentOptions, DescentVerdict, FlowOptions};
use nilsoliton_core::strata;
use nilsoliton_core::{Matrix, Rational, Scalar};
use rand::Rng;

use common::q;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn run(id: u32, title: &str, limit: Duration, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let res = catch_unwind(AssertUnwindSafe(f));
    let elapsed = start.elapsed();
    let (mut ok, mut detail) = match res {
        Ok(Ok(d)) => (true, d),
        Ok(Err(e)) => (false, e),
        Err(p) => {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            (false, format!("panicked: {msg}"))
        }
    };
    if ok && elapsed > limit {
        ok = false;
        detail = format!("{detail}; exceeded time limit");
    }
    println!(
        "{} criterion {id}: {title} ({:.2}s, limit {}s) {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    ok
}

fn diag(v: &[Rational]) -> Matrix<Rational> {
    Matrix::diagonal(v)
}

fn heisenberg_pipeline() -> Check {
    let h3 = catalog::heisenberg(1);
    let ricci = curvature::ricci(&h3, 0.0).map_err(|e| e.to_string())?;
    ensure!(ricci.ric == diag(&[q(-1, 2), q(-1, 2), q(1, 2)]), "Ric(h3) = {:?}", ricci.ric.diag());
    ensure!(ricci.scal == q(-1, 2), "scal = {}", ricci.scal);
    ensure!(ricci.f == q(3, 1), "F = {}", ricci.f);
    let cert = soliton::soliton_certificate(&h3, 0.0);
    ensure!(cert.c == q(-3, 2), "c = {}", cert.c);
    ensure!(cert.d == diag(&[q(1, 1), q(1, 1), q(2, 1)]), "D = {:?}", cert.d);
    ensure!(cert.residual == q(0, 1), "residual = {}", cert.residual);
    let pre = pre_einstein::pre_einstein_derivation(&h3, 0.0).map_err(|e| e.to_string())?;
    ensure!(pre.phi == diag(&[q(2, 3), q(2, 3), q(4, 3)]), "phi = {:?}", pre.phi);
    ensure!(cert.d == pre.phi.scale(&-cert.c.clone()), "D != -c phi");
    let ext = curvature::rank_one_extension(&h3, 0.0).map_err(|e| e.to_string())?;
    let chk = curvature::extension_einstein(&ext, 1e-12).map_err(|e| e.to_string())?;
    ensure!(chk.is_einstein && (chk.c + 1.5).abs() < 1e-12 && chk.residual < 1e-12, "extension {chk:?}");
    Ok(format!("Ric, scal, F = 3, (c, D) = (-3/2, diag(1,1,2)) residual 0, phi, extension residual {:.1e}", chk.residual))
}

fn worked_example() -> Check {
    let l4p = catalog::l4_plus();
    let l4 = catalog::filiform(4);
    let beta = strata::beta_mu(&l4p).map_err(|e| e.to_string())?.beta;
    ensure!(beta == vec![q(-1, 1), q(-1, 2), q(0, 1), q(1, 2)], "beta = {beta:?}");
    let m = strata::membership(&l4p, &beta);
    ensure!(m.in_y && !m.in_z, "membership {m:?}");
    let shift = diag(&beta.iter().map(|b| b.clone() + q(3, 2)).collect::<Vec<_>>());
    let in_der = |mu: &BracketTensor<Rational>| bracket::pi(&shift, mu).map(|p| p.is_zero());
    ensure!(in_der(&l4) == Ok(true), "beta + 3/2 I not in Der(L4)");
    ensure!(in_der(&l4p) == Ok(false), "beta + 3/2 I in Der(l4_plus)");
    Ok("beta = (-1,-1/2,0,1/2), in Y and not Z, beta + 3/2 I in Der(L4) only".into())
}

fn flow() -> Check {
    let opts = FlowOptions { sample_every: 1, ..FlowOptions::default() };
    let fl = soliton::integrate_flow(&catalog::l4_plus(), &opts).map_err(|e| e.to_string())?;
    let cert = soliton::soliton_certificate(&fl.limit, 1e-9);
    let mut worst = f64::NEG_INFINITY;
    for w in fl.samples.windows(2) {
        worst = worst.max(w[1].f - w[0].f);
    }
    ensure!((fl.f - 1.5).abs() < 1e-6, "F limit {}", fl.f);
    ensure!(cert.residual_f64 < 1e-8, "residual {:.3e}", cert.residual_f64);
    ensure!(worst <= 1e-12, "F increased by {worst:.3e}");
    Ok(format!(
        "F -> {:.10} at t = {:.2} ({} steps), residual {:.1e}, max dF over steps {:.1e}",
        fl.f, fl.t, fl.steps, cert.residual_f64, worst
    ))
}

fn ex7_dichotomy() -> Check {
    let mut parts = Vec::new();
    for t in [2, -1] {
        let out = soliton::orbit_descent(&catalog::ex7(&q(t, 1)), &DescentOptions::default()).map_err(|e| e.to_string())?;
        ensure!(out.verdict == DescentVerdict::CertifiedSoliton && out.residual < 1e-8, "ex7({t}): {:?} residual {:.3e}", out.verdict, out.residual);
        parts.push(format!("ex7({t}) residual {:.1e} in {} it", out.residual, out.iterations));
    }
    let mu = catalog::ex7(&q(1, 1));
    ensure!(nice::is_nice(&mu), "ex7(1) basis not nice");
    let up = nice::upos_solve(&mu).map_err(|e| e.to_string())?;
    ensure!(up.verdict == UposVerdict::NotEinsteinNilradical, "ex7(1) upos {:?}", up.verdict);
    let y = up.farkas.ok_or("no certificate")?;
    ensure!(nice::verify_farkas(&up.gram.u, &y), "certificate fails verification");
    parts.push("ex7(1) nice, exact infeasibility certificate verified".into());
    Ok(parts.join("; "))
}

fn will_curve() -> Check {
    for t in [q(-1, 1), q(1, 2), q(1, 1), q(3, 2), q(2, 1), q(5, 1)] {
        ensure!(nice::is_nice(&catalog::will9(&t)), "will9({t}) not nice");
    }
    let mut supports = Vec::new();
    for t in [q(3, 2), q(2, 1), q(5, 1)] {
        let up = nice::upos_solve(&catalog::will9(&t)).map_err(|e| e.to_string())?;
        ensure!(up.verdict == UposVerdict::NotEinsteinNilradical, "will9({t}) {:?}", up.verdict);
        let y = up.farkas.ok_or("no certificate")?;
        ensure!(nice::verify_farkas(&up.gram.u, &y), "will9({t}) certificate fails");
        supports.push(up.gram.u);
    }
    ensure!(supports.windows(2).all(|w| w[0] == w[1]), "Gram matrices differ along the curve");
    Ok("nice for t in {-1,1/2,1,3/2,2,5}; not EN with verified certificate for t in {3/2,2,5}".into())
}

fn random_unimodular(rng: &mut impl Rng, n: usize) -> Matrix<f64> {
    loop {
        let mut a = Matrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let det = a.determinant();
        if det.abs() < 0.1 {
            continue;
        }
        if det < 0.0 {
            for c in 0..n {
                a[(0, c)] = -a[(0, c)];
            }
        }
        return a.scale(&(1.0 / det.abs().powf(1.0 / n as f64)));
    }
}

fn pfaffian() -> Check {
    let degenerate = BracketTensor::from_one_based(6, &[(1, 2, 5, q(1, 1)), (3, 4, 5, q(1, 1)), (1, 3, 6, q(1, 1))]);
    let cases = [("h3+h3", catalog::h3_sum(), -1i8), ("h3(C)", catalog::h3_complex(), 1), ("degenerate", degenerate, 0)];
    let mut rng = common::rng(6);
    let mut worst: f64 = 0.0;
    let mut values = Vec::new();
    for (name, mu, sign) in cases {
        let h = catalog::pfaffian_hessian(&mu).map_err(|e| e.to_string())?;
        ensure!(catalog::pfaffian_sign(&mu, 0.0) == Ok(sign), "{name}: h = {h}");
        values.push(format!("h({name}) = {h}"));
        let hf = h.to_f64();
        let muf = mu.to_f64();
        for _ in 0..20 {
            let a = random_unimodular(&mut rng, 4);
            let b = random_unimodular(&mut rng, 2);
            let g = Matrix::from_fn(6, 6, |r, c| match (r < 4, c < 4) {
                (true, true) => a[(r, c)],
                (false, false) => b[(r - 4, c - 4)],
                (false, true) => rng.random_range(-1.0..1.0),
                (true, false) => 0.0,
            });
            let moved = bracket::act(&g, &muf, 1e-12).map_err(|e| e.to_string())?;
            // round-off leaves ~1e-17 entries outside the type (2,4) pattern
            let moved = BracketTensor::from_dense(6, &moved.dense(), 1e-12);
            let hm = catalog::pfaffian_hessian(&moved).map_err(|e| e.to_string())?;
            worst = worst.max((hm - hf).abs());
        }
    }
    ensure!(worst < 1e-8, "invariance defect {worst:.3e}");
    Ok(format!("{}; max change under 60 block changes {worst:.1e}", values.join(", ")))
}

fn cubic_oracle() -> Check {
    ensure!(poly::moment_poly(&poly::x1x2x3::<Rational>()).map_err(|e| e.to_string())? == Matrix::zeros(3, 3), "m(x1x2x3) != 0");
    let c = poly::critical_check(&poly::q::<Rational>(), 0.0).map_err(|e| e.to_string())?;
    ensure!(c.moment == diag(&[q(-1, 2), q(0, 1), q(1, 2)]), "m(q) = {:?}", c.moment);
    ensure!(c.is_critical && c.f == q(1, 2), "F(q) = {}", c.f);
    let mut mismatches = 0;
    let mut on = 0;
    for i in 0..25 {
        let a = 0.3 + 0.17 * i as f64;
        let b_locus = a * (5.0f64 / 27.0).sqrt();
        let offsets = [0.0, 1e-3 * (1 + i) as f64];
        for (k, off) in offsets.iter().enumerate() {
            let b = if k == 0 { b_locus } else { -b_locus * (1.0 + off) };
            let chk = poly::critical_check(&poly::p_ab(a, b), 1e-10).map_err(|e| e.to_string())?;
            let locus = (5.0 * a * a - 27.0 * b * b).abs() <= 1e-10 * (5.0 * a * a + 27.0 * b * b);
            on += locus as usize;
            if chk.is_critical != locus {
                mismatches += 1;
            }
        }
    }
    ensure!(mismatches == 0 && on == 25, "{mismatches} grid mismatches, {on} on locus");
    let loc = poly::p_ab_locus();
    ensure!(loc.critical && loc.computed == q(3, 14), "locus value {}", loc.computed);
    Ok(format!(
        "m(x1x2x3) = 0, m(q) = diag(-1/2,0,1/2), F(q) = 1/2; 50-point grid agrees; locus value {} (quoted {})",
        loc.computed, loc.quoted
    ))
}

/// Minimum-norm point of the hull by enumerating every subset: the
/// closest point of each affine hull, kept when its barycentric
/// coordinates are nonnegative.
fn brute_force_mcc(points: &[Vec<Rational>]) -> Vec<Rational> {
    let m = points.len();
    let d = points[0].len();
    let mut best: Option<(Rational, Vec<Rational>)> = None;
    for mask in 1u32..(1 << m) {
        let idx: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let kkt = Matrix::from_fn(k + 1, k + 1, |r, c| match (r < k, c < k) {
            (true, true) => nilsoliton_core::linalg::dot(&points[idx[r]], &points[idx[c]]),
            (true, false) | (false, true) => Rational::from_i64(1),
            (false, false) => Rational::from_i64(0),
        });
        let mut rhs = vec![Rational::from_i64(0); k + 1];
        rhs[k] = Rational::from_i64(1);
        if kkt.rank(0.0) < k + 1 {
            continue;
        }
        let Some(sol) = kkt.solve(&rhs, 0.0) else { continue };
        if sol[..k].iter().any(|l| *l < Rational::from_i64(0)) {
            continue;
        }
        let x: Vec<Rational> = (0..d)
            .map(|c| idx.iter().zip(&sol).fold(Rational::from_i64(0), |acc, (&i, l)| acc + l.clone() * points[i][c].clone()))
            .collect();
        let n2 = nilsoliton_core::linalg::dot(&x, &x);
        if best.as_ref().is_none_or(|(b, _)| n2 < *b) {
            best = Some((n2, x));
        }
    }
    best.expect("some vertex qualifies").1
}

fn property_suites() -> Check {
    let mut rng = common::rng(8);
    let mut report = Vec::new();

    // (a) gradient against central differences over every coordinate
    let mut worst_a: f64 = 0.0;
    for s in 0..20 {
        let n = 4 + s % 4;
        let mu = common::random_float_triangular(&mut rng, n);
        let grad = curvature::grad_f(&mu).map_err(|e| e.to_string())?;
        let h = 1e-6;
        let (mut err2, mut ref2) = (0.0, 0.0);
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let bump = BracketTensor::from_entries(n, [(i, j, k, h)]);
                    let plus = curvature::functional_f(&mu.add(&bump).unwrap());
                    let minus = curvature::functional_f(&mu.sub(&bump).unwrap());
                    // ⟨·,·⟩ counts each unordered pair twice
                    let fd = (plus - minus) / (2.0 * h) / 2.0;
                    let an = grad.get(i, j, k);
                    err2 += (fd - an).powi(2);
                    ref2 += an * an;
                }
            }
        }
        worst_a = worst_a.max((err2 / ref2).sqrt());
    }
    ensure!(worst_a < 1e-5, "(a) gradient relative error {worst_a:.3e}");
    report.push(format!("(a) {worst_a:.1e}"));

    // (b) Ric is trace-orthogonal to Der
    let algebras = common::lie_algebras();
    let mut worst_b: f64 = 0.0;
    for (_, mu) in &algebras {
        let muf = mu.to_f64();
        let ric = curvature::ricci_operator_r(&muf);
        let rn = ric.frob_norm2().sqrt();
        for d in bracket::derivations(&muf, 1e-9).basis {
            let v = ric.mul(&d).trace().abs() / (rn * d.frob_norm2().sqrt());
            worst_b = worst_b.max(v);
        }
    }
    ensure!(worst_b < 1e-10, "(b) max |tr(Ric D)| {worst_b:.3e}");
    report.push(format!("(b) {} algebras {worst_b:.1e}", algebras.len()));

    // (c) Ricci from the bracket formula equals ||μ||²/4 m(μ), exactly
    let mut count_c = 0;
    for s in 0..30 {
        let n = 3 + s % 4;
        let mu = if s % 2 == 0 { common::random_general(&mut rng, n, 0.4) } else { common::random_triangular(&mut rng, n, 0.6) };
        let m = curvature::moment_map(&mu).map_err(|e| e.to_string())?;
        ensure!(curvature::ricci_operator_r(&mu) == m.scale(&(mu.norm2() / Rational::from_i64(4))), "(c) mismatch on {mu}");
        count_c += 1;
    }
    for (_, mu) in algebras.iter().take(20) {
        ensure!(curvature::ricci(mu, 0.0).map_err(|e| e.to_string())?.cross_check == 0.0, "(c) cross check on {mu}");
        count_c += 1;
    }
    report.push(format!("(c) {count_c} exact"));

    // (d) Wolfe against subset enumeration
    for s in 0..30 {
        let dim = 2 + s % 4;
        let m = 3 + s % 6;
        let pts: Vec<Vec<Rational>> = (0..m).map(|_| (0..dim).map(|_| Rational::from_i64(rng.random_range(-4..=4))).collect()).collect();
        let got = minnorm::mcc(&pts, 0.0).map_err(|e| e.to_string())?.beta;
        let want = brute_force_mcc(&pts);
        ensure!(got == want, "(d) mcc {got:?} vs oracle {want:?}");
    }
    report.push("(d) 30 sets, distance 0".into());

    // (e) tr β = −1 and F ≥ ||β||²
    for s in 0..200 {
        let n = 3 + s % 4;
        let mu = if s % 2 == 0 { common::random_general(&mut rng, n, 0.3) } else { common::random_triangular(&mut rng, n, 0.5) };
        let beta = strata::beta_mu(&mu).map_err(|e| e.to_string())?.beta;
        let tr = beta.iter().fold(Rational::from_i64(0), |a, b| a + b.clone());
        ensure!(tr == Rational::from_i64(-1), "(e) tr beta = {tr} for {mu}");
        let f = curvature::moment_map(&mu).map_err(|e| e.to_string())?.frob_norm2();
        let bb = nilsoliton_core::linalg::dot(&beta, &beta);
        ensure!(f >= bb, "(e) F = {f} < ||beta||^2 = {bb} for {mu}");
    }
    report.push("(e) 200 brackets".into());

    // (f) Upos ⇔ β_μ interior, on nice members
    let mut count_f = 0;
    for (name, mu) in &algebras {
        if !nice::is_nice(mu) || mu.is_zero() {
            continue;
        }
        let up = nice::upos_solve(mu).map_err(|e| e.to_string())?;
        let interior = strata::mcc_interior(mu).map_err(|e| e.to_string())?;
        ensure!((up.verdict == UposVerdict::EinsteinNilradical) == interior, "(f) {name}: upos {:?}, interior {interior}", up.verdict);
        count_f += 1;
    }
    report.push(format!("(f) {count_f} nice algebras"));
    Ok(report.join(", "))
}

fn free_nilpotent() -> Check {
    let mu = catalog::free(2, 3).map_err(|e| e.to_string())?;
    ensure!(mu.dim() == 5, "dim {}", mu.dim());
    let out = soliton::orbit_descent(&mu, &DescentOptions::default()).map_err(|e| e.to_string())?;
    ensure!(out.verdict == DescentVerdict::CertifiedSoliton, "{:?} residual {:.3e}", out.verdict, out.residual);
    Ok(format!("descent certified, F = {:.6}, residual {:.1e}", out.f, out.residual))
}

fn main() {
    let s = Duration::from_secs;
    let results = [
        run(1, "Heisenberg pipeline", s(1), heisenberg_pipeline),
        run(2, "worked stratum example", s(1), worked_example),
        run(3, "Ricci flow on l4_plus", s(10), flow),
        run(4, "ex7 dichotomy", s(60), ex7_dichotomy),
        run(5, "Will curve", s(5), will_curve),
        run(6, "Pfaffian signs", s(60), pfaffian),
        run(7, "cubic moment map", s(1), cubic_oracle),
        run(8, "property suites", s(300), property_suites),
        run(9, "free nilpotent (2,3)", s(30), free_nilpotent),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
