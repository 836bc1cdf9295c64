mod common;

use nilsoliton_core::catalog;
use nilsoliton_core::pre_einstein::{self, OrbitMethod, OrbitOptions, OrbitVerdict};
use nilsoliton_core::soliton::{self, DescentOptions, DescentVerdict};
use nilsoliton_core::strata;

use common::q;

#[test]
fn ex7_orbit_closedness_matches_the_dichotomy() {
    for (t, closed) in [(q(2, 1), true), (q(-1, 1), true), (q(1, 2), true), (q(1, 1), false), (q(0, 1), false)] {
        let r = pre_einstein::nikolayevsky_test(&catalog::ex7(&t), 0.0, &OrbitOptions::default()).unwrap();
        assert_eq!(r.method, OrbitMethod::TorusLp);
        let want = if closed { OrbitVerdict::Closed } else { OrbitVerdict::NotClosed };
        assert_eq!(r.verdict, want, "ex7({t})");
    }
}

#[test]
fn will9_orbit_is_not_closed() {
    let mu = catalog::will9(&q(2, 1));
    let pre = pre_einstein::pre_einstein_derivation(&mu, 0.0).unwrap();
    assert!(pre.eigenvalues.iter().any(|(_, m)| *m > 1));
    let nc = pre_einstein::necessary_conditions(&mu, &pre, 0.0).unwrap();
    assert!(nc.passed, "necessary conditions hold, the obstruction is orbit closure");
    let r = pre_einstein::nikolayevsky_test(&mu, 0.0, &OrbitOptions::default()).unwrap();
    assert_eq!(r.method, OrbitMethod::KempfNess);
    assert_eq!(r.verdict, OrbitVerdict::NotClosed, "{r:?}");
    assert!(r.stabilizer_gap_ratio.unwrap() < 0.1);
}

#[test]
fn float_orbit_test_on_closed_orbits() {
    for mu in [catalog::l4_plus(), catalog::filiform(5), catalog::free(2, 3).unwrap()] {
        let r = pre_einstein::nikolayevsky_test(&mu.to_f64(), 1e-10, &OrbitOptions::default()).unwrap();
        assert_eq!(r.verdict, OrbitVerdict::Closed, "{mu}: {r:?}");
    }
}

#[test]
fn ex7_at_one_is_not_certified_by_descent() {
    let opts = DescentOptions { max_iter: 1500, ..DescentOptions::default() };
    let out = soliton::orbit_descent(&catalog::ex7(&q(1, 1)), &opts).unwrap();
    assert_ne!(out.verdict, DescentVerdict::CertifiedSoliton);
    assert!(out.residual > 1e-4, "residual {}", out.residual);
    assert!(out.invariants_constant);
}

#[test]
fn descent_limit_carries_einstein_data() {
    let out = soliton::orbit_descent(&catalog::ex7(&q(2, 1)), &DescentOptions::default()).unwrap();
    assert!(out.converged());
    let cert = soliton::soliton_certificate(&out.best, 1e-6);
    assert!(cert.residual_f64 < 1e-7);
    assert_eq!(cert.eigenvalue_type.map(|t| t.to_string()).as_deref(), Some("(1<2<3<4<5<6<7; 1,1,1,1,1,1,1)"));
    // invariants of the orbit do not move along the descent
    assert!(out.invariants_constant);
}

#[test]
fn stratum_of_the_flow_limit() {
    // l4_plus flows to L4, both lie in the stratum of beta = (-1,-1/2,0,1/2)
    let beta = strata::beta_mu(&catalog::l4_plus()).unwrap().beta;
    assert_eq!(beta, strata::beta_mu(&catalog::filiform(4)).unwrap().beta);
    let sem = strata::semistability_test(&catalog::l4_plus(), &beta, &Default::default()).unwrap();
    assert_eq!(sem.verdict, strata::SemistabilityVerdict::Semistable);
}
