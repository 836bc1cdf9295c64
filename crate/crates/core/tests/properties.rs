mod common;

use nilsoliton_core::bracket::{self, BracketTensor};
use nilsoliton_core::catalog;
use nilsoliton_core::curvature;
use nilsoliton_core::io;
use nilsoliton_core::nice;
use nilsoliton_core::poly::{self, CubicForm, MONOMIALS};
use nilsoliton_core::strata;
use nilsoliton_core::{Matrix, Rational, Scalar};
use proptest::prelude::*;

fn small_rational() -> impl Strategy<Value = Rational> {
    (-4i64..=4, 1i64..=3).prop_map(|(n, d)| Rational::ratio(n, d))
}

fn cubic() -> impl Strategy<Value = CubicForm<Rational>> {
    proptest::collection::vec(small_rational(), 10)
        .prop_map(|c| CubicForm::from_terms(&MONOMIALS.iter().copied().zip(c).collect::<Vec<_>>()))
        .prop_filter("nonzero", |p| !p.is_zero())
}

fn near_identity() -> impl Strategy<Value = Matrix<f64>> {
    proptest::collection::vec(-0.05f64..0.05, 9).prop_map(|v| {
        let g = Matrix::identity(3).add(&Matrix::from_flat(3, 3, v));
        let det = g.determinant();
        g.scale(&(1.0 / det.cbrt()))
    })
}

fn simple_graph() -> impl Strategy<Value = Vec<(usize, usize)>> {
    (3usize..7).prop_flat_map(|v| {
        let pairs: Vec<(usize, usize)> = (0..v).flat_map(|a| (a + 1..v).map(move |b| (a, b))).collect();
        proptest::sample::subsequence(pairs.clone(), 1..=pairs.len())
    })
}

fn seed() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn cubic_moment_is_traceless_symmetric(p in cubic()) {
        let m = poly::moment_poly(&p).unwrap();
        prop_assert_eq!(m.trace(), Rational::from_i64(0));
        prop_assert!(m.is_symmetric(0.0));
    }

    #[test]
    fn critical_cubics_minimize_f_on_their_orbit(g in near_identity(), which in 0usize..4) {
        let p: CubicForm<f64> = match which {
            0 => poly::q(),
            1 => poly::x1x2x3(),
            2 => CubicForm::monomial([2, 1, 0]),
            _ => poly::p_ab((27.0f64 / 5.0).sqrt(), 1.0),
        };
        let f0 = poly::f_value(&p).unwrap();
        let f1 = poly::f_value(&poly::action(&g, &p, 1e-12).unwrap()).unwrap();
        prop_assert!(f1 >= f0 - 1e-12, "F dropped from {} to {}", f0, f1);
    }

    #[test]
    fn diagonal_orbit_of_p1_stays_away_from_zero(t in 0.05f64..20.0, s in 0.05f64..20.0) {
        let g = Matrix::diagonal(&[t, s, 1.0 / (t * s)]);
        let gp = poly::action(&g, &poly::p1(), 1e-12).unwrap();
        // the x1x2x3 coefficient is fixed by determinant-one diagonal maps
        prop_assert!((gp.coeff([1, 1, 1]) - 1.0).abs() < 1e-9);
        prop_assert!(gp.norm2() >= 1.0 - 1e-9);
    }

    #[test]
    fn f_is_scale_and_permutation_invariant(s in seed(), c in 1i64..5) {
        let mut rng = common::rng(s);
        let mu = common::random_triangular(&mut rng, 5, 0.5);
        let f = curvature::functional_f(&mu);
        prop_assert_eq!(curvature::functional_f(&mu.scale(&Rational::from_i64(c))), f.clone());
        // orthogonal relabeling is an isometry
        let moved = mu.permute(&[4, 2, 0, 3, 1]);
        prop_assert_eq!(curvature::functional_f(&moved), f);
    }

    #[test]
    fn beta_has_trace_minus_one_and_bounds_f(s in seed()) {
        let mut rng = common::rng(s);
        let mu = common::random_general(&mut rng, 4, 0.35);
        let beta = strata::beta_mu(&mu).unwrap().beta;
        let tr = beta.iter().fold(Rational::from_i64(0), |a, b| a + b.clone());
        prop_assert_eq!(tr, Rational::from_i64(-1));
        let f = curvature::moment_map(&mu).unwrap().frob_norm2();
        prop_assert!(f >= nilsoliton_core::linalg::dot(&beta, &beta));
    }

    #[test]
    fn action_preserves_jacobi_and_nilpotency(s in seed()) {
        let mut rng = common::rng(s);
        let mu = catalog::type_pq_random(2, 4, rng_seed(&mut rng)).unwrap();
        let g = Matrix::from_fn(6, 6, |r, c| if r == c { Rational::from_i64(1) } else if (r + 2 * c + s as usize).is_multiple_of(5) { Rational::ratio(1, 2) } else { Rational::from_i64(0) });
        if let Ok(moved) = bracket::act(&g, &mu, 0.0) {
            prop_assert!(bracket::jacobi_defect(&moved).is_lie(0.0));
            prop_assert!(bracket::nilpotency(&moved, 0.0).unwrap().is_nilpotent);
            prop_assert_eq!(bracket::derivations(&moved, 0.0).len(), bracket::derivations(&mu, 0.0).len());
        }
    }

    #[test]
    fn graph_bases_are_nice(edges in simple_graph()) {
        let mu = catalog::graph_algebra(&edges).unwrap();
        prop_assert!(nice::is_nice(&mu));
        prop_assert!(bracket::jacobi_defect(&mu).is_lie(0.0));
    }

    #[test]
    fn json_round_trip(s in seed()) {
        let mut rng = common::rng(s);
        let mu = common::random_triangular(&mut rng, 5, 0.4);
        let back = io::parse_algebra(&io::to_json(&mu)).unwrap();
        prop_assert_eq!(back, io::AnyBracket::Rational(mu.clone()));
        let f = mu.to_f64();
        prop_assert_eq!(io::parse_algebra(&io::to_json(&f)).unwrap(), io::AnyBracket::Float(f));
    }
}

fn rng_seed(rng: &mut rand_chacha::ChaCha8Rng) -> u64 {
    use rand::Rng;
    rng.random()
}

#[test]
fn ricci_formula_matches_moment_map_on_catalog() {
    for (name, mu) in common::lie_algebras() {
        let ric = curvature::ricci(&mu, 0.0).unwrap();
        assert_eq!(ric.cross_check, 0.0, "{name}");
        let m = curvature::moment_map(&mu).unwrap();
        assert_eq!(ric.ric, m.scale(&(mu.norm2() / Rational::from_i64(4))), "{name}");
    }
}

#[test]
fn zero_bracket_is_rejected() {
    let zero = BracketTensor::<Rational>::zero(4);
    assert!(strata::beta_mu(&zero).is_err());
    assert!(curvature::moment_map(&zero).is_err());
}
