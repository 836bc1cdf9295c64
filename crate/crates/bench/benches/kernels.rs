use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nilsoliton_core::soliton::{self, FlowOptions};
use nilsoliton_core::{bracket, catalog, curvature, nice, strata, Rational};

fn ricci(c: &mut Criterion) {
    let exact = catalog::free(2, 4).unwrap();
    let float = exact.to_f64();
    c.bench_function("ricci free(2,4) rational", |b| b.iter(|| curvature::ricci_fast(black_box(&exact))));
    c.bench_function("ricci free(2,4) float", |b| b.iter(|| curvature::ricci_fast(black_box(&float))));
}

fn derivations(c: &mut Criterion) {
    let mu = catalog::will9(&Rational::from_integer(2.into()));
    c.bench_function("derivations will9 rational", |b| b.iter(|| bracket::derivations(black_box(&mu), 0.0)));
    let f = mu.to_f64();
    c.bench_function("derivations will9 float", |b| b.iter(|| bracket::derivations(black_box(&f), 1e-9)));
}

fn mcc(c: &mut Criterion) {
    let mu = catalog::free(3, 2).unwrap();
    c.bench_function("beta_mu free(3,2)", |b| b.iter(|| strata::beta_mu(black_box(&mu)).unwrap()));
}

fn upos(c: &mut Criterion) {
    let yes = catalog::ex7(&Rational::from_integer(2.into()));
    let no = catalog::ex7(&Rational::from_integer(1.into()));
    c.bench_function("upos ex7(2)", |b| b.iter(|| nice::upos_solve(black_box(&yes)).unwrap()));
    c.bench_function("upos ex7(1) farkas", |b| b.iter(|| nice::upos_solve(black_box(&no)).unwrap()));
}

fn flow(c: &mut Criterion) {
    let mu = catalog::l4_plus().to_f64();
    let opts = FlowOptions { max_t: 5.0, tol: 0.0, ..FlowOptions::default() };
    c.bench_function("flow l4_plus 100 steps", |b| b.iter(|| soliton::integrate_flow_partial(black_box(&mu), &opts).unwrap()));
}

criterion_group!(benches, ricci, derivations, mcc, upos, flow);
criterion_main!(benches);
