#![allow(dead_code)]

use nilsoliton_core::{catalog, BracketTensor, FloatBracket, Rational, RationalBracket, Scalar};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// Random bracket with `[e_i, e_j] ∈ span{e_k : k > max(i, j)}`, so it is
/// nilpotent as an algebra (Jacobi is not enforced). Integer entries in `[-2, 2]`.
pub fn random_triangular(rng: &mut ChaCha8Rng, n: usize, density: f64) -> RationalBracket {
    loop {
        let mut mu = BracketTensor::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if rng.random_bool(density) {
                        let c: i64 = rng.random_range(-2..=2);
                        if c != 0 {
                            mu.add_entry(i, j, k, Rational::from_i64(c));
                        }
                    }
                }
            }
        }
        if !mu.is_zero() {
            return mu;
        }
    }
}

/// Random bracket with arbitrary targets.
pub fn random_general(rng: &mut ChaCha8Rng, n: usize, density: f64) -> RationalBracket {
    loop {
        let mut mu = BracketTensor::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    if rng.random_bool(density) {
                        let c: i64 = rng.random_range(-2..=2);
                        if c != 0 {
                            mu.add_entry(i, j, k, Rational::from_i64(c));
                        }
                    }
                }
            }
        }
        if !mu.is_zero() {
            return mu;
        }
    }
}

pub fn random_float_triangular(rng: &mut ChaCha8Rng, n: usize) -> FloatBracket {
    loop {
        let mut mu = BracketTensor::zero(n);
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if rng.random_bool(0.6) {
                        mu.add_entry(i, j, k, rng.random_range(-1.0..1.0));
                    }
                }
            }
        }
        if !mu.is_zero() {
            return mu;
        }
    }
}

fn p(v: i64) -> Rational {
    Rational::from_i64(v)
}

/// Nilpotent Lie algebras from the catalog plus seeded random 2-step ones.
pub fn lie_algebras() -> Vec<(String, RationalBracket)> {
    let mut out: Vec<(String, RationalBracket)> = Vec::new();
    fn add(out: &mut Vec<(String, RationalBracket)>, name: &str, params: Vec<Rational>) {
        let mu = catalog::get(name, &params).expect("catalog entry");
        let label = if params.is_empty() {
            name.to_string()
        } else {
            format!("{name}({})", params.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
        };
        out.push((label, mu));
    }
    add(&mut out, "h3", vec![]);
    add(&mut out, "heisenberg", vec![p(5)]);
    add(&mut out, "heisenberg", vec![p(7)]);
    add(&mut out, "h3_sum", vec![]);
    add(&mut out, "h3_complex", vec![]);
    for n in 3..=8 {
        add(&mut out, "filiform", vec![p(n)]);
    }
    add(&mut out, "l4_plus", vec![]);
    for t in [-1, 0, 1, 2, 3] {
        add(&mut out, "ex7", vec![p(t)]);
    }
    add(&mut out, "ex7", vec![q(1, 2)]);
    for t in [1, 2, 5] {
        add(&mut out, "will9", vec![p(t)]);
    }
    add(&mut out, "will9", vec![q(3, 2)]);
    for (m, s) in [(2, 2), (3, 2), (2, 3), (4, 2), (2, 4)] {
        add(&mut out, "free", vec![p(m), p(s)]);
    }
    for edges in [vec![1, 2, 2, 3], vec![1, 2, 2, 3, 3, 1], vec![1, 2, 1, 3, 1, 4], vec![1, 2, 2, 3, 3, 4, 4, 1]] {
        add(&mut out, "graph", edges.into_iter().map(p).collect());
    }
    let mut seed = 0;
    while out.len() < 50 {
        add(&mut out, "type_pq_random", vec![p(2), p(4), p(seed)]);
        seed += 1;
        if out.len() < 50 {
            add(&mut out, "type_pq_random", vec![p(3), p(4), p(seed)]);
            seed += 1;
        }
    }
    out
}
