//! Named nilpotent Lie algebras with exact structure constants.

use std::collections::BTreeMap;

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bracket::{BracketTensor, RationalBracket};
use crate::error::{Error, Result};
use crate::nice::{self, UposResult};
use crate::scalar::{Rational, Scalar};

/// Largest dimension `free(m, p)` will build.
pub const FREE_MAX_DIM: usize = 200;

#[derive(Clone, Debug, Serialize)]
pub struct CatalogEntry {
    pub name: &'static str,
    pub params: &'static str,
    pub note: &'static str,
}

pub fn list() -> Vec<CatalogEntry> {
    let e = |name, params, note| CatalogEntry { name, params, note };
    vec![
        e("abelian", "n", "abelian algebra R^n"),
        e("heisenberg", "n = 2m+1", "[X_i, Y_i] = Z"),
        e("h3", "", "heisenberg 3"),
        e("h3_sum", "", "h3 + h3 as a type (2,4) algebra"),
        e("h3_complex", "", "h3 over C viewed as a real type (2,4) algebra"),
        e("filiform", "n >= 3", "L_n: [e1, e_i] = e_{i+1}"),
        e("l4", "", "filiform 4"),
        e("l4_plus", "", "[X1,X2] = X3+X4, [X1,X3] = X4"),
        e("ex7", "t", "7-dim curve, Einstein nilradical iff t != 0, 1"),
        e("will9", "t", "9-dim curve of type (3,6), not Einstein nilradicals for t > 1"),
        e("free", "m p", "free p-step nilpotent on m generators (Lyndon basis)"),
        e("graph", "v1 w1 v2 w2 ...", "2-step algebra of a simple graph (1-based vertices)"),
        e("type_pq_random", "p q seed", "random 2-step algebra, p-dim center, q generators"),
    ]
}

fn one() -> Rational {
    Rational::one()
}

fn int_param(name: &str, params: &[Rational], idx: usize) -> Result<i64> {
    let v = params
        .get(idx)
        .ok_or_else(|| Error::ParamOutOfRange(format!("{name}: missing parameter {}", idx + 1)))?;
    if !v.is_integer() {
        return Err(Error::ParamOutOfRange(format!("{name}: parameter {} must be an integer", idx + 1)));
    }
    v.to_integer()
        .to_i64()
        .ok_or_else(|| Error::ParamOutOfRange(format!("{name}: parameter {} too large", idx + 1)))
}

fn arity(name: &str, params: &[Rational], n: usize) -> Result<()> {
    if params.len() != n {
        return Err(Error::ParamOutOfRange(format!(
            "{name} takes {n} parameter(s), got {}",
            params.len()
        )));
    }
    Ok(())
}

fn positive_usize(name: &str, params: &[Rational], idx: usize, min: i64) -> Result<usize> {
    let v = int_param(name, params, idx)?;
    if v < min {
        return Err(Error::ParamOutOfRange(format!("{name}: parameter {} must be at least {min}", idx + 1)));
    }
    Ok(v as usize)
}

/// Build a catalog algebra by name.
pub fn get(name: &str, params: &[Rational]) -> Result<RationalBracket> {
    match name {
        "abelian" => {
            arity(name, params, 1)?;
            Ok(BracketTensor::zero(positive_usize(name, params, 0, 1)?))
        }
        "heisenberg" => {
            arity(name, params, 1)?;
            let n = positive_usize(name, params, 0, 3)?;
            if n % 2 == 0 {
                return Err(Error::ParamOutOfRange("heisenberg: dimension must be odd".into()));
            }
            Ok(heisenberg(n / 2))
        }
        "h3" => {
            arity(name, params, 0)?;
            Ok(heisenberg(1))
        }
        "h3_sum" => {
            arity(name, params, 0)?;
            Ok(h3_sum())
        }
        "h3_complex" => {
            arity(name, params, 0)?;
            Ok(h3_complex())
        }
        "filiform" => {
            arity(name, params, 1)?;
            Ok(filiform(positive_usize(name, params, 0, 3)?))
        }
        "l4" => {
            arity(name, params, 0)?;
            Ok(filiform(4))
        }
        "l4_plus" => {
            arity(name, params, 0)?;
            Ok(l4_plus())
        }
        "ex7" => {
            arity(name, params, 1)?;
            Ok(ex7(&params[0]))
        }
        "will9" => {
            arity(name, params, 1)?;
            Ok(will9(&params[0]))
        }
        "free" => {
            arity(name, params, 2)?;
            free(positive_usize(name, params, 0, 1)?, positive_usize(name, params, 1, 1)?)
        }
        "graph" => {
            if !params.len().is_multiple_of(2) || params.is_empty() {
                return Err(Error::ParamOutOfRange("graph: expected pairs of vertices".into()));
            }
            let mut edges = Vec::new();
            for k in (0..params.len()).step_by(2) {
                let v = positive_usize(name, params, k, 1)?;
                let w = positive_usize(name, params, k + 1, 1)?;
                edges.push((v - 1, w - 1));
            }
            graph_algebra(&edges)
        }
        "type_pq_random" => {
            arity(name, params, 3)?;
            let p = positive_usize(name, params, 0, 1)?;
            let q = positive_usize(name, params, 1, 2)?;
            let seed = int_param(name, params, 2)?;
            type_pq_random(p, q, seed as u64)
        }
        _ => Err(Error::UnknownName(name.to_string())),
    }
}

/// `[X_i, Y_i] = Z` on `ℝ^{2m+1}`.
pub fn heisenberg(m: usize) -> RationalBracket {
    BracketTensor::from_entries(2 * m + 1, (0..m).map(|i| (i, m + i, 2 * m, one())))
}

pub fn h3_sum() -> RationalBracket {
    BracketTensor::from_one_based(6, &[(1, 2, 5, one()), (3, 4, 6, one())])
}

pub fn h3_complex() -> RationalBracket {
    BracketTensor::from_one_based(6, &[(1, 3, 5, one()), (2, 4, 5, -one()), (1, 4, 6, one()), (2, 3, 6, one())])
}

/// `L_n`: `[e_1, e_i] = e_{i+1}` for `2 ≤ i < n`.
pub fn filiform(n: usize) -> RationalBracket {
    BracketTensor::from_entries(n, (1..n - 1).map(|i| (0, i, i + 1, one())))
}

pub fn l4_plus() -> RationalBracket {
    BracketTensor::from_one_based(4, &[(1, 2, 3, one()), (1, 2, 4, one()), (1, 3, 4, one())])
}

/// The graded curve `n = RX_1 ⊕ ... ⊕ RX_7`; `[X_3, X_4]` lands in `X_7`
/// as the grading requires.
pub fn ex7(t: &Rational) -> RationalBracket {
    BracketTensor::from_one_based(
        7,
        &[
            (1, 2, 3, one()),
            (1, 3, 4, one()),
            (1, 4, 5, one()),
            (2, 3, 5, one()),
            (3, 4, 7, one() - t),
            (1, 5, 6, one()),
            (2, 4, 6, one()),
            (1, 6, 7, one()),
            (2, 5, 7, t.clone()),
        ],
    )
}

pub fn will9(t: &Rational) -> RationalBracket {
    BracketTensor::from_one_based(
        9,
        &[
            (5, 4, 7, one()),
            (1, 6, 8, one()),
            (3, 2, 9, one()),
            (3, 6, 7, t.clone()),
            (5, 2, 8, t.clone()),
            (1, 4, 9, t.clone()),
            (1, 2, 7, one()),
        ],
    )
}

type Poly = BTreeMap<Vec<u8>, Rational>;

fn poly_mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (u, x) in a {
        for (v, y) in b {
            let mut w = u.clone();
            w.extend_from_slice(v);
            let c = out.entry(w).or_insert_with(Rational::zero);
            *c += x * y;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_bracket(a: &Poly, b: &Poly) -> Poly {
    let mut out = poly_mul(a, b);
    for (w, c) in poly_mul(b, a) {
        let e = out.entry(w).or_insert_with(Rational::zero);
        *e -= c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Lyndon words over `{0..m}` of length `≤ p`, by Duval's algorithm, sorted
/// by length then lexicographically.
fn lyndon_words(m: usize, p: usize, cap: usize) -> Result<Vec<Vec<u8>>> {
    let mut out = Vec::new();
    let mut w: Vec<u8> = vec![0];
    while !w.is_empty() {
        out.push(w.clone());
        if out.len() > cap {
            return Err(Error::ParamOutOfRange(format!("free({m}, {p}) exceeds {cap} dimensions")));
        }
        let base = w.len();
        while w.len() < p {
            let c = w[w.len() - base];
            w.push(c);
        }
        while w.last().is_some_and(|&c| c as usize == m - 1) {
            w.pop();
        }
        if let Some(c) = w.last_mut() {
            *c += 1;
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(out)
}

fn is_lyndon(w: &[u8]) -> bool {
    (1..w.len()).all(|i| w[i..] > *w)
}

/// Free `p`-step nilpotent Lie algebra on `m` generators, in the Lyndon
/// basis with standard bracketing.
pub fn free(m: usize, p: usize) -> Result<RationalBracket> {
    if m > 255 {
        return Err(Error::ParamOutOfRange("free: too many generators".into()));
    }
    let words = lyndon_words(m, p, FREE_MAX_DIM)?;
    let index: BTreeMap<Vec<u8>, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let mut polys: Vec<Poly> = Vec::with_capacity(words.len());
    for w in &words {
        let poly = if w.len() == 1 {
            Poly::from([(w.clone(), one())])
        } else {
            // w = uv with v the longest proper Lyndon suffix
            let split = (1..w.len()).find(|&i| is_lyndon(&w[i..])).expect("last letter is Lyndon");
            poly_bracket(&polys[index[&w[..split]]], &polys[index[&w[split..]]])
        };
        polys.push(poly);
    }
    let n = words.len();
    let mut mu = BracketTensor::zero(n);
    for a in 0..n {
        for b in a + 1..n {
            if words[a].len() + words[b].len() > p {
                continue;
            }
            // P_w = w + (lexicographically larger words), so peel off the smallest word
            let mut rest = poly_bracket(&polys[a], &polys[b]);
            while let Some((w, c)) = rest.iter().next().map(|(w, c)| (w.clone(), c.clone())) {
                let k = *index.get(&w).expect("leading word of a Lie element is Lyndon");
                mu.add_entry(a, b, k, c.clone());
                for (u, d) in &polys[k] {
                    let e = rest.entry(u.clone()).or_insert_with(Rational::zero);
                    *e -= &c * d;
                }
                rest.retain(|_, v| !v.is_zero());
            }
        }
    }
    Ok(mu)
}

/// Generators `X_v` for each vertex, then `Z_e` for each edge in input order.
pub fn graph_algebra(edges: &[(usize, usize)]) -> Result<RationalBracket> {
    if edges.is_empty() {
        return Err(Error::NotSimpleGraph("no edges".into()));
    }
    let mut seen = Vec::new();
    for &(v, w) in edges {
        if v == w {
            return Err(Error::NotSimpleGraph(format!("loop at vertex {}", v + 1)));
        }
        let key = (v.min(w), v.max(w));
        if seen.contains(&key) {
            return Err(Error::NotSimpleGraph(format!("repeated edge {}-{}", key.0 + 1, key.1 + 1)));
        }
        seen.push(key);
    }
    let q = seen.iter().map(|e| e.1).max().expect("nonempty") + 1;
    Ok(BracketTensor::from_entries(
        q + seen.len(),
        seen.iter().enumerate().map(|(e, &(v, w))| (v, w, q + e, one())),
    ))
}

/// Positivity of the graph, decided by the exact `Upos` test.
pub fn graph_positivity(edges: &[(usize, usize)]) -> Result<UposResult> {
    nice::upos_solve(&graph_algebra(edges)?)
}

/// Random 2-step bracket with integer constants in `[-3, 3]`: generators
/// `1..q`, center `q+1..q+p`.
pub fn type_pq_random(p: usize, q: usize, seed: u64) -> Result<RationalBracket> {
    if p > q * (q - 1) / 2 {
        return Err(Error::ParamOutOfRange(format!("type ({p},{q}) needs p <= q(q-1)/2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mu = BracketTensor::zero(p + q);
    for i in 0..q {
        for j in i + 1..q {
            for k in 0..p {
                let c: i64 = rng.random_range(-3..=3);
                mu.add_entry(i, j, q + k, Rational::from_i64(c));
            }
        }
    }
    Ok(mu)
}

/// Hessian determinant `4AC − B²` of the Pfaffian form
/// `f(x, y) = Pf(x J¹ + y J²) = A x² + B xy + C y²` of a type (2,4) bracket.
pub fn pfaffian_hessian<T: Scalar>(mu: &BracketTensor<T>) -> Result<T> {
    if mu.dim() != 6 {
        return Err(Error::WrongType(format!("expected dimension 6, got {}", mu.dim())));
    }
    if let Some((&(i, j, k), _)) = mu.entries().find(|(&(i, j, k), _)| i >= 4 || j >= 4 || k < 4) {
        return Err(Error::WrongType(format!(
            "bracket [e{}, e{}] has an e{} component outside the center span(e5, e6)",
            i + 1,
            j + 1,
            k + 1
        )));
    }
    // J entries as linear forms (x-coefficient, y-coefficient)
    let j = |a: usize, b: usize| (mu.get(a, b, 4), mu.get(a, b, 5));
    let prod = |(a1, b1): (T, T), (a2, b2): (T, T)| {
        (a1.clone() * a2.clone(), a1 * b2.clone() + b1.clone() * a2, b1 * b2)
    };
    let terms = [
        (T::one(), prod(j(0, 1), j(2, 3))),
        (-T::one(), prod(j(0, 2), j(1, 3))),
        (T::one(), prod(j(0, 3), j(1, 2))),
    ];
    let (mut a, mut b, mut c) = (T::zero(), T::zero(), T::zero());
    for (s, (x2, xy, y2)) in terms {
        a = a + s.clone() * x2;
        b = b + s.clone() * xy;
        c = c + s * y2;
    }
    Ok(T::from_i64(4) * a * c - b.clone() * b)
}

/// Sign of `pfaffian_hessian`, as used to tell `h3 ⊗ ℂ` from `h3 ⊕ h3`.
pub fn pfaffian_sign<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> Result<i8> {
    let h = pfaffian_hessian(mu)?;
    Ok(if h.is_negligible(tol) {
        0
    } else if h.to_f64().is_sign_positive() {
        1
    } else {
        -1
    })
}
