//! Nice bases, the weight Gram matrix `U`, and the positivity criterion for
//! `U x = [1]`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bracket::{BracketTensor, FloatBracket, Weight};
use crate::curvature;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::scalar::{Rational, Scalar};

/// Why a basis fails to be nice (0-based indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NiceViolation {
    /// `[e_i, e_j]` has components along two basis vectors.
    TwoTargets { pair: (usize, usize), k1: usize, k2: usize },
    /// Two distinct pairs share an index and feed the same `e_k`.
    Overlap { k: usize, pair1: (usize, usize), pair2: (usize, usize) },
}

impl NiceViolation {
    pub fn pairs(&self) -> ((usize, usize), (usize, usize)) {
        match self {
            Self::TwoTargets { pair, .. } => (*pair, *pair),
            Self::Overlap { pair1, pair2, .. } => (*pair1, *pair2),
        }
    }
}

impl fmt::Display for NiceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TwoTargets { pair: (i, j), k1, k2 } => write!(
                f,
                "[e{}, e{}] has components along e{} and e{}",
                i + 1,
                j + 1,
                k1 + 1,
                k2 + 1
            ),
            Self::Overlap { k, pair1, pair2 } => write!(
                f,
                "pairs ({}, {}) and ({}, {}) share an index and both map to e{}",
                pair1.0 + 1,
                pair1.1 + 1,
                pair2.0 + 1,
                pair2.1 + 1,
                k + 1
            ),
        }
    }
}

/// First violation of the nice-basis conditions, or `None` if the basis is nice.
pub fn nice_violation<T: Scalar>(mu: &BracketTensor<T>) -> Option<NiceViolation> {
    let mut target: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (&(i, j, k), _) in mu.entries() {
        if let Some(&k1) = target.get(&(i, j)) {
            return Some(NiceViolation::TwoTargets { pair: (i, j), k1, k2: k });
        }
        target.insert((i, j), k);
    }
    let mut by_k: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (&pair, &k) in &target {
        by_k.entry(k).or_default().push(pair);
    }
    for (k, pairs) in by_k {
        for (a, p) in pairs.iter().enumerate() {
            for q in &pairs[a + 1..] {
                if p.0 == q.0 || p.0 == q.1 || p.1 == q.0 || p.1 == q.1 {
                    return Some(NiceViolation::Overlap { k, pair1: *p, pair2: *q });
                }
            }
        }
    }
    None
}

pub fn is_nice<T: Scalar>(mu: &BracketTensor<T>) -> bool {
    nice_violation(mu).is_none()
}

fn ensure_nice<T: Scalar>(mu: &BracketTensor<T>) -> Result<()> {
    match nice_violation(mu) {
        None => Ok(()),
        Some(v) => {
            let (a, b) = v.pairs();
            Err(Error::NotNice(a, b))
        }
    }
}

/// Support weights (in storage order) and their Gram matrix.
#[derive(Clone, Debug, Serialize)]
pub struct GramSystem {
    #[serde(skip)]
    pub support: Vec<Weight>,
    pub u: Vec<Vec<i64>>,
}

impl GramSystem {
    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }
}

pub fn gram_u<T: Scalar>(mu: &BracketTensor<T>) -> GramSystem {
    let support = mu.support_weights();
    let u = support
        .iter()
        .map(|a| support.iter().map(|b| a.inner(b)).collect())
        .collect();
    GramSystem { support, u }
}

/// `U [(c_ij^k)²] = c [1]`: returns whether the left side is constant and
/// its first entry. Requires a diagonal Ricci operator.
pub fn tracy_check<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> Result<(bool, T)> {
    let ric = curvature::ricci_operator_r(mu);
    let n = mu.dim();
    for i in 0..n {
        for j in i + 1..n {
            if !ric[(i, j)].is_negligible(tol) {
                return Err(Error::RicNotDiagonal(i, j));
            }
        }
    }
    let gram = gram_u(mu);
    let squares: Vec<T> = mu.entries().map(|(_, v)| v.clone() * v.clone()).collect();
    let values: Vec<T> = gram
        .u
        .iter()
        .map(|row| {
            row.iter()
                .zip(&squares)
                .fold(T::zero(), |acc, (a, s)| acc + T::from_i64(*a) * s.clone())
        })
        .collect();
    let Some(first) = values.first().cloned() else {
        return Ok((true, T::zero()));
    };
    let constant = values
        .iter()
        .all(|v| (v.clone() - first.clone()).is_negligible(tol));
    Ok((constant, first))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum UposVerdict {
    EinsteinNilradical,
    NotEinsteinNilradical,
}

/// Outcome of the positivity test for `U x = [1]`.
#[derive(Clone, Debug)]
pub struct UposResult {
    pub verdict: UposVerdict,
    /// Strictly positive exact solution.
    pub x: Option<Vec<Rational>>,
    /// `y ≠ 0`-type certificate: `U y ≥ 0`, `Σ y ≤ 0`, not all of these zero.
    pub farkas: Option<Vec<Rational>>,
    pub gram: GramSystem,
}

fn q(v: i64) -> Rational {
    Rational::from_i64(v)
}

/// Strictly positive solution of `U x = 1`, if one exists (exact LP:
/// maximize `t` with `x_i ≥ t`, `t ≤ 1`).
pub fn positive_solution(u: &[Vec<i64>]) -> Option<Vec<Rational>> {
    let m = u.len();
    if m == 0 {
        return None;
    }
    // variables x_0..x_{m-1}, t (free)
    let mut lp = LinearProgram::new(m + 1);
    lp.objective[m] = q(1);
    lp.free[m] = true;
    for row in u {
        let mut a: Vec<Rational> = row.iter().map(|v| q(*v)).collect();
        a.push(q(0));
        lp.constrain(a, Relation::Eq, q(1));
    }
    for i in 0..m {
        let mut a = vec![q(0); m + 1];
        a[i] = q(1);
        a[m] = q(-1);
        lp.constrain(a, Relation::Ge, q(0));
    }
    let mut cap = vec![q(0); m + 1];
    cap[m] = q(1);
    lp.constrain(cap, Relation::Le, q(1));
    match lp.solve() {
        LpOutcome::Optimal { x, value } if value.is_positive() => Some(x[..m].to_vec()),
        _ => None,
    }
}

/// Certificate that `U x = 1` has no positive solution: `y` with `U y ≥ 0`,
/// `Σ y ≤ 0` and `(U y, −Σ y) ≠ 0`. By the transposition theorem for
/// `[U | −1] (x, s) = 0`, `(x, s) > 0`, it exists exactly when no positive
/// solution does.
pub fn farkas_certificate(u: &[Vec<i64>]) -> Option<Vec<Rational>> {
    let m = u.len();
    // variables y (free, m) and w (m + 1) with w = [Uᵀ y; −Σ y], 0 ≤ w ≤ 1
    let nv = 2 * m + 1;
    let mut lp = LinearProgram::new(nv);
    for i in 0..m {
        lp.free[i] = true;
    }
    for j in m..nv {
        lp.objective[j] = q(1);
        let mut cap = vec![q(0); nv];
        cap[j] = q(1);
        lp.constrain(cap, Relation::Le, q(1));
    }
    for c in 0..m {
        let mut a = vec![q(0); nv];
        for r in 0..m {
            a[r] = q(u[r][c]);
        }
        a[m + c] = q(-1);
        lp.constrain(a, Relation::Eq, q(0));
    }
    let mut a = vec![q(0); nv];
    for v in a.iter_mut().take(m) {
        *v = q(-1);
    }
    a[2 * m] = q(-1);
    lp.constrain(a, Relation::Eq, q(0));
    match lp.solve() {
        LpOutcome::Optimal { x, value } if value.is_positive() => Some(primitive(&x[..m])),
        _ => None,
    }
}

/// Scale a rational vector to coprime integers (as rationals).
fn primitive(v: &[Rational]) -> Vec<Rational> {
    let den = crate::scalar::common_denominator(v);
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = crate::scalar::gcd_all(&ints);
    if g.is_zero() {
        return v.to_vec();
    }
    ints.into_iter().map(|x| Rational::from_integer(x / &g)).collect()
}

/// Exact check of a Farkas certificate against `U`.
pub fn verify_farkas(u: &[Vec<i64>], y: &[Rational]) -> bool {
    let uy: Vec<Rational> = u
        .iter()
        .map(|row| row.iter().zip(y).fold(q(0), |acc, (a, b)| acc + q(*a) * b))
        .collect();
    let sum = y.iter().fold(q(0), |acc, v| acc + v);
    uy.iter().all(|v| !v.is_negative())
        && !sum.is_positive()
        && (uy.iter().any(|v| !v.is_zero()) || !sum.is_zero())
}

/// Decide whether `U x = [1]` has a positive solution for a nice,
/// nonabelian bracket. Depends only on the support of `μ`.
pub fn upos_solve<T: Scalar>(mu: &BracketTensor<T>) -> Result<UposResult> {
    ensure_nice(mu)?;
    if mu.is_zero() {
        return Err(Error::AbelianInput("positivity test needs a nonzero bracket".into()));
    }
    let gram = gram_u(mu);
    if let Some(x) = positive_solution(&gram.u) {
        return Ok(UposResult {
            verdict: UposVerdict::EinsteinNilradical,
            x: Some(x),
            farkas: None,
            gram,
        });
    }
    let y = farkas_certificate(&gram.u);
    debug_assert!(y.as_ref().is_some_and(|y| verify_farkas(&gram.u, y)));
    Ok(UposResult {
        verdict: UposVerdict::NotEinsteinNilradical,
        x: None,
        farkas: y,
        gram,
    })
}

/// Nilsoliton with constants `sign(c)·√x` and, when possible, the diagonal
/// map carrying `μ` onto it.
#[derive(Clone, Debug)]
pub struct NilsolitonConstruction {
    /// Squared structure constants of `ν`, exact.
    pub x: Vec<Rational>,
    pub signs: Vec<i8>,
    pub nu: FloatBracket,
    /// Whether `⟨d, α_l⟩ = ½ log(x_l / c_l²)` is solvable, decided exactly
    /// through the integer relations among the support weights.
    pub realizable: bool,
    /// `exp(diag d)` when realizable.
    pub g: Option<Matrix<f64>>,
}

pub fn construct_nilsoliton<T: Scalar>(mu: &BracketTensor<T>, x: &[Rational]) -> Result<NilsolitonConstruction> {
    let support: Vec<((usize, usize, usize), T)> = mu.entries().map(|(k, v)| (*k, v.clone())).collect();
    if x.len() != support.len() {
        return Err(Error::DimensionMismatch {
            expected: support.len(),
            found: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_positive()) {
        return Err(Error::NotPositive);
    }
    let n = mu.dim();
    let signs: Vec<i8> = support
        .iter()
        .map(|(_, c)| if *c > T::zero() { 1 } else { -1 })
        .collect();
    let nu = FloatBracket::from_entries(
        n,
        support
            .iter()
            .zip(x)
            .zip(&signs)
            .map(|((&((i, j, k), _), xv), s)| (i, j, k, f64::from(*s) * Scalar::to_f64(xv).sqrt())),
    );
    // ratios r_l = x_l / c_l²
    let ratios: Vec<Rational> = support
        .iter()
        .zip(x)
        .map(|((_, c), xv)| {
            let c = c.to_rational();
            xv / (&c * &c)
        })
        .collect();
    let weights = mu.support_weights();
    let wt = Matrix::from_fn(n, weights.len(), |r, l| Rational::from_i64(weights[l].diag[r]));
    let relations = linalg::bareiss_nullspace(&wt);
    let realizable = relations.iter().all(|rel| {
        let mut num = Rational::one();
        let mut den = Rational::one();
        for (r, ratio) in rel.iter().zip(&ratios) {
            let e = r.to_integer().to_i64().expect("small relation");
            let p = num_traits::pow(ratio.clone(), e.unsigned_abs() as usize);
            if e > 0 {
                num *= p;
            } else if e < 0 {
                den *= p;
            }
        }
        num == den
    });
    let g = if realizable {
        let a = Matrix::from_fn(weights.len(), n, |l, r| weights[l].diag[r] as f64);
        let rhs: Vec<f64> = ratios.iter().map(|r| 0.5 * Scalar::to_f64(r).ln()).collect();
        linalg::solve_min_norm(&a, &rhs, 1e-12).map(|d| Matrix::diagonal(&d.iter().map(|v| v.exp()).collect::<Vec<_>>()))
    } else {
        None
    };
    Ok(NilsolitonConstruction {
        x: x.to_vec(),
        signs,
        nu,
        realizable,
        g,
    })
}
