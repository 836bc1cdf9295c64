//! Ricci operator, moment map and the functional `F` on nilpotent brackets,
//! plus Ricci curvature of rank-one solvable extensions.

use serde::Serialize;

use crate::bracket::{self, BracketTensor, DerivationSpace, FloatBracket};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// Curvature data of the metric `⟨e_i, e_j⟩ = δ_ij` on `(ℝⁿ, μ)`.
#[derive(Clone, Debug)]
pub struct RicciData<T> {
    pub ric: Matrix<T>,
    pub scal: T,
    /// `16 tr Ric² / ||μ||⁴ = ||m(μ)||²`.
    pub f: T,
    pub moment: Matrix<T>,
    /// Max entry of `Ric − ||μ||²/4 · m(μ)` with `m` from the π-contraction.
    pub cross_check: f64,
}

/// Ricci operator of a metric Lie algebra without the Killing and mean
/// curvature terms:
/// `R_ab = −½ Σ ⟨[e_a,e_i],e_j⟩⟨[e_b,e_i],e_j⟩ + ¼ Σ ⟨[e_i,e_j],e_a⟩⟨[e_i,e_j],e_b⟩`.
pub fn ricci_operator_r<T: Scalar>(mu: &BracketTensor<T>) -> Matrix<T> {
    let n = mu.dim();
    let c = mu.dense();
    let idx = |a: usize, b: usize, k: usize| (a * n + b) * n + k;
    let half = T::ratio(1, 2);
    let quarter = T::ratio(1, 4);
    let mut r = Matrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let mut neg = T::zero();
            let mut pos = T::zero();
            for i in 0..n {
                for j in 0..n {
                    let x = &c[idx(a, i, j)];
                    let y = &c[idx(b, i, j)];
                    if !x.is_zero() && !y.is_zero() {
                        neg = neg + x.clone() * y.clone();
                    }
                    let x = &c[idx(i, j, a)];
                    let y = &c[idx(i, j, b)];
                    if !x.is_zero() && !y.is_zero() {
                        pos = pos + x.clone() * y.clone();
                    }
                }
            }
            let v = pos * quarter.clone() - neg * half.clone();
            r[(a, b)] = v.clone();
            r[(b, a)] = v;
        }
    }
    r
}

/// `m(μ)` from `⟨m(μ), α⟩ = ⟨π(α)μ, μ⟩ / ||μ||²` over symmetric `α`.
pub fn moment_map<T: Scalar>(mu: &BracketTensor<T>) -> Result<Matrix<T>> {
    if mu.is_zero() {
        return Err(Error::ZeroBracket);
    }
    let n = mu.dim();
    let norm2 = mu.norm2();
    let mut raw = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let p = bracket::pi(&Matrix::unit(n, a, b), mu)?;
            raw[(a, b)] = bracket::inner(&p, mu)? / norm2.clone();
        }
    }
    Ok(raw.symmetric_part())
}

fn ricci_parts<T: Scalar>(mu: &BracketTensor<T>) -> Result<RicciData<T>> {
    if mu.is_zero() {
        let n = mu.dim();
        return Ok(RicciData {
            ric: Matrix::zeros(n, n),
            scal: T::zero(),
            f: T::zero(),
            moment: Matrix::zeros(n, n),
            cross_check: 0.0,
        });
    }
    let ric = ricci_operator_r(mu);
    let norm2 = mu.norm2();
    let moment = ric.scale(&(T::from_i64(4) / norm2.clone()));
    let via_pi = moment_map(mu)?;
    let cross_check = via_pi
        .scale(&(norm2.clone() / T::from_i64(4)))
        .sub(&ric)
        .max_abs();
    let f = moment.frob_norm2();
    Ok(RicciData {
        scal: ric.trace(),
        ric,
        f,
        moment,
        cross_check,
    })
}

/// Ricci data of a nilpotent bracket, checked against the moment map.
pub fn ricci<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> Result<RicciData<T>> {
    if !bracket::nilpotency(mu, tol)?.is_nilpotent {
        return Err(Error::NotNilpotent);
    }
    ricci_parts(mu)
}

/// Fast path without the nilpotency gate or the π cross-check (used inside
/// flows, where the bracket stays in a known orbit closure).
pub fn ricci_fast<T: Scalar>(mu: &BracketTensor<T>) -> RicciData<T> {
    let n = mu.dim();
    if mu.is_zero() {
        return RicciData {
            ric: Matrix::zeros(n, n),
            scal: T::zero(),
            f: T::zero(),
            moment: Matrix::zeros(n, n),
            cross_check: 0.0,
        };
    }
    let ric = ricci_operator_r(mu);
    let moment = ric.scale(&(T::from_i64(4) / mu.norm2()));
    RicciData {
        scal: ric.trace(),
        f: moment.frob_norm2(),
        ric,
        moment,
        cross_check: 0.0,
    }
}

/// `F(μ) = 16 tr Ric² / ||μ||⁴`.
pub fn functional_f<T: Scalar>(mu: &BracketTensor<T>) -> T {
    ricci_fast(mu).f
}

/// `grad F(μ) = 16/||μ||⁶ (||μ||² π(Ric)μ − 4 tr(Ric²) μ)`, with respect to
/// the inner product of [`bracket::inner`].
pub fn grad_f<T: Scalar>(mu: &BracketTensor<T>) -> Result<BracketTensor<T>> {
    if mu.is_zero() {
        return Err(Error::ZeroBracket);
    }
    let ric = ricci_operator_r(mu);
    let norm2 = mu.norm2();
    let tr2 = ric.frob_norm2();
    let lead = bracket::pi(&ric, mu)?.scale(&norm2);
    let tail = mu.scale(&(T::from_i64(4) * tr2));
    let factor = T::from_i64(16) / (norm2.clone() * norm2.clone() * norm2);
    Ok(lead.sub(&tail)?.scale(&factor))
}

/// Rank-one metric solvable extension `s = ℝA ⊕ n` with `ad A|n = D`.
#[derive(Clone, Debug)]
pub struct SolvableExtension<T> {
    pub nil_part: BracketTensor<T>,
    pub d: Matrix<T>,
    /// `||A||²`.
    pub a_norm2: T,
    /// `tr Ric² / tr Ric`; `None` for the abelian override.
    pub c: Option<T>,
    /// Set when the input was abelian and `D = I` was used.
    pub abelian_override: bool,
}

impl<T: Scalar> SolvableExtension<T> {
    /// Extension with an explicit `D` and `||A||²`. `D` is not required to be
    /// a derivation; if it is not, the assembled bracket fails Jacobi and the
    /// Ricci routines report it.
    pub fn with_derivation(nil_part: BracketTensor<T>, d: Matrix<T>, a_norm2: T) -> Result<Self> {
        if d.rows() != nil_part.dim() || d.cols() != nil_part.dim() {
            return Err(Error::DimensionMismatch {
                expected: nil_part.dim(),
                found: d.rows(),
            });
        }
        Ok(Self {
            nil_part,
            d,
            a_norm2,
            c: None,
            abelian_override: false,
        })
    }

    /// Orthonormal-basis bracket on `ℝ^{n+1}`, `e_1 = A/||A||` first, in the
    /// scalar field of `T` (`None` if `||A||` is irrational).
    pub fn bracket(&self) -> Option<BracketTensor<T>> {
        let a = self.a_norm2.sqrt_exact()?;
        Some(assemble(&self.nil_part, &self.d, &a))
    }

    pub fn bracket_f64(&self) -> FloatBracket {
        let a = self.a_norm2.to_f64().sqrt();
        assemble(&self.nil_part.to_f64(), &self.d.to_f64(), &a)
    }
}

fn assemble<T: Scalar>(mu: &BracketTensor<T>, d: &Matrix<T>, a_norm: &T) -> BracketTensor<T> {
    let n = mu.dim();
    let shifted = mu
        .entries()
        .map(|(&(i, j, k), v)| (i + 1, j + 1, k + 1, v.clone()));
    let ad = (0..n).flat_map(|i| (0..n).map(move |k| (i, k))).filter_map(|(i, k)| {
        let v = &d[(k, i)];
        (!v.is_zero()).then(|| (0, i + 1, k + 1, v.clone() / a_norm.clone()))
    });
    BracketTensor::from_entries(n + 1, shifted.chain(ad).collect::<Vec<_>>())
}

/// Symmetric derivation `D` with `tr(DA) = −c tr A` for all symmetric
/// derivations `A`, `c = tr Ric²/tr Ric`, and `||A||² = −tr(D²)/c`.
pub fn rank_one_extension<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> Result<SolvableExtension<T>> {
    if !bracket::nilpotency(mu, tol)?.is_nilpotent {
        return Err(Error::NotNilpotent);
    }
    if mu.is_zero() {
        return Err(Error::AbelianInput(
            "use abelian_extension (D = I) for the flat case".into(),
        ));
    }
    let rd = ricci_fast(mu);
    let c = rd.ric.frob_norm2() / rd.ric.trace();
    let sym = DerivationSpace::symmetric(mu, tol);
    if sym.is_empty() {
        return Err(Error::NoSymmetricDerivations);
    }
    let m = sym.len();
    let gram = Matrix::from_fn(m, m, |i, j| sym[i].frob_inner(&sym[j]));
    let rhs: Vec<T> = sym.iter().map(|s| -(c.clone() * s.trace())).collect();
    let y = linalg::solve_min_norm(&gram, &rhs, tol).ok_or(Error::SingularMap)?;
    let n = mu.dim();
    let d = sym
        .iter()
        .zip(&y)
        .fold(Matrix::zeros(n, n), |acc, (s, yi)| acc.add(&s.scale(yi)));
    let a_norm2 = -(d.frob_norm2()) / c.clone();
    Ok(SolvableExtension {
        nil_part: mu.clone(),
        d,
        a_norm2,
        c: Some(c),
        abelian_override: false,
    })
}

/// Flat-case extension of abelian `ℝⁿ` with `D = I`, `||A|| = 1`
/// (real hyperbolic space).
pub fn abelian_extension<T: Scalar>(n: usize) -> SolvableExtension<T> {
    SolvableExtension {
        nil_part: BracketTensor::zero(n),
        d: Matrix::identity(n),
        a_norm2: T::one(),
        c: None,
        abelian_override: true,
    }
}

/// `Ric = R − ½B − S(ad H)` for a metric Lie algebra in an orthonormal basis,
/// where `B` is the Killing form and `⟨H, X⟩ = tr ad X`.
pub fn solvable_ricci<T: Scalar>(s: &BracketTensor<T>, tol: f64) -> Result<Matrix<T>> {
    bracket::ensure_lie(s, tol)?;
    let n = s.dim();
    let r = ricci_operator_r(s);
    let ads: Vec<Matrix<T>> = (0..n).map(|i| s.ad(i)).collect();
    let killing = Matrix::from_fn(n, n, |a, b| ads[a].mul(&ads[b]).trace());
    let h: Vec<T> = ads.iter().map(|a| a.trace()).collect();
    let ad_h = ads
        .iter()
        .zip(&h)
        .filter(|(_, hi)| !hi.is_zero())
        .fold(Matrix::zeros(n, n), |acc, (a, hi)| acc.add(&a.scale(hi)));
    Ok(r
        .sub(&killing.scale(&T::ratio(1, 2)))
        .sub(&ad_h.symmetric_part()))
}

#[derive(Clone, Debug, Serialize)]
pub struct EinsteinCheck {
    pub is_einstein: bool,
    pub c: f64,
    /// Operator norm of `Ric − cI`.
    pub residual: f64,
}

/// `c = tr Ric / N`; Einstein when `||Ric − cI||_op ≤ tol` (exact equality in
/// rational mode).
pub fn einstein_check<T: Scalar>(ric: &Matrix<T>, tol: f64) -> EinsteinCheck {
    let n = ric.rows();
    if n == 0 {
        return EinsteinCheck { is_einstein: true, c: 0.0, residual: 0.0 };
    }
    let c = ric.trace() / T::from_i64(n as i64);
    let diff = ric.sub(&Matrix::identity(n).scale(&c));
    let residual = linalg::operator_norm(&diff.to_f64());
    let is_einstein = if T::EXACT {
        diff.as_slice().iter().all(|v| v.is_zero())
    } else {
        residual <= tol
    };
    EinsteinCheck {
        is_einstein,
        c: c.to_f64(),
        residual,
    }
}

/// Einstein check of a rank-one extension, exact when `||A||` is rational.
pub fn extension_einstein<T: Scalar>(ext: &SolvableExtension<T>, tol: f64) -> Result<EinsteinCheck> {
    match ext.bracket() {
        Some(s) if T::EXACT => Ok(einstein_check(&solvable_ricci(&s, tol)?, tol)),
        _ => Ok(einstein_check(&solvable_ricci(&ext.bracket_f64(), tol)?, tol)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use num_traits::{One, Zero};

    type Q = Rational;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn h3() -> BracketTensor<Q> {
        BracketTensor::from_one_based(3, &[(1, 2, 3, Q::one())])
    }

    fn l4() -> BracketTensor<Q> {
        BracketTensor::from_one_based(4, &[(1, 2, 3, Q::one()), (1, 3, 4, Q::one())])
    }

    fn l4_plus() -> BracketTensor<Q> {
        BracketTensor::from_one_based(
            4,
            &[(1, 2, 3, Q::one()), (1, 2, 4, Q::one()), (1, 3, 4, Q::one())],
        )
    }

    #[test]
    fn heisenberg_curvature() {
        let rd = ricci(&h3(), 0.0).unwrap();
        assert_eq!(rd.ric, Matrix::diagonal(&[q(-1, 2), q(-1, 2), q(1, 2)]));
        assert_eq!(rd.scal, q(-1, 2));
        assert_eq!(rd.f, q(3, 1));
        assert_eq!(rd.moment, Matrix::diagonal(&[q(-1, 1), q(-1, 1), q(1, 1)]));
        assert_eq!(rd.cross_check, 0.0);
    }

    #[test]
    fn filiform_curvature() {
        let rd = ricci(&l4(), 0.0).unwrap();
        assert_eq!(rd.ric, Matrix::diagonal(&[q(-1, 1), q(-1, 2), q(0, 1), q(1, 2)]));
        assert_eq!(rd.f, q(3, 2));
        let rp = ricci(&l4_plus(), 0.0).unwrap();
        let expected = Matrix::from_rows(vec![
            vec![q(-3, 2), q(0, 1), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(-1, 1), q(-1, 2), q(0, 1)],
            vec![q(0, 1), q(-1, 2), q(0, 1), q(1, 2)],
            vec![q(0, 1), q(0, 1), q(1, 2), q(1, 1)],
        ]);
        assert_eq!(rp.ric, expected);
        assert_eq!(rp.f, q(7, 3));
        assert_eq!(rp.cross_check, 0.0);
    }

    #[test]
    fn abelian_and_non_nilpotent() {
        let rd = ricci(&BracketTensor::<Q>::zero(3), 0.0).unwrap();
        assert!(rd.ric.as_slice().iter().all(|v| v.is_zero()));
        let solv = BracketTensor::from_one_based(2, &[(1, 2, 2, Q::one())]);
        assert_eq!(ricci(&solv, 0.0).unwrap_err(), Error::NotNilpotent);
        assert_eq!(moment_map(&BracketTensor::<Q>::zero(2)).unwrap_err(), Error::ZeroBracket);
    }

    #[test]
    fn moment_map_trace_is_minus_one() {
        for mu in [h3(), l4(), l4_plus()] {
            assert_eq!(moment_map(&mu).unwrap().trace(), q(-1, 1));
        }
    }

    #[test]
    fn gradient_vanishes_at_l4() {
        assert!(grad_f(&l4()).unwrap().is_zero());
        let g = grad_f(&l4_plus()).unwrap();
        assert_eq!(bracket::inner(&g, &l4_plus()).unwrap(), Q::zero());
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mu = BracketTensor::from_one_based(
            5,
            &[(1, 2, 3, 1.0), (1, 3, 4, 0.7), (2, 3, 5, -0.4), (1, 4, 5, 1.3), (1, 2, 5, 0.2)],
        );
        let g = grad_f(&mu).unwrap();
        let dir = BracketTensor::from_one_based(5, &[(1, 2, 4, 0.3), (1, 3, 4, -0.5), (2, 4, 5, 0.9)]);
        let h = 1e-5;
        let plus = functional_f(&mu.add(&dir.scale(&h)).unwrap());
        let minus = functional_f(&mu.sub(&dir.scale(&h)).unwrap());
        let fd = (plus - minus) / (2.0 * h);
        let an = bracket::inner(&g, &dir).unwrap();
        assert!((fd - an).abs() <= 1e-6 * an.abs().max(1.0), "{fd} vs {an}");
    }

    #[test]
    fn heisenberg_extension_is_einstein() {
        let ext = rank_one_extension(&h3(), 0.0).unwrap();
        assert_eq!(ext.c, Some(q(-3, 2)));
        assert_eq!(ext.d, Matrix::diagonal(&[q(1, 1), q(1, 1), q(2, 1)]));
        assert_eq!(ext.a_norm2, q(4, 1));
        let chk = extension_einstein(&ext, 1e-12).unwrap();
        assert!(chk.is_einstein);
        assert_eq!(chk.c, -1.5);
        assert_eq!(chk.residual, 0.0);
    }

    #[test]
    fn filiform_extension() {
        let ext = rank_one_extension(&l4(), 0.0).unwrap();
        assert_eq!(ext.c, Some(q(-3, 2)));
        assert_eq!(ext.d, Matrix::diagonal(&[q(1, 2), q(1, 1), q(3, 2), q(2, 1)]));
        let chk = extension_einstein(&ext, 1e-12).unwrap();
        assert!(chk.is_einstein, "{chk:?}");
        assert!((chk.c + 1.5).abs() < 1e-12);
    }

    #[test]
    fn hyperbolic_space() {
        let ext = abelian_extension::<Q>(4);
        let chk = extension_einstein(&ext, 0.0).unwrap();
        assert!(chk.is_einstein);
        assert_eq!(chk.c, -4.0);
        let err = rank_one_extension(&BracketTensor::<Q>::zero(3), 0.0).unwrap_err();
        assert!(matches!(err, Error::AbelianInput(_)));
    }

    #[test]
    fn wrong_derivation_is_not_einstein() {
        let ext = SolvableExtension::with_derivation(h3(), Matrix::diagonal(&[q(1, 2), q(1, 2), q(1, 1)]), q(1, 1)).unwrap();
        let chk = extension_einstein(&ext, 1e-9).unwrap();
        assert!(chk.is_einstein, "scaled Einstein derivation with matching ||A|| stays Einstein");
        let ext = SolvableExtension::with_derivation(h3(), Matrix::diagonal(&[q(1, 1), q(0, 1), q(1, 1)]), q(4, 1)).unwrap();
        assert!(!extension_einstein(&ext, 1e-9).unwrap().is_einstein);
        // D = I is not a derivation of h3, so the extension is not a Lie algebra
        let ext = SolvableExtension::with_derivation(h3(), Matrix::identity(3), q(1, 1)).unwrap();
        assert!(matches!(extension_einstein(&ext, 1e-9), Err(Error::NotALieBracket { .. })));
    }
}
