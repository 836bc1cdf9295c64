//! The stratum datum `β_μ`, membership in `Z_β ⊂ Y_β ⊂ W_β`, the inequality
//! battery satisfied by brackets in a stratum, and `G_β`-semistability.

use serde::Serialize;

use crate::bracket::{self, BracketTensor, Weight};
use crate::curvature;
use crate::error::{Error, Result};
use crate::kempf_ness::{self, MinimizeOptions, MinimizeStatus};
use crate::linalg::{self, dot, Matrix};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::minnorm::{self, MinNormResult};
use crate::scalar::{Rational, Scalar};

/// `β_μ = mcc{α_ij^k : μ_ij^k ≠ 0}`, always exact (weights are integral).
pub fn beta_mu<T: Scalar>(mu: &BracketTensor<T>) -> Result<MinNormResult<Rational>> {
    if mu.is_zero() {
        return Err(Error::ZeroBracket);
    }
    let points: Vec<Vec<Rational>> = mu.support_weights().iter().map(Weight::to_scalars).collect();
    minnorm::mcc(&points, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Membership {
    #[serde(rename = "Z")]
    pub in_z: bool,
    #[serde(rename = "W")]
    pub in_w: bool,
    #[serde(rename = "Y")]
    pub in_y: bool,
}

/// Compare `⟨β, α_ij^k⟩` with `||β||²` over the support of `μ`.
pub fn membership<T: Scalar>(mu: &BracketTensor<T>, beta: &[Rational]) -> Membership {
    let bb = dot(beta, beta);
    let gaps: Vec<Rational> = mu.support_weights().iter().map(|w| w.pair(beta) - bb.clone()).collect();
    let in_w = gaps.iter().all(|g| *g >= Rational::from_i64(0));
    let any_eq = gaps.iter().any(|g| *g == Rational::from_i64(0));
    Membership {
        in_z: gaps.iter().all(|g| *g == Rational::from_i64(0)),
        in_w,
        in_y: in_w && any_eq,
    }
}

/// Whether a symmetric quadratic form is positive (semi)definite, by
/// symmetric elimination. Exact for rationals.
pub fn definiteness<T: Scalar>(q: &Matrix<T>, tol: f64) -> (bool, bool) {
    let n = q.rows();
    let mut a = q.clone();
    let mut psd = true;
    let mut pd = true;
    let scale = if T::EXACT { 0.0 } else { tol * q.max_abs().max(1.0) };
    let mut alive: Vec<usize> = (0..n).collect();
    while let Some(&k) = alive.first() {
        alive.remove(0);
        let p = a[(k, k)].clone();
        if p.is_negative_tol(scale) {
            return (false, false);
        }
        if p.is_negligible(scale) {
            pd = false;
            if alive.iter().any(|&j| !a[(k, j)].is_negligible(scale)) {
                psd = false;
                pd = false;
                break;
            }
            continue;
        }
        for &i in &alive {
            let f = a[(i, k)].clone() / p.clone();
            if f.is_zero() {
                continue;
            }
            for &j in &alive {
                let v = a[(k, j)].clone();
                a[(i, j)] = a[(i, j)].clone() - f.clone() * v;
            }
        }
    }
    (psd, pd && psd)
}

/// Gram matrix of `D ↦ ⟨[β, D], D⟩` over a list of matrices.
pub fn adbeta_form<T: Scalar>(beta: &Matrix<T>, ders: &[Matrix<T>]) -> Matrix<T> {
    let brackets: Vec<Matrix<T>> = ders.iter().map(|d| beta.commutator(d)).collect();
    let half = T::ratio(1, 2);
    Matrix::from_fn(ders.len(), ders.len(), |a, b| {
        (brackets[a].frob_inner(&ders[b]) + brackets[b].frob_inner(&ders[a])) * half.clone()
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SemistabilityVerdict {
    Semistable,
    Unstable,
    Inconclusive,
}

#[derive(Clone, Debug, Serialize)]
pub struct SemistabilityResult {
    pub verdict: SemistabilityVerdict,
    pub final_norm: f64,
    pub moment_defect: f64,
    pub iterations: usize,
}

/// Symmetric part of `g_β = {s : [s, β] = 0, tr(sβ) = 0}`, orthonormal.
pub fn g_beta_directions(beta: &[Rational]) -> Vec<Matrix<f64>> {
    let n = beta.len();
    let bs = [Matrix::diagonal(beta)];
    let basis = kempf_ness::subalgebra_basis(&kempf_ness::sym_basis::<Rational>(n), &bs, &bs, 0.0);
    linalg::orthonormalize(&basis.iter().map(|m| m.to_f64()).collect::<Vec<_>>(), 1e-12)
}

/// Projected moment norms below this along the descent count as tending to
/// zero: unstable brackets keep it bounded away from zero, while semistable
/// ones with non-closed orbits only approach it at rate `O(1/t)`.
pub const SEMISTABLE_DEFECT: f64 = 1e-4;

/// Numerical test of `0 ∉ closure(G_β.μ)` for diagonal rational `β`.
pub fn semistability_test<T: Scalar>(mu: &BracketTensor<T>, beta: &[Rational], opts: &MinimizeOptions) -> Result<SemistabilityResult> {
    if beta.len() != mu.dim() {
        return Err(Error::DimensionMismatch {
            expected: mu.dim(),
            found: beta.len(),
        });
    }
    let dirs = g_beta_directions(beta);
    let opts = MinimizeOptions {
        tol: opts.tol.max(SEMISTABLE_DEFECT),
        ..*opts
    };
    let out = kempf_ness::minimize_norm(&mu.to_f64(), &dirs, &opts);
    let verdict = match out.status {
        MinimizeStatus::MomentVanishes => SemistabilityVerdict::Semistable,
        MinimizeStatus::NormToZero => SemistabilityVerdict::Unstable,
        _ => SemistabilityVerdict::Inconclusive,
    };
    Ok(SemistabilityResult {
        verdict,
        final_norm: out.final_norm,
        moment_defect: out.moment_defect,
        iterations: out.iterations,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct StratumReport {
    pub beta: Vec<String>,
    pub beta_norm2: String,
    /// `tr β = −1`.
    pub trace_check: bool,
    pub membership: Membership,
    /// `max |tr(βD)|` over the derivation basis; zero is required on `Y_β^ss`.
    pub derivation_orthogonality: f64,
    pub derivation_orthogonal: bool,
    /// Smallest eigenvalue of the form `D ↦ ⟨[β,D],D⟩` on `Der(μ)`.
    pub adbeta_min: f64,
    pub adbeta_nonnegative: bool,
    /// `⟨π(β + ||β||²I)μ, μ⟩`.
    pub delta_value: f64,
    pub delta_nonnegative: bool,
    /// `β + ||β||²I ∈ Der(μ)`.
    pub delta_in_der: bool,
    /// `β + ||β||²I` positive definite.
    pub beta_shift_positive: bool,
    pub semistable: Option<SemistabilityResult>,
    #[serde(rename = "F")]
    pub f: f64,
    /// `F(μ) ≥ ||β||²`.
    pub f_ge_beta: bool,
}

/// Evaluate every stratum inequality for `(μ, β)`. Exact in rational mode
/// except the optional semistability search.
pub fn stratum_checks<T: Scalar>(
    mu: &BracketTensor<T>,
    beta: &[Rational],
    tol: f64,
    semistability: Option<&MinimizeOptions>,
) -> Result<StratumReport> {
    let n = mu.dim();
    if beta.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: beta.len(),
        });
    }
    let bb = dot(beta, beta);
    let beta_t: Vec<T> = beta.iter().map(T::from_rational).collect();
    let beta_m = Matrix::diagonal(&beta_t);
    let ders = bracket::derivations(mu, tol).basis;

    let tr_bd: Vec<T> = ders.iter().map(|d| beta_m.mul(d).trace()).collect();
    let derivation_orthogonality = tr_bd.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let derivation_orthogonal = tr_bd.iter().all(|v| v.is_negligible(tol));

    let form = adbeta_form(&beta_m, &ders);
    let (adbeta_nonnegative, _) = definiteness(&form, tol);
    let adbeta_min = if form.rows() == 0 {
        0.0
    } else {
        linalg::symmetric_eigen(&form.to_f64()).0[0]
    };

    let shift = beta_m.add(&Matrix::identity(n).scale(&T::from_rational(&bb)));
    let pi_shift = bracket::pi(&shift, mu)?;
    let delta = bracket::inner(&pi_shift, mu)?;
    let delta_in_der = pi_shift.entries().all(|(_, v)| v.is_negligible(tol));
    let delta_nonnegative = !delta.is_negative_tol(tol);
    let beta_shift_positive = beta.iter().all(|b| (b.clone() + bb.clone()) > Rational::from_i64(0));

    let f = curvature::functional_f(mu);
    let f_ge_beta = !(f.clone() - T::from_rational(&bb)).is_negative_tol(tol);

    let semistable = match semistability {
        Some(opts) if !mu.is_zero() => Some(semistability_test(mu, beta, opts)?),
        _ => None,
    };

    Ok(StratumReport {
        beta: beta.iter().map(|b| b.to_string()).collect(),
        beta_norm2: bb.to_string(),
        trace_check: beta.iter().fold(Rational::from_i64(0), |a, b| a + b) == Rational::from_i64(-1),
        membership: membership(mu, beta),
        derivation_orthogonality,
        derivation_orthogonal,
        adbeta_min,
        adbeta_nonnegative,
        delta_value: delta.to_f64(),
        delta_nonnegative,
        delta_in_der,
        beta_shift_positive,
        semistable,
        f: f.to_f64(),
        f_ge_beta,
    })
}

#[derive(Clone, Debug)]
pub struct StrataFReport<T> {
    /// Diagonal of `m(μ)`.
    pub pt_m: Vec<T>,
    /// `2 (μ_ij^k)² / ||μ||²`, the convex weights realizing `p_t(m)` from the support.
    pub hull_coefficients: Vec<T>,
    /// `p_t(m(μ)) = 2/||μ||² Σ (μ_ij^k)² α_ij^k`.
    pub identity_holds: bool,
    pub f: T,
    pub pt_norm2: T,
    pub beta: Vec<Rational>,
    pub beta_norm2: Rational,
    /// `F ≥ ||p_t m||² ≥ ||β_μ||²`.
    pub chain_holds: bool,
}

pub fn strata_f_report<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> Result<StrataFReport<T>> {
    if mu.is_zero() {
        return Err(Error::ZeroBracket);
    }
    let n = mu.dim();
    let m = curvature::moment_map(mu)?;
    let pt_m = m.diag();
    let norm2 = mu.norm2();
    let two = T::from_i64(2);
    let hull_coefficients: Vec<T> = mu
        .entries()
        .map(|(_, v)| two.clone() * v.clone() * v.clone() / norm2.clone())
        .collect();
    let mut combo = vec![T::zero(); n];
    for (w, c) in mu.support_weights().iter().zip(&hull_coefficients) {
        for (x, a) in combo.iter_mut().zip(&w.diag) {
            *x = x.clone() + c.clone() * T::from_i64(*a);
        }
    }
    let identity_holds = combo.iter().zip(&pt_m).all(|(a, b)| (a.clone() - b.clone()).is_negligible(tol));
    let f = m.frob_norm2();
    let pt_norm2 = dot(&pt_m, &pt_m);
    let beta = beta_mu(mu)?;
    let beta_norm2 = beta.norm2();
    let bb = T::from_rational(&beta_norm2);
    let chain_holds = !(f.clone() - pt_norm2.clone()).is_negative_tol(tol) && !(pt_norm2.clone() - bb).is_negative_tol(tol);
    Ok(StrataFReport {
        pt_m,
        hull_coefficients,
        identity_holds,
        f,
        pt_norm2,
        beta: beta.beta,
        beta_norm2,
        chain_holds,
    })
}

/// `m(μ, α) = min{a : μ has a nonzero component in the a-eigenspace of π(α)}`.
pub fn instability_degree<T: Scalar>(mu: &BracketTensor<T>, alpha: &Matrix<T>, tol: f64) -> Result<T> {
    if mu.is_zero() {
        return Err(Error::ZeroBracket);
    }
    let (nu, a) = kempf_ness::diagonal_frame(mu, alpha, tol)?;
    nu.entries()
        .filter(|(_, v)| !v.is_negligible(tol))
        .map(|(&(i, j, k), _)| a[k].clone() - a[i].clone() - a[j].clone())
        .min_by(|x, y| x.partial_cmp(y).expect("comparable"))
        .ok_or(Error::ZeroBracket)
}

/// `β ↦ φ = (β + ||β||²I)/||β||²`.
pub fn phi_from_beta(beta: &[Rational]) -> Result<Vec<Rational>> {
    let bb = dot(beta, beta);
    if bb == Rational::from_i64(0) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(beta.iter().map(|b| (b + &bb) / &bb).collect())
}

/// `φ ↦ β = (φ − I)/(n − tr φ)`.
pub fn beta_from_phi(phi: &[Rational]) -> Result<Vec<Rational>> {
    let n = Rational::from_i64(phi.len() as i64);
    let tr = phi.iter().fold(Rational::from_i64(0), |a, b| a + b);
    let den = n - tr;
    if den == Rational::from_i64(0) {
        return Err(Error::DegenerateDenominator);
    }
    Ok(phi.iter().map(|p| (p - Rational::from_i64(1)) / &den).collect())
}

/// Matrix form of `beta_from_phi` for a possibly non-diagonal `φ`.
pub fn beta_matrix_from_phi<T: Scalar>(phi: &Matrix<T>) -> Result<Matrix<T>> {
    let n = phi.rows();
    let den = T::from_i64(n as i64) - phi.trace();
    if den.is_zero() {
        return Err(Error::DegenerateDenominator);
    }
    Ok(phi.sub(&Matrix::identity(n)).scale(&(T::one() / den)))
}

/// Whether `β` lies in the relative interior of the convex hull of `points`
/// (exact LP: maximize `t` with `Σ c_i x_i = β`, `Σ c_i = 1`, `c_i ≥ t`).
pub fn in_relative_interior(points: &[Vec<Rational>], beta: &[Rational]) -> bool {
    let m = points.len();
    if m == 0 {
        return false;
    }
    let n = beta.len();
    let mut lp = LinearProgram::new(m + 1);
    lp.objective[m] = Rational::from_i64(1);
    lp.free[m] = true;
    for r in 0..n {
        let mut row: Vec<Rational> = points.iter().map(|p| p[r].clone()).collect();
        row.push(Rational::from_i64(0));
        lp.constrain(row, Relation::Eq, beta[r].clone());
    }
    let mut ones = vec![Rational::from_i64(1); m];
    ones.push(Rational::from_i64(0));
    lp.constrain(ones, Relation::Eq, Rational::from_i64(1));
    for i in 0..m {
        let mut row = vec![Rational::from_i64(0); m + 1];
        row[i] = Rational::from_i64(1);
        row[m] = Rational::from_i64(-1);
        lp.constrain(row, Relation::Ge, Rational::from_i64(0));
    }
    let mut cap = vec![Rational::from_i64(0); m + 1];
    cap[m] = Rational::from_i64(1);
    lp.constrain(cap, Relation::Le, Rational::from_i64(1));
    matches!(lp.solve(), LpOutcome::Optimal { value, .. } if value > Rational::from_i64(0))
}

/// `β_μ` lies in the relative interior of the hull of the support weights.
pub fn mcc_interior<T: Scalar>(mu: &BracketTensor<T>) -> Result<bool> {
    let beta = beta_mu(mu)?;
    let points: Vec<Vec<Rational>> = mu.support_weights().iter().map(Weight::to_scalars).collect();
    Ok(in_relative_interior(&points, &beta.beta))
}
