//! The pre-Einstein derivation `φ`, the reductive group data `g_φ`, and the
//! closed-orbit criterion for Einstein nilradicals.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::bracket::{self, BracketTensor, FloatBracket};
use crate::error::{Error, Result};
use crate::kempf_ness::{self, MinimizeOptions, MinimizeStatus};
use crate::linalg::{self, Matrix};
use crate::scalar::{self, Rational, Scalar};
use crate::strata;

#[derive(Clone, Debug)]
pub struct PreEinsteinDerivation<T> {
    pub phi: Matrix<T>,
    /// Distinct eigenvalues, ascending, with multiplicities.
    pub eigenvalues: Vec<(T, usize)>,
    /// `max_i |tr(φψ_i) − tr ψ_i|` over the derivation basis.
    pub residual: f64,
    /// Whether the Gram solution had to be replaced by its semisimple part.
    pub semisimple_fallback: bool,
}

fn defect<T: Scalar>(phi: &Matrix<T>, basis: &[Matrix<T>]) -> (f64, bool) {
    let mut worst = 0.0f64;
    let mut exact_zero = true;
    for psi in basis {
        let d = phi.mul(psi).trace() - psi.trace();
        exact_zero &= d.is_zero();
        worst = worst.max(d.to_f64().abs());
    }
    (worst, exact_zero)
}

/// Eigenvalues with multiplicities, failing on a nilpotent part.
fn spectrum<T: Scalar>(phi: &Matrix<T>, tol: f64) -> Result<Vec<(T, usize)>> {
    let (values, _) = linalg::diagonalize(phi, tol)?;
    let mut out: Vec<(T, usize)> = Vec::new();
    // float eigenvalues of a repeated root scatter well above `tol`
    let merge = if T::EXACT { 0.0 } else { tol.max(1e-7) * phi.max_abs().max(1.0) };
    for v in values {
        match out.iter_mut().find(|(u, _)| (u.clone() - v.clone()).is_negligible(merge)) {
            Some(slot) => slot.1 += 1,
            None => out.push((v, 1)),
        }
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("comparable"));
    Ok(out)
}

/// Solve `tr(φψ) = tr ψ` for all `ψ ∈ Der(μ)` with `φ ∈ Der(μ)`.
pub fn pre_einstein_derivation<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> Result<PreEinsteinDerivation<T>> {
    bracket::ensure_lie(mu, tol)?;
    let n = mu.dim();
    let basis = bracket::derivations(mu, tol).basis;
    let gram = Matrix::from_fn(basis.len(), basis.len(), |i, j| basis[i].mul(&basis[j]).trace());
    let rhs: Vec<T> = basis.iter().map(Matrix::trace).collect();
    let x = linalg::solve_min_norm(&gram, &rhs, tol).ok_or(Error::SingularMap)?;
    let phi = basis
        .iter()
        .zip(&x)
        .fold(Matrix::zeros(n, n), |acc, (psi, c)| acc.add(&psi.scale(c)));
    let (residual, _) = defect(&phi, &basis);
    match spectrum(&phi, tol) {
        Ok(eigenvalues) => Ok(PreEinsteinDerivation {
            phi,
            eigenvalues,
            residual,
            semisimple_fallback: false,
        }),
        Err(first) => {
            let s = linalg::semisimple_part(&phi, tol).map_err(|_| first.clone())?;
            let (residual, _) = defect(&s, &basis);
            let derivation = bracket::pi(&s, mu)?.entries().all(|(_, v)| v.is_negligible(tol.max(1e-9)));
            if !derivation || residual > tol.max(1e-9) {
                return Err(first);
            }
            let eigenvalues = spectrum(&s, tol)?;
            Ok(PreEinsteinDerivation {
                phi: s,
                eigenvalues,
                residual,
                semisimple_fallback: true,
            })
        }
    }
}

/// `g_φ = {α : [α, φ] = 0, tr(αφ) = 0, tr α = 0}`.
pub fn g_phi_basis<T: Scalar>(phi: &Matrix<T>, tol: f64) -> Vec<Matrix<T>> {
    let n = phi.rows();
    kempf_ness::subalgebra_basis(
        &kempf_ness::gl_basis(n),
        std::slice::from_ref(phi),
        &[phi.clone(), Matrix::identity(n)],
        tol,
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitVerdict {
    Closed,
    NotClosed,
    Inconclusive,
}

impl fmt::Display for OrbitVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitVerdict::Closed => "closed",
            OrbitVerdict::NotClosed => "not_closed",
            OrbitVerdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitMethod {
    /// `φ` has simple spectrum, `G_φ` is a torus and closedness is the
    /// exact condition `0 ∈ relint conv(weights)`.
    TorusLp,
    /// Norm minimization over `exp(sym g_φ)`.
    KempfNess,
}

#[derive(Clone, Debug, Serialize)]
pub struct NikolayevskyResult {
    pub verdict: OrbitVerdict,
    pub method: OrbitMethod,
    pub status: Option<MinimizeStatus>,
    /// `min ||g.μ|| / ||μ||` reached.
    pub final_norm: f64,
    /// Norm of the `g_φ`-component of the moment map at the last iterate.
    pub moment_defect: f64,
    pub iterations: usize,
    pub g_phi_dim: usize,
    /// `σ_{d+1}(end) / σ_{d+1}(start)` for the derivation system, `d = dim Der(μ)`.
    /// A collapse means the minimizing sequence approaches a bracket with a
    /// larger stabilizer, which is outside the orbit.
    pub stabilizer_gap_ratio: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct OrbitOptions {
    pub minimize: MinimizeOptions,
    /// Moment defect accepted as vanishing in float arithmetic.
    pub closed_tol: f64,
    /// Gap ratio below which the orbit is declared not closed.
    pub gap_ratio: f64,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            minimize: MinimizeOptions::default(),
            closed_tol: 1e-6,
            gap_ratio: 0.1,
        }
    }
}

/// `σ_{d+1}` of the derivation system of `μ` normalized to unit length.
fn stabilizer_gap(mu: &FloatBracket, d: usize) -> f64 {
    let n = mu.dim();
    let mu = mu.scale(&(1.0 / mu.norm()));
    let sys = bracket::derivation_system(&mu, &kempf_ness::gl_basis(n));
    let mut sv: Vec<f64> = linalg::to_nalgebra(&sys).singular_values().iter().cloned().collect();
    sv.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    sv.get(d).copied().unwrap_or(f64::INFINITY)
}

/// Exact closedness of a torus orbit: weights `e_k − e_i − e_j` projected to
/// `{diag s : tr sφ = 0, tr s = 0}` must contain 0 in their relative interior.
fn torus_closed(nu: &BracketTensor<Rational>, phi: &[Rational]) -> bool {
    let n = phi.len();
    let constraints = Matrix::from_rows(vec![phi.to_vec(), vec![Rational::one(); n]]);
    let basis = linalg::bareiss_nullspace(&constraints);
    let points: Vec<Vec<Rational>> = nu
        .support_weights()
        .iter()
        .map(|w| basis.iter().map(|s| w.pair(s)).collect())
        .collect();
    strata::in_relative_interior(&points, &vec![Rational::zero(); basis.len()])
}

/// Decide whether `G_φ.μ` is closed, after conjugating `μ` so that `φ` is
/// diagonal.
pub fn nikolayevsky_test<T: Scalar>(mu: &BracketTensor<T>, tol: f64, opts: &OrbitOptions) -> Result<NikolayevskyResult> {
    let pre = pre_einstein_derivation(mu, tol)?;
    let n = mu.dim();
    let (nu, values) = kempf_ness::diagonal_frame(mu, &pre.phi, tol)?;
    let d = Matrix::diagonal(&values);
    let g_phi_dim = g_phi_basis(&d, tol).len();
    if T::EXACT && !mu.is_zero() && pre.eigenvalues.iter().all(|(_, m)| *m == 1) {
        let nu_q = nu.to_rational();
        let phi_q: Vec<Rational> = values.iter().map(Scalar::to_rational).collect();
        let closed = torus_closed(&nu_q, &phi_q);
        return Ok(NikolayevskyResult {
            verdict: if closed { OrbitVerdict::Closed } else { OrbitVerdict::NotClosed },
            method: OrbitMethod::TorusLp,
            status: None,
            final_norm: 1.0,
            moment_defect: 0.0,
            iterations: 0,
            g_phi_dim,
            stabilizer_gap_ratio: None,
        });
    }
    let sym = kempf_ness::subalgebra_basis(&kempf_ness::sym_basis(n), std::slice::from_ref(&d), &[d.clone(), Matrix::identity(n)], tol);
    let dirs = linalg::orthonormalize(&sym.iter().map(Matrix::to_f64).collect::<Vec<_>>(), 1e-10);
    let nu = nu.to_f64();
    if nu.is_zero() {
        return Err(Error::ZeroBracket);
    }
    // keep the minimization scale-free
    let nu = nu.scale(&(1.0 / nu.norm()));
    let out = kempf_ness::minimize_norm(&nu, &dirs, &opts.minimize);
    let der_dim = bracket::derivations(mu, tol).len();
    let start_gap = stabilizer_gap(&nu, der_dim);
    let ratio = if out.nu.is_zero() { 0.0 } else { stabilizer_gap(&out.nu, der_dim) / start_gap };
    let verdict = match out.status {
        MinimizeStatus::NormToZero | MinimizeStatus::GroupDiverged => OrbitVerdict::NotClosed,
        _ if ratio < opts.gap_ratio => OrbitVerdict::NotClosed,
        _ if out.moment_defect < opts.closed_tol => OrbitVerdict::Closed,
        _ => OrbitVerdict::Inconclusive,
    };
    Ok(NikolayevskyResult {
        verdict,
        method: OrbitMethod::KempfNess,
        status: Some(out.status),
        final_norm: out.final_norm,
        moment_defect: out.moment_defect,
        iterations: out.iterations,
        g_phi_dim,
        stabilizer_gap_ratio: Some(ratio),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct NecessaryConditions {
    /// `φ > 0`.
    pub phi_positive: bool,
    /// Smallest eigenvalue of `φ`.
    pub phi_min_eigenvalue: f64,
    /// `⟨[β, D], D⟩ ≥ 0` on all of `Der(μ)`, in a frame where `φ` is diagonal.
    pub adbeta_nonnegative: bool,
    pub adbeta_min: f64,
    pub beta: Vec<f64>,
    /// True when every check passed; false certifies "not an Einstein nilradical".
    pub passed: bool,
}

pub fn necessary_conditions<T: Scalar>(mu: &BracketTensor<T>, pre: &PreEinsteinDerivation<T>, tol: f64) -> Result<NecessaryConditions> {
    let n = mu.dim();
    let phi_min = pre.eigenvalues.first().map(|(v, _)| v.clone()).unwrap_or_else(T::one);
    let phi_positive = phi_min.is_positive_tol(tol);
    let (nu, values) = kempf_ness::diagonal_frame(mu, &pre.phi, tol)?;
    let phi_d = Matrix::diagonal(&values);
    let beta = match strata::beta_matrix_from_phi(&phi_d) {
        Ok(b) => b,
        // φ = I: abelian, β = 0
        Err(Error::DegenerateDenominator) => Matrix::zeros(n, n),
        Err(e) => return Err(e),
    };
    let ders = bracket::derivations(&nu, tol).basis;
    let form = strata::adbeta_form(&beta, &ders);
    let (adbeta_nonnegative, _) = strata::definiteness(&form, tol.max(if T::EXACT { 0.0 } else { 1e-9 }));
    let adbeta_min = if form.rows() == 0 {
        0.0
    } else {
        linalg::symmetric_eigen(&form.to_f64()).0[0]
    };
    Ok(NecessaryConditions {
        phi_positive,
        phi_min_eigenvalue: phi_min.to_f64(),
        adbeta_nonnegative,
        adbeta_min,
        beta: beta.diag().iter().map(|v| v.to_f64()).collect(),
        passed: phi_positive && adbeta_nonnegative,
    })
}

/// `(k₁ < ... < k_r; d₁, ..., d_r)` with coprime positive integers `k_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EigenvalueType {
    pub k: Vec<BigInt>,
    pub d: Vec<usize>,
}

impl fmt::Display for EigenvalueType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k: Vec<String> = self.k.iter().map(BigInt::to_string).collect();
        let d: Vec<String> = self.d.iter().map(usize::to_string).collect();
        write!(f, "({}; {})", k.join("<"), d.join(","))
    }
}

pub fn eigenvalue_type_of(values: &[(Rational, usize)]) -> Result<EigenvalueType> {
    if values.is_empty() || values.iter().any(|(v, _)| !v.is_positive()) {
        return Err(Error::NonPositiveEigenvalues);
    }
    let mut merged: Vec<(Rational, usize)> = Vec::new();
    for (v, m) in values {
        match merged.iter_mut().find(|(u, _)| u == v) {
            Some(slot) => slot.1 += m,
            None => merged.push((v.clone(), *m)),
        }
    }
    merged.sort();
    let plain: Vec<Rational> = merged.iter().map(|(v, _)| v.clone()).collect();
    let den = scalar::common_denominator(&plain);
    let ints: Vec<BigInt> = plain.iter().map(|v| (v * Rational::from_integer(den.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |a, b| a.gcd(b));
    Ok(EigenvalueType {
        k: ints.iter().map(|v| v / &g).collect(),
        d: merged.iter().map(|(_, m)| *m).collect(),
    })
}

/// Eigenvalue type of a diagonalizable map with positive rational spectrum.
/// Float spectra are snapped to rationals with denominators up to `10⁶`.
pub fn eigenvalue_type<T: Scalar>(m: &Matrix<T>, tol: f64) -> Result<EigenvalueType> {
    let spec = spectrum(m, tol)?;
    let mut values = Vec::with_capacity(spec.len());
    for (v, mult) in spec {
        let r = if T::EXACT {
            v.to_rational()
        } else {
            scalar::rationalize(v.to_f64(), 1_000_000, 1e-7 * v.to_f64().abs().max(1.0))
                .ok_or_else(|| Error::NotDiagonalizable(format!("eigenvalue {} is not rational", v.to_f64())))?
        };
        values.push((r, mult));
    }
    eigenvalue_type_of(&values)
}
