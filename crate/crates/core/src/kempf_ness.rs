//! Norm minimization along `exp(s)`, `s` in the symmetric part of a
//! reductive subalgebra, used by the closed-orbit and semistability tests.

use serde::Serialize;

use crate::bracket::{self, BracketTensor, FloatBracket};
use crate::curvature;
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;

/// `{α ∈ span(generators) : [α, X] = 0 ∀X ∈ commute_with, tr(αY) = 0 ∀Y ∈ trace_against}`.
pub fn subalgebra_basis<T: Scalar>(
    generators: &[Matrix<T>],
    commute_with: &[Matrix<T>],
    trace_against: &[Matrix<T>],
    tol: f64,
) -> Vec<Matrix<T>> {
    if generators.is_empty() {
        return Vec::new();
    }
    let mut rows: Vec<Vec<T>> = Vec::new();
    let cols: Vec<Vec<T>> = generators
        .iter()
        .map(|g| {
            let mut col = Vec::new();
            for x in commute_with {
                col.extend(g.commutator(x).as_slice().iter().cloned());
            }
            for y in trace_against {
                col.push(g.mul(y).trace());
            }
            col
        })
        .collect();
    let m = cols[0].len();
    if m == 0 {
        return generators.to_vec();
    }
    for r in 0..m {
        rows.push(cols.iter().map(|c| c[r].clone()).collect());
    }
    let system = Matrix::from_rows(rows);
    let n = generators[0].rows();
    T::nullspace(&system, tol)
        .into_iter()
        .map(|x| {
            generators
                .iter()
                .zip(&x)
                .filter(|(_, c)| !c.is_zero())
                .fold(Matrix::zeros(n, n), |acc, (g, c)| acc.add(&g.scale(c)))
        })
        .collect()
}

/// Matrix units `E_rc` spanning `gl(n)`.
pub fn gl_basis<T: Scalar>(n: usize) -> Vec<Matrix<T>> {
    (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| Matrix::unit(n, r, c))
        .collect()
}

/// `E_aa` and `E_ab + E_ba` spanning `sym(n)`.
pub fn sym_basis<T: Scalar>(n: usize) -> Vec<Matrix<T>> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in a..n {
            let mut m = Matrix::unit(n, a, b);
            if a != b {
                m[(b, a)] = T::one();
            }
            out.push(m);
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
pub struct MinimizeOptions {
    /// Stop when the projected moment map has Frobenius norm below this.
    pub tol: f64,
    pub max_iter: usize,
    /// Give up when `||g||` or `||g⁻¹||` exceeds this.
    pub g_bound: f64,
    /// `||g.μ||² / ||μ||²` below this counts as reaching zero.
    pub zero_ratio: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 20_000,
            g_bound: 1e6,
            zero_ratio: 1e-16,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MinimizeStatus {
    MomentVanishes,
    NormToZero,
    GroupDiverged,
    Stalled,
    MaxIter,
}

#[derive(Clone, Debug)]
pub struct MinimizeOutcome {
    pub status: MinimizeStatus,
    /// `||g.μ|| / ||μ||` at the last iterate.
    pub final_norm: f64,
    /// Norm of the projected moment map at the last iterate.
    pub moment_defect: f64,
    pub iterations: usize,
    pub g: Matrix<f64>,
    pub nu: FloatBracket,
}

fn projected_moment(nu: &FloatBracket, directions: &[Matrix<f64>]) -> Matrix<f64> {
    let n = nu.dim();
    let m = curvature::ricci_fast(nu).moment;
    directions
        .iter()
        .fold(Matrix::zeros(n, n), |acc, s| acc.add(&s.scale(&m.frob_inner(s))))
}

/// Minimize `||exp(s_k)···exp(s_1).μ||` with each `s_k` in the span of the
/// Frobenius-orthonormal symmetric `directions`.
pub fn minimize_norm(mu: &FloatBracket, directions: &[Matrix<f64>], opts: &MinimizeOptions) -> MinimizeOutcome {
    let n = mu.dim();
    let base = mu.norm2();
    let mut g = Matrix::identity(n);
    let mut g_inv = Matrix::identity(n);
    let mut nu = mu.clone();
    let mut norm2 = base;
    let mut h = 0.25;
    let finish = |status, nu: FloatBracket, g: Matrix<f64>, norm2: f64, defect: f64, it: usize| MinimizeOutcome {
        status,
        final_norm: (norm2 / base).sqrt(),
        moment_defect: defect,
        iterations: it,
        g,
        nu,
    };
    if base == 0.0 {
        return finish(MinimizeStatus::NormToZero, nu, g, 0.0, 0.0, 0);
    }
    for it in 0..opts.max_iter {
        let p = projected_moment(&nu, directions);
        let defect = p.frob_norm2().sqrt();
        if defect < opts.tol {
            return finish(MinimizeStatus::MomentVanishes, nu, g, norm2, defect, it);
        }
        if norm2 / base < opts.zero_ratio {
            return finish(MinimizeStatus::NormToZero, nu, g, norm2, defect, it);
        }
        let mut accepted = false;
        while h > 1e-14 {
            let step = p.scale(&-h);
            let e = linalg::expm_symmetric(&step);
            let e_inv = linalg::expm_symmetric(&step.scale(&-1.0));
            let candidate = bracket::act_with_inverse(&e, &e_inv, &nu);
            let c2 = candidate.norm2();
            if c2 < norm2 {
                nu = candidate;
                norm2 = c2;
                g = e.mul(&g);
                g_inv = g_inv.mul(&e_inv);
                h = (h * 2.0).min(1e6);
                accepted = true;
                break;
            }
            h *= 0.5;
        }
        if !accepted {
            return finish(MinimizeStatus::Stalled, nu, g, norm2, defect, it);
        }
        if norm2 / base < opts.zero_ratio {
            let defect = projected_moment(&nu, directions).frob_norm2().sqrt();
            return finish(MinimizeStatus::NormToZero, nu, g, norm2, defect, it + 1);
        }
        if g.max_abs() > opts.g_bound || g_inv.max_abs() > opts.g_bound {
            let defect = projected_moment(&nu, directions).frob_norm2().sqrt();
            return finish(MinimizeStatus::GroupDiverged, nu, g, norm2, defect, it + 1);
        }
    }
    let defect = projected_moment(&nu, directions).frob_norm2().sqrt();
    finish(MinimizeStatus::MaxIter, nu, g, norm2, defect, opts.max_iter)
}

/// Conjugate `μ` so that a diagonalizable `x` becomes diagonal: returns
/// `(P⁻¹.μ, eigenvalues)` with `x = P diag P⁻¹`.
pub fn diagonal_frame<T: Scalar>(
    mu: &BracketTensor<T>,
    x: &Matrix<T>,
    tol: f64,
) -> crate::Result<(BracketTensor<T>, Vec<T>)> {
    let (values, p) = linalg::diagonalize(x, tol)?;
    let p_inv = p.inverse(tol)?;
    Ok((bracket::act_with_inverse(&p_inv, &p, mu), values))
}
