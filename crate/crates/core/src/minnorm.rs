//! Minimal-norm point of a convex hull (Wolfe's active-set method).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinNormResult<T> {
    pub beta: Vec<T>,
    /// Convex weights over the input points.
    pub coefficients: Vec<T>,
    /// Indices with `⟨β, x_i⟩ = ||β||²`.
    pub active_set: Vec<usize>,
}

impl<T: Scalar> MinNormResult<T> {
    pub fn norm2(&self) -> T {
        dot(&self.beta, &self.beta)
    }
}

/// Minimizer of `||Σ w_i x_i||` subject to `Σ w_i = 1` over the affine hull.
fn affine_minimizer<T: Scalar>(points: &[&Vec<T>], tol: f64) -> Option<Vec<T>> {
    let k = points.len();
    let m = Matrix::from_fn(k + 1, k + 1, |r, c| match (r < k, c < k) {
        (true, true) => dot(points[r], points[c]),
        (true, false) | (false, true) => T::one(),
        (false, false) => T::zero(),
    });
    let mut rhs = vec![T::zero(); k + 1];
    rhs[k] = T::one();
    let z = m.solve(&rhs, tol)?;
    Some(z[..k].to_vec())
}

fn combination<T: Scalar>(points: &[Vec<T>], set: &[usize], lam: &[T]) -> Vec<T> {
    let n = points[0].len();
    let mut x = vec![T::zero(); n];
    for (&i, l) in set.iter().zip(lam) {
        for (xv, pv) in x.iter_mut().zip(&points[i]) {
            *xv = xv.clone() + l.clone() * pv.clone();
        }
    }
    x
}

/// `mcc(X)`: the unique point of minimal norm in the convex hull of `X`.
///
/// Exact for rationals. In float mode `tol` is a relative tolerance for
/// the optimality test and for dropping vanishing weights.
pub fn mcc<T: Scalar>(points: &[Vec<T>], tol: f64) -> Result<MinNormResult<T>> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let n = points[0].len();
    if let Some(p) = points.iter().find(|p| p.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: p.len(),
        });
    }
    let scale = points
        .iter()
        .map(|p| dot(p, p).to_f64())
        .fold(1.0, f64::max);
    let eps = tol * scale;
    let start = (0..points.len())
        .min_by(|&a, &b| {
            dot(&points[a], &points[a])
                .partial_cmp(&dot(&points[b], &points[b]))
                .expect("comparable")
        })
        .expect("nonempty");
    let mut set = vec![start];
    let mut lam = vec![T::one()];
    let mut x = points[start].clone();
    for _ in 0..10_000 {
        let xx = dot(&x, &x);
        let (j, best) = (0..points.len())
            .map(|j| (j, dot(&x, &points[j])))
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("comparable"))
            .expect("nonempty");
        let gap = xx - best;
        if !gap.is_positive_tol(eps) || set.contains(&j) {
            break;
        }
        set.push(j);
        lam.push(T::zero());
        loop {
            let chosen: Vec<&Vec<T>> = set.iter().map(|&i| &points[i]).collect();
            let Some(w) = affine_minimizer(&chosen, tol) else {
                // affinely dependent in floating point; keep the last iterate
                set.pop();
                lam.pop();
                break;
            };
            if w.iter().all(|v| v.is_positive_tol(eps)) {
                lam = w;
                x = combination(points, &set, &lam);
                break;
            }
            // largest step towards w keeping all weights nonnegative
            let mut theta: Option<T> = None;
            for (l, wi) in lam.iter().zip(&w) {
                if !wi.is_positive_tol(eps) {
                    let denom = l.clone() - wi.clone();
                    if denom.is_positive_tol(0.0) {
                        let t = l.clone() / denom;
                        if theta.as_ref().is_none_or(|th| t < *th) {
                            theta = Some(t);
                        }
                    }
                }
            }
            let theta = theta.unwrap_or_else(T::zero);
            let one_minus = T::one() - theta.clone();
            lam = lam
                .iter()
                .zip(&w)
                .map(|(l, wi)| one_minus.clone() * l.clone() + theta.clone() * wi.clone())
                .collect();
            let mut keep_set = Vec::with_capacity(set.len());
            let mut keep_lam = Vec::with_capacity(set.len());
            for (i, l) in set.iter().zip(&lam) {
                if l.is_positive_tol(eps) {
                    keep_set.push(*i);
                    keep_lam.push(l.clone());
                }
            }
            if keep_set.is_empty() {
                break;
            }
            let total = keep_lam.iter().fold(T::zero(), |a, b| a + b.clone());
            set = keep_set;
            lam = keep_lam.into_iter().map(|l| l / total.clone()).collect();
            x = combination(points, &set, &lam);
        }
    }
    let mut coefficients = vec![T::zero(); points.len()];
    for (&i, l) in set.iter().zip(&lam) {
        coefficients[i] = l.clone();
    }
    let xx = dot(&x, &x);
    let active_set = (0..points.len())
        .filter(|&i| (dot(&x, &points[i]) - xx.clone()).is_negligible(eps))
        .collect();
    Ok(MinNormResult {
        beta: x,
        coefficients,
        active_set,
    })
}

/// KKT residual: `min_i ⟨β, x_i⟩ − ||β||²` (nonnegative at the optimum).
pub fn kkt_gap<T: Scalar>(points: &[Vec<T>], beta: &[T]) -> T {
    let bb = dot(beta, beta);
    points
        .iter()
        .map(|p| dot(beta, p) - bb.clone())
        .min_by(|a, b| a.partial_cmp(b).expect("comparable"))
        .unwrap_or_else(T::zero)
}
