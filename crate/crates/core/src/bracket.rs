//! Skew-symmetric brackets on ℝⁿ, the GL(n) action and its derivative,
//! the O(n)-invariant inner product, weights, and derivation algebras.

use std::collections::BTreeMap;
use std::fmt;


use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{Rational, Scalar};

/// Sparse bracket `μ = Σ μ_ij^k v_ijk`, stored for `i < j` only (0-based).
///
/// Evaluation at `(j, i)` negates; stored entries are never zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketTensor<T> {
    dim: usize,
    entries: BTreeMap<(usize, usize, usize), T>,
}

pub type RationalBracket = BracketTensor<Rational>;
pub type FloatBracket = BracketTensor<f64>;

impl<T: Scalar> BracketTensor<T> {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: BTreeMap::new(),
        }
    }

    /// Build from 0-based `(i, j, k, c)` meaning `[e_i, e_j] ∋ c e_k`.
    /// Pairs given with `i > j` are flipped with a sign; repeated triples add up.
    pub fn from_entries(dim: usize, entries: impl IntoIterator<Item = (usize, usize, usize, T)>) -> Self {
        let mut out = Self::zero(dim);
        for (i, j, k, c) in entries {
            out.add_entry(i, j, k, c);
        }
        out
    }

    /// Same as [`from_entries`](Self::from_entries) with 1-based indices.
    pub fn from_one_based(dim: usize, entries: &[(usize, usize, usize, T)]) -> Self {
        Self::from_entries(
            dim,
            entries.iter().map(|(i, j, k, c)| (i - 1, j - 1, k - 1, c.clone())),
        )
    }

    pub fn add_entry(&mut self, i: usize, j: usize, k: usize, c: T) {
        assert!(i < self.dim && j < self.dim && k < self.dim, "index out of range");
        assert_ne!(i, j, "bracket of a basis vector with itself is zero");
        let (key, c) = if i < j { ((i, j, k), c) } else { ((j, i, k), -c) };
        let v = match self.entries.remove(&key) {
            Some(old) => old + c,
            None => c,
        };
        if !v.is_zero() {
            self.entries.insert(key, v);
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize, usize), &T)> {
        self.entries.iter()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Structure constant `μ_ij^k` for any ordered pair.
    pub fn get(&self, i: usize, j: usize, k: usize) -> T {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Less => self.entries.get(&(i, j, k)).cloned().unwrap_or_else(T::zero),
            Greater => self
                .entries
                .get(&(j, i, k))
                .cloned()
                .map(|v| -v)
                .unwrap_or_else(T::zero),
            Equal => T::zero(),
        }
    }

    /// Full skew tensor `c[(i*n + j)*n + k] = μ(e_i, e_j)_k`.
    pub fn dense(&self) -> Vec<T> {
        let n = self.dim;
        let mut c = vec![T::zero(); n * n * n];
        for (&(i, j, k), v) in &self.entries {
            c[(i * n + j) * n + k] = v.clone();
            c[(j * n + i) * n + k] = -v.clone();
        }
        c
    }

    /// Inverse of [`dense`](Self::dense); reads the `i < j` half and drops
    /// entries that are negligible at `tol`.
    pub fn from_dense(dim: usize, c: &[T], tol: f64) -> Self {
        let n = dim;
        let mut entries = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = &c[(i * n + j) * n + k];
                    if !v.is_negligible(tol) {
                        entries.insert((i, j, k), v.clone());
                    }
                }
            }
        }
        Self { dim, entries }
    }

    /// Length of the coordinate vector over the basis `{v_ijk : i < j}`.
    pub fn space_dim(n: usize) -> usize {
        n * n.saturating_sub(1) / 2 * n
    }

    fn coord_index(n: usize, i: usize, j: usize, k: usize) -> usize {
        // pairs (i, j), i < j, enumerated lexicographically
        let pair = i * (2 * n - i - 1) / 2 + (j - i - 1);
        pair * n + k
    }

    /// Coordinates over `{v_ijk : i < j}` in lexicographic order.
    pub fn coords(&self) -> Vec<T> {
        let n = self.dim;
        let mut out = vec![T::zero(); Self::space_dim(n)];
        for (&(i, j, k), v) in &self.entries {
            out[Self::coord_index(n, i, j, k)] = v.clone();
        }
        out
    }

    pub fn from_coords(dim: usize, coords: &[T], tol: f64) -> Self {
        let n = dim;
        assert_eq!(coords.len(), Self::space_dim(n));
        let mut entries = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let v = &coords[Self::coord_index(n, i, j, k)];
                    if !v.is_negligible(tol) {
                        entries.insert((i, j, k), v.clone());
                    }
                }
            }
        }
        Self { dim, entries }
    }

    /// `μ(x, y)` for coordinate vectors `x`, `y`.
    pub fn apply(&self, x: &[T], y: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim];
        for (&(i, j, k), v) in &self.entries {
            let w = x[i].clone() * y[j].clone() - x[j].clone() * y[i].clone();
            if !w.is_zero() {
                out[k] = out[k].clone() + w * v.clone();
            }
        }
        out
    }

    /// `||μ||² = 2 Σ_{i<j,k} (μ_ij^k)²`.
    pub fn norm2(&self) -> T {
        let two = T::from_i64(2);
        self.entries
            .values()
            .fold(T::zero(), |acc, v| acc + v.clone() * v.clone())
            * two
    }

    pub fn norm(&self) -> f64 {
        self.norm2().to_f64().sqrt()
    }

    pub fn scale(&self, s: &T) -> Self {
        if s.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (*k, v.clone() * s.clone()))
                .collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        let mut out = self.clone();
        for (&(i, j, k), v) in &other.entries {
            out.add_entry(i, j, k, v.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(&-T::one()))
    }

    pub fn to_f64(&self) -> FloatBracket {
        BracketTensor {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (*k, v.to_f64()))
                .filter(|(_, v)| *v != 0.0)
                .collect(),
        }
    }

    /// Exact rational copy (binary-exact for floats).
    pub fn to_rational(&self) -> RationalBracket {
        BracketTensor {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|(k, v)| (*k, v.to_rational()))
                .filter(|(_, v)| !num_traits::Zero::is_zero(v))
                .collect(),
        }
    }

    /// Relabel the basis: `e_i ↦ e_{σ(i)}`.
    pub fn permute(&self, sigma: &[usize]) -> Self {
        assert_eq!(sigma.len(), self.dim);
        Self::from_entries(
            self.dim,
            self.entries
                .iter()
                .map(|(&(i, j, k), v)| (sigma[i], sigma[j], sigma[k], v.clone())),
        )
    }

    /// Support weights `α_ij^k` of all nonzero structure constants.
    pub fn support_weights(&self) -> Vec<Weight> {
        self.entries
            .keys()
            .map(|&(i, j, k)| Weight::new(self.dim, i, j, k))
            .collect()
    }

    /// Matrix of `ad e_i`, i.e. `(ad e_i)_{kj} = μ(e_i, e_j)_k`.
    pub fn ad(&self, i: usize) -> Matrix<T> {
        let n = self.dim;
        Matrix::from_fn(n, n, |k, j| self.get(i, j, k))
    }
}

impl<T: Scalar> fmt::Display for BracketTensor<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Group by pair: [e1,e2] = e3 + 2 e4
        let mut by_pair: BTreeMap<(usize, usize), Vec<(usize, &T)>> = BTreeMap::new();
        for (&(i, j, k), v) in &self.entries {
            by_pair.entry((i, j)).or_default().push((k, v));
        }
        if by_pair.is_empty() {
            return write!(f, "abelian ℝ^{}", self.dim);
        }
        let mut first = true;
        for ((i, j), terms) in by_pair {
            if !first {
                write!(f, ", ")?;
            }
            first = false;
            write!(f, "[e{},e{}] = ", i + 1, j + 1)?;
            for (t, (k, v)) in terms.iter().enumerate() {
                if t > 0 {
                    write!(f, " + ")?;
                }
                if v.is_one() {
                    write!(f, "e{}", k + 1)?;
                } else {
                    write!(f, "({})e{}", v, k + 1)?;
                }
            }
        }
        Ok(())
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Diagonal weight `α_ij^k = E_kk − E_ii − E_jj` of the basis vector `v_ijk`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Weight {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub diag: Vec<i64>,
}

impl Weight {
    pub fn new(n: usize, i: usize, j: usize, k: usize) -> Self {
        let mut diag = vec![0i64; n];
        diag[k] += 1;
        diag[i] -= 1;
        diag[j] -= 1;
        Self { i, j, k, diag }
    }

    pub fn trace(&self) -> i64 {
        self.diag.iter().sum()
    }

    pub fn inner(&self, other: &Weight) -> i64 {
        self.diag.iter().zip(&other.diag).map(|(a, b)| a * b).sum()
    }

    /// `⟨β, α⟩` for a diagonal vector `β`.
    pub fn pair<T: Scalar>(&self, beta: &[T]) -> T {
        self.diag
            .iter()
            .zip(beta)
            .filter(|(a, _)| **a != 0)
            .fold(T::zero(), |acc, (a, b)| acc + T::from_i64(*a) * b.clone())
    }

    pub fn to_scalars<T: Scalar>(&self) -> Vec<T> {
        self.diag.iter().map(|v| T::from_i64(*v)).collect()
    }
}

/// `g.μ(X, Y) = g μ(g⁻¹X, g⁻¹Y)`.
pub fn act<T: Scalar>(g: &Matrix<T>, mu: &BracketTensor<T>, tol: f64) -> Result<BracketTensor<T>> {
    check_dims(mu.dim(), g.rows())?;
    check_dims(mu.dim(), g.cols())?;
    if !T::EXACT {
        let scale = linalg::operator_norm(&g.to_f64()).max(1.0);
        if g.determinant().to_f64().abs() <= tol * scale.powi(g.rows() as i32) {
            return Err(Error::SingularMap);
        }
    }
    let g_inv = g.inverse(tol)?;
    Ok(act_with_inverse(g, &g_inv, mu))
}

/// [`act`] when `g⁻¹` is already known.
pub fn act_with_inverse<T: Scalar>(
    g: &Matrix<T>,
    g_inv: &Matrix<T>,
    mu: &BracketTensor<T>,
) -> BracketTensor<T> {
    let n = mu.dim();
    let c = mu.dense();
    let idx = |a: usize, b: usize, k: usize| (a * n + b) * n + k;
    // t1[a][q][r] = Σ_p ginv[p][a] c[p][q][r]
    let mut t1 = vec![T::zero(); n * n * n];
    for p in 0..n {
        for a in 0..n {
            let f = &g_inv[(p, a)];
            if f.is_zero() {
                continue;
            }
            for q in 0..n {
                for r in 0..n {
                    let v = &c[idx(p, q, r)];
                    if !v.is_zero() {
                        t1[idx(a, q, r)] = t1[idx(a, q, r)].clone() + f.clone() * v.clone();
                    }
                }
            }
        }
    }
    // t2[a][b][r] = Σ_q ginv[q][b] t1[a][q][r]
    let mut t2 = vec![T::zero(); n * n * n];
    for a in 0..n {
        for q in 0..n {
            for b in 0..n {
                let f = &g_inv[(q, b)];
                if f.is_zero() {
                    continue;
                }
                for r in 0..n {
                    let v = &t1[idx(a, q, r)];
                    if !v.is_zero() {
                        t2[idx(a, b, r)] = t2[idx(a, b, r)].clone() + f.clone() * v.clone();
                    }
                }
            }
        }
    }
    // out[a][b][k] = Σ_r g[k][r] t2[a][b][r]
    let mut out = vec![T::zero(); n * n * n];
    for a in 0..n {
        for b in a + 1..n {
            for r in 0..n {
                let v = &t2[idx(a, b, r)];
                if v.is_zero() {
                    continue;
                }
                for k in 0..n {
                    let f = &g[(k, r)];
                    if !f.is_zero() {
                        out[idx(a, b, k)] = out[idx(a, b, k)].clone() + f.clone() * v.clone();
                    }
                }
            }
        }
    }
    BracketTensor::from_dense(n, &out, 0.0)
}

/// `π(α)μ = αμ(·,·) − μ(α·,·) − μ(·,α·)`.
pub fn pi<T: Scalar>(alpha: &Matrix<T>, mu: &BracketTensor<T>) -> Result<BracketTensor<T>> {
    check_dims(mu.dim(), alpha.rows())?;
    check_dims(mu.dim(), alpha.cols())?;
    let n = mu.dim();
    let mut out = vec![T::zero(); n * n * n];
    let idx = |a: usize, b: usize, k: usize| (a * n + b) * n + k;
    let c = mu.dense();
    for a in 0..n {
        for b in a + 1..n {
            for k in 0..n {
                let mut s = T::zero();
                for r in 0..n {
                    let cr = &c[idx(a, b, r)];
                    if !cr.is_zero() && !alpha[(k, r)].is_zero() {
                        s = s + alpha[(k, r)].clone() * cr.clone();
                    }
                    // α e_a = Σ_p α[p][a] e_p
                    let cp = &c[idx(r, b, k)];
                    if !cp.is_zero() && !alpha[(r, a)].is_zero() {
                        s = s - alpha[(r, a)].clone() * cp.clone();
                    }
                    let cq = &c[idx(a, r, k)];
                    if !cq.is_zero() && !alpha[(r, b)].is_zero() {
                        s = s - alpha[(r, b)].clone() * cq.clone();
                    }
                }
                out[idx(a, b, k)] = s;
            }
        }
    }
    Ok(BracketTensor::from_dense(n, &out, 0.0))
}

/// `⟨μ, λ⟩ = Σ_{i,j,k} μ(e_i,e_j)_k λ(e_i,e_j)_k`, summed over ordered pairs.
pub fn inner<T: Scalar>(mu: &BracketTensor<T>, lambda: &BracketTensor<T>) -> Result<T> {
    check_dims(mu.dim(), lambda.dim())?;
    let (small, big) = if mu.nnz() <= lambda.nnz() { (mu, lambda) } else { (lambda, mu) };
    let s = small
        .entries
        .iter()
        .filter_map(|(key, v)| big.entries.get(key).map(|w| v.clone() * w.clone()))
        .fold(T::zero(), |acc, x| acc + x);
    Ok(s * T::from_i64(2))
}

/// Jacobiator data over all basis triples `i < j < l`.
#[derive(Clone, Debug)]
pub struct JacobiDefect<T> {
    /// Σ over triples of the squared Jacobiator.
    pub norm2: T,
    /// First triple with a nonzero Jacobiator and its value.
    pub first_violation: Option<((usize, usize, usize), Vec<T>)>,
}

impl<T: Scalar> JacobiDefect<T> {
    pub fn norm(&self) -> f64 {
        self.norm2.to_f64().sqrt()
    }

    pub fn is_lie(&self, tol: f64) -> bool {
        if T::EXACT {
            self.norm2.is_zero()
        } else {
            self.norm() <= tol
        }
    }
}

pub fn jacobi_defect<T: Scalar>(mu: &BracketTensor<T>) -> JacobiDefect<T> {
    let n = mu.dim();
    let c = mu.dense();
    let col = |i: usize, j: usize| -> Vec<T> { (0..n).map(|k| c[(i * n + j) * n + k].clone()).collect() };
    // μ(v, e_l) for a vector v
    let right = |v: &[T], l: usize| -> Vec<T> {
        let mut out = vec![T::zero(); n];
        for (p, vp) in v.iter().enumerate() {
            if vp.is_zero() {
                continue;
            }
            for k in 0..n {
                let x = &c[(p * n + l) * n + k];
                if !x.is_zero() {
                    out[k] = out[k].clone() + vp.clone() * x.clone();
                }
            }
        }
        out
    };
    let mut norm2 = T::zero();
    let mut first = None;
    for i in 0..n {
        for j in i + 1..n {
            for l in j + 1..n {
                let a = right(&col(i, j), l);
                let b = right(&col(j, l), i);
                let d = right(&col(l, i), j);
                let jac: Vec<T> = (0..n)
                    .map(|k| a[k].clone() + b[k].clone() + d[k].clone())
                    .collect();
                let s = jac.iter().fold(T::zero(), |acc, x| acc + x.clone() * x.clone());
                if !s.is_zero() {
                    if first.is_none() {
                        first = Some(((i, j, l), jac));
                    }
                    norm2 = norm2 + s;
                }
            }
        }
    }
    JacobiDefect {
        norm2,
        first_violation: first,
    }
}

/// Fails with [`Error::NotALieBracket`] unless the Jacobi identity holds.
pub fn ensure_lie<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> Result<()> {
    let jd = jacobi_defect(mu);
    if jd.is_lie(tol) {
        Ok(())
    } else {
        let (triple, _) = jd.first_violation.clone().unwrap_or(((0, 0, 0), Vec::new()));
        Err(Error::NotALieBracket {
            triple,
            defect: jd.norm(),
        })
    }
}

/// Lower central series data: dimensions `dim C¹ = n ≥ dim C² ≥ ...`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nilpotency {
    pub is_nilpotent: bool,
    /// Smallest `p` with `C^{p+1} = 0`; `None` when not nilpotent.
    pub step: Option<usize>,
    pub series_dims: Vec<usize>,
}

/// Reduce a list of vectors to a basis of their span.
pub fn span_basis<T: Scalar>(vectors: &[Vec<T>], n: usize, tol: f64) -> Vec<Vec<T>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    // Nullspace of the matrix whose columns are the vectors' transposes gives
    // dependencies; simpler: row-reduce the stacked vectors.
    let m = Matrix::from_rows(vectors.to_vec());
    // rows of the RREF of m span the same space
    let ns = T::nullspace(&m, tol);
    let rank = n - ns.len();
    if rank == 0 {
        return Vec::new();
    }
    // Orthogonal complement of the nullspace (w.r.t. the standard dot) is the row space.
    if ns.is_empty() {
        return (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
    }
    let ns_mat = Matrix::from_rows(ns);
    T::nullspace(&ns_mat, tol)
}

pub fn nilpotency<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> Result<Nilpotency> {
    ensure_lie(mu, tol)?;
    let n = mu.dim();
    let unit = |i: usize| -> Vec<T> { (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect() };
    let mut current: Vec<Vec<T>> = (0..n).map(unit).collect();
    let mut dims = vec![n];
    if n == 0 {
        return Ok(Nilpotency {
            is_nilpotent: true,
            step: Some(0),
            series_dims: dims,
        });
    }
    loop {
        let mut images = Vec::new();
        for i in 0..n {
            let ei = unit(i);
            for v in &current {
                let w = mu.apply(&ei, v);
                if w.iter().any(|x| !x.is_negligible(tol)) {
                    images.push(w);
                }
            }
        }
        let next = span_basis(&images, n, tol);
        let d = next.len();
        if d == 0 {
            let step = dims.len();
            dims.push(0);
            return Ok(Nilpotency {
                is_nilpotent: true,
                step: Some(step),
                series_dims: dims,
            });
        }
        if d == *dims.last().unwrap() {
            dims.push(d);
            return Ok(Nilpotency {
                is_nilpotent: false,
                step: None,
                series_dims: dims,
            });
        }
        dims.push(d);
        current = next;
    }
}

/// Basis of `Der(μ) = {α : π(α)μ = 0}`.
#[derive(Clone, Debug)]
pub struct DerivationSpace<T> {
    pub dim: usize,
    pub basis: Vec<Matrix<T>>,
}

impl<T: Scalar> DerivationSpace<T> {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// `dim GL(n).μ = n² − dim Der(μ)`.
    pub fn orbit_dim(&self) -> usize {
        self.dim * self.dim - self.basis.len()
    }

    /// Symmetric derivations `Der(μ) ∩ sym(n)`, recomputed from `μ`.
    pub fn symmetric(mu: &BracketTensor<T>, tol: f64) -> Vec<Matrix<T>> {
        let n = mu.dim();
        let sym_basis: Vec<Matrix<T>> = (0..n)
            .flat_map(|a| (a..n).map(move |b| (a, b)))
            .map(|(a, b)| {
                let mut m = Matrix::unit(n, a, b);
                if a != b {
                    m[(b, a)] = T::one();
                }
                m
            })
            .collect();
        combine(&sym_basis, &T::nullspace(&derivation_system(mu, &sym_basis), tol))
    }
}

fn combine<T: Scalar>(generators: &[Matrix<T>], coeffs: &[Vec<T>]) -> Vec<Matrix<T>> {
    coeffs
        .iter()
        .map(|x| {
            let n = generators[0].rows();
            generators
                .iter()
                .zip(x)
                .filter(|(_, c)| !c.is_zero())
                .fold(Matrix::zeros(n, n), |acc, (g, c)| acc.add(&g.scale(c)))
        })
        .collect()
}

/// Matrix of `α ↦ π(α)μ` restricted to the span of `generators`
/// (one column per generator, rows are coordinates in `V`).
pub fn derivation_system<T: Scalar>(mu: &BracketTensor<T>, generators: &[Matrix<T>]) -> Matrix<T> {
    let n = mu.dim();
    let rows = BracketTensor::<T>::space_dim(n);
    let columns: Vec<Vec<T>> = generators
        .iter()
        .map(|g| pi(g, mu).expect("shapes checked").coords())
        .collect();
    if columns.is_empty() {
        return Matrix::zeros(rows, 0);
    }
    Matrix::from_columns(&columns)
}

/// Derivation algebra; exact basis in rational mode, Frobenius-orthonormal
/// basis in float mode.
pub fn derivations<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> DerivationSpace<T> {
    let n = mu.dim();
    let units: Vec<Matrix<T>> = (0..n)
        .flat_map(|r| (0..n).map(move |c| (r, c)))
        .map(|(r, c)| Matrix::unit(n, r, c))
        .collect();
    if n == 0 {
        return DerivationSpace { dim: 0, basis: Vec::new() };
    }
    let system = derivation_system_units(mu);
    let ns = T::nullspace(&system, tol);
    DerivationSpace {
        dim: n,
        basis: combine(&units, &ns),
    }
}

/// Same as [`derivation_system`] over the matrix units `E_rc` (column
/// `r*n + c`), built directly from the structure constants.
fn derivation_system_units<T: Scalar>(mu: &BracketTensor<T>) -> Matrix<T> {
    let n = mu.dim();
    let rows = BracketTensor::<T>::space_dim(n);
    let mut m: Matrix<T> = Matrix::zeros(rows, n * n);
    let c = mu.dense();
    let idx = |a: usize, b: usize, k: usize| (a * n + b) * n + k;
    // π(E_rs)μ (a,b)_k = δ_kr c[a][b][s] − δ_as c[r][b][k] − δ_bs c[a][r][k]
    for a in 0..n {
        for b in a + 1..n {
            for k in 0..n {
                let row = BracketTensor::<T>::coord_index(n, a, b, k);
                for s in 0..n {
                    let v = &c[idx(a, b, s)];
                    if !v.is_zero() {
                        let col = k * n + s;
                        m[(row, col)] = m[(row, col)].clone() + v.clone();
                    }
                }
                for r in 0..n {
                    let v = &c[idx(r, b, k)];
                    if !v.is_zero() {
                        let col = r * n + a;
                        m[(row, col)] = m[(row, col)].clone() - v.clone();
                    }
                    let v = &c[idx(a, r, k)];
                    if !v.is_zero() {
                        let col = r * n + b;
                        m[(row, col)] = m[(row, col)].clone() - v.clone();
                    }
                }
            }
        }
    }
    m
}

/// Block bracket on `ℝ^{n1+n2}`.
pub fn direct_sum<T: Scalar>(mu1: &BracketTensor<T>, mu2: &BracketTensor<T>) -> BracketTensor<T> {
    let shift = mu1.dim();
    let entries = mu1
        .entries()
        .map(|(&(i, j, k), v)| (i, j, k, v.clone()))
        .chain(mu2.entries().map(|(&(i, j, k), v)| (i + shift, j + shift, k + shift, v.clone())));
    BracketTensor::from_entries(mu1.dim() + mu2.dim(), entries)
}

/// Isomorphism invariants compared along orbit iterations.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Invariants {
    pub dim_der: usize,
    pub series_dims: Vec<usize>,
    pub step: Option<usize>,
}

pub fn invariants<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> Result<Invariants> {
    let nil = nilpotency(mu, tol)?;
    Ok(Invariants {
        dim_der: derivations(mu, tol).len(),
        series_dims: nil.series_dims,
        step: nil.step,
    })
}

/// Entries of `π(α)μ` for diagonal `α` computed from the weight formula
/// `(a_k − a_i − a_j) μ_ij^k`.
pub fn pi_diagonal<T: Scalar>(a: &[T], mu: &BracketTensor<T>) -> BracketTensor<T> {
    BracketTensor::from_entries(
        mu.dim(),
        mu.entries().map(|(&(i, j, k), v)| {
            let w = a[k].clone() - a[i].clone() - a[j].clone();
            (i, j, k, w * v.clone())
        }),
    )
}

impl<T: Scalar> BracketTensor<T> {
    /// Structure constants as a 1-based list, sorted.
    pub fn one_based_entries(&self) -> Vec<(usize, usize, usize, T)> {
        self.entries
            .iter()
            .map(|(&(i, j, k), v)| (i + 1, j + 1, k + 1, v.clone()))
            .collect()
    }
}
