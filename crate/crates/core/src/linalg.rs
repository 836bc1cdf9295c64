//! Small dense linear algebra over [`Scalar`].
//!
//! Exact nullspaces use fraction-free (Bareiss) elimination on integer rows;
//! float nullspaces use the SVD with a tolerance on the singular values.

use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::scalar::{common_denominator, rationalize, Rational, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Self {
            rows: nrows,
            cols: ncols,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len(), values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    /// Matrix unit `E_rc` (1 at `(r, c)`).
    pub fn unit(n: usize, r: usize, c: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m[(r, c)] = T::one();
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn from_columns(columns: &[Vec<T>]) -> Self {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        Self::from_fn(rows, cols, |r, c| columns[c][r].clone())
    }

    /// Column-stacked vector of entries (row-major order).
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn from_flat(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn diag(&self) -> Vec<T> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|v| v.to_f64())
    }

    pub fn scale(&self, s: &T) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in product");
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols {
                    let b = &other[(k, c)];
                    if b.is_zero() {
                        continue;
                    }
                    out[(r, c)] = out[(r, c)].clone() + a.clone() * b.clone();
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|r| dot(self.row(r), v))
            .collect()
    }

    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// `⟨A, B⟩ = tr(A Bᵀ)`, the Frobenius inner product on matrices.
    pub fn frob_inner(&self, other: &Self) -> T {
        dot(&self.data, &other.data)
    }

    pub fn frob_norm2(&self) -> T {
        self.frob_inner(self)
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn symmetric_part(&self) -> Self {
        let half = T::ratio(1, 2);
        self.add(&self.transpose()).scale(&half)
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|r| {
                (r + 1..self.cols).all(|c| (self[(r, c)].clone() - self[(c, r)].clone()).is_negligible(tol))
            })
    }

    pub fn is_diagonal(&self, tol: f64) -> bool {
        (0..self.rows).all(|r| (0..self.cols).all(|c| r == c || self[(r, c)].is_negligible(tol)))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Particular solution of `self * x = b`, or `None` if inconsistent.
    pub fn solve(&self, b: &[T], tol: f64) -> Option<Vec<T>> {
        solve_consistent(self, b, tol)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.cols - T::nullspace(self, tol).len()
    }

    pub fn inverse(&self, tol: f64) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = Self::zeros(n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug[(r, c)] = self[(r, c)].clone();
            }
            aug[(r, n + r)] = T::one();
        }
        let pivots = gauss_jordan(&mut aug, n, tol);
        if pivots.len() < n {
            return Err(Error::SingularMap);
        }
        Ok(Self::from_fn(n, n, |r, c| aug[(r, n + c)].clone()))
    }

    pub fn determinant(&self) -> T {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for col in 0..n {
            let pivot = (col..n).max_by(|&x, &y| {
                a[(x, col)]
                    .abs_val()
                    .partial_cmp(&a[(y, col)].abs_val())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            let Some(p) = pivot else { return T::zero() };
            if a[(p, col)].is_zero() {
                return T::zero();
            }
            if p != col {
                a.swap_rows(p, col);
                det = -det;
            }
            let pv = a[(col, col)].clone();
            det = det * pv.clone();
            for r in col + 1..n {
                let f = a[(r, col)].clone() / pv.clone();
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let v = a[(col, c)].clone();
                    a[(r, c)] = a[(r, c)].clone() - f.clone() * v;
                }
            }
        }
        det
    }

    pub fn pow(&self, k: usize) -> Self {
        let mut out = Self::identity(self.rows);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        &mut self.data[r * self.cols + c]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn to_nalgebra(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_nalgebra(m: &DMatrix<f64>) -> Matrix<f64> {
    Matrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
}

/// Reduced row echelon form in place on the first `ncols` columns.
/// Returns the pivot columns. Pivots are chosen by largest magnitude.
fn gauss_jordan<T: Scalar>(a: &mut Matrix<T>, ncols: usize, tol: f64) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row >= a.rows {
            break;
        }
        let best = (row..a.rows)
            .max_by(|&x, &y| {
                a[(x, col)]
                    .abs_val()
                    .partial_cmp(&a[(y, col)].abs_val())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[(best, col)].is_negligible(tol) {
            continue;
        }
        a.swap_rows(best, row);
        let pv = a[(row, col)].clone();
        for c in 0..a.cols {
            a[(row, c)] = a[(row, c)].clone() / pv.clone();
        }
        for r in 0..a.rows {
            if r == row {
                continue;
            }
            let f = a[(r, col)].clone();
            if f.is_zero() {
                continue;
            }
            for c in 0..a.cols {
                let v = a[(row, c)].clone();
                a[(r, c)] = a[(r, c)].clone() - f.clone() * v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    pivots
}

/// Particular solution of a linear system; `None` when inconsistent.
pub fn solve_consistent<T: Scalar>(a: &Matrix<T>, b: &[T], tol: f64) -> Option<Vec<T>> {
    assert_eq!(a.rows(), b.len());
    let n = a.cols();
    let mut aug = Matrix::from_fn(a.rows(), n + 1, |r, c| {
        if c < n {
            a[(r, c)].clone()
        } else {
            b[r].clone()
        }
    });
    let pivots = gauss_jordan(&mut aug, n, tol);
    let scale = if T::EXACT { 1.0 } else { 1.0 + b.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max) };
    for r in pivots.len()..aug.rows() {
        if !aug[(r, n)].is_negligible(tol * scale) {
            return None;
        }
    }
    let mut x = vec![T::zero(); n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = aug[(r, n)].clone();
    }
    Some(x)
}

/// Minimum-Euclidean-norm solution of a consistent system `a x = b`.
pub fn solve_min_norm<T: Scalar>(a: &Matrix<T>, b: &[T], tol: f64) -> Option<Vec<T>> {
    if T::EXACT {
        // x = Aᵀ y with (A Aᵀ) y = b; any y gives the same x.
        let aat = a.mul(&a.transpose());
        let y = solve_consistent(&aat, b, tol)?;
        let x = a.transpose().mul_vec(&y);
        let check = a.mul_vec(&x);
        if check.iter().zip(b).all(|(u, v)| (u.clone() - v.clone()).is_zero()) {
            Some(x)
        } else {
            None
        }
    } else {
        let af = to_nalgebra(&a.to_f64());
        let bf = nalgebra::DVector::from_iterator(b.len(), b.iter().map(|v| v.to_f64()));
        let svd = af.clone().svd(true, true);
        let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        let x = svd.solve(&bf, tol * smax.max(1.0)).ok()?;
        let resid = (&af * &x - &bf).amax();
        if resid > 1e3 * tol * (1.0 + bf.amax()) {
            return None;
        }
        Some(x.iter().map(|v| T::from_rational(&float_to_rational_exact(*v))).collect())
    }
}

fn float_to_rational_exact(v: f64) -> Rational {
    Rational::from_float(v).unwrap_or_else(Rational::zero)
}

/// Nullspace of a rational matrix by fraction-free Gaussian elimination.
///
/// Rows are cleared of denominators, reduced to echelon form with Bareiss
/// updates (all intermediate values stay integral), then each free column
/// yields one primitive integer basis vector by exact back substitution.
pub fn bareiss_nullspace(m: &Matrix<Rational>) -> Vec<Vec<Rational>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<BigInt>> = (0..rows)
        .map(|r| {
            let row = m.row(r);
            let den = common_denominator(row);
            row.iter()
                .map(|v| (v * Rational::from_integer(den.clone())).to_integer())
                .collect()
        })
        .filter(|row: &Vec<BigInt>| row.iter().any(|v| !v.is_zero()))
        .collect();

    let mut pivots = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r >= a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pv = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let f = row[c].clone();
            for k in 0..cols {
                let v = &pv * &row[k] - &f * &pivot_row[k];
                // Bareiss: the division is exact.
                row[k] = v / &prev;
            }
        }
        prev = pv;
        pivots.push(c);
        r += 1;
    }

    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivot_set.contains(c)) {
        let mut x = vec![Rational::zero(); cols];
        x[free] = Rational::one();
        for (row_idx, &pc) in pivots.iter().enumerate().rev() {
            let row = &a[row_idx];
            let mut s = Rational::zero();
            for k in pc + 1..cols {
                if !row[k].is_zero() && !x[k].is_zero() {
                    s += Rational::from_integer(row[k].clone()) * &x[k];
                }
            }
            x[pc] = -s / Rational::from_integer(row[pc].clone());
        }
        basis.push(primitive(x));
    }
    basis
}

/// Rescale a rational vector to coprime integers with a positive leading entry.
fn primitive(x: Vec<Rational>) -> Vec<Rational> {
    let den = common_denominator(&x);
    let ints: Vec<BigInt> = x
        .iter()
        .map(|v| (v * Rational::from_integer(den.clone())).to_integer())
        .collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if g.is_zero() {
        return x;
    }
    let sign = ints
        .iter()
        .find(|v| !v.is_zero())
        .map_or(BigInt::one(), |v| if v.is_negative() { -BigInt::one() } else { BigInt::one() });
    ints.into_iter()
        .map(|v| Rational::from_integer(v * &sign / &g))
        .collect()
}

/// Nullspace from the SVD; singular values below `tol * max(1, σ_max)` count
/// as zero. Returned vectors are orthonormal.
pub fn float_nullspace(m: &Matrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let (rows, cols) = (m.rows(), m.cols());
    if cols == 0 {
        return Vec::new();
    }
    let padded_rows = rows.max(cols);
    let mut a = DMatrix::<f64>::zeros(padded_rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            a[(r, c)] = m[(r, c)];
        }
    }
    let svd = a.svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = tol * smax.max(1.0);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= cutoff)
        .map(|(i, _)| v_t.row(i).iter().copied().collect())
        .collect()
}

/// Distinct real eigenvalues of a float matrix (clustered within a relative
/// tolerance so nearly repeated roots collapse to one value).
pub fn float_real_eigenvalues(m: &Matrix<f64>, tol: f64) -> Result<Vec<f64>> {
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let scale = m.max_abs().max(1.0);
    let mut values: Vec<f64> = if m.is_symmetric(tol * scale) {
        nalgebra::SymmetricEigen::new(to_nalgebra(&m.symmetric_part()))
            .eigenvalues
            .iter()
            .copied()
            .collect()
    } else {
        let eig = to_nalgebra(m).complex_eigenvalues();
        let mut out = Vec::with_capacity(n);
        for z in eig.iter() {
            if z.im.abs() > 1e-6 * scale {
                return Err(Error::NotDiagonalizable(format!(
                    "non-real eigenvalue {:.6}{:+.6}i",
                    z.re, z.im
                )));
            }
            out.push(z.re);
        }
        out
    };
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(cluster(&values, 1e-6 * scale))
}

fn cluster(sorted: &[f64], gap: f64) -> Vec<f64> {
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for &v in sorted {
        match groups.last_mut() {
            Some(g) if (v - g.last().unwrap()).abs() <= gap => g.push(v),
            _ => groups.push(vec![v]),
        }
    }
    groups
        .into_iter()
        .map(|g| g.iter().sum::<f64>() / g.len() as f64)
        .collect()
}

/// Exact rational eigenvalues: float estimates are averaged per cluster,
/// snapped to rationals, and each snap is re-verified by an exact determinant.
/// The algebraic multiplicities must add up to the dimension.
pub fn rational_eigenvalues(m: &Matrix<Rational>) -> Result<Vec<Rational>> {
    let n = m.rows();
    let approx = {
        let f = m.to_f64();
        let scale = f.max_abs().max(1.0);
        let eig = to_nalgebra(&f).complex_eigenvalues();
        let mut re: Vec<f64> = eig.iter().map(|z| z.re).collect();
        re.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cluster(&re, 1e-4 * scale)
    };
    let mut out: Vec<Rational> = Vec::new();
    let mut total = 0;
    for x in approx {
        let candidates = [1e-9, 1e-7, 1e-5].iter().filter_map(|t| rationalize(x, 1_000_000, t * x.abs().max(1.0)));
        let mut found = None;
        for c in candidates {
            let shifted = m.sub(&Matrix::identity(n).scale(&c));
            if shifted.determinant().is_zero() {
                found = Some(c);
                break;
            }
        }
        let Some(value) = found else {
            return Err(Error::NotDiagonalizable(format!(
                "eigenvalue near {x:.9} is not rational"
            )));
        };
        if out.contains(&value) {
            continue;
        }
        let shifted = m.sub(&Matrix::identity(n).scale(&value));
        total += bareiss_nullspace(&shifted.pow(n)).len();
        out.push(value);
    }
    if total != n {
        return Err(Error::NotDiagonalizable(
            "spectrum is not fully rational".into(),
        ));
    }
    Ok(out)
}

/// Diagonalize `m = P diag(values) P⁻¹`. Columns of `P` are eigenvectors.
pub fn diagonalize<T: Scalar>(m: &Matrix<T>, tol: f64) -> Result<(Vec<T>, Matrix<T>)> {
    let n = m.rows();
    if m.is_symmetric(tol) && !T::EXACT {
        let eig = nalgebra::SymmetricEigen::new(to_nalgebra(&m.to_f64()));
        let values = eig.eigenvalues.iter().map(|v| T::from_rational(&float_to_rational_exact(*v))).collect();
        let p = from_nalgebra(&eig.eigenvectors).map(|v| T::from_rational(&float_to_rational_exact(*v)));
        return Ok((values, p));
    }
    let distinct = T::real_eigenvalues(m, tol)?;
    let mut values = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    let looser = if T::EXACT { tol } else { tol.max(1e-7) };
    for lambda in distinct {
        let shifted = m.sub(&Matrix::identity(n).scale(&lambda));
        for v in T::nullspace(&shifted, looser) {
            values.push(lambda.clone());
            columns.push(v);
        }
    }
    if columns.len() != n {
        return Err(Error::NotDiagonalizable(format!(
            "eigenvectors span only {} of {n} dimensions",
            columns.len()
        )));
    }
    Ok((values, Matrix::from_columns(&columns)))
}

/// Semisimple part of the Jordan decomposition, computed from projections
/// onto generalized eigenspaces `ker (m - λ)^n`.
pub fn semisimple_part<T: Scalar>(m: &Matrix<T>, tol: f64) -> Result<Matrix<T>> {
    let n = m.rows();
    let distinct = T::real_eigenvalues(m, tol)?;
    let mut values = Vec::with_capacity(n);
    let mut columns = Vec::with_capacity(n);
    let looser = if T::EXACT { tol } else { tol.max(1e-6) };
    for lambda in distinct {
        let shifted = m.sub(&Matrix::identity(n).scale(&lambda)).pow(n);
        for v in T::nullspace(&shifted, looser) {
            values.push(lambda.clone());
            columns.push(v);
        }
    }
    if columns.len() != n {
        return Err(Error::NotDiagonalizable(
            "generalized eigenspaces do not span".into(),
        ));
    }
    let p = Matrix::from_columns(&columns);
    let p_inv = p.inverse(tol)?;
    Ok(p.mul(&Matrix::diagonal(&values)).mul(&p_inv))
}

/// Eigen-decomposition of a symmetric float matrix, eigenvalues ascending.
pub fn symmetric_eigen(m: &Matrix<f64>) -> (Vec<f64>, Matrix<f64>) {
    let eig = nalgebra::SymmetricEigen::new(to_nalgebra(&m.symmetric_part()));
    let mut order: Vec<usize> = (0..m.rows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Matrix::from_fn(m.rows(), m.rows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// `exp(s)` for symmetric `s`.
pub fn expm_symmetric(s: &Matrix<f64>) -> Matrix<f64> {
    let (values, q) = symmetric_eigen(s);
    let d = Matrix::diagonal(&values.iter().map(|v| v.exp()).collect::<Vec<_>>());
    q.mul(&d).mul(&q.transpose())
}

/// Largest singular value.
pub fn operator_norm(m: &Matrix<f64>) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    to_nalgebra(m)
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}

/// Gram–Schmidt in the Frobenius inner product; drops dependent inputs.
pub fn orthonormalize(mats: &[Matrix<f64>], tol: f64) -> Vec<Matrix<f64>> {
    let mut out: Vec<Matrix<f64>> = Vec::new();
    for m in mats {
        let mut v = m.clone();
        for _ in 0..2 {
            for q in &out {
                let c = v.frob_inner(q);
                v = v.sub(&q.scale(&c));
            }
        }
        let norm = v.frob_norm2().sqrt();
        if norm > tol {
            out.push(v.scale(&(1.0 / norm)));
        }
    }
    out
}
