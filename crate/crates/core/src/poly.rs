//! Moment map of `SL_3(ℝ)` acting on real ternary cubics by
//! `(g.p)(x) = p(g⁻¹x)`, used as an independent check of the moment-map
//! machinery on a representation where everything is explicit.
//!
//! Monomials `x^D` are orthogonal with `||x^D||² = d₁!d₂!d₃!`.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::scalar::{self, Rational, Scalar};

pub type Exponent = [u8; 3];

/// The ten exponents of degree 3, in decreasing lexicographic order.
pub const MONOMIALS: [Exponent; 10] = [
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

fn index(d: Exponent) -> usize {
    MONOMIALS.iter().position(|m| *m == d).expect("degree-3 exponent")
}

fn factorial(k: u8) -> i64 {
    (1..=k as i64).product()
}

fn monomial_norm2(d: Exponent) -> i64 {
    d.iter().map(|&k| factorial(k)).product()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CubicForm<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> CubicForm<T> {
    pub fn zero() -> Self {
        Self { coeffs: vec![T::zero(); 10] }
    }

    pub fn monomial(d: Exponent) -> Self {
        Self::from_terms(&[(d, T::one())])
    }

    /// Sum of `c·x^D`. Exponents must have degree 3.
    pub fn from_terms(terms: &[(Exponent, T)]) -> Self {
        let mut p = Self::zero();
        for (d, c) in terms {
            let i = index(*d);
            p.coeffs[i] = p.coeffs[i].clone() + c.clone();
        }
        p
    }

    pub fn coeff(&self, d: Exponent) -> &T {
        &self.coeffs[index(d)]
    }

    pub fn terms(&self) -> impl Iterator<Item = (Exponent, &T)> {
        MONOMIALS.iter().copied().zip(&self.coeffs).filter(|(_, c)| !c.is_zero())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn to_f64(&self) -> CubicForm<f64> {
        CubicForm { coeffs: self.coeffs.iter().map(Scalar::to_f64).collect() }
    }

    pub fn scale(&self, s: &T) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self { coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect() }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-T::one()))
    }

    pub fn inner(&self, other: &Self) -> T {
        MONOMIALS
            .iter()
            .zip(self.coeffs.iter().zip(&other.coeffs))
            .fold(T::zero(), |acc, (d, (a, b))| acc + a.clone() * b.clone() * T::from_i64(monomial_norm2(*d)))
    }

    pub fn norm2(&self) -> T {
        self.inner(self)
    }

    /// `x_j ∂p/∂x_i` (0-based).
    pub fn shift(&self, i: usize, j: usize) -> Self {
        let mut out = Self::zero();
        for (d, c) in self.terms() {
            if d[i] == 0 {
                continue;
            }
            let mut e = d;
            e[i] -= 1;
            e[j] += 1;
            let k = index(e);
            out.coeffs[k] = out.coeffs[k].clone() + c.clone() * T::from_i64(d[i] as i64);
        }
        out
    }

    /// `π(α)p = −Σ α_ij x_j ∂p/∂x_i`.
    pub fn pi(&self, alpha: &Matrix<T>) -> Self {
        let mut out = Self::zero();
        for i in 0..3 {
            for j in 0..3 {
                let a = &alpha[(i, j)];
                if !a.is_zero() {
                    out = out.sub(&self.shift(i, j).scale(a));
                }
            }
        }
        out
    }

    /// `π(α)p` for diagonal `α`: `x^D ↦ −(Σ a_i d_i) x^D`.
    pub fn pi_diagonal(&self, a: &[T]) -> Self {
        let mut out = self.clone();
        for (d, c) in MONOMIALS.iter().zip(out.coeffs.iter_mut()) {
            let w = (0..3).fold(T::zero(), |acc, i| acc + a[i].clone() * T::from_i64(d[i] as i64));
            *c = -(c.clone() * w);
        }
        out
    }

    /// Evaluate at `x`.
    pub fn eval(&self, x: &[T; 3]) -> T {
        self.terms().fold(T::zero(), |acc, (d, c)| {
            let mut v = c.clone();
            for i in 0..3 {
                for _ in 0..d[i] {
                    v = v * x[i].clone();
                }
            }
            acc + v
        })
    }
}

/// `(g.p)(x) = p(g⁻¹x)`.
pub fn action<T: Scalar>(g: &Matrix<T>, p: &CubicForm<T>, tol: f64) -> Result<CubicForm<T>> {
    if g.rows() != 3 || g.cols() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: g.rows() });
    }
    let h = g.inverse(tol)?;
    let mut out = CubicForm::zero();
    for (d, c) in p.terms() {
        // expand Π_i (Σ_k h_ik x_k)^{d_i} one linear factor at a time
        let mut acc: Vec<(Exponent, T)> = vec![([0, 0, 0], c.clone())];
        for i in 0..3 {
            for _ in 0..d[i] {
                let mut next = Vec::with_capacity(acc.len() * 3);
                for (e, v) in &acc {
                    for k in 0..3 {
                        let hk = &h[(i, k)];
                        if hk.is_zero() {
                            continue;
                        }
                        let mut f = *e;
                        f[k] += 1;
                        next.push((f, v.clone() * hk.clone()));
                    }
                }
                acc = next;
            }
        }
        out = out.add(&CubicForm::from_terms(&acc));
    }
    Ok(out)
}

/// `m(p) = I − [⟨x_j ∂p/∂x_i, p⟩] / ||p||²`, a traceless symmetric matrix.
pub fn moment_poly<T: Scalar>(p: &CubicForm<T>) -> Result<Matrix<T>> {
    if p.is_zero() {
        return Err(Error::ZeroForm);
    }
    let n2 = p.norm2();
    Ok(Matrix::from_fn(3, 3, |i, j| {
        let delta = if i == j { T::one() } else { T::zero() };
        delta - p.shift(i, j).inner(p) / n2.clone()
    }))
}

/// `F(p) = ||m(p)||² = tr m(p)²`.
pub fn f_value<T: Scalar>(p: &CubicForm<T>) -> Result<T> {
    Ok(moment_poly(p)?.frob_norm2())
}

#[derive(Clone, Debug)]
pub struct CriticalCheck<T> {
    pub moment: Matrix<T>,
    pub f: T,
    pub is_critical: bool,
    /// `||π(m)p − F p|| / ||p||`.
    pub residual: f64,
}

/// `p` is critical for `F` iff `π(m(p))p = F(p) p`. When `m(p)` is diagonal
/// the diagonal action rule is used directly; otherwise `p` is rotated into
/// an eigenframe of `m(p)` (float) or the full formula is used (exact).
pub fn critical_check<T: Scalar>(p: &CubicForm<T>, tol: f64) -> Result<CriticalCheck<T>> {
    let m = moment_poly(p)?;
    let f = m.frob_norm2();
    let diag_tol = if T::EXACT { 0.0 } else { tol.max(1e-14) };
    let (lhs, base) = if m.is_diagonal(diag_tol) {
        (p.pi_diagonal(&m.diag()), p.clone())
    } else if T::EXACT {
        (p.pi(&m), p.clone())
    } else {
        let (values, k) = linalg::symmetric_eigen(&m.to_f64());
        let kt = k.transpose().map(|v| T::from_f64_lossy(*v));
        // k⁻¹.p has diagonal moment; the norm is orthogonally invariant
        let rotated = action(&kt, p, tol.max(1e-12))?;
        let values: Vec<T> = values.into_iter().map(T::from_f64_lossy).collect();
        (rotated.pi_diagonal(&values), rotated)
    };
    let defect = lhs.sub(&base.scale(&f));
    let residual = (defect.norm2().to_f64() / base.norm2().to_f64()).sqrt();
    let is_critical = if T::EXACT { defect.is_zero() } else { residual <= tol };
    Ok(CriticalCheck { moment: m, f, is_critical, residual })
}

/// `x₁x₂x₃`, a minimal vector.
pub fn x1x2x3<T: Scalar>() -> CubicForm<T> {
    CubicForm::monomial([1, 1, 1])
}

/// `x₁²x₃ + x₁x₂²`.
pub fn q<T: Scalar>() -> CubicForm<T> {
    CubicForm::from_terms(&[([2, 0, 1], T::one()), ([1, 2, 0], T::one())])
}

/// `x₁x₂x₃ + x₁³`, semistable with non-closed orbit.
pub fn p1<T: Scalar>() -> CubicForm<T> {
    CubicForm::from_terms(&[([1, 1, 1], T::one()), ([3, 0, 0], T::one())])
}

/// `a x₁²x₃ + b x₂³`.
pub fn p_ab<T: Scalar>(a: T, b: T) -> CubicForm<T> {
    CubicForm::from_terms(&[([2, 0, 1], a), ([0, 3, 0], b)])
}

/// `m(p_{a,b})` as a function of `a²` and `b²` only.
pub fn p_ab_moment(a2: &Rational, b2: &Rational) -> Matrix<Rational> {
    let n2 = Rational::from_integer(2.into()) * a2 + Rational::from_integer(6.into()) * b2;
    let d = [Rational::from_integer(4.into()) * a2, Rational::from_integer(18.into()) * b2, Rational::from_integer(2.into()) * a2];
    Matrix::diagonal(&d.iter().map(|v| Rational::from_integer(1.into()) - v / &n2).collect::<Vec<_>>())
}

#[derive(Clone, Debug)]
pub struct LocusReport {
    /// `F` on the locus `5a² = 27b²`, evaluated from `m(p_{a,b})`.
    pub computed: Rational,
    /// Value quoted in the literature, `155/49 − 3`.
    pub quoted: Rational,
    pub agrees: bool,
    /// `π(m)p = F p` holds exactly at `a² = 27, b² = 5`.
    pub critical: bool,
}

/// Critical value of `p_{a,b}` on its critical locus, computed exactly at
/// `a² = 27, b² = 5` (the moment depends on squares only), next to the
/// quoted value.
pub fn p_ab_locus() -> LocusReport {
    let m = p_ab_moment(&Rational::from_integer(27.into()), &Rational::from_integer(5.into()));
    let f = m.frob_norm2();
    let d = m.diag();
    // weights of x₁²x₃ and x₂³ under the diagonal rule
    let w1 = -(Rational::from_integer(2.into()) * &d[0] + &d[2]);
    let w2 = -(Rational::from_integer(3.into()) * &d[1]);
    let critical = w1 == f && w2 == f;
    let quoted = Rational::new(155.into(), 49.into()) - Rational::from_integer(3.into());
    LocusReport { agrees: f == quoted, computed: f, quoted, critical }
}

impl<T: Scalar> fmt::Display for CubicForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let mut sep = "";
            if *c != T::one() {
                write!(f, "{c}")?;
                sep = "*";
            }
            for (i, &k) in d.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "{sep}x{}", i + 1)?,
                    _ => write!(f, "{sep}x{}^{k}", i + 1)?,
                }
                if k > 0 {
                    sep = "*";
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Parse a sum of terms such as `"x1^2*x3 + x1*x2^2"` or `"3/2 x1x2x3 - x2^3"`.
/// Coefficients may be rationals or decimals; every term must have degree 3.
pub fn parse_cubic<T: Scalar>(s: &str) -> Result<CubicForm<T>> {
    let bad = |msg: &str| Error::Parse(format!("{msg} in cubic {s:?}"));
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(bad("empty input"));
    }
    // split on + and - that start a term (not inside an exponent like 1e-3)
    let mut terms: Vec<(bool, String)> = Vec::new();
    let mut current = String::new();
    let mut negative = false;
    let chars: Vec<char> = compact.chars().collect();
    for (idx, &c) in chars.iter().enumerate() {
        let exp_sign = idx > 0 && matches!(chars[idx - 1], 'e' | 'E') && idx > 1 && chars[idx - 2].is_ascii_digit();
        if (c == '+' || c == '-') && !exp_sign {
            if !current.is_empty() {
                terms.push((negative, std::mem::take(&mut current)));
            } else if idx > 0 && !terms.is_empty() {
                return Err(bad("dangling sign"));
            }
            negative = c == '-';
        } else {
            current.push(c);
        }
    }
    if current.is_empty() {
        return Err(bad("dangling sign"));
    }
    terms.push((negative, current));

    let mut p = CubicForm::zero();
    for (negative, term) in terms {
        let start = term.find('x').unwrap_or(term.len());
        let coeff_str = term[..start].trim_end_matches('*');
        let mut coeff = if coeff_str.is_empty() { Rational::from_integer(1.into()) } else { scalar::parse_rational(coeff_str)? };
        if negative {
            coeff = -coeff;
        }
        let mut d: Exponent = [0; 3];
        let body: Vec<char> = term[start..].chars().filter(|&c| c != '*').collect();
        let mut i = 0;
        while i < body.len() {
            if body[i] != 'x' {
                return Err(bad("expected variable x1, x2 or x3"));
            }
            let var = body.get(i + 1).and_then(|c| c.to_digit(10)).filter(|v| (1..=3).contains(v)).ok_or_else(|| bad("expected variable x1, x2 or x3"))? as usize - 1;
            i += 2;
            let mut power = 1u32;
            if body.get(i) == Some(&'^') {
                let digits: String = body[i + 1..].iter().take_while(|c| c.is_ascii_digit()).collect();
                power = digits.parse().map_err(|_| bad("bad exponent"))?;
                i += 1 + digits.len();
            }
            d[var] = d[var].checked_add(power.min(255) as u8).ok_or_else(|| bad("bad exponent"))?;
        }
        if d.iter().map(|&k| k as u32).sum::<u32>() != 3 {
            return Err(bad("term of degree other than 3"));
        }
        p = p.add(&CubicForm::from_terms(&[(d, T::from_rational(&coeff))]));
    }
    Ok(p)
}
