//! The bracket flow on the sphere `||μ|| = 2`, descent of `F` along a
//! `GL_n` orbit, and nilsoliton certificates `Ric = cI + D`.

use std::io::Write;

use serde::Serialize;

use crate::bracket::{self, BracketTensor, FloatBracket, Invariants};
use crate::curvature;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::pre_einstein::{self, EigenvalueType};
use crate::scalar::{self, Rational, Scalar};

/// Radius of the sphere the flow lives on.
pub const RADIUS: f64 = 2.0;

#[derive(Clone, Debug, Serialize)]
pub struct FlowSample {
    pub t: f64,
    #[serde(rename = "F")]
    pub f: f64,
    pub grad_norm: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct FlowOptions {
    pub step: f64,
    pub max_t: f64,
    /// Stop once `||grad F|| < tol`.
    pub tol: f64,
    /// Record a sample every this many accepted steps.
    pub sample_every: usize,
    /// Keep full brackets alongside the samples.
    pub snapshots: bool,
    /// Maximum number of step halvings after a rise of `F`.
    pub max_halvings: u32,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            step: 0.05,
            max_t: 1e4,
            tol: 1e-10,
            sample_every: 10,
            snapshots: false,
            max_halvings: 30,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Flow {
    pub samples: Vec<FlowSample>,
    pub snapshots: Vec<FloatBracket>,
    pub limit: FloatBracket,
    pub t: f64,
    pub f: f64,
    pub grad_norm: f64,
    pub steps: usize,
    pub converged: bool,
    /// Final step size after any halvings.
    pub step: f64,
}

impl Flow {
    /// Trajectory as CSV with header `t,F,grad_norm`.
    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        writeln!(out, "t,F,grad_norm")?;
        for s in &self.samples {
            writeln!(out, "{},{},{}", s.t, s.f, s.grad_norm)?;
        }
        Ok(())
    }
}

/// `−π(Ric_μ)μ + tr(Ric_μ²) μ`, tangent to the sphere of radius 2.
pub fn flow_field(mu: &FloatBracket) -> FloatBracket {
    bracket::pi(&generator(mu).scale(&-1.0), mu).expect("square operator of matching size")
}

/// `A(μ) = Ric_μ + tr(Ric_μ²) I`, so that the flow reads `dμ/dt = −π(A(μ))μ`
/// (`π(I)μ = −μ`).
fn generator(mu: &FloatBracket) -> Matrix<f64> {
    let ric = curvature::ricci_operator_r(mu);
    let tr2 = ric.frob_norm2();
    ric.add(&Matrix::identity(mu.dim()).scale(&tr2))
}

fn on_sphere(mu: &FloatBracket) -> FloatBracket {
    mu.scale(&(RADIUS / mu.norm()))
}

/// `exp(−A).μ` for symmetric `A`.
fn flow_by(a: &Matrix<f64>, mu: &FloatBracket) -> FloatBracket {
    let e = linalg::expm_symmetric(&a.scale(&-1.0));
    let e_inv = linalg::expm_symmetric(a);
    bracket::act_with_inverse(&e, &e_inv, mu)
}

/// One step of the commutator-free fourth-order Lie group method: every
/// stage moves `μ` by group elements, so the step never leaves the orbit.
fn rk4(mu: &FloatBracket, h: f64) -> FloatBracket {
    let lin = |terms: &[(f64, &Matrix<f64>)]| {
        terms
            .iter()
            .fold(Matrix::zeros(mu.dim(), mu.dim()), |acc, (c, m)| acc.add(&m.scale(&(h * c))))
    };
    let a1 = generator(mu);
    let y2 = flow_by(&a1.scale(&(h / 2.0)), mu);
    let a2 = generator(&y2);
    let y3 = flow_by(&a2.scale(&(h / 2.0)), mu);
    let a3 = generator(&y3);
    let y4 = flow_by(&lin(&[(1.0, &a3), (-0.5, &a1)]), &y2);
    let a4 = generator(&y4);
    let half = flow_by(&lin(&[(0.25, &a1), (1.0 / 6.0, &a2), (1.0 / 6.0, &a3), (-1.0 / 12.0, &a4)]), mu);
    on_sphere(&flow_by(&lin(&[(-1.0 / 12.0, &a1), (1.0 / 6.0, &a2), (1.0 / 6.0, &a3), (0.25, &a4)]), &half))
}

fn grad_norm(mu: &FloatBracket) -> f64 {
    curvature::grad_f(mu).map(|g| g.norm()).unwrap_or(0.0)
}

/// Integrate the flow until `||grad F|| < tol` or `t > max_t`, keeping
/// whatever was reached.
pub fn integrate_flow_partial<T: Scalar>(mu0: &BracketTensor<T>, opts: &FlowOptions) -> Result<Flow> {
    if mu0.is_zero() {
        return Err(Error::ZeroBracket);
    }
    let mut mu = on_sphere(&mu0.to_f64());
    let mut f = curvature::functional_f(&mu);
    let mut g = grad_norm(&mu);
    let mut t = 0.0;
    let mut h = opts.step;
    let mut samples = vec![FlowSample { t, f, grad_norm: g }];
    let mut snapshots = if opts.snapshots { vec![mu.clone()] } else { Vec::new() };
    let mut steps = 0;
    while g >= opts.tol && t <= opts.max_t {
        let mut halvings = 0;
        let (next, f_next) = loop {
            let candidate = rk4(&mu, h);
            let fc = curvature::functional_f(&candidate);
            // rounding in F itself is about 1e-15 relative
            if fc <= f + 1e-13 * f.max(1.0) {
                break (candidate, fc);
            }
            halvings += 1;
            if halvings > opts.max_halvings {
                return Err(Error::NonMonotone { t, step: h });
            }
            h *= 0.5;
        };
        mu = next;
        f = f_next;
        g = grad_norm(&mu);
        t += h;
        steps += 1;
        if steps % opts.sample_every.max(1) == 0 || g < opts.tol {
            samples.push(FlowSample { t, f, grad_norm: g });
            if opts.snapshots {
                snapshots.push(mu.clone());
            }
        }
    }
    Ok(Flow {
        samples,
        snapshots,
        limit: mu,
        t,
        f,
        grad_norm: g,
        steps,
        converged: g < opts.tol,
        step: h,
    })
}

/// As [`integrate_flow_partial`], failing with `Timeout` when the gradient
/// tolerance is not met by `max_t`.
pub fn integrate_flow<T: Scalar>(mu0: &BracketTensor<T>, opts: &FlowOptions) -> Result<Flow> {
    let flow = integrate_flow_partial(mu0, opts)?;
    if flow.converged {
        Ok(flow)
    } else {
        Err(Error::Timeout { max_t: opts.max_t })
    }
}

#[derive(Clone, Debug)]
pub struct NilsolitonCertificate<T> {
    pub c: T,
    pub d: Matrix<T>,
    /// Frobenius norm of `Ric − cI − D` for the least-squares projection
    /// onto `ℝI + Der(μ)`, with `μ` scaled to `||μ|| = 2`.
    pub residual: T,
    pub residual_f64: f64,
    pub eigenvalue_type: Option<EigenvalueType>,
}

/// Project `Ric_μ` onto `ℝI + Der(μ)`. Float inputs are first scaled to the
/// radius-2 sphere so the residual is comparable across brackets.
pub fn soliton_certificate<T: Scalar>(mu: &BracketTensor<T>, tol: f64) -> NilsolitonCertificate<T> {
    let n = mu.dim();
    let mu = if T::EXACT || mu.is_zero() {
        mu.clone()
    } else {
        mu.scale(&T::from_f64_lossy(RADIUS / mu.norm()))
    };
    let ric = curvature::ricci_operator_r(&mu);
    let mut span = vec![Matrix::identity(n)];
    span.extend(bracket::derivations(&mu, tol).basis);
    let gram = Matrix::from_fn(span.len(), span.len(), |i, j| span[i].frob_inner(&span[j]));
    let rhs: Vec<T> = span.iter().map(|s| s.frob_inner(&ric)).collect();
    let x = linalg::solve_min_norm(&gram, &rhs, tol).unwrap_or_else(|| vec![T::zero(); span.len()]);
    let proj = span
        .iter()
        .zip(&x)
        .fold(Matrix::zeros(n, n), |acc, (s, c)| acc.add(&s.scale(c)));
    let diff = ric.sub(&proj);
    let residual2 = diff.frob_norm2();
    let residual = if T::EXACT {
        residual2.sqrt_exact().unwrap_or_else(|| T::from_f64_lossy(residual2.to_f64().sqrt()))
    } else {
        T::from_f64_lossy(residual2.to_f64().sqrt())
    };
    let residual_f64 = residual.to_f64();
    let certified = if T::EXACT { residual.is_zero() } else { residual_f64 < tol.max(1e-8) };
    let tr = ric.trace();
    let (c, d) = if certified {
        let c = if tr.is_zero() { T::zero() } else { ric.frob_norm2() / tr };
        let d = ric.sub(&Matrix::identity(n).scale(&c));
        (c, d)
    } else {
        let d = proj.sub(&Matrix::identity(n).scale(&x[0]));
        (x[0].clone(), d)
    };
    let eigenvalue_type = if certified && d.max_abs() != 0.0 {
        derivation_type(&d, tol)
    } else {
        None
    };
    NilsolitonCertificate {
        c,
        d,
        residual,
        residual_f64,
        eigenvalue_type,
    }
}

/// Eigenvalue type of a soliton derivation; float spectra are normalized by
/// their smallest eigenvalue before snapping to small rationals.
fn derivation_type<T: Scalar>(d: &Matrix<T>, tol: f64) -> Option<EigenvalueType> {
    if T::EXACT {
        return pre_einstein::eigenvalue_type(d, tol).ok();
    }
    let sym = d.to_f64().symmetric_part();
    let (values, _) = linalg::symmetric_eigen(&sym);
    let smallest = *values.first()?;
    if smallest <= 0.0 {
        return None;
    }
    let mut grouped: Vec<(Rational, usize)> = Vec::new();
    for v in values {
        let r = scalar::rationalize(v / smallest, 10_000, 1e-6 * (v / smallest))?;
        match grouped.iter_mut().find(|(u, _)| *u == r) {
            Some(slot) => slot.1 += 1,
            None => grouped.push((r, 1)),
        }
    }
    pre_einstein::eigenvalue_type_of(&grouped).ok()
}

#[derive(Clone, Copy, Debug)]
pub struct DescentOptions {
    /// Certify once the soliton residual drops below this.
    pub tol: f64,
    pub max_iter: usize,
    /// `Diverged` once `||g||` of the determinant-one normalized `g` exceeds this.
    pub g_bound: f64,
    /// Recompute exact-rank invariants every this many iterations.
    pub checkpoint_every: usize,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 20_000,
            g_bound: 1e6,
            checkpoint_every: 500,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DescentVerdict {
    CertifiedSoliton,
    Diverged,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct DescentOutcome {
    pub verdict: DescentVerdict,
    /// Best point `g.μ0`, scaled to the radius-2 sphere.
    pub best: FloatBracket,
    /// Accumulated group element, normalized to `|det g| = 1`.
    pub g: Matrix<f64>,
    pub f: f64,
    pub residual: f64,
    pub iterations: usize,
    pub g_norm: f64,
    pub initial_invariants: Invariants,
    /// False if some checkpoint disagreed with the starting invariants.
    pub invariants_constant: bool,
}

impl DescentOutcome {
    pub fn converged(&self) -> bool {
        self.verdict == DescentVerdict::CertifiedSoliton
    }
}

/// Symmetric `G` with `⟨G, α⟩ = d/ds F(exp(sα).μ)` at `s = 0`.
pub fn orbit_gradient(mu: &FloatBracket) -> Result<Matrix<f64>> {
    let n = mu.dim();
    let grad = curvature::grad_f(mu)?;
    let mut m = Matrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            // d/ds exp(sα).μ = π(α)μ
            m[(a, b)] = bracket::inner(&grad, &bracket::pi(&Matrix::unit(n, a, b), mu)?)?;
        }
    }
    Ok(m.symmetric_part())
}

fn det_normalized(g: &Matrix<f64>) -> Matrix<f64> {
    let det = g.determinant().abs();
    g.scale(&(1.0 / det.powf(1.0 / g.rows() as f64)))
}

/// Minimize `F(g.μ0)` over `g ∈ GL_n` by backtracking descent along
/// `exp(−sG)`, `G` the symmetric orbit gradient.
pub fn orbit_descent<T: Scalar>(mu0: &BracketTensor<T>, opts: &DescentOptions) -> Result<DescentOutcome> {
    if mu0.is_zero() {
        return Err(Error::ZeroBracket);
    }
    let n = mu0.dim();
    let inv_tol = 1e-8;
    let mut nu = on_sphere(&mu0.to_f64());
    let initial_invariants = bracket::invariants(&nu, inv_tol)?;
    let mut invariants_constant = true;
    let mut g = Matrix::identity(n);
    let mut f = curvature::functional_f(&nu);
    let mut s: f64 = 0.1;
    let mut iterations = 0;
    let finish = |verdict, nu: FloatBracket, g: Matrix<f64>, f, iterations, inv_ok| {
        let cert = soliton_certificate(&nu, opts.tol.min(1e-9));
        let g = det_normalized(&g);
        DescentOutcome {
            verdict,
            g_norm: g.max_abs(),
            best: nu,
            g,
            f,
            residual: cert.residual_f64,
            iterations,
            initial_invariants: initial_invariants.clone(),
            invariants_constant: inv_ok,
        }
    };
    loop {
        let residual = soliton_certificate(&nu, opts.tol.min(1e-9)).residual_f64;
        if residual < opts.tol {
            return Ok(finish(DescentVerdict::CertifiedSoliton, nu, g, f, iterations, invariants_constant));
        }
        if iterations >= opts.max_iter {
            return Ok(finish(DescentVerdict::Inconclusive, nu, g, f, iterations, invariants_constant));
        }
        let grad = orbit_gradient(&nu)?;
        let gg = grad.frob_norm2();
        if gg == 0.0 {
            return Ok(finish(DescentVerdict::Inconclusive, nu, g, f, iterations, invariants_constant));
        }
        let mut accepted = false;
        s = (s * 2.0).min(1e3);
        while s > 1e-16 {
            let step = grad.scale(&-s);
            let e = linalg::expm_symmetric(&step);
            let e_inv = linalg::expm_symmetric(&step.scale(&-1.0));
            let candidate = bracket::act_with_inverse(&e, &e_inv, &nu);
            let fc = curvature::functional_f(&candidate);
            if fc <= f - 1e-4 * s * gg {
                let r = RADIUS / candidate.norm();
                nu = candidate.scale(&r);
                // scaling μ by r is the action of r⁻¹ I
                g = e.mul(&g).scale(&(1.0 / r));
                f = fc;
                accepted = true;
                break;
            }
            s *= 0.5;
        }
        iterations += 1;
        if !accepted {
            return Ok(finish(DescentVerdict::Inconclusive, nu, g, f, iterations, invariants_constant));
        }
        if opts.checkpoint_every > 0 && iterations % opts.checkpoint_every == 0 {
            invariants_constant &= bracket::invariants(&nu, inv_tol)? == initial_invariants;
        }
        let g_norm = det_normalized(&g).max_abs();
        if g_norm > opts.g_bound {
            return Ok(finish(DescentVerdict::Diverged, nu, g, f, iterations, invariants_constant));
        }
    }
}
