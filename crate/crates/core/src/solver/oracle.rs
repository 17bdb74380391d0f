//! Reference solutions built by transport, used to seed and check flows.
//!
//! In one dimension the dual equation integrates in closed form: with
//! density `c + A_c > 0` on the interval `P_β = [p, q]`, the map
//!
//! ```text
//! s(y) = alpha_lo + int_p^y (c + A_c(t)) dt
//! ```
//!
//! sends `P_β` onto `P_α` (the endpoint identity `c |P_β| = |P_α|` is exactly
//! the vanishing of `b`), and `h'(y) = G_α'(s(y))` with `G_α` the Guillemin
//! potential of `P_α` solves the equation: `f''(h') = 1/G_α''(s)` cancels
//! against `h'' = G_α''(s) (c + A_c)`.  Products of intervals solve by
//! splitting the constant `c` across factors.

use num::{Signed, Zero};

use super::{ProblemSpec, SolverError};
use crate::polytope::DelzantPolytope;
use crate::rat::{rat_string, to_f64, Rat};
use crate::regmax::gauss_legendre;

/// Closed-form solution of a one-dimensional dual problem with `b = 0`.
#[derive(Debug, Clone)]
pub struct Transport1D {
    beta_lo: f64,
    beta_hi: f64,
    alpha_lo: f64,
    alpha_hi: f64,
    c: f64,
    slope: f64,
    mu: f64,
    mid: f64,
    gl: (Vec<f64>, Vec<f64>),
}

impl Transport1D {
    /// Source interval `P_β` endpoints.
    pub fn beta_interval(&self) -> (f64, f64) {
        (self.beta_lo, self.beta_hi)
    }

    /// Target interval `P_α` endpoints.
    pub fn alpha_interval(&self) -> (f64, f64) {
        (self.alpha_lo, self.alpha_hi)
    }

    /// Transported coordinate `s(y)`, mapping `P_β` onto `P_α`.
    pub fn s(&self, y: f64) -> f64 {
        self.alpha_lo
            + (self.c - self.mu) * (y - self.beta_lo)
            + 0.5 * self.slope * (y * y - self.beta_lo * self.beta_lo)
    }

    /// `s'(y) = c + A_c(y)`, positive across the interval.
    pub fn density(&self, y: f64) -> f64 {
        self.c - self.mu + self.slope * y
    }

    /// `h'(y) = G_α'(s(y))`.
    pub fn h1(&self, y: f64) -> f64 {
        let s = self.s(y);
        0.5 * ((s - self.alpha_lo) / (self.alpha_hi - s)).ln()
    }

    /// `h''(y) = G_α''(s(y)) (c + A_c(y))`.
    pub fn h2(&self, y: f64) -> f64 {
        let s = self.s(y);
        0.5 * (1.0 / (s - self.alpha_lo) + 1.0 / (self.alpha_hi - s)) * self.density(y)
    }

    /// Potential value, anchored to `h(mid) = 0` at the interval midpoint.
    /// The anchor is immaterial: the equation and all comparisons read only
    /// derivatives or differences that cancel constants.
    pub fn h(&self, y: f64) -> f64 {
        let a = self.mid;
        if y == a {
            return 0.0;
        }
        let panels = ((y - a).abs() / 0.01).ceil().max(4.0) as usize;
        let (nodes, weights) = &self.gl;
        let mut acc = 0.0;
        for k in 0..panels {
            let t0 = a + (y - a) * k as f64 / panels as f64;
            let t1 = a + (y - a) * (k + 1) as f64 / panels as f64;
            let half = 0.5 * (t1 - t0);
            let midk = 0.5 * (t0 + t1);
            for (x, w) in nodes.iter().zip(weights) {
                acc += w * half * self.h1(midk + half * x);
            }
        }
        acc
    }
}

fn interval_bounds(p: &DelzantPolytope) -> (Rat, Rat) {
    assert_eq!(p.dim(), 1);
    let mut lo = None;
    let mut hi = None;
    for f in p.facets() {
        if f.normal[0] == 1.into() {
            lo = Some(-f.offset.clone());
        } else {
            hi = Some(f.offset.clone());
        }
    }
    (lo.unwrap(), hi.unwrap())
}

/// Integrates the one-dimensional dual equation in closed form.
///
/// Requires `b = 0`; since in one dimension `b = 0` is exactly the endpoint
/// identity `c |P_β| = |P_α|`, an inconsistent `(c, b)` surfaces as
/// [`SolverError::EndpointMismatch`].  Fails with
/// [`SolverError::InfeasibleTransport`] when `c + A_c` is not strictly
/// positive on `P_β`.
pub fn solve_1d_transport(problem: &ProblemSpec) -> Result<Transport1D, SolverError> {
    if problem.dim() != 1 {
        return Err(SolverError::DimensionUnsupported(problem.dim()));
    }
    let (b_lo, b_hi) = interval_bounds(problem.pair().beta());
    let (a_lo, a_hi) = interval_bounds(problem.pair().alpha());
    let s_end = &a_lo + problem.c() * (&b_hi - &b_lo);
    if s_end != a_hi {
        return Err(SolverError::EndpointMismatch {
            got: rat_string(&s_end),
            want: rat_string(&a_hi),
        });
    }
    let a_c = problem.ham().centered();
    let d_lo = problem.c() + a_c.eval(std::slice::from_ref(&b_lo));
    let d_hi = problem.c() + a_c.eval(std::slice::from_ref(&b_hi));
    let d_min = d_lo.min(d_hi);
    if !d_min.is_positive() {
        return Err(SolverError::InfeasibleTransport(to_f64(&d_min)));
    }
    Ok(Transport1D {
        beta_lo: to_f64(&b_lo),
        beta_hi: to_f64(&b_hi),
        alpha_lo: to_f64(&a_lo),
        alpha_hi: to_f64(&a_hi),
        c: problem.c_f64(),
        slope: to_f64(&problem.ham().a_v[0]),
        mu: to_f64(&problem.ham().mu_bar),
        mid: 0.5 * (to_f64(&b_lo) + to_f64(&b_hi)),
        gl: gauss_legendre(16),
    })
}

/// Separable reference solution on a product of intervals.
#[derive(Debug, Clone)]
pub struct Product2D {
    pub f1: Transport1D,
    pub f2: Transport1D,
}

impl Product2D {
    pub fn h(&self, y: &[f64]) -> f64 {
        self.f1.h(y[0]) + self.f2.h(y[1])
    }
}

/// Combines two one-dimensional solutions into a product solution.  The
/// second factor must carry no hamiltonian (its transport is pure scaling).
pub fn product_solution(
    problem1: &ProblemSpec,
    problem2: &ProblemSpec,
) -> Result<Product2D, SolverError> {
    if !problem2.ham().a_v[0].is_zero() {
        return Err(SolverError::NotSeparable);
    }
    Ok(Product2D {
        f1: solve_1d_transport(problem1)?,
        f2: solve_1d_transport(problem2)?,
    })
}

fn box_bounds(p: &DelzantPolytope) -> Option<Vec<(Rat, Rat)>> {
    let n = p.dim();
    if p.facets().len() != 2 * n {
        return None;
    }
    let mut lo: Vec<Option<Rat>> = vec![None; n];
    let mut hi: Vec<Option<Rat>> = vec![None; n];
    for f in p.facets() {
        let nz: Vec<usize> = (0..n).filter(|&d| !f.normal[d].is_zero()).collect();
        if nz.len() != 1 {
            return None;
        }
        let d = nz[0];
        if f.normal[d] == 1.into() {
            lo[d] = Some(-f.offset.clone());
        } else if f.normal[d] == (-1).into() {
            hi[d] = Some(f.offset.clone());
        } else {
            return None;
        }
    }
    lo.into_iter()
        .zip(hi)
        .map(|(l, h)| Some((l?, h?)))
        .collect()
}

/// Splits a separable two-dimensional problem into its axis factors.
///
/// Both polytopes must be axis-aligned boxes and the hamiltonian must touch
/// the first axis only.  The constant splits as `c_2 = |P_α2|/|P_β2|`
/// (forcing `b_2 = 0`) and `c_1 = c - c_2`; when `c = c_X` additivity of the
/// intersection numbers gives `b_1 = 0` as well.
pub fn split_product(problem: &ProblemSpec) -> Result<(ProblemSpec, ProblemSpec), SolverError> {
    if problem.dim() != 2 {
        return Err(SolverError::DimensionUnsupported(problem.dim()));
    }
    let beta = box_bounds(problem.pair().beta()).ok_or(SolverError::NotSeparable)?;
    let alpha = box_bounds(problem.pair().alpha()).ok_or(SolverError::NotSeparable)?;
    if !problem.ham().a_v[1].is_zero() {
        return Err(SolverError::NotSeparable);
    }
    let len = |(l, h): &(Rat, Rat)| h - l;
    let c2 = len(&alpha[1]) / len(&beta[1]);
    let c1 = problem.c() - &c2;
    let factor = |axis: usize, a_v: Rat, c: Rat| -> Result<ProblemSpec, SolverError> {
        let pair = crate::classes::KahlerClassPair::new(
            1,
            vec![vec![1], vec![-1]],
            vec![-alpha[axis].0.clone(), alpha[axis].1.clone()],
            vec![-beta[axis].0.clone(), beta[axis].1.clone()],
        )?;
        let ham = crate::classes::hamiltonian_spec(vec![a_v], &pair)?;
        Ok(ProblemSpec::new(pair, ham, Some(c))?)
    };
    let p1 = factor(0, problem.ham().a_v[0].clone(), c1)?;
    let p2 = factor(1, Rat::zero(), c2)?;
    Ok((p1, p2))
}
