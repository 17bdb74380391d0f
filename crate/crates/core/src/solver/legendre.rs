//! Legendre transforms of strictly convex potentials.
//!
//! For `f(x) = sup_y (<x,y> - h(y))` with `h` strictly convex and essentially
//! smooth, the supremum is attained at the unique `y*` with `grad h(y*) = x`,
//! and
//!
//! ```text
//! f(x)      = <x, y*> - h(y*)
//! grad f(x) = y*
//! D^2 f(x)  = (D^2 h(y*))^{-1}
//! ```
//!
//! The general evaluator inverts `grad h` by a damped Newton iteration.  When
//! the domain is an axis-aligned box and `h` is its Guillemin potential the
//! inversion per axis is a logistic in closed form, which is both exact and
//! cheap; [`OmegaDual`] picks that path automatically.

use super::potential::{inv_small, solve_small, ConvexPotential, GuilleminPotential};
use super::SolverError;
use crate::polytope::DelzantPolytope;
use crate::rat::to_f64;

/// Second-order data of a Legendre dual at a point: `grad` is the critical
/// point `y*`, `hess` is `D^2 f = (D^2 h(y*))^{-1}`.
#[derive(Debug, Clone)]
pub struct LegendreJet {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<Vec<f64>>,
}

/// Newton-based evaluator for the Legendre dual of an arbitrary potential.
pub struct LegendreEvaluator {
    potential: Box<dyn ConvexPotential>,
    pub tol: f64,
    pub max_iters: usize,
}

impl LegendreEvaluator {
    pub fn new(potential: Box<dyn ConvexPotential>) -> Self {
        LegendreEvaluator { potential, tol: 1e-12, max_iters: 50 }
    }

    /// Evaluator for the Legendre dual of the Guillemin potential of `p`.
    pub fn for_polytope(p: &DelzantPolytope) -> Self {
        Self::new(Box::new(GuilleminPotential::new(p)))
    }

    pub fn dim(&self) -> usize {
        self.potential.dim()
    }

    /// Solves `grad h(y*) = x` from `warm` (or a default interior seed) and
    /// returns the dual jet.  Steps are damped to stay strictly inside the
    /// domain and to keep the gradient residual monotone.
    pub fn eval(&self, x: &[f64], warm: Option<&[f64]>) -> Result<LegendreJet, SolverError> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let mut y = match warm {
            Some(w) if self.potential.feasible(w) => w.to_vec(),
            _ => self.potential.initial_point(),
        };
        let mut jet = self.potential.eval(&y)?;
        let mut res_norm = resid_norm(&jet.grad, x);
        for _ in 0..self.max_iters {
            if res_norm <= self.tol {
                let mut value = -jet.value;
                for d in 0..n {
                    value += x[d] * y[d];
                }
                let hess = inv_small(&jet.hess)
                    .ok_or_else(|| SolverError::NewtonDiverged(x.to_vec()))?;
                return Ok(LegendreJet { value, grad: y, hess });
            }
            let rhs: Vec<f64> = (0..n).map(|d| jet.grad[d] - x[d]).collect();
            let delta = solve_small(&jet.hess, &rhs)
                .ok_or_else(|| SolverError::NewtonDiverged(x.to_vec()))?;
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let cand: Vec<f64> = (0..n).map(|d| y[d] - t * delta[d]).collect();
                if self.potential.feasible(&cand) {
                    let cand_jet = self.potential.eval(&cand)?;
                    let cand_norm = resid_norm(&cand_jet.grad, x);
                    if cand_norm < res_norm {
                        y = cand;
                        jet = cand_jet;
                        res_norm = cand_norm;
                        accepted = true;
                        break;
                    }
                }
                t *= 0.5;
            }
            if !accepted {
                return Err(SolverError::NewtonDiverged(x.to_vec()));
            }
        }
        Err(SolverError::NewtonDiverged(x.to_vec()))
    }
}

fn resid_norm(grad: &[f64], x: &[f64]) -> f64 {
    grad.iter()
        .zip(x)
        .map(|(g, xv)| (g - xv).abs())
        .fold(0.0, f64::max)
}

/// Legendre dual jet of `ev`'s potential at `x`.
pub fn legendre_eval(ev: &LegendreEvaluator, x: &[f64]) -> Result<LegendreJet, SolverError> {
    ev.eval(x, None)
}

/// Closed-form dual of the Guillemin potential of an axis-aligned box.
///
/// Per axis with box `[A, B]`, `grad h(y) = (1/2) log((y - A)/(B - y))`, so
/// `y*(x) = A + (B - A) sigma(2x)` with the logistic `sigma`, and
/// `f''(x) = 1/h''(y*) = 2 (y* - A)(B - y*)/(B - A)`.
#[derive(Debug)]
pub(crate) struct BoxDual {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

fn logistic(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

impl BoxDual {
    /// Per-axis critical point and dual second derivative.
    fn axis(&self, d: usize, x: f64) -> (f64, f64) {
        let (a, b) = (self.lo[d], self.hi[d]);
        let sig = logistic(2.0 * x);
        let y = a + (b - a) * sig;
        let fpp = 2.0 * (b - a) * sig * (1.0 - sig);
        (y, fpp)
    }

    fn jet(&self, x: &[f64]) -> LegendreJet {
        let n = self.lo.len();
        let mut value = 0.0;
        let mut grad = vec![0.0; n];
        let mut hess = vec![vec![0.0; n]; n];
        for d in 0..n {
            let (y, fpp) = self.axis(d, x[d]);
            let (a, b) = (self.lo[d], self.hi[d]);
            let h = 0.5 * (xlogx(y - a) + xlogx(b - y));
            value += x[d] * y - h;
            grad[d] = y;
            hess[d][d] = fpp;
        }
        LegendreJet { value, grad, hess }
    }
}

fn xlogx(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        t * t.ln()
    }
}

/// Recognizes an axis-aligned box from its facet data.
pub(crate) fn detect_box(p: &DelzantPolytope) -> Option<BoxDual> {
    let n = p.dim();
    if p.facets().len() != 2 * n {
        return None;
    }
    let mut lo = vec![f64::NAN; n];
    let mut hi = vec![f64::NAN; n];
    for f in p.facets() {
        let nz: Vec<usize> = (0..n)
            .filter(|&d| f.normal[d] != num::bigint::BigInt::from(0))
            .collect();
        if nz.len() != 1 {
            return None;
        }
        let d = nz[0];
        let coef = &f.normal[d];
        let off = to_f64(&f.offset);
        if *coef == num::bigint::BigInt::from(1) {
            lo[d] = -off;
        } else if *coef == num::bigint::BigInt::from(-1) {
            hi[d] = off;
        } else {
            return None;
        }
    }
    if lo.iter().chain(hi.iter()).any(|v| v.is_nan()) {
        return None;
    }
    Some(BoxDual { lo, hi })
}

/// Dual-side evaluator used in the residual: exact for boxes, Newton
/// otherwise.
pub(crate) enum OmegaDual {
    Box(BoxDual),
    Newton(LegendreEvaluator),
}

impl OmegaDual {
    pub fn for_polytope(p: &DelzantPolytope) -> Self {
        match detect_box(p) {
            Some(b) => OmegaDual::Box(b),
            None => OmegaDual::Newton(LegendreEvaluator::for_polytope(p)),
        }
    }

    pub fn jet(&self, x: &[f64], warm: Option<&[f64]>) -> Result<LegendreJet, SolverError> {
        match self {
            OmegaDual::Box(b) => Ok(b.jet(x)),
            OmegaDual::Newton(ev) => ev.eval(x, warm),
        }
    }
}
