//! Smooth strictly convex potentials on polytope interiors.
//!
//! The canonical example is the Guillemin potential of a Delzant polytope,
//! `h_can(y) = (1/2) sum_i ell_i(y) log ell_i(y)`, which is strictly convex on
//! the open interior and blows up (in second derivatives) at the boundary.
//! Everything downstream consumes potentials through [`ConvexPotential`], so
//! tests can substitute simple analytic potentials such as quadratics.

use num::ToPrimitive;

use super::SolverError;
use crate::polytope::DelzantPolytope;
use crate::rat::to_f64;

/// Second-order data of a scalar function at a point.
#[derive(Debug, Clone)]
pub struct PotentialJet {
    pub value: f64,
    pub grad: Vec<f64>,
    /// Dense symmetric Hessian, row major, `n x n`.
    pub hess: Vec<Vec<f64>>,
}

/// A C^2 strictly convex function on an open convex domain.
pub trait ConvexPotential {
    fn dim(&self) -> usize;

    /// Strict interior test for the domain of definition.
    fn feasible(&self, y: &[f64]) -> bool;

    /// A point deep inside the domain, used to seed Newton iterations.
    fn initial_point(&self) -> Vec<f64>;

    /// Value, gradient and Hessian at `y`.
    ///
    /// Fails with [`SolverError::BoundaryOrExterior`] outside the open domain.
    fn eval(&self, y: &[f64]) -> Result<PotentialJet, SolverError>;
}

/// Guillemin potential of a Delzant polytope, with analytic derivatives.
///
/// With `ell_i(y) = <u_i, y> + lambda_i` the affine facet coordinates,
///
/// ```text
/// h(y)    = (1/2) sum_i ell_i log ell_i
/// grad h  = (1/2) sum_i u_i (log ell_i + 1)
/// hess h  = (1/2) sum_i u_i u_i^T / ell_i
/// ```
#[derive(Debug, Clone)]
pub struct GuilleminPotential {
    n: usize,
    normals: Vec<Vec<f64>>,
    offsets: Vec<f64>,
    center: Vec<f64>,
}

impl GuilleminPotential {
    pub fn new(p: &DelzantPolytope) -> Self {
        let n = p.dim();
        let normals: Vec<Vec<f64>> = p
            .facets()
            .iter()
            .map(|f| f.normal.iter().map(|z| z.to_f64().unwrap()).collect())
            .collect();
        let offsets: Vec<f64> = p.facets().iter().map(|f| to_f64(&f.offset)).collect();
        let verts = p.vertices();
        let mut center = vec![0.0; n];
        for v in verts {
            for d in 0..n {
                center[d] += to_f64(&v.point[d]);
            }
        }
        for c in center.iter_mut() {
            *c /= verts.len() as f64;
        }
        GuilleminPotential { n, normals, offsets, center }
    }

    pub fn ell(&self, i: usize, y: &[f64]) -> f64 {
        let mut v = self.offsets[i];
        for d in 0..self.n {
            v += self.normals[i][d] * y[d];
        }
        v
    }

    /// Smallest facet coordinate; positive exactly on the open interior.
    pub fn min_ell(&self, y: &[f64]) -> f64 {
        (0..self.normals.len())
            .map(|i| self.ell(i, y))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn facet_count(&self) -> usize {
        self.normals.len()
    }
}

impl ConvexPotential for GuilleminPotential {
    fn dim(&self) -> usize {
        self.n
    }

    fn feasible(&self, y: &[f64]) -> bool {
        self.min_ell(y) > 0.0
    }

    fn initial_point(&self) -> Vec<f64> {
        self.center.clone()
    }

    fn eval(&self, y: &[f64]) -> Result<PotentialJet, SolverError> {
        assert_eq!(y.len(), self.n);
        let n = self.n;
        let mut value = 0.0;
        let mut grad = vec![0.0; n];
        let mut hess = vec![vec![0.0; n]; n];
        for i in 0..self.normals.len() {
            let ell = self.ell(i, y);
            if ell <= 0.0 {
                return Err(SolverError::BoundaryOrExterior(y.to_vec()));
            }
            let log = ell.ln();
            value += 0.5 * ell * log;
            for d in 0..n {
                grad[d] += 0.5 * self.normals[i][d] * (log + 1.0);
                for e in 0..n {
                    hess[d][e] += 0.5 * self.normals[i][d] * self.normals[i][e] / ell;
                }
            }
        }
        Ok(PotentialJet { value, grad, hess })
    }
}

/// Guillemin potential jet at a single point.
pub fn guillemin_eval(p: &DelzantPolytope, y: &[f64]) -> Result<PotentialJet, SolverError> {
    GuilleminPotential::new(p).eval(y)
}

/// Determinant of a small (n <= 3) dense matrix.
pub(crate) fn det_small(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        n => panic!("det_small: unsupported size {n}"),
    }
}

/// Solves `m x = rhs` by Gaussian elimination with partial pivoting.
pub(crate) fn solve_small(m: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.iter().map(|row| {
        let mut r = row.clone();
        r.push(0.0);
        r
    }).collect();
    for (i, row) in a.iter_mut().enumerate() {
        row[n] = rhs[i];
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..=n {
                a[row][k] -= f * a[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut v = a[row][n];
        for k in row + 1..n {
            v -= a[row][k] * x[k];
        }
        x[row] = v / a[row][row];
    }
    Some(x)
}

/// Inverse of a small dense matrix, `None` if numerically singular.
pub(crate) fn inv_small(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        cols.push(solve_small(m, &e)?);
    }
    let mut inv = vec![vec![0.0; n]; n];
    for (j, col) in cols.iter().enumerate() {
        for i in 0..n {
            inv[i][j] = col[i];
        }
    }
    Some(inv)
}

/// Leading principal minors all positive (Sylvester), `n <= 3`.
pub(crate) fn positive_definite(m: &[Vec<f64>]) -> bool {
    match m.len() {
        1 => m[0][0] > 0.0,
        2 => m[0][0] > 0.0 && det_small(m) > 0.0,
        3 => {
            m[0][0] > 0.0
                && m[0][0] * m[1][1] - m[0][1] * m[1][0] > 0.0
                && det_small(m) > 0.0
        }
        n => panic!("positive_definite: unsupported size {n}"),
    }
}
