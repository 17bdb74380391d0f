//! Uniform finite-difference grids over the interior of a moment polytope.
//!
//! Nodes live on a uniform lattice filling the bounding box of `P_β`.  A node
//! is *active* when every facet coordinate satisfies `ell_i(y) >= margin`.
//! Active nodes split into the *interior* (the full 3^n neighborhood is
//! active, so central stencils never read inactive data) and the *ring*
//! (Dirichlet layer, frozen during flows).  The grid stores the correction
//! `u = h - h_can`; the log-singular part of `h` lives entirely in the
//! analytic Guillemin term.

use super::potential::{ConvexPotential, GuilleminPotential};
use super::{ProblemSpec, SolverError};
use crate::rat::to_f64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeClass {
    Exterior,
    Ring,
    Interior,
}

#[derive(Debug, Clone)]
pub struct PotentialGrid {
    n: usize,
    nodes_per_axis: usize,
    lo: Vec<f64>,
    delta: Vec<f64>,
    strides: Vec<usize>,
    classes: Vec<NodeClass>,
    u: Vec<f64>,
    interior: Vec<usize>,
    ring: Vec<usize>,
    active: Vec<usize>,
    margin: f64,
    guillemin: GuilleminPotential,
}

impl PotentialGrid {
    /// Builds the grid for `problem`'s target polytope with `nodes_per_axis`
    /// nodes spanning each bounding-box axis, `u = 0` everywhere.
    pub fn new(
        problem: &ProblemSpec,
        nodes_per_axis: usize,
        margin: f64,
    ) -> Result<Self, SolverError> {
        let n = problem.dim();
        if n == 0 || n > 2 {
            return Err(SolverError::DimensionUnsupported(n));
        }
        if nodes_per_axis < 5 {
            return Err(SolverError::Config(format!(
                "need at least 5 nodes per axis, got {nodes_per_axis}"
            )));
        }
        if !(margin > 0.0) {
            return Err(SolverError::Config(format!(
                "margin must be positive, got {margin}"
            )));
        }
        let beta = problem.pair().beta();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for v in beta.vertices() {
            for d in 0..n {
                let c = to_f64(&v.point[d]);
                lo[d] = lo[d].min(c);
                hi[d] = hi[d].max(c);
            }
        }
        let delta: Vec<f64> = (0..n)
            .map(|d| (hi[d] - lo[d]) / (nodes_per_axis - 1) as f64)
            .collect();
        let mut strides = vec![1usize; n];
        for d in (0..n.saturating_sub(1)).rev() {
            strides[d] = strides[d + 1] * nodes_per_axis;
        }
        let total = nodes_per_axis.pow(n as u32);
        let guillemin = GuilleminPotential::new(beta);

        let mut classes = vec![NodeClass::Exterior; total];
        let point = |flat: usize| -> Vec<f64> {
            (0..n)
                .map(|d| lo[d] + ((flat / strides[d]) % nodes_per_axis) as f64 * delta[d])
                .collect()
        };
        let tol = margin * (1.0 - 1e-12);
        let is_active: Vec<bool> = (0..total)
            .map(|flat| guillemin.min_ell(&point(flat)) >= tol)
            .collect();
        let mut interior = Vec::new();
        let mut ring = Vec::new();
        let mut active = Vec::new();
        for flat in 0..total {
            if !is_active[flat] {
                continue;
            }
            active.push(flat);
            let mut idx = vec![0usize; n];
            for d in 0..n {
                idx[d] = (flat / strides[d]) % nodes_per_axis;
            }
            let mut deep = true;
            let mut offsets = vec![-1i64; n];
            'neigh: loop {
                let mut nb = 0usize;
                for d in 0..n {
                    let j = idx[d] as i64 + offsets[d];
                    if j < 0 || j >= nodes_per_axis as i64 {
                        deep = false;
                        break;
                    }
                    nb += j as usize * strides[d];
                }
                if deep && !is_active[nb] {
                    deep = false;
                }
                if !deep {
                    break;
                }
                let mut d = n;
                loop {
                    if d == 0 {
                        break 'neigh;
                    }
                    d -= 1;
                    if offsets[d] < 1 {
                        offsets[d] += 1;
                        break;
                    }
                    offsets[d] = -1;
                }
            }
            if deep {
                classes[flat] = NodeClass::Interior;
                interior.push(flat);
            } else {
                classes[flat] = NodeClass::Ring;
                ring.push(flat);
            }
        }
        if interior.is_empty() {
            return Err(SolverError::Config(format!(
                "no interior nodes: {nodes_per_axis} nodes per axis at margin {margin}"
            )));
        }
        Ok(PotentialGrid {
            n,
            nodes_per_axis,
            lo,
            delta,
            strides,
            classes,
            u: vec![0.0; total],
            interior,
            ring,
            active,
            margin,
            guillemin,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes_per_axis
    }

    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.delta
    }

    pub fn min_spacing(&self) -> f64 {
        self.delta.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Volume of one grid cell, the quadrature weight per node.
    pub fn cell_volume(&self) -> f64 {
        self.delta.iter().product()
    }

    pub fn stride(&self, d: usize) -> usize {
        self.strides[d]
    }

    pub fn class(&self, flat: usize) -> NodeClass {
        self.classes[flat]
    }

    /// Flat indices of evolving nodes, fixed order.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    /// Flat indices of the frozen Dirichlet layer.
    pub fn ring(&self) -> &[usize] {
        &self.ring
    }

    /// Ring and interior together, fixed order.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn point(&self, flat: usize) -> Vec<f64> {
        (0..self.n)
            .map(|d| {
                self.lo[d]
                    + ((flat / self.strides[d]) % self.nodes_per_axis) as f64 * self.delta[d]
            })
            .collect()
    }

    pub fn multi_index(&self, flat: usize) -> Vec<usize> {
        (0..self.n)
            .map(|d| (flat / self.strides[d]) % self.nodes_per_axis)
            .collect()
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub(crate) fn guillemin(&self) -> &GuilleminPotential {
        &self.guillemin
    }

    /// Smallest facet coordinate of the node, the depth used to cut
    /// boundary-layer effects out of convergence measurements.
    pub fn depth(&self, flat: usize) -> f64 {
        self.guillemin.min_ell(&self.point(flat))
    }

    /// Full potential value `h_can + u` at an active node.
    pub fn h_value(&self, flat: usize) -> Result<f64, SolverError> {
        let jet = self.guillemin.eval(&self.point(flat))?;
        Ok(jet.value + self.u[flat])
    }

    /// Sets `u = h - h_can` on every active node from a target potential.
    pub fn load_potential(
        &mut self,
        mut h: impl FnMut(&[f64]) -> f64,
    ) -> Result<(), SolverError> {
        for k in 0..self.active.len() {
            let flat = self.active[k];
            let y = self.point(flat);
            let jet = self.guillemin.eval(&y)?;
            self.u[flat] = h(&y) - jet.value;
        }
        Ok(())
    }

    /// Overwrites `u` at interior nodes only, leaving the ring untouched.
    pub fn set_interior(&mut self, values: &[f64]) {
        assert_eq!(values.len(), self.interior.len());
        for (k, &flat) in self.interior.iter().enumerate() {
            self.u[flat] = values[k];
        }
    }

    /// Snapshot of `u` at interior nodes, aligned with [`Self::interior`].
    pub fn interior_values(&self) -> Vec<f64> {
        self.interior.iter().map(|&flat| self.u[flat]).collect()
    }

    /// `u += scale * values` on the interior, ring untouched.
    pub fn add_scaled_interior(&mut self, values: &[f64], scale: f64) {
        assert_eq!(values.len(), self.interior.len());
        for (k, &flat) in self.interior.iter().enumerate() {
            self.u[flat] += scale * values[k];
        }
    }

    /// `u = base + dt * values` on the interior, ring untouched.
    pub(crate) fn step_interior(&mut self, base: &[f64], values: &[f64], dt: f64) {
        assert_eq!(base.len(), self.interior.len());
        assert_eq!(values.len(), self.interior.len());
        for (k, &flat) in self.interior.iter().enumerate() {
            self.u[flat] = base[k] + dt * values[k];
        }
    }
}
