//! Parabolic dual-space solver for the twisted equation on toric targets.
//!
//! Everything runs on the moment polytope `P_β`.  The unknown is a convex
//! symplectic potential `h = h_can + u` on a uniform grid; the equation in
//! these coordinates reads
//!
//! ```text
//! sum_ij f_ij(grad h)  h_ij + b det(D^2 f)(grad h) det(D^2 h) = c + A_c(y)
//! ```
//!
//! with `f` the Legendre dual of the Guillemin potential of the source
//! polytope `P_α`.  The solver evolves `u` by the explicit flow
//! `du/dt = residual` (the descending gradient flow of the underlying
//! functional, transported to the dual side), keeps the Dirichlet ring
//! frozen, monitors convexity and energy monotonicity, and halves the step
//! on any energy increase.

mod grid;
mod legendre;
mod oracle;
mod potential;

pub use grid::{NodeClass, PotentialGrid};
pub use legendre::{legendre_eval, LegendreEvaluator, LegendreJet};
pub use oracle::{product_solution, solve_1d_transport, split_product, Product2D, Transport1D};
pub use potential::{guillemin_eval, ConvexPotential, GuilleminPotential, PotentialJet};

use legendre::OmegaDual;
use num::Signed;
use potential::{det_small, positive_definite, PotentialJet as Jet};
use thiserror::Error;

use crate::classes::{b_from_c, intersection_constants, HamiltonianSpec, KahlerClassPair};
use crate::polytope::{AffineFunction, GeometryError};
use crate::rat::{to_f64, Rat};

#[derive(Debug, Clone, Error)]
pub enum SolverError {
    #[error("point {0:?} is on or outside the polytope boundary")]
    BoundaryOrExterior(Vec<f64>),
    #[error("dual Newton iteration diverged at x = {0:?}")]
    NewtonDiverged(Vec<f64>),
    #[error("convexity lost at grid node {node:?}")]
    ConvexityLost { node: Vec<usize> },
    #[error("grids support dimensions 1 and 2, got {0}")]
    DimensionUnsupported(usize),
    #[error("transport infeasible: min of c + A_c is {0}, need > 0")]
    InfeasibleTransport(f64),
    #[error("transport endpoint mismatch: interval end maps to {got}, target end is {want}")]
    EndpointMismatch { got: String, want: String },
    #[error("problem does not split along the first axis")]
    NotSeparable,
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// A fully determined dual problem: class pair, hamiltonian direction and
/// the constants `(c, b)`.  Construction pins `b = (c β^n − n α·β^{n−1})/α^n`
/// exactly, so the two constants can never drift apart.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pair: KahlerClassPair,
    ham: HamiltonianSpec,
    c: Rat,
    b: Rat,
}

impl ProblemSpec {
    /// `c = None` picks the cohomological constant `c_X`, making `b = 0`.
    pub fn new(
        pair: KahlerClassPair,
        ham: HamiltonianSpec,
        c: Option<Rat>,
    ) -> Result<Self, GeometryError> {
        assert_eq!(ham.a_v.len(), pair.dim());
        let c = match c {
            Some(c) => c,
            None => intersection_constants(&pair)?.c_x,
        };
        let b = b_from_c(&pair, &c)?;
        Ok(ProblemSpec { pair, ham, c, b })
    }

    /// One-dimensional convenience constructor from interval endpoints.
    pub fn from_intervals(
        beta: (Rat, Rat),
        alpha: (Rat, Rat),
        a_v: Rat,
        c: Option<Rat>,
    ) -> Result<Self, GeometryError> {
        let pair = KahlerClassPair::new(
            1,
            vec![vec![1], vec![-1]],
            vec![-alpha.0, alpha.1],
            vec![-beta.0, beta.1],
        )?;
        let ham = crate::classes::hamiltonian_spec(vec![a_v], &pair)?;
        Self::new(pair, ham, c)
    }

    pub fn pair(&self) -> &KahlerClassPair {
        &self.pair
    }

    pub fn ham(&self) -> &HamiltonianSpec {
        &self.ham
    }

    pub fn c(&self) -> &Rat {
        &self.c
    }

    pub fn b(&self) -> &Rat {
        &self.b
    }

    pub fn c_f64(&self) -> f64 {
        to_f64(&self.c)
    }

    pub fn b_f64(&self) -> f64 {
        to_f64(&self.b)
    }

    pub fn dim(&self) -> usize {
        self.pair.dim()
    }

    /// Exact minimum of `c + A_c` over `P_β` (attained at a vertex); the flow
    /// requires this to be strictly positive.
    pub fn density_floor(&self) -> Rat {
        let a_c = self.ham.centered();
        self.pair
            .beta()
            .vertices()
            .iter()
            .map(|v| &self.c + a_c.eval(&v.point))
            .min()
            .expect("valid polytope has vertices")
    }
}

struct DualContext {
    n: usize,
    c: f64,
    b: f64,
    a_c: AffineFunction,
    omega: OmegaDual,
}

fn context(problem: &ProblemSpec) -> DualContext {
    DualContext {
        n: problem.dim(),
        c: problem.c_f64(),
        b: problem.b_f64(),
        a_c: problem.ham().centered(),
        omega: OmegaDual::for_polytope(problem.pair().alpha()),
    }
}

/// Static per-node data reused across flow steps: analytic Guillemin jets,
/// right-hand sides, and Newton warm starts for non-box sources.
struct PassCache {
    base: Vec<Jet>,
    rhs: Vec<f64>,
    warm: Vec<Vec<f64>>,
}

fn build_cache(ctx: &DualContext, grid: &PotentialGrid) -> Result<PassCache, SolverError> {
    let mut base = Vec::with_capacity(grid.interior().len());
    let mut rhs = Vec::with_capacity(grid.interior().len());
    for &flat in grid.interior() {
        let y = grid.point(flat);
        base.push(grid.guillemin().eval(&y)?);
        rhs.push(ctx.c + ctx.a_c.eval_f64(&y));
    }
    let warm = vec![Vec::new(); grid.interior().len()];
    Ok(PassCache { base, rhs, warm })
}

/// Central-difference jet of `h = h_can + u` at an interior node: the
/// analytic part carries the boundary singularity, the differences act on
/// the smooth correction only.
fn stencil_jet(grid: &PotentialGrid, flat: usize, base: &Jet) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = grid.dim();
    let u = grid.u();
    let mut grad = base.grad.clone();
    let mut hess = base.hess.clone();
    for d in 0..n {
        let sd = grid.stride(d);
        let dd = grid.spacing()[d];
        let (up, um, u0) = (u[flat + sd], u[flat - sd], u[flat]);
        grad[d] += (up - um) / (2.0 * dd);
        hess[d][d] += (up - 2.0 * u0 + um) / (dd * dd);
        for e in d + 1..n {
            let se = grid.stride(e);
            let de = grid.spacing()[e];
            let mixed = (u[flat + sd + se] - u[flat + sd - se] - u[flat - sd + se]
                + u[flat - sd - se])
                / (4.0 * dd * de);
            hess[d][e] += mixed;
            hess[e][d] += mixed;
        }
    }
    (grad, hess)
}

/// Residual of the dual equation over the interior, with the norms and the
/// explicit-step coefficient bound used by the time-step policy.
#[derive(Debug)]
pub struct ResidualField {
    /// One value per node, aligned with [`PotentialGrid::interior`].
    pub values: Vec<f64>,
    pub sup: f64,
    pub l2: f64,
    /// `n! ∫ residual^2 dy`, the decay quantity of the flow.
    pub energy: f64,
    /// Sup of the second-order stencil coefficient, `sum |f_ij|` plus the
    /// determinant term's sensitivity.
    pub step_bound: f64,
}

fn pass(
    ctx: &DualContext,
    grid: &PotentialGrid,
    cache: &mut PassCache,
) -> Result<ResidualField, SolverError> {
    let n = ctx.n;
    let mut values = Vec::with_capacity(grid.interior().len());
    let mut sup = 0.0f64;
    let mut sq = 0.0f64;
    let mut step_bound = 0.0f64;
    for (k, &flat) in grid.interior().iter().enumerate() {
        let (grad_h, hess_h) = stencil_jet(grid, flat, &cache.base[k]);
        if !positive_definite(&hess_h) {
            return Err(SolverError::ConvexityLost {
                node: grid.multi_index(flat),
            });
        }
        let warm = if cache.warm[k].is_empty() {
            None
        } else {
            Some(cache.warm[k].as_slice())
        };
        let jet = ctx.omega.jet(&grad_h, warm)?;
        if let OmegaDual::Newton(_) = ctx.omega {
            cache.warm[k] = jet.grad.clone();
        }
        let mut lhs = 0.0;
        let mut coeff = 0.0;
        for i in 0..n {
            for j in 0..n {
                lhs += jet.hess[i][j] * hess_h[i][j];
                coeff += jet.hess[i][j].abs();
            }
        }
        if ctx.b != 0.0 {
            let det_f = det_small(&jet.hess);
            let det_h = det_small(&hess_h);
            lhs += ctx.b * det_f * det_h;
            // d/dH of b det(Df) det(H) is b det(Df) adj(H).
            let adj_sum = match n {
                1 => 1.0,
                2 => {
                    hess_h[0][0].abs()
                        + hess_h[1][1].abs()
                        + hess_h[0][1].abs()
                        + hess_h[1][0].abs()
                }
                _ => unreachable!(),
            };
            coeff += (ctx.b * det_f).abs() * adj_sum;
        }
        let r = lhs - cache.rhs[k];
        sup = sup.max(r.abs());
        sq += r * r;
        step_bound = step_bound.max(coeff);
        values.push(r);
    }
    let cv = grid.cell_volume();
    let l2 = (sq * cv).sqrt();
    Ok(ResidualField {
        values,
        sup,
        l2,
        energy: n_factorial(n) * sq * cv,
        step_bound,
    })
}

fn n_factorial(n: usize) -> f64 {
    (1..=n).product::<usize>() as f64
}

/// Residual field of the current grid state.
pub fn residual_field(
    problem: &ProblemSpec,
    grid: &PotentialGrid,
) -> Result<ResidualField, SolverError> {
    let ctx = context(problem);
    let mut cache = build_cache(&ctx, grid)?;
    pass(&ctx, grid, &mut cache)
}

/// Sup of the residual over interior nodes at facet depth `>= depth`,
/// cutting the boundary layer out of order-of-convergence measurements.
pub fn residual_sup_within(
    problem: &ProblemSpec,
    grid: &PotentialGrid,
    depth: f64,
) -> Result<f64, SolverError> {
    let field = residual_field(problem, grid)?;
    let mut sup = 0.0f64;
    for (k, &flat) in grid.interior().iter().enumerate() {
        if grid.depth(flat) >= depth {
            sup = sup.max(field.values[k].abs());
        }
    }
    Ok(sup)
}

/// `n! ∫ residual^2 dy` of the current state.
pub fn flow_energy(problem: &ProblemSpec, grid: &PotentialGrid) -> Result<f64, SolverError> {
    Ok(residual_field(problem, grid)?.energy)
}

#[derive(Debug, Clone, Copy)]
pub struct StepStats {
    pub sup_residual: f64,
    pub energy: f64,
}

/// One unguarded explicit Euler step `u += dt * residual`; returns the
/// pre-step norms.
pub fn flow_step(
    problem: &ProblemSpec,
    grid: &mut PotentialGrid,
    dt: f64,
) -> Result<StepStats, SolverError> {
    let field = residual_field(problem, grid)?;
    grid.add_scaled_interior(&field.values, dt);
    Ok(StepStats {
        sup_residual: field.sup,
        energy: field.energy,
    })
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Stop once the interior sup residual drops to this level.
    pub tol: f64,
    pub max_steps: u64,
    /// Safety factor of the explicit time step `dt = γ Δ²/max(1, bound)`.
    pub gamma: f64,
    /// Record one trace row per this many accepted steps.
    pub trace_every: u64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-6,
            max_steps: 2_000_000,
            gamma: 0.2,
            trace_every: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Termination {
    Converged,
    MaxSteps,
    /// Twenty consecutive halvings could not restore energy decay.
    StalledStep,
    ConvexityLost {
        node: Vec<usize>,
    },
}

impl Termination {
    pub fn converged(&self) -> bool {
        matches!(self, Termination::Converged)
    }
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::Converged => write!(f, "converged"),
            Termination::MaxSteps => write!(f, "step limit reached"),
            Termination::StalledStep => write!(f, "time step collapsed"),
            Termination::ConvexityLost { node } => {
                write!(f, "convexity lost at node {node:?}")
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct TraceRecord {
    /// Accepted-step count at this record.
    pub step: u64,
    pub time: f64,
    pub dt: f64,
    pub sup_residual: f64,
    pub l2_residual: f64,
    pub energy: f64,
    /// Accumulated functional change `-∫ E dt`, non-increasing.
    pub delta_j: f64,
}

#[derive(Debug, Clone)]
pub struct FlowTrace {
    pub records: Vec<TraceRecord>,
    pub termination: Termination,
    pub accepted_steps: u64,
}

impl FlowTrace {
    pub fn final_record(&self) -> &TraceRecord {
        self.records.last().expect("trace always has records")
    }
}

/// Runs the explicit flow until the residual drops below `opts.tol`.
///
/// The ring stays frozen; accepted steps never increase the energy (a step
/// that would is rejected and the step size halved, up to twenty times).  On
/// loss of convexity the last accepted state is kept and reported via
/// [`Termination::ConvexityLost`]; step-limit exhaustion reports
/// [`Termination::MaxSteps`].  Hard errors only arise from an invalid start.
pub fn solve_dual_flow(
    problem: &ProblemSpec,
    grid: &mut PotentialGrid,
    opts: &SolveOptions,
) -> Result<FlowTrace, SolverError> {
    let floor = problem.density_floor();
    if !floor.is_positive() {
        return Err(SolverError::InfeasibleTransport(to_f64(&floor)));
    }
    let ctx = context(problem);
    let mut cache = build_cache(&ctx, grid)?;
    let mut field = pass(&ctx, grid, &mut cache)?;
    let d2 = grid.min_spacing() * grid.min_spacing();
    let policy = |bound: f64| opts.gamma * d2 / bound.max(1.0);
    let mut dt = policy(field.step_bound);
    let mut time = 0.0;
    let mut delta_j = 0.0;
    let mut halvings = 0u32;
    let mut accepted = 0u64;
    let mut records = vec![TraceRecord {
        step: 0,
        time,
        dt,
        sup_residual: field.sup,
        l2_residual: field.l2,
        energy: field.energy,
        delta_j,
    }];
    let mut termination = Termination::MaxSteps;
    let mut snapshot = grid.interior_values();
    for _ in 0..opts.max_steps {
        if field.sup <= opts.tol {
            termination = Termination::Converged;
            break;
        }
        snapshot.clear();
        snapshot.extend(grid.interior().iter().map(|&flat| grid.u()[flat]));
        grid.step_interior(&snapshot, &field.values, dt);
        match pass(&ctx, grid, &mut cache) {
            Err(SolverError::ConvexityLost { node }) => {
                grid.set_interior(&snapshot);
                termination = Termination::ConvexityLost { node };
                break;
            }
            Err(e) => return Err(e),
            Ok(next) => {
                if next.energy > field.energy * (1.0 + 1e-12) {
                    grid.set_interior(&snapshot);
                    halvings += 1;
                    dt *= 0.5;
                    if halvings > 20 {
                        termination = Termination::StalledStep;
                        break;
                    }
                } else {
                    accepted += 1;
                    time += dt;
                    delta_j -= 0.5 * (field.energy + next.energy) * dt;
                    field = next;
                    dt = dt.min(policy(field.step_bound));
                    if accepted % opts.trace_every == 0 {
                        records.push(TraceRecord {
                            step: accepted,
                            time,
                            dt,
                            sup_residual: field.sup,
                            l2_residual: field.l2,
                            energy: field.energy,
                            delta_j,
                        });
                    }
                }
            }
        }
    }
    if records.last().map(|r| r.step) != Some(accepted) {
        records.push(TraceRecord {
            step: accepted,
            time,
            dt,
            sup_residual: field.sup,
            l2_residual: field.l2,
            energy: field.energy,
            delta_j,
        });
    }
    Ok(FlowTrace {
        records,
        termination,
        accepted_steps: accepted,
    })
}

/// Total functional change accumulated along a flow, `J(end) - J(start)`.
pub fn functional_change(trace: &FlowTrace) -> f64 {
    trace.final_record().delta_j
}

fn discrete_dual(pts: &[Vec<f64>], vals: &[f64], x: &[f64]) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for (p, v) in pts.iter().zip(vals) {
        let mut dot = -v;
        for (a, b) in x.iter().zip(p) {
            dot += a * b;
        }
        best = best.max(dot);
    }
    best
}

/// Relative functional `I = n! ∫ [φ(grad ĥ) - φ(grad h)] dy` between two
/// states of the same grid geometry, with `φ = g - ĝ` recovered from the
/// discrete Legendre transforms of the two potentials.  Nonnegative, and
/// exactly zero when the states coincide.
pub fn i_functional(
    problem: &ProblemSpec,
    grid: &PotentialGrid,
    grid_hat: &PotentialGrid,
) -> Result<f64, SolverError> {
    if grid.dim() != grid_hat.dim()
        || grid.nodes_per_axis() != grid_hat.nodes_per_axis()
        || grid.spacing() != grid_hat.spacing()
        || grid.interior() != grid_hat.interior()
    {
        return Err(SolverError::Config(
            "states live on different grids".to_string(),
        ));
    }
    let ctx = context(problem);
    let pts: Vec<Vec<f64>> = grid.active().iter().map(|&flat| grid.point(flat)).collect();
    let mut hv = Vec::with_capacity(pts.len());
    let mut hhatv = Vec::with_capacity(pts.len());
    for &flat in grid.active() {
        hv.push(grid.h_value(flat)?);
        hhatv.push(grid_hat.h_value(flat)?);
    }
    let cache = build_cache(&ctx, grid)?;
    let mut acc = 0.0;
    let mut mag = 0.0f64;
    for (k, &flat) in grid.interior().iter().enumerate() {
        for (state, sign) in [(grid_hat, 1.0), (grid, -1.0)] {
            let (grad, hess) = stencil_jet(state, flat, &cache.base[k]);
            if !positive_definite(&hess) {
                return Err(SolverError::ConvexityLost {
                    node: grid.multi_index(flat),
                });
            }
            let phi = discrete_dual(&pts, &hv, &grad) - discrete_dual(&pts, &hhatv, &grad);
            acc += sign * phi;
            mag += phi.abs();
        }
    }
    let value = n_factorial(grid.dim()) * acc * grid.cell_volume();
    let scale = n_factorial(grid.dim()) * mag * grid.cell_volume();
    assert!(
        value >= -1e-9 * (1.0 + scale),
        "relative functional must be nonnegative, got {value}"
    );
    Ok(value)
}
