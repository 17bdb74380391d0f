//! Toric geometry, positivity checks and a moment-polytope flow solver
//! for generalized J-type equations.
//!
//! The crate is organized bottom-up:
//! - [`rat`], [`lattice`]: exact rational scalars and integer linear algebra;
//! - [`polytope`]: Delzant polytopes, faces, charts, lattice volumes;
//! - [`classes`]: cohomological constants and hamiltonian data;
//! - [`criterion`]: the positivity test over faces;
//! - [`eigenops`]: pointwise eigenvalue functionals and curvature bounds;
//! - [`regmax`]: regularized maxima;
//! - [`solver`]: the symplectic-potential flow and its diagnostics;
//! - [`lab`]: randomized searches for counterexamples to the inequalities.

pub mod classes;
pub mod criterion;
pub mod eigenops;
pub mod lab;
pub mod lattice;
pub mod polytope;
pub mod rat;
pub mod regmax;
pub mod solver;

pub use classes::{
    b_from_c, continuity_parameters, face_shift, hamiltonian_spec, intersection_constants,
    theta_extrema, HamiltonianSpec, IntersectionConstants, KahlerClassPair, ThetaExtrema,
};
pub use criterion::{
    check, face_value, threshold_scan, CriterionError, CriterionReport, FaceValue, FailWitness,
    ScanResult,
};
pub use eigenops::{
    change_of_omega_gap, eps_thresholds, f_b, f_to_p_check, grad_f_lambda, hess_f_lambda,
    path_guard, strong_convexity_form, EpsThresholds, FToPReport, MetricPair, OmegaGapReport,
    OpsError, PathGuardReport, Spectrum,
};
pub use lab::{
    convexity_suite, legendre_suite, regmax_suite, threshold_suite, Counterexample, SuiteReport,
};
pub use polytope::{
    enumerate_faces, face_chart, integrate_affine, lattice_volume, mixed_first_derivative,
    summed_face_volume, validate_delzant, AffineFunction, DelzantPolytope, Face, FaceChart, Facet,
    GeometryError, ValidationReport, Vertex, VertexRecord,
};
pub use rat::{decimal_string, parse_rat, rat, rat_int, rat_string, to_f64, Rat};
pub use regmax::{reg_max, reg_max_grad, RegMaxError, RegMaxKernel};
pub use solver::{
    flow_energy, flow_step, functional_change, guillemin_eval, i_functional, legendre_eval,
    product_solution, residual_field, residual_sup_within, solve_1d_transport, solve_dual_flow,
    split_product, ConvexPotential, FlowTrace, GuilleminPotential, LegendreEvaluator,
    LegendreJet, NodeClass, PotentialGrid, PotentialJet, ProblemSpec, Product2D, ResidualField,
    SolveOptions, SolverError, StepStats, Termination, TraceRecord, Transport1D,
};
