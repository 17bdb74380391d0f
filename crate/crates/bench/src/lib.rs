//! Shared fixtures for the kernel benchmarks: small exact-geometry
//! instances sized so one measurement iteration stays in microseconds to
//! low milliseconds.

use jtoric::{
    hamiltonian_spec, rat, rat_int, DelzantPolytope, Facet, HamiltonianSpec, KahlerClassPair,
    ProblemSpec, Rat,
};

fn facets(normals: &[&[i64]], offsets: &[Rat]) -> Vec<Facet> {
    normals
        .iter()
        .zip(offsets)
        .map(|(u, o)| Facet::new(u.to_vec(), o.clone()))
        .collect()
}

/// Unit 3-cube with one rational offset to keep arithmetic honest.
pub fn cube_polytope() -> DelzantPolytope {
    let normals: &[&[i64]] = &[
        &[1, 0, 0],
        &[-1, 0, 0],
        &[0, 1, 0],
        &[0, -1, 0],
        &[0, 0, 1],
        &[0, 0, -1],
    ];
    let offsets = [
        rat_int(0),
        rat_int(1),
        rat_int(0),
        rat(3, 2),
        rat_int(0),
        rat_int(1),
    ];
    DelzantPolytope::new(3, facets(normals, &offsets)).expect("cube is Delzant")
}

/// Cube class pair with distinct alpha offsets and a first-axis hamiltonian.
pub fn cube_problem() -> (KahlerClassPair, HamiltonianSpec) {
    let normals = vec![
        vec![1, 0, 0],
        vec![-1, 0, 0],
        vec![0, 1, 0],
        vec![0, -1, 0],
        vec![0, 0, 1],
        vec![0, 0, -1],
    ];
    let beta = vec![
        rat_int(0),
        rat_int(1),
        rat_int(0),
        rat(3, 2),
        rat_int(0),
        rat_int(1),
    ];
    let alpha = vec![
        rat_int(0),
        rat_int(2),
        rat_int(0),
        rat_int(1),
        rat_int(0),
        rat(1, 2),
    ];
    let pair = KahlerClassPair::new(3, normals, alpha, beta).expect("valid pair");
    let ham = hamiltonian_spec(vec![rat_int(1), rat_int(0), rat_int(0)], &pair).expect("ham");
    (pair, ham)
}

/// The square product problem used by the two-dimensional flow benchmark.
pub fn product_spec() -> ProblemSpec {
    let pair = KahlerClassPair::new(
        2,
        vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
        vec![rat_int(0), rat_int(2), rat_int(0), rat_int(1)],
        vec![rat_int(0), rat_int(1), rat_int(0), rat_int(1)],
    )
    .expect("valid pair");
    let ham = hamiltonian_spec(vec![rat_int(1), rat_int(0)], &pair).expect("ham");
    ProblemSpec::new(pair, ham, None).expect("spec")
}

/// Box polytope whose Guillemin potential drives the Newton Legendre path.
pub fn square_polytope() -> DelzantPolytope {
    let normals: &[&[i64]] = &[&[1, 0], &[-1, 0], &[0, 1], &[0, -1]];
    let offsets = [rat_int(0), rat_int(1), rat_int(0), rat(3, 2)];
    DelzantPolytope::new(2, facets(normals, &offsets)).expect("square is Delzant")
}
