//! Exact Delzant polytope geometry.
//!
//! Polytopes are kept in H-representation `{y : <normal,y> + offset >= 0}`
//! with primitive integer inward normals and rational offsets. Everything
//! geometric (vertices, faces, lattice volumes, affine integrals, offset
//! sums) is computed in exact rational arithmetic; n <= 3 so brute force
//! over facet subsets is complete and cheap.

use crate::lattice::{
    det_int, integer_kernel, null_space_rat, primitive_integer, rank_rat, solve_rat,
};
use crate::rat::{rat_string, Rat};
use num::bigint::BigInt;
use num::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Facet {
    /// Inward primitive normal in Z^n.
    pub normal: Vec<BigInt>,
    pub offset: Rat,
}

impl Facet {
    pub fn new(normal: Vec<i64>, offset: Rat) -> Self {
        Facet {
            normal: normal.into_iter().map(BigInt::from).collect(),
            offset,
        }
    }

    /// The defining affine form `<normal, y> + offset`.
    pub fn ell(&self, y: &[Rat]) -> Rat {
        let mut acc = self.offset.clone();
        for (u, yi) in self.normal.iter().zip(y) {
            acc += Rat::from_integer(u.clone()) * yi;
        }
        acc
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub point: Vec<Rat>,
    /// Indices of all facets active at the point.
    pub facets: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Face {
    /// Facet indices whose intersection with the polytope is this face.
    pub facets: BTreeSet<usize>,
    pub dim: usize,
    pub vertices: Vec<Vec<Rat>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineFunction {
    pub linear: Vec<Rat>,
    pub constant: Rat,
}

impl AffineFunction {
    pub fn new(linear: Vec<Rat>, constant: Rat) -> Self {
        AffineFunction { linear, constant }
    }

    pub fn constant(dim: usize, c: Rat) -> Self {
        AffineFunction {
            linear: vec![Rat::zero(); dim],
            constant: c,
        }
    }

    pub fn eval(&self, y: &[Rat]) -> Rat {
        let mut acc = self.constant.clone();
        for (a, yi) in self.linear.iter().zip(y) {
            acc += a * yi;
        }
        acc
    }

    pub fn eval_f64(&self, y: &[f64]) -> f64 {
        let mut acc = crate::rat::to_f64(&self.constant);
        for (a, yi) in self.linear.iter().zip(y) {
            acc += crate::rat::to_f64(a) * yi;
        }
        acc
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("dimension {0} is unsupported (exact range is 1..=3)")]
    DimensionUnsupported(usize),
    #[error("facet list is empty")]
    NoFacets,
    #[error("facet {facet}: normal length does not match dimension")]
    MalformedFacet { facet: usize },
    #[error("facet {facet}: zero normal")]
    ZeroNormal { facet: usize },
    #[error("facet {facet}: normal is not primitive")]
    NonPrimitiveNormal { facet: usize },
    #[error("facets {first} and {second} have equal normals")]
    DuplicateNormal { first: usize, second: usize },
    #[error("polytope is unbounded")]
    UnboundedPolytope,
    #[error("polytope is not full-dimensional")]
    NotFullDimensional,
    #[error("non-simple vertex at {point}: facets {facets:?}")]
    NonSimpleVertex { point: String, facets: Vec<usize> },
    #[error("non-unimodular vertex at {point}: facets {facets:?} have det {det}")]
    NonUnimodularVertex {
        point: String,
        facets: Vec<usize>,
        det: String,
    },
    #[error("facet {facet} does not support a facet of the polytope")]
    RedundantFacet { facet: usize },
    #[error("face of dimension 0 has no chart")]
    DegenerateFace,
    #[error("facet set {facets:?} is not a face")]
    NoSuchFace { facets: Vec<usize> },
    #[error("chart construction failed for face {facets:?}")]
    ChartFailure { facets: Vec<usize> },
    #[error("summed polytope changes combinatorial type at s = {s}")]
    FanMismatch { s: String },
    #[error("interpolated volume polynomial exceeds degree {p}")]
    DegreeOverflow { p: usize },
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
}

pub fn point_string(y: &[Rat]) -> String {
    let coords: Vec<String> = y.iter().map(rat_string).collect();
    format!("({})", coords.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexRecord {
    pub point: Vec<Rat>,
    pub facets: BTreeSet<usize>,
    /// Determinant of the active normals; absent at non-simple vertices.
    pub det: Option<BigInt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub dim: usize,
    pub vertices: Vec<VertexRecord>,
    pub violations: Vec<GeometryError>,
    pub valid: bool,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "dimension: {}", self.dim)?;
        writeln!(f, "vertices: {}", self.vertices.len())?;
        for v in &self.vertices {
            let facets: Vec<String> = v.facets.iter().map(|i| i.to_string()).collect();
            let det = v
                .det
                .as_ref()
                .map(|d| d.to_string())
                .unwrap_or_else(|| "-".to_string());
            writeln!(
                f,
                "  {}  facets {{{}}}  det {}",
                point_string(&v.point),
                facets.join(","),
                det
            )?;
        }
        for e in &self.violations {
            writeln!(f, "violation: {e}")?;
        }
        write!(f, "verdict: {}", if self.valid { "valid" } else { "invalid" })
    }
}

#[derive(Debug, Clone)]
pub struct DelzantPolytope {
    dim: usize,
    facets: Vec<Facet>,
    vertices: Vec<Vertex>,
    faces: Vec<Face>,
}

/// Checks the H-representation input contract shared by construction and
/// validation: supported dimension, primitive nonzero normals, no
/// duplicated normals.
fn check_input(dim: usize, facets: &[Facet]) -> Result<(), GeometryError> {
    if !(1..=3).contains(&dim) {
        return Err(GeometryError::DimensionUnsupported(dim));
    }
    if facets.is_empty() {
        return Err(GeometryError::NoFacets);
    }
    for (i, fct) in facets.iter().enumerate() {
        if fct.normal.len() != dim {
            return Err(GeometryError::MalformedFacet { facet: i });
        }
        if fct.normal.iter().all(|x| x.is_zero()) {
            return Err(GeometryError::ZeroNormal { facet: i });
        }
        if !crate::lattice::is_primitive(&fct.normal) {
            return Err(GeometryError::NonPrimitiveNormal { facet: i });
        }
    }
    for i in 0..facets.len() {
        for j in (i + 1)..facets.len() {
            if facets[i].normal == facets[j].normal {
                return Err(GeometryError::DuplicateNormal { first: i, second: j });
            }
        }
    }
    Ok(())
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

/// All recession-cone extreme-ray candidates violate `U d >= 0`; the cone
/// is `{0}` iff the normals have full rank and no (n-1)-subset kernel
/// direction is feasible.
fn is_bounded(dim: usize, facets: &[Facet]) -> bool {
    let normals: Vec<Vec<BigInt>> = facets.iter().map(|f| f.normal.clone()).collect();
    if !integer_kernel(&normals, dim).is_empty() {
        return false;
    }
    let feasible = |d: &[BigInt]| {
        facets.iter().all(|f| {
            let mut acc = BigInt::zero();
            for (u, di) in f.normal.iter().zip(d) {
                acc += u * di;
            }
            !acc.is_negative()
        })
    };
    for s in subsets(facets.len(), dim - 1) {
        let rows: Vec<Vec<BigInt>> = s.iter().map(|&i| normals[i].clone()).collect();
        let ker = integer_kernel(&rows, dim);
        if ker.len() != 1 {
            continue;
        }
        let d = &ker[0];
        let neg: Vec<BigInt> = d.iter().map(|x| -x.clone()).collect();
        if feasible(d) || feasible(&neg) {
            return false;
        }
    }
    true
}

fn enumerate_vertices(dim: usize, facets: &[Facet]) -> Vec<Vertex> {
    let mut points: BTreeMap<Vec<Rat>, ()> = BTreeMap::new();
    for s in subsets(facets.len(), dim) {
        let a: Vec<Vec<Rat>> = s
            .iter()
            .map(|&i| {
                facets[i]
                    .normal
                    .iter()
                    .map(|x| Rat::from_integer(x.clone()))
                    .collect()
            })
            .collect();
        let b: Vec<Rat> = s.iter().map(|&i| -facets[i].offset.clone()).collect();
        let Some(y) = solve_rat(&a, &b) else { continue };
        if facets.iter().all(|f| !f.ell(&y).is_negative()) {
            points.insert(y, ());
        }
    }
    points
        .into_keys()
        .map(|point| {
            let facets_at: BTreeSet<usize> = facets
                .iter()
                .enumerate()
                .filter(|(_, f)| f.ell(&point).is_zero())
                .map(|(i, _)| i)
                .collect();
            Vertex {
                point,
                facets: facets_at,
            }
        })
        .collect()
}

fn affine_rank(points: &[&Vec<Rat>]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = points[0];
    let rows: Vec<Vec<Rat>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base.iter()).map(|(a, b)| a - b).collect())
        .collect();
    rank_rat(&rows)
}

/// Full geometric analysis of an H-representation. Input-contract failures
/// are hard errors; geometric defects are collected in the report.
pub fn validate_delzant(dim: usize, facets: &[Facet]) -> Result<ValidationReport, GeometryError> {
    check_input(dim, facets)?;
    let vertices = enumerate_vertices(dim, facets);
    let mut records = Vec::new();
    for v in &vertices {
        let det = if v.facets.len() == dim {
            let rows: Vec<Vec<BigInt>> = v
                .facets
                .iter()
                .map(|&i| facets[i].normal.clone())
                .collect();
            Some(det_int(&rows))
        } else {
            None
        };
        records.push(VertexRecord {
            point: v.point.clone(),
            facets: v.facets.clone(),
            det,
        });
    }

    let mut violations = Vec::new();
    if !is_bounded(dim, facets) {
        violations.push(GeometryError::UnboundedPolytope);
    }
    let pts: Vec<&Vec<Rat>> = vertices.iter().map(|v| &v.point).collect();
    let full_dim = !vertices.is_empty() && affine_rank(&pts) == dim;
    if violations.is_empty() && !full_dim {
        violations.push(GeometryError::NotFullDimensional);
    }
    if violations.is_empty() {
        for (v, rec) in vertices.iter().zip(&records) {
            if v.facets.len() > dim {
                violations.push(GeometryError::NonSimpleVertex {
                    point: point_string(&v.point),
                    facets: v.facets.iter().copied().collect(),
                });
            } else if let Some(det) = &rec.det {
                if det.abs() != BigInt::one() {
                    violations.push(GeometryError::NonUnimodularVertex {
                        point: point_string(&v.point),
                        facets: v.facets.iter().copied().collect(),
                        det: det.to_string(),
                    });
                }
            }
        }
        for i in 0..facets.len() {
            let on_facet: Vec<&Vec<Rat>> = vertices
                .iter()
                .filter(|v| v.facets.contains(&i))
                .map(|v| &v.point)
                .collect();
            if on_facet.is_empty() || affine_rank(&on_facet) != dim - 1 {
                violations.push(GeometryError::RedundantFacet { facet: i });
            }
        }
    }

    let valid = violations.is_empty();
    Ok(ValidationReport {
        dim,
        vertices: records,
        violations,
        valid,
    })
}

impl DelzantPolytope {
    pub fn new(dim: usize, facets: Vec<Facet>) -> Result<Self, GeometryError> {
        let report = validate_delzant(dim, &facets)?;
        if let Some(v) = report.violations.into_iter().next() {
            return Err(v);
        }
        let vertices = enumerate_vertices(dim, &facets);
        let faces = build_faces(dim, facets.len(), &vertices);
        Ok(DelzantPolytope {
            dim,
            facets,
            vertices,
            faces,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn offsets(&self) -> Vec<Rat> {
        self.facets.iter().map(|f| f.offset.clone()).collect()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// All faces, each exactly once, sorted by dimension then facet set.
    /// The last entry is the whole polytope (empty facet set).
    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn full_face(&self) -> &Face {
        self.faces.last().expect("face list nonempty")
    }

    pub fn face_by_facets(&self, facets: &BTreeSet<usize>) -> Result<&Face, GeometryError> {
        self.faces
            .iter()
            .find(|f| &f.facets == facets)
            .ok_or_else(|| GeometryError::NoSuchFace {
                facets: facets.iter().copied().collect(),
            })
    }

    /// Vertex active-set family; equal families mean equal combinatorial type.
    fn combinatorics(&self) -> BTreeSet<BTreeSet<usize>> {
        self.vertices.iter().map(|v| v.facets.clone()).collect()
    }

    pub fn contains(&self, y: &[Rat]) -> bool {
        self.facets.iter().all(|f| !f.ell(y).is_negative())
    }
}

fn build_faces(dim: usize, nfacets: usize, vertices: &[Vertex]) -> Vec<Face> {
    let mut faces = Vec::new();
    for k in 0..=dim {
        for s in subsets(nfacets, k) {
            let set: BTreeSet<usize> = s.iter().copied().collect();
            let members: Vec<&Vertex> = vertices
                .iter()
                .filter(|v| set.is_subset(&v.facets))
                .collect();
            if members.is_empty() {
                continue;
            }
            let mut common = members[0].facets.clone();
            for v in &members[1..] {
                common = common.intersection(&v.facets).copied().collect();
            }
            if common != set {
                // This intersection is a smaller face; it is emitted for
                // its own (larger) defining facet set.
                continue;
            }
            let pts: Vec<&Vec<Rat>> = members.iter().map(|v| &v.point).collect();
            let fdim = affine_rank(&pts);
            debug_assert_eq!(fdim, dim - k, "simple polytope face dimension");
            faces.push(Face {
                facets: set,
                dim: fdim,
                vertices: members.iter().map(|v| v.point.clone()).collect(),
            });
        }
    }
    faces.sort_by(|a, b| {
        (a.dim, a.facets.iter().copied().collect::<Vec<_>>())
            .cmp(&(b.dim, b.facets.iter().copied().collect::<Vec<_>>()))
    });
    faces
}

pub fn enumerate_faces(polytope: &DelzantPolytope) -> Vec<Face> {
    polytope.faces().to_vec()
}

#[derive(Debug, Clone)]
pub struct FaceChart {
    pub base: Vec<Rat>,
    /// Columns span the face direction lattice span(F) ∩ Z^n.
    pub basis: Vec<Vec<BigInt>>,
    pivot_rows: Vec<usize>,
    inv: Vec<Vec<Rat>>,
}

impl FaceChart {
    /// Chart coordinates of an ambient point on the face plane.
    pub fn to_chart(&self, y: &[Rat]) -> Vec<Rat> {
        let p = self.basis.len();
        let rhs: Vec<Rat> = self
            .pivot_rows
            .iter()
            .map(|&r| &y[r] - &self.base[r])
            .collect();
        (0..p)
            .map(|i| {
                let mut acc = Rat::zero();
                for j in 0..p {
                    acc += &self.inv[i][j] * &rhs[j];
                }
                acc
            })
            .collect()
    }

    pub fn from_chart(&self, c: &[Rat]) -> Vec<Rat> {
        let n = self.base.len();
        (0..n)
            .map(|r| {
                let mut acc = self.base[r].clone();
                for (j, col) in self.basis.iter().enumerate() {
                    acc += Rat::from_integer(col[r].clone()) * &c[j];
                }
                acc
            })
            .collect()
    }
}

pub fn face_chart(polytope: &DelzantPolytope, face: &Face) -> Result<FaceChart, GeometryError> {
    let n = polytope.dim;
    let p = face.dim;
    if p == 0 {
        return Err(GeometryError::DegenerateFace);
    }
    let chart_fail = || GeometryError::ChartFailure {
        facets: face.facets.iter().copied().collect(),
    };
    let base = face.vertices[0].clone();
    let dirs: Vec<Vec<Rat>> = face.vertices[1..]
        .iter()
        .map(|v| v.iter().zip(&base).map(|(a, b)| a - b).collect())
        .collect();
    // Integer rows cutting out the face plane; their integer kernel is the
    // saturated direction lattice.
    let normal_rows: Vec<Vec<BigInt>> = null_space_rat(&dirs, n)
        .iter()
        .map(|v| primitive_integer(v))
        .collect();
    let basis = integer_kernel(&normal_rows, n);
    if basis.len() != p {
        return Err(chart_fail());
    }
    // Invert the basis on p independent coordinate rows.
    let rows_rat: Vec<Vec<Rat>> = (0..n)
        .map(|r| {
            basis
                .iter()
                .map(|col| Rat::from_integer(col[r].clone()))
                .collect()
        })
        .collect();
    let mut pivot_rows = Vec::new();
    let mut chosen: Vec<Vec<Rat>> = Vec::new();
    for r in 0..n {
        if pivot_rows.len() == p {
            break;
        }
        let mut trial = chosen.clone();
        trial.push(rows_rat[r].clone());
        if rank_rat(&trial) == trial.len() {
            chosen = trial;
            pivot_rows.push(r);
        }
    }
    if pivot_rows.len() != p {
        return Err(chart_fail());
    }
    let mut inv = Vec::new();
    for i in 0..p {
        let mut e = vec![Rat::zero(); p];
        e[i] = Rat::one();
        // Column i of the inverse solves chosen^T x = e_i; assemble row-wise.
        inv.push(e);
    }
    // Solve M c = rhs with M = chosen (p x p): precompute inverse columns.
    let mut inv_mat = vec![vec![Rat::zero(); p]; p];
    for j in 0..p {
        let mut e = vec![Rat::zero(); p];
        e[j] = Rat::one();
        let col = solve_rat(&chosen, &e).ok_or_else(chart_fail)?;
        for i in 0..p {
            inv_mat[i][j] = col[i].clone();
        }
    }
    let chart = FaceChart {
        base,
        basis,
        pivot_rows,
        inv: inv_mat,
    };
    for v in &face.vertices {
        if &chart.from_chart(&chart.to_chart(v)) != v {
            return Err(chart_fail());
        }
    }
    Ok(chart)
}

/// Cyclic order of 2D rational points around their centroid.
fn sort_cyclic(pts: &mut Vec<(Vec<Rat>, usize)>) {
    let m = Rat::from_integer(BigInt::from(pts.len() as i64));
    let cx: Rat = pts.iter().map(|(p, _)| p[0].clone()).sum::<Rat>() / &m;
    let cy: Rat = pts.iter().map(|(p, _)| p[1].clone()).sum::<Rat>() / &m;
    let half = |dx: &Rat, dy: &Rat| -> u8 {
        if dy.is_positive() || (dy.is_zero() && dx.is_positive()) {
            0
        } else {
            1
        }
    };
    pts.sort_by(|(a, _), (b, _)| {
        let (ax, ay) = (&a[0] - &cx, &a[1] - &cy);
        let (bx, by) = (&b[0] - &cx, &b[1] - &cy);
        let (ha, hb) = (half(&ax, &ay), half(&bx, &by));
        if ha != hb {
            return ha.cmp(&hb);
        }
        let cross = &ax * &by - &ay * &bx;
        if cross.is_positive() {
            std::cmp::Ordering::Less
        } else if cross.is_negative() {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    });
}

/// Triangulates a face into (ambient simplex vertices, lattice volume)
/// pairs. The centroid rule over these simplices integrates affine
/// functions exactly.
fn lattice_simplices(
    polytope: &DelzantPolytope,
    face: &Face,
) -> Result<Vec<(Vec<Vec<Rat>>, Rat)>, GeometryError> {
    match face.dim {
        0 => Ok(vec![(vec![face.vertices[0].clone()], Rat::one())]),
        1 => {
            let chart = face_chart(polytope, face)?;
            let c0 = chart.to_chart(&face.vertices[0])[0].clone();
            let c1 = chart.to_chart(&face.vertices[1])[0].clone();
            Ok(vec![(face.vertices.clone(), (&c1 - &c0).abs())])
        }
        2 => {
            let chart = face_chart(polytope, face)?;
            let mut pts: Vec<(Vec<Rat>, usize)> = face
                .vertices
                .iter()
                .enumerate()
                .map(|(i, v)| (chart.to_chart(v), i))
                .collect();
            sort_cyclic(&mut pts);
            let mut out = Vec::new();
            let (c0, i0) = &pts[0];
            for w in pts[1..].windows(2) {
                let (ca, ia) = &w[0];
                let (cb, ib) = &w[1];
                let cross = (&ca[0] - &c0[0]) * (&cb[1] - &c0[1])
                    - (&ca[1] - &c0[1]) * (&cb[0] - &c0[0]);
                let area = cross.abs() / Rat::from_integer(BigInt::from(2));
                if area.is_zero() {
                    continue;
                }
                out.push((
                    vec![
                        face.vertices[*i0].clone(),
                        face.vertices[*ia].clone(),
                        face.vertices[*ib].clone(),
                    ],
                    area,
                ));
            }
            Ok(out)
        }
        3 => {
            // Only the whole polytope has dimension 3: cone the boundary
            // 2-faces over a base vertex.
            let base = &face.vertices[0];
            let mut out = Vec::new();
            for g in polytope.faces().iter().filter(|g| g.dim == 2) {
                let chart = face_chart(polytope, g)?;
                let mut pts: Vec<(Vec<Rat>, usize)> = g
                    .vertices
                    .iter()
                    .enumerate()
                    .map(|(i, v)| (chart.to_chart(v), i))
                    .collect();
                sort_cyclic(&mut pts);
                let i0 = pts[0].1;
                for w in pts[1..].windows(2) {
                    let (ia, ib) = (w[0].1, w[1].1);
                    let rows: Vec<Vec<Rat>> = [i0, ia, ib]
                        .iter()
                        .map(|&i| {
                            g.vertices[i]
                                .iter()
                                .zip(base)
                                .map(|(a, b)| a - b)
                                .collect()
                        })
                        .collect();
                    let det = det_rat3(&rows);
                    if det.is_zero() {
                        continue;
                    }
                    out.push((
                        vec![
                            base.clone(),
                            g.vertices[i0].clone(),
                            g.vertices[ia].clone(),
                            g.vertices[ib].clone(),
                        ],
                        det.abs() / Rat::from_integer(BigInt::from(6)),
                    ));
                }
            }
            Ok(out)
        }
        _ => unreachable!("face dimension bounded by 3"),
    }
}

fn det_rat3(m: &[Vec<Rat>]) -> Rat {
    &m[0][0] * (&m[1][1] * &m[2][2] - &m[1][2] * &m[2][1])
        - &m[0][1] * (&m[1][0] * &m[2][2] - &m[1][2] * &m[2][0])
        + &m[0][2] * (&m[1][0] * &m[2][1] - &m[1][1] * &m[2][0])
}

/// Exact lattice-normalized p-volume of a face (1 for vertices).
pub fn lattice_volume(polytope: &DelzantPolytope, face: &Face) -> Result<Rat, GeometryError> {
    Ok(lattice_simplices(polytope, face)?
        .into_iter()
        .map(|(_, w)| w)
        .sum())
}

/// Exact ∫_F A dσ_L against the lattice-normalized face measure. Affine
/// integrands make the centroid rule exact on each simplex.
pub fn integrate_affine(
    polytope: &DelzantPolytope,
    face: &Face,
    a: &AffineFunction,
) -> Result<Rat, GeometryError> {
    let mut acc = Rat::zero();
    for (pts, w) in lattice_simplices(polytope, face)? {
        let k = Rat::from_integer(BigInt::from(pts.len() as i64));
        let centroid: Vec<Rat> = (0..polytope.dim)
            .map(|r| pts.iter().map(|p| p[r].clone()).sum::<Rat>() / &k)
            .collect();
        acc += w * a.eval(&centroid);
    }
    Ok(acc)
}

fn with_offsets(polytope: &DelzantPolytope, offsets: &[Rat]) -> Vec<Facet> {
    polytope
        .facets
        .iter()
        .zip(offsets)
        .map(|(f, o)| Facet {
            normal: f.normal.clone(),
            offset: o.clone(),
        })
        .collect()
}

/// Lattice volume of the face (matched by facet index set) of the polytope
/// with offsets `λ_β + s λ_α` on the fan of `beta`.
pub fn summed_face_volume(
    beta: &DelzantPolytope,
    lambda_alpha: &[Rat],
    face: &Face,
    s: &Rat,
) -> Result<Rat, GeometryError> {
    assert_eq!(lambda_alpha.len(), beta.facets.len());
    assert!(!s.is_negative(), "summed offsets need s >= 0");
    beta.face_by_facets(&face.facets)?;
    let offsets: Vec<Rat> = beta
        .facets
        .iter()
        .zip(lambda_alpha)
        .map(|(f, a)| &f.offset + s * a)
        .collect();
    let summed = DelzantPolytope::new(beta.dim, with_offsets(beta, &offsets))
        .map_err(|e| GeometryError::InvalidPolytope(e.to_string()))?;
    if summed.combinatorics() != beta.combinatorics() {
        return Err(GeometryError::FanMismatch {
            s: rat_string(s),
        });
    }
    let summed_face = summed.face_by_facets(&face.facets)?;
    lattice_volume(&summed, summed_face)
}

/// V₁ := d/ds Vol_L(F(λ_β + s λ_α)) at s = 0, by exact interpolation at
/// s = 0..p and symbolic differentiation; the value at s = p+1 must agree
/// with the interpolant or the degree bound is violated.
pub fn mixed_first_derivative(
    beta: &DelzantPolytope,
    lambda_alpha: &[Rat],
    face: &Face,
) -> Result<Rat, GeometryError> {
    let p = face.dim;
    assert!(p >= 1, "mixed derivative needs a face of dimension >= 1");
    let values: Vec<Rat> = (0..=p + 1)
        .map(|s| summed_face_volume(beta, lambda_alpha, face, &Rat::from_integer(BigInt::from(s))))
        .collect::<Result<_, _>>()?;
    // Newton forward differences on nodes 0..p.
    let mut diffs = values[..=p].to_vec();
    let mut table = vec![diffs.clone()];
    for _ in 0..p {
        diffs = diffs.windows(2).map(|w| &w[1] - &w[0]).collect();
        table.push(diffs.clone());
    }
    // Check degree: the interpolant at p+1 is Σ_j C(p+1, j) Δ^j V(0).
    let mut predicted = Rat::zero();
    let mut binom = Rat::one();
    for (j, row) in table.iter().enumerate() {
        predicted += &binom * &row[0];
        // C(p+1, j+1) = C(p+1, j) * (p+1-j)/(j+1)
        binom *= Rat::new(BigInt::from((p + 1 - j) as i64), BigInt::from((j + 1) as i64));
    }
    if predicted != values[p + 1] {
        return Err(GeometryError::DegreeOverflow { p });
    }
    // d/ds C(s,j) at 0 is (-1)^(j-1)/j for j >= 1.
    let mut deriv = Rat::zero();
    for (j, row) in table.iter().enumerate().skip(1) {
        let sign = if j % 2 == 1 { 1 } else { -1 };
        deriv += Rat::new(BigInt::from(sign), BigInt::from(j as i64)) * &row[0];
    }
    Ok(deriv)
}
