//! Solvability test: the class pair admits a solution iff
//! m_X = c_X + min θ > 0 and every proper face of dimension 1..n-1 has
//! strictly positive value p!·[c_X·Vol_L(F) + ∫_F A_c dσ_L − V₁(F)].
//! All signs are decided in exact rational arithmetic.

use crate::classes::{
    factorial, intersection_constants, theta_extrema, HamiltonianSpec, KahlerClassPair,
};
use crate::polytope::{
    integrate_affine, lattice_volume, mixed_first_derivative, GeometryError,
};
use crate::rat::{rat_string, Rat};
use num::Signed;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CriterionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("family member at knob {knob} is invalid: {source}")]
    InvalidFamilyMember { knob: String, source: GeometryError },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceValue {
    pub facets: BTreeSet<usize>,
    pub dim: usize,
    /// c_X · Vol_L(F_β).
    pub c_term: Rat,
    /// ∫_F A_c dσ_L.
    pub theta_term: Rat,
    /// V₁(F).
    pub mixed_term: Rat,
    /// p!·(c_term + theta_term − mixed_term); must be > 0.
    pub value: Rat,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailWitness {
    /// m_X = c_X + min θ is not positive.
    MinTheta,
    Face { facets: BTreeSet<usize> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionReport {
    pub m_x: Rat,
    pub faces: Vec<FaceValue>,
    pub pass: bool,
    /// First failing condition in report order, if any.
    pub witness: Option<FailWitness>,
}

impl CriterionReport {
    pub fn min_face_value(&self) -> Option<&Rat> {
        self.faces.iter().map(|f| &f.value).min()
    }
}

/// Value of one proper positive-dimensional face.
pub fn face_value(
    pair: &KahlerClassPair,
    ham: &HamiltonianSpec,
    face: &crate::polytope::Face,
) -> Result<FaceValue, CriterionError> {
    let n = pair.dim();
    let p = face.dim;
    if p == 0 || p == n {
        return Err(GeometryError::DegenerateFace.into());
    }
    let c_x = intersection_constants(pair)?.c_x;
    let beta = pair.beta();
    let c_term = &c_x * lattice_volume(beta, face)?;
    let theta_term = integrate_affine(beta, face, &ham.centered())?;
    let mixed_term = mixed_first_derivative(beta, pair.lambda_alpha(), face)?;
    let value = factorial(p) * (&c_term + &theta_term - &mixed_term);
    Ok(FaceValue {
        facets: face.facets.clone(),
        dim: p,
        c_term,
        theta_term,
        mixed_term,
        value,
    })
}

/// Full decision: m_X positivity plus every proper face value, in
/// deterministic order (dimension ascending, then facet set).
pub fn check(
    pair: &KahlerClassPair,
    ham: &HamiltonianSpec,
) -> Result<CriterionReport, CriterionError> {
    let n = pair.dim();
    let m_x = theta_extrema(ham, pair)?.m_x;
    let mut faces = Vec::new();
    for face in pair.beta().faces() {
        if face.dim >= 1 && face.dim <= n - 1 {
            faces.push(face_value(pair, ham, face)?);
        }
    }
    let mut witness = None;
    if !m_x.is_positive() {
        witness = Some(FailWitness::MinTheta);
    } else if let Some(bad) = faces.iter().find(|f| !f.value.is_positive()) {
        witness = Some(FailWitness::Face {
            facets: bad.facets.clone(),
        });
    }
    Ok(CriterionReport {
        m_x,
        faces,
        pass: witness.is_none(),
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScanResult {
    pub entries: Vec<(Rat, bool)>,
    /// First adjacent knob pair where the verdict flips.
    pub bracket: Option<(Rat, Rat)>,
}

/// Runs `check` across a one-parameter family and brackets the first
/// verdict flip.
pub fn threshold_scan<F>(family: F, knobs: &[Rat]) -> Result<ScanResult, CriterionError>
where
    F: Fn(&Rat) -> Result<(KahlerClassPair, HamiltonianSpec), GeometryError>,
{
    let mut entries = Vec::new();
    for knob in knobs {
        let (pair, ham) = family(knob).map_err(|source| CriterionError::InvalidFamilyMember {
            knob: rat_string(knob),
            source,
        })?;
        let report = check(&pair, &ham)?;
        entries.push((knob.clone(), report.pass));
    }
    let bracket = entries
        .windows(2)
        .find(|w| w[0].1 != w[1].1)
        .map(|w| (w[0].0.clone(), w[1].0.clone()));
    Ok(ScanResult { entries, bracket })
}
