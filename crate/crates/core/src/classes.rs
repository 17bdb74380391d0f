//! Kähler class pairs on a shared fan and the rational constants they
//! determine: intersection numbers, the constant `c_X`, the `b`-`c`
//! relation, the centered hamiltonian, and continuity-path constants.
//!
//! Normalization is fixed once: ∫_F χ^p = p!·Vol_L(F), so every constant
//! is an exact rational polytope quantity.

use crate::polytope::{
    integrate_affine, lattice_volume, mixed_first_derivative, AffineFunction, DelzantPolytope,
    Face, Facet, GeometryError,
};
use crate::rat::Rat;
use num::bigint::BigInt;
use num::{One, Signed, Zero};

pub fn factorial(k: usize) -> Rat {
    let mut acc = BigInt::one();
    for i in 2..=k {
        acc *= BigInt::from(i as i64);
    }
    Rat::from_integer(acc)
}

/// Two ample torus-invariant classes on one fan, as a shared normal list
/// with two offset vectors. `beta` plays the reference role; all faces
/// and vertex scans below are against `P_β`.
#[derive(Debug, Clone)]
pub struct KahlerClassPair {
    beta: DelzantPolytope,
    alpha: DelzantPolytope,
    lambda_alpha: Vec<Rat>,
}

impl KahlerClassPair {
    pub fn new(
        dim: usize,
        normals: Vec<Vec<i64>>,
        lambda_alpha: Vec<Rat>,
        lambda_beta: Vec<Rat>,
    ) -> Result<Self, GeometryError> {
        let build = |offsets: &[Rat]| {
            DelzantPolytope::new(
                dim,
                normals
                    .iter()
                    .zip(offsets)
                    .map(|(u, o)| Facet::new(u.clone(), o.clone()))
                    .collect(),
            )
        };
        let beta = build(&lambda_beta)?;
        let alpha = build(&lambda_alpha)
            .map_err(|e| GeometryError::InvalidPolytope(format!("alpha class: {e}")))?;
        Self::from_polytopes(beta, alpha, lambda_alpha)
    }

    pub fn from_polytopes(
        beta: DelzantPolytope,
        alpha: DelzantPolytope,
        lambda_alpha: Vec<Rat>,
    ) -> Result<Self, GeometryError> {
        let combi = |p: &DelzantPolytope| {
            p.vertices()
                .iter()
                .map(|v| v.facets.clone())
                .collect::<std::collections::BTreeSet<_>>()
        };
        if combi(&beta) != combi(&alpha) {
            return Err(GeometryError::FanMismatch {
                s: "alpha".to_string(),
            });
        }
        Ok(KahlerClassPair {
            beta,
            alpha,
            lambda_alpha,
        })
    }

    pub fn dim(&self) -> usize {
        self.beta.dim()
    }

    pub fn beta(&self) -> &DelzantPolytope {
        &self.beta
    }

    pub fn alpha(&self) -> &DelzantPolytope {
        &self.alpha
    }

    pub fn lambda_alpha(&self) -> &[Rat] {
        &self.lambda_alpha
    }

    /// The face of `P_α` with the same defining facet set.
    pub fn alpha_face(&self, face: &Face) -> Result<&Face, GeometryError> {
        self.alpha.face_by_facets(&face.facets)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionConstants {
    /// n·(α·β^{n−1})/β^n.
    pub c_x: Rat,
    pub alpha_n: Rat,
    pub beta_n: Rat,
    pub mixed: Rat,
}

pub fn intersection_constants(
    pair: &KahlerClassPair,
) -> Result<IntersectionConstants, GeometryError> {
    let n = pair.dim();
    let full = pair.beta.full_face();
    let vol_beta = lattice_volume(&pair.beta, full)?;
    let vol_alpha = lattice_volume(&pair.alpha, pair.alpha.full_face())?;
    let v1 = mixed_first_derivative(&pair.beta, &pair.lambda_alpha, full)?;
    let c_x = &v1 / &vol_beta;
    let beta_n = factorial(n) * &vol_beta;
    let alpha_n = factorial(n) * vol_alpha;
    let mixed = factorial(n - 1) * &v1;
    debug_assert_eq!(
        c_x,
        Rat::from_integer(BigInt::from(n as i64)) * &mixed / &beta_n
    );
    Ok(IntersectionConstants {
        c_x,
        alpha_n,
        beta_n,
        mixed,
    })
}

/// b = (c·β^n − n·α·β^{n−1})/α^n; vanishes exactly at c = c_X.
pub fn b_from_c(pair: &KahlerClassPair, c: &Rat) -> Result<Rat, GeometryError> {
    let k = intersection_constants(pair)?;
    assert!(k.alpha_n.is_positive());
    let n = Rat::from_integer(BigInt::from(pair.dim() as i64));
    Ok((c * &k.beta_n - n * &k.mixed) / &k.alpha_n)
}

/// The hamiltonian of the torus direction `a_v`, centered so that its
/// integral over `P_β` vanishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HamiltonianSpec {
    pub a_v: Vec<Rat>,
    pub mu_bar: Rat,
}

impl HamiltonianSpec {
    /// A_c(y) = <a_v, y> − μ̄.
    pub fn centered(&self) -> AffineFunction {
        AffineFunction::new(self.a_v.clone(), -self.mu_bar.clone())
    }
}

pub fn hamiltonian_spec(
    a_v: Vec<Rat>,
    pair: &KahlerClassPair,
) -> Result<HamiltonianSpec, GeometryError> {
    let full = pair.beta.full_face();
    let raw = AffineFunction::new(a_v.clone(), Rat::zero());
    let mass = integrate_affine(&pair.beta, full, &raw)?;
    let vol = lattice_volume(&pair.beta, full)?;
    Ok(HamiltonianSpec {
        a_v,
        mu_bar: mass / vol,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaExtrema {
    pub min: Rat,
    pub max: Rat,
    /// max(|min|, |max|).
    pub c_theta: Rat,
    /// m_X = c_X + min.
    pub m_x: Rat,
}

/// Extrema of the centered hamiltonian over `P_β`; a linear objective is
/// extremized at vertices.
pub fn theta_extrema(
    ham: &HamiltonianSpec,
    pair: &KahlerClassPair,
) -> Result<ThetaExtrema, GeometryError> {
    let a_c = ham.centered();
    let mut values = pair.beta.vertices().iter().map(|v| a_c.eval(&v.point));
    let first = values.next().expect("valid polytope has vertices");
    let (mut lo, mut hi) = (first.clone(), first);
    for v in values {
        if v < lo {
            lo = v.clone();
        }
        if v > hi {
            hi = v;
        }
    }
    let c_theta = lo.abs().max(hi.abs());
    let c_x = intersection_constants(pair)?.c_x;
    Ok(ThetaExtrema {
        m_x: &c_x + &lo,
        min: lo,
        max: hi,
        c_theta,
    })
}

/// Mean of the centered hamiltonian over a positive-dimensional face of
/// `P_β`; zero on the full face by centering.
pub fn face_shift(
    ham: &HamiltonianSpec,
    pair: &KahlerClassPair,
    face: &Face,
) -> Result<Rat, GeometryError> {
    if face.dim == 0 {
        return Err(GeometryError::DegenerateFace);
    }
    let a_c = ham.centered();
    let mass = integrate_affine(&pair.beta, face, &a_c)?;
    let vol = lattice_volume(&pair.beta, face)?;
    Ok(mass / vol)
}

/// Constants of the continuity path restricted to a face of dimension p:
/// c_t = c_X(t+1) + I_Y and b_t = b_0 + c_X(β^p/α^p)t with
/// b_0 = ((c_X + I_Y)β^p − p·α·β^{p−1})/α^p.
pub fn continuity_parameters(
    pair: &KahlerClassPair,
    ham: &HamiltonianSpec,
    face: &Face,
    t: &Rat,
) -> Result<(Rat, Rat), GeometryError> {
    let p = face.dim;
    if p == 0 {
        return Err(GeometryError::DegenerateFace);
    }
    assert!(!t.is_negative());
    let c_x = intersection_constants(pair)?.c_x;
    let i_y = face_shift(ham, pair, face)?;
    let beta_p = factorial(p) * lattice_volume(&pair.beta, face)?;
    let alpha_face = pair.alpha_face(face)?;
    let alpha_p = factorial(p) * lattice_volume(&pair.alpha, alpha_face)?;
    assert!(beta_p.is_positive() && alpha_p.is_positive());
    let mixed_p =
        factorial(p - 1) * mixed_first_derivative(&pair.beta, &pair.lambda_alpha, face)?;
    let p_rat = Rat::from_integer(BigInt::from(p as i64));
    let b_0 = ((&c_x + &i_y) * &beta_p - p_rat * mixed_p) / &alpha_p;
    let c_t = &c_x * (t + Rat::one()) + &i_y;
    let b_t = b_0 + &c_x * (&beta_p / &alpha_p) * t;
    Ok((c_t, b_t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{rat, rat_int};

    pub fn p1_pair(l_alpha: Rat, l_beta: Rat) -> KahlerClassPair {
        KahlerClassPair::new(
            1,
            vec![vec![1], vec![-1]],
            vec![rat_int(0), l_alpha],
            vec![rat_int(0), l_beta],
        )
        .unwrap()
    }

    pub fn p2_pair(a: Rat, s: Rat) -> KahlerClassPair {
        KahlerClassPair::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![rat_int(0), rat_int(0), a],
            vec![rat_int(0), rat_int(0), s],
        )
        .unwrap()
    }

    #[test]
    fn c_x_examples() {
        let pair = p1_pair(rat_int(2), rat_int(1));
        let k = intersection_constants(&pair).unwrap();
        assert_eq!(k.c_x, rat_int(2));
        assert_eq!(k.beta_n, rat_int(1));
        assert_eq!(k.alpha_n, rat_int(2));

        let pair = p2_pair(rat_int(1), rat_int(1));
        let k = intersection_constants(&pair).unwrap();
        assert_eq!(k.c_x, rat_int(2));
        assert_eq!(k.beta_n, rat_int(1));
        assert_eq!(k.alpha_n, rat_int(1));
        assert_eq!(k.mixed, rat_int(1));

        // Equal classes force c_X = n.
        let pair = p2_pair(rat(7, 3), rat(7, 3));
        assert_eq!(intersection_constants(&pair).unwrap().c_x, rat_int(2));
    }

    #[test]
    fn c_x_scales_as_a_over_s() {
        for (a, s) in [(rat(3, 10), rat_int(1)), (rat_int(5), rat_int(2))] {
            let pair = p2_pair(a.clone(), s.clone());
            assert_eq!(
                intersection_constants(&pair).unwrap().c_x,
                rat_int(2) * a / s
            );
        }
    }

    #[test]
    fn b_examples() {
        let pair = p1_pair(rat_int(2), rat_int(1));
        assert_eq!(b_from_c(&pair, &rat_int(3)).unwrap(), rat(1, 2));
        let cx = intersection_constants(&pair).unwrap().c_x;
        assert_eq!(b_from_c(&pair, &cx).unwrap(), rat_int(0));

        let pair = p2_pair(rat_int(1), rat_int(1));
        assert_eq!(b_from_c(&pair, &rat_int(4)).unwrap(), rat_int(2));
    }

    #[test]
    fn hamiltonian_centering() {
        let pair = p2_pair(rat_int(1), rat_int(1));
        let ham = hamiltonian_spec(vec![rat_int(1), rat_int(0)], &pair).unwrap();
        assert_eq!(ham.mu_bar, rat(1, 3));
        let a_c = ham.centered();
        assert_eq!(a_c.eval(&[rat_int(0), rat_int(0)]), rat(-1, 3));
        assert_eq!(
            integrate_affine(pair.beta(), pair.beta().full_face(), &a_c).unwrap(),
            rat_int(0)
        );

        let pair = p1_pair(rat_int(1), rat_int(1));
        let ham = hamiltonian_spec(vec![rat_int(1)], &pair).unwrap();
        assert_eq!(ham.mu_bar, rat(1, 2));

        let zero = hamiltonian_spec(vec![rat_int(0), rat_int(0)], &p2_pair(rat_int(1), rat_int(1)))
            .unwrap();
        assert_eq!(zero.mu_bar, rat_int(0));
    }

    #[test]
    fn extrema_examples() {
        let pair = p2_pair(rat_int(1), rat_int(1));
        let ham = hamiltonian_spec(vec![rat_int(1), rat_int(0)], &pair).unwrap();
        let ext = theta_extrema(&ham, &pair).unwrap();
        assert_eq!(ext.min, rat(-1, 3));
        assert_eq!(ext.max, rat(2, 3));
        assert_eq!(ext.c_theta, rat(2, 3));
        assert_eq!(ext.m_x, rat(5, 3));

        let pair = p1_pair(rat_int(1), rat_int(1));
        let ham = hamiltonian_spec(vec![rat_int(1)], &pair).unwrap();
        let ext = theta_extrema(&ham, &pair).unwrap();
        assert_eq!(ext.min, rat(-1, 2));
        assert_eq!(ext.c_theta, rat(1, 2));

        let zero = hamiltonian_spec(vec![rat_int(0)], &pair).unwrap();
        let ext = theta_extrema(&zero, &pair).unwrap();
        assert_eq!(ext.c_theta, rat_int(0));
        assert_eq!(ext.m_x, intersection_constants(&pair).unwrap().c_x);
    }

    #[test]
    fn face_shift_examples() {
        let pair = p2_pair(rat_int(1), rat_int(1));
        let ham = hamiltonian_spec(vec![rat_int(1), rat_int(0)], &pair).unwrap();
        assert_eq!(
            face_shift(&ham, &pair, pair.beta().full_face()).unwrap(),
            rat_int(0)
        );
        let facet = |i: usize| {
            pair.beta()
                .face_by_facets(&[i].into_iter().collect())
                .unwrap()
                .clone()
        };
        assert_eq!(face_shift(&ham, &pair, &facet(0)).unwrap(), rat(-1, 3));
        assert_eq!(face_shift(&ham, &pair, &facet(1)).unwrap(), rat(1, 6));
        let vertex = pair
            .beta()
            .faces()
            .iter()
            .find(|f| f.dim == 0)
            .unwrap()
            .clone();
        assert!(matches!(
            face_shift(&ham, &pair, &vertex),
            Err(GeometryError::DegenerateFace)
        ));
    }

    #[test]
    fn continuity_path_examples() {
        let pair = p2_pair(rat_int(1), rat_int(1));
        let ham = hamiltonian_spec(vec![rat_int(1), rat_int(0)], &pair).unwrap();
        let full = pair.beta().full_face().clone();
        let (c0, b0) = continuity_parameters(&pair, &ham, &full, &rat_int(0)).unwrap();
        assert_eq!((c0, b0), (rat_int(2), rat_int(0)));
        let (c1, b1) = continuity_parameters(&pair, &ham, &full, &rat_int(1)).unwrap();
        assert_eq!((c1, b1), (rat_int(4), rat_int(2)));
    }

    #[test]
    fn path_slope_is_affine_in_t() {
        let pair = p2_pair(rat(5, 7), rat(2, 3));
        let ham = hamiltonian_spec(vec![rat(1, 2), rat(-1, 5)], &pair).unwrap();
        let full = pair.beta().full_face().clone();
        let k = intersection_constants(&pair).unwrap();
        let beta_p = &k.beta_n;
        let alpha_p = &k.alpha_n;
        let (_, b0) = continuity_parameters(&pair, &ham, &full, &rat_int(0)).unwrap();
        for t in [rat(1, 3), rat_int(2), rat(17, 5)] {
            let (ct, bt) = continuity_parameters(&pair, &ham, &full, &t).unwrap();
            assert_eq!(bt, &b0 + &k.c_x * (beta_p / alpha_p) * &t);
            assert_eq!(ct, &k.c_x * (&t + rat_int(1)) + rat_int(0));
        }
    }

    #[test]
    fn translation_invariance() {
        // Same simplex translated by the lattice vector (1, 2).
        let plain = p2_pair(rat(3, 4), rat_int(1));
        let moved = KahlerClassPair::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![rat_int(-1), rat_int(-2), rat_int(3) + rat(3, 4)],
            vec![rat_int(-1), rat_int(-2), rat_int(4)],
        )
        .unwrap();
        let a_v = vec![rat_int(1), rat(-1, 2)];
        let k0 = intersection_constants(&plain).unwrap();
        let k1 = intersection_constants(&moved).unwrap();
        assert_eq!(k0.c_x, k1.c_x);
        assert_eq!(k0.beta_n, k1.beta_n);
        let h0 = hamiltonian_spec(a_v.clone(), &plain).unwrap();
        let h1 = hamiltonian_spec(a_v.clone(), &moved).unwrap();
        // μ̄ shifts by <a_v, t>; centered values at shifted points agree.
        assert_eq!(&h1.mu_bar - &h0.mu_bar, rat_int(1) + rat(-1, 2) * rat_int(2));
        let e0 = theta_extrema(&h0, &plain).unwrap();
        let e1 = theta_extrema(&h1, &moved).unwrap();
        assert_eq!(e0, e1);
        for (f0, f1) in plain.beta().faces().iter().zip(moved.beta().faces()) {
            if f0.dim == 0 {
                continue;
            }
            assert_eq!(
                face_shift(&h0, &plain, f0).unwrap(),
                face_shift(&h1, &moved, f1).unwrap()
            );
        }
    }

    #[test]
    fn fan_mismatch_between_classes() {
        // Offsets for alpha kill the diagonal cut: combinatorics differ.
        let err = KahlerClassPair::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1], vec![-1, -1]],
            vec![rat_int(0), rat_int(0), rat_int(1), rat_int(1), rat_int(5)],
            vec![rat_int(0), rat_int(0), rat_int(2), rat_int(2), rat_int(3)],
        );
        assert!(err.is_err());
    }
}
