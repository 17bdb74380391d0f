//! Pointwise eigenvalue functionals of a metric pair (g, h):
//! f_b(λ) = Σ 1/λ_i + b/(λ_1⋯λ_n) on the eigenvalues of g^{-1}h, its
//! exact first and second derivatives as a spectral function, the
//! ε-thresholds, the path guard, and curvature-gap bounds.
//!
//! All matrix work is double precision on the symmetrized form
//! L^{-1} h L^{-T} (L the Cholesky factor of g), which keeps spectra real.
//! Real symmetric directions lose no generality against Hermitian ones:
//! every form below depends only on diagonals and |B_ij|².

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OpsError {
    #[error("spectrum entry {0} is not positive")]
    NonPositiveEigenvalue(f64),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is not symmetric")]
    NotHermitian,
    #[error("matrix is not diagonal")]
    NotDiagonal,
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("sandwich bounds violated: relative eigenvalue {0}")]
    SandwichViolated(f64),
}

/// Positive eigenvalue tuple of g^{-1}h, up to ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum(Vec<f64>);

impl Spectrum {
    pub fn new(lambda: Vec<f64>) -> Result<Self, OpsError> {
        for &x in &lambda {
            if !(x > 0.0) || !x.is_finite() {
                return Err(OpsError::NonPositiveEigenvalue(x));
            }
        }
        Ok(Spectrum(lambda))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Membership in Γ_K = {λ > 0 : f₀(λ) < K}.
    pub fn in_cap(&self, k: f64) -> bool {
        f_b(self, 0.0) < k
    }
}

/// f_b(λ) = Σ 1/λ_i + b/Πλ_i; symmetric in the entries.
pub fn f_b(spectrum: &Spectrum, b: f64) -> f64 {
    let mut sum = 0.0;
    let mut prod = 1.0;
    for &x in spectrum.values() {
        sum += 1.0 / x;
        prod *= x;
    }
    sum + b / prod
}

/// ∂_i f_b = −1/λ_i² − b/(Πλ · λ_i).
pub fn grad_f_lambda(spectrum: &Spectrum, b: f64) -> Vec<f64> {
    let prod: f64 = spectrum.values().iter().product();
    spectrum
        .values()
        .iter()
        .map(|&x| -1.0 / (x * x) - b / (prod * x))
        .collect()
}

/// ∂_i∂_j f_b: 2/λ_i³ + 2b/(Πλ·λ_i²) on the diagonal, b/(Πλ·λ_iλ_j) off it.
pub fn hess_f_lambda(spectrum: &Spectrum, b: f64) -> DMatrix<f64> {
    let l = spectrum.values();
    let n = l.len();
    let prod: f64 = l.iter().product();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 / (l[i] * l[i] * l[i]) + 2.0 * b / (prod * l[i] * l[i])
        } else {
            b / (prod * l[i] * l[j])
        }
    })
}

/// Divided difference (∂_i f − ∂_j f)/(λ_i − λ_j) in closed form
/// (λ_i+λ_j)/(λ_i²λ_j²) + b/(Πλ·λ_iλ_j); smooth through λ_i = λ_j, so no
/// gap cutoff is needed.
fn dd_coeff(l: &[f64], prod: f64, i: usize, j: usize, b: f64) -> f64 {
    (l[i] + l[j]) / (l[i] * l[i] * l[j] * l[j]) + b / (prod * l[i] * l[j])
}

fn require_symmetric(m: &DMatrix<f64>) -> Result<(), OpsError> {
    let scale = 1.0 + m.amax();
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            if (m[(i, j)] - m[(j, i)]).abs() > 1e-10 * scale {
                return Err(OpsError::NotHermitian);
            }
        }
    }
    Ok(())
}

/// Symmetric positive-definite pair (g, h) with the eigendecomposition of
/// L^{-1} h L^{-T} cached (ascending eigenvalues).
#[derive(Debug, Clone)]
pub struct MetricPair {
    l: DMatrix<f64>,
    lambda: Vec<f64>,
    /// Orthonormal eigenvectors of L^{-1}hL^{-T}, columns matching `lambda`.
    u: DMatrix<f64>,
}

impl MetricPair {
    pub fn new(g: DMatrix<f64>, h: DMatrix<f64>) -> Result<Self, OpsError> {
        assert_eq!(g.nrows(), g.ncols());
        assert_eq!(g.shape(), h.shape());
        require_symmetric(&g)?;
        require_symmetric(&h)?;
        let chol = g.clone().cholesky().ok_or(OpsError::NotPositiveDefinite)?;
        let l = chol.l();
        let x = l
            .solve_lower_triangular(&h)
            .ok_or(OpsError::NotPositiveDefinite)?;
        let m = l
            .solve_lower_triangular(&x.transpose())
            .ok_or(OpsError::NotPositiveDefinite)?;
        let m = (&m + m.transpose()) * 0.5;
        let eig = SymmetricEigen::new(m);
        let n = g.nrows();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let lambda: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        if lambda[0] <= 0.0 {
            return Err(OpsError::NotPositiveDefinite);
        }
        let u = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        Ok(MetricPair { l, lambda, u })
    }

    pub fn dim(&self) -> usize {
        self.lambda.len()
    }

    /// Eigenvalues of g^{-1}h, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.lambda
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum(self.lambda.clone())
    }

    pub fn f_value(&self, b: f64) -> f64 {
        f_b(&self.spectrum(), b)
    }

    /// Q = F₀ = Σ 1/λ_i = tr(h^{-1}g).
    pub fn q(&self) -> f64 {
        self.f_value(0.0)
    }

    /// P = max_k Σ_{i≠k} 1/λ_i = Q − 1/λ_max.
    pub fn p(&self) -> f64 {
        self.q() - 1.0 / self.lambda[self.lambda.len() - 1]
    }

    /// W = L^{-T}U, so that C = Wᵀ B W is the direction in the eigenbasis.
    fn whitened(&self) -> DMatrix<f64> {
        self.l
            .transpose()
            .solve_upper_triangular(&self.u)
            .expect("cholesky factor invertible")
    }

    /// Gradient of h ↦ F_b(g, h) under the Frobenius pairing:
    /// d/dt F(h + tB) = tr(gradient · B).
    pub fn gradient(&self, b: f64) -> DMatrix<f64> {
        let w = self.whitened();
        let d = grad_f_lambda(&self.spectrum(), b);
        let n = self.dim();
        let scaled = DMatrix::from_fn(n, n, |r, c| w[(r, c)] * d[c]);
        scaled * w.transpose()
    }

    /// Second derivative d²/dt² F(h + tB) at t = 0: divided-difference
    /// off-diagonal terms plus the λ-Hessian on the diagonal of C.
    pub fn hessian_form(&self, bdir: &DMatrix<f64>, b: f64) -> Result<f64, OpsError> {
        require_symmetric(bdir)?;
        let w = self.whitened();
        let c = w.transpose() * bdir * &w;
        let n = self.dim();
        let l = &self.lambda;
        let prod: f64 = l.iter().product();
        let hess = hess_f_lambda(&self.spectrum(), b);
        let mut value = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    value += dd_coeff(l, prod, i, j, b) * c[(i, j)] * c[(i, j)];
                }
                value += hess[(i, j)] * c[(i, i)] * c[(j, j)];
            }
        }
        Ok(value)
    }
}

/// Quadratic form of the strong-convexity bound at a diagonal base point:
/// Σ B_rs B_qp ∂_pq∂_rs F + Σ_{i,j} |B_ij|² ∂_ii F/λ_j; nonnegative for
/// parameter b ≥ 0.
pub fn strong_convexity_form(
    a: &DMatrix<f64>,
    bdir: &DMatrix<f64>,
    b: f64,
) -> Result<f64, OpsError> {
    let n = a.nrows();
    assert_eq!(a.shape(), bdir.shape());
    let scale = 1.0 + a.amax();
    for i in 0..n {
        for j in 0..n {
            if i != j && a[(i, j)].abs() > 1e-12 * scale {
                return Err(OpsError::NotDiagonal);
            }
        }
    }
    require_symmetric(bdir)?;
    let lambda: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    let spectrum = Spectrum::new(lambda.clone())?;
    let prod: f64 = lambda.iter().product();
    let grad = grad_f_lambda(&spectrum, b);
    let hess = hess_f_lambda(&spectrum, b);
    let mut value = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                value += dd_coeff(&lambda, prod, i, j, b) * bdir[(i, j)] * bdir[(i, j)];
            }
            value += hess[(i, j)] * bdir[(i, i)] * bdir[(j, j)];
            value += bdir[(i, j)] * bdir[(i, j)] * grad[i] / lambda[j];
        }
    }
    Ok(value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpsThresholds {
    pub eps1: f64,
    pub eps3: f64,
    pub eps4: f64,
    pub k: f64,
    pub n: usize,
    pub c_theta: f64,
}

/// ε₁ = 2K^{1−n}/(n+1), ε₃ = n^n·C_θ/(2(K+3C_θ)^n), ε₄ = K^{1−n}.
pub fn eps_thresholds(k: f64, n: usize, c_theta: f64) -> EpsThresholds {
    assert!(k > 0.0 && n >= 1 && c_theta >= 0.0);
    let k_pow = k.powi(1 - n as i32);
    EpsThresholds {
        eps1: 2.0 * k_pow / (n as f64 + 1.0),
        eps3: (n as f64).powi(n as i32) * c_theta / (2.0 * (k + 3.0 * c_theta).powi(n as i32)),
        eps4: k_pow,
        k,
        n,
        c_theta,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathGuardReport {
    pub max_f0: f64,
    /// K + 3C_θ.
    pub limit: f64,
    pub holds: bool,
}

/// Checks the path estimate: if F₀(A₀) < K and F_{−ε}(A_t) < K + 2C_θ
/// along the path with ε < ε₃, then F₀ stays below K + 3C_θ.
pub fn path_guard(
    path: &[Spectrum],
    k: f64,
    c_theta: f64,
    eps: f64,
) -> Result<PathGuardReport, OpsError> {
    if path.is_empty() {
        return Err(OpsError::HypothesisViolated("empty path".to_string()));
    }
    let n = path[0].len();
    let eps3 = eps_thresholds(k, n, c_theta).eps3;
    if !(0.0..eps3).contains(&eps) {
        return Err(OpsError::HypothesisViolated(format!(
            "eps {eps} is not in [0, eps3 = {eps3})"
        )));
    }
    if f_b(&path[0], 0.0) >= k {
        return Err(OpsError::HypothesisViolated(format!(
            "F0 at the start is {} >= K = {k}",
            f_b(&path[0], 0.0)
        )));
    }
    for (t, a) in path.iter().enumerate() {
        let fe = f_b(a, -eps);
        if fe >= k + 2.0 * c_theta {
            return Err(OpsError::HypothesisViolated(format!(
                "F_(-eps) at sample {t} is {fe} >= K + 2C_theta = {}",
                k + 2.0 * c_theta
            )));
        }
    }
    let max_f0 = path
        .iter()
        .map(|a| f_b(a, 0.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let limit = k + 3.0 * c_theta;
    Ok(PathGuardReport {
        max_f0,
        limit,
        holds: max_f0 < limit,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OmegaGapReport {
    pub gap: f64,
    pub bound: f64,
    /// Internal cap K = max(Q_{g₁}(h), Q_{g₂}(h)).
    pub cap: f64,
    pub holds: bool,
}

/// Gap |F_{g₁,−ε}(h) − F_{g₂,−ε}(h)| for (1−σ)g₁ ≤ g₂ ≤ (1+σ)g₁, against
/// the bound (nK + K^n(2^n−1))σ with K = max of the two traces.
pub fn change_of_omega_gap(
    g1: &DMatrix<f64>,
    g2: &DMatrix<f64>,
    h: &DMatrix<f64>,
    eps: f64,
    sigma: f64,
) -> Result<OmegaGapReport, OpsError> {
    if !(0.0..1.0).contains(&sigma) {
        return Err(OpsError::HypothesisViolated(format!(
            "sigma {sigma} is not in [0, 1)"
        )));
    }
    if !(0.0..=1.0).contains(&eps) {
        return Err(OpsError::HypothesisViolated(format!(
            "eps {eps} is not in [0, 1]"
        )));
    }
    let rel = MetricPair::new(g1.clone(), g2.clone())?;
    for &mu in rel.eigenvalues() {
        if mu < 1.0 - sigma - 1e-10 || mu > 1.0 + sigma + 1e-10 {
            return Err(OpsError::SandwichViolated(mu));
        }
    }
    let pair1 = MetricPair::new(g1.clone(), h.clone())?;
    let pair2 = MetricPair::new(g2.clone(), h.clone())?;
    let n = pair1.dim() as f64;
    let cap = pair1.q().max(pair2.q());
    let gap = (pair1.f_value(-eps) - pair2.f_value(-eps)).abs();
    let bound = (n * cap + cap.powf(n) * ((2f64).powf(n) - 1.0)) * sigma;
    Ok(OmegaGapReport {
        gap,
        bound,
        cap,
        holds: gap <= bound + 1e-12 * (1.0 + bound),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FToPReport {
    pub p: f64,
    pub f_minus_eps: f64,
    pub holds: bool,
}

/// Checks P ≤ F_{−ε} under Q ≤ K and ε < ε₄ = K^{1−n}.
pub fn f_to_p_check(pair: &MetricPair, eps: f64, k: f64) -> Result<FToPReport, OpsError> {
    let q = pair.q();
    if q > k {
        return Err(OpsError::HypothesisViolated(format!(
            "Q = {q} exceeds the cap K = {k}"
        )));
    }
    let eps4 = eps_thresholds(k, pair.dim(), 0.0).eps4;
    if !(0.0..eps4).contains(&eps) {
        return Err(OpsError::HypothesisViolated(format!(
            "eps {eps} is not in [0, eps4 = {eps4})"
        )));
    }
    let p = pair.p();
    let f = pair.f_value(-eps);
    Ok(FToPReport {
        p,
        f_minus_eps: f,
        holds: p <= f + 1e-12 * (1.0 + f.abs()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spectrum(v: &[f64]) -> Spectrum {
        Spectrum::new(v.to_vec()).unwrap()
    }

    /// g = MᵀM, h = Mᵀ diag(λ) M gives g^{-1}h with spectrum exactly λ.
    pub fn pair_with_spectrum(rng: &mut ChaCha8Rng, lambda: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = lambda.len();
        let m = DMatrix::from_fn(n, n, |i, j| {
            let base = if i == j { 1.0 } else { 0.0 };
            base + 0.3 * (rng.gen::<f64>() - 0.5)
        });
        let g = m.transpose() * &m;
        let d = DMatrix::from_fn(n, n, |i, j| if i == j { lambda[i] } else { 0.0 });
        let h = m.transpose() * d * &m;
        (g, h)
    }

    fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        let r = DMatrix::from_fn(n, n, |_, _| rng.gen::<f64>() - 0.5);
        let s = (&r + r.transpose()) * 0.5;
        let norm = s.norm();
        s / norm.max(1e-12)
    }

    #[test]
    fn f_b_values() {
        assert_eq!(f_b(&spectrum(&[1.0, 1.0]), 0.0), 2.0);
        assert_eq!(f_b(&spectrum(&[1.0, 2.0, 4.0]), 8.0), 2.75);
        assert_eq!(f_b(&spectrum(&[2.0, 2.0]), -1.0), 0.75);
        assert!(Spectrum::new(vec![1.0, -2.0]).is_err());
        assert!(Spectrum::new(vec![1.0, 0.0]).is_err());
    }

    #[test]
    fn q_and_p_values() {
        let g = DMatrix::identity(3, 3);
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0, 4.0]));
        let pair = MetricPair::new(g, h).unwrap();
        assert!((pair.q() - 1.75).abs() < 1e-14);
        assert!((pair.p() - 1.5).abs() < 1e-14);

        let id = MetricPair::new(DMatrix::identity(2, 2), DMatrix::identity(2, 2)).unwrap();
        assert!((id.f_value(3.0) - 5.0).abs() < 1e-14);
        assert!((id.p() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn congruence_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let lambda: Vec<f64> = (0..3).map(|_| 0.5 + 2.0 * rng.gen::<f64>()).collect();
            let (g, h) = pair_with_spectrum(&mut rng, &lambda);
            let pair = MetricPair::new(g.clone(), h.clone()).unwrap();
            let m = DMatrix::from_fn(3, 3, |i, j| {
                let base = if i == j { 1.0 } else { 0.0 };
                base + 0.4 * (rng.gen::<f64>() - 0.5)
            });
            let pair2 = MetricPair::new(m.transpose() * g * &m, m.transpose() * h * &m).unwrap();
            assert!((pair.f_value(1.3) - pair2.f_value(1.3)).abs() < 1e-9);
            assert!((pair.p() - pair2.p()).abs() < 1e-9);
            assert!((pair.q() - pair2.q()).abs() < 1e-9);
        }
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..200 {
            let n = 2 + (rng.gen::<u32>() % 3) as usize;
            let lambda: Vec<f64> = (0..n).map(|_| 0.5 + 2.0 * rng.gen::<f64>()).collect();
            let (g, h) = pair_with_spectrum(&mut rng, &lambda);
            let bdir = random_symmetric(&mut rng, n);
            let b = -0.2 + rng.gen::<f64>();
            let pair = MetricPair::new(g.clone(), h.clone()).unwrap();
            let analytic = (pair.gradient(b) * &bdir).trace();
            let t = 1e-5;
            let fp = MetricPair::new(g.clone(), &h + &bdir * t).unwrap().f_value(b);
            let fm = MetricPair::new(g.clone(), &h - &bdir * t).unwrap().f_value(b);
            let numeric = (fp - fm) / (2.0 * t);
            assert!(
                (analytic - numeric).abs() <= 1e-6 * (1.0 + analytic.abs()),
                "grad mismatch: {analytic} vs {numeric}"
            );
        }
    }

    #[test]
    fn gradient_diagonal_case() {
        let g = DMatrix::identity(2, 2);
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 4.0]));
        let pair = MetricPair::new(g, h).unwrap();
        let grad = pair.gradient(0.0);
        assert!((grad[(0, 0)] + 1.0).abs() < 1e-12);
        assert!((grad[(1, 1)] + 1.0 / 16.0).abs() < 1e-12);
        assert!(grad[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn hessian_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for _ in 0..200 {
            let n = 2 + (rng.gen::<u32>() % 3) as usize;
            let lambda: Vec<f64> = (0..n).map(|_| 0.5 + 2.0 * rng.gen::<f64>()).collect();
            let (g, h) = pair_with_spectrum(&mut rng, &lambda);
            let bdir = random_symmetric(&mut rng, n);
            let b = -0.2 + rng.gen::<f64>();
            let pair = MetricPair::new(g.clone(), h.clone()).unwrap();
            let analytic = pair.hessian_form(&bdir, b).unwrap();
            let t = 1e-4;
            let f0 = pair.f_value(b);
            let fp = MetricPair::new(g.clone(), &h + &bdir * t).unwrap().f_value(b);
            let fm = MetricPair::new(g.clone(), &h - &bdir * t).unwrap().f_value(b);
            let numeric = (fp - 2.0 * f0 + fm) / (t * t);
            assert!(
                (analytic - numeric).abs() <= 1e-5 * (1.0 + analytic.abs()),
                "hessian mismatch: {analytic} vs {numeric}"
            );
        }
    }

    #[test]
    fn repeated_eigenvalues_are_smooth() {
        // b = 0: the divided difference at λ_i = λ_j equals ∂_i∂_i f₀.
        let l = [1.5, 1.5, 2.0];
        assert!(
            (dd_coeff(&l, 4.5, 0, 1, 0.0) - 2.0 / (1.5f64).powi(3)).abs() < 1e-14
        );
        let g = DMatrix::identity(2, 2);
        let h = DMatrix::identity(2, 2) * 1.5;
        let pair = MetricPair::new(g, h).unwrap();
        let bdir = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let v = pair.hessian_form(&bdir, 0.7).unwrap();
        assert!(v.is_finite());
    }

    #[test]
    fn hessian_form_nonnegative_for_nonnegative_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..500 {
            let n = 2 + (rng.gen::<u32>() % 3) as usize;
            let lambda: Vec<f64> = (0..n).map(|_| 0.3 + 3.0 * rng.gen::<f64>()).collect();
            let (g, h) = pair_with_spectrum(&mut rng, &lambda);
            let bdir = random_symmetric(&mut rng, n);
            let b = 2.0 * rng.gen::<f64>();
            let pair = MetricPair::new(g, h).unwrap();
            assert!(pair.hessian_form(&bdir, b).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn strong_convexity_2x2_example() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let bdir = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        // Symbolic 2x2 expansion: DD_12·2 + (∂_1f/λ_2 + ∂_2f/λ_1) with
        // ∂f = (−3.5, −1.5), DD = 2 → 4 − 3.25 = 0.75.
        let v = strong_convexity_form(&a, &bdir, 5.0).unwrap();
        assert!((v - 0.75).abs() < 1e-12);
        assert_eq!(
            strong_convexity_form(&a, &DMatrix::zeros(2, 2), 5.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn strong_convexity_nonnegative_for_nonnegative_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..1000 {
            let n = 2 + (rng.gen::<u32>() % 3) as usize;
            let a = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    0.3 + 3.0 * rng.gen::<f64>()
                } else {
                    0.0
                }
            });
            let bdir = random_symmetric(&mut rng, n);
            let b = 2.0 * rng.gen::<f64>();
            assert!(strong_convexity_form(&a, &bdir, b).unwrap() >= -1e-10);
        }
    }

    #[test]
    fn strong_convexity_input_contract() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 2.0]);
        let bdir = DMatrix::identity(2, 2);
        assert!(matches!(
            strong_convexity_form(&a, &bdir, 1.0),
            Err(OpsError::NotDiagonal)
        ));
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let asym = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, -1.0, 0.0]);
        assert!(matches!(
            strong_convexity_form(&a, &asym, 1.0),
            Err(OpsError::NotHermitian)
        ));
    }

    #[test]
    fn threshold_examples() {
        let t = eps_thresholds(1.0, 2, 1.0);
        assert_eq!(t.eps3, 0.125);
        assert_eq!(t.eps4, 1.0);
        assert!((t.eps1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(eps_thresholds(2.0, 3, 0.5).eps4, 0.25);
    }

    #[test]
    fn gamma_k_properties_with_eps1() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let k = 3.0;
        for _ in 0..500 {
            let n = 2 + (rng.gen::<u32>() % 3) as usize;
            let eps = 0.9 * eps_thresholds(k, n, 0.0).eps1;
            // Sample 1/λ positive with Σ 1/λ < K.
            let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.gen::<f64>()).collect();
            let total: f64 = raw.iter().sum();
            let target = k * (0.2 + 0.75 * rng.gen::<f64>());
            let lambda: Vec<f64> = raw.iter().map(|q| total / (q * target)).collect();
            let sp = spectrum(&lambda);
            assert!(sp.in_cap(k));
            // (1) positivity, (2) negative derivatives, (3) monotone order.
            assert!(f_b(&sp, -eps) > 0.0);
            let grad = grad_f_lambda(&sp, -eps);
            assert!(grad.iter().all(|&d| d < 0.0));
            for i in 0..n {
                for j in 0..n {
                    if lambda[i] >= lambda[j] {
                        assert!(grad[i] >= grad[j] - 1e-12);
                    }
                }
            }
            // (4) convexity: λ-Hessian PSD.
            let hess = hess_f_lambda(&sp, -eps);
            let min_eig = SymmetricEigen::new(hess.clone())
                .eigenvalues
                .iter()
                .fold(f64::INFINITY, |a, &b| a.min(b));
            assert!(min_eig >= -1e-10 * (1.0 + hess.amax()));
        }
    }

    #[test]
    fn path_guard_examples() {
        let constant: Vec<Spectrum> = (0..65).map(|_| spectrum(&[1.0, 1.0])).collect();
        let report = path_guard(&constant, 3.0, 1.0, 0.01).unwrap();
        assert!(report.holds);
        assert!((report.max_f0 - 2.0).abs() < 1e-14);

        // Violating the F_{-eps} hypothesis is a reported precondition
        // failure, not a conclusion failure.
        let bad: Vec<Spectrum> = (0..5).map(|_| spectrum(&[0.1, 0.1])).collect();
        assert!(matches!(
            path_guard(&bad, 3.0, 1.0, 0.01),
            Err(OpsError::HypothesisViolated(_))
        ));
        assert!(matches!(
            path_guard(&constant, 3.0, 1.0, 10.0),
            Err(OpsError::HypothesisViolated(_))
        ));
        assert!(path_guard(&[], 3.0, 1.0, 0.01).is_err());
    }

    #[test]
    fn path_guard_random_admissible_paths() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        let (k, c_theta) = (5.0, 1.0);
        let mut nontrivial = 0;
        let mut accepted = 0;
        while accepted < 300 {
            let n = 2 + (rng.gen::<u32>() % 2) as usize;
            let eps = 0.9 * eps_thresholds(k, n, c_theta).eps3;
            let scale = 1.2 * (k + 3.0 * c_theta) / n as f64;
            let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..n).map(|_| 0.01 + scale * rng.gen::<f64>()).collect()
            };
            let (q0, qc, q1) = (draw(&mut rng), draw(&mut rng), draw(&mut rng));
            if q0.iter().sum::<f64>() >= k {
                continue;
            }
            let path: Vec<Spectrum> = (0..65)
                .map(|s| {
                    let t = s as f64 / 64.0;
                    let q: Vec<f64> = (0..n)
                        .map(|i| {
                            (1.0 - t) * (1.0 - t) * q0[i]
                                + 2.0 * t * (1.0 - t) * qc[i]
                                + t * t * q1[i]
                        })
                        .collect();
                    spectrum(&q.iter().map(|x| 1.0 / x).collect::<Vec<_>>())
                })
                .collect();
            match path_guard(&path, k, c_theta, eps) {
                Ok(report) => {
                    assert!(report.holds, "path estimate failed: {report:?}");
                    if report.max_f0 > k + 2.0 * c_theta {
                        nontrivial += 1;
                    }
                    accepted += 1;
                }
                Err(OpsError::HypothesisViolated(_)) => continue,
                Err(e) => panic!("unexpected error {e}"),
            }
        }
        // The band (K+2C_θ, K+3C_θ) must actually be exercised.
        assert!(nontrivial > 0);
    }

    #[test]
    fn omega_gap_examples() {
        let g1 = DMatrix::identity(2, 2);
        let report =
            change_of_omega_gap(&g1, &g1, &DMatrix::identity(2, 2), 0.5, 0.0).unwrap();
        assert_eq!(report.gap, 0.0);
        assert!(report.holds);

        let g2 = DMatrix::identity(2, 2) * 1.1;
        let report =
            change_of_omega_gap(&g1, &g2, &DMatrix::identity(2, 2), 0.0, 0.1).unwrap();
        assert!((report.gap - 0.2).abs() < 1e-12);
        assert!(report.holds);

        let too_far = DMatrix::identity(2, 2) * 2.0;
        assert!(matches!(
            change_of_omega_gap(&g1, &too_far, &DMatrix::identity(2, 2), 0.0, 0.1),
            Err(OpsError::SandwichViolated(_))
        ));
    }

    #[test]
    fn omega_gap_random_sandwiches() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..500 {
            let n = 2 + (rng.gen::<u32>() % 2) as usize;
            let sigma = 0.05 + 0.4 * rng.gen::<f64>();
            let lambda: Vec<f64> = (0..n).map(|_| 0.5 + 2.0 * rng.gen::<f64>()).collect();
            let (g1, h) = pair_with_spectrum(&mut rng, &lambda);
            // g2 = M^T diag(1 + sigma*u) M on the g1 frame keeps the
            // sandwich exact.
            let chol = g1.clone().cholesky().unwrap();
            let l = chol.l();
            let d = DMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    1.0 + sigma * (2.0 * rng.gen::<f64>() - 1.0) * 0.999
                } else {
                    0.0
                }
            });
            let g2 = &l * d * l.transpose();
            let eps = rng.gen::<f64>();
            let report = change_of_omega_gap(&g1, &g2, &h, eps, sigma).unwrap();
            assert!(report.holds, "gap {} > bound {}", report.gap, report.bound);
        }
    }

    #[test]
    fn f_to_p_examples() {
        let g = DMatrix::identity(2, 2);
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 2.0]));
        let pair = MetricPair::new(g.clone(), h).unwrap();
        let report = f_to_p_check(&pair, 0.0, 2.0).unwrap();
        assert!(report.holds);
        assert!(report.p <= report.f_minus_eps);

        // Cap boundary h = K·g: slack is (1 − εK^{n−1})/λ_max ≥ 0.
        let k = 2.0;
        let cap_pair = MetricPair::new(g.clone(), DMatrix::identity(2, 2) * k).unwrap();
        let report = f_to_p_check(&cap_pair, 0.9 / k, k + 1e-9).unwrap();
        assert!(report.holds);

        assert!(matches!(
            f_to_p_check(&cap_pair, 0.0, 0.5),
            Err(OpsError::HypothesisViolated(_))
        ));
    }

    #[test]
    fn f_to_p_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        let k = 4.0;
        let mut accepted = 0;
        while accepted < 500 {
            let n = 2 + (rng.gen::<u32>() % 3) as usize;
            let eps = 0.9 * eps_thresholds(k, n, 0.0).eps4;
            let lambda: Vec<f64> = (0..n).map(|_| 0.4 + 2.5 * rng.gen::<f64>()).collect();
            let (g, h) = pair_with_spectrum(&mut rng, &lambda);
            let pair = MetricPair::new(g, h).unwrap();
            if pair.q() > k {
                continue;
            }
            let report = f_to_p_check(&pair, eps, k).unwrap();
            assert!(report.holds, "P {} > F {}", report.p, report.f_minus_eps);
            accepted += 1;
        }
    }

    #[test]
    fn restriction_monotonicity_of_q() {
        // Compressing to a coordinate subspace cannot increase Q.
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..300 {
            let lambda: Vec<f64> = (0..3).map(|_| 0.4 + 2.5 * rng.gen::<f64>()).collect();
            let (g, h) = pair_with_spectrum(&mut rng, &lambda);
            let full = MetricPair::new(g.clone(), h.clone()).unwrap();
            for keep in [[0usize, 1], [0, 2], [1, 2]] {
                let sub = |m: &DMatrix<f64>| {
                    DMatrix::from_fn(2, 2, |i, j| m[(keep[i], keep[j])])
                };
                let restricted = MetricPair::new(sub(&g), sub(&h)).unwrap();
                assert!(restricted.q() <= full.q() + 1e-10);
            }
        }
    }

    #[test]
    fn rejects_badly_formed_pairs() {
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, -0.5, 1.0]);
        assert!(matches!(
            MetricPair::new(asym.clone(), DMatrix::identity(2, 2)),
            Err(OpsError::NotHermitian)
        ));
        let indef = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            MetricPair::new(indef, DMatrix::identity(2, 2)),
            Err(OpsError::NotPositiveDefinite)
        ));
    }
}
