//! Regularized maximum M_η: a smooth, convex, monotone mollification of
//! max(t_1, …, t_N), evaluated by tensor-product quadrature of
//! ∫ max_j(t_j + η_j u_j) Π θ(u_j) du over [−1,1]^N.
//!
//! The kernel θ is the even bump exp(−1/(1−u²)) normalized by the same
//! quadrature rule that evaluates the integral, so ∫θ = 1 holds by
//! construction and the odd moment vanishes by node symmetry. This makes
//! the defining properties (value = t at N = 1, translation equivariance,
//! gradient entries summing to one) hold structurally rather than up to a
//! quadrature constant.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RegMaxError {
    #[error("dimension {0} exceeds the tensor-quadrature limit 3")]
    DimensionTooLarge(usize),
    #[error("smoothing width must be positive")]
    NonPositiveWidth,
}

/// Gauss–Legendre nodes and weights on [−1, 1], symmetric by
/// construction (each node is assigned together with its mirror).
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            // P_n(x) and P_{n-1}(x) by the three-term recurrence.
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (mut p0, mut p1) = (1.0, x);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

#[derive(Debug, Clone)]
pub struct RegMaxKernel {
    nodes: Vec<f64>,
    /// Quadrature weights already multiplied by θ(node) and normalized to
    /// total mass one.
    weights: Vec<f64>,
}

impl RegMaxKernel {
    pub fn new(nodes_per_axis: usize) -> Self {
        assert!(nodes_per_axis >= 2);
        let (nodes, raw) = gauss_legendre(nodes_per_axis);
        let bump = |u: f64| (-1.0 / (1.0 - u * u)).exp();
        let mut weights: Vec<f64> = nodes
            .iter()
            .zip(&raw)
            .map(|(&u, &w)| w * bump(u))
            .collect();
        let mass: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= mass;
        }
        RegMaxKernel { nodes, weights }
    }

    pub fn nodes_per_axis(&self) -> usize {
        self.nodes.len()
    }

    /// Σ w_i (should be 1 up to rounding).
    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Σ w_i u_i (zero by symmetry up to rounding).
    pub fn odd_moment(&self) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| u * w)
            .sum()
    }

    fn check(&self, t: &[f64], eta: &[f64]) -> Result<(), RegMaxError> {
        assert_eq!(t.len(), eta.len());
        if t.is_empty() || t.len() > 3 {
            return Err(RegMaxError::DimensionTooLarge(t.len()));
        }
        if eta.iter().any(|&e| !(e > 0.0)) {
            return Err(RegMaxError::NonPositiveWidth);
        }
        Ok(())
    }

    /// Value and gradient in one sweep; ties at quadrature nodes split
    /// their weight equally among the maximizers, which keeps the
    /// gradient entries summing to the total mass exactly.
    pub fn value_and_gradient(
        &self,
        t: &[f64],
        eta: &[f64],
    ) -> Result<(f64, Vec<f64>), RegMaxError> {
        self.check(t, eta)?;
        let n = t.len();
        let m = self.nodes.len();
        let axis: Vec<Vec<f64>> = (0..n)
            .map(|j| self.nodes.iter().map(|&u| t[j] + eta[j] * u).collect())
            .collect();
        let mut value = 0.0;
        let mut grad = vec![0.0; n];
        let mut scatter = |weight: f64, s: &[f64]| {
            let mut best = s[0];
            for &x in &s[1..] {
                if x > best {
                    best = x;
                }
            }
            value += weight * best;
            let ties = s.iter().filter(|&&x| x == best).count();
            let share = weight / ties as f64;
            for (j, &x) in s.iter().enumerate() {
                if x == best {
                    grad[j] += share;
                }
            }
        };
        match n {
            1 => {
                for a in 0..m {
                    scatter(self.weights[a], &[axis[0][a]]);
                }
            }
            2 => {
                for a in 0..m {
                    let wa = self.weights[a];
                    for b in 0..m {
                        scatter(wa * self.weights[b], &[axis[0][a], axis[1][b]]);
                    }
                }
            }
            3 => {
                for a in 0..m {
                    let wa = self.weights[a];
                    for b in 0..m {
                        let wab = wa * self.weights[b];
                        for c in 0..m {
                            scatter(
                                wab * self.weights[c],
                                &[axis[0][a], axis[1][b], axis[2][c]],
                            );
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
        Ok((value, grad))
    }
}

impl Default for RegMaxKernel {
    fn default() -> Self {
        RegMaxKernel::new(64)
    }
}

pub fn reg_max(t: &[f64], eta: &[f64], kernel: &RegMaxKernel) -> Result<f64, RegMaxError> {
    Ok(kernel.value_and_gradient(t, eta)?.0)
}

pub fn reg_max_grad(
    t: &[f64],
    eta: &[f64],
    kernel: &RegMaxKernel,
) -> Result<Vec<f64>, RegMaxError> {
    Ok(kernel.value_and_gradient(t, eta)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn quadrature_is_sane() {
        let (nodes, weights) = gauss_legendre(64);
        // Exact for polynomials of degree < 128.
        let total: f64 = weights.iter().sum();
        assert!((total - 2.0).abs() < 1e-13);
        let quad: f64 = nodes
            .iter()
            .zip(&weights)
            .map(|(x, w)| w * x * x)
            .sum();
        assert!((quad - 2.0 / 3.0).abs() < 1e-13);
        for i in 0..32 {
            assert_eq!(nodes[i], -nodes[63 - i]);
            assert_eq!(weights[i], weights[63 - i]);
        }
    }

    #[test]
    fn kernel_moments() {
        let kernel = RegMaxKernel::default();
        assert!((kernel.mass() - 1.0).abs() < 1e-12);
        assert!(kernel.odd_moment().abs() < 1e-12);
    }

    #[test]
    fn single_argument_is_identity() {
        let kernel = RegMaxKernel::default();
        for (t, eta) in [(0.0, 1.0), (3.25, 0.5), (-7.0, 2.0)] {
            let v = reg_max(&[t], &[eta], &kernel).unwrap();
            assert!((v - t).abs() < 1e-12, "{v} vs {t}");
            let g = reg_max_grad(&[t], &[eta], &kernel).unwrap();
            assert!((g[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bracketing_and_symmetry_at_origin() {
        let kernel = RegMaxKernel::default();
        let v = reg_max(&[0.0, 0.0], &[1.0, 1.0], &kernel).unwrap();
        assert!(v > 0.0 && v <= 1.0);
        let g = reg_max_grad(&[0.0, 0.0], &[1.0, 1.0], &kernel).unwrap();
        assert!((g[0] - 0.5).abs() < 1e-8);
        assert!((g[1] - 0.5).abs() < 1e-8);
        assert!((g[0] + g[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn separated_argument_drops_out() {
        let kernel = RegMaxKernel::default();
        let v = reg_max(&[0.0, -5.0], &[1.0, 1.0], &kernel).unwrap();
        assert!(v.abs() < 1e-12);
        let g = reg_max_grad(&[0.0, -5.0], &[1.0, 1.0], &kernel).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-8);
        assert!(g[1].abs() < 1e-8);

        // Dropping the separated argument leaves the value unchanged.
        let kept = reg_max(&[0.3, 0.1], &[0.5, 0.25], &kernel).unwrap();
        let padded = reg_max(&[0.3, 0.1, -9.0], &[0.5, 0.25, 1.0], &kernel).unwrap();
        assert!((kept - padded).abs() < 1e-12);
    }

    #[test]
    fn lemma_properties_random() {
        let kernel = RegMaxKernel::new(32);
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..300 {
            let n = 1 + (rng.gen::<u32>() % 3) as usize;
            let t: Vec<f64> = (0..n).map(|_| 4.0 * (rng.gen::<f64>() - 0.5)).collect();
            let eta: Vec<f64> = (0..n).map(|_| 0.1 + rng.gen::<f64>()).collect();
            let (v, g) = kernel.value_and_gradient(&t, &eta).unwrap();

            // (1) monotone: nonnegative gradient entries, and a bumped
            // coordinate does not decrease the value.
            assert!(g.iter().all(|&x| x >= -1e-10));
            let mut up = t.clone();
            up[0] += 0.3;
            assert!(reg_max(&up, &eta, &kernel).unwrap() >= v - 1e-10);

            // (2) bracketing.
            let lo = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let hi = t
                .iter()
                .zip(&eta)
                .map(|(a, e)| a + e)
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(v >= lo - 1e-10 && v <= hi + 1e-10);

            // (4) translation equivariance and unit gradient sum.
            let a = 2.0 * rng.gen::<f64>() - 1.0;
            let shifted: Vec<f64> = t.iter().map(|x| x + a).collect();
            assert!((reg_max(&shifted, &eta, &kernel).unwrap() - (v + a)).abs() < 1e-10);
            assert!((g.iter().sum::<f64>() - 1.0).abs() < 1e-8);

            // Midpoint convexity.
            let s: Vec<f64> = (0..n).map(|_| 4.0 * (rng.gen::<f64>() - 0.5)).collect();
            let mid: Vec<f64> = t.iter().zip(&s).map(|(a, b)| 0.5 * (a + b)).collect();
            let vs = reg_max(&s, &eta, &kernel).unwrap();
            let vm = reg_max(&mid, &eta, &kernel).unwrap();
            assert!(vm <= 0.5 * (v + vs) + 1e-8);
        }
    }

    #[test]
    fn input_contract() {
        let kernel = RegMaxKernel::default();
        assert!(matches!(
            reg_max(&[0.0; 4], &[1.0; 4], &kernel),
            Err(RegMaxError::DimensionTooLarge(4))
        ));
        assert!(matches!(
            reg_max(&[0.0], &[0.0], &kernel),
            Err(RegMaxError::NonPositiveWidth)
        ));
    }
}
