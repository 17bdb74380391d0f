//! Seeded counterexample searches. Each suite replays one family of
//! library guarantees over a deterministic ChaCha8 stream and stops at
//! the first violation, reporting it with every input needed to rerun
//! the case by hand. A clean report is the evidence that the estimates
//! hold at their advertised tolerances on the sampled distributions.

use crate::eigenops::{
    change_of_omega_gap, eps_thresholds, f_b, f_to_p_check, grad_f_lambda, hess_f_lambda,
    path_guard, MetricPair, OpsError, Spectrum,
};
use crate::polytope::{DelzantPolytope, Facet};
use crate::rat::{rat, rat_int};
use crate::regmax::RegMaxKernel;
use crate::solver::{ConvexPotential, GuilleminPotential, LegendreEvaluator};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Counterexample {
    /// Which property inside the suite failed.
    pub case: String,
    /// Position in the sample stream; replaying the suite with the same
    /// seed reproduces it.
    pub sample: usize,
    /// Full inputs and the offending values.
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    /// Samples examined (equals the request unless the search stopped
    /// early at a counterexample).
    pub samples: usize,
    pub counterexample: Option<Counterexample>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn fmt_vec(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.17e}")).collect();
    format!("[{}]", parts.join(", "))
}

fn fmt_mat(m: &DMatrix<f64>) -> String {
    let rows: Vec<String> = (0..m.nrows())
        .map(|i| {
            let row: Vec<f64> = (0..m.ncols()).map(|j| m[(i, j)]).collect();
            fmt_vec(&row)
        })
        .collect();
    format!("[{}]", rows.join("; "))
}

/// g = MᵀM with M a perturbed identity, h = Mᵀ diag(λ) M: the pair is
/// genuinely non-diagonal but g^{-1}h has spectrum exactly λ.
fn pair_with_spectrum(rng: &mut ChaCha8Rng, lambda: &[f64]) -> (DMatrix<f64>, DMatrix<f64>) {
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

fn sample_dim(rng: &mut ChaCha8Rng) -> usize {
    2 + (rng.gen::<u32>() % 3) as usize
}

/// Replays the convexity and comparison estimates: finite-difference
/// agreement of the gradient, nonnegativity of the Hessian form for
/// b ≥ 0, the Γ_K sign and convexity package below ε₁, the P ≤ F_{−ε}
/// comparison below ε₄, the path estimate below ε₃, and the two-metric
/// gap bound. Samples rotate through the six checks in order.
pub fn convexity_suite(seed: u64, samples: usize) -> SuiteReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexample = None;
    let mut ran = 0;
    for i in 0..samples {
        let found = match i % 6 {
            0 => gradient_fd_case(&mut rng, i),
            1 => hessian_psd_case(&mut rng, i),
            2 => gamma_cap_case(&mut rng, i),
            3 => f_to_p_case(&mut rng, i),
            4 => path_guard_case(&mut rng, i),
            _ => omega_gap_case(&mut rng, i),
        };
        ran = i + 1;
        if found.is_some() {
            counterexample = found;
            break;
        }
    }
    SuiteReport {
        suite: "convexity".to_string(),
        seed,
        samples: ran,
        counterexample,
    }
}

fn gradient_fd_case(rng: &mut ChaCha8Rng, sample: usize) -> Option<Counterexample> {
    let n = sample_dim(rng);
    let lambda: Vec<f64> = (0..n).map(|_| 0.5 + 2.0 * rng.gen::<f64>()).collect();
    let (g, h) = pair_with_spectrum(rng, &lambda);
    let bdir = random_symmetric(rng, n);
    let b = -0.2 + rng.gen::<f64>();
    let pair = MetricPair::new(g.clone(), h.clone()).expect("constructed pair is SPD");
    let analytic = (pair.gradient(b) * &bdir).trace();
    let t = 1e-5;
    let plus = MetricPair::new(g.clone(), &h + &bdir * t).expect("perturbation stays SPD");
    let minus = MetricPair::new(g.clone(), &h - &bdir * t).expect("perturbation stays SPD");
    let numeric = (plus.f_value(b) - minus.f_value(b)) / (2.0 * t);
    if (analytic - numeric).abs() <= 1e-6 * (1.0 + analytic.abs()) {
        return None;
    }
    Some(Counterexample {
        case: "gradient_fd".to_string(),
        sample,
        detail: format!(
            "analytic {analytic:e} vs central difference {numeric:e}\nb = {b:e}\ng = {}\nh = {}\nB = {}",
            fmt_mat(&g),
            fmt_mat(&h),
            fmt_mat(&bdir)
        ),
    })
}

fn hessian_psd_case(rng: &mut ChaCha8Rng, sample: usize) -> Option<Counterexample> {
    let n = sample_dim(rng);
    let lambda: Vec<f64> = (0..n).map(|_| 0.3 + 3.0 * rng.gen::<f64>()).collect();
    let (g, h) = pair_with_spectrum(rng, &lambda);
    let bdir = random_symmetric(rng, n);
    let b = 2.0 * rng.gen::<f64>();
    let pair = MetricPair::new(g.clone(), h.clone()).expect("constructed pair is SPD");
    let value = pair
        .hessian_form(&bdir, b)
        .expect("symmetric direction accepted");
    if value >= -1e-10 {
        return None;
    }
    Some(Counterexample {
        case: "hessian_psd".to_string(),
        sample,
        detail: format!(
            "hessian form {value:e} < 0 at b = {b:e}\ng = {}\nh = {}\nB = {}",
            fmt_mat(&g),
            fmt_mat(&h),
            fmt_mat(&bdir)
        ),
    })
}

fn gamma_cap_case(rng: &mut ChaCha8Rng, sample: usize) -> Option<Counterexample> {
    let k = 3.0;
    let n = sample_dim(rng);
    let eps = 0.9 * eps_thresholds(k, n, 0.0).eps1;
    // Prescribe Σ 1/λ = target < K exactly by scaling.
    let raw: Vec<f64> = (0..n).map(|_| 0.05 + rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let target = k * (0.2 + 0.75 * rng.gen::<f64>());
    let lambda: Vec<f64> = raw.iter().map(|q| total / (q * target)).collect();
    let sp = Spectrum::new(lambda.clone()).expect("positive by construction");
    let fail = |what: &str, extra: String| {
        Some(Counterexample {
            case: "gamma_cap".to_string(),
            sample,
            detail: format!(
                "{what}\nK = {k}, eps = {eps:e}\nlambda = {}\n{extra}",
                fmt_vec(&lambda)
            ),
        })
    };
    if !sp.in_cap(k) {
        return fail("sample left the cap", format!("F0 = {:e}", f_b(&sp, 0.0)));
    }
    let value = f_b(&sp, -eps);
    if value <= 0.0 {
        return fail("F_(-eps) is not positive", format!("value = {value:e}"));
    }
    let grad = grad_f_lambda(&sp, -eps);
    if let Some(d) = grad.iter().find(|&&d| d >= 0.0) {
        return fail(
            "a partial derivative is not negative",
            format!("grad = {} (entry {d:e})", fmt_vec(&grad)),
        );
    }
    for i in 0..n {
        for j in 0..n {
            if lambda[i] >= lambda[j] && grad[i] < grad[j] - 1e-12 {
                return fail(
                    "gradient entries are not ordered with the eigenvalues",
                    format!("grad = {}", fmt_vec(&grad)),
                );
            }
        }
    }
    let hess = hess_f_lambda(&sp, -eps);
    let min_eig = SymmetricEigen::new(hess.clone())
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |a, &b| a.min(b));
    if min_eig < -1e-10 * (1.0 + hess.amax()) {
        return fail(
            "lambda-Hessian is not positive semidefinite",
            format!("min eigenvalue = {min_eig:e}"),
        );
    }
    None
}

fn f_to_p_case(rng: &mut ChaCha8Rng, sample: usize) -> Option<Counterexample> {
    let k = 4.0;
    for _ in 0..1000 {
        let n = sample_dim(rng);
        let eps = 0.9 * eps_thresholds(k, n, 0.0).eps4;
        let lambda: Vec<f64> = (0..n).map(|_| 0.4 + 2.5 * rng.gen::<f64>()).collect();
        let (g, h) = pair_with_spectrum(rng, &lambda);
        let pair = MetricPair::new(g.clone(), h.clone()).expect("constructed pair is SPD");
        if pair.q() > k {
            continue;
        }
        let report = f_to_p_check(&pair, eps, k).expect("hypotheses hold by construction");
        if report.holds {
            return None;
        }
        return Some(Counterexample {
            case: "f_to_p".to_string(),
            sample,
            detail: format!(
                "P = {:e} exceeds F_(-eps) = {:e}\nK = {k}, eps = {eps:e}\ng = {}\nh = {}",
                report.p,
                report.f_minus_eps,
                fmt_mat(&g),
                fmt_mat(&h)
            ),
        });
    }
    Some(Counterexample {
        case: "f_to_p".to_string(),
        sample,
        detail: "sampler starved: no draw satisfied Q <= K in 1000 attempts".to_string(),
    })
}

fn path_guard_case(rng: &mut ChaCha8Rng, sample: usize) -> Option<Counterexample> {
    let (k, c_theta) = (5.0, 1.0);
    for _ in 0..1000 {
        let n = 2 + (rng.gen::<u32>() % 2) as usize;
        let eps = 0.9 * eps_thresholds(k, n, c_theta).eps3;
        let scale = 1.2 * (k + 3.0 * c_theta) / n as f64;
        let draw = |rng: &mut ChaCha8Rng| -> Vec<f64> {
            (0..n).map(|_| 0.01 + scale * rng.gen::<f64>()).collect()
        };
        let (q0, qc, q1) = (draw(rng), draw(rng), draw(rng));
        if q0.iter().sum::<f64>() >= k {
            continue;
        }
        // Quadratic Bezier in q = 1/λ space, sampled at 65 points.
        let path: Vec<Spectrum> = (0..65)
            .map(|s| {
                let t = s as f64 / 64.0;
                let q: Vec<f64> = (0..n)
                    .map(|i| {
                        (1.0 - t) * (1.0 - t) * q0[i] + 2.0 * t * (1.0 - t) * qc[i] + t * t * q1[i]
                    })
                    .collect();
                Spectrum::new(q.iter().map(|x| 1.0 / x).collect()).expect("positive entries")
            })
            .collect();
        match path_guard(&path, k, c_theta, eps) {
            Ok(report) => {
                if report.holds {
                    return None;
                }
                return Some(Counterexample {
                    case: "path_guard".to_string(),
                    sample,
                    detail: format!(
                        "max F0 = {:e} reached the limit {:e}\nK = {k}, C_theta = {c_theta}, eps = {eps:e}\nq0 = {}\nqc = {}\nq1 = {}",
                        report.max_f0,
                        report.limit,
                        fmt_vec(&q0),
                        fmt_vec(&qc),
                        fmt_vec(&q1)
                    ),
                });
            }
            Err(OpsError::HypothesisViolated(_)) => continue,
            Err(e) => {
                return Some(Counterexample {
                    case: "path_guard".to_string(),
                    sample,
                    detail: format!("unexpected error: {e}"),
                });
            }
        }
    }
    Some(Counterexample {
        case: "path_guard".to_string(),
        sample,
        detail: "sampler starved: no admissible path in 1000 attempts".to_string(),
    })
}

fn omega_gap_case(rng: &mut ChaCha8Rng, sample: usize) -> Option<Counterexample> {
    let n = 2 + (rng.gen::<u32>() % 2) as usize;
    let sigma = 0.05 + 0.4 * rng.gen::<f64>();
    let lambda: Vec<f64> = (0..n).map(|_| 0.5 + 2.0 * rng.gen::<f64>()).collect();
    let (g1, h) = pair_with_spectrum(rng, &lambda);
    // g2 = L diag(1 + σu) Lᵀ on the Cholesky frame of g1 keeps the
    // sandwich (1−σ)g1 ≤ g2 ≤ (1+σ)g1 exact.
    let chol = g1.clone().cholesky().expect("g1 is SPD");
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
    match change_of_omega_gap(&g1, &g2, &h, eps, sigma) {
        Ok(report) if report.holds => None,
        Ok(report) => Some(Counterexample {
            case: "omega_gap".to_string(),
            sample,
            detail: format!(
                "gap {:e} exceeds the bound {:e} (cap {:e})\nsigma = {sigma:e}, eps = {eps:e}\ng1 = {}\ng2 = {}\nh = {}",
                report.gap,
                report.bound,
                report.cap,
                fmt_mat(&g1),
                fmt_mat(&g2),
                fmt_mat(&h)
            ),
        }),
        Err(e) => Some(Counterexample {
            case: "omega_gap".to_string(),
            sample,
            detail: format!("unexpected error: {e}\ng1 = {}\ng2 = {}", fmt_mat(&g1), fmt_mat(&g2)),
        }),
    }
}

/// Exact identities for the ε-thresholds. At inputs whose powers are
/// dyadic the closed forms are exact in double precision, so the
/// comparisons are equalities, not tolerances.
pub fn threshold_suite() -> SuiteReport {
    let mut counterexample = None;
    let mut ran = 0;
    let mut check = |case: &str, got: f64, want: f64, ran: &mut usize| -> bool {
        *ran += 1;
        if got == want {
            return true;
        }
        counterexample = Some(Counterexample {
            case: case.to_string(),
            sample: *ran - 1,
            detail: format!("got {got:e}, want {want:e}"),
        });
        false
    };
    let table: Vec<(&str, f64, f64)> = vec![
        ("eps3(K=1, n=2, C=1)", eps_thresholds(1.0, 2, 1.0).eps3, 0.125),
        ("eps4(K=1, n=2, C=1)", eps_thresholds(1.0, 2, 1.0).eps4, 1.0),
        ("eps1(K=1, n=2, C=1)", eps_thresholds(1.0, 2, 1.0).eps1, 2.0 / 3.0),
        ("eps4(K=2, n=3)", eps_thresholds(2.0, 3, 0.5).eps4, 0.25),
        ("eps1(K=2, n=3)", eps_thresholds(2.0, 3, 0.0).eps1, 0.125),
        ("eps4(K=4, n=2)", eps_thresholds(4.0, 2, 0.0).eps4, 0.25),
        ("eps4(K=1/2, n=2)", eps_thresholds(0.5, 2, 0.0).eps4, 2.0),
        ("eps3(K=1, n=1, C=1)", eps_thresholds(1.0, 1, 1.0).eps3, 0.125),
    ];
    for (case, got, want) in table {
        if !check(case, got, want, &mut ran) {
            return SuiteReport {
                suite: "thresholds".to_string(),
                seed: 0,
                samples: ran,
                counterexample,
            };
        }
    }
    // Structural facts on a dyadic grid: ε₁ = 2ε₄/(n+1) exactly, ε₄
    // strictly decreasing in K for n ≥ 2, ε₃ strictly decreasing in K.
    for n in 1..=4usize {
        let mut prev: Option<(f64, f64)> = None;
        for i in 1..=8u32 {
            let k = i as f64 * 0.5;
            let t = eps_thresholds(k, n, 1.0);
            ran += 1;
            if t.eps1 != 2.0 * t.eps4 / (n as f64 + 1.0) {
                counterexample = Some(Counterexample {
                    case: "eps1_eps4_relation".to_string(),
                    sample: ran - 1,
                    detail: format!("K = {k}, n = {n}: eps1 = {:e}, eps4 = {:e}", t.eps1, t.eps4),
                });
            } else if let Some((e4, e3)) = prev {
                if (n >= 2 && t.eps4 >= e4) || t.eps3 >= e3 {
                    counterexample = Some(Counterexample {
                        case: "threshold_monotonicity".to_string(),
                        sample: ran - 1,
                        detail: format!(
                            "K = {k}, n = {n}: eps4 {:e} (prev {e4:e}), eps3 {:e} (prev {e3:e})",
                            t.eps4, t.eps3
                        ),
                    });
                }
            }
            if counterexample.is_some() {
                return SuiteReport {
                    suite: "thresholds".to_string(),
                    seed: 0,
                    samples: ran,
                    counterexample,
                };
            }
            prev = Some((t.eps4, t.eps3));
        }
    }
    SuiteReport {
        suite: "thresholds".to_string(),
        seed: 0,
        samples: ran,
        counterexample,
    }
}

/// Replays the defining properties of the regularized maximum on random
/// inputs: monotonicity, bracketing between max t and max (t + η),
/// midpoint convexity, translation equivariance, and the unit gradient
/// sum. N cycles through 1, 2, 3.
pub fn regmax_suite(seed: u64, samples: usize) -> SuiteReport {
    let kernel = RegMaxKernel::new(16);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexample = None;
    let mut ran = 0;
    for i in 0..samples {
        ran = i + 1;
        let n = 1 + i % 3;
        let t: Vec<f64> = (0..n).map(|_| 4.0 * (rng.gen::<f64>() - 0.5)).collect();
        let eta: Vec<f64> = (0..n).map(|_| 0.1 + rng.gen::<f64>()).collect();
        let (v, g) = kernel
            .value_and_gradient(&t, &eta)
            .expect("arguments in range");
        let fail = |case: &str, extra: String| {
            Some(Counterexample {
                case: case.to_string(),
                sample: i,
                detail: format!("t = {}\neta = {}\n{extra}", fmt_vec(&t), fmt_vec(&eta)),
            })
        };

        if let Some(&bad) = g.iter().find(|&&x| x < -1e-10) {
            counterexample = fail("monotone_gradient", format!("gradient entry {bad:e} < 0"));
            break;
        }
        let bump = (rng.gen::<u32>() as usize) % n;
        let mut up = t.clone();
        up[bump] += 0.3;
        let vu = kernel.value_and_gradient(&up, &eta).expect("in range").0;
        if vu < v - 1e-10 {
            counterexample = fail(
                "monotone_bump",
                format!("bumping t[{bump}] by 0.3 dropped the value {v:e} -> {vu:e}"),
            );
            break;
        }

        let lo = t.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let hi = t
            .iter()
            .zip(&eta)
            .map(|(a, e)| a + e)
            .fold(f64::NEG_INFINITY, f64::max);
        if v < lo - 1e-10 || v > hi + 1e-10 {
            counterexample = fail("bracketing", format!("value {v:e} outside [{lo:e}, {hi:e}]"));
            break;
        }

        let s: Vec<f64> = (0..n).map(|_| 4.0 * (rng.gen::<f64>() - 0.5)).collect();
        let mid: Vec<f64> = t.iter().zip(&s).map(|(a, b)| 0.5 * (a + b)).collect();
        let vs = kernel.value_and_gradient(&s, &eta).expect("in range").0;
        let vm = kernel.value_and_gradient(&mid, &eta).expect("in range").0;
        if vm > 0.5 * (v + vs) + 1e-8 {
            counterexample = fail(
                "midpoint_convexity",
                format!("s = {}\nM(mid) = {vm:e} > {:e}", fmt_vec(&s), 0.5 * (v + vs)),
            );
            break;
        }

        let a = 2.0 * rng.gen::<f64>() - 1.0;
        let shifted: Vec<f64> = t.iter().map(|x| x + a).collect();
        let vt = kernel.value_and_gradient(&shifted, &eta).expect("in range").0;
        if (vt - (v + a)).abs() > 1e-10 {
            counterexample = fail(
                "translation",
                format!("shift a = {a:e}: M(t+a) = {vt:e}, M(t)+a = {:e}", v + a),
            );
            break;
        }
        let gsum: f64 = g.iter().sum();
        if (gsum - 1.0).abs() > 1e-8 {
            counterexample = fail("gradient_sum", format!("gradient sums to {gsum:e}"));
            break;
        }
    }
    SuiteReport {
        suite: "regmax".to_string(),
        seed,
        samples: ran,
        counterexample,
    }
}

fn interval_polytope() -> DelzantPolytope {
    DelzantPolytope::new(
        1,
        vec![
            Facet::new(vec![1], rat_int(0)),
            Facet::new(vec![-1], rat_int(2)),
        ],
    )
    .expect("interval is Delzant")
}

fn square_polytope() -> DelzantPolytope {
    DelzantPolytope::new(
        2,
        vec![
            Facet::new(vec![1, 0], rat_int(0)),
            Facet::new(vec![0, 1], rat_int(0)),
            Facet::new(vec![-1, 0], rat_int(1)),
            Facet::new(vec![0, -1], rat(3, 2)),
        ],
    )
    .expect("box is Delzant")
}

/// Round-trips the Newton Legendre transform against the analytic
/// Guillemin jets on an interval and a box: ∇f(∇h(y)) must return y to
/// 1e-10 and D²f(∇h(y))·D²h(y) must be the identity to 1e-8. Samples
/// alternate between the two domains.
pub fn legendre_suite(seed: u64, samples: usize) -> SuiteReport {
    let domains = [interval_polytope(), square_polytope()];
    let potentials: Vec<GuilleminPotential> =
        domains.iter().map(GuilleminPotential::new).collect();
    let evaluators: Vec<LegendreEvaluator> =
        domains.iter().map(LegendreEvaluator::for_polytope).collect();
    let boxes: Vec<Vec<(f64, f64)>> = vec![vec![(0.0, 2.0)], vec![(0.0, 1.0), (0.0, 1.5)]];

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counterexample = None;
    let mut ran = 0;
    'stream: for i in 0..samples {
        ran = i + 1;
        let which = i % 2;
        let y: Vec<f64> = boxes[which]
            .iter()
            .map(|&(lo, hi)| lo + (0.01 + 0.98 * rng.gen::<f64>()) * (hi - lo))
            .collect();
        let primal = potentials[which].eval(&y).expect("interior point");
        let dual = match evaluators[which].eval(&primal.grad, None) {
            Ok(jet) => jet,
            Err(e) => {
                counterexample = Some(Counterexample {
                    case: "newton".to_string(),
                    sample: i,
                    detail: format!("y = {}\nx = {}\n{e}", fmt_vec(&y), fmt_vec(&primal.grad)),
                });
                break;
            }
        };
        let n = y.len();
        for d in 0..n {
            if (dual.grad[d] - y[d]).abs() > 1e-10 {
                counterexample = Some(Counterexample {
                    case: "gradient_round_trip".to_string(),
                    sample: i,
                    detail: format!(
                        "y = {}\nx = {}\nrecovered = {}",
                        fmt_vec(&y),
                        fmt_vec(&primal.grad),
                        fmt_vec(&dual.grad)
                    ),
                });
                break 'stream;
            }
        }
        for r in 0..n {
            for c in 0..n {
                let mut entry = 0.0;
                for q in 0..n {
                    entry += dual.hess[r][q] * primal.hess[q][c];
                }
                let want = if r == c { 1.0 } else { 0.0 };
                if (entry - want).abs() > 1e-8 {
                    counterexample = Some(Counterexample {
                        case: "hessian_inverse".to_string(),
                        sample: i,
                        detail: format!(
                            "y = {}\n(D2f . D2h)[{r}][{c}] = {entry:e}, want {want}",
                            fmt_vec(&y)
                        ),
                    });
                    break 'stream;
                }
            }
        }
    }
    SuiteReport {
        suite: "legendre".to_string(),
        seed,
        samples: ran,
        counterexample,
    }
}
