//! Workspace acceptance gates, one test per gate in release order.
//!
//! Geometry is held against closed-form intersection numbers, the dual flow
//! against transport oracles, the property suites run at full sample
//! budgets, and every binary subcommand is re-run for byte-identical
//! output.  Wall-clock ceilings are generous; blowing one means an
//! algorithmic regression, not a slow machine.

use std::path::Path;
use std::process::{Command, Output};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jtoric::{
    convexity_suite, eps_thresholds, hamiltonian_spec, intersection_constants, legendre_suite,
    product_solution, rat, rat_int, regmax_suite, residual_field, solve_1d_transport,
    solve_dual_flow, split_product, FlowTrace, KahlerClassPair, PotentialGrid, ProblemSpec, Rat,
    SolveOptions, Termination, TraceRecord,
};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_jtoric"))
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

fn p2_problem(alpha_apex: &str) -> String {
    format!(
        r#"version = 1
[fan]
normals = [[1, 0], [0, 1], [-1, -1]]
[classes]
offsets_beta = ["0", "0", "1"]
offsets_alpha = ["0", "0", "{alpha_apex}"]
[hamiltonian]
a_v = ["1", "0"]
"#
    )
}

const BENCH_1D_PROBLEM: &str = r#"version = 1
[fan]
normals = [[1], [-1]]
[classes]
offsets_beta = ["0", "1"]
offsets_alpha = ["0", "2"]
[hamiltonian]
a_v = ["1"]
"#;

/// Verdict as a function of the alpha simplex size flips exactly at 1/3,
/// and the flip point itself fails because positivity must be strict.
#[test]
fn a01_p2_check_verdict_flips_at_one_third() {
    let dir = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let mut verdicts = Vec::new();
    for (name, apex) in [("lo", "33/100"), ("mid", "1/3"), ("hi", "34/100")] {
        let path = dir.path().join(format!("{name}.toml"));
        std::fs::write(&path, p2_problem(apex)).unwrap();
        let out_dir = dir.path().join(name);
        let out = run(bin().arg("check").arg(&path).arg("--out").arg(&out_dir));
        verdicts.push((apex, code(&out), out_dir));
    }
    let elapsed = start.elapsed();

    assert_eq!(verdicts[0].1, 3, "33/100 must FAIL");
    assert_eq!(verdicts[1].1, 3, "1/3 must FAIL: zero is not strict");
    assert_eq!(verdicts[2].1, 0, "34/100 must PASS");
    let mid_json = String::from_utf8(read(&verdicts[1].2, "report.json")).unwrap();
    assert!(
        mid_json.contains("\"sign\": \"0\""),
        "flip point must exhibit an exactly-zero face value"
    );
    assert!(elapsed < Duration::from_secs(1), "scan took {elapsed:?}");
    println!("[PASS] P2 verdict scan: FAIL, FAIL (zero face), PASS in {elapsed:?}");
}

fn rand_offsets(rng: &mut ChaCha8Rng, count: usize) -> Vec<Rat> {
    (0..count)
        .map(|_| rat(rng.gen_range(1..=24), rng.gen_range(1..=8)))
        .collect()
}

/// Sum over axes of alpha width / beta width; for the simplex the single
/// size parameter is the offset sum and the formula collapses to n·a/s.
fn box_oracle(alpha: &[Rat], beta: &[Rat]) -> Rat {
    alpha
        .chunks(2)
        .zip(beta.chunks(2))
        .map(|(a, b)| (&a[0] + &a[1]) / (&b[0] + &b[1]))
        .sum()
}

fn simplex_oracle(n: i64, alpha: &[Rat], beta: &[Rat]) -> Rat {
    let a: Rat = alpha.iter().sum();
    let s: Rat = beta.iter().sum();
    rat_int(n) * a / s
}

/// The mixed-volume derivative reproduces closed-form intersection numbers
/// on the three product/simplex fans, exactly, for random rational offsets;
/// equal classes give c_X = n on the nose.
#[test]
fn a02_intersection_constants_match_closed_forms() {
    let fans: [(&str, Vec<Vec<i64>>); 3] = [
        ("p2", vec![vec![1, 0], vec![0, 1], vec![-1, -1]]),
        (
            "p1xp1",
            vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
        ),
        (
            "cube",
            vec![
                vec![1, 0, 0],
                vec![-1, 0, 0],
                vec![0, 1, 0],
                vec![0, -1, 0],
                vec![0, 0, 1],
                vec![0, 0, -1],
            ],
        ),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(20260814);
    let start = Instant::now();
    for i in 0..100 {
        let (name, normals) = &fans[i % 3];
        let n = normals[0].len();
        let beta = rand_offsets(&mut rng, normals.len());
        let alpha = if i % 4 == 0 {
            beta.clone()
        } else {
            rand_offsets(&mut rng, normals.len())
        };
        let pair = KahlerClassPair::new(n, normals.clone(), alpha.clone(), beta.clone())
            .unwrap_or_else(|e| panic!("{name} sample {i}: {e}"));
        let c_x = intersection_constants(&pair).unwrap().c_x;
        let want = match *name {
            "p2" => simplex_oracle(n as i64, &alpha, &beta),
            _ => box_oracle(&alpha, &beta),
        };
        assert_eq!(c_x, want, "{name} sample {i}: alpha {alpha:?} beta {beta:?}");
        if i % 4 == 0 {
            assert_eq!(c_x, rat_int(n as i64), "{name} sample {i}: equal classes");
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!("[PASS] c_X closed forms: 100 random offset pairs, exact, in {elapsed:?}");
}

struct BenchRun {
    trace: FlowTrace,
    final_sup: f64,
    deep_err: f64,
    elapsed: Duration,
}

fn deep_error(grid: &PotentialGrid, mut oracle: impl FnMut(&[f64]) -> f64) -> f64 {
    let mut worst = 0.0f64;
    for &flat in grid.active() {
        if grid.depth(flat) >= 0.1 {
            let y = grid.point(flat);
            worst = worst.max((grid.h_value(flat).unwrap() - oracle(&y)).abs());
        }
    }
    worst
}

static BENCH_1D: OnceLock<BenchRun> = OnceLock::new();

/// P_beta = [0,1], L_alpha = 2, a_v = 1, c = 2 (so b = 0), grid 257,
/// margin 1/50.  The tolerance is pushed to 1e-8 so the flow does real
/// work instead of accepting the oracle's own discretization residual.
fn bench_1d() -> &'static BenchRun {
    BENCH_1D.get_or_init(|| {
        let spec = ProblemSpec::from_intervals(
            (rat_int(0), rat_int(1)),
            (rat_int(0), rat_int(2)),
            rat_int(1),
            Some(rat_int(2)),
        )
        .unwrap();
        let oracle = solve_1d_transport(&spec).unwrap();
        let mut grid = PotentialGrid::new(&spec, 257, 1.0 / 50.0).unwrap();
        grid.load_potential(|y| oracle.h(y[0])).unwrap();
        let opts = SolveOptions {
            tol: 1e-8,
            ..SolveOptions::default()
        };
        let start = Instant::now();
        let trace = solve_dual_flow(&spec, &mut grid, &opts).unwrap();
        let elapsed = start.elapsed();
        BenchRun {
            final_sup: trace.final_record().sup_residual,
            deep_err: deep_error(&grid, |y| oracle.h(y[0])),
            trace,
            elapsed,
        }
    })
}

#[test]
fn a03_one_dimensional_flow_matches_transport_oracle() {
    let run = bench_1d();
    assert!(
        matches!(run.trace.termination, Termination::Converged),
        "termination: {}",
        run.trace.termination
    );
    assert!(run.final_sup <= 1e-6, "sup residual {:e}", run.final_sup);
    assert!(run.deep_err <= 1e-4, "deep interior error {:e}", run.deep_err);
    assert!(run.elapsed < Duration::from_secs(30), "took {:?}", run.elapsed);
    println!(
        "[PASS] 1d benchmark: sup {:.2e}, deep err {:.2e}, {} steps in {:?}",
        run.final_sup, run.deep_err, run.trace.accepted_steps, run.elapsed
    );
}

struct Bench2D {
    run: BenchRun,
    oracle_sups: [f64; 3],
}

static BENCH_2D: OnceLock<Bench2D> = OnceLock::new();

/// P1xP1 with L_alpha = (2,1), L_beta = (1,1), a_v = (1,0), c = c_X = 3.
fn bench_2d_spec() -> ProblemSpec {
    let pair = KahlerClassPair::new(
        2,
        vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]],
        vec![rat_int(0), rat_int(2), rat_int(0), rat_int(1)],
        vec![rat_int(0), rat_int(1), rat_int(0), rat_int(1)],
    )
    .unwrap();
    let ham = hamiltonian_spec(vec![rat_int(1), rat_int(0)], &pair).unwrap();
    ProblemSpec::new(pair, ham, None).unwrap()
}

fn bench_2d() -> &'static Bench2D {
    BENCH_2D.get_or_init(|| {
        let spec = bench_2d_spec();
        let (p1, p2) = split_product(&spec).unwrap();
        let oracle = product_solution(&p1, &p2).unwrap();
        let start = Instant::now();
        let mut oracle_sups = [0.0f64; 3];
        for (k, nodes) in [33usize, 65, 129].into_iter().enumerate() {
            let mut grid = PotentialGrid::new(&spec, nodes, 1.0 / 50.0).unwrap();
            grid.load_potential(|y| oracle.h(y)).unwrap();
            oracle_sups[k] = residual_field(&spec, &grid).unwrap().sup;
        }
        let mut grid = PotentialGrid::new(&spec, 129, 1.0 / 50.0).unwrap();
        grid.load_potential(|y| oracle.h(y)).unwrap();
        let opts = SolveOptions {
            tol: 2e-7,
            trace_every: 500,
            ..SolveOptions::default()
        };
        let trace = solve_dual_flow(&spec, &mut grid, &opts).unwrap();
        let elapsed = start.elapsed();
        Bench2D {
            run: BenchRun {
                final_sup: trace.final_record().sup_residual,
                deep_err: deep_error(&grid, |y| oracle.h(y)),
                trace,
                elapsed,
            },
            oracle_sups,
        }
    })
}

#[test]
fn a04_product_benchmark_second_order_and_flow() {
    let bench = bench_2d();
    let [r33, r65, r129] = bench.oracle_sups;
    let q1 = r33 / r65;
    let q2 = r65 / r129;
    assert!(
        (3.5..=4.5).contains(&q1) && (3.5..=4.5).contains(&q2),
        "Richardson quotients {q1:.3}, {q2:.3} (sups {r33:e}, {r65:e}, {r129:e})"
    );
    let run = &bench.run;
    assert!(
        matches!(run.trace.termination, Termination::Converged),
        "termination: {}",
        run.trace.termination
    );
    assert!(run.final_sup <= 1e-4, "sup residual {:e}", run.final_sup);
    assert!(run.deep_err <= 1e-3, "deep interior error {:e}", run.deep_err);
    assert!(run.elapsed < Duration::from_secs(600), "took {:?}", run.elapsed);
    println!(
        "[PASS] 2d product benchmark: quotients {q1:.2}, {q2:.2}; flow sup {:.2e}, deep err {:.2e} in {:?}",
        run.final_sup, run.deep_err, run.elapsed
    );
}

fn assert_monotone(records: &[TraceRecord], label: &str) {
    assert!(records.len() >= 2, "{label}: trace has a single record");
    for w in records.windows(2) {
        assert!(
            w[1].energy <= w[0].energy * (1.0 + 1e-8),
            "{label}: energy rose {:e} -> {:e} at step {}",
            w[0].energy,
            w[1].energy,
            w[1].step
        );
        assert!(
            w[1].delta_j <= w[0].delta_j,
            "{label}: delta_j rose {:e} -> {:e} at step {}",
            w[0].delta_j,
            w[1].delta_j,
            w[1].step
        );
    }
}

#[test]
fn a05_flow_energy_and_functional_monotone() {
    let one = bench_1d();
    let two = bench_2d();
    assert_monotone(&one.trace.records, "1d benchmark");
    assert_monotone(&two.run.trace.records, "2d benchmark");
    println!(
        "[PASS] energy/delta_J monotone over {} + {} recorded rows",
        one.trace.records.len(),
        two.run.trace.records.len()
    );
}

#[test]
fn a06_convexity_suite_full_budget() {
    let start = Instant::now();
    let report = convexity_suite(1729, 10_000);
    let elapsed = start.elapsed();
    assert!(report.passed(), "counterexample: {:?}", report.counterexample);
    assert_eq!(report.samples, 10_000);
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!("[PASS] convexity suite: 10^4 samples clean in {elapsed:?}");
}

#[test]
fn a07_threshold_formulas_exact() {
    let t = eps_thresholds(1.0, 2, 1.0);
    assert_eq!(t.eps3, 0.125);
    assert_eq!(t.eps4, 1.0);
    for c_theta in [0.3, 0.7, 1.0, 2.0] {
        assert_eq!(eps_thresholds(2.0, 3, c_theta).eps4, 0.25);
    }
    println!("[PASS] thresholds: eps3(1,2,1) = 0.125, eps4(1,2,1) = 1, eps4(2,3,*) = 0.25");
}

#[test]
fn a08_legendre_round_trip_full_budget() {
    let report = legendre_suite(271828, 1_000);
    assert!(report.passed(), "counterexample: {:?}", report.counterexample);
    assert_eq!(report.samples, 1_000);
    println!("[PASS] legendre round trip: 10^3 interior points clean");
}

#[test]
fn a09_regmax_suite_full_budget() {
    let report = regmax_suite(314159, 10_000);
    assert!(report.passed(), "counterexample: {:?}", report.counterexample);
    assert_eq!(report.samples, 10_000);
    println!("[PASS] regmax suite: 10^4 samples clean");
}

/// Every subcommand twice with identical inputs; artifacts must agree byte
/// for byte.  Output directories differ so path echoes must not leak into
/// the artifacts themselves.
#[test]
fn a10_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let p2 = dir.path().join("p2.toml");
    std::fs::write(&p2, p2_problem("1")).unwrap();
    let b1 = dir.path().join("bench1d.toml");
    std::fs::write(&b1, BENCH_1D_PROBLEM).unwrap();

    let v1 = run(bin().arg("validate").arg(&p2));
    let v2 = run(bin().arg("validate").arg(&p2));
    assert_eq!(code(&v1), 0);
    assert_eq!(v1.stdout, v2.stdout, "validate stdout drifted");

    let (ca, cb) = (dir.path().join("ca"), dir.path().join("cb"));
    for out in [&ca, &cb] {
        let o = run(bin().arg("check").arg(&p2).arg("--out").arg(out));
        assert_eq!(code(&o), 0);
    }
    for name in ["report.json", "report.txt"] {
        assert_eq!(read(&ca, name), read(&cb, name), "check {name} drifted");
    }

    let (sa, sb) = (dir.path().join("sa"), dir.path().join("sb"));
    for out in [&sa, &sb] {
        let o = run(bin()
            .arg("solve")
            .arg(&b1)
            .args(["--grid", "65"])
            .arg("--out")
            .arg(out));
        assert_eq!(code(&o), 0);
    }
    for name in ["report.json", "report.txt", "trace.csv", "grid.csv"] {
        assert_eq!(read(&sa, name), read(&sb, name), "solve {name} drifted");
    }

    let (la, lb) = (dir.path().join("la"), dir.path().join("lb"));
    for out in [&la, &lb] {
        let o = run(bin()
            .args(["lab", "regmax", "--seed", "9", "--samples", "400"])
            .arg("--out")
            .arg(out));
        assert_eq!(code(&o), 0);
    }
    assert_eq!(read(&la, "lab.json"), read(&lb, "lab.json"), "lab.json drifted");

    println!("[PASS] validate/check/solve/lab reruns byte-identical");
}
