//! `jtoric`: batch front end for the library. Four subcommands:
//!
//! - `validate`: parse a problem file and check both class polytopes;
//! - `check`: decide solvability and write the full report;
//! - `solve`: run the potential flow (1D/2D) with trace and snapshot CSVs;
//! - `lab`: replay a seeded property suite until a counterexample shows.
//!
//! Exit codes: 0 success/PASS/converged, 1 parse error, 2 invalid input,
//! 3 criterion FAIL (or a solve refused without `--force`),
//! 4 non-convergence, 5 convexity lost, 6 counterexample found.

mod problem;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use jtoric::polytope::Facet;
use jtoric::rat::{parse_rat, rat_string, to_f64};
use jtoric::solver::{
    product_solution, residual_field, solve_1d_transport, solve_dual_flow, split_product,
    PotentialGrid, ProblemSpec, SolverError, Termination,
};
use jtoric::{
    convexity_suite, eps_thresholds, legendre_suite, regmax_suite, threshold_suite,
    validate_delzant, KahlerClassPair, SuiteReport,
};

use problem::{ProblemError, ProblemFile};
use report::{
    constants_block, criterion_block, energy_monotone, problem_echo, snapshot_csv, trace_csv,
    RunReport, SolverBlock,
};

const EXIT_OK: u8 = 0;
const EXIT_PARSE: u8 = 1;
const EXIT_INVALID: u8 = 2;
const EXIT_CRITERION_FAIL: u8 = 3;
const EXIT_NONCONVERGENCE: u8 = 4;
const EXIT_CONVEXITY_LOST: u8 = 5;
const EXIT_COUNTEREXAMPLE: u8 = 6;

#[derive(Parser)]
#[command(name = "jtoric", version, about = "Toric class-pair checks and potential flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a problem file and verify both class polytopes are Delzant.
    Validate { path: PathBuf },
    /// Decide solvability of the class pair and write the report.
    Check {
        path: PathBuf,
        /// Output directory for report.txt and report.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the potential flow and write report, trace and grid snapshot.
    Solve {
        path: PathBuf,
        /// Run even when the solvability criterion fails.
        #[arg(long)]
        force: bool,
        /// Grid nodes per axis (overrides the problem file).
        #[arg(long)]
        grid: Option<usize>,
        /// Active-region margin as a rational, e.g. 1/50.
        #[arg(long)]
        margin: Option<String>,
        /// Stop once the interior sup residual drops below this.
        #[arg(long)]
        tol: Option<f64>,
        /// Output directory for the report and CSV files.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay a seeded property suite; exit 6 on a counterexample.
    Lab {
        suite: Suite,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Sample budget (default: 10000, legendre 1000).
        #[arg(long)]
        samples: Option<usize>,
        /// If set, also write lab.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Convexity,
    Thresholds,
    Regmax,
    Legendre,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Validate { path } => cmd_validate(&path),
        Command::Check { path, out } => cmd_check(&path, out.as_deref()),
        Command::Solve {
            path,
            force,
            grid,
            margin,
            tol,
            out,
        } => cmd_solve(&path, force, grid, margin.as_deref(), tol, out.as_deref()),
        Command::Lab {
            suite,
            seed,
            samples,
            out,
        } => cmd_lab(suite, seed, samples, out.as_deref()),
    };
    ExitCode::from(code)
}

fn load(path: &Path) -> Result<ProblemFile, u8> {
    problem::load(path).map_err(|e| {
        eprintln!("{e}");
        EXIT_PARSE
    })
}

fn build(file: &ProblemFile) -> Result<(KahlerClassPair, jtoric::HamiltonianSpec, ProblemSpec), u8> {
    file.build().map_err(|e| {
        eprintln!("{e}");
        match e {
            ProblemError::Parse(_) => EXIT_PARSE,
            ProblemError::Invalid(_) => EXIT_INVALID,
        }
    })
}

fn cmd_validate(path: &Path) -> u8 {
    let file = match load(path) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let dim = match file.dim() {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_INVALID;
        }
    };
    let mut valid = true;
    for (name, offsets) in [
        ("beta", file.offsets_beta()),
        ("alpha", file.offsets_alpha()),
    ] {
        let facets: Vec<Facet> = file
            .fan
            .normals
            .iter()
            .zip(&offsets)
            .map(|(u, o)| Facet::new(u.clone(), o.clone()))
            .collect();
        println!("[{name} class]");
        match validate_delzant(dim, &facets) {
            Ok(report) => {
                println!("{report}");
                valid &= report.valid;
            }
            Err(e) => {
                println!("violation: {e}");
                println!("verdict: invalid");
                valid = false;
            }
        }
        println!();
    }
    if valid {
        // Same combinatorics on both sides, checked by the pair itself.
        if let Err(e) = KahlerClassPair::new(
            dim,
            file.fan.normals.clone(),
            file.offsets_alpha(),
            file.offsets_beta(),
        ) {
            println!("violation: {e}");
            valid = false;
        }
    }
    println!("problem: {}", if valid { "valid" } else { "invalid" });
    if valid {
        EXIT_OK
    } else {
        EXIT_INVALID
    }
}

fn out_dir(flag: Option<&Path>, file: &ProblemFile) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| file.output.dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, u8> {
    if let Err(e) = std::fs::create_dir_all(dir) {
        eprintln!("cannot create {}: {e}", dir.display());
        return Err(EXIT_INVALID);
    }
    let path = dir.join(name);
    if let Err(e) = std::fs::write(&path, contents) {
        eprintln!("cannot write {}: {e}", path.display());
        return Err(EXIT_INVALID);
    }
    Ok(path)
}

fn emit_report(report: &RunReport, dir: &Path) -> Result<(), u8> {
    write_file(dir, "report.txt", &report.render_text())?;
    write_file(dir, "report.json", &report.render_json())?;
    print!("{}", report.render_text());
    println!("wrote {}", dir.join("report.txt").display());
    println!("wrote {}", dir.join("report.json").display());
    Ok(())
}

fn cmd_check(path: &Path, out: Option<&Path>) -> u8 {
    let file = match load(path) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let (pair, ham, spec) = match build(&file) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let criterion = match jtoric::check(&pair, &ham) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("invalid problem: {e}");
            return EXIT_INVALID;
        }
    };
    let report = RunReport {
        command: "check",
        verdict: if criterion.pass { "PASS" } else { "FAIL" }.to_string(),
        problem: problem_echo(&path.display().to_string(), &file, file.solver.seed),
        constants: constants_block(&spec),
        criterion: criterion_block(&pair, &criterion),
        solver: None,
    };
    if let Err(code) = emit_report(&report, &out_dir(out, &file)) {
        return code;
    }
    if criterion.pass {
        EXIT_OK
    } else {
        EXIT_CRITERION_FAIL
    }
}

/// Seeds the grid from the best closed-form data available: the 1D
/// transport solution, a separable product of two of them, or the
/// canonical potential (u = 0) when no oracle applies.
fn initialize(spec: &ProblemSpec, grid: &mut PotentialGrid) -> Result<&'static str, SolverError> {
    if spec.dim() == 1 {
        if let Ok(oracle) = solve_1d_transport(spec) {
            grid.load_potential(|y| oracle.h(y[0]))?;
            return Ok("1d transport oracle");
        }
    } else if let Ok((first, second)) = split_product(spec) {
        if let Ok(product) = product_solution(&first, &second) {
            grid.load_potential(|y| product.h(y))?;
            return Ok("product transport oracle");
        }
    }
    Ok("canonical potential")
}

fn solve_error_code(e: &SolverError) -> u8 {
    match e {
        SolverError::InfeasibleTransport(_)
        | SolverError::Config(_)
        | SolverError::DimensionUnsupported(_)
        | SolverError::Geometry(_) => EXIT_INVALID,
        SolverError::ConvexityLost { .. } => EXIT_CONVEXITY_LOST,
        SolverError::BoundaryOrExterior(_)
        | SolverError::NewtonDiverged(_)
        | SolverError::EndpointMismatch { .. }
        | SolverError::NotSeparable => EXIT_NONCONVERGENCE,
    }
}

fn cmd_solve(
    path: &Path,
    force: bool,
    grid_flag: Option<usize>,
    margin_flag: Option<&str>,
    tol_flag: Option<f64>,
    out: Option<&Path>,
) -> u8 {
    let file = match load(path) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let (pair, ham, spec) = match build(&file) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let criterion = match jtoric::check(&pair, &ham) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("invalid problem: {e}");
            return EXIT_INVALID;
        }
    };
    let dir = out_dir(out, &file);
    let echo = problem_echo(&path.display().to_string(), &file, file.solver.seed);

    if !criterion.pass && !force {
        let report = RunReport {
            command: "solve",
            verdict: "refused: solvability criterion FAILs (rerun with --force to override)"
                .to_string(),
            problem: echo,
            constants: constants_block(&spec),
            criterion: criterion_block(&pair, &criterion),
            solver: None,
        };
        if let Err(code) = emit_report(&report, &dir) {
            return code;
        }
        return EXIT_CRITERION_FAIL;
    }

    let nodes = grid_flag.unwrap_or_else(|| file.grid_nodes());
    let margin = match margin_flag {
        Some(s) => match parse_rat(s) {
            Ok(m) => m,
            Err(e) => {
                eprintln!("--margin: {e}");
                return EXIT_INVALID;
            }
        },
        None => file.margin(),
    };
    let mut opts = file.solve_options();
    if let Some(tol) = tol_flag {
        opts.tol = tol;
    }

    let mut grid = match PotentialGrid::new(&spec, nodes, to_f64(&margin)) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("{e}");
            return solve_error_code(&e);
        }
    };
    let initialization = match initialize(&spec, &mut grid) {
        Ok(name) => name,
        Err(e) => {
            eprintln!("{e}");
            return solve_error_code(&e);
        }
    };
    let trace = match solve_dual_flow(&spec, &mut grid, &opts) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            return solve_error_code(&e);
        }
    };
    let field = match residual_field(&spec, &grid) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            return solve_error_code(&e);
        }
    };

    let trace_text = trace_csv(&trace);
    let snapshot_text = snapshot_csv(&grid, &field);
    if let Err(code) = write_file(&dir, "trace.csv", &trace_text) {
        return code;
    }
    if let Err(code) = write_file(&dir, "grid.csv", &snapshot_text) {
        return code;
    }

    let final_rec = trace.final_record();
    let solver = SolverBlock {
        grid: nodes,
        margin: rat_string(&margin),
        tol: opts.tol,
        max_steps: opts.max_steps,
        initialization: initialization.to_string(),
        termination: trace.termination.to_string(),
        converged: trace.termination.converged(),
        accepted_steps: trace.accepted_steps,
        final_sup_residual: final_rec.sup_residual,
        final_l2_residual: final_rec.l2_residual,
        initial_energy: trace.records[0].energy,
        final_energy: final_rec.energy,
        energy_monotone: energy_monotone(&trace),
        delta_j: final_rec.delta_j,
        trace_rows: trace.records.len(),
        // File names only: the report lives next to them and stays
        // byte-identical regardless of where the run directory sits.
        trace_csv: "trace.csv".to_string(),
        snapshot_csv: "grid.csv".to_string(),
    };
    let report = RunReport {
        command: "solve",
        verdict: trace.termination.to_string(),
        problem: echo,
        constants: constants_block(&spec),
        criterion: criterion_block(&pair, &criterion),
        solver: Some(solver),
    };
    if let Err(code) = emit_report(&report, &dir) {
        return code;
    }
    println!("wrote {}", dir.join("trace.csv").display());
    println!("wrote {}", dir.join("grid.csv").display());
    match trace.termination {
        Termination::Converged => EXIT_OK,
        Termination::MaxSteps | Termination::StalledStep => EXIT_NONCONVERGENCE,
        Termination::ConvexityLost { .. } => EXIT_CONVEXITY_LOST,
    }
}

fn lab_text(report: &SuiteReport) -> String {
    let mut out = format!(
        "suite {}\nseed {}\nsamples {}\n",
        report.suite, report.seed, report.samples
    );
    if report.suite == "thresholds" {
        let t = eps_thresholds(1.0, 2, 1.0);
        out.push_str("thresholds at K = 1, n = 2, C_theta = 1:\n");
        out.push_str(&format!("  eps1 = {}\n", t.eps1));
        out.push_str(&format!("  eps3 = {}\n", t.eps3));
        out.push_str(&format!("  eps4 = {}\n", t.eps4));
    }
    match &report.counterexample {
        None => out.push_str("result: pass\n"),
        Some(ce) => {
            out.push_str(&format!(
                "counterexample at sample {}, case {}:\n",
                ce.sample, ce.case
            ));
            for line in ce.detail.lines() {
                out.push_str(&format!("  {line}\n"));
            }
            out.push_str("result: counterexample found\n");
        }
    }
    out
}

fn cmd_lab(suite: Suite, seed: u64, samples: Option<usize>, out: Option<&Path>) -> u8 {
    let report = match suite {
        Suite::Convexity => convexity_suite(seed, samples.unwrap_or(10_000)),
        Suite::Thresholds => threshold_suite(),
        Suite::Regmax => regmax_suite(seed, samples.unwrap_or(10_000)),
        Suite::Legendre => legendre_suite(seed, samples.unwrap_or(1_000)),
    };
    print!("{}", lab_text(&report));
    if let Some(dir) = out {
        let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
        json.push('\n');
        match write_file(dir, "lab.json", &json) {
            Ok(p) => println!("wrote {}", p.display()),
            Err(code) => return code,
        }
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_COUNTEREXAMPLE
    }
}
