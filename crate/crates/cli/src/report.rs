//! Run reports. `check` and `solve` share one structure, rendered as
//! aligned text for the terminal and as JSON whose field order is fixed
//! by declaration, so identical inputs produce identical bytes. Every
//! rational appears twice: exactly, and as a 20-digit decimal.

use jtoric::criterion::{CriterionReport, FailWitness};
use jtoric::polytope::Facet;
use jtoric::rat::{decimal_string, rat_string, Rat};
use jtoric::solver::{FlowTrace, PotentialGrid, ProblemSpec, ResidualField};
use jtoric::{intersection_constants, theta_extrema, KahlerClassPair, NodeClass};
use num::{One, Signed, Zero};
use serde::Serialize;

use crate::problem::ProblemFile;

#[derive(Debug, Clone, Serialize)]
pub struct RatEntry {
    pub exact: String,
    pub decimal: String,
}

pub fn rat_entry(x: &Rat) -> RatEntry {
    RatEntry {
        exact: rat_string(x),
        decimal: decimal_string(x, 20),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemEcho {
    pub file: String,
    pub dim: usize,
    pub normals: Vec<Vec<i64>>,
    pub offsets_beta: Vec<String>,
    pub offsets_alpha: Vec<String>,
    pub a_v: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstantsBlock {
    pub c_x: RatEntry,
    /// Equation constant actually used (c_X unless overridden).
    pub c: RatEntry,
    pub b: RatEntry,
    pub m_x: RatEntry,
    pub c_theta: RatEntry,
}

#[derive(Debug, Clone, Serialize)]
pub struct FaceRow {
    pub facets: Vec<usize>,
    pub equations: String,
    pub dim: usize,
    pub c_term: RatEntry,
    pub theta_term: RatEntry,
    pub mixed_term: RatEntry,
    pub value: RatEntry,
    pub sign: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionBlock {
    pub m_x_positive: bool,
    pub faces: Vec<FaceRow>,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverBlock {
    pub grid: usize,
    pub margin: String,
    pub tol: f64,
    pub max_steps: u64,
    pub initialization: String,
    pub termination: String,
    pub converged: bool,
    pub accepted_steps: u64,
    pub final_sup_residual: f64,
    pub final_l2_residual: f64,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Along recorded rows, with 1e-8 relative slack.
    pub energy_monotone: bool,
    pub delta_j: f64,
    pub trace_rows: usize,
    pub trace_csv: String,
    pub snapshot_csv: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub verdict: String,
    pub problem: ProblemEcho,
    pub constants: ConstantsBlock,
    pub criterion: CriterionBlock,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverBlock>,
}

/// The facet's defining equation `⟨u, y⟩ + λ = 0` in the variables y1..yn.
pub fn facet_equation(facet: &Facet) -> String {
    let mut s = String::new();
    for (i, c) in facet.normal.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if s.is_empty() {
            if c.is_negative() {
                s.push('-');
            }
        } else {
            s.push_str(if c.is_negative() { " - " } else { " + " });
        }
        let mag = c.abs();
        if !mag.is_one() {
            s.push_str(&format!("{mag}*"));
        }
        s.push_str(&format!("y{}", i + 1));
    }
    let offset = &facet.offset;
    if s.is_empty() {
        s = rat_string(offset);
    } else if offset.is_negative() {
        s.push_str(&format!(" - {}", rat_string(&-offset.clone())));
    } else if !offset.is_zero() {
        s.push_str(&format!(" + {}", rat_string(offset)));
    }
    format!("{s} = 0")
}

fn face_label(pair: &KahlerClassPair, facets: &[usize]) -> String {
    let eqs: Vec<String> = facets
        .iter()
        .map(|&i| facet_equation(&pair.beta().facets()[i]))
        .collect();
    format!("{{{}}}", eqs.join(", "))
}

fn sign_of(x: &Rat) -> String {
    if x.is_positive() {
        "+".to_string()
    } else if x.is_zero() {
        "0".to_string()
    } else {
        "-".to_string()
    }
}

pub fn problem_echo(path: &str, file: &ProblemFile, seed: Option<u64>) -> ProblemEcho {
    ProblemEcho {
        file: path.to_string(),
        dim: file.fan.normals[0].len(),
        normals: file.fan.normals.clone(),
        offsets_beta: file.offsets_beta().iter().map(rat_string).collect(),
        offsets_alpha: file.offsets_alpha().iter().map(rat_string).collect(),
        a_v: file.a_v().iter().map(rat_string).collect(),
        seed,
    }
}

pub fn constants_block(spec: &ProblemSpec) -> ConstantsBlock {
    let consts = intersection_constants(spec.pair()).expect("pair already validated");
    let extrema = theta_extrema(spec.ham(), spec.pair()).expect("pair already validated");
    ConstantsBlock {
        c_x: rat_entry(&consts.c_x),
        c: rat_entry(spec.c()),
        b: rat_entry(spec.b()),
        m_x: rat_entry(&extrema.m_x),
        c_theta: rat_entry(&extrema.c_theta),
    }
}

pub fn criterion_block(pair: &KahlerClassPair, report: &CriterionReport) -> CriterionBlock {
    let faces = report
        .faces
        .iter()
        .map(|f| {
            let facets: Vec<usize> = f.facets.iter().copied().collect();
            FaceRow {
                equations: face_label(pair, &facets),
                facets,
                dim: f.dim,
                c_term: rat_entry(&f.c_term),
                theta_term: rat_entry(&f.theta_term),
                mixed_term: rat_entry(&f.mixed_term),
                value: rat_entry(&f.value),
                sign: sign_of(&f.value),
            }
        })
        .collect();
    let witness = report.witness.as_ref().map(|w| match w {
        FailWitness::MinTheta => "m_X = c_X + min A_c is not positive".to_string(),
        FailWitness::Face { facets } => {
            let facets: Vec<usize> = facets.iter().copied().collect();
            format!("face {} has nonpositive value", face_label(pair, &facets))
        }
    });
    CriterionBlock {
        m_x_positive: report.m_x.is_positive(),
        faces,
        pass: report.pass,
        witness,
    }
}

/// `E` non-increase along recorded rows, with 1e-8 relative slack.
pub fn energy_monotone(trace: &FlowTrace) -> bool {
    trace
        .records
        .windows(2)
        .all(|w| w[1].energy <= w[0].energy * (1.0 + 1e-8))
}

/// Two-space separated columns padded to their widest entry.
fn render_table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut width = vec![0usize; cols];
    for row in rows {
        for (j, cell) in row.iter().enumerate() {
            width[j] = width[j].max(cell.len());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::new();
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                line.push_str("  ");
            }
            line.push_str(cell);
            for _ in cell.len()..width[j] {
                line.push(' ');
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

impl RunReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let echo = &self.problem;
        out.push_str("problem\n");
        let normals: Vec<String> = echo.normals.iter().map(|r| format!("{r:?}")).collect();
        let mut rows = vec![
            vec!["  file".to_string(), echo.file.clone()],
            vec!["  dimension".to_string(), echo.dim.to_string()],
            vec!["  normals".to_string(), normals.join(" ")],
            vec!["  offsets_beta".to_string(), echo.offsets_beta.join(", ")],
            vec!["  offsets_alpha".to_string(), echo.offsets_alpha.join(", ")],
            vec!["  a_v".to_string(), echo.a_v.join(", ")],
        ];
        if let Some(seed) = echo.seed {
            rows.push(vec!["  seed".to_string(), seed.to_string()]);
        }
        out.push_str(&render_table(&rows));

        out.push_str("\nconstants\n");
        let c = &self.constants;
        let rows = vec![
            vec!["  c_X".to_string(), c.c_x.exact.clone(), c.c_x.decimal.clone()],
            vec!["  c".to_string(), c.c.exact.clone(), c.c.decimal.clone()],
            vec!["  b".to_string(), c.b.exact.clone(), c.b.decimal.clone()],
            vec!["  m_X".to_string(), c.m_x.exact.clone(), c.m_x.decimal.clone()],
            vec![
                "  C_theta".to_string(),
                c.c_theta.exact.clone(),
                c.c_theta.decimal.clone(),
            ],
        ];
        out.push_str(&render_table(&rows));

        out.push_str("\ncriterion\n");
        if self.criterion.faces.is_empty() {
            out.push_str("  no proper faces of dimension 1..n-1 (n = 1)\n");
        } else {
            let mut rows = vec![vec![
                "  face".to_string(),
                "p".to_string(),
                "c_X*Vol".to_string(),
                "integral".to_string(),
                "V1".to_string(),
                "value".to_string(),
                "sign".to_string(),
            ]];
            for f in &self.criterion.faces {
                rows.push(vec![
                    format!("  {}", f.equations),
                    f.dim.to_string(),
                    f.c_term.exact.clone(),
                    f.theta_term.exact.clone(),
                    f.mixed_term.exact.clone(),
                    f.value.exact.clone(),
                    f.sign.clone(),
                ]);
            }
            out.push_str(&render_table(&rows));
        }
        out.push_str(&format!(
            "  m_X positive: {}\n",
            if self.criterion.m_x_positive { "yes" } else { "no" }
        ));
        if let Some(w) = &self.criterion.witness {
            out.push_str(&format!("  witness: {w}\n"));
        }
        out.push_str(&format!(
            "  criterion: {}\n",
            if self.criterion.pass { "PASS" } else { "FAIL" }
        ));

        if let Some(s) = &self.solver {
            out.push_str("\nsolver\n");
            let rows = vec![
                vec![
                    "  grid".to_string(),
                    format!("{} nodes per axis, margin {}", s.grid, s.margin),
                ],
                vec![
                    "  options".to_string(),
                    format!("tol {:e}, max_steps {}", s.tol, s.max_steps),
                ],
                vec!["  initialization".to_string(), s.initialization.clone()],
                vec!["  termination".to_string(), s.termination.clone()],
                vec!["  accepted steps".to_string(), s.accepted_steps.to_string()],
                vec![
                    "  final residual".to_string(),
                    format!("sup {:e}, l2 {:e}", s.final_sup_residual, s.final_l2_residual),
                ],
                vec![
                    "  energy".to_string(),
                    format!(
                        "{:e} -> {:e}, {} along recorded rows",
                        s.initial_energy,
                        s.final_energy,
                        if s.energy_monotone {
                            "non-increasing"
                        } else {
                            "NOT monotone"
                        }
                    ),
                ],
                vec!["  delta_J".to_string(), format!("{:e}", s.delta_j)],
                vec![
                    "  trace".to_string(),
                    format!("{} ({} rows)", s.trace_csv, s.trace_rows),
                ],
                vec!["  snapshot".to_string(), s.snapshot_csv.clone()],
            ];
            out.push_str(&render_table(&rows));
        }

        out.push_str(&format!("\nverdict: {}\n", self.verdict));
        out
    }

    pub fn render_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Trace CSV, one row per recorded flow step.
pub fn trace_csv(trace: &FlowTrace) -> String {
    let mut out = String::from("step,t,dt,res_sup,res_l2,E,dJ\n");
    for r in &trace.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.step, r.time, r.dt, r.sup_residual, r.l2_residual, r.energy, r.delta_j
        ));
    }
    out
}

/// Final grid snapshot, one row per active node in flat order. Ring
/// nodes carry no residual (they are Dirichlet data, not unknowns).
pub fn snapshot_csv(grid: &PotentialGrid, field: &ResidualField) -> String {
    let n = grid.dim();
    let mut residual = vec![None; grid.u().len()];
    for (k, &flat) in grid.interior().iter().enumerate() {
        residual[flat] = Some(field.values[k]);
    }
    let mut out = String::new();
    for d in 0..n {
        out.push_str(&format!("y{},", d + 1));
    }
    out.push_str("class,u,h,residual\n");
    for &flat in grid.active() {
        let y = grid.point(flat);
        for v in &y {
            out.push_str(&format!("{v},"));
        }
        let class = match grid.class(flat) {
            NodeClass::Interior => "interior",
            NodeClass::Ring => "ring",
            NodeClass::Exterior => unreachable!("active nodes are never exterior"),
        };
        let h = grid.h_value(flat).expect("active nodes are interior points");
        match residual[flat] {
            Some(r) => out.push_str(&format!("{class},{},{h},{r}\n", grid.u()[flat])),
            None => out.push_str(&format!("{class},{},{h},\n", grid.u()[flat])),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use jtoric::rat::{rat, rat_int};

    fn p2_file() -> ProblemFile {
        toml::from_str(
            r#"
version = 1
[fan]
normals = [[1, 0], [0, 1], [-1, -1]]
[classes]
offsets_beta = ["0", "0", "1"]
offsets_alpha = ["0", "0", "1"]
[hamiltonian]
a_v = ["1", "0"]
"#,
        )
        .unwrap()
    }

    #[test]
    fn facet_equations_render() {
        let eq = |n: Vec<i64>, o: Rat| facet_equation(&Facet::new(n, o));
        assert_eq!(eq(vec![1, 0], rat_int(0)), "y1 = 0");
        assert_eq!(eq(vec![-1, -1], rat_int(1)), "-y1 - y2 + 1 = 0");
        assert_eq!(eq(vec![0, 2], rat(-1, 3)), "2*y2 - 1/3 = 0");
    }

    #[test]
    fn check_report_fields() {
        let file = p2_file();
        let (pair, ham, spec) = file.build().unwrap();
        let criterion = jtoric::check(&pair, &ham).unwrap();
        let report = RunReport {
            command: "check",
            verdict: "PASS".to_string(),
            problem: problem_echo("p2.toml", &file, None),
            constants: constants_block(&spec),
            criterion: criterion_block(&pair, &criterion),
            solver: None,
        };
        assert_eq!(report.constants.c_x.exact, "2");
        assert_eq!(report.constants.b.exact, "0");
        assert_eq!(report.constants.m_x.exact, "5/3");
        assert_eq!(report.constants.m_x.decimal, "1.6666666666666666667");
        assert_eq!(report.criterion.faces.len(), 3);
        assert!(report.criterion.faces.iter().all(|f| f.sign == "+"));

        let text = report.render_text();
        assert!(text.contains("criterion: PASS"));
        assert!(text.contains("{y1 = 0}"));
        let json = report.render_json();
        assert!(json.contains("\"m_x\""));
        // Identical inputs give identical bytes.
        assert_eq!(json, report.render_json());
    }

    #[test]
    fn fail_witness_names_the_facet() {
        let file: ProblemFile = toml::from_str(
            r#"
version = 1
[fan]
normals = [[1, 0], [0, 1], [-1, -1]]
[classes]
offsets_beta = ["0", "0", "1"]
offsets_alpha = ["0", "0", "3/10"]
[hamiltonian]
a_v = ["1", "0"]
"#,
        )
        .unwrap();
        let (pair, ham, _) = file.build().unwrap();
        let criterion = jtoric::check(&pair, &ham).unwrap();
        let block = criterion_block(&pair, &criterion);
        assert!(!block.pass);
        assert_eq!(block.witness.as_deref(), Some("face {y1 = 0} has nonpositive value"));
    }
}
