//! Problem files: one self-describing TOML document per run, holding the
//! fan, the two offset vectors, the hamiltonian direction and the solver
//! knobs. Rationals travel as `"p/q"` strings and are never read through
//! floating point; unknown keys are rejected.
//!
//! ```toml
//! version = 1
//!
//! [fan]
//! normals = [[1, 0], [0, 1], [-1, -1]]
//!
//! [classes]
//! offsets_beta = ["0", "0", "1"]
//! offsets_alpha = ["0", "0", "1"]
//! # optional equation constant, defaults to the pairing constant c_X
//! # c = "3"
//!
//! [hamiltonian]
//! a_v = ["1", "0"]
//!
//! [solver]
//! grid = 129
//! margin = "1/50"
//! tol = 1e-6
//! max_steps = 2000000
//! seed = 42
//!
//! [output]
//! dir = "runs/p2"
//! ```

use std::fmt;
use std::path::Path;

use jtoric::rat::{parse_rat, rat, Rat};
use jtoric::solver::{ProblemSpec, SolveOptions};
use jtoric::{hamiltonian_spec, HamiltonianSpec, KahlerClassPair};
use serde::Deserialize;

/// A rational read losslessly from its string form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatField(pub Rat);

impl<'de> Deserialize<'de> for RatField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s)
            .map(RatField)
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub version: u32,
    pub fan: Fan,
    pub classes: Classes,
    pub hamiltonian: Hamiltonian,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fan {
    /// Primitive inner normals, one row per facet.
    pub normals: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Classes {
    pub offsets_beta: Vec<RatField>,
    pub offsets_alpha: Vec<RatField>,
    /// Equation constant override; `None` means the pairing constant c_X.
    pub c: Option<RatField>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hamiltonian {
    pub a_v: Vec<RatField>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub grid: Option<usize>,
    pub margin: Option<RatField>,
    pub tol: Option<f64>,
    pub max_steps: Option<u64>,
    /// Echoed into reports; the flow itself is deterministic.
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
}

/// Anything that stops a run before the mathematics starts. `Parse`
/// covers unreadable or malformed files (exit 1), `Invalid` covers
/// well-formed files describing an inadmissible problem (exit 2).
#[derive(Debug)]
pub enum ProblemError {
    Parse(String),
    Invalid(String),
}

impl fmt::Display for ProblemError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemError::Parse(m) => write!(f, "parse error: {m}"),
            ProblemError::Invalid(m) => write!(f, "invalid problem: {m}"),
        }
    }
}

pub fn load(path: &Path) -> Result<ProblemFile, ProblemError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ProblemError::Parse(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| ProblemError::Parse(format!("{}:\n{e}", path.display())))
}

impl ProblemFile {
    /// Shape checks that precede any geometry: version tag, consistent
    /// row lengths, matching offset and direction counts.
    pub fn dim(&self) -> Result<usize, ProblemError> {
        if self.version != 1 {
            return Err(ProblemError::Invalid(format!(
                "unsupported version {} (expected 1)",
                self.version
            )));
        }
        let normals = &self.fan.normals;
        let first = normals
            .first()
            .ok_or_else(|| ProblemError::Invalid("fan has no normals".to_string()))?;
        let dim = first.len();
        if let Some(row) = normals.iter().find(|r| r.len() != dim) {
            return Err(ProblemError::Invalid(format!(
                "normal {row:?} does not have length {dim}"
            )));
        }
        for (name, len) in [
            ("offsets_beta", self.classes.offsets_beta.len()),
            ("offsets_alpha", self.classes.offsets_alpha.len()),
        ] {
            if len != normals.len() {
                return Err(ProblemError::Invalid(format!(
                    "{name} has {len} entries for {} facets",
                    normals.len()
                )));
            }
        }
        if self.hamiltonian.a_v.len() != dim {
            return Err(ProblemError::Invalid(format!(
                "a_v has {} entries in dimension {dim}",
                self.hamiltonian.a_v.len()
            )));
        }
        Ok(dim)
    }

    pub fn offsets_beta(&self) -> Vec<Rat> {
        self.classes.offsets_beta.iter().map(|r| r.0.clone()).collect()
    }

    pub fn offsets_alpha(&self) -> Vec<Rat> {
        self.classes.offsets_alpha.iter().map(|r| r.0.clone()).collect()
    }

    pub fn a_v(&self) -> Vec<Rat> {
        self.hamiltonian.a_v.iter().map(|r| r.0.clone()).collect()
    }

    /// Class pair, hamiltonian and equation constants, fully validated.
    pub fn build(&self) -> Result<(KahlerClassPair, HamiltonianSpec, ProblemSpec), ProblemError> {
        self.dim()?;
        let pair = KahlerClassPair::new(
            self.fan.normals[0].len(),
            self.fan.normals.clone(),
            self.offsets_alpha(),
            self.offsets_beta(),
        )
        .map_err(|e| ProblemError::Invalid(e.to_string()))?;
        let ham = hamiltonian_spec(self.a_v(), &pair)
            .map_err(|e| ProblemError::Invalid(e.to_string()))?;
        let c = self.classes.c.as_ref().map(|r| r.0.clone());
        let spec = ProblemSpec::new(pair.clone(), ham.clone(), c)
            .map_err(|e| ProblemError::Invalid(e.to_string()))?;
        Ok((pair, ham, spec))
    }

    /// Solver knobs with the file's values over the built-in defaults;
    /// command-line flags are applied on top by the caller.
    pub fn solve_options(&self) -> SolveOptions {
        let mut opts = SolveOptions::default();
        if let Some(tol) = self.solver.tol {
            opts.tol = tol;
        }
        if let Some(max_steps) = self.solver.max_steps {
            opts.max_steps = max_steps;
        }
        opts
    }

    pub fn grid_nodes(&self) -> usize {
        self.solver.grid.unwrap_or(129)
    }

    pub fn margin(&self) -> Rat {
        self.solver
            .margin
            .as_ref()
            .map(|r| r.0.clone())
            .unwrap_or_else(|| rat(1, 50))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use jtoric::rat::{rat, rat_int};

    const P2: &str = r#"
version = 1
[fan]
normals = [[1, 0], [0, 1], [-1, -1]]
[classes]
offsets_beta = ["0", "0", "1"]
offsets_alpha = ["0", "0", "1"]
[hamiltonian]
a_v = ["1", "0"]
"#;

    #[test]
    fn parses_and_builds() {
        let file: ProblemFile = toml::from_str(P2).unwrap();
        assert_eq!(file.dim().unwrap(), 2);
        let (pair, ham, spec) = file.build().unwrap();
        assert_eq!(pair.dim(), 2);
        assert_eq!(ham.a_v, vec![rat_int(1), rat_int(0)]);
        assert_eq!(spec.c(), &rat_int(2));
        assert_eq!(file.grid_nodes(), 129);
        assert_eq!(file.margin(), rat(1, 50));
    }

    #[test]
    fn rationals_are_exact() {
        let text = P2.replace("\"1\"", "\"1/3\"");
        let file: ProblemFile = toml::from_str(&text).unwrap();
        assert_eq!(file.offsets_beta()[2], rat(1, 3));
        assert_eq!(file.offsets_alpha()[2], rat(1, 3));
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(toml::from_str::<ProblemFile>("version = 1").is_err());
        let zero_den = P2.replace("\"1\"", "\"1/0\"");
        let err = toml::from_str::<ProblemFile>(&zero_den).unwrap_err();
        assert!(err.to_string().contains("zero denominator"));
        let unknown = format!("{P2}\n[solver]\nstep = 3\n");
        assert!(toml::from_str::<ProblemFile>(&unknown).is_err());
        let float_offset = P2.replace("\"0\", \"0\", \"1\"]\noffsets_alpha", "0, \"0\", \"1\"]\noffsets_alpha");
        assert!(toml::from_str::<ProblemFile>(&float_offset).is_err());
    }

    #[test]
    fn shape_errors_are_invalid_not_parse() {
        let file: ProblemFile =
            toml::from_str(&P2.replace("a_v = [\"1\", \"0\"]", "a_v = [\"1\"]")).unwrap();
        assert!(matches!(file.dim(), Err(ProblemError::Invalid(_))));
        let file: ProblemFile =
            toml::from_str(&P2.replace("version = 1", "version = 2")).unwrap();
        assert!(matches!(file.dim(), Err(ProblemError::Invalid(_))));
        let file: ProblemFile = toml::from_str(
            &P2.replace("offsets_beta = [\"0\", \"0\", \"1\"]", "offsets_beta = [\"0\", \"1\"]"),
        )
        .unwrap();
        assert!(matches!(file.build(), Err(ProblemError::Invalid(_))));
    }

    #[test]
    fn constant_override_reaches_the_spec() {
        let text = P2.replace("[hamiltonian]", "c = \"4\"\n[hamiltonian]");
        let file: ProblemFile = toml::from_str(&text).unwrap();
        let (_, _, spec) = file.build().unwrap();
        assert_eq!(spec.c(), &rat_int(4));
    }
}
