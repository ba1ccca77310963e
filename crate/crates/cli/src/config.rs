use std::path::{Path, PathBuf};

use horolab::cocycle::{DEFAULT_ORDERS, SOLVE_TOL};
use horolab::distributions::DEFAULT_KERNEL_TOL;
use horolab::random::Envelope;
use horolab::rep::RepParams;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const ACCEPTANCE_PRESET: &str = include_str!("../configs/acceptance.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Solve,
    Transfer,
    Split,
    Cascade,
    Decay,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentConfig {
    pub mu: f64,
    pub theta: f64,
    #[serde(default = "one")]
    pub t: f64,
    #[serde(default = "one")]
    pub s: f64,
    /// Truncation level `K`.
    pub k: usize,
    /// Padding; defaults to the library default when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pad: Option<usize>,
}

fn one() -> f64 {
    1.0
}

impl ComponentConfig {
    pub fn params(&self, casimir: f64) -> RepParams {
        let p = RepParams::new(casimir, self.k);
        match self.pad {
            Some(pad) => p.with_pad(pad),
            None => p,
        }
    }

    pub fn left(&self) -> RepParams {
        self.params(self.mu)
    }

    pub fn right(&self) -> RepParams {
        self.params(self.theta)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub kernel_tol: f64,
    pub solve_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            kernel_tol: DEFAULT_KERNEL_TOL,
            solve_tol: SOLVE_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    #[serde(default = "default_gap")]
    pub gap: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_orders")]
    pub sobolev_orders: Vec<f64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub envelope: Envelope,
    #[serde(default = "default_ops")]
    pub ops: Vec<Op>,
    #[serde(default)]
    pub const_cohomology: bool,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub components: Vec<ComponentConfig>,
}

fn default_gap() -> f64 {
    0.25
}

fn default_orders() -> Vec<f64> {
    DEFAULT_ORDERS.to_vec()
}

fn default_ops() -> Vec<Op> {
    vec![Op::Solve, Op::Transfer, Op::Split, Op::Cascade, Op::Decay]
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| CliError::ConfigParse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::ConfigRead {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn acceptance() -> Self {
        Self::parse(ACCEPTANCE_PRESET).expect("bundled preset is valid")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let schema = |msg: String| Err(CliError::SchemaViolation(msg));
        if self.schema_version != SCHEMA_VERSION {
            return schema(format!(
                "schema_version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if self.components.is_empty() {
            return schema("components list is empty".into());
        }
        if !(self.gap > 0.0) {
            return schema(format!("gap must be positive, got {}", self.gap));
        }
        if let Some(r) = self.sobolev_orders.iter().find(|r| !(**r >= 0.0)) {
            return schema(format!("sobolev order {r} is negative"));
        }
        let Tolerances { kernel_tol, solve_tol } = self.tolerances;
        if !(kernel_tol > 1e-14 && kernel_tol < 1e-4) {
            return schema(format!("kernel_tol {kernel_tol} outside (1e-14, 1e-4)"));
        }
        if !(solve_tol > 0.0 && solve_tol < 1.0) {
            return schema(format!("solve_tol {solve_tol} outside (0, 1)"));
        }
        for (index, c) in self.components.iter().enumerate() {
            for p in [c.left(), c.right()] {
                p.validate().map_err(|source| CliError::Component { index, source })?;
            }
            for casimir in [c.mu, c.theta] {
                if casimir > 0.0 && casimir < self.gap {
                    return Err(CliError::Component {
                        index,
                        source: horolab::LabError::GapViolation { mu: casimir, gap: self.gap },
                    });
                }
            }
            if !(c.t.is_finite() && c.s.is_finite() && c.t != 0.0 && c.s != 0.0) {
                return schema(format!("component {index}: time steps must be finite and nonzero"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_parses() {
        let cfg = ExperimentConfig::acceptance();
        assert_eq!(cfg.components.len(), 3);
        assert!(cfg.const_cohomology);
    }

    #[test]
    fn rejects_unknown_schema_and_fields() {
        let err = ExperimentConfig::parse("schema_version = 2\n[[components]]\nmu = 5.0\ntheta = 5.0\nk = 8\n").unwrap_err();
        assert!(matches!(err, CliError::SchemaViolation(_)));
        let err = ExperimentConfig::parse("schema_version = 1\nbogus = 1\n").unwrap_err();
        assert!(matches!(err, CliError::ConfigParse(_)));
    }

    #[test]
    fn gap_is_enforced() {
        let text = "schema_version = 1\ngap = 0.5\n[[components]]\nmu = 0.25\ntheta = 5.0\nk = 8\n";
        match ExperimentConfig::parse(text).unwrap_err() {
            CliError::Component { index: 0, source } => {
                assert!(matches!(source, horolab::LabError::GapViolation { .. }))
            }
            other => panic!("{other:?}"),
        }
    }
}
