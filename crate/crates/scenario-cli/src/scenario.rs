//! Scenario file format: a TOML document declaring named matrices and an
//! ordered task list, with scenario-wide seed and tolerance defaults.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("parse error: {0}")]
    ParseError(String),
    #[error("unknown task kind {0:?}")]
    UnknownTask(String),
    #[error("task {index} references undeclared matrix {name:?}")]
    DanglingReference { index: usize, name: String },
    #[error("matrix {name:?} must declare exactly one of `expr` or `re`")]
    BadMatrixDecl { name: String },
    #[error("duplicate matrix name {0:?}")]
    DuplicateMatrix(String),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct MatrixDecl {
    pub name: String,
    /// Symbolic form, e.g. `"diag(0.9, 0.1)"` or `"gibbs(h, 6.28)"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    /// Literal form: row-major real part, with an optional imaginary part of
    /// the same shape.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

fn default_true() -> bool {
    true
}

fn default_dim4() -> usize {
    4
}

fn default_samples() -> usize {
    1000
}

fn default_tau_max() -> f64 {
    3.0
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Task {
    /// Closure of the named generators inside the smallest common ambient
    /// dimension; records the resulting linear dimension.
    GenerateAlgebra {
        generators: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        expect_dim: Option<usize>,
    },
    /// Full noncommutative update: accessible algebra generated from named
    /// matrices, prior tracial unless a density is named.
    BayesUpdate {
        true_state: String,
        accessible_generators: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prior: Option<String>,
        #[serde(default = "default_true")]
        assert_feasible: bool,
    },
    /// Plain conditional probability on a finite space.
    ClassicalPosterior {
        probs: Vec<f64>,
        event_b: Vec<usize>,
        event_a: Vec<usize>,
    },
    /// Diagonal-embedding equivalence of the two update rules.
    ClassicalEquivalence {
        probs: Vec<f64>,
        event_b: Vec<usize>,
        event_a: Vec<usize>,
    },
    /// Modular constraint of a named density against a generated subalgebra.
    Takesaki {
        state: String,
        sub_generators: Vec<String>,
        #[serde(default = "default_true")]
        assert_feasible: bool,
    },
    /// KMS residual of a named density against a named Hamiltonian.
    Kms {
        state: String,
        hamiltonian: String,
        beta: f64,
    },
    WedgeClassify {
        #[serde(default = "default_dim4")]
        dim: usize,
        point: Vec<f64>,
    },
    /// Killing residuals and isometry dimension for the standard generators.
    KillingAudit {
        #[serde(default = "default_dim4")]
        dim: usize,
    },
    /// Hyperboloid tangency sweep in d = 5.
    DsTangency {
        #[serde(default = "default_samples")]
        samples: usize,
        #[serde(default = "default_tau_max")]
        tau_max: f64,
    },
    /// Thermofield-double demonstration at the given level count and beta.
    TfdDemo { levels: usize, beta: f64 },
    /// Half-chain boost comparison; optionally emits a per-site CSV profile.
    ChainRun {
        sites: usize,
        mass: f64,
        coupling: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        profile: Option<String>,
    },
}

impl Task {
    pub fn kind(&self) -> &'static str {
        match self {
            Task::GenerateAlgebra { .. } => "generate_algebra",
            Task::BayesUpdate { .. } => "bayes_update",
            Task::ClassicalPosterior { .. } => "classical_posterior",
            Task::ClassicalEquivalence { .. } => "classical_equivalence",
            Task::Takesaki { .. } => "takesaki",
            Task::Kms { .. } => "kms",
            Task::WedgeClassify { .. } => "wedge_classify",
            Task::KillingAudit { .. } => "killing_audit",
            Task::DsTangency { .. } => "ds_tangency",
            Task::TfdDemo { .. } => "tfd_demo",
            Task::ChainRun { .. } => "chain_run",
        }
    }

    /// Matrix names this task reads.
    pub fn references(&self) -> Vec<&str> {
        match self {
            Task::GenerateAlgebra { generators, .. } => {
                generators.iter().map(String::as_str).collect()
            }
            Task::BayesUpdate {
                true_state,
                accessible_generators,
                prior,
                ..
            } => {
                let mut v: Vec<&str> = vec![true_state.as_str()];
                v.extend(accessible_generators.iter().map(String::as_str));
                if let Some(p) = prior {
                    v.push(p.as_str());
                }
                v
            }
            Task::Takesaki {
                state,
                sub_generators,
                ..
            } => {
                let mut v: Vec<&str> = vec![state.as_str()];
                v.extend(sub_generators.iter().map(String::as_str));
                v
            }
            Task::Kms {
                state, hamiltonian, ..
            } => vec![state.as_str(), hamiltonian.as_str()],
            _ => Vec::new(),
        }
    }
}

pub const KNOWN_TASK_KINDS: &[&str] = &[
    "generate_algebra",
    "bayes_update",
    "classical_posterior",
    "classical_equivalence",
    "takesaki",
    "kms",
    "wedge_classify",
    "killing_audit",
    "ds_tangency",
    "tfd_demo",
    "chain_run",
];

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_scenario_tol")]
    pub tol: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub matrices: Vec<MatrixDecl>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<Task>,
}

fn default_scenario_tol() -> f64 {
    DEFAULT_TOL
}

/// Parses and validates a scenario document: defaults applied, unknown task
/// kinds and dangling matrix references rejected.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    // Reject unknown kinds by name before typed deserialization, so the
    // offending key is reported rather than a serde variant list.
    let raw: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| ScenarioError::ParseError(e.to_string()))?;
    if let Some(tasks) = raw.get("tasks").and_then(|t| t.as_array()) {
        for task in tasks {
            match task.get("kind").and_then(|k| k.as_str()) {
                Some(kind) if KNOWN_TASK_KINDS.contains(&kind) => {}
                Some(kind) => return Err(ScenarioError::UnknownTask(kind.to_string())),
                None => {
                    return Err(ScenarioError::ParseError(
                        "task record missing `kind`".to_string(),
                    ))
                }
            }
        }
    }

    let scenario: Scenario =
        toml::from_str(text).map_err(|e| ScenarioError::ParseError(e.to_string()))?;
    validate(&scenario)?;
    Ok(scenario)
}

pub fn serialize_scenario(s: &Scenario) -> String {
    toml::to_string(s).expect("scenario serialization is infallible")
}

fn validate(s: &Scenario) -> Result<(), ScenarioError> {
    let mut declared: BTreeSet<&str> = BTreeSet::new();
    for m in &s.matrices {
        if m.expr.is_some() == m.re.is_some() {
            return Err(ScenarioError::BadMatrixDecl {
                name: m.name.clone(),
            });
        }
        if !declared.insert(m.name.as_str()) {
            return Err(ScenarioError::DuplicateMatrix(m.name.clone()));
        }
    }
    for (index, task) in s.tasks.iter().enumerate() {
        for name in task.references() {
            if !declared.contains(name) {
                return Err(ScenarioError::DanglingReference {
                    index,
                    name: name.to_string(),
                });
            }
        }
    }
    Ok(())
}
