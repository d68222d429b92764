use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::entanglement::{Diagnostic, StateTarget};
use crate::hilbert::DensityMatrix;
use crate::linalg::{c64, ComplexMatrix};
use crate::models::ModelSpec;

use super::RunError;

/// Initial state of `B`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InitialState {
    #[default]
    MaximallyMixed,
    /// Pure state named by a label (`"s"`, `"phi+"`, `"01"`, ...).
    BasisState { label: String },
    /// Explicit density matrix, row-major.
    Custom {
        re: Vec<Vec<f64>>,
        #[serde(default)]
        im: Vec<Vec<f64>>,
    },
}

impl InitialState {
    pub fn resolve(&self, dims: &[usize]) -> Result<DensityMatrix, RunError> {
        match self {
            Self::MaximallyMixed => Ok(DensityMatrix::maximally_mixed(dims.to_vec())),
            Self::BasisState { label } => {
                let v = StateTarget::Label(label.clone())
                    .resolve(dims)
                    .map_err(|e| RunError::Config(format!("initial_state: {e}")))?;
                DensityMatrix::from_pure(&v, dims.to_vec()).map_err(|e| RunError::Config(format!("initial_state: {e}")))
            }
            Self::Custom { re, im } => {
                let n = re.len();
                let zero_im = im.is_empty();
                if re.iter().any(|r| r.len() != n) || (!zero_im && (im.len() != n || im.iter().any(|r| r.len() != n))) {
                    return Err(RunError::Config("initial_state: custom matrix must be square".into()));
                }
                let rows: Vec<Vec<_>> = (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| c64(re[i][j], if zero_im { 0.0 } else { im[i][j] }))
                            .collect()
                    })
                    .collect();
                let m = ComplexMatrix::from_rows(&rows).map_err(|e| RunError::Config(format!("initial_state: {e}")))?;
                DensityMatrix::new(m, dims.to_vec()).map_err(|e| RunError::Config(format!("initial_state: {e}")))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    #[serde(default)]
    pub spectrum: bool,
    #[serde(default)]
    pub asymptotic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeno_order: Option<u8>,
}

/// One experiment: model, protocol parameters, diagnostics and outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub model: ModelSpec,
    pub tau: f64,
    pub m_max: usize,
    #[serde(default)]
    pub initial_state: InitialState,
    #[serde(default)]
    pub diagnostics: Vec<Diagnostic>,
    #[serde(default)]
    pub analysis: Analysis,
    /// Path prefix for `<prefix>.csv` and `<prefix>.json`; nothing is
    /// written when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mod_tol: Option<f64>,
}

pub const MAX_STEPS: usize = 1_000_000;

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, RunError> {
        serde_json::from_str(text)
            .map_err(|e| RunError::Config(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    pub fn display_name(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.model.family.name().to_string())
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(RunError::Config(format!("tau must be positive and finite, got {}", self.tau)));
        }
        if self.m_max > MAX_STEPS {
            return Err(RunError::Config(format!("m_max must be at most {MAX_STEPS}")));
        }
        if let Some(t) = self.mod_tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(RunError::Config(format!("mod_tol must be positive, got {t}")));
            }
        }
        if let Some(o) = self.analysis.zeno_order {
            if !(1..=2).contains(&o) {
                return Err(RunError::Config(format!("analysis.zeno_order must be 1 or 2, got {o}")));
            }
        }
        Ok(())
    }

    /// The model with the run-level seed applied.
    pub fn seeded_model(&self) -> ModelSpec {
        let mut m = self.model.clone();
        if let Some(s) = self.seed {
            m.seed = Some(s);
        }
        m
    }
}
