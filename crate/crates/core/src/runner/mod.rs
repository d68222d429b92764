//! Config-driven experiment driver behind the `measent` binary.
//!
//! A run builds the model, forms `V_B(τ)`, evolves the conditional state of
//! `B` and writes `<prefix>.csv` (one row per measurement step) and
//! `<prefix>.json` (spectrum, prediction, notes). Identical configs give
//! byte-identical files.

mod config;
mod presets;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

pub use config::{Analysis, ExperimentConfig, InitialState, MAX_STEPS};
pub use presets::{preset, PRESET_NAMES};

use crate::entanglement::Diagnostic;
use crate::error::Error;
use crate::hilbert::two_qubit_state;
use crate::linalg::{dominant_eigenspace, inner, ComplexMatrix, HermitianEigen, SpectralReport, C64};
use crate::models::{build, chain_coefficients, ModelFamily};
use crate::protocol::{
    asymptotic_prediction, conditional_evolution, effective_operator, zeno_limit, AsymptoticPrediction,
    LimitClass, ProtocolTrajectory, DEFAULT_MOD_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

fn classify(e: Error) -> RunError {
    match e {
        Error::Numerical(_) | Error::EmptySpectrum | Error::NonFinite { .. } | Error::Extinct { .. } | Error::ExtinctLimit { .. } => {
            RunError::Numerical(e.to_string())
        }
        _ => RunError::Config(e.to_string()),
    }
}

fn numerical(e: Error) -> RunError {
    RunError::Numerical(e.to_string())
}

/// Interior chain factors and the dominant state of a chain run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub n: usize,
    pub a: C64,
    pub b: C64,
    pub dominant_label: String,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub name: String,
    pub trajectory: ProtocolTrajectory,
    pub spectrum: Option<SpectralReport>,
    pub dominant: Option<(Vec<usize>, bool)>,
    pub dominant_label: Option<String>,
    pub prediction: Option<AsymptoticPrediction>,
    pub prediction_error: Option<String>,
    pub zeno_generator: Option<ComplexMatrix>,
    pub chain: Option<ChainSummary>,
    pub erratum_notes: Vec<String>,
    pub trajectory_path: Option<PathBuf>,
    pub spectrum_path: Option<PathBuf>,
    pub csv: String,
    pub json: String,
}

const NAMED_TWO_QUBIT: [&str; 6] = ["s", "t0", "phi+", "phi-", "t-", "t+"];

/// Closest named two-qubit state to `v`, if its fidelity is within 1e−6 of 1.
pub fn two_qubit_label(v: &[C64]) -> String {
    let n2: f64 = inner(v, v).re;
    NAMED_TWO_QUBIT
        .iter()
        .map(|l| {
            let t = two_qubit_state(l).expect("named state");
            (l, inner(&t, v).norm_sqr() / n2)
        })
        .find(|(_, f)| *f > 1.0 - 1e-6)
        .map_or_else(|| "other".to_string(), |(l, _)| l.to_string())
}

/// Runs one experiment and writes its files when `output` is set.
pub fn run(config: &ExperimentConfig) -> Result<RunReport, RunError> {
    config.validate()?;
    let mod_tol = config.mod_tol.unwrap_or(DEFAULT_MOD_TOL);
    let model = config.seeded_model();
    let system = build(&model).map_err(|e| RunError::Config(format!("model: {e}")))?;
    let dims = system.b_dims().to_vec();
    let rho0 = config.initial_state.resolve(&dims)?;
    for d in &config.diagnostics {
        d.validate(&dims).map_err(|e| RunError::Config(format!("diagnostics: {e}")))?;
    }
    let v = effective_operator(&system, config.tau).map_err(classify)?;
    let trajectory = conditional_evolution(&v, &rho0, config.m_max, &config.diagnostics).map_err(classify)?;

    let mut notes = Vec::new();
    if let Some(ex) = trajectory.extinct {
        notes.push(format!(
            "trajectory truncated at step {}: survival probability {:e} is below the extinction threshold",
            ex.step, ex.probability
        ));
    }

    let is_chain = model.family == ModelFamily::DwaveChain;
    let want_spectrum = config.analysis.spectrum || config.analysis.asymptotic || is_chain;
    let spectrum = if want_spectrum { Some(v.spectrum().map_err(numerical)?) } else { None };
    let dominant = spectrum
        .as_ref()
        .map(|s| dominant_eigenspace(s, mod_tol))
        .transpose()
        .map_err(numerical)?;
    let dominant_label = match (&spectrum, &dominant) {
        (Some(s), Some((idx, degenerate))) if dims == [2, 2] => Some(if *degenerate {
            "degenerate".to_string()
        } else {
            two_qubit_label(&s.right_vectors[idx[0]])
        }),
        _ => None,
    };

    let (prediction, prediction_error) = if config.analysis.asymptotic {
        match asymptotic_prediction(&v, &rho0, mod_tol) {
            Ok(p) => {
                notes.extend(p.notes.iter().cloned());
                (Some(p), None)
            }
            Err(e @ Error::ExtinctLimit { .. }) => {
                notes.push(format!("asymptotic prediction: {e}"));
                (None, Some(e.to_string()))
            }
            Err(e) => return Err(classify(e)),
        }
    } else {
        (None, None)
    };

    let zeno_generator = match config.analysis.zeno_order {
        Some(order) => Some(zeno_limit(&system, order).map_err(|e| RunError::Config(format!("zeno: {e}")))?),
        None => None,
    };

    let chain = if is_chain {
        let n = model.parameters.get("N").copied().unwrap_or(0.0) as usize;
        let delta = model.parameters.get("delta").copied().unwrap_or(0.0);
        let (a, b) = chain_coefficients(n, delta, config.tau).map_err(classify)?;
        if n == 4 {
            notes.push(
                "N = 4: the two intermediate sites couple through the single bond Z2 Z3, so a = exp(-i delta tau) and b = exp(i delta tau) have equal modulus and no pure state is selected".into(),
            );
        }
        Some(ChainSummary {
            n,
            a,
            b,
            dominant_label: dominant_label.clone().unwrap_or_else(|| "other".into()),
        })
    } else {
        None
    };

    notes.extend(model_notes(config, prediction.as_ref()));

    let mut report = RunReport {
        name: config.display_name(),
        trajectory,
        spectrum,
        dominant,
        dominant_label,
        prediction,
        prediction_error,
        zeno_generator,
        chain,
        erratum_notes: notes,
        trajectory_path: None,
        spectrum_path: None,
        csv: String::new(),
        json: String::new(),
    };
    report.csv = render_csv(&report.trajectory);
    report.json = render_json(config, &report);
    if let Some(prefix) = &config.output {
        let csv_path = with_suffix(prefix, "csv");
        let json_path = with_suffix(prefix, "json");
        write_atomic(&csv_path, report.csv.as_bytes())?;
        write_atomic(&json_path, report.json.as_bytes())?;
        report.trajectory_path = Some(csv_path);
        report.spectrum_path = Some(json_path);
    }
    Ok(report)
}

fn model_notes(config: &ExperimentConfig, prediction: Option<&AsymptoticPrediction>) -> Vec<String> {
    let model = &config.model;
    let mut notes = Vec::new();
    match model.family {
        ModelFamily::JaynesCummings => notes.push(
            "the singlet entry of V_B is exp(-i epsilon tau) rather than 1: |1>|s> is an eigenstate of the cavity term with energy epsilon; its modulus is 1".into(),
        ),
        ModelFamily::SpinOrbit if config.analysis.zeno_order == Some(2) => notes.push(
            "second-order generator is h^2 l(l+1) (2 + X1 X2 + Y1 Y2), eigenvalues h^2 l(l+1) {0, 2, 4, 2}; a prefactor linear in h would be dimensionally inconsistent".into(),
        ),
        ModelFamily::Xy
            if config.initial_state == InitialState::MaximallyMixed
                && model.weights.is_none()
                && model.parameters.get("N").is_none_or(|&n| n == 2.0)
                && prediction.is_some_and(|p| p.classification == LimitClass::PureLimit) =>
        {
            if let Some(p) = prediction {
                notes.push(format!(
                    "survival plateau for the maximally mixed start is {:?}; a plateau near 0.2 would need a different initial state",
                    p.probability
                ));
            }
        }
        _ => {}
    }
    notes
}

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RunError> {
    let io = |e: std::io::Error| RunError::Io(format!("{}: {e}", path.display()));
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir).map_err(io)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

/// Shortest round-trip decimal.
fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

fn csv_columns(t: &ProtocolTrajectory) -> Vec<&str> {
    t.columns.iter().map(String::as_str).filter(|c| *c != "survival").collect()
}

pub fn render_csv(t: &ProtocolTrajectory) -> String {
    let cols = csv_columns(t);
    let mut out = String::from("m,survival");
    for c in &cols {
        out.push(',');
        out.push_str(c);
    }
    out.push('\n');
    for step in &t.steps {
        let _ = write!(out, "{},{}", step.m, fmt_f64(step.survival));
        for c in &cols {
            let v = step.diagnostic(c).expect("diagnostic recorded");
            let _ = write!(out, ",{}", fmt_f64(v));
        }
        out.push('\n');
    }
    out
}

fn complex_json(z: C64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let re: Vec<Vec<f64>> = (0..m.rows()).map(|i| m.row(i).iter().map(|z| z.re).collect()).collect();
    let im: Vec<Vec<f64>> = (0..m.rows()).map(|i| m.row(i).iter().map(|z| z.im).collect()).collect();
    json!({ "re": re, "im": im })
}

fn render_json(config: &ExperimentConfig, r: &RunReport) -> String {
    let mut root = serde_json::Map::new();
    root.insert("name".into(), json!(r.name));
    root.insert("config".into(), serde_json::to_value(config).expect("config serialises"));
    root.insert("model".into(), json!(config.model.family.name()));
    root.insert("tau".into(), json!(config.tau));
    root.insert(
        "trajectory".into(),
        json!({
            "rows": r.trajectory.steps.len(),
            "columns": std::iter::once("m").chain(std::iter::once("survival")).chain(csv_columns(&r.trajectory)).collect::<Vec<_>>(),
            "extinct": r.trajectory.extinct.map(|e| json!({ "step": e.step, "probability": e.probability })),
        }),
    );
    if let Some(s) = &r.spectrum {
        let eigenvalues: Vec<Value> = s
            .eigenvalues
            .iter()
            .map(|z| json!({ "re": z.re, "im": z.im, "modulus": z.norm() }))
            .collect();
        let (dominant, degenerate) = r.dominant.clone().unwrap_or_default();
        let mut spec = json!({
            "eigenvalues": eigenvalues,
            "residuals": s.residuals,
            "diagonalizable": s.diagonalizable,
            "dominant": dominant,
            "classification": if degenerate { "degenerate" } else { "non_degenerate" },
        });
        if let Some(label) = &r.dominant_label {
            spec["dominant_state"] = json!(label);
        }
        root.insert("spectrum".into(), spec);
    }
    if let Some(p) = &r.prediction {
        root.insert(
            "prediction".into(),
            json!({
                "classification": p.classification.as_str(),
                "limit_state": matrix_json(p.limit_state.matrix()),
                "probability": p.probability,
                "prefactor": p.prefactor,
                "decay_per_step": p.decay_per_step,
                "gap": p.gap,
                "purity": p.limit_state.purity(),
            }),
        );
    } else if let Some(e) = &r.prediction_error {
        root.insert("prediction".into(), json!({ "classification": "extinct", "error": e }));
    }
    if let (Some(g), Some(order)) = (&r.zeno_generator, config.analysis.zeno_order) {
        let eig = HermitianEigen::new(g).map(|e| e.values).unwrap_or_default();
        root.insert("zeno".into(), json!({ "order": order, "generator": matrix_json(g), "eigenvalues": eig }));
    }
    if let Some(c) = &r.chain {
        root.insert(
            "chain".into(),
            json!({ "N": c.n, "a": complex_json(c.a), "b": complex_json(c.b), "dominant_state": c.dominant_label }),
        );
    }
    root.insert("erratum_notes".into(), json!(r.erratum_notes));
    let mut text = serde_json::to_string_pretty(&Value::Object(root)).expect("report serialises");
    text.push('\n');
    text
}

/// Runs configs concurrently; results come back in input order.
pub fn sweep(configs: &[ExperimentConfig]) -> Result<Vec<Result<RunReport, RunError>>, RunError> {
    if configs.is_empty() {
        return Err(RunError::Config("sweep needs at least one config".into()));
    }
    Ok(configs.par_iter().map(run).collect())
}

/// Parsed trajectory CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl TrajectoryTable {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn parse_trajectory_csv(text: &str) -> Result<TrajectoryTable, RunError> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| RunError::Config("empty trajectory file".into()))?;
    let columns: Vec<String> = header.split(',').map(str::to_string).collect();
    if columns.len() < 2 || columns[0] != "m" || columns[1] != "survival" {
        return Err(RunError::Config(format!("unexpected trajectory header {header:?}")));
    }
    let rows = lines
        .enumerate()
        .map(|(i, line)| {
            let row: Vec<f64> = line
                .split(',')
                .map(|f| f.parse::<f64>())
                .collect::<Result<_, _>>()
                .map_err(|e| RunError::Config(format!("line {}: {e}", i + 2)))?;
            if row.len() != columns.len() {
                return Err(RunError::Config(format!("line {}: wrong number of fields", i + 2)));
            }
            Ok(row)
        })
        .collect::<Result<_, _>>()?;
    Ok(TrajectoryTable { columns, rows })
}

pub fn read_trajectory_csv(path: &Path) -> Result<TrajectoryTable, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    parse_trajectory_csv(&text)
}

pub fn read_report_json(path: &Path) -> Result<Value, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| RunError::Config(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, RunError> {
    let text = fs::read_to_string(path).map_err(|e| RunError::Config(format!("{}: {e}", path.display())))?;
    ExperimentConfig::from_json(&text).map_err(|e| match e {
        RunError::Config(msg) => RunError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

/// Config paths named by a directory (all `*.json`, sorted), a list file
/// (one path per line, `#` comments), or a single config file.
pub fn collect_config_paths(target: &Path) -> Result<Vec<PathBuf>, RunError> {
    let io = |e: std::io::Error| RunError::Config(format!("{}: {e}", target.display()));
    if target.is_dir() {
        let mut paths: Vec<PathBuf> = fs::read_dir(target)
            .map_err(io)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "json"))
            .collect();
        paths.sort();
        return Ok(paths);
    }
    if target.extension().is_some_and(|x| x == "json") {
        return Ok(vec![target.to_path_buf()]);
    }
    let text = fs::read_to_string(target).map_err(io)?;
    let base = target.parent().unwrap_or(Path::new("."));
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let p = PathBuf::from(l);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        })
        .collect())
}

/// Diagnostics helper for callers building configs in code.
pub fn diagnostic_names(config: &ExperimentConfig) -> Vec<String> {
    config.diagnostics.iter().map(Diagnostic::column_name).collect()
}
