//! Entanglement and state diagnostics evaluated along a trajectory.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{
    partial_transpose_operator, partial_transpose_subsystems, pauli, product_state, two_qubit_state, Axis,
    DensityMatrix,
};
use crate::linalg::{c64, kron, norm, ComplexMatrix, HermitianEigen, C64};

const CLAMP: f64 = 1e-12;
const TARGET_NORM_TOL: f64 = 1e-10;

fn require_two_qubits(rho: &DensityMatrix) -> Result<()> {
    if rho.dims() != [2, 2] {
        return Err(Error::DimensionMismatch(format!(
            "concurrence needs two qubits, got dims {:?}",
            rho.dims()
        )));
    }
    Ok(())
}

/// Wootters concurrence of a two-qubit state.
///
/// The λ_i are the singular values of τ = D W†(Y⊗Y)W* D for ρ = W D² W†,
/// read off the Hermitian dilation [[0, τ], [τ†, 0]]. Square roots of the
/// eigenvalues of ρ·ρ̃ would amplify rounding near zero to ~1e-8.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    require_two_qubits(rho)?;
    let yy = kron(&pauli(Axis::Y), &pauli(Axis::Y));
    let eig = HermitianEigen::new(rho.matrix())?;
    let d: Vec<f64> = eig.values.iter().map(|&p| if p < CLAMP { 0.0 } else { p.sqrt() }).collect();
    let w = &eig.vectors;
    let core = w.adjoint().matmul(&yy).matmul(&w.conj());
    let tau = ComplexMatrix::from_fn(4, 4, |i, j| core[(i, j)] * (d[i] * d[j]));
    let dilation = ComplexMatrix::from_fn(8, 8, |i, j| match (i < 4, j < 4) {
        (true, false) => tau[(i, j - 4)],
        (false, true) => tau[(j, i - 4)].conj(),
        _ => C64::default(),
    });
    let mut sigma = HermitianEigen::new(&dilation)?.values;
    sigma.sort_by(|a, b| b.total_cmp(a));
    let c = sigma[0] - sigma[1..4].iter().map(|s| s.max(0.0)).sum::<f64>();
    Ok(c.clamp(0.0, 1.0))
}

/// Minimum eigenvalue of the partial transpose on factor `part` of a
/// bipartite state.
pub fn pt_min_eig(rho: &DensityMatrix, part: usize) -> Result<f64> {
    pt_min_eig_operator(rho.matrix(), rho.dims(), part)
}

/// As [`pt_min_eig`] for an arbitrary Hermitian operator (any trace).
pub fn pt_min_eig_operator(m: &ComplexMatrix, dims: &[usize], part: usize) -> Result<f64> {
    let pt = partial_transpose_operator(m, dims, part)?;
    Ok(HermitianEigen::new(&pt)?.min_value())
}

/// Minimum partial-transpose eigenvalue for the cut that transposes `parts`.
pub fn pt_min_eig_cut(rho: &DensityMatrix, parts: &[usize]) -> Result<f64> {
    let pt = partial_transpose_subsystems(rho.matrix(), rho.dims(), parts)?;
    Ok(HermitianEigen::new(&pt)?.min_value())
}

/// ⟨t|ρ|t⟩ for a unit vector `t`.
pub fn fidelity_pure(rho: &DensityMatrix, target: &[C64]) -> Result<f64> {
    if target.len() != rho.dim() {
        return Err(Error::DimensionMismatch(format!(
            "target has {} components, state dimension is {}",
            target.len(),
            rho.dim()
        )));
    }
    let n = norm(target);
    if (n - 1.0).abs() > TARGET_NORM_TOL {
        return Err(Error::InvalidArgument(format!("fidelity target has norm {n}, expected 1")));
    }
    Ok(rho.expectation(target).clamp(0.0, 1.0))
}

pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.purity()
}

/// Target state of a fidelity diagnostic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateTarget {
    /// `s`, `t-`, `t0`, `t+`, `phi±`, `psi±`, or a digit string such as `"01"`.
    Label(String),
    Amplitudes { re: Vec<f64>, #[serde(default)] im: Vec<f64> },
}

impl StateTarget {
    pub fn resolve(&self, dims: &[usize]) -> Result<Vec<C64>> {
        match self {
            Self::Label(label) => {
                if dims == [2, 2] {
                    if let Some(v) = two_qubit_state(label) {
                        return Ok(v);
                    }
                }
                product_state(label, dims)
            }
            Self::Amplitudes { re, im } => {
                if !im.is_empty() && im.len() != re.len() {
                    return Err(Error::InvalidArgument("target re/im lengths differ".into()));
                }
                Ok(re
                    .iter()
                    .enumerate()
                    .map(|(k, &r)| c64(r, im.get(k).copied().unwrap_or(0.0)))
                    .collect())
            }
        }
    }

    fn tag(&self) -> String {
        match self {
            Self::Label(l) => l.clone(),
            Self::Amplitudes { .. } => "custom".into(),
        }
    }
}

/// A per-step diagnostic column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    Concurrence,
    /// Transposes `parts`; defaults to the last factor for two factors and to
    /// the second half of the factors otherwise.
    PtMinEig {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        parts: Option<Vec<usize>>,
    },
    Purity,
    Survival,
    Fidelity { target: StateTarget },
}

impl Diagnostic {
    pub fn column_name(&self) -> String {
        match self {
            Self::Concurrence => "concurrence".into(),
            Self::PtMinEig { .. } => "pt_min_eig".into(),
            Self::Purity => "purity".into(),
            Self::Survival => "survival".into(),
            Self::Fidelity { target } => format!("fidelity_{}", target.tag()),
        }
    }

    /// Checks that the diagnostic makes sense on a register with `dims`.
    pub fn validate(&self, dims: &[usize]) -> Result<()> {
        match self {
            Self::Concurrence if dims != [2, 2] => Err(Error::InvalidArgument(format!(
                "concurrence needs two qubits, B has dims {dims:?}"
            ))),
            Self::PtMinEig { parts } => {
                let parts = self.pt_parts(parts.as_deref(), dims);
                if dims.len() < 2 || parts.iter().any(|&p| p >= dims.len()) {
                    return Err(Error::InvalidArgument(format!(
                        "partial transpose {parts:?} invalid for dims {dims:?}"
                    )));
                }
                Ok(())
            }
            Self::Fidelity { target } => {
                let v = target.resolve(dims)?;
                let d: usize = dims.iter().product();
                if v.len() != d {
                    return Err(Error::InvalidArgument(format!(
                        "fidelity target has {} components, B has dimension {d}",
                        v.len()
                    )));
                }
                let n = norm(&v);
                if (n - 1.0).abs() > TARGET_NORM_TOL {
                    return Err(Error::InvalidArgument(format!("fidelity target has norm {n}")));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    fn pt_parts(&self, parts: Option<&[usize]>, dims: &[usize]) -> Vec<usize> {
        match parts {
            Some(p) => p.to_vec(),
            None if dims.len() == 2 => vec![1],
            None => (dims.len() / 2..dims.len()).collect(),
        }
    }

    pub fn evaluate(&self, rho: &DensityMatrix, survival: f64) -> Result<f64> {
        match self {
            Self::Concurrence => concurrence(rho),
            Self::PtMinEig { parts } => pt_min_eig_cut(rho, &self.pt_parts(parts.as_deref(), rho.dims())),
            Self::Purity => Ok(purity(rho)),
            Self::Survival => Ok(survival),
            Self::Fidelity { target } => fidelity_pure(rho, &target.resolve(rho.dims())?),
        }
    }
}

/// All diagnostics of a single state.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    /// Present only for two-qubit states.
    pub concurrence: Option<f64>,
    pub pt_min_eig: Option<f64>,
    pub fidelity_target: Option<f64>,
    pub purity: f64,
}

impl DiagnosticsReport {
    pub fn evaluate(rho: &DensityMatrix, target: Option<&[C64]>) -> Result<Self> {
        let two_qubits = rho.dims() == [2, 2];
        let pt = if rho.dims().len() >= 2 {
            let parts: Vec<usize> = if rho.dims().len() == 2 {
                vec![1]
            } else {
                (rho.dims().len() / 2..rho.dims().len()).collect()
            };
            Some(pt_min_eig_cut(rho, &parts)?)
        } else {
            None
        };
        Ok(Self {
            concurrence: if two_qubits { Some(concurrence(rho)?) } else { None },
            pt_min_eig: pt,
            fidelity_target: target.map(|t| fidelity_pure(rho, t)).transpose()?,
            purity: purity(rho),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron_vec;

    fn pure(label: &str) -> DensityMatrix {
        DensityMatrix::from_pure(&two_qubit_state(label).unwrap(), vec![2, 2]).unwrap()
    }

    fn mixture() -> DensityMatrix {
        let s = two_qubit_state("s").unwrap();
        let z = two_qubit_state("t-").unwrap();
        let m = (&ComplexMatrix::outer(&s, &s) + &ComplexMatrix::outer(&z, &z)).scale_real(0.5);
        DensityMatrix::new(m, vec![2, 2]).unwrap()
    }

    #[test]
    fn bell_and_product_concurrence() {
        assert!((concurrence(&pure("s")).unwrap() - 1.0).abs() < 1e-12);
        assert!((concurrence(&pure("phi+")).unwrap() - 1.0).abs() < 1e-12);
        assert!(concurrence(&pure("t-")).unwrap().abs() < 1e-12);
        assert!(concurrence(&DensityMatrix::maximally_mixed(vec![2])).is_err());
    }

    #[test]
    fn mixture_is_entangled() {
        // ρ = ½(|s⟩⟨s| + |00⟩⟨00|): the Wootters roots are {1/2, 0, 0, 0}.
        let c = concurrence(&mixture()).unwrap();
        assert!((c - 0.5).abs() < 1e-10, "{c}");
        let pt = pt_min_eig(&mixture(), 1).unwrap();
        assert!((pt - (1.0 - 2f64.sqrt()) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn trace_two_operator() {
        let s = two_qubit_state("s").unwrap();
        let z = two_qubit_state("t-").unwrap();
        let m = &ComplexMatrix::outer(&s, &s) + &ComplexMatrix::outer(&z, &z);
        let pt = pt_min_eig_operator(&m, &[2, 2], 0).unwrap();
        assert!((pt - (1.0 - 2f64.sqrt()) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn fidelity_checks() {
        let rho = pure("t0");
        assert!((fidelity_pure(&rho, &two_qubit_state("t0").unwrap()).unwrap() - 1.0).abs() < 1e-14);
        assert!(fidelity_pure(&rho, &two_qubit_state("s").unwrap()).unwrap().abs() < 1e-14);
        let unnormalised = vec![c64(1.0, 0.0); 4];
        assert!(matches!(fidelity_pure(&rho, &unnormalised), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn pure_product_concurrence_zero() {
        let a = vec![c64(0.6, 0.0), c64(0.0, 0.8)];
        let b = vec![c64(0.28, 0.96), c64(0.0, 0.0)];
        let rho = DensityMatrix::from_pure(&kron_vec(&a, &b), vec![2, 2]).unwrap();
        assert!(concurrence(&rho).unwrap() < 1e-7);
    }

    #[test]
    fn diagnostic_columns_and_validation() {
        let d = Diagnostic::Fidelity {
            target: StateTarget::Label("s".into()),
        };
        assert_eq!(d.column_name(), "fidelity_s");
        assert!(d.validate(&[2, 2]).is_ok());
        assert!(Diagnostic::Concurrence.validate(&[2, 2, 2, 2]).is_err());
        let bad = Diagnostic::Fidelity {
            target: StateTarget::Amplitudes {
                re: vec![1.0, 1.0, 0.0, 0.0],
                im: vec![],
            },
        };
        assert!(bad.validate(&[2, 2]).is_err());
        let json = r#"[{"kind":"concurrence"},{"kind":"fidelity","target":"phi+"},{"kind":"pt_min_eig"}]"#;
        let parsed: Vec<Diagnostic> = serde_json::from_str(json).unwrap();
        assert_eq!(parsed.len(), 3);
    }

    #[test]
    fn report_on_four_qubits_skips_concurrence() {
        let rho = DensityMatrix::maximally_mixed(vec![2, 2, 2, 2]);
        let r = DiagnosticsReport::evaluate(&rho, None).unwrap();
        assert!(r.concurrence.is_none());
        assert!((r.purity - 1.0 / 16.0).abs() < 1e-15);
        assert!(r.pt_min_eig.unwrap() > 0.0);
    }
}
