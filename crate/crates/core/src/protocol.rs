//! Repeated measurement of the station: effective operator, conditional
//! evolution, asymptotic prediction and Zeno generators.

use serde::{Deserialize, Serialize};

use crate::entanglement::Diagnostic;
use crate::error::{Error, Result};
use crate::hilbert::{partial_trace, DensityMatrix};
use crate::linalg::{
    dominant_eigenspace, eig_general, exp_hermitian, joint_null_space, kron, solve, ComplexMatrix,
    HermitianEigen, SpectralReport, C64,
};
use crate::models::CoupledSystem;

/// Survival probabilities below this are not trusted in double precision.
pub const EXTINCTION_THRESHOLD: f64 = 1e-14;
/// Default tolerance on dominant eigenvalue moduli and phases.
pub const DEFAULT_MOD_TOL: f64 = 1e-8;

const NORM_SLACK: f64 = 1e-10;
const PURE_TOL: f64 = 1e-8;
const COHERENCE_TOL: f64 = 1e-10;

/// `V_B(τ) = ⟨φ|e^{−iτH}|φ⟩`.
#[derive(Debug, Clone)]
pub struct EffectiveOperator {
    pub matrix: ComplexMatrix,
    pub tau: f64,
    pub system_label: String,
    pub b_dims: Vec<usize>,
}

impl EffectiveOperator {
    /// Wraps a matrix, checking that it is a contraction.
    pub fn new(matrix: ComplexMatrix, tau: f64, system_label: impl Into<String>, b_dims: Vec<usize>) -> Result<Self> {
        let d: usize = b_dims.iter().product();
        if matrix.dims() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "operator is {}x{}, B dims {b_dims:?}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let s = largest_singular_value(&matrix)?;
        if s > 1.0 + NORM_SLACK {
            return Err(Error::Numerical(format!(
                "effective operator has singular value {s} > 1"
            )));
        }
        Ok(Self {
            matrix,
            tau,
            system_label: system_label.into(),
            b_dims,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn spectrum(&self) -> Result<SpectralReport> {
        eig_general(&self.matrix)
    }
}

fn largest_singular_value(m: &ComplexMatrix) -> Result<f64> {
    let g = m.adjoint().matmul(m);
    let e = HermitianEigen::new(&g.hermitian_part())?;
    Ok(e.values.last().copied().unwrap_or(0.0).max(0.0).sqrt())
}

/// `(⟨φ| ⊗ I) M (|φ⟩ ⊗ I)` for an operator on `A ⊗ B`.
pub fn compress(m: &ComplexMatrix, phi: &[C64], dim_b: usize) -> Result<ComplexMatrix> {
    let dim_a = phi.len();
    if m.dims() != (dim_a * dim_b, dim_a * dim_b) {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, expected {}",
            m.rows(),
            m.cols(),
            dim_a * dim_b
        )));
    }
    Ok(ComplexMatrix::from_fn(dim_b, dim_b, |r, c| {
        let mut acc = C64::default();
        for (i, pi) in phi.iter().enumerate() {
            if *pi == C64::default() {
                continue;
            }
            let mut row = C64::default();
            for (k, pk) in phi.iter().enumerate() {
                row += m[(i * dim_b + r, k * dim_b + c)] * pk;
            }
            acc += pi.conj() * row;
        }
        acc
    }))
}

pub fn effective_operator(system: &CoupledSystem, tau: f64) -> Result<EffectiveOperator> {
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("tau must be positive and finite, got {tau}")));
    }
    let u = exp_hermitian(system.hamiltonian(), tau)?;
    let v = compress(&u, system.phi(), system.dim_b())?;
    EffectiveOperator::new(v, tau, system.label(), system.b_dims().to_vec())
}

#[derive(Debug, Clone)]
pub struct StepRecord {
    pub m: usize,
    pub rho_b: DensityMatrix,
    pub survival: f64,
    /// Diagnostic values in the order requested.
    pub diagnostics: Vec<(String, f64)>,
}

impl StepRecord {
    pub fn diagnostic(&self, name: &str) -> Option<f64> {
        self.diagnostics.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }
}

/// Where a trajectory stopped because the conditioning outcome became
/// numerically impossible.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Extinction {
    pub step: usize,
    pub probability: f64,
}

#[derive(Debug, Clone)]
pub struct ProtocolTrajectory {
    pub steps: Vec<StepRecord>,
    pub columns: Vec<String>,
    pub extinct: Option<Extinction>,
}

impl ProtocolTrajectory {
    pub fn survival(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.survival).collect()
    }

    pub fn column(&self, name: &str) -> Vec<f64> {
        self.steps.iter().filter_map(|s| s.diagnostic(name)).collect()
    }

    pub fn last(&self) -> Option<&StepRecord> {
        self.steps.last()
    }
}

fn diagnostic_columns(diagnostics: &[Diagnostic], dims: &[usize]) -> Result<Vec<String>> {
    for d in diagnostics {
        d.validate(dims)?;
    }
    Ok(diagnostics.iter().map(Diagnostic::column_name).collect())
}

fn record(m: usize, unnormalised: ComplexMatrix, dims: &[usize], diagnostics: &[Diagnostic]) -> Result<Option<StepRecord>> {
    let p = unnormalised.trace().re;
    if p < EXTINCTION_THRESHOLD {
        return Ok(None);
    }
    let rho = DensityMatrix::new(unnormalised.hermitian_part().scale_real(1.0 / p), dims.to_vec())
        .map_err(|e| Error::Numerical(format!("conditional state at step {m} is invalid: {e}")))?;
    let values = diagnostics
        .iter()
        .map(|d| Ok((d.column_name(), d.evaluate(&rho, p)?)))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(StepRecord {
        m,
        rho_b: rho,
        survival: p,
        diagnostics: values,
    }))
}

fn check_rho0(rho0: &DensityMatrix, dim: usize, dims: &[usize]) -> Result<()> {
    if rho0.dim() != dim || rho0.dims() != dims {
        return Err(Error::DimensionMismatch(format!(
            "initial state has dims {:?}, B has {dims:?}",
            rho0.dims()
        )));
    }
    Ok(())
}

/// `ρ_B(mτ) = V^m ρ₀ V†^m / P_m` and `P_m = Tr[V^m ρ₀ V†^m]` for `m ≤ m_max`.
pub fn conditional_evolution(
    v: &EffectiveOperator,
    rho0: &DensityMatrix,
    m_max: usize,
    diagnostics: &[Diagnostic],
) -> Result<ProtocolTrajectory> {
    check_rho0(rho0, v.dim(), &v.b_dims)?;
    let columns = diagnostic_columns(diagnostics, &v.b_dims)?;
    let mut steps = Vec::with_capacity(m_max + 1);
    let mut vm = ComplexMatrix::identity(v.dim());
    let mut extinct = None;
    for m in 0..=m_max {
        let unnormalised = vm.matmul(rho0.matrix()).matmul(&vm.adjoint());
        let p = unnormalised.trace().re;
        match record(m, unnormalised, &v.b_dims, diagnostics)? {
            Some(r) => steps.push(r),
            None => {
                extinct = Some(Extinction { step: m, probability: p });
                break;
            }
        }
        vm = v.matrix.matmul(&vm);
    }
    Ok(ProtocolTrajectory {
        steps,
        columns,
        extinct,
    })
}

/// Brute-force reference: evolve `|φ⟩⟨φ| ⊗ ρ₀` on `A ⊗ B`, project with
/// `|φ⟩⟨φ| ⊗ I`, renormalise and trace out `A` at every step.
pub fn joint_oracle(
    system: &CoupledSystem,
    rho0: &DensityMatrix,
    m_max: usize,
    tau: f64,
    diagnostics: &[Diagnostic],
) -> Result<ProtocolTrajectory> {
    let dims = system.b_dims().to_vec();
    check_rho0(rho0, system.dim_b(), &dims)?;
    let columns = diagnostic_columns(diagnostics, &dims)?;
    let u = exp_hermitian(system.hamiltonian(), tau)?;
    let ud = u.adjoint();
    let phi = system.phi();
    let pa = ComplexMatrix::outer(phi, phi);
    let proj = kron(&pa, &ComplexMatrix::identity(system.dim_b()));
    let mut joint_dims = vec![system.dim_a()];
    joint_dims.extend(&dims);
    let keep: Vec<usize> = (1..joint_dims.len()).collect();

    let mut rho = kron(&pa, rho0.matrix());
    let mut survival = 1.0;
    let mut steps = Vec::with_capacity(m_max + 1);
    let mut extinct = None;
    for m in 0..=m_max {
        if m > 0 {
            let evolved = u.matmul(&rho).matmul(&ud);
            let projected = proj.matmul(&evolved).matmul(&proj);
            let p = projected.trace().re;
            survival *= p;
            if survival < EXTINCTION_THRESHOLD || p <= 0.0 {
                extinct = Some(Extinction {
                    step: m,
                    probability: survival.max(0.0),
                });
                break;
            }
            rho = projected.scale_real(1.0 / p);
        }
        let joint = DensityMatrix::new(rho.hermitian_part(), joint_dims.clone())
            .map_err(|e| Error::Numerical(format!("joint state at step {m} is invalid: {e}")))?;
        let rho_b = partial_trace(&joint, &keep)?;
        let values = diagnostics
            .iter()
            .map(|d| Ok((d.column_name(), d.evaluate(&rho_b, survival)?)))
            .collect::<Result<Vec<_>>>()?;
        steps.push(StepRecord {
            m,
            rho_b,
            survival,
            diagnostics: values,
        });
    }
    Ok(ProtocolTrajectory {
        steps,
        columns,
        extinct,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitClass {
    PureLimit,
    DegenerateMixture,
    NoConvergence,
}

impl LimitClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::PureLimit => "pure_limit",
            Self::DegenerateMixture => "degenerate_mixture",
            Self::NoConvergence => "no_convergence",
        }
    }
}

/// Large-`M` behaviour of the conditional state.
#[derive(Debug, Clone)]
pub struct AsymptoticPrediction {
    pub classification: LimitClass,
    /// Limit of `ρ_B(Mτ)`; for `no_convergence` its time average.
    pub limit_state: DensityMatrix,
    /// `lim P_M`: zero when `|λ_max| < 1`, otherwise the (time-averaged)
    /// plateau.
    pub probability: f64,
    /// `P_M ≈ prefactor · decay_per_step^M` at large `M`.
    pub prefactor: f64,
    pub decay_per_step: f64,
    /// `|λ₂| / |λ_max|` with `λ₂` the largest eigenvalue outside the dominant set.
    pub gap: f64,
    pub dominant: Vec<usize>,
    pub spectrum: SpectralReport,
    pub notes: Vec<String>,
}

/// Predicts the limit of the conditional evolution from the dominant
/// eigenvectors of `V`.
///
/// Each dominant pair is normalised so that `⟨ṽ_i|u_j⟩ = δ_ij`. Then
/// `V^M ρ₀ V†^M ≈ Σ λ_i^M λ̄_j^M c_ij |u_i⟩⟨u_j|` with `c_ij = ⟨ṽ_i|ρ₀|ṽ_j⟩`.
/// Terms whose eigenvalues share a phase are stationary; any surviving
/// coherence between different phases makes the state oscillate forever.
pub fn asymptotic_prediction(v: &EffectiveOperator, rho0: &DensityMatrix, mod_tol: f64) -> Result<AsymptoticPrediction> {
    check_rho0(rho0, v.dim(), &v.b_dims)?;
    let report = v.spectrum()?;
    if !report.diagonalizable {
        return Err(Error::Numerical(
            "effective operator is not diagonalisable to tolerance".into(),
        ));
    }
    let (dom, _) = dominant_eigenspace(&report, mod_tol)?;
    let lam_max = report.eigenvalues[dom[0]].norm();
    let gap = if lam_max == 0.0 {
        0.0
    } else {
        (0..report.len())
            .filter(|i| !dom.contains(i))
            .map(|i| report.eigenvalues[i].norm())
            .fold(0.0, f64::max)
            / lam_max
    };

    let u: Vec<&Vec<C64>> = dom.iter().map(|&i| &report.right_vectors[i]).collect();
    let l: Vec<&Vec<C64>> = dom.iter().map(|&i| &report.left_vectors[i]).collect();
    let k = dom.len();
    let umat = ComplexMatrix::from_columns(&u.iter().map(|x| x.to_vec()).collect::<Vec<_>>())?;
    let lmat = ComplexMatrix::from_columns(&l.iter().map(|x| x.to_vec()).collect::<Vec<_>>())?;
    // Ṽ = L G^{−†} with G = L†U, so that Ṽ†U = I.
    let g = lmat.adjoint().matmul(&umat);
    let vt = solve(&g, &ComplexMatrix::identity(k))
        .map_err(|_| Error::Numerical("dominant left/right eigenvectors are not biorthogonal".into()))
        .map(|ginv| lmat.matmul(&ginv.adjoint()))?;
    let c = vt.adjoint().matmul(rho0.matrix()).matmul(&vt);

    let unit_phase = |i: usize| {
        let z = report.eigenvalues[dom[i]];
        if z.norm() == 0.0 {
            C64::new(1.0, 0.0)
        } else {
            z / z.norm()
        }
    };
    let same_phase = |i: usize, j: usize| (unit_phase(i) - unit_phase(j)).norm() <= mod_tol;

    let dim = v.dim();
    let mut stationary = ComplexMatrix::zeros(dim, dim);
    let mut oscillating = false;
    for i in 0..k {
        for j in 0..k {
            let term = ComplexMatrix::outer(&umat.column(i), &umat.column(j)).scale(c[(i, j)]);
            if same_phase(i, j) {
                stationary = &stationary + &term;
            } else if term.max_abs() > COHERENCE_TOL {
                oscillating = true;
            }
        }
    }
    let prefactor = stationary.trace().re;
    if prefactor < EXTINCTION_THRESHOLD {
        return Err(Error::ExtinctLimit { probability: prefactor.max(0.0) });
    }
    let limit_state = DensityMatrix::new(stationary.hermitian_part().scale_real(1.0 / prefactor), v.b_dims.clone())
        .map_err(|e| Error::Numerical(format!("predicted limit is not a state: {e}")))?;

    let mut notes = Vec::new();
    let classification = if oscillating {
        notes.push("dominant eigenvalues differ in phase and the initial state couples them; the limit state is the time average".into());
        LimitClass::NoConvergence
    } else if limit_state.purity() >= 1.0 - PURE_TOL {
        LimitClass::PureLimit
    } else {
        let weights: Vec<f64> = (0..k)
            .map(|i| c[(i, i)].re * crate::linalg::norm(&umat.column(i)).powi(2) / prefactor)
            .collect();
        let equal = 1.0 / k as f64;
        if weights.iter().any(|w| (w - equal).abs() > 1e-8) {
            notes.push(format!(
                "degenerate mixture weights follow the initial overlaps: {weights:?} rather than equal weights"
            ));
        }
        LimitClass::DegenerateMixture
    };
    let decay_per_step = lam_max * lam_max;
    let probability = if lam_max >= 1.0 - mod_tol { prefactor } else { 0.0 };
    Ok(AsymptoticPrediction {
        classification,
        limit_state,
        probability: probability.clamp(0.0, 1.0),
        prefactor,
        decay_per_step,
        gap,
        dominant: dom,
        spectrum: report,
        notes,
    })
}

/// Effective generator on `B` in the Zeno regime.
///
/// Order 1 returns `⟨φ|H|φ⟩`; order 2 returns `⟨φ|H²|φ⟩` and requires the
/// first-order generator to vanish.
pub fn zeno_limit(system: &CoupledSystem, order: u8) -> Result<ComplexMatrix> {
    let h = system.hamiltonian();
    let first = compress(h, system.phi(), system.dim_b())?;
    match order {
        1 => Ok(first.hermitian_part()),
        2 => {
            let n = first.frobenius_norm();
            if n > 1e-10 {
                return Err(Error::InvalidArgument(format!(
                    "second-order Zeno generator needs ⟨φ|H|φ⟩ = 0, found norm {n:e}"
                )));
            }
            Ok(compress(&h.matmul(h), system.phi(), system.dim_b())?.hermitian_part())
        }
        other => Err(Error::InvalidArgument(format!("Zeno order must be 1 or 2, got {other}"))),
    }
}

/// States that survive the second-order Zeno decay: the kernel of the generator.
pub fn zeno_survivors(generator: &ComplexMatrix) -> Result<Vec<Vec<C64>>> {
    joint_null_space(&[generator], 1e-10)
}
