//! Coupled `A ⊗ B` Hamiltonians for the example families.
//!
//! All Hamiltonians are interaction-only (`H_A = H_B = 0` apart from the
//! cavity energy in the Jaynes–Cummings model). The `B` register is a set of
//! qubits except for `multilevel_so`, whose two `B` factors are `M`-level.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{pauli, pauli_eigenstate, Axis};
use crate::linalg::{basis_vector, c64, kron, kron_all, norm, ComplexMatrix, C64, HERMITIAN_TOL};

const PHI_NORM_TOL: f64 = 1e-12;
const UNITARY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    GenericVector,
    Xy,
    DwavePair,
    Heisenberg,
    JaynesCummings,
    MultilevelSo,
    SpinOrbit,
    DwaveChain,
}

impl ModelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            Self::GenericVector => "generic_vector",
            Self::Xy => "xy",
            Self::DwavePair => "dwave_pair",
            Self::Heisenberg => "heisenberg",
            Self::JaynesCummings => "jaynes_cummings",
            Self::MultilevelSo => "multilevel_so",
            Self::SpinOrbit => "spin_orbit",
            Self::DwaveChain => "dwave_chain",
        }
    }
}

/// Measurement state `|φ⟩` on `A`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhiChoice {
    /// Pauli eigenstate of a qubit station.
    Axis { axis: Axis, #[serde(default = "yes")] positive: bool },
    /// Fock state `|n⟩` of the cavity.
    Photon { n: usize },
    /// `|+⟩` on every intermediate chain site.
    PlusChain,
    /// `|l, 0⟩` of the orbital angular momentum.
    AngularZero,
    /// Computational basis state of `A`.
    Basis { index: usize },
    /// Explicit amplitudes (normalised on use).
    Vector { re: Vec<f64>, #[serde(default)] im: Vec<f64> },
}

fn yes() -> bool {
    true
}

/// Declarative model description, deserialisable from run configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: ModelFamily,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    /// Per-qubit coupling weights `a_i` for the collective operators.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiChoice>,
    /// Seed for randomly drawn couplings (`multilevel_so`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl ModelSpec {
    pub fn new(family: ModelFamily) -> Self {
        Self {
            family,
            parameters: BTreeMap::new(),
            weights: None,
            phi: None,
            seed: None,
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    pub fn with_weights(mut self, w: Vec<f64>) -> Self {
        self.weights = Some(w);
        self
    }

    pub fn with_phi(mut self, phi: PhiChoice) -> Self {
        self.phi = Some(phi);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// Hamiltonian on `A ⊗ B` together with the measured state of `A`.
#[derive(Debug, Clone)]
pub struct CoupledSystem {
    dim_a: usize,
    b_dims: Vec<usize>,
    hamiltonian: ComplexMatrix,
    phi: Vec<C64>,
    label: String,
}

impl CoupledSystem {
    pub fn new(
        dim_a: usize,
        b_dims: Vec<usize>,
        hamiltonian: ComplexMatrix,
        phi: Vec<C64>,
        label: impl Into<String>,
    ) -> Result<Self> {
        if dim_a == 0 || b_dims.is_empty() || b_dims.contains(&0) {
            return Err(Error::InvalidArgument("empty subsystem".into()));
        }
        let total = dim_a * b_dims.iter().product::<usize>();
        if hamiltonian.dims() != (total, total) {
            return Err(Error::DimensionMismatch(format!(
                "Hamiltonian is {}x{}, dimensions require {total}",
                hamiltonian.rows(),
                hamiltonian.cols()
            )));
        }
        let asym = hamiltonian.max_hermitian_asymmetry().unwrap_or(f64::INFINITY);
        if asym > HERMITIAN_TOL * hamiltonian.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian { max_asymmetry: asym });
        }
        if phi.len() != dim_a {
            return Err(Error::DimensionMismatch(format!(
                "measurement state has length {}, station dimension is {dim_a}",
                phi.len()
            )));
        }
        let n = norm(&phi);
        if (n - 1.0).abs() > PHI_NORM_TOL {
            return Err(Error::InvalidArgument(format!("measurement state has norm {n}")));
        }
        Ok(Self {
            dim_a,
            b_dims,
            hamiltonian: hamiltonian.hermitian_part(),
            phi,
            label: label.into(),
        })
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn b_dims(&self) -> &[usize] {
        &self.b_dims
    }

    pub fn dim_b(&self) -> usize {
        self.b_dims.iter().product()
    }

    pub fn hamiltonian(&self) -> &ComplexMatrix {
        &self.hamiltonian
    }

    pub fn phi(&self) -> &[C64] {
        &self.phi
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Same system with a different measurement state.
    pub fn with_phi(&self, phi: Vec<C64>) -> Result<Self> {
        Self::new(self.dim_a, self.b_dims.clone(), self.hamiltonian.clone(), phi, self.label.clone())
    }
}

/// `op` acting on factor `pos` of a register with dimensions `dims`.
pub fn embed(op: &ComplexMatrix, pos: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    if pos >= dims.len() || op.dims() != (dims[pos], dims[pos]) {
        return Err(Error::DimensionMismatch(format!(
            "cannot place a {}x{} operator on factor {pos} of {dims:?}",
            op.rows(),
            op.cols()
        )));
    }
    let factors: Vec<ComplexMatrix> = dims
        .iter()
        .enumerate()
        .map(|(k, &d)| if k == pos { op.clone() } else { ComplexMatrix::identity(d) })
        .collect();
    Ok(kron_all(&factors).expect("non-empty register"))
}

/// Product of single-qubit operators placed on the given qubits.
fn qubit_product(n: usize, ops: &[(usize, ComplexMatrix)]) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = (0..n)
        .map(|k| {
            ops.iter()
                .filter(|(p, _)| *p == k)
                .fold(ComplexMatrix::identity(2), |acc, (_, m)| acc.matmul(m))
        })
        .collect();
    kron_all(&factors).expect("non-empty register")
}

/// Weighted collective quasi-spin `Σ_i w_i σ_axis^(i)` on `n_qubits` qubits.
pub fn collective_spin(n_qubits: usize, weights: &[f64], axis: Axis) -> Result<ComplexMatrix> {
    if weights.is_empty() || n_qubits == 0 {
        return Err(Error::InvalidArgument("collective operator needs at least one qubit".into()));
    }
    if weights.len() != n_qubits {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {n_qubits} qubits",
            weights.len()
        )));
    }
    let p = pauli(axis);
    let dim = 1usize << n_qubits;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (k, &w) in weights.iter().enumerate() {
        out = &out + &qubit_product(n_qubits, &[(k, p.clone())]).scale_real(w);
    }
    Ok(out)
}

/// Spin-`l` matrices `(L_x, L_y, L_z)` in the basis `|l, m⟩`, `m = l, …, −l`.
pub fn angular_momentum(l: usize) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let d = 2 * l + 1;
    let lf = l as f64;
    let m_of = |k: usize| lf - k as f64;
    // L+ |m⟩ = √(l(l+1) − m(m+1)) |m+1⟩; index k−1 holds m+1.
    let lp = ComplexMatrix::from_fn(d, d, |r, c| {
        if c >= 1 && r == c - 1 {
            let m = m_of(c);
            c64((lf * (lf + 1.0) - m * (m + 1.0)).sqrt(), 0.0)
        } else {
            C64::default()
        }
    });
    let lm = lp.adjoint();
    let lx = (&lp + &lm).scale_real(0.5);
    let ly = (&lp - &lm).scale(c64(0.0, -0.5));
    let lz = ComplexMatrix::diagonal(&(0..d).map(|k| c64(m_of(k), 0.0)).collect::<Vec<_>>());
    (lx, ly, lz)
}

/// Cavity annihilation operator truncated at `n_max` photons.
pub fn annihilation(n_max: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n_max + 1, n_max + 1, |r, c| {
        if c == r + 1 {
            c64((c as f64).sqrt(), 0.0)
        } else {
            C64::default()
        }
    })
}

/// Unitary whose columns are the spherical basis `|m⟩`, `m = −L, …, L`
/// (`M = 2L + 1`), written in Cartesian components.
pub fn spherical_basis(m_levels: usize) -> Result<ComplexMatrix> {
    if m_levels < 3 || m_levels.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "spherical basis needs odd M >= 3, got {m_levels}"
        )));
    }
    let l = (m_levels - 1) / 2;
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(m_levels);
    let column = |m: i64| -> Vec<C64> {
        let mut v = vec![C64::default(); m_levels];
        if m == 0 {
            v[m_levels - 1] = c64(1.0, 0.0);
            return v;
        }
        let k = m.unsigned_abs() as usize;
        let (a, b) = (2 * k - 2, 2 * k - 1);
        if m > 0 {
            v[a] = c64(-h, 0.0);
            v[b] = c64(0.0, -h);
        } else {
            v[a] = c64(h, 0.0);
            v[b] = c64(0.0, -h);
        }
        v
    };
    for m in -(l as i64)..=(l as i64) {
        cols.push(column(m));
    }
    ComplexMatrix::from_columns(&cols)
}

/// SO(M) generators `i(O_ij ⊗ 1 + 1 ⊗ O_ij)`, `i < j`, on two `M`-level
/// factors expressed in the spherical basis.
pub fn so_pair_generators(m_levels: usize) -> Result<Vec<ComplexMatrix>> {
    let w = spherical_basis(m_levels)?;
    let id = ComplexMatrix::identity(m_levels);
    let mut out = Vec::new();
    for i in 0..m_levels {
        for j in i + 1..m_levels {
            let o = ComplexMatrix::from_fn(m_levels, m_levels, |r, c| {
                if r == i && c == j {
                    c64(1.0, 0.0)
                } else if r == j && c == i {
                    c64(-1.0, 0.0)
                } else {
                    C64::default()
                }
            });
            let o = w.adjoint().matmul(&o).matmul(&w).scale(c64(0.0, 1.0));
            out.push(&kron(&o, &id) + &kron(&id, &o));
        }
    }
    Ok(out)
}

struct Params<'a> {
    family: ModelFamily,
    map: &'a BTreeMap<String, f64>,
}

impl Params<'_> {
    fn check_known(&self, known: &[&str]) -> Result<()> {
        match self.map.keys().find(|k| !known.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidArgument(format!(
                "unknown parameter {k:?} for {} (expected one of {known:?})",
                self.family.name()
            ))),
            None => Ok(()),
        }
    }

    fn required(&self, name: &str) -> Result<f64> {
        let v = self.map.get(name).copied().ok_or_else(|| {
            Error::InvalidArgument(format!("{} requires parameter {name:?}", self.family.name()))
        })?;
        finite(name, v)
    }

    fn optional(&self, name: &str, default: f64) -> Result<f64> {
        finite(name, self.map.get(name).copied().unwrap_or(default))
    }

    fn integer(&self, name: &str, default: Option<usize>) -> Result<usize> {
        let v = match (self.map.get(name), default) {
            (Some(&v), _) => v,
            (None, Some(d)) => return Ok(d),
            (None, None) => return self.required(name).map(|_| unreachable!()),
        };
        if v < 0.0 || v.fract() != 0.0 || !v.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "parameter {name:?} must be a non-negative integer, got {v}"
            )));
        }
        Ok(v as usize)
    }
}

fn finite(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidArgument(format!("parameter {name:?} is not finite")))
    }
}

fn qubit_weights(spec: &ModelSpec, n: usize) -> Result<Vec<f64>> {
    match &spec.weights {
        None => Ok(vec![1.0; n]),
        Some(w) if w.len() != n => Err(Error::InvalidArgument(format!(
            "{} weights given for {n} qubits",
            w.len()
        ))),
        Some(w) if w.iter().any(|&x| x == 0.0 || !x.is_finite()) => {
            Err(Error::InvalidArgument("coupling weights must be finite and non-zero".into()))
        }
        Some(w) => Ok(w.clone()),
    }
}

fn no_weights(spec: &ModelSpec) -> Result<()> {
    match spec.weights {
        Some(_) => Err(Error::InvalidArgument(format!(
            "{} does not take coupling weights",
            spec.family.name()
        ))),
        None => Ok(()),
    }
}

fn resolve_phi(spec: &ModelSpec, default: PhiChoice, dim_a: usize, ctx: PhiContext) -> Result<Vec<C64>> {
    let choice = spec.phi.clone().unwrap_or(default);
    let bad = |what: &str| {
        Err(Error::InvalidArgument(format!(
            "measurement state {what} is not available for {}",
            spec.family.name()
        )))
    };
    match choice {
        PhiChoice::Axis { axis, positive } => {
            if dim_a != 2 {
                return bad("'axis'");
            }
            Ok(pauli_eigenstate(axis, positive))
        }
        PhiChoice::Photon { n } => {
            if ctx != PhiContext::Cavity {
                return bad("'photon'");
            }
            if n >= dim_a {
                return Err(Error::InvalidArgument(format!(
                    "photon number {n} exceeds truncation {}",
                    dim_a - 1
                )));
            }
            Ok(basis_vector(dim_a, n))
        }
        PhiChoice::PlusChain => {
            if ctx != PhiContext::Chain {
                return bad("'plus_chain'");
            }
            let amp = c64(1.0 / (dim_a as f64).sqrt(), 0.0);
            Ok(vec![amp; dim_a])
        }
        PhiChoice::AngularZero => match ctx {
            PhiContext::Orbital(l) => Ok(basis_vector(dim_a, l)),
            _ => bad("'angular_zero'"),
        },
        PhiChoice::Basis { index } => {
            if index >= dim_a {
                return Err(Error::InvalidArgument(format!(
                    "basis index {index} out of range for station dimension {dim_a}"
                )));
            }
            Ok(basis_vector(dim_a, index))
        }
        PhiChoice::Vector { re, im } => {
            let im = if im.is_empty() { vec![0.0; re.len()] } else { im };
            if re.len() != dim_a || im.len() != dim_a {
                return Err(Error::InvalidArgument(format!(
                    "measurement vector must have {dim_a} components"
                )));
            }
            let v: Vec<C64> = re.iter().zip(&im).map(|(&r, &i)| c64(r, i)).collect();
            let n = norm(&v);
            if !(n.is_finite() && n > 0.0) {
                return Err(Error::InvalidArgument("measurement vector is zero or non-finite".into()));
            }
            Ok(v.iter().map(|z| z / n).collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PhiContext {
    Qubit,
    Cavity,
    Chain,
    Orbital(usize),
    Other,
}

fn b_qubit_count(p: &Params, spec: &ModelSpec) -> Result<usize> {
    let default = spec.weights.as_ref().map_or(2, Vec::len);
    let n = p.integer("N", Some(default))?;
    if !(1..=8).contains(&n) {
        return Err(Error::InvalidArgument(format!("N must lie in 1..=8, got {n}")));
    }
    Ok(n)
}

/// Assemble the coupled system described by `spec`.
pub fn build(spec: &ModelSpec) -> Result<CoupledSystem> {
    let p = Params {
        family: spec.family,
        map: &spec.parameters,
    };
    let x_plus = PhiChoice::Axis {
        axis: Axis::X,
        positive: true,
    };
    match spec.family {
        ModelFamily::GenericVector => {
            let names: Vec<String> = ["x", "y", "z"]
                .iter()
                .flat_map(|a| ["i", "x", "y", "z"].iter().map(move |m| format!("a{a}_{m}")))
                .collect();
            let mut known: Vec<&str> = names.iter().map(String::as_str).collect();
            known.push("N");
            p.check_known(&known)?;
            let n = b_qubit_count(&p, spec)?;
            let w = qubit_weights(spec, n)?;
            let basis = [ComplexMatrix::identity(2), pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z)];
            let dim = 2 << n;
            let mut h = ComplexMatrix::zeros(dim, dim);
            for (alpha, axis) in ["x", "y", "z"].iter().zip(Axis::ALL) {
                let mut a_op = ComplexMatrix::zeros(2, 2);
                for (mu, sigma) in ["i", "x", "y", "z"].iter().zip(&basis) {
                    let c = p.optional(&format!("a{alpha}_{mu}"), 0.0)?;
                    a_op = &a_op + &sigma.scale_real(c);
                }
                h = &h + &kron(&a_op, &collective_spin(n, &w, axis)?);
            }
            let phi = resolve_phi(spec, x_plus, 2, PhiContext::Qubit)?;
            CoupledSystem::new(2, vec![2; n], h, phi, "generic_vector")
        }
        ModelFamily::Xy => {
            p.check_known(&["J", "N"])?;
            let j = p.required("J")?;
            let n = b_qubit_count(&p, spec)?;
            let w = qubit_weights(spec, n)?;
            let h = &kron(&pauli(Axis::X), &collective_spin(n, &w, Axis::X)?)
                + &kron(&pauli(Axis::Y), &collective_spin(n, &w, Axis::Y)?);
            let phi = resolve_phi(spec, x_plus, 2, PhiContext::Qubit)?;
            CoupledSystem::new(2, vec![2; n], h.scale_real(j / 2.0), phi, "xy")
        }
        ModelFamily::DwavePair => {
            p.check_known(&["J", "delta", "N"])?;
            let j = p.required("J")?;
            let delta = p.required("delta")?;
            let n = b_qubit_count(&p, spec)?;
            let w = qubit_weights(spec, n)?;
            let h = &kron(&ComplexMatrix::identity(2), &collective_spin(n, &w, Axis::X)?).scale_real(delta)
                + &kron(&pauli(Axis::Z), &collective_spin(n, &w, Axis::Z)?).scale_real(j);
            let phi = resolve_phi(spec, x_plus, 2, PhiContext::Qubit)?;
            CoupledSystem::new(2, vec![2; n], h, phi, "dwave_pair")
        }
        ModelFamily::Heisenberg => {
            p.check_known(&["J", "N"])?;
            let j = p.required("J")?;
            let n = b_qubit_count(&p, spec)?;
            let w = qubit_weights(spec, n)?;
            let dim = 2 << n;
            let mut h = ComplexMatrix::zeros(dim, dim);
            for axis in Axis::ALL {
                h = &h + &kron(&pauli(axis), &collective_spin(n, &w, axis)?);
            }
            let z_minus = PhiChoice::Axis {
                axis: Axis::Z,
                positive: false,
            };
            let phi = resolve_phi(spec, z_minus, 2, PhiContext::Qubit)?;
            CoupledSystem::new(2, vec![2; n], h.scale_real(j), phi, "heisenberg")
        }
        ModelFamily::JaynesCummings => {
            p.check_known(&["epsilon", "g", "J", "n_max"])?;
            no_weights(spec)?;
            let eps = p.required("epsilon")?;
            let g = p.required("g")?;
            let j = p.required("J")?;
            let n_max = p.integer("n_max", Some(6))?;
            let photons = match &spec.phi {
                None => 1,
                Some(PhiChoice::Photon { n }) => *n,
                Some(_) => {
                    return Err(Error::InvalidArgument(
                        "jaynes_cummings measures a photon number state".into(),
                    ))
                }
            };
            let needed = (photons + 2).max(4);
            if n_max < needed {
                return Err(Error::InvalidArgument(format!(
                    "n_max = {n_max} cannot hold the measured sector; need n_max >= {needed}"
                )));
            }
            let b = annihilation(n_max);
            let bd = b.adjoint();
            let dim_a = n_max + 1;
            let ones = [1.0, 1.0];
            let sz = collective_spin(2, &ones, Axis::Z)?.scale_real(0.5);
            let sx = collective_spin(2, &ones, Axis::X)?;
            let sy = collective_spin(2, &ones, Axis::Y)?;
            let i_c = c64(0.0, 1.0);
            let s_plus = &sx + &sy.scale(i_c);
            let s_minus = &sx - &sy.scale(i_c);
            let h = &(&(&kron(&bd.matmul(&b), &ComplexMatrix::identity(4)).scale_real(eps)
                + &kron(&ComplexMatrix::identity(dim_a), &sz).scale_real(g))
                + &kron(&b, &s_plus).scale_real(j / 2.0))
                + &kron(&bd, &s_minus).scale_real(j / 2.0);
            let phi = resolve_phi(
                spec,
                PhiChoice::Photon { n: photons },
                dim_a,
                PhiContext::Cavity,
            )?;
            CoupledSystem::new(dim_a, vec![2, 2], h, phi, "jaynes_cummings")
        }
        ModelFamily::MultilevelSo => {
            p.check_known(&["M"])?;
            no_weights(spec)?;
            let m = p.integer("M", Some(3))?;
            if m < 3 || m % 2 == 0 {
                return Err(Error::InvalidArgument(format!(
                    "multilevel_so needs odd M >= 3, got {m}"
                )));
            }
            let generators = so_pair_generators(m)?;
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed.unwrap_or(0));
            let dim = m * m * m;
            let mut h = ComplexMatrix::zeros(dim, dim);
            for gen in &generators {
                let c = random_hermitian(m, &mut rng);
                h = &h + &kron(&c, gen);
            }
            let phi = resolve_phi(spec, PhiChoice::Basis { index: 0 }, m, PhiContext::Other)?;
            CoupledSystem::new(m, vec![m, m], h, phi, "multilevel_so")
        }
        ModelFamily::SpinOrbit => {
            p.check_known(&["h", "l"])?;
            no_weights(spec)?;
            let hc = p.required("h")?;
            let l = p.integer("l", None)?;
            if l == 0 {
                return Err(Error::InvalidArgument("spin_orbit needs l >= 1".into()));
            }
            let (lx, ly, _) = angular_momentum(l);
            let ones = [1.0, 1.0];
            let h = &kron(&lx, &collective_spin(2, &ones, Axis::X)?)
                + &kron(&ly, &collective_spin(2, &ones, Axis::Y)?);
            let phi = resolve_phi(spec, PhiChoice::AngularZero, 2 * l + 1, PhiContext::Orbital(l))?;
            CoupledSystem::new(2 * l + 1, vec![2, 2], h.scale_real(hc), phi, "spin_orbit")
        }
        ModelFamily::DwaveChain => {
            p.check_known(&["J", "delta", "N"])?;
            no_weights(spec)?;
            let j = p.required("J")?;
            let delta = p.required("delta")?;
            let n = p.integer("N", None)?;
            if !(4..=9).contains(&n) {
                return Err(Error::InvalidArgument(format!("dwave_chain needs 4 <= N <= 9, got {n}")));
            }
            let h = chain_hamiltonian(n, j, delta);
            let dim_a = 1usize << (n - 2);
            let phi = resolve_phi(spec, PhiChoice::PlusChain, dim_a, PhiContext::Chain)?;
            CoupledSystem::new(dim_a, vec![2, 2], h, phi, format!("dwave_chain_n{n}"))
        }
    }
}

fn random_hermitian(m: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut c = ComplexMatrix::zeros(m, m);
    for r in 0..m {
        c[(r, r)] = c64(rng.gen_range(-1.0..1.0), 0.0);
        for s in r + 1..m {
            let z = c64(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            c[(r, s)] = z;
            c[(s, r)] = z.conj();
        }
    }
    c
}

/// Register position of chain site `k` (1-based): the intermediate sites
/// `2..N−1` form `A` (positions `0..N−2`), the end sites form `B`.
fn chain_position(site: usize, n: usize) -> usize {
    match site {
        1 => n - 2,
        s if s == n => n - 1,
        s => s - 2,
    }
}

/// `J(X₁ + X_N) + Δ Σ_{i<N} Z_i Z_{i+1}` with the register ordered `A ⊗ B`.
fn chain_hamiltonian(n: usize, j: f64, delta: f64) -> ComplexMatrix {
    let (x, z) = (pauli(Axis::X), pauli(Axis::Z));
    let mut h = &qubit_product(n, &[(chain_position(1, n), x.clone())])
        + &qubit_product(n, &[(chain_position(n, n), x)]);
    h = h.scale_real(j);
    for i in 1..n {
        let zz = qubit_product(
            n,
            &[(chain_position(i, n), z.clone()), (chain_position(i + 1, n), z.clone())],
        );
        h = &h + &zz.scale_real(delta);
    }
    h
}

/// The chain's `V_B` in closed form together with its two real-axis
/// eigenvalues.
#[derive(Debug, Clone)]
pub struct ChainPrediction {
    pub a: C64,
    pub b: C64,
    /// Eigenvalue on the singlet `(|01⟩ − |10⟩)/√2`.
    pub e1: C64,
    /// Eigenvalue on `(|00⟩ − |11⟩)/√2`.
    pub e2: C64,
    pub v_b: ComplexMatrix,
}

/// Interior factors `a`, `b` of the chain's effective operator.
///
/// For `N ≥ 5` these are expectation values over `|+⟩` on sites `3..N−2`:
/// `a = ⟨e^{−iΔτ(Z₃ + Z_{N−2} + h₃)}⟩`, `b = ⟨e^{−iΔτ(Z₃ − Z_{N−2} + h₃)}⟩`
/// with `h₃ = Σ_{i=3}^{N−3} Z_i Z_{i+1}` (empty for `N = 5`). For `N = 4` the
/// two intermediate sites couple directly and `a = e^{−iΔτ}`, `b = e^{iΔτ}`.
pub fn chain_coefficients(n: usize, delta: f64, tau: f64) -> Result<(C64, C64)> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("chain needs N >= 4, got {n}")));
    }
    if n == 4 {
        return Ok((C64::from_polar(1.0, -delta * tau), C64::from_polar(1.0, delta * tau)));
    }
    let k = n - 4;
    let mut a = C64::default();
    let mut b = C64::default();
    for bits in 0..(1usize << k) {
        let z: Vec<f64> = (0..k)
            .map(|i| if bits >> (k - 1 - i) & 1 == 1 { 1.0 } else { -1.0 })
            .collect();
        let h3: f64 = z.windows(2).map(|w| w[0] * w[1]).sum();
        let (first, last) = (z[0], z[k - 1]);
        a += C64::from_polar(1.0, -delta * tau * (first + last + h3));
        b += C64::from_polar(1.0, -delta * tau * (first - last + h3));
    }
    let norm = (1usize << k) as f64;
    Ok((a / norm, b / norm))
}

/// Closed-form chain prediction for `N ≥ 5`.
pub fn chain_prediction(n: usize, j: f64, delta: f64, tau: f64) -> Result<ChainPrediction> {
    if n < 5 {
        return Err(Error::InvalidArgument("closed form holds for N >= 5".into()));
    }
    let (a, b) = chain_coefficients(n, delta, tau)?;
    let phi = tau * (j * j + delta * delta).sqrt();
    let theta = delta.atan2(j);
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let (x, z) = (pauli(Axis::X), pauli(Axis::Z));
    let xx = kron(&x, &x);
    let zz = kron(&z, &z);
    let xsum = &kron(&x, &ComplexMatrix::identity(2)) + &kron(&ComplexMatrix::identity(2), &x);
    let f = |sign: f64| {
        let mut m = ComplexMatrix::identity(4).scale_real(cp * cp);
        m = &m - &(&xx.scale_real(ct * ct) + &zz.scale_real(sign * st * st)).scale_real(sp * sp);
        &m - &xsum.scale(c64(0.0, 0.5 * (2.0 * phi).sin() * ct))
    };
    let v_b = (&f(1.0).scale(a) + &f(-1.0).scale(b)).scale_real(0.5);
    let r = 1.0 - 2.0 * sp * sp * st * st;
    Ok(ChainPrediction {
        a,
        b,
        e1: (a + b * r) * 0.5,
        e2: (b + a * r) * 0.5,
        v_b,
    })
}

/// `(I_A ⊗ U_B) H (I_A ⊗ U_B)†`; `φ` is unchanged.
pub fn conjugate_b(system: &CoupledSystem, u_b: &ComplexMatrix) -> Result<CoupledSystem> {
    let d = system.dim_b();
    if u_b.dims() != (d, d) {
        return Err(Error::DimensionMismatch(format!(
            "U_B is {}x{}, B has dimension {d}",
            u_b.rows(),
            u_b.cols()
        )));
    }
    let defect = u_b.unitarity_defect();
    if defect > UNITARY_TOL {
        return Err(Error::NotUnitary { deviation: defect });
    }
    let u = kron(&ComplexMatrix::identity(system.dim_a()), u_b);
    let h = u.matmul(system.hamiltonian()).matmul(&u.adjoint());
    CoupledSystem::new(
        system.dim_a(),
        system.b_dims().to_vec(),
        h,
        system.phi().to_vec(),
        system.label().to_string(),
    )
}

/// [`conjugate_b`] with a unitary on a single `B` factor.
pub fn conjugate_b_factor(system: &CoupledSystem, u: &ComplexMatrix, factor: usize) -> Result<CoupledSystem> {
    let full = embed(u, factor, system.b_dims())?;
    conjugate_b(system, &full)
}
