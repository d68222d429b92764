//! Hilbert-space structure of the `B` register.
//!
//! Qubit convention: `|0⟩` is spin-down, `σ_z|0⟩ = −|0⟩`, `σ_z|1⟩ = +|1⟩`.
//! With `X` the usual bit flip this fixes `Y = [[0, i], [−i, 0]]` so that
//! `XY = iZ`. Under this convention the two-qubit basis
//! `{|s⟩, |t₋⟩ = |00⟩, |t₀⟩, |t₊⟩ = |11⟩}` is ordered by total `σ_z`, and
//! `σ⁺ = X + iY` maps `|0⟩ → 2|1⟩`.
//!
//! Multi-qubit registers are big-endian: qubit 0 is the most significant
//! index, so `|01⟩` is basis index 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    basis_vector, c64, inner, joint_null_space, norm, ComplexMatrix, HermitianEigen, C64,
};
use crate::models::collective_spin;

/// Density-matrix validation tolerance (Hermiticity, trace, positivity).
pub const STATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Pauli matrix in the internal convention.
pub fn pauli(axis: Axis) -> ComplexMatrix {
    let z = C64::default();
    let one = c64(1.0, 0.0);
    let i = c64(0.0, 1.0);
    let rows = match axis {
        Axis::X => [[z, one], [one, z]],
        Axis::Y => [[z, i], [-i, z]],
        Axis::Z => [[-one, z], [z, one]],
    };
    ComplexMatrix::from_fn(2, 2, |r, c| rows[r][c])
}

/// Unit eigenvector of a Pauli matrix with eigenvalue `sign` (±1).
pub fn pauli_eigenstate(axis: Axis, positive: bool) -> Vec<C64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let s = if positive { 1.0 } else { -1.0 };
    match axis {
        Axis::X => vec![c64(h, 0.0), c64(s * h, 0.0)],
        // Y|v⟩ = ±|v⟩ with Y = [[0, i], [−i, 0]]: v = (1, ∓i)/√2.
        Axis::Y => vec![c64(h, 0.0), c64(0.0, -s * h)],
        Axis::Z => {
            if positive {
                vec![C64::default(), c64(1.0, 0.0)]
            } else {
                vec![c64(1.0, 0.0), C64::default()]
            }
        }
    }
}

/// A tensor factor of the `B` register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    dim: usize,
}

impl Subsystem {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidArgument(format!("subsystem dimension must be >= 2, got {dim}")));
        }
        Ok(Self { dim })
    }

    pub fn qubit() -> Self {
        Self { dim: 2 }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

/// Orthonormal basis whose first `singlet_count` vectors span the singlet sector.
#[derive(Debug, Clone)]
pub struct OrderedBasis {
    pub vectors: Vec<Vec<C64>>,
    pub singlet_count: usize,
    pub labels: Vec<String>,
}

impl OrderedBasis {
    /// Matrix with the basis vectors as columns.
    pub fn as_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_columns(&self.vectors).expect("basis vectors share a dimension")
    }

    pub fn singlets(&self) -> &[Vec<C64>] {
        &self.vectors[..self.singlet_count]
    }

    /// Projector onto the singlet sector.
    pub fn singlet_projector(&self) -> ComplexMatrix {
        let n = self.vectors[0].len();
        self.singlets()
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, v| &acc + &ComplexMatrix::outer(v, v))
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// A validated density matrix on a register of subsystems.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        check_dims(&matrix, &dims)?;
        let scale = matrix.frobenius_norm().max(1.0);
        let asym = matrix.max_hermitian_asymmetry().unwrap_or(f64::INFINITY);
        if asym > STATE_TOL * scale {
            return Err(Error::NotHermitian { max_asymmetry: asym });
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidArgument(format!("density matrix trace {tr} != 1")));
        }
        let min = HermitianEigen::new(&matrix)?.min_value();
        if min < -STATE_TOL {
            return Err(Error::InvalidArgument(format!(
                "density matrix has negative eigenvalue {min:e}"
            )));
        }
        Ok(Self { matrix, dims })
    }

    /// Normalises a positive operator by its trace before validating.
    pub fn from_unnormalized(matrix: ComplexMatrix, dims: Vec<usize>) -> Result<Self> {
        let tr = matrix.trace().re;
        if tr <= 0.0 {
            return Err(Error::InvalidArgument(format!("cannot normalise operator with trace {tr}")));
        }
        Self::new(matrix.scale_real(1.0 / tr), dims)
    }

    pub fn from_pure(psi: &[C64], dims: Vec<usize>) -> Result<Self> {
        let n = norm(psi);
        if (n - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidArgument(format!("state vector has norm {n}")));
        }
        Self::new(ComplexMatrix::outer(psi, psi), dims)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self {
            matrix: ComplexMatrix::identity(d).scale_real(1.0 / d as f64),
            dims,
        }
    }

    pub fn product(&self, other: &Self) -> Self {
        Self {
            matrix: crate::linalg::kron(&self.matrix, &other.matrix),
            dims: self.dims.iter().chain(&other.dims).copied().collect(),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        HermitianEigen::new(&self.matrix)
            .map(|e| e.values)
            .unwrap_or_default()
    }

    /// ⟨ψ|ρ|ψ⟩.
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        self.matrix.sandwich(psi, psi).re
    }

    /// U ρ U†.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        if u.dims() != self.matrix.dims() {
            return Err(Error::DimensionMismatch("unitary does not match state".into()));
        }
        Self::new(u.matmul(&self.matrix).matmul(&u.adjoint()), self.dims.clone())
    }
}

fn check_dims(matrix: &ComplexMatrix, dims: &[usize]) -> Result<()> {
    if !matrix.is_square() {
        return Err(Error::NotSquare {
            rows: matrix.rows(),
            cols: matrix.cols(),
        });
    }
    if dims.is_empty() || dims.iter().any(|&d| d < 1) {
        return Err(Error::InvalidArgument(format!("bad subsystem dims {dims:?}")));
    }
    let d: usize = dims.iter().product();
    if d != matrix.rows() {
        return Err(Error::DimensionMismatch(format!(
            "dims {dims:?} give {d}, matrix is {}x{}",
            matrix.rows(),
            matrix.cols()
        )));
    }
    Ok(())
}

/// Mixed-radix digits of `index` (most significant first).
fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

fn compose(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&d, &n)| acc * n + d)
}

/// Singlet sector of `n_qubits` qubits followed by an orthonormal completion.
///
/// The singlets span the joint kernel of the collective `σ_x`, `σ_z` (hence
/// `σ_y`). They are fixed deterministically by projecting computational basis
/// states onto that kernel in lexicographic order and orthonormalising. The
/// completion is grouped by collective `σ_z` eigenvalue (ascending) and is
/// lexicographic within a group.
pub fn singlet_basis(n_qubits: usize) -> Result<OrderedBasis> {
    if !n_qubits.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "singlet basis requires an even number of qubits, got {n_qubits}"
        )));
    }
    if !(2..=8).contains(&n_qubits) {
        return Err(Error::InvalidArgument(format!(
            "singlet basis supports 2..=8 qubits, got {n_qubits}"
        )));
    }
    let dim = 1usize << n_qubits;
    let weights = vec![1.0; n_qubits];
    let sx = collective_spin(n_qubits, &weights, Axis::X)?;
    let sz = collective_spin(n_qubits, &weights, Axis::Z)?;
    let kernel = joint_null_space(&[&sx, &sz], 1e-10)?;

    let weight_of = |k: usize| k.count_ones() as usize;
    let half = n_qubits / 2;

    let mut singlets: Vec<Vec<C64>> = Vec::new();
    for k in (0..dim).filter(|&k| weight_of(k) == half) {
        if singlets.len() == kernel.len() {
            break;
        }
        let e = basis_vector(dim, k);
        let mut w = vec![C64::default(); dim];
        for v in &kernel {
            let c = inner(v, &e);
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi += c * vi;
            }
        }
        if let Some(v) = orthonormalize_against(&w, &singlets) {
            singlets.push(v);
        }
    }
    if singlets.len() != kernel.len() {
        return Err(Error::Numerical("failed to span the singlet sector".into()));
    }

    let mut completion: Vec<(Vec<C64>, i64)> = Vec::new();
    for w in 0..=n_qubits {
        let m = 2 * w as i64 - n_qubits as i64;
        for k in (0..dim).filter(|&k| weight_of(k) == w) {
            let e = basis_vector(dim, k);
            if w != half {
                completion.push((e, m));
                continue;
            }
            let against: Vec<Vec<C64>> = singlets
                .iter()
                .cloned()
                .chain(completion.iter().filter(|(_, mm)| *mm == 0).map(|(v, _)| v.clone()))
                .collect();
            if let Some(v) = orthonormalize_against(&e, &against) {
                completion.push((v, m));
            }
        }
    }

    let singlet_count = singlets.len();
    let labels = if n_qubits == 2 {
        vec!["s".into(), "t-".into(), "t0".into(), "t+".into()]
    } else {
        let mut labels: Vec<String> = (1..=singlet_count).map(|j| format!("s{j}")).collect();
        let mut counter = std::collections::BTreeMap::<i64, usize>::new();
        for (_, m) in &completion {
            let c = counter.entry(*m).or_insert(0);
            *c += 1;
            labels.push(format!("t{c}[m={m}]"));
        }
        labels
    };

    let vectors: Vec<Vec<C64>> = singlets.into_iter().chain(completion.into_iter().map(|(v, _)| v)).collect();
    debug_assert_eq!(vectors.len(), dim);
    Ok(OrderedBasis {
        vectors,
        singlet_count,
        labels,
    })
}

/// Modified Gram–Schmidt with one re-orthogonalisation pass; `None` when the
/// remainder is numerically zero.
fn orthonormalize_against(v: &[C64], basis: &[Vec<C64>]) -> Option<Vec<C64>> {
    let start = norm(v);
    if start == 0.0 {
        return None;
    }
    let mut w = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = inner(b, &w);
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= c * bi;
            }
        }
    }
    let n = norm(&w);
    (n > 1e-6 * start.max(1.0)).then(|| w.iter().map(|z| z / n).collect())
}

/// D_N = N! / [(N/2 + 1)! (N/2)!], the number of singlets of N qubits.
pub fn singlet_count(n_qubits: usize) -> usize {
    let h = n_qubits / 2;
    // Catalan number C_h = binom(2h, h) / (h + 1).
    let mut binom: u128 = 1;
    for k in 0..h {
        binom = binom * (n_qubits - k) as u128 / (k + 1) as u128;
    }
    (binom / (h as u128 + 1)) as usize
}

/// Partial trace keeping the subsystems in `keep` (in their original order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let m = partial_trace_operator(rho.matrix(), rho.dims(), keep)?;
    let kept_dims = sorted_unique(keep).iter().map(|&k| rho.dims()[k]).collect();
    DensityMatrix::new(m, kept_dims)
}

/// Partial trace of an arbitrary operator on a register with factor `dims`.
pub fn partial_trace_operator(m: &ComplexMatrix, dims: &[usize], keep: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    if keep.is_empty() {
        return Err(Error::InvalidArgument("partial trace must keep at least one subsystem".into()));
    }
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::InvalidArgument(format!(
            "subsystem index {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    let keep = sorted_unique(keep);
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let kdims: Vec<usize> = keep.iter().map(|&k| dims[k]).collect();
    let tdims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kd: usize = kdims.iter().product();

    let n = m.rows();
    let split: Vec<(usize, usize)> = (0..n)
        .map(|i| {
            let d = digits(i, dims);
            let kk: Vec<usize> = keep.iter().map(|&k| d[k]).collect();
            let tt: Vec<usize> = traced.iter().map(|&k| d[k]).collect();
            (compose(&kk, &kdims), compose(&tt, &tdims))
        })
        .collect();

    let mut out = ComplexMatrix::zeros(kd, kd);
    for i in 0..n {
        for j in 0..n {
            if split[i].1 == split[j].1 {
                out[(split[i].0, split[j].0)] += m[(i, j)];
            }
        }
    }
    Ok(out)
}

fn sorted_unique(v: &[usize]) -> Vec<usize> {
    let mut v = v.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Partial transpose of a bipartite state on factor `part` (0 or 1).
pub fn partial_transpose(rho: &DensityMatrix, part: usize) -> Result<ComplexMatrix> {
    partial_transpose_operator(rho.matrix(), rho.dims(), part)
}

/// Partial transpose of a bipartite operator (trace need not be 1).
pub fn partial_transpose_operator(m: &ComplexMatrix, dims: &[usize], part: usize) -> Result<ComplexMatrix> {
    if dims.len() != 2 {
        return Err(Error::InvalidArgument(format!(
            "partial transpose needs a bipartition; got {} subsystems (use partial_transpose_subsystems)",
            dims.len()
        )));
    }
    partial_transpose_subsystems(m, dims, &[part])
}

/// Partial transpose over the subsystems listed in `parts`.
pub fn partial_transpose_subsystems(m: &ComplexMatrix, dims: &[usize], parts: &[usize]) -> Result<ComplexMatrix> {
    check_dims(m, dims)?;
    if let Some(&bad) = parts.iter().find(|&&p| p >= dims.len()) {
        return Err(Error::InvalidArgument(format!(
            "subsystem index {bad} out of range for {} subsystems",
            dims.len()
        )));
    }
    let n = m.rows();
    let digs: Vec<Vec<usize>> = (0..n).map(|i| digits(i, dims)).collect();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| {
        let mut di = digs[i].clone();
        let mut dj = digs[j].clone();
        for &p in parts {
            std::mem::swap(&mut di[p], &mut dj[p]);
        }
        m[(compose(&di, dims), compose(&dj, dims))]
    }))
}

/// Named two-qubit states: the basis labels `s`, `t-`, `t0`, `t+`, the Bell
/// states `phi+`, `phi-`, `psi+`, `psi-`, and computational bitstrings.
pub fn two_qubit_state(label: &str) -> Option<Vec<C64>> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let v = |a: f64, b: f64, c: f64, d: f64| vec![c64(a, 0.0), c64(b, 0.0), c64(c, 0.0), c64(d, 0.0)];
    Some(match label {
        "s" | "psi-" | "singlet" => v(0.0, h, -h, 0.0),
        "t0" | "psi+" => v(0.0, h, h, 0.0),
        "t-" => v(1.0, 0.0, 0.0, 0.0),
        "t+" => v(0.0, 0.0, 0.0, 1.0),
        "phi+" => v(h, 0.0, 0.0, h),
        "phi-" => v(h, 0.0, 0.0, -h),
        _ => return None,
    })
}

/// Computational basis state from a digit string such as `"01"` or `"20"`.
pub fn product_state(label: &str, dims: &[usize]) -> Result<Vec<C64>> {
    let ds: Vec<usize> = label
        .chars()
        .filter(|c| !matches!(c, ',' | ' ' | '|' | '>' | '⟩'))
        .map(|c| c.to_digit(10).map(|d| d as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| Error::InvalidArgument(format!("bad basis label {label:?}")))?;
    if ds.len() != dims.len() || ds.iter().zip(dims).any(|(&d, &n)| d >= n) {
        return Err(Error::InvalidArgument(format!(
            "basis label {label:?} does not fit subsystem dims {dims:?}"
        )));
    }
    Ok(basis_vector(dims.iter().product(), compose(&ds, dims)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::kron;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli(Axis::X), pauli(Axis::Y), pauli(Axis::Z));
        assert!(x.matmul(&y).max_abs_diff(&z.scale(c64(0.0, 1.0))) < 1e-15);
        assert_eq!(z.matvec(&[c64(1.0, 0.0), C64::default()])[0], c64(-1.0, 0.0));
        for axis in Axis::ALL {
            for pos in [true, false] {
                let v = pauli_eigenstate(axis, pos);
                let pv = pauli(axis).matvec(&v);
                let s = if pos { 1.0 } else { -1.0 };
                assert!(pv.iter().zip(&v).all(|(a, b)| (a - b * s).norm() < 1e-15));
            }
        }
    }

    #[test]
    fn two_qubit_singlet_basis_matches_beta() {
        let b = singlet_basis(2).unwrap();
        assert_eq!(b.singlet_count, 1);
        for (k, label) in ["s", "t-", "t0", "t+"].iter().enumerate() {
            let expect = two_qubit_state(label).unwrap();
            let d = b.vectors[k].iter().zip(&expect).map(|(a, e)| (a - e).norm()).fold(0.0, f64::max);
            assert!(d < 1e-12, "{label}: {:?}", b.vectors[k]);
        }
        assert_eq!(b.labels, vec!["s", "t-", "t0", "t+"]);
    }

    #[test]
    fn singlet_counts() {
        assert_eq!(singlet_basis(4).unwrap().singlet_count, 2);
        assert_eq!(singlet_basis(6).unwrap().singlet_count, 5);
        assert_eq!([2, 4, 6, 8].map(singlet_count), [1, 2, 5, 14]);
    }

    #[test]
    fn singlet_basis_is_unitary_and_annihilated() {
        for n in [2, 4, 6] {
            let b = singlet_basis(n).unwrap();
            let u = b.as_matrix();
            assert!(u.unitarity_defect() < 1e-12, "N = {n}");
            let w = vec![1.0; n];
            for axis in Axis::ALL {
                let s = collective_spin(n, &w, axis).unwrap();
                for v in b.singlets() {
                    assert!(norm(&s.matvec(v)) <= 1e-10);
                }
            }
        }
    }

    #[test]
    fn odd_qubit_count_rejected() {
        assert!(matches!(singlet_basis(3), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn partial_trace_of_product() {
        let a = DensityMatrix::new(
            ComplexMatrix::from_rows(&[
                vec![c64(0.7, 0.0), c64(0.1, 0.2)],
                vec![c64(0.1, -0.2), c64(0.3, 0.0)],
            ])
            .unwrap(),
            vec![2],
        )
        .unwrap();
        let b = DensityMatrix::maximally_mixed(vec![3]);
        let ab = a.product(&b);
        let back = partial_trace(&ab, &[0]).unwrap();
        assert!(back.matrix().max_abs_diff(a.matrix()) < 1e-15);
        let back_b = partial_trace(&ab, &[1]).unwrap();
        assert!(back_b.matrix().max_abs_diff(b.matrix()) < 1e-15);
    }

    #[test]
    fn singlet_marginal_is_maximally_mixed() {
        let s = DensityMatrix::from_pure(&two_qubit_state("s").unwrap(), vec![2, 2]).unwrap();
        let r = partial_trace(&s, &[0]).unwrap();
        assert!(r.matrix().max_abs_diff(&ComplexMatrix::identity(2).scale_real(0.5)) < 1e-15);
    }

    #[test]
    fn partial_trace_bad_index() {
        let s = DensityMatrix::maximally_mixed(vec![2, 2]);
        assert!(partial_trace(&s, &[2]).is_err());
        assert!(partial_trace(&s, &[]).is_err());
    }

    #[test]
    fn singlet_partial_transpose() {
        let s = DensityMatrix::from_pure(&two_qubit_state("s").unwrap(), vec![2, 2]).unwrap();
        let pt = partial_transpose(&s, 1).unwrap();
        let e = HermitianEigen::new(&pt).unwrap();
        assert!(approx(e.min_value(), -0.5, 1e-12));
        assert!(approx(pt.trace().re, 1.0, 1e-15));
    }

    #[test]
    fn singlet_down_mixture_partial_transpose() {
        let s = two_qubit_state("s").unwrap();
        let zz = two_qubit_state("t-").unwrap();
        let m = &ComplexMatrix::outer(&s, &s) + &ComplexMatrix::outer(&zz, &zz);
        let pt = partial_transpose_operator(&m, &[2, 2], 1).unwrap();
        let min = HermitianEigen::new(&pt).unwrap().min_value();
        assert!(approx(min, (1.0 - 2f64.sqrt()) / 2.0, 1e-12));
    }

    #[test]
    fn product_state_is_ppt() {
        let a = DensityMatrix::from_pure(&pauli_eigenstate(Axis::Y, true), vec![2]).unwrap();
        let b = DensityMatrix::from_pure(&pauli_eigenstate(Axis::X, false), vec![2]).unwrap();
        let pt = partial_transpose(&a.product(&b), 0).unwrap();
        assert!(HermitianEigen::new(&pt).unwrap().min_value() >= -1e-10);
    }

    #[test]
    fn more_than_two_parts_needs_bipartition() {
        let m = ComplexMatrix::identity(8);
        assert!(partial_transpose_operator(&m, &[2, 2, 2], 0).is_err());
        let pt = partial_transpose_subsystems(&m, &[2, 2, 2], &[0, 2]).unwrap();
        assert_eq!(pt, m);
    }

    #[test]
    fn product_state_labels() {
        let v = product_state("01", &[2, 2]).unwrap();
        assert_eq!(v[1], c64(1.0, 0.0));
        assert!(product_state("2", &[2]).is_err());
        let k = kron(&pauli(Axis::X), &ComplexMatrix::identity(2));
        assert_eq!(k.matvec(&v)[3], c64(1.0, 0.0));
    }

    #[test]
    fn density_matrix_validation() {
        let bad = ComplexMatrix::identity(2);
        assert!(DensityMatrix::new(bad, vec![2]).is_err());
        let neg = ComplexMatrix::from_real_rows(&[&[1.2, 0.0], &[0.0, -0.2]]).unwrap();
        assert!(DensityMatrix::new(neg, vec![2]).is_err());
        assert!(DensityMatrix::new(ComplexMatrix::identity(4).scale_real(0.25), vec![2, 3]).is_err());
    }
}
