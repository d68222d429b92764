//! Hermitian eigendecomposition (cyclic complex Jacobi) and the spectral
//! propagator `exp(−i t H)` built from it.

use super::matrix::{c64, ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Relative Hermiticity tolerance accepted by [`exp_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-12;

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition `H = W diag(values) W†` of a Hermitian matrix.
///
/// `values` are ascending; column `k` of `vectors` is the eigenvector for
/// `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn new(h: &ComplexMatrix) -> Result<Self> {
        check_hermitian(h)?;
        Ok(jacobi(&h.hermitian_part()))
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Spectral synthesis W f(Λ) W†.
    pub fn synthesize(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.dim();
        let w = &self.vectors;
        let fv: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            (0..n).map(|k| w[(i, k)] * fv[k] * w[(j, k)].conj()).sum()
        })
    }

    /// exp(−i t H).
    pub fn propagator(&self, t: f64) -> ComplexMatrix {
        self.synthesize(|x| C64::from_polar(1.0, -t * x))
    }

    pub fn min_value(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }

    pub fn column(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }
}

fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows(),
            cols: h.cols(),
        });
    }
    let asym = h.max_hermitian_asymmetry().unwrap_or(f64::INFINITY);
    if asym > HERMITIAN_TOL * h.frobenius_norm().max(f64::MIN_POSITIVE) && asym > 0.0 {
        return Err(Error::NotHermitian {
            max_asymmetry: asym,
        });
    }
    Ok(())
}

/// Cyclic Jacobi on an exactly Hermitian matrix.
fn jacobi(h: &ComplexMatrix) -> HermitianEigen {
    let n = h.rows();
    let mut a = h.clone();
    let mut w = ComplexMatrix::identity(n);
    let scale = h.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off.sqrt() <= 1e-17 * scale || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let g = apq.norm();
                if g == 0.0 {
                    continue;
                }
                let app = a[(p, p)].re;
                let aqq = a[(q, q)].re;
                let phase = apq / g;
                let theta = (aqq - app) / (2.0 * g);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Rephase column q so a_pq becomes real, then a real Jacobi rotation.
                let ph_c = phase.conj();
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)] * ph_c;
                    a[(k, p)] = akp * c - akq * s;
                    a[(k, q)] = akp * s + akq * c;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)] * phase;
                    a[(p, k)] = apk * c - aqk * s;
                    a[(q, k)] = apk * s + aqk * c;
                }
                a[(p, q)] = C64::default();
                a[(q, p)] = C64::default();
                a[(p, p)] = c64(a[(p, p)].re, 0.0);
                a[(q, q)] = c64(a[(q, q)].re, 0.0);
                for k in 0..n {
                    let wkp = w[(k, p)];
                    let wkq = w[(k, q)] * ph_c;
                    w[(k, p)] = wkp * c - wkq * s;
                    w[(k, q)] = wkp * s + wkq * c;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, k| w[(i, order[k])]);
    HermitianEigen { values, vectors }
}

/// exp(−i·t·h) for Hermitian `h`, by spectral synthesis.
pub fn exp_hermitian(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time must be finite, got {t}")));
    }
    if t == 0.0 {
        check_hermitian(h)?;
        return Ok(ComplexMatrix::identity(h.rows()));
    }
    Ok(HermitianEigen::new(h)?.propagator(t))
}

/// Orthonormal basis of the joint kernel of `ops` (all acting on the same space).
///
/// Kernel vectors are the eigenvectors of `G = Σ op†op` with eigenvalue at
/// most `tol·max(‖G‖_F, 1)`. Callers that need a residual bound should check
/// `‖op·v‖` directly, since eigenvalues of `G` only resolve `‖op·v‖²`.
pub fn joint_null_space(ops: &[&ComplexMatrix], tol: f64) -> Result<Vec<Vec<C64>>> {
    let first = ops
        .first()
        .ok_or_else(|| Error::InvalidArgument("null space of an empty family".into()))?;
    let n = first.cols();
    let mut gram = ComplexMatrix::zeros(n, n);
    for op in ops {
        if op.cols() != n {
            return Err(Error::DimensionMismatch("operators act on different spaces".into()));
        }
        gram = &gram + &op.adjoint().matmul(op);
    }
    let eig = jacobi(&gram.hermitian_part());
    let cutoff = tol * gram.frobenius_norm().max(1.0);
    Ok((0..n)
        .filter(|&k| eig.values[k] <= cutoff)
        .map(|k| eig.column(k))
        .collect())
}
