//! General complex eigensolver.
//!
//! Householder reduction to upper Hessenberg form, then single-shift complex QR
//! (Wilkinson shifts, Givens rotations) down to a Schur form `M = Z T Z†`.
//! Eigenvectors of `T` come from triangular back-substitution and are mapped
//! back through `Z`; left eigenvectors use the conjugate-transposed system.

use super::matrix::{c64, inner, norm, solve, ComplexMatrix, C64};
use crate::error::{Error, Result};

pub const MAX_EIG_DIM: usize = 512;

/// Residual bound relative to ‖M‖_F for an eigenpair to be accepted.
pub const RESIDUAL_TOL: f64 = 1e-9;

/// Eigenvalues closer than this (relative to ‖M‖_F) are treated as one cluster
/// during back-substitution and left/right biorthogonalisation.
const CLUSTER_TOL: f64 = 1e-10;

/// Minimum singular-value proxy of the normalised eigenvector matrix for the
/// basis to count as complete.
const INDEPENDENCE_TOL: f64 = 1e-7;

/// Spectrum of a square (generally non-normal) matrix.
///
/// Eigenvalues are ordered by non-increasing modulus, ties broken by
/// non-increasing real part and then non-increasing imaginary part. Right and
/// left vectors are unit-norm; within a numerically degenerate cluster the
/// left vectors are rotated so that `l_i† r_j = 0` for `i ≠ j`.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub eigenvalues: Vec<C64>,
    pub right_vectors: Vec<Vec<C64>>,
    pub left_vectors: Vec<Vec<C64>>,
    pub residuals: Vec<f64>,
    pub diagonalizable: bool,
    /// ‖M‖_F of the decomposed matrix.
    pub matrix_norm: f64,
}

impl SpectralReport {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|z| z.norm()).collect()
    }

    /// Σ λ_i r_i l_i† / (l_i† r_i).
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            let r = &self.right_vectors[i];
            let l = &self.left_vectors[i];
            let w = self.eigenvalues[i] / inner(l, r);
            out = &out + &ComplexMatrix::outer(r, l).scale(w);
        }
        out
    }
}

/// Full eigendecomposition of a square matrix of size ≤ [`MAX_EIG_DIM`].
pub fn eig_general(m: &ComplexMatrix) -> Result<SpectralReport> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let n = m.rows();
    if n > MAX_EIG_DIM {
        return Err(Error::InvalidArgument(format!(
            "eig_general supports size <= {MAX_EIG_DIM}, got {n}"
        )));
    }
    let scale = m.frobenius_norm();
    let (t, z) = schur(m)?;

    let sep = CLUSTER_TOL * scale.max(f64::MIN_POSITIVE);
    let lambdas = t.diag();
    let mut defective = false;

    let mut right = Vec::with_capacity(n);
    let mut left = Vec::with_capacity(n);
    for i in 0..n {
        let (x, bad_r) = triangular_right(&t, i, sep);
        let (y, bad_l) = triangular_left(&t, i, sep);
        defective |= bad_r || bad_l;
        right.push(unit(&z.matvec(&x)));
        left.push(unit(&z.matvec(&y)));
    }

    if !defective {
        biorthogonalize_clusters(&lambdas, &right, &mut left, sep);
    }

    let residuals: Vec<f64> = (0..n)
        .map(|i| {
            let mr = m.matvec(&right[i]);
            norm(&mr.iter().zip(&right[i]).map(|(a, b)| a - lambdas[i] * b).collect::<Vec<_>>())
        })
        .collect();

    let res_ok = residuals.iter().all(|&r| r <= RESIDUAL_TOL * scale.max(f64::MIN_POSITIVE));
    let diagonalizable = !defective && res_ok && independent(&right);

    let order = spectral_order(&lambdas);
    Ok(SpectralReport {
        eigenvalues: order.iter().map(|&i| lambdas[i]).collect(),
        right_vectors: order.iter().map(|&i| right[i].clone()).collect(),
        left_vectors: order.iter().map(|&i| left[i].clone()).collect(),
        residuals: order.iter().map(|&i| residuals[i]).collect(),
        diagonalizable,
        matrix_norm: scale,
    })
}

/// Indices of eigenvalues with modulus ≥ max_modulus − `mod_tol`, and whether
/// there is more than one of them.
pub fn dominant_eigenspace(report: &SpectralReport, mod_tol: f64) -> Result<(Vec<usize>, bool)> {
    if report.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    let moduli = report.moduli();
    let max = moduli.iter().copied().fold(0.0, f64::max);
    let idx: Vec<usize> = (0..moduli.len()).filter(|&i| moduli[i] >= max - mod_tol).collect();
    let degenerate = idx.len() > 1;
    Ok((idx, degenerate))
}

fn unit(v: &[C64]) -> Vec<C64> {
    let n = norm(v);
    if n == 0.0 {
        v.to_vec()
    } else {
        v.iter().map(|z| z / n).collect()
    }
}

fn spectral_order(lambdas: &[C64]) -> Vec<usize> {
    // Quantised keys keep the order deterministic when moduli agree to rounding.
    let q = |x: f64| (x * 1e10).round() as i64;
    let mut order: Vec<usize> = (0..lambdas.len()).collect();
    order.sort_by(|&a, &b| {
        let (za, zb) = (lambdas[a], lambdas[b]);
        q(zb.norm())
            .cmp(&q(za.norm()))
            .then(q(zb.re).cmp(&q(za.re)))
            .then(q(zb.im).cmp(&q(za.im)))
            .then(a.cmp(&b))
    });
    order
}

/// Reduces `m` to Schur form, returning `(T, Z)` with `m = Z T Z†`.
fn schur(m: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = m.rows();
    let (mut h, mut z) = hessenberg(m);
    if n == 1 {
        return Ok((h, z));
    }
    let norm_h = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let mut hi = n - 1;
    let mut iter = 0usize;
    let mut total = 0usize;
    let max_total = 100 * n;

    while hi > 0 {
        // Find the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            let s = h[(lo - 1, lo - 1)].norm() + h[(lo, lo)].norm();
            let s = if s == 0.0 { norm_h } else { s };
            if h[(lo, lo - 1)].norm() <= f64::EPSILON * s {
                h[(lo, lo - 1)] = C64::default();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        total += 1;
        if total > max_total {
            return Err(Error::Numerical(format!(
                "QR iteration failed to converge for a {n}x{n} matrix"
            )));
        }

        let shift = if iter.is_multiple_of(11) {
            // Exceptional shift to break cycles.
            h[(hi, hi)] + c64(0.75, 0.5) * h[(hi, hi - 1)].norm()
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        for i in lo..=hi {
            h[(i, i)] -= shift;
        }
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
            for j in k..n {
                let a = h[(k, j)];
                let b = h[(k + 1, j)];
                h[(k, j)] = a * c + s * b;
                h[(k + 1, j)] = -s.conj() * a + b * c;
            }
            h[(k + 1, k)] = C64::default();
            rots.push((c, s));
        }
        for (off, &(c, s)) in rots.iter().enumerate() {
            let k = lo + off;
            let top = (k + 2).min(hi);
            for i in 0..=top {
                let a = h[(i, k)];
                let b = h[(i, k + 1)];
                h[(i, k)] = a * c + b * s.conj();
                h[(i, k + 1)] = -a * s + b * c;
            }
            for i in 0..n {
                let a = z[(i, k)];
                let b = z[(i, k + 1)];
                z[(i, k)] = a * c + b * s.conj();
                z[(i, k + 1)] = -a * s + b * c;
            }
        }
        for i in lo..=hi {
            h[(i, i)] += shift;
        }
    }
    // Clear anything left below the diagonal by rounding.
    for i in 1..n {
        for j in 0..i {
            h[(i, j)] = C64::default();
        }
    }
    Ok((h, z))
}

/// Rotation G = [[c, s], [−s̄, c]] (c real) with G·[a; b] = [r; 0].
fn givens(a: C64, b: C64) -> (C64, C64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (c64(1.0, 0.0), C64::default());
    }
    if an == 0.0 {
        return (C64::default(), b.conj() / bn);
    }
    let r = an.hypot(bn);
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c64(c, 0.0), s)
}

/// Eigenvalue of [[a, b], [c, d]] closest to `d`.
fn wilkinson_shift(a: C64, b: C64, c: C64, d: C64) -> C64 {
    let half = (a - d) * 0.5;
    let disc = (half * half + b * c).sqrt();
    let den_p = half + disc;
    let den_m = half - disc;
    let den = if den_p.norm() >= den_m.norm() { den_p } else { den_m };
    if den.norm() == 0.0 {
        d
    } else {
        d - b * c / den
    }
}

/// Householder reduction to upper Hessenberg form: `m = Q H Q†`.
fn hessenberg(m: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let n = m.rows();
    let mut h = m.clone();
    let mut q = ComplexMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xn = norm(&x);
        if xn == 0.0 || x[1..].iter().all(|z| z.norm() == 0.0) {
            continue;
        }
        let phase = if x[0].norm() == 0.0 {
            c64(1.0, 0.0)
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x.clone();
        v[0] += phase * xn;
        let vn = norm(&v);
        for z in v.iter_mut() {
            *z /= vn;
        }
        // H <- P H P with P = I − 2 v v† acting on indices k+1..n.
        for j in 0..n {
            let d: C64 = (0..v.len()).map(|i| v[i].conj() * h[(k + 1 + i, j)]).sum();
            for i in 0..v.len() {
                h[(k + 1 + i, j)] -= v[i] * d * 2.0;
            }
        }
        for i in 0..n {
            let d: C64 = (0..v.len()).map(|j| h[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                h[(i, k + 1 + j)] -= d * v[j].conj() * 2.0;
            }
        }
        for i in 0..n {
            let d: C64 = (0..v.len()).map(|j| q[(i, k + 1 + j)] * v[j]).sum();
            for j in 0..v.len() {
                q[(i, k + 1 + j)] -= d * v[j].conj() * 2.0;
            }
        }
        for i in k + 2..n {
            h[(i, k)] = C64::default();
        }
    }
    (h, q)
}

/// Right eigenvector of upper-triangular `t` for `t[i][i]`, supported on 0..=i.
/// Returns the vector and whether the back-substitution hit an inconsistent
/// (defective) equation.
fn triangular_right(t: &ComplexMatrix, i: usize, sep: f64) -> (Vec<C64>, bool) {
    let n = t.rows();
    let lambda = t[(i, i)];
    let mut x = vec![C64::default(); n];
    x[i] = c64(1.0, 0.0);
    let mut defective = false;
    for j in (0..i).rev() {
        let num: C64 = -(j + 1..=i).map(|k| t[(j, k)] * x[k]).sum::<C64>();
        let den = t[(j, j)] - lambda;
        x[j] = resolve(num, den, sep, &x, &mut defective);
    }
    (x, defective)
}

/// Left eigenvector (eigenvector of `t†` for conj(t[i][i])), supported on i..n.
fn triangular_left(t: &ComplexMatrix, i: usize, sep: f64) -> (Vec<C64>, bool) {
    let n = t.rows();
    let lambda = t[(i, i)].conj();
    let mut y = vec![C64::default(); n];
    y[i] = c64(1.0, 0.0);
    let mut defective = false;
    for j in i + 1..n {
        let num: C64 = -(i..j).map(|k| t[(k, j)].conj() * y[k]).sum::<C64>();
        let den = t[(j, j)].conj() - lambda;
        y[j] = resolve(num, den, sep, &y, &mut defective);
    }
    (y, defective)
}

fn resolve(num: C64, den: C64, sep: f64, partial: &[C64], defective: &mut bool) -> C64 {
    if den.norm() > sep {
        return num / den;
    }
    // Repeated eigenvalue: the equation is 0·x = num.
    let size = partial.iter().map(|z| z.norm()).fold(1.0, f64::max);
    if num.norm() <= sep * size {
        C64::default()
    } else {
        *defective = true;
        num / c64(sep, 0.0)
    }
}

/// Within each cluster of equal eigenvalues, rotate the left vectors so that
/// they are biorthogonal to the right vectors.
fn biorthogonalize_clusters(lambdas: &[C64], right: &[Vec<C64>], left: &mut [Vec<C64>], sep: f64) {
    let n = lambdas.len();
    let mut seen = vec![false; n];
    for i in 0..n {
        if seen[i] {
            continue;
        }
        let cluster: Vec<usize> = (i..n)
            .filter(|&j| !seen[j] && (lambdas[j] - lambdas[i]).norm() <= sep)
            .collect();
        for &j in &cluster {
            seen[j] = true;
        }
        if cluster.len() < 2 {
            continue;
        }
        // G = L† R ; L' = L G^{-†} gives L'† R = I.
        let k = cluster.len();
        let g = ComplexMatrix::from_fn(k, k, |a, b| inner(&left[cluster[a]], &right[cluster[b]]));
        let Ok(g_inv_adj) = solve(&g.adjoint(), &ComplexMatrix::identity(k)) else {
            continue;
        };
        let dim = right[0].len();
        let old: Vec<Vec<C64>> = cluster.iter().map(|&c| left[c].clone()).collect();
        for (b, &cb) in cluster.iter().enumerate() {
            let v: Vec<C64> = (0..dim)
                .map(|r| (0..k).map(|a| old[a][r] * g_inv_adj[(a, b)]).sum())
                .collect();
            left[cb] = unit(&v);
        }
    }
}

/// Smallest eigenvalue of the Gram matrix R†R, as a linear-independence test.
fn independent(vectors: &[Vec<C64>]) -> bool {
    let n = vectors.len();
    if n == 0 {
        return true;
    }
    let gram = ComplexMatrix::from_fn(n, n, |i, j| inner(&vectors[i], &vectors[j]));
    match super::hermitian::HermitianEigen::new(&gram) {
        Ok(e) => e.min_value() > INDEPENDENCE_TOL * INDEPENDENCE_TOL,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_matrix() {
        let m = ComplexMatrix::from_real_rows(&[&[0.5, 0.0], &[0.0, 1.0]]).unwrap();
        let r = eig_general(&m).unwrap();
        assert_eq!(r.eigenvalues, vec![c64(1.0, 0.0), c64(0.5, 0.0)]);
        assert!((r.right_vectors[0][1].norm() - 1.0).abs() < 1e-15);
        assert!((r.right_vectors[1][0].norm() - 1.0).abs() < 1e-15);
        assert!(r.diagonalizable);
    }

    #[test]
    fn jordan_block_is_flagged() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let r = eig_general(&m).unwrap();
        assert_eq!(r.eigenvalues, vec![C64::default(); 2]);
        assert!(!r.diagonalizable);
    }

    #[test]
    fn rejects_non_square() {
        let m = ComplexMatrix::zeros(2, 3);
        assert_eq!(eig_general(&m).unwrap_err(), Error::NotSquare { rows: 2, cols: 3 });
    }

    #[test]
    fn identity_is_fully_degenerate() {
        let r = eig_general(&ComplexMatrix::identity(4)).unwrap();
        let (idx, deg) = dominant_eigenspace(&r, 1e-8).unwrap();
        assert_eq!(idx, vec![0, 1, 2, 3]);
        assert!(deg);
        assert!(r.diagonalizable);
    }

    #[test]
    fn rotation_has_conjugate_pair() {
        let (c, s) = (0.3f64.cos(), 0.3f64.sin());
        let m = ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]).unwrap();
        let r = eig_general(&m).unwrap();
        assert!((r.eigenvalues[0] - c64(c, s)).norm() < 1e-14);
        assert!((r.eigenvalues[1] - c64(c, -s)).norm() < 1e-14);
        assert!(r.reconstruct().max_abs_diff(&m) < 1e-13);
    }

    #[test]
    fn degenerate_non_normal_reconstructs() {
        // diag(2, 2, 1) in a skewed basis: repeated eigenvalue, non-orthogonal vectors.
        let s = ComplexMatrix::from_rows(&[
            vec![c64(1.0, 0.0), c64(0.4, 0.1), c64(0.0, 0.3)],
            vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(0.7, 0.0)],
            vec![c64(0.2, -0.1), c64(0.0, 0.0), c64(1.0, 0.0)],
        ])
        .unwrap();
        let d = ComplexMatrix::diagonal(&[c64(2.0, 0.0), c64(2.0, 0.0), c64(1.0, 0.0)]);
        let s_inv = solve(&s, &ComplexMatrix::identity(3)).unwrap();
        let m = s.matmul(&d).matmul(&s_inv);
        let r = eig_general(&m).unwrap();
        assert!(r.diagonalizable);
        assert!(r.reconstruct().max_abs_diff(&m) < 1e-8 * m.frobenius_norm());
    }

    #[test]
    fn empty_spectrum_rejected() {
        let r = SpectralReport {
            eigenvalues: vec![],
            right_vectors: vec![],
            left_vectors: vec![],
            residuals: vec![],
            diagonalizable: true,
            matrix_norm: 0.0,
        };
        assert_eq!(dominant_eigenspace(&r, 1e-8).unwrap_err(), Error::EmptySpectrum);
    }
}
