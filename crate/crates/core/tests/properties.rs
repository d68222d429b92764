use measent::entanglement::{concurrence, pt_min_eig, purity};
use measent::hilbert::{partial_trace, partial_transpose_operator, DensityMatrix};
use measent::linalg::{c64, eig_general, exp_hermitian, kron, kron_vec, norm, ComplexMatrix, C64};
use measent::models::{build, ModelFamily, ModelSpec};
use measent::protocol::{conditional_evolution, effective_operator};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c64(re, im))
}

fn vector(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(), n).prop_filter("non-zero", |v| norm(v) > 1e-3)
}

fn matrix(r: usize, c: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), r * c).prop_map(move |d| ComplexMatrix::new(r, c, d).unwrap())
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    matrix(n, n).prop_map(|m| m.hermitian_part())
}

fn density(dims: Vec<usize>) -> impl Strategy<Value = DensityMatrix> {
    let n: usize = dims.iter().product();
    matrix(n, n).prop_map(move |w| {
        let g = &w.matmul(&w.adjoint()) + &ComplexMatrix::identity(n).scale_real(1e-3);
        DensityMatrix::from_unnormalized(g, dims.clone()).unwrap()
    })
}

fn taylor_exp(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let n = h.rows();
    let step = h.scale(c64(0.0, -t));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = term.matmul(&step).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    sum
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kron_is_associative(a in matrix(2, 2), b in matrix(3, 2), c in matrix(2, 3)) {
        let left = kron(&kron(&a, &b), &c);
        let right = kron(&a, &kron(&b, &c));
        prop_assert!(left.max_abs_diff(&right) < 1e-14);
    }

    #[test]
    fn kron_mixed_product(a in matrix(2, 2), b in matrix(3, 3), x in vector(2), y in vector(3)) {
        let lhs = kron(&a, &b).matvec(&kron_vec(&x, &y));
        let rhs = kron_vec(&a.matvec(&x), &b.matvec(&y));
        let d = lhs.iter().zip(&rhs).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        prop_assert!(d < 1e-13);
    }

    #[test]
    fn propagator_group_law(h in hermitian(4), s in -2.0..2.0f64, t in -2.0..2.0f64) {
        let us = exp_hermitian(&h, s).unwrap();
        let ut = exp_hermitian(&h, t).unwrap();
        let ust = exp_hermitian(&h, s + t).unwrap();
        prop_assert!(us.matmul(&ut).max_abs_diff(&ust) < 1e-12);
        prop_assert!(ust.unitarity_defect() < 1e-12);
    }

    #[test]
    fn propagator_matches_taylor_series(h in hermitian(5), t in -1.0..1.0f64) {
        let exact = exp_hermitian(&h, t).unwrap();
        prop_assert!(exact.max_abs_diff(&taylor_exp(&h, t)) < 1e-11);
    }

    #[test]
    fn general_eigendecomposition_reconstructs(m in matrix(5, 5)) {
        let spec = eig_general(&m).unwrap();
        prop_assume!(spec.diagonalizable);
        prop_assert!(spec.reconstruct().max_abs_diff(&m) < 1e-8);
        for k in 0..spec.len() {
            let v = &spec.right_vectors[k];
            let mv = m.matvec(v);
            let r = mv.iter().zip(v).map(|(x, y)| (x - spec.eigenvalues[k] * y).norm()).fold(0.0, f64::max);
            prop_assert!(r < 1e-9 * norm(v).max(1.0));
        }
    }

    #[test]
    fn purity_two_ways(rho in density(vec![2, 2])) {
        let from_eigs: f64 = rho.eigenvalues().iter().map(|l| l * l).sum();
        prop_assert!((purity(&rho) - from_eigs).abs() < 1e-12);
        prop_assert!(purity(&rho) <= 1.0 + 1e-12 && purity(&rho) >= 0.25 - 1e-12);
    }

    #[test]
    fn partial_transpose_is_an_involution(m in matrix(6, 6), part in 0usize..2) {
        let once = partial_transpose_operator(&m, &[2, 3], part).unwrap();
        let twice = partial_transpose_operator(&once, &[2, 3], part).unwrap();
        prop_assert!(twice.max_abs_diff(&m) < 1e-15);
        let both = partial_transpose_operator(&once, &[2, 3], 1 - part).unwrap();
        prop_assert!(both.max_abs_diff(&m.transpose()) < 1e-15);
    }

    #[test]
    fn partial_trace_of_product(a in density(vec![2]), b in density(vec![3])) {
        let joint = a.product(&b);
        prop_assert!(partial_trace(&joint, &[0]).unwrap().matrix().max_abs_diff(a.matrix()) < 1e-13);
        prop_assert!(partial_trace(&joint, &[1]).unwrap().matrix().max_abs_diff(b.matrix()) < 1e-13);
    }

    #[test]
    fn survival_never_increases(
        family in prop::sample::select(vec![ModelFamily::Xy, ModelFamily::Heisenberg, ModelFamily::DwavePair]),
        j in 0.2..2.0f64,
        tau in 0.05..2.0f64,
        rho0 in density(vec![2, 2]),
    ) {
        let mut spec = ModelSpec::new(family).param("J", j);
        if family == ModelFamily::DwavePair {
            spec = spec.param("delta", 0.8);
        }
        let v = effective_operator(&build(&spec).unwrap(), tau).unwrap();
        let traj = conditional_evolution(&v, &rho0, 25, &[]).unwrap();
        let p = traj.survival();
        prop_assert!(p.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        prop_assert!(p.iter().all(|x| (0.0..=1.0 + 1e-12).contains(x)));
    }

    #[test]
    fn effective_operator_is_a_contraction(
        tau in 0.05..3.0f64,
        j in 0.2..2.0f64,
        x in vector(4),
    ) {
        let spec = ModelSpec::new(ModelFamily::Heisenberg).param("J", j);
        let v = effective_operator(&build(&spec).unwrap(), tau).unwrap();
        prop_assert!(norm(&v.matrix.matvec(&x)) <= norm(&x) * (1.0 + 1e-12));
        let spectrum = v.spectrum().unwrap();
        prop_assert!(spectrum.moduli().iter().all(|&m| m <= 1.0 + 1e-10));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn pure_state_concurrence(v in vector(4)) {
        let n = norm(&v);
        let psi: Vec<C64> = v.iter().map(|z| z / n).collect();
        let rho = DensityMatrix::from_pure(&psi, vec![2, 2]).unwrap();
        let expected = 2.0 * (psi[0] * psi[3] - psi[1] * psi[2]).norm();
        let got = concurrence(&rho).unwrap();
        prop_assert!((got - expected).abs() < 1e-10, "{} vs {}", got, expected);
    }

    #[test]
    fn separable_mixtures_are_ppt(
        parts in prop::collection::vec((vector(2), vector(3), 0.05..1.0f64), 1..4)
    ) {
        let mut m = ComplexMatrix::zeros(6, 6);
        for (a, b, w) in &parts {
            let psi = kron_vec(a, b);
            m = &m + &ComplexMatrix::outer(&psi, &psi).scale_real(*w);
        }
        let rho = DensityMatrix::from_unnormalized(m, vec![2, 3]).unwrap();
        prop_assert!(pt_min_eig(&rho, 1).unwrap() > -1e-12);
        prop_assert!(pt_min_eig(&rho, 0).unwrap() > -1e-12);
    }

    #[test]
    fn concurrence_is_invariant_under_local_unitaries(rho in density(vec![2, 2]), h1 in hermitian(2), h2 in hermitian(2)) {
        let u = kron(&exp_hermitian(&h1, 1.0).unwrap(), &exp_hermitian(&h2, 1.0).unwrap());
        let rotated = rho.conjugate(&u).unwrap();
        prop_assert!((concurrence(&rho).unwrap() - concurrence(&rotated).unwrap()).abs() < 1e-9);
    }
}
