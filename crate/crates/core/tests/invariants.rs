use measent::hilbert::{partial_trace, two_qubit_state, DensityMatrix};
use measent::linalg::{
    c64, dominant_eigenspace, eig_general, exp_hermitian, inner, kron, kron_vec, norm, ComplexMatrix, C64,
};
use measent::models::{build, conjugate_b, ModelFamily, ModelSpec};
use measent::protocol::{effective_operator, DEFAULT_MOD_TOL};
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| c64(re, im))
}

fn unit_vector(n: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(complex(), n)
        .prop_filter("non-zero", |v| norm(v) > 1e-3)
        .prop_map(|v| {
            let n = norm(&v);
            v.iter().map(|z| z / n).collect()
        })
}

fn hermitian(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |d| ComplexMatrix::new(n, n, d).unwrap().hermitian_part())
}

fn sized_hermitian() -> impl Strategy<Value = ComplexMatrix> {
    (2usize..=16).prop_flat_map(hermitian)
}

fn unitary(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    hermitian(n).prop_map(|h| exp_hermitian(&h, 1.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn group_law_up_to_sixteen(h in sized_hermitian(), s in -1.5..1.5f64, t in -1.5..1.5f64) {
        let lhs = exp_hermitian(&h, s).unwrap().matmul(&exp_hermitian(&h, t).unwrap());
        prop_assert!(lhs.max_abs_diff(&exp_hermitian(&h, s + t).unwrap()) < 1e-11);
    }

    #[test]
    fn reconstruction_scaled_by_norm(n in 2usize..=8, seed in prop::collection::vec(complex(), 64)) {
        let m = ComplexMatrix::from_fn(n, n, |i, j| seed[i * 8 + j]);
        let spec = eig_general(&m).unwrap();
        prop_assume!(spec.diagonalizable);
        prop_assert!(spec.reconstruct().max_abs_diff(&m) <= 1e-8 * m.frobenius_norm());
    }

    #[test]
    fn three_qubit_marginal_matches_index_contraction(psi in unit_vector(8), keep in 0usize..3) {
        let rho = DensityMatrix::from_pure(&psi, vec![2, 2, 2]).unwrap();
        let got = partial_trace(&rho, &[keep]).unwrap();
        let bit = |idx: usize, q: usize| (idx >> (2 - q)) & 1;
        let mut oracle = ComplexMatrix::zeros(2, 2);
        for i in 0..8 {
            for j in 0..8 {
                let others_equal = (0..3).filter(|&q| q != keep).all(|q| bit(i, q) == bit(j, q));
                if others_equal {
                    oracle[(bit(i, keep), bit(j, keep))] += psi[i] * psi[j].conj();
                }
            }
        }
        prop_assert!(got.matrix().max_abs_diff(&oracle) < 1e-14);
        prop_assert!((got.matrix().trace().re - 1.0).abs() < 1e-14);
        prop_assert!(got.eigenvalues().iter().all(|&l| l > -1e-14));
    }

    #[test]
    fn marginal_follows_unitary_on_kept_factor(
        a in unit_vector(3),
        b in unit_vector(2),
        c in unit_vector(6),
        u in unitary(3),
    ) {
        // Entangled input on (3 x 2), then U on the kept factor only.
        let psi: Vec<C64> = kron_vec(&a, &b).iter().zip(&c).map(|(x, y)| x + y * 0.5).collect();
        let n = norm(&psi);
        let psi: Vec<C64> = psi.iter().map(|z| z / n).collect();
        let rho = DensityMatrix::from_pure(&psi, vec![3, 2]).unwrap();
        let full = kron(&u, &ComplexMatrix::identity(2));
        let lhs = partial_trace(&rho.conjugate(&full).unwrap(), &[0]).unwrap();
        let rhs = partial_trace(&rho, &[0]).unwrap().conjugate(&u).unwrap();
        prop_assert!(lhs.matrix().max_abs_diff(rhs.matrix()) < 1e-10);
    }

    #[test]
    fn uniform_models_annihilate_mediator_times_singlet(
        family in prop::sample::select(vec![ModelFamily::Xy, ModelFamily::Heisenberg, ModelFamily::DwavePair]),
        j in 0.1..2.0f64,
        psi_a in unit_vector(2),
    ) {
        let mut spec = ModelSpec::new(family).param("J", j);
        if family == ModelFamily::DwavePair {
            spec = spec.param("delta", 0.6);
        }
        let sys = build(&spec).unwrap();
        prop_assert!(sys.hamiltonian().is_hermitian(1e-12));
        let v = kron_vec(&psi_a, &two_qubit_state("s").unwrap());
        prop_assert!(norm(&sys.hamiltonian().matvec(&v)) <= 1e-10);
    }

    #[test]
    fn conjugating_b_conjugates_the_effective_operator(u1 in unitary(2), u2 in unitary(2), tau in 0.1..2.0f64) {
        let sys = build(&ModelSpec::new(ModelFamily::Heisenberg).param("J", 0.9)).unwrap();
        let u = kron(&u1, &u2);
        let v = effective_operator(&sys, tau).unwrap().matrix;
        let vc = effective_operator(&conjugate_b(&sys, &u).unwrap(), tau).unwrap();
        let expected = u.matmul(&v).matmul(&u.adjoint());
        prop_assert!(vc.matrix.max_abs_diff(&expected) < 1e-10);
        let mut m1 = vc.spectrum().unwrap().moduli();
        let mut m2 = eig_general(&v).unwrap().moduli();
        m1.sort_by(f64::total_cmp);
        m2.sort_by(f64::total_cmp);
        prop_assert!(m1.iter().zip(&m2).all(|(x, y)| (x - y).abs() < 1e-10));
    }
}

#[test]
fn chain_propagator_matches_taylor_series() {
    let sys = build(
        &ModelSpec::new(ModelFamily::DwaveChain)
            .param("N", 5.0)
            .param("J", 0.8)
            .param("delta", 0.6),
    )
    .unwrap();
    let h = sys.hamiltonian();
    // ‖H‖_F bounds the spectral norm, so ‖tH‖ ≤ 2.
    let bound = h.frobenius_norm();
    let t = 2.0 / bound;
    let n = h.rows();
    let step = h.scale(c64(0.0, -t));
    let mut term = ComplexMatrix::identity(n);
    let mut sum = term.clone();
    for k in 1..60 {
        term = term.matmul(&step).scale_real(1.0 / k as f64);
        sum = &sum + &term;
    }
    assert!(exp_hermitian(h, t).unwrap().max_abs_diff(&sum) < 1e-10);
}

#[test]
fn xy_x_singlet_is_unique_below_the_critical_time() {
    let sys = build(&ModelSpec::new(ModelFamily::Xy).param("J", 1.0)).unwrap();
    let critical = 2f64.sqrt() * (1.0f64 / 3.0).acos();
    let s = two_qubit_state("s").unwrap();
    for k in 1..=20 {
        let tau = critical * k as f64 / 21.0;
        let v = effective_operator(&sys, tau).unwrap();
        let spec = v.spectrum().unwrap();
        let (idx, degenerate) = dominant_eigenspace(&spec, DEFAULT_MOD_TOL).unwrap();
        assert!(!degenerate && idx.len() == 1, "tau = {tau}");
        let u = &spec.right_vectors[idx[0]];
        let f = inner(&s, u).norm_sqr() / inner(u, u).re;
        assert!((f - 1.0).abs() < 1e-10, "tau = {tau}: fidelity {f}");
        assert!((spec.eigenvalues[idx[0]] - c64(1.0, 0.0)).norm() < 1e-10);
    }
}
