use std::f64::consts::PI;

use measent::entanglement::{fidelity_pure, Diagnostic};
use measent::error::Error;
use measent::hilbert::{two_qubit_state, Axis, DensityMatrix};
use measent::linalg::{c64, ComplexMatrix};
use measent::models::{build, chain_coefficients, ModelFamily, ModelSpec, PhiChoice};
use measent::protocol::{
    asymptotic_prediction, conditional_evolution, effective_operator, zeno_limit, zeno_survivors, LimitClass,
    DEFAULT_MOD_TOL,
};
use measent::runner::{preset, run};

fn xy() -> ModelSpec {
    ModelSpec::new(ModelFamily::Xy).param("J", 1.0)
}

#[test]
fn fig2_trajectory_regression() {
    let r = run(&preset("fig2").unwrap()).unwrap();
    let p = r.trajectory.survival();
    let c = r.trajectory.column("concurrence");
    let frozen_p = [
        (1, 0.5194340743527084),
        (2, 0.29670844316793915),
        (3, 0.25399343842922756),
        (6, 0.25003379267835874),
        (10, 0.2500001359009403),
    ];
    for (m, v) in frozen_p {
        assert!((p[m] - v).abs() < 1e-12, "P_{m} = {}", p[m]);
    }
    let frozen_c = [(1, 0.0), (2, 0.6851559553261393), (3, 0.9685547905967652), (6, 0.999729695110439), (10, 0.9999989127930764)];
    for (m, v) in frozen_c {
        assert!((c[m] - v).abs() < 1e-11, "C_{m} = {}", c[m]);
    }
    let sys = build(&xy()).unwrap();
    let v = effective_operator(&sys, PI / 2.0).unwrap();
    let traj = conditional_evolution(&v, &DensityMatrix::maximally_mixed(vec![2, 2]), 4, &[]).unwrap();
    let s = two_qubit_state("s").unwrap();
    let f: Vec<f64> = traj.steps.iter().map(|r| fidelity_pure(&r.rho_b, &s).unwrap()).collect();
    for (m, v) in [(2, 0.8425779776630695), (3, 0.9842773952983827), (4, 0.9914865866690653)] {
        assert!((f[m] - v).abs() < 1e-12, "F_{m} = {}", f[m]);
    }
}

#[test]
fn xy_x_limit_is_the_singlet() {
    let sys = build(&xy()).unwrap();
    let v = effective_operator(&sys, 1.0).unwrap();
    let rho0 = DensityMatrix::maximally_mixed(vec![2, 2]);
    let p = asymptotic_prediction(&v, &rho0, DEFAULT_MOD_TOL).unwrap();
    assert_eq!(p.classification, LimitClass::PureLimit);
    assert!((p.probability - 0.25).abs() < 1e-12);
    let s = two_qubit_state("s").unwrap();
    assert!(fidelity_pure(&p.limit_state, &s).unwrap() > 1.0 - 1e-10);
    let traj = conditional_evolution(&v, &rho0, 80, &[]).unwrap();
    let last = traj.last().unwrap();
    assert!(fidelity_pure(&last.rho_b, &s).unwrap() > 1.0 - 1e-9);
    assert!((last.survival - 0.25).abs() < 1e-9);
}

#[test]
fn heisenberg_is_a_degenerate_mixture() {
    let sys = build(&ModelSpec::new(ModelFamily::Heisenberg).param("J", 1.0)).unwrap();
    let v = effective_operator(&sys, 0.3).unwrap();
    let p = asymptotic_prediction(&v, &DensityMatrix::maximally_mixed(vec![2, 2]), DEFAULT_MOD_TOL).unwrap();
    assert_eq!(p.classification, LimitClass::DegenerateMixture);
    assert!((p.probability - 0.5).abs() < 1e-10);
    assert!((p.limit_state.purity() - 0.5).abs() < 1e-10);
}

#[test]
fn pure_initial_state_outside_the_fixed_space_goes_extinct() {
    let sys = build(&xy().with_phi(PhiChoice::Axis {
        axis: Axis::Z,
        positive: false,
    }))
    .unwrap();
    let tau = PI / (2.0 * 2f64.sqrt());
    let v = effective_operator(&sys, tau).unwrap();
    let rho0 = DensityMatrix::from_pure(&two_qubit_state("t+").unwrap(), vec![2, 2]).unwrap();
    let traj = conditional_evolution(&v, &rho0, 5, &[Diagnostic::Survival]).unwrap();
    let ext = traj.extinct.expect("extinction recorded");
    assert_eq!(ext.step, 1);
    assert_eq!(traj.steps.len(), 1);
    match asymptotic_prediction(&v, &rho0, DEFAULT_MOD_TOL) {
        Err(Error::ExtinctLimit { .. }) => {}
        other => panic!("expected an extinct limit, got {other:?}"),
    }
}

#[test]
fn chain_coefficients_closed_forms() {
    let (delta, tau) = (0.8, 0.6);
    let (a, b) = chain_coefficients(4, delta, tau).unwrap();
    assert!((a - c64(0.0, -delta * tau).exp()).norm() < 1e-12);
    assert!((b - c64(0.0, delta * tau).exp()).norm() < 1e-12);
    let (a, b) = chain_coefficients(5, delta, tau).unwrap();
    assert!((a - c64((2.0 * delta * tau).cos(), 0.0)).norm() < 1e-12);
    assert!((b - c64(1.0, 0.0)).norm() < 1e-12);
    for n in 4..=9 {
        let (a, b) = chain_coefficients(n, delta, tau).unwrap();
        assert!(a.norm() <= 1.0 + 1e-12 && b.norm() <= 1.0 + 1e-12, "N = {n}");
    }
}

#[test]
fn second_order_zeno_requires_vanishing_first_order() {
    let sys = build(&xy()).unwrap();
    assert!(zeno_limit(&sys, 2).is_err());
    let so = build(&ModelSpec::new(ModelFamily::SpinOrbit).param("h", 1.0).param("l", 1.0)).unwrap();
    let g = zeno_limit(&so, 2).unwrap();
    let survivors = zeno_survivors(&g).unwrap();
    assert_eq!(survivors.len(), 1);
    let s = two_qubit_state("s").unwrap();
    let f = measent::linalg::inner(&s, &survivors[0]).norm_sqr();
    assert!((f - 1.0).abs() < 1e-10);
}

#[test]
fn unknown_parameters_are_rejected() {
    let spec = xy().param("K", 1.0);
    assert!(build(&spec).is_err());
    assert!(effective_operator(&build(&xy()).unwrap(), 0.0).is_err());
}

#[test]
fn conjugated_fixed_point_for_each_pauli() {
    let sys = build(&xy()).unwrap();
    let rho0 = DensityMatrix::maximally_mixed(vec![2, 2]);
    for (axis, label) in [(Axis::X, "phi-"), (Axis::Y, "phi+"), (Axis::Z, "psi+")] {
        let u = measent::hilbert::pauli(axis);
        let conj = measent::models::conjugate_b_factor(&sys, &u, 1).unwrap();
        let v = effective_operator(&conj, 1.0).unwrap();
        let p = asymptotic_prediction(&v, &rho0, DEFAULT_MOD_TOL).unwrap();
        let target = two_qubit_state(label).unwrap();
        assert!(fidelity_pure(&p.limit_state, &target).unwrap() > 1.0 - 1e-10, "{label}");
    }
    assert!(measent::models::conjugate_b_factor(&sys, &ComplexMatrix::identity(2).scale_real(2.0), 0).is_err());
}
