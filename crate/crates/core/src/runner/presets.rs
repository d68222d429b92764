use std::f64::consts::PI;

use crate::entanglement::{Diagnostic, StateTarget};
use crate::hilbert::Axis;
use crate::models::{ModelFamily, ModelSpec, PhiChoice};

use super::config::{Analysis, ExperimentConfig, InitialState};

pub const PRESET_NAMES: &[&str] = &[
    "fig2",
    "xy_z",
    "xy_x",
    "dwave_pair",
    "heisenberg",
    "jaynes_cummings",
    "spin_orbit",
    "multilevel_so_3",
    "chain_n4",
    "chain_n5",
    "chain_n7",
    "n4_weighted",
];

fn axis(axis: Axis, positive: bool) -> Option<PhiChoice> {
    Some(PhiChoice::Axis { axis, positive })
}

fn fidelity(label: &str) -> Diagnostic {
    Diagnostic::Fidelity {
        target: StateTarget::Label(label.into()),
    }
}

fn base(name: &str, model: ModelSpec, tau: f64, m_max: usize) -> ExperimentConfig {
    ExperimentConfig {
        name: Some(name.into()),
        model,
        tau,
        m_max,
        initial_state: InitialState::MaximallyMixed,
        diagnostics: vec![Diagnostic::Survival],
        analysis: Analysis {
            spectrum: true,
            asymptotic: true,
            zeno_order: None,
        },
        output: None,
        seed: None,
        mod_tol: None,
    }
}

fn chain(name: &str, n: usize) -> ExperimentConfig {
    let model = ModelSpec::new(ModelFamily::DwaveChain)
        .param("N", n as f64)
        .param("J", 1.0)
        .param("delta", 1.0);
    let mut c = base(name, model, 0.5, 20);
    c.diagnostics.extend([Diagnostic::Concurrence, fidelity("s"), fidelity("phi-"), Diagnostic::Purity]);
    c
}

/// Built-in experiment configurations.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let xy = ModelSpec::new(ModelFamily::Xy).param("J", 1.0);
    let cfg = match name {
        "fig2" => {
            let mut c = base(name, xy, PI / 2.0, 10);
            c.diagnostics = vec![Diagnostic::Concurrence, Diagnostic::Survival];
            c
        }
        "xy_z" => {
            let mut model = xy;
            model.phi = axis(Axis::Z, false);
            let mut c = base(name, model, 0.7, 20);
            c.diagnostics.extend([Diagnostic::Concurrence, fidelity("s"), Diagnostic::Purity]);
            c
        }
        "xy_x" => {
            let mut c = base(name, xy, 1.0, 20);
            c.diagnostics.extend([Diagnostic::Concurrence, fidelity("s")]);
            c
        }
        "dwave_pair" => {
            let model = ModelSpec::new(ModelFamily::DwavePair).param("J", 1.0).param("delta", 1.0);
            let mut c = base(name, model, 0.4, 20);
            c.diagnostics.extend([Diagnostic::Concurrence, fidelity("s")]);
            c
        }
        "heisenberg" => {
            let model = ModelSpec::new(ModelFamily::Heisenberg).param("J", 1.0);
            let mut c = base(name, model, 0.3, 40);
            c.diagnostics.extend([
                Diagnostic::Concurrence,
                Diagnostic::PtMinEig { parts: None },
                Diagnostic::Purity,
            ]);
            c
        }
        "jaynes_cummings" => {
            let model = ModelSpec::new(ModelFamily::JaynesCummings)
                .param("epsilon", 1.0)
                .param("g", 1.0)
                .param("J", 1.0)
                .param("n_max", 6.0)
                .with_phi(PhiChoice::Photon { n: 1 });
            let mut c = base(name, model, 0.5, 40);
            c.diagnostics.extend([Diagnostic::Concurrence, fidelity("s")]);
            c
        }
        "spin_orbit" => {
            let model = ModelSpec::new(ModelFamily::SpinOrbit).param("h", 1.0).param("l", 1.0);
            let mut c = base(name, model, 0.1, 40);
            c.diagnostics.extend([Diagnostic::Concurrence, fidelity("s")]);
            c.analysis.zeno_order = Some(2);
            c
        }
        "multilevel_so_3" => {
            let model = ModelSpec::new(ModelFamily::MultilevelSo).param("M", 3.0);
            let r = 1.0 / 3f64.sqrt();
            let mut re = vec![0.0; 9];
            re[6] = r;
            re[4] = -r;
            re[2] = r;
            let mut c = base(name, model, 0.8, 40);
            c.diagnostics.extend([
                Diagnostic::Fidelity {
                    target: StateTarget::Amplitudes { re, im: vec![] },
                },
                Diagnostic::PtMinEig { parts: None },
                Diagnostic::Purity,
            ]);
            c.seed = Some(7);
            c
        }
        "chain_n4" => chain(name, 4),
        "chain_n5" => chain(name, 5),
        "chain_n7" => chain(name, 7),
        "n4_weighted" => {
            let model = xy.param("N", 4.0).with_weights(vec![1.0, 1.0, 2.0, 2.0]);
            let mut re = vec![0.0; 16];
            re[5] = 0.5;
            re[6] = -0.5;
            re[9] = -0.5;
            re[10] = 0.5;
            let mut c = base(name, model, 1.0, 60);
            c.diagnostics.extend([
                Diagnostic::Fidelity {
                    target: StateTarget::Amplitudes { re, im: vec![] },
                },
                Diagnostic::PtMinEig { parts: Some(vec![1, 3]) },
                Diagnostic::Purity,
            ]);
            c
        }
        _ => return None,
    };
    Some(cfg)
}
