//! Ready-made experiment configurations covering the scans and tomography
//! runs the crate is built around.

use crate::config::{
    DecayConfig, Evolution, Experiment, ExperimentConfig, GateKind, GaussianShape, OptimizedShape,
    PulseShape, TimingConfig, TransferSeries,
};

pub struct Preset {
    pub name: &'static str,
    pub about: &'static str,
    build: fn() -> ExperimentConfig,
}

impl Preset {
    pub fn config(&self) -> ExperimentConfig {
        (self.build)()
    }
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "stirap_error_scan",
        about: "transfer error vs ensemble size, two-term envelope against Gaussian pulses",
        build: stirap_error_scan,
    },
    Preset {
        name: "phase_check",
        about: "ground-state phase after a double transfer, with and without the detuning sign switch",
        build: phase_check,
    },
    Preset {
        name: "single_qubit_chi",
        about: "process matrices of the five single-qubit gate programs for N = 1..4",
        build: single_qubit_chi,
    },
    Preset {
        name: "bell_states",
        about: "Bell-state preparation and state tomography on every ensemble size pair",
        build: bell_states,
    },
    Preset {
        name: "cnot_chi",
        about: "process matrix of the two-qubit blockade gate",
        build: cnot_chi,
    },
    Preset {
        name: "decay_scan",
        about: "transfer error with spontaneous decay, microsecond vs nanosecond pulses",
        build: decay_scan,
    },
    Preset {
        name: "hadamard_decay",
        about: "Hadamard gate error under the master equation with nanosecond pulses",
        build: hadamard_decay,
    },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

fn base(name: &str, experiment: Experiment, tol: f64) -> ExperimentConfig {
    ExperimentConfig {
        name: name.to_string(),
        experiment,
        tol,
        physical_analysis: false,
        shots: None,
    }
}

fn stirap_error_scan() -> ExperimentConfig {
    base(
        "stirap_error_scan",
        Experiment::TransferScan {
            series: vec![
                TransferSeries {
                    label: "optimized".into(),
                    shape: PulseShape::Optimized(OptimizedShape::long_pulse()),
                    sizes: vec![1, 2, 3, 4, 5],
                    decay: None,
                },
                TransferSeries {
                    label: "gaussian".into(),
                    shape: PulseShape::Gaussian(GaussianShape::long_pulse()),
                    sizes: vec![1, 2, 3, 4, 5],
                    decay: None,
                },
            ],
        },
        1e-10,
    )
}

fn phase_check() -> ExperimentConfig {
    base(
        "phase_check",
        Experiment::PhaseCheck {
            sizes: vec![1, 2, 3, 4],
            stirap: OptimizedShape::long_pulse(),
        },
        1e-10,
    )
}

fn single_qubit_chi() -> ExperimentConfig {
    base(
        "single_qubit_chi",
        Experiment::ProcessTomography {
            sizes: vec![1, 2, 3, 4],
            gates: GateKind::ALL.to_vec(),
            timing: TimingConfig::long_pulse(),
            evolution: Evolution::Unitary,
            decay: None,
        },
        1e-9,
    )
}

fn bell_states() -> ExperimentConfig {
    base(
        "bell_states",
        Experiment::BellStates {
            pairs: vec![[1, 1], [1, 2], [2, 1], [2, 2]],
            timing: TimingConfig::long_pulse(),
        },
        1e-9,
    )
}

fn cnot_chi() -> ExperimentConfig {
    base(
        "cnot_chi",
        Experiment::CnotTomography {
            pair: [1, 1],
            timing: TimingConfig::long_pulse(),
        },
        1e-10,
    )
}

fn decay_scan() -> ExperimentConfig {
    base(
        "decay_scan",
        Experiment::TransferScan {
            series: vec![
                TransferSeries {
                    label: "long".into(),
                    shape: PulseShape::Optimized(OptimizedShape::long_pulse()),
                    sizes: vec![1, 2, 3, 4, 5],
                    decay: Some(DecayConfig::typical()),
                },
                TransferSeries {
                    label: "short".into(),
                    shape: PulseShape::Optimized(OptimizedShape::short_pulse()),
                    sizes: vec![1, 2, 3, 4],
                    decay: Some(DecayConfig::typical()),
                },
            ],
        },
        1e-10,
    )
}

fn hadamard_decay() -> ExperimentConfig {
    base(
        "hadamard_decay",
        Experiment::ProcessTomography {
            sizes: vec![1, 2],
            gates: vec![GateKind::Hadamard],
            timing: TimingConfig::short_pulse(),
            evolution: Evolution::Master,
            decay: Some(DecayConfig::typical()),
        },
        1e-9,
    )
}
