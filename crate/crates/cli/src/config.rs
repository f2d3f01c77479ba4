//! JSON experiment descriptions. Frequencies are entered in MHz (ordinary
//! frequency, not angular), times in microseconds, phases in radians; the
//! conversions to the solver's rad/s and seconds happen here, in one place.

use serde::{Deserialize, Serialize};

use superatom_core::basis::MAX_TOTAL_ATOMS;
use superatom_core::error::{Error, Result};
use superatom_core::gates::{
    cnot_type, hadamard, identity_gate, not_x, not_y, not_z, GateProgram, GateTiming,
};
use superatom_core::propagator::LindbladModel;
use superatom_core::pulse::{
    gaussian_stirap_schedule, stirap_excitation_schedule, GaussianStirapParams, PulseSchedule,
    StirapParams,
};
use superatom_core::units::{mhz, to_mhz, to_us, us};

/// Integrator tolerances accepted from configs; the adaptive stepper itself
/// refuses anything outside this window.
pub const TOL_RANGE: (f64, f64) = (1e-14, 1e-8);

fn default_tol() -> f64 {
    1e-10
}

/// Two-term transfer envelope (super-Gaussian mask, sigmoid crossfade).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizedShape {
    pub omega_mhz: f64,
    pub delta_mhz: f64,
    pub t0_us: f64,
    pub n: u32,
    pub lambda: f64,
    pub t1_us: f64,
    pub t2_us: f64,
}

impl OptimizedShape {
    pub fn from_params(p: &StirapParams) -> Self {
        OptimizedShape {
            omega_mhz: to_mhz(p.omega0),
            delta_mhz: to_mhz(p.delta),
            t0_us: to_us(p.t0),
            n: p.n,
            lambda: p.lambda,
            t1_us: to_us(p.t1),
            t2_us: to_us(p.t2),
        }
    }

    pub fn long_pulse() -> Self {
        Self::from_params(&StirapParams::long_pulse())
    }

    pub fn short_pulse() -> Self {
        Self::from_params(&StirapParams::short_pulse())
    }

    pub fn to_params(&self) -> StirapParams {
        StirapParams {
            omega0: mhz(self.omega_mhz),
            delta: mhz(self.delta_mhz),
            t0: us(self.t0_us),
            n: self.n,
            lambda: self.lambda,
            t1: us(self.t1_us),
            t2: us(self.t2_us),
        }
    }
}

/// Conventional Gaussian pulse pair (counter-intuitive ordering when the
/// Stokes center precedes the pump center).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianShape {
    pub omega_mhz: f64,
    pub delta_mhz: f64,
    pub tau_us: f64,
    pub pump_center_us: f64,
    pub stokes_center_us: f64,
}

impl GaussianShape {
    pub fn from_params(p: &GaussianStirapParams) -> Self {
        GaussianShape {
            omega_mhz: to_mhz(p.omega0),
            delta_mhz: to_mhz(p.delta),
            tau_us: to_us(p.tau),
            pump_center_us: to_us(p.t1),
            stokes_center_us: to_us(p.t2),
        }
    }

    pub fn long_pulse() -> Self {
        Self::from_params(&GaussianStirapParams::long_pulse())
    }

    pub fn to_params(&self) -> GaussianStirapParams {
        GaussianStirapParams {
            omega0: mhz(self.omega_mhz),
            delta: mhz(self.delta_mhz),
            tau: us(self.tau_us),
            t1: us(self.pump_center_us),
            t2: us(self.stokes_center_us),
        }
    }
}

/// Envelope family of one transfer series.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseShape {
    Optimized(OptimizedShape),
    Gaussian(GaussianShape),
}

impl PulseShape {
    /// Excitation-only schedule driving every atom of the device.
    pub fn excitation_schedule(&self) -> Result<PulseSchedule> {
        match self {
            PulseShape::Optimized(s) => stirap_excitation_schedule(&s.to_params(), None),
            PulseShape::Gaussian(s) => gaussian_stirap_schedule(&s.to_params(), None),
        }
    }

    fn check(&self, key: &str, diags: &mut Vec<String>) {
        let r = match self {
            PulseShape::Optimized(s) => s.to_params().validate(),
            PulseShape::Gaussian(s) => s.to_params().validate(),
        };
        if let Err(e) = r {
            diags.push(format!("{key}: {e}"));
        }
    }
}

/// Timing of the 5-pulse gate blocks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingConfig {
    pub stirap: OptimizedShape,
    pub omega_leg_mhz: f64,
    pub omega_mw_mhz: f64,
    pub half_gap_us: f64,
}

impl TimingConfig {
    pub fn from_timing(t: &GateTiming) -> Self {
        TimingConfig {
            stirap: OptimizedShape::from_params(&t.stirap),
            omega_leg_mhz: to_mhz(t.omega_leg),
            omega_mw_mhz: to_mhz(t.omega_mw),
            half_gap_us: to_us(t.half_gap),
        }
    }

    pub fn long_pulse() -> Self {
        Self::from_timing(&GateTiming::long_pulse())
    }

    pub fn short_pulse() -> Self {
        Self::from_timing(&GateTiming::short_pulse())
    }

    /// Uncalibrated timing (microwave phase reference zero).
    pub fn to_timing(&self) -> GateTiming {
        GateTiming {
            stirap: self.stirap.to_params(),
            omega_leg: mhz(self.omega_leg_mhz),
            omega_mw: mhz(self.omega_mw_mhz),
            half_gap: us(self.half_gap_us),
            mw_phase_ref: 0.0,
        }
    }

    fn check(&self, key: &str, diags: &mut Vec<String>) {
        if let Err(e) = self.stirap.to_params().validate() {
            diags.push(format!("{key}.stirap: {e}"));
        }
        if !(self.omega_leg_mhz > 0.0) {
            diags.push(format!("{key}.omega_leg_mhz: must be positive"));
        }
        if !(self.omega_mw_mhz > 0.0) {
            diags.push(format!("{key}.omega_mw_mhz: must be positive"));
        }
        if !(self.half_gap_us > 0.0) {
            diags.push(format!("{key}.half_gap_us: must be positive"));
        }
    }
}

/// Basis used while decay is active.
///
/// An ensemble parked in a Rydberg state still sees the pump light: in the
/// plain blockaded basis the remaining ground atoms keep getting re-excited
/// through the short-lived intermediate level, and the resulting loss grows
/// with the ensemble size. The superatom picture instead keeps a single
/// shared excitation for the whole system, which removes that channel and
/// leaves decay errors size-independent. Both variants agree exactly for
/// single-atom ensembles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayBasis {
    #[default]
    SharedExcitation,
    Blockade,
}

/// Spontaneous decay rates (ordinary frequency, MHz) and the basis the
/// open-system run uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecayConfig {
    pub gamma_e_mhz: f64,
    pub gamma_r_mhz: f64,
    #[serde(default)]
    pub truncation: DecayBasis,
}

impl DecayConfig {
    /// Intermediate level at 5 MHz, Rydberg levels at 0.8 kHz.
    pub fn typical() -> Self {
        DecayConfig {
            gamma_e_mhz: 5.0,
            gamma_r_mhz: 0.8e-3,
            truncation: DecayBasis::default(),
        }
    }

    pub fn to_model(&self) -> Result<LindbladModel> {
        LindbladModel::new(mhz(self.gamma_e_mhz), mhz(self.gamma_r_mhz))
    }

    fn check(&self, key: &str, diags: &mut Vec<String>) {
        if let Err(e) = self.to_model() {
            diags.push(format!("{key}: {e}"));
        }
    }
}

/// Finite measurement statistics; omit for exact expectation values.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotConfig {
    pub shots: u64,
    pub seed: u64,
}

/// How the state propagates while the pulses play.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Evolution {
    Unitary,
    /// No-jump state-vector evolution under the decay model.
    Effective,
    /// Full master equation with per-atom loss sinks.
    Master,
}

/// Named single-qubit gate programs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GateKind {
    Identity,
    NotX,
    NotY,
    NotZ,
    Hadamard,
}

impl GateKind {
    pub const ALL: [GateKind; 5] = [
        GateKind::Identity,
        GateKind::NotX,
        GateKind::NotY,
        GateKind::NotZ,
        GateKind::Hadamard,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            GateKind::Identity => "identity",
            GateKind::NotX => "not_x",
            GateKind::NotY => "not_y",
            GateKind::NotZ => "not_z",
            GateKind::Hadamard => "hadamard",
        }
    }

    pub fn program(&self, timing: &GateTiming, ensemble: usize) -> Result<GateProgram> {
        match self {
            GateKind::Identity => identity_gate(timing, ensemble),
            GateKind::NotX => not_x(timing, ensemble),
            GateKind::NotY => not_y(timing, ensemble),
            GateKind::NotZ => not_z(timing, ensemble),
            GateKind::Hadamard => hadamard(timing, ensemble),
        }
    }
}

/// Build the two-qubit gate program (sandwiched pulse on the target, so the
/// target ensemble's calibrated timing applies).
pub fn cnot_program(target_timing: &GateTiming) -> Result<GateProgram> {
    cnot_type(target_timing)
}

/// One curve of a transfer scan: envelope family, ensemble sizes, optional
/// decay (simulated with the no-jump propagator).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferSeries {
    pub label: String,
    pub shape: PulseShape,
    pub sizes: Vec<usize>,
    #[serde(default)]
    pub decay: Option<DecayConfig>,
}

/// What to simulate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    /// Population transfer error of the excitation sequence vs ensemble size.
    TransferScan { series: Vec<TransferSeries> },
    /// Ground-state phase after a double transfer, with and without the
    /// detuning sign switch on the return half.
    PhaseCheck {
        sizes: Vec<usize>,
        stirap: OptimizedShape,
    },
    /// Process tomography of single-qubit gate programs.
    ProcessTomography {
        sizes: Vec<usize>,
        gates: Vec<GateKind>,
        timing: TimingConfig,
        #[serde(default = "Experiment::default_evolution")]
        evolution: Evolution,
        #[serde(default)]
        decay: Option<DecayConfig>,
    },
    /// State tomography of the four Bell-state preparation circuits.
    BellStates {
        pairs: Vec<[usize; 2]>,
        timing: TimingConfig,
    },
    /// Process tomography of the two-qubit blockade gate.
    CnotTomography {
        pair: [usize; 2],
        timing: TimingConfig,
    },
}

impl Experiment {
    fn default_evolution() -> Evolution {
        Evolution::Unitary
    }

    /// Tag used in summaries and default output paths.
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::TransferScan { .. } => "transfer_scan",
            Experiment::PhaseCheck { .. } => "phase_check",
            Experiment::ProcessTomography { .. } => "process_tomography",
            Experiment::BellStates { .. } => "bell_states",
            Experiment::CnotTomography { .. } => "cnot_tomography",
        }
    }
}

/// A complete run description.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub experiment: Experiment,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Realize analysis rotations as pulse programs instead of ideal
    /// logical rotations.
    #[serde(default)]
    pub physical_analysis: bool,
    #[serde(default)]
    pub shots: Option<ShotConfig>,
}

fn check_sizes(sizes: &[usize], key: &str, diags: &mut Vec<String>) {
    if sizes.is_empty() {
        diags.push(format!("{key}: must not be empty"));
    }
    for &n in sizes {
        if n == 0 || n > MAX_TOTAL_ATOMS {
            diags.push(format!(
                "{key}: ensemble sizes must lie in 1..={MAX_TOTAL_ATOMS}, got {n}"
            ));
        }
    }
}

fn check_pair(pair: &[usize; 2], key: &str, diags: &mut Vec<String>) {
    if pair[0] == 0 || pair[1] == 0 {
        diags.push(format!("{key}: ensemble sizes must be positive"));
    } else if pair[0] + pair[1] > MAX_TOTAL_ATOMS {
        diags.push(format!(
            "{key}: total atom count {} exceeds the supported maximum {MAX_TOTAL_ATOMS}",
            pair[0] + pair[1]
        ));
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("config parse error: {e}")))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }

    /// All problems found, each naming the offending key. Empty means the
    /// config is runnable.
    pub fn validate(&self) -> Vec<String> {
        let mut diags = Vec::new();
        if self.name.trim().is_empty() {
            diags.push("name: must not be empty".to_string());
        }
        let (lo, hi) = TOL_RANGE;
        if !(self.tol >= lo && self.tol <= hi) {
            diags.push(format!(
                "tol: integrator tolerance must lie in [{lo:e}, {hi:e}], got {:e}",
                self.tol
            ));
        }
        if let Some(shots) = &self.shots {
            if shots.shots == 0 {
                diags.push("shots.shots: must be at least 1".to_string());
            }
        }
        match &self.experiment {
            Experiment::TransferScan { series } => {
                if series.is_empty() {
                    diags.push("experiment.transfer_scan.series: must not be empty".to_string());
                }
                let mut labels = std::collections::HashSet::new();
                for (i, s) in series.iter().enumerate() {
                    let key = format!("experiment.transfer_scan.series[{i}]");
                    if s.label.trim().is_empty() {
                        diags.push(format!("{key}.label: must not be empty"));
                    } else if !labels.insert(s.label.clone()) {
                        diags.push(format!("{key}.label: duplicate label '{}'", s.label));
                    }
                    check_sizes(&s.sizes, &format!("{key}.sizes"), &mut diags);
                    s.shape.check(&format!("{key}.shape"), &mut diags);
                    if let Some(d) = &s.decay {
                        d.check(&format!("{key}.decay"), &mut diags);
                    }
                }
            }
            Experiment::PhaseCheck { sizes, stirap } => {
                check_sizes(sizes, "experiment.phase_check.sizes", &mut diags);
                if let Err(e) = stirap.to_params().validate() {
                    diags.push(format!("experiment.phase_check.stirap: {e}"));
                }
            }
            Experiment::ProcessTomography {
                sizes,
                gates,
                timing,
                evolution,
                decay,
            } => {
                let key = "experiment.process_tomography";
                check_sizes(sizes, &format!("{key}.sizes"), &mut diags);
                if gates.is_empty() {
                    diags.push(format!("{key}.gates: must not be empty"));
                }
                timing.check(&format!("{key}.timing"), &mut diags);
                match (evolution, decay) {
                    (Evolution::Unitary, _) => {}
                    (_, Some(d)) => d.check(&format!("{key}.decay"), &mut diags),
                    (_, None) => diags.push(format!(
                        "{key}.decay: required when evolution is not unitary"
                    )),
                }
            }
            Experiment::BellStates { pairs, timing } => {
                let key = "experiment.bell_states";
                if pairs.is_empty() {
                    diags.push(format!("{key}.pairs: must not be empty"));
                }
                for (i, p) in pairs.iter().enumerate() {
                    check_pair(p, &format!("{key}.pairs[{i}]"), &mut diags);
                }
                timing.check(&format!("{key}.timing"), &mut diags);
            }
            Experiment::CnotTomography { pair, timing } => {
                let key = "experiment.cnot_tomography";
                check_pair(pair, &format!("{key}.pair"), &mut diags);
                timing.check(&format!("{key}.timing"), &mut diags);
            }
        }
        diags
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal() -> ExperimentConfig {
        ExperimentConfig {
            name: "t".into(),
            experiment: Experiment::TransferScan {
                series: vec![TransferSeries {
                    label: "optimized".into(),
                    shape: PulseShape::Optimized(OptimizedShape::long_pulse()),
                    sizes: vec![1, 2],
                    decay: None,
                }],
            },
            tol: 1e-10,
            physical_analysis: false,
            shots: None,
        }
    }

    #[test]
    fn roundtrips_through_json() {
        let cfg = minimal();
        let back = ExperimentConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn unit_conversions_recover_the_builtin_parameters() {
        let p = StirapParams::long_pulse();
        let q = OptimizedShape::from_params(&p).to_params();
        assert!((p.omega0 - q.omega0).abs() < 1e-6 * p.omega0);
        assert!((p.t1 - q.t1).abs() < 1e-18);
        let t = GateTiming::short_pulse();
        let u = TimingConfig::from_timing(&t).to_timing();
        assert!((t.half_gap - u.half_gap).abs() < 1e-15);
        assert!((t.omega_mw - u.omega_mw).abs() < 1e-6 * t.omega_mw);
    }

    #[test]
    fn tolerance_outside_the_stepper_range_is_flagged() {
        let mut cfg = minimal();
        cfg.tol = 1e-2;
        let diags = cfg.validate();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].starts_with("tol:"), "{}", diags[0]);
        assert!(diags[0].contains("1e-14") && diags[0].contains("1e-8"));
        cfg.tol = 1e-15;
        assert_eq!(cfg.validate().len(), 1);
    }

    #[test]
    fn structural_problems_name_the_offending_keys() {
        let cfg = ExperimentConfig {
            name: " ".into(),
            experiment: Experiment::TransferScan {
                series: vec![TransferSeries {
                    label: "x".into(),
                    shape: PulseShape::Optimized(OptimizedShape {
                        omega_mhz: -1.0,
                        ..OptimizedShape::long_pulse()
                    }),
                    sizes: vec![0, 9],
                    decay: Some(DecayConfig {
                        gamma_e_mhz: -5.0,
                        gamma_r_mhz: 0.0,
                        truncation: DecayBasis::default(),
                    }),
                }],
            },
            tol: 1e-10,
            physical_analysis: false,
            shots: Some(ShotConfig { shots: 0, seed: 1 }),
        };
        let diags = cfg.validate();
        let text = diags.join("\n");
        assert!(text.contains("name:"), "{text}");
        assert!(text.contains("shots.shots"), "{text}");
        assert!(text.contains("series[0].sizes"), "{text}");
        assert!(text.contains("series[0].shape"), "{text}");
        assert!(text.contains("series[0].decay"), "{text}");
        assert_eq!(diags.len(), 6, "{text}");
    }

    #[test]
    fn master_evolution_without_rates_is_rejected() {
        let cfg = ExperimentConfig {
            name: "m".into(),
            experiment: Experiment::ProcessTomography {
                sizes: vec![1],
                gates: vec![GateKind::Hadamard],
                timing: TimingConfig::short_pulse(),
                evolution: Evolution::Master,
                decay: None,
            },
            tol: 1e-9,
            physical_analysis: false,
            shots: None,
        };
        let diags = cfg.validate();
        assert_eq!(diags.len(), 1);
        assert!(diags[0].contains("decay: required"), "{}", diags[0]);
    }

    #[test]
    fn unknown_keys_fail_the_parse() {
        let text = r#"{ "name": "x", "tol": 1e-10, "bogus": 1,
            "experiment": { "phase_check": { "sizes": [1], "stirap": {
                "omega_mhz": 50, "delta_mhz": 200, "t0_us": 2, "n": 3,
                "lambda": 4, "t1_us": -4, "t2_us": 4 } } } }"#;
        let err = ExperimentConfig::from_json(text).unwrap_err();
        assert!(err.to_string().contains("bogus"), "{err}");
    }

    #[test]
    fn gate_labels_are_distinct() {
        let labels: std::collections::HashSet<_> =
            GateKind::ALL.iter().map(|g| g.label()).collect();
        assert_eq!(labels.len(), GateKind::ALL.len());
    }
}
