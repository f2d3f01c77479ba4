//! Runs gate programs through the propagator and turns the outcomes into
//! tomography records: preparation pulses, the gate under test, analysis
//! rotations (ideal by default, physically pulsed on request) and
//! population readout (deterministic expectations, or finite-shot counts).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::basis::BlockadedBasis;
use crate::error::{Error, Result};
use crate::gates::{
    bell_program, calibrate_mw_phase, prepare_basis_state, single_qubit_rotation, BellState,
    GateProgram, GateTiming, PrepBasis,
};
use crate::logical::{logical_density_from_dm, logical_density_from_vec};
use crate::propagator::{
    evolve_effective, evolve_master, evolve_schrodinger, EvolveOptions, HamiltonianModel,
    LindbladModel,
};
use crate::pulse::PulseSchedule;
use crate::tomo::{
    process_tomography_1q, process_tomography_2q, state_tomography_1q, state_tomography_2q,
    MeasAxis,
};

/// How the system evolves while the pulses play.
#[derive(Clone, Copy, Debug)]
pub enum DecayRun {
    /// Closed-system Schrodinger evolution.
    Unitary,
    /// No-jump state-vector evolution; exact for the surviving amplitudes
    /// when every jump feeds the sink.
    Effective(LindbladModel),
    /// Full Lindblad master equation (needs a basis built with the sink).
    Master(LindbladModel),
}

struct ShotNoise {
    shots: u64,
    rng: ChaCha8Rng,
}

/// Tomography executor bound to one device (basis plus per-ensemble gate
/// timings, usually with calibrated microwave phase references).
pub struct Tomographer<'a> {
    basis: &'a BlockadedBasis,
    timings: Vec<GateTiming>,
    evolve: EvolveOptions,
    decay: DecayRun,
    physical_analysis: bool,
    shots: Option<ShotNoise>,
}

impl<'a> Tomographer<'a> {
    pub fn new(
        basis: &'a BlockadedBasis,
        timings: Vec<GateTiming>,
        evolve: EvolveOptions,
    ) -> Result<Self> {
        if timings.len() != basis.n_ensembles() {
            return Err(Error::DimensionMismatch {
                expected: basis.n_ensembles(),
                got: timings.len(),
            });
        }
        Ok(Tomographer {
            basis,
            timings,
            evolve,
            decay: DecayRun::Unitary,
            physical_analysis: false,
            shots: None,
        })
    }

    /// Builds the executor with the microwave phase reference calibrated
    /// for each ensemble size (memoized, one probe run per distinct size).
    pub fn calibrated(
        basis: &'a BlockadedBasis,
        base: &GateTiming,
        evolve: EvolveOptions,
    ) -> Result<Self> {
        let mut by_size = std::collections::HashMap::new();
        let mut timings = Vec::with_capacity(basis.n_ensembles());
        for &n in basis.ensemble_sizes() {
            let timing = match by_size.get(&n) {
                Some(t) => *t,
                None => {
                    let t = calibrate_mw_phase(base, n, &evolve)?;
                    by_size.insert(n, t);
                    t
                }
            };
            timings.push(timing);
        }
        Tomographer::new(basis, timings, evolve)
    }

    pub fn with_decay(mut self, decay: DecayRun) -> Self {
        self.decay = decay;
        self
    }

    /// Realize analysis rotations as pulse programs instead of ideal
    /// logical rotations.
    pub fn with_physical_analysis(mut self, on: bool) -> Self {
        self.physical_analysis = on;
        self
    }

    /// Replace expectation readout with counting statistics over the given
    /// number of shots (deterministic for a fixed seed).
    pub fn with_shot_noise(mut self, shots: u64, seed: u64) -> Self {
        self.shots = Some(ShotNoise {
            shots,
            rng: ChaCha8Rng::seed_from_u64(seed),
        });
        self
    }

    pub fn timing(&self, ensemble: usize) -> &GateTiming {
        &self.timings[ensemble]
    }

    /// Logical density block after playing a schedule from the collective
    /// ground state; trace < 1 records leakage and decay loss.
    pub fn logical_after(&self, schedule: &PulseSchedule) -> Result<DMatrix<C64>> {
        let d = 1 << self.basis.n_ensembles();
        let span = match schedule.span() {
            Some(span) => span,
            None => {
                let mut rho = DMatrix::zeros(d, d);
                rho[(0, 0)] = C64::new(1.0, 0.0);
                return Ok(rho);
            }
        };
        let model = HamiltonianModel::new(self.basis, schedule)?;
        let ground = self.basis.logical_state(&vec![0; self.basis.n_ensembles()])?;
        match &self.decay {
            DecayRun::Unitary => {
                let traj = evolve_schrodinger(self.basis, &model, &ground, span, &self.evolve)?;
                Ok(logical_density_from_vec(self.basis, traj.final_pure()?))
            }
            DecayRun::Effective(decay) => {
                let traj =
                    evolve_effective(self.basis, &model, decay, &ground, span, &self.evolve)?;
                Ok(logical_density_from_vec(self.basis, traj.final_pure()?))
            }
            DecayRun::Master(decay) => {
                let traj = evolve_master(
                    self.basis,
                    &model,
                    decay,
                    &ground.outer(),
                    span,
                    &self.evolve,
                )?;
                Ok(logical_density_from_dm(self.basis, &traj.final_density()?))
            }
        }
    }

    /// Diagonal populations, optionally resampled with finite statistics.
    fn read_populations(&mut self, rho: &DMatrix<C64>) -> Vec<f64> {
        let p: Vec<f64> = (0..rho.nrows()).map(|i| rho[(i, i)].re.max(0.0)).collect();
        match &mut self.shots {
            None => p,
            Some(noise) => {
                // multinomial draw over the logical outcomes plus the
                // unobserved remainder, via chained binomials
                let mut counts = vec![0u64; p.len()];
                let mut remaining = noise.shots;
                let mut rest = 1.0;
                for (i, &pi) in p.iter().enumerate() {
                    if remaining == 0 || rest <= 0.0 {
                        break;
                    }
                    let q = (pi / rest).clamp(0.0, 1.0);
                    let mut n = 0u64;
                    for _ in 0..remaining {
                        if noise.rng.gen::<f64>() < q {
                            n += 1;
                        }
                    }
                    counts[i] = n;
                    remaining -= n;
                    rest -= pi;
                }
                counts
                    .iter()
                    .map(|&c| c as f64 / noise.shots as f64)
                    .collect()
            }
        }
    }

    fn analysis_program(&self, axis: MeasAxis, ensemble: usize) -> Result<Option<GateProgram>> {
        match axis.rotation_angles() {
            None => Ok(None),
            Some((theta, phi)) => Ok(Some(single_qubit_rotation(
                theta,
                phi,
                &self.timings[ensemble],
                ensemble,
            )?)),
        }
    }

    /// Populations for every analysis setting of an n-qubit measurement,
    /// each entry the rotated logical diagonal.
    fn settings_populations(
        &mut self,
        schedule: &PulseSchedule,
    ) -> Result<std::collections::HashMap<Vec<MeasAxis>, Vec<f64>>> {
        let n = self.basis.n_ensembles();
        let all: Vec<Vec<MeasAxis>> = match n {
            1 => MeasAxis::ALL.iter().map(|&a| vec![a]).collect(),
            2 => MeasAxis::ALL
                .iter()
                .flat_map(|&a| MeasAxis::ALL.iter().map(move |&b| vec![a, b]))
                .collect(),
            _ => return Err(Error::invalid("tomography covers one or two ensembles")),
        };
        let mut out = std::collections::HashMap::new();
        if self.physical_analysis {
            for axes in all {
                let mut extended = schedule.clone();
                for (k, &axis) in axes.iter().enumerate() {
                    if let Some(program) = self.analysis_program(axis, k)? {
                        extended.append_after(program.schedule, 0.0);
                    }
                }
                let rho = self.logical_after(&extended)?;
                let p = self.read_populations(&rho);
                out.insert(axes, p);
            }
        } else {
            let rho = self.logical_after(schedule)?;
            for axes in all {
                let mut a = DMatrix::<C64>::identity(1, 1);
                for axis in &axes {
                    a = a.kronecker(&axis.rotation_matrix());
                }
                let rotated = &a * &rho * a.adjoint();
                let p = self.read_populations(&rotated);
                out.insert(axes, p);
            }
        }
        Ok(out)
    }

    /// State tomography of whatever the program leaves behind.
    pub fn state_density(&mut self, program: &GateProgram) -> Result<DMatrix<C64>> {
        if program.n_ensembles != self.basis.n_ensembles() {
            return Err(Error::invalid(format!(
                "program '{}' addresses {} ensembles, basis has {}",
                program.name,
                program.n_ensembles,
                self.basis.n_ensembles()
            )));
        }
        let settings = self.settings_populations(&program.schedule)?;
        match self.basis.n_ensembles() {
            1 => state_tomography_1q(&mut |axis| {
                let p = &settings[&vec![axis]];
                Ok([p[0], p[1]])
            }),
            2 => state_tomography_2q(&mut |a, b| {
                let p = &settings[&vec![a, b]];
                Ok([p[0], p[1], p[2], p[3]])
            }),
            _ => unreachable!("checked in settings_populations"),
        }
    }

    fn prepared_schedule(&self, preps: &[PrepBasis], gate: &GateProgram) -> Result<PulseSchedule> {
        let mut schedule = PulseSchedule::empty();
        for (k, &which) in preps.iter().enumerate() {
            let prep = prepare_basis_state(which, &self.timings[k], k)?;
            schedule.append_after(prep.schedule, 0.0);
        }
        schedule.append_after(gate.schedule.clone(), 0.0);
        Ok(schedule)
    }

    /// Full process tomography of a gate program: prepare each input
    /// state, run the gate, tomograph the output, combine.
    pub fn process_matrix(&mut self, gate: &GateProgram) -> Result<DMatrix<C64>> {
        match (gate.ideal.nrows(), self.basis.n_ensembles()) {
            (2, 1) => {
                let mut outputs = std::collections::HashMap::new();
                for which in PrepBasis::ALL {
                    let schedule = self.prepared_schedule(&[which], gate)?;
                    let settings = self.settings_populations(&schedule)?;
                    outputs.insert(which, settings);
                }
                process_tomography_1q(&mut |which| {
                    let settings = &outputs[&which];
                    state_tomography_1q(&mut |axis| {
                        let p = &settings[&vec![axis]];
                        Ok([p[0], p[1]])
                    })
                })
            }
            (4, 2) => {
                let mut outputs = std::collections::HashMap::new();
                for first in PrepBasis::ALL {
                    for second in PrepBasis::ALL {
                        let schedule = self.prepared_schedule(&[first, second], gate)?;
                        let settings = self.settings_populations(&schedule)?;
                        outputs.insert((first, second), settings);
                    }
                }
                process_tomography_2q(&mut |first, second| {
                    let settings = &outputs[&(first, second)];
                    state_tomography_2q(&mut |a, b| {
                        let p = &settings[&vec![a, b]];
                        Ok([p[0], p[1], p[2], p[3]])
                    })
                })
            }
            (d, n) => Err(Error::invalid(format!(
                "cannot tomograph a {d}-dimensional gate on {n} ensemble(s)"
            ))),
        }
    }

    /// Reconstructed density of a Bell-state preparation circuit.
    pub fn bell_density(&mut self, which: BellState) -> Result<DMatrix<C64>> {
        if self.basis.n_ensembles() != 2 {
            return Err(Error::invalid("Bell states need two ensembles"));
        }
        let program = bell_program(which, &self.timings[0], &self.timings[1])?;
        self.state_density(&program)
    }
}
