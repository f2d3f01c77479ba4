//! Executes one experiment config: simulates every job (in parallel, in a
//! fixed order), applies the likelihood reconstruction to the tomography
//! outputs, and writes CSV tables, gnuplot matrix grids, a deterministic
//! `summary.json` and a separate `timings.json` (the only file whose bytes
//! vary between reruns).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use superatom_core::basis::{
    build_basis, build_basis_with_sink, build_shared_basis, build_shared_basis_with_sink,
};
use superatom_core::error::{Error, Result};
use superatom_core::experiment::{DecayRun, Tomographer};
use superatom_core::gates::{calibrate_mw_phase_in, BellState, GateTiming};
use superatom_core::io::{
    write_complex_matrix_csv, write_gnuplot_grid, write_json, write_table_csv, write_text,
};
use superatom_core::mle::{mle_chi_with, mle_density, ConstraintMode, MleOptions, MleReport};
use superatom_core::propagator::{
    evolve_effective, evolve_schrodinger, ground_phase, net_ground_phase, EvolveOptions,
    HamiltonianModel,
};
use superatom_core::pulse::double_stirap_schedule;
use superatom_core::tomo::{bell_state_density, fidelity, ideal_chi};
use superatom_core::units::to_us;

use crate::config::{
    cnot_program, DecayBasis, Evolution, Experiment, ExperimentConfig, GateKind, ShotConfig,
    TransferSeries,
};

#[derive(Clone, Debug, Serialize)]
pub struct TransferPoint {
    pub n: usize,
    pub error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesResult {
    pub label: String,
    pub decayed: bool,
    pub points: Vec<TransferPoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PhasePoint {
    pub n: usize,
    pub switched_rad: f64,
    pub unswitched_rad: f64,
}

/// Reconstruction diagnostics kept in the summary (wall time is not, so the
/// summary stays byte-identical between reruns).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MleStats {
    pub residual: f64,
    pub constraint_violation: f64,
    pub evals: usize,
}

impl From<MleReport> for MleStats {
    fn from(r: MleReport) -> Self {
        MleStats {
            residual: r.residual,
            constraint_violation: r.constraint_violation,
            evals: r.evals,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GateResult {
    pub gate: String,
    pub n: usize,
    pub chi_trace: f64,
    pub error_raw: f64,
    pub error_mle: f64,
    pub mle: MleStats,
}

#[derive(Clone, Debug, Serialize)]
pub struct BellResult {
    pub state: String,
    pub sizes: [usize; 2],
    pub error_raw: f64,
    pub error_mle: f64,
    pub mle: MleStats,
}

#[derive(Clone, Debug, Serialize)]
pub struct CnotResult {
    pub sizes: [usize; 2],
    pub chi_trace: f64,
    pub error_raw: f64,
    pub error_mle: f64,
    pub max_entry_dev: f64,
    pub mle: MleStats,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunResults {
    TransferScan { series: Vec<SeriesResult> },
    PhaseCheck { points: Vec<PhasePoint> },
    ProcessTomography { gates: Vec<GateResult> },
    BellStates { states: Vec<BellResult> },
    CnotTomography { cnot: CnotResult },
}

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub experiment: &'static str,
    pub tol: f64,
    pub results: RunResults,
}

#[derive(Debug, Serialize)]
struct JobTiming {
    label: String,
    seconds: f64,
}

#[derive(Debug, Serialize)]
struct Timings {
    jobs: Vec<JobTiming>,
    total_seconds: f64,
}

pub struct RunOutcome {
    pub summary: RunSummary,
    pub out_dir: PathBuf,
}

/// Per-job shot-noise seed; distinct streams per job, stable under any
/// thread count because it depends only on the job's position.
fn job_seed(shots: &Option<ShotConfig>, job_index: usize) -> Option<(u64, u64)> {
    shots.as_ref().map(|s| {
        (
            s.shots,
            s.seed.wrapping_add((job_index as u64).wrapping_mul(0x9E3779B97F4A7C15)),
        )
    })
}

fn timed<T>(f: impl FnOnce() -> Result<T>) -> Result<(T, f64)> {
    let start = Instant::now();
    let value = f()?;
    Ok((value, start.elapsed().as_secs_f64()))
}

/// One microwave-phase calibration per distinct ensemble size, probed in the
/// same basis the gates will run in.
fn calibrations(
    base: &GateTiming,
    sizes: impl IntoIterator<Item = usize>,
    truncation: DecayBasis,
    opts: &EvolveOptions,
) -> Result<BTreeMap<usize, GateTiming>> {
    let mut out = BTreeMap::new();
    for n in sizes {
        if !out.contains_key(&n) {
            let basis = match truncation {
                DecayBasis::SharedExcitation => build_shared_basis(&[n])?,
                DecayBasis::Blockade => build_basis(&[n])?,
            };
            out.insert(n, calibrate_mw_phase_in(&basis, base, opts)?);
        }
    }
    Ok(out)
}

fn run_transfer(
    series: &[TransferSeries],
    opts: &EvolveOptions,
    out: &Path,
) -> Result<(RunResults, Vec<JobTiming>)> {
    let jobs: Vec<(usize, usize)> = series
        .iter()
        .enumerate()
        .flat_map(|(si, s)| s.sizes.iter().map(move |&n| (si, n)))
        .collect();
    let done: Vec<(f64, f64)> = jobs
        .par_iter()
        .map(|&(si, n)| {
            let s = &series[si];
            let schedule = s.shape.excitation_schedule()?;
            let basis = match s.decay.map(|d| d.truncation) {
                Some(DecayBasis::SharedExcitation) => build_shared_basis(&[n])?,
                _ => build_basis(&[n])?,
            };
            let model = HamiltonianModel::new(&basis, &schedule)?;
            let psi0 = basis.logical_state(&[0])?;
            let span = schedule.span().ok_or_else(|| Error::invalid("empty schedule"))?;
            timed(|| {
                let traj = match &s.decay {
                    None => evolve_schrodinger(&basis, &model, &psi0, span, opts)?,
                    Some(d) => {
                        evolve_effective(&basis, &model, &d.to_model()?, &psi0, span, opts)?
                    }
                };
                Ok(1.0 - traj.p1.last().copied().unwrap_or(0.0))
            })
        })
        .collect::<Result<_>>()?;

    let mut results: Vec<SeriesResult> = series
        .iter()
        .map(|s| SeriesResult {
            label: s.label.clone(),
            decayed: s.decay.is_some(),
            points: Vec::new(),
        })
        .collect();
    let mut timings = Vec::new();
    for (&(si, n), &(error, secs)) in jobs.iter().zip(&done) {
        results[si].points.push(TransferPoint { n, error });
        timings.push(JobTiming {
            label: format!("{} N={n}", series[si].label),
            seconds: secs,
        });
        println!("  {} N={n}: transfer error {error:.3e}", series[si].label);
    }
    for r in &results {
        let rows: Vec<Vec<f64>> = r
            .points
            .iter()
            .map(|p| vec![p.n as f64, p.error])
            .collect();
        write_table_csv(
            out.join(format!("transfer_{}.csv", r.label)),
            &["n", "error"],
            &rows,
        )?;
    }
    let mut script = String::from(
        "# transfer error vs ensemble size\n\
         set datafile separator ','\n\
         set logscale y\n\
         set format y '10^{%T}'\n\
         set xlabel 'ensemble size N'\n\
         set ylabel 'transfer error'\n\
         set key top left\n\
         plot \\\n",
    );
    let lines: Vec<String> = results
        .iter()
        .map(|r| {
            format!(
                "  'transfer_{}.csv' skip 1 using 1:2 with linespoints title '{}'",
                r.label, r.label
            )
        })
        .collect();
    script.push_str(&lines.join(", \\\n"));
    script.push('\n');
    write_text(out.join("plot.gp"), &script)?;
    Ok((RunResults::TransferScan { series: results }, timings))
}

fn run_phase_check(
    sizes: &[usize],
    stirap: &crate::config::OptimizedShape,
    opts: &EvolveOptions,
    out: &Path,
) -> Result<(RunResults, Vec<JobTiming>)> {
    let params = stirap.to_params();
    let dense = opts.samples(801);
    let jobs: Vec<(usize, bool)> = sizes
        .iter()
        .flat_map(|&n| [(n, true), (n, false)])
        .collect();
    let done: Vec<((f64, Vec<Vec<f64>>), f64)> = jobs
        .par_iter()
        .map(|&(n, switched)| {
            let schedule = double_stirap_schedule(&params, switched, None)?;
            let basis = build_basis(&[n])?;
            let model = HamiltonianModel::new(&basis, &schedule)?;
            let psi0 = basis.logical_state(&[0])?;
            let span = schedule.span().ok_or_else(|| Error::invalid("empty schedule"))?;
            timed(|| {
                let traj = evolve_schrodinger(&basis, &model, &psi0, span, &dense)?;
                let net = net_ground_phase(&traj)?;
                let trace: Vec<Vec<f64>> = traj
                    .times
                    .iter()
                    .zip(ground_phase(&traj)?)
                    .filter_map(|(&t, phase)| phase.map(|p| vec![to_us(t), p]))
                    .collect();
                Ok((net, trace))
            })
        })
        .collect::<Result<_>>()?;

    let mut by_n: BTreeMap<usize, PhasePoint> = BTreeMap::new();
    let mut timings = Vec::new();
    for (&(n, switched), ((net, trace), secs)) in jobs.iter().zip(&done) {
        let mode = if switched { "switched" } else { "plain" };
        let point = by_n.entry(n).or_insert(PhasePoint {
            n,
            switched_rad: 0.0,
            unswitched_rad: 0.0,
        });
        if switched {
            point.switched_rad = *net;
        } else {
            point.unswitched_rad = *net;
        }
        write_table_csv(
            out.join(format!("phase_trace_{mode}_n{n}.csv")),
            &["t_us", "phase_rad"],
            trace,
        )?;
        timings.push(JobTiming {
            label: format!("{mode} N={n}"),
            seconds: *secs,
        });
        println!("  N={n} {mode}: net phase {net:+.4e} rad");
    }
    let points: Vec<PhasePoint> = by_n.into_values().collect();
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|p| vec![p.n as f64, p.switched_rad, p.unswitched_rad])
        .collect();
    write_table_csv(
        out.join("phase_scan.csv"),
        &["n", "switched_rad", "unswitched_rad"],
        &rows,
    )?;
    let mut script = String::from(
        "# ground-state phase during the double transfer\n\
         set datafile separator ','\n\
         set xlabel 't (us)'\n\
         set ylabel 'phase (rad)'\n\
         plot \\\n",
    );
    let lines: Vec<String> = points
        .iter()
        .flat_map(|p| {
            let n = p.n;
            [
                format!(
                    "  'phase_trace_switched_n{n}.csv' skip 1 using 1:2 with lines title 'switched N={n}'"
                ),
                format!(
                    "  'phase_trace_plain_n{n}.csv' skip 1 using 1:2 with lines dashtype 2 title 'plain N={n}'"
                ),
            ]
        })
        .collect();
    script.push_str(&lines.join(", \\\n"));
    script.push('\n');
    write_text(out.join("plot.gp"), &script)?;
    Ok((RunResults::PhaseCheck { points }, timings))
}

fn decay_run(evolution: Evolution, decay: Option<&crate::config::DecayConfig>) -> Result<DecayRun> {
    match evolution {
        Evolution::Unitary => Ok(DecayRun::Unitary),
        Evolution::Effective | Evolution::Master => {
            let model = decay
                .ok_or_else(|| Error::invalid("decay rates required"))?
                .to_model()?;
            Ok(match evolution {
                Evolution::Effective => DecayRun::Effective(model),
                _ => DecayRun::Master(model),
            })
        }
    }
}

/// Trace preservation is only imposed on closed-system reconstructions;
/// with loss in the model the channel is trace-decreasing and the
/// likelihood fit just restores positivity.
fn chi_mle_options(constrained: bool) -> (MleOptions, ConstraintMode) {
    if constrained {
        (MleOptions::default(), ConstraintMode::Full)
    } else {
        (
            MleOptions {
                outer_iterations: 1,
                initial_penalty: 0.0,
                ..MleOptions::default()
            },
            ConstraintMode::Full,
        )
    }
}

fn chi_grid_script(files: &[String]) -> String {
    let mut script = String::from(
        "# process-matrix magnitude map\n\
         # select a grid with: gnuplot -e \"file='<name>.dat'\" plot.gp\n",
    );
    script.push_str(&format!("if (!exists('file')) file = '{}'\n", files[0]));
    script.push_str(
        "set view map\n\
         set xlabel 'column'\n\
         set ylabel 'row'\n\
         set yrange [] reverse\n\
         splot file using 2:1:5 with pm3d title ''\n",
    );
    script.push_str("# available grids:\n");
    for f in files {
        script.push_str(&format!("#   {f}\n"));
    }
    script
}

#[allow(clippy::too_many_arguments)]
fn run_process_tomography(
    cfg: &ExperimentConfig,
    sizes: &[usize],
    gates: &[GateKind],
    timing: &crate::config::TimingConfig,
    evolution: Evolution,
    decay: Option<&crate::config::DecayConfig>,
    opts: &EvolveOptions,
    out: &Path,
) -> Result<(RunResults, Vec<JobTiming>)> {
    let base = timing.to_timing();
    let truncation = match evolution {
        Evolution::Unitary => DecayBasis::Blockade,
        _ => decay.map(|d| d.truncation).unwrap_or_default(),
    };
    let cal = calibrations(&base, sizes.iter().copied(), truncation, opts)?;
    let decay_mode = decay_run(evolution, decay)?;
    let jobs: Vec<(usize, GateKind)> = sizes
        .iter()
        .flat_map(|&n| gates.iter().map(move |&g| (n, g)))
        .collect();
    let done: Vec<(GateResult, f64)> = jobs
        .par_iter()
        .enumerate()
        .map(|(ji, &(n, gate))| {
            let basis = match (evolution, truncation) {
                (Evolution::Master, DecayBasis::SharedExcitation) => {
                    build_shared_basis_with_sink(&[n])?
                }
                (Evolution::Master, DecayBasis::Blockade) => build_basis_with_sink(&[n])?,
                (_, DecayBasis::SharedExcitation) => build_shared_basis(&[n])?,
                (_, DecayBasis::Blockade) => build_basis(&[n])?,
            };
            let timing_n = cal[&n];
            timed(|| {
                let mut rig = Tomographer::new(&basis, vec![timing_n], *opts)?
                    .with_decay(decay_mode)
                    .with_physical_analysis(cfg.physical_analysis);
                if let Some((shots, seed)) = job_seed(&cfg.shots, ji) {
                    rig = rig.with_shot_noise(shots, seed);
                }
                let program = gate.program(&timing_n, 0)?;
                let chi = rig.process_matrix(&program)?;
                let ideal = ideal_chi(&program.ideal)?;
                let error_raw = 1.0 - fidelity(&chi, &ideal)?;
                let (mle_opts, mode) = chi_mle_options(evolution == Evolution::Unitary);
                let (chi_mle, report) = mle_chi_with(&chi, mode, &mle_opts)?;
                let error_mle = 1.0 - fidelity(&chi_mle, &ideal)?;
                let stem = format!("chi_{}_n{n}", gate.label());
                write_complex_matrix_csv(out.join(format!("{stem}.csv")), &chi)?;
                write_gnuplot_grid(out.join(format!("{stem}.dat")), &chi)?;
                write_complex_matrix_csv(out.join(format!("{stem}_mle.csv")), &chi_mle)?;
                Ok(GateResult {
                    gate: gate.label().to_string(),
                    n,
                    chi_trace: chi.trace().re,
                    error_raw,
                    error_mle,
                    mle: report.into(),
                })
            })
        })
        .collect::<Result<_>>()?;

    let mut timings = Vec::new();
    for (r, secs) in &done {
        timings.push(JobTiming {
            label: format!("{} N={}", r.gate, r.n),
            seconds: *secs,
        });
        println!(
            "  {} N={}: gate error {:.3e} (raw {:.3e}), chi trace {:.6}",
            r.gate, r.n, r.error_mle, r.error_raw, r.chi_trace
        );
    }
    let results: Vec<GateResult> = done.into_iter().map(|(r, _)| r).collect();
    for gate in gates {
        let rows: Vec<Vec<f64>> = results
            .iter()
            .filter(|r| r.gate == gate.label())
            .map(|r| vec![r.n as f64, r.error_raw, r.error_mle])
            .collect();
        write_table_csv(
            out.join(format!("errors_{}.csv", gate.label())),
            &["n", "error_raw", "error_mle"],
            &rows,
        )?;
    }
    let grids: Vec<String> = results
        .iter()
        .map(|r| format!("chi_{}_n{}.dat", r.gate, r.n))
        .collect();
    write_text(out.join("plot.gp"), &chi_grid_script(&grids))?;
    Ok((RunResults::ProcessTomography { gates: results }, timings))
}

fn run_bell_states(
    cfg: &ExperimentConfig,
    pairs: &[[usize; 2]],
    timing: &crate::config::TimingConfig,
    opts: &EvolveOptions,
    out: &Path,
) -> Result<(RunResults, Vec<JobTiming>)> {
    let base = timing.to_timing();
    let cal = calibrations(&base, pairs.iter().flatten().copied(), DecayBasis::Blockade, opts)?;
    let jobs: Vec<([usize; 2], BellState)> = pairs
        .iter()
        .flat_map(|&p| BellState::ALL.iter().map(move |&s| (p, s)))
        .collect();
    let done: Vec<(BellResult, f64)> = jobs
        .par_iter()
        .enumerate()
        .map(|(ji, &([na, nb], state))| {
            let basis = build_basis(&[na, nb])?;
            timed(|| {
                let mut rig =
                    Tomographer::new(&basis, vec![cal[&na], cal[&nb]], *opts)?
                        .with_physical_analysis(cfg.physical_analysis);
                if let Some((shots, seed)) = job_seed(&cfg.shots, ji) {
                    rig = rig.with_shot_noise(shots, seed);
                }
                let rho = rig.bell_density(state)?;
                let target = bell_state_density(state);
                let error_raw = 1.0 - fidelity(&rho, &target)?;
                let (rho_mle, report) = mle_density(&rho)?;
                let error_mle = 1.0 - fidelity(&rho_mle, &target)?;
                let stem = format!("rho_{}_{na}{nb}", state.label());
                write_complex_matrix_csv(out.join(format!("{stem}.csv")), &rho)?;
                write_gnuplot_grid(out.join(format!("{stem}.dat")), &rho)?;
                write_complex_matrix_csv(out.join(format!("{stem}_mle.csv")), &rho_mle)?;
                Ok(BellResult {
                    state: state.label().to_string(),
                    sizes: [na, nb],
                    error_raw,
                    error_mle,
                    mle: report.into(),
                })
            })
        })
        .collect::<Result<_>>()?;

    let mut timings = Vec::new();
    let mut rows = Vec::new();
    for (idx, (r, secs)) in done.iter().enumerate() {
        timings.push(JobTiming {
            label: format!("{} ({},{})", r.state, r.sizes[0], r.sizes[1]),
            seconds: *secs,
        });
        println!(
            "  {} ({},{}): state error {:.3e} (raw {:.3e})",
            r.state, r.sizes[0], r.sizes[1], r.error_mle, r.error_raw
        );
        rows.push(vec![
            r.sizes[0] as f64,
            r.sizes[1] as f64,
            (idx % BellState::ALL.len()) as f64,
            r.error_raw,
            r.error_mle,
        ]);
    }
    write_table_csv(
        out.join("bell_errors.csv"),
        &["n_control", "n_target", "state_index", "error_raw", "error_mle"],
        &rows,
    )?;
    let results: Vec<BellResult> = done.into_iter().map(|(r, _)| r).collect();
    let grids: Vec<String> = results
        .iter()
        .map(|r| format!("rho_{}_{}{}.dat", r.state, r.sizes[0], r.sizes[1]))
        .collect();
    write_text(out.join("plot.gp"), &chi_grid_script(&grids))?;
    Ok((RunResults::BellStates { states: results }, timings))
}

fn run_cnot(
    cfg: &ExperimentConfig,
    pair: [usize; 2],
    timing: &crate::config::TimingConfig,
    opts: &EvolveOptions,
    out: &Path,
) -> Result<(RunResults, Vec<JobTiming>)> {
    let base = timing.to_timing();
    let cal = calibrations(&base, pair.iter().copied(), DecayBasis::Blockade, opts)?;
    let [na, nb] = pair;
    let basis = build_basis(&[na, nb])?;
    let (result, secs) = timed(|| {
        let mut rig = Tomographer::new(&basis, vec![cal[&na], cal[&nb]], *opts)?
            .with_physical_analysis(cfg.physical_analysis);
        if let Some((shots, seed)) = job_seed(&cfg.shots, 0) {
            rig = rig.with_shot_noise(shots, seed);
        }
        let program = cnot_program(&cal[&nb])?;
        let chi = rig.process_matrix(&program)?;
        let ideal = ideal_chi(&program.ideal)?;
        let error_raw = 1.0 - fidelity(&chi, &ideal)?;
        let (chi_mle, report) =
            mle_chi_with(&chi, ConstraintMode::DiagonalOnly, &MleOptions::default())?;
        let error_mle = 1.0 - fidelity(&chi_mle, &ideal)?;
        let max_entry_dev = (&chi_mle - &ideal)
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        write_complex_matrix_csv(out.join("chi_cnot.csv"), &chi)?;
        write_gnuplot_grid(out.join("chi_cnot.dat"), &chi)?;
        write_complex_matrix_csv(out.join("chi_cnot_mle.csv"), &chi_mle)?;
        Ok(CnotResult {
            sizes: pair,
            chi_trace: chi.trace().re,
            error_raw,
            error_mle,
            max_entry_dev,
            mle: report.into(),
        })
    })?;
    println!(
        "  cnot ({na},{nb}): gate error {:.3e} (raw {:.3e}), max entry deviation {:.3e}",
        result.error_mle, result.error_raw, result.max_entry_dev
    );
    write_text(
        out.join("plot.gp"),
        &chi_grid_script(&["chi_cnot.dat".to_string()]),
    )?;
    let timings = vec![JobTiming {
        label: format!("cnot ({na},{nb})"),
        seconds: secs,
    }];
    Ok((RunResults::CnotTomography { cnot: result }, timings))
}

/// Runs the experiment into `out_dir` and reports what was measured.
pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunOutcome> {
    let diags = cfg.validate();
    if !diags.is_empty() {
        for d in &diags {
            eprintln!("config: {d}");
        }
        return Err(Error::invalid(format!(
            "configuration failed validation ({} problem{})",
            diags.len(),
            if diags.len() == 1 { "" } else { "s" }
        )));
    }
    std::fs::create_dir_all(out_dir)?;
    let opts = EvolveOptions::with_tol(cfg.tol).samples(2);
    let start = Instant::now();
    println!("{} ({})", cfg.name, cfg.experiment.kind());
    let (results, jobs) = match &cfg.experiment {
        Experiment::TransferScan { series } => run_transfer(series, &opts, out_dir)?,
        Experiment::PhaseCheck { sizes, stirap } => {
            run_phase_check(sizes, stirap, &opts, out_dir)?
        }
        Experiment::ProcessTomography {
            sizes,
            gates,
            timing,
            evolution,
            decay,
        } => run_process_tomography(
            cfg,
            sizes,
            gates,
            timing,
            *evolution,
            decay.as_ref(),
            &opts,
            out_dir,
        )?,
        Experiment::BellStates { pairs, timing } => {
            run_bell_states(cfg, pairs, timing, &opts, out_dir)?
        }
        Experiment::CnotTomography { pair, timing } => {
            run_cnot(cfg, *pair, timing, &opts, out_dir)?
        }
    };
    let summary = RunSummary {
        name: cfg.name.clone(),
        experiment: cfg.experiment.kind(),
        tol: cfg.tol,
        results,
    };
    write_text(out_dir.join("run_config.json"), &cfg.to_json())?;
    write_json(out_dir.join("summary.json"), &summary)?;
    write_json(
        out_dir.join("timings.json"),
        &Timings {
            jobs,
            total_seconds: start.elapsed().as_secs_f64(),
        },
    )?;
    println!("results in {}", out_dir.display());
    Ok(RunOutcome {
        summary,
        out_dir: out_dir.to_path_buf(),
    })
}
