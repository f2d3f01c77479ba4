//! Time evolution of blockaded ensembles: Schrödinger dynamics, the
//! no-jump effective-decay approximation, and the full Lindblad master
//! equation with per-atom sink levels.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use std::collections::HashMap;

use crate::basis::BlockadedBasis;
use crate::error::{Error, Result};
use crate::integrator::{integrate, DenseStep, IntegratorOptions, StepStats};
use crate::levels::Level;
use crate::pulse::{Envelope, PulseSchedule};
use crate::states::{DensityMatrix, Operator, StateVector};

/// Decay rates in rad/s: `gamma_e` empties the intermediate level, `gamma_r`
/// both Rydberg levels. Population goes to a per-atom sink and never returns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LindbladModel {
    pub gamma_e: f64,
    pub gamma_r: f64,
}

impl LindbladModel {
    pub fn new(gamma_e: f64, gamma_r: f64) -> Result<Self> {
        if !(gamma_e >= 0.0) || !(gamma_r >= 0.0) {
            return Err(Error::invalid("decay rates must be non-negative"));
        }
        Ok(LindbladModel { gamma_e, gamma_r })
    }

    pub fn off() -> Self {
        LindbladModel {
            gamma_e: 0.0,
            gamma_r: 0.0,
        }
    }

    pub fn is_off(&self) -> bool {
        self.gamma_e == 0.0 && self.gamma_r == 0.0
    }
}

/// One coupling restricted to the basis: sparse pair list plus the shared
/// envelope. Entry (r, c) adds factor*envelope(t) at H[r, c] (and the
/// conjugate at H[c, r]).
#[derive(Clone, Debug)]
struct CouplingTerms {
    envelope: Envelope,
    factor: C64,
    pairs: Vec<(u32, u32)>,
}

/// Maximal time window over which the active coupling set is constant.
#[derive(Clone, Debug)]
struct Interval {
    t_start: f64,
    t_end: f64,
    couplings: Vec<CouplingTerms>,
    diag: Vec<f64>,
    has_diag: bool,
}

/// Schedule compiled against a basis: per-interval sparse Hamiltonian terms.
/// Detunings live inside their segments, so time outside every interval
/// evolves trivially (for closed systems).
#[derive(Clone, Debug)]
pub struct HamiltonianModel {
    dim: usize,
    intervals: Vec<Interval>,
}

impl HamiltonianModel {
    pub fn new(basis: &BlockadedBasis, schedule: &PulseSchedule) -> Result<Self> {
        for seg in &schedule.segments {
            for c in &seg.couplings {
                basis.scheme().check_contains(c.from)?;
                basis.scheme().check_contains(c.to)?;
                if c.from == Level::Sink || c.to == Level::Sink {
                    return Err(Error::invalid("the sink level cannot be driven"));
                }
                if let Some(k) = c.ensemble {
                    if k >= basis.n_ensembles() {
                        return Err(Error::invalid(format!(
                            "coupling addresses ensemble {k} but only {} exist",
                            basis.n_ensembles()
                        )));
                    }
                }
            }
            for &(level, _) in &seg.detunings {
                basis.scheme().check_contains(level)?;
            }
        }

        let bounds = schedule.boundaries();
        let mut intervals = Vec::new();
        for w in bounds.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a <= 0.0 {
                continue;
            }
            let mid = 0.5 * (a + b);
            let active: Vec<_> = schedule
                .segments
                .iter()
                .filter(|s| s.contains(mid) && s.duration() > 0.0)
                .collect();
            if active.is_empty() {
                continue;
            }
            let mut couplings = Vec::new();
            let mut diag = vec![0.0; basis.dim()];
            let mut has_diag = false;
            for seg in active {
                for c in &seg.couplings {
                    let atoms = match c.ensemble {
                        Some(k) => basis.atoms_of(k),
                        None => 0..basis.n_atoms(),
                    };
                    let mut pairs = Vec::new();
                    for i in 0..basis.dim() {
                        for atom in atoms.clone() {
                            if basis.config(i)[atom] == c.from {
                                if let Some(j) = basis.moved(i, atom, c.to) {
                                    pairs.push((j as u32, i as u32));
                                }
                            }
                        }
                    }
                    couplings.push(CouplingTerms {
                        envelope: c.envelope,
                        factor: 0.5 * C64::from_polar(1.0, c.phase),
                        pairs,
                    });
                }
                for &(level, delta) in &seg.detunings {
                    if delta != 0.0 {
                        has_diag = true;
                        for (i, d) in diag.iter_mut().enumerate() {
                            *d += delta * basis.level_count(i, level) as f64;
                        }
                    }
                }
            }
            intervals.push(Interval {
                t_start: a,
                t_end: b,
                couplings,
                diag,
                has_diag,
            });
        }
        Ok(HamiltonianModel {
            dim: basis.dim(),
            intervals,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Earliest and latest driven instants, if any segment is non-trivial.
    pub fn span(&self) -> Option<(f64, f64)> {
        let first = self.intervals.first()?;
        let last = self.intervals.last()?;
        Some((first.t_start, last.t_end))
    }

    fn interval_at(&self, t: f64) -> Option<&Interval> {
        let found = self
            .intervals
            .iter()
            .find(|iv| t >= iv.t_start && t < iv.t_end);
        found.or_else(|| {
            self.intervals
                .last()
                .filter(|iv| t == iv.t_end)
        })
    }

    /// Dense Hamiltonian snapshot (Hermitian by construction).
    pub fn hamiltonian(&self, t: f64) -> Operator {
        let mut mat = DMatrix::zeros(self.dim, self.dim);
        if let Some(iv) = self.interval_at(t) {
            for ct in &iv.couplings {
                let w = ct.factor * ct.envelope.eval(t);
                for &(r, c) in &ct.pairs {
                    mat[(r as usize, c as usize)] += w;
                    mat[(c as usize, r as usize)] += w.conj();
                }
            }
            if iv.has_diag {
                for (i, &d) in iv.diag.iter().enumerate() {
                    mat[(i, i)] += C64::new(d, 0.0);
                }
            }
        }
        Operator { mat }
    }
}

/// Projector data for the probability that exactly one atom sits in a
/// Rydberg level, symmetrized over the atoms of its ensemble that could
/// equivalently host the excitation.
#[derive(Clone, Debug)]
pub struct CollectiveProjector {
    groups: Vec<Vec<u32>>,
}

impl CollectiveProjector {
    pub fn new(basis: &BlockadedBasis) -> Self {
        let mut map: HashMap<(Vec<Level>, Level, usize), Vec<u32>> = HashMap::new();
        for i in 0..basis.dim() {
            let cfg = basis.config(i);
            if let Some(atom) = cfg.iter().position(|l| l.is_rydberg()) {
                let mut env = cfg.to_vec();
                env[atom] = Level::G0;
                map.entry((env, cfg[atom], basis.ensemble_of(atom)))
                    .or_default()
                    .push(i as u32);
            }
        }
        let mut groups: Vec<Vec<u32>> = map.into_values().collect();
        for g in &mut groups {
            g.sort_unstable();
        }
        groups.sort();
        CollectiveProjector { groups }
    }

    pub fn population_vec(&self, amps: &[C64]) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let sum: C64 = g.iter().map(|&i| amps[i as usize]).sum();
                sum.norm_sqr() / g.len() as f64
            })
            .sum()
    }

    pub fn population_dm(&self, rho: &DMatrix<C64>) -> f64 {
        self.groups
            .iter()
            .map(|g| {
                let mut acc = C64::new(0.0, 0.0);
                for &i in g {
                    for &j in g {
                        acc += rho[(i as usize, j as usize)];
                    }
                }
                acc.re / g.len() as f64
            })
            .sum()
    }
}

/// Per-config decay data; `moves` lists (source, sink-target) index pairs of
/// one jump operator.
#[derive(Clone, Debug)]
struct JumpTerms {
    rate: f64,
    moves: Vec<(u32, u32)>,
}

#[derive(Clone, Debug, Default)]
struct DecayTerms {
    half_gamma: Vec<f64>,
    jumps: Vec<JumpTerms>,
}

fn decay_terms(basis: &BlockadedBasis, decay: &LindbladModel, with_jumps: bool) -> Result<DecayTerms> {
    let mut half_gamma = vec![0.0; basis.dim()];
    for (i, hg) in half_gamma.iter_mut().enumerate() {
        let ne = basis.level_count(i, Level::E) as f64;
        let nr = (basis.level_count(i, Level::R0) + basis.level_count(i, Level::R1)) as f64;
        *hg = 0.5 * (decay.gamma_e * ne + decay.gamma_r * nr);
    }
    let mut jumps = Vec::new();
    if with_jumps {
        for atom in 0..basis.n_atoms() {
            for (level, rate) in [
                (Level::E, decay.gamma_e),
                (Level::R0, decay.gamma_r),
                (Level::R1, decay.gamma_r),
            ] {
                if rate == 0.0 {
                    continue;
                }
                let mut moves = Vec::new();
                for i in 0..basis.dim() {
                    if basis.config(i)[atom] == level {
                        let dst = basis.moved(i, atom, Level::Sink).ok_or_else(|| {
                            Error::invalid(
                                "master-equation decay requires a basis built with the sink level",
                            )
                        })?;
                        moves.push((i as u32, dst as u32));
                    }
                }
                if !moves.is_empty() {
                    jumps.push(JumpTerms { rate, moves });
                }
            }
        }
    }
    Ok(DecayTerms { half_gamma, jumps })
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    pub tol: f64,
    pub n_samples: usize,
    pub max_steps: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            tol: 1e-10,
            n_samples: 401,
            max_steps: 20_000_000,
        }
    }
}

impl EvolveOptions {
    pub fn with_tol(tol: f64) -> Self {
        EvolveOptions {
            tol,
            ..Default::default()
        }
    }

    pub fn samples(mut self, n: usize) -> Self {
        self.n_samples = n;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(1e-14..=1e-8).contains(&self.tol) {
            return Err(Error::invalid(format!(
                "integrator tolerance {:e} outside [1e-14, 1e-8]",
                self.tol
            )));
        }
        if self.n_samples < 2 {
            return Err(Error::invalid("need at least two samples"));
        }
        Ok(())
    }

    fn integrator(&self) -> IntegratorOptions {
        IntegratorOptions {
            max_steps: self.max_steps,
            ..IntegratorOptions::with_tol(self.tol)
        }
    }
}

#[derive(Clone, Debug)]
pub enum Samples {
    Pure(Vec<StateVector>),
    Density(Vec<DensityMatrix>),
}

impl Samples {
    pub fn len(&self) -> usize {
        match self {
            Samples::Pure(v) => v.len(),
            Samples::Density(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sampled evolution: states plus the derived series used throughout the
/// experiments (single-excitation probability, ground amplitude, norm²/trace).
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Samples,
    pub p1: Vec<f64>,
    pub ground_amp: Vec<C64>,
    pub weight: Vec<f64>,
    pub stats: StepStats,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_pure(&self) -> Result<&StateVector> {
        match &self.states {
            Samples::Pure(v) => v
                .last()
                .ok_or_else(|| Error::invalid("empty trajectory")),
            Samples::Density(_) => Err(Error::invalid(
                "trajectory holds density matrices, not state vectors",
            )),
        }
    }

    pub fn final_density(&self) -> Result<DensityMatrix> {
        match &self.states {
            Samples::Pure(v) => {
                let last = v.last().ok_or_else(|| Error::invalid("empty trajectory"))?;
                Ok(last.outer())
            }
            Samples::Density(v) => v
                .last()
                .cloned()
                .ok_or_else(|| Error::invalid("empty trajectory")),
        }
    }
}

enum Dynamics<'a> {
    Unitary,
    Effective(&'a DecayTerms),
    Master(&'a DecayTerms),
}

impl Dynamics<'_> {
    fn is_master(&self) -> bool {
        matches!(self, Dynamics::Master(_))
    }

    fn decays(&self) -> bool {
        match self {
            Dynamics::Unitary => false,
            Dynamics::Effective(d) | Dynamics::Master(d) => {
                d.half_gamma.iter().any(|&g| g > 0.0) || !d.jumps.is_empty()
            }
        }
    }
}

fn neg_i(z: C64) -> C64 {
    C64::new(z.im, -z.re)
}

/// out = -i H(t) y [- (Γ/2) y].
fn vector_rhs(iv: Option<&Interval>, decay: Option<&DecayTerms>, t: f64, y: &[C64], out: &mut [C64]) {
    out.fill(C64::new(0.0, 0.0));
    if let Some(iv) = iv {
        for ct in &iv.couplings {
            let w = ct.factor * ct.envelope.eval(t);
            let wc = w.conj();
            for &(r, c) in &ct.pairs {
                let (r, c) = (r as usize, c as usize);
                out[r] += w * y[c];
                out[c] += wc * y[r];
            }
        }
        if iv.has_diag {
            for (o, (&d, &yi)) in out.iter_mut().zip(iv.diag.iter().zip(y)) {
                *o += d * yi;
            }
        }
    }
    match decay {
        None => {
            for o in out.iter_mut() {
                *o = neg_i(*o);
            }
        }
        Some(dt) => {
            for (o, (&hg, &yi)) in out.iter_mut().zip(dt.half_gamma.iter().zip(y)) {
                *o = neg_i(*o) - hg * yi;
            }
        }
    }
}

/// out = -i[H, ρ] + Σ_k rate_k (L ρ L† - ½{L†L, ρ}) on the flattened
/// column-major density matrix; `com` is scratch for the commutator.
fn master_rhs(
    iv: Option<&Interval>,
    decay: &DecayTerms,
    dim: usize,
    t: f64,
    rho: &[C64],
    out: &mut [C64],
    com: &mut [C64],
) {
    com.fill(C64::new(0.0, 0.0));
    if let Some(iv) = iv {
        for ct in &iv.couplings {
            let w = ct.factor * ct.envelope.eval(t);
            let wc = w.conj();
            for &(r, c) in &ct.pairs {
                let (r, c) = (r as usize, c as usize);
                for n in 0..dim {
                    let off = n * dim;
                    // H ρ rows r and c
                    com[r + off] += w * rho[c + off];
                    com[c + off] += wc * rho[r + off];
                }
                for m in 0..dim {
                    // -ρ H columns c and r
                    com[m + c * dim] -= w * rho[m + r * dim];
                    com[m + r * dim] -= wc * rho[m + c * dim];
                }
            }
        }
        if iv.has_diag {
            for n in 0..dim {
                let dn = iv.diag[n];
                let off = n * dim;
                for m in 0..dim {
                    let dd = iv.diag[m] - dn;
                    if dd != 0.0 {
                        com[m + off] += dd * rho[m + off];
                    }
                }
            }
        }
    }
    let hg = &decay.half_gamma;
    for n in 0..dim {
        let off = n * dim;
        let gn = hg[n];
        for m in 0..dim {
            out[m + off] = neg_i(com[m + off]) - (hg[m] + gn) * rho[m + off];
        }
    }
    for jump in &decay.jumps {
        for &(si, di) in &jump.moves {
            for &(sj, dj) in &jump.moves {
                out[di as usize + dj as usize * dim] +=
                    jump.rate * rho[si as usize + sj as usize * dim];
            }
        }
    }
}

struct Recorder<'a> {
    basis: &'a BlockadedBasis,
    proj: CollectiveProjector,
    dim: usize,
    master: bool,
    times: Vec<f64>,
    pure_states: Vec<StateVector>,
    dm_states: Vec<DensityMatrix>,
    p1: Vec<f64>,
    ground_amp: Vec<C64>,
    weight: Vec<f64>,
}

impl<'a> Recorder<'a> {
    fn new(basis: &'a BlockadedBasis, master: bool, capacity: usize) -> Self {
        Recorder {
            basis,
            proj: CollectiveProjector::new(basis),
            dim: basis.dim(),
            master,
            times: Vec::with_capacity(capacity),
            pure_states: Vec::new(),
            dm_states: Vec::new(),
            p1: Vec::with_capacity(capacity),
            ground_amp: Vec::with_capacity(capacity),
            weight: Vec::with_capacity(capacity),
        }
    }

    fn record(&mut self, t: f64, y: &[C64]) {
        self.times.push(t);
        let g = self.basis.ground_index();
        if self.master {
            let mat = DMatrix::from_column_slice(self.dim, self.dim, y);
            self.p1.push(self.proj.population_dm(&mat));
            self.ground_amp.push(mat[(g, g)]);
            self.weight.push(mat.trace().re);
            self.dm_states.push(DensityMatrix { mat });
        } else {
            self.p1.push(self.proj.population_vec(y));
            self.ground_amp.push(y[g]);
            self.weight.push(y.iter().map(|a| a.norm_sqr()).sum());
            self.pure_states.push(StateVector {
                amps: nalgebra::DVector::from_column_slice(y),
            });
        }
    }

    fn finish(self, stats: StepStats) -> Trajectory {
        Trajectory {
            times: self.times,
            states: if self.master {
                Samples::Density(self.dm_states)
            } else {
                Samples::Pure(self.pure_states)
            },
            p1: self.p1,
            ground_amp: self.ground_amp,
            weight: self.weight,
            stats,
        }
    }
}

fn march(
    basis: &BlockadedBasis,
    model: &HamiltonianModel,
    dynamics: Dynamics<'_>,
    y: &mut Vec<C64>,
    t_span: (f64, f64),
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    opts.validate()?;
    let (t0, t1) = t_span;
    if !(t1 >= t0) {
        return Err(Error::invalid("evolution span must run forward"));
    }
    let n = opts.n_samples;
    let span = t1 - t0;
    let sample_times: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                t1
            } else {
                t0 + span * i as f64 / (n - 1) as f64
            }
        })
        .collect();
    let slack = span.abs().max(t0.abs()).max(1e-300) * 1e-12;

    let mut rec = Recorder::new(basis, dynamics.is_master(), n);
    let mut cursor = 0usize;
    // everything at or before the start is the initial state
    while cursor < n && sample_times[cursor] <= t0 + slack {
        rec.record(sample_times[cursor], y);
        cursor += 1;
    }

    let mut cuts: Vec<f64> = vec![t0];
    for iv in &model.intervals {
        for b in [iv.t_start, iv.t_end] {
            if b > t0 + slack && b < t1 - slack {
                cuts.push(b);
            }
        }
    }
    cuts.push(t1);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= slack);

    let dim = model.dim();
    let mut stats = StepStats::default();
    let mut scratch = if dynamics.is_master() {
        vec![C64::new(0.0, 0.0); y.len()]
    } else {
        Vec::new()
    };

    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b <= a {
            continue;
        }
        let iv = model.interval_at(0.5 * (a + b));
        if iv.is_none() && !dynamics.decays() {
            // free evolution is the identity here
            while cursor < n && sample_times[cursor] <= b + slack {
                rec.record(sample_times[cursor], y);
                cursor += 1;
            }
            continue;
        }
        let mut probe = vec![C64::new(0.0, 0.0); y.len()];
        let mut sampler = |step: &DenseStep| {
            while cursor < n && sample_times[cursor] <= step.t_end() + slack {
                step.eval(sample_times[cursor], &mut probe);
                rec.record(sample_times[cursor], &probe);
                cursor += 1;
            }
        };
        let chunk = match &dynamics {
            Dynamics::Unitary => integrate(
                |t, y, out| vector_rhs(iv, None, t, y, out),
                a,
                b,
                y,
                &opts.integrator(),
                Some(&mut sampler),
            )?,
            Dynamics::Effective(dt) => integrate(
                |t, y, out| vector_rhs(iv, Some(dt), t, y, out),
                a,
                b,
                y,
                &opts.integrator(),
                Some(&mut sampler),
            )?,
            Dynamics::Master(dt) => integrate(
                |t, y, out| master_rhs(iv, dt, dim, t, y, out, &mut scratch),
                a,
                b,
                y,
                &opts.integrator(),
                Some(&mut sampler),
            )?,
        };
        stats.absorb(chunk);
        while cursor < n && sample_times[cursor] <= b + slack {
            rec.record(sample_times[cursor], y);
            cursor += 1;
        }
    }
    while cursor < n {
        rec.record(sample_times[cursor], y);
        cursor += 1;
    }
    Ok(rec.finish(stats))
}

/// Closed-system evolution i dψ/dt = H(t) ψ.
pub fn evolve_schrodinger(
    basis: &BlockadedBasis,
    model: &HamiltonianModel,
    initial: &StateVector,
    t_span: (f64, f64),
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    check_dims(basis, model, initial.dim())?;
    let mut y = initial.amps.as_slice().to_vec();
    march(basis, model, Dynamics::Unitary, &mut y, t_span, opts)
}

/// No-jump evolution dψ/dt = (-i H - Γ/2) ψ. With sink-style decay the
/// surviving amplitudes match the master equation's computational block
/// exactly, at state-vector cost; the lost norm is the decayed population.
pub fn evolve_effective(
    basis: &BlockadedBasis,
    model: &HamiltonianModel,
    decay: &LindbladModel,
    initial: &StateVector,
    t_span: (f64, f64),
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    check_dims(basis, model, initial.dim())?;
    let dt = decay_terms(basis, decay, false)?;
    let mut y = initial.amps.as_slice().to_vec();
    march(basis, model, Dynamics::Effective(&dt), &mut y, t_span, opts)
}

/// Full Lindblad evolution on the density matrix. Positive rates require a
/// basis built with the sink level so the trace is conserved.
pub fn evolve_master(
    basis: &BlockadedBasis,
    model: &HamiltonianModel,
    decay: &LindbladModel,
    initial: &DensityMatrix,
    t_span: (f64, f64),
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    check_dims(basis, model, initial.dim())?;
    if initial.hermiticity_defect() > 1e-6 {
        return Err(Error::invalid("initial density matrix is not Hermitian"));
    }
    if (initial.trace().re - 1.0).abs() > 1e-6 || initial.trace().im.abs() > 1e-9 {
        return Err(Error::invalid("initial density matrix must have unit trace"));
    }
    let dt = decay_terms(basis, decay, !decay.is_off())?;
    let mut y = initial.mat.as_slice().to_vec();
    march(basis, model, Dynamics::Master(&dt), &mut y, t_span, opts)
}

fn check_dims(basis: &BlockadedBasis, model: &HamiltonianModel, got: usize) -> Result<()> {
    if basis.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got: model.dim(),
        });
    }
    if got != basis.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            got,
        });
    }
    Ok(())
}

const PHASE_FLOOR: f64 = 1e-6;

/// Unwrapped phase of the all-ground amplitude relative to its initial
/// value; `None` where the amplitude is too small to carry a phase. Errors
/// if consecutive defined samples jump by π/2 or more (sampling too coarse).
pub fn ground_phase(traj: &Trajectory) -> Result<Vec<Option<f64>>> {
    let first = traj
        .ground_amp
        .first()
        .ok_or_else(|| Error::invalid("empty trajectory"))?;
    if first.norm() < PHASE_FLOOR {
        return Err(Error::invalid(
            "initial ground amplitude too small to define a phase",
        ));
    }
    let mut out = Vec::with_capacity(traj.ground_amp.len());
    let mut prev: Option<(f64, f64)> = None; // (raw arg, unwrapped)
    let mut gap = false;
    for amp in &traj.ground_amp {
        if amp.norm() < PHASE_FLOOR {
            out.push(None);
            gap = true;
            continue;
        }
        let arg = amp.arg();
        let alpha = match prev {
            None => {
                let a0 = 0.0;
                prev = Some((arg, a0));
                a0
            }
            Some((prev_arg, prev_alpha)) => {
                let step = wrap_pi(arg - prev_arg);
                if !gap && step.abs() >= std::f64::consts::FRAC_PI_2 {
                    return Err(Error::invalid(
                        "ground-phase step exceeds π/2 between samples; refine sampling",
                    ));
                }
                let a = prev_alpha + step;
                prev = Some((arg, a));
                a
            }
        };
        gap = false;
        out.push(Some(alpha));
    }
    Ok(out)
}

/// Net ground-state phase between the trajectory endpoints, wrapped to
/// (-π, π]. Insensitive to the amplitude vanishing mid-run.
pub fn net_ground_phase(traj: &Trajectory) -> Result<f64> {
    let first = traj.ground_amp.first();
    let last = traj.ground_amp.last();
    match (first, last) {
        (Some(a), Some(b)) if a.norm() >= PHASE_FLOOR && b.norm() >= PHASE_FLOOR => {
            Ok((b * a.conj()).arg())
        }
        (Some(_), Some(_)) => Err(Error::invalid(
            "ground amplitude too small at an endpoint to define a phase",
        )),
        _ => Err(Error::invalid("empty trajectory")),
    }
}

fn wrap_pi(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut r = x % TAU;
    if r > PI {
        r -= TAU;
    } else if r <= -PI {
        r += TAU;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, build_basis_with_sink};
    use crate::linalg::expm_hermitian;
    use crate::pulse::{Coupling, Segment};
    use crate::states::c64;
    use approx::assert_relative_eq;

    fn constant_segment(
        omega: f64,
        from: Level,
        to: Level,
        duration: f64,
        detunings: Vec<(Level, f64)>,
    ) -> PulseSchedule {
        PulseSchedule::new(vec![Segment {
            t_start: 0.0,
            t_end: duration,
            couplings: vec![Coupling {
                from,
                to,
                ensemble: None,
                envelope: Envelope::Constant { omega },
                phase: 0.0,
            }],
            detunings,
            label: "const".into(),
        }])
        .unwrap()
    }

    #[test]
    fn idle_hamiltonian_is_detuning_diagonal() {
        let basis = build_basis(&[1]).unwrap();
        let delta = 2.0e8;
        let schedule = PulseSchedule::new(vec![Segment {
            t_start: 0.0,
            t_end: 1e-6,
            couplings: vec![],
            detunings: vec![(Level::E, delta)],
            label: "shift".into(),
        }])
        .unwrap();
        let model = HamiltonianModel::new(&basis, &schedule).unwrap();
        let h = model.hamiltonian(0.5e-6);
        let e_idx = basis.index_of(&[Level::E]).unwrap();
        for i in 0..basis.dim() {
            for j in 0..basis.dim() {
                let expect = if i == j && i == e_idx { delta } else { 0.0 };
                assert_relative_eq!(h.mat[(i, j)].re, expect, epsilon = 1e-9);
                assert_relative_eq!(h.mat[(i, j)].im, 0.0, epsilon = 1e-9);
            }
        }
        // outside every segment the generator vanishes
        assert_eq!(model.hamiltonian(5.0e-6).mat.norm(), 0.0);
    }

    #[test]
    fn resonant_coupling_embeds_two_level_block() {
        let basis = build_basis(&[1]).unwrap();
        let omega = 1.0e8;
        let schedule = constant_segment(omega, Level::G0, Level::E, 1e-6, vec![]);
        let model = HamiltonianModel::new(&basis, &schedule).unwrap();
        let h = model.hamiltonian(0.0);
        let g = basis.index_of(&[Level::G0]).unwrap();
        let e = basis.index_of(&[Level::E]).unwrap();
        assert_relative_eq!(h.mat[(e, g)].re, omega / 2.0, max_relative = 1e-12);
        assert_relative_eq!(h.mat[(g, e)].re, omega / 2.0, max_relative = 1e-12);
        assert!(h.hermiticity_defect() < 1e-12);
        let off: f64 = (0..basis.dim())
            .flat_map(|i| (0..basis.dim()).map(move |j| (i, j)))
            .filter(|&(i, j)| !((i == e && j == g) || (i == g && j == e)))
            .map(|(i, j)| h.mat[(i, j)].norm())
            .sum();
        assert_eq!(off, 0.0);
    }

    #[test]
    fn collective_rydberg_element_is_sqrt2_enhanced() {
        let basis = build_basis(&[2]).unwrap();
        let omega = 1.0e8;
        let schedule = constant_segment(omega, Level::G0, Level::R0, 1e-6, vec![]);
        let model = HamiltonianModel::new(&basis, &schedule).unwrap();
        let h = model.hamiltonian(0.0);
        let ground = basis.logical_state(&[0]).unwrap();
        let sym = basis.collective_state(0, Level::R0).unwrap();
        let driven = StateVector {
            amps: &h.mat * &ground.amps,
        };
        let elem = sym.inner(&driven);
        assert_relative_eq!(elem.re, 2.0_f64.sqrt() * omega / 2.0, max_relative = 1e-12);
        assert_relative_eq!(elem.im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn rabi_pi_pulse_inverts_population() {
        let basis = build_basis(&[1]).unwrap();
        let omega = 2.0e7;
        let schedule = constant_segment(omega, Level::G0, Level::E, std::f64::consts::PI / omega, vec![]);
        let model = HamiltonianModel::new(&basis, &schedule).unwrap();
        let psi0 = basis.logical_state(&[0]).unwrap();
        let span = (0.0, std::f64::consts::PI / omega);
        let traj =
            evolve_schrodinger(&basis, &model, &psi0, span, &EvolveOptions::default()).unwrap();
        let e_idx = basis.index_of(&[Level::E]).unwrap();
        let final_state = traj.final_pure().unwrap();
        assert!((final_state.amps[e_idx].norm_sqr() - 1.0).abs() < 1e-9);
        assert!((traj.weight.last().unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn constant_hamiltonian_matches_matrix_exponential() {
        let basis = build_basis(&[1]).unwrap();
        let omega = 5.0e7;
        let delta = 2.0e8;
        let t_end = 0.7e-6;
        let schedule =
            constant_segment(omega, Level::G0, Level::E, t_end, vec![(Level::E, delta)]);
        let model = HamiltonianModel::new(&basis, &schedule).unwrap();
        let psi0 = basis.logical_state(&[0]).unwrap();
        let opts = EvolveOptions::default().samples(5);
        let traj = evolve_schrodinger(&basis, &model, &psi0, (0.0, t_end), &opts).unwrap();
        let h = model.hamiltonian(0.0);
        for (idx, &t) in traj.times.iter().enumerate() {
            let u = expm_hermitian(&h.mat, c64(0.0, -t));
            let expect = &u * &psi0.amps;
            let got = match &traj.states {
                Samples::Pure(v) => &v[idx].amps,
                _ => unreachable!(),
            };
            let err = (got - &expect).norm();
            assert!(err < 1e-8, "t={t:e} err={err:e}");
        }
    }

    #[test]
    fn collective_oscillation_scales_as_sqrt_n() {
        let omega = 1.0e7;
        let mut fitted = Vec::new();
        for n in [1usize, 2, 4] {
            let basis = build_basis(&[n]).unwrap();
            let t_end = 1.2 * std::f64::consts::PI / (omega * (n as f64).sqrt());
            let schedule = constant_segment(omega, Level::G0, Level::R0, t_end, vec![]);
            let model = HamiltonianModel::new(&basis, &schedule).unwrap();
            let psi0 = basis.logical_state(&[0]).unwrap();
            let opts = EvolveOptions::default().samples(1201);
            let traj = evolve_schrodinger(&basis, &model, &psi0, (0.0, t_end), &opts).unwrap();
            // P1(t) = sin²(√N Ω t / 2) peaks first at t = π / (√N Ω)
            let peak = traj
                .p1
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.total_cmp(b.1))
                .unwrap()
                .0;
            let (tm, t0, tp) = (
                traj.times[peak - 1],
                traj.times[peak],
                traj.times[peak + 1],
            );
            let (ym, y0, yp) = (traj.p1[peak - 1], traj.p1[peak], traj.p1[peak + 1]);
            let denom = ym - 2.0 * y0 + yp;
            let t_peak = t0 - 0.5 * (tp - tm) / 2.0 * (yp - ym) / denom;
            fitted.push(std::f64::consts::PI / t_peak);
        }
        for (i, n) in [1.0_f64, 2.0, 4.0].iter().enumerate() {
            let expect = omega * n.sqrt();
            assert!(
                (fitted[i] - expect).abs() / expect < 0.01,
                "N={n}: fitted {:.4e} vs {:.4e}",
                fitted[i],
                expect
            );
        }
    }

    #[test]
    fn excited_state_decays_exponentially() {
        let gamma = 3.0e7;
        let decay = LindbladModel::new(gamma, 0.0).unwrap();
        let t_end = 2.0 / gamma;
        let opts = EvolveOptions::default().samples(21);

        // no-jump vector evolution on the plain basis
        let basis = build_basis(&[1]).unwrap();
        let model = HamiltonianModel::new(&basis, &PulseSchedule::empty()).unwrap();
        let e_idx = basis.index_of(&[Level::E]).unwrap();
        let psi0 = StateVector::basis_state(basis.dim(), e_idx);
        let traj = evolve_effective(&basis, &model, &decay, &psi0, (0.0, t_end), &opts).unwrap();
        for (i, &t) in traj.times.iter().enumerate() {
            let pop = match &traj.states {
                Samples::Pure(v) => v[i].amps[e_idx].norm_sqr(),
                _ => unreachable!(),
            };
            assert!((pop - (-gamma * t).exp()).abs() < 1e-9, "t={t:e}");
        }

        // master equation with the sink keeps the trace while e empties
        let basis = build_basis_with_sink(&[1]).unwrap();
        let model = HamiltonianModel::new(&basis, &PulseSchedule::empty()).unwrap();
        let e_idx = basis.index_of(&[Level::E]).unwrap();
        let rho0 = StateVector::basis_state(basis.dim(), e_idx).outer();
        let traj = evolve_master(&basis, &model, &decay, &rho0, (0.0, t_end), &opts).unwrap();
        for (i, &t) in traj.times.iter().enumerate() {
            let rho = match &traj.states {
                Samples::Density(v) => &v[i],
                _ => unreachable!(),
            };
            assert!((rho.population(e_idx) - (-gamma * t).exp()).abs() < 1e-9);
            assert!((rho.trace().re - 1.0).abs() < 1e-9);
            assert!(rho.hermiticity_defect() < 1e-10);
        }
    }

    #[test]
    fn closed_master_agrees_with_schrodinger() {
        let basis = build_basis(&[2]).unwrap();
        let omega = 4.0e7;
        let t_end = 0.4e-6;
        let schedule =
            constant_segment(omega, Level::G0, Level::R0, t_end, vec![(Level::R0, 1.0e7)]);
        let model = HamiltonianModel::new(&basis, &schedule).unwrap();
        let psi0 = basis.logical_state(&[0]).unwrap();
        let opts = EvolveOptions::default().samples(5);
        let pure = evolve_schrodinger(&basis, &model, &psi0, (0.0, t_end), &opts).unwrap();
        let mixed = evolve_master(
            &basis,
            &model,
            &LindbladModel::off(),
            &psi0.outer(),
            (0.0, t_end),
            &opts,
        )
        .unwrap();
        let rho_pure = pure.final_density().unwrap();
        let rho_mixed = mixed.final_density().unwrap();
        assert!((&rho_pure.mat - &rho_mixed.mat).norm() < 1e-8);
    }

    #[test]
    fn effective_vector_matches_master_block() {
        let decay = LindbladModel::new(2.0e6, 1.0e4).unwrap();
        let omega = 3.0e7;
        let t_end = 0.5e-6;
        let opts = EvolveOptions::default().samples(5);

        let plain = build_basis(&[2]).unwrap();
        let schedule = constant_segment(omega, Level::G0, Level::R0, t_end, vec![]);
        let model = HamiltonianModel::new(&plain, &schedule).unwrap();
        let psi0 = plain.logical_state(&[0]).unwrap();
        let eff = evolve_effective(&plain, &model, &decay, &psi0, (0.0, t_end), &opts).unwrap();

        let sinky = build_basis_with_sink(&[2]).unwrap();
        let model_s = HamiltonianModel::new(&sinky, &schedule).unwrap();
        let psi0_s = sinky.logical_state(&[0]).unwrap();
        let master =
            evolve_master(&sinky, &model_s, &decay, &psi0_s.outer(), (0.0, t_end), &opts).unwrap();

        let psi = eff.final_pure().unwrap();
        let rho = master.final_density().unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..plain.dim() {
            let ci = sinky.index_of(plain.config(i)).unwrap();
            for j in 0..plain.dim() {
                let cj = sinky.index_of(plain.config(j)).unwrap();
                let expect = psi.amps[i] * psi.amps[j].conj();
                worst = worst.max((rho.mat[(ci, cj)] - expect).norm());
            }
        }
        assert!(worst < 1e-8, "block mismatch {worst:e}");
        // trace is conserved by the sink even though the block decays
        assert!((rho.trace().re - 1.0).abs() < 1e-8);
        assert!(eff.weight.last().unwrap() < &1.0);
    }

    #[test]
    fn ground_phase_of_idle_system_is_zero() {
        let basis = build_basis(&[1]).unwrap();
        let model = HamiltonianModel::new(&basis, &PulseSchedule::empty()).unwrap();
        let psi0 = basis.logical_state(&[0]).unwrap();
        let traj = evolve_schrodinger(
            &basis,
            &model,
            &psi0,
            (0.0, 1e-6),
            &EvolveOptions::default().samples(11),
        )
        .unwrap();
        let phases = ground_phase(&traj).unwrap();
        assert!(phases.iter().all(|p| p.unwrap().abs() < 1e-12));
        assert!(net_ground_phase(&traj).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ground_phase_tracks_detuning_and_marks_gaps() {
        let basis = build_basis(&[1]).unwrap();
        let delta = 1.0e6;
        let t_end = 1.0e-6;
        let schedule = PulseSchedule::new(vec![Segment {
            t_start: 0.0,
            t_end,
            couplings: vec![],
            detunings: vec![(Level::G0, delta)],
            label: "shift".into(),
        }])
        .unwrap();
        let model = HamiltonianModel::new(&basis, &schedule).unwrap();
        let psi0 = basis.logical_state(&[0]).unwrap();
        let traj = evolve_schrodinger(
            &basis,
            &model,
            &psi0,
            (0.0, t_end),
            &EvolveOptions::default().samples(101),
        )
        .unwrap();
        let phases = ground_phase(&traj).unwrap();
        // dψ/dt = -i δ ψ gives α(t) = -δ t
        let last = phases.last().unwrap().unwrap();
        assert_relative_eq!(last, -delta * t_end, max_relative = 1e-8);
        assert_relative_eq!(
            net_ground_phase(&traj).unwrap(),
            -delta * t_end,
            max_relative = 1e-8
        );

        // a state with no ground weight has no defined phase
        let e_state = StateVector::basis_state(basis.dim(), basis.index_of(&[Level::E]).unwrap());
        let idle = HamiltonianModel::new(&basis, &PulseSchedule::empty()).unwrap();
        let traj = evolve_schrodinger(
            &basis,
            &idle,
            &e_state,
            (0.0, 1e-6),
            &EvolveOptions::default().samples(5),
        )
        .unwrap();
        assert!(ground_phase(&traj).is_err());
    }

    #[test]
    fn driving_the_sink_is_rejected() {
        let basis = build_basis_with_sink(&[1]).unwrap();
        let schedule = constant_segment(1.0e6, Level::G0, Level::Sink, 1e-6, vec![]);
        assert!(HamiltonianModel::new(&basis, &schedule).is_err());
    }

    #[test]
    fn master_decay_without_sink_is_rejected() {
        let basis = build_basis(&[1]).unwrap();
        let model = HamiltonianModel::new(&basis, &PulseSchedule::empty()).unwrap();
        let rho0 = basis.logical_state(&[0]).unwrap().outer();
        let decay = LindbladModel::new(1.0e6, 0.0).unwrap();
        let err = evolve_master(&basis, &model, &decay, &rho0, (0.0, 1e-6), &EvolveOptions::default());
        assert!(err.is_err());
    }

    #[test]
    fn tolerance_outside_range_is_rejected() {
        let basis = build_basis(&[1]).unwrap();
        let model = HamiltonianModel::new(&basis, &PulseSchedule::empty()).unwrap();
        let psi0 = basis.logical_state(&[0]).unwrap();
        for tol in [1e-7, 1e-15] {
            let opts = EvolveOptions::with_tol(tol);
            assert!(evolve_schrodinger(&basis, &model, &psi0, (0.0, 1e-6), &opts).is_err());
        }
    }
}
