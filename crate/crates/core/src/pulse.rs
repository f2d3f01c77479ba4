//! Pulse envelopes and time-windowed coupling schedules.
//!
//! A schedule is a list of time segments; each segment activates a set of
//! two-level couplings (with real envelope and constant phase) and a set of
//! diagonal level shifts (the rotating-frame detunings of the active lasers).
//! Segments of the shipped sequence builders never overlap, but the
//! Hamiltonian assembly sums every active segment, so explicit simultaneous
//! drive is representable.

use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::levels::Level;
use crate::units::{mhz, ns, us};

/// Parameters of the smooth two-term stimulated-Raman transfer envelope
/// family with super-Gaussian mask F and sigmoid crossfade f:
///
/// ```text
/// pump(t)   = O0 F(t-t1) sin(pi/2 f(t-t1)) + O0 F(t-t2) cos(pi/2 f(t-t2))
/// stokes(t) = O0 F(t-t1) cos(pi/2 f(t-t1)) + O0 F(t-t2) sin(pi/2 f(t-t2))
/// F(t) = exp[-(t/T0)^(2n)],   f(t) = 1 / (1 + exp(-lambda t / T))
/// ```
///
/// with T = T0/2 fixed. The term centered at `t1` performs the excitation
/// sequence, the term at `t2` the de-excitation sequence. The pump leg
/// couples the qubit level to the intermediate state, the Stokes leg the
/// intermediate state to the Rydberg level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StirapParams {
    /// Peak single-atom Rabi frequency (rad/s).
    pub omega0: f64,
    /// Intermediate-level detuning during the excitation sequence (rad/s,
    /// signed); the de-excitation sequence may switch its sign.
    pub delta: f64,
    /// Envelope width T0 (s).
    pub t0: f64,
    /// Super-Gaussian exponent index n (mask power 2n).
    pub n: u32,
    /// Sigmoid steepness lambda.
    pub lambda: f64,
    /// Center of the excitation sequence (s).
    pub t1: f64,
    /// Center of the de-excitation sequence (s).
    pub t2: f64,
}

impl StirapParams {
    /// Microsecond-scale transfer at moderate detuning.
    pub fn long_pulse() -> Self {
        StirapParams {
            omega0: mhz(50.0),
            delta: mhz(200.0),
            t0: us(2.0),
            n: 3,
            lambda: 4.0,
            t1: us(-4.0),
            t2: us(4.0),
        }
    }

    /// Nanosecond-scale transfer at high detuning (reduced decay exposure).
    pub fn short_pulse() -> Self {
        StirapParams {
            omega0: mhz(500.0),
            delta: mhz(2000.0),
            t0: ns(100.0),
            n: 3,
            lambda: 4.0,
            t1: ns(-170.0),
            t2: ns(170.0),
        }
    }

    /// Sigmoid time constant T = T0/2.
    pub fn sigmoid_t(&self) -> f64 {
        self.t0 / 2.0
    }

    /// Super-Gaussian mask F at offset dt from a sequence center.
    pub fn mask(&self, dt: f64) -> f64 {
        (-(dt / self.t0).powi(2 * self.n as i32)).exp()
    }

    /// Sigmoid crossfade f at offset dt.
    pub fn crossfade(&self, dt: f64) -> f64 {
        1.0 / (1.0 + (-self.lambda * dt / self.sigmoid_t()).exp())
    }

    fn term(&self, dt: f64, sin_leg: bool) -> f64 {
        let arg = FRAC_PI_2 * self.crossfade(dt);
        self.omega0 * self.mask(dt) * if sin_leg { arg.sin() } else { arg.cos() }
    }

    pub fn pump(&self, t: f64) -> f64 {
        self.term(t - self.t1, true) + self.term(t - self.t2, false)
    }

    pub fn stokes(&self, t: f64) -> f64 {
        self.term(t - self.t1, false) + self.term(t - self.t2, true)
    }

    /// Half-width of the numerically relevant support around a sequence
    /// center; the mask there is exp(-2^(2n)) (~1e-28 for n=3).
    pub fn support_halfwidth(&self) -> f64 {
        2.0 * self.t0
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.t0 > 0.0 && self.lambda > 0.0) {
            return Err(Error::invalid("pulse scales must be positive"));
        }
        if self.n == 0 {
            return Err(Error::invalid("mask exponent n must be at least 1"));
        }
        if !(self.t2 > self.t1) {
            return Err(Error::invalid("sequence centers must satisfy t2 > t1"));
        }
        Ok(())
    }
}

/// Gaussian-envelope transfer pair (conventional counter-intuitive order:
/// the Stokes pulse at `t2` precedes the pump pulse at `t1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianStirapParams {
    pub omega0: f64,
    pub delta: f64,
    /// Gaussian 1/e^(1/2) width tau (s).
    pub tau: f64,
    /// Pump center (s).
    pub t1: f64,
    /// Stokes center (s).
    pub t2: f64,
}

impl GaussianStirapParams {
    pub fn long_pulse() -> Self {
        GaussianStirapParams {
            omega0: mhz(50.0),
            delta: mhz(200.0),
            tau: us(1.0),
            t1: us(1.0),
            t2: us(-1.0),
        }
    }

    pub fn pump(&self, t: f64) -> f64 {
        self.omega0 * (-((t - self.t1) / self.tau).powi(2) / 2.0).exp()
    }

    pub fn stokes(&self, t: f64) -> f64 {
        self.omega0 * (-((t - self.t2) / self.tau).powi(2) / 2.0).exp()
    }

    /// Half-width at which the Gaussian has fallen to ~1.5e-8.
    pub fn support_halfwidth(&self) -> f64 {
        6.0 * self.tau
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega0 > 0.0 && self.tau > 0.0) {
            return Err(Error::invalid("pulse scales must be positive"));
        }
        Ok(())
    }
}

/// Which transfer leg an envelope drives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StirapLeg {
    Pump,
    Stokes,
}

/// Real, non-negative pulse envelope as plain data (schedules stay `Send +
/// Sync + Clone` and serializable without boxed closures).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Envelope {
    Constant { omega: f64 },
    Smooth { params: StirapParams, leg: StirapLeg },
    Gaussian { params: GaussianStirapParams, leg: StirapLeg },
}

impl Envelope {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Envelope::Constant { omega } => *omega,
            Envelope::Smooth { params, leg } => match leg {
                StirapLeg::Pump => params.pump(t),
                StirapLeg::Stokes => params.stokes(t),
            },
            Envelope::Gaussian { params, leg } => match leg {
                StirapLeg::Pump => params.pump(t),
                StirapLeg::Stokes => params.stokes(t),
            },
        }
    }

    /// Translate the envelope in time by moving its embedded pulse centers.
    pub fn shift_time(&mut self, dt: f64) {
        match self {
            Envelope::Constant { .. } => {}
            Envelope::Smooth { params, .. } => {
                params.t1 += dt;
                params.t2 += dt;
            }
            Envelope::Gaussian { params, .. } => {
                params.t1 += dt;
                params.t2 += dt;
            }
        }
    }
}

/// Convenience evaluation of the two-term envelope pair at time t.
pub fn optimized_stirap_envelopes(params: &StirapParams, t: f64) -> (f64, f64) {
    (params.pump(t), params.stokes(t))
}

/// Convenience evaluation of the Gaussian envelope pair at time t.
pub fn gaussian_stirap_envelopes(params: &GaussianStirapParams, t: f64) -> (f64, f64) {
    (params.pump(t), params.stokes(t))
}

/// One driven two-level transition. `ensemble: None` addresses every atom,
/// `Some(k)` only the atoms of ensemble k.
#[derive(Clone, Debug, PartialEq)]
pub struct Coupling {
    pub from: Level,
    pub to: Level,
    pub ensemble: Option<usize>,
    pub envelope: Envelope,
    /// Constant drive phase; the coupling enters the Hamiltonian as
    /// (envelope/2) e^{i phase} |to><from| + h.c.
    pub phase: f64,
}

/// Time window during which a set of couplings and diagonal level shifts is
/// active.
#[derive(Clone, Debug, PartialEq)]
pub struct Segment {
    pub t_start: f64,
    pub t_end: f64,
    pub couplings: Vec<Coupling>,
    /// Rotating-frame level energies (rad/s) while this segment is active.
    pub detunings: Vec<(Level, f64)>,
    pub label: String,
}

impl Segment {
    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && t <= self.t_end
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// Ordered collection of segments; levels not shifted by any active segment
/// sit at zero energy, so idle gaps propagate trivially.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PulseSchedule {
    pub segments: Vec<Segment>,
}

impl PulseSchedule {
    pub fn new(mut segments: Vec<Segment>) -> Result<Self> {
        for s in &segments {
            if !(s.t_end >= s.t_start) {
                return Err(Error::invalid(format!(
                    "segment '{}' has negative duration",
                    s.label
                )));
            }
            for c in &s.couplings {
                if c.from == c.to {
                    return Err(Error::invalid("coupling must join two distinct levels"));
                }
            }
        }
        segments.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
        Ok(PulseSchedule { segments })
    }

    pub fn empty() -> Self {
        PulseSchedule { segments: vec![] }
    }

    pub fn span(&self) -> Option<(f64, f64)> {
        let start = self
            .segments
            .iter()
            .map(|s| s.t_start)
            .fold(f64::INFINITY, f64::min);
        let end = self
            .segments
            .iter()
            .map(|s| s.t_end)
            .fold(f64::NEG_INFINITY, f64::max);
        (start <= end).then_some((start, end))
    }

    pub fn shift(&mut self, dt: f64) {
        for s in &mut self.segments {
            s.t_start += dt;
            s.t_end += dt;
            for c in &mut s.couplings {
                c.envelope.shift_time(dt);
            }
        }
    }

    /// Append another schedule, shifted so that it starts where this one
    /// ends (plus `gap`). Returns the shift that was applied.
    pub fn append_after(&mut self, mut other: PulseSchedule, gap: f64) -> f64 {
        let t_end = self.span().map(|(_, e)| e).unwrap_or(0.0);
        let other_start = other.span().map(|(s, _)| s).unwrap_or(0.0);
        let shift = t_end + gap - other_start;
        other.shift(shift);
        self.segments.extend(other.segments);
        self.segments.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
        shift
    }

    /// Segment boundaries in ascending order (integration is split here so
    /// detuning steps land exactly on integrator step boundaries).
    pub fn boundaries(&self) -> Vec<f64> {
        let mut ts: Vec<f64> = self
            .segments
            .iter()
            .flat_map(|s| [s.t_start, s.t_end])
            .collect();
        ts.sort_by(f64::total_cmp);
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-18);
        ts
    }
}

/// The two sequence halves of a double transfer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StirapHalf {
    Excitation,
    Deexcitation,
}

/// Segment for one sequence half of the smooth double transfer on the
/// `qubit_level <-> e <-> rydberg_level` ladder. The full two-term envelopes
/// are evaluated; the window restricts to the requested half. `detuning_sign`
/// multiplies the nominal detuning (the sign switch between halves).
#[allow(clippy::too_many_arguments)]
pub fn stirap_segment(
    params: &StirapParams,
    half: StirapHalf,
    window: (f64, f64),
    detuning_sign: f64,
    qubit_level: Level,
    rydberg_level: Level,
    ensemble: Option<usize>,
) -> Result<Segment> {
    params.validate()?;
    if qubit_level == Level::E || rydberg_level == Level::E {
        return Err(Error::invalid("transfer ladder endpoints must differ from e"));
    }
    let label = match half {
        StirapHalf::Excitation => "stirap-up",
        StirapHalf::Deexcitation => "stirap-down",
    };
    Ok(Segment {
        t_start: window.0,
        t_end: window.1,
        couplings: vec![
            Coupling {
                from: qubit_level,
                to: Level::E,
                ensemble,
                envelope: Envelope::Smooth {
                    params: *params,
                    leg: StirapLeg::Pump,
                },
                phase: 0.0,
            },
            Coupling {
                from: Level::E,
                to: rydberg_level,
                ensemble,
                envelope: Envelope::Smooth {
                    params: *params,
                    leg: StirapLeg::Stokes,
                },
                phase: 0.0,
            },
        ],
        detunings: vec![(Level::E, detuning_sign * params.delta)],
        label: label.to_string(),
    })
}

/// Complete double transfer g0 -> r0 -> g0 as two abutting segments split at
/// the midpoint between the sequence centers. With `switch_sign` the
/// de-excitation half runs at inverted detuning.
///
/// Requires t2 - t1 >= 4 T0 so the two sequences do not overlap; gate
/// builders that interleave other pulses assemble their halves from
/// [`stirap_segment`] directly.
pub fn double_stirap_schedule(
    params: &StirapParams,
    switch_sign: bool,
    ensemble: Option<usize>,
) -> Result<PulseSchedule> {
    params.validate()?;
    if params.t2 - params.t1 < 4.0 * params.t0 {
        return Err(Error::invalid(
            "sequence centers closer than 4 T0: excitation and de-excitation overlap",
        ));
    }
    let w = params.support_halfwidth();
    let mid = 0.5 * (params.t1 + params.t2);
    let second_sign = if switch_sign { -1.0 } else { 1.0 };
    PulseSchedule::new(vec![
        stirap_segment(
            params,
            StirapHalf::Excitation,
            (params.t1 - w, mid),
            1.0,
            Level::G0,
            Level::R0,
            ensemble,
        )?,
        stirap_segment(
            params,
            StirapHalf::Deexcitation,
            (mid, params.t2 + w),
            second_sign,
            Level::G0,
            Level::R0,
            ensemble,
        )?,
    ])
}

/// Excitation sequence only (population transfer g0 -> r0), windowed around
/// the first sequence center.
pub fn stirap_excitation_schedule(
    params: &StirapParams,
    ensemble: Option<usize>,
) -> Result<PulseSchedule> {
    let w = params.support_halfwidth();
    PulseSchedule::new(vec![stirap_segment(
        params,
        StirapHalf::Excitation,
        (params.t1 - w, params.t1 + w),
        1.0,
        Level::G0,
        Level::R0,
        ensemble,
    )?])
}

/// Gaussian-envelope excitation sequence (for comparison scans).
pub fn gaussian_stirap_schedule(
    params: &GaussianStirapParams,
    ensemble: Option<usize>,
) -> Result<PulseSchedule> {
    params.validate()?;
    let w = params.support_halfwidth();
    let lo = params.t1.min(params.t2) - w;
    let hi = params.t1.max(params.t2) + w;
    PulseSchedule::new(vec![Segment {
        t_start: lo,
        t_end: hi,
        couplings: vec![
            Coupling {
                from: Level::G0,
                to: Level::E,
                ensemble,
                envelope: Envelope::Gaussian {
                    params: *params,
                    leg: StirapLeg::Pump,
                },
                phase: 0.0,
            },
            Coupling {
                from: Level::E,
                to: Level::R0,
                ensemble,
                envelope: Envelope::Gaussian {
                    params: *params,
                    leg: StirapLeg::Stokes,
                },
                phase: 0.0,
            },
        ],
        detunings: vec![(Level::E, params.delta)],
        label: "stirap-gauss".to_string(),
    }])
}

/// Resonant constant-envelope pulse on `(from, to)` whose two-level action
/// equals the rotation matrix with area `theta` and phase `phi` (`from`
/// playing the role of the lower state). Realized with physical pulse area
/// |theta|; positive theta flips the drive phase by pi.
pub fn rabi_pulse(
    theta: f64,
    phi: f64,
    from: Level,
    to: Level,
    omega: f64,
    t_start: f64,
    ensemble: Option<usize>,
) -> Result<Segment> {
    if !(omega > 0.0) {
        return Err(Error::invalid("rabi pulse needs a positive Rabi frequency"));
    }
    if theta.abs() > 4.0 * std::f64::consts::PI {
        return Err(Error::invalid("pulse areas beyond 4 pi are not supported"));
    }
    let duration = theta.abs() / omega;
    let phase = if theta > 0.0 {
        phi + std::f64::consts::PI
    } else {
        phi
    };
    Ok(Segment {
        t_start,
        t_end: t_start + duration,
        couplings: vec![Coupling {
            from,
            to,
            ensemble,
            envelope: Envelope::Constant { omega },
            phase,
        }],
        detunings: vec![],
        label: format!("rabi({:.3},{:.3})", theta, phi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn shifting_a_schedule_carries_the_envelopes_along() {
        let p = StirapParams::long_pulse();
        let mut sched = stirap_excitation_schedule(&p, None).unwrap();
        // probe inside the crossfade where the envelope varies steeply
        let probe = p.t1 + 0.3e-6;
        let before = sched.segments[0].couplings[0].envelope.eval(probe);
        assert!(before > 0.0);
        sched.shift(3.0e-6);
        let after = sched.segments[0].couplings[0].envelope.eval(probe + 3.0e-6);
        assert_relative_eq!(before, after, max_relative = 1e-12);
        let (start, _) = sched.span().unwrap();
        assert_relative_eq!(start, p.t1 - p.support_halfwidth() + 3.0e-6, epsilon = 1e-15);
    }

    #[test]
    fn pump_at_first_center_is_sin_quarter_pi() {
        let p = StirapParams::long_pulse();
        // mask 1, crossfade 1/2 -> sin(pi/4); second term is dead (~e^-4096)
        assert_relative_eq!(
            p.pump(p.t1) / p.omega0,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            p.stokes(p.t1) / p.omega0,
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn envelopes_vanish_far_from_centers() {
        let p = StirapParams::long_pulse();
        for t in [p.t1 - 3.0 * p.t0, p.t2 + 3.0 * p.t0, p.t1 - 10.0 * p.t0] {
            assert!(p.pump(t) / p.omega0 < 1e-10, "pump({t}) too large");
            assert!(p.stokes(t) / p.omega0 < 1e-10);
        }
    }

    #[test]
    fn leg_swap_symmetry_between_sequences() {
        let p = StirapParams::long_pulse();
        for k in -20..=20 {
            let s = k as f64 * 0.1 * p.t0;
            // translating from the excitation to the de-excitation center swaps
            // the legs, and time reversal about one center does too; rounding of
            // (t1 + s) - t1 vs (t2 + s) - t2 on the steep shoulder costs a few ulp
            assert_relative_eq!(
                p.pump(p.t1 + s),
                p.stokes(p.t2 + s),
                epsilon = 1e-3,
                max_relative = 1e-9
            );
            assert_relative_eq!(
                p.stokes(p.t1 + s),
                p.pump(p.t2 + s),
                epsilon = 1e-3,
                max_relative = 1e-9
            );
            assert_relative_eq!(
                p.pump(p.t1 - s),
                p.stokes(p.t1 + s),
                epsilon = 1e-3,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn crossfade_limits() {
        let p = StirapParams::long_pulse();
        assert_relative_eq!(p.crossfade(0.0), 0.5, epsilon = 1e-15);
        assert!(p.crossfade(-10.0 * p.t0) < 1e-15);
        assert!(p.crossfade(10.0 * p.t0) > 1.0 - 1e-15);
    }

    #[test]
    fn gaussian_envelope_values() {
        let g = GaussianStirapParams::long_pulse();
        assert_relative_eq!(g.pump(g.t1) / g.omega0, 1.0, epsilon = 1e-15);
        // halfway between the centers both envelopes are at exp(-1/2)
        assert_relative_eq!(g.pump(0.0) / g.omega0, (-0.5f64).exp(), epsilon = 1e-15);
        assert_relative_eq!(g.stokes(0.0) / g.omega0, (-0.5f64).exp(), epsilon = 1e-15);
        // counter-intuitive ordering: stokes peaks before pump
        assert!(g.t2 < g.t1);
    }

    #[test]
    fn double_schedule_segments_abut_at_midpoint() {
        let p = StirapParams::long_pulse();
        let sched = double_stirap_schedule(&p, true, None).unwrap();
        assert_eq!(sched.segments.len(), 2);
        let mid = 0.5 * (p.t1 + p.t2);
        assert_relative_eq!(sched.segments[0].t_end, mid, epsilon = 1e-18);
        assert_relative_eq!(sched.segments[1].t_start, mid, epsilon = 1e-18);
        // detuning sign switch
        assert_relative_eq!(sched.segments[0].detunings[0].1, p.delta, epsilon = 1e-6);
        assert_relative_eq!(sched.segments[1].detunings[0].1, -p.delta, epsilon = 1e-6);
        let same = double_stirap_schedule(&p, false, None).unwrap();
        assert_relative_eq!(same.segments[1].detunings[0].1, p.delta, epsilon = 1e-6);
    }

    #[test]
    fn double_schedule_rejects_overlapping_sequences() {
        let mut p = StirapParams::long_pulse();
        p.t1 = us(-3.0);
        p.t2 = us(3.0); // 3 T0 apart
        assert!(double_stirap_schedule(&p, true, None).is_err());
    }

    #[test]
    fn envelope_negligible_at_window_edges() {
        let p = StirapParams::long_pulse();
        let sched = stirap_excitation_schedule(&p, None).unwrap();
        let (a, b) = sched.span().unwrap();
        for t in [a, b] {
            assert!(p.pump(t) / p.omega0 < 1e-12);
            assert!(p.stokes(t) / p.omega0 < 1e-12);
        }
    }

    #[test]
    fn rabi_pulse_area_is_theta() {
        let seg = rabi_pulse(
            std::f64::consts::PI,
            0.0,
            Level::G1,
            Level::R1,
            mhz(50.0),
            0.0,
            None,
        )
        .unwrap();
        // Simpson integral of the (constant) envelope over the window
        let n = 1000;
        let h = seg.duration() / n as f64;
        let env = &seg.couplings[0].envelope;
        let mut area = env.eval(seg.t_start) + env.eval(seg.t_end);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            area += w * env.eval(seg.t_start + k as f64 * h);
        }
        area *= h / 3.0;
        assert_relative_eq!(area, std::f64::consts::PI, epsilon = 1e-9);
        // positive theta carries the pi phase offset
        assert_relative_eq!(seg.couplings[0].phase, std::f64::consts::PI, epsilon = 1e-15);
        let seg = rabi_pulse(
            -std::f64::consts::PI,
            0.3,
            Level::G1,
            Level::R1,
            mhz(50.0),
            0.0,
            None,
        )
        .unwrap();
        assert_relative_eq!(seg.couplings[0].phase, 0.3, epsilon = 1e-15);
    }

    #[test]
    fn schedule_concatenation_shifts() {
        let p = StirapParams::long_pulse();
        let mut a = stirap_excitation_schedule(&p, None).unwrap();
        let b = stirap_excitation_schedule(&p, None).unwrap();
        let (_, end_a) = a.span().unwrap();
        a.append_after(b, us(0.5));
        let (start, end) = a.span().unwrap();
        assert_relative_eq!(start, p.t1 - p.support_halfwidth(), epsilon = 1e-12);
        assert_relative_eq!(
            end,
            end_a + us(0.5) + 2.0 * p.support_halfwidth(),
            epsilon = 1e-9
        );
        assert_eq!(a.boundaries().len(), 4);
    }
}
