//! Adaptive embedded Runge-Kutta integration for complex-valued linear ODEs.
//!
//! Dormand-Prince 5(4) with FSAL and 4th-order dense output, operating on
//! flat `&[Complex64]` buffers so the same driver serves state vectors and
//! flattened density matrices.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

// 5th-order solution weights double as the last tableau row (FSAL).
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [1.0 / 5.0];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
// b - b_hat: weights of the embedded 4th-order error estimate.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
// Dense-output weights for the quartic interpolant.
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

#[derive(Clone, Copy, Debug)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: Option<f64>,
    /// Disables step-size control; every step uses exactly this h (except a
    /// clipped final step).
    pub fixed_h: Option<f64>,
    pub max_steps: usize,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self::with_tol(1e-10)
    }
}

impl IntegratorOptions {
    /// Single-knob tolerance: relative `tol` with an absolute floor 100x
    /// below it.
    pub fn with_tol(tol: f64) -> Self {
        IntegratorOptions {
            rtol: tol,
            atol: tol * 1e-2,
            h_init: None,
            fixed_h: None,
            max_steps: 20_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

impl StepStats {
    pub fn absorb(&mut self, other: StepStats) {
        self.accepted += other.accepted;
        self.rejected += other.rejected;
        self.rhs_evals += other.rhs_evals;
    }
}

/// Interpolant over one accepted step, valid for t in [t0, t0 + h].
pub struct DenseStep<'a> {
    pub t0: f64,
    pub h: f64,
    cont: &'a [Vec<C64>; 5],
}

impl DenseStep<'_> {
    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn eval(&self, t: f64, out: &mut [C64]) {
        let theta = (t - self.t0) / self.h;
        let omt = 1.0 - theta;
        let [c1, c2, c3, c4, c5] = self.cont;
        for i in 0..out.len() {
            out[i] = c1[i] + theta * (c2[i] + omt * (c3[i] + theta * (c4[i] + omt * c5[i])));
        }
    }
}

/// Integrates dy/dt = rhs(t, y) from t0 to t1 (t1 >= t0), advancing `y` in
/// place. After every accepted step the optional sampler receives a dense
/// interpolant covering it.
pub fn integrate<F>(
    mut rhs: F,
    t0: f64,
    t1: f64,
    y: &mut [C64],
    opts: &IntegratorOptions,
    mut sampler: Option<&mut dyn FnMut(&DenseStep)>,
) -> Result<StepStats>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    if !(t1 >= t0) {
        return Err(Error::invalid("integration span must run forward"));
    }
    let n = y.len();
    let mut stats = StepStats::default();
    if t1 == t0 || n == 0 {
        return Ok(stats);
    }

    let zero = vec![C64::new(0.0, 0.0); n];
    let mut k: [Vec<C64>; 7] = std::array::from_fn(|_| zero.clone());
    let mut y_stage = zero.clone();
    let mut y_new = zero.clone();
    let mut cont: [Vec<C64>; 5] = std::array::from_fn(|_| zero.clone());

    rhs(t0, y, &mut k[0]);
    stats.rhs_evals += 1;

    let span = t1 - t0;
    let mut h = match (opts.fixed_h, opts.h_init) {
        (Some(h), _) => h,
        (None, Some(h)) => h,
        (None, None) => {
            stats.rhs_evals += 1;
            initial_step(&mut rhs, t0, y, &k[0], span, opts, &mut y_stage, &mut y_new)
        }
    }
    .min(span);
    if !(h > 0.0) {
        return Err(Error::invalid("step size must be positive"));
    }

    let mut t = t0;
    let mut clamp_growth = false;
    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(Error::IntegrationFailure {
                t,
                reason: format!("step budget of {} exhausted", opts.max_steps),
            });
        }
        let mut last = false;
        if t + h >= t1 {
            h = t1 - t;
            last = true;
        }
        if h <= f64::EPSILON * 4.0 * t.abs().max(t1.abs()).max(1e-300) && !last {
            return Err(Error::IntegrationFailure {
                t,
                reason: "step size underflow".into(),
            });
        }

        for stage in 1..7 {
            let a: &[f64] = match stage {
                1 => &A2,
                2 => &A3,
                3 => &A4,
                4 => &A5,
                5 => &A6,
                _ => &B,
            };
            for i in 0..n {
                let mut acc = C64::new(0.0, 0.0);
                for (j, &aj) in a.iter().enumerate() {
                    if aj != 0.0 {
                        acc += aj * k[j][i];
                    }
                }
                y_stage[i] = y[i] + h * acc;
            }
            if stage == 6 {
                y_new.copy_from_slice(&y_stage);
            }
            rhs(t + C[stage] * h, &y_stage, &mut k[stage]);
            stats.rhs_evals += 1;
        }

        let err = if opts.fixed_h.is_some() {
            0.0
        } else {
            let mut sum = 0.0;
            for i in 0..n {
                let mut e = C64::new(0.0, 0.0);
                for j in 0..7 {
                    if E[j] != 0.0 {
                        e += E[j] * k[j][i];
                    }
                }
                let sc = opts.atol + opts.rtol * y[i].norm().max(y_new[i].norm());
                sum += (h * e.norm() / sc).powi(2);
            }
            (sum / n as f64).sqrt()
        };

        if err <= 1.0 {
            if sampler.is_some() {
                for i in 0..n {
                    let delta = y_new[i] - y[i];
                    let mut dk = C64::new(0.0, 0.0);
                    for j in 0..7 {
                        if D[j] != 0.0 {
                            dk += D[j] * k[j][i];
                        }
                    }
                    cont[0][i] = y[i];
                    cont[1][i] = delta;
                    cont[2][i] = h * k[0][i] - delta;
                    cont[3][i] = delta - h * k[6][i] - cont[2][i];
                    cont[4][i] = h * dk;
                }
            }
            t += h;
            y.copy_from_slice(&y_new);
            k.swap(0, 6); // FSAL: k7 at y_new is next step's k1
            stats.accepted += 1;
            if let Some(sampler) = sampler.as_deref_mut() {
                sampler(&DenseStep {
                    t0: t - h,
                    h,
                    cont: &cont,
                });
            }
            if last {
                return Ok(stats);
            }
            if opts.fixed_h.is_none() {
                let fac_max = if clamp_growth { 1.0 } else { FAC_MAX };
                let fac = (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, fac_max);
                h *= fac;
                clamp_growth = false;
            }
        } else {
            stats.rejected += 1;
            clamp_growth = true;
            h *= (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, 1.0);
        }
    }
}

/// Hairer's starting-step heuristic (two extra RHS evaluations).
#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    rhs: &mut F,
    t0: f64,
    y: &[C64],
    f0: &[C64],
    span: f64,
    opts: &IntegratorOptions,
    y_probe: &mut [C64],
    f_probe: &mut [C64],
) -> f64
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len() as f64;
    let scaled_rms = |v: &[C64], y_ref: &[C64]| {
        let sum: f64 = v
            .iter()
            .zip(y_ref)
            .map(|(vi, yi)| {
                let sc = opts.atol + opts.rtol * yi.norm();
                (vi.norm() / sc).powi(2)
            })
            .sum();
        (sum / n).sqrt()
    };
    let d0 = scaled_rms(y, y);
    let d1 = scaled_rms(f0, y);
    let h0 = if d0 < 1e-10 || d1 < 1e-10 {
        1e-6 * span
    } else {
        0.01 * d0 / d1
    }
    .min(span);

    for i in 0..y.len() {
        y_probe[i] = y[i] + h0 * f0[i];
    }
    rhs(t0 + h0, y_probe, f_probe);
    for i in 0..y.len() {
        y_probe[i] = f_probe[i] - f0[i];
    }
    let d2 = scaled_rms(y_probe, y) / h0;

    let h1 = if d1.max(d2) <= 1e-15 {
        (1e-6_f64 * span).max(h0 * 1e-3)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    h1.min(100.0 * h0).min(span)
}
