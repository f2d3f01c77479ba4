//! Maximum-likelihood projection of measured density and process matrices
//! onto the physical set. The matrix is parametrized through a
//! lower-triangular factor T (real diagonal first, then row-major re/im
//! pairs below the diagonal) so that T·T† is Hermitian PSD by
//! construction; a quasi-Newton minimizer fits it to the measurement in
//! least squares, with trace-preservation constraints handled by
//! quadratic penalties.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::hermitian_eigen;
use crate::states::c64;
use crate::tomo::{pauli_basis_1q, pauli_basis_2q};

/// Which trace-preservation constraints to enforce on a process matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintMode {
    /// All d² matrix elements of Σ χ_mn E_n E_m − I.
    Full,
    /// Only the d diagonal elements (cheaper; adequate when the input is
    /// near-physical).
    DiagonalOnly,
}

/// What is being reconstructed.
#[derive(Clone, Copy, Debug)]
pub enum MleProblem {
    /// Density matrix: T·T† normalized by its trace, no extra constraints.
    Density,
    /// Process matrix: T·T† as is, trace preservation via penalties.
    Chi(ConstraintMode),
}

#[derive(Clone, Copy, Debug)]
pub struct MleOptions {
    /// Objective evaluations allowed per outer iteration.
    pub max_evals: usize,
    /// Stop when the objective decrease falls below this.
    pub tol: f64,
    /// Penalty outer iterations (process problems only).
    pub outer_iterations: usize,
    /// Starting penalty weight, multiplied by 10 each outer iteration.
    pub initial_penalty: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        MleOptions {
            max_evals: 10_000,
            tol: 1e-12,
            outer_iterations: 5,
            initial_penalty: 1e4,
        }
    }
}

/// Summary of one reconstruction.
#[derive(Clone, Copy, Debug)]
pub struct MleReport {
    /// Squared Frobenius distance to the measured matrix at the solution.
    pub residual: f64,
    /// Largest constraint residual magnitude at the solution.
    pub constraint_violation: f64,
    pub evals: usize,
    pub wall_seconds: f64,
}

fn dim_from_params(len: usize) -> Result<usize> {
    let d = (len as f64).sqrt().round() as usize;
    if d * d != len || d == 0 {
        return Err(Error::invalid(format!(
            "parameter vector length {len} is not a square"
        )));
    }
    Ok(d)
}

/// Lower-triangular factor from the parameter vector.
fn factor(t: &[f64], d: usize) -> DMatrix<C64> {
    let mut m = DMatrix::<C64>::zeros(d, d);
    for i in 0..d {
        m[(i, i)] = c64(t[i], 0.0);
    }
    let mut k = d;
    for i in 1..d {
        for j in 0..i {
            m[(i, j)] = c64(t[k], t[k + 1]);
            k += 2;
        }
    }
    m
}

fn params_from_factor(l: &DMatrix<C64>) -> Vec<f64> {
    let d = l.nrows();
    let mut t = Vec::with_capacity(d * d);
    for i in 0..d {
        t.push(l[(i, i)].re);
    }
    for i in 1..d {
        for j in 0..i {
            t.push(l[(i, j)].re);
            t.push(l[(i, j)].im);
        }
    }
    t
}

/// Gradient layout mirrors the parameter layout: for each T-support entry
/// (a, b) the derivative pair is (Re W_ab, Im W_ab) with W = G·T.
fn gradient_from_w(w: &DMatrix<C64>, d: usize) -> DVector<f64> {
    let mut g = DVector::zeros(d * d);
    for i in 0..d {
        g[i] = 4.0 * w[(i, i)].re;
    }
    let mut k = d;
    for i in 1..d {
        for j in 0..i {
            g[k] = 4.0 * w[(i, j)].re;
            g[k + 1] = 4.0 * w[(i, j)].im;
            k += 2;
        }
    }
    g
}

/// Pauli-product tables for the trace-preservation constraints of one
/// process-matrix dimension.
struct ChiContext {
    /// products[m][n] = E_m · E_n
    products: Vec<Vec<DMatrix<C64>>>,
    d: usize,
}

impl ChiContext {
    fn new(d2: usize) -> Result<Self> {
        let basis = match d2 {
            4 => pauli_basis_1q(),
            16 => pauli_basis_2q(),
            _ => {
                return Err(Error::invalid(
                    "process matrices are 4x4 (one qubit) or 16x16 (two qubits)",
                ))
            }
        };
        let d = basis[0].nrows();
        let products = basis
            .iter()
            .map(|em| basis.iter().map(|en| em * en).collect())
            .collect();
        Ok(ChiContext { products, d })
    }

    /// C = Σ χ_mn E_n E_m − I; vanishes iff the process preserves traces.
    fn constraint_matrix(&self, chi: &DMatrix<C64>) -> DMatrix<C64> {
        let d2 = chi.nrows();
        let mut c = DMatrix::<C64>::identity(self.d, self.d) * c64(-1.0, 0.0);
        for m in 0..d2 {
            for n in 0..d2 {
                let coeff = chi[(m, n)];
                if coeff != c64(0.0, 0.0) {
                    c += &self.products[n][m] * coeff;
                }
            }
        }
        c
    }

    /// Adjoint of the constraint map: M_mn = tr(E_m E_n A).
    fn constraint_adjoint(&self, a: &DMatrix<C64>) -> DMatrix<C64> {
        let d2 = self.products.len();
        DMatrix::from_fn(d2, d2, |m, n| (&self.products[m][n] * a).trace())
    }

    fn mask(&self, c: &DMatrix<C64>, mode: ConstraintMode) -> DMatrix<C64> {
        match mode {
            ConstraintMode::Full => c.clone(),
            ConstraintMode::DiagonalOnly => {
                DMatrix::from_fn(self.d, self.d, |i, j| {
                    if i == j {
                        c[(i, j)]
                    } else {
                        c64(0.0, 0.0)
                    }
                })
            }
        }
    }
}

/// Unpenalized objective Δ = Σ|reconstructed − measured|² and the active
/// constraint residuals (empty for densities; real/imag parts of the
/// masked trace-preservation matrix for process problems).
pub fn objective_and_constraints(
    t: &[f64],
    measured: &DMatrix<C64>,
    problem: MleProblem,
) -> Result<(f64, Vec<f64>)> {
    let d = dim_from_params(t.len())?;
    if measured.nrows() != d || measured.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: measured.nrows(),
        });
    }
    let tm = factor(t, d);
    let s = &tm * tm.adjoint();
    match problem {
        MleProblem::Density => {
            let tr = s.trace().re.max(f64::MIN_POSITIVE);
            let diff = s / c64(tr, 0.0) - measured;
            Ok((diff.norm_squared(), Vec::new()))
        }
        MleProblem::Chi(mode) => {
            let ctx = ChiContext::new(d)?;
            let diff = &s - measured;
            let c = ctx.mask(&ctx.constraint_matrix(&s), mode);
            let mut residuals = Vec::new();
            match mode {
                ConstraintMode::DiagonalOnly => {
                    for i in 0..ctx.d {
                        residuals.push(c[(i, i)].re);
                    }
                }
                ConstraintMode::Full => {
                    for i in 0..ctx.d {
                        for j in 0..ctx.d {
                            residuals.push(c[(i, j)].re);
                            if i != j {
                                residuals.push(c[(i, j)].im);
                            }
                        }
                    }
                }
            }
            Ok((diff.norm_squared(), residuals))
        }
    }
}

/// Penalized objective L = Δ + μ‖C‖² and its analytic gradient at a
/// parameter point, in the same layout the optimizer uses; exposed so the
/// gradient can be checked against finite differences from outside.
pub fn objective_gradient(
    t: &[f64],
    measured: &DMatrix<C64>,
    problem: MleProblem,
    penalty: f64,
) -> Result<(f64, Vec<f64>)> {
    let d = dim_from_params(t.len())?;
    if measured.nrows() != d || measured.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: measured.nrows(),
        });
    }
    let ctx = match problem {
        MleProblem::Chi(_) => Some(ChiContext::new(d)?),
        MleProblem::Density => None,
    };
    let (f, g) = eval(
        &DVector::from_column_slice(t),
        measured,
        problem,
        ctx.as_ref(),
        penalty,
        d,
    );
    Ok((f, g.as_slice().to_vec()))
}

/// Penalized objective and its analytic gradient.
fn eval(
    t: &DVector<f64>,
    measured: &DMatrix<C64>,
    problem: MleProblem,
    ctx: Option<&ChiContext>,
    mu: f64,
    d: usize,
) -> (f64, DVector<f64>) {
    let tm = factor(t.as_slice(), d);
    let s = &tm * tm.adjoint();
    match problem {
        MleProblem::Density => {
            let tr = s.trace().re.max(f64::MIN_POSITIVE);
            let rho = &s / c64(tr, 0.0);
            let diff = &rho - measured;
            let f = diff.norm_squared();
            // dΔ = (2/tr)·⟨diff − tr(diff·ρ)I, dS⟩
            let inner = (&diff * &rho).trace().re;
            let mut g_eff = diff;
            for i in 0..d {
                g_eff[(i, i)] -= c64(inner, 0.0);
            }
            g_eff /= c64(tr, 0.0);
            let w = &g_eff * &tm;
            (f, gradient_from_w(&w, d))
        }
        MleProblem::Chi(mode) => {
            let ctx = ctx.expect("chi problems carry a context");
            let diff = &s - measured;
            let f_fit = diff.norm_squared();
            let c_masked = ctx.mask(&ctx.constraint_matrix(&s), mode);
            let f_pen = c_masked.norm_squared();
            let g_eff = diff + ctx.constraint_adjoint(&c_masked) * c64(mu, 0.0);
            let w = &g_eff * &tm;
            (f_fit + mu * f_pen, gradient_from_w(&w, d))
        }
    }
}

/// BFGS with backtracking line search. Returns (solution, value, evals,
/// converged).
fn minimize(
    mut t: DVector<f64>,
    measured: &DMatrix<C64>,
    problem: MleProblem,
    ctx: Option<&ChiContext>,
    mu: f64,
    d: usize,
    opts: &MleOptions,
) -> (DVector<f64>, f64, usize, bool) {
    let n = t.len();
    let mut h = DMatrix::<f64>::identity(n, n);
    let (mut f, mut g) = eval(&t, measured, problem, ctx, mu, d);
    let mut evals = 1usize;
    let mut converged = false;
    while evals < opts.max_evals {
        if g.amax() < 1e-12 {
            converged = true;
            break;
        }
        let dir = -(&h * &g);
        let slope = dir.dot(&g);
        let dir = if slope < 0.0 {
            dir
        } else {
            // reset a corrupted Hessian approximation
            h = DMatrix::identity(n, n);
            -g.clone()
        };
        let slope = dir.dot(&g);
        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = &t + &dir * alpha;
            let (ft, gt) = eval(&trial, measured, problem, ctx, mu, d);
            evals += 1;
            if ft <= f + 1e-4 * alpha * slope {
                accepted = Some((trial, ft, gt));
                break;
            }
            alpha *= 0.5;
            if evals >= opts.max_evals {
                break;
            }
        }
        let (t_new, f_new, g_new) = match accepted {
            Some(x) => x,
            None => break,
        };
        let decrease = f - f_new;
        let s = &t_new - &t;
        let y = &g_new - &g;
        let sy = s.dot(&y);
        if sy > 1e-14 * s.norm() * y.norm() {
            // standard BFGS inverse-Hessian update
            let rho = 1.0 / sy;
            let hy = &h * &y;
            let yhy = y.dot(&hy);
            h += (&s * s.transpose()) * (rho * rho * yhy + rho)
                - (&hy * s.transpose() + &s * hy.transpose()) * rho;
        }
        t = t_new;
        f = f_new;
        g = g_new;
        if decrease.abs() < opts.tol {
            converged = true;
            break;
        }
    }
    (t, f, evals, converged)
}

fn symmetrized(m: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let drift = (m - m.adjoint()).norm();
    if drift >= 1e-6 {
        return Err(Error::invalid(format!(
            "matrix is not Hermitian (defect {drift:.3e})"
        )));
    }
    Ok((m + m.adjoint()) * c64(0.5, 0.0))
}

/// Eigen-clip the measured matrix to PSD and take its Cholesky factor as
/// the starting point; a small ridge keeps the factorization alive when
/// the clipped matrix is singular.
fn initial_params(sym: &DMatrix<C64>, normalize: bool) -> Vec<f64> {
    let d = sym.nrows();
    let (vals, vecs) = hermitian_eigen(sym);
    let clipped: Vec<f64> = vals.iter().map(|&v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let scale = if normalize && total > 0.0 {
        1.0 / total
    } else {
        1.0
    };
    let mut psd = DMatrix::<C64>::zeros(d, d);
    for (k, &v) in clipped.iter().enumerate() {
        if v > 0.0 {
            let col = vecs.column(k);
            psd += (col * col.adjoint()) * c64(v * scale, 0.0);
        }
    }
    let ridge = (psd.trace().re.max(1.0)) * 1e-12;
    for i in 0..d {
        psd[(i, i)] += c64(ridge, 0.0);
    }
    match psd.clone().cholesky() {
        Some(ch) => params_from_factor(&ch.l()),
        None => {
            // fall back to a scaled identity factor
            let mut t = vec![0.0; d * d];
            for (i, slot) in t.iter_mut().take(d).enumerate() {
                *slot = (psd[(i, i)].re.max(ridge)).sqrt();
            }
            t
        }
    }
}

fn run(
    measured: &DMatrix<C64>,
    problem: MleProblem,
    opts: &MleOptions,
) -> Result<(DMatrix<C64>, MleReport)> {
    let start = Instant::now();
    let sym = symmetrized(measured)?;
    let d = sym.nrows();
    if sym.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: sym.ncols(),
        });
    }
    let (ctx, normalize) = match problem {
        MleProblem::Density => (None, true),
        MleProblem::Chi(_) => (Some(ChiContext::new(d)?), false),
    };
    let mut t = DVector::from_vec(initial_params(&sym, normalize));
    let mut total_evals = 0usize;
    let mut converged = true;
    let outers = match problem {
        MleProblem::Density => 1,
        MleProblem::Chi(_) => opts.outer_iterations.max(1),
    };
    let mut mu = opts.initial_penalty;
    for outer in 0..outers {
        let mu_now = match problem {
            MleProblem::Density => 0.0,
            MleProblem::Chi(_) => mu,
        };
        let (t_new, _f, evals, ok) = minimize(t, &sym, problem, ctx.as_ref(), mu_now, d, opts);
        t = t_new;
        total_evals += evals;
        if outer + 1 == outers {
            converged = ok;
        }
        mu *= 10.0;
    }
    let tm = factor(t.as_slice(), d);
    let mut s = &tm * tm.adjoint();
    if normalize {
        let tr = s.trace().re.max(f64::MIN_POSITIVE);
        s /= c64(tr, 0.0);
    }
    let residual = (&s - &sym).norm_squared();
    let constraint_violation = match (&ctx, problem) {
        (Some(ctx), MleProblem::Chi(mode)) => {
            ctx.mask(&ctx.constraint_matrix(&s), mode).camax()
        }
        _ => 0.0,
    };
    if !converged || !residual.is_finite() {
        return Err(Error::ConvergenceFailure {
            residual,
            evals: total_evals,
        });
    }
    Ok((
        s,
        MleReport {
            residual,
            constraint_violation,
            evals: total_evals,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
    ))
}

/// Closest physical (Hermitian, PSD, unit-trace) density matrix in the
/// least-squares sense.
pub fn mle_density(rho: &DMatrix<C64>) -> Result<(DMatrix<C64>, MleReport)> {
    run(rho, MleProblem::Density, &MleOptions::default())
}

pub fn mle_density_with(
    rho: &DMatrix<C64>,
    opts: &MleOptions,
) -> Result<(DMatrix<C64>, MleReport)> {
    run(rho, MleProblem::Density, opts)
}

/// Closest physical (Hermitian PSD, trace-preserving) process matrix.
pub fn mle_chi(
    chi: &DMatrix<C64>,
    mode: ConstraintMode,
) -> Result<(DMatrix<C64>, MleReport)> {
    run(chi, MleProblem::Chi(mode), &MleOptions::default())
}

pub fn mle_chi_with(
    chi: &DMatrix<C64>,
    mode: ConstraintMode,
    opts: &MleOptions,
) -> Result<(DMatrix<C64>, MleReport)> {
    run(chi, MleProblem::Chi(mode), opts)
}
