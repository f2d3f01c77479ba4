//! State and process tomography by linear inversion. Everything here
//! consumes measurement records (populations for a rotation setting, or
//! reconstructed densities per input state) through closures, so the same
//! code serves exact simulated expectations, shot-sampled counts, and
//! synthetic test data.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::gates::PrepBasis;
use crate::linalg::trace_norm_hermitian;
use crate::states::{c64, kron, pauli};

/// Slack allowed on measured populations before a record is rejected.
const POP_EPS: f64 = 1e-8;

/// Measurement setting: the axis whose expectation the z-basis readout
/// yields after the corresponding analysis rotation (none for Z,
/// R_y(-pi/2) for X, R_x(pi/2) for Y).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasAxis {
    Z,
    X,
    Y,
}

impl MeasAxis {
    pub const ALL: [MeasAxis; 3] = [MeasAxis::Z, MeasAxis::X, MeasAxis::Y];

    /// Rotation angles (theta, phi) realizing the analysis pulse; None for
    /// the bare z measurement.
    pub fn rotation_angles(&self) -> Option<(f64, f64)> {
        use std::f64::consts::FRAC_PI_2;
        match self {
            MeasAxis::Z => None,
            MeasAxis::X => Some((FRAC_PI_2, FRAC_PI_2)),
            MeasAxis::Y => Some((-FRAC_PI_2, 0.0)),
        }
    }

    /// The analysis rotation as a matrix.
    pub fn rotation_matrix(&self) -> DMatrix<C64> {
        match self.rotation_angles() {
            None => DMatrix::identity(2, 2),
            Some((theta, phi)) => crate::states::rot(theta, phi),
        }
    }

    fn for_pauli(index: usize) -> MeasAxis {
        match index {
            0 | 3 => MeasAxis::Z,
            1 => MeasAxis::X,
            2 => MeasAxis::Y,
            _ => unreachable!("pauli index"),
        }
    }
}

fn outcome_sign(pauli_index: usize, bit: usize) -> f64 {
    if pauli_index == 0 || bit == 0 {
        1.0
    } else {
        -1.0
    }
}

fn validate_populations(p: &[f64]) -> Result<()> {
    let mut sum = 0.0;
    for &x in p {
        if !(x >= -POP_EPS && x <= 1.0 + POP_EPS) {
            return Err(Error::InvalidRecord(format!(
                "population {x} outside [0, 1]"
            )));
        }
        sum += x;
    }
    if sum > 1.0 + POP_EPS {
        return Err(Error::InvalidRecord(format!(
            "populations sum to {sum} > 1"
        )));
    }
    Ok(())
}

/// Single-qubit state tomography. The closure returns the qubit populations
/// (P0, P1) measured after the analysis rotation of the given setting; the
/// reconstruction is rho = 1/2 sum_i lambda_i sigma_i with lambda built
/// from three settings.
pub fn state_tomography_1q(
    measure: &mut dyn FnMut(MeasAxis) -> Result<[f64; 2]>,
) -> Result<DMatrix<C64>> {
    let mut records = Vec::with_capacity(3);
    for axis in MeasAxis::ALL {
        let p = measure(axis)?;
        validate_populations(&p)?;
        records.push(p);
    }
    let diff = |p: [f64; 2]| p[0] - p[1];
    let lambda = [
        records[0][0] + records[0][1],
        diff(records[1]),
        diff(records[2]),
        diff(records[0]),
    ];
    let mut rho = DMatrix::<C64>::zeros(2, 2);
    for (i, l) in lambda.iter().enumerate() {
        rho += pauli(i) * c64(0.5 * l, 0.0);
    }
    Ok(rho)
}

/// Two-qubit state tomography from the nine analysis-rotation pairs. The
/// closure returns populations (P00, P01, P10, P11), first qubit's bit
/// first; rho = 1/4 sum_ij lambda_ij sigma_i x sigma_j.
pub fn state_tomography_2q(
    measure: &mut dyn FnMut(MeasAxis, MeasAxis) -> Result<[f64; 4]>,
) -> Result<DMatrix<C64>> {
    let mut records = std::collections::HashMap::new();
    for a in MeasAxis::ALL {
        for b in MeasAxis::ALL {
            let p = measure(a, b)?;
            validate_populations(&p)?;
            records.insert((a, b), p);
        }
    }
    let mut rho = DMatrix::<C64>::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let p = records[&(MeasAxis::for_pauli(i), MeasAxis::for_pauli(j))];
            let lambda: f64 = (0..4)
                .map(|ab| outcome_sign(i, ab >> 1) * outcome_sign(j, ab & 1) * p[ab])
                .sum();
            rho += kron(&pauli(i), &pauli(j)) * c64(0.25 * lambda, 0.0);
        }
    }
    Ok(rho)
}

/// Coefficients over the input states (H, V, D, R) that combine their
/// images into the image of |i><j|.
fn prep_combination(i: usize, j: usize) -> [C64; 4] {
    let one = c64(1.0, 0.0);
    let zero = c64(0.0, 0.0);
    let a = c64(0.5, 0.5);
    match (i, j) {
        (0, 0) => [one, zero, zero, zero],
        (1, 1) => [zero, one, zero, zero],
        (0, 1) => [-a, -a, one, c64(0.0, 1.0)],
        (1, 0) => [-a.conj(), -a.conj(), one, c64(0.0, -1.0)],
        _ => unreachable!("qubit basis index"),
    }
}

/// Operator basis for the process matrix: I, X, Y, Z.
pub fn pauli_basis_1q() -> Vec<DMatrix<C64>> {
    (0..4).map(pauli).collect()
}

/// Two-qubit operator basis sigma_i x sigma_j, row-major in (i, j).
pub fn pauli_basis_2q() -> Vec<DMatrix<C64>> {
    let mut basis = Vec::with_capacity(16);
    for i in 0..4 {
        for j in 0..4 {
            basis.push(kron(&pauli(i), &pauli(j)));
        }
    }
    basis
}

/// chi = (1/d^2) V^dag J V, where J stacks the computational-basis images
/// rho'_ij as d x d blocks and V's columns are the column-vectorized
/// operator basis elements.
fn chi_from_basis_images(
    image: &dyn Fn(usize, usize) -> DMatrix<C64>,
    basis: &[DMatrix<C64>],
    d: usize,
) -> DMatrix<C64> {
    let d2 = d * d;
    let mut j = DMatrix::<C64>::zeros(d2, d2);
    for bi in 0..d {
        for bj in 0..d {
            let block = image(bi, bj);
            for k in 0..d {
                for l in 0..d {
                    j[(d * bi + k, d * bj + l)] = block[(k, l)];
                }
            }
        }
    }
    let mut v = DMatrix::<C64>::zeros(d2, d2);
    for (m, e) in basis.iter().enumerate() {
        for i in 0..d {
            for k in 0..d {
                v[(i * d + k, m)] = e[(k, i)];
            }
        }
    }
    v.adjoint() * j * v / c64(d2 as f64, 0.0)
}

fn check_density_dim(rho: &DMatrix<C64>, d: usize) -> Result<()> {
    if rho.nrows() != d || rho.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: rho.nrows(),
        });
    }
    Ok(())
}

/// Single-qubit process tomography: the closure returns the reconstructed
/// density for each prepared input state after the process; the result is
/// the 4 x 4 process matrix over (I, X, Y, Z).
pub fn process_tomography_1q(
    reconstructed: &mut dyn FnMut(PrepBasis) -> Result<DMatrix<C64>>,
) -> Result<DMatrix<C64>> {
    let mut images = Vec::with_capacity(4);
    for which in PrepBasis::ALL {
        let rho = reconstructed(which)?;
        check_density_dim(&rho, 2)?;
        images.push(rho);
    }
    let image = |i: usize, j: usize| {
        let combo = prep_combination(i, j);
        let mut out = DMatrix::<C64>::zeros(2, 2);
        for (c, rho) in combo.iter().zip(&images) {
            out += rho * *c;
        }
        out
    };
    Ok(chi_from_basis_images(&image, &pauli_basis_1q(), 2))
}

/// Two-qubit process tomography over the sixteen product input states;
/// returns the 16 x 16 process matrix over sigma_i x sigma_j.
pub fn process_tomography_2q(
    reconstructed: &mut dyn FnMut(PrepBasis, PrepBasis) -> Result<DMatrix<C64>>,
) -> Result<DMatrix<C64>> {
    let mut images = Vec::with_capacity(16);
    for first in PrepBasis::ALL {
        for second in PrepBasis::ALL {
            let rho = reconstructed(first, second)?;
            check_density_dim(&rho, 4)?;
            images.push(rho);
        }
    }
    let image = |i: usize, j: usize| {
        let (i1, i2) = (i >> 1, i & 1);
        let (j1, j2) = (j >> 1, j & 1);
        let c1 = prep_combination(i1, j1);
        let c2 = prep_combination(i2, j2);
        let mut out = DMatrix::<C64>::zeros(4, 4);
        for (k, ck) in c1.iter().enumerate() {
            for (l, cl) in c2.iter().enumerate() {
                out += &images[4 * k + l] * (ck * cl);
            }
        }
        out
    };
    Ok(chi_from_basis_images(&image, &pauli_basis_2q(), 4))
}

/// Process matrix of a unitary: chi = c c^dag with c_m = Tr(E_m^dag U)/d.
pub fn ideal_chi(u: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let d = u.nrows();
    let basis = match d {
        2 => pauli_basis_1q(),
        4 => pauli_basis_2q(),
        _ => return Err(Error::invalid("process matrices cover one or two qubits")),
    };
    let defect = (u.adjoint() * u - DMatrix::<C64>::identity(d, d)).norm();
    if defect > 1e-10 {
        return Err(Error::invalid(format!(
            "reference matrix is not unitary (defect {defect:.2e})"
        )));
    }
    let c: Vec<C64> = basis
        .iter()
        .map(|e| (e.adjoint() * u).trace() / c64(d as f64, 0.0))
        .collect();
    let d2 = d * d;
    Ok(DMatrix::from_fn(d2, d2, |m, n| c[m] * c[n].conj()))
}

/// Applies a process matrix to a state: sum_mn chi_mn E_m rho E_n^dag.
pub fn apply_chi(chi: &DMatrix<C64>, rho: &DMatrix<C64>) -> Result<DMatrix<C64>> {
    let d = rho.nrows();
    let basis = match d {
        2 => pauli_basis_1q(),
        4 => pauli_basis_2q(),
        _ => return Err(Error::invalid("process matrices cover one or two qubits")),
    };
    if chi.nrows() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            got: chi.nrows(),
        });
    }
    let mut out = DMatrix::<C64>::zeros(d, d);
    for (m, em) in basis.iter().enumerate() {
        for (n, en) in basis.iter().enumerate() {
            out += em * rho * en.adjoint() * chi[(m, n)];
        }
    }
    Ok(out)
}

/// Fidelity as one minus the trace distance, F = 1 - 1/2 sum |eig(A - B)|;
/// both density and process matrices are compared this way.
pub fn fidelity(a: &DMatrix<C64>, b: &DMatrix<C64>) -> Result<f64> {
    if a.nrows() != b.nrows() || a.ncols() != b.ncols() || a.nrows() != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    let diff = a - b;
    let herm = (&diff + diff.adjoint()) * c64(0.5, 0.0);
    if (&diff - &herm).norm() > 1e-6 {
        return Err(Error::invalid(
            "fidelity is defined for Hermitian matrix pairs",
        ));
    }
    Ok(1.0 - 0.5 * trace_norm_hermitian(&herm))
}

/// Density matrix of a Bell state.
pub fn bell_state_density(which: crate::gates::BellState) -> DMatrix<C64> {
    let v = which.vector();
    &v * v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn dm(v: &DVector<C64>) -> DMatrix<C64> {
        v * v.adjoint()
    }

    fn prep_state(which: PrepBasis) -> DVector<C64> {
        let col = which.ideal().column(0).into_owned();
        col
    }

    // exact populations for a true state under a given analysis setting
    fn populations_1q(rho: &DMatrix<C64>, axis: MeasAxis) -> [f64; 2] {
        let a = axis.rotation_matrix();
        let rotated = &a * rho * a.adjoint();
        [rotated[(0, 0)].re, rotated[(1, 1)].re]
    }

    fn populations_2q(rho: &DMatrix<C64>, a1: MeasAxis, a2: MeasAxis) -> [f64; 4] {
        let a = kron(&a1.rotation_matrix(), &a2.rotation_matrix());
        let rotated = &a * rho * a.adjoint();
        [
            rotated[(0, 0)].re,
            rotated[(1, 1)].re,
            rotated[(2, 2)].re,
            rotated[(3, 3)].re,
        ]
    }

    fn random_density(rng: &mut StdRng, d: usize) -> DMatrix<C64> {
        let g = DMatrix::from_fn(d, d, |_, _| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let rho = &g * g.adjoint();
        let tr = rho.trace().re;
        rho / c64(tr, 0.0)
    }

    fn random_unitary(rng: &mut StdRng, d: usize) -> DMatrix<C64> {
        let g = DMatrix::from_fn(d, d, |_, _| c64(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5));
        let qr = g.qr();
        qr.q()
    }

    #[test]
    fn ground_state_reconstructs_exactly() {
        let rho_true = DMatrix::from_diagonal(&DVector::from_vec(vec![
            c64(1.0, 0.0),
            c64(0.0, 0.0),
        ]));
        let rho = state_tomography_1q(&mut |axis| Ok(populations_1q(&rho_true, axis))).unwrap();
        assert!((rho - rho_true).norm() < 1e-12);
    }

    #[test]
    fn diagonal_input_state_has_unit_x_component() {
        let d = prep_state(PrepBasis::D);
        let rho_true = dm(&d);
        // lambda = (1, 1, 0, 0): full sigma_x expectation
        assert!((populations_1q(&rho_true, MeasAxis::X)[0] - 1.0).abs() < 1e-12);
        assert!((populations_1q(&rho_true, MeasAxis::Y)[0] - 0.5).abs() < 1e-12);
        let rho = state_tomography_1q(&mut |axis| Ok(populations_1q(&rho_true, axis))).unwrap();
        assert!((rho - rho_true).norm() < 1e-12);
    }

    #[test]
    fn linear_inversion_is_exact_on_random_states() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..5 {
            let rho_true = random_density(&mut rng, 2);
            let rho =
                state_tomography_1q(&mut |axis| Ok(populations_1q(&rho_true, axis))).unwrap();
            assert!((rho - &rho_true).norm() < 1e-12);

            let rho4_true = random_density(&mut rng, 4);
            let rho4 =
                state_tomography_2q(&mut |a, b| Ok(populations_2q(&rho4_true, a, b))).unwrap();
            assert!((rho4 - &rho4_true).norm() < 1e-12);
        }
    }

    #[test]
    fn bell_state_reconstruction_and_correlations() {
        use crate::gates::BellState;
        let v = BellState::PsiPlus.vector();
        let rho_true = &v * v.adjoint();
        // parallel-axis correlations: <XX> = <YY> = 1, <ZZ> = -1
        let p = populations_2q(&rho_true, MeasAxis::X, MeasAxis::X);
        assert!((p[0] + p[3] - p[1] - p[2] - 1.0).abs() < 1e-12);
        let p = populations_2q(&rho_true, MeasAxis::Y, MeasAxis::Y);
        assert!((p[0] + p[3] - p[1] - p[2] - 1.0).abs() < 1e-12);
        let p = populations_2q(&rho_true, MeasAxis::Z, MeasAxis::Z);
        assert!((p[0] + p[3] - p[1] - p[2] + 1.0).abs() < 1e-12);
        let rho = state_tomography_2q(&mut |a, b| Ok(populations_2q(&rho_true, a, b))).unwrap();
        assert!((rho - &rho_true).norm() < 1e-12);
    }

    #[test]
    fn product_state_reconstruction_is_kron_of_parts() {
        let d = dm(&prep_state(PrepBasis::D));
        let r = dm(&prep_state(PrepBasis::R));
        let rho_true = kron(&d, &r);
        let rho = state_tomography_2q(&mut |a, b| Ok(populations_2q(&rho_true, a, b))).unwrap();
        assert!((rho - &rho_true).norm() < 1e-12);
    }

    #[test]
    fn out_of_range_populations_are_rejected() {
        let err = state_tomography_1q(&mut |_| Ok([1.2, -0.2])).unwrap_err();
        assert!(matches!(err, Error::InvalidRecord(_)));
        let err = state_tomography_1q(&mut |_| Ok([0.8, 0.7])).unwrap_err();
        assert!(matches!(err, Error::InvalidRecord(_)));
    }

    fn chi_of_unitary_via_records(u: &DMatrix<C64>) -> DMatrix<C64> {
        process_tomography_1q(&mut |which| {
            let psi = u * prep_state(which);
            Ok(dm(&psi))
        })
        .unwrap()
    }

    #[test]
    fn identity_process_is_pure_first_element() {
        let chi = chi_of_unitary_via_records(&DMatrix::identity(2, 2));
        let mut expected = DMatrix::<C64>::zeros(4, 4);
        expected[(0, 0)] = c64(1.0, 0.0);
        assert!((chi - expected).norm() < 1e-12);
    }

    #[test]
    fn bit_flip_process_is_pure_xx_element() {
        let chi = chi_of_unitary_via_records(&pauli(1));
        let mut expected = DMatrix::<C64>::zeros(4, 4);
        expected[(1, 1)] = c64(1.0, 0.0);
        assert!((chi - expected).norm() < 1e-12);
    }

    #[test]
    fn hadamard_process_weights_split_between_x_and_z() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[c64(s, 0.), c64(s, 0.), c64(s, 0.), c64(-s, 0.)],
        );
        let chi = chi_of_unitary_via_records(&h);
        let expected = ideal_chi(&h).unwrap();
        assert!((&chi - &expected).norm() < 1e-12);
        for (m, n) in [(1, 1), (1, 3), (3, 1), (3, 3)] {
            assert!((chi[(m, n)] - c64(0.5, 0.0)).norm() < 1e-12);
        }
        assert!(chi[(0, 0)].norm() < 1e-12);
    }

    // the closed-form sandwich for one qubit: chi = L B L with
    // L = 1/2 [[I, X], [X, -I]] and B the block matrix of basis images.
    // Its native operator basis is (I, X, -iY, Z); a diagonal phase
    // conversion brings it onto our (I, X, Y, Z) ordering.
    #[test]
    fn sandwich_formula_agrees_with_vectorized_inversion() {
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..5 {
            let u = random_unitary(&mut rng, 2);
            let image = |i: usize, j: usize| {
                let mut e = DMatrix::<C64>::zeros(2, 2);
                e[(i, j)] = c64(1.0, 0.0);
                &u * e * u.adjoint()
            };
            let mut b = DMatrix::<C64>::zeros(4, 4);
            for i in 0..2 {
                for j in 0..2 {
                    let blk = image(i, j);
                    for k in 0..2 {
                        for l in 0..2 {
                            b[(2 * i + k, 2 * j + l)] = blk[(k, l)];
                        }
                    }
                }
            }
            let x = pauli(1);
            let eye = DMatrix::<C64>::identity(2, 2);
            let mut lambda = DMatrix::<C64>::zeros(4, 4);
            for k in 0..2 {
                for l in 0..2 {
                    lambda[(k, l)] = eye[(k, l)] * c64(0.5, 0.0);
                    lambda[(k, 2 + l)] = x[(k, l)] * c64(0.5, 0.0);
                    lambda[(2 + k, l)] = x[(k, l)] * c64(0.5, 0.0);
                    lambda[(2 + k, 2 + l)] = -eye[(k, l)] * c64(0.5, 0.0);
                }
            }
            let sandwich = &lambda * &b * &lambda;
            let phase = DMatrix::from_diagonal(&DVector::from_vec(vec![
                c64(1.0, 0.0),
                c64(1.0, 0.0),
                c64(0.0, -1.0),
                c64(1.0, 0.0),
            ]));
            let converted = &phase * sandwich * phase.adjoint();
            let chi = chi_from_basis_images(&image, &pauli_basis_1q(), 2);
            assert!((converted - chi).norm() < 1e-12);
        }
    }

    #[test]
    fn reconstructed_process_reproduces_the_channel() {
        let mut rng = StdRng::seed_from_u64(23);
        for &d in &[2usize, 4] {
            let u = random_unitary(&mut rng, d);
            let chi = if d == 2 {
                process_tomography_1q(&mut |which| {
                    let psi = &u * prep_state(which);
                    Ok(dm(&psi))
                })
                .unwrap()
            } else {
                process_tomography_2q(&mut |first, second| {
                    let psi = prep_state(first).kronecker(&prep_state(second));
                    let psi = &u * psi;
                    Ok(dm(&psi))
                })
                .unwrap()
            };
            assert!((&chi - ideal_chi(&u).unwrap()).norm() < 1e-10);
            let rho = random_density(&mut rng, d);
            let mapped = apply_chi(&chi, &rho).unwrap();
            let direct = &u * rho * u.adjoint();
            assert!((mapped - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn blockade_gate_process_matrix_outer_product() {
        use crate::gates::cnot_type_ideal;
        let chi = ideal_chi(&cnot_type_ideal()).unwrap();
        // U = (I x I + I x X - Z x I + Z x X) / 2
        let mut v = DVector::<C64>::zeros(16);
        v[0] = c64(0.5, 0.0); // I x I
        v[1] = c64(0.5, 0.0); // I x X
        v[12] = c64(-0.5, 0.0); // Z x I
        v[13] = c64(0.5, 0.0); // Z x X
        let expected = &v * v.adjoint();
        assert!((chi - expected).norm() < 1e-12);
    }

    #[test]
    fn fidelity_properties() {
        let h = dm(&prep_state(PrepBasis::H));
        let v = dm(&prep_state(PrepBasis::V));
        assert!((fidelity(&h, &h).unwrap() - 1.0).abs() < 1e-12);
        assert!(fidelity(&h, &v).unwrap().abs() < 1e-12);
        let d = dm(&prep_state(PrepBasis::D));
        let f1 = fidelity(&h, &d).unwrap();
        let f2 = fidelity(&d, &h).unwrap();
        assert!((f1 - f2).abs() < 1e-12);
        assert!(f1 > 0.0 && f1 < 1.0);
    }

    #[test]
    fn bell_densities_are_orthonormal_projectors() {
        use crate::gates::BellState;
        let phi_plus = bell_state_density(BellState::PhiPlus);
        for (r, c) in [(0, 0), (0, 3), (3, 0), (3, 3)] {
            assert!((phi_plus[(r, c)] - c64(0.5, 0.0)).norm() < 1e-12);
        }
        let psi_minus = bell_state_density(BellState::PsiMinus);
        assert!((psi_minus[(1, 2)] - c64(-0.5, 0.0)).norm() < 1e-12);
        assert!((psi_minus[(2, 1)] - c64(-0.5, 0.0)).norm() < 1e-12);
        for a in BellState::ALL {
            for b in BellState::ALL {
                let overlap = (bell_state_density(a) * bell_state_density(b)).trace();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((overlap - c64(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn two_qubit_ground_state_reconstructs_to_corner() {
        let mut rho_true = DMatrix::<C64>::zeros(4, 4);
        rho_true[(0, 0)] = c64(1.0, 0.0);
        let rho = state_tomography_2q(&mut |a, b| Ok(populations_2q(&rho_true, a, b))).unwrap();
        assert!((rho - &rho_true).norm() < 1e-12);
    }

    #[test]
    fn non_unitary_reference_is_rejected() {
        let mut m = DMatrix::<C64>::identity(2, 2);
        m[(0, 0)] = c64(0.5, 0.0);
        assert!(ideal_chi(&m).is_err());
    }
}
