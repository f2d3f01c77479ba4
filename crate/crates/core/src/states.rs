use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Pure state expanded over the blockaded basis configurations.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amps: DVector<C64>,
}

impl StateVector {
    pub fn zero(dim: usize) -> Self {
        StateVector {
            amps: DVector::zeros(dim),
        }
    }

    pub fn basis_state(dim: usize, idx: usize) -> Self {
        let mut s = Self::zero(dim);
        s.amps[idx] = C64::new(1.0, 0.0);
        s
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.norm()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps /= C64::new(n, 0.0);
        }
    }

    /// <self|other>
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.dotc(&other.amps)
    }

    /// |self><self|
    pub fn outer(&self) -> DensityMatrix {
        DensityMatrix {
            mat: &self.amps * self.amps.adjoint(),
        }
    }

    /// Superposition sum_i c_i |states_i>, not normalized.
    pub fn superposition(terms: &[(C64, &StateVector)]) -> Result<Self> {
        let dim = terms
            .first()
            .ok_or_else(|| Error::invalid("empty superposition"))?
            .1
            .dim();
        let mut out = Self::zero(dim);
        for (c, s) in terms {
            if s.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.dim(),
                });
            }
            out.amps.axpy(*c, &s.amps, C64::new(1.0, 0.0));
        }
        Ok(out)
    }
}

/// Mixed state over the blockaded basis (or a logical subspace).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub mat: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn from_matrix(mat: DMatrix<C64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch {
                expected: mat.nrows(),
                got: mat.ncols(),
            });
        }
        Ok(DensityMatrix { mat })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn trace(&self) -> C64 {
        self.mat.trace()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).norm()
    }

    /// Population <i|rho|i>.
    pub fn population(&self, idx: usize) -> f64 {
        self.mat[(idx, idx)].re
    }
}

/// Dense operator on the blockaded basis (Hamiltonian snapshot, unitary, ...).
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    pub mat: DMatrix<C64>,
}

impl Operator {
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.mat - self.mat.adjoint()).norm()
    }

    pub fn apply(&self, s: &StateVector) -> StateVector {
        StateVector {
            amps: &self.mat * &s.amps,
        }
    }
}

pub const C1: C64 = C64::new(1.0, 0.0);
pub const CI: C64 = C64::new(0.0, 1.0);
pub const C0: C64 = C64::new(0.0, 0.0);

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Pauli matrix by index: 0 -> identity, 1 -> sigma_x, 2 -> sigma_y, 3 -> sigma_z.
pub fn pauli(i: usize) -> DMatrix<C64> {
    match i {
        0 => DMatrix::from_row_slice(2, 2, &[C1, C0, C0, C1]),
        1 => DMatrix::from_row_slice(2, 2, &[C0, C1, C1, C0]),
        2 => DMatrix::from_row_slice(2, 2, &[C0, -CI, CI, C0]),
        3 => DMatrix::from_row_slice(2, 2, &[C1, C0, C0, -C1]),
        _ => panic!("pauli index {i} out of range"),
    }
}

/// Kronecker product a (x) b.
pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

/// Two-level rotation matrix with area theta and phase phi:
///
/// ```text
/// [ cos(theta/2)            i e^{-i phi} sin(theta/2) ]
/// [ i e^{i phi} sin(theta/2)            cos(theta/2)  ]
/// ```
///
/// Rotations about the Bloch X and Y axes are `rot(-theta, 0)` and
/// `rot(-theta, pi/2)`.
pub fn rot(theta: f64, phi: f64) -> DMatrix<C64> {
    let c = C64::new((theta / 2.0).cos(), 0.0);
    let s = (theta / 2.0).sin();
    let upper = CI * C64::from_polar(s, -phi);
    let lower = CI * C64::from_polar(s, phi);
    DMatrix::from_row_slice(2, 2, &[c, upper, lower, c])
}

pub fn rot_x(theta: f64) -> DMatrix<C64> {
    rot(-theta, 0.0)
}

pub fn rot_y(theta: f64) -> DMatrix<C64> {
    rot(-theta, std::f64::consts::FRAC_PI_2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pauli_traces_and_squares() {
        for i in 0..4 {
            let p = pauli(i);
            let sq = &p * &p;
            assert_relative_eq!((&sq - pauli(0)).norm(), 0.0, epsilon = 1e-15);
            let tr = p.trace();
            if i == 0 {
                assert_relative_eq!(tr.re, 2.0, epsilon = 1e-15);
            } else {
                assert_relative_eq!(tr.norm(), 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn pauli_xy_anticommute() {
        let x = pauli(1);
        let y = pauli(2);
        let anti = &x * &y + &y * &x;
        assert_relative_eq!(anti.norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn kron_z_with_identity() {
        let zi = kron(&pauli(3), &pauli(0));
        let expected = [1.0, 1.0, -1.0, -1.0];
        for (k, e) in expected.iter().enumerate() {
            assert_relative_eq!(zi[(k, k)].re, *e, epsilon = 1e-15);
        }
        assert_relative_eq!(zi.norm(), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn rot_pi_maps_ground_to_i_excited() {
        // area pi, phase 0 acting on (1,0)^T gives (0, i)^T
        let r = rot(std::f64::consts::PI, 0.0);
        assert_relative_eq!(r[(0, 0)].norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!((r[(1, 0)] - CI).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rot_is_unitary() {
        let r = rot(0.7, 1.3);
        let prod = r.adjoint() * &r;
        assert_relative_eq!((prod - pauli(0)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn rot_x_pi_is_minus_i_sigma_x() {
        let r = rot_x(std::f64::consts::PI);
        let expect = pauli(1).map(|z| -CI * z);
        assert_relative_eq!((r - expect).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn rot_y_half_pi_hadamard_like() {
        // R_y(-pi/2) followed by Z equals the Hadamard up to nothing at all
        let h = DMatrix::from_row_slice(
            2,
            2,
            &[C1, C1, C1, -C1],
        ) / C64::new(2f64.sqrt(), 0.0);
        let prod = pauli(3) * rot_y(-std::f64::consts::FRAC_PI_2);
        assert_relative_eq!((prod - h).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn superposition_and_outer() {
        let a = StateVector::basis_state(3, 0);
        let b = StateVector::basis_state(3, 2);
        let s = StateVector::superposition(&[
            (c64(std::f64::consts::FRAC_1_SQRT_2, 0.0), &a),
            (c64(0.0, std::f64::consts::FRAC_1_SQRT_2), &b),
        ])
        .unwrap();
        assert_relative_eq!(s.norm(), 1.0, epsilon = 1e-15);
        let rho = s.outer();
        assert_relative_eq!(rho.trace().re, 1.0, epsilon = 1e-15);
        assert_relative_eq!(rho.population(0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(rho.mat[(0, 2)].im, -0.5, epsilon = 1e-15);
    }
}
