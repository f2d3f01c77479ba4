//! Projection of full blockaded-basis states onto the logical qubit
//! subspace spanned by collective states, and derived observables.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::basis::BlockadedBasis;
use crate::levels::Level;
use crate::states::{DensityMatrix, StateVector};

/// Logical-subspace populations in bit order, plus the population that
/// leaked outside the logical subspace.
#[derive(Clone, Debug)]
pub struct LogicalPopulations {
    pub p: Vec<f64>,
    pub leakage: f64,
}

/// Logical density block rho_L[a,b] = <a|rho|b> over the collective logical
/// basis; trace <= 1, the deficit being leakage.
pub fn logical_density_from_vec(basis: &BlockadedBasis, state: &StateVector) -> DMatrix<C64> {
    let logical = basis.logical_basis();
    let d = logical.len();
    let overlaps: Vec<C64> = logical.iter().map(|phi| phi.inner(state)).collect();
    DMatrix::from_fn(d, d, |a, b| overlaps[a] * overlaps[b].conj())
}

pub fn logical_density_from_dm(basis: &BlockadedBasis, rho: &DensityMatrix) -> DMatrix<C64> {
    let logical = basis.logical_basis();
    let d = logical.len();
    DMatrix::from_fn(d, d, |a, b| {
        (logical[a].amps.adjoint() * &rho.mat * &logical[b].amps)[(0, 0)]
    })
}

pub fn logical_populations_from_vec(
    basis: &BlockadedBasis,
    state: &StateVector,
) -> LogicalPopulations {
    let logical = basis.logical_basis();
    let p: Vec<f64> = logical
        .iter()
        .map(|phi| phi.inner(state).norm_sqr())
        .collect();
    let total = state.norm().powi(2);
    LogicalPopulations {
        leakage: total - p.iter().sum::<f64>(),
        p,
    }
}

pub fn logical_populations_from_dm(
    basis: &BlockadedBasis,
    rho: &DensityMatrix,
) -> LogicalPopulations {
    let rho_l = logical_density_from_dm(basis, rho);
    let p: Vec<f64> = (0..rho_l.nrows()).map(|a| rho_l[(a, a)].re).collect();
    LogicalPopulations {
        leakage: rho.trace().re - p.iter().sum::<f64>(),
        p,
    }
}

/// Population of the symmetric collective single-atom excitation of
/// `level` in ensemble `k` (all other ensembles ground):
/// |<collective | psi>|^2.
pub fn symmetric_excitation_population(
    basis: &BlockadedBasis,
    state: &StateVector,
    k: usize,
    level: Level,
) -> f64 {
    basis
        .collective_state(k, level)
        .map(|phi| phi.inner(state).norm_sqr())
        .unwrap_or(0.0)
}

/// Diagnostic alternative: probability that exactly one atom of ensemble `k`
/// occupies `level` with every other atom of the system in g0, summed over
/// which atom. Coincides with the symmetric definition only when the state
/// has no weight on antisymmetric single-excitation combinations.
pub fn any_single_atom_population(
    basis: &BlockadedBasis,
    state: &StateVector,
    k: usize,
    level: Level,
) -> f64 {
    let mut total = 0.0;
    for a in basis.atoms_of(k) {
        let mut cfg = vec![Level::G0; basis.n_atoms()];
        cfg[a] = level;
        if let Some(idx) = basis.index_of(&cfg) {
            total += state.amps[idx].norm_sqr();
        }
    }
    total
}
