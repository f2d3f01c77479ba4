use std::collections::HashMap;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::levels::{Level, LevelScheme};
use crate::states::StateVector;

/// Guard against accidentally huge bases; the intended regime is one or two
/// ensembles of a few atoms each.
pub const MAX_TOTAL_ATOMS: usize = 6;
pub const MAX_ENSEMBLES: usize = 2;

/// How far the product basis is truncated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// Perfect Rydberg blockade only: at most one atom of the whole system
    /// (all ensembles) occupies a Rydberg level; any number of atoms may sit
    /// in the intermediate level.
    Blockade,
    /// Superatom reduction: at most one atom of the whole system sits outside
    /// the long-lived manifold (qubit pair and sink), i.e. in the intermediate
    /// or a Rydberg level. This removes configurations where a second atom is
    /// re-excited through the lossy intermediate level while the shared
    /// excitation is parked in Rydberg, which makes decay errors independent
    /// of the ensemble size. Implies the blockade rule.
    SharedExcitation,
}

impl Truncation {
    fn keeps(self, config: &[Level]) -> bool {
        match self {
            Truncation::Blockade => config.iter().filter(|l| l.is_rydberg()).count() <= 1,
            Truncation::SharedExcitation => {
                config
                    .iter()
                    .filter(|l| l.is_rydberg() || **l == Level::E)
                    .count()
                    <= 1
            }
        }
    }
}

/// Many-atom basis truncated by perfect Rydberg blockade: at most one atom of
/// the *whole system* (all ensembles) occupies a Rydberg level.
///
/// Configurations are ordered lexicographically by per-atom level rank, so
/// the all-ground configuration comes first. This ordering is part of the
/// on-disk format of exported states.
#[derive(Clone, Debug)]
pub struct BlockadedBasis {
    scheme: LevelScheme,
    ensemble_sizes: Vec<usize>,
    atom_ensemble: Vec<usize>,
    configs: Vec<Vec<Level>>,
    index: HashMap<Vec<Level>, usize>,
}

/// Blockaded basis over the standard five-level scheme.
pub fn build_basis(ensemble_sizes: &[usize]) -> Result<BlockadedBasis> {
    BlockadedBasis::build(LevelScheme::standard(), ensemble_sizes)
}

/// Blockaded basis over the six-level scheme (five physical levels plus the
/// decay sink) used for open-system runs.
pub fn build_basis_with_sink(ensemble_sizes: &[usize]) -> Result<BlockadedBasis> {
    BlockadedBasis::build(LevelScheme::with_sink(), ensemble_sizes)
}

/// Shared-excitation (superatom) basis over the standard five-level scheme.
pub fn build_shared_basis(ensemble_sizes: &[usize]) -> Result<BlockadedBasis> {
    BlockadedBasis::build_truncated(
        LevelScheme::standard(),
        ensemble_sizes,
        Truncation::SharedExcitation,
    )
}

/// Shared-excitation (superatom) basis with the decay sink, for open-system
/// runs whose error is expected to stay independent of the ensemble size.
pub fn build_shared_basis_with_sink(ensemble_sizes: &[usize]) -> Result<BlockadedBasis> {
    BlockadedBasis::build_truncated(
        LevelScheme::with_sink(),
        ensemble_sizes,
        Truncation::SharedExcitation,
    )
}

impl BlockadedBasis {
    pub fn build(scheme: LevelScheme, ensemble_sizes: &[usize]) -> Result<Self> {
        Self::build_truncated(scheme, ensemble_sizes, Truncation::Blockade)
    }

    pub fn build_truncated(
        scheme: LevelScheme,
        ensemble_sizes: &[usize],
        truncation: Truncation,
    ) -> Result<Self> {
        if ensemble_sizes.is_empty() || ensemble_sizes.len() > MAX_ENSEMBLES {
            return Err(Error::invalid(format!(
                "ensemble count must be 1..={MAX_ENSEMBLES}, got {}",
                ensemble_sizes.len()
            )));
        }
        if ensemble_sizes.iter().any(|&n| n == 0) {
            return Err(Error::invalid("ensemble sizes must be positive"));
        }
        let n_atoms: usize = ensemble_sizes.iter().sum();
        if n_atoms > MAX_TOTAL_ATOMS {
            return Err(Error::invalid(format!(
                "total atom count {n_atoms} exceeds the supported maximum {MAX_TOTAL_ATOMS}"
            )));
        }

        let mut atom_ensemble = Vec::with_capacity(n_atoms);
        for (k, &n) in ensemble_sizes.iter().enumerate() {
            atom_ensemble.extend(std::iter::repeat(k).take(n));
        }

        // odometer enumeration in lexicographic order, keeping configs the
        // truncation rule allows
        let levels = scheme.levels().to_vec();
        let mut configs = Vec::new();
        let mut digits = vec![0usize; n_atoms];
        loop {
            let config: Vec<Level> = digits.iter().map(|&d| levels[d]).collect();
            if truncation.keeps(&config) {
                configs.push(config);
            }
            let mut pos = n_atoms;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                digits[pos] += 1;
                if digits[pos] < levels.len() {
                    break;
                }
                digits[pos] = 0;
            }
            if digits.iter().all(|&d| d == 0) {
                break;
            }
        }

        let index = configs
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i))
            .collect();

        Ok(BlockadedBasis {
            scheme,
            ensemble_sizes: ensemble_sizes.to_vec(),
            atom_ensemble,
            configs,
            index,
        })
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn scheme(&self) -> &LevelScheme {
        &self.scheme
    }

    pub fn n_atoms(&self) -> usize {
        self.atom_ensemble.len()
    }

    pub fn n_ensembles(&self) -> usize {
        self.ensemble_sizes.len()
    }

    pub fn ensemble_sizes(&self) -> &[usize] {
        &self.ensemble_sizes
    }

    /// Ensemble that atom `atom` belongs to.
    pub fn ensemble_of(&self, atom: usize) -> usize {
        self.atom_ensemble[atom]
    }

    /// Atom index range of ensemble `k`.
    pub fn atoms_of(&self, k: usize) -> std::ops::Range<usize> {
        let start: usize = self.ensemble_sizes[..k].iter().sum();
        start..start + self.ensemble_sizes[k]
    }

    pub fn configs(&self) -> &[Vec<Level>] {
        &self.configs
    }

    pub fn config(&self, i: usize) -> &[Level] {
        &self.configs[i]
    }

    pub fn index_of(&self, config: &[Level]) -> Option<usize> {
        self.index.get(config).copied()
    }

    /// Index of the configuration obtained from configuration `i` by moving
    /// atom `atom` to `to`. `None` when the move leaves the truncated basis,
    /// e.g. a second Rydberg excitation.
    pub fn moved(&self, i: usize, atom: usize, to: Level) -> Option<usize> {
        let mut c = self.configs[i].clone();
        if c[atom] == to {
            return Some(i);
        }
        c[atom] = to;
        self.index.get(&c).copied()
    }

    /// All-ground configuration index (always 0 by the lexicographic order).
    pub fn ground_index(&self) -> usize {
        0
    }

    /// Number of atoms of configuration `i` occupying `level`.
    pub fn level_count(&self, i: usize, level: Level) -> usize {
        self.configs[i].iter().filter(|&&l| l == level).count()
    }

    /// Product state with each ensemble in a symmetric collective state:
    /// `G0` means the all-ground factor, any other level the normalized
    /// symmetric single-atom excitation of that level.
    pub fn product_collective_state(&self, per_ensemble: &[Level]) -> Result<StateVector> {
        if per_ensemble.len() != self.n_ensembles() {
            return Err(Error::DimensionMismatch {
                expected: self.n_ensembles(),
                got: per_ensemble.len(),
            });
        }
        for &l in per_ensemble {
            self.scheme.check_contains(l)?;
            if l == Level::E {
                return Err(Error::invalid(
                    "collective states over the intermediate level are not supported",
                ));
            }
        }
        if per_ensemble.iter().filter(|l| l.is_rydberg()).count() > 1 {
            return Err(Error::invalid(
                "blockade forbids more than one collective Rydberg excitation",
            ));
        }

        // branch over the excited-atom choice in each non-ground ensemble
        let mut terms: Vec<(f64, Vec<Level>)> = vec![(1.0, vec![Level::G0; self.n_atoms()])];
        for (k, &l) in per_ensemble.iter().enumerate() {
            if l == Level::G0 {
                continue;
            }
            let atoms = self.atoms_of(k);
            let w = 1.0 / (self.ensemble_sizes[k] as f64).sqrt();
            let mut next = Vec::with_capacity(terms.len() * atoms.len());
            for (amp, cfg) in &terms {
                for a in atoms.clone() {
                    let mut c = cfg.clone();
                    c[a] = l;
                    next.push((amp * w, c));
                }
            }
            terms = next;
        }

        let mut out = StateVector::zero(self.dim());
        for (amp, cfg) in terms {
            let idx = self
                .index_of(&cfg)
                .expect("collective-state configuration missing from basis");
            out.amps[idx] = C64::new(amp, 0.0);
        }
        Ok(out)
    }

    /// Symmetric collective excitation of ensemble `k` to `level`, all other
    /// ensembles in the all-ground state.
    pub fn collective_state(&self, k: usize, level: Level) -> Result<StateVector> {
        let mut per = vec![Level::G0; self.n_ensembles()];
        if k >= per.len() {
            return Err(Error::invalid(format!("no ensemble {k}")));
        }
        per[k] = level;
        self.product_collective_state(&per)
    }

    /// Logical computational-basis state |b_1 b_2 ...> with bit 1 the
    /// symmetric collective qubit-one state of that ensemble.
    pub fn logical_state(&self, bits: &[u8]) -> Result<StateVector> {
        let per: Vec<Level> = bits
            .iter()
            .map(|&b| if b == 0 { Level::G0 } else { Level::G1 })
            .collect();
        self.product_collective_state(&per)
    }

    /// The 2^k logical basis states in bit order (|0..0>, |0..1>, ...).
    pub fn logical_basis(&self) -> Vec<StateVector> {
        let k = self.n_ensembles();
        (0..1usize << k)
            .map(|b| {
                let bits: Vec<u8> = (0..k).map(|q| ((b >> (k - 1 - q)) & 1) as u8).collect();
                self.logical_state(&bits).expect("logical state")
            })
            .collect()
    }
}
