use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Single-atom level in the ensemble-qubit scheme.
///
/// `G0`/`G1` are the long-lived qubit levels, `E` is the intermediate
/// (launch) state of the two-photon excitation ladder, and `R0`/`R1` are the
/// two Rydberg levels. `Sink` is a fictitious level collecting spontaneously
/// decayed population in open-system runs; no field ever couples to it.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    G0,
    G1,
    E,
    R0,
    R1,
    Sink,
}

impl Level {
    pub const fn is_rydberg(self) -> bool {
        matches!(self, Level::R0 | Level::R1)
    }

    pub const fn is_qubit(self) -> bool {
        matches!(self, Level::G0 | Level::G1)
    }

    pub const fn label(self) -> &'static str {
        match self {
            Level::G0 => "g0",
            Level::G1 => "g1",
            Level::E => "e",
            Level::R0 => "r0",
            Level::R1 => "r1",
            Level::Sink => "sink",
        }
    }

    /// Position in the canonical level ordering (also the lexicographic rank
    /// used for basis-configuration ordering).
    pub const fn rank(self) -> usize {
        match self {
            Level::G0 => 0,
            Level::G1 => 1,
            Level::E => 2,
            Level::R0 => 3,
            Level::R1 => 4,
            Level::Sink => 5,
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// The set of per-atom levels in play for a given simulation.
///
/// The closed-system scheme has exactly the five physical levels; the open
/// scheme appends the decay sink.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LevelScheme {
    levels: Vec<Level>,
}

impl LevelScheme {
    /// The five-level closed-system scheme {g0, g1, e, r0, r1}.
    pub fn standard() -> Self {
        LevelScheme {
            levels: vec![Level::G0, Level::G1, Level::E, Level::R0, Level::R1],
        }
    }

    /// The five physical levels plus the decay sink.
    pub fn with_sink() -> Self {
        let mut s = Self::standard();
        s.levels.push(Level::Sink);
        s
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn has_sink(&self) -> bool {
        self.levels.contains(&Level::Sink)
    }

    pub fn contains(&self, level: Level) -> bool {
        self.levels.contains(&level)
    }

    /// Number of non-Rydberg levels (the count entering the blockaded-basis
    /// dimension formula).
    pub fn non_rydberg_count(&self) -> usize {
        self.levels.iter().filter(|l| !l.is_rydberg()).count()
    }

    pub fn check_contains(&self, level: Level) -> Result<()> {
        if self.contains(level) {
            Ok(())
        } else {
            Err(Error::invalid(format!("level {level} not in scheme")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_scheme_has_five_levels() {
        let s = LevelScheme::standard();
        assert_eq!(s.len(), 5);
        assert!(!s.has_sink());
        assert_eq!(s.non_rydberg_count(), 3);
    }

    #[test]
    fn sink_scheme_has_six_levels() {
        let s = LevelScheme::with_sink();
        assert_eq!(s.len(), 6);
        assert!(s.has_sink());
        assert_eq!(s.non_rydberg_count(), 4);
    }

    #[test]
    fn rank_is_strictly_increasing_in_declaration_order() {
        let s = LevelScheme::with_sink();
        for w in s.levels().windows(2) {
            assert!(w[0].rank() < w[1].rank());
        }
    }

    #[test]
    fn level_classification() {
        assert!(Level::R0.is_rydberg());
        assert!(Level::R1.is_rydberg());
        assert!(!Level::E.is_rydberg());
        assert!(Level::G0.is_qubit());
        assert!(Level::G1.is_qubit());
        assert!(!Level::Sink.is_qubit());
    }
}
