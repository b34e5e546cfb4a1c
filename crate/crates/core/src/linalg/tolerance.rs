use serde::{Deserialize, Serialize};

/// Relative/absolute tolerance pair. A quantity `x` measured against a scale
/// `s` passes when `|x| <= relative * s + absolute`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
}

impl Tolerance {
    pub const DEFAULT_RELATIVE: f64 = 1e-9;
    pub const DEFAULT_ABSOLUTE: f64 = 1e-12;

    /// Panics on negative or non-finite components.
    pub fn new(relative: f64, absolute: f64) -> Self {
        assert!(
            relative.is_finite() && absolute.is_finite() && relative >= 0.0 && absolute >= 0.0,
            "tolerances must be finite and nonnegative"
        );
        Self { relative, absolute }
    }

    pub fn scaled(&self, scale: f64) -> f64 {
        self.relative * scale.abs() + self.absolute
    }

    /// Rank cutoff `max(absolute, relative * largest)`; values strictly above it
    /// count toward rank.
    pub fn rank_cutoff(&self, largest: f64) -> f64 {
        self.absolute.max(self.relative * largest.abs())
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            relative: Self::DEFAULT_RELATIVE,
            absolute: Self::DEFAULT_ABSOLUTE,
        }
    }
}
