//! Phase and pulse-strength newtypes.

use core::fmt;

use crate::error::Error;
use crate::Result;

/// Arithmetic that lands outside `[0, 1]` by at most this much is treated as
/// rounding noise and clamped to the boundary; larger excursions are errors.
pub const PHASE_CLAMP_TOL: f64 = 1e-12;

/// Oscillator phase, a point on the normalized cycle `[0, 1]`.
///
/// `0` is the moment just after firing and `1` is the firing threshold.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Phase(f64);

impl Phase {
    /// Phase zero, the start of the cycle.
    pub const ZERO: Phase = Phase(0.0);
    /// Phase one, the firing threshold.
    pub const ONE: Phase = Phase(1.0);

    /// Wraps a value already known to lie in `[0, 1]`.
    pub fn new(value: f64) -> Result<Phase> {
        if (0.0..=1.0).contains(&value) {
            Ok(Phase(value))
        } else {
            Err(Error::PhaseOutOfRange { value })
        }
    }

    /// Wraps a value, clamping excursions of at most [`PHASE_CLAMP_TOL`]
    /// beyond either boundary back onto it.
    pub fn clamped(value: f64) -> Result<Phase> {
        if (0.0..=1.0).contains(&value) {
            Ok(Phase(value))
        } else if value < 0.0 && value >= -PHASE_CLAMP_TOL {
            Ok(Phase(0.0))
        } else if value > 1.0 && value <= 1.0 + PHASE_CLAMP_TOL {
            Ok(Phase(1.0))
        } else {
            Err(Error::PhaseOutOfRange { value })
        }
    }

    /// The phase as a plain float in `[0, 1]`.
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// The phase measured from the other end of the cycle, `1 - phi`.
    #[inline]
    pub fn complement(self) -> Phase {
        Phase(1.0 - self.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<Phase> for f64 {
    fn from(p: Phase) -> f64 {
        p.0
    }
}

/// Pulse strength, a finite non-negative coupling parameter.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Strength(f64);

impl Strength {
    /// Zero pulse strength; every PRF must vanish here.
    pub const ZERO: Strength = Strength(0.0);

    /// Wraps a finite non-negative value.
    pub fn new(value: f64) -> Result<Strength> {
        if value.is_finite() && value >= 0.0 {
            Ok(Strength(value))
        } else {
            Err(Error::InvalidStrength { value })
        }
    }

    /// The strength as a plain float.
    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Strength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<Strength> for f64 {
    fn from(s: Strength) -> f64 {
        s.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn new_accepts_unit_interval_and_rejects_outside() {
        assert_eq!(Phase::new(0.0).unwrap().value(), 0.0);
        assert_eq!(Phase::new(1.0).unwrap().value(), 1.0);
        assert_eq!(Phase::new(0.25).unwrap().value(), 0.25);
        assert!(Phase::new(-1e-15).is_err());
        assert!(Phase::new(1.0 + 1e-15).is_err());
        assert!(Phase::new(f64::NAN).is_err());
    }

    #[test]
    fn clamped_absorbs_rounding_but_not_real_excursions() {
        assert_eq!(Phase::clamped(-1e-13).unwrap().value(), 0.0);
        assert_eq!(Phase::clamped(1.0 + 1e-13).unwrap().value(), 1.0);
        assert!(Phase::clamped(-1e-11).is_err());
        assert!(Phase::clamped(1.0 + 1e-11).is_err());
        assert!(Phase::clamped(f64::NAN).is_err());
    }

    #[test]
    fn strength_rejects_negative_and_non_finite() {
        assert!(Strength::new(0.0).is_ok());
        assert!(Strength::new(10.0).is_ok());
        assert!(Strength::new(-1e-30).is_err());
        assert!(Strength::new(f64::INFINITY).is_err());
        assert!(Strength::new(f64::NAN).is_err());
    }

    #[test]
    fn complement_mirrors_phase() {
        let p = Phase::new(0.3).unwrap();
        assert!((p.complement().value() - 0.7).abs() < 1e-15);
        assert_eq!(Phase::ZERO.complement().value(), 1.0);
    }
}
