//! The theta neuron: a spiking oscillator with an exact phase response.
//!
//! The model is dtheta/dt = 1 - cos(theta) + I (1 + cos(theta)) on the
//! circle, with a spike each time theta crosses an odd multiple of pi. For
//! constant drive I > 0 the angle advances through (-pi, pi) in the fixed
//! period T = pi / sqrt(I), so the oscillator is a pure phase oscillator
//! and an instantaneous charge injection translates into a closed-form
//! phase response. That closed form (and its partial derivatives) is what
//! this module provides.

use core::f64::consts::PI;

use crate::error::Error;
use crate::math;
use crate::phase::{Phase, Strength};
use crate::prf::{ExactPartials, PhaseResponse, Provenance};

/// Model parameters: constant drive current and the voltage jump injected
/// per pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaParams {
    drive: f64,
    delta_v: f64,
}

impl ThetaParams {
    /// Requires drive > 0 (the angle must keep advancing) and a
    /// non-negative (excitatory) voltage jump.
    pub fn new(drive: f64, delta_v: f64) -> crate::Result<Self> {
        if !(drive > 0.0) || !drive.is_finite() {
            return Err(Error::InvalidParameter("drive current must be positive"));
        }
        if !(delta_v >= 0.0) || !delta_v.is_finite() {
            return Err(Error::InvalidParameter("delta_v must be non-negative"));
        }
        Ok(ThetaParams { drive, delta_v })
    }

    pub fn drive(&self) -> f64 {
        self.drive
    }

    pub fn delta_v(&self) -> f64 {
        self.delta_v
    }

    /// Pulse strength in phase coordinates: eps = 2 delta_v / sqrt(I).
    pub fn strength(&self) -> Strength {
        Strength::new(2.0 * self.delta_v / math::sqrt(self.drive)).expect("finite by construction")
    }
}

/// Oscillation period T = pi / sqrt(I).
pub fn theta_period(params: &ThetaParams) -> f64 {
    PI / math::sqrt(params.drive)
}

/// Membrane-potential analogue v = 1/2 + 1/2 tan(theta/2).
///
/// Defined for theta strictly inside (-pi, pi); the potential diverges at
/// the firing angle itself.
pub fn theta_voltage(theta: f64) -> crate::Result<f64> {
    check_angle(theta)?;
    Ok(0.5 + 0.5 * math::tan(0.5 * theta))
}

/// Angle jump caused by an instantaneous charge injection:
/// theta -> 2 arctan(tan(theta/2) + 2 delta_v).
///
/// Monotone in both arguments; the identity when delta_v = 0.
pub fn theta_charge_jump(theta: f64, delta_v: f64) -> crate::Result<f64> {
    check_angle(theta)?;
    if !(delta_v >= 0.0) || !delta_v.is_finite() {
        return Err(Error::InvalidParameter("delta_v must be non-negative"));
    }
    Ok(2.0 * math::atan(math::tan(0.5 * theta) + 2.0 * delta_v))
}

/// Converts an angle to the phase coordinate:
/// phi = 1/2 + (1/pi) arctan(tan(theta/2) / sqrt(I)).
pub fn theta_to_phase(theta: f64, drive: f64) -> crate::Result<Phase> {
    check_angle(theta)?;
    check_drive(drive)?;
    let phi = 0.5 + math::atan(math::tan(0.5 * theta) / math::sqrt(drive)) / PI;
    Phase::clamped(phi)
}

/// Inverse of [`theta_to_phase`]: theta = 2 arctan(sqrt(I) tan((phi-1/2) pi)).
///
/// The endpoint phases map to the firing angle itself and are rejected.
pub fn phase_to_theta(phi: Phase, drive: f64) -> crate::Result<f64> {
    check_drive(drive)?;
    let p = phi.value();
    if p == 0.0 || p == 1.0 {
        return Err(Error::EndpointSingularity { phi: p });
    }
    Ok(2.0 * math::atan(math::sqrt(drive) * math::tan((p - 0.5) * PI)))
}

fn check_angle(theta: f64) -> crate::Result<()> {
    if !theta.is_finite() || math::abs(theta) > PI {
        return Err(Error::AngleOutOfRange { theta });
    }
    if math::abs(theta) == PI {
        return Err(Error::InfiniteVoltage { theta });
    }
    Ok(())
}

fn check_drive(drive: f64) -> crate::Result<()> {
    if !(drive > 0.0) || !drive.is_finite() {
        return Err(Error::InvalidParameter("drive current must be positive"));
    }
    Ok(())
}

// The response function below is expressed through x = tan((phi - 1/2) pi).
// Mathematically g = (1/pi) (arctan(x + eps) - arctan(x)), but that form
// loses all significant digits near the endpoint phases where |x| blows up.
// The difference-of-arctangents identity
//   arctan(x + eps) - arctan(x)
//     = arctan(eps / (1 + x^2 + eps x)) + pi * [1 + x^2 + eps x < 0]
// evaluates with uniform relative accuracy; the branch correction only
// activates for eps > 2.

fn coord(phi: f64) -> f64 {
    math::tan((phi - 0.5) * PI)
}

pub(crate) fn g(phi: f64, eps: f64) -> f64 {
    let x = coord(phi);
    let denom = 1.0 + x * x + eps * x;
    let mut shifted = math::atan(eps / denom);
    if denom < 0.0 {
        shifted += PI;
    }
    shifted / PI
}

pub(crate) fn g_dphi(phi: f64, eps: f64) -> f64 {
    let x = coord(phi);
    let y = x + eps;
    -eps * (2.0 * x + eps) / (1.0 + y * y)
}

pub(crate) fn g_deps(phi: f64, eps: f64) -> f64 {
    let x = coord(phi);
    let y = x + eps;
    (1.0 / PI) / (1.0 + y * y)
}

pub(crate) fn g_d2(phi: f64, eps: f64) -> f64 {
    let x = coord(phi);
    let y = x + eps;
    let denom = 1.0 + y * y;
    -2.0 * y * (1.0 + x * x) / (denom * denom)
}

/// The exact phase response of the theta neuron, with exact partials:
/// g(phi, eps) = (1/pi) arctan(tan((phi - 1/2) pi) + eps) - (phi - 1/2).
pub fn prf() -> PhaseResponse {
    PhaseResponse::new(
        "theta",
        Provenance::Builtin,
        g,
        Some(ExactPartials {
            dphi: alloc::sync::Arc::new(g_dphi),
            deps: alloc::sync::Arc::new(g_deps),
            d2_phi_eps: alloc::sync::Arc::new(g_d2),
        }),
    )
}
