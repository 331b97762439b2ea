//! Return map of two identical pulse-coupled oscillators.
//!
//! Between firings both phases advance at unit rate (the period is
//! normalized to 1). When one oscillator reaches phase 1 it fires, resets
//! to 0, and shifts the other oscillator's phase by the response function.
//! Observing oscillator B's phase immediately after each firing of A
//! turns the continuous dynamics into a one-dimensional map, implemented
//! here both in closed form and by explicit event simulation.

use alloc::vec::Vec;
use core::fmt;

use crate::calculus::{partial, PartialKind};
use crate::error::Error;
use crate::phase::{Phase, Strength};
use crate::prf::PhaseResponse;

/// Default stopping tolerance on consecutive iterates.
pub const DEFAULT_CONV_TOL: f64 = 1e-12;
/// Default iteration budget.
pub const DEFAULT_MAX_ITERS: usize = 1_000_000;
/// How far back the cycle detector compares against recent iterates.
const CYCLE_WINDOW: usize = 64;

/// One application of the return map.
///
/// Starting just after A fired with B at `phi`: B fires first, kicking A
/// to 1 - phi + g(1 - phi, eps); A then needs u = phi - g(1 - phi, eps)
/// to reach threshold, by which time B has advanced to u; A's firing
/// kicks B to u + g(u, eps). Every intermediate phase must stay in
/// [0, 1]; a response violating that surfaces as an internal consistency
/// error rather than a clamped value.
pub fn strobe_map(prf: &PhaseResponse, phi: Phase, eps: Strength) -> crate::Result<Phase> {
    let p = phi.value();
    let e = eps.value();
    let kick_a = prf.eval(phi.complement(), eps)?;

    let a_after = (1.0 - p) + kick_a;
    let a_after = Phase::clamped(a_after).map_err(|_| Error::InternalConsistency {
        phi: p,
        eps: e,
        intermediate: a_after,
    })?;

    let u = p - kick_a;
    let u = Phase::clamped(u).map_err(|_| Error::InternalConsistency {
        phi: p,
        eps: e,
        intermediate: u,
    })?;
    debug_assert!((a_after.value() + u.value() - 1.0).abs() <= 1e-9);

    let kick_b = prf.eval(u, eps)?;
    let mapped = u.value() + kick_b;
    Phase::clamped(mapped).map_err(|_| Error::InternalConsistency {
        phi: p,
        eps: e,
        intermediate: mapped,
    })
}

/// Derivative of the return map at the synchronous state, the product of
/// corner factors (1 + dg/dphi(0, eps)) (1 + dg/dphi(1, eps)).
///
/// The chain rule gives the same product at phase 0 and phase 1, so the
/// two ends of the synchronous state share one stability number.
pub fn sync_derivative(prf: &PhaseResponse, eps: Strength) -> crate::Result<f64> {
    let at_zero = partial(prf, PartialKind::Dphi, Phase::ZERO, eps)?;
    let at_one = partial(prf, PartialKind::Dphi, Phase::ONE, eps)?;
    Ok((1.0 + at_zero) * (1.0 + at_one))
}

/// Applies the return map a fixed number of times and returns the full
/// trace, starting phase included.
pub fn run_map(
    prf: &PhaseResponse,
    phi0: Phase,
    eps: Strength,
    steps: usize,
) -> crate::Result<Vec<Phase>> {
    let mut phases = Vec::with_capacity(steps + 1);
    phases.push(phi0);
    for _ in 0..steps {
        let next = strobe_map(prf, *phases.last().expect("trace is never empty"), eps)?;
        phases.push(next);
    }
    Ok(phases)
}

/// How a fixed-point iteration of the return map ended.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    /// Consecutive iterates stopped moving next to phase 0.
    ConvergedToZero,
    /// Consecutive iterates stopped moving next to phase 1.
    ConvergedToOne,
    /// Consecutive iterates stopped moving at an interior phase.
    ConvergedToInterior(Phase),
    /// The iteration budget ran out first.
    MaxIters,
    /// An iterate returned to a recent non-adjacent value.
    CycleDetected,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let label = match self {
            Verdict::ConvergedToZero => "converged-to-0",
            Verdict::ConvergedToOne => "converged-to-1",
            Verdict::ConvergedToInterior(_) => "converged-to-interior",
            Verdict::MaxIters => "max-iters",
            Verdict::CycleDetected => "cycle-detected",
        };
        f.write_str(label)
    }
}

/// Trace and outcome of an iterated return map.
#[derive(Debug, Clone)]
pub struct IterationTrace {
    /// Every iterate, starting phase included.
    pub phases: Vec<Phase>,
    /// Coupling strength the map was run at.
    pub eps: Strength,
    pub verdict: Verdict,
    /// Number of map applications actually performed.
    pub iters_used: usize,
}

impl IterationTrace {
    /// Last iterate reached.
    pub fn final_phase(&self) -> Phase {
        *self.phases.last().expect("trace is never empty")
    }
}

/// Iterates the return map until consecutive iterates differ by less than
/// `conv_tol`, a recent value recurs, or the budget runs out.
///
/// Convergence is judged on consecutive differences only; maps that creep
/// toward an endpoint slower than geometrically (the cubic-rate
/// linearized responses do) stall the test short of the endpoint and run
/// to `MaxIters`. Callers probing endpoint stability should inspect the
/// trace direction rather than demand an endpoint verdict.
pub fn iterate(
    prf: &PhaseResponse,
    phi0: Phase,
    eps: Strength,
    max_iters: usize,
    conv_tol: f64,
) -> crate::Result<IterationTrace> {
    if !(conv_tol > 0.0 && conv_tol.is_finite()) {
        return Err(Error::InvalidParameter(
            "conv_tol must be positive and finite",
        ));
    }
    let mut phases = Vec::with_capacity(usize::min(max_iters + 1, 4096));
    phases.push(phi0);
    let mut prev = phi0.value();
    for k in 0..max_iters {
        let next = strobe_map(prf, *phases.last().expect("trace is never empty"), eps)?;
        let value = next.value();
        phases.push(next);
        if (value - prev).abs() < conv_tol {
            let verdict = if value <= conv_tol * 10.0 {
                Verdict::ConvergedToZero
            } else if 1.0 - value <= conv_tol * 10.0 {
                Verdict::ConvergedToOne
            } else {
                Verdict::ConvergedToInterior(next)
            };
            return Ok(IterationTrace {
                phases,
                eps,
                verdict,
                iters_used: k + 1,
            });
        }
        let len = phases.len();
        for back in 2..=usize::min(CYCLE_WINDOW, len - 1) {
            if (value - phases[len - 1 - back].value()).abs() < conv_tol {
                return Ok(IterationTrace {
                    phases,
                    eps,
                    verdict: Verdict::CycleDetected,
                    iters_used: k + 1,
                });
            }
        }
        prev = value;
    }
    Ok(IterationTrace {
        phases,
        eps,
        verdict: Verdict::MaxIters,
        iters_used: max_iters,
    })
}

/// Which oscillator fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Oscillator {
    A,
    B,
}

impl fmt::Display for Oscillator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Oscillator::A => "A",
            Oscillator::B => "B",
        })
    }
}

/// One firing: who fired, when, and the other oscillator's phase around
/// the kick.
#[derive(Debug, Clone, Copy)]
pub struct FiringEvent {
    pub time: f64,
    pub firer: Oscillator,
    pub phase_other_before: Phase,
    pub phase_other_after: Phase,
}

/// Full record of an event-driven run.
#[derive(Debug, Clone)]
pub struct EventLog {
    pub events: Vec<FiringEvent>,
    /// Set when both phases became exactly equal: the time both would
    /// reach threshold together. The log is truncated there.
    pub synchronous_at: Option<f64>,
}

/// Simulates the two-oscillator system event by event for `cycles` full
/// periods (two firings per cycle while the oscillators stay distinct).
///
/// The oscillator closer to threshold fires next; exact phase equality is
/// treated as reaching synchrony and stops the run.
pub fn simulate_events(
    prf: &PhaseResponse,
    phi_a: Phase,
    phi_b: Phase,
    eps: Strength,
    cycles: usize,
) -> crate::Result<EventLog> {
    let e = eps.value();
    let mut a = phi_a.value();
    let mut b = phi_b.value();
    let mut time = 0.0;
    let target = 2 * cycles;
    let mut events = Vec::with_capacity(target);
    let mut synchronous_at = None;

    while events.len() < target {
        if a == b {
            synchronous_at = Some(time + (1.0 - a));
            break;
        }
        let (firer, firer_phase, other_phase) = if a > b {
            (Oscillator::A, a, b)
        } else {
            (Oscillator::B, b, a)
        };
        let dt = 1.0 - firer_phase;
        time += dt;

        let drifted = other_phase + dt;
        let before = Phase::clamped(drifted).map_err(|_| Error::InternalConsistency {
            phi: other_phase,
            eps: e,
            intermediate: drifted,
        })?;
        let kicked = before.value() + prf.eval(before, eps)?;
        let after = Phase::clamped(kicked).map_err(|_| Error::InternalConsistency {
            phi: before.value(),
            eps: e,
            intermediate: kicked,
        })?;

        match firer {
            Oscillator::A => {
                a = 0.0;
                b = after.value();
            }
            Oscillator::B => {
                b = 0.0;
                a = after.value();
            }
        }
        events.push(FiringEvent {
            time,
            firer,
            phase_other_before: before,
            phase_other_after: after,
        });
    }
    Ok(EventLog {
        events,
        synchronous_at,
    })
}

/// B's phase right after each firing of A: the simulated counterpart of
/// the closed-form return map trace.
pub fn strobe_samples(log: &EventLog) -> Vec<Phase> {
    log.events
        .iter()
        .filter(|ev| ev.firer == Oscillator::A)
        .map(|ev| ev.phase_other_after)
        .collect()
}
