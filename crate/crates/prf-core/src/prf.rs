//! The phase response abstraction and its axiom validation.
//!
//! A phase response function g(phi, eps) describes the instantaneous phase
//! shift an oscillator experiences when a pulse of strength eps arrives
//! while it sits at phase phi. Valid responses vanish at zero strength and
//! at both endpoint phases, and never push the phase out of [0, 1].

use alloc::boxed::Box;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::Error;
use crate::expr::{self, Var};
use crate::phase::{Phase, Strength};

/// Shared evaluator: (phi, eps) -> g. Raw floats so hot loops skip newtype
/// plumbing; domain checks live on the typed entry points.
pub type EvalFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Default phase-grid resolution used when validating parsed responses.
pub const DEFAULT_VALIDATION_GRID: usize = 1001;
/// Default tolerance for the equality axioms.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;
/// Bound on adjacent-sample slopes accepted by the smoothness heuristic.
pub const DEFAULT_SLOPE_BOUND: f64 = 1e6;

/// Where a response function came from.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum Provenance {
    /// Shipped with the library.
    Builtin,
    /// Parsed from DSL source.
    ParsedExpression,
    /// Linearization in strength of the named response.
    InfinitesimalOf(String),
    /// Wrapped from an arbitrary user closure.
    Custom,
}

/// Exact partial-derivative evaluators attached to a response.
#[derive(Clone)]
pub struct ExactPartials {
    /// d g / d phi
    pub dphi: EvalFn,
    /// d g / d eps
    pub deps: EvalFn,
    /// d2 g / (d phi d eps)
    pub d2_phi_eps: EvalFn,
}

impl core::fmt::Debug for ExactPartials {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("ExactPartials { .. }")
    }
}

/// A named, evaluable phase response function.
///
/// Immutable after construction and cheap to clone (the evaluators are
/// shared), so values can be handed to any number of threads.
#[derive(Clone)]
pub struct PhaseResponse {
    name: String,
    provenance: Provenance,
    eval: EvalFn,
    partials: Option<ExactPartials>,
    warnings: Vec<String>,
}

impl core::fmt::Debug for PhaseResponse {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("PhaseResponse")
            .field("name", &self.name)
            .field("provenance", &self.provenance)
            .field("has_partials", &self.partials.is_some())
            .field("warnings", &self.warnings)
            .finish()
    }
}

impl PhaseResponse {
    /// Wraps an evaluator with optional exact partials.
    pub fn new(
        name: impl Into<String>,
        provenance: Provenance,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        partials: Option<ExactPartials>,
    ) -> Self {
        PhaseResponse {
            name: name.into(),
            provenance,
            eval: Arc::new(eval),
            partials,
            warnings: Vec::new(),
        }
    }

    /// Wraps a plain closure as a response with no exact partials;
    /// derivatives fall back to finite differences.
    pub fn from_fn(
        name: impl Into<String>,
        eval: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PhaseResponse::new(name, Provenance::Custom, eval, None)
    }

    /// Parses DSL source into a candidate response without checking the
    /// axioms. Exact partials are wired from symbolic derivatives.
    ///
    /// Use this to inspect or validate arbitrary input; use [`from_expr`]
    /// (`PhaseResponse::from_expr`) when the result must be a valid PRF.
    pub fn candidate_from_expr(name: impl Into<String>, src: &str) -> crate::Result<Self> {
        let tree = expr::parse(src).map_err(Error::Parse)?;
        let dphi = tree.diff(Var::Phi);
        let deps = tree.diff(Var::Eps);
        let d2 = dphi.diff(Var::Eps);
        let partials = ExactPartials {
            dphi: Arc::new(move |p, e| dphi.eval(p, e).unwrap_or(f64::NAN)),
            deps: Arc::new(move |p, e| deps.eval(p, e).unwrap_or(f64::NAN)),
            d2_phi_eps: Arc::new(move |p, e| d2.eval(p, e).unwrap_or(f64::NAN)),
        };
        Ok(PhaseResponse::new(
            name,
            Provenance::ParsedExpression,
            move |p, e| tree.eval(p, e).unwrap_or(f64::NAN),
            Some(partials),
        ))
    }

    /// Parses DSL source and accepts it only if every axiom check passes at
    /// the given strengths (default grid and tolerance).
    pub fn from_expr(
        name: impl Into<String>,
        src: &str,
        eps_list: &[Strength],
    ) -> crate::Result<Self> {
        let candidate = Self::candidate_from_expr(name, src)?;
        let report = validate_prf(
            &candidate,
            eps_list,
            DEFAULT_VALIDATION_GRID,
            DEFAULT_VALIDATION_TOL,
        )?;
        if report.all_passed() {
            Ok(candidate)
        } else {
            Err(Error::ValidationFailed(Box::new(report)))
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// Construction-time warnings (attached by infinitesimal construction
    /// when the result fails re-validation at some sampled strength).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub(crate) fn push_warning(&mut self, warning: String) {
        self.warnings.push(warning);
    }

    pub fn partials(&self) -> Option<&ExactPartials> {
        self.partials.as_ref()
    }

    pub fn has_exact_partials(&self) -> bool {
        self.partials.is_some()
    }

    /// Evaluates g without domain or finiteness checks.
    pub fn eval_raw(&self, phi: f64, eps: f64) -> f64 {
        (self.eval)(phi, eps)
    }

    /// Evaluates g at a typed point, rejecting non-finite results.
    pub fn eval(&self, phi: Phase, eps: Strength) -> crate::Result<f64> {
        let value = (self.eval)(phi.value(), eps.value());
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::EvaluationSingularity {
                phi: phi.value(),
                eps: eps.value(),
            })
        }
    }
}

/// The axioms a phase response must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize, serde::Deserialize),
    serde(rename_all = "kebab-case")
)]
pub enum AxiomId {
    /// g(phi, 0) = 0 for every phase.
    ZeroAtZeroStrength,
    /// -phi <= g(phi, eps) <= 1 - phi everywhere (closed bounds).
    RangeClosed,
    /// -phi < g(phi, eps) < 1 - phi strictly, for interior phases and
    /// positive strengths.
    RangeStrictInterior,
    /// g(0, eps) = 0 for every strength.
    ZeroAtPhaseZero,
    /// g(1, eps) = 0 for every strength.
    ZeroAtPhaseOne,
    /// Adjacent-sample slopes stay bounded (heuristic stand-in for C1
    /// smoothness, which point samples cannot decide).
    Smoothness,
}

impl AxiomId {
    pub fn label(self) -> &'static str {
        match self {
            AxiomId::ZeroAtZeroStrength => "zero-at-zero-strength",
            AxiomId::RangeClosed => "range-closed",
            AxiomId::RangeStrictInterior => "range-strict-interior",
            AxiomId::ZeroAtPhaseZero => "zero-at-phase-zero",
            AxiomId::ZeroAtPhaseOne => "zero-at-phase-one",
            AxiomId::Smoothness => "smoothness",
        }
    }
}

impl core::fmt::Display for AxiomId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.label())
    }
}

/// Outcome of one axiom scan.
///
/// `worst_violation` is the largest violation found: for the equality
/// axioms it is max |g|, for the range axioms the largest excess past a
/// bound (negative values mean margin to spare), for smoothness the largest
/// adjacent-sample slope. `location` is the (phi, eps) attaining it.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AxiomCheck {
    pub axiom: AxiomId,
    pub passed: bool,
    pub worst_violation: f64,
    pub location: Option<(f64, f64)>,
    /// True when the check samples a property it cannot decide (smoothness).
    pub heuristic: bool,
    pub note: Option<String>,
}

/// Result of running every axiom check over a sampling grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ValidationReport {
    pub prf_name: String,
    pub phi_count: usize,
    pub eps_list: Vec<f64>,
    pub tolerance: f64,
    pub checks: Vec<AxiomCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// One-line digest used in error messages and CLI summaries.
    pub fn summary(&self) -> String {
        let failed: Vec<&'static str> = self
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.axiom.label())
            .collect();
        if failed.is_empty() {
            format!(
                "all {} axiom checks passed for `{}`",
                self.checks.len(),
                self.prf_name
            )
        } else {
            format!(
                "{} of {} axiom checks failed for `{}`: {}",
                failed.len(),
                self.checks.len(),
                self.prf_name,
                failed.join(", ")
            )
        }
    }
}

/// Accumulates the worst sample seen by one check scan.
struct Scan {
    worst: f64,
    location: Option<(f64, f64)>,
    singular: Option<(f64, f64)>,
}

impl Scan {
    fn new() -> Self {
        Scan {
            worst: f64::NEG_INFINITY,
            location: None,
            singular: None,
        }
    }

    fn observe(&mut self, value: f64, phi: f64, eps: f64) {
        if value > self.worst {
            self.worst = value;
            self.location = Some((phi, eps));
        }
    }

    fn mark_singular(&mut self, phi: f64, eps: f64) {
        if self.singular.is_none() {
            self.singular = Some((phi, eps));
        }
    }

    /// Folds the scan into a check: `pass` judges the worst value; an
    /// evaluation singularity anywhere fails the check outright.
    fn finish(self, axiom: AxiomId, heuristic: bool, pass: impl Fn(f64) -> bool) -> AxiomCheck {
        let sampled = self.location.is_some();
        let worst = if sampled { self.worst } else { 0.0 };
        let mut note = if sampled {
            None
        } else {
            Some("no points sampled".to_string())
        };
        let mut passed = pass(worst) || !sampled;
        if let Some((phi, eps)) = self.singular {
            passed = false;
            note = Some(format!("evaluation singularity at (phi={phi}, eps={eps})"));
        }
        AxiomCheck {
            axiom,
            passed,
            worst_violation: worst,
            location: self.location,
            heuristic,
            note,
        }
    }
}

/// Checks every axiom on a uniform phase grid crossed with the given
/// strengths and reports per-axiom verdicts.
///
/// Evaluation singularities are reported as failed checks, never as errors.
/// The equality and closed-range axioms tolerate violations up to `tol`;
/// the strict interior range fails on any violation; smoothness is a
/// heuristic slope bound of [`DEFAULT_SLOPE_BOUND`].
pub fn validate_prf(
    prf: &PhaseResponse,
    eps_list: &[Strength],
    phi_count: usize,
    tol: f64,
) -> crate::Result<ValidationReport> {
    if phi_count < 3 {
        return Err(Error::InvalidParameter("phi_count must be at least 3"));
    }
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(Error::InvalidParameter("tol must be positive and finite"));
    }

    let grid: Vec<f64> = (0..phi_count)
        .map(|i| i as f64 / (phi_count - 1) as f64)
        .collect();
    let eps_values: Vec<f64> = eps_list.iter().map(|e| e.value()).collect();

    // g(phi, 0) = 0 over the phase grid.
    let mut zero_strength = Scan::new();
    for &phi in &grid {
        let g = prf.eval_raw(phi, 0.0);
        if g.is_finite() {
            zero_strength.observe(g.abs(), phi, 0.0);
        } else {
            zero_strength.mark_singular(phi, 0.0);
        }
    }

    // Endpoint zeros and the two range axioms over the full grid.
    let mut at_zero = Scan::new();
    let mut at_one = Scan::new();
    let mut closed = Scan::new();
    let mut strict = Scan::new();
    let mut smooth = Scan::new();
    for &eps in &eps_values {
        let g0 = prf.eval_raw(0.0, eps);
        if g0.is_finite() {
            at_zero.observe(g0.abs(), 0.0, eps);
        } else {
            at_zero.mark_singular(0.0, eps);
        }
        let g1 = prf.eval_raw(1.0, eps);
        if g1.is_finite() {
            at_one.observe(g1.abs(), 1.0, eps);
        } else {
            at_one.mark_singular(1.0, eps);
        }

        let mut prev: Option<f64> = None;
        for (i, &phi) in grid.iter().enumerate() {
            let g = prf.eval_raw(phi, eps);
            if !g.is_finite() {
                closed.mark_singular(phi, eps);
                strict.mark_singular(phi, eps);
                smooth.mark_singular(phi, eps);
                prev = None;
                continue;
            }
            // Excess past either range bound; negative means margin.
            let excess = f64::max(-phi - g, g - (1.0 - phi));
            closed.observe(excess, phi, eps);
            if eps > 0.0 && i > 0 && i + 1 < phi_count {
                strict.observe(excess, phi, eps);
            }
            if let Some(p) = prev {
                let slope = (g - p).abs() * (phi_count - 1) as f64;
                smooth.observe(slope, phi - 0.5 / (phi_count - 1) as f64, eps);
            }
            prev = Some(g);
        }
    }

    let checks = alloc::vec![
        zero_strength.finish(AxiomId::ZeroAtZeroStrength, false, |w| w <= tol),
        closed.finish(AxiomId::RangeClosed, false, |w| w <= tol),
        strict.finish(AxiomId::RangeStrictInterior, false, |w| w < 0.0),
        at_zero.finish(AxiomId::ZeroAtPhaseZero, false, |w| w <= tol),
        at_one.finish(AxiomId::ZeroAtPhaseOne, false, |w| w <= tol),
        smooth.finish(AxiomId::Smoothness, true, |w| w <= DEFAULT_SLOPE_BOUND),
    ];

    Ok(ValidationReport {
        prf_name: prf.name().to_string(),
        phi_count,
        eps_list: eps_values,
        tolerance: tol,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strengths(values: &[f64]) -> Vec<Strength> {
        values.iter().map(|&v| Strength::new(v).unwrap()).collect()
    }

    #[test]
    fn constant_zero_response_passes_every_axiom() {
        let zero = PhaseResponse::from_fn("zero", |_, _| 0.0);
        let report = validate_prf(&zero, &strengths(&[0.0, 0.5, 2.0]), 101, 1e-9).unwrap();
        assert!(report.all_passed(), "{}", report.summary());
    }

    #[test]
    fn pure_strength_response_fails_endpoint_axioms() {
        let candidate = PhaseResponse::candidate_from_expr("eps", "eps").unwrap();
        let report = validate_prf(&candidate, &strengths(&[0.5]), 101, 1e-9).unwrap();
        assert!(!report.all_passed());
        let failed: alloc::vec::Vec<AxiomId> = report
            .checks
            .iter()
            .filter(|c| !c.passed)
            .map(|c| c.axiom)
            .collect();
        assert!(
            failed.contains(&AxiomId::ZeroAtPhaseZero),
            "failed set: {failed:?}"
        );
        assert!(
            failed.contains(&AxiomId::ZeroAtPhaseOne),
            "failed set: {failed:?}"
        );
        let corner = report
            .checks
            .iter()
            .find(|c| c.axiom == AxiomId::ZeroAtPhaseZero)
            .unwrap();
        assert_eq!(corner.worst_violation, 0.5);
        assert_eq!(corner.location, Some((0.0, 0.5)));
    }

    #[test]
    fn quadratic_expression_validates_and_gate_accepts_it() {
        let prf = PhaseResponse::from_expr("hump", "phi*(1-phi)*eps", &strengths(&[0.1, 0.5, 1.0]))
            .unwrap();
        assert_eq!(prf.name(), "hump");
        assert!(prf.has_exact_partials());
        assert_eq!(prf.eval_raw(0.5, 0.2), 0.05);
    }

    #[test]
    fn gate_rejects_non_prf_expression_with_report() {
        let err = PhaseResponse::from_expr("bad", "eps", &strengths(&[0.5])).unwrap_err();
        match err {
            Error::ValidationFailed(report) => {
                assert!(!report.all_passed());
                assert!(report.summary().contains("zero-at-phase-zero"));
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn singular_evaluation_is_a_failed_check_not_a_crash() {
        let singular = PhaseResponse::from_fn("inv", |phi, eps| eps / phi);
        let report = validate_prf(&singular, &strengths(&[0.5]), 11, 1e-9).unwrap();
        assert!(!report.all_passed());
        let corner = report
            .checks
            .iter()
            .find(|c| c.axiom == AxiomId::ZeroAtPhaseZero)
            .unwrap();
        assert!(!corner.passed);
        assert!(
            corner.note.as_deref().unwrap_or("").contains("singularity"),
            "note: {:?}",
            corner.note
        );
    }

    #[test]
    fn typed_eval_rejects_non_finite_results() {
        let singular = PhaseResponse::from_fn("inv", |phi, eps| eps / phi);
        let err = singular
            .eval(Phase::ZERO, Strength::new(1.0).unwrap())
            .unwrap_err();
        assert!(matches!(err, Error::EvaluationSingularity { phi, .. } if phi == 0.0));
    }

    #[test]
    fn strict_range_check_fails_on_boundary_touch() {
        // g(phi, eps) = -phi touches the lower bound at every interior phase.
        let touch = PhaseResponse::from_fn("touch", |phi, eps| if eps > 0.0 { -phi } else { 0.0 });
        let report = validate_prf(&touch, &strengths(&[0.5]), 11, 1e-9).unwrap();
        let strict = report
            .checks
            .iter()
            .find(|c| c.axiom == AxiomId::RangeStrictInterior)
            .unwrap();
        assert!(
            !strict.passed,
            "touching a bound must fail the strict check"
        );
        assert_eq!(strict.worst_violation, 0.0);
        let closed = report
            .checks
            .iter()
            .find(|c| c.axiom == AxiomId::RangeClosed)
            .unwrap();
        assert!(closed.passed, "closed bounds allow equality");
    }

    #[test]
    fn smoothness_check_is_marked_heuristic_and_catches_jumps() {
        let step = PhaseResponse::from_fn("step", |phi, eps| {
            if phi > 0.5 && phi < 0.6 && eps > 0.0 {
                100.0
            } else {
                0.0
            }
        });
        let report = validate_prf(&step, &strengths(&[1.0]), 100_001, 1e-9).unwrap();
        let smooth = report
            .checks
            .iter()
            .find(|c| c.axiom == AxiomId::Smoothness)
            .unwrap();
        assert!(smooth.heuristic);
        assert!(
            !smooth.passed,
            "a 100 jump over 1e-5 spacing exceeds the slope bound"
        );
    }

    #[test]
    fn validate_rejects_degenerate_arguments() {
        let zero = PhaseResponse::from_fn("zero", |_, _| 0.0);
        assert!(validate_prf(&zero, &strengths(&[0.1]), 2, 1e-9).is_err());
        assert!(validate_prf(&zero, &strengths(&[0.1]), 11, 0.0).is_err());
    }
}
