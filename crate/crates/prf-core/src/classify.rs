//! Stability classification of the synchronous state.
//!
//! Three independent instruments: the derivative product of the return
//! map at the synchronous state (exact, but silent when its magnitude is
//! 1), endpoint probing by iteration (empirical, catches sub-exponential
//! behavior the derivative cannot see), and the mixed corner partials at
//! zero strength (the small-strength criterion, which speaks about the
//! linearized response). A full report runs all three on a response and
//! its linearization and flags where they disagree.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::calculus::{make_infinitesimal, partial, PartialKind};
use crate::error::Error;
use crate::phase::{Phase, Strength};
use crate::prf::PhaseResponse;
use crate::strobe::{iterate, sync_derivative, IterationTrace, Verdict};

/// Tolerance for comparing the derivative product with 1 and corner
/// partials with 0.
pub const CLASSIFICATION_TOL: f64 = 1e-9;

/// Verdict from the derivative product alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize),
    serde(rename_all = "kebab-case")
)]
pub enum StrongVerdict {
    StronglyAttracting,
    StronglyRepelling,
    /// Product magnitude within tolerance of 1: the derivative conditions
    /// are sufficient, not necessary, so nothing follows.
    Inconclusive,
}

impl fmt::Display for StrongVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrongVerdict::StronglyAttracting => "strongly-attracting",
            StrongVerdict::StronglyRepelling => "strongly-repelling",
            StrongVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// Verdict from iterating the return map near both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize),
    serde(rename_all = "kebab-case")
)]
pub enum EmpiricalVerdict {
    Attracting,
    Repelling,
    Neutral,
    /// The two endpoints behave differently; reported, not an error.
    Asymmetric,
    Undetermined,
}

impl fmt::Display for EmpiricalVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EmpiricalVerdict::Attracting => "attracting",
            EmpiricalVerdict::Repelling => "repelling",
            EmpiricalVerdict::Neutral => "neutral",
            EmpiricalVerdict::Asymmetric => "asymmetric",
            EmpiricalVerdict::Undetermined => "undetermined",
        })
    }
}

/// Joint verdict: the exact derivative test wins when it speaks, the
/// empirical probe refines the marginal cases.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize),
    serde(rename_all = "kebab-case")
)]
pub enum CombinedVerdict {
    StronglyAttracting,
    WeaklyAttracting,
    StronglyRepelling,
    WeaklyRepelling,
    Neutral,
    Undetermined,
}

impl fmt::Display for CombinedVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CombinedVerdict::StronglyAttracting => "strongly-attracting",
            CombinedVerdict::WeaklyAttracting => "weakly-attracting",
            CombinedVerdict::StronglyRepelling => "strongly-repelling",
            CombinedVerdict::WeaklyRepelling => "weakly-repelling",
            CombinedVerdict::Neutral => "neutral",
            CombinedVerdict::Undetermined => "undetermined",
        })
    }
}

/// Verdict of the small-strength corner criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize),
    serde(rename_all = "kebab-case")
)]
pub enum SmallEpsVerdict {
    StronglyAttractingSmallEps,
    StronglyRepellingSmallEps,
    Inconclusive,
}

impl fmt::Display for SmallEpsVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SmallEpsVerdict::StronglyAttractingSmallEps => "strongly-attracting-small-eps",
            SmallEpsVerdict::StronglyRepellingSmallEps => "strongly-repelling-small-eps",
            SmallEpsVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// Classification of synchrony for one response at one strength.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StabilityReport {
    pub eps: Strength,
    /// (1 + dg/dphi(0, eps)) (1 + dg/dphi(1, eps)).
    pub derivative_product: f64,
    pub strong_verdict: StrongVerdict,
    /// Present when the endpoint probe ran.
    pub empirical_verdict: Option<EmpiricalVerdict>,
    pub combined: Option<CombinedVerdict>,
}

/// Corner mixed partials at zero strength and the verdict they support.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct InfinitesimalReport {
    /// d2 g / (d phi d eps) at (0, 0).
    pub mixed_corner_zero: f64,
    /// d2 g / (d phi d eps) at (1, 0).
    pub mixed_corner_one: f64,
    pub verdict: SmallEpsVerdict,
    /// Corner sum strictly negative: attraction carries over from the
    /// linearization to the full response at small strengths.
    pub very_strong: bool,
}

/// Observations attached to a full report.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(
    feature = "serde",
    derive(serde::Serialize),
    serde(tag = "kind", rename_all = "kebab-case")
)]
pub enum ReportNote {
    /// The response and its linearization point in different directions
    /// at this strength.
    Disagreement {
        eps: f64,
        exact: CombinedVerdict,
        infinitesimal: CombinedVerdict,
    },
    /// The corner criterion promised attraction of the full response at
    /// small strengths; records whether the smallest sampled strength
    /// delivered it.
    VeryStrongTransfer {
        eps: f64,
        strongly_attracting: bool,
        derivative_product: f64,
    },
    /// The constructed linearization failed axiom checks at some sampled
    /// strengths.
    InfinitesimalWarnings { warnings: Vec<String> },
}

/// Everything the classifier can say about a response.
#[derive(Debug, Clone)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct FullReport {
    pub prf_name: String,
    pub infinitesimal_name: String,
    /// Per-strength reports for the response itself.
    pub exact: Vec<StabilityReport>,
    /// Per-strength reports for its linearization.
    pub infinitesimal: Vec<StabilityReport>,
    pub corner: InfinitesimalReport,
    pub notes: Vec<ReportNote>,
}

/// Knobs for the endpoint probes a full report runs.
#[derive(Debug, Clone, Copy)]
pub struct FullReportConfig {
    /// Starting offset from each endpoint, in (0, 0.1].
    pub probe: f64,
    pub max_iters: usize,
    pub conv_tol: f64,
}

impl Default for FullReportConfig {
    fn default() -> Self {
        FullReportConfig {
            probe: 1e-3,
            max_iters: crate::strobe::DEFAULT_MAX_ITERS,
            conv_tol: crate::strobe::DEFAULT_CONV_TOL,
        }
    }
}

fn strong_verdict_of(product: f64) -> StrongVerdict {
    let magnitude = product.abs();
    if magnitude < 1.0 - CLASSIFICATION_TOL {
        StrongVerdict::StronglyAttracting
    } else if magnitude > 1.0 + CLASSIFICATION_TOL {
        StrongVerdict::StronglyRepelling
    } else {
        StrongVerdict::Inconclusive
    }
}

/// Classifies from the derivative product alone; empirical fields stay
/// unset.
pub fn classify_strong(prf: &PhaseResponse, eps: Strength) -> crate::Result<StabilityReport> {
    let product = sync_derivative(prf, eps)?;
    Ok(StabilityReport {
        eps,
        derivative_product: product,
        strong_verdict: strong_verdict_of(product),
        empirical_verdict: None,
        combined: None,
    })
}

/// What one endpoint probe saw.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Toward,
    Away,
    Constant,
    Undetermined,
}

/// Judges one probe trace relative to the endpoint it started near.
///
/// "Toward" accepts either an endpoint convergence verdict or steady
/// monotone approach that ran out of budget: maps with sub-exponential
/// contraction creep toward the endpoint far slower than any convergence
/// tolerance can confirm, and demanding a converged verdict would
/// misread exactly the responses this classifier exists for. "Away"
/// wants monotone escape with real growth, so rounding-level drift does
/// not count.
fn assess_side(trace: &IterationTrace, endpoint: f64, tol: f64) -> Side {
    let d: Vec<f64> = trace
        .phases
        .iter()
        .map(|p| (p.value() - endpoint).abs())
        .collect();
    let d0 = d[0];
    let start = trace.phases[0].value();
    if trace
        .phases
        .iter()
        .all(|p| (p.value() - start).abs() <= tol)
    {
        return Side::Constant;
    }

    let converged_here = match trace.verdict {
        Verdict::ConvergedToZero => endpoint == 0.0,
        Verdict::ConvergedToOne => endpoint == 1.0,
        _ => false,
    };
    let last = *d.last().expect("trace is never empty");
    let monotone_toward = d.windows(2).all(|w| w[1] <= w[0]);
    let progress = d0 - last >= f64::max(100.0 * tol, 1e-9);
    let settled_nearby =
        matches!(trace.verdict, Verdict::ConvergedToInterior(_)) && last <= 0.5 * d0;
    let exhausted = matches!(trace.verdict, Verdict::MaxIters);
    if converged_here || (monotone_toward && progress && (exhausted || settled_nearby)) {
        return Side::Toward;
    }

    let mut prefix = 0;
    while prefix + 1 < d.len() && d[prefix + 1] >= d[prefix] {
        prefix += 1;
    }
    let window = usize::min(100, d.len() - 1);
    let early_growth = prefix >= window && window >= 1 && d[window] >= 1.2 * d0;
    let big_growth = d[usize::min(prefix, 100)] >= 10.0 * d0;
    if early_growth || big_growth {
        return Side::Away;
    }
    Side::Undetermined
}

fn combine_sides(zero: Side, one: Side) -> EmpiricalVerdict {
    match (zero, one) {
        (Side::Constant, Side::Constant) => EmpiricalVerdict::Neutral,
        (Side::Toward, Side::Toward) => EmpiricalVerdict::Attracting,
        (Side::Away, Side::Away) => EmpiricalVerdict::Repelling,
        (Side::Undetermined, _) | (_, Side::Undetermined) => EmpiricalVerdict::Undetermined,
        _ => EmpiricalVerdict::Asymmetric,
    }
}

/// Probes synchrony by iterating the return map from `probe` and
/// `1 - probe` and judging each trace against its endpoint.
pub fn classify_empirical(
    prf: &PhaseResponse,
    eps: Strength,
    probe: f64,
    max_iters: usize,
    tol: f64,
) -> crate::Result<EmpiricalVerdict> {
    if !(probe > 0.0 && probe <= 0.1) {
        return Err(Error::InvalidParameter("probe must lie in (0, 0.1]"));
    }
    let low = iterate(prf, Phase::new(probe)?, eps, max_iters, tol)?;
    let high = iterate(prf, Phase::new(1.0 - probe)?, eps, max_iters, tol)?;
    Ok(combine_sides(
        assess_side(&low, 0.0, tol),
        assess_side(&high, 1.0, tol),
    ))
}

/// Evaluates the small-strength corner criterion.
pub fn classify_small_eps(prf: &PhaseResponse) -> crate::Result<InfinitesimalReport> {
    let m0 = partial(prf, PartialKind::D2PhiEps, Phase::ZERO, Strength::ZERO)?;
    let m1 = partial(prf, PartialKind::D2PhiEps, Phase::ONE, Strength::ZERO)?;
    let tol = CLASSIFICATION_TOL;
    let sum = m0 + m1;
    let verdict = if sum < -tol || (sum.abs() <= tol && m0 * m1 < -(tol * tol)) {
        SmallEpsVerdict::StronglyAttractingSmallEps
    } else if sum > tol {
        SmallEpsVerdict::StronglyRepellingSmallEps
    } else {
        SmallEpsVerdict::Inconclusive
    };
    Ok(InfinitesimalReport {
        mixed_corner_zero: m0,
        mixed_corner_one: m1,
        verdict,
        very_strong: sum < -tol,
    })
}

fn combined_verdict(strong: StrongVerdict, empirical: EmpiricalVerdict) -> CombinedVerdict {
    match strong {
        StrongVerdict::StronglyAttracting => CombinedVerdict::StronglyAttracting,
        StrongVerdict::StronglyRepelling => CombinedVerdict::StronglyRepelling,
        StrongVerdict::Inconclusive => match empirical {
            EmpiricalVerdict::Attracting => CombinedVerdict::WeaklyAttracting,
            EmpiricalVerdict::Repelling => CombinedVerdict::WeaklyRepelling,
            EmpiricalVerdict::Neutral => CombinedVerdict::Neutral,
            EmpiricalVerdict::Asymmetric | EmpiricalVerdict::Undetermined => {
                CombinedVerdict::Undetermined
            }
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Attracting,
    Repelling,
    Neutral,
}

fn direction(verdict: Option<CombinedVerdict>) -> Option<Direction> {
    match verdict? {
        CombinedVerdict::StronglyAttracting | CombinedVerdict::WeaklyAttracting => {
            Some(Direction::Attracting)
        }
        CombinedVerdict::StronglyRepelling | CombinedVerdict::WeaklyRepelling => {
            Some(Direction::Repelling)
        }
        CombinedVerdict::Neutral => Some(Direction::Neutral),
        CombinedVerdict::Undetermined => None,
    }
}

fn stability_with_empirical(
    prf: &PhaseResponse,
    eps: Strength,
    config: &FullReportConfig,
) -> crate::Result<StabilityReport> {
    let mut report = classify_strong(prf, eps)?;
    // The probe drives the map; a response that is not a valid response
    // at this strength can push phases out of [0, 1], which is an honest
    // "undetermined", not a failure of the report.
    let empirical =
        match classify_empirical(prf, eps, config.probe, config.max_iters, config.conv_tol) {
            Ok(verdict) => verdict,
            Err(Error::InternalConsistency { .. })
            | Err(Error::PhaseOutOfRange { .. })
            | Err(Error::EvaluationSingularity { .. }) => EmpiricalVerdict::Undetermined,
            Err(other) => return Err(other),
        };
    report.empirical_verdict = Some(empirical);
    report.combined = Some(combined_verdict(report.strong_verdict, empirical));
    Ok(report)
}

/// Runs every classifier on the response and its linearization with
/// default probing.
pub fn full_report(prf: &PhaseResponse, eps_list: &[Strength]) -> crate::Result<FullReport> {
    full_report_with(prf, eps_list, &FullReportConfig::default())
}

/// Runs every classifier on the response and its linearization.
///
/// Notes flag strengths where the two point in different directions,
/// record whether very strong corner attraction showed up in the full
/// response at the smallest sampled strength, and carry any axiom
/// warnings the linearization was built with.
pub fn full_report_with(
    prf: &PhaseResponse,
    eps_list: &[Strength],
    config: &FullReportConfig,
) -> crate::Result<FullReport> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("eps_list must be nonempty"));
    }
    let tilde = make_infinitesimal(prf);
    let corner = classify_small_eps(prf)?;

    let mut exact = Vec::with_capacity(eps_list.len());
    let mut infinitesimal = Vec::with_capacity(eps_list.len());
    let mut notes = Vec::new();
    for &eps in eps_list {
        let exact_report = stability_with_empirical(prf, eps, config)?;
        let tilde_report = stability_with_empirical(&tilde, eps, config)?;
        if let (Some(a), Some(b)) = (
            direction(exact_report.combined),
            direction(tilde_report.combined),
        ) {
            if a != b {
                notes.push(ReportNote::Disagreement {
                    eps: eps.value(),
                    exact: exact_report.combined.expect("direction implies combined"),
                    infinitesimal: tilde_report.combined.expect("direction implies combined"),
                });
            }
        }
        exact.push(exact_report);
        infinitesimal.push(tilde_report);
    }

    if corner.very_strong {
        let smallest = eps_list
            .iter()
            .enumerate()
            .min_by(|a, b| {
                a.1.value()
                    .partial_cmp(&b.1.value())
                    .expect("strengths are finite")
            })
            .map(|(i, _)| i)
            .expect("eps_list is nonempty");
        let at_smallest = &exact[smallest];
        notes.push(ReportNote::VeryStrongTransfer {
            eps: at_smallest.eps.value(),
            strongly_attracting: at_smallest.strong_verdict == StrongVerdict::StronglyAttracting,
            derivative_product: at_smallest.derivative_product,
        });
    }
    if !tilde.warnings().is_empty() {
        notes.push(ReportNote::InfinitesimalWarnings {
            warnings: tilde.warnings().to_vec(),
        });
    }

    Ok(FullReport {
        prf_name: String::from(prf.name()),
        infinitesimal_name: String::from(tilde.name()),
        exact,
        infinitesimal,
        corner,
        notes,
    })
}
