//! Partial derivatives of response functions and the infinitesimal
//! response construction.
//!
//! Derivatives prefer the exact evaluators a response carries; responses
//! without them fall back to fixed-step finite differences (one-sided at
//! the domain boundaries, since neither phi outside [0, 1] nor negative
//! strength is defined).

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::error::Error;
use crate::phase::{Phase, Strength};
use crate::prf::{validate_prf, ExactPartials, PhaseResponse, Provenance};

/// Which partial derivative of g(phi, eps) to take.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartialKind {
    /// d g / d phi
    Dphi,
    /// d g / d eps
    Deps,
    /// d2 g / (d phi d eps)
    ///
    /// The stability theory only consumes this at eps = 0; other points are
    /// legal inputs but carry no special meaning.
    D2PhiEps,
}

/// Fixed step for first-order finite differences.
const FD_STEP: f64 = 1e-6;
/// Wider step for the nested mixed-partial stencil: the double division
/// amplifies rounding noise as ulp/h^2, so 1e-6 would drown the estimate.
const FD_STEP_MIXED: f64 = 1e-4;

/// Strengths at which a freshly built infinitesimal response is re-checked
/// against the axioms.
const REVALIDATION_STRENGTHS: [f64; 4] = [0.125, 0.25, 0.5, 1.0];
const REVALIDATION_GRID: usize = 257;
const REVALIDATION_TOL: f64 = 1e-9;

/// Number of phase samples used to tabulate d g / d eps (phi, 0) when a
/// response lacks exact partials.
const SPLINE_NODES: usize = 2048;

/// Evaluates one partial derivative of the response at a point, using the
/// exact evaluators when present and finite differences otherwise.
pub fn partial(
    prf: &PhaseResponse,
    kind: PartialKind,
    phi: Phase,
    eps: Strength,
) -> crate::Result<f64> {
    let (p, e) = (phi.value(), eps.value());
    if let Some(exact) = prf.partials() {
        let value = match kind {
            PartialKind::Dphi => (exact.dphi)(p, e),
            PartialKind::Deps => (exact.deps)(p, e),
            PartialKind::D2PhiEps => (exact.d2_phi_eps)(p, e),
        };
        return if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::EvaluationSingularity { phi: p, eps: e })
        };
    }
    match kind {
        PartialKind::Dphi => fd_dphi(prf, p, e, FD_STEP),
        PartialKind::Deps => fd_deps(prf, p, e, FD_STEP),
        PartialKind::D2PhiEps => fd_mixed(prf, p, e),
    }
}

fn sample(prf: &PhaseResponse, phi: f64, eps: f64) -> crate::Result<f64> {
    prf.eval(Phase::clamped(phi)?, Strength::new(eps)?)
}

/// Second-order phase derivative: central where both neighbors stay in
/// [0, 1], one-sided three-point stencils at the edges.
fn fd_dphi(prf: &PhaseResponse, phi: f64, eps: f64, h: f64) -> crate::Result<f64> {
    if phi >= h && phi + h <= 1.0 {
        Ok((sample(prf, phi + h, eps)? - sample(prf, phi - h, eps)?) / (2.0 * h))
    } else if phi < h {
        Ok(
            (-3.0 * sample(prf, phi, eps)? + 4.0 * sample(prf, phi + h, eps)?
                - sample(prf, phi + 2.0 * h, eps)?)
                / (2.0 * h),
        )
    } else {
        Ok(
            (3.0 * sample(prf, phi, eps)? - 4.0 * sample(prf, phi - h, eps)?
                + sample(prf, phi - 2.0 * h, eps)?)
                / (2.0 * h),
        )
    }
}

/// Second-order strength derivative: central away from eps = 0, one-sided
/// forward stencil at the boundary.
fn fd_deps(prf: &PhaseResponse, phi: f64, eps: f64, h: f64) -> crate::Result<f64> {
    if eps >= h {
        Ok((sample(prf, phi, eps + h)? - sample(prf, phi, eps - h)?) / (2.0 * h))
    } else {
        Ok(
            (-3.0 * sample(prf, phi, eps)? + 4.0 * sample(prf, phi, eps + h)?
                - sample(prf, phi, eps + 2.0 * h)?)
                / (2.0 * h),
        )
    }
}

/// Mixed partial as a strength-stencil of phase-stencils, both second
/// order with the wider step.
fn fd_mixed(prf: &PhaseResponse, phi: f64, eps: f64) -> crate::Result<f64> {
    let h = FD_STEP_MIXED;
    let d = |e: f64| fd_dphi(prf, phi, e, h);
    if eps >= h {
        Ok((d(eps + h)? - d(eps - h)?) / (2.0 * h))
    } else {
        Ok((-3.0 * d(eps)? + 4.0 * d(eps + h)? - d(eps + 2.0 * h)?) / (2.0 * h))
    }
}

/// Builds the infinitesimal response: the linearization
/// g~(phi, eps) = dg/deps(phi, 0) * eps.
///
/// For small strengths the linearization inherits every response axiom
/// from its parent; it can stop being a valid response once eps grows. The
/// construction therefore re-validates the result at a few sampled
/// strengths up to 1 and attaches a warning listing any failures, rather
/// than erroring.
///
/// Responses with exact partials get closed-form evaluators. Other
/// responses get dg/deps(phi, 0) tabulated by finite differences on a
/// dense phase grid and interpolated with a not-a-knot cubic spline, which
/// keeps the result cheap inside nested strobe-map evaluations.
pub fn make_infinitesimal(prf: &PhaseResponse) -> PhaseResponse {
    let name = format!("{}-tilde", prf.name());
    let provenance = Provenance::InfinitesimalOf(String::from(prf.name()));

    let mut tilde = if let Some(exact) = prf.partials() {
        let deps = Arc::clone(&exact.deps);
        let deps_for_eval = Arc::clone(&exact.deps);
        let d2 = Arc::clone(&exact.d2_phi_eps);
        let d2_for_dphi = Arc::clone(&exact.d2_phi_eps);
        let partials = ExactPartials {
            dphi: Arc::new(move |p, e| (d2_for_dphi)(p, 0.0) * e),
            deps: Arc::new(move |p, _| (deps)(p, 0.0)),
            d2_phi_eps: Arc::new(move |p, _| (d2)(p, 0.0)),
        };
        PhaseResponse::new(
            name,
            provenance,
            move |p, e| (deps_for_eval)(p, 0.0) * e,
            Some(partials),
        )
    } else {
        let nodes: Vec<f64> = (0..SPLINE_NODES)
            .map(|i| {
                let phi = i as f64 / (SPLINE_NODES - 1) as f64;
                fd_deps(prf, phi, 0.0, FD_STEP).unwrap_or(f64::NAN)
            })
            .collect();
        let spline = Arc::new(UniformSpline::not_a_knot(nodes));
        let s_eval = Arc::clone(&spline);
        let s_dphi = Arc::clone(&spline);
        let s_deps = Arc::clone(&spline);
        let s_d2 = Arc::clone(&spline);
        let partials = ExactPartials {
            dphi: Arc::new(move |p, e| s_dphi.deriv(p) * e),
            deps: Arc::new(move |p, _| s_deps.eval(p)),
            d2_phi_eps: Arc::new(move |p, _| s_d2.deriv(p)),
        };
        PhaseResponse::new(
            name,
            provenance,
            move |p, e| s_eval.eval(p) * e,
            Some(partials),
        )
    };

    let mut failing: Vec<f64> = Vec::new();
    let mut largest_passing: Option<f64> = None;
    for &eps in &REVALIDATION_STRENGTHS {
        let list = [Strength::new(eps).expect("revalidation strengths are valid")];
        match validate_prf(&tilde, &list, REVALIDATION_GRID, REVALIDATION_TOL) {
            Ok(report) if report.all_passed() => largest_passing = Some(eps),
            _ => failing.push(eps),
        }
    }
    if !failing.is_empty() {
        let failed: Vec<String> = failing.iter().map(|e| format!("{e}")).collect();
        let tail = match largest_passing {
            Some(e) => format!("largest sampled strength passing all checks: {e}"),
            None => String::from("no sampled strength passed all checks"),
        };
        tilde.push_warning(format!(
            "infinitesimal response fails axiom checks at strength(s) {}; {}",
            failed.join(", "),
            tail
        ));
    }
    tilde
}

/// Cubic spline on a uniform grid over [0, 1] with not-a-knot ends.
struct UniformSpline {
    values: Vec<f64>,
    second: Vec<f64>,
}

impl UniformSpline {
    fn not_a_knot(values: Vec<f64>) -> Self {
        let n = values.len();
        assert!(n >= 8, "spline needs a dense grid");
        let h = 1.0 / (n - 1) as f64;
        let d = |j: usize| 6.0 * (values[j - 1] - 2.0 * values[j] + values[j + 1]) / (h * h);

        let mut second = alloc::vec![0.0; n];
        // Not-a-knot makes the curvature linear across the first and last
        // two intervals, which pins the near-boundary rows outright:
        // the j = 1 row collapses to 6 * sigma_1 = d_1 (and mirrored).
        second[1] = d(1) / 6.0;
        second[n - 2] = d(n - 2) / 6.0;

        // Thomas elimination for sigma_2 .. sigma_{n-3}.
        let m = n - 4;
        let mut diag = alloc::vec![4.0; m];
        let mut rhs = alloc::vec![0.0; m];
        for (i, item) in rhs.iter_mut().enumerate() {
            *item = d(i + 2);
        }
        rhs[0] -= second[1];
        rhs[m - 1] -= second[n - 2];
        for i in 1..m {
            let w = 1.0 / diag[i - 1];
            diag[i] -= w;
            rhs[i] -= w * rhs[i - 1];
        }
        second[m + 1] = rhs[m - 1] / diag[m - 1];
        for i in (0..m - 1).rev() {
            second[i + 2] = (rhs[i] - second[i + 3]) / diag[i];
        }

        second[0] = 2.0 * second[1] - second[2];
        second[n - 1] = 2.0 * second[n - 2] - second[n - 3];
        UniformSpline { values, second }
    }

    fn segment(&self, x: f64) -> (usize, f64, f64, f64) {
        let n = self.values.len();
        let h = 1.0 / (n - 1) as f64;
        let clamped = x.clamp(0.0, 1.0);
        let j = usize::min((clamped * (n - 1) as f64) as usize, n - 2);
        let t = clamped - j as f64 * h;
        (j, t, h - t, h)
    }

    fn eval(&self, x: f64) -> f64 {
        let (j, t, u, h) = self.segment(x);
        let (s0, s1) = (self.values[j], self.values[j + 1]);
        let (c0, c1) = (self.second[j], self.second[j + 1]);
        c0 * u * u * u / (6.0 * h)
            + c1 * t * t * t / (6.0 * h)
            + (s0 - c0 * h * h / 6.0) * (u / h)
            + (s1 - c1 * h * h / 6.0) * (t / h)
    }

    fn deriv(&self, x: f64) -> f64 {
        let (j, t, u, h) = self.segment(x);
        let (s0, s1) = (self.values[j], self.values[j + 1]);
        let (c0, c1) = (self.second[j], self.second[j + 1]);
        -c0 * u * u / (2.0 * h) + c1 * t * t / (2.0 * h) + (s1 - s0) / h - (c1 - c0) * h / 6.0
    }
}
