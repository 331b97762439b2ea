//! Named response functions available by string lookup.
//!
//! `theta` is the exact response of the quadratic integrate-and-fire
//! oscillator, `theta-tilde` its linearization in strength, `example1` a
//! modification of `theta` that shares its linearization but acquires a
//! repelling synchronous state, `example2` a polynomial response with
//! conflicting corner slopes, and `zero` the trivial response.

use alloc::sync::Arc;

use crate::calculus::make_infinitesimal;
use crate::prf::{ExactPartials, PhaseResponse, Provenance};

/// Names accepted by [`by_name`], in the order they are documented.
pub const NAMES: [&str; 5] = ["theta", "theta-tilde", "example1", "example2", "zero"];

/// Looks up a built-in response by name.
pub fn by_name(name: &str) -> Option<PhaseResponse> {
    match name {
        "theta" => Some(theta()),
        "theta-tilde" => Some(theta_tilde()),
        "example1" => Some(example1()),
        "example2" => Some(example2()),
        "zero" => Some(zero()),
        _ => None,
    }
}

/// Exact response of the quadratic integrate-and-fire oscillator at unit
/// drive.
pub fn theta() -> PhaseResponse {
    crate::theta::prf()
}

/// Linearization of `theta` in the coupling strength,
/// (eps / pi) sin^2(pi phi).
pub fn theta_tilde() -> PhaseResponse {
    make_infinitesimal(&crate::theta::prf())
}

/// `theta` plus phi (1 - phi)^2 eps^2.
///
/// The added term is quadratic in strength, so the linearization is
/// identical to `theta-tilde`; the synchronous state is nonetheless
/// repelling for every positive strength.
pub fn example1() -> PhaseResponse {
    let partials = ExactPartials {
        dphi: Arc::new(|p, e| crate::theta::g_dphi(p, e) + (1.0 - p) * (1.0 - 3.0 * p) * e * e),
        deps: Arc::new(|p, e| crate::theta::g_deps(p, e) + 2.0 * p * (1.0 - p) * (1.0 - p) * e),
        d2_phi_eps: Arc::new(|p, e| {
            crate::theta::g_d2(p, e) + 2.0 * (1.0 - p) * (1.0 - 3.0 * p) * e
        }),
    };
    PhaseResponse::new(
        "example1",
        Provenance::Builtin,
        |p, e| crate::theta::g(p, e) + p * (1.0 - p) * (1.0 - p) * e * e,
        Some(partials),
    )
}

fn w(p: f64) -> f64 {
    p * (p - 1.0) * (p - 1.0) * (2.0 * p - 1.0)
}

fn w_prime(p: f64) -> f64 {
    (p - 1.0) * (p - 1.0) * (2.0 * p - 1.0)
        + 2.0 * p * (p - 1.0) * (2.0 * p - 1.0)
        + 2.0 * p * (p - 1.0) * (p - 1.0)
}

/// eps phi (1 - phi) - 2 eps^2 phi (phi - 1)^2 (2 phi - 1).
///
/// Its corner slopes in strength are +1 at phase 0 and -1 at phase 1, so
/// the linearized verdict rests on the product of corner terms rather
/// than their sum.
pub fn example2() -> PhaseResponse {
    let partials = ExactPartials {
        dphi: Arc::new(|p, e| e * (1.0 - 2.0 * p) - 2.0 * e * e * w_prime(p)),
        deps: Arc::new(|p, e| p * (1.0 - p) - 4.0 * e * w(p)),
        d2_phi_eps: Arc::new(|p, e| (1.0 - 2.0 * p) - 4.0 * e * w_prime(p)),
    };
    PhaseResponse::new(
        "example2",
        Provenance::Builtin,
        |p, e| p * (1.0 - p) * e - 2.0 * e * e * w(p),
        Some(partials),
    )
}

/// The response that never shifts phase.
pub fn zero() -> PhaseResponse {
    let partials = ExactPartials {
        dphi: Arc::new(|_, _| 0.0),
        deps: Arc::new(|_, _| 0.0),
        d2_phi_eps: Arc::new(|_, _| 0.0),
    };
    PhaseResponse::new("zero", Provenance::Builtin, |_, _| 0.0, Some(partials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase::Strength;
    use crate::prf::validate_prf;

    fn strengths(list: &[f64]) -> alloc::vec::Vec<Strength> {
        list.iter().map(|&e| Strength::new(e).unwrap()).collect()
    }

    #[test]
    fn lookup_covers_exactly_the_documented_names() {
        for name in NAMES {
            let prf = by_name(name).unwrap_or_else(|| panic!("missing builtin {name}"));
            assert_eq!(prf.name(), name);
        }
        assert!(by_name("nope").is_none());
        assert!(by_name("Theta").is_none(), "lookup must be case sensitive");
    }

    #[test]
    fn theta_passes_axioms_at_large_strengths() {
        let report =
            validate_prf(&theta(), &strengths(&[0.1, 1.0, 5.0, 10.0]), 1001, 1e-9).unwrap();
        assert!(report.all_passed(), "{}", report.summary());
    }

    #[test]
    fn examples_pass_axioms_up_to_unit_strength() {
        for prf in [example1(), example2(), zero()] {
            let report =
                validate_prf(&prf, &strengths(&[0.01, 0.1, 0.5, 1.0]), 1001, 1e-9).unwrap();
            assert!(report.all_passed(), "{}: {}", prf.name(), report.summary());
        }
    }

    #[test]
    fn example1_shares_the_theta_linearization() {
        let from_example = make_infinitesimal(&example1());
        let from_theta = theta_tilde();
        for i in 0..=200 {
            let phi = i as f64 / 200.0;
            for &eps in &[0.1, 1.0] {
                let a = from_example.eval_raw(phi, eps);
                let b = from_theta.eval_raw(phi, eps);
                assert!(
                    (a - b).abs() <= 1e-12,
                    "linearizations differ at ({phi}, {eps}): {a} vs {b}"
                );
            }
        }
    }

    #[test]
    fn example2_corner_slopes_are_plus_and_minus_one() {
        let prf = example2();
        let p = prf.partials().unwrap();
        let e = 0.5;
        assert_eq!((p.dphi)(0.0, e), e + 2.0 * e * e, "slope at phase 0");
        assert_eq!((p.dphi)(1.0, e), -e, "slope at phase 1");
        assert_eq!((p.d2_phi_eps)(0.0, 0.0), 1.0, "mixed corner at phase 0");
        assert_eq!((p.d2_phi_eps)(1.0, 0.0), -1.0, "mixed corner at phase 1");
    }

    #[test]
    fn theta_tilde_is_flagged_invalid_beyond_unit_strength() {
        // (eps / pi) sin^2(pi phi) crosses the upper range bound once eps
        // exceeds roughly 2, and the sampled revalidation ladder tops out
        // at 1, so construction itself stays clean.
        let tilde = theta_tilde();
        assert!(tilde.warnings().is_empty(), "{:?}", tilde.warnings());
        let report = validate_prf(&tilde, &strengths(&[5.0]), 1001, 1e-9).unwrap();
        assert!(!report.all_passed(), "large strength must break the range");
    }
}
