//! One-command re-checks of the library's headline numerical results.
//!
//! Each case runs the same assertions as the acceptance suite and prints
//! one pass/fail line per assertion; the exit code is 0 only if every
//! assertion holds.

use prf_core::classify::{
    classify_empirical, classify_small_eps, classify_strong, EmpiricalVerdict, SmallEpsVerdict,
    StrongVerdict,
};
use prf_core::strobe::strobe_map;
use prf_core::{builtins, Phase, PhaseResponse, Strength};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CASES: [&str; 6] = [
    "theorem1",
    "theorem2-ex1",
    "theorem2-ex2",
    "theorem3",
    "theta-identity",
    "cubic-expansion",
];

pub fn run(case: &str) -> i32 {
    let mut checks = Checks::new();
    match case {
        "theorem1" => theorem1(&mut checks),
        "theorem2-ex1" => theorem2_ex1(&mut checks),
        "theorem2-ex2" => theorem2_ex2(&mut checks),
        "theorem3" => theorem3(&mut checks),
        "theta-identity" => theta_identity(&mut checks),
        "cubic-expansion" => cubic_expansion(&mut checks),
        other => {
            eprintln!(
                "error: unknown case `{other}`; expected one of {}",
                CASES.join(", ")
            );
            return 2;
        }
    }
    checks.finish()
}

struct Checks {
    total: usize,
    failed: usize,
}

impl Checks {
    fn new() -> Checks {
        Checks {
            total: 0,
            failed: 0,
        }
    }

    fn record(&mut self, passed: bool, detail: String) {
        self.total += 1;
        if passed {
            println!("pass  {detail}");
        } else {
            self.failed += 1;
            println!("FAIL  {detail}");
        }
    }

    fn finish(&self) -> i32 {
        if self.failed == 0 {
            println!("all {} checks passed", self.total);
            0
        } else {
            println!("{} of {} checks failed", self.failed, self.total);
            1
        }
    }
}

fn phase(v: f64) -> Phase {
    Phase::new(v).expect("phase in [0, 1]")
}

fn strength(v: f64) -> Strength {
    Strength::new(v).expect("nonnegative strength")
}

/// The theta return map fixes every phase, at weak and strong pulses alike.
fn theta_identity(checks: &mut Checks) {
    let theta = builtins::theta();
    for eps in [0.1, 1.0, 5.0, 10.0] {
        let e = strength(eps);
        let mut worst: f64 = 0.0;
        for k in 0..=1000 {
            let phi = k as f64 / 1000.0;
            let mapped = strobe_map(&theta, phase(phi), e).expect("theta map is total");
            worst = worst.max((mapped.value() - phi).abs());
        }
        checks.record(
            worst <= 1e-9,
            format!("strength {eps}: max |F(phi) - phi| = {worst:e} (tolerance 1e-9)"),
        );
    }
}

/// Near zero the linearized theta map contracts cubically with the
/// predicted coefficient 2 eps^2 pi^2.
fn cubic_expansion(checks: &mut Checks) {
    let tilde = builtins::theta_tilde();
    let eps = 0.1;
    let phi = 1e-3;
    let mapped = strobe_map(&tilde, phase(phi), strength(eps))
        .expect("linearized map is total at small strength")
        .value();
    let coefficient = (phi - mapped) / phi.powi(3);
    let expected = 2.0 * eps * eps * std::f64::consts::PI * std::f64::consts::PI;
    let relative = (coefficient - expected).abs() / expected;
    checks.record(
        relative <= 0.01,
        format!(
            "contraction coefficient {coefficient} vs {expected} (relative deviation {relative:e}, tolerance 1e-2)"
        ),
    );
}

/// The exact theta map leaves synchrony neutral while its linearization
/// attracts, from probes at 0.1 and 0.9.
fn theorem1(checks: &mut Checks) {
    let theta = builtins::theta();
    let tilde = builtins::theta_tilde();
    for eps in [0.1, 0.5, 1.0] {
        let e = strength(eps);
        let exact = classify_empirical(&theta, e, 0.1, 1_000_000, 1e-12)
            .expect("theta probes run to completion");
        checks.record(
            exact == EmpiricalVerdict::Neutral,
            format!("strength {eps}: exact map empirically {exact} (expected neutral)"),
        );
        let linearized = classify_empirical(&tilde, e, 0.1, 1_000_000, 1e-12)
            .expect("linearized probes run to completion");
        checks.record(
            linearized == EmpiricalVerdict::Attracting,
            format!("strength {eps}: linearization empirically {linearized} (expected attracting)"),
        );
    }
}

/// example1's synchrony derivative is 1 + eps^2, repelling at every
/// strength.
fn theorem2_ex1(checks: &mut Checks) {
    let prf = builtins::example1();
    for eps in [0.01, 0.1, 0.5, 1.0] {
        let report = classify_strong(&prf, strength(eps)).expect("derivative product exists");
        let expected = 1.0 + eps * eps;
        let deviation = (report.derivative_product - expected).abs();
        checks.record(
            deviation <= 1e-10,
            format!(
                "strength {eps}: product {} vs 1 + eps^2 = {expected} (deviation {deviation:e})",
                report.derivative_product
            ),
        );
        checks.record(
            report.strong_verdict == StrongVerdict::StronglyRepelling,
            format!(
                "strength {eps}: strong verdict {} (expected strongly-repelling)",
                report.strong_verdict
            ),
        );
    }
}

/// example2's synchrony derivative is 1 + eps^2 - 2 eps^3; its corner
/// slopes promise attraction at small strengths while the product repels.
fn theorem2_ex2(checks: &mut Checks) {
    let prf = builtins::example2();
    for eps in [0.01, 0.1] {
        let report = classify_strong(&prf, strength(eps)).expect("derivative product exists");
        let expected = 1.0 + eps * eps - 2.0 * eps * eps * eps;
        let deviation = (report.derivative_product - expected).abs();
        checks.record(
            deviation <= 1e-10,
            format!(
                "strength {eps}: product {} vs 1 + eps^2 - 2 eps^3 = {expected} (deviation {deviation:e})",
                report.derivative_product
            ),
        );
        checks.record(
            report.strong_verdict == StrongVerdict::StronglyRepelling,
            format!(
                "strength {eps}: strong verdict {} (expected strongly-repelling)",
                report.strong_verdict
            ),
        );
    }
    let corner = classify_small_eps(&prf).expect("corner slopes exist");
    let dev_zero = (corner.mixed_corner_zero - 1.0).abs();
    checks.record(
        dev_zero <= 1e-6,
        format!(
            "corner slope m0 = {} vs 1 (deviation {dev_zero:e})",
            corner.mixed_corner_zero
        ),
    );
    let dev_one = (corner.mixed_corner_one + 1.0).abs();
    checks.record(
        dev_one <= 1e-6,
        format!(
            "corner slope m1 = {} vs -1 (deviation {dev_one:e})",
            corner.mixed_corner_one
        ),
    );
    checks.record(
        corner.verdict == SmallEpsVerdict::StronglyAttractingSmallEps,
        format!(
            "corner verdict {} (expected strongly-attracting-small-eps)",
            corner.verdict
        ),
    );
}

/// Generated one-sided families: a negative response with a strictly
/// negative corner slope attracts at small strength, its mirror repels.
fn theorem3(checks: &mut Checks) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let eps = strength(0.01);
    for i in 0..20 {
        let q = random_positive_polynomial(&mut rng);
        let source = format!("-eps*phi*(1-phi)^2*({q})");
        let prf = PhaseResponse::candidate_from_expr(format!("gen-attract-{i}"), &source)
            .expect("generated source parses");
        let corner = classify_small_eps(&prf).expect("corner slopes exist");
        let report = classify_strong(&prf, eps).expect("derivative product exists");
        checks.record(
            corner.very_strong && report.strong_verdict == StrongVerdict::StronglyAttracting,
            format!(
                "gen-attract-{i}: very strong = {}, verdict {} at strength 0.01 (product {})",
                corner.very_strong, report.strong_verdict, report.derivative_product
            ),
        );

        let mirrored = format!("eps*phi*(1-phi)^2*({q})");
        let prf = PhaseResponse::candidate_from_expr(format!("gen-repel-{i}"), &mirrored)
            .expect("generated source parses");
        let corner = classify_small_eps(&prf).expect("corner slopes exist");
        let report = classify_strong(&prf, eps).expect("derivative product exists");
        checks.record(
            corner.verdict == SmallEpsVerdict::StronglyRepellingSmallEps
                && report.strong_verdict == StrongVerdict::StronglyRepelling,
            format!(
                "gen-repel-{i}: corner verdict {}, verdict {} at strength 0.01 (product {})",
                corner.verdict, report.strong_verdict, report.derivative_product
            ),
        );
    }
}

/// Random polynomial with all coefficients in [0.1, 1], written in the
/// DSL. Matches the acceptance suite's generator and seed so the same
/// twenty families are checked.
fn random_positive_polynomial(rng: &mut ChaCha8Rng) -> String {
    let degree = rng.gen_range(0..=3usize);
    let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(0.1..=1.0)).collect();
    let mut terms = Vec::with_capacity(coeffs.len());
    for (power, c) in coeffs.iter().enumerate() {
        match power {
            0 => terms.push(format!("{c}")),
            1 => terms.push(format!("{c}*phi")),
            _ => terms.push(format!("{c}*phi^{power}")),
        }
    }
    terms.join(" + ")
}
