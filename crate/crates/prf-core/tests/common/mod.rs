//! Helpers shared by the integration test binaries.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Builds a random expression in the response DSL.
///
/// Division, square root, and logarithm arguments are guarded away from
/// their singularities so the result is smooth on the whole domain;
/// everything else (trig, exponential, powers, arithmetic) appears raw.
pub fn random_expr_source(rng: &mut ChaCha8Rng, depth: usize) -> String {
    if depth == 0 {
        return match rng.gen_range(0..4) {
            0 => String::from("phi"),
            1 => String::from("eps"),
            2 => format!("{}", rng.gen_range(0.3..2.0)),
            _ => String::from("phi"),
        };
    }
    match rng.gen_range(0..12) {
        0 => format!(
            "({} + {})",
            random_expr_source(rng, depth - 1),
            random_expr_source(rng, depth - 1)
        ),
        1 => format!(
            "({} - {})",
            random_expr_source(rng, depth - 1),
            random_expr_source(rng, depth - 1)
        ),
        2 => format!(
            "({} * {})",
            random_expr_source(rng, depth - 1),
            random_expr_source(rng, depth - 1)
        ),
        3 => format!(
            "({} / (0.5 + ({})^2))",
            random_expr_source(rng, depth - 1),
            random_expr_source(rng, depth - 1)
        ),
        4 => format!(
            "({})^{}",
            random_expr_source(rng, depth - 1),
            rng.gen_range(2..=3)
        ),
        5 => format!("-({})", random_expr_source(rng, depth - 1)),
        6 => format!("sin({})", random_expr_source(rng, depth - 1)),
        7 => format!("cos({})", random_expr_source(rng, depth - 1)),
        8 => format!("atan({})", random_expr_source(rng, depth - 1)),
        9 => format!("exp({})", random_expr_source(rng, depth - 1)),
        10 => format!("sqrt(0.5 + ({})^2)", random_expr_source(rng, depth - 1)),
        _ => format!("log(0.5 + ({})^2)", random_expr_source(rng, depth - 1)),
    }
}

/// Random polynomial with all coefficients in [0.1, 1], written in the
/// DSL, plus its constant term.
// Not every test target draws polynomials; keep the helper warning-free.
#[allow(dead_code)]
pub fn random_positive_polynomial(rng: &mut ChaCha8Rng) -> (String, f64) {
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
    (terms.join(" + "), coeffs[0])
}
