//! Command line front end for the response-function toolkit.
//!
//! Subcommands validate candidate response functions, classify synchrony
//! stability, iterate and sweep the two-oscillator return map, run the
//! event-driven simulation, and re-check the library's headline results.
//! Data goes to stdout (CSV or JSON), diagnostics to stderr. Exit codes:
//! 0 success, 1 failed checks, 2 usage or parse errors.

mod reproduce;

use clap::{Args, Parser, Subcommand};
use prf_core::classify::{full_report_with, FullReport, FullReportConfig, ReportNote};
use prf_core::prf::{validate_prf, DEFAULT_VALIDATION_GRID, DEFAULT_VALIDATION_TOL};
use prf_core::strobe::{iterate, run_map, simulate_events, DEFAULT_CONV_TOL, DEFAULT_MAX_ITERS};
use prf_core::{builtins, Error, Phase, PhaseResponse, Provenance, Strength, ValidationReport};

#[derive(Parser)]
#[command(
    name = "prf",
    version,
    about = "Phase response functions and synchrony stability for pulse-coupled oscillators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the response-function axioms on a sampling grid
    Validate(ValidateArgs),
    /// Classify synchrony stability for a response and its linearization
    Classify(ClassifyArgs),
    /// Print the return-map orbit from one starting phase as CSV
    Iterate(IterateArgs),
    /// Scan pulse strengths and report each orbit's verdict as CSV
    Sweep(SweepArgs),
    /// Run the event-driven two-oscillator simulation and emit CSV
    Simulate(SimulateArgs),
    /// Re-run a named result check and print pass/fail per assertion
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
struct ValidateArgs {
    /// Response function: a builtin name or expr:<formula>
    #[arg(long)]
    prf: String,
    /// Comma-separated pulse strengths to check at
    #[arg(long, default_value = "0.01,0.1,0.5,1")]
    eps_list: String,
    /// Number of phase grid points
    #[arg(long, default_value_t = DEFAULT_VALIDATION_GRID)]
    grid: usize,
    /// Emit the full report as JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ClassifyArgs {
    /// Response function: a builtin name or expr:<formula>
    #[arg(long)]
    prf: String,
    /// Comma-separated pulse strengths to classify at
    #[arg(long)]
    eps_list: String,
    /// Endpoint probe offset for the empirical classifier, in (0, 0.1]
    #[arg(long)]
    probe: Option<f64>,
    /// Emit the full report as JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct IterateArgs {
    /// Response function: a builtin name or expr:<formula>
    #[arg(long)]
    prf: String,
    /// Starting phase in [0, 1]
    #[arg(long)]
    phi0: f64,
    /// Pulse strength
    #[arg(long)]
    eps: f64,
    /// Iteration budget; without --tol, exactly this many steps run
    #[arg(long)]
    max_iters: Option<usize>,
    /// Convergence tolerance; set it to stop early and report a verdict
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct SweepArgs {
    /// Response function: a builtin name or expr:<formula>
    #[arg(long)]
    prf: String,
    /// Strength range as start:end:count
    #[arg(long)]
    eps_range: String,
    /// Starting phase in [0, 1]
    #[arg(long)]
    phi0: f64,
}

#[derive(Args)]
struct SimulateArgs {
    /// Response function: a builtin name or expr:<formula>
    #[arg(long)]
    prf: String,
    /// Initial phase of oscillator A
    #[arg(long = "phiA")]
    phi_a: f64,
    /// Initial phase of oscillator B
    #[arg(long = "phiB")]
    phi_b: f64,
    /// Pulse strength
    #[arg(long)]
    eps: f64,
    /// Number of full cycles to simulate (two firings per cycle)
    #[arg(long)]
    cycles: usize,
}

#[derive(Args)]
struct ReproduceArgs {
    /// One of: theorem1, theorem2-ex1, theorem2-ex2, theorem3,
    /// theta-identity, cubic-expansion
    #[arg(long)]
    case: String,
}

fn main() {
    // The runtime ignores SIGPIPE, which turns `prf ... | head` into a
    // panic on the first write after the reader exits. Die quietly instead.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Validate(args) => cmd_validate(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Iterate(args) => cmd_iterate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Reproduce(args) => reproduce::run(&args.case),
    };
    std::process::exit(code);
}

/// Prints a library error and maps it to an exit code: precondition and
/// parse failures are usage errors (2), numeric failures are check
/// failures (1).
fn report_error(err: &Error) -> i32 {
    eprintln!("error: {err}");
    match err {
        Error::PhaseOutOfRange { .. }
        | Error::InvalidStrength { .. }
        | Error::InvalidParameter(_)
        | Error::Parse(_) => 2,
        _ => 1,
    }
}

/// Builds the response named by a --prf value.
fn resolve_spec(spec: &str) -> Result<PhaseResponse, i32> {
    if let Some(src) = spec.strip_prefix("expr:") {
        PhaseResponse::candidate_from_expr(src.trim(), src).map_err(|e| {
            eprintln!("error: {e}");
            2
        })
    } else {
        builtins::by_name(spec).ok_or_else(|| {
            eprintln!(
                "error: unknown response `{spec}`; expected one of {} or expr:<formula>",
                builtins::NAMES.join(", ")
            );
            2
        })
    }
}

/// Expressions must pass the axiom checks at every strength a command
/// will use them at; builtins ship pre-validated.
fn gate_expression(prf: &PhaseResponse, eps_list: &[Strength]) -> Result<(), i32> {
    if !matches!(prf.provenance(), Provenance::ParsedExpression) {
        return Ok(());
    }
    let report = validate_prf(
        prf,
        eps_list,
        DEFAULT_VALIDATION_GRID,
        DEFAULT_VALIDATION_TOL,
    )
    .map_err(|e| report_error(&e))?;
    if report.all_passed() {
        Ok(())
    } else {
        eprintln!("error: {}", report.summary());
        Err(2)
    }
}

fn parse_strength(raw: &str) -> Result<Strength, i32> {
    let value: f64 = raw.trim().parse().map_err(|_| {
        eprintln!("error: `{raw}` is not a number");
        2
    })?;
    strength_arg(value)
}

fn strength_arg(value: f64) -> Result<Strength, i32> {
    Strength::new(value).map_err(|e| report_error(&e))
}

fn parse_strength_list(raw: &str) -> Result<Vec<Strength>, i32> {
    let list: Vec<Strength> = raw
        .split(',')
        .map(parse_strength)
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        eprintln!("error: the strength list is empty");
        return Err(2);
    }
    Ok(list)
}

/// Parses `start:end:count` into `count` evenly spaced strengths.
fn parse_strength_range(raw: &str) -> Result<Vec<Strength>, i32> {
    let parts: Vec<&str> = raw.split(':').collect();
    if parts.len() != 3 {
        eprintln!("error: `{raw}` is not of the form start:end:count");
        return Err(2);
    }
    let start = parse_strength(parts[0])?;
    let end = parse_strength(parts[1])?;
    let count: usize = parts[2].trim().parse().map_err(|_| {
        eprintln!("error: `{}` is not a count", parts[2]);
        2
    })?;
    if count == 0 {
        eprintln!("error: the range needs at least one point");
        return Err(2);
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let (a, b) = (start.value(), end.value());
    (0..count)
        .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
        .map(|v| Strength::new(v).map_err(|e| report_error(&e)))
        .collect()
}

fn parse_phase(value: f64) -> Result<Phase, i32> {
    Phase::new(value).map_err(|e| report_error(&e))
}

fn print_json<T: serde::Serialize>(value: &T) -> i32 {
    match serde_json::to_string_pretty(value) {
        Ok(text) => {
            println!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: serializing the report failed: {e}");
            1
        }
    }
}

fn cmd_validate(args: &ValidateArgs) -> i32 {
    let prf = match resolve_spec(&args.prf) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let eps_list = match parse_strength_list(&args.eps_list) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let report = match validate_prf(&prf, &eps_list, args.grid, DEFAULT_VALIDATION_TOL) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    if args.json {
        let code = print_json(&report);
        if code != 0 {
            return code;
        }
    } else {
        print_validation_report(&report);
    }
    if report.all_passed() {
        0
    } else {
        1
    }
}

fn print_validation_report(report: &ValidationReport) {
    println!("response: {}", report.prf_name);
    let eps: Vec<String> = report.eps_list.iter().map(|e| format!("{e}")).collect();
    println!(
        "grid: {} phases x strengths [{}], tolerance {:e}",
        report.phi_count,
        eps.join(", "),
        report.tolerance
    );
    for check in &report.checks {
        let status = if check.passed { "pass" } else { "FAIL" };
        let heuristic = if check.heuristic { " (heuristic)" } else { "" };
        let location = match check.location {
            Some((phi, eps)) => format!(" at phi = {phi}, eps = {eps}"),
            None => String::new(),
        };
        let note = match &check.note {
            Some(n) => format!("; {n}"),
            None => String::new(),
        };
        println!(
            "  {status}  {}{heuristic}: worst {:e}{location}{note}",
            check.axiom.label(),
            check.worst_violation
        );
    }
    println!("{}", report.summary());
}

fn cmd_classify(args: &ClassifyArgs) -> i32 {
    let prf = match resolve_spec(&args.prf) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let eps_list = match parse_strength_list(&args.eps_list) {
        Ok(l) => l,
        Err(code) => return code,
    };
    if let Err(code) = gate_expression(&prf, &eps_list) {
        return code;
    }
    let mut config = FullReportConfig::default();
    if let Some(probe) = args.probe {
        config.probe = probe;
    }
    let report = match full_report_with(&prf, &eps_list, &config) {
        Ok(r) => r,
        Err(e) => return report_error(&e),
    };
    if args.json {
        print_json(&report)
    } else {
        print_full_report(&report);
        0
    }
}

fn print_full_report(report: &FullReport) {
    println!(
        "response `{}` with linearization `{}`",
        report.prf_name, report.infinitesimal_name
    );
    println!(
        "corner slopes at zero strength: m0 = {}, m1 = {} (verdict {}, very strong: {})",
        report.corner.mixed_corner_zero,
        report.corner.mixed_corner_one,
        report.corner.verdict,
        if report.corner.very_strong {
            "yes"
        } else {
            "no"
        }
    );
    for (exact, tilde) in report.exact.iter().zip(&report.infinitesimal) {
        println!("strength {}:", exact.eps.value());
        for (label, side) in [("response", exact), ("linearization", tilde)] {
            let empirical = match &side.empirical_verdict {
                Some(v) => format!("{v}"),
                None => String::from("-"),
            };
            let combined = match &side.combined {
                Some(v) => format!("{v}"),
                None => String::from("-"),
            };
            println!(
                "  {label}: product = {}, strong = {}, empirical = {empirical}, combined = {combined}",
                side.derivative_product, side.strong_verdict
            );
        }
    }
    let mut disagreements = 0;
    for note in &report.notes {
        match note {
            ReportNote::Disagreement {
                eps,
                exact,
                infinitesimal,
            } => {
                disagreements += 1;
                println!(
                    "DISAGREEMENT at strength {eps}: response {exact}, linearization {infinitesimal}"
                );
            }
            ReportNote::VeryStrongTransfer {
                eps,
                strongly_attracting,
                derivative_product,
            } => {
                println!(
                    "very strong corner attraction at strength {eps}: strongly attracting = {}, product = {derivative_product}",
                    if *strongly_attracting { "yes" } else { "no" }
                );
            }
            ReportNote::InfinitesimalWarnings { warnings } => {
                for w in warnings {
                    println!("linearization warning: {w}");
                }
            }
        }
    }
    if disagreements == 0 {
        println!("response and linearization agree at every sampled strength");
    }
}

fn cmd_iterate(args: &IterateArgs) -> i32 {
    let prf = match resolve_spec(&args.prf) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let eps = match strength_arg(args.eps) {
        Ok(e) => e,
        Err(code) => return code,
    };
    if let Err(code) = gate_expression(&prf, &[eps]) {
        return code;
    }
    let phi0 = match parse_phase(args.phi0) {
        Ok(p) => p,
        Err(code) => return code,
    };
    println!("k,phi");
    match args.tol {
        None => {
            // Fixed step count: every row is printed, no early stop.
            let steps = args.max_iters.unwrap_or(1000);
            let trace = match run_map(&prf, phi0, eps, steps) {
                Ok(t) => t,
                Err(e) => return report_error(&e),
            };
            for (k, phi) in trace.iter().enumerate() {
                println!("{k},{}", phi.value());
            }
        }
        Some(tol) => {
            let max_iters = args.max_iters.unwrap_or(DEFAULT_MAX_ITERS);
            let trace = match iterate(&prf, phi0, eps, max_iters, tol) {
                Ok(t) => t,
                Err(e) => return report_error(&e),
            };
            for (k, phi) in trace.phases.iter().enumerate() {
                println!("{k},{}", phi.value());
            }
            eprintln!(
                "verdict: {} after {} iterations",
                trace.verdict, trace.iters_used
            );
        }
    }
    0
}

fn cmd_sweep(args: &SweepArgs) -> i32 {
    let prf = match resolve_spec(&args.prf) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let eps_values = match parse_strength_range(&args.eps_range) {
        Ok(v) => v,
        Err(code) => return code,
    };
    if let Err(code) = gate_expression(&prf, &eps_values) {
        return code;
    }
    let phi0 = match parse_phase(args.phi0) {
        Ok(p) => p,
        Err(code) => return code,
    };
    println!("eps,verdict,iters,final_phi");
    for eps in eps_values {
        let trace = match iterate(&prf, phi0, eps, DEFAULT_MAX_ITERS, DEFAULT_CONV_TOL) {
            Ok(t) => t,
            Err(e) => return report_error(&e),
        };
        println!(
            "{},{},{},{}",
            eps.value(),
            trace.verdict,
            trace.iters_used,
            trace.final_phase().value()
        );
    }
    0
}

fn cmd_simulate(args: &SimulateArgs) -> i32 {
    let prf = match resolve_spec(&args.prf) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let eps = match strength_arg(args.eps) {
        Ok(e) => e,
        Err(code) => return code,
    };
    if let Err(code) = gate_expression(&prf, &[eps]) {
        return code;
    }
    let phi_a = match parse_phase(args.phi_a) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let phi_b = match parse_phase(args.phi_b) {
        Ok(p) => p,
        Err(code) => return code,
    };
    let log = match simulate_events(&prf, phi_a, phi_b, eps, args.cycles) {
        Ok(l) => l,
        Err(e) => return report_error(&e),
    };
    println!("time,firer,phase_other_before,phase_other_after");
    for event in &log.events {
        println!(
            "{},{},{},{}",
            event.time,
            event.firer,
            event.phase_other_before.value(),
            event.phase_other_after.value()
        );
    }
    if let Some(t) = log.synchronous_at {
        eprintln!("oscillators synchronized exactly at t = {t}");
    }
    0
}
