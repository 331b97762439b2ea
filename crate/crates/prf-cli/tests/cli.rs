//! End-to-end checks of the `prf` binary: exit codes, CSV shapes, JSON
//! schema, and byte-for-byte determinism.

use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_prf"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        output.status.code().expect("exit code present"),
        String::from_utf8(output.stdout).expect("stdout is utf-8"),
        String::from_utf8(output.stderr).expect("stderr is utf-8"),
    )
}

#[test]
fn validate_passes_a_builtin_and_grades_exit_codes() {
    let (code, stdout, _) = run(&["validate", "--prf", "theta", "--eps-list", "0.1,1,5"]);
    assert_eq!(code, 0, "theta validates cleanly:\n{stdout}");
    assert!(
        stdout.contains("all 6 axiom checks passed"),
        "summary line missing:\n{stdout}"
    );

    let (code, stdout, _) = run(&["validate", "--prf", "expr:eps"]);
    assert_eq!(code, 1, "a non-response exits 1:\n{stdout}");
    assert!(
        stdout.contains("FAIL"),
        "failed checks are marked:\n{stdout}"
    );

    let (code, _, stderr) = run(&["validate", "--prf", "expr:phi +"]);
    assert_eq!(code, 2, "a parse error exits 2:\n{stderr}");
    assert!(
        stderr.contains("parse error at byte"),
        "position reported:\n{stderr}"
    );
}

#[test]
fn unknown_builtin_name_is_a_usage_error() {
    let (code, _, stderr) = run(&["validate", "--prf", "nope"]);
    assert_eq!(code, 2);
    assert!(
        stderr.contains("unknown response") && stderr.contains("theta"),
        "error names the alternatives:\n{stderr}"
    );
}

#[test]
fn iterate_fixed_step_prints_header_and_every_row() {
    let (code, stdout, _) = run(&[
        "iterate",
        "--prf",
        "theta",
        "--phi0",
        "0.3",
        "--eps",
        "1",
        "--max-iters",
        "10",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines.len(), 12, "header plus eleven rows:\n{stdout}");
    assert_eq!(lines[0], "k,phi");
    for (i, line) in lines[1..].iter().enumerate() {
        let (k, phi) = line.split_once(',').expect("two columns");
        assert_eq!(k.parse::<usize>().unwrap(), i);
        let phi: f64 = phi.parse().unwrap();
        assert!(
            (phi - 0.3).abs() <= 1e-9,
            "theta keeps the phase fixed, row {i} has {phi}"
        );
    }
}

#[test]
fn iterate_default_run_decreases_toward_synchrony() {
    let (code, stdout, _) = run(&[
        "iterate",
        "--prf",
        "theta-tilde",
        "--phi0",
        "0.1",
        "--eps",
        "0.5",
    ]);
    assert_eq!(code, 0);
    let phis: Vec<f64> = stdout
        .lines()
        .skip(1)
        .map(|l| l.split_once(',').unwrap().1.parse().unwrap())
        .collect();
    assert_eq!(phis.len(), 1001, "default budget is 1000 steps");
    for pair in phis.windows(2) {
        assert!(
            pair[1] < pair[0],
            "linearized map creeps down: {} then {}",
            pair[0],
            pair[1]
        );
    }
}

#[test]
fn iterate_with_tolerance_reports_the_verdict_on_stderr() {
    let (code, stdout, stderr) = run(&[
        "iterate", "--prf", "example1", "--phi0", "0.2", "--eps", "0.5", "--tol", "1e-12",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.starts_with("k,phi"), "CSV on stdout:\n{stdout}");
    assert!(
        stderr.contains("verdict: converged-to-interior"),
        "diagnostics on stderr:\n{stderr}"
    );
}

#[test]
fn simulate_uncoupled_oscillators_alternate_fixed_gaps() {
    let (code, stdout, _) = run(&[
        "simulate", "--prf", "zero", "--phiA", "0", "--phiB", "0.7", "--eps", "0", "--cycles", "3",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "time,firer,phase_other_before,phase_other_after");
    assert_eq!(lines.len(), 7, "six events:\n{stdout}");
    let expected_times = [0.3, 1.0, 1.3, 2.0, 2.3, 3.0];
    let expected_firers = ["B", "A", "B", "A", "B", "A"];
    for (i, line) in lines[1..].iter().enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        let time: f64 = cols[0].parse().unwrap();
        assert!(
            (time - expected_times[i]).abs() <= 1e-12,
            "event {i} at {time}, expected {}",
            expected_times[i]
        );
        assert_eq!(cols[1], expected_firers[i], "event {i} firer");
    }
}

#[test]
fn classify_json_is_parseable_with_stable_keys() {
    let (code, stdout, _) = run(&[
        "classify",
        "--prf",
        "example2",
        "--eps-list",
        "0.1",
        "--json",
    ]);
    assert_eq!(code, 0);
    let report: serde_json::Value = serde_json::from_str(&stdout).expect("valid JSON");
    assert_eq!(report["prf_name"], "example2");
    assert_eq!(report["corner"]["verdict"], "strongly-attracting-small-eps");
    assert_eq!(report["exact"][0]["strong_verdict"], "strongly-repelling");
    assert_eq!(
        report["infinitesimal"][0]["strong_verdict"],
        "strongly-attracting"
    );
    let notes = report["notes"].as_array().expect("notes array");
    assert!(
        notes.iter().any(|n| n["kind"] == "disagreement"),
        "disagreement note present: {notes:?}"
    );
}

#[test]
fn identical_invocations_are_byte_identical() {
    let args = ["classify", "--prf", "theta", "--eps-list", "0.5,1"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first, second, "classify output is deterministic");

    let args = [
        "sweep",
        "--prf",
        "example2",
        "--eps-range",
        "0.1:1:5",
        "--phi0",
        "0.25",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first, second, "sweep output is deterministic");
}

#[test]
fn sweep_emits_one_row_per_strength() {
    let (code, stdout, _) = run(&[
        "sweep",
        "--prf",
        "example2",
        "--eps-range",
        "0.1:1:5",
        "--phi0",
        "0.25",
    ]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "eps,verdict,iters,final_phi");
    assert_eq!(lines.len(), 6, "five strengths:\n{stdout}");
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 4, "four columns: {line}");
    }
}

#[test]
fn expression_gate_rejects_invalid_strengths() {
    // A scaled sine response is fine at small strengths but exceeds the
    // allowed band at strength 5, so gated commands must refuse it there.
    let src = "expr:(eps/3.141592653589793)*sin(phi*3.141592653589793)^2";
    let (code, _, _) = run(&["iterate", "--prf", src, "--phi0", "0.3", "--eps", "0.5"]);
    assert_eq!(code, 0, "valid at strength 0.5");
    let (code, _, stderr) = run(&["iterate", "--prf", src, "--phi0", "0.3", "--eps", "5"]);
    assert_eq!(code, 2, "gate rejects strength 5:\n{stderr}");
    assert!(
        stderr.contains("axiom checks failed"),
        "gate names the failure:\n{stderr}"
    );
}

#[test]
fn reproduce_cases_pass_and_reject_unknown_names() {
    let (code, stdout, _) = run(&["reproduce", "--case", "theta-identity"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(
        stdout.contains("all 4 checks passed"),
        "summary line:\n{stdout}"
    );

    let (code, _, stderr) = run(&["reproduce", "--case", "nope"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("unknown case"), "{stderr}");
}
