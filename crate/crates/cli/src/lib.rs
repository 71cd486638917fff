//! Experiment runner for the semi-quantum simulator: argument parsing,
//! single runs and n_q sweeps, CSV/JSON/SVG output and a verification suite.

pub mod args;
pub mod output;
pub mod run;
pub mod verify;

pub use args::{
    parse_args, Command, OutputPaths, Parsed, RunConfig, SignalSource, SolutionSpec, UsageError,
};
pub use output::{emit_outputs, render_csv, render_json, render_svg};
pub use run::{run_experiment, ExperimentReport, PointResult, RunError};
pub use verify::{run_verify, VerifyReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// Runs a full command line and returns the process exit code.
pub fn main_with_args<I, S>(
    argv: I,
    out: &mut dyn std::io::Write,
    err: &mut dyn std::io::Write,
) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let config = match parse_args(argv) {
        Ok(Parsed::Run(config)) => config,
        Ok(Parsed::Display(text)) => {
            let _ = write!(out, "{text}");
            return EXIT_OK;
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if config.command == Command::Verify {
        let report = run_verify(&config);
        for c in &report.checks {
            let _ = writeln!(
                out,
                "{} {:<20} {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.detail
            );
        }
        return if report.passed() {
            EXIT_OK
        } else {
            EXIT_VERIFY_FAILED
        };
    }
    let fail = |e: RunError, err: &mut dyn std::io::Write| {
        let _ = writeln!(err, "error: {e}");
        match e {
            RunError::Input(_) => EXIT_USAGE,
            RunError::Io(_) => EXIT_IO,
        }
    };
    let report = match run_experiment(&config) {
        Ok(r) => r,
        Err(e) => return fail(e, err),
    };
    if config.outputs.is_empty() {
        let _ = write!(out, "{}", render_csv(&report));
        return EXIT_OK;
    }
    match emit_outputs(&report, &config) {
        Ok(paths) => {
            for p in paths {
                let _ = writeln!(out, "wrote {}", p.display());
            }
            EXIT_OK
        }
        Err(e) => fail(e, err),
    }
}
