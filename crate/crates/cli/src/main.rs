mod commands;
mod spec;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use pointopt::Error;
use serde_json::json;

use crate::commands::Output;
use crate::spec::{Cli, Command, Format, RunSpec};

const WORKERS_VAR: &str = "POINTOPT_WORKERS";

/// Exit status for an invalid run spec (clap uses the same code).
const EXIT_USAGE: u8 = 2;
const EXIT_SOLVER: u8 = 1;

fn init_workers() -> Result<(), Error> {
    let Ok(raw) = std::env::var(WORKERS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Argument(format!("{WORKERS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Solver(format!("cannot start {n} workers: {e}")))
}

fn run(command: &Command, spec: &mut RunSpec) -> Result<Output, Error> {
    init_workers()?;
    let a = command.args();
    match command {
        Command::Spectrum(_) => commands::spectrum(a, spec),
        Command::Optimize(_) => commands::optimize(a, spec),
        Command::Verify(_) => commands::verify(a, spec),
        Command::ConjectureScan(_) => commands::conjecture_scan_cmd(a, spec),
        Command::DesignCheck(_) => commands::design_check(a, spec),
        Command::Asymptotics(_) => commands::asymptotics(a, spec),
    }
}

fn render(spec: &RunSpec, out: &Output) -> String {
    match spec.format {
        Format::Json => {
            let doc = json!({ "run_spec": spec, "result": out.result });
            let mut s = serde_json::to_string_pretty(&doc).expect("output serializes");
            s.push('\n');
            s
        }
        Format::Csv => format!(
            "# run_spec: {}\n{}",
            serde_json::to_string(spec).expect("run spec serializes"),
            out.csv
        ),
    }
}

/// Temp file in the target directory, then rename: readers never see a
/// partial artifact.
fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn error_kind(e: &Error) -> (&'static str, u8) {
    match e {
        Error::Argument(_) | Error::Domain(_) | Error::UnsupportedN(_) => ("usage", EXIT_USAGE),
        Error::Pole { .. } => ("pole", EXIT_SOLVER),
        Error::NoBoundState { .. } => ("no-bound-state", EXIT_SOLVER),
        Error::Solver(_) => ("solver", EXIT_SOLVER),
        Error::Sampling { .. } => ("sampling", EXIT_SOLVER),
    }
}

fn fail(spec: &RunSpec, e: &Error) -> ExitCode {
    let (kind, code) = error_kind(e);
    report(spec, kind, code, &e.to_string())
}

fn report(spec: &RunSpec, kind: &str, code: u8, message: &str) -> ExitCode {
    let doc = json!({
        "run_spec": spec,
        "error": { "kind": kind, "message": message },
    });
    eprintln!("{}", serde_json::to_string(&doc).expect("error serializes"));
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut spec = RunSpec::base(&cli.command);
    let out = match run(&cli.command, &mut spec) {
        Ok(out) => out,
        Err(e) => return fail(&spec, &e),
    };
    let text = render(&spec, &out);
    match &cli.command.args().out {
        Some(path) => {
            if let Err(e) = write_atomic(path, &text) {
                return report(
                    &spec,
                    "io",
                    EXIT_SOLVER,
                    &format!("cannot write {}: {e}", path.display()),
                );
            }
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_SOLVER);
            }
        }
    }
    eprintln!("{}", out.summary);
    ExitCode::SUCCESS
}
