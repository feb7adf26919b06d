//! Command-line harness: argument and config handling, command execution,
//! manifest rendering and persistence.

pub mod args;
pub mod commands;
pub mod config;
pub mod manifest;

use std::ffi::OsString;
use std::io::Write;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use clap::Parser;

use crate::args::{Cli, Format};
use crate::commands::{execute, Outcome};
use crate::manifest::{persist, results_dir, Body, Header, Manifest, TOOL};

pub const EXIT_USAGE: i32 = 1;

/// Wraps a finished command into a manifest with a fresh header.
pub fn build_manifest(outcome: &Outcome, duration_ms: f64) -> Manifest {
    let unix_time_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    Manifest {
        header: Header {
            unix_time_ms,
            duration_ms,
        },
        body: Body {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: outcome.command.into(),
            config: outcome.config.clone(),
            status: outcome.status,
            outputs: outcome.outputs.clone(),
        },
    }
}

fn emit(outcome: &Outcome, manifest: &Manifest, stdout: &mut dyn Write) -> Result<()> {
    let rendered = match outcome.common.format {
        Format::Json => manifest.to_json()?,
        Format::Csv => outcome.table.render()?,
    };
    match &outcome.common.out {
        Some(path) => {
            std::fs::write(path, rendered).with_context(|| format!("writing {}", path.display()))?
        }
        None => stdout.write_all(rendered.as_bytes())?,
    }
    if outcome.common.persist {
        persist(&results_dir(), manifest)?;
    }
    Ok(())
}

/// Runs the CLI and returns the process exit code: 0 success, 1 usage or
/// configuration error, 2 falsification, 3 resource cap reached.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let target: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(target, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    let start = Instant::now();
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let manifest = build_manifest(&outcome, start.elapsed().as_secs_f64() * 1e3);
    if let Err(e) = emit(&outcome, &manifest, stdout) {
        let _ = writeln!(stderr, "error: {e:#}");
        return EXIT_USAGE;
    }
    let code = outcome.status.exit_code();
    if code != 0 {
        let _ = writeln!(stderr, "{}: status {:?}", outcome.command, outcome.status);
    }
    code
}
