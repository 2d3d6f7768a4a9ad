//! Command-line front end for `kaon-core`.
//!
//! ```text
//! kaon-teleport <teleport|swap|general|verify> [--config PATH] [--force] [--<key> VALUE]...
//! ```
//!
//! Every configuration key is also a flag (`t_m_start` → `--t-m-start`);
//! flags override the file. Exit codes: 0 ok, 1 verification failure, 2
//! configuration error, 3 I/O error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Arg, ArgAction, Command};

pub mod config;
pub mod format;
pub mod run;
pub mod verify;

pub use config::{RunConfig, RunMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("output directory {} already exists; pass --force to write into it", .0.display())]
    OutputExists(PathBuf),
    #[error("invalid setup: {0}")]
    Setup(#[from] kaon_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Setup(_) => EXIT_CONFIG,
            CliError::Io { .. } | CliError::OutputExists(_) => EXIT_IO,
        }
    }
}

fn flag_name(key: &str) -> String {
    key.replace('_', "-")
}

pub fn command() -> Command {
    let mut cmd = Command::new("kaon-teleport")
        .about("Stochastic teleportation and entanglement swapping with neutral kaons")
        .arg(
            Arg::new("mode")
                .required(true)
                .value_parser(["teleport", "swap", "general", "verify"])
                .help("Protocol to simulate, or `verify` for the invariant suite"),
        )
        .arg(Arg::new("config").long("config").value_name("PATH").help("Flat `key = value` configuration file"))
        .arg(Arg::new("force").long("force").action(ArgAction::SetTrue).help("Write into an existing output directory"));
    for key in config::KEYS.iter().filter(|k| **k != "mode") {
        let mut arg = Arg::new(*key).long(flag_name(key)).value_name("VALUE").allow_hyphen_values(true);
        arg = match *key {
            "n_runs" => arg.alias("runs"),
            "out_dir" => arg.alias("out"),
            _ => arg,
        };
        cmd = cmd.arg(arg);
    }
    cmd
}

/// The configuration selected by a command line, plus `--force`.
pub fn load_config(matches: &clap::ArgMatches) -> Result<(RunConfig, bool), CliError> {
    let mode: RunMode = matches
        .get_one::<String>("mode")
        .expect("mode is required")
        .parse()
        .map_err(CliError::Config)?;
    let mut entries = match matches.get_one::<String>("config") {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
            config::parse_entries(&text)?
        }
        None => BTreeMap::new(),
    };
    for key in config::KEYS.iter().filter(|k| **k != "mode") {
        if let Some(v) = matches.get_one::<String>(key) {
            entries.insert((*key).to_string(), v.clone());
        }
    }
    Ok((RunConfig::from_entries(&entries, Some(mode))?, matches.get_flag("force")))
}

fn execute(cfg: &RunConfig, force: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let stdout_err = |source| CliError::Io { path: "<stdout>".into(), source };
    if cfg.mode == RunMode::Verify {
        let checks = verify::run_checks(cfg.seed);
        out.write_all(verify::render(&checks).as_bytes()).map_err(stdout_err)?;
        return Ok(if checks.iter().all(|c| c.passed) { EXIT_OK } else { EXIT_VERIFY_FAILED });
    }
    let summary = run::run_protocol(cfg, force)?;
    for (k, v) in summary.lines.iter().filter(|(k, _)| k.starts_with("check.") || k.starts_with("prob.")) {
        writeln!(out, "{k}={v}").map_err(stdout_err)?;
    }
    writeln!(out, "wrote {}", summary.out_dir.display()).map_err(stdout_err)?;
    Ok(EXIT_OK)
}

/// Entry point shared by the binary and the tests; returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = match command().try_get_matches_from(args) {
        Ok(m) => m,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let result = load_config(&matches).and_then(|(cfg, force)| execute(&cfg, force, out));
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
