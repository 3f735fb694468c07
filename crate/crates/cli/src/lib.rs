//! Command-line front end for `ferrogate`.
//!
//! Every command computes its outputs in memory, then [`run`] writes them
//! into the output directory together with a `run_metadata.json` that
//! holds the only wall-clock information. Data files depend on the inputs
//! alone.

pub mod commands;
pub mod config;
mod error;
pub mod output;

use std::fs;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use ferrogate::pulseprog::{parse_schedule_with_warnings, Schedule};

pub use config::{Command, Format, RunConfig, SweepAxis, SweepTarget, CONFIG_ENV, TARGET_THETA};
pub use error::CliError;

use commands::*;
use output::extension;

/// Files written by one run, and what the command printed.
#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub messages: Vec<String>,
    pub warnings: Vec<String>,
}

/// Loads the configured schedule, if any, returning parser warnings as
/// text.
pub fn load_schedule(cfg: &RunConfig) -> Result<Option<(Schedule, Vec<String>)>, CliError> {
    let Some(path) = &cfg.schedule_path else {
        return Ok(None);
    };
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let (s, w) = parse_schedule_with_warnings(&text).map_err(|e| CliError {
        path: Some(path.clone()),
        ..CliError::from(e)
    })?;
    let warnings = w
        .into_iter()
        .map(|w| format!("{}:{}: {}", path.display(), w.line, w.message))
        .collect();
    Ok(Some((s, warnings)))
}

/// Computes a command's outputs without writing anything.
pub fn execute(cfg: &RunConfig) -> Result<(Output, Vec<String>), CliError> {
    let loaded = load_schedule(cfg)?;
    if cfg.command.needs_schedule() && loaded.is_none() {
        return Err(CliError::usage(format!(
            "`{}` needs a schedule: pass --schedule PATH or set {CONFIG_ENV} (`ferrogate template` writes one)",
            cfg.command.name()
        )));
    }
    let (schedule, warnings) = loaded.unwrap_or_default();
    let out = match cfg.command {
        Command::Fields => cmd_fields(cfg, &schedule)?,
        Command::Evolve => cmd_evolve(cfg, &schedule)?,
        Command::Exchange => cmd_exchange(cfg, &schedule)?,
        Command::Calibrate => cmd_calibrate(cfg, &schedule)?,
        Command::Register => cmd_register(cfg, &schedule)?,
        Command::Sweep(t) => cmd_sweep(cfg, &schedule, t)?,
        Command::Verify => cmd_verify(cfg)?,
        Command::Template => cmd_template(cfg)?,
    };
    Ok((out, warnings))
}

/// Validates the configuration, runs the command and writes its files.
pub fn run(cfg: &RunConfig) -> Result<RunSummary, CliError> {
    let started = SystemTime::now();
    let clock = Instant::now();
    cfg.validate()?;
    let (out, warnings) = execute(cfg)?;

    let ext = extension(cfg.format);
    let mut named: Vec<(String, Vec<u8>)> = out.files;
    for (stem, t) in &out.tables {
        named.push((format!("{stem}.{ext}"), t.render(cfg.format)));
    }
    if let Some((stem, r)) = &out.report {
        named.push((format!("{stem}.{ext}"), r.render(cfg.format)));
    }
    let mut files = Vec::new();
    for (name, bytes) in &named {
        let path = cfg.out_dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        files.push(path);
    }

    let meta = serde_json::json!({
        "command": cfg.command.name(),
        "version": env!("CARGO_PKG_VERSION"),
        "schedule": cfg.schedule_path.as_ref().map(|p| p.display().to_string()),
        "format": ext,
        "jobs": cfg.jobs,
        "started_unix_s": started.duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
        "elapsed_s": clock.elapsed().as_secs_f64(),
        "files": named.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
        "warnings": warnings,
    });
    let meta_path = cfg.out_dir.join("run_metadata.json");
    fs::write(&meta_path, output::json_bytes(&meta)).map_err(|e| CliError::io(&meta_path, e))?;
    files.push(meta_path);

    if out.failed {
        return Err(CliError::new(
            "verification_failed",
            out.messages.join("; "),
        ));
    }
    Ok(RunSummary {
        files,
        messages: out.messages,
        warnings,
    })
}
