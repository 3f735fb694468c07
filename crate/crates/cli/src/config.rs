use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ferrogate::pulseprog::{parameter_unit, parameter_value, parse_quantity, Dimension};

use crate::CliError;

/// Environment variable naming a default schedule file.
pub const CONFIG_ENV: &str = "FERROGATE_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Commands a sweep can repeat.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepTarget {
    Fields,
    Evolve,
    Exchange,
    Calibrate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Fields,
    Evolve,
    Exchange,
    Calibrate,
    Register,
    Sweep(SweepTarget),
    Verify,
    Template,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Fields => "fields",
            Command::Evolve => "evolve",
            Command::Exchange => "exchange",
            Command::Calibrate => "calibrate",
            Command::Register => "register",
            Command::Sweep(_) => "sweep",
            Command::Verify => "verify",
            Command::Template => "template",
        }
    }

    pub fn needs_schedule(self) -> bool {
        match self {
            Command::Evolve | Command::Exchange | Command::Calibrate | Command::Register => true,
            Command::Sweep(t) => t != SweepTarget::Fields,
            Command::Fields | Command::Verify | Command::Template => false,
        }
    }
}

/// `NAME=START:STOP:COUNT`, with `COUNT` evenly spaced values including
/// both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepAxis {
    pub name: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

/// Sweep name that targets `--target-theta` instead of the schedule.
pub const TARGET_THETA: &str = "target_theta";

impl SweepAxis {
    pub fn parse(spec: &str) -> Result<Self, CliError> {
        let bad = |why: &str| {
            CliError::usage(format!(
                "--sweep `{spec}`: {why} (expected NAME=START:STOP:COUNT)"
            ))
        };
        let (name, range) = spec.split_once('=').ok_or_else(|| bad("missing `=`"))?;
        let parts: Vec<&str> = range.split(':').collect();
        let [start, stop, count] = parts[..] else {
            return Err(bad("need three `:`-separated fields"));
        };
        let value = |tok: &str| -> Result<f64, CliError> {
            if name == TARGET_THETA {
                parse_quantity(tok, Dimension::Angle).map_err(|e| bad(&e.to_string()))
            } else {
                parameter_value(name, tok).map_err(|e| bad(&e.to_string()))
            }
        };
        let count: usize = count.parse().map_err(|_| bad("COUNT is not an integer"))?;
        if count < 1 {
            return Err(bad("COUNT must be >= 1"));
        }
        Ok(SweepAxis {
            name: name.to_string(),
            start: value(start)?,
            stop: value(stop)?,
            count,
        })
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|k| {
                if k + 1 == self.count {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last
                }
            })
            .collect()
    }

    pub fn unit(&self) -> &'static str {
        if self.name == TARGET_THETA {
            "rad"
        } else {
            parameter_unit(&self.name).unwrap_or("")
        }
    }
}

/// Everything one invocation needs, after flags and environment are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub schedule_path: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub format: Format,
    pub sweeps: Vec<SweepAxis>,
    pub jobs: usize,
    pub target_theta: f64,
    pub tolerance: f64,
    pub radius: f64,
    pub theta_only: bool,
    pub reverse: bool,
    pub initial: Option<String>,
    pub qubits: Option<usize>,
}

impl RunConfig {
    pub fn new(command: Command, out_dir: impl Into<PathBuf>) -> Self {
        RunConfig {
            command,
            schedule_path: None,
            out_dir: out_dir.into(),
            format: Format::Csv,
            sweeps: Vec::new(),
            jobs: 1,
            target_theta: std::f64::consts::PI,
            tolerance: 1e-3,
            radius: 0.5e-6,
            theta_only: false,
            reverse: false,
            initial: None,
            qubits: None,
        }
    }

    /// Parses command-line arguments (program name first). `--schedule`
    /// wins over the `FERROGATE_CONFIG` environment variable.
    pub fn from_args<I, T>(args: I) -> Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<OsString> + Clone,
    {
        let cli = Cli::try_parse_from(args)?;
        let o = cli.opts;
        let command = match cli.command {
            Cmd::Fields => Command::Fields,
            Cmd::Evolve => Command::Evolve,
            Cmd::Exchange => Command::Exchange,
            Cmd::Calibrate => Command::Calibrate,
            Cmd::Register => Command::Register,
            Cmd::Sweep { target } => Command::Sweep(target),
            Cmd::Verify => Command::Verify,
            Cmd::Template => Command::Template,
        };
        let schedule_path = o.schedule.or_else(|| {
            std::env::var_os(CONFIG_ENV)
                .filter(|v| !v.is_empty())
                .map(PathBuf::from)
        });
        Ok(RunConfig {
            command,
            schedule_path,
            out_dir: o.out,
            format: o.format,
            sweeps: o.sweep,
            jobs: o.jobs,
            target_theta: o.target_theta,
            tolerance: o.tolerance,
            radius: o.radius,
            theta_only: o.theta_only,
            reverse: o.reverse,
            initial: o.initial,
            qubits: o.qubits,
        })
    }

    /// Checks flag combinations and that the output directory is writable,
    /// creating it if needed.
    pub fn validate(&self) -> Result<(), CliError> {
        if self.jobs < 1 {
            return Err(CliError::usage("--jobs must be >= 1"));
        }
        if let Some(a) = self.sweeps.iter().find(|a| a.count < 1) {
            return Err(CliError::usage(format!(
                "sweep `{}` needs COUNT >= 1",
                a.name
            )));
        }
        match self.command {
            Command::Sweep(_) if !(1..=2).contains(&self.sweeps.len()) => {
                return Err(CliError::usage("sweep needs one or two --sweep axes"));
            }
            Command::Sweep(_) => {}
            _ if !self.sweeps.is_empty() => {
                return Err(CliError::usage(
                    "--sweep is only valid with the sweep command",
                ))
            }
            _ => {}
        }
        if !(self.tolerance > 0.0) {
            return Err(CliError::usage("--tolerance must be > 0"));
        }
        if !self.target_theta.is_finite() {
            return Err(CliError::usage("--target-theta must be finite"));
        }
        fs::create_dir_all(&self.out_dir).map_err(|e| CliError::io(&self.out_dir, e))?;
        let probe = self.out_dir.join(".ferrogate-write-check");
        fs::write(&probe, b"").map_err(|e| CliError::io(&self.out_dir, e))?;
        fs::remove_file(&probe).map_err(|e| CliError::io(&probe, e))?;
        Ok(())
    }
}

fn angle(s: &str) -> Result<f64, String> {
    parse_quantity(s, Dimension::Angle).map_err(|e| e.to_string())
}

fn length(s: &str) -> Result<f64, String> {
    parse_quantity(s, Dimension::Length).map_err(|e| e.to_string())
}

fn axis(s: &str) -> Result<SweepAxis, String> {
    SweepAxis::parse(s).map_err(|e| e.message)
}

#[derive(Parser, Debug)]
#[command(
    name = "ferrogate",
    version,
    about = "Simulate optically gated exchange between ferroelectric quantum dots"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Rectified polarization, displacement-current field and sheet density
    Fields,
    /// Single-electron propagation with wavefunction snapshots
    Evolve,
    /// Exchange trace and swap report for a schedule
    Exchange,
    /// Scale the schedule's pulses to reach --target-theta
    Calibrate,
    /// Run the schedule's gate lines on a spin register
    Register,
    /// Repeat a command over a parameter grid
    Sweep {
        #[arg(value_enum)]
        target: SweepTarget,
    },
    /// Check the reference field and density values
    Verify,
    /// Write the default three-pulse schedule
    Template,
}

#[derive(Args, Debug)]
struct Opts {
    /// Schedule file (.fgs); defaults to $FERROGATE_CONFIG
    #[arg(long, global = true, value_name = "PATH")]
    schedule: Option<PathBuf>,
    /// Output directory
    #[arg(
        long,
        global = true,
        value_name = "DIR",
        default_value = "ferrogate-out"
    )]
    out: PathBuf,
    /// Format of reports and tables
    #[arg(long, global = true, value_enum, default_value = "csv")]
    format: Format,
    /// Sweep axis NAME=START:STOP:COUNT, e.g. well.barrier=0meV:2eV:11
    #[arg(long, global = true, value_name = "NAME=START:STOP:COUNT", value_parser = axis)]
    sweep: Vec<SweepAxis>,
    /// Worker threads for sweeps
    #[arg(long, global = true, value_name = "N", default_value_t = 1)]
    jobs: usize,
    /// Target exchange angle, in rad or with a `pi` suffix
    #[arg(long, global = true, value_name = "X", default_value = "1pi", value_parser = angle)]
    target_theta: f64,
    /// Calibration tolerance on the angle (rad)
    #[arg(long, global = true, value_name = "X", default_value = "1e-3", value_parser = angle)]
    tolerance: f64,
    /// Radius of the illuminated cylinder for `fields`
    #[arg(long, global = true, value_name = "LENGTH", default_value = "0.5um", value_parser = length)]
    radius: f64,
    /// Exchange angle only, without wavefunction propagation
    #[arg(long, global = true)]
    theta_only: bool,
    /// Mirror the schedule in time before running
    #[arg(long, global = true)]
    reverse: bool,
    /// Initial register spins as u/d characters, qubit 0 first
    #[arg(long, global = true, value_name = "SPINS")]
    initial: Option<String>,
    /// Register size (defaults to the highest gate index + 1)
    #[arg(long, global = true, value_name = "N")]
    qubits: Option<usize>,
}
