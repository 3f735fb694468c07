use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::optics::EnvelopeShape;
use crate::spinreg::ExchangeEvent;

use super::{DeviceSpec, GridSpec, PulseSpec, Schedule, WellSpec};

/// Non-fatal parser diagnostic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Warning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Time,
    Length,
    Power,
    Frequency,
    Angle,
    Energy,
    Plain,
}

impl Dimension {
    /// Symbol of the SI unit values of this dimension are stored in.
    pub fn si_unit(self) -> &'static str {
        match self {
            Dimension::Time => "s",
            Dimension::Length => "m",
            Dimension::Power => "W",
            Dimension::Frequency => "Hz",
            Dimension::Angle => "rad",
            Dimension::Energy => "J",
            Dimension::Plain => "1",
        }
    }

    fn name(self) -> &'static str {
        match self {
            Dimension::Time => "time",
            Dimension::Length => "length",
            Dimension::Power => "power",
            Dimension::Frequency => "frequency",
            Dimension::Angle => "angle",
            Dimension::Energy => "energy",
            Dimension::Plain => "dimensionless",
        }
    }

    fn factor(self, unit: &str) -> Option<f64> {
        let f = match (self, unit) {
            (_, "") => 1.0,
            (Dimension::Time, "s") => 1.0,
            (Dimension::Time, "ms") => 1e-3,
            (Dimension::Time, "us") => 1e-6,
            (Dimension::Time, "ns") => 1e-9,
            (Dimension::Time, "ps") => 1e-12,
            (Dimension::Time, "fs") => 1e-15,
            (Dimension::Length, "m") => 1.0,
            (Dimension::Length, "mm") => 1e-3,
            (Dimension::Length, "um") => 1e-6,
            (Dimension::Length, "nm") => 1e-9,
            (Dimension::Length, "pm") => 1e-12,
            (Dimension::Power, "W") => 1.0,
            (Dimension::Power, "mW") => 1e-3,
            (Dimension::Power, "uW") => 1e-6,
            (Dimension::Frequency, "Hz") => 1.0,
            (Dimension::Frequency, "kHz") => 1e3,
            (Dimension::Frequency, "MHz") => 1e6,
            (Dimension::Frequency, "GHz") => 1e9,
            (Dimension::Angle, "rad") => 1.0,
            (Dimension::Angle, "pi") => std::f64::consts::PI,
            (Dimension::Energy, "J") => 1.0,
            (Dimension::Energy, "eV") => crate::physcore::E_CHARGE,
            (Dimension::Energy, "meV") => 1e-3 * crate::physcore::E_CHARGE,
            _ => return None,
        };
        Some(f)
    }
}

fn quantity(token: &str, dim: Dimension) -> std::result::Result<f64, String> {
    let number = token.trim_end_matches(|c: char| c.is_alphabetic());
    let unit = &token[number.len()..];
    let factor = dim
        .factor(unit)
        .ok_or_else(|| format!("unit `{unit}` in `{token}` is not a {} unit", dim.name()))?;
    let v: f64 = number
        .parse()
        .map_err(|_| format!("malformed number `{token}`"))?;
    let v = v * factor;
    if !v.is_finite() {
        return Err(format!("value `{token}` is not finite"));
    }
    Ok(v)
}

/// Key-value pairs of one directive, last occurrence winning.
struct Fields<'a> {
    line: usize,
    keyword: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn parse(
        line: usize,
        keyword: &'a str,
        tokens: &[&'a str],
        allowed: &[&str],
        warnings: &mut Vec<Warning>,
    ) -> Result<Self> {
        let mut pairs: Vec<(&str, &str)> = Vec::new();
        for tok in tokens {
            let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse {
                line,
                message: format!("expected key=value, got `{tok}`"),
            })?;
            if !allowed.contains(&k) {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown key `{k}` for `{keyword}`"),
                });
            }
            if v.is_empty() {
                return Err(Error::Parse {
                    line,
                    message: format!("empty value for key `{k}`"),
                });
            }
            if let Some(slot) = pairs.iter_mut().find(|(pk, _)| *pk == k) {
                warnings.push(Warning {
                    line,
                    message: format!("duplicate key `{k}`; using the last value `{v}`"),
                });
                slot.1 = v;
            } else {
                pairs.push((k, v));
            }
        }
        Ok(Fields {
            line,
            keyword,
            pairs,
        })
    }

    fn raw(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn err(&self, message: String) -> Error {
        Error::Parse {
            line: self.line,
            message,
        }
    }

    fn opt(&self, key: &str, dim: Dimension) -> Result<Option<f64>> {
        self.raw(key)
            .map(|v| quantity(v, dim).map_err(|m| self.err(format!("`{key}`: {m}"))))
            .transpose()
    }

    fn set(&self, slot: &mut f64, key: &str, dim: Dimension) -> Result<()> {
        if let Some(v) = self.opt(key, dim)? {
            *slot = v;
        }
        Ok(())
    }

    fn req(&self, key: &str, dim: Dimension) -> Result<f64> {
        self.opt(key, dim)?.ok_or_else(|| {
            self.err(format!(
                "missing required key `{key}` for `{}`",
                self.keyword
            ))
        })
    }

    fn count(&self, key: &str) -> Result<Option<usize>> {
        self.raw(key)
            .map(|v| {
                v.parse::<usize>().map_err(|_| {
                    self.err(format!(
                        "`{key}`: expected a non-negative integer, got `{v}`"
                    ))
                })
            })
            .transpose()
    }

    fn set_count(&self, slot: &mut usize, key: &str) -> Result<()> {
        if let Some(v) = self.count(key)? {
            *slot = v;
        }
        Ok(())
    }
}

const DEVICE_KEYS: &[&str] = &[
    "r",
    "n_index",
    "p_s",
    "mass_ratio",
    "i_avg",
    "d",
    "rep_rate",
    "tau",
    "lever_arm",
    "eps_r",
    "softening",
    "coulomb",
];
const GRID_KEYS: &[&str] = &[
    "x_min",
    "x_max",
    "n",
    "exchange_x_min",
    "exchange_x_max",
    "exchange_n",
    "t_start",
    "t_end",
    "dt",
    "j_samples",
    "refine",
    "leakage_threshold",
    "edge_limit",
    "snapshots",
];
const WELL_KEYS: &[&str] = &[
    "depth",
    "x0",
    "width",
    "barrier",
    "barrier_width",
    "channel",
    "channel_half_length",
    "channel_edge",
];
const PULSE_KEYS: &[&str] = &["t0", "x0", "sigma_x", "tau", "scale", "polarity", "shape"];
const GATE_KEYS: &[&str] = &["i", "j", "theta"];

fn device(f: &Fields) -> Result<DeviceSpec> {
    let mut d = DeviceSpec::default();
    f.set(&mut d.r, "r", Dimension::Plain)?;
    f.set(&mut d.n_index, "n_index", Dimension::Plain)?;
    f.set(&mut d.p_s, "p_s", Dimension::Plain)?;
    f.set(&mut d.mass_ratio, "mass_ratio", Dimension::Plain)?;
    f.set(&mut d.i_avg, "i_avg", Dimension::Power)?;
    f.set(&mut d.d, "d", Dimension::Length)?;
    f.set(&mut d.rep_rate, "rep_rate", Dimension::Frequency)?;
    f.set(&mut d.tau, "tau", Dimension::Time)?;
    f.set(&mut d.lever_arm, "lever_arm", Dimension::Plain)?;
    f.set(&mut d.eps_r, "eps_r", Dimension::Plain)?;
    f.set(&mut d.softening, "softening", Dimension::Length)?;
    f.set(&mut d.coulomb, "coulomb", Dimension::Plain)?;
    Ok(d)
}

fn grid(f: &Fields) -> Result<GridSpec> {
    let mut g = GridSpec::default();
    f.set(&mut g.x_min, "x_min", Dimension::Length)?;
    f.set(&mut g.x_max, "x_max", Dimension::Length)?;
    f.set_count(&mut g.n, "n")?;
    f.set(&mut g.exchange_x_min, "exchange_x_min", Dimension::Length)?;
    f.set(&mut g.exchange_x_max, "exchange_x_max", Dimension::Length)?;
    f.set_count(&mut g.exchange_n, "exchange_n")?;
    f.set(&mut g.t_start, "t_start", Dimension::Time)?;
    f.set(&mut g.t_end, "t_end", Dimension::Time)?;
    f.set(&mut g.dt, "dt", Dimension::Time)?;
    f.set_count(&mut g.j_samples, "j_samples")?;
    f.set_count(&mut g.refine, "refine")?;
    f.set(
        &mut g.leakage_threshold,
        "leakage_threshold",
        Dimension::Plain,
    )?;
    f.set(&mut g.edge_limit, "edge_limit", Dimension::Plain)?;
    if f.raw("snapshots") == Some("none") {
        g.snapshots.clear();
    } else if let Some(list) = f.raw("snapshots") {
        g.snapshots = list
            .split(',')
            .map(|t| quantity(t, Dimension::Time).map_err(|m| f.err(format!("`snapshots`: {m}"))))
            .collect::<Result<_>>()?;
    }
    Ok(g)
}

fn well(f: &Fields) -> Result<WellSpec> {
    let mut w = WellSpec::default();
    f.set(&mut w.depth, "depth", Dimension::Energy)?;
    f.set(&mut w.x0, "x0", Dimension::Length)?;
    f.set(&mut w.width, "width", Dimension::Length)?;
    f.set(&mut w.barrier, "barrier", Dimension::Energy)?;
    f.set(&mut w.barrier_width, "barrier_width", Dimension::Length)?;
    f.set(&mut w.channel, "channel", Dimension::Energy)?;
    f.set(
        &mut w.channel_half_length,
        "channel_half_length",
        Dimension::Length,
    )?;
    f.set(&mut w.channel_edge, "channel_edge", Dimension::Length)?;
    Ok(w)
}

fn pulse(f: &Fields) -> Result<PulseSpec> {
    // malformed values are reported before missing keys
    let dims = [
        ("t0", Dimension::Time),
        ("x0", Dimension::Length),
        ("sigma_x", Dimension::Length),
        ("tau", Dimension::Time),
        ("scale", Dimension::Plain),
    ];
    for (k, d) in dims {
        f.opt(k, d)?;
    }
    let scale = f.req("scale", Dimension::Plain)?;
    if scale < 0.0 {
        return Err(f.err(format!(
            "`scale` must be >= 0, got `{}`",
            f.raw("scale").unwrap_or_default()
        )));
    }
    let polarity = f.opt("polarity", Dimension::Plain)?.unwrap_or(1.0);
    if polarity != 1.0 && polarity != -1.0 {
        return Err(f.err(format!(
            "`polarity` must be +1 or -1, got `{}`",
            f.raw("polarity").unwrap_or_default()
        )));
    }
    let shape = match f.raw("shape") {
        None | Some("gaussian") => EnvelopeShape::Gaussian,
        Some("rectangular") => EnvelopeShape::Rectangular,
        Some(other) => {
            return Err(f.err(format!(
                "`shape` must be gaussian or rectangular, got `{other}`"
            )))
        }
    };
    Ok(PulseSpec {
        t0: f.req("t0", Dimension::Time)?,
        x0: f.req("x0", Dimension::Length)?,
        sigma_x: f.req("sigma_x", Dimension::Length)?,
        tau: f.req("tau", Dimension::Time)?,
        scale,
        polarity,
        shape,
    })
}

fn gate(f: &Fields) -> Result<ExchangeEvent> {
    let missing = |k: &str| f.err(format!("missing required key `{k}` for `gate`"));
    let i = f.count("i")?.ok_or_else(|| missing("i"))?;
    let j = f.count("j")?.ok_or_else(|| missing("j"))?;
    if i == j {
        return Err(f.err(format!("gate pairs qubit {i} with itself")));
    }
    Ok(ExchangeEvent::new(i, j, f.req("theta", Dimension::Angle)?))
}

/// Parses schedule text, returning duplicate-key warnings alongside.
pub fn parse_schedule_with_warnings(text: &str) -> Result<(Schedule, Vec<Warning>)> {
    let mut s = Schedule::default();
    let mut warnings = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&keyword, rest)) = tokens.split_first() else {
            continue;
        };
        let once = |present: bool| {
            if present {
                Err(Error::Parse {
                    line,
                    message: format!("more than one `{keyword}` block"),
                })
            } else {
                Ok(())
            }
        };
        match keyword {
            "device" => {
                once(s.device.is_some())?;
                s.device = Some(device(&Fields::parse(
                    line,
                    keyword,
                    rest,
                    DEVICE_KEYS,
                    &mut warnings,
                )?)?);
            }
            "grid" => {
                once(s.grid.is_some())?;
                s.grid = Some(grid(&Fields::parse(
                    line,
                    keyword,
                    rest,
                    GRID_KEYS,
                    &mut warnings,
                )?)?);
            }
            "well" => {
                once(s.well.is_some())?;
                s.well = Some(well(&Fields::parse(
                    line,
                    keyword,
                    rest,
                    WELL_KEYS,
                    &mut warnings,
                )?)?);
            }
            "pulse" => s.pulses.push(pulse(&Fields::parse(
                line,
                keyword,
                rest,
                PULSE_KEYS,
                &mut warnings,
            )?)?),
            "gate" => s.gates.push(gate(&Fields::parse(
                line,
                keyword,
                rest,
                GATE_KEYS,
                &mut warnings,
            )?)?),
            other => {
                return Err(Error::Parse {
                    line,
                    message: format!("unknown keyword `{other}`"),
                })
            }
        }
    }
    s.sort_pulses();
    Ok((s, warnings))
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    parse_schedule_with_warnings(text).map(|(s, _)| s)
}

/// Parses arbitrary bytes; invalid UTF-8 is replaced before parsing.
pub fn parse_schedule_bytes(bytes: &[u8]) -> Result<Schedule> {
    parse_schedule(&String::from_utf8_lossy(bytes))
}

/// Canonical text form: every key written, SI values without unit suffixes.
pub fn serialize_schedule(s: &Schedule) -> String {
    let mut out = String::new();
    if let Some(d) = &s.device {
        let _ = writeln!(
            out,
            "device r={:e} n_index={:e} p_s={:e} mass_ratio={:e} i_avg={:e} d={:e} rep_rate={:e} tau={:e} lever_arm={:e} eps_r={:e} softening={:e} coulomb={:e}",
            d.r, d.n_index, d.p_s, d.mass_ratio, d.i_avg, d.d, d.rep_rate, d.tau, d.lever_arm, d.eps_r, d.softening, d.coulomb
        );
    }
    if let Some(g) = &s.grid {
        let snaps: Vec<String> = g.snapshots.iter().map(|t| format!("{t:e}")).collect();
        let _ = write!(
            out,
            "grid x_min={:e} x_max={:e} n={} exchange_x_min={:e} exchange_x_max={:e} exchange_n={} t_start={:e} t_end={:e} dt={:e} j_samples={} refine={} leakage_threshold={:e} edge_limit={:e}",
            g.x_min, g.x_max, g.n, g.exchange_x_min, g.exchange_x_max, g.exchange_n, g.t_start, g.t_end, g.dt, g.j_samples, g.refine,
            g.leakage_threshold, g.edge_limit
        );
        if snaps.is_empty() {
            out.push_str(" snapshots=none\n");
        } else {
            let _ = writeln!(out, " snapshots={}", snaps.join(","));
        }
    }
    if let Some(w) = &s.well {
        let _ = writeln!(
            out,
            "well depth={:e} x0={:e} width={:e} barrier={:e} barrier_width={:e} channel={:e} channel_half_length={:e} channel_edge={:e}",
            w.depth, w.x0, w.width, w.barrier, w.barrier_width, w.channel, w.channel_half_length, w.channel_edge
        );
    }
    for p in &s.pulses {
        let shape = match p.shape {
            EnvelopeShape::Gaussian => "gaussian",
            EnvelopeShape::Rectangular => "rectangular",
        };
        let _ = writeln!(
            out,
            "pulse t0={:e} x0={:e} sigma_x={:e} tau={:e} scale={:e} polarity={:+} shape={shape}",
            p.t0, p.x0, p.sigma_x, p.tau, p.scale, p.polarity
        );
    }
    for g in &s.gates {
        let _ = writeln!(out, "gate i={} j={} theta={:e}", g.i, g.j, g.theta);
    }
    out
}

/// Parses a number with an optional unit suffix of the given dimension
/// into SI, e.g. `100fs`, `2.5eV`, `0.5um`.
pub fn parse_quantity(token: &str, dim: Dimension) -> Result<f64> {
    quantity(token, dim).map_err(|m| Error::invalid(token, m))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Quantity(Dimension),
    Count,
}

fn key_kind(section: &str, key: &str) -> Option<Kind> {
    use Dimension::*;
    let q = Kind::Quantity;
    let k = match (section, key) {
        ("device", "i_avg") => q(Power),
        ("device", "d" | "softening") => q(Length),
        ("device", "rep_rate") => q(Frequency),
        ("device", "tau") => q(Time),
        ("device", k) if DEVICE_KEYS.contains(&k) => q(Plain),
        ("grid", "n" | "exchange_n" | "j_samples" | "refine") => Kind::Count,
        ("grid", "x_min" | "x_max" | "exchange_x_min" | "exchange_x_max") => q(Length),
        ("grid", "t_start" | "t_end" | "dt") => q(Time),
        ("grid", "leakage_threshold" | "edge_limit") => q(Plain),
        ("well", "depth" | "barrier" | "channel") => q(Energy),
        ("well", k) if WELL_KEYS.contains(&k) => q(Length),
        ("pulse", "t0" | "tau") => q(Time),
        ("pulse", "x0" | "sigma_x") => q(Length),
        ("pulse", "scale" | "polarity") => q(Plain),
        _ => return None,
    };
    Some(k)
}

/// Splits `section.key` into its parts and an optional pulse index
/// (`pulse2.tau` addresses the third pulse in time order, `pulse.tau`
/// every pulse). The bare name `scale` is a multiplier on every pulse.
fn split_name(name: &str) -> Result<(&str, Option<usize>, &str, Kind)> {
    if name == "scale" {
        return Ok(("scale", None, "scale", Kind::Quantity(Dimension::Plain)));
    }
    let bad = || {
        Error::invalid(name, "not a numeric schedule parameter (use device.KEY, grid.KEY, well.KEY, pulse.KEY, pulseN.KEY or scale)")
    };
    let (head, key) = name.split_once('.').ok_or_else(bad)?;
    let (section, index) = match head.strip_prefix("pulse") {
        Some("") => ("pulse", None),
        Some(digits) => ("pulse", Some(digits.parse::<usize>().map_err(|_| bad())?)),
        None => (head, None),
    };
    let kind = key_kind(section, key).ok_or_else(bad)?;
    Ok((section, index, key, kind))
}

/// Parses a value for the named parameter into SI, accepting the same
/// unit suffixes as the schedule grammar.
pub fn parameter_value(name: &str, token: &str) -> Result<f64> {
    match split_name(name)?.3 {
        Kind::Quantity(d) => parse_quantity(token, d),
        Kind::Count => token
            .parse::<usize>()
            .map(|v| v as f64)
            .map_err(|_| Error::invalid(name, format!("`{token}` is not a non-negative integer"))),
    }
}

/// SI unit symbol of the named parameter (`count` for integer counts).
pub fn parameter_unit(name: &str) -> Result<&'static str> {
    Ok(match split_name(name)?.3 {
        Kind::Quantity(d) => d.si_unit(),
        Kind::Count => "count",
    })
}

/// Overrides one numeric parameter of a schedule with an SI value.
///
/// The value goes through the schedule parser, so it is validated exactly
/// as if it had been written in the file.
pub fn set_parameter(s: &mut Schedule, name: &str, value: f64) -> Result<()> {
    let (section, index, key, kind) = split_name(name)?;
    if section == "scale" {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::invalid(
                name,
                format!("must be finite and >= 0, got {value}"),
            ));
        }
        *s = s.scaled(value);
        return Ok(());
    }
    let token = match kind {
        Kind::Count if value >= 0.0 && value.fract() == 0.0 && value < 1e15 => {
            format!("{}", value as u64)
        }
        Kind::Count => {
            return Err(Error::invalid(
                name,
                format!("{value} is not a non-negative integer"),
            ))
        }
        Kind::Quantity(_) => format!("{value:e}"),
    };
    let reparse = |base: Schedule| -> Result<Schedule> {
        let mut text = serialize_schedule(&base);
        if text.ends_with('\n') {
            text.pop();
        }
        let _ = write!(text, " {key}={token}");
        parse_schedule(&text).map_err(|e| Error::invalid(name, e.to_string()))
    };
    match section {
        "device" => {
            s.device = reparse(Schedule {
                device: Some(s.device()),
                ..Default::default()
            })?
            .device
        }
        "grid" => {
            s.grid = reparse(Schedule {
                grid: Some(s.grid()),
                ..Default::default()
            })?
            .grid
        }
        "well" => {
            s.well = reparse(Schedule {
                well: Some(s.well()),
                ..Default::default()
            })?
            .well
        }
        _ => {
            let targets: Vec<usize> = match index {
                Some(k) if k < s.pulses.len() => vec![k],
                Some(k) => {
                    return Err(Error::invalid(
                        name,
                        format!("schedule has {} pulses, no index {k}", s.pulses.len()),
                    ))
                }
                None => (0..s.pulses.len()).collect(),
            };
            for k in targets {
                let one = Schedule {
                    pulses: vec![s.pulses[k]],
                    ..Default::default()
                };
                s.pulses[k] = reparse(one)?.pulses[0];
            }
            s.sort_pulses();
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn pulse_line() {
        let s =
            parse_schedule("pulse t0=-100fs x0=-20nm sigma_x=10nm tau=100fs scale=1.0 polarity=+1")
                .unwrap();
        let p = s.pulses[0];
        assert!((p.t0 + 1e-13).abs() < 1e-28);
        assert!((p.x0 + 2e-8).abs() < 1e-23);
        assert_eq!(p.polarity, 1.0);
        assert_eq!(p.shape, EnvelopeShape::Gaussian);
    }

    #[test]
    fn empty_and_comments() {
        assert_eq!(parse_schedule("").unwrap(), Schedule::default());
        assert_eq!(
            parse_schedule("\n  # nothing here\n\n").unwrap(),
            Schedule::default()
        );
    }

    #[test]
    fn gate_line_in_units_of_pi() {
        let s = parse_schedule("gate i=0 j=1 theta=1.0pi # swap").unwrap();
        assert_eq!(s.gates, vec![ExchangeEvent::new(0, 1, PI)]);
    }

    #[test]
    fn units_convert_to_si() {
        let s = parse_schedule("device i_avg=10mW d=1um rep_rate=76MHz tau=100fs").unwrap();
        let d = s.device.unwrap();
        assert_eq!(d.i_avg, 1e-2);
        assert_eq!(d.d, 1e-6);
        assert_eq!(d.rep_rate, 76e6);
        assert_eq!(d.tau, 100.0 * 1e-15);
        let w = parse_schedule("well depth=150meV barrier=0.4eV")
            .unwrap()
            .well
            .unwrap();
        assert!((w.barrier / w.depth - 0.4 / 0.15).abs() < 1e-12);
    }

    #[test]
    fn errors_carry_line_and_token() {
        let cases = [
            ("\nwarp speed=9", 2, "warp"),
            (
                "pulse t0=-100fs x0=1nm sigma_x=1nm tau=100fs scale=1 polarity=+1\npulse t0=1xs",
                2,
                "1xs",
            ),
            ("pulse t0=-100fs x0=1nm sigma_x=2nm scale=1", 1, "tau"),
            ("pulse t0=1nm x0=1nm sigma_x=2nm tau=1fs scale=1", 1, "1nm"),
            ("grid n=12.5", 1, "12.5"),
            ("gate i=0 j=0 theta=1", 1, "itself"),
            ("device\ndevice", 2, "more than one"),
            ("well depth", 1, "depth"),
            ("pulse t0=0 x0=0 sigma_x=1nm tau=1fs scale=-1", 1, "-1"),
        ];
        for (text, line, needle) in cases {
            match parse_schedule(text) {
                Err(Error::Parse { line: l, message }) => {
                    assert_eq!(l, line, "{text}");
                    assert!(message.contains(needle), "{message} lacks {needle}");
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn duplicate_key_last_wins() {
        let (s, w) = parse_schedule_with_warnings("gate i=0 j=1 theta=1 theta=2").unwrap();
        assert_eq!(s.gates[0].theta, 2.0);
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].line, 1);
    }

    #[test]
    fn pulses_sorted_by_time() {
        let s = parse_schedule(
            "pulse t0=450fs x0=0 sigma_x=1nm tau=100fs scale=0.3 polarity=-1\n\
             pulse t0=-100fs x0=1nm sigma_x=1nm tau=100fs scale=1",
        )
        .unwrap();
        assert!(s.pulses[0].t0 < s.pulses[1].t0);
    }

    #[test]
    fn canonical_round_trip() {
        let s = super::super::canonical_fig3_schedule(&Default::default());
        assert_eq!(parse_schedule(&serialize_schedule(&s)).unwrap(), s);
    }

    #[test]
    fn parameters_override_through_the_grammar() {
        let mut s = super::super::canonical_fig3_schedule(&Default::default());
        let v = parameter_value("well.barrier", "1.5eV").unwrap();
        set_parameter(&mut s, "well.barrier", v).unwrap();
        assert!((s.well().barrier - 1.5 * crate::physcore::E_CHARGE).abs() < 1e-30);
        set_parameter(&mut s, "grid.n", 256.0).unwrap();
        assert_eq!(s.grid().n, 256);
        assert!(set_parameter(&mut s, "grid.n", 2.5).is_err());
        set_parameter(&mut s, "pulse2.t0", -300e-15).unwrap();
        assert_eq!(s.pulses[0].t0, -300e-15);
        set_parameter(&mut s, "scale", 0.5).unwrap();
        assert_eq!(s.pulses[1].scale, 0.5);
        assert!(set_parameter(&mut s, "pulse.scale", -1.0).is_err());
        assert!(set_parameter(&mut s, "pulse9.tau", 1.0).is_err());
        assert!(set_parameter(&mut s, "grid.snapshots", 1.0).is_err());
        assert!(parameter_value("device.nope", "1").is_err());
        assert_eq!(parameter_value("device.tau", "50fs").unwrap(), 50e-15);
    }
}
