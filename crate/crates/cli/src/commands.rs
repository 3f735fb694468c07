use std::f64::consts::PI;

use ferrogate::exchange::{
    exchange_samples, exchange_unitary, gate_fidelity, run_swap_scenario, subspace_leakage, Gate4,
    Scenario,
};
use ferrogate::optics::{
    displacement_b_profile, displacement_bmax, rectified_polarization_peak,
    rectified_polarization_profile, sheet_density, uniform_times, PulseEnvelope,
};
use ferrogate::physcore::units::*;
use ferrogate::physcore::{peak_intensity, LaserParams, MaterialParams};
use ferrogate::pulseprog::{
    calibrate_pulse, canonical_fig3_schedule, serialize_schedule, set_parameter, CalibrationBounds,
    Schedule, FIG3_SNAPSHOTS,
};
use ferrogate::qdyn1d::{
    propagate_many, stationary_states_of, write_snapshot_csv, PropagationOptions,
};
use ferrogate::spinreg::{run_sequence, spin_expectations, SpinState};
use rayon::prelude::*;

use crate::output::{Report, Table, Value};
use crate::{CliError, RunConfig, SweepTarget, TARGET_THETA};

/// Samples of the field profiles, spanning +-3 pulse durations.
pub const FIELD_SAMPLES: usize = 601;

/// What a command produced, before anything touches the disk.
#[derive(Debug, Clone, Default)]
pub struct Output {
    /// Files in fixed formats, written as given.
    pub files: Vec<(String, Vec<u8>)>,
    /// Tables rendered in the configured format, by file stem.
    pub tables: Vec<(String, Table)>,
    /// Main result, rendered in the configured format as `<stem>.<ext>`.
    pub report: Option<(String, Report)>,
    /// Lines for stdout.
    pub messages: Vec<String>,
    pub failed: bool,
}

fn material_and_laser(s: &Schedule) -> Result<(MaterialParams, LaserParams), CliError> {
    let d = s.device();
    let mat = MaterialParams::new(d.r, d.n_index, d.p_s, d.mass_ratio, "schedule")?;
    let laser = LaserParams::new(d.i_avg, d.d, d.rep_rate, d.tau)?;
    Ok((mat, laser))
}

pub fn cmd_fields(cfg: &RunConfig, s: &Schedule) -> Result<Output, CliError> {
    let (mat, laser) = material_and_laser(s)?;
    let r = cfg.radius;
    if !(r > 0.0) {
        return Err(CliError::usage("--radius must be > 0"));
    }
    let tau = laser.tau_opt;
    let p_max = rectified_polarization_peak(&mat, &laser);
    let b_max = displacement_bmax(r, p_max, tau);
    let env = PulseEnvelope::gaussian(0.0, tau);
    let times = uniform_times(-3.0 * tau, 3.0 * tau, FIELD_SAMPLES);
    let p = rectified_polarization_profile(&mat, &laser, &env, &times)?;
    let rhos = [0.5 * r, r, 2.0 * r];
    let b: Vec<Vec<f64>> = rhos
        .iter()
        .map(|&rho| displacement_b_profile(r, p_max, &env, rho, &times))
        .collect::<Result<_, _>>()?;
    let b_surface = b[1].iter().fold(0.0f64, |m, v| m.max(v.abs()));

    let mut pt = Table::new(&[("t_fs", "fs"), ("p_uC_per_cm2", "uC/cm^2")]);
    for (t, v) in times.iter().zip(&p.values) {
        pt.rows
            .push(vec![Value::Num(t / FS), Value::Num(v / UC_PER_CM2)]);
    }
    let mut bt = Table::new(&[
        ("t_fs", "fs"),
        ("b_half_radius_gauss", "G"),
        ("b_radius_gauss", "G"),
        ("b_twice_radius_gauss", "G"),
    ]);
    for (k, t) in times.iter().enumerate() {
        let mut row = vec![Value::Num(t / FS)];
        row.extend(b.iter().map(|col| Value::Num(col[k] / GAUSS)));
        bt.rows.push(row);
    }

    let mut rep = Report::default();
    rep.num(
        "peak_intensity_w_per_cm2",
        "W/cm^2",
        peak_intensity(&laser) * 1e-4,
    );
    rep.num("p_max_uC_per_cm2", "uC/cm^2", p_max / UC_PER_CM2);
    rep.num(
        "sheet_density_per_cm2",
        "cm^-2",
        sheet_density(p_max) / PER_CM2,
    );
    rep.num(
        "spontaneous_sheet_density_per_cm2",
        "cm^-2",
        sheet_density(mat.p_s) / PER_CM2,
    );
    rep.num("b_max_gauss", "G", b_max / GAUSS);
    rep.num("b_surface_peak_gauss", "G", b_surface / GAUSS);
    rep.num("radius_um", "um", r / UM);
    rep.num("tau_fs", "fs", tau / FS);
    Ok(Output {
        tables: vec![("polarization".into(), pt), ("bfield".into(), bt)],
        report: Some(("fields_summary".into(), rep)),
        ..Default::default()
    })
}

/// `-200` for -200 fs; sub-femtosecond times keep three decimals.
fn fs_label(t: f64) -> String {
    let v = (t / FS * 1000.0).round() / 1000.0 + 0.0;
    format!("{v}")
}

pub fn cmd_evolve(_cfg: &RunConfig, s: &Schedule) -> Result<Output, CliError> {
    let sc = Scenario::from_schedule(s)?;
    let mut times: Vec<f64> = FIG3_SNAPSHOTS
        .iter()
        .copied()
        .filter(|t| (sc.t_start..=sc.t_end).contains(t))
        .collect();
    times.extend(&sc.snapshot_times);
    times.sort_by(f64::total_cmp);
    times.dedup();

    let mass = sc.mass();
    let bound = sc.model.bind(&sc.material, &sc.laser);
    let sampled = bound.on_grid(&sc.grid);
    let init = stationary_states_of(&sampled.at(sc.t_start), &sc.grid, mass, 2)?;
    let states: Vec<_> = init.into_iter().map(|e| e.psi).collect();
    let opts = PropagationOptions {
        snapshot_times: times.clone(),
        edge_limit: Some(sc.edge_limit),
    };
    let traj = propagate_many(&states, &sampled, mass, sc.t_start, sc.t_end, sc.dt, &opts)?;
    let leakage = subspace_leakage(&traj, &bound, mass, 2)?
        .into_iter()
        .fold(0.0, f64::max);

    let mut files = Vec::new();
    for (k, snap) in traj.snapshots.iter().enumerate() {
        let mut buf = Vec::new();
        write_snapshot_csv(&mut buf, snap).expect("in-memory write");
        files.push((
            format!("snapshot_{k:02}_{}fs.csv", fs_label(snap.time)),
            buf,
        ));
    }
    let mut rep = Report::default();
    rep.push("steps", "", Value::Int(traj.steps as u64));
    rep.num("t_start_fs", "fs", sc.t_start / FS);
    rep.num("t_end_fs", "fs", sc.t_end / FS);
    rep.num("dt_fs", "fs", sc.dt / FS);
    rep.push(
        "snapshot_times_fs",
        "fs",
        Value::NumList(traj.snapshots.iter().map(|s| s.time / FS).collect()),
    );
    rep.num("max_norm_drift", "1", traj.max_norm_drift);
    rep.num("leakage", "1", leakage);
    rep.push("warnings", "", Value::List(traj.warnings.clone()));
    Ok(Output {
        files,
        report: Some(("evolve_report".into(), rep)),
        ..Default::default()
    })
}

pub fn cmd_exchange(cfg: &RunConfig, s: &Schedule) -> Result<Output, CliError> {
    let base = if cfg.reverse {
        s.time_reversed()
    } else {
        s.clone()
    };
    let mut sc = Scenario::from_schedule(&base)?;
    sc.target_theta = cfg.target_theta;
    let mut rep = Report::default();
    let (samples, trace) = if cfg.theta_only {
        let (samples, trace) = exchange_samples(&sc)?;
        let theta = trace.final_theta();
        let actual = exchange_unitary(theta);
        let j_peak = samples.j.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        rep.num("theta_rad", "rad", theta);
        rep.num("theta_over_pi", "1", theta / PI);
        rep.num("target_theta_rad", "rad", sc.target_theta);
        rep.num("swap_fidelity", "1", gate_fidelity(&Gate4::swap(), &actual));
        rep.num(
            "target_fidelity",
            "1",
            gate_fidelity(&exchange_unitary(sc.target_theta), &actual),
        );
        rep.num("j_static_ev", "eV", sc.static_exchange()? / EV);
        rep.num("j_peak_ev", "eV", j_peak / EV);
        (samples, trace)
    } else {
        let r = run_swap_scenario(&sc)?;
        rep.num("theta_rad", "rad", r.theta);
        rep.num("theta_over_pi", "1", r.theta / PI);
        rep.num("target_theta_rad", "rad", r.target_theta);
        rep.num("swap_fidelity", "1", r.swap_fidelity);
        rep.num("target_fidelity", "1", r.target_fidelity);
        rep.num("j_static_ev", "eV", r.j_static / EV);
        rep.num("j_peak_ev", "eV", r.j_peak / EV);
        rep.num("leakage", "1", r.leakage);
        rep.num("leakage_threshold", "1", sc.leakage_threshold);
        rep.num("max_norm_drift", "1", r.norm_drift);
        rep.push("flags", "", Value::List(r.flags));
        rep.push("warnings", "", Value::List(r.warnings));
        (r.samples.expect("samples"), r.trace.expect("trace"))
    };
    let csv = |t: &ferrogate::exchange::ExchangeTrace| {
        let mut buf = Vec::new();
        t.write_csv(&mut buf).expect("in-memory write");
        buf
    };
    Ok(Output {
        files: vec![
            ("exchange_trace.csv".into(), csv(&trace)),
            ("exchange_samples.csv".into(), csv(&samples)),
        ],
        report: Some(("exchange_report".into(), rep)),
        ..Default::default()
    })
}

pub fn cmd_calibrate(cfg: &RunConfig, s: &Schedule) -> Result<Output, CliError> {
    if s.pulses.is_empty() {
        return Err(CliError::new(
            "invalid_parameter",
            "schedule has no pulses to calibrate",
        ));
    }
    let bounds = CalibrationBounds {
        tolerance: cfg.tolerance,
        ..Default::default()
    };
    let cal = calibrate_pulse(cfg.target_theta, s, &bounds)?;
    let mut text = format!(
        "# pulse scales multiplied by {:e} to reach theta = {:e} rad (target {:e} rad)\n",
        cal.scale, cal.theta, cal.target_theta
    );
    text.push_str(&serialize_schedule(&s.scaled(cal.scale)));
    let mut hist = Table::new(&[("evaluation", ""), ("scale", "1"), ("theta_rad", "rad")]);
    for (k, (sc, th)) in cal.history.iter().enumerate() {
        hist.rows
            .push(vec![Value::Int(k as u64), Value::Num(*sc), Value::Num(*th)]);
    }
    let mut rep = Report::default();
    rep.num("scale", "1", cal.scale);
    rep.num("theta_rad", "rad", cal.theta);
    rep.num("target_theta_rad", "rad", cal.target_theta);
    rep.num("tolerance_rad", "rad", cfg.tolerance);
    rep.push("evaluations", "", Value::Int(cal.evaluations as u64));
    Ok(Output {
        files: vec![("calibrated.fgs".into(), text.into_bytes())],
        tables: vec![("calibration_history".into(), hist)],
        report: Some(("calibration_report".into(), rep)),
        ..Default::default()
    })
}

fn initial_spins(cfg: &RunConfig, s: &Schedule) -> Result<Vec<bool>, CliError> {
    let from_gates = s
        .gates
        .iter()
        .map(|g| g.i.max(g.j) + 1)
        .max()
        .unwrap_or(2)
        .max(2);
    match (&cfg.initial, cfg.qubits) {
        (Some(text), q) => {
            let spins: Vec<bool> = text
                .chars()
                .map(|c| match c {
                    'u' | 'U' | '0' => Ok(true),
                    'd' | 'D' | '1' => Ok(false),
                    other => Err(CliError::usage(format!(
                        "--initial: `{other}` is not u or d"
                    ))),
                })
                .collect::<Result<_, _>>()?;
            if q.is_some_and(|q| q != spins.len()) {
                return Err(CliError::usage(
                    "--initial and --qubits disagree on the register size",
                ));
            }
            Ok(spins)
        }
        (None, q) => {
            let n = q.unwrap_or(from_gates);
            Ok((0..n).map(|k| k != 0).collect())
        }
    }
}

pub fn cmd_register(cfg: &RunConfig, s: &Schedule) -> Result<Output, CliError> {
    let spins = initial_spins(cfg, s)?;
    let start = SpinState::from_spins(&spins)?;
    let (state, log) = run_sequence(&start, &s.gates)?;
    let e = spin_expectations(&state);
    let mut doc = state.to_json();
    doc["sz"] = e.sz.iter().map(|&v| serde_json::Value::from(v)).collect();
    doc["sz_total"] = e.sz_total.into();
    doc["s2_total"] = e.s2_total.into();
    doc["fidelity_with_initial"] = state.fidelity(&start).into();

    let mut table = Table::new(&[
        ("step", ""),
        ("i", ""),
        ("j", ""),
        ("theta_rad", "rad"),
        ("norm", "1"),
        ("sz_total", "hbar"),
        ("s2_total", "hbar^2"),
    ]);
    for r in &log {
        let ev = r.step.checked_sub(1).map(|k| s.gates[k]);
        table.rows.push(vec![
            Value::Int(r.step as u64),
            ev.map_or(Value::Empty, |g| Value::Int(g.i as u64)),
            ev.map_or(Value::Empty, |g| Value::Int(g.j as u64)),
            ev.map_or(Value::Empty, |g| Value::Num(g.theta)),
            Value::Num(r.norm),
            Value::Num(r.sz_total),
            Value::Num(r.s2_total),
        ]);
    }
    Ok(Output {
        files: vec![("final_state.json".into(), crate::output::json_bytes(&doc))],
        tables: vec![("register_log".into(), table)],
        ..Default::default()
    })
}

/// One grid point of a sweep: the inner command's report, or its error.
fn sweep_point(
    cfg: &RunConfig,
    base: &Schedule,
    target: SweepTarget,
    values: &[(String, f64)],
) -> Result<Report, CliError> {
    let mut c = cfg.clone();
    let mut s = base.clone();
    for (name, v) in values {
        if name == TARGET_THETA {
            c.target_theta = *v;
        } else {
            set_parameter(&mut s, name, *v)?;
        }
    }
    let out = match target {
        SweepTarget::Fields => cmd_fields(&c, &s)?,
        SweepTarget::Evolve => cmd_evolve(&c, &s)?,
        SweepTarget::Exchange => cmd_exchange(&c, &s)?,
        SweepTarget::Calibrate => cmd_calibrate(&c, &s)?,
    };
    Ok(out.report.map(|(_, r)| r).unwrap_or_default())
}

/// Runs `target` at every point of the axis grid. Rows come out in
/// lexicographic order of axis indices, first axis slowest, whatever the
/// thread count; failed points keep their row and fill the `error` column.
pub fn cmd_sweep(cfg: &RunConfig, s: &Schedule, target: SweepTarget) -> Result<Output, CliError> {
    let axes = &cfg.sweeps;
    if !(1..=2).contains(&axes.len()) {
        return Err(CliError::usage("sweep needs one or two --sweep axes"));
    }
    let values: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect();
    let mut points: Vec<Vec<usize>> = vec![vec![]];
    for v in &values {
        points = points
            .into_iter()
            .flat_map(|p| (0..v.len()).map(move |k| [p.as_slice(), &[k]].concat()))
            .collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::new("thread_pool", e.to_string()))?;
    let results: Vec<Result<Report, CliError>> = pool.install(|| {
        points
            .par_iter()
            .map(|idx| {
                let at: Vec<(String, f64)> = idx
                    .iter()
                    .zip(axes)
                    .zip(&values)
                    .map(|((&k, a), v)| (a.name.clone(), v[k]))
                    .collect();
                sweep_point(cfg, s, target, &at)
            })
            .collect()
    });

    let metrics: Vec<(String, String)> = results
        .iter()
        .find_map(|r| r.as_ref().ok())
        .map(|r| {
            r.fields
                .iter()
                .map(|(k, u, _)| (k.clone(), u.clone()))
                .collect()
        })
        .unwrap_or_default();
    let mut columns: Vec<(String, String)> = Vec::new();
    for a in axes {
        columns.push((format!("{}_index", a.name), String::new()));
        columns.push((a.name.clone(), a.unit().to_string()));
    }
    columns.extend(metrics.iter().cloned());
    columns.push(("error".into(), String::new()));
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    let mut failures = 0;
    for (idx, res) in points.iter().zip(&results) {
        let mut row = Vec::new();
        for ((&k, _), v) in idx.iter().zip(axes).zip(&values) {
            row.push(Value::Int(k as u64));
            row.push(Value::Num(v[k]));
        }
        match res {
            Ok(r) => {
                row.extend(
                    metrics
                        .iter()
                        .map(|(k, _)| r.get(k).cloned().unwrap_or(Value::Empty)),
                );
                row.push(Value::Empty);
            }
            Err(e) => {
                failures += 1;
                row.extend(metrics.iter().map(|_| Value::Empty));
                row.push(Value::Text(e.to_string()));
            }
        }
        table.rows.push(row);
    }
    let mut messages = vec![format!("{} points, {} failed", points.len(), failures)];
    if failures == points.len() {
        messages.push("every sweep point failed; see the error column".into());
    }
    Ok(Output {
        tables: vec![("sweep".into(), table)],
        messages,
        ..Default::default()
    })
}

/// Reference values checked by `verify`: (key, unit, computed, expected,
/// relative tolerance).
pub fn reference_checks() -> Vec<(&'static str, &'static str, f64, f64, f64)> {
    let mat =
        MaterialParams::new(1.95e-11, 2.45, 26.0 * UC_PER_CM2, 1.0, "reference").expect("valid");
    let laser = LaserParams::new(10.0 * MW, 1.0 * UM, 76.0 * MHZ, 100.0 * FS).expect("valid");
    let p = rectified_polarization_peak(&mat, &laser);
    vec![
        ("p_max_uC_per_cm2", "uC/cm^2", p / UC_PER_CM2, 6.29e-2, 5e-3),
        (
            "b_max_gauss",
            "G",
            displacement_bmax(0.5 * UM, p, laser.tau_opt) / GAUSS,
            39.6,
            5e-3,
        ),
        (
            "spontaneous_sheet_density_per_cm2",
            "cm^-2",
            sheet_density(mat.p_s) / PER_CM2,
            1.6e14,
            2e-2,
        ),
    ]
}

pub fn cmd_verify(_cfg: &RunConfig) -> Result<Output, CliError> {
    let mut rep = Report::default();
    let mut messages = Vec::new();
    let mut failed = false;
    for (key, unit, got, want, tol) in reference_checks() {
        let rel = (got / want - 1.0).abs();
        let pass = rel <= tol;
        failed |= !pass;
        messages.push(format!(
            "{} {key}: {got:.4e} {unit} (reference {want:e}, relative error {rel:.2e}, tolerance {tol:e})",
            if pass { "PASS" } else { "FAIL" }
        ));
        rep.num(key, unit, got);
        rep.num(&format!("{key}_reference"), unit, want);
        rep.push(&format!("{key}_pass"), "", Value::Bool(pass));
    }
    let p = reference_checks()[0].2 * UC_PER_CM2;
    let n = sheet_density(p) / PER_CM2;
    messages.push(format!(
        "INFO sheet density of the rectified polarization: {n:.3e} cm^-2"
    ));
    rep.num("rectified_sheet_density_per_cm2", "cm^-2", n);
    Ok(Output {
        report: Some(("verify".into(), rep)),
        messages,
        failed,
        ..Default::default()
    })
}

pub fn cmd_template(_cfg: &RunConfig) -> Result<Output, CliError> {
    let mut text = String::from(
        "# two side pulses open the tunnel barrier; a weaker pulse of opposite polarity closes it\n\
         # run `ferrogate calibrate` to scale the pulses to a target angle\n",
    );
    text.push_str(&serialize_schedule(&canonical_fig3_schedule(
        &Default::default(),
    )));
    Ok(Output {
        files: vec![("swap.fgs".into(), text.into_bytes())],
        ..Default::default()
    })
}
