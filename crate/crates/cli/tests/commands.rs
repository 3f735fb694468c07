use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ferrogate::pulseprog::{canonical_fig3_schedule, serialize_schedule, Fig3Params, Schedule};
use ferrogate::spinreg::{ExchangeEvent, SpinState};
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ferrogate"));
    c.env_remove("FERROGATE_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn")
}

fn ok(args: &[&str]) -> Output {
    let o = run(args);
    assert!(
        o.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    o
}

fn write_schedule(dir: &Path, name: &str, s: &Schedule) -> String {
    let p = dir.join(name);
    fs::write(&p, serialize_schedule(s)).unwrap();
    p.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: PathBuf) -> Value {
    serde_json::from_str(&fs::read_to_string(&p).unwrap_or_else(|e| panic!("{}: {e}", p.display())))
        .unwrap()
}

/// Header names and data rows of a `#`-commented CSV.
fn csv_rows(p: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# "), "{}", p.display());
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(String::from).collect())
        .collect();
    (header, rows)
}

fn zero_pulse() -> Schedule {
    canonical_fig3_schedule(&Fig3Params::default()).scaled(0.0)
}

#[test]
fn fields_formats_agree_and_match_reference_values() {
    let d = tempfile::tempdir().unwrap();
    let (c, j) = (d.path().join("csv"), d.path().join("json"));
    ok(&["fields", "--out", s(&c)]);
    ok(&["fields", "--out", s(&j), "--format", "json"]);
    let (header, rows) = csv_rows(&c.join("fields_summary.csv"));
    let summary = json(j.join("fields_summary.json"));
    for (k, v) in header.iter().zip(&rows[0]) {
        assert_eq!(
            v.parse::<f64>().unwrap(),
            summary[k].as_f64().unwrap(),
            "{k}"
        );
    }
    assert!((summary["p_max_uC_per_cm2"].as_f64().unwrap() / 6.29e-2 - 1.0).abs() < 5e-3);
    assert!((summary["b_max_gauss"].as_f64().unwrap() / 39.6 - 1.0).abs() < 5e-3);
    assert_eq!(summary["units"]["b_max_gauss"], "G");

    let (h, prof) = csv_rows(&c.join("polarization.csv"));
    assert_eq!(h, ["t_fs", "p_uC_per_cm2"]);
    let pj = json(j.join("polarization.json"));
    assert_eq!(pj["rows"].as_array().unwrap().len(), prof.len());
    assert_eq!(
        pj["rows"][300]["p_uC_per_cm2"].as_f64().unwrap(),
        prof[300][1].parse::<f64>().unwrap()
    );
}

#[test]
fn evolve_writes_six_normalized_snapshots() {
    let d = tempfile::tempdir().unwrap();
    let sched = write_schedule(d.path(), "zero.fgs", &zero_pulse());
    let out = d.path().join("out");
    ok(&["evolve", "--schedule", &sched, "--out", s(&out)]);
    let mut snaps: Vec<PathBuf> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| s(p).contains("snapshot_"))
        .collect();
    snaps.sort();
    let names: Vec<String> = snaps
        .iter()
        .map(|p| p.file_name().unwrap().to_str().unwrap().to_string())
        .collect();
    assert_eq!(
        names,
        [
            "snapshot_00_-200fs.csv",
            "snapshot_01_-100fs.csv",
            "snapshot_02_0fs.csv",
            "snapshot_03_150fs.csv",
            "snapshot_04_450fs.csv",
            "snapshot_05_600fs.csv"
        ]
    );

    let load = |p: &Path| -> (f64, Vec<(f64, f64)>) {
        let text = fs::read_to_string(p).unwrap();
        let first = text.lines().next().unwrap();
        let dx: f64 = first
            .split("dx = ")
            .nth(1)
            .unwrap()
            .split(' ')
            .next()
            .unwrap()
            .parse()
            .unwrap();
        let (header, rows) = csv_rows(p);
        assert_eq!(header[..4], ["x", "re_psi0", "im_psi0", "abs2_psi0"]);
        assert_eq!(header.last().unwrap(), "v");
        let sum: f64 = rows.iter().map(|r| r[3].parse::<f64>().unwrap()).sum();
        assert!((sum * dx - 1.0).abs() < 1e-10, "{sum} {dx}");
        (
            dx,
            rows.iter()
                .map(|r| (r[1].parse().unwrap(), r[2].parse().unwrap()))
                .collect(),
        )
    };
    let (dx, first) = load(&snaps[0]);
    for p in &snaps[1..] {
        let (_, other) = load(p);
        // distance after removing the global phase: 2 - 2 |<a|b>|
        let (mut re, mut im) = (0.0, 0.0);
        for ((ar, ai), (br, bi)) in first.iter().zip(&other) {
            re += (ar * br + ai * bi) * dx;
            im += (ar * bi - ai * br) * dx;
        }
        let dist = (2.0 - 2.0 * (re * re + im * im).sqrt()).max(0.0).sqrt();
        assert!(dist < 1e-6, "{}: {dist:e}", p.display());
    }
    let rep = fs::read_to_string(out.join("evolve_report.csv")).unwrap();
    assert!(rep.contains("8000,"));
}

#[test]
fn exchange_null_schedule_and_time_reversal() {
    let d = tempfile::tempdir().unwrap();
    let zero = write_schedule(d.path(), "zero.fgs", &zero_pulse());
    let out = d.path().join("zero");
    ok(&[
        "exchange",
        "--schedule",
        &zero,
        "--out",
        s(&out),
        "--format",
        "json",
    ]);
    let r = json(out.join("exchange_report.json"));
    assert!(r["theta_rad"].as_f64().unwrap().abs() < 1e-6);
    assert!(r["leakage"].as_f64().unwrap() < 1e-8);
    assert_eq!(r["flags"], serde_json::json!([]));
    for k in r.as_object().unwrap().keys() {
        assert!(
            k.chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'),
            "{k}"
        );
    }
    let (h, rows) = csv_rows(&out.join("exchange_trace.csv"));
    assert_eq!(h, ["t", "J", "theta_running"]);
    assert_eq!(rows.len(), 641);

    let mut asym = canonical_fig3_schedule(&Fig3Params::default());
    asym.pulses[0].t0 -= 20e-15;
    asym.sort_pulses();
    let sched = write_schedule(d.path(), "asym.fgs", &asym);
    let (f, b) = (d.path().join("fwd"), d.path().join("rev"));
    ok(&[
        "exchange",
        "--theta-only",
        "--schedule",
        &sched,
        "--out",
        s(&f),
        "--format",
        "json",
    ]);
    ok(&[
        "exchange",
        "--theta-only",
        "--reverse",
        "--schedule",
        &sched,
        "--out",
        s(&b),
        "--format",
        "json",
    ]);
    let tf = json(f.join("exchange_report.json"))["theta_rad"]
        .as_f64()
        .unwrap();
    let tb = json(b.join("exchange_report.json"))["theta_rad"]
        .as_f64()
        .unwrap();
    assert!(tf.abs() > 0.1);
    assert!((tf.abs() - tb.abs()).abs() < 1e-9 * tf.abs(), "{tf} {tb}");
}

#[test]
fn calibrate_writes_a_schedule_that_reaches_the_target() {
    let d = tempfile::tempdir().unwrap();
    let mut t = canonical_fig3_schedule(&Fig3Params::default());
    t.grid.as_mut().unwrap().j_samples = 21;
    let sched = write_schedule(d.path(), "t.fgs", &t);
    let out = d.path().join("cal");
    ok(&[
        "calibrate",
        "--schedule",
        &sched,
        "--out",
        s(&out),
        "--target-theta",
        "0.5pi",
        "--format",
        "json",
    ]);
    let rep = json(out.join("calibration_report.json"));
    assert!((rep["theta_rad"].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-3);
    let cal = out.join("calibrated.fgs");
    let check = d.path().join("check");
    ok(&[
        "exchange",
        "--theta-only",
        "--schedule",
        s(&cal),
        "--out",
        s(&check),
        "--format",
        "json",
    ]);
    let theta = json(check.join("exchange_report.json"))["theta_rad"]
        .as_f64()
        .unwrap();
    assert!(
        (theta - std::f64::consts::FRAC_PI_2).abs() < 1e-3,
        "{theta}"
    );
    let hist = json(out.join("calibration_history.json"));
    assert_eq!(
        hist["rows"].as_array().unwrap().len() as u64,
        rep["evaluations"].as_u64().unwrap()
    );
}

#[test]
fn unreachable_calibration_is_an_error() {
    let d = tempfile::tempdir().unwrap();
    let sched = write_schedule(d.path(), "zero.fgs", &zero_pulse());
    let o = run(&[
        "calibrate",
        "--schedule",
        &sched,
        "--out",
        s(&d.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "unreachable");
}

#[test]
fn register_runs_gate_lines() {
    let d = tempfile::tempdir().unwrap();
    let mut s2 = Schedule::default();
    let pi = std::f64::consts::PI;
    s2.gates = vec![ExchangeEvent::new(0, 1, pi), ExchangeEvent::new(0, 1, pi)];
    let double = write_schedule(d.path(), "double.fgs", &s2);
    let empty = write_schedule(d.path(), "empty.fgs", &Schedule::default());
    let route = d.path().join("route.fgs");
    fs::write(&route, "gate i=0 j=1 theta=1pi\ngate i=1 j=2 theta=1pi\n").unwrap();

    for (sched, want) in [(&double, "udu"), (&empty, "dud")] {
        let out = d.path().join(want);
        ok(&[
            "register",
            "--schedule",
            sched,
            "--out",
            s(&out),
            "--initial",
            want,
        ]);
        let st = SpinState::from_json(&json(out.join("final_state.json"))).unwrap();
        let expect =
            SpinState::from_spins(&want.chars().map(|c| c == 'u').collect::<Vec<_>>()).unwrap();
        assert!((st.fidelity(&expect) - 1.0).abs() < 1e-12);
    }
    let out = d.path().join("route");
    ok(&["register", "--schedule", s(&route), "--out", s(&out)]);
    let st = SpinState::from_json(&json(out.join("final_state.json"))).unwrap();
    assert_eq!(st.n(), 3);
    let moved = SpinState::from_spins(&[true, true, false]).unwrap();
    assert!((st.fidelity(&moved) - 1.0).abs() < 1e-12);
    let (h, rows) = csv_rows(&out.join("register_log.csv"));
    assert_eq!(
        h,
        [
            "step",
            "i",
            "j",
            "theta_rad",
            "norm",
            "sz_total",
            "s2_total"
        ]
    );
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[0][1], "");
    let sz0: f64 = rows[0][5].parse().unwrap();
    for r in &rows {
        assert!((r[5].parse::<f64>().unwrap() - sz0).abs() < 1e-10);
        assert!((r[4].parse::<f64>().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn sweeps_are_ordered_deterministic_and_match_single_runs() {
    let d = tempfile::tempdir().unwrap();
    let args = |out: &Path, jobs: &str| {
        vec![
            "sweep".to_string(),
            "fields".into(),
            "--sweep".into(),
            "device.i_avg=1mW:20mW:5".into(),
            "--sweep".into(),
            "device.tau=50fs:200fs:3".into(),
            "--jobs".into(),
            jobs.into(),
            "--out".into(),
            s(out).into(),
        ]
    };
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    let o1 = bin().args(args(&a, "1")).output().unwrap();
    let o8 = bin().args(args(&b, "8")).output().unwrap();
    assert!(o1.status.success() && o8.status.success());
    let ta = fs::read(a.join("sweep.csv")).unwrap();
    assert_eq!(ta, fs::read(b.join("sweep.csv")).unwrap());
    let (h, rows) = csv_rows(&a.join("sweep.csv"));
    assert_eq!(
        h[..4],
        [
            "device.i_avg_index",
            "device.i_avg",
            "device.tau_index",
            "device.tau"
        ]
    );
    let idx: Vec<(usize, usize)> = rows
        .iter()
        .map(|r| (r[0].parse().unwrap(), r[2].parse().unwrap()))
        .collect();
    let mut sorted = idx.clone();
    sorted.sort();
    assert_eq!(idx, sorted);
    assert_eq!(idx.len(), 15);

    // a one-point sweep reproduces the plain run
    let one = d.path().join("one");
    ok(&[
        "sweep",
        "fields",
        "--sweep",
        "device.i_avg=10mW:10mW:1",
        "--out",
        s(&one),
    ]);
    let plain = d.path().join("plain");
    ok(&["fields", "--out", s(&plain)]);
    let (sh, srow) = csv_rows(&one.join("sweep.csv"));
    let (ph, prow) = csv_rows(&plain.join("fields_summary.csv"));
    for (k, v) in ph.iter().zip(&prow[0]) {
        let col = sh.iter().position(|c| c == k).unwrap();
        assert_eq!(&srow[0][col], v, "{k}");
    }
}

#[test]
fn barrier_sweep_decouples_and_records_failures() {
    let d = tempfile::tempdir().unwrap();
    let sched = write_schedule(d.path(), "zero.fgs", &zero_pulse());
    let out = d.path().join("sw");
    ok(&[
        "sweep",
        "exchange",
        "--theta-only",
        "--schedule",
        &sched,
        "--sweep",
        "well.barrier=0eV:2.5eV:6",
        "--out",
        s(&out),
    ]);
    let (h, rows) = csv_rows(&out.join("sweep.csv"));
    let col = h.iter().position(|c| c == "j_static_ev").unwrap();
    let j: Vec<f64> = rows.iter().map(|r| r[col].parse().unwrap()).collect();
    for w in j.windows(2) {
        assert!(w[1] < w[0], "{j:?}");
    }

    let out = d.path().join("bad");
    ok(&[
        "sweep",
        "exchange",
        "--theta-only",
        "--schedule",
        &sched,
        "--sweep",
        "grid.exchange_n=64:1000:2",
        "--out",
        s(&out),
    ]);
    let text = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("1,1e3,"), "{last}");
    assert!(last.contains("budget"), "{last}");
    assert!(!text.lines().nth(2).unwrap().contains("budget"));
}

#[test]
fn errors_are_json_on_stderr() {
    let d = tempfile::tempdir().unwrap();
    let bad = d.path().join("bad.fgs");
    fs::write(&bad, "pulse t0=1fs\n").unwrap();
    let o = run(&[
        "exchange",
        "--schedule",
        s(&bad),
        "--out",
        s(&d.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "parse");
    assert!(e["error"]["message"].as_str().unwrap().contains("line 1"));
    assert_eq!(e["error"]["path"], s(&bad));

    let o = run(&[
        "evolve",
        "--schedule",
        s(&d.path().join("missing.fgs")),
        "--out",
        s(&d.path().join("o")),
    ]);
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "io");

    let o = run(&["fields", "--format", "xml"]);
    assert_eq!(o.status.code(), Some(2));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"]["kind"], "usage");

    let o = run(&[
        "fields",
        "--sweep",
        "device.i_avg=1:2:2",
        "--out",
        s(&d.path().join("o")),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_env_supplies_the_default_schedule() {
    let d = tempfile::tempdir().unwrap();
    let mut sched = Schedule::default();
    sched.gates = vec![ExchangeEvent::new(0, 3, std::f64::consts::PI)];
    let env_path = write_schedule(d.path(), "env.fgs", &sched);
    let out = d.path().join("env");
    let o = bin()
        .args(["register", "--out", s(&out)])
        .env("FERROGATE_CONFIG", &env_path)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(out.join("final_state.json"))["n"], 4);
    let meta = json(out.join("run_metadata.json"));
    assert_eq!(meta["schedule"], env_path.as_str());
    assert!(meta["elapsed_s"].is_number());

    let flag = write_schedule(d.path(), "flag.fgs", &Schedule::default());
    let out = d.path().join("flag");
    let o = bin()
        .args(["register", "--schedule", &flag, "--out", s(&out)])
        .env("FERROGATE_CONFIG", &env_path)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(json(out.join("final_state.json"))["n"], 2);
}

#[test]
fn data_files_are_reproducible() {
    let d = tempfile::tempdir().unwrap();
    let sched = write_schedule(d.path(), "zero.fgs", &zero_pulse());
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    for out in [&a, &b] {
        ok(&[
            "exchange",
            "--theta-only",
            "--schedule",
            &sched,
            "--out",
            s(out),
        ]);
    }
    for f in [
        "exchange_report.csv",
        "exchange_trace.csv",
        "exchange_samples.csv",
    ] {
        assert_eq!(
            fs::read(a.join(f)).unwrap(),
            fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let v = ok(&["verify", "--out", s(&d.path().join("v"))]);
    let text = String::from_utf8(v.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 3);
}
