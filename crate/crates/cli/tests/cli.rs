use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qclassical(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qclassical"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn box_level_four_is_unresolvable() {
    let o = qclassical(&["criterion", "--model", "box", "--n", "4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("4.581489e-1"), "{text}");
    assert!(text.contains("unresolvable"));
}

#[test]
fn harmonic_is_period_blind() {
    let o = qclassical(&["criterion", "--model", "harmonic", "--n", "7"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("period-blind"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("period-blind"));
}

#[test]
fn quartic_criterion_json() {
    let o = qclassical(&[
        "criterion",
        "--model",
        "quartic",
        "--omega",
        "1",
        "--lambda",
        "1",
        "--n",
        "2",
        "--format",
        "json",
    ]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let y = v["records"][0]["y"].as_f64().unwrap();
    // πλ(ω+3λ)/((ω+2λ)(ω+4λ)) at ω = λ = 1.
    let expected = std::f64::consts::PI * 4.0 / 15.0;
    assert!((y - expected).abs() < 1e-14);
}

#[test]
fn box_scan_footer() {
    let o = qclassical(&["scan", "--model", "box", "--n-min", "2", "--n-max", "20"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.lines().any(|l| l == "# first_unresolvable=4"));
    assert_eq!(data_rows(&csv).len(), 19);
    assert!(csv.contains("# units: energy=E period=hbar/E"));
}

#[test]
fn hydrogenoid_scan_notes_discrepancy() {
    let o = qclassical(&[
        "scan",
        "--model",
        "hydrogenoid",
        "--n-min",
        "2",
        "--n-max",
        "20",
    ]);
    let csv = stdout(&o);
    assert!(csv.lines().any(|l| l == "# first_unresolvable=10"));
    assert!(csv
        .lines()
        .any(|l| l.starts_with("# note:") && l.contains("n=9")));
}

#[test]
fn morse_preset_rows_all_unresolvable() {
    let o = qclassical(&["scan", "--preset", "h2"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let rows = data_rows(&csv);
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.last().unwrap() == "unresolvable"));
    assert!(csv.contains("units=ev-angstrom-amu"));
    assert!(csv.contains("energy=eV"));
}

#[test]
fn evolve_snapshots() {
    let o = qclassical(&[
        "evolve",
        "--b",
        "3",
        "--grid",
        "log:0.01:10:7",
        "--include-zero",
    ]);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o));
    let at_zero: Vec<_> = rows.iter().filter(|r| r[0] == "0e0").collect();
    assert_eq!(at_zero.len(), 4);
    assert_eq!(at_zero[3][3], "1e0");
    for r in &rows {
        let trace: f64 = r[4].parse().unwrap();
        assert!((trace - 1.0).abs() <= 1e-8);
    }
}

#[test]
fn evolve_vacuum_is_geometric() {
    let o = qclassical(&[
        "evolve",
        "--b",
        "0",
        "--grid",
        "log:0.3:0.3:1",
        "--n-max",
        "10",
    ]);
    let rows = data_rows(&stdout(&o));
    assert_eq!(rows.len(), 11);
    let x: f64 = 0.6;
    for r in rows {
        let n: i32 = r[2].parse().unwrap();
        let p: f64 = r[3].parse().unwrap();
        let exact = x.powi(n) / (1.0 + x).powi(n + 1);
        assert!(((p - exact) / exact).abs() < 1e-12);
    }
}

#[test]
fn fidelity_audit_column() {
    let o = qclassical(&["fidelity", "--b", "2", "--grid", "log:0.01:10:4", "--audit"]);
    assert!(o.status.success());
    let csv = stdout(&o);
    assert!(csv.lines().any(|l| l == "# audit=matches"));
    for r in data_rows(&csv) {
        let f: f64 = r[1].parse().unwrap();
        assert!((0.0..=1.0).contains(&f));
    }
}

#[test]
fn ymean_reports_half_decay() {
    let o = qclassical(&[
        "ymean",
        "--b",
        "5",
        "--omega",
        "0.1",
        "--grid",
        "log:0.001:100:60",
    ]);
    assert!(o.status.success());
    let csv = stdout(&o);
    let line = csv
        .lines()
        .find(|l| l.starts_with("# half_decay_kt="))
        .unwrap();
    let kt: f64 = line.trim_start_matches("# half_decay_kt=").parse().unwrap();
    assert!(kt > 0.1 && kt < 10.0, "{kt}");
}

#[test]
fn identical_flags_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, args: &[&str]| {
        let path = dir.path().join(name);
        let mut all: Vec<&str> = args.to_vec();
        let p = path.to_str().unwrap().to_string();
        all.extend(["--out", &p]);
        assert!(qclassical(&all).status.success());
        fs::read(&path).unwrap()
    };
    let args = ["ymean", "--b", "3", "--grid", "log:0.001:100:40"];
    assert_eq!(run("a.csv", &args), run("b.csv", &args));
    let args = ["scan", "--model", "box", "--format", "json"];
    assert_eq!(run("a.json", &args), run("b.json", &args));

    let sidecar: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a.csv.manifest.json")).unwrap())
            .unwrap();
    assert!(sidecar["timestamp"].as_str().unwrap().ends_with('Z'));
    assert_eq!(sidecar["command"], "ymean");
    assert_eq!(sidecar["outputs"][0], "a.csv");
}

#[test]
fn figures_write_data_plot_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = qclassical(&["figures", "2", "--out", out, "--grid", "log:0.001:100:30"]);
    assert!(o.status.success());
    for f in ["fig2.csv", "fig2.svg", "fig2.csv.manifest.json"] {
        assert!(Path::new(out).join(f).exists(), "{f}");
    }
    let csv = fs::read_to_string(dir.path().join("fig2.csv")).unwrap();
    assert!(csv.contains("kt,survival_b1,survival_b5,survival_b10,survival_b15"));
    // Survival is ordered in b at mid times.
    for r in data_rows(&csv) {
        let kt: f64 = r[0].parse().unwrap();
        if (0.01..=1.0).contains(&kt) {
            let s: Vec<f64> = r[1..].iter().map(|v| v.parse().unwrap()).collect();
            assert!(s.windows(2).all(|w| w[1] <= w[0]));
        }
    }
    let svg = fs::read_to_string(dir.path().join("fig2.svg")).unwrap();
    assert_eq!(svg.matches("<polyline").count(), 4);

    let o = qclassical(&["figures", "1", "--out", out, "--grid", "log:0.001:100:30"]);
    assert!(o.status.success());
    let csv = fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    let first = &data_rows(&csv)[0];
    assert!(first[1..].iter().all(|v| v.parse::<f64>().unwrap() < 0.1));
}

#[test]
fn threshold_line_on_criterion_figures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = qclassical(&[
        "figures",
        "3",
        "--out",
        out,
        "--grid",
        "log:0.001:100:20",
        "--b",
        "2,5",
    ]);
    assert!(o.status.success());
    let svg = fs::read_to_string(dir.path().join("fig3.svg")).unwrap();
    assert!(svg.contains("ħ/2"));
    let csv = fs::read_to_string(dir.path().join("fig3.csv")).unwrap();
    assert!(csv.contains("kt,y_mean_b2,y_mean_b5"));
    assert!(csv.contains("# half_decay_kt_b2="));
}

#[test]
fn exit_codes() {
    assert_eq!(
        qclassical(&["criterion", "--model", "box", "--n", "1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qclassical(&["scan", "--model", "morse"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qclassical(&["evolve", "--grid", "lin:1:2:3"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qclassical(&["evolve", "--kappa", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qclassical(&["evolve", "--b", "1", "--grid", "log:1e7:1e7:1"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        qclassical(&["scan", "--preset", "/nonexistent/x.conf"])
            .status
            .code(),
        Some(4)
    );
    assert_eq!(
        qclassical(&["scan", "--model", "box", "--out", "/nonexistent/dir/x.csv"])
            .status
            .code(),
        Some(4)
    );
}
