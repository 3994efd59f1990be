use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_capcal");

// Published comparison table: d (µm), C exact/PFA/expansion (pF), -F/(V-V0)^2 exact/PFA/expansion (pF/m).
const TABLE: [[f64; 7]; 8] = [
    [0.5, 0.06371, 0.04808, 0.06360, 8350.23, 8417.21, 8355.18],
    [1.0, 0.05794, 0.04225, 0.05770, 4148.06, 4208.60, 4149.75],
    [1.5, 0.05458, 0.03884, 0.05423, 2748.97, 2805.74, 2749.56],
    [2.0, 0.05222, 0.03641, 0.05176, 2050.22, 2104.30, 2050.40],
    [2.5, 0.05039, 0.03454, 0.04983, 1631.44, 1683.44, 1631.47],
    [3.0, 0.04891, 0.03300, 0.04824, 1352.56, 1402.87, 1352.56],
    [3.5, 0.04766, 0.03170, 0.04689, 1153.59, 1202.46, 1153.58],
    [4.0, 0.04659, 0.03058, 0.04572, 1004.54, 1052.15, 1004.53],
];

fn run_in(dir: Option<&Path>, args: &[&str]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args).env_remove("CAPCAL_OUT_DIR");
    if let Some(d) = dir {
        cmd.current_dir(d);
    }
    cmd.output().expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    run_in(None, args)
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(
        o.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

/// Data rows of a CSV with a single header line, as numbers.
fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect()
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

#[test]
fn eval_exact_sphere_table_point() {
    let rows = csv_rows(&ok(&[
        "eval", "--model", "exact", "--R-um", "151.3", "--d-um", "0.5", "--format", "csv",
    ]));
    assert_eq!(rows.len(), 1);
    assert!(rel(rows[0][1], 0.06371) < 2e-4, "{}", rows[0][1]);
    assert!(rel(rows[0][2], 8350.23) < 2e-4, "{}", rows[0][2]);
}

#[test]
fn eval_pfa_vanishes_at_d_equal_r() {
    let rows = csv_rows(&ok(&[
        "eval", "--model", "pfa", "--R-um", "151.3", "--d-um", "151.3", "--format", "csv",
    ]));
    assert_eq!(rows[0][1], 0.0);
}

#[test]
fn eval_negative_separation_is_domain_error() {
    let o = run(&["eval", "--model", "modified", "--d-nm", "-5"]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("modified") && err.contains("d = -5"), "{err}");
}

#[test]
fn flag_errors_exit_2() {
    assert_eq!(code(&run(&["eval", "--bogus"])), 2);
    assert_eq!(
        code(&run(&["eval", "--model", "nonsense", "--d-um", "1"])),
        2
    );
    assert_eq!(
        code(&run(&[
            "eval", "--model", "exact", "--R-um", "-1", "--d-um", "1"
        ])),
        2
    );
    assert_eq!(
        code(&run(&[
            "eval", "--model", "smallsep", "--theta", "2", "--d-um", "1"
        ])),
        2
    );
    assert_eq!(code(&run(&["eval", "--model", "exact"])), 2);
    assert_eq!(code(&run(&[])), 2);
}

#[test]
fn eval_piezo_voltages() {
    let out = ok(&[
        "eval",
        "--model",
        "modified",
        "--c-tilde-pF",
        "197.69",
        "--beta-nm-per-V",
        "87",
        "--v0-pzt",
        "69.93",
        "--v-pzt",
        "0",
        "--format",
        "csv",
    ]);
    let rows = csv_rows(&out);
    assert!((rows[0][2] - 214.20).abs() < 0.02, "{}", rows[0][2]);
}

#[test]
fn table_reproduces_published_values() {
    let rows = csv_rows(&ok(&["table", "--table-compat", "--format", "csv"]));
    assert_eq!(rows.len(), 8);
    for (got, want) in rows.iter().zip(TABLE.iter()) {
        assert_eq!(got[0], want[0]);
        for col in 1..7 {
            assert!(
                rel(got[col], want[col]) < 2e-4,
                "d = {} col {}: {} vs {}",
                want[0],
                col + 1,
                got[col],
                want[col]
            );
        }
    }
}

#[test]
fn table_as_printed_changes_only_column_4() {
    let compat = csv_rows(&ok(&["table", "--table-compat", "--format", "csv"]));
    let printed = csv_rows(&ok(&["table", "--format", "csv"]));
    for (c, p) in compat.iter().zip(&printed) {
        for col in [0, 1, 2, 4, 5, 6] {
            assert_eq!(c[col], p[col]);
        }
        assert_ne!(c[3], p[3]);
        assert!(rel(p[3], c[3]) < 0.02);
    }
}

#[test]
fn table_single_row_text() {
    let text = ok(&["table", "--d-um", "1.0", "--table-compat"]);
    let line = text.lines().nth(1).unwrap();
    let fields: Vec<&str> = line.split_whitespace().collect();
    assert_eq!(fields[0], "1.0");
    assert_eq!(fields[1], "0.05794");
    assert_eq!(fields[4], "4148.06");
}

#[test]
fn curves_structure() {
    let rows = csv_rows(&ok(&["curves", "--format", "csv"]));
    assert_eq!(rows.len(), 400);
    assert!((rows[0][0] - 30.0).abs() < 1e-9 && (rows[399][0] - 10_000.0).abs() < 1e-6);
    assert!(
        rows.windows(2).all(|w| w[1][1] < w[0][1]),
        "C_mod not monotone"
    );

    let near = |target: f64| {
        rows.iter()
            .min_by(|a, b| (a[0] - target).abs().total_cmp(&(b[0] - target).abs()))
            .unwrap()
    };
    let r = near(50.0);
    assert!((r[2] - r[1]).abs() < (r[3] - r[1]).abs());
    let r = near(5000.0);
    assert!((r[3] - r[1]).abs() < (r[2] - r[1]).abs());
}

#[test]
fn curves_c_tilde_shifts_modified_column() {
    let base = csv_rows(&ok(&["curves", "--samples", "20", "--format", "csv"]));
    let shifted = csv_rows(&ok(&[
        "curves",
        "--samples",
        "20",
        "--c-tilde-pF",
        "197.69",
        "--format",
        "csv",
    ]));
    for (b, s) in base.iter().zip(&shifted) {
        assert!((s[1] - b[1] - 197.69).abs() < 1e-11);
        assert_eq!(s[2], b[2]);
    }
}

#[test]
fn exponent_examples() {
    let exp = |args: &[&str]| {
        let mut a = vec!["exponent", "--format", "json"];
        a.extend_from_slice(args);
        json(&ok(&a))["exponent"].as_f64().unwrap()
    };
    assert!((exp(&["--model", "pfa"]) - 2.0).abs() < 1e-6);
    assert!((exp(&["--model", "pfa", "--from-nm", "500", "--to-nm", "4000"]) - 2.0).abs() < 1e-6);
    let m = exp(&["--model", "modified"]);
    assert!((1.6..=1.8).contains(&m), "{m}");
    let s = exp(&["--model", "exact", "--R-um", "30900"]);
    assert!((s - 2.0).abs() < 1e-3, "{s}");
}

#[test]
fn exponent_text_has_gradient_table() {
    let text = ok(&["exponent", "--model", "pfa", "--points", "5"]);
    assert!(text.contains("2.000000"));
    assert_eq!(text.lines().count(), 3 + 5);
}

#[test]
fn synth_defaults_reproduce_mto_design() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(Some(dir.path()), &["synth"]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(dir.path().join("synthetic.csv")).unwrap();
    assert!(text.starts_with("# kind=separation_nm\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 351);
    assert!((rows[0][0] - 500.5).abs() < 1e-9);
    assert!((rows[350][0] - 4000.2).abs() < 1e-9);
    assert!(rows.iter().all(|r| (r[2] - 2e-4).abs() < 1e-15));

    let side = json(&std::fs::read_to_string(dir.path().join("synthetic.synth.json")).unwrap());
    assert_eq!(side["synth"]["seed"], 42);
    assert_eq!(side["synth"]["add_noise"], true);
    assert!(side["versions"]["generator"]
        .as_str()
        .unwrap()
        .contains("ChaCha20"));
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.csv", "b.csv"] {
        assert!(
            run_in(Some(dir.path()), &["synth", "--seed", "7", "--out", name])
                .status
                .success()
        );
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b);
    assert!(run_in(
        Some(dir.path()),
        &["synth", "--seed", "8", "--out", "c.csv"]
    )
    .status
    .success());
    assert_ne!(a, std::fs::read(dir.path().join("c.csv")).unwrap());
}

#[test]
fn synth_sigma_zero_is_model_curve() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        Some(dir.path()),
        &[
            "synth",
            "--sigma",
            "0",
            "-n",
            "11",
            "--from-nm",
            "500",
            "--to-nm",
            "1500",
            "--out",
            "clean.csv",
        ],
    );
    assert!(o.status.success());
    let rows = csv_rows(&std::fs::read_to_string(dir.path().join("clean.csv")).unwrap());
    let ds: Vec<String> = rows.iter().map(|r| r[0].to_string()).collect();
    let curve = csv_rows(&ok(&[
        "eval",
        "--model",
        "exact",
        "--parasitic-a1-pF",
        "72.32971",
        "--parasitic-a2-pF-per-um",
        "2.18e-4",
        "--d-nm",
        &ds.join(","),
        "--format",
        "csv",
    ]));
    for (r, c) in rows.iter().zip(&curve) {
        assert_eq!(r[1], c[1], "d = {} nm", r[0]);
    }
}

#[test]
fn synth_domain_error_names_separation() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        Some(dir.path()),
        &["synth", "--from-nm", "-10", "--to-nm", "10", "-n", "3"],
    );
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("d = -10 nm"), "{err}");
    assert!(!dir.path().join("synthetic.csv").exists());
}

fn fit_json(dir: &Path, csv: &str, family: &str) -> serde_json::Value {
    let o = run_in(
        Some(dir),
        &["fit", csv, "--family", family, "--format", "json"],
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    json(&String::from_utf8(o.stdout).unwrap())
}

fn param(report: &serde_json::Value, name: &str) -> f64 {
    report["params"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["name"] == name)
        .unwrap()["value"]
        .as_f64()
        .unwrap()
}

#[test]
fn fit_round_trip_seed_42() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(
        Some(dir.path()),
        &["synth", "--seed", "42", "--out", "mto.csv"]
    )
    .status
    .success());
    let exact = fit_json(dir.path(), "mto.csv", "exact-parasitic");
    let chi2r = exact["reduced_chi2"].as_f64().unwrap();
    assert!((0.78..=1.25).contains(&chi2r), "{chi2r}");
    let pfa = fit_json(dir.path(), "mto.csv", "pfa-parasitic");
    let shift = (param(&pfa, "A1") - param(&exact, "A1")) * 1e12;
    assert!(rel(shift, 0.01559) < 0.1, "{shift}");
}

#[test]
fn fit_noiseless_chi2_vanishes() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(
        Some(dir.path()),
        &["synth", "--sigma", "0", "--out", "clean.csv"]
    )
    .status
    .success());
    let r = fit_json(dir.path(), "clean.csv", "exact-parasitic");
    let dof = r["dof"].as_f64().unwrap();
    assert!(r["chi2"].as_f64().unwrap() < 1e-12 * dof);
}

#[test]
fn fit_json_is_stable_under_reserialization() {
    let dir = tempfile::tempdir().unwrap();
    assert!(run_in(Some(dir.path()), &["synth", "--out", "mto.csv"])
        .status
        .success());
    let o = run_in(
        Some(dir.path()),
        &[
            "fit",
            "mto.csv",
            "--family",
            "exact-parasitic",
            "--format",
            "json",
        ],
    );
    let text = String::from_utf8(o.stdout).unwrap();
    let report = capcal::calibration::FitReport::from_json(&text).unwrap();
    assert_eq!(report.to_json() + "\n", text);
}

#[test]
fn fit_contact_voltage_and_nonconvergence() {
    let dir = tempfile::tempdir().unwrap();
    let synth = run_in(
        Some(dir.path()),
        &[
            "synth",
            "--model",
            "modified",
            "--c-tilde-pF",
            "197.69",
            "--no-parasitic",
            "--v-pzt-range",
            "0",
            "68",
            "--beta-nm-per-V",
            "87",
            "--v0-pzt",
            "69.93",
            "-n",
            "200",
            "--sigma-pF",
            "0.0015",
            "--out",
            "lens.csv",
        ],
    );
    assert!(
        synth.status.success(),
        "{}",
        String::from_utf8_lossy(&synth.stderr)
    );

    let o = run_in(
        Some(dir.path()),
        &[
            "fit",
            "lens.csv",
            "--family",
            "modified",
            "--beta-nm-per-V",
            "87",
            "--format",
            "json",
        ],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let r = json(&String::from_utf8(o.stdout).unwrap());
    assert!((param(&r, "V0_PZT") - 69.93).abs() < 0.01);
    assert!((param(&r, "C_tilde") * 1e12 - 197.69).abs() < 0.005);
    assert_eq!(r["profile"]["converged"], true);

    let o = run_in(
        Some(dir.path()),
        &[
            "fit",
            "lens.csv",
            "--family",
            "modified",
            "--beta-nm-per-V",
            "87",
            "--v0-min",
            "70.5",
            "--v0-max",
            "75",
            "--format",
            "json",
            "--out",
            "pinned.json",
        ],
    );
    assert_eq!(code(&o), 4);
    let report = json(&std::fs::read_to_string(dir.path().join("pinned.json")).unwrap());
    assert_eq!(report["profile"]["boundary_pinned"], true);
}

#[test]
fn fit_piezo_dataset_needs_beta() {
    let dir = tempfile::tempdir().unwrap();
    run_in(
        Some(dir.path()),
        &[
            "synth",
            "--v-pzt-range",
            "0",
            "60",
            "--beta-nm-per-V",
            "87",
            "--v0-pzt",
            "69.93",
            "--out",
            "p.csv",
        ],
    );
    let o = run_in(
        Some(dir.path()),
        &["fit", "p.csv", "--family", "exact-parasitic"],
    );
    assert_eq!(code(&o), 2);
    let o = run_in(
        Some(dir.path()),
        &[
            "fit",
            "p.csv",
            "--family",
            "exact-parasitic",
            "--beta-nm-per-V",
            "87",
            "--v0-pzt",
            "69.93",
        ],
    );
    assert!(o.status.success());
}

#[test]
fn fit_io_and_format_errors() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_in(
        Some(dir.path()),
        &["fit", "missing.csv", "--family", "powerlaw"],
    );
    assert_eq!(code(&o), 5);
    std::fs::write(
        dir.path().join("bad.csv"),
        "# kind=separation_nm\nx,cap_pF,sigma_pF\n1,abc,1\n",
    )
    .unwrap();
    let o = run_in(
        Some(dir.path()),
        &["fit", "bad.csv", "--family", "powerlaw"],
    );
    assert_eq!(code(&o), 6);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn out_dir_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(BIN)
        .args(["table", "--out", "t.txt"])
        .env("CAPCAL_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("t.txt")).unwrap();
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn unwritable_output_is_io_error() {
    let o = run(&["table", "--out", "/nonexistent-dir/t.txt"]);
    assert_eq!(code(&o), 5);
}
