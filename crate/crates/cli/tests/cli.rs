use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const SUBCOMMANDS: [&str; 8] = [
    "spectrum",
    "condensate",
    "heat-capacity",
    "q-temperature",
    "sample-events",
    "fit",
    "compare",
    "rerun",
];

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn qcrystal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcrystal"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> (String, String) {
    let out = qcrystal(args);
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(out.status.success(), "{args:?} failed: {stderr}");
    (String::from_utf8(out.stdout).unwrap(), stderr)
}

fn head(text: &str, lines: usize) -> Vec<&str> {
    text.lines().take(lines).collect()
}

fn keys(v: &Value) -> Vec<&str> {
    v.as_object().unwrap().keys().map(String::as_str).collect()
}

fn events_args<'a>(levels: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut args = vec![
        "sample-events",
        "--levels",
        levels,
        "--v-target",
        "1000 K",
        "--samples",
        "400",
        "--burn-in",
        "50",
    ];
    args.extend_from_slice(extra);
    args
}

#[test]
fn every_subcommand_has_help() {
    for sub in SUBCOMMANDS {
        let (stdout, _) = ok(&[sub, "--help"]);
        assert!(stdout.contains("Usage: qcrystal"), "{sub}");
        assert!(
            stdout.contains("--seed") && stdout.contains("--out"),
            "{sub}"
        );
    }
    let (stdout, _) = ok(&["--help"]);
    for sub in SUBCOMMANDS {
        assert!(stdout.contains(sub));
    }
}

#[test]
fn exit_codes() {
    assert_eq!(qcrystal(&["bogus"]).status.code(), Some(2));
    assert_eq!(
        qcrystal(&["heat-capacity", "--no-such-flag"]).status.code(),
        Some(2)
    );
    assert_eq!(qcrystal(&["condensate"]).status.code(), Some(2));
    assert_eq!(
        qcrystal(&["--threads", "0", "heat-capacity"]).status.code(),
        Some(2)
    );
    assert_eq!(
        qcrystal(&["heat-capacity", "--at", "300"]).status.code(),
        Some(1)
    );
    assert_eq!(
        qcrystal(&["condensate", "--n", "1000,10000", "--trials", "100"])
            .status
            .code(),
        Some(1)
    );
    let out = qcrystal(&["fit", "--input", "/nonexistent/data.csv"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn heat_capacity_at_fusion() {
    let (stdout, stderr) = ok(&["heat-capacity", "--model", "ice", "--at", "273.15"]);
    assert_eq!(
        head(&stdout, 3),
        [
            "# schema: qcrystal/heat-capacity/1",
            "T_K,Cp_J_per_molK,theta_K,alpha_sq,beta_sq",
            "273.15,37.41508178168958,266.15,1,0"
        ]
    );
    assert!(stderr.starts_with("37.4151 J/(mol·K)"));
}

#[test]
fn csv_schemas_are_pinned() {
    let levels = fixture("levels_harmonic12.csv");
    let cases: Vec<(Vec<&str>, [&str; 2])> = vec![
        (
            vec!["spectrum", "--points", "512", "--levels", "4"],
            ["# schema: qcrystal/spectrum/1", "level,energy_J,energy_cm1"],
        ),
        (
            vec!["condensate", "--n", "10,100,1000", "--trials", "100"],
            [
                "# schema: qcrystal/condensate/1",
                "n,mean_abs_phi_sq,stderr,slope_fit",
            ],
        ),
        (
            vec![
                "heat-capacity",
                "--model",
                "kdp",
                "--from",
                "100",
                "--to",
                "130",
            ],
            [
                "# schema: qcrystal/heat-capacity/1",
                "T_K,Cp_J_per_molK,theta_K,alpha_sq,beta_sq",
            ],
        ),
        (
            vec!["q-temperature", "--from", "7", "--to", "20"],
            [
                "# schema: qcrystal/q-temperature/1",
                "T_K,theta_K,alpha_sq,beta_sq,v_theta_J_per_mol",
            ],
        ),
        (
            events_args(&levels, &[]),
            [
                "# schema: qcrystal/occupations/1",
                "level,energy_J,degeneracy,mean_occupation,stderr",
            ],
        ),
    ];
    for (args, want) in cases {
        let (stdout, _) = ok(&args);
        assert_eq!(head(&stdout, 2), want, "{args:?}");
    }
}

#[test]
fn json_schemas_are_pinned() {
    let (stdout, _) = ok(&[
        "q-temperature",
        "--model",
        "kdp",
        "--nu1",
        "100cm-1",
        "--nut",
        "10 cm-1",
    ]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["schema"], "qcrystal/transition/1");
    assert_eq!(
        keys(&v),
        [
            "kind",
            "model",
            "nu1_hz",
            "nut_hz",
            "schema",
            "transition_temperature_k"
        ]
    );

    let (stdout, _) = ok(&["fit", "--input", &fixture("synthetic_ice.csv")]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(
        keys(&v),
        ["failures", "n_points", "provenance", "reports", "schema"]
    );
    assert_eq!(v["schema"], "qcrystal/fit-report/1");
    let report = &v["reports"][0];
    assert_eq!(
        keys(report),
        [
            "aicc",
            "degenerate",
            "model_id",
            "n_points",
            "parameters",
            "r_squared",
            "residuals",
            "rmse",
            "warnings",
            "weighted"
        ]
    );
    let aleph = report["parameters"]
        .as_array()
        .unwrap()
        .iter()
        .find(|p| p["name"] == "aleph_tt")
        .unwrap();
    assert!((aleph["value"].as_f64().unwrap() - 7.0).abs() < 1e-8);

    let (stdout, _) = ok(&["compare", "--input", &fixture("synthetic_debye.csv")]);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(keys(&v), ["comparisons", "schema"]);
    assert_eq!(v["schema"], "qcrystal/comparison/1");
    assert_eq!(v["comparisons"][0]["comparison"]["ranking"][0], "debye");
}

#[test]
fn out_writes_data_report_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("occ.csv");
    let levels = fixture("levels_harmonic12.csv");
    let out_s = out.to_string_lossy().into_owned();
    let (stdout, _) = ok(&events_args(&levels, &["--seed", "9", "--out", &out_s]));
    assert!(stdout.contains("Boltzmann fit"));
    let report: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("occ.csv.fit.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(report["schema"], "qcrystal/events-fit/1");
    let manifest: Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("occ.csv.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["schema"], "qcrystal/manifest/1");
    assert_eq!(manifest["subcommand"], "sample-events");
    assert_eq!(manifest["seed"], 9);
    assert_eq!(manifest["outputs"].as_array().unwrap().len(), 2);
    for key in [
        "tool",
        "version",
        "rng_algorithm",
        "timestamp_unix",
        "invocation",
    ] {
        assert!(manifest.get(key).is_some(), "{key}");
    }
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> (PathBuf, Vec<u8>) {
    let out = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let out_s = out.to_string_lossy().into_owned();
    full.extend(["--out", &out_s]);
    ok(&full);
    let bytes = std::fs::read(&out).unwrap();
    (out, bytes)
}

#[test]
fn rerun_reproduces_stochastic_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let levels = fixture("levels_harmonic12.csv");
    let (out, first) = run_to(
        dir.path(),
        "events.csv",
        &events_args(&levels, &["--seed", "5"]),
    );
    let manifest = format!("{}.manifest.json", out.display());
    ok(&["rerun", "--manifest", &manifest]);
    assert_eq!(std::fs::read(&out).unwrap(), first);

    let moved = dir.path().join("again.csv").to_string_lossy().into_owned();
    ok(&[
        "rerun",
        "--manifest",
        &manifest,
        "--out",
        &moved,
        "--threads",
        "1",
    ]);
    assert_eq!(std::fs::read(&moved).unwrap(), first);

    let (cond, _) = run_to(
        dir.path(),
        "cond.csv",
        &[
            "condensate",
            "--n",
            "10,100,1000",
            "--trials",
            "200",
            "--seed",
            "3",
        ],
    );
    ok(&[
        "rerun",
        "--manifest",
        &format!("{}.manifest.json", cond.display()),
    ]);
}

#[test]
fn rerun_detects_changed_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (out, _) = run_to(
        dir.path(),
        "cond.csv",
        &["condensate", "--n", "10,100,1000", "--trials", "100"],
    );
    let manifest_path = format!("{}.manifest.json", out.display());
    let mut manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(&manifest_path).unwrap()).unwrap();
    manifest["outputs"][0]["sha256"] = Value::from("0".repeat(64));
    std::fs::write(&manifest_path, manifest.to_string()).unwrap();
    assert_eq!(
        qcrystal(&["rerun", "--manifest", &manifest_path])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let levels = fixture("levels_harmonic12.csv");
    let (one, _) = ok(&events_args(&levels, &["--threads", "1"]));
    let (three, _) = ok(&events_args(&levels, &["--threads", "3"]));
    assert_eq!(one, three);
    let cond = ["condensate", "--n", "10,100,1000", "--trials", "300"];
    let (a, _) = ok(&[&cond[..], &["--threads", "1"]].concat());
    let (b, _) = ok(&[&cond[..], &["--threads", "4"]].concat());
    assert_eq!(a, b);
}

#[test]
fn spectrum_reads_a_config_file() {
    let (from_file, _) = ok(&[
        "spectrum",
        "--config",
        &fixture("double_well.conf"),
        "--levels",
        "4",
    ]);
    let (from_flags, _) = ok(&["spectrum", "--bias", "200cm-1", "--levels", "4"]);
    assert_eq!(from_file, from_flags);
}
