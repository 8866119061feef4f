use std::path::Path;
use std::process::{Command, Output};

use walksearch::GraphFamily;
use walksearch_cli::commands::{
    CONSTANTS_COLUMNS, CRITICAL_COLUMNS, EVOLVE_COLUMNS, LEVELS_COLUMNS, OPTIMAL_COLUMNS,
    POLES_COLUMNS, ROOTS_COLUMNS, SCALING_COLUMNS, SCAN_COLUMNS, SECULAR_COLUMNS, VALIDATE_COLUMNS,
};
use walksearch_cli::{parse_graph_spec, SpecError};

fn walksearch(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_walksearch"))
        .arg("--out")
        .arg(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn header(path: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.headers().unwrap().iter().map(str::to_string).collect()
}

fn error_json(out: &Output) -> serde_json::Value {
    let text = String::from_utf8_lossy(&out.stderr);
    serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("not JSON: {text}"))
}

#[test]
fn graph_spec_examples() {
    assert_eq!(
        parse_graph_spec("lattice:4:6").unwrap(),
        GraphFamily::Lattice { dim: 4, side: 6 }
    );
    assert_eq!(
        parse_graph_spec("lattice:4:6").unwrap().num_vertices(),
        1296
    );
    assert_eq!(
        parse_graph_spec("complete:1024").unwrap(),
        GraphFamily::Complete { num_vertices: 1024 }
    );
    assert!(matches!(
        parse_graph_spec("lattice:1:1"),
        Err(SpecError::Range { .. })
    ));
    assert!(matches!(
        parse_graph_spec("complete:1"),
        Err(SpecError::Range { .. })
    ));
    assert!(matches!(
        parse_graph_spec("lattice:3"),
        Err(SpecError::Syntax { position: 9, .. })
    ));
    assert!(matches!(
        parse_graph_spec("complete:-4"),
        Err(SpecError::Syntax { position: 9, .. })
    ));
}

/// Column names are part of the output contract.
#[test]
fn csv_schemas_are_stable() {
    let expected: [(&[&str], &str); 11] = [
        (CONSTANTS_COLUMNS, "kind,j,d,n,a,value,error_estimate,method,truncation"),
        (ROOTS_COLUMNS, "index,energy,secular_derivative,w_overlap_sq,s_overlap_sq,residual"),
        (LEVELS_COLUMNS, "index,level,multiplicity,pole,irrelevant"),
        (SCAN_COLUMNS, "gamma,e0,e1,gap,overlap_s_psi0,overlap_s_psi1,overlap_w_psi0,overlap_w_psi1"),
        (EVOLVE_COLUMNS, "t,amplitude_re,amplitude_im,probability"),
        (OPTIMAL_COLUMNS, "gamma,t_max,t_star,p_star"),
        (CRITICAL_COLUMNS, "family,n,gamma_c,scan_center,margin,e0,e1,gap,overlap_s_psi0,overlap_s_psi1,overlap_w_psi0,overlap_w_psi1"),
        (SCALING_COLUMNS, "n,gamma_used,gap,t_star,p_star,runtime_metric"),
        (VALIDATE_COLUMNS, "family,gamma,t,amplitude_delta,eigenvalue_delta,w_weight_delta,s_weight_delta,unmatched"),
        (SECULAR_COLUMNS, "segment,energy,secular_value"),
        (POLES_COLUMNS, "energy,multiplicity,irrelevant"),
    ];
    for (cols, line) in expected {
        assert_eq!(cols.join(","), line);
    }
}

#[test]
fn written_headers_match_schemas() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(walksearch(d, &["constants"]).status.success());
    assert!(
        walksearch(d, &["spectrum", "--graph", "hypercube:6", "--gamma", "0.1"])
            .status
            .success()
    );
    assert!(
        walksearch(d, &["scan", "--graph", "lattice:3:4", "--points", "5"])
            .status
            .success()
    );
    assert!(walksearch(
        d,
        &["evolve", "--graph", "complete:64", "--gamma", "0.015625"]
    )
    .status
    .success());
    assert!(walksearch(d, &["critical", "--graph", "lattice:5:4"])
        .status
        .success());
    assert!(walksearch(d, &["scaling", "--dim", "5", "--sides", "3,4"])
        .status
        .success());
    let cases: [(&str, &[&str]); 8] = [
        ("constants.csv", CONSTANTS_COLUMNS),
        ("spectrum.csv", ROOTS_COLUMNS),
        ("levels.csv", LEVELS_COLUMNS),
        ("scan.csv", SCAN_COLUMNS),
        ("evolve.csv", EVOLVE_COLUMNS),
        ("optimal.csv", OPTIMAL_COLUMNS),
        ("critical.csv", CRITICAL_COLUMNS),
        ("scaling.csv", SCALING_COLUMNS),
    ];
    for (file, cols) in cases {
        assert_eq!(header(&d.join(file)), cols, "{file}");
    }
    let bounds: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.join("bounds.json")).unwrap()).unwrap();
    let report = &bounds[0]["bounds"][0];
    for key in ["bound_id", "lhs", "rhs", "slack", "pass"] {
        assert!(report.get(key).is_some(), "{key}");
    }
}

#[test]
fn floats_round_trip_through_csv() {
    let dir = tempfile::tempdir().unwrap();
    assert!(walksearch(
        dir.path(),
        &["spectrum", "--graph", "lattice:2:5", "--gamma", "0.3"]
    )
    .status
    .success());
    let graph = parse_graph_spec("lattice:2:5").unwrap();
    let ls = walksearch::graph::level_spectrum(&graph).unwrap();
    let spec = walksearch::secular::solve_spectrum(&ls, 0.3).unwrap();
    let mut r = csv::Reader::from_path(dir.path().join("spectrum.csv")).unwrap();
    for (rec, root) in r.records().zip(&spec.roots) {
        let e: f64 = rec.unwrap()[1].parse().unwrap();
        assert_eq!(e.to_bits(), root.energy.to_bits());
    }
}

#[test]
fn json_mirrors_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = [
        "scan",
        "--graph",
        "hypercube:5",
        "--gamma-range",
        "0.05,0.3",
        "--points",
        "7",
    ];
    assert!(walksearch(d, &args).status.success());
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json"]);
    assert!(walksearch(d, &json_args).status.success());
    let rows: Vec<serde_json::Map<String, serde_json::Value>> =
        serde_json::from_str(&std::fs::read_to_string(d.join("scan.json")).unwrap()).unwrap();
    let mut r = csv::Reader::from_path(d.join("scan.csv")).unwrap();
    let records: Vec<csv::StringRecord> = r.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 7);
    for (obj, rec) in rows.iter().zip(&records) {
        let keys: Vec<&String> = obj.keys().collect();
        assert_eq!(keys, SCAN_COLUMNS);
        for (i, col) in SCAN_COLUMNS.iter().enumerate() {
            let from_csv: f64 = rec[i].parse().unwrap();
            assert_eq!(obj[*col].as_f64().unwrap(), from_csv);
        }
    }
}

#[test]
fn manifest_records_resolved_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = walksearch(
        dir.path(),
        &["scan", "--graph", "lattice:4:4", "--points", "3"],
    );
    assert!(out.status.success());
    let m: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("scan.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(m["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(m["config"]["command"], "scan");
    assert_eq!(m["config"]["graph"][0], "lattice:4:4");
    let range = m["config"]["gamma_range"].as_array().unwrap();
    assert!(range[0].as_f64().unwrap() < range[1].as_f64().unwrap());
    assert_eq!(m["artifacts"][0], "scan.csv");
}

#[test]
fn identical_configs_give_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = [
        "evolve",
        "--graph",
        "lattice:3:6",
        "--gamma",
        "0.25",
        "--plot",
        "svg",
    ];
    assert!(walksearch(a.path(), &args).status.success());
    assert!(walksearch(b.path(), &args).status.success());
    for f in ["evolve.csv", "optimal.csv", "evolve.svg"] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
}

#[test]
fn output_directory_comes_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_walksearch"))
        .env("WALKSEARCH_OUT", dir.path())
        .arg("constants")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("constants.csv").exists());
    assert!(dir.path().join("constants.manifest.json").exists());
    let leftovers = std::fs::read_dir(dir.path())
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .file_name()
                .to_string_lossy()
                .starts_with(".tmp")
        })
        .count();
    assert_eq!(leftovers, 0);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["spectrum", "--graph", "lattice:1:1", "--gamma", "1"][..],
        &["spectrum", "--graph", "ring:5", "--gamma", "1"],
        &["spectrum", "--graph", "complete:8", "--gamma", "-1"],
        &["scan", "--graph", "complete:8", "--gamma-range", "0.3,0.1"],
        &["constants", "--plot", "svg"],
        &[
            "scan",
            "--graph",
            "complete:8",
            "--plot",
            "svg",
            "--format",
            "json",
        ],
        &["no-such-command"],
    ] {
        let out = walksearch(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(error_json(&out)["exit_code"], 2);
    }
    let out = walksearch(
        dir.path(),
        &["spectrum", "--graph", "lattice:4x:6", "--gamma", "1"],
    );
    let msg = error_json(&out)["message"].as_str().unwrap().to_string();
    assert!(msg.contains("position 9"), "{msg}");
}

#[test]
fn computation_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    // Inside the critical window the bound suites refuse to run.
    let gc = walksearch::analysis::find_critical_gamma(&parse_graph_spec("lattice:5:4").unwrap())
        .unwrap();
    let gamma = format!("{}", gc * 1.01);
    let out = walksearch(
        dir.path(),
        &["critical", "--graph", "lattice:5:4", "--gamma", &gamma],
    );
    assert_eq!(out.status.code(), Some(3));
    let e = error_json(&out);
    assert_eq!(e["error"], "computation");
    assert_eq!(e["exit_code"], 3);
    let out = walksearch(
        dir.path(),
        &[
            "validate",
            "--graph",
            "lattice:3:20",
            "--oracle-cap",
            "100",
            "--draws",
            "1",
        ],
    );
    // Families above the cap are skipped, which leaves an empty passing report.
    assert!(out.status.success());
}

#[test]
fn failed_validation_still_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = walksearch(
        dir.path(),
        &[
            "validate",
            "--graph",
            "lattice:2:6",
            "--draws",
            "2",
            "--tolerance",
            "1e-300",
        ],
    );
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(error_json(&out)["error"], "validation");
    assert!(dir.path().join("validate.csv").exists());
    assert!(dir.path().join("validate.manifest.json").exists());
}

#[test]
fn figures_cover_all_datasets() {
    let dir = tempfile::tempdir().unwrap();
    assert!(walksearch(dir.path(), &["figures"]).status.success());
    for stem in [
        "fig1_complete_1024",
        "fig2_hypercube_10",
        "fig3_lattice_5_4",
        "fig3_lattice_4_6",
        "fig3_lattice_3_10",
        "fig3_lattice_2_32",
        "fig4_lattice_2_4_secular",
    ] {
        assert!(dir.path().join(format!("{stem}.csv")).exists(), "{stem}");
        let script = std::fs::read_to_string(dir.path().join(format!("{stem}.gp"))).unwrap();
        assert!(script.contains(&format!("'{stem}.csv'")));
    }
    assert_eq!(
        header(&dir.path().join("fig4_lattice_2_4_secular.csv")),
        SECULAR_COLUMNS
    );
}
