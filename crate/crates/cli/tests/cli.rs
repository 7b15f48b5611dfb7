use std::process::{Command, Output};

fn tisim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tisim"))
        .args(args)
        .output()
        .expect("run tisim")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn run_writes_json_and_csv_with_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = tisim(&[
        "run",
        "--scenario",
        "quantum_liar",
        "--trials",
        "20000",
        "--seed",
        "11",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(json["seed"], 11);
    assert_eq!(json["trials"], 20000);
    assert_eq!(json["scenario"], "quantum_liar");
    assert_eq!(json["extras"]["conditional_D"]["bell"], "Psi-");
    let csv = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("label,count,frequency,sigma,analytic_p,pass"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn swap_report_has_eve_marginal_and_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("swap.json");
    let o = tisim(&[
        "run",
        "swap",
        "--eve-basis",
        "bell",
        "--trials",
        "100000",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let marginal = json["extras"]["eve_marginal"].as_array().unwrap();
    assert_eq!(marginal.len(), 4);
    for row in marginal {
        assert!((row["frequency"].as_f64().unwrap() - 0.25).abs() < 0.01);
    }
    assert!(json["extras"]["conditional"]["min"].as_f64().unwrap() > 1.0 - 1e-9);
}

#[test]
fn maudlin_without_c_exits_three() {
    let o = tisim(&["run", "maudlin"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("deficit 0.500000"));
    assert!(tisim(&["run", "maudlin", "--far-left-absorber", "--trials", "1000"])
        .status
        .success());
}

#[test]
fn gate_failure_exits_one() {
    // an odd trial count can never hit 1/2 exactly, so k = 0 must fail
    let o = tisim(&["run", "renninger", "--trials", "1001", "--k-sigma", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[renninger]\nfraction = 0.5\nradius = 2\n").unwrap();
    assert_eq!(
        tisim(&["run", "renninger", "--config", bad.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(tisim(&["run"]).status.code(), Some(2));
    assert_eq!(tisim(&["run", "nonsense"]).status.code(), Some(2));
    assert_eq!(tisim(&["run", "renninger", "--trials", "0"]).status.code(), Some(2));
    assert_eq!(
        tisim(&["run", "renninger", "--eve-basis", "bell"]).status.code(),
        Some(2)
    );
    assert_eq!(tisim(&["graph", "renninger"]).status.code(), Some(2));
    assert_eq!(
        tisim(&["run", "renninger", "--scenario", "swap"]).status.code(),
        Some(2)
    );
}

#[test]
fn config_file_selects_scenario_and_section() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "scenario = \"renninger\"\n[renninger]\nfraction = 0.25\n").unwrap();
    let o = tisim(&["analyze", "--config", cfg.to_str().unwrap()]);
    assert!(o.status.success());
    let text = stdout(&o);
    let p = |label: &str| -> f64 {
        let line = text.lines().find(|l| l.trim_start().starts_with(label)).unwrap();
        line.split_whitespace().nth(1).unwrap().parse().unwrap()
    };
    assert!((p("E1") - 0.25).abs() < 1e-12, "{text}");
    assert!((p("E2") - 0.75).abs() < 1e-12, "{text}");
}

#[test]
fn analyze_swap_bell_lists_schmidt_and_labels() {
    let o = tisim(&["analyze", "swap", "--eve-basis", "bell"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for label in ["Phi+", "Phi-", "Psi+", "Psi-"] {
        let line = text
            .lines()
            .find(|l| l.trim_start().starts_with(&format!("{label} ")))
            .unwrap_or_else(|| panic!("{label} missing:\n{text}"));
        assert!(line.contains("p=0.250000"));
        assert!(line.contains("schmidt=(0.707107, 0.707107)"));
        assert!(line.contains(&format!("bell={label}")));
    }
}

#[test]
fn graph_to_stdout_and_file_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.dot");
    let to_file = tisim(&["graph", "swap", "--graph-out", path.to_str().unwrap()]);
    let to_stdout = tisim(&["graph", "swap"]);
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(stdout(&to_stdout).starts_with(&dot));
    assert!(stdout(&to_file).contains("D1 and D4: connected"));
    assert!(stdout(&tisim(&["graph", "swap", "--eve-basis", "product"])).contains("D1 and D4: disconnected"));
}

#[test]
fn orderings_produce_same_labels() {
    let early = stdout(&tisim(&["analyze", "swap", "--ordering", "eve-first"]));
    let late = stdout(&tisim(&["analyze", "swap", "--ordering", "edges-first"]));
    let dist = |t: &str| {
        t.lines()
            .filter(|l| l.contains("eve="))
            .map(str::to_owned)
            .collect::<Vec<_>>()
    };
    assert_eq!(dist(&early).len(), 16);
    assert_eq!(dist(&early).len(), dist(&late).len());
}
