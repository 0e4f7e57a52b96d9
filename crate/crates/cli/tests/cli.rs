use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ladderfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ladderfl"))
        .args(args)
        .env_remove("LADDERFL_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    let headers = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (headers, rows)
}

fn column(headers: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = headers.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn scenario_list_text_and_json() {
    let text = stdout(&ladderfl(&["scenario", "list"]));
    for name in ["fig2", "fig3b", "fig3c", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    let json: serde_json::Value = serde_json::from_str(&stdout(&ladderfl(&["scenario", "list", "--json"]))).unwrap();
    assert_eq!(json.as_array().unwrap().len(), 9);
    assert_eq!(json[0]["name"], "fig2");
}

#[test]
fn exit_codes() {
    assert_eq!(ladderfl(&["steady", "--bogus"]).status.code(), Some(2));
    assert_eq!(ladderfl(&["scenario", "run", "fig99"]).status.code(), Some(2));
    assert_eq!(ladderfl(&["steady", "--model", "nonsense"]).status.code(), Some(2));
    assert_eq!(ladderfl(&["steady", "--jobs", "0"]).status.code(), Some(2));
    assert_eq!(ladderfl(&["steady", "--sweep", "gamma=0:1:3"]).status.code(), Some(2));
    let zero = ladderfl(&["spectrum", "--omega", "0", "--omega-grid", "-1:1:3"]);
    assert_eq!(zero.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&zero.stderr).contains("emission"));
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.json");
    assert_eq!(ladderfl(&["steady", "--config", missing.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn stdout_csv_is_deterministic_across_job_counts() {
    let args = ["steady", "--sweep", "delta=-20:20:41", "--sweep", "omega=1:40:8"];
    let one = stdout(&ladderfl(&[&args[..], &["--jobs", "1"]].concat()));
    let four = stdout(&ladderfl(&[&args[..], &["--jobs", "4"]].concat()));
    let again = stdout(&ladderfl(&[&args[..], &["--jobs", "4"]].concat()));
    assert_eq!(one, four);
    assert_eq!(four, again);
    assert_eq!(one.lines().next().unwrap(), "delta [Gamma],Omega [Gamma],pop_g,pop_e,pop_f");
    assert_eq!(one.lines().count(), 1 + 41 * 8);
}

#[test]
fn single_command_writes_stem_files() {
    let dir = tempfile::tempdir().unwrap();
    let stem = dir.path().join("run1");
    stdout(&ladderfl(&["g2", "--omega", "40", "--tau-grid", "0:2:21", "--out", stem.to_str().unwrap()]));
    for ext in ["csv", "gp", "json"] {
        assert!(dir.path().join(format!("run1.{ext}")).exists(), "{ext}");
    }
    let (h, rows) = read_csv(&dir.path().join("run1.csv"));
    assert_eq!(h, ["tau [1/Gamma]", "g2"]);
    assert_eq!(rows.len(), 21);
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("run1.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["params"]["omega"], 40.0);
    assert!(meta["wall_time_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn fig2_two_photon_resonance_at_zero_detuning() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    stdout(&ladderfl(&["scenario", "run", "fig2", "--sweep", "delta=-20:20:41", "--sweep", "omega=40,50", "--out", out]));
    let (h, rows) = read_csv(&dir.path().join("fig2.csv"));
    let delta = column(&h, &rows, "delta [Gamma]");
    let omega = column(&h, &rows, "Omega [Gamma]");
    let pop_f = column(&h, &rows, "pop_f");
    let best = (0..rows.len())
        .filter(|&i| omega[i] == 40.0)
        .max_by(|&a, &b| pop_f[a].total_cmp(&pop_f[b]))
        .unwrap();
    assert!(delta[best].abs() <= 1.0, "argmax at {}", delta[best]);
    assert!(dir.path().join("fig2_shifted_resonance.csv").exists());
}

#[test]
fn fig3c_peak_table_matches_dressed_lines() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&ladderfl(&["scenario", "run", "fig3c", "--out", dir.path().to_str().unwrap()]));
    let (h, rows) = read_csv(&dir.path().join("fig3c_peaks.csv"));
    assert_eq!(rows.len(), 7);
    for offset in column(&h, &rows, "offset [Gamma]") {
        assert!(offset.abs() < 0.5, "offset {offset}");
    }
}

#[test]
fn fig8_closed_forms_and_regression() {
    let dir = tempfile::tempdir().unwrap();
    stdout(&ladderfl(&["scenario", "run", "fig8", "--out", dir.path().to_str().unwrap()]));
    let (h, rows) = read_csv(&dir.path().join("fig8.csv"));
    let tau = column(&h, &rows, "tau [1/Gamma]");
    let central = column(&h, &rows, "g2(0;0) closed form");
    let inner = column(&h, &rows, "g2(+1;+1) closed form");
    let outer = column(&h, &rows, "g2(+3;+3) closed form");
    assert_eq!(central[0], 1.5);
    for (i, &t) in tau.iter().enumerate() {
        let e = (-0.75 * t).exp();
        assert!((inner[i] - (1.0 - e)).abs() < 1e-8);
        assert!(outer[i] >= -1e-12);
        for (closed, reg) in [("g2(0;0) closed form", "g2(0;0) regression"), ("g2(+1;+1) closed form", "g2(+1;+1) regression")] {
            let c = column(&h, &rows, closed)[i];
            let r = column(&h, &rows, reg)[i];
            assert!((c - r).abs() < 0.03, "{closed} at {t}: {c} vs {r}");
        }
    }
}

#[test]
fn config_file_merges_under_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"params": {"omega": 10, "alpha": -100, "xi": 0.5}, "sweeps": {"delta": [0, 1]}}"#).unwrap();
    let stem = dir.path().join("merged");
    stdout(&ladderfl(&["steady", "--config", cfg.to_str().unwrap(), "--omega", "30", "--out", stem.to_str().unwrap()]));
    let meta: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("merged.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["params"]["omega"], 30.0);
    assert_eq!(meta["config"]["params"]["alpha"], -100.0);
    assert_eq!(meta["config"]["params"]["xi"], 0.5);
    let (_, rows) = read_csv(&dir.path().join("merged.csv"));
    assert_eq!(rows.len(), 2);

    fs::write(&cfg, r#"{"params": {"omega": 10}, "typo": 1}"#).unwrap();
    assert_eq!(ladderfl(&["steady", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn csv_fields_are_quoted_only_when_needed() {
    let text = stdout(&ladderfl(&["g2cross", "--first", "-1", "--second", "+1", "--omega", "400", "--tau-grid", "0:1:3"]));
    let header = text.lines().next().unwrap();
    assert_eq!(header, "tau [1/Gamma],g2(-1;+1) closed form,g2(-1;+1) regression");
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.records().count(), 3);
}

#[test]
fn dressed_report_json() {
    let json: serde_json::Value =
        serde_json::from_str(&stdout(&ladderfl(&["dressed", "--omega", "40", "--json"]))).unwrap();
    assert_eq!(json["lines"].as_array().unwrap().len(), 7);
    let minus = json["asymptotic_lambdas"]["minus"].as_f64().unwrap();
    assert!((minus + 0.75).abs() < 1e-12);
}
