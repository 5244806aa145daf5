//! End-to-end tests of the `nbdiff` binary: exit codes, file formats, and
//! determinism of the simulate/report pipeline.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_nbdiff"))
}

struct Workdir(PathBuf);

impl Workdir {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("nbdiff-cli-{tag}-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Workdir(dir)
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.0.join(name);
        fs::write(&path, contents).unwrap();
        path
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Workdir {
    fn drop(&mut self) {
        fs::remove_dir_all(&self.0).ok();
    }
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const TINY_CONFIG: &str = "\
mu_x = 5
mu_y = 5
theta_x = 0.25
theta_y = 0.25
n_x = 10, 20
n_y = 10, 20
trials = 200
alpha = 0.05
seed = 11
methods = normal, bernstein, mixture
";

#[test]
fn analyze_smoke_prints_intervals() {
    let dir = Workdir::new("analyze-smoke");
    let x = dir.file("x.txt", "1\n2\n3\n4\n5\n9\n0\n2\n");
    let y = dir.file("y.txt", "4\n6\n2\n8\n1\n1\n");
    let out = bin()
        .args(["analyze", "--x"])
        .arg(&x)
        .arg("--y")
        .arg(&y)
        .args(["--methods", "normal"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("normal"), "{text}");
    assert!(text.contains("95% confidence intervals"), "{text}");
    assert!(!text.contains("bernstein"), "only normal was requested: {text}");
}

#[test]
fn analyze_all_methods_writes_record() {
    let dir = Workdir::new("analyze-record");
    let x = dir.file("x.txt", "12\n0\n3\n7\n2\n41\n0\n0\n5\n1\n");
    let y = dir.file("y.txt", "2\n2\n9\n0\n0\n0\n18\n1\n");
    let record = dir.path("record.json");
    let out = bin()
        .args(["analyze", "--x"])
        .arg(&x)
        .arg("--y")
        .arg(&y)
        .arg("--record")
        .arg(&record)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    for method in ["normal", "bernstein", "mixture"] {
        assert!(text.contains(method), "{text}");
    }
    let json = fs::read_to_string(&record).unwrap();
    assert!(json.contains("\"method\":\"mixture\""), "{json}");
    assert!(json.contains("\"diff\":"), "{json}");
}

#[test]
fn analyze_grouped_csv_input() {
    let dir = Workdir::new("analyze-grouped");
    let data = dir.file("data.csv", "group,count\nx,3\nx,9\nx,0\ny,4\ny,4\ny,1\n");
    let out = bin()
        .args(["analyze", "--data"])
        .arg(&data)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("sample x: n=3"));
}

#[test]
fn analyze_null_on_identical_data_gives_p_value_one() {
    let dir = Workdir::new("analyze-null");
    let x = dir.file("x.txt", "5\n1\n7\n0\n3\n");
    let y = dir.file("y.txt", "5\n1\n7\n0\n3\n");
    let out = bin()
        .args(["analyze", "--x"])
        .arg(&x)
        .arg("--y")
        .arg(&y)
        .args(["--methods", "bernstein", "--null", "0"])
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let test_line = text
        .lines()
        .find(|l| l.trim_start().starts_with("bernstein") && l.contains("no"))
        .unwrap_or_else(|| panic!("no bernstein test line in {text}"));
    assert!(
        test_line.split_whitespace().any(|tok| tok == "1"),
        "p-value should print as exactly 1: {test_line}"
    );
}

#[test]
fn analyze_rejects_unparseable_counts() {
    let dir = Workdir::new("analyze-badinput");
    let x = dir.file("x.txt", "1\ntwo\n3\n");
    let y = dir.file("y.txt", "1\n2\n");
    let out = bin()
        .args(["analyze", "--x"])
        .arg(&x)
        .arg("--y")
        .arg(&y)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains(":2"), "{}", stderr(&out));
}

#[test]
fn analyze_requires_some_input() {
    let out = bin().arg("analyze").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn analyze_strict_escalates_degenerate_statistics() {
    let dir = Workdir::new("analyze-strict");
    let x = dir.file("x.txt", "0\n0\n0\n0\n");
    let y = dir.file("y.txt", "0\n0\n0\n");
    let lax = bin()
        .args(["analyze", "--x"])
        .arg(&x)
        .arg("--y")
        .arg(&y)
        .output()
        .unwrap();
    assert!(lax.status.success(), "stderr: {}", stderr(&lax));
    assert!(stderr(&lax).contains("degenerate"), "{}", stderr(&lax));

    let strict = bin()
        .args(["analyze", "--strict", "--x"])
        .arg(&x)
        .arg("--y")
        .arg(&y)
        .output()
        .unwrap();
    assert_eq!(strict.status.code(), Some(3), "stderr: {}", stderr(&strict));
}

#[test]
fn analyze_grid_mode_needs_all_cell_parameters() {
    let dir = Workdir::new("analyze-grid");
    let x = dir.file("x.txt", "1\n2\n3\n");
    let y = dir.file("y.txt", "4\n5\n6\n");
    let missing = bin()
        .args(["analyze", "--variance-mode", "grid", "--x"])
        .arg(&x)
        .arg("--y")
        .arg(&y)
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(stderr(&missing).contains("--kind-x"), "{}", stderr(&missing));

    let full = bin()
        .args(["analyze", "--variance-mode", "grid"])
        .args(["--kind-x", "gamma", "--kind-y", "gamma"])
        .args(["--mu-x", "5", "--theta-x", "0.5", "--mu-y", "5", "--theta-y", "0.5"])
        .arg("--x")
        .arg(&x)
        .arg("--y")
        .arg(&y)
        .output()
        .unwrap();
    assert!(full.status.success(), "stderr: {}", stderr(&full));
}

fn run_simulate(config: &Path, output: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("simulate")
        .arg("--config")
        .arg(config)
        .arg("--output")
        .arg(output)
        .args(extra)
        .output()
        .unwrap()
}

#[test]
fn simulate_writes_schema_and_is_deterministic() {
    let dir = Workdir::new("simulate");
    let config = dir.file("grid.cfg", TINY_CONFIG);
    let out_a = dir.path("a.csv");
    let out_b = dir.path("b.csv");

    let run = run_simulate(&config, &out_a, &[]);
    assert!(run.status.success(), "stderr: {}", stderr(&run));
    let body_a = fs::read_to_string(&out_a).unwrap();
    let mut lines = body_a.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mu_x,mu_y,theta_x,theta_y,n_x,n_y,trials,alpha,seed,method,coverage,coverage_se,mean_length,median_length,degenerate_trials"
    );
    assert_eq!(body_a.lines().count(), 1 + 4 * 3, "4 experiments x 3 methods");

    let rerun = run_simulate(&config, &out_b, &[]);
    assert!(rerun.status.success());
    assert_eq!(body_a, fs::read_to_string(&out_b).unwrap(), "same config+seed must be byte-identical");
}

#[test]
fn simulate_parallelism_does_not_change_output() {
    let dir = Workdir::new("simulate-par");
    let config = dir.file("grid.cfg", TINY_CONFIG);
    let seq = dir.path("seq.csv");
    let par = dir.path("par.csv");
    assert!(run_simulate(&config, &seq, &["--parallelism", "1"]).status.success());
    assert!(run_simulate(&config, &par, &["--parallelism", "4"]).status.success());
    assert_eq!(
        fs::read_to_string(&seq).unwrap(),
        fs::read_to_string(&par).unwrap()
    );
}

#[test]
fn simulate_seed_override_changes_results() {
    let dir = Workdir::new("simulate-seed");
    let config = dir.file("grid.cfg", TINY_CONFIG);
    let base = dir.path("base.csv");
    let reseeded = dir.path("reseeded.csv");
    assert!(run_simulate(&config, &base, &[]).status.success());
    assert!(run_simulate(&config, &reseeded, &["--seed", "999"]).status.success());
    assert_ne!(
        fs::read_to_string(&base).unwrap(),
        fs::read_to_string(&reseeded).unwrap()
    );
}

#[test]
fn simulate_rejects_bad_configs() {
    let dir = Workdir::new("simulate-bad");
    let config = dir.file("grid.cfg", &format!("{TINY_CONFIG}unknown_key = 5\n"));
    let out = run_simulate(&config, &dir.path("x.csv"), &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key"), "{}", stderr(&out));

    let no_input = bin()
        .args(["simulate", "--output"])
        .arg(dir.path("y.csv"))
        .output()
        .unwrap();
    assert_eq!(no_input.status.code(), Some(2));
}

#[test]
fn report_summarizes_simulated_results() {
    let dir = Workdir::new("report");
    let config = dir.file("grid.cfg", TINY_CONFIG);
    let results = dir.path("results.csv");
    assert!(run_simulate(&config, &results, &[]).status.success());

    let plots = dir.path("plots");
    let out = bin()
        .arg("report")
        .arg(&results)
        .arg("--out-dir")
        .arg(&plots)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("4 experiment(s)"), "{text}");
    for label in ["bernstein", "mixture", "normal", "bernstein - normal"] {
        assert!(text.contains(label), "{text}");
    }

    let files: Vec<_> = fs::read_dir(&plots).unwrap().collect();
    assert_eq!(files.len(), 3, "one coverage matrix per method");
    for entry in files {
        let body = fs::read_to_string(entry.unwrap().path()).unwrap();
        assert!(body.starts_with("n_x,n_y,coverage\n"));
        assert_eq!(body.lines().count(), 1 + 4, "header plus one cell per size pair");
    }
}

#[test]
fn report_rejects_foreign_csv() {
    let dir = Workdir::new("report-bad");
    let bogus = dir.file("bogus.csv", "a,b,c\n1,2,3\n");
    let out = bin().arg("report").arg(&bogus).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("header"), "{}", stderr(&out));
}

#[test]
fn parallelism_env_var_is_honored() {
    let dir = Workdir::new("env-par");
    let config = dir.file("grid.cfg", TINY_CONFIG);
    let flagged = dir.path("flag.csv");
    let from_env = dir.path("env.csv");
    assert!(run_simulate(&config, &flagged, &["--parallelism", "4"]).status.success());
    let out = bin()
        .arg("simulate")
        .arg("--config")
        .arg(&config)
        .arg("--output")
        .arg(&from_env)
        .env("NBDIFF_PARALLELISM", "4")
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert_eq!(
        fs::read_to_string(&flagged).unwrap(),
        fs::read_to_string(&from_env).unwrap()
    );

    let bad = bin()
        .arg("simulate")
        .arg("--config")
        .arg(&config)
        .arg("--output")
        .arg(dir.path("bad.csv"))
        .env("NBDIFF_PARALLELISM", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2), "stderr: {}", stderr(&bad));
}

#[test]
fn paper_anchor_config_reproduces_reference_coverage() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = Workdir::new("anchor");
    let results = dir.path("anchor.csv");
    let out = run_simulate(&root.join("paper_anchor.cfg"), &results, &["--parallelism", "2"]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let rows = nbdiff_cli::csvio::read_results_csv(&results).unwrap();
    let normal = rows
        .iter()
        .find(|r| r.method == nbdiff::inference::MethodKind::Normal)
        .unwrap();
    assert!(
        (normal.coverage - 0.9822).abs() <= 0.015,
        "anchor normal coverage {} strayed from 0.9822",
        normal.coverage
    );
    // Re-running the bundled config must reproduce the file byte for byte.
    let again = dir.path("anchor2.csv");
    assert!(run_simulate(&root.join("paper_anchor.cfg"), &again, &[]).status.success());
    assert_eq!(
        fs::read_to_string(&results).unwrap(),
        fs::read_to_string(&again).unwrap()
    );
}

#[test]
fn full_grid_flag_warns_and_runs_when_rescaled() {
    let dir = Workdir::new("full-grid");
    let results = dir.path("full.csv");
    let out = bin()
        .arg("simulate")
        .arg("--full-grid")
        .args(["--trials", "1", "--seed", "5", "--parallelism", "8"])
        .arg("--output")
        .arg(&results)
        .output()
        .unwrap();
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    assert!(
        stderr(&out).contains("warning"),
        "full grid should warn: {}",
        stderr(&out)
    );
    let body = fs::read_to_string(&results).unwrap();
    assert_eq!(
        body.lines().count(),
        1 + 52_900 * 3,
        "header plus one row per experiment and method"
    );
}

#[test]
fn bundled_configs_parse_and_run_after_rescaling() {
    // The shipped configs are desk-scale but still too slow for a unit test;
    // parse each one, then run a single-cell variant to prove the format.
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let dir = Workdir::new("bundled");
    for name in ["figure1.cfg", "figure4.cfg", "paper_anchor.cfg"] {
        let text = fs::read_to_string(root.join(name)).unwrap();
        let grid = nbdiff_cli::config::parse_grid_config(&text)
            .unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!grid.is_empty());
        assert_eq!(grid.alpha, 0.05);

        let scaled = text
            .replace("n_x = 10, 20, 50, 100, 200", "n_x = 10")
            .replace("n_y = 10, 20, 50, 100, 200", "n_y = 10")
            .replace("trials = 2000", "trials = 50")
            .replace("trials = 10000", "trials = 50")
            .replace("n_x = 50\n", "n_x = 10\n")
            .replace("n_y = 50\n", "n_y = 10\n");
        let config = dir.file(name, &scaled);
        let out = run_simulate(&config, &dir.path(&format!("{name}.csv")), &[]);
        assert!(out.status.success(), "{name}: {}", stderr(&out));
    }
}
