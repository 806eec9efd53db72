use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use navsim::report::{RANKING_HEADER, SERIES_HEADER};

fn navsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_navsim")).args(args).env_remove("NAVSIM_THREADS").output().unwrap()
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_to(config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    navsim(&args)
}

const SHORT: &str = r#"
[scenario]
kind = "const_east"
lat_deg = 30.0
ve0_mps = 500.0
duration_s = 4.0
dt_s = 0.02
"#;

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("scenario.toml");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn missing_config_exits_2() {
    let o = navsim(&["run", "--config", "/definitely/not/here.toml"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cannot read"), "{}", stderr(&o));
}

#[test]
fn unparsable_or_invalid_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    for text in [
        "not toml at all [".to_string(),
        format!("{SHORT}unknown_key = 1\n"),
        format!("{SHORT}[run]\nalgorithms = []\n"),
        SHORT.replace("dt_s = 0.02", "dt_s = -0.02"),
    ] {
        let cfg = write_config(dir.path(), &text);
        let o = navsim(&["compare", "--config", cfg.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{text}\n{}", stderr(&o));
    }
}

#[test]
fn bundled_scenario_a_row_counts() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("a.csv");
    let o = run_to(&bundled("scenario_a.toml"), &csv, &[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(SERIES_HEADER));
    assert_eq!(lines.count(), 180_001);
    assert!(text.ends_with('\n') && !text.contains('\r'));

    let o = run_to(&bundled("scenario_a.toml"), &csv, &["--dt", "0.04"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 90_001 + 1);
}

#[test]
fn csv_fields_carry_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let cfg = write_config(dir.path(), SHORT);
    assert_eq!(code(&run_to(&cfg, &csv, &["--alg", "tn"])), 0);
    let text = fs::read_to_string(&csv).unwrap();
    let row = text.lines().nth(150).unwrap();
    for field in row.split(',') {
        let mantissa = field.split('e').next().unwrap().replace(['-', '.'], "");
        assert!(mantissa.len() >= 15, "{field}");
        field.parse::<f64>().unwrap();
    }
}

#[test]
fn series_goes_to_stdout_without_out() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT);
    let o = navsim(&["run", "--config", cfg.to_str().unwrap(), "--duration", "1"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout.clone()).unwrap();
    assert_eq!(text.lines().next(), Some(SERIES_HEADER));
    assert_eq!(text.lines().count(), 52);
    assert!(stderr(&o).contains("derived: 51 epochs"));
}

#[test]
fn run_rejects_unlisted_algorithm() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SHORT}[run]\nalgorithms = [\"tn\"]\n"));
    let o = navsim(&["run", "--config", cfg.to_str().unwrap(), "--alg", "sv2"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn numerical_abort_exits_3_with_epoch() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &SHORT.replace("500.0", "1e200"));
    let o = run_to(&cfg, &dir.path().join("x.csv"), &[]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("epoch 0"), "{}", stderr(&o));
}

#[test]
fn config_relative_output_paths() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{SHORT}[output]\nseries_csv = \"out/series.csv\"\nplot = true\nplot_svg = \"out/e.svg\"\n");
    fs::create_dir(dir.path().join("out")).unwrap();
    let cfg = write_config(dir.path(), &text);
    let o = navsim(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("out/series.csv").is_file());
    assert!(fs::read_to_string(dir.path().join("out/e.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn compare_writes_ranking_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT);
    let out = dir.path().join("rank.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_navsim"))
        .args(["compare", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--plot"])
        .env("NAVSIM_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], RANKING_HEADER);
    assert_eq!(lines.len(), 5);
    let ranks: Vec<&str> = lines[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ranks, ["1", "2", "3", "4"]);
    let svg = fs::read_to_string(dir.path().join("rank.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("derived"));
}

#[test]
fn bad_thread_count_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT);
    let o = Command::new(env!("CARGO_BIN_EXE_navsim"))
        .args(["compare", "--config", cfg.to_str().unwrap()])
        .env("NAVSIM_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn plot_without_destination_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), SHORT);
    let o = navsim(&["compare", "--config", cfg.to_str().unwrap(), "--plot"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn oracle_check_passes() {
    let o = navsim(&["oracle-check"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.matches("PASS").count(), 10, "{text}");
    assert!(!text.contains("FAIL"));
}

#[test]
fn residuals_meet_bundled_expectations() {
    for name in ["scenario_a.toml", "scenario_b.toml"] {
        let o = navsim(&["residuals", "--config", bundled(name).to_str().unwrap()]);
        assert_eq!(code(&o), 0, "{name}: {}", String::from_utf8_lossy(&o.stdout));
        assert_eq!(String::from_utf8(o.stdout).unwrap().matches("PASS").count(), 2);
    }
}

#[test]
fn residual_expectation_miss_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), &format!("{SHORT}[expect]\nomega_in = {{ value = 1.0, rel_tol = 0.01 }}\n"));
    let o = navsim(&["residuals", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stdout).unwrap().contains("FAIL"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&navsim(&[])), 2);
    assert_eq!(code(&navsim(&["run"])), 2);
    assert_eq!(code(&navsim(&["fly"])), 2);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["scenario_a.toml", "scenario_b.toml"] {
        let (p1, p2) = (dir.path().join("1.csv"), dir.path().join("2.csv"));
        for p in [&p1, &p2] {
            assert_eq!(code(&run_to(&bundled(name), p, &["--alg", "sv2"])), 0);
        }
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap(), "{name}");
    }
}
