use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const FIG1: &str = "\
ctmg
time-bound 1
location A continuous reach
location B continuous reach
location C continuous reach goal
rate A a B 4
rate A b C 2
rate B a C 4
init A 1
";

const SWITCH: f64 = 0.6534264097200273;

fn ctmg(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctmg"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn workspace() -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let model = dir.path().join("fig1.ctmg");
    std::fs::write(&model, FIG1).unwrap();
    (dir, model)
}

fn field(line: &str, key: &str) -> String {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no `{key}` in `{line}`"))
        .to_string()
}

#[test]
fn solve_prints_value_and_switch_and_writes_artifacts() {
    let (dir, _) = workspace();
    let o = ctmg(&["solve", "--objective", "max", "fig1.ctmg"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "value=0.915497 switches=1 switch_times=0.653426\n");

    let sched = std::fs::read_to_string(dir.path().join("fig1.sched")).unwrap();
    assert_eq!(sched.matches("interval").count(), 2);
    assert!(sched.contains("choose A a") && sched.contains("choose A b"));
    let csv = std::fs::read_to_string(dir.path().join("fig1.csv")).unwrap();
    assert!(csv.starts_with("t,A,B,C\n"));

    let o = ctmg(&["evaluate", "fig1.ctmg", "--scheduler", "fig1.sched"], dir.path());
    assert!(stdout(&o).starts_with("value=0.915497 "));
}

#[test]
fn precision_flag_widens_results() {
    let (dir, _) = workspace();
    let o = ctmg(&["solve", "fig1.ctmg", "--precision", "12", "--out", "s.txt", "--csv", "v.csv"], dir.path());
    let v: f64 = field(&stdout(&o), "value").parse().unwrap();
    assert!((v - 0.9154970335793553).abs() < 1e-10);
    assert!(dir.path().join("s.txt").exists() && dir.path().join("v.csv").exists());
}

#[test]
fn broken_model_fails_validation_with_violation_lines() {
    let dir = TempDir::new().unwrap();
    std::fs::write(
        dir.path().join("broken.ctmg"),
        "ctmg\ntime-bound 1\nlocation A continuous reach\nlocation B discrete reach\nprob B a A 0.5\ninit A 1\n",
    )
    .unwrap();
    let o = ctmg(&["validate", "broken.ctmg"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("NO_ENABLED_ACTION location=A"), "{err}");
    assert!(err.contains("DISCRETE_ROW_SUM"), "{err}");
    assert!(o.stdout.is_empty());

    let (dir, _) = workspace();
    let o = ctmg(&["validate", "fig1.ctmg"], dir.path());
    assert!(o.status.success());
}

#[test]
fn usage_errors_exit_with_two() {
    let (dir, _) = workspace();
    for args in [
        &["solve", "fig1.ctmg", "--steps", "1"][..],
        &["solve", "fig1.ctmg", "--switch-tol", "-1"],
        &["solve", "fig1.ctmg", "--objective", "best"],
        &["transform", "fig1.ctmg", "--op", "fold"],
        &["frobnicate"],
        &[],
    ] {
        assert_eq!(ctmg(args, dir.path()).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn domain_errors_exit_with_one() {
    let (dir, _) = workspace();
    assert_eq!(ctmg(&["solve", "missing.ctmg"], dir.path()).status.code(), Some(1));
    // game objective on a single-player model
    let o = ctmg(&["solve", "fig1.ctmg", "--objective", "game"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
    // late-to-early needs a uniform model
    let o = ctmg(&["transform", "fig1.ctmg", "--op", "late-to-early"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn curve_gains_cross_once_at_the_switch() {
    let (dir, _) = workspace();
    let o = ctmg(&["curve", "--objective", "max", "fig1.ctmg"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let ga = header.iter().position(|&h| h == "gain:A:a").unwrap();
    let gb = header.iter().position(|&h| h == "gain:A:b").unwrap();

    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]), "times strictly ascending");
    assert!(rows.iter().any(|r| (r[0] - SWITCH).abs() < 1e-8), "switch row present");

    let signs: Vec<f64> = rows
        .iter()
        .map(|r| r[ga] - r[gb])
        .filter(|d| d.abs() > 1e-9)
        .map(f64::signum)
        .collect();
    let crossings = signs.windows(2).filter(|w| w[0] != w[1]).count();
    assert_eq!(crossings, 1);
    let at_switch = rows.iter().find(|r| (r[0] - SWITCH).abs() < 1e-8).unwrap();
    assert!((at_switch[ga] - at_switch[gb]).abs() < 1e-7);
}

#[test]
fn reruns_are_byte_identical() {
    let (dir, _) = workspace();
    let runs: Vec<(Vec<u8>, Vec<u8>, Vec<u8>)> = (0..2)
        .map(|_| {
            let o = ctmg(&["solve", "fig1.ctmg", "--steps", "500"], dir.path());
            let sched = std::fs::read(dir.path().join("fig1.sched")).unwrap();
            let csv = std::fs::read(dir.path().join("fig1.csv")).unwrap();
            (o.stdout, sched, csv)
        })
        .collect();
    assert_eq!(runs[0], runs[1]);

    let sim = || {
        ctmg(
            &["simulate", "fig1.ctmg", "--scheduler", "fig1.sched", "--runs", "5000", "--seed", "11"],
            dir.path(),
        )
        .stdout
    };
    assert_eq!(sim(), sim());
    let curve = || ctmg(&["curve", "fig1.ctmg", "--steps", "300"], dir.path()).stdout;
    assert_eq!(curve(), curve());
}

#[test]
fn verification_commands_agree_on_fig1() {
    let (dir, _) = workspace();
    std::fs::write(dir.path().join("a.sched"), "interval 0 1\nchoose A a\n").unwrap();
    std::fs::write(dir.path().join("b.sched"), "interval 0 1\nchoose A b\n").unwrap();

    let o = ctmg(&["distance", "fig1.ctmg", "a.sched", "b.sched"], dir.path());
    let d: f64 = field(&stdout(&o), "distance").parse().unwrap();
    assert!((d - (1.0 - (-6.0f64).exp())).abs() < 1e-6);

    let o = ctmg(&["oracle", "fig1.ctmg", "--method", "uniformization", "--scheduler", "a.sched"], dir.path());
    let line = stdout(&o);
    assert_eq!(field(&line, "lower"), "0.908422");
    assert_eq!(field(&line, "poisson_steps"), "20");

    let o = ctmg(&["oracle", "fig1.ctmg", "--method", "enumerate"], dir.path());
    assert_eq!(field(&stdout(&o), "value"), "0.908422");

    let o = ctmg(&["oracle", "fig1.ctmg", "--method", "grid", "--steps", "2000"], dir.path());
    assert_eq!(field(&stdout(&o), "richardson"), "0.915497");

    // positional oracle refuses a two-interval scheduler
    ctmg(&["solve", "fig1.ctmg"], dir.path());
    let o = ctmg(&["oracle", "fig1.ctmg", "--method", "uniformization", "--scheduler", "fig1.sched"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn transforms_round_trip_through_the_parser() {
    let (dir, _) = workspace();
    for op in ["early-to-late", "make-simple", "uniformise"] {
        let out = format!("{op}.ctmg");
        let o = ctmg(&["transform", "fig1.ctmg", "--op", op, "--out", &out], dir.path());
        assert!(o.status.success(), "{op}");
        assert!(ctmg(&["validate", &out], dir.path()).status.success(), "{op}");
    }
    let o = ctmg(&["transform", "uniformise.ctmg", "--op", "late-to-early", "--out", "early.ctmg"], dir.path());
    assert!(o.status.success());
    let o = ctmg(&["solve", "uniformise.ctmg"], dir.path());
    assert!(stdout(&o).starts_with("value=0.915497 "));
    let o = ctmg(&["transform", "fig1.ctmg", "--op", "uniformise", "--rate", "1"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}
