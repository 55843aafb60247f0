use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const SOLVER: &str = env!("CARGO_BIN_EXE_afgnn-solver");
const BENCH: &str = env!("CARGO_BIN_EXE_afgnn-bench");

const F1: &str = "p af 7\n1 2\n2 3\n3 4\n4 3\n4 5\n5 6\n6 7\n7 5\n";
const F1_APX: &str = "arg(a1).arg(a2).arg(a3).arg(a4).arg(a5).arg(a6).arg(a7).\n\
att(a1,a2).att(a2,a3).att(a3,a4).att(a4,a3).att(a4,a5).att(a5,a6).att(a6,a7).att(a7,a5).\n";

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(bin: &str, args: &[&str]) -> Output {
    Command::new(bin).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn init_model(dir: &Path, task: &str, extra: &[&str]) -> String {
    let path = dir.join(format!("{task}.model"));
    let p = path.to_str().unwrap();
    let mut args = vec!["init-model", "-p", task, "-o", p];
    args.extend_from_slice(extra);
    let out = run(BENCH, &args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    p.to_string()
}

#[test]
fn no_arguments_prints_usage() {
    let out = run(SOLVER, &[]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("USAGE"));
}

#[test]
fn capabilities() {
    assert_eq!(
        stdout(&run(SOLVER, &["--problems"])),
        "DC-CO,DC-ST,DS-PR,DS-ST\n"
    );
    assert_eq!(stdout(&run(SOLVER, &["--formats"])), "iccma23,apx\n");
}

#[test]
fn shortcut_and_threshold_answers() {
    let dir = scratch("answers");
    let af = dir.join("f1.af");
    fs::write(&af, F1).unwrap();
    let af = af.to_str().unwrap();
    let pr = init_model(&dir, "DS-PR", &["--arch", "gatv2", "--seed", "3"]);
    let co = init_model(&dir, "DC-CO", &["--arch", "gcn", "--zero"]);

    let out = run(
        SOLVER,
        &["-p", "DS-PR", "-f", af, "-fo", "i23", "-a", "1", "-m", &pr],
    );
    assert!(out.status.success());
    assert_eq!(stdout(&out), "YES\n");
    let out = run(
        SOLVER,
        &[
            "-p", "DC-CO", "-f", af, "-fo", "iccma23", "-a", "2", "-m", &co,
        ],
    );
    assert_eq!(stdout(&out), "NO\n");
    // sigmoid(0) = 0.5 meets the threshold
    let out = run(
        SOLVER,
        &[
            "-p", "DC-CO", "-f", af, "-fo", "iccma23", "-a", "3", "-m", &co,
        ],
    );
    assert_eq!(stdout(&out), "YES\n");
}

#[test]
fn apx_names_resolve() {
    let dir = scratch("apx");
    let af = dir.join("f1.apx");
    fs::write(&af, F1_APX).unwrap();
    let co = init_model(&dir, "DC-CO", &["--arch", "gcn", "--zero"]);
    let out = run(
        SOLVER,
        &[
            "-p",
            "DC-CO",
            "-f",
            af.to_str().unwrap(),
            "-fo",
            "apx",
            "-a",
            "a2",
            "-m",
            &co,
        ],
    );
    assert_eq!(stdout(&out), "NO\n");
}

#[test]
fn identical_invocations_agree() {
    let dir = scratch("determinism");
    let af = dir.join("f1.af");
    fs::write(&af, F1).unwrap();
    let m = init_model(&dir, "DC-ST", &["--arch", "gatv2", "--seed", "11"]);
    let args = [
        "-p",
        "DC-ST",
        "-f",
        af.to_str().unwrap(),
        "-fo",
        "i23",
        "-a",
        "5",
        "-m",
        &m,
    ];
    let first = stdout(&run(SOLVER, &args));
    assert!(first == "YES\n" || first == "NO\n");
    for _ in 0..3 {
        assert_eq!(stdout(&run(SOLVER, &args)), first);
    }
}

#[test]
fn zero_timeout_falls_back() {
    let dir = scratch("timeout");
    let af = dir.join("f1.af");
    fs::write(&af, F1).unwrap();
    let af = af.to_str().unwrap();
    let st = init_model(&dir, "DS-ST", &["--arch", "gatv2"]);
    let out = run(
        SOLVER,
        &[
            "-p",
            "DS-ST",
            "-f",
            af,
            "-a",
            "3",
            "-m",
            &st,
            "--timeout",
            "0",
        ],
    );
    assert_eq!(stdout(&out), "YES\n");
    let co = init_model(&dir, "DC-CO", &["--arch", "gatv2"]);
    let out = run(
        SOLVER,
        &[
            "-p",
            "DC-CO",
            "-f",
            af,
            "-a",
            "3",
            "-m",
            &co,
            "--timeout",
            "0",
        ],
    );
    assert_eq!(stdout(&out), "NO\n");
}

#[test]
fn errors_go_to_stderr_with_nonzero_status() {
    let dir = scratch("errors");
    let af = dir.join("f1.af");
    fs::write(&af, F1).unwrap();
    let af = af.to_str().unwrap();
    let co = init_model(&dir, "DC-CO", &["--arch", "gcn"]);
    let missing = dir.join("missing.af");
    let cases: Vec<Vec<&str>> = vec![
        vec![
            "-p",
            "DC-CO",
            "-f",
            missing.to_str().unwrap(),
            "-a",
            "1",
            "-m",
            &co,
        ],
        vec!["-p", "DC-CO", "-f", af, "-a", "8", "-m", &co],
        vec!["-p", "DS-PR", "-f", af, "-a", "3", "-m", &co],
        vec!["-p", "SE-CO", "-f", af, "-a", "3", "-m", &co],
        vec!["-p", "DC-CO", "-f", af, "-a"],
        vec!["--bogus"],
    ];
    for args in cases {
        let out = run(SOLVER, &args);
        assert!(!out.status.success(), "{args:?}");
        assert!(out.stdout.is_empty(), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn bench_label_evaluate_round_trip() {
    let dir = scratch("bench");
    let out = run(
        BENCH,
        &[
            "generate",
            "--count",
            "4",
            "--n",
            "9",
            "--seed",
            "2",
            "--out-dir",
            dir.to_str().unwrap(),
        ],
    );
    assert!(out.status.success());
    let mut files: Vec<String> = fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path().to_str().unwrap().to_string())
        .filter(|p| p.ends_with(".af"))
        .collect();
    files.sort();
    assert_eq!(files.len(), 4);
    let mut args = vec!["label", "-p", "DC-CO"];
    args.extend(files.iter().map(String::as_str));
    assert!(run(BENCH, &args).status.success());
    assert!(Path::new(&format!("{}.DC-CO.labels", files[0])).exists());

    let mut args = vec!["evaluate", "-p", "DC-CO", "--predictor", "grounded"];
    args.extend(files.iter().map(String::as_str));
    let out = run(BENCH, &args);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("# afgnn-bench-csv v1"));
    assert_eq!(
        lines.next(),
        Some(
            "instance,task,n_args,theta,pos_acc,neg_acc,parse_ms,grounded_ms,features_ms,infer_ms"
        )
    );
    assert_eq!(lines.count(), 4);
}

#[test]
fn feature_export_is_stable() {
    let dir = scratch("features");
    let af = dir.join("f1.af");
    fs::write(&af, F1).unwrap();
    let a = run(BENCH, &["features", af.to_str().unwrap()]);
    let b = run(BENCH, &["features", af.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 8);
    assert_eq!(text.lines().next().unwrap().split(',').count(), 12);
}

#[test]
fn time_reports_requested_stages() {
    let dir = scratch("time");
    let af = dir.join("f1.af");
    fs::write(&af, F1).unwrap();
    let out = run(BENCH, &["time", "--stages", "parse", af.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(2).unwrap().split(',').collect();
    assert_eq!(row.len(), 10);
    assert!(!row[6].is_empty());
    assert!(row[7..].iter().all(|c| c.is_empty()));
}
