use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tvwalk::cli::csv_body;

fn tvwalk(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tvwalk"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn order_prints_count_and_ratio() {
    let dir = tempfile::tempdir().unwrap();
    let o = tvwalk(dir.path(), &["order", "--n", "4"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("order = 20160"), "{out}");
    assert!(out.contains("ratio = 0.307617187500"), "{out}");
}

#[test]
fn exact_reports_both_mixing_times() {
    let dir = tempfile::tempdir().unwrap();
    let o = tvwalk(dir.path(), &["exact", "--n", "3", "--eps", "0.25"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("t_mix(0.25) = 6"), "{out}");
    assert!(out.contains("t_mix^(2)(0.25) = 9"), "{out}");
    assert!(out.contains("t_mix(0.25) <= t_mix^(2)(0.5): true"), "{out}");
    let csv = read(dir.path(), "exact_curve.csv");
    let body = csv_body(&csv);
    assert_eq!(body[0], "t,tv,l2,lazy_flag");
    assert_eq!(body.len(), 1 + 10);
    assert!(body[1..].iter().all(|r| r.ends_with(",0")));
}

#[test]
fn periodic_instance_switches_to_lazy_and_says_so() {
    let dir = tempfile::tempdir().unwrap();
    let o = tvwalk(dir.path(), &["exact", "--n", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("period 2"));
    assert!(stdout(&o).contains("kernel = lazy"));
    let csv = read(dir.path(), "exact_curve.csv");
    assert!(csv_body(&csv)[1..].iter().all(|r| r.ends_with(",1")));
}

#[test]
fn check_all_suites_clean() {
    let dir = tempfile::tempdir().unwrap();
    let o = tvwalk(
        dir.path(),
        &[
            "check", "--suite", "all", "--n", "2", "--trials", "1000", "--seed", "7",
        ],
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().filter(|l| l.contains("violations")).collect();
    assert_eq!(lines.len(), 11);
    assert!(lines.iter().all(|l| l.contains("violations = 0")), "{out}");
    let csv = read(dir.path(), "inequality_suite.csv");
    assert_eq!(
        csv_body(&csv)[0],
        "check_name,n,trials,violations,min_slack"
    );
}

#[test]
fn csv_starts_with_config_echo_and_uses_lf() {
    let dir = tempfile::tempdir().unwrap();
    tvwalk(dir.path(), &["spectrum", "--n", "3"]);
    let csv = read(dir.path(), "spectrum.csv");
    assert!(csv.starts_with("# tvwalk "));
    assert!(csv.contains("# command: spectrum --n 3\n"));
    assert!(csv.contains("SpectrumArgs { n: 3"));
    assert!(!csv.contains('\r'));
    let body = csv_body(&csv);
    assert_eq!(body[0], "index,eigenvalue");
    assert_eq!(body.len(), 1 + 168);
    let top: f64 = body[1].strip_prefix("0,").unwrap().parse().unwrap();
    assert!((top - 1.0).abs() < 1e-12);
}

#[test]
fn bad_input_exits_two_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["exact", "--n", "7"][..],
        &["frobnicate"][..],
        &["exact", "--n", "3", "--eps", "1.5"][..],
        &["lsi", "--n", "4"][..],
        &["order", "--n", "many"][..],
        &[
            "protocol",
            "verify",
            "--public",
            "missing",
            "--challenge",
            "01",
            "--response",
            "x",
            "--deadline",
            "3",
        ][..],
    ] {
        let o = tvwalk(dir.path(), args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = stderr(&o);
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "));
    }
}

#[test]
fn config_file_matches_flags() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    fs::create_dir_all(&a).unwrap();
    fs::create_dir_all(&b).unwrap();
    fs::write(dir.path().join("run.cfg"), "n=3\neps=0.1\nt_max=20\n").unwrap();
    assert!(
        tvwalk(&a, &["exact", "--n", "3", "--eps", "0.1", "--t-max", "20"])
            .status
            .success()
    );
    assert!(tvwalk(&b, &["exact", "--config", "../run.cfg"])
        .status
        .success());
    assert_eq!(
        csv_body(&read(&a, "exact_curve.csv")),
        csv_body(&read(&b, "exact_curve.csv"))
    );
}

#[test]
fn protocol_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = tvwalk(
        d,
        &[
            "protocol", "keygen", "--n", "16", "--t", "40", "--seed", "9", "--public", "pk",
            "--secret", "sk",
        ],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let x = "1011001110001111";
    assert!(tvwalk(
        d,
        &[
            "protocol",
            "prove",
            "--secret",
            "sk",
            "--challenge",
            x,
            "--response",
            "honest"
        ]
    )
    .status
    .success());
    assert!(tvwalk(
        d,
        &[
            "protocol",
            "prove",
            "--dishonest",
            "--public",
            "pk",
            "--challenge",
            x,
            "--response",
            "cheat"
        ]
    )
    .status
    .success());
    let honest = read(d, "honest");
    let cheat = read(d, "cheat");
    assert!(honest.contains("bit_ops=40\n"));
    assert!(cheat.contains("bit_ops=256\n"));
    assert_eq!(honest.lines().next(), cheat.lines().next());

    let verify = |resp: &str, deadline: &str| {
        tvwalk(
            d,
            &[
                "protocol",
                "verify",
                "--public",
                "pk",
                "--challenge",
                x,
                "--response",
                resp,
                "--deadline",
                deadline,
            ],
        )
        .status
        .code()
    };
    assert_eq!(verify("honest", "40"), Some(0));
    assert_eq!(verify("honest", "39"), Some(1));
    assert_eq!(verify("cheat", "255"), Some(1));
    assert_eq!(verify("cheat", "256"), Some(0));

    // flip the first bit of y
    let mut forged = honest.clone().into_bytes();
    forged[2] ^= b'0' ^ b'1';
    fs::write(d.join("forged"), &forged).unwrap();
    assert_eq!(verify("forged", "1000000"), Some(1));
}

#[test]
fn keys_identical_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for k in ["1", "4"] {
        let o = tvwalk(
            d,
            &[
                "--threads",
                k,
                "protocol",
                "keygen",
                "--n",
                "100",
                "--t",
                "5000",
                "--seed",
                "1",
                "--public",
                &format!("pk{k}"),
                "--secret",
                &format!("sk{k}"),
            ],
        );
        assert!(o.status.success());
    }
    assert_eq!(
        fs::read(d.join("pk1")).unwrap(),
        fs::read(d.join("pk4")).unwrap()
    );
    assert_eq!(
        fs::read(d.join("sk1")).unwrap(),
        fs::read(d.join("sk4")).unwrap()
    );
}

#[test]
fn walk_writes_loadable_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let o = tvwalk(
        d,
        &[
            "walk", "--n", "5", "--t", "30", "--seed", "2", "--lazy", "--public", "m", "--secret",
            "s",
        ],
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("steps = 30"));
    let m = tvwalk::gf2::BitMatrix::read_from(fs::File::open(d.join("m")).unwrap()).unwrap();
    let s = tvwalk::chain::Trajectory::read_from(fs::File::open(d.join("s")).unwrap()).unwrap();
    assert!(s.is_lazy());
    assert_eq!(s.replay(), m);
}

#[test]
fn report_prints_cost_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = tvwalk(
        dir.path(),
        &["protocol", "report", "--n", "1024", "--t", "1048576"],
    );
    assert!(o.status.success());
    assert!(stdout(&o).contains("1024,1048576,1048576,16384,1"));
}
