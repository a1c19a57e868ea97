use std::fs;
use std::process::{Command, Output};

fn plap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_plap"))
        .args(args)
        .output()
        .expect("spawn plap")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn solve_prints_eigenvalue() {
    let o = plap(&["solve", "--p", "2", "--weight", "constant,1", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("lambda = ")).unwrap();
    let lambda: f64 = line["lambda = ".len()..].parse().unwrap();
    let want = 4.0 * std::f64::consts::PI.powi(2);
    assert!((lambda - want).abs() < 1e-6 * want);
}

#[test]
fn solve_writes_eigenfunction_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.csv");
    let o = plap(&["solve", "--k", "3", "--eps", "0.1", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&path).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    assert_eq!(lines.next(), Some("x,u"));
    assert_eq!(lines.count(), 201);
    assert!(text.starts_with("# plap "));
    assert!(text.contains("\n# config: {"));
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["solve", "--p", "0.5"],
        vec!["solve", "--eps", "1e-6"],
        vec!["solve", "--weight", "no-such-weight"],
        vec!["solve", "--weight", "piecewise,1"],
        vec!["solve", "--weight", "piecewise,1,-2"],
        vec!["solve", "--k", "0"],
        vec!["figure", "--figure", "9"],
        vec!["frobnicate"],
        vec!["solve", "--mode", "sideways"],
    ] {
        let o = plap(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn config_field_errors_are_named() {
    let o = plap(&["solve", "--tol", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("`tol`"), "{}", stderr(&o));
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(plap(&["--help"]).status.code(), Some(0));
    assert_eq!(plap(&["--version"]).status.code(), Some(0));
    assert_eq!(plap(&["sweep-eps", "--help"]).status.code(), Some(0));
}

#[test]
fn missing_config_file_is_io_failure() {
    let o = plap(&["solve", "--config", "/nonexistent/plap.json"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn dump_config_round_trip_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let base = [
        "sweep-eps",
        "--eps-list",
        "0.25,0.125,0.0625",
        "--k-list",
        "1,2",
        "--weight",
        "two-minus-sin",
        "--p",
        "3",
        "--no-timing",
    ];

    let mut dump = base.to_vec();
    dump.push("--dump-config");
    let o = plap(&dump);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    fs::write(&cfg, &o.stdout).unwrap();

    let mut direct = base.to_vec();
    direct.extend(["--out", a.to_str().unwrap()]);
    assert_eq!(plap(&direct).status.code(), Some(0));

    let o = plap(&[
        "sweep-eps",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        b.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));

    let (ta, tb) = (fs::read_to_string(&a).unwrap(), fs::read_to_string(&b).unwrap());
    let data = |t: &str| {
        t.lines()
            .filter(|l| !l.starts_with('#'))
            .map(String::from)
            .collect::<Vec<_>>()
    };
    assert_eq!(data(&ta), data(&tb));
    assert_eq!(
        data(&ta)[0],
        "eps,k,p,lambda_eps,lambda_limit,abs_err,bound,ratio,runtime_ms"
    );
    assert_eq!(data(&ta).len(), 7);
}

#[test]
fn sweeps_are_deterministic_without_timing() {
    let run = || {
        let o = plap(&["sweep-k", "--k-max", "3", "--eps", "0.0625", "--no-timing"]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        o.stdout
    };
    assert_eq!(run(), run());
}

#[test]
fn config_for_other_subcommand_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let o = plap(&["trig", "--dump-config"]);
    fs::write(&cfg, &o.stdout).unwrap();
    let o = plap(&["solve", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("subcommand"));
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"problem": {"p": 3.0, "weight": {"name": "constant", "params": [2.0]}}, "k": 2}"#,
    )
    .unwrap();
    let o = plap(&["solve", "--config", cfg.to_str().unwrap(), "--k", "1", "--dump-config"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["k"], 1);
    assert_eq!(v["problem"]["p"], 3.0);
    assert_eq!(v["problem"]["weight"]["params"][0], 2.0);
}

#[test]
fn trig_table_has_requested_rows() {
    let o = plap(&["trig", "--p", "3", "--points", "5"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("pi_p = 3.04699"));
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "x,sin_p,cos_p");
    assert_eq!(rows.len(), 6);
}

#[test]
fn transform_and_bounds_report() {
    let o = plap(&["transform", "--coefficient", "piecewise,1,4", "--eps", "0.25"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("a_star = "));

    let o = plap(&["bounds", "--k", "2", "--eps", "0.0625"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    for name in ["teo1d", "explicit", "general_eq", "linear1d", "nodal"] {
        assert!(out.lines().any(|l| l.starts_with(name)), "{name} missing:\n{out}");
    }
}

#[test]
fn figure_directory_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = plap(&["figure", "--resolution", "5", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for name in ["fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv"] {
        let text = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(text.lines().any(|l| !l.starts_with('#')));
    }
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().collect();
    assert_eq!(names.len(), 4);
}

#[test]
fn zeros_csv() {
    let o = plap(&["zeros", "--k", "4", "--eps-list", "0.125,0.0625"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect();
    assert_eq!(rows[0], "eps,j,x_eps,x_limit,abs_dev,bound,ratio");
    assert_eq!(rows.len(), 1 + 2 * 3);
}
