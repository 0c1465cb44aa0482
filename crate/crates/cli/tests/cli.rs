use std::io::Write;
use std::process::{Command, Output};

fn verify(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verify")).args(args).env_remove("MAJORANT_JOBS").output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn discrete_ball_grid_passes() {
    let o = verify(&["discrete-ball", "--n", "2..8", "--p", "2,4,8"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("\"schema\": 1"));
    assert_eq!(out.matches("\"name\": \"discrete_ball\"").count(), 21);
    assert!(!out.contains("\"pass\": false"));
}

#[test]
fn lattice_brute_force_agreement() {
    let o = verify(&["lattice", "--dims", "2..5", "--max-side", "9", "--seed", "7", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let brute = out.lines().filter(|l| l.starts_with("lattice,slice_brute_force,")).count();
    assert_eq!(brute, 500);
    assert!(out.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn ball_equality_record() {
    let o = verify(&["ball", "--s", "1", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let first = out.lines().nth(1).unwrap();
    assert!(first.starts_with("ball,ball,s=1.0000000000000000e0,"), "{first}");
    assert!(first.ends_with(",true"));
    let json = stdout(&verify(&["--suite", "ball", "--s", "1"]));
    assert!(json.contains("\"kind\": \"equality\""));
}

#[test]
fn csv_header_is_fixed() {
    let o = verify(&["ball", "--s", "2", "--output", "csv"]);
    assert_eq!(stdout(&o).lines().next(), Some("suite,name,params,lhs,rhs,margin,error_budget,pass"));
}

#[test]
fn output_is_independent_of_jobs() {
    let args = ["lattice", "--dims", "1..4", "--max-side", "6", "--seed", "3", "--boxes", "60"];
    let a = verify(&[&args[..], &["--jobs", "1"]].concat());
    let b = verify(&[&args[..], &["--jobs", "4"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = Command::new(env!("CARGO_BIN_EXE_verify")).args(args).env("MAJORANT_JOBS", "2").output().unwrap();
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn config_errors_exit_2() {
    assert_eq!(verify(&["nonsense"]).status.code(), Some(2));
    assert_eq!(verify(&["ball", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(verify(&["ball", "--s", "0.5"]).status.code(), Some(2));
    assert_eq!(verify(&["ball", "--output", "xml"]).status.code(), Some(2));
    assert_eq!(verify(&["discrete-ball", "--n", "8..2"]).status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_verify")).args(["ball"]).env("MAJORANT_JOBS", "many").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn config_file_and_flag_override() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "# ball run\nsuite = ball\ns = 2\noutput = csv").unwrap();
    let path = f.path().to_str().unwrap();
    let o = verify(&["--config", path]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("suite,name"));
    let o = verify(&["--config", path, "--output", "json"]);
    assert!(stdout(&o).starts_with("{"));
    let mut bad = tempfile::NamedTempFile::new().unwrap();
    writeln!(bad, "suite ball").unwrap();
    assert_eq!(verify(&["--config", bad.path().to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(verify(&["--config", "/nonexistent/cfg"]).status.code(), Some(2));
}

#[test]
fn entropy_orders_accept_infinity() {
    let o = verify(&["entropy", "--q", "2,inf", "--output", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("q=inf"));
}
