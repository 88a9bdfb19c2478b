use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_lwgauge"));
    c.env_remove("LWGAUGE_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn field(out: &str, key: &str) -> Vec<f64> {
    let line = out.lines().find(|l| l.starts_with(key)).unwrap();
    line.split('=')
        .nth(1)
        .unwrap()
        .split(',')
        .map(|v| v.trim().parse().unwrap())
        .collect()
}

#[test]
fn sample_static_charge() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.cfg", "trajectory.kind = static\n");
    let o = run(&["sample", "--config", s(&cfg), "--t", "20", "--r", "0,0,10"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(field(&out, "phi_L"), vec![0.1]);
    for key in ["A_L", "A_C", "delta_A"] {
        assert_eq!(field(&out, key), vec![0.0; 3], "{key}");
    }
    assert!(
        out.contains("1.00000000000000e-1"),
        "15 significant digits:\n{out}"
    );
}

#[test]
fn sample_uniform_head_on() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.cfg",
        "trajectory.kind = uniform\ntrajectory.v = 0.5\n",
    );
    let o = run(&["sample", "--config", s(&cfg), "--t", "0", "--r=-100,0,0"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let phi = field(&stdout(&o), "phi_L")[0];
    assert!((phi - 0.01).abs() < 1e-15);
}

#[test]
fn superluminal_config_is_a_validation_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.cfg",
        "trajectory.kind = uniform\ntrajectory.v = 1.5\nphysics.c = 1\n",
    );
    let o = run(&["sample", "--config", s(&cfg)]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(
        err.contains("line 2") && err.contains("speed bound"),
        "{err}"
    );
}

#[test]
fn missing_config_is_io_error() {
    let o = run(&["sweep", "--config", "/definitely/not/here.cfg"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn sweep_rows_and_determinism() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.cfg", "trajectory.kind = combined\ntrajectory.v = 0.3\ntrajectory.a = 0.2\ntrajectory.omega = 1\nsweep.direction = 0.6, 0, 0.8\nsweep.count = 12\n");
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(run(&["sweep", "--config", s(&cfg), "--out", s(&a)])
        .status
        .success());
    let o = bin()
        .args(["sweep", "--config", s(&cfg), "--out", s(&b)])
        .env("LWGAUGE_THREADS", "1")
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().count(), 13);
    assert_eq!(text, fs::read_to_string(&b).unwrap());
}

#[test]
fn static_sweep_has_zero_discrepancy_columns() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "c.cfg",
        "trajectory.kind = static\nsweep.direction = 1,0,0\n",
    );
    let o = run(&["sweep", "--config", s(&cfg)]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for line in lines {
        let cells: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        for col in ["dAx", "dAy", "dAz"] {
            let i = header.iter().position(|h| *h == col).unwrap();
            assert_eq!(cells[i], 0.0);
        }
    }
}

#[test]
fn sweep_unwritable_output() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.cfg", "trajectory.kind = static\n");
    let o = run(&["sweep", "--config", s(&cfg), "--out", "/no/such/dir/x.csv"]);
    assert_eq!(o.status.code(), Some(3));
}

fn sweep_then_fit(cfg_text: &str) -> String {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "c.cfg", cfg_text);
    let csv = dir.path().join("s.csv");
    assert!(run(&["sweep", "--config", s(&cfg), "--out", s(&csv)])
        .status
        .success());
    let o = run(&["fit", s(&csv)]);
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o)
}

#[test]
fn fit_verdicts() {
    let uniform = sweep_then_fit("trajectory.kind = uniform\ntrajectory.v = 0.5\n");
    assert!(uniform.contains("verdict SAME_ORDER"), "{uniform}");
    let osc = sweep_then_fit("trajectory.kind = oscillatory\ntrajectory.a = 1\ntrajectory.omega = 1\nphysics.c = 2\nsweep.t_ret = 1\nsweep.direction = 0.6, 0, 0.8\n");
    assert!(osc.contains("verdict HIGHER_ORDER"), "{osc}");
}

#[test]
fn fit_synthetic_inverse_r() {
    let dir = TempDir::new().unwrap();
    let mut text = String::from("r,f\n");
    for k in 0..10 {
        let r = 1e3 * 2f64.powi(k);
        text.push_str(&format!("{r:e},{:e}\n", 3.0 / r));
    }
    let csv = write(&dir, "f.csv", &text);
    let out = dir.path().join("fits.csv");
    let o = run(&["fit", s(&csv), "--columns", "f", "--out", s(&out)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("exponent -1.0000"), "{}", stdout(&o));
    let fits = fs::read_to_string(out).unwrap();
    assert!(fits.starts_with("column,exponent,coefficient"));
}

#[test]
fn fit_input_errors() {
    let dir = TempDir::new().unwrap();
    let short = write(&dir, "short.csv", "r,ACx\n1,1\n2,0.5\n");
    assert_eq!(run(&["fit", s(&short)]).status.code(), Some(2));
    let mut text = String::from("r,f\n");
    for k in 1..=9 {
        text.push_str(&format!("{k},{}\n", 1.0 / k as f64));
    }
    let csv = write(&dir, "f.csv", &text);
    let o = run(&["fit", s(&csv), "--columns", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("missing column `nope`"));
}

fn grid_csv(n: usize, f: impl Fn(f64, f64, f64) -> [f64; 3]) -> String {
    let h = 1.0 / (n as f64 - 1.0);
    let mut out = String::from("i,j,k,Vx,Vy,Vz\n");
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let p = [i, j, k].map(|m| m as f64 * h - 0.5);
                let v = f(p[0], p[1], p[2]);
                out.push_str(&format!("{i},{j},{k},{:e},{:e},{:e}\n", v[0], v[1], v[2]));
            }
        }
    }
    out
}

fn bump(x: f64, y: f64, z: f64) -> f64 {
    let s = 1.0 - (x * x + y * y + z * z) / 0.2025;
    if s > 0.0 {
        s.powi(4)
    } else {
        0.0
    }
}

fn max_row_norm(path: &Path) -> f64 {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let c: Vec<f64> = l.split(',').skip(3).map(|v| v.parse().unwrap()).collect();
            (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
        })
        .fold(0.0, f64::max)
}

#[test]
fn project_grid_curl_and_gradient() {
    let n = 17;
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "g.cfg",
        &format!(
            "trajectory.kind = static\ngrid.dims = {n}\ngrid.spacing = {}\n",
            1.0 / (n as f64 - 1.0)
        ),
    );

    let curl = write(
        &dir,
        "curl.csv",
        &grid_csv(n, |x, y, z| {
            let b = bump(x, y, z);
            [-y * b, x * b, 0.0]
        }),
    );
    let out = dir.path().join("curl_out.csv");
    let o = run(&[
        "project-grid",
        "--config",
        s(&cfg),
        "--input",
        s(&curl),
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("reduction"));
    assert!(stderr(&o).is_empty(), "{}", stderr(&o));
    let rows_in: Vec<String> = fs::read_to_string(&curl)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    let rows_out: Vec<String> = fs::read_to_string(&out)
        .unwrap()
        .lines()
        .map(String::from)
        .collect();
    assert_eq!(rows_in.len(), rows_out.len());

    let grad = write(
        &dir,
        "grad.csv",
        &grid_csv(n, |x, y, z| {
            let s = 1.0 - (x * x + y * y + z * z) / 0.2025;
            if s <= 0.0 {
                return [0.0; 3];
            }
            let g = -8.0 * s.powi(3) / 0.2025;
            [g * x, g * y, g * z]
        }),
    );
    let out = dir.path().join("grad_out.csv");
    assert!(run(&[
        "project-grid",
        "--config",
        s(&cfg),
        "--input",
        s(&grad),
        "--out",
        s(&out)
    ])
    .status
    .success());
    assert!(max_row_norm(&out) <= 0.05 * max_row_norm(&grad));
}

#[test]
fn project_grid_leakage_warning() {
    let dir = TempDir::new().unwrap();
    let cfg = write(
        &dir,
        "g.cfg",
        "trajectory.kind = static\ngrid.dims = 7\ngrid.spacing = 0.1\n",
    );
    let input = write(&dir, "f.csv", &grid_csv(7, |x, _, _| [1.0, x, 0.0]));
    let o = run(&["project-grid", "--config", s(&cfg), "--input", s(&input)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("boundary leakage"), "{}", stderr(&o));
}

#[test]
fn verify_list_and_subset() {
    let o = run(&["verify", "--list"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 9);
    let o = run(&["verify", "--only", "1,7"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(),
        2
    );
}

#[test]
fn verify_names_first_failure() {
    let o = run(&["verify", "--only", "3"]);
    assert!(!o.status.success());
    assert!(
        stderr(&o).contains("first failure: criterion 3"),
        "{}",
        stderr(&o)
    );
}

#[test]
fn zero_threads_rejected() {
    let o = bin()
        .args(["verify", "--list"])
        .env("LWGAUGE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
