use std::path::Path;
use std::process::{Command, Output};
use std::sync::Arc;

use clap::Parser;
use tempfile::TempDir;

use branched::formats::{ControlledPathFile, FieldFile, RoughPathFile, SmoothControlFile, TubeFile};
use branched::Cli;
use branched_core::approx::{default_epsilon, SmoothControlData};
use branched_core::controlled::ControlledPath;
use branched_core::drivers::sampled;
use branched_core::poly::PolyVectorField;
use branched_core::rough_path::{lift_piecewise_linear, BranchedRoughPath};
use branched_core::series::{q, q_frac};
use branched_core::Label;

fn branched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_branched")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn save<T: serde::Serialize>(dir: &TempDir, name: &str, v: &T) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn smooth(n: usize) -> Arc<BranchedRoughPath> {
    Arc::new(lift_piecewise_linear(&sampled(n, 1.0, |t| (3.0 * t).sin() + 0.4 * t).unwrap(), 0.3).unwrap())
}

fn sine_of(x: Arc<BranchedRoughPath>) -> ControlledPath {
    ControlledPath::composition(x, Label::PLAIN, |v, k| match k % 4 {
        0 => v.sin(),
        1 => v.cos(),
        2 => -v.sin(),
        _ => -v.cos(),
    })
    .unwrap()
}

#[test]
fn algebra_reference_outputs() {
    let o = branched(&["algebra", "star", "[]", "[]", "--basis", "zeta"]);
    assert_eq!(stdout(&o), "z([][]) + z([[]])\n");
    let o = branched(&["algebra", "pi1", "[][]"]);
    assert_eq!(stdout(&o), "[][] - 2*[[]]\n");
    let o = branched(&["algebra", "primitives", "--N", "4", "--golden"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "OK: 5 basis vectors match\n");
    let o = branched(&["algebra", "golden"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = branched(&["algebra", "star", "[i]", "[j]", "--strategy", "coproduct"]);
    assert_eq!(stdout(&o), "[i][j] + [j[i]]\n");
    let o = branched(&["algebra", "coproduct", "[[]]"]);
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn algebra_errors_map_to_exit_codes() {
    assert_eq!(branched(&["algebra", "pi1", "[[]"]).status.code(), Some(3));
    assert_eq!(branched(&["algebra", "primitives", "--N", "99"]).status.code(), Some(2));
    assert_eq!(branched(&["algebra", "frobnicate"]).status.code(), Some(2));
}

#[test]
fn lift_reports_chen_and_rejects_reciprocal_alpha() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.json");
    let o = branched(&["lift", "--synthetic", "32", "--dim", "2", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("chen_defect"));
    let file: RoughPathFile = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let x = file.to_path().unwrap();
    assert_eq!((x.len(), x.alphabet().len()), (33, 2));

    // the same seed gives the same walk
    let again = branched(&["lift", "--synthetic", "32", "--dim", "2", "--seed", "7"]);
    assert_eq!(stdout(&again), std::fs::read_to_string(&out).unwrap());

    let o = branched(&["lift", "--synthetic", "8", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha must avoid 1/n"));
    assert_eq!(branched(&["lift", "/nonexistent/path.json"]).status.code(), Some(3));
}

#[test]
fn approx_convergence_table() {
    let dir = TempDir::new().unwrap();
    let x = smooth(256);
    let rough = save(&dir, "x.json", &RoughPathFile::from_path(&x));
    let z = save(&dir, "z.json", &ControlledPathFile::from_path(&sine_of(x)));
    let o = branched(&["approx", &rough, &z, "--mesh-levels", "2,3,4,5,6"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("theta,error_beta,slope"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[4][2] >= 0.3 - 0.15 - 0.1);
    assert!(rows.windows(2).all(|w| w[1][0] < w[0][0]));

    // the path itself is reproduced exactly
    let o = branched(&["approx", &rough]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).lines().nth(1).unwrap().ends_with(",exact"));

    let o = branched(&["approx", &rough, "--beta", "0.3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = branched(&["approx", &rough, "--mesh-levels", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("insufficient scales for fit"));
}

#[test]
fn rde_solution_stability_and_divergence() {
    let dir = TempDir::new().unwrap();
    let x = smooth(128);
    let rough = save(&dir, "x.json", &RoughPathFile::from_path(&x));
    let linear = save(&dir, "lin.json", &FieldFile::from_field(&PolyVectorField::scalar(&[q(0), q(1)])));
    let o = branched(&["rde", &rough, &linear, "--xi", "0.7"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("t,y0,y0:[]"));
    let last: f64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    let dx = (3.0f64).sin() + 0.4;
    assert!((last - 0.7 * dx.exp()).abs() < 1e-4, "{last}");

    let gentle = save(
        &dir,
        "gentle.json",
        &FieldFile::from_field(&PolyVectorField::scalar(&[q(1), q_frac(1, 2), q_frac(-1, 4)])),
    );
    let serial = branched(&["rde", &rough, &gentle, "--xi", "0.2", "--stability"]);
    let parallel = branched(&["rde", &rough, &gentle, "--xi", "0.2", "--stability", "--jobs", "4"]);
    assert!(serial.status.success(), "{}", stderr(&serial));
    assert_eq!(stdout(&serial), stdout(&parallel));
    assert_eq!(stdout(&serial).lines().count(), 9);

    let cubic = save(&dir, "cubic.json", &FieldFile::from_field(&PolyVectorField::scalar(&[q(0), q(0), q(0), q(50)])));
    let o = branched(&["rde", &rough, &cubic, "--xi", "3"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("diverged"));
    assert_eq!(branched(&["rde", &rough, &linear, "--xi", "1,2"]).status.code(), Some(3));
}

#[test]
fn metric_with_tubes() {
    let dir = TempDir::new().unwrap();
    let x = smooth(24);
    let bumped = Arc::new(
        lift_piecewise_linear(&sampled(24, 1.0, |t| (3.0 * t).sin() + 0.4 * t + 0.01 * t * t).unwrap(), 0.3)
            .unwrap(),
    );
    let a = save(&dir, "a.json", &ControlledPathFile::from_path(&sine_of(x.clone())));
    let b = save(&dir, "b.json", &ControlledPathFile::from_path(&sine_of(bumped)));
    let f = SmoothControlData::zero(&x, default_epsilon(0.3).unwrap()).unwrap();
    let tube = TubeFile {
        radius: 0.9,
        epsilon: 0.9,
        center: RoughPathFile::from_path(&x),
        section: SmoothControlFile::from_data(&f),
    };
    let t = save(&dir, "t.json", &tube);
    let o = branched(&["metric", &a, &b, &a, "--tubes", &t]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.iter().map(|r| r[0]).collect::<Vec<_>>(), ["0-1", "0-2", "1-2"]);
    let d01: f64 = rows[0][1].parse().unwrap();
    assert!(d01 > 0.0);
    assert_eq!(rows[1][1], "0");
    assert_eq!(rows[1][2], "0");
    assert!(rows[0][2].parse::<f64>().unwrap() <= 0.5);
    assert_eq!(branched(&["metric", &a]).status.code(), Some(2));
}

#[test]
fn arguments_parse_in_process() {
    let cli = Cli::try_parse_from(["branched", "--jobs", "3", "rde", "x.json", "f.json", "--xi", "-0.5,1"]).unwrap();
    assert_eq!(cli.jobs, 3);
    assert!(Cli::try_parse_from(["branched", "lift", "p.json", "--synthetic", "4"]).is_err());
    let mut sink = Vec::new();
    let cli = Cli::try_parse_from(["branched", "--jobs", "0", "algebra", "golden"]).unwrap();
    let err = branched::run(&cli, &mut sink, &mut Vec::new()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
    let cli = Cli::try_parse_from(["branched", "algebra", "grow", "[]", "[]"]).unwrap();
    branched::run(&cli, &mut sink, &mut Vec::new()).unwrap();
    assert_eq!(String::from_utf8(sink).unwrap(), "[[]]\n");
    assert!(Path::new(env!("CARGO_BIN_EXE_branched")).exists());
}
