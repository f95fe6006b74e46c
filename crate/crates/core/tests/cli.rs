use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use specrig::generators::{sl2_generators, snu2_generators};
use specrig::io::read_json;
use specrig::rigidity::{RigidityReport, Verdict};
use specrig::{ComplexMatrix, GeneratorTuple, MultiPoly};
use tempfile::TempDir;

fn specrig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_specrig")).args(args).env_remove("SPECRIG_TOL").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_sl2_writes_the_three_matrices() {
    let o = specrig(&["gen", "--family", "sl2", "--n", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let t: GeneratorTuple = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(t, sl2_generators(3).unwrap());
    let e3 = ComplexMatrix::from_real_rows(&[&[0., 2., 0.], &[0., 0., 2.], &[0., 0., 0.]]).unwrap();
    let f3 = ComplexMatrix::from_real_rows(&[&[0., 0., 0.], &[1., 0., 0.], &[0., 1., 0.]]).unwrap();
    assert_eq!(t.e, e3);
    assert_eq!(t.f, f3);
    assert_eq!(t.h, ComplexMatrix::from_real_diag(&[2., 0., -2.]));
}

#[test]
fn exceptional_rows() {
    let o = specrig(&["exceptional", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0]["i"].as_u64(), rows[0]["j"].as_u64()), (Some(2), Some(3)));
    assert!((rows[0]["z"].as_f64().unwrap() - 0.7548776662).abs() < 1e-10);
    assert!((rows[0]["nu"].as_f64().unwrap() - 0.8688369).abs() < 1e-7);

    let csv = stdout(&specrig(&["exceptional", "--n", "5", "--csv"]));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("i,j,z,nu"));
    assert_eq!(lines.count(), 2);
    assert!(stdout(&specrig(&["exceptional", "--n", "3"])).trim() == "[]");
}

#[test]
fn random_conjugate_round_trip_through_rigidity() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "roundtrip.json");
    let o = specrig(&[
        "gen",
        "--family",
        "random-conjugate",
        "--base",
        "snu2",
        "--n",
        "5",
        "--nu",
        "0.5",
        "--seed",
        "11",
        "-o",
        s(&file),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = specrig(&["rigidity", "--tuple", s(&file), "--family", "snu2", "--n", "5", "--nu", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let report: RigidityReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report.verdict, Verdict::Equivalent);
    assert!(report.certified_residual.unwrap() <= 1e-9);
    let again: RigidityReport = serde_json::from_str(&serde_json::to_string(&report).unwrap()).unwrap();
    assert_eq!(again, report);

    let o = specrig(&["rigidity", "--tuple", s(&file), "--family", "sl2", "--n", "5", "--text"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("HypothesisFailed"));
}

#[test]
fn output_is_byte_identical_for_a_fixed_seed() {
    let args = ["gen", "--family", "random-conjugate", "--base", "sl2", "--n", "4", "--seed", "3"];
    assert_eq!(specrig(&args).stdout, specrig(&args).stdout);
    let other = specrig(&["gen", "--family", "random-conjugate", "--base", "sl2", "--n", "4", "--seed", "4"]);
    assert_ne!(specrig(&args).stdout, other.stdout);
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "t.json");
    fs::write(&file, stdout(&specrig(&["gen", "--family", "snu2", "--n", "6", "--nu", "0.3"]))).unwrap();
    let det = ["det", "--tuple", s(&file), "--pencil", "A1, A2 A2^H, A3"];
    assert_eq!(specrig(&det).stdout, specrig(&det).stdout);
}

#[test]
fn tampered_tuples_are_rejected() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "bad.json");
    let mut t = snu2_generators(4, 0.5).unwrap();
    t.e[(1, 2)] *= 1.001;
    fs::write(&file, serde_json::to_string(&t).unwrap()).unwrap();
    // a 0.1% modulus change already shows in the (A1, A2A2*) pencil
    let o = specrig(&["rigidity", "--tuple", s(&file), "--family", "snu2", "--n", "4", "--nu", "0.5"]);
    assert_eq!(o.status.code(), Some(2));

    let mut t = snu2_generators(4, 0.5).unwrap();
    t.e[(0, 2)] = 1e-3.into();
    fs::write(&file, serde_json::to_string(&t).unwrap()).unwrap();
    let o = specrig(&["rigidity", "--tuple", s(&file), "--family", "snu2", "--n", "4", "--nu", "0.5"]);
    let report: RigidityReport = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(o.status.code(), Some(report.verdict.exit_code()));
    assert_ne!(report.verdict, Verdict::Equivalent);
}

#[test]
fn det_matches_the_showcase() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "sl2.json");
    fs::write(&file, stdout(&specrig(&["gen", "--family", "sl2", "--n", "3"]))).unwrap();
    let o =
        specrig(&["det", "--tuple", s(&file), "--pencil", "H, E, F", "--vars", "x,y,z,t", "--homogeneous", "--text"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "(-1)*t^3 + (4)*y*z*t + (4)*x^2*t");
    let o = specrig(&["det", "--tuple", s(&file), "--pencil", "A1, A2 A3"]);
    let p: MultiPoly = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(p.vars(), ["x1", "x2"]);
    assert_eq!(p.total_degree(), 3);
}

#[test]
fn lines_and_compare() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    fs::write(&a, stdout(&specrig(&["gen", "--family", "snu2", "--n", "4", "--nu", "-0.7"]))).unwrap();
    fs::write(
        &b,
        stdout(&specrig(&["gen", "--family", "random-conjugate", "--n", "4", "--nu", "-0.7", "--seed", "1"])),
    )
    .unwrap();
    let o = specrig(&["lines", "--tuple", s(&a), "--pencil", "A1, A2 A2^H"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["certified"], true);
    assert_eq!(v["lines"].as_array().unwrap().len(), 4);
    let o = specrig(&["compare", "--tuple", s(&a), "--other", s(&b), "--csv"]);
    let csv = stdout(&o);
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.lines().skip(1).all(|l| l.contains(",true,")));
    let o = specrig(&["lines", "--tuple", s(&a), "--pencil", "A1, A2, A3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn relations_and_counterexample() {
    let o = specrig(&["relations", "--family", "snu2", "--n", "5", "--nu", "0.4"]);
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rows[0]["max_relative"].as_f64().unwrap() > 0.1);
    assert!(rows[1]["max_relative"].as_f64().unwrap() < 1e-12);
    let o = specrig(&["counterexample", "--params", "2,1,1,2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["same_three_matrix_spectrum"], true);
    assert!(v["commutator_defect"].as_f64().unwrap() >= 1.0);
    assert_eq!(v["rigidity"]["verdict"], "hypothesis_failed");
    assert_eq!(specrig(&["counterexample", "--params", "1,1,1,1"]).status.code(), Some(1));
}

#[test]
fn usage_and_input_errors() {
    assert_eq!(specrig(&["--help"]).status.code(), Some(0));
    assert_eq!(specrig(&["--version"]).status.code(), Some(0));
    assert_eq!(specrig(&[]).status.code(), Some(1));
    assert_eq!(specrig(&["exceptional", "--n", "4", "--tol", "0"]).status.code(), Some(1));
    assert_eq!(specrig(&["exceptional", "--n", "4", "--json", "--csv"]).status.code(), Some(1));
    assert_eq!(specrig(&["gen", "--family", "snu2", "--n", "3"]).status.code(), Some(1));
    assert_eq!(specrig(&["gen", "--family", "snu2", "--n", "3", "--nu", "1.5"]).status.code(), Some(1));

    let dir = TempDir::new().unwrap();
    let bad = path(&dir, "broken.json");
    fs::write(&bad, r#"{"family":"sl2","n":2,"nu":null,"matrices":{"H":{"n":2,"entries":[[[1,0]]]}}}"#).unwrap();
    let o = specrig(&["rigidity", "--tuple", s(&bad), "--family", "sl2", "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("broken.json"), "{}", stderr(&o));
    let o = specrig(&["det", "--tuple", s(&path(&dir, "missing.json")), "--pencil", "A1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("missing.json"));
    fs::write(&bad, stdout(&specrig(&["gen", "--family", "sl2", "--n", "2"]))).unwrap();
    let o = specrig(&["det", "--tuple", s(&bad), "--pencil", "A1 ^H ,"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("byte"), "{}", stderr(&o));
}

#[test]
fn tolerance_from_the_environment() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "t.json");
    let mut t = snu2_generators(3, 0.5).unwrap();
    t.e[(0, 1)] *= 1.0 + 1e-7;
    fs::write(&file, serde_json::to_string(&t).unwrap()).unwrap();
    let run = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_specrig"))
            .args(["rigidity", "--tuple", s(&file), "--family", "snu2", "--n", "3", "--nu", "0.5"])
            .env("SPECRIG_TOL", tol)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(run("1e-4"), Some(0));
    assert_ne!(run("1e-10"), Some(0));
    assert_eq!(run("-1"), Some(1));
}

#[test]
fn tuple_files_round_trip() {
    let dir = TempDir::new().unwrap();
    let file = path(&dir, "t.json");
    let t = snu2_generators(7, -0.3).unwrap();
    fs::write(&file, serde_json::to_string_pretty(&t).unwrap()).unwrap();
    let back: GeneratorTuple = read_json(&file).unwrap();
    assert_eq!(back, t);
    let o = specrig(&["gen", "--family", "onedim", "--c", "1", "--nu", "0.5", "-o", s(&file)]);
    assert_eq!(o.status.code(), Some(0));
    let one: GeneratorTuple = read_json(&file).unwrap();
    assert!((one.f[(0, 0)].re - 2.0 / 3.0).abs() < 1e-15);
    assert!((one.h[(0, 0)].re + 1.0 / 3.0).abs() < 1e-15);
}
