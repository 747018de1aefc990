use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use linksig::alexander::{alexander_polynomial, normalize_unit};
use linksig::seifert::{ColoredSeifertData, SignVector};
use num_bigint::BigInt;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_linksig"))
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

fn path(dir: &Path, name: &str) -> PathBuf {
    dir.join(name)
}

fn torus(dir: &Path, p: i64, q: i64) -> PathBuf {
    let out = path(dir, &format!("t_{p}_{q}.json"));
    let o = run(&[
        "torus",
        "--p",
        &p.to_string(),
        "--q",
        &q.to_string(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    out
}

fn load(p: &Path) -> ColoredSeifertData {
    ColoredSeifertData::from_json(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn braid_and_torus_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let tre = path(dir.path(), "trefoil.json");
    let o = run(&[
        "braid",
        "--strands",
        "2",
        "--word",
        "1 1 1",
        "--out",
        tre.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let d = load(&tre);
    assert_eq!((d.colors(), d.dim()), (1, 2));
    assert_eq!(
        d.to_canonical_json(),
        std::fs::read_to_string(&tre).unwrap()
    );

    let d = load(&torus(dir.path(), 3, -2));
    assert_eq!(d.dim(), 2);

    let d = load(&torus(dir.path(), 2, -2));
    assert_eq!((d.colors(), d.dim()), (1, 1));
    let poly = normalize_unit(&alexander_polynomial(d.matrix(SignVector::new(0, 1))));
    assert_eq!(poly, vec![BigInt::from(1), BigInt::from(-1)]);
}

#[test]
fn sig_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let tre = torus(dir.path(), 2, 3);
    let o = run(&["sig", "--link", tre.to_str().unwrap(), "--omega", "1/2"]);
    assert_eq!(stdout(&o), "signature=-2 nullity=0\n");
    let o = run(&[
        "sig",
        "--link",
        tre.to_str().unwrap(),
        "--omega",
        "1/2",
        "--solver",
        "jacobi",
    ]);
    assert_eq!(stdout(&o), "signature=-2 nullity=0\n");

    let unknot = torus(dir.path(), 1, 1);
    let o = run(&["sig", "--link", unknot.to_str().unwrap(), "--omega", "0.37"]);
    assert_eq!(stdout(&o), "signature=0 nullity=0\n");

    let o = run(&["sig", "--link", tre.to_str().unwrap(), "--omega", "0"]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("warning"));
    assert_eq!(stdout(&o), "signature=0 nullity=2\n");
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = path(dir.path(), "bad.json");
    std::fs::write(&bad, "{\n  \"colors\": 1,\n  \"dim\": oops\n}\n").unwrap();
    let o = run(&["sig", "--link", bad.to_str().unwrap(), "--omega", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("bad.json") && err.contains("line 3"), "{err}");

    let asym = path(dir.path(), "asym.json");
    std::fs::write(
        &asym,
        r#"{"colors": 1, "dim": 1, "label": "x", "matrices": {"+": [[1]], "-": [[2]]}}"#,
    )
    .unwrap();
    let o = run(&["sig", "--link", asym.to_str().unwrap(), "--omega", "1/2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("transpose symmetry"));

    let tre = torus(dir.path(), 2, 3);
    let o = run(&["sig", "--link", tre.to_str().unwrap(), "--omega", "1/2,1/3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "sig",
        "--link",
        tre.to_str().unwrap(),
        "--omega",
        "1/2",
        "--bogus",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "sig",
        "--link",
        tre.to_str().unwrap(),
        "--omega",
        "1/2",
        "--solver",
        "nope",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&[
        "braid",
        "--strands",
        "3",
        "--word",
        "1 1",
        "--out",
        path(dir.path(), "x.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!path(dir.path(), "x.json").exists());
}

#[test]
fn integrate_values_and_contracts() {
    let dir = tempfile::tempdir().unwrap();
    let tre = torus(dir.path(), 2, 3);
    let t = tre.to_str().unwrap();
    let o = run(&[
        "integrate",
        "--link",
        t,
        "--group",
        "Z^1",
        "--grid",
        "4096",
        "--format",
        "json",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["value"].as_f64().unwrap() + 4.0 / 3.0).abs() < 0.02);

    let out = path(dir.path(), "r.json");
    let o = run(&[
        "integrate",
        "--link",
        t,
        "--group",
        "n=1; rel=2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("unresolved degeneracy"));
    assert!(!out.exists());

    let o = run(&[
        "integrate",
        "--link",
        t,
        "--group",
        "n=1; rel=2",
        "--fallback-degenerate",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let s = stdout(&o);
    let row: Vec<&str> = s.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], "-1");
    assert_eq!(row[6], "1");

    let o = run(&[
        "integrate",
        "--link",
        t,
        "--grid",
        "4",
        "--tol",
        "1e-9",
        "--max-points",
        "8",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("\"converged\": false"));
}

#[test]
fn integrate_with_pm_data() {
    let dir = tempfile::tempdir().unwrap();
    let tre = torus(dir.path(), 2, 3);
    // L± of the unknot is the two-component unlink: empty two-color data
    let unknot = torus(dir.path(), 1, 1);
    let pm = path(dir.path(), "pm.json");
    std::fs::write(
        &pm,
        r#"{"colors": 2, "dim": 0, "label": "unlink", "matrices": {"++": [], "+-": [], "-+": [], "--": []}}"#,
    )
    .unwrap();
    let o = run(&[
        "integrate",
        "--link",
        unknot.to_str().unwrap(),
        "--group",
        "n=1; rel=1",
        "--pm",
        pm.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let s = stdout(&o);
    assert_eq!(s.lines().nth(1).unwrap().split(',').nth(2), Some("0"));
    let o = run(&[
        "integrate",
        "--link",
        tre.to_str().unwrap(),
        "--group",
        "n=1; rel=2",
        "--pm",
        unknot.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn samples_csv_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let link = torus(dir.path(), 4, 3);
    let outputs: Vec<(Vec<u8>, String)> = ["1", "4", "8"]
        .iter()
        .map(|w| {
            let csv = path(dir.path(), &format!("s{w}.csv"));
            let o = run(&[
                "integrate",
                "--link",
                link.to_str().unwrap(),
                "--grid",
                "2000",
                "--workers",
                w,
                "--samples",
                csv.to_str().unwrap(),
                "--format",
                "csv",
            ]);
            assert!(o.status.success());
            (std::fs::read(&csv).unwrap(), stdout(&o))
        })
        .collect();
    assert!(outputs[0]
        .0
        .starts_with(b"omega_angles,signature,nullity,weight\n"));
    assert_eq!(outputs[0].0.iter().filter(|&&c| c == b'\n').count(), 2001);
    assert!(!outputs[0].0.contains(&b'\r'));
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn twist_commands() {
    assert_eq!(
        stdout(&run(&["twist", "classify", "5"])),
        "Order4 (21 = 3·7)\n"
    );
    assert_eq!(
        stdout(&run(&["twist", "classify", "-1"])),
        "InfiniteOrder\n"
    );
    let o = run(&["twist", "exceptions", "--nmax", "150", "--paper-diff"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(
        s.contains("78 obstructed by decomposition (7,6) with f = 7"),
        "{s}"
    );
    let o = run(&[
        "twist",
        "exceptions",
        "--nmax",
        "150",
        "--strict-geometry",
        "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["candidates"].as_array().unwrap().iter().any(|x| x == 101));
}
