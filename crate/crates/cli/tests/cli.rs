use std::path::Path;
use std::process::{Command, Output};

use cubemix::oracle::{default_cache_dir, PdbSet};

fn cubemix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cubemix")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn cached_pdb_dir() -> String {
    let dir = default_cache_dir();
    PdbSet::load_or_build(&dir).unwrap();
    dir.to_string_lossy().into_owned()
}

#[test]
fn scramble_is_deterministic() {
    let a = cubemix(&["scramble", "--n", "25", "--seed", "7"]);
    let b = cubemix(&["scramble", "--n", "25", "--seed", "7"]);
    let c = cubemix(&["scramble", "--n", "25", "--seed", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap().split_whitespace().count(), 25);
    assert_eq!(lines.next().unwrap().len(), 54);
}

#[test]
fn solve_checkerboard() {
    let dir = cached_pdb_dir();
    let o = cubemix(&["solve", "checkerboard", "--pdb-dir", &dir]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().next(), Some("6"));
    let o = cubemix(&["solve", "--moves", "R1 U1 R3 U3", "--pdb-dir", &dir]);
    assert_eq!(stdout(&o).lines().next(), Some("4"));
    let o = cubemix(&["solve", "checkerboard", "--target", "checkerboard", "--pdb-dir", &dir]);
    assert_eq!(stdout(&o).lines().next(), Some("0"));
}

#[test]
fn exit_codes() {
    let empty = tempfile::tempdir().unwrap();
    let empty_dir = empty.path().to_str().unwrap();
    assert_eq!(cubemix(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cubemix(&["solve", "--moves", "R9", "--pdb-dir", empty_dir]).status.code(), Some(2));
    assert_eq!(cubemix(&["solve", "superflip", "--pdb-dir", empty_dir]).status.code(), Some(6));

    let dir = cached_pdb_dir();
    let o = cubemix(&["solve", "superflip", "--budget-nodes", "1000", "--pdb-dir", &dir]);
    assert_eq!(o.status.code(), Some(3));

    let o = Command::new(env!("CARGO_BIN_EXE_cubemix"))
        .args(["exact-corner", "decay", "--max-n", "1"])
        .env("CUBEMIX_MEMORY_LIMIT_MB", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

fn init_quotient(dir: &Path, pdb: &str) {
    let out = dir.to_str().unwrap();
    let o = cubemix(&[
        "dataset", "init", "--out", out, "--mode", "quotient", "--seed", "3", "--steps", "0..12,inf", "--samples", "500",
        "--functional", "d_o,d_c", "--shard-size", "1000",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = cubemix(&["dataset", "run", "--out", out, "--pdb-dir", pdb, "--max-shards", "2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn dataset_lifecycle() {
    let tables = tempfile::tempdir().unwrap();
    let pdb = tables.path().to_str().unwrap();
    let work = tempfile::tempdir().unwrap();
    let ds = work.path().join("ds");
    let out = ds.to_str().unwrap();
    init_quotient(&ds, pdb);

    let st = stdout(&cubemix(&["dataset", "status", "--out", out]));
    assert!(st.contains("shards 2/7 done"), "{st}");
    let o = cubemix(&["dataset", "resume", "--out", out, "--pdb-dir", pdb]);
    assert!(o.status.success());
    let st = stdout(&cubemix(&["dataset", "status", "--out", out]));
    assert!(st.contains("rows 7000/7000") && st.contains("digests ok"), "{st}");

    let o = cubemix(&["decay", out, "--resamples", "50", "--seed", "1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let curve = stdout(&o);
    assert!(curve.starts_with("n,tv,stderr\n0,"));
    assert_eq!(curve.lines().count(), 14);
    let curve_file = work.path().join("decay.csv");
    std::fs::write(&curve_file, &curve).unwrap();
    let t = stdout(&cubemix(&["thresholds", curve_file.to_str().unwrap()]));
    assert!(t.starts_with("epsilon,n\n0.5,"), "{t}");

    let h = stdout(&cubemix(&["hist", out, "--functional", "d_c", "--steps", "0"]));
    assert!(h.contains("distance,count,probability"));

    // the same dataset generated in one go is byte-identical
    let again = work.path().join("again");
    let a = again.to_str().unwrap();
    init_quotient(&again, pdb);
    cubemix(&["dataset", "resume", "--out", a, "--pdb-dir", pdb, "--threads", "1"]);
    for e in std::fs::read_dir(&ds).unwrap() {
        let name = e.unwrap().file_name();
        assert_eq!(std::fs::read(ds.join(&name)).unwrap(), std::fs::read(again.join(&name)).unwrap());
    }

    let shard = ds.join("shard-00004.csv");
    let mut bytes = std::fs::read(&shard).unwrap();
    bytes[30] ^= 0x04;
    std::fs::write(&shard, bytes).unwrap();
    assert_eq!(cubemix(&["dataset", "status", "--out", out]).status.code(), Some(5));
    assert_eq!(cubemix(&["dataset", "resume", "--out", out, "--pdb-dir", pdb]).status.code(), Some(5));
}

#[test]
fn samples_and_tv() {
    let tables = tempfile::tempdir().unwrap();
    let pdb = tables.path().to_str().unwrap();
    let work = tempfile::tempdir().unwrap();
    let a = work.path().join("a.csv");
    let b = work.path().join("b.csv");
    let common = ["--mode", "quotient", "--samples", "2000", "--pdb-dir", pdb];
    let o = cubemix(&[&["walk-sample", "--n", "30", "--out", a.to_str().unwrap()][..], &common].concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = cubemix(&[&["stationary-sample", "--seed", "1", "--out", b.to_str().unwrap()][..], &common].concat());
    assert!(o.status.success());
    let text = std::fs::read_to_string(&b).unwrap();
    assert!(text.starts_with("n,sample_index,d_o\n-1,0,"));

    let o = cubemix(&["tv", a.to_str().unwrap(), b.to_str().unwrap(), "--resamples", "100"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("point,stderr,ci_low,ci_high,resamples"));
    let fields: Vec<f64> = lines.next().unwrap().split(',').map(|f| f.parse().unwrap()).collect();
    assert_eq!(fields.len(), 5);
    assert!(fields[0] < 0.15 && fields[1] > 0.0 && fields[2] <= fields[0] && fields[0] <= fields[3]);
}

#[test]
fn exact_quotient_decay_reports_crossing() {
    let work = tempfile::tempdir().unwrap();
    let out = work.path().join("exact");
    let o = cubemix(&["exact-corner", "decay", "--mode", "quotient", "--max-n", "22", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("first n with TV <= 0.25 is 19"), "{err}");
    let t = std::fs::read_to_string(out.join("thresholds_full.csv")).unwrap();
    assert!(t.contains("0.25,19\n"), "{t}");
}
