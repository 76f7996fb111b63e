use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const WORKED: &str = "meander v1
n 3
s0 +
perm 3 2 1
face arc:0 1/8
face arc:1 1/16
face arc:2 1/8
face arc:3 1/8
face outer:+ 1/4
face outer:- 5/16
";

fn meander(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_meander")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn fixture(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn index_of_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture(dir.path(), "w.meander", WORKED);
    let o = meander(&["index", &f]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("mu 0 -1 0\n"));
    assert!(out.contains("gap 1\n"));
}

#[test]
fn interleaving_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture(dir.path(), "bad.meander", &WORKED.replace("perm 3 2 1", "perm 2 1 3"));
    let o = meander(&["validate", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("interleave"));
}

#[test]
fn malformed_input_never_panics() {
    let dir = tempfile::tempdir().unwrap();
    for (i, text) in ["", "meander v1\nn x\n", "meander v1\nperm 1\n", "garbage", "meander v1\nn 1\ns0 +\nperm 1\nface arc:0 1/0\n"]
        .iter()
        .enumerate()
    {
        let f = fixture(dir.path(), &format!("m{i}"), text);
        for cmd in ["validate", "index", "faces", "untangle"] {
            assert_eq!(meander(&[cmd, &f]).status.code(), Some(1), "{cmd} on {text:?}");
        }
    }
}

#[test]
fn missing_file_is_an_io_error() {
    assert_eq!(meander(&["index", "/nonexistent/x.meander"]).status.code(), Some(3));
}

#[test]
fn untangle_with_trace() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture(dir.path(), "w.meander", WORKED);
    let trace = dir.path().join("trace");
    let o = meander(&["untangle", &f, "--trace", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.starts_with("certificate v1\n"));
    assert!(out.ends_with("verdict pass\n"));
    assert_eq!(fs::read_to_string(trace.join("certificate.txt")).unwrap(), out);
    assert_eq!(fs::read_to_string(trace.join("input.meander")).unwrap(), WORKED);
    assert_eq!(meander(&["untangle", &f]).stdout, o.stdout);
}

#[test]
fn enumeration_and_its_cap() {
    let o = meander(&["enumerate", "--n", "3", "--s0", "+"]);
    assert_eq!(stdout(&o), "1 2 3 +\n3 2 1 +\n");
    let o = Command::new(env!("CARGO_BIN_EXE_meander"))
        .args(["enumerate", "--n", "5", "--s0", "-"])
        .env("MEANDER_MAX_N", "4")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(meander(&["enumerate", "--n", "3", "--s0", "x"]).status.code(), Some(1));
}

#[test]
fn small_verify_run() {
    let o = meander(&["verify", "--max-n", "3", "--areas-per-shape", "2", "--seed", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("total failures 0"));
    assert_eq!(meander(&["verify", "--max-n", "3", "--areas-per-shape", "2", "--seed", "1"]).stdout, o.stdout);
}

#[test]
fn render_writes_svg() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture(dir.path(), "w.meander", WORKED);
    let out = dir.path().join("w.svg");
    let o = meander(&["render", &f, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let svg = fs::read_to_string(&out).unwrap();
    assert_eq!(svg.matches("<path ").count(), 4);
    assert_eq!(svg.matches("class=\"crossing\"").count(), 3);
    assert!(svg.contains("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\""));
}

#[test]
fn stamp_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let f = fixture(dir.path(), "w.meander", WORKED);
    assert!(!stdout(&meander(&["index", &f])).contains("generated"));
    assert!(stdout(&meander(&["index", &f, "--stamp"])).contains("# generated"));
}
