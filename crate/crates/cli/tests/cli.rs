use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rumple::io::{format_mag, parse_mag};
use rumple::Magma;

struct Scratch(PathBuf);

impl Scratch {
    fn new(tag: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("rumple-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, text: &str) -> PathBuf {
        let p = self.0.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn path(&self, name: &str) -> PathBuf {
        self.0.join(name)
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rumple")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const X41: &str = "magma 4\n0 1 3 2\n2 3 1 0\n1 0 2 3\n3 2 0 1\n";

#[test]
fn verify_exit_codes() {
    let dir = Scratch::new("verify");
    let good = dir.file("x41.mag", X41);
    let z3 = dir.file("z3.mag", &format_mag(&Magma::cyclic_group(3)));
    let range = dir.file("range.mag", "magma 2\n0 5\n1 1\n");
    let header = dir.file("header.mag", "4\n0 1\n");

    assert_eq!(run(&["verify", s(&good)]).status.code(), Some(0));
    assert_eq!(run(&["verify", s(&z3)]).status.code(), Some(1));
    assert_eq!(run(&["verify", s(&range)]).status.code(), Some(2));
    assert_eq!(run(&["verify", s(&header)]).status.code(), Some(2));
    assert_eq!(run(&["verify", s(&dir.path("missing.mag"))]).status.code(), Some(2));
}

#[test]
fn verify_json_report() {
    let dir = Scratch::new("report");
    let good = dir.file("x41.mag", X41);
    let out = run(&["verify", s(&good), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["rumple", "latin", "both_sided", "affine", "yb_round_trip", "biquandle"] {
        assert_eq!(v[key], true, "{key}");
    }
    assert_eq!(v["rack"], false);
    assert_eq!(v["dis"]["order"], 4);
}

#[test]
fn enumerate_outputs() {
    let out = run(&["enumerate", "--order", "4", "--count-only"]);
    assert_eq!(stdout(&out).trim(), "23");
    let out = run(&["enumerate", "--order", "4", "--count-only", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["count"], 23);
    let out = run(&["enumerate", "--order", "3", "--json"]);
    let tables: Vec<serde_json::Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(tables.len(), 5);
    assert!(tables.iter().all(|t| t["order"] == 3));
    assert_eq!(run(&["enumerate", "--order", "9"]).status.code(), Some(2));
    assert_eq!(run(&["enumerate", "--order", "12", "--latin"]).status.code(), Some(2));
}

#[test]
fn enumerate_writes_records() {
    let dir = Scratch::new("enum");
    let out = dir.path("order3.jsonl");
    assert!(run(&["enumerate", "--order", "3", "--out", s(&out)]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    let tables: Vec<Magma> = text
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            let rows: Vec<Vec<usize>> = serde_json::from_value(v["table"].clone()).unwrap();
            Magma::from_table(3, &rows).unwrap()
        })
        .collect();
    assert_eq!(tables.len(), 5);
    assert!(tables.iter().all(Magma::is_rumple));
}

#[test]
fn table_transformations_round_trip() {
    let dir = Scratch::new("mag");
    let x = dir.file("x41.mag", X41);
    let opp = dir.path("opp.mag");
    let back = dir.path("back.mag");
    assert!(run(&["opposite", s(&x), "--out", s(&opp)]).status.success());
    assert!(run(&["opposite", s(&opp), "--out", s(&back)]).status.success());
    assert_eq!(parse_mag(&std::fs::read_to_string(&back).unwrap()).unwrap(), parse_mag(X41).unwrap());

    let dual = run(&["dual", s(&x)]);
    assert!(parse_mag(&stdout(&dual)).unwrap().is_rumple());
    let iso = run(&["isotope", s(&x), "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&iso)).unwrap();
    assert_eq!(v["order"], 4);
    let bad = dir.file("proj.mag", "magma 2\n0 1\n0 1\n");
    assert_eq!(run(&["isotope", s(&bad)]).status.code(), Some(1));
}

#[test]
fn yang_baxter_round_trip() {
    let dir = Scratch::new("yb");
    let x = dir.file("x41.mag", X41);
    let sol = dir.path("x41.json");
    let back = dir.path("back.mag");
    assert!(run(&["yb", "from", s(&x), "--out", s(&sol)]).status.success());
    assert_eq!(run(&["yb", "check", s(&sol)]).status.code(), Some(0));
    assert!(run(&["yb", "to", s(&sol), "--out", s(&back)]).status.success());
    assert_eq!(parse_mag(&std::fs::read_to_string(&back).unwrap()).unwrap(), parse_mag(X41).unwrap());
    let z3 = dir.file("z3.mag", &format_mag(&Magma::cyclic_group(3)));
    assert_eq!(run(&["yb", "from", s(&z3)]).status.code(), Some(1));
}

#[test]
fn affine_commands() {
    let dir = Scratch::new("affine");
    let out = run(&["affine", "enumerate", "--group", "3,3,3", "--count-only"]);
    assert_eq!(stdout(&out).trim(), "6");
    assert_eq!(run(&["affine", "enumerate", "--group", "2,x"]).status.code(), Some(2));

    let listing = stdout(&run(&["affine", "enumerate", "--group", "2,2"]));
    let data: Vec<&str> = listing.lines().collect();
    assert_eq!(data.len(), 2);
    let a = dir.file("a.json", data[0]);
    let b = dir.file("b.json", data[1]);
    assert_eq!(run(&["affine", "check", s(&a)]).status.code(), Some(0));
    assert_eq!(run(&["affine", "isomorphic", s(&a), s(&a)]).status.code(), Some(0));
    assert_eq!(run(&["affine", "isomorphic", s(&a), s(&b)]).status.code(), Some(1));

    let x = dir.file("x41.mag", X41);
    let datum = dir.path("x41.json");
    assert!(run(&["affinize", s(&x), "--out", s(&datum)]).status.success());
    assert_eq!(run(&["affine", "check", s(&datum)]).status.code(), Some(0));
}

#[test]
fn extension_commands() {
    let dir = Scratch::new("extend");
    let x = dir.file("x41.mag", X41);
    let table = dir.path("k.mag");
    let out = run(&["extend", "klein", s(&x), "--out", s(&table)]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["factors"], serde_json::json!([2, 2]));
    let m = parse_mag(&std::fs::read_to_string(&table).unwrap()).unwrap();
    assert_eq!(m.order(), 16);
    assert!(m.is_latin_rumple());
    assert_eq!(run(&["verify", s(&table)]).status.code(), Some(0));
    let z3 = dir.file("z3.mag", &format_mag(&Magma::cyclic_group(3)));
    assert_ne!(run(&["extend", "klein", s(&z3)]).status.code(), Some(0));
}
