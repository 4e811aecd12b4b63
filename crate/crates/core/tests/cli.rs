//! End-to-end runs of the `obdarew` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(rel)
}

fn obdarew(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obdarew"))
        .args(args)
        .current_dir(fixture(""))
        .output()
        .expect("binary runs")
}

fn rewrite_bank(out: &Path) -> Output {
    obdarew(&[
        "rewrite",
        "--tbox",
        "bank/bank.tbox",
        "--mapping",
        "bank/bank.mapping",
        "--schema",
        "bank/bank.schema",
        "--lowlevel",
        "bank/bank.views",
        "--out",
        out.to_str().unwrap(),
    ])
}

fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn rewrite_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(rewrite_bank(&a).status.success());
    assert!(rewrite_bank(&b).status.success());
    let (da, db) = (dir_contents(&a), dir_contents(&b));
    let names: Vec<&str> = da.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(
        names,
        [
            "manifest.json",
            "mapping.hl",
            "mapping.sql.txt",
            "tbox.dllite"
        ]
    );
    assert_eq!(da, db);
}

#[test]
fn rewrite_matches_goldens_and_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = rewrite_bank(tmp.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("rewriting:"));
    for f in ["tbox.dllite", "mapping.hl", "mapping.sql.txt"] {
        let golden = fs::read_to_string(fixture(&format!("bank/golden/{f}"))).unwrap();
        assert_eq!(
            fs::read_to_string(tmp.path().join(f)).unwrap(),
            golden,
            "{f}"
        );
    }
    let m: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(m["command"], "rewrite");
    assert_eq!(m["label"], "rewriting");
    assert_eq!(m["input_digests"].as_object().unwrap().len(), 4);
}

#[test]
fn rewritten_bank_is_inseparable_from_the_input() {
    let tmp = tempfile::tempdir().unwrap();
    let rw = tmp.path().join("rw");
    assert!(rewrite_bank(&rw).status.success());
    let report = tmp.path().join("insep");
    let out = obdarew(&[
        "check-insep",
        "--tbox1",
        "bank/bank.tbox",
        "--mapping1",
        "bank/bank.mapping",
        "--tbox2",
        rw.join("tbox.dllite").to_str().unwrap(),
        "--mapping2",
        rw.join("mapping.hl").to_str().unwrap(),
        "--schema",
        "bank/bank.schema",
        "--facts",
        "bank/bank.facts",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(report.join("report.txt")).unwrap();
    assert!(text.ends_with("verdict: equal\n"), "{text}");
}

#[test]
fn eval_reads_a_rewritten_specification() {
    let tmp = tempfile::tempdir().unwrap();
    let rw = tmp.path().join("rw");
    let out = obdarew(&[
        "rewrite",
        "--tbox",
        "conjunction/conjunction.tbox",
        "--mapping",
        "conjunction/conjunction.mapping",
        "--schema",
        "conjunction/conjunction.schema",
        "--out",
        rw.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let ans = tmp.path().join("ans");
    let out = obdarew(&[
        "eval",
        "--tbox",
        rw.join("tbox.dllite").to_str().unwrap(),
        "--mapping",
        rw.join("mapping.hl").to_str().unwrap(),
        "--schema",
        "conjunction/conjunction.schema",
        "--facts",
        "conjunction/conjunction.facts",
        "--queries",
        "conjunction/conjunction.queries",
        "--out",
        ans.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = fs::read_to_string(ans.join("answers.txt")).unwrap();
    assert!(text.contains("(a)"), "{text}");
}

#[test]
fn unreadable_input_exits_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = obdarew(&[
        "rewrite",
        "--tbox",
        "bank/missing.tbox",
        "--mapping",
        "bank/bank.mapping",
        "--schema",
        "bank/bank.schema",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn exceeding_the_cap_exits_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    let prog = tmp.path().join("rec.dl");
    fs::write(&prog, "P(x) :- E(x).\nP(x) :- R(x,y), P(y).\n").unwrap();
    let out = obdarew(&[
        "expand",
        "--program",
        prog.to_str().unwrap(),
        "--predicate",
        "P",
        "--k",
        "6",
        "--oracle",
        "unknown",
        "--cap",
        "3",
        "--out",
        tmp.path().join("x").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn expand_writes_cut_expansions() {
    let tmp = tempfile::tempdir().unwrap();
    let prog = tmp.path().join("rec.dl");
    fs::write(&prog, "P(x) :- E(x).\nP(x) :- R(x,y), P(y).\n").unwrap();
    let out_dir = tmp.path().join("x");
    let out = obdarew(&[
        "expand",
        "--program",
        prog.to_str().unwrap(),
        "--predicate",
        "P",
        "--k",
        "3",
        "--oracle",
        "unknown",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert_eq!(
        fs::read_to_string(out_dir.join("expansions.txt")).unwrap(),
        "q(x) :- E(x)\nq(x) :- E(y), R(x,y)\nq(x) :- E(y), R(x,z), R(z,y)\n"
    );
}
