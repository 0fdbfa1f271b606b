use std::process::Command;

use serde_json::Value;

fn run(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_bdcover")).args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8(out.stdout).expect("utf-8"))
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, out) = run(args);
    (code, serde_json::from_str(&out).expect("report is JSON"))
}

fn check<'a>(doc: &'a Value, name: &str) -> &'a Value {
    doc["results"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap_or_else(|| panic!("no check {name}"))
}

fn without_timestamp(mut doc: Value) -> Value {
    doc.as_object_mut().unwrap().remove("timestamp");
    doc
}

#[test]
fn square_theorem_for_so4() {
    let (code, doc) = report(&["square", "--family", "D", "--rank", "2", "--a", "2", "--k", "1", "--n", "1"]);
    assert_eq!(code, 0);
    assert!(doc["results"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    assert_eq!(doc["command"], "square");
}

#[test]
fn sp2_over_f2_has_two_orbits() {
    let (code, doc) = report(&["orbits", "--family", "C", "--m", "1", "--k", "1", "--q", "2"]);
    assert_eq!(code, 0);
    let orbits = check(&doc, "orbits")["payload"].as_array().unwrap();
    assert_eq!(orbits.len(), 2);
    let mut sizes: Vec<u64> = orbits.iter().map(|o| o["size"].as_u64().unwrap()).collect();
    sizes.sort();
    assert_eq!(sizes, [6, 9]);
}

#[test]
fn hilbert_symbol_of_two_and_five() {
    let (code, doc) = report(&["symbols", "--field", "Qp:5", "--n", "4", "--hilbert", "2", "5"]);
    assert_eq!(code, 0);
    assert_eq!(check(&doc, "hilbert")["payload"]["index"], 1);
}

#[test]
fn residue_over_q_and_f7() {
    let (_, doc) = report(&["symbols", "--field", "Q", "--residue", "[1]*t^1", "[2,1]"]);
    assert_eq!(check(&doc, "residue")["payload"]["value"], "1/2");
    let (_, doc) = report(&["symbols", "--field", "Fq:7", "--residue", "[3]*t^2", "[1,1]*t^-1"]);
    assert_eq!(check(&doc, "residue")["payload"]["value"], "5");
}

#[test]
fn torus_commutators_follow_the_form() {
    let (code, doc) =
        report(&["symbols", "--field", "Qp:5", "--n", "4", "--torus-commutator", "2", "5", "--diag", "1,1", "--offdiag", "2"]);
    assert_eq!(code, 0);
    assert_eq!(check(&doc, "torus_commutator")["status"], "pass");
}

#[test]
fn precision_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_bdcover"))
        .args(["symbols", "--field", "Q", "--residue", "[1,1]", "[1]*t^-1"])
        .env("BDCOVER_PRECISION", "30")
        .output()
        .unwrap();
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["parameters"]["precision"], 30);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["qform", "--family", "B", "--rank", "2", "--a", "1"]).0, 1);
    assert_eq!(run(&["qform", "--family", "B", "--rank", "2", "--a", "2"]).0, 0);
    assert_eq!(run(&["orbits", "--family", "C", "--m", "1", "--k", "1", "--q", "3", "--max-states", "10"]).0, 1);
    assert_eq!(run(&["orbits", "--family", "X", "--m", "1", "--k", "1", "--q", "2"]).0, 2);
    assert_eq!(run(&["symbols", "--field", "Qp:5", "--n", "3", "--hilbert", "2", "5"]).0, 2);
    assert_eq!(run(&["symbols", "--field", "Qp:5", "--n", "4"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn reports_are_reproducible() {
    let a = report(&["lemmas", "--seed", "3", "--jobs", "1"]).1;
    let b = report(&["lemmas", "--seed", "3", "--jobs", "4"]).1;
    assert_eq!(a["results"], b["results"]);
    let a = report(&["orbits", "--family", "C", "--m", "1", "--k", "1", "--q", "3", "--jobs", "1"]).1;
    let b = report(&["orbits", "--family", "C", "--m", "1", "--k", "1", "--q", "3", "--jobs", "1"]).1;
    assert_eq!(without_timestamp(a.clone()), without_timestamp(b));
    let c = report(&["orbits", "--family", "C", "--m", "1", "--k", "1", "--q", "3", "--jobs", "3"]).1;
    assert_eq!(a["results"], c["results"]);
}

#[test]
fn lemma_suite_passes() {
    let (code, doc) = report(&["lemmas"]);
    assert_eq!(code, 0, "{doc:#}");
}

#[test]
fn tsv_has_one_row_per_orbit() {
    let (_, out) = run(&["orbits", "--family", "C", "--m", "1", "--k", "1", "--q", "2", "--tsv"]);
    assert!(out.starts_with("check\tstatus\tpayload\n"));
    assert_eq!(out.lines().filter(|l| l.starts_with("orbits\t")).count(), 2);
}

#[test]
fn root_datum_report() {
    let (code, doc) = report(&["rootdatum", "--family", "C", "--rank", "2"]);
    assert_eq!(code, 0);
    assert_eq!(check(&doc, "weyl_order")["payload"], 8);
    assert_eq!(check(&doc, "datum")["payload"]["roots"].as_array().unwrap().len(), 8);
}
