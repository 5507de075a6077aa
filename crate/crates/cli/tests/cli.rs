use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use food_core::{canonicalize, corpus, desugar, parse, pretty};

fn food(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_food"))
        .args(args)
        .env_remove("FOOD_FUEL")
        .output()
        .expect("binary runs")
}

fn food_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_food"))
        .args(args)
        .env_remove("FOOD_FUEL")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn canonical_text(src: &str) -> String {
    pretty(&canonicalize(&desugar(&parse(src).unwrap()))).unwrap()
}

#[test]
fn transform_prints_the_functional_sets() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "sets_oop.food", corpus::SETS_OOP);
    let o = food(&["transform", f.to_str().unwrap(), "--types", "Set"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), canonical_text(corpus::SETS_FP));
    assert!(o.stderr.is_empty());
}

#[test]
fn transform_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "exp.food", corpus::EXP_FP);
    let out = dir.path().join("out.food");
    let o = food(&["transform", f.to_str().unwrap(), "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap(), canonical_text(corpus::EXP_OOP));
}

#[test]
fn transform_reads_standard_input() {
    let o = food_stdin(&["transform", "-", "--types", "Set"], corpus::SETLIST_OOP);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), canonical_text(corpus::SETLIST_SET_FP));
}

#[test]
fn unknown_type_is_a_pipeline_error() {
    let o = food_stdin(&["transform", "-", "--types", "Nope"], corpus::SETS_OOP);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("Nope"));
    assert!(o.stdout.is_empty());
}

#[test]
fn roundtrip_of_golden_programs_is_clean() {
    for (name, src) in corpus::ALL {
        let o = food_stdin(&["roundtrip", "-"], src);
        assert_eq!(o.status.code(), Some(0), "{name}: {}{}", stdout(&o), stderr(&o));
        assert!(o.stdout.is_empty(), "{name}");
    }
}

#[test]
fn eval_prints_the_value() {
    let o = food_stdin(&["eval", "-"], corpus::BOOL_FP_CTX);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "obj(ValOr, obj(ValNegVar, 1), obj(ValOr, obj(ValPosVar, 2), obj(ValNegVar, 3)))\n"
    );
}

#[test]
fn eval_missing_file_fails() {
    let o = food(&["eval", "nosuch.food"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("nosuch.food: "));
}

#[test]
fn fuel_comes_from_flag_or_environment() {
    let o = food_stdin(&["eval", "-", "--fuel", "3"], corpus::SETS_OOP);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "fuel exhausted after 3 steps\n");
    let mut c = Command::new(env!("CARGO_BIN_EXE_food"));
    let dir = tempfile::tempdir().unwrap();
    let f = write(&dir, "s.food", corpus::SETS_OOP);
    let o = c
        .args(["eval", f.to_str().unwrap()])
        .env("FOOD_FUEL", "4")
        .output()
        .unwrap();
    assert_eq!(stdout(&o), "fuel exhausted after 4 steps\n");
}

#[test]
fn check_prints_type_or_diagnostics() {
    let o = food_stdin(&["check", "-"], corpus::EXP_OOP);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "Int\n".to_string()));
    let o = food_stdin(
        &["check", "-"],
        "data D\ncase A() extends D\ndef f(self: D)(): Int = match {\n}\nf(A())()",
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("<stdin>:"), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn ctx_dump_is_sorted_and_stable() {
    let a = food_stdin(&["ctx", "-"], corpus::SETS_OOP);
    let b = food_stdin(&["ctx", "-"], corpus::SETS_OOP);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(
        stdout(&a).contains("dtr(Set) = [isEmpty, contains, insert, union]"),
        "{}",
        stdout(&a)
    );
}

#[test]
fn trace_numbers_steps_and_honours_limit() {
    let o = food_stdin(&["trace", "-", "--limit", "2"], corpus::SETS_OOP);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    assert!(lines[0].starts_with("0: new Insert"));
    assert!(lines[2].starts_with("2: "));
    assert_eq!(lines[3], "stopped at the limit of 2 steps");
    let full = food_stdin(&["trace", "-"], "1 + 2 * 3");
    assert_eq!(stdout(&full), "0: 1 + 2 * 3\n1: 1 + 6\n2: 7\n");
}

#[test]
fn fuzz_reports_json_lines() {
    let o = food(&["fuzz", "--trials", "5", "--seed", "9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[5]["passed"], true);
}

#[test]
fn fuzz_fails_on_a_broken_transformer() {
    let o = food(&[
        "fuzz",
        "--trials",
        "5",
        "--seed",
        "9",
        "--mutant",
        "OffByOne",
        "--no-shrink",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"passed\":false"));
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        &["bogus"][..],
        &["eval"],
        &["fuzz", "--trials", "x"],
        &["eval", "-", "--nope"],
    ] {
        let o = food(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn version_flag() {
    let o = food(&["--version"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("food "));
}
