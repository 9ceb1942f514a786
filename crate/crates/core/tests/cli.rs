use std::path::PathBuf;
use std::process::{Command, Output};

use revtree::Certificate;

fn revtree(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revtree"))
        .args(args)
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("revtree-{}-{name}", std::process::id()));
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn classify_exit_codes() {
    let o = revtree(&["classify", "kary(2, w)"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("reversible"));
    assert_eq!(code(&revtree(&["classify", "kary(w, w)"])), 10);
    assert_eq!(
        code(&revtree(&[
            "classify",
            "union{ w: kary(2, 3), w: kary(3, 2) }"
        ])),
        20
    );
    assert_eq!(code(&revtree(&["classify", "kary(2,"])), 1);
}

#[test]
fn classify_json_is_a_certificate() {
    let o = revtree(&[
        "classify",
        "union{ w: chain(1), w: chain(2) }",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 10);
    let text = stdout(&o);
    let c = Certificate::from_json(&text).unwrap();
    assert_eq!(c.to_json().trim(), text.trim());
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["expr", "verdict", "trace", "witness", "unknown_reasons"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["verdict"], "non-reversible");
    assert_eq!(v["trace"][0]["citation"], "Fact 1.3");
    assert!(text.contains("Fact 1.2"));
    assert_eq!(v["witness"]["kind"], "merge_plan");
}

#[test]
fn window_flags_need_verification() {
    assert_eq!(code(&revtree(&["classify", "delta(w)", "--depth", "3"])), 1);
    let o = revtree(&[
        "classify",
        "delta(w)",
        "--verify-witness",
        "--depth",
        "4",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 10);
    assert!(stdout(&o).contains("\"witness_verification\""));
}

#[test]
fn witness_verify_reports_a_pass() {
    let o = revtree(&[
        "witness-verify",
        "delta(w)",
        "--zrange",
        "4",
        "--depth",
        "6",
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(
        out.contains("PASS") && out.contains("height raise"),
        "{out}"
    );
    assert_eq!(
        code(&revtree(&[
            "witness-verify",
            "union{ w: chain(1), w: chain(2) }"
        ])),
        0
    );
    assert_eq!(code(&revtree(&["witness-verify", "kary(2, w)"])), 20);
}

#[test]
fn cross_check_flag() {
    let o = revtree(&["classify", "union{ w: kary(2, w) }", "--cross-check"]);
    assert_eq!(code(&o), 10);
    assert!(String::from_utf8_lossy(&o.stderr).contains("cross-check"));
}

#[test]
fn seq_and_wellu_checks() {
    assert_eq!(code(&revtree(&["seq-check", "seq{ 1: w, 2: w }"])), 10);
    assert_eq!(code(&revtree(&["seq-check", "seq{ 2: w, 3: w }"])), 0);
    assert_eq!(code(&revtree(&["seq-check", "seq{ 0: w }"])), 1);
    let five = "wfam{ w: 1, (w + 4): w, (w + 6): w ; tail 1 step 1 ; tail (w + 1) step 2 }";
    assert_eq!(code(&revtree(&["wellu-check", five])), 0);
    assert_eq!(code(&revtree(&["wellu-check", "union{ w: chain(w) }"])), 10);
    assert_eq!(code(&revtree(&["wellu-check", "kary(2, w)"])), 1);
}

#[test]
fn corpus_command() {
    let o = revtree(&["corpus"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let bad = temp_file(
        "bad.corpus",
        "kary(2, w) ⟹ reversible\nkary(w, w) ⟹ reversible\n",
    );
    let o = revtree(&["corpus", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL line 2"));
    let empty = temp_file("empty.corpus", "");
    let o = revtree(&["corpus", empty.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("0 passed, 0 failed"));
    assert_eq!(code(&revtree(&["corpus", "/nonexistent/file"])), 1);
    let _ = std::fs::remove_file(bad);
    let _ = std::fs::remove_file(empty);
}

#[test]
fn exit_codes_match_the_corpus() {
    let (cases, _) = revtree::corpus::parse_corpus(revtree::corpus::REFERENCE_CORPUS);
    for case in cases {
        let expected = match case.expected {
            revtree::Verdict::Reversible => 0,
            revtree::Verdict::NonReversible => 10,
            revtree::Verdict::Unknown => 20,
        };
        assert_eq!(
            code(&revtree(&["classify", &case.expr])),
            expected,
            "{}",
            case.expr
        );
    }
}

#[test]
fn input_from_a_file_and_parse() {
    let p = temp_file("expr.txt", "root(delta(w))\n");
    assert_eq!(code(&revtree(&["classify", p.to_str().unwrap()])), 10);
    let _ = std::fs::remove_file(p);
    let o = revtree(&[
        "parse",
        "union{ 2: chain(1), 1: chain(1) }",
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["normalized"], "union{ 3: chain(1) }");
    assert_eq!(v["height"], "1");
}
