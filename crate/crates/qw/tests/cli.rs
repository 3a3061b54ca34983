//! End-to-end coverage of the `qw` subcommands: outputs, exit codes, file
//! formats, and byte-level determinism.

use std::path::PathBuf;

use qw::cli::run_with;

const SIG_UT2: &str = r#"
{ "constructors": [ {"name": "leaf", "arity": 0}, {"name": "node", "arity": 2} ],
  "equations": { "families": [ {"kind": "symmetric", "constructor": "node"} ] } }
"#;

const SIG_HF2: &str = r#"
{ "constructors": [ {"name": "empty", "arity": 0}, {"name": "pair", "arity": 2} ],
  "equations": { "families": [ {"kind": "all-image-preserving"} ] } }
"#;

const SIG_BAD_EQ: &str = r#"
{ "constructors": [ {"name": "leaf", "arity": 0}, {"name": "node", "arity": 2} ],
  "equations": { "explicit": [ {"vars": 2,
                                "left": {"constructor": "node", "map": [0,0]},
                                "right": {"constructor": "node", "map": [0,1]}} ] } }
"#;

const ALG_OR: &str = r#"{ "carrier": 2, "ops": { "leaf": 0, "node": [[0,1],[1,1]] } }"#;
const ALG_PROJ: &str = r#"{ "carrier": 2, "ops": { "leaf": 0, "node": [[0,0],[1,1]] } }"#;

struct Fixture {
    dir: tempfile::TempDir,
}

impl Fixture {
    fn new() -> Self {
        Fixture {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn file(&self, name: &str, contents: &str) -> PathBuf {
        let path = self.dir.path().join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }
}

fn qw(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("qw").chain(args.iter().copied());
    let code = run_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn validate_ok_and_json_envelope() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let (code, out, _) = qw(&["validate", sig.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "ok: 2 constructors, 0 explicit equations, 1 families\n"
    );

    let (code, out, _) = qw(&["validate", sig.to_str().unwrap(), "--format", "json"]);
    assert_eq!(code, 0);
    let doc: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(doc["command"], "validate");
    assert_eq!(doc["result"]["constructors"], 2);
    assert!(doc["stats"].is_object());
}

#[test]
fn validate_bad_equation_exits_two_and_names_it() {
    let fx = Fixture::new();
    let sig = fx.file("bad.json", SIG_BAD_EQ);
    let (code, _, err) = qw(&["validate", sig.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("equation #0"), "{err}");
    assert!(err.contains("not image preserving"), "{err}");
}

#[test]
fn stages_counts_line() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let (code, out, _) = qw(&["stages", sig.to_str().unwrap(), "--depth", "4", "--counts"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0 1 2 4 11\n");

    let hf = fx.file("hf.json", SIG_HF2);
    let (code, out, _) = qw(&["stages", hf.to_str().unwrap(), "--depth", "4", "--counts"]);
    assert_eq!(code, 0);
    assert_eq!(out, "0 1 2 4 11\n");
}

#[test]
fn stages_class_table_and_determinism() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let args = ["stages", sig.to_str().unwrap(), "--depth", "3"];
    let (code, first, _) = qw(&args);
    assert_eq!(code, 0);
    assert!(first.starts_with("sizes: 0 1 2 4\n"));
    assert!(first.contains("class 0: rank 0, leaf(), image {}"));
    let (_, second, _) = qw(&args);
    assert_eq!(first, second, "byte-identical reruns");
}

#[test]
fn eq_decides_both_ways() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let (code, out, _) = qw(&[
        "eq",
        sig.to_str().unwrap(),
        "(node (leaf) (node (leaf) (leaf)))",
        "(node (node (leaf) (leaf)) (leaf))",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "equal\n");
    let (code, out, _) = qw(&[
        "eq",
        sig.to_str().unwrap(),
        "(node (leaf) (leaf))",
        "(leaf)",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "not equal\n");
}

#[test]
fn term_file_argument() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let term = fx.file("term.sexp", "(node (leaf) (leaf))");
    let arg = format!("@{}", term.to_str().unwrap());
    let (code, out, _) = qw(&["rank", sig.to_str().unwrap(), &arg]);
    assert_eq!(code, 0);
    assert_eq!(out, "1\n");
}

#[test]
fn canon_outputs() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let (code, out, _) = qw(&[
        "canon",
        sig.to_str().unwrap(),
        "(node (node (leaf) (leaf)) (leaf))",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "(node (leaf) (node (leaf) (leaf)))\n");

    let hf = fx.file("hf.json", SIG_HF2);
    let (code, out, _) = qw(&[
        "canon",
        hf.to_str().unwrap(),
        "(pair (empty) (pair (empty) (empty)))",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "{∅,{∅}}\n");
}

#[test]
fn rank_tc_rn_fsurj() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let term = "(node (leaf) (node (leaf) (leaf)))";
    let (code, out, _) = qw(&["rank", sig.to_str().unwrap(), term]);
    assert_eq!(code, 0);
    assert_eq!(out, "2\n");

    let (code, out, _) = qw(&["tc", sig.to_str().unwrap(), term]);
    assert_eq!(code, 0);
    assert_eq!(out, "{0, 1}\n");

    let (code, out, _) = qw(&["rn", sig.to_str().unwrap(), term, "--n", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "{0, 1}\n");
    let (code, out, _) = qw(&["rn", sig.to_str().unwrap(), term, "--n", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out, "{}\n");

    let (code, out, _) = qw(&["fsurj", sig.to_str().unwrap(), term, "--n", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "b1,value\n0,0\n1,1\n2,0\n");
}

#[test]
fn fold_term_and_table() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let alg = fx.file("alg.json", ALG_OR);
    let (code, out, _) = qw(&[
        "fold",
        sig.to_str().unwrap(),
        "--algebra",
        alg.to_str().unwrap(),
        "(node (leaf) (leaf))",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "0\n");

    let (code, out, _) = qw(&[
        "fold",
        sig.to_str().unwrap(),
        "--algebra",
        alg.to_str().unwrap(),
        "--depth",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "0 0\n1 0\n");
}

#[test]
fn check_algebra_paths() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let good = fx.file("good.json", ALG_OR);
    let bad = fx.file("bad.json", ALG_PROJ);
    let (code, out, _) = qw(&[
        "check-algebra",
        sig.to_str().unwrap(),
        "--algebra",
        good.to_str().unwrap(),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out, "satisfied\n");

    let (code, _, err) = qw(&[
        "check-algebra",
        sig.to_str().unwrap(),
        "--algebra",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("does not satisfy"), "{err}");

    let (code, _, err) = qw(&["check-algebra", sig.to_str().unwrap()]);
    assert_eq!(code, 1, "{err}");
}

#[test]
fn check_algebra_random_respects_seed_env() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let (code, out, _) = qw(&[
        "check-algebra",
        sig.to_str().unwrap(),
        "--random",
        "5",
        "--carrier",
        "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "generated 5 satisfying algebras (carrier <= 2, seed 0)\n"
    );

    std::env::set_var("QW_SEED", "17");
    let (code, out, _) = qw(&[
        "check-algebra",
        sig.to_str().unwrap(),
        "--random",
        "5",
        "--carrier",
        "2",
    ]);
    std::env::remove_var("QW_SEED");
    assert_eq!(code, 0);
    assert_eq!(
        out,
        "generated 5 satisfying algebras (carrier <= 2, seed 17)\n"
    );
}

#[test]
fn hf_enum_lists_sets() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_HF2);
    let (code, out, _) = qw(&["hf-enum", sig.to_str().unwrap(), "--max-rank", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out, "∅\n{∅}\n{∅,{∅}}\n{{∅}}\n");
    let (code, out, _) = qw(&["hf-enum", sig.to_str().unwrap(), "--max-rank", "3"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 11);
}

#[test]
fn crosscheck_and_export_dot() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let (code, out, _) = qw(&["crosscheck", sig.to_str().unwrap(), "--depth", "4"]);
    assert_eq!(code, 0);
    assert_eq!(out, "partitions agree on 26 terms: counts 1 2 4 11\n");

    let (code, out, _) = qw(&["export-dot", sig.to_str().unwrap(), "--depth", "2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph stages {\n"));
    assert!(out.contains("c1 [label=\"1:1\"];"));
    assert!(out.contains("c1 -> c0;"));
}

#[test]
fn cap_exhaustion_exits_three() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let (code, _, err) = qw(&[
        "stages",
        sig.to_str().unwrap(),
        "--depth",
        "4",
        "--max-classes",
        "3",
    ]);
    assert_eq!(code, 3);
    assert!(err.contains("cap exceeded"), "{err}");
}

#[test]
fn usage_errors_exit_one() {
    let (code, _, _) = qw(&["no-such-command"]);
    assert_eq!(code, 1);
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_UT2);
    let (code, _, _) = qw(&["stages", sig.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(code, 1);
    let (code, _, _) = qw(&["rn", sig.to_str().unwrap(), "(leaf)", "--n", "0"]);
    assert_eq!(code, 1);
    // Missing file is an I/O problem, also exit 1.
    let (code, _, _) = qw(&["validate", "/nonexistent/sig.json"]);
    assert_eq!(code, 1);
}

#[test]
fn help_exits_zero() {
    let (code, out, _) = qw(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("stages"));
    assert!(out.contains("export-dot"));
}

#[test]
fn json_mode_is_deterministic_and_schema_stable() {
    let fx = Fixture::new();
    let sig = fx.file("sig.json", SIG_HF2);
    let args = [
        "stages",
        sig.to_str().unwrap(),
        "--depth",
        "4",
        "--format",
        "json",
    ];
    let (code, first, _) = qw(&args);
    assert_eq!(code, 0);
    let (_, second, _) = qw(&args);
    assert_eq!(first, second);
    let doc: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(doc["command"], "stages");
    assert_eq!(doc["result"]["sizes"], serde_json::json!([0, 1, 2, 4, 11]));
    assert_eq!(doc["stats"]["classes"], 11);
    assert_eq!(doc["stats"]["depth"], 4);
}
