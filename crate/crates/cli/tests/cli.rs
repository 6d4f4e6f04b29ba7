use std::path::PathBuf;
use std::process::{Command, Output};

fn data() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_restrule"))
        .args(args)
        .current_dir(data())
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn decide_emits_a_checkable_proof() {
    let proof = scratch("decide_proof.json");
    let p = proof.to_str().unwrap();
    let o = run(&[
        "decide",
        "--structure",
        "data/a2.struct",
        "--theta",
        "data/thetas.thy",
        "--sentence",
        "forall x . exists y . (x<y | y<x)",
        "--emit-proof",
        p,
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("verdict: PROVED\n"));
    let c = run(&[
        "check-proof",
        p,
        "--structure",
        "data/a2.struct",
        "--theta",
        "data/thetas.thy",
    ]);
    assert!(c.status.success(), "{}", String::from_utf8_lossy(&c.stderr));
    assert!(stdout(&c).starts_with("valid: forall x . exists y . (x < y | y < x)"));
}

#[test]
fn refuted_sentences_and_relativized_mode() {
    let o = run(&[
        "decide",
        "--structure",
        "data/a2.struct",
        "--sentence",
        "exists x . x < x",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(
        out.contains("verdict: REFUTED") && out.contains("derived: ~(exists x . x < x)"),
        "{out}"
    );

    let chain = "exists x . exists y . exists z . (x < y & y < z)";
    let full = run(&["eval", "--structure", "data/au.struct", "--sentence", chain]);
    assert_eq!(stdout(&full), "true\n");
    let proof = scratch("relativized.json");
    let p = proof.to_str().unwrap();
    let rel = [
        "--structure",
        "data/au.struct",
        "--theta",
        "data/thetas_u.thy",
        "--relativize",
        "U",
    ];
    let o = run(&[
        &["decide", "--sentence", chain, "--emit-proof", p][..],
        &rel[..],
    ]
    .concat());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).starts_with("verdict: REFUTED\nderived: ~(exists x . (U(x) & "));
    let c = run(&[&["check-proof", p][..], &rel[..]].concat());
    assert!(c.status.success(), "{}", String::from_utf8_lossy(&c.stderr));
}

#[test]
fn tampered_proof_is_rejected() {
    let proof = scratch("tampered.json");
    let p = proof.to_str().unwrap();
    let o = run(&[
        "decide",
        "--structure",
        "data/a2.struct",
        "--sentence",
        "exists x . forall y . ~(y < x)",
        "--emit-proof",
        p,
    ]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&proof).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let nodes = v["nodes"].as_array_mut().unwrap();
    let premise = nodes.iter_mut().find(|n| n["rule"] == "premise").unwrap();
    premise["conclusion"] = serde_json::json!("forall x . x < x");
    std::fs::write(&proof, serde_json::to_string(&v).unwrap()).unwrap();
    let c = run(&["check-proof", p, "--structure", "data/a2.struct"]);
    assert_eq!(c.status.code(), Some(1));
}

#[test]
fn pd_of_a_symmetric_pair_is_empty() {
    let o = run(&["pd", "--structure", "data/pair.struct"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("pd = {} (empty)\n"));
}

#[test]
fn saturation_reports_stages() {
    let o = run(&[
        "saturate",
        "--theory",
        "data/dg.thy",
        "--universe",
        "depth:2",
        "--rule",
        "s-rule:data/consts.txt",
        "--steps",
        "fixpoint",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    let grab = |key: &str| -> usize {
        let line = out.lines().find(|l| l.starts_with(key)).unwrap();
        line[key.len()..]
            .split_whitespace()
            .next()
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!(out.contains("fixpoint: reached"));
    assert!(grab("stages: ") <= grab("universe: "));
    assert!(grab("size: ") > 0);
    let t = run(&[
        "tower",
        "--theory",
        "data/dg.thy",
        "--universe",
        "depth:1",
        "--rule",
        "s-rule:data/consts.txt",
    ]);
    assert!(stdout(&t).contains("T_1:"));
}

#[test]
fn outputs_are_deterministic() {
    let args = [
        "tower",
        "--structure",
        "data/named.struct",
        "--universe",
        "depth:2",
        "--rule",
        "s-rule:data/consts.txt",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let (j1, j2) = (scratch("det1.json"), scratch("det2.json"));
    for j in [&j1, &j2] {
        let o = run(&[
            "decide",
            "--structure",
            "data/a2.struct",
            "--sentence",
            "forall x . exists y . ~(x = y)",
            "--emit-proof",
            j.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&j1).unwrap(), std::fs::read(&j2).unwrap());
}

#[test]
fn modal_proofs() {
    let ok = run(&["glp-check", "data/gl.glp"]);
    assert!(ok.status.success());
    assert!(stdout(&ok).contains("proves: []0 p -> []0 []0 p"));
    let bad = run(&["glp-check", "data/nec1.glp"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("step 2"));
}

#[test]
fn modal_interpretation() {
    let o = run(&[
        "glp-interp",
        "[]0 p -> []1 p",
        "--assign",
        "p=forall x . ~(x < x)",
        "--structure",
        "data/named.struct",
        "--rule",
        "s-rule:data/consts.txt",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o), "true\n");
    let o = run(&[
        "glp-interp",
        "[]1 p",
        "--assign",
        "p=forall x . ~(x < x)",
        "--structure",
        "data/named.struct",
        "--rule",
        "s-rule:data/consts.txt",
    ]);
    assert_eq!(stdout(&o), "true\n");
    let o = run(&[
        "glp-interp",
        "[]0 p",
        "--assign",
        "p=forall x . ~(x < x)",
        "--structure",
        "data/named.struct",
        "--rule",
        "s-rule:data/consts.txt",
    ]);
    assert_eq!(stdout(&o), "false\n");
}

#[test]
fn usage_and_domain_errors() {
    assert_eq!(
        run(&[
            "eval",
            "--structure",
            "data/a2.struct",
            "--sentence",
            "x < x",
            "--frob"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    let o = run(&[
        "eval",
        "--structure",
        "data/a2.struct",
        "--sentence",
        "exists x . x <",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "eval",
        "--structure",
        "data/missing.struct",
        "--vocab",
        "data/order.voc",
        "--sentence",
        "exists x . x < x",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("data/missing.struct"));
    let o = run(&["saturate", "--theory", "data/dg.thy", "--rule", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn file_errors_carry_line_numbers() {
    let bad = scratch("bad.struct");
    std::fs::write(&bad, "structure B\nuniverse a\nrelation < : (a,q)\n").unwrap();
    let voc = data().join("data/order.voc");
    let o = run(&[
        "eval",
        "--structure",
        bad.to_str().unwrap(),
        "--vocab",
        voc.to_str().unwrap(),
        "--sentence",
        "exists x . x < x",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.struct:3: unknown element `q`"));
}

#[test]
fn eval_parse_and_diagrams() {
    let o = run(&[
        "eval",
        "--structure",
        "data/a2.struct",
        "--sentence",
        "exists x y . x < y",
    ]);
    assert_eq!(stdout(&o), "true\n");
    let o = run(&[
        "parse",
        "--vocab",
        "data/order.voc",
        "--sentence",
        "forall x.~(x<x)",
    ]);
    assert_eq!(stdout(&o), "forall x . ~(x < x)\n");
    let o = run(&["diagram", "--structure", "data/named.struct"]);
    assert!(stdout(&o).lines().any(|l| l == "c0 < c1"));
    let o = run(&["gdiagram", "--structure", "data/a2.struct"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("theory "));
}
