//! End-to-end runs of the `njk` binary: exit codes, report contents, stdin, seeds and determinism.

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Stdio};

use serde_json::Value;

use njk_core::brace::twisted_l1_betti;
use njk_core::cochain::{ComplexKind, NijenhuisComplexes};
use njk_core::exact::rat;
use njk_core::lie::{Endomorphism, LieAlgebra, NijenhuisLieAlgebra};
use njk_core::poly::Poly;

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    p.display().to_string()
}

fn njk_with(args: &[&str], env: &[(&str, &str)], stdin: Option<&str>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_njk"));
    cmd.args(args).env_remove("NJK_SEED").stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("spawn njk");
    {
        let mut pipe = child.stdin.take().expect("stdin");
        if let Some(text) = stdin {
            pipe.write_all(text.as_bytes()).expect("write stdin");
        }
    }
    let out = child.wait_with_output().expect("wait for njk");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf-8 stderr"),
    }
}

fn njk(args: &[&str]) -> Run {
    njk_with(args, &[], None)
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let r = njk(&full);
    (r.code, serde_json::from_str(&r.stdout).unwrap_or_else(|e| panic!("{e}: {}", r.stdout)))
}

#[test]
fn check_lie_accepts_sl2() {
    let (code, v) = json(&["check", "lie", &fixture("sl2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "valid");
    assert_eq!(v["command"], "check lie");
    assert_eq!(v["result"]["jacobi"]["valid"], true);
    let text = njk(&["check", "lie", &fixture("sl2.json")]);
    assert_eq!(text.code, 0);
    assert!(text.stdout.starts_with("check lie: valid\n"), "{}", text.stdout);
}

#[test]
fn invalid_structures_exit_with_two() {
    for (args, verdict) in [
        (vec!["check", "lie", "bad-jacobi.json"], "invalid"),
        (vec!["check", "nijenhuis", "sl2-bad-operator.json"], "invalid"),
        (vec!["check", "algebroid", "bad-anchor.json"], "invalid"),
        (vec!["mc", "--n-max", "2", "sl2-bad-operator.json"], "invalid"),
        (vec!["torsion", "tangent-r2-torsion.json"], "invalid"),
        (vec!["algebroid", "mc", "tangent-r2-torsion.json"], "invalid"),
        (vec!["algebroid", "phi", "tangent-r2-torsion.json"], "invalid"),
    ] {
        let mut args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let last = args.pop().unwrap();
        args.push(fixture(&last));
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, v) = json(&refs);
        assert_eq!(code, 2, "{args:?}");
        assert_eq!(v["verdict"], verdict, "{args:?}");
    }
}

#[test]
fn valid_structures_exit_with_zero() {
    for args in [
        vec!["check", "nijenhuis", "sl2-diag.json"],
        vec!["check", "rep", "aff1-rep.json"],
        vec!["check", "algebroid", "tangent-r2-diag.json"],
        vec!["check", "algebroid", "sl2-point.json"],
        vec!["mc", "--n-max", "2", "sl2-diag.json"],
        vec!["torsion", "tangent-r2-diag.json"],
        vec!["algebroid", "phi", "sl2-point.json"],
        vec!["algebroid", "njld", "tangent-r2-diag.json"],
        vec!["algebroid", "mc", "sl2-point.json"],
        vec!["les", "--max-degree", "2", "aff1-rep.json"],
    ] {
        let mut args: Vec<String> = args.iter().map(|s| s.to_string()).collect();
        let last = args.pop().unwrap();
        args.push(fixture(&last));
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, v) = json(&refs);
        assert_eq!(code, 0, "{args:?}: {v}");
        assert_eq!(v["verdict"], "valid", "{args:?}");
    }
}

#[test]
fn njl_betti_table_matches_both_library_routes() {
    let (code, v) = json(&["cohomology", "--complex", "njl", "--max-degree", "2", &fixture("dim2-diag.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["verdict"], "computed");
    let got: Vec<usize> =
        v["result"]["betti"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap() as usize).collect();
    let nl = NijenhuisLieAlgebra::new(LieAlgebra::aff1(), Endomorphism::diag(&[rat(1), rat(2)])).unwrap();
    let cx = NijenhuisComplexes::adjoint(&nl).unwrap();
    assert_eq!(got, cx.betti(ComplexKind::NjL, 2).unwrap().betti_numbers());
    assert_eq!(got, twisted_l1_betti(&nl, 2).unwrap());
    let entries = v["result"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 3);
    for (n, e) in entries.iter().enumerate() {
        assert_eq!(e["degree"], n);
        let (dim, rank, betti) =
            (e["dim"].as_u64().unwrap(), e["rank"].as_u64().unwrap(), e["betti"].as_u64().unwrap());
        let prev = if n == 0 { 0 } else { entries[n - 1]["rank"].as_u64().unwrap() };
        assert_eq!(betti, dim - rank - prev);
    }
}

#[test]
fn ce_cohomology_of_sl2_vanishes() {
    let (code, v) = json(&["cohomology", "--complex", "ce", "--max-degree", "3", &fixture("sl2.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["betti"], serde_json::json!([0, 0, 0, 0]));
}

#[test]
fn poincare_reports_vanishing_cohomology() {
    let r = njk(&["poincare", "--n", "2", "--max-poly-deg", "3"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("all Betti numbers 0"), "{}", r.stdout);
    assert!(r.stdout.contains("homotopy identity d h + h d = id verified"), "{}", r.stdout);
    let (_, v) = json(&["poincare", "--n", "2", "--max-poly-deg", "3"]);
    assert_eq!(v["result"]["all_zero"], true);
    assert_eq!(v["result"]["homotopy"]["valid"], true);
    assert!(v["result"]["entries"].as_array().unwrap().iter().all(|e| e["betti"] == 0));
}

#[test]
fn fn_bracket_of_vector_fields_is_their_lie_bracket() {
    let (code, v) = json(&["fn-bracket", &fixture("vector-fields.json")]);
    assert_eq!(code, 0);
    let comps = &v["result"]["bracket"]["components"];
    let get = |k: &str| Poly::parse(comps[k].as_str().unwrap(), 2).unwrap();
    // [x2∂1 + x1²∂2, ∂1 + x1x2∂2] = −x1x2∂1 + (x2² + x1³ − 2x1)∂2.
    assert_eq!(get("->0"), Poly::parse("-x1*x2", 2).unwrap());
    assert_eq!(get("->1"), Poly::parse("x2^2 + x1^3 - 2*x1", 2).unwrap());
    assert_eq!(v["result"]["routes_agree"], true);
    assert_eq!(v["result"]["antisymmetric"], true);
}

#[test]
fn torsion_names_the_nonzero_component() {
    let (code, v) = json(&["torsion", &fixture("tangent-r2-torsion.json")]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["routes_agree"], true);
    assert_eq!(v["result"]["torsion"]["components"]["0,1->1"], "x2");
}

#[test]
fn parse_errors_exit_with_three_and_name_the_field() {
    let cases = [
        (r#"{"dim": 2, "brackets": {"1,0": {"0": "1"}}}"#, "brackets.\"1,0\""),
        (r#"{"dim": 2, "brackets": {"0,1": {"5": "1"}}}"#, "index 5"),
        (r#"{"dim": 2, "brackets": {"0,1": {"0": "1/0"}}}"#, "brackets.\"0,1\".\"0\""),
        (r#"{"dim": 2, "nijenhuis": [["1", "0"]]}"#, "nijenhuis"),
        (r#"{"dim": 2, "nijenhuis": [["1", "0"], ["0"]]}"#, "nijenhuis[1]"),
        (r#"{"dim": 2, "colour": 1}"#, "colour"),
        ("{\"dim\": 2,\n \"brackets\": ", "line 2"),
    ];
    for (text, needle) in cases {
        let r = njk_with(&["check", "lie", "-"], &[], Some(text));
        assert_eq!(r.code, 3, "{text}");
        assert!(r.stderr.contains(needle), "{text}: {}", r.stderr);
    }
    let r = njk_with(&["check", "algebroid", "-"], &[], Some(r#"{"base_dim": 1, "rank": 1, "anchor": [["x3"]]}"#));
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("anchor[0][0]"), "{}", r.stderr);
}

#[test]
fn usage_errors_exit_with_three() {
    assert_eq!(njk(&["check", "lie"]).code, 3);
    assert_eq!(njk(&["cohomology", "--complex", "njl", "--max-degree", "0", &fixture("sl2.json")]).code, 3);
    let r = njk(&["cohomology", "--complex", "njl", "--max-degree", "4", &fixture("sl2-diag.json")]);
    assert_eq!(r.code, 3);
    assert!(r.stderr.contains("--max-degree"));
    assert_eq!(njk(&["cohomology", "--complex", "njo", "--max-degree", "1", &fixture("sl2.json")]).code, 3);
    assert_eq!(njk(&["--help"]).code, 0);
    assert_eq!(njk(&["--version"]).code, 0);
}

#[test]
fn missing_files_exit_with_one() {
    let r = njk(&["check", "lie", "/nonexistent/input.json"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("/nonexistent/input.json"));
}

#[test]
fn failed_preconditions_are_invalid_reports() {
    let (code, v) = json(&["cohomology", "--complex", "njl", "--max-degree", "2", &fixture("sl2-bad-operator.json")]);
    assert_eq!(code, 2);
    assert_eq!(v["verdict"], "invalid");
    assert!(v["result"]["reason"].as_str().unwrap().contains("not Nijenhuis"));
}

#[test]
fn stdin_and_file_inputs_agree() {
    let path = fixture("dim2-diag.json");
    let text = std::fs::read_to_string(&path).unwrap();
    let args = ["--format", "json", "cohomology", "--complex", "njl", "--max-degree", "2"];
    let from_file = njk(&[&args[..], &[path.as_str()]].concat());
    let from_stdin = njk_with(&[&args[..], &["-"]].concat(), &[], Some(&text));
    assert_eq!(from_stdin.code, 0);
    let mut a: Value = serde_json::from_str(&from_file.stdout).unwrap();
    let b: Value = serde_json::from_str(&from_stdin.stdout).unwrap();
    assert_eq!(b["input"], "-");
    a["input"] = Value::from("-");
    assert_eq!(a, b);
}

#[test]
fn seed_comes_from_flag_then_env_then_default() {
    let f = fixture("tangent-r2-diag.json");
    let args = ["--format", "json", "algebroid", "njld", "--samples", "4", f.as_str()];
    let seed = |r: &Run| serde_json::from_str::<Value>(&r.stdout).unwrap()["seed"].clone();
    assert_eq!(seed(&njk(&args)), 0);
    assert_eq!(seed(&njk_with(&args, &[("NJK_SEED", "17")], None)), 17);
    let with_flag = [&["--seed", "5"], &args[..]].concat();
    assert_eq!(seed(&njk_with(&with_flag, &[("NJK_SEED", "17")], None)), 5);
}

#[test]
fn output_bytes_are_deterministic_for_a_fixed_seed() {
    let f = fixture("tangent-r2-diag.json");
    for format in ["json", "text"] {
        let args = ["--format", format, "--seed", "9", "algebroid", "njld", f.as_str()];
        let first = njk(&args);
        assert_eq!(first.code, 0);
        assert_eq!(first.stdout, njk(&args).stdout);
        let env = njk_with(&["--format", format, "algebroid", "njld", f.as_str()], &[("NJK_SEED", "9")], None);
        assert_eq!(first.stdout, env.stdout);
    }
    let args = ["--format", "json", "les", "--max-degree", "2", &fixture("sl2-diag.json")];
    assert_eq!(njk(&args).stdout, njk(&args).stdout);
}

#[test]
fn json_reports_have_sorted_keys_and_no_floats() {
    let r = njk(&["--format", "json", "--timing", "fn-bracket", &fixture("operator-forms.json")]);
    let v: Value = serde_json::from_str(&r.stdout).unwrap();
    assert!(v["timing_ms"].is_u64());
    fn walk(v: &Value) {
        match v {
            Value::Number(n) => assert!(n.is_u64() || n.is_i64(), "float {n}"),
            Value::Array(a) => a.iter().for_each(walk),
            Value::Object(m) => {
                let keys: Vec<&String> = m.keys().collect();
                assert!(keys.windows(2).all(|w| w[0] < w[1]));
                m.values().for_each(walk);
            }
            _ => {}
        }
    }
    walk(&v);
    let top: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(top, ["command", "input", "result", "seed", "timing_ms", "verdict"]);
}

#[test]
fn quiet_prints_nothing_but_keeps_the_exit_code() {
    let r = njk(&["--quiet", "check", "lie", &fixture("bad-jacobi.json")]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty());
}
