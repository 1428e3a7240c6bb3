use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::{json, Value};

fn strata(args: &[&str], stdin: Option<&Value>) -> Output {
    strata_with_env(args, stdin, &[])
}

fn strata_with_env(args: &[&str], stdin: Option<&Value>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_strata"));
    cmd.args(args).env_remove("STRATA_TOL").stdin(Stdio::piped()).stdout(Stdio::piped()).stderr(Stdio::piped());
    for (k, v) in env {
        cmd.env(k, v);
    }
    let mut child = cmd.spawn().expect("binary runs");
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(v) = stdin {
            pipe.write_all(v.to_string().as_bytes()).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

fn json_out(args: &[&str], stdin: Option<&Value>) -> Value {
    let out = strata(args, stdin);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn de_problem() -> Value {
    json!({
        "d": 2, "n": 2, "x0": [0, 1],
        "f": [[{"exps": [1, 0], "re": 1, "im": 0}], [{"exps": [0, 1], "re": 1, "im": 0}]],
        "b": [0, "1/2"],
        "F0": [[0, 2], ["-3/4", 0]],
    })
}

fn connection() -> Value {
    json!({
        "d": 1, "n": 2, "center": [0], "K": 3,
        "Delta0": [[{"exps": [1], "re": 1, "im": 0}], [{"exps": [1], "re": -1, "im": 0}]],
        "Bdiag": [0, "1/3"],
        "L": [[[], []], [[], []]],
    })
}

#[test]
fn counts_double_partitions() {
    let out = strata(&["partitions", "count", "--r", "2", "--n", "20"], None);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "318106");
    let v = json_out(&["partitions", "count", "--r", "2", "--n", "5", "--format", "json"], None);
    // Counts are decimal strings so that large values survive JSON.
    assert_eq!(v, json!({"r": 2, "n": 5, "count": "27"}));
}

#[test]
fn lists_symbols_in_canonical_order() {
    let v = json_out(&["partitions", "list", "--r", "2", "--n", "2"], None);
    assert_eq!(v["count"], json!(3));
    assert_eq!(v["items"], json!([[[2]], [[1, 1]], [[1], [1]]]));
}

#[test]
fn hasse_diagram_as_dot() {
    let out = strata(&["bundles", "hasse", "--n", "4", "--format", "dot"], None);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph hasse_4 {"));
    assert_eq!(dot.matches("[label=").count(), 14);
    let v = json_out(&["bundles", "hasse", "--n", "3"], None);
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
}

#[test]
fn describes_and_compares_symbols() {
    let v = json_out(&["bundles", "describe", "--symbol", "[[2],[1,1]]"], None);
    assert_eq!((v["codim"].as_u64(), v["dim"].as_u64()), (Some(4), Some(12)));
    assert_eq!(v["letters"], json!("α²ββ"));
    let v = json_out(&["bundles", "closure", "--a", "[[4]]", "--b", "[[2],[2]]"], None);
    assert_eq!(v["in_closure"], json!(true));
}

#[test]
fn solves_a_darboux_egoroff_jet() {
    let v = json_out(&["de", "solve", "--input", "-", "--order", "3"], Some(&de_problem()));
    assert_eq!(v["feasible"], json!(true));
    assert_eq!(v["residual"]["vanishes"], json!(true));
    // The emitted jet is accepted back by the residual command.
    let mut again = de_problem();
    again["jet"] = v["jet"].clone();
    let r = json_out(&["de", "residual", "--input", "-", "--order", "2"], Some(&again));
    assert_eq!(r["vanishes"], json!(true));
    let o = json_out(&["de", "oracle", "--input", "-", "--order", "3"], Some(&de_problem()));
    assert_eq!(o["jet"], v["jet"]);
}

#[test]
fn simplified_gauge_round_trips_through_the_residual() {
    let phi = json_out(
        &["gauge", "simplify", "--input", "-", "--order", "2", "--recursion", "coalescent"],
        Some(&connection()),
    );
    let mut input = connection();
    input["Phi"] = phi;
    let r = json_out(&["gauge", "residual", "--input", "-"], Some(&input));
    assert_eq!(r["vanishes"], json!(true));
}

#[test]
fn appendix_commands() {
    let v = json_out(&["appendix", "families", "--p", "1", "--q", "2"], None);
    assert_eq!(v["families"][0]["alpha_exp"], json!(2));
    assert_eq!(v["families"][0]["verified"], json!(true));
    let v = json_out(&["appendix", "curve", "--alpha0", "1", "--beta0", "1", "--gamma0", "1", "--c", "2"], None);
    assert_eq!(v["passes"], json!(true));
    assert_eq!(v["t"].as_array().unwrap().len(), 11);
    let dep = json!({
        "d": 1,
        "g": [{"exps": [1], "re": 1, "im": 0}],
        "h": [{"exps": [1], "re": 1, "im": 0}],
        "m": [{"exps": [1], "re": 1, "im": 0}],
    });
    let v = json_out(&["appendix", "classify2x2", "--input", "-"], Some(&dep));
    assert_eq!(v["type"], json!("TypeIII"));
}

#[test]
fn errors_are_one_json_line_with_exit_code_two() {
    for (args, code) in [
        (vec!["partitions", "count", "--r", "0", "--n", "3"], "invalid_input"),
        (vec!["bundles", "describe", "--symbol", "[[0]]"], "invalid_input"),
        (vec!["appendix", "families", "--p", "1", "--q", "1"], "invalid_input"),
        (vec!["de", "solve", "--input", "/nonexistent/problem.json", "--order", "2"], "io"),
    ] {
        let out = strata(&args, None);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{err}");
        let v: Value = serde_json::from_str(&err).unwrap();
        assert_eq!(v["error"], json!(code), "{args:?}");
        assert!(v["detail"].is_string());
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn output_is_deterministic() {
    let args = ["de", "solve", "--input", "-", "--order", "4"];
    let a = strata(&args, Some(&de_problem()));
    let b = strata(&args, Some(&de_problem()));
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let a = strata(&["bundles", "hasse", "--n", "5", "--format", "dot"], None);
    let b = strata(&["bundles", "hasse", "--n", "5", "--format", "dot"], None);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn tolerance_flag_wins_over_environment() {
    let matrix = json!({"matrix": [[0, 0], [0, 1e-6]]});
    let loose = strata_with_env(&["bundles", "classify", "--input", "-"], Some(&matrix), &[("STRATA_TOL", "1e-3")]);
    let v: Value = serde_json::from_slice(&loose.stdout).unwrap();
    assert_eq!(v["symbol"], json!([[1, 1]]));
    let tight = strata_with_env(
        &["bundles", "classify", "--input", "-", "--tol", "1e-10"],
        Some(&matrix),
        &[("STRATA_TOL", "1e-3")],
    );
    let v: Value = serde_json::from_slice(&tight.stdout).unwrap();
    assert_eq!(v["symbol"], json!([[1], [1]]));
}
