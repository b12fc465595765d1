//! Exit codes and report shapes of individual subcommands.

use poslog_cli::{run, Outcome};

fn poslog(args: &[&str]) -> Outcome {
    run(std::iter::once("poslog").chain(args.iter().copied()))
}

const GRAPHS: [&str; 4] = ["--theory", "t_graph.plt", "--class", "graphs3.pls"];

fn with(base: &[&str], rest: &[&str]) -> Vec<String> {
    base.iter().chain(rest).map(|s| s.to_string()).collect()
}

fn poslog_owned(args: Vec<String>) -> Outcome {
    run(std::iter::once("poslog".to_string()).chain(args))
}

#[test]
fn classify_names_the_most_specific_fragment() {
    let o = poslog(&["classify", "forall x: E(x,x) -> false"]);
    assert_eq!(o.code, 0);
    assert_eq!(o.stdout.lines().next(), Some("h-universal-basic"));
}

#[test]
fn pmc_on_chains_lists_the_order_complement_and_fails() {
    let o = poslog(&[
        "pmc",
        "--theory",
        "t_lo.plt",
        "--class",
        "chains3.pls",
        "--depth",
        "1",
    ]);
    assert!(o.stdout.contains("x<y ↦ Or[x=y, y<x]"));
    assert_eq!(o.code, 1);
}

#[test]
fn parse_errors_exit_two() {
    assert_eq!(poslog(&["classify", "E(x"]).code, 2);
    assert_eq!(
        poslog(&[
            "classify",
            "forall x: E(x,x) -> false",
            "--theory",
            "t_lo.plt"
        ])
        .code,
        2
    );
    assert_eq!(poslog(&["no-such-command"]).code, 2);
    assert_eq!(poslog(&["typespace"]).code, 2);
    assert_eq!(poslog(&["typespace", "--class", "missing.pls"]).code, 2);
}

#[test]
fn help_exits_zero() {
    let o = poslog(&["--help"]);
    assert_eq!(o.code, 0);
    assert!(o.stdout.contains("check-suite"));
}

#[test]
fn ceilings_exit_three() {
    let o = poslog_owned(with(&GRAPHS, &["--ceiling", "10", "typespace"]));
    assert_eq!(o.code, 3);
    assert!(o.stderr.contains("ceiling"));
}

#[test]
fn semantic_failures_exit_one() {
    assert_eq!(
        poslog_owned(with(&GRAPHS, &["forcing", "existential", "K2"])).code,
        1
    );
    assert_eq!(poslog_owned(with(&GRAPHS, &["karp", "K2", "K3"])).code, 1);
    assert_eq!(poslog(&["dnf", "!E(x, y)"]).code, 1);
}

#[test]
fn successes_exit_zero() {
    assert_eq!(poslog_owned(with(&GRAPHS, &["pec"])).code, 0);
    assert_eq!(
        poslog_owned(with(&GRAPHS, &["verify-morley", "K3"])).code,
        0
    );
    assert_eq!(
        poslog_owned(with(
            &GRAPHS,
            &["forcing", "check", "K3", "E(x, y)", "--tuple", "a,b"]
        ))
        .code,
        0
    );
    assert_eq!(poslog_owned(with(&GRAPHS, &["karp", "K3", "K3"])).code, 0);
}

#[test]
fn json_reports_are_versioned() {
    let o = poslog_owned(with(&GRAPHS, &["--format", "json", "morleyize"]));
    assert_eq!(o.code, 0);
    let v: serde_json::Value = serde_json::from_str(&o.stdout).unwrap();
    assert_eq!(v["report_v"], 1);
    assert_eq!(v["status"], "pass");
    assert!(v["plt"].as_str().unwrap().starts_with("#poslog v1 theory"));
}

#[test]
fn dot_output_only_where_a_graph_exists() {
    let o = poslog_owned(with(&GRAPHS, &["--format", "dot", "typespace"]));
    assert_eq!(o.code, 0);
    assert!(o.stdout.starts_with("digraph"));
    assert_eq!(
        poslog_owned(with(&GRAPHS, &["--format", "dot", "pec"])).code,
        2
    );
}

#[test]
fn identical_invocations_give_identical_reports() {
    let args = with(&GRAPHS, &["--format", "json", "typespace"]);
    assert_eq!(poslog_owned(args.clone()), poslog_owned(args));
}
