use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shuffle-pd"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn parse_reports_metrics() {
    let text = stdout(&["parse", "-e", "a # b*"]);
    assert!(text.contains("ast: Shuffle(Sym(a), Star(Sym(b)))"));
    assert!(text.contains("size: 4"));
    assert!(text.contains("width: 2"));
    assert!(text.contains("nullable: false"));
}

#[test]
fn pi_lists_the_support() {
    let text = stdout(&["pi", "-e", "a1 # a2 # a3"]);
    assert_eq!(text.lines().count(), 7);
    assert_eq!(text.lines().next(), Some("@"));
}

#[test]
fn derive_by_word() {
    assert_eq!(stdout(&["derive", "-e", "a # b", "-w", "a"]), "b\n");
    assert_eq!(stdout(&["derive", "-e", "a # b", "-w", "ab"]), "@\n");
    assert_eq!(stdout(&["derive", "-e", "a . b", "-w", "b"]), "");
}

#[test]
fn nfa_json_for_two_letter_shuffle() {
    let text = stdout(&["nfa", "-e", "a1 # a2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["states"].as_array().unwrap().len(), 4);
    assert_eq!(v["initial"], serde_json::json!([0]));
    assert_eq!(v["transitions"].as_array().unwrap().len(), 4);
}

#[test]
fn nfa_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.dot");
    let out = stdout(&["nfa", "-e", "a . b", "--format", "dot", "--out", path.to_str().unwrap()]);
    assert!(out.is_empty());
    let dot = std::fs::read_to_string(path).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("doublecircle"));
}

#[test]
fn membership() {
    assert_eq!(stdout(&["member", "-e", "a # b", "-w", "ba"]), "true\n");
    assert_eq!(stdout(&["member", "-e", "a # b", "-w", "aa"]), "false\n");
    assert_eq!(stdout(&["member", "-e", "a*", "-w", "@"]), "true\n");
}

#[test]
fn equivalence_with_witness() {
    assert_eq!(
        stdout(&["equiv", "-e", "a # b", "-e2", "a . b + b . a", "--maxlen", "6"]),
        "true\n"
    );
    assert_eq!(
        stdout(&["equiv", "-e", "a # b", "-e2", "a . b", "--maxlen", "6"]),
        "false\nwitness: ba\n"
    );
}

#[test]
fn support_check() {
    assert_eq!(stdout(&["support", "-e", "(a . b)* # c", "--maxlen", "5"]), "true\n");
}

#[test]
fn enumerate_small_class() {
    assert_eq!(stdout(&["enumerate", "-k", "1", "-n", "2"]), "@*\na*\n");
    assert_eq!(stdout(&["enumerate", "-k", "1", "-n", "4"]).lines().count(), 38);
}

#[test]
fn series_csv() {
    let text = stdout(&["series", "-k", "2", "-n", "3", "--csv"]);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,k,r,l,p");
    assert!(lines[3].starts_with("3,2,30,"));
    assert_eq!(lines.len(), 4);
}

#[test]
fn asymptotics_report() {
    let text = stdout(&["asympt", "-k", "2", "-n", "100"]);
    assert!(text.contains("rho: 0.1428571428571428"));
}

#[test]
fn stats_are_deterministic() {
    let args = ["stats", "-k", "2", "-n", "20", "--samples", "200", "--seed", "4", "--csv"];
    let first = stdout(&args);
    assert_eq!(first, stdout(&args));
    let lines: Vec<&str> = first.lines().collect();
    assert_eq!(
        lines[0],
        "k,n,samples,seed,mean_width,mean_pi,max_pi,mean_states,bound_worst,bound_avg,censored"
    );
    assert_eq!(lines[1].split(',').count(), 11);
}

#[test]
fn expressions_from_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("e.txt");
    std::fs::write(&path, "a # b # c\n").unwrap();
    let arg = format!("@{}", path.display());
    assert_eq!(stdout(&["pi", "-e", &arg]).lines().count(), 7);
    assert_eq!(stdout(&["parse", "-e", "@"]).lines().nth(1), Some("printed: @"));
}

#[test]
fn exit_codes() {
    let bad_expr = run(&["parse", "-e", "a # (b"]);
    assert_eq!(bad_expr.status.code(), Some(1));
    assert!(bad_expr.stdout.is_empty());
    assert!(!bad_expr.stderr.is_empty());
    assert_eq!(run(&["pi", "-e", "a . $"]).status.code(), Some(1));
    assert_eq!(run(&["enumerate", "-k", "2", "-n", "30"]).status.code(), Some(1));
    assert_eq!(run(&["parse"]).status.code(), Some(2));
    assert_eq!(run(&["series", "-k", "0", "-n", "3"]).status.code(), Some(2));
    assert_eq!(run(&["nfa", "-e", "a", "--format", "svg"]).status.code(), Some(2));
    assert_eq!(run(&["support", "-e", "a", "--maxlen", "99"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["pi", "-e", "@/nonexistent/file"]).status.code(), Some(1));
}
