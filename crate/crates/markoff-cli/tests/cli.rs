//! End-to-end checks of the CLI surface: determinism, exit codes, record
//! schema, and the parallel partitioning.

use markoff_cli::{run, Format, Options};

fn args(s: &str) -> Vec<String> {
    s.split_whitespace().map(|x| x.to_string()).collect()
}

#[test]
fn enumerate_lists_five_triples_at_bound_30() {
    let (code, out) = run(&args("enumerate --bound 30"));
    assert_eq!(code, 0);
    let triples: Vec<&str> = out.lines().filter(|l| l.contains("\"triple\"")).collect();
    assert_eq!(triples.len(), 5);
    assert!(out.contains("(2,5,29)"));
}

#[test]
fn records_are_valid_json_with_the_schema() {
    let (code, out) = run(&args("profile --bound 30"));
    assert_eq!(code, 0);
    for line in out.lines() {
        let v: serde_json::Value = serde_json::from_str(line).expect("every line is JSON");
        for key in ["cmd", "subject", "check", "pass", "detail"] {
            assert!(v.get(key).is_some(), "missing {key} in {line}");
        }
    }
}

#[test]
fn output_is_deterministic_and_job_count_invariant() {
    let (c1, o1) = run(&args("verify-identities --bound 100"));
    let (c2, o2) = run(&args("verify-identities --bound 100"));
    assert_eq!((c1, &o1), (c2, &o2), "two runs differ");
    let (c3, o3) = run(&args("verify-identities --bound 100 --jobs 4"));
    assert_eq!(c3, 0);
    assert_eq!(o1, o3, "parallel run reordered records");
    let (c4, o4) = run(&args("cycles --bound 200 --jobs 3"));
    let (c5, o5) = run(&args("cycles --bound 200"));
    assert_eq!((c4, &o4), (c5, &o5));
}

#[test]
fn uniqueness_to_a_million_passes() {
    let (code, out) = run(&args("uniqueness --bound 1000000"));
    assert_eq!(code, 0);
    assert!(out.contains("\"pass\":true"));
}

#[test]
fn bad_arguments_exit_2() {
    assert_eq!(run(&args("frobnicate")).0, 2);
    assert_eq!(run(&args("enumerate --bound nope")).0, 2);
    assert_eq!(run(&args("enumerate --format yaml")).0, 2);
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&args("enumerate --jobs 0")).0, 2);
}

#[test]
fn ids_filter_restricts_checks() {
    let (code, out) = run(&args("verify-identities --bound 10 --ids 2.1,4.2"));
    assert_eq!(code, 0);
    for line in out.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let check = v["check"].as_str().unwrap();
        assert!(
            check == "2.1" || check == "4.2" || check == "overall",
            "unexpected check {check}"
        );
    }
}

#[test]
fn table_format_renders_rows() {
    let (code, out) = run(&args("normform --bound 50 --format table"));
    assert_eq!(code, 0);
    assert!(out.contains("CHECK"));
    assert!(out.contains("pass"));
}

#[test]
fn all_runs_every_module_at_the_bound() {
    let (code, out) = run(&args("all --bound 30 --jobs 2 --seed-free"));
    assert_eq!(code, 0, "all failed:\n{out}");
    for cmd in [
        "enumerate",
        "verify-identities",
        "solutions",
        "profile",
        "uniqueness",
        "cycles",
        "normform",
        "orbit",
    ] {
        assert!(
            out.lines()
                .any(|l| l.contains(&format!("\"cmd\":\"{cmd}\""))),
            "missing records for {cmd}"
        );
    }
}

#[test]
fn parse_defaults() {
    let (cmd, o) = markoff_cli::parse(&args("enumerate")).unwrap();
    assert_eq!(cmd, "enumerate");
    assert_eq!(o.bound, 1000);
    assert_eq!(o.jobs, 1);
    assert_eq!(o.format, Format::Jsonl);
    let d = Options::default();
    assert_eq!(d.bound, 1000);
}
