//! Command-line verification front end: every subcommand runs a batch of
//! exact checks and emits one machine-readable record per check.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::thread;

use serde_json::json;

use markoff::arith::{factorize, sqrt_minus_one};
use markoff::catalog;
use markoff::orbit;
use markoff::profile::native_profiles;
use markoff::qforms;
use markoff::solutions;
use markoff::tree::enumerate;
use markoff::uniqueness;
use markoff::IdentityReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub cmd: String,
    pub subject: String,
    pub check: String,
    pub pass: bool,
    pub detail: String,
}

impl Record {
    fn from_report(cmd: &str, r: &IdentityReport) -> Record {
        Record {
            cmd: cmd.to_string(),
            subject: r.subject.clone(),
            check: r.id.clone(),
            pass: r.pass,
            detail: if r.detail.is_empty() {
                catalog::residual_summary(r)
            } else {
                r.detail.clone()
            },
        }
    }

    fn jsonl(&self) -> String {
        json!({
            "cmd": self.cmd,
            "subject": self.subject,
            "check": self.check,
            "pass": self.pass,
            "detail": self.detail,
        })
        .to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Jsonl,
    Table,
}

#[derive(Debug, Clone)]
pub struct Options {
    pub bound: u64,
    pub format: Format,
    pub jobs: usize,
    pub ids: Option<Vec<String>>,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            bound: 1000,
            format: Format::Jsonl,
            jobs: 1,
            ids: None,
        }
    }
}

pub const USAGE: &str = "usage: markoff <command> [--bound N] [--format jsonl|table] [--jobs N] [--ids a,b] [--seed-free]

commands:
  enumerate          list Markoff triples with dominant member up to the bound
  verify-identities  run the exact identity catalog over all triples in range
  solutions          count inequivalent matrix-system solutions per q (3 | q <= bound)
  profile            residue-profile identities for every orientation in range
  uniqueness         check every dominant member up to the bound is unique
  cycles             reduction-cycle symmetric-form structure per Markoff number
  normform           fundamental-solution classes of x^2 - (9m^2-4) y^2 = -4m^2
  orbit              two-square recursions and the field suite per dominant member
  all                run every verification at the same bound

exit codes: 0 all checks pass, 1 some check failed, 2 bad arguments";

/// Parse argv (without the program name).
pub fn parse(args: &[String]) -> Result<(String, Options), String> {
    let mut cmd = None;
    let mut opts = Options::default();
    let mut i = 0;
    while i < args.len() {
        let a = args[i].as_str();
        match a {
            "--bound" => {
                i += 1;
                let v = args.get(i).ok_or("--bound needs a value")?;
                opts.bound = v.parse().map_err(|_| format!("bad bound: {v}"))?;
            }
            "--format" => {
                i += 1;
                match args.get(i).map(|s| s.as_str()) {
                    Some("jsonl") => opts.format = Format::Jsonl,
                    Some("table") => opts.format = Format::Table,
                    other => return Err(format!("bad format: {other:?}")),
                }
            }
            "--jobs" => {
                i += 1;
                let v = args.get(i).ok_or("--jobs needs a value")?;
                opts.jobs = v.parse().map_err(|_| format!("bad jobs: {v}"))?;
                if opts.jobs == 0 {
                    return Err("jobs must be positive".to_string());
                }
            }
            "--ids" => {
                i += 1;
                let v = args.get(i).ok_or("--ids needs a value")?;
                opts.ids = Some(v.split(',').map(|s| s.trim().to_string()).collect());
            }
            "--seed-free" => {
                // nothing here is randomized; accepted for interface parity
            }
            _ if cmd.is_none() && !a.starts_with('-') => cmd = Some(a.to_string()),
            _ => return Err(format!("unknown argument: {a}")),
        }
        i += 1;
    }
    let cmd = cmd.ok_or("missing command")?;
    Ok((cmd, opts))
}

/// Deterministic fan-out: apply `f` to items on `jobs` threads and splice the
/// results back in input order.
fn parallel_map<T, F>(items: Vec<T>, jobs: usize, f: F) -> Vec<Record>
where
    T: Send + 'static,
    F: Fn(&T) -> Vec<Record> + Send + Sync + Copy + 'static,
{
    if jobs <= 1 || items.len() <= 1 {
        let mut out = Vec::new();
        for it in &items {
            out.extend(f(it));
        }
        return out;
    }
    let n = items.len();
    let chunk = n.div_ceil(jobs);
    let mut handles = Vec::new();
    let mut items = items;
    let mut start = 0usize;
    let mut parts: Vec<Vec<T>> = Vec::new();
    while start < n {
        let take = chunk.min(items.len());
        let rest = items.split_off(take);
        parts.push(items);
        items = rest;
        start += take;
    }
    for (idx, part) in parts.into_iter().enumerate() {
        handles.push(thread::spawn(move || {
            let mut out = Vec::new();
            for it in &part {
                out.extend(f(it));
            }
            (idx, out)
        }));
    }
    let mut chunks: Vec<(usize, Vec<Record>)> = handles
        .into_iter()
        .map(|h| h.join().expect("worker panicked"))
        .collect();
    chunks.sort_by_key(|(i, _)| *i);
    chunks.into_iter().flat_map(|(_, r)| r).collect()
}

fn markoff_numbers_to(bound: u64) -> Vec<u64> {
    let mut set: BTreeSet<u64> = BTreeSet::new();
    set.insert(1);
    for t in enumerate(bound) {
        for m in t.members() {
            if m <= bound {
                set.insert(m);
            }
        }
    }
    set.into_iter().collect()
}

fn cmd_enumerate(o: &Options) -> Vec<Record> {
    let triples = enumerate(o.bound);
    let n = triples.len();
    let mut out: Vec<Record> = triples
        .iter()
        .map(|t| Record {
            cmd: "enumerate".into(),
            subject: format!("({},{},{})", t.a, t.b, t.c),
            check: "triple".into(),
            pass: true,
            detail: format!("dominant {}", t.c),
        })
        .collect();
    out.push(Record {
        cmd: "enumerate".into(),
        subject: format!("bound {}", o.bound),
        check: "count".into(),
        pass: true,
        detail: format!("{n} triples"),
    });
    out
}

fn cmd_verify_identities(o: &Options) -> Vec<Record> {
    let triples = enumerate(o.bound);
    let ids = o.ids.clone();
    let recs = parallel_map(triples, o.jobs, |t| {
        catalog::run_triple(t)
            .iter()
            .map(|r| Record::from_report("verify-identities", r))
            .collect()
    });
    match ids {
        Some(ids) => recs
            .into_iter()
            .filter(|r| ids.iter().any(|i| *i == r.check))
            .collect(),
        None => recs,
    }
}

fn cmd_solutions(o: &Options) -> Vec<Record> {
    let qs: Vec<i64> = (3..=o.bound as i64).step_by(3).collect();
    parallel_map(qs, o.jobs, |&q| {
        let n = (q / 3) as u64;
        let expected = sqrt_minus_one(n).len();
        let count = solutions::inequivalent_count(q).unwrap_or(usize::MAX);
        let class_note = if n % 4 != 0 && expected > 0 {
            let l = factorize(n).odd_prime_count();
            format!("2^{l} residue classes")
        } else {
            "no residue classes".to_string()
        };
        vec![Record {
            cmd: "solutions".into(),
            subject: format!("q={q}"),
            check: "4.3b-count".into(),
            pass: count == expected,
            detail: format!("{count} inequivalent, {class_note}"),
        }]
    })
}

fn cmd_profile(o: &Options) -> Vec<Record> {
    let triples = enumerate(o.bound);
    parallel_map(triples, o.jobs, |t| {
        let mut out = Vec::new();
        for orient in t.orientations() {
            match native_profiles(&orient) {
                Ok(ps) => {
                    for p in &ps {
                        for r in [
                            markoff::profile::frobenius_identities(p),
                            markoff::profile::uv_checks(p),
                            markoff::profile::sigma_quadratic_check(p),
                            markoff::profile::factor_inverse_check(p),
                        ] {
                            out.push(Record::from_report("profile", &r));
                        }
                    }
                }
                Err(e) => out.push(Record {
                    cmd: "profile".into(),
                    subject: format!("{orient:?}"),
                    check: "profile".into(),
                    pass: false,
                    detail: format!("{e:?}"),
                }),
            }
        }
        out
    })
}

fn cmd_uniqueness(o: &Options) -> Vec<Record> {
    let r = uniqueness::verify_uniqueness(o.bound);
    vec![Record {
        cmd: "uniqueness".into(),
        subject: format!("bound {}", o.bound),
        check: "dominant-unique".into(),
        pass: r.all_unique,
        detail: format!(
            "{} triples, {} distinct dominant members",
            r.triples, r.distinct_dominants
        ),
    }]
}

fn cmd_cycles(o: &Options) -> Vec<Record> {
    let ms = markoff_numbers_to(o.bound);
    parallel_map(ms, o.jobs, |&m| {
        let rec = |pass: bool, detail: String| Record {
            cmd: "cycles".into(),
            subject: format!("m={m}"),
            check: "7.2-7.4".into(),
            pass,
            detail,
        };
        match qforms::symmetric_forms_in_cycle(m) {
            Ok(syms) => {
                let pass = if m >= 5 {
                    !syms.is_empty()
                        && syms
                            .iter()
                            .any(|f1| syms.iter().any(|f2| f2.a != -f1.a.clone()))
                } else {
                    let mut mags: Vec<_> = syms.iter().map(|f| f.a.magnitude().clone()).collect();
                    mags.sort();
                    mags.dedup();
                    mags.len() == 1 && syms.iter().all(|f| f.is_ambiguous())
                };
                vec![rec(
                    pass,
                    format!("{} symmetric forms in cycle", syms.len()),
                )]
            }
            Err(e) => vec![rec(false, format!("{e:?}"))],
        }
    })
}

fn cmd_normform(o: &Options) -> Vec<Record> {
    let ms = markoff_numbers_to(o.bound);
    parallel_map(ms, o.jobs, |&m| {
        let sols = orbit::fundamental_solutions(m);
        let ok = sols.iter().all(|s| s.verify(m));
        let classes = orbit::classify(&sols, m);
        let want = if m >= 5 { 2 } else { 1 };
        vec![Record {
            cmd: "normform".into(),
            subject: format!("m={m}"),
            check: "8.classes".into(),
            pass: ok && classes.len() == want,
            detail: format!(
                "{} fundamental solutions, {} classes",
                sols.len(),
                classes.len()
            ),
        }]
    })
}

fn cmd_orbit(o: &Options) -> Vec<Record> {
    let triples = enumerate(o.bound);
    parallel_map(triples, o.jobs, |t| {
        let mut out = Vec::new();
        let b = t.dominant();
        let (a0, a1) = (t.a.min(t.b), t.a.max(t.b));
        match orbit::uv_sequences(b, a0, a1, 20) {
            Ok(seq) => {
                let mut pass = true;
                for n in -20..20 {
                    pass &= orbit::gram_identity(&seq, n).pass;
                }
                out.push(Record {
                    cmd: "orbit".into(),
                    subject: format!("b={b}"),
                    check: "9.gram".into(),
                    pass,
                    detail: "window |n| <= 20".into(),
                });
            }
            Err(e) => out.push(Record {
                cmd: "orbit".into(),
                subject: format!("b={b}"),
                check: "9.gram".into(),
                pass: false,
                detail: format!("{e:?}"),
            }),
        }
        match orbit::field_suite(b, 3) {
            Ok(s) => out.push(Record::from_report("orbit", &s.report)),
            Err(e) => out.push(Record {
                cmd: "orbit".into(),
                subject: format!("b={b}"),
                check: "10.7".into(),
                pass: false,
                detail: format!("{e:?}"),
            }),
        }
        out
    })
}

fn run_command(cmd: &str, o: &Options) -> Result<Vec<Record>, String> {
    Ok(match cmd {
        "enumerate" => cmd_enumerate(o),
        "verify-identities" => cmd_verify_identities(o),
        "solutions" => cmd_solutions(o),
        "profile" => cmd_profile(o),
        "uniqueness" => cmd_uniqueness(o),
        "cycles" => cmd_cycles(o),
        "normform" => cmd_normform(o),
        "orbit" => cmd_orbit(o),
        "all" => {
            let mut out = cmd_enumerate(o);
            out.extend(cmd_verify_identities(o));
            out.extend(cmd_solutions(&Options {
                bound: (3 * o.bound).min(1500),
                ..o.clone()
            }));
            out.extend(cmd_profile(o));
            out.extend(cmd_uniqueness(o));
            out.extend(cmd_cycles(o));
            out.extend(cmd_normform(o));
            out.extend(cmd_orbit(o));
            out
        }
        other => return Err(format!("unknown command: {other}")),
    })
}

fn render(records: &[Record], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Jsonl => {
            for r in records {
                out.push_str(&r.jsonl());
                out.push('\n');
            }
        }
        Format::Table => {
            let wid = records
                .iter()
                .map(|r| r.subject.len())
                .max()
                .unwrap_or(8)
                .max(8);
            let _ = writeln!(
                out,
                "{:20} {:wid$} {:12} {}",
                "CHECK", "SUBJECT", "RESULT", "DETAIL"
            );
            for r in records {
                let _ = writeln!(
                    out,
                    "{:20} {:wid$} {:12} {}",
                    r.check,
                    r.subject,
                    if r.pass { "pass" } else { "FAIL" },
                    r.detail
                );
            }
        }
    }
    let failed = records.iter().filter(|r| !r.pass).count();
    let _ = writeln!(
        out,
        "{}",
        json!({
            "cmd": "summary",
            "subject": format!("{} records", records.len()),
            "check": "overall",
            "pass": failed == 0,
            "detail": format!("{failed} failed"),
        })
    );
    out
}

/// Entry point shared by the binary and the tests: returns (exit code, stdout).
pub fn run(args: &[String]) -> (i32, String) {
    let (cmd, opts) = match parse(args) {
        Ok(v) => v,
        Err(e) => return (2, format!("error: {e}\n{USAGE}\n")),
    };
    let records = match run_command(&cmd, &opts) {
        Ok(r) => r,
        Err(e) => return (2, format!("error: {e}\n{USAGE}\n")),
    };
    let all_pass = records.iter().all(|r| r.pass);
    let out = render(&records, opts.format);
    (if all_pass { 0 } else { 1 }, out)
}
