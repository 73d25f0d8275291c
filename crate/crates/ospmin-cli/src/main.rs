//! Batch verification harness: selects suites, runs them over parameter
//! triples on a worker pool, and emits human-readable or machine-readable
//! reports.  Exit codes: 0 all pass, 1 failures present, 2 usage error.

use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use ospmin_core::suites::{self, CheckResult, Status, SuiteConfig};
use ospmin_core::{Context, ModelParams};

struct Config {
    triples: Vec<(i64, i64, i64)>,
    suites: Vec<String>,
    suite_cfg: SuiteConfig,
    json: bool,
    jobs: usize,
}

const USAGE: &str = "\
usage: verify [--suite NAME ...] [--p P --q Q --n N ...] [options]

Runs exact verification suites for the orthosymplectic minimal
representation over one or more parameter triples (p, q, n), p,q >= 2.

options:
  --suite NAME      suite to run; repeatable; one of
                    algebra, representation, harmonics, laguerre,
                    wmodule, functional, fourier, gkdim, all
                    (default: all)
  --p P --q Q --n N parameter triple; repeat the three flags per triple
                    (default: (4,4,1), (6,4,1), (3,5,0))
  --max-degree D    degree cap for action checks (default 5)
  --max-j J         degree-label cap for the module suites (default 2)
  --seed S          seed for sampled checks (default 7)
  --jobs K          worker threads (default: OSPMIN_JOBS or 1)
  --json            emit the machine-readable report
  --help            print this message
";

fn parse_args() -> Result<Config, String> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let mut suites_sel: Vec<String> = Vec::new();
    let mut ps: Vec<i64> = Vec::new();
    let mut qs: Vec<i64> = Vec::new();
    let mut ns: Vec<i64> = Vec::new();
    let mut cfg = SuiteConfig::default();
    let mut json = false;
    let mut jobs: Option<usize> = None;
    let mut it = args.into_iter();
    while let Some(arg) = it.next() {
        let mut need = |name: &str| -> Result<String, String> {
            it.next().ok_or_else(|| format!("missing value for {name}"))
        };
        match arg.as_str() {
            "--help" | "-h" => {
                print!("{USAGE}");
                std::process::exit(0);
            }
            "--suite" => {
                let v = need("--suite")?;
                for piece in v.split(',') {
                    suites_sel.push(piece.trim().to_string());
                }
            }
            "--p" => ps.push(need("--p")?.parse().map_err(|_| "bad --p".to_string())?),
            "--q" => qs.push(need("--q")?.parse().map_err(|_| "bad --q".to_string())?),
            "--n" => ns.push(need("--n")?.parse().map_err(|_| "bad --n".to_string())?),
            "--max-degree" => {
                cfg.max_degree = need("--max-degree")?
                    .parse()
                    .map_err(|_| "bad --max-degree".to_string())?
            }
            "--max-j" => {
                cfg.j_max = need("--max-j")?.parse().map_err(|_| "bad --max-j".to_string())?
            }
            "--seed" => {
                cfg.seed = need("--seed")?.parse().map_err(|_| "bad --seed".to_string())?
            }
            "--jobs" => {
                jobs = Some(need("--jobs")?.parse().map_err(|_| "bad --jobs".to_string())?)
            }
            "--json" => json = true,
            other => return Err(format!("unknown flag `{other}`")),
        }
    }
    if !(ps.len() == qs.len() && qs.len() == ns.len()) {
        return Err("each triple needs --p, --q and --n".to_string());
    }
    let mut triples: Vec<(i64, i64, i64)> =
        ps.into_iter().zip(qs).zip(ns).map(|((p, q), n)| (p, q, n)).collect();
    if triples.is_empty() {
        triples = vec![(4, 4, 1), (6, 4, 1), (3, 5, 0)];
    }
    for &(p, q, n) in &triples {
        if p < 2 || q < 2 || n < 0 {
            return Err(format!("invalid triple ({p},{q},{n}): require p,q >= 2 and n >= 0"));
        }
    }
    if suites_sel.is_empty() || suites_sel.iter().any(|s| s == "all") {
        suites_sel = suites::SUITE_NAMES.iter().map(|s| s.to_string()).collect();
    }
    for s in &suites_sel {
        if !suites::SUITE_NAMES.contains(&s.as_str()) {
            return Err(format!("unknown suite `{s}`"));
        }
    }
    let jobs = jobs
        .or_else(|| std::env::var("OSPMIN_JOBS").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(1)
        .max(1);
    Ok(Config { triples, suites: suites_sel, suite_cfg: cfg, json, jobs })
}

fn run_parallel(checks: &[suites::Check<'_>], jobs: usize) -> Vec<CheckResult> {
    if jobs <= 1 || checks.len() <= 1 {
        return checks.iter().map(|c| c.run()).collect();
    }
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, CheckResult)>> = Mutex::new(Vec::with_capacity(checks.len()));
    std::thread::scope(|scope| {
        for _ in 0..jobs.min(checks.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= checks.len() {
                    break;
                }
                let r = checks[i].run();
                results.lock().unwrap().push((i, r));
            });
        }
    });
    let mut collected = results.into_inner().unwrap();
    collected.sort_by_key(|(i, _)| *i);
    collected.into_iter().map(|(_, r)| r).collect()
}

fn json_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out
}

fn emit_json(blocks: &[((i64, i64, i64), String, Vec<CheckResult>)]) {
    let mut out = String::from("[\n");
    for (bi, ((p, q, n), suite, checks)) in blocks.iter().enumerate() {
        out.push_str(&format!(
            "  {{\"suite\": \"{}\", \"triple\": {{\"p\": {p}, \"q\": {q}, \"n\": {n}}}, \"checks\": [\n",
            json_escape(suite)
        ));
        for (ci, c) in checks.iter().enumerate() {
            let idx = c
                .indices
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(", ");
            out.push_str(&format!(
                "    {{\"name\": \"{}\", \"indices\": [{}], \"status\": \"{}\", \"lhs\": \"{}\", \"rhs\": \"{}\", \"ref\": \"{}\"}}{}\n",
                json_escape(&c.name),
                idx,
                c.status.as_str(),
                json_escape(&c.lhs),
                json_escape(&c.rhs),
                json_escape(&c.reference),
                if ci + 1 < checks.len() { "," } else { "" }
            ));
        }
        out.push_str(&format!("  ]}}{}\n", if bi + 1 < blocks.len() { "," } else { "" }));
    }
    out.push_str("]\n");
    print!("{out}");
}

fn main() -> ExitCode {
    let config = match parse_args() {
        Ok(c) => c,
        Err(why) => {
            eprintln!("error: {why}");
            eprint!("{USAGE}");
            return ExitCode::from(2);
        }
    };
    let mut blocks: Vec<((i64, i64, i64), String, Vec<CheckResult>)> = Vec::new();
    let mut any_fail = false;
    for &(p, q, n) in &config.triples {
        let params = match ModelParams::new(p, q, n) {
            Ok(v) => v,
            Err(why) => {
                eprintln!("error: {why}");
                return ExitCode::from(2);
            }
        };
        let need_w = config.suites.iter().any(|s| suites::suite_needs_w(s));
        let ctx = Context::new(params, need_w, config.suite_cfg.j_max);
        for suite in &config.suites {
            let checks = match suites::build_checks(suite, &ctx, &config.suite_cfg) {
                Ok(c) => c,
                Err(why) => {
                    eprintln!("error: {why}");
                    return ExitCode::from(2);
                }
            };
            let mut results = run_parallel(&checks, config.jobs);
            results.sort_by(|a, b| (&a.suite, &a.name).cmp(&(&b.suite, &b.name)));
            if results.iter().any(|r| r.status == Status::Fail) {
                any_fail = true;
            }
            blocks.push(((p, q, n), suite.clone(), results));
        }
    }
    if config.json {
        emit_json(&blocks);
    } else {
        for ((p, q, n), suite, results) in &blocks {
            let pass = results.iter().filter(|r| r.status == Status::Pass).count();
            let fail = results.iter().filter(|r| r.status == Status::Fail).count();
            let skipped = results.iter().filter(|r| r.status == Status::Skip).count();
            println!(
                "== suite {suite} at (p,q,n) = ({p},{q},{n}): {pass} pass, {fail} fail, {skipped} skipped"
            );
            for r in results {
                match r.status {
                    Status::Pass => {}
                    Status::Fail => println!(
                        "  FAIL {} [{}]: {} vs {}",
                        r.name,
                        r.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
                        r.lhs,
                        r.rhs
                    ),
                    Status::Skip => println!(
                        "  SKIP {} [{}]: {}",
                        r.name,
                        r.indices.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(","),
                        r.lhs
                    ),
                }
            }
        }
    }
    if any_fail {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}
