//! The ten acceptance criteria, one PASS/FAIL line each.

use regsemi::scenarios::{self, Options, Scenario};
use regsemi::Result;
use std::process::ExitCode;
use std::time::Instant;

struct Line {
    pass: bool,
    detail: String,
}

fn from_scenario(s: Result<Scenario>) -> Line {
    match s {
        Ok(s) => {
            let failing: Vec<String> = s.reports.iter().filter(|r| !r.pass).map(|r| format!("{} ({:.3e} > {:.1e})", r.name, r.worst(), r.tolerance)).collect();
            let notes: Vec<&str> = s.reports.iter().flat_map(|r| r.notes.iter().map(String::as_str)).filter(|n| n.starts_with("kappa") || n.starts_with("sigma")).collect();
            let ratio = s.reports.iter().map(|r| if r.tolerance > 0.0 { r.worst() / r.tolerance } else { r.worst() }).fold(0.0, f64::max);
            let mut detail = format!("{} checks, worst residual/tolerance {ratio:.3e}", s.reports.len());
            if !notes.is_empty() {
                detail += &format!("; {}", notes.join("; "));
            }
            if !failing.is_empty() {
                detail += &format!("; failing: {}", failing.join(", "));
            }
            Line { pass: s.pass(), detail }
        }
        Err(e) => Line { pass: false, detail: format!("aborted: {e}") },
    }
}

fn controls(opts: &Options) -> Line {
    match scenarios::negative_controls(opts) {
        Ok(list) => {
            let bad: Vec<&str> = list.iter().filter(|o| !o.failed_as_expected).map(|o| o.control.as_str()).collect();
            let weakest = list.iter().map(|o| o.report.worst() / o.report.tolerance).fold(f64::INFINITY, f64::min);
            let mut detail = format!("{} corrupted checks, smallest residual/tolerance {weakest:.3e}", list.len());
            if !bad.is_empty() {
                detail += &format!("; passed unexpectedly: {}", bad.join(", "));
            }
            Line { pass: bad.is_empty(), detail }
        }
        Err(e) => Line { pass: false, detail: format!("aborted: {e}") },
    }
}

fn main() -> ExitCode {
    let opts = Options::default();
    let criteria: Vec<(&str, Box<dyn Fn() -> Line>)> = vec![
        ("1 matrix-oracle consistency", Box::new(|| from_scenario(scenarios::matrix_oracle(&opts)))),
        ("2 alpha-independence", Box::new(|| from_scenario(scenarios::galpha_independence(&opts)))),
        ("3 Weyl calculus", Box::new(|| from_scenario(scenarios::weyl_calculus(&opts)))),
        ("4 mollifier lower bound", Box::new(|| from_scenario(scenarios::mollifier_bound()))),
        ("5 mollifier contour vanishing", Box::new(|| from_scenario(scenarios::mollifier_vanishing(&opts)))),
        ("6 regularized semigroup battery", Box::new(|| from_scenario(scenarios::semigroup_battery(&opts)))),
        ("7 multiplication closed form", Box::new(|| from_scenario(scenarios::ex32(&opts)))),
        ("8 left-derivative battery", Box::new(|| from_scenario(scenarios::ex33(&opts)))),
        ("9 Robin two-path agreement", Box::new(|| from_scenario(scenarios::ex35(&opts)))),
        ("10 negative controls", Box::new(|| controls(&opts))),
    ];
    let mut all = true;
    for (name, run) in &criteria {
        let start = Instant::now();
        let line = run();
        all &= line.pass;
        println!("{} criterion {name}: {} [{:.1}s]", if line.pass { "PASS" } else { "FAIL" }, line.detail, start.elapsed().as_secs_f64());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
