//! Acceptance criteria, one PASS/FAIL line each with the measured values.
//! Runs every criterion even after a failure; exits non-zero if any failed.
//! Criteria carry wall-clock budgets, so they run one at a time.

use std::process::ExitCode;

use jqf_core::regression::CRITERIA;

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (k, f) in CRITERIA.iter().enumerate() {
        let id = (k + 1).to_string();
        if !filter.is_empty() && !filter.contains(&id) {
            continue;
        }
        let outcome = f();
        println!("{}", outcome.line());
        for m in &outcome.metrics {
            println!("    {} = {:.9e}  [{}]", m.name, m.value, m.source);
        }
        if !outcome.passed {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("acceptance: {failed} criterion(s) failed");
        ExitCode::FAILURE
    } else {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    }
}
