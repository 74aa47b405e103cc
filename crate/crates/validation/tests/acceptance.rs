//! Prints one pass/fail line per acceptance criterion and exits nonzero if
//! any criterion fails. Set `HITRUN_HEAVY=1` for the optional large cases.

use std::process::ExitCode;

use hitrun_validation::{run_all, HEAVY_ENV};

fn main() -> ExitCode {
    let heavy = std::env::var(HEAVY_ENV).is_ok_and(|v| v == "1");
    let outcomes = run_all(heavy);
    for o in &outcomes {
        println!(
            "criterion {:>2} {}: {} [{:.1}s]",
            o.criterion,
            if o.passed { "PASS" } else { "FAIL" },
            o.detail,
            o.seconds
        );
    }
    let failed: Vec<usize> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.criterion)
        .collect();
    if failed.is_empty() {
        println!("acceptance: all {} criteria pass", outcomes.len());
        ExitCode::SUCCESS
    } else {
        println!(
            "acceptance: {} of {} criteria fail: {failed:?}",
            failed.len(),
            outcomes.len()
        );
        ExitCode::FAILURE
    }
}
