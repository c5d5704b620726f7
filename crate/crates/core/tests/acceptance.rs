//! Runs every acceptance criterion at the default seed and prints one line each.

use std::process::ExitCode;

use hsp_core::acceptance::{self, ACCEPTANCE_SEED};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for &(id, name) in acceptance::CRITERIA.iter() {
        match acceptance::run_criterion(id, ACCEPTANCE_SEED) {
            Ok(report) => {
                println!("{report}");
                if !report.passed {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("[FAIL] C{id:<2} {name:<28} error: {e}");
                failed.push(id);
            }
        }
    }
    let total = acceptance::CRITERIA.len();
    println!("{} of {total} criteria passed", total - failed.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
