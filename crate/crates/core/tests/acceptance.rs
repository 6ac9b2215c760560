//! Acceptance criteria 1–10 at desk scale. Prints one PASS/FAIL line per
//! criterion followed by its individual checks, and exits nonzero if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use sepvol::verify::{Verifier, VerifyOptions};

fn main() -> ExitCode {
    let verifier = Verifier::new(VerifyOptions::default());
    let start = Instant::now();
    let mut failed = Vec::new();
    println!("acceptance criteria, desk scale");
    for id in 1..=10 {
        let t = Instant::now();
        match verifier.criterion(id) {
            Ok(outcome) => {
                print!("{outcome}");
                println!("       ({:.2}s)", t.elapsed().as_secs_f64());
                if !outcome.passed() {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("FAIL [{id:>2}] error: {e}");
                failed.push(id);
            }
        }
    }
    println!(
        "{} of 10 criteria passed in {:.1}s",
        10 - failed.len(),
        start.elapsed().as_secs_f64()
    );
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("failed: {failed:?}");
        ExitCode::FAILURE
    }
}
