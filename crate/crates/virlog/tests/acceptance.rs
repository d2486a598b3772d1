//! Acceptance criteria: one PASS/FAIL line per criterion, nonzero exit on failure.

use std::process::ExitCode;

use virlog::verify::criteria;

fn main() -> ExitCode {
    let mut failed = 0;
    for c in criteria() {
        let o = c.run();
        let status = if o.passed { "PASS" } else { "FAIL" };
        println!("{status} {}: {} [{:.2?}] {}", o.id, o.title, o.elapsed, o.detail);
        failed += usize::from(!o.passed);
    }
    if failed == 0 {
        println!("all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
