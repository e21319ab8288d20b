//! Acceptance run: every criterion is evaluated, its checks and findings are
//! printed, and one `PASS`/`FAIL` line per criterion closes the output. The
//! process exits nonzero when any criterion fails. Scale defaults to `desk`;
//! set `BICOLOR_SCALE=smoke` or `extended` to change it.

use std::process::ExitCode;

use bicolor_loops::verify::{run_criterion, Scale, CRITERIA};

fn main() -> ExitCode {
    let scale = std::env::var("BICOLOR_SCALE").ok().and_then(|s| Scale::parse(&s).ok()).unwrap_or(Scale::Desk);
    println!("acceptance criteria at scale {}", scale.name());
    let mut lines = Vec::new();
    let mut all_passed = true;
    for id in CRITERIA {
        match run_criterion(id, scale) {
            Ok(report) => {
                println!("{}\n", report.render());
                all_passed &= report.passed();
                lines.push(report.summary_line());
            }
            Err(e) => {
                all_passed = false;
                lines.push(format!("FAIL criterion {id}: errored: {e}"));
            }
        }
    }
    println!("summary");
    for line in &lines {
        println!("{line}");
    }
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
