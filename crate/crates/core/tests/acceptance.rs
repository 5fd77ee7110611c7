//! Runs every acceptance criterion and prints one line per criterion.

use std::process::ExitCode;

use websurf_core::acceptance::run_all;
use websurf_core::Tolerances;

fn main() -> ExitCode {
    // The libtest harness is off; ignore its flags and honour `--list`.
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let outcomes = run_all(&Tolerances::default(), |o| println!("{}", o.line()));
    let failed = outcomes.iter().filter(|o| !o.passed()).count();
    println!("acceptance: {} passed, {failed} failed", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
