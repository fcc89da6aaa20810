//! One line per acceptance criterion, PASS or FAIL.

use wittlab::selftest::{run_suite, SuiteConfig, SUITES};

fn main() {
    let cfg = SuiteConfig::default();
    let mut failed = 0;
    for info in SUITES {
        let report = run_suite(info, &cfg);
        println!("{}", report.line());
        for f in report.failures.iter().skip(1) {
            println!("    also: {f}");
        }
        if !(report.passed && report.within_budget()) {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", SUITES.len() - failed, SUITES.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
