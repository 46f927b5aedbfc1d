//! Running named verification suites from library code and rendering the
//! reports.

use hyperconvex::report;
use hyperconvex::suites::{run_suite, SuiteParams};

fn main() {
    let params = SuiteParams { seed: 7, samples: Some(200_000), grid: 8 };
    let mut reports = Vec::new();
    for name in ["ma", "hyperconvex", "invariance", "metric", "charts"] {
        reports.extend(run_suite(name, &params).expect("known suite"));
    }
    report::sort_reports(&mut reports);
    print!("{}", report::to_table(&reports));
    std::process::exit(report::exit_code(&reports));
}
