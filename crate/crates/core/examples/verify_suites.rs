//! Runs every randomized verification suite at a small size.

use nsw::verify::{run_suite, Suite, VerifyOptions};

fn main() {
    let options = VerifyOptions { seeds: 20, ..VerifyOptions::default() };
    for suite in [Suite::Gurvits, Suite::Duality, Suite::Lemma8, Suite::Etomk, Suite::Counting] {
        let report = run_suite(suite, &options);
        println!("{suite:?}: {} cases, {} failures, min margin {:?}", report.cases, report.failures, report.min_margin);
    }
}
