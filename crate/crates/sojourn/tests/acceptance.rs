//! Full-size acceptance suite: one line per criterion, non-zero exit on any failure.

use sojourn::cli::DEFAULT_SEED;
use sojourn::parallel::Parallel;
use sojourn::verify::{detail_lines, run_criterion, summary_line, Mode, CRITERIA};

fn main() {
    let exec = Parallel::new(None).expect("thread pool");
    let mut failed = Vec::new();
    for (id, _) in CRITERIA {
        let report = run_criterion(id, Mode::Full, DEFAULT_SEED, &exec);
        println!("{}", summary_line(&report));
        if !report.pass {
            for line in detail_lines(&report) {
                println!("{line}");
            }
            failed.push(id);
        }
    }
    println!("{}/{} criteria passed", CRITERIA.len() - failed.len(), CRITERIA.len());
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
