// The validation suite, run in-process.

use qslchan::validate::{run, Status, ValidateOptions};
use qslchan::{Error, Result};

pub fn run_example() -> Result<()> {
    let report = run(&ValidateOptions::default());
    print!("{}", report.render());
    if report.passed() {
        Ok(())
    } else {
        Err(Error::Contract(format!(
            "{} checks failed",
            report.count(Status::Fail)
        )))
    }
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
