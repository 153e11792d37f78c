// A declarative sweep over (μ, C, endpoint), written as CSV.

use qslchan::channel::Family;
use qslchan::output::to_csv;
use qslchan::scan::ScanGrid;
use qslchan::Result;

pub fn run_example() -> Result<()> {
    let grid = ScanGrid {
        family: Family::AmplitudeDamping,
        mu_values: vec![0.0, 1.0],
        c_values: vec![0.25, 0.5, 0.75],
        endpoint_values: vec![0.3, 0.7],
        fixed: vec![("rate".into(), 1.0)],
    };
    print!("{}", to_csv(&grid.run()?));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
