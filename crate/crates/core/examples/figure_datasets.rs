// Every figure dataset on a coarse grid, plus an SVG rendering of one.

use qslchan::output::{to_csv, to_svg};
use qslchan::scan::{figure_dataset, FigureId};
use qslchan::Result;

pub fn run_example() -> Result<()> {
    for id in FigureId::ALL {
        let d = figure_dataset(id, 10)?;
        let csv = to_csv(&d);
        println!("== {id}: {} rows", d.rows.len());
        for line in csv.lines().take(3) {
            println!("{line}");
        }
    }
    let d = figure_dataset(FigureId::Fig5a, 20)?;
    let (x, y) = FigureId::Fig5a.axis_labels();
    let svg = to_svg(&d, x, y);
    println!(
        "fig5a svg: {} bytes, {} polylines",
        svg.len(),
        svg.matches("<polyline").count()
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
