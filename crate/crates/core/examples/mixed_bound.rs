// Relative-purity bound for a Bell state under phase damping, next to its
// closed form.

use qslchan::channel::{ChannelSpec, Family};
use qslchan::qslt::{oracle_mixed, qslt_mixed, MixedBoundQuery};
use qslchan::state::BellLikeState;
use qslchan::Result;

pub fn run_example() -> Result<()> {
    let bell = BellLikeState::maximally_entangled();
    println!(
        "{:>5} {:>6} {:>12} {:>12}",
        "tau", "mu", "tau_QSL", "closed form"
    );
    for mu in [0.0, 0.3, 0.6, 1.0] {
        let spec = ChannelSpec::new(Family::PhaseDamping, mu, 0.5)?;
        for tau in [0.0, 1.0, 2.0, 5.0, 10.0] {
            let r = qslt_mixed(&MixedBoundQuery::new(spec, bell, tau, 1.0)?)?;
            let closed = oracle_mixed(&spec, &bell, tau, 1.0).unwrap_or(f64::NAN);
            println!(
                "{tau:>5.1} {mu:>6.1} {:>12.8} {closed:>12.8}",
                r.value.unwrap_or(f64::NAN)
            );
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
