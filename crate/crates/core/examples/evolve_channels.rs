// Send a Bell-like state through each correlated channel and compare the
// Kraus evolution with the closed-form state.

use qslchan::channel::{
    apply, correlated_kraus, evolved_closed_form, ChannelSpec, DecayPoint, Family,
};
use qslchan::state::{bell_like_density, BellLikeState};
use qslchan::Result;

pub fn run_example() -> Result<()> {
    let state = BellLikeState::from_concurrence(0.8)?;
    let decay = DecayPoint::new(0.4)?;
    for family in Family::ALL {
        for mu in [0.0, 0.5, 1.0] {
            let spec = ChannelSpec::with_default_rate(family, mu)?;
            let kraus = correlated_kraus(&spec, decay);
            let evolved = apply(&kraus, &bell_like_density(&state))?;
            let closed = evolved_closed_form(&spec, &state, decay);
            let m = closed.matrix();
            println!(
                "{family:>5} mu={mu:.1}: {} operators, diag = [{:.4}, {:.4}, {:.4}, {:.4}], coherence = {:.4}, |kraus - closed| = {:.1e}",
                kraus.len(),
                m[(0, 0)].re,
                m[(1, 1)].re,
                m[(2, 2)].re,
                m[(3, 3)].re,
                m[(0, 3)].re,
                evolved.matrix().max_abs_diff(m)
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
