// Pure-state speed-limit ratio τ_QSL/τ with its three Schatten-norm terms.

use qslchan::channel::{ChannelSpec, DecayPoint, Family};
use qslchan::qslt::{oracle_ratio, qslt_pure_ratio, PureBoundQuery};
use qslchan::state::BellLikeState;
use qslchan::Result;

pub fn run_example() -> Result<()> {
    let state = BellLikeState::from_concurrence(0.5)?;
    let endpoint = DecayPoint::new(0.5)?;
    for family in Family::ALL {
        for mu in [0.0, 0.3, 0.6, 1.0] {
            let spec = ChannelSpec::with_default_rate(family, mu)?;
            let r = qslt_pure_ratio(&PureBoundQuery {
                spec,
                state,
                endpoint,
            })?;
            let terms: Vec<String> = r
                .terms
                .iter()
                .map(|t| {
                    format!(
                        "{}={}",
                        t.name,
                        t.value.map_or("-".into(), |v| format!("{v:.6}"))
                    )
                })
                .collect();
            let oracle = oracle_ratio(&spec, &state, endpoint)
                .map_or(String::new(), |v| format!(" (closed form {v:.6})"));
            match r.value {
                Some(v) => println!(
                    "{family:>5} mu={mu:.1}: ratio {v:.6}{oracle}  [{}]",
                    terms.join(", ")
                ),
                None => println!("{family:>5} mu={mu:.1}: stationary"),
            }
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
