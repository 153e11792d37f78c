// Critical-value searches: C_c and P_τc for amplitude damping, μ^critical
// for depolarizing.

use qslchan::scan::{find_c_c, find_mu_critical, find_p_tau_c, CriticalResult};
use qslchan::Result;

fn show(label: &str, r: &CriticalResult) {
    match (r.value, r.bracket) {
        (Some(v), Some((lo, hi))) => {
            println!(
                "{label}: {v:.8} in [{lo:.8}, {hi:.8}] after {} bisections",
                r.iterations
            )
        }
        _ => println!("{label}: none"),
    }
}

pub fn run_example() -> Result<()> {
    for mu in [0.0, 0.3, 0.6, 1.0] {
        show(&format!("C_c(mu={mu}, P=0.5)"), &find_c_c(mu, 0.5)?);
    }
    for c in [0.2, 0.4, 0.6, 0.8] {
        show(&format!("P_tau_c(C={c}, mu=1)"), &find_p_tau_c(c, 1.0)?);
    }
    for c in [0.2, 0.5, 0.8] {
        show(
            &format!("mu_critical(C={c}, p=0.5)"),
            &find_mu_critical(c, 0.5)?,
        );
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
