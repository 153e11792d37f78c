//! Closed-form singular values of dρ/du and Bures overlaps for the three
//! channel families, written exactly as derived by hand from the evolved
//! states. These are cross-checks only; the bounds themselves always use the
//! numerical singular values of the analytic derivative matrix.
//!
//! Singular values here are those of dρ/du (the factor |u̇| is divided out).

use crate::channel::{ChannelSpec, Family};
use crate::state::BellLikeState;

fn sorted_desc(mut v: [f64; 4]) -> [f64; 4] {
    v.sort_by(|x, y| y.total_cmp(x));
    v
}

/// σ1…σ4 of dρ/du, sorted descending, or `None` at points where the
/// expressions divide by zero (α = 0 or P = 0 for amplitude damping, μ = 1
/// for depolarizing).
pub fn singular_values(spec: &ChannelSpec, s: &BellLikeState, decay: f64) -> Option<[f64; 4]> {
    match spec.family {
        Family::AmplitudeDamping => {
            if s.alpha() == 0.0 || decay <= 0.0 {
                return None;
            }
            let x = s.alpha() * (spec.mu / decay.sqrt() + 2.0 * (1.0 - spec.mu));
            Some(amplitude_damping(spec.mu, s, decay, x))
        }
        Family::PhaseDamping => {
            let v = (2.0 * decay * s.alpha() * s.beta() * (-1.0 + spec.mu)).abs();
            Some([v, v, 0.0, 0.0])
        }
        Family::Depolarizing => {
            if spec.mu == 1.0 {
                return None;
            }
            let (a, b, mu, p) = (s.alpha(), s.beta(), spec.mu, decay);
            let k = (1.0 + 2.0 * p) * (1.0 - mu);
            let ab2 = a * a * b * b;
            let q = (16.0 * ab2
                + 9.0 * (1.0 - 4.0 * ab2) / ((mu - 1.0).powi(2) * (2.0 * p + 1.0).powi(2)))
            .sqrt();
            let s12 = k.abs() / 9.0;
            Some(sorted_desc([
                s12,
                s12,
                (k + k * q).abs() / 9.0,
                (k - k * q).abs() / 9.0,
            ]))
        }
    }
}

/// Amplitude-damping σ's with the coherence term carrying √P instead of
/// 1/√P. Differs from the numerical singular values whenever μ > 0.
pub fn amplitude_damping_with_sqrt_p(
    spec: &ChannelSpec,
    s: &BellLikeState,
    decay: f64,
) -> Option<[f64; 4]> {
    if spec.family != Family::AmplitudeDamping || s.alpha() == 0.0 {
        return None;
    }
    let x = s.alpha() * (spec.mu * decay.sqrt() + 2.0 * (1.0 - spec.mu));
    Some(amplitude_damping(spec.mu, s, decay, x))
}

fn amplitude_damping(mu: f64, s: &BellLikeState, p: f64, x: f64) -> [f64; 4] {
    let b = s.beta();
    let m = (-1.0 + mu) * b * b * (-1.0 + 2.0 * p);
    let r = (b / 2.0) * x.abs() * (1.0 + 4.0 * b * b / (x * x)).sqrt();
    sorted_desc([m.abs(), m.abs(), (m + r).abs(), (m - r).abs()])
}

/// sin²B(ρ0, ρτ) in closed form.
pub fn bures_sin2(spec: &ChannelSpec, s: &BellLikeState, decay: f64) -> f64 {
    let (a, b, mu, x) = (s.alpha(), s.beta(), spec.mu, decay);
    let (a2, b2) = (a * a, b * b);
    match spec.family {
        Family::AmplitudeDamping => (-1.0
            + a2 * a2
            + x * b2 * b2 * (x + mu - x * mu)
            + a2 * b2 * (1.0 - x * x * (-1.0 + mu) + 2.0 * x.sqrt() * mu - x * mu))
            .abs(),
        Family::PhaseDamping => 2.0 * ((1.0 - x * x) * a2 * b2 * (-1.0 + mu)).abs(),
        Family::Depolarizing => {
            ((-1.0 + x) * (5.0 + x * (-1.0 - 8.0 * b2 + 8.0 * b2 * b2) * (-1.0 + mu)) / 9.0
                - (-1.0 + x) * 2.0 * mu / 9.0
                + (-1.0 + x) * 4.0 * b2 * (-1.0 + b2) * (-1.0 + 4.0 * mu) / 9.0)
                .abs()
        }
    }
}
