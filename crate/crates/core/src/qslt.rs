//! Quantum speed limit times.
//!
//! Two bounds are provided:
//!
//! * [`qslt_pure_ratio`]: the Margolus–Levitin-type bound for a pure initial
//!   state, `τ_QSL/τ = sin²B(ρ0, ρτ) / ∫₀^τ ‖ρ̇_t‖ dt`, evaluated with the
//!   Schatten 1, 2 and ∞ norms. The reported value is the largest reciprocal
//!   term, which is always the operator-norm one.
//! * [`qslt_mixed`]: the relative-purity bound over a driving window
//!   `[τ, τ + τ_D]`, valid for mixed states.
//!
//! Because every decay parameter is `u(t) = e^{−rate·t}` and strictly
//! monotone, the time integral in the pure bound is taken in the decay
//! domain instead: `∫₀^τ g(u(t)) |u̇| dt = ∫_{u_τ}^1 g(u) du`. The pure ratio
//! therefore depends only on the endpoint `u_τ`, not on `rate` or `τ`.

use serde::Serialize;

use crate::channel::{
    d_rho_d_path, evolved_closed_form, path_coordinate, ChannelSpec, DecayPoint, Family,
};
use crate::error::{Error, Result};
use crate::matrix::{schatten_norms, singular_values};
use crate::quad::Quadrature;
use crate::state::{bell_like_density, bures_sin2, concurrence, relative_purity, BellLikeState};

/// Numerators and denominators below this are treated as zero.
pub const STATIONARY_TOL: f64 = 1e-12;
const MIN_SCALE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureBoundQuery {
    pub spec: ChannelSpec,
    pub state: BellLikeState,
    /// Decay parameter of the final state (P_τ or p_τ).
    pub endpoint: DecayPoint,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixedBoundQuery {
    pub spec: ChannelSpec,
    pub state: BellLikeState,
    /// Window start, in time units.
    pub tau: f64,
    /// Driving time (window length).
    pub tau_d: f64,
}

impl MixedBoundQuery {
    pub fn new(spec: ChannelSpec, state: BellLikeState, tau: f64, tau_d: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::Domain(format!("tau must be nonnegative, got {tau}")));
        }
        if !(tau_d > 0.0 && tau_d.is_finite()) {
            return Err(Error::Domain(format!(
                "tau_d must be positive, got {tau_d}"
            )));
        }
        Ok(Self {
            spec,
            state,
            tau,
            tau_d,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Pure,
    Mixed,
}

/// One candidate term of a bound: `value = numerator / denominator`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTerm {
    pub name: &'static str,
    pub denominator: f64,
    pub value: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QsltResult {
    pub bound: Bound,
    /// Geometric distance term (sin²B, or |f − 1|·Tr(ρτ²)).
    pub numerator: f64,
    /// Speed term of the selected (largest) candidate.
    pub denominator: f64,
    /// τ_QSL/τ for the pure bound, τ_QSL for the mixed bound. `None` when the
    /// pure-bound evolution is stationary (0/0).
    pub value: Option<f64>,
    pub stationary: bool,
    pub terms: Vec<BoundTerm>,
}

fn pick_largest(terms: &[BoundTerm]) -> (f64, Option<f64>) {
    let best = terms
        .iter()
        .filter_map(|t| t.value.map(|v| (t.denominator, v)))
        .fold(None, |acc: Option<(f64, f64)>, cur| match acc {
            Some(a) if a.1 >= cur.1 => Some(a),
            _ => Some(cur),
        });
    match best {
        Some((den, v)) => (den, Some(v)),
        None => (terms.last().map(|t| t.denominator).unwrap_or(0.0), None),
    }
}

/// Integrates a vector integrand after dividing each component by its
/// largest magnitude on the coarse nodes, so that the absolute tolerance acts
/// on an O(1) integrand. The scale is floored at [`MIN_SCALE`] so that
/// round-off noise of a vanishing integrand is not amplified.
fn normalized_integral<F, const N: usize>(quad: &Quadrature, f: F, a: f64, b: f64) -> [f64; N]
where
    F: Fn(f64) -> [f64; N],
{
    let mut scale = [0.0f64; N];
    for k in 0..=4 {
        let x = a + (b - a) * k as f64 / 4.0;
        for (s, v) in scale.iter_mut().zip(f(x)) {
            *s = s.max(v.abs());
        }
    }
    let scale = scale.map(|s| if s.is_finite() { s.max(MIN_SCALE) } else { 1.0 });
    let raw: [f64; N] = quad.integrate_vec(
        |x| {
            let v = f(x);
            std::array::from_fn(|i| v[i] / scale[i])
        },
        a,
        b,
    );
    std::array::from_fn(|i| raw[i] * scale[i])
}

/// ∫ of the Schatten (1, 2, ∞) norms of dρ/du along the decay path from the
/// endpoint back to u = 1.
fn path_norm_integrals(q: &PureBoundQuery, quad: &Quadrature) -> Result<[f64; 3]> {
    let lo = path_coordinate(q.spec.family, q.endpoint.value());
    // Validate once so the integrand itself cannot fail.
    d_rho_d_path(&q.spec, &q.state, lo)?;
    Ok(normalized_integral(
        quad,
        |x| {
            let d = d_rho_d_path(&q.spec, &q.state, x).expect("coordinate within [0, 1]");
            schatten_norms(&singular_values(&d).expect("finite derivative"))
        },
        lo,
        1.0,
    ))
}

fn pure_numerator(q: &PureBoundQuery) -> Result<f64> {
    let rho0 = bell_like_density(&q.state);
    let rho_t = evolved_closed_form(&q.spec, &q.state, q.endpoint);
    bures_sin2(&rho0, &rho_t)
}

pub fn qslt_pure_ratio(q: &PureBoundQuery) -> Result<QsltResult> {
    qslt_pure_ratio_with(q, &Quadrature::default())
}

pub fn qslt_pure_ratio_with(q: &PureBoundQuery, quad: &Quadrature) -> Result<QsltResult> {
    let numerator = pure_numerator(q)?;
    let dens = path_norm_integrals(q, quad)?;
    let stationary = numerator < STATIONARY_TOL && dens[2] < STATIONARY_TOL;

    let names = ["schatten_1", "schatten_2", "schatten_inf"];
    let terms: Vec<BoundTerm> = names
        .iter()
        .zip(dens)
        .map(|(&name, den)| BoundTerm {
            name,
            denominator: den,
            value: (!stationary && den > 0.0).then(|| numerator / den),
        })
        .collect();
    let (denominator, value) = pick_largest(&terms);
    Ok(QsltResult {
        bound: Bound::Pure,
        numerator,
        denominator,
        value,
        stationary,
        terms,
    })
}

/// Operator-norm pure-bound ratio only; `None` when stationary. Cheaper than
/// [`qslt_pure_ratio`] and used by the sweeps and critical searches.
pub fn pure_ratio_value(q: &PureBoundQuery, quad: &Quadrature) -> Result<Option<f64>> {
    let numerator = pure_numerator(q)?;
    let lo = path_coordinate(q.spec.family, q.endpoint.value());
    d_rho_d_path(&q.spec, &q.state, lo)?;
    let [den] = normalized_integral(
        quad,
        |x| {
            let d = d_rho_d_path(&q.spec, &q.state, x).expect("coordinate within [0, 1]");
            [singular_values(&d).expect("finite derivative")[0]]
        },
        lo,
        1.0,
    );
    if numerator < STATIONARY_TOL && den < STATIONARY_TOL {
        return Ok(None);
    }
    Ok((den > 0.0).then(|| numerator / den))
}

/// Convenience wrapper: operator-norm ratio for a (family, μ, state, endpoint).
pub fn pure_ratio(
    family: Family,
    mu: f64,
    state: &BellLikeState,
    endpoint: f64,
) -> Result<Option<f64>> {
    let q = PureBoundQuery {
        spec: ChannelSpec::with_default_rate(family, mu)?,
        state: *state,
        endpoint: DecayPoint::new(endpoint)?,
    };
    pure_ratio_value(&q, &Quadrature::default())
}

pub fn qslt_mixed(q: &MixedBoundQuery) -> Result<QsltResult> {
    qslt_mixed_with(q, &Quadrature::default())
}

/// Relative-purity bound over the window `[τ, τ + τ_D]`:
/// `τ_QSL = max{1/⟨Σ σ_i ρ_i⟩, 1/⟨√Σ σ_i²⟩} · |f − 1| · Tr(ρτ²)`, where σ_i are
/// the singular values of ρ̇_t, ρ_i those of ρτ (both descending) and ⟨·⟩ is
/// the window average.
pub fn qslt_mixed_with(q: &MixedBoundQuery, quad: &Quadrature) -> Result<QsltResult> {
    let mut r = mixed_raw(q, quad)?;
    if r.stationary {
        r.value = stationary_limit(q, quad)?;
    }
    Ok(r)
}

fn mixed_raw(q: &MixedBoundQuery, quad: &Quadrature) -> Result<QsltResult> {
    let spec = &q.spec;
    let start = evolved_closed_form(spec, &q.state, spec.decay_at(q.tau)?);
    let end = evolved_closed_form(spec, &q.state, spec.decay_at(q.tau + q.tau_d)?);
    let purity = start.purity();
    let f = relative_purity(&start, &end)?;
    let numerator = (f - 1.0).abs() * purity;
    let rho_sv = singular_values(start.matrix())?;

    // Path coordinate x(t) and its time derivative.
    let (exponent, coordinate_rate) = match spec.family {
        Family::AmplitudeDamping => (0.5 * spec.rate, 0.5 * spec.rate),
        Family::PhaseDamping | Family::Depolarizing => (spec.rate, spec.rate),
    };
    let speed = |t: f64| -> [f64; 2] {
        let x = (-exponent * t).exp();
        let d = d_rho_d_path(spec, &q.state, x)
            .expect("coordinate within [0, 1]")
            .scale(-coordinate_rate * x);
        let sv = singular_values(&d).expect("finite derivative");
        let paired: f64 = sv.iter().zip(&rho_sv).map(|(s, r)| s * r).sum();
        let frob = sv.iter().map(|s| s * s).sum::<f64>().sqrt();
        [paired, frob]
    };
    let integrals = normalized_integral(quad, speed, q.tau, q.tau + q.tau_d);
    let means = integrals.map(|v| v / q.tau_d);

    let stationary = numerator < STATIONARY_TOL;
    let terms: Vec<BoundTerm> = ["relative_purity_ml", "relative_purity_mt"]
        .iter()
        .zip(means)
        .map(|(&name, mean)| BoundTerm {
            name,
            denominator: mean,
            value: (!stationary && mean > 0.0).then(|| numerator / mean),
        })
        .collect();
    let (denominator, value) = pick_largest(&terms);
    Ok(QsltResult {
        bound: Bound::Mixed,
        numerator,
        denominator,
        value: if stationary { None } else { value },
        stationary,
        terms,
    })
}

/// Step in μ used to approach a frozen window from below.
pub const MIXED_LIMIT_STEP: f64 = 1e-4;

/// A frozen window gives 0/0. Its value is taken as the μ → μ⁻ limit,
/// extrapolated linearly from μ − ε and μ − 2ε; 0 when those are frozen too.
fn stationary_limit(q: &MixedBoundQuery, quad: &Quadrature) -> Result<Option<f64>> {
    let eps = MIXED_LIMIT_STEP;
    if q.spec.mu < 2.0 * eps {
        return Ok(Some(0.0));
    }
    let at = |mu: f64| -> Result<QsltResult> {
        let spec = ChannelSpec::new(q.spec.family, mu, q.spec.rate)?;
        mixed_raw(&MixedBoundQuery { spec, ..*q }, quad)
    };
    let (near, far) = (at(q.spec.mu - eps)?, at(q.spec.mu - 2.0 * eps)?);
    if near.stationary || far.stationary {
        return Ok(Some(0.0));
    }
    Ok(match (near.value, far.value) {
        (Some(a), Some(b)) => Some(2.0 * a - b),
        _ => None,
    })
}

/// Closed-form pure-bound ratio where one exists: C for phase damping (any
/// μ), √(1 − C²) for fully correlated depolarizing.
pub fn oracle_ratio(
    spec: &ChannelSpec,
    state: &BellLikeState,
    _endpoint: DecayPoint,
) -> Option<f64> {
    let c = concurrence(state);
    match spec.family {
        Family::PhaseDamping => Some(c),
        Family::Depolarizing if spec.mu == 1.0 => Some((1.0 - c * c).max(0.0).sqrt()),
        _ => None,
    }
}

/// Closed-form relative-purity bound for phase damping:
/// `τ_QSL = 2 τ_D αβ (μ + (1 − μ) e^{−2γτ})`, which is
/// `2e^{−τ}αβ(1 − μ) + 2αβμ` at γ = 1/2, τ_D = 1.
pub fn oracle_mixed(
    spec: &ChannelSpec,
    state: &BellLikeState,
    tau: f64,
    tau_d: f64,
) -> Option<f64> {
    match spec.family {
        Family::PhaseDamping => {
            let ab = state.alpha() * state.beta();
            Some(2.0 * tau_d * ab * (spec.mu + (1.0 - spec.mu) * (-2.0 * spec.rate * tau).exp()))
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn pure(f: Family, mu: f64, s: BellLikeState, endpoint: f64) -> QsltResult {
        qslt_pure_ratio(&PureBoundQuery {
            spec: ChannelSpec::with_default_rate(f, mu).unwrap(),
            state: s,
            endpoint: DecayPoint::new(endpoint).unwrap(),
        })
        .unwrap()
    }

    #[test]
    fn phase_damping_ratio_is_concurrence() {
        let s = BellLikeState::from_concurrence(0.5).unwrap();
        for mu in [0.0, 0.3, 0.7] {
            let r = pure(Family::PhaseDamping, mu, s, 0.3);
            assert!((r.value.unwrap() - 0.5).abs() < 1e-9, "{r:?}");
            // ∫ 2pαβ(1 − μ) dp from 0.3 to 1, in closed form.
            let den = s.alpha() * s.beta() * (1.0 - mu) * (1.0 - 0.09);
            assert!((r.denominator - den).abs() < 1e-12);
        }
    }

    #[test]
    fn correlated_depolarizing_ratio() {
        let s = BellLikeState::from_concurrence(0.6).unwrap();
        for p in [0.1, 0.5, 0.9] {
            let r = pure(Family::Depolarizing, 1.0, s, p);
            assert!((r.value.unwrap() - 0.8).abs() < 1e-9);
        }
    }

    #[test]
    fn amplitude_damping_excited_state_has_no_speedup() {
        let r = pure(
            Family::AmplitudeDamping,
            0.0,
            BellLikeState::new(0.0).unwrap(),
            0.5,
        );
        assert!((r.numerator - 0.75).abs() < 1e-15);
        assert!((r.denominator - 0.75).abs() < 1e-12);
        assert!((r.value.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stationary_cases() {
        let s = BellLikeState::from_concurrence(0.5).unwrap();
        let r = pure(Family::AmplitudeDamping, 0.4, s, 1.0);
        assert!(r.stationary && r.value.is_none());
        let r = pure(Family::PhaseDamping, 1.0, s, 0.3);
        assert!(r.stationary && r.value.is_none());
        let r = pure(
            Family::Depolarizing,
            1.0,
            BellLikeState::maximally_entangled(),
            0.3,
        );
        assert!(r.stationary);
    }

    #[test]
    fn operator_norm_term_dominates() {
        for f in Family::ALL {
            let r = pure(f, 0.4, BellLikeState::new(0.45).unwrap(), 0.35);
            let v: Vec<f64> = r.terms.iter().map(|t| t.value.unwrap()).collect();
            assert!(v[2] >= v[0] && v[2] >= v[1]);
            assert_eq!(r.value, Some(v[2]));
            assert!(v[2] <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn fast_path_agrees() {
        let s = BellLikeState::new(0.3).unwrap();
        for f in Family::ALL {
            let full = pure(f, 0.6, s, 0.2).value.unwrap();
            let fast = pure_ratio(f, 0.6, &s, 0.2).unwrap().unwrap();
            assert!((full - fast).abs() < 1e-8);
        }
    }

    #[test]
    fn mixed_phase_damping_closed_form() {
        let bell = BellLikeState::new(FRAC_1_SQRT_2).unwrap();
        let spec = ChannelSpec::new(Family::PhaseDamping, 0.0, 0.5).unwrap();
        let r = qslt_mixed(&MixedBoundQuery::new(spec, bell, 0.0, 1.0).unwrap()).unwrap();
        assert!((r.value.unwrap() - 1.0).abs() < 1e-6, "{r:?}");

        let spec = ChannelSpec::new(Family::PhaseDamping, 0.5, 0.5).unwrap();
        let r = qslt_mixed(&MixedBoundQuery::new(spec, bell, 2.0, 1.0).unwrap()).unwrap();
        let expected = 0.5 * (-2f64).exp() + 0.5;
        assert!((r.value.unwrap() - expected).abs() < 1e-6);
        assert!((expected - 0.567_667_6).abs() < 1e-6);
    }

    #[test]
    fn mixed_frozen_window() {
        let s = BellLikeState::new(0.6).unwrap();
        let spec = ChannelSpec::new(Family::PhaseDamping, 1.0, 0.5).unwrap();
        let r = qslt_mixed(&MixedBoundQuery::new(spec, s, 1.0, 1.0).unwrap()).unwrap();
        assert!(r.stationary);
        // Limit from below: 2τ_D αβ.
        let expected = 2.0 * 0.6 * 0.8;
        assert!((r.value.unwrap() - expected).abs() < 1e-6, "{r:?}");

        let ground = BellLikeState::new(1.0).unwrap();
        let ad = ChannelSpec::new(Family::AmplitudeDamping, 0.5, 1.0).unwrap();
        let r = qslt_mixed(&MixedBoundQuery::new(ad, ground, 1.0, 1.0).unwrap()).unwrap();
        assert!(r.stationary);
        assert_eq!(r.value, Some(0.0));
    }

    #[test]
    fn mixed_query_domain() {
        let s = BellLikeState::new(0.6).unwrap();
        let spec = ChannelSpec::new(Family::PhaseDamping, 0.5, 0.5).unwrap();
        assert!(MixedBoundQuery::new(spec, s, -1.0, 1.0).is_err());
        assert!(MixedBoundQuery::new(spec, s, 0.0, 0.0).is_err());
    }

    #[test]
    fn oracle_availability() {
        let s = BellLikeState::from_concurrence(0.9).unwrap();
        let e = DecayPoint::new(0.5).unwrap();
        let pd = ChannelSpec::with_default_rate(Family::PhaseDamping, 0.2).unwrap();
        assert!((oracle_ratio(&pd, &s, e).unwrap() - 0.9).abs() < 1e-14);
        let dep = ChannelSpec::with_default_rate(Family::Depolarizing, 1.0).unwrap();
        assert_eq!(
            oracle_ratio(&dep, &BellLikeState::maximally_entangled(), e),
            Some(0.0)
        );
        let ad = ChannelSpec::with_default_rate(Family::AmplitudeDamping, 1.0).unwrap();
        assert_eq!(oracle_ratio(&ad, &s, e), None);
        let dep_partial = ChannelSpec::with_default_rate(Family::Depolarizing, 0.5).unwrap();
        assert_eq!(oracle_ratio(&dep_partial, &s, e), None);
    }
}
