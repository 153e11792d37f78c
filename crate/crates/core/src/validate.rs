//! Self-check suite behind `qslchan validate`.
//!
//! Every check yields PASS, FAIL or INFO. INFO marks a place where the
//! reference formulas or claims are known not to hold exactly; those are
//! reported but never fail the run.

use std::fmt;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::analytic;
use crate::channel::{
    apply, correlated_kraus, d_rho_d_decay, evolved_closed_form, ChannelSpec, DecayPoint, Family,
};
use crate::error::Result;
use crate::matrix::singular_values;
use crate::qslt::{
    oracle_mixed, pure_ratio, pure_ratio_value, qslt_mixed, MixedBoundQuery, PureBoundQuery,
};
use crate::quad::Quadrature;
use crate::scan::{find_c_c, find_p_tau_c};
use crate::state::{bell_like_density, concurrence, BellLikeState, POSITIVITY_TOL};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const CROSS_CHECK_SAMPLES: usize = 500;
/// Entrywise tolerance between Kraus evolution and the closed forms.
pub const CROSS_CHECK_TOL: f64 = 1e-12;

/// C_c of amplitude damping at P_τ = 0.5 for μ = 0, 0.3, 0.6, 1, from an
/// independent dense-grid computation.
pub const C_C_REFERENCE: [(f64, f64); 4] = [
    (0.0, 0.003_464_094_254_355_1),
    (0.3, 0.002_922_738_722_503_141),
    (0.6, 0.002_480_647_692_925_850_7),
    (1.0, 0.001_998_287_298_570_366_4),
];
pub const C_C_SPREAD_TOL: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn count(&self, status: Status) -> usize {
        self.checks.iter().filter(|c| c.status == status).count()
    }

    pub fn render(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("{}  {:width$}  {}\n", c.status, c.name, c.detail));
        }
        out.push_str(&format!(
            "{} passed, {} failed, {} info in {:.1} s\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Info),
            self.seconds
        ));
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidateOptions {
    pub seed: u64,
    /// Multiply the first Kraus operator of every set by `1 + δ`.
    pub perturb_kraus: Option<f64>,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            perturb_kraus: None,
        }
    }
}

/// One random (family, μ, α, decay) sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sample {
    pub spec: ChannelSpec,
    pub state: BellLikeState,
    pub decay: DecayPoint,
}

/// Uniform samples: family, μ ∈ [0, 1], α ∈ [0, 1], decay ∈ (0, 1].
pub fn random_samples(seed: u64, n: usize) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let family = Family::ALL[rng.gen_range(0..3)];
            let mu: f64 = rng.gen_range(0.0..=1.0);
            let alpha: f64 = rng.gen_range(0.0..=1.0);
            let decay = 1.0 - rng.gen_range(0.0..1.0);
            Sample {
                spec: ChannelSpec::with_default_rate(family, mu).expect("mu in range"),
                state: BellLikeState::new(alpha).expect("alpha in range"),
                decay: DecayPoint::new(decay).expect("decay in range"),
            }
        })
        .collect()
}

fn outcome(name: &str, result: Result<(bool, String)>) -> Check {
    match result {
        Ok((ok, detail)) => Check {
            name: name.to_string(),
            status: if ok { Status::Pass } else { Status::Fail },
            detail,
        },
        Err(e) => Check {
            name: name.to_string(),
            status: Status::Fail,
            detail: e.to_string(),
        },
    }
}

fn info(name: &str, detail: String) -> Check {
    Check {
        name: name.to_string(),
        status: Status::Info,
        detail,
    }
}

fn kraus_checks(samples: &[Sample], perturb: Option<f64>) -> Vec<Check> {
    let mut worst_entry = 0.0f64;
    let mut worst_complete = 0.0f64;
    let mut worst_trace = 0.0f64;
    let mut min_eig = f64::INFINITY;
    let mut error = None;
    for s in samples {
        let mut k = correlated_kraus(&s.spec, s.decay);
        if let Some(delta) = perturb {
            k = k.with_scaled_operator(0, 1.0 + delta);
        }
        worst_complete = worst_complete.max(k.completeness_defect());
        match apply(&k, &bell_like_density(&s.state)) {
            Ok(rho) => {
                let closed = evolved_closed_form(&s.spec, &s.state, s.decay);
                worst_entry = worst_entry.max(rho.matrix().max_abs_diff(closed.matrix()));
                worst_trace = worst_trace.max((rho.matrix().trace().re - 1.0).abs());
                min_eig = min_eig.min(rho.min_eigenvalue());
            }
            Err(e) => {
                error.get_or_insert(e);
            }
        }
    }
    let n = samples.len();
    let cross = match &error {
        Some(e) => Err(e.clone()),
        None => Ok((
            worst_entry <= CROSS_CHECK_TOL,
            format!("{n} samples, max entry difference {worst_entry:.2e}"),
        )),
    };
    let complete = Ok((
        worst_complete <= CROSS_CHECK_TOL && worst_trace <= CROSS_CHECK_TOL && min_eig >= -POSITIVITY_TOL,
        format!("max completeness defect {worst_complete:.2e}, trace defect {worst_trace:.2e}, min eigenvalue {min_eig:.2e}"),
    ));
    vec![
        outcome("kraus_matches_closed_form", cross),
        outcome("kraus_completeness", complete),
    ]
}

fn phase_damping_ratio() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    let mut spread = 0.0f64;
    for i in 1..=20 {
        let c = i as f64 * 0.05;
        let s = BellLikeState::from_concurrence(c)?;
        for k in 0..10 {
            let p = 0.05 + 0.1 * k as f64;
            let mut vals = Vec::new();
            for mu in [0.0, 0.2, 0.4, 0.6, 0.8] {
                let v = pure_ratio(Family::PhaseDamping, mu, &s, p)?.unwrap_or(f64::INFINITY);
                worst = worst.max((v - c).abs());
                vals.push(v);
            }
            let (lo, hi) = vals
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
                    (a.min(v), b.max(v))
                });
            spread = spread.max(hi - lo);
        }
    }
    Ok((
        worst <= 1e-6 && spread < 1e-9,
        format!("1000 points, max |ratio - C| {worst:.2e}, max spread over mu {spread:.2e}"),
    ))
}

fn depolarizing_correlated() -> Result<(bool, String)> {
    let mut worst = 0.0f64;
    for i in 1..=9 {
        let c = i as f64 / 10.0;
        let s = BellLikeState::from_concurrence(c)?;
        for p in [0.1, 0.5, 0.9] {
            let v = pure_ratio(Family::Depolarizing, 1.0, &s, p)?.unwrap_or(f64::INFINITY);
            worst = worst.max((v - (1.0 - c * c).sqrt()).abs());
        }
    }
    Ok((
        worst <= 1e-6,
        format!("max |ratio - sqrt(1 - C^2)| {worst:.2e}"),
    ))
}

fn phase_damping_mixed() -> Result<(bool, String)> {
    let bell = BellLikeState::maximally_entangled();
    let mut worst = 0.0f64;
    let mut late = 0.0f64;
    for mu in [0.0, 0.3, 0.6, 1.0] {
        let spec = ChannelSpec::new(Family::PhaseDamping, mu, 0.5)?;
        for tau in [0.0, 0.5, 1.0, 2.0, 5.0] {
            let v = qslt_mixed(&MixedBoundQuery::new(spec, bell, tau, 1.0)?)?
                .value
                .unwrap_or(f64::INFINITY);
            let expected = oracle_mixed(&spec, &bell, tau, 1.0).unwrap_or(f64::INFINITY);
            worst = worst.max((v - expected).abs());
        }
        let v = qslt_mixed(&MixedBoundQuery::new(spec, bell, 10.0, 1.0)?)?
            .value
            .unwrap_or(f64::INFINITY);
        late = late.max((v - mu).abs());
    }
    Ok((
        worst <= 1e-4 && late <= 1e-3,
        format!("max closed-form difference {worst:.2e}, max |value(tau=10) - mu| {late:.2e}"),
    ))
}

fn crossover(report: &mut Vec<Check>) {
    let mut values = Vec::new();
    let mut pinned = Ok((true, String::new()));
    for (mu, reference) in C_C_REFERENCE {
        match find_c_c(mu, 0.5) {
            Ok(r) => match r.value {
                Some(v) => values.push((mu, v, reference)),
                None => {
                    pinned = Ok((false, format!("no crossover found at mu = {mu}")));
                }
            },
            Err(e) => pinned = Err(e),
        }
    }
    if matches!(pinned, Ok((true, _))) {
        let worst = values
            .iter()
            .map(|(_, v, r)| (v - r).abs())
            .fold(0.0, f64::max);
        pinned = Ok((
            worst <= 1e-6,
            format!("max difference from reference {worst:.2e}"),
        ));
    }
    report.push(outcome("ad_crossover_reference", pinned));
    if values.len() == C_C_REFERENCE.len() {
        let lo = values.iter().map(|v| v.1).fold(f64::INFINITY, f64::min);
        let hi = values.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);
        let listed: Vec<String> = values
            .iter()
            .map(|(mu, v, _)| format!("mu={mu}: {v:.6}"))
            .collect();
        let detail = format!(
            "C_c at P=0.5: {}; spread {:.2e}",
            listed.join(", "),
            hi - lo
        );
        if hi - lo < C_C_SPREAD_TOL {
            report.push(Check {
                name: "ad_crossover_mu_independent".into(),
                status: Status::Pass,
                detail,
            });
        } else {
            report.push(info(
                "ad_crossover_mu_independent",
                format!("{detail} exceeds {C_C_SPREAD_TOL:.0e}; C_c depends weakly on mu"),
            ));
        }
    }
}

fn ad_critical_population(report: &mut Vec<Check>) {
    let result = (|| -> Result<(bool, String)> {
        let mut values = Vec::new();
        for c in [0.2, 0.4, 0.6, 0.8] {
            values.push(find_p_tau_c(c, 1.0)?.value.unwrap_or(f64::INFINITY));
        }
        let ok = values.windows(2).all(|w| w[1] < w[0]);
        let listed: Vec<String> = values.iter().map(|v| format!("{v:.6}")).collect();
        Ok((
            ok,
            format!("P_tau_c at C = 0.2, 0.4, 0.6, 0.8: {}", listed.join(", ")),
        ))
    })();
    report.push(outcome("ad_critical_population_decreasing", result));

    match find_p_tau_c(0.01, 1.0) {
        Ok(r) if r.exists => report.push(info(
            "ad_critical_population_threshold",
            format!(
                "P_tau_c already exists at C = 0.01 (value {:.6}); no existence threshold near C = 0.05",
                r.value.unwrap_or(f64::INFINITY)
            ),
        )),
        Ok(_) => report.push(info(
            "ad_critical_population_threshold",
            "no P_tau_c at C = 0.01".into(),
        )),
        Err(e) => report.push(outcome("ad_critical_population_threshold", Err(e))),
    }
}

fn depolarizing_non_monotone() -> Result<(bool, String)> {
    let mut ok = true;
    let mut parts = Vec::new();
    for mu in [0.0, 0.3, 0.6] {
        let mut curve = Vec::new();
        for k in 1..100 {
            let c = k as f64 / 100.0;
            let s = BellLikeState::from_concurrence(c)?;
            curve.push(pure_ratio(Family::Depolarizing, mu, &s, 0.5)?.unwrap_or(f64::INFINITY));
        }
        let (first, last) = (curve[0], curve[curve.len() - 1]);
        let (imin, vmin) = curve[1..curve.len() - 1].iter().enumerate().fold(
            (0, f64::INFINITY),
            |acc, (i, &v)| if v < acc.1 { (i + 1, v) } else { acc },
        );
        ok &= vmin < first.min(last);
        parts.push(format!(
            "mu={mu}: min {vmin:.6} at C={:.2}",
            (imin + 1) as f64 / 100.0
        ));
    }
    Ok((ok, parts.join(", ")))
}

fn finite_differences(samples: &[Sample]) -> Result<(bool, String)> {
    let h = 1e-6;
    let mut worst = 0.0f64;
    for s in samples.iter().take(200) {
        let x = 0.05 + 0.9 * s.decay.value();
        let analytic = d_rho_d_decay(&s.spec, &s.state, x)?;
        let plus = evolved_closed_form(&s.spec, &s.state, DecayPoint::new(x + h)?);
        let minus = evolved_closed_form(&s.spec, &s.state, DecayPoint::new(x - h)?);
        let fd = (*plus.matrix() - *minus.matrix()).scale(0.5 / h);
        worst = worst.max(fd.max_abs_diff(&analytic));
    }
    Ok((
        worst <= 1e-8,
        format!("max |analytic - central difference| {worst:.2e}"),
    ))
}

fn quadrature_stability(samples: &[Sample]) -> Result<(bool, String)> {
    let fine = Quadrature::with_tol(Quadrature::default().tol / 2.0);
    let mut worst = 0.0f64;
    for s in samples.iter().take(30) {
        let q = PureBoundQuery {
            spec: s.spec,
            state: s.state,
            endpoint: s.decay,
        };
        if let (Some(a), Some(b)) = (
            pure_ratio_value(&q, &Quadrature::default())?,
            pure_ratio_value(&q, &fine)?,
        ) {
            worst = worst.max((a - b).abs());
        }
    }
    Ok((
        worst <= 1e-7,
        format!("max change when halving tolerance {worst:.2e}"),
    ))
}

fn non_degenerate(samples: &[Sample]) -> impl Iterator<Item = (Sample, f64)> + '_ {
    samples
        .iter()
        .filter(|s| {
            s.state.alpha() > 0.05 && !(s.spec.family == Family::Depolarizing && s.spec.mu > 0.99)
        })
        .map(|s| (*s, 0.02 + 0.96 * s.decay.value()))
        .take(100)
}

fn analytic_forms(samples: &[Sample], report: &mut Vec<Check>) {
    let result = (|| -> Result<(bool, String)> {
        let mut worst = 0.0f64;
        let mut worst_bures = 0.0f64;
        let mut n = 0;
        for (s, x) in non_degenerate(samples) {
            let numeric = singular_values(&d_rho_d_decay(&s.spec, &s.state, x)?)?;
            if let Some(closed) = analytic::singular_values(&s.spec, &s.state, x) {
                for (a, b) in closed.iter().zip(&numeric) {
                    worst = worst.max((a - b).abs());
                }
                n += 1;
            }
            let rho_t = evolved_closed_form(&s.spec, &s.state, DecayPoint::new(x)?);
            let direct = crate::state::bures_sin2(&bell_like_density(&s.state), &rho_t)?;
            worst_bures =
                worst_bures.max((direct - analytic::bures_sin2(&s.spec, &s.state, x)).abs());
        }
        Ok((
            worst <= 1e-9 && worst_bures <= 1e-12,
            format!("{n} points, max singular-value difference {worst:.2e}, max sin^2 B difference {worst_bures:.2e}"),
        ))
    })();
    report.push(outcome("closed_form_singular_values", result));

    let mut worst = 0.0f64;
    for (s, x) in non_degenerate(samples).filter(|(s, _)| s.spec.family == Family::AmplitudeDamping)
    {
        let a = analytic::amplitude_damping_with_sqrt_p(&s.spec, &s.state, x);
        let b = analytic::singular_values(&s.spec, &s.state, x);
        if let (Some(a), Some(b)) = (a, b) {
            for (u, v) in a.iter().zip(&b) {
                worst = worst.max((u - v).abs());
            }
        }
    }
    report.push(info(
        "ad_singular_values_sqrt_p_form",
        format!(
            "with sqrt(P) in place of 1/sqrt(P) in the coherence term the amplitude-damping sigmas differ by up to {worst:.3e}; the 1/sqrt(P) form is the one that matches"
        ),
    ));
}

fn depolarizing_stationarity() -> Result<Check> {
    let spec = ChannelSpec::with_default_rate(Family::Depolarizing, 1.0)?;
    let p = DecayPoint::new(0.5)?;
    let moved = |s: BellLikeState| {
        evolved_closed_form(&spec, &s, p)
            .matrix()
            .max_abs_diff(bell_like_density(&s).matrix())
    };
    let bell = BellLikeState::maximally_entangled();
    let product = BellLikeState::new(0.0)?;
    Ok(info(
        "depolarizing_correlated_stationarity",
        format!(
            "mu = 1, p = 0.5: C = {:.0} moves by {:.2e} (stationary), C = {:.0} moves by {:.3} (not stationary)",
            concurrence(&bell),
            moved(bell),
            concurrence(&product),
            moved(product)
        ),
    ))
}

pub fn run(opts: &ValidateOptions) -> Report {
    let start = Instant::now();
    let samples = random_samples(opts.seed, CROSS_CHECK_SAMPLES);
    let mut checks = kraus_checks(&samples, opts.perturb_kraus);
    checks.push(outcome(
        "phase_damping_ratio_is_concurrence",
        phase_damping_ratio(),
    ));
    checks.push(outcome(
        "depolarizing_correlated_ratio",
        depolarizing_correlated(),
    ));
    checks.push(outcome("phase_damping_mixed_bound", phase_damping_mixed()));
    crossover(&mut checks);
    ad_critical_population(&mut checks);
    checks.push(outcome(
        "depolarizing_ratio_non_monotone",
        depolarizing_non_monotone(),
    ));
    checks.push(outcome(
        "derivative_finite_differences",
        finite_differences(&samples),
    ));
    checks.push(outcome(
        "quadrature_tolerance_halving",
        quadrature_stability(&samples),
    ));
    analytic_forms(&samples, &mut checks);
    match depolarizing_stationarity() {
        Ok(c) => checks.push(c),
        Err(e) => checks.push(outcome("depolarizing_correlated_stationarity", Err(e))),
    }
    Report {
        checks,
        seconds: start.elapsed().as_secs_f64(),
    }
}
