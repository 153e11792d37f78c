//! Parameter sweeps, critical-value searches and the figure datasets.
//!
//! Critical searches share one pattern: a coarse scan (step
//! [`COARSE_STEP`]) locates the first grid cell where a predicate flips to
//! true, then bisection shrinks that cell below [`BRACKET_WIDTH`]. The
//! returned bracket always has the predicate false at `lo` and true at `hi`,
//! except when the predicate already holds at the start of the domain, in
//! which case `lo == hi` is that start point.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channel::{ChannelSpec, DecayPoint, Family};
use crate::error::{Error, Result};
use crate::qslt::{pure_ratio_value, qslt_mixed, qslt_pure_ratio, MixedBoundQuery, PureBoundQuery};
use crate::quad::Quadrature;
use crate::state::BellLikeState;

/// "Speedup" means a ratio below `1 − SPEEDUP_EPS`.
pub const SPEEDUP_EPS: f64 = 1e-6;
/// Coarse scan step before bisection.
pub const COARSE_STEP: f64 = 0.01;
/// Final bracket width of every bisection.
pub const BRACKET_WIDTH: f64 = 1e-7;
/// A correlation advantage must be at least this large to count.
pub const ADVANTAGE_TOL: f64 = 1e-9;
/// Default number of grid intervals per swept axis.
pub const DEFAULT_POINTS: usize = 200;

const COARSE_CELLS: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalResult {
    pub exists: bool,
    pub value: Option<f64>,
    pub bracket: Option<(f64, f64)>,
    pub iterations: u32,
}

impl CriticalResult {
    fn absent() -> Self {
        Self {
            exists: false,
            value: None,
            bracket: None,
            iterations: 0,
        }
    }

    fn at(lo: f64, hi: f64, iterations: u32) -> Self {
        Self {
            exists: true,
            value: Some(0.5 * (lo + hi)),
            bracket: Some((lo, hi)),
            iterations,
        }
    }
}

/// Shrinks `[lo, hi]` with `pred(lo) == false`, `pred(hi) == true`.
fn bisect<F>(mut lo: f64, mut hi: f64, pred: F) -> Result<CriticalResult>
where
    F: Fn(f64) -> Result<bool>,
{
    let mut iterations = 0;
    while hi - lo >= BRACKET_WIDTH {
        let mid = 0.5 * (lo + hi);
        if pred(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
        iterations += 1;
    }
    Ok(CriticalResult::at(lo, hi, iterations))
}

/// First crossing of `pred` along `grid` (in order), refined by bisection.
fn first_crossing<F>(grid: &[f64], pred: F) -> Result<CriticalResult>
where
    F: Fn(f64) -> Result<bool>,
{
    let mut prev: Option<f64> = None;
    for &x in grid {
        if pred(x)? {
            return match prev {
                None => Ok(CriticalResult {
                    exists: true,
                    value: Some(x),
                    bracket: Some((x, x)),
                    iterations: 0,
                }),
                Some(p) if p < x => bisect(p, x, &pred),
                // Descending grid: the false side is the larger value.
                Some(p) => {
                    let r = bisect(x, p, |y| pred(y).map(|b| !b))?;
                    let (lo, hi) = r.bracket.expect("bisect sets a bracket");
                    Ok(CriticalResult {
                        bracket: Some((hi, lo)),
                        ..r
                    })
                }
            };
        }
        prev = Some(x);
    }
    Ok(CriticalResult::absent())
}

fn unit_grid(cells: usize) -> Vec<f64> {
    (0..=cells).map(|k| k as f64 / cells as f64).collect()
}

fn check_open_unit(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must lie in (0, 1), got {x}")))
    }
}

fn ratio(family: Family, mu: f64, state: &BellLikeState, endpoint: f64) -> Result<Option<f64>> {
    let q = PureBoundQuery {
        spec: ChannelSpec::with_default_rate(family, mu)?,
        state: *state,
        endpoint: DecayPoint::new(endpoint)?,
    };
    pure_ratio_value(&q, &Quadrature::default())
}

fn is_speedup(r: Option<f64>) -> bool {
    matches!(r, Some(v) if v < 1.0 - SPEEDUP_EPS)
}

/// Correlation advantage of amplitude damping:
/// `h(P) = ratio(μ, P) − ratio(0, P)`; negative means correlation speeds up.
pub fn ad_correlation_advantage(c: f64, mu: f64, p_tau: f64) -> Result<f64> {
    let state = BellLikeState::from_concurrence(c)?;
    let with = ratio(Family::AmplitudeDamping, mu, &state, p_tau)?;
    let without = ratio(Family::AmplitudeDamping, 0.0, &state, p_tau)?;
    match (with, without) {
        (Some(a), Some(b)) => Ok(a - b),
        _ => Ok(0.0),
    }
}

/// Critical excited population P_τc for amplitude damping: the lower edge of
/// the region `[P_τc, 1)` where correlation strength `mu` gives a smaller
/// ratio than the uncorrelated channel.
///
/// The scan walks down from P = 0.99 in steps of 0.01. `exists` is false when
/// the advantage never drops below −[`ADVANTAGE_TOL`] on the grid, or when it
/// never recovers to ≥ 0 before P = 0.01.
pub fn find_p_tau_c(c: f64, mu: f64) -> Result<CriticalResult> {
    check_open_unit("concurrence", c)?;
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::Domain(format!("mu must lie in (0, 1], got {mu}")));
    }
    let h = |p: f64| ad_correlation_advantage(c, mu, p);

    let grid: Vec<f64> = (1..COARSE_CELLS)
        .rev()
        .map(|k| k as f64 / COARSE_CELLS as f64)
        .collect();
    let mut hs = Vec::with_capacity(grid.len());
    for &p in &grid {
        hs.push(h(p)?);
    }
    let Some(top) = hs.iter().position(|&v| v < -ADVANTAGE_TOL) else {
        return Ok(CriticalResult::absent());
    };
    let Some(offset) = hs[top..].iter().position(|&v| v >= 0.0) else {
        return Ok(CriticalResult::absent());
    };
    let below = top + offset;
    bisect(grid[below], grid[below - 1], |p| Ok(h(p)? < 0.0))
}

/// Critical concurrence C_c for amplitude damping: the smallest C whose
/// ratio at `p_tau` is a speedup.
pub fn find_c_c(mu: f64, p_tau: f64) -> Result<CriticalResult> {
    ChannelSpec::with_default_rate(Family::AmplitudeDamping, mu)?;
    check_open_unit("p_tau", p_tau)?;
    first_crossing(&unit_grid(COARSE_CELLS), |c| {
        let s = BellLikeState::from_concurrence(c)?;
        Ok(is_speedup(ratio(Family::AmplitudeDamping, mu, &s, p_tau)?))
    })
}

/// Critical correlation μ^critical for depolarizing: the smallest μ whose
/// ratio at `p_tau` is a speedup.
pub fn find_mu_critical(c: f64, p_tau: f64) -> Result<CriticalResult> {
    check_open_unit("concurrence", c)?;
    check_open_unit("p_tau", p_tau)?;
    let s = BellLikeState::from_concurrence(c)?;
    first_crossing(&unit_grid(COARSE_CELLS), |mu| {
        Ok(is_speedup(ratio(Family::Depolarizing, mu, &s, p_tau)?))
    })
}

/// A table of optional numbers with named columns, in emission order.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub rows: Vec<ScanRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct ScanRow(pub Vec<Option<f64>>);

/// Declarative pure-bound sweep, iterated μ → C → endpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    pub family: Family,
    pub mu_values: Vec<f64>,
    pub c_values: Vec<f64>,
    pub endpoint_values: Vec<f64>,
    /// Constant columns appended to every row.
    pub fixed: Vec<(String, f64)>,
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        for (name, list) in [
            ("mu", &self.mu_values),
            ("concurrence", &self.c_values),
            ("endpoint", &self.endpoint_values),
        ] {
            if list.is_empty() {
                return Err(Error::Domain(format!("{name} list is empty")));
            }
        }
        for &mu in &self.mu_values {
            ChannelSpec::with_default_rate(self.family, mu)?;
        }
        for &c in &self.c_values {
            BellLikeState::from_concurrence(c)?;
        }
        for &e in &self.endpoint_values {
            DecayPoint::new(e)?;
        }
        Ok(())
    }

    pub fn run(&self) -> Result<Dataset> {
        self.validate()?;
        let mut columns: Vec<String> = [
            "mu",
            "concurrence",
            "endpoint",
            "numerator",
            "denominator",
            "value",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        columns.extend(self.fixed.iter().map(|(k, _)| k.clone()));

        let mut rows = Vec::new();
        for &mu in &self.mu_values {
            let spec = ChannelSpec::with_default_rate(self.family, mu)?;
            for &c in &self.c_values {
                let state = BellLikeState::from_concurrence(c)?;
                for &e in &self.endpoint_values {
                    let r = qslt_pure_ratio(&PureBoundQuery {
                        spec,
                        state,
                        endpoint: DecayPoint::new(e)?,
                    })?;
                    let mut row = vec![
                        Some(mu),
                        Some(c),
                        Some(e),
                        Some(r.numerator),
                        Some(r.denominator),
                        r.value,
                    ];
                    row.extend(self.fixed.iter().map(|(_, v)| Some(*v)));
                    rows.push(ScanRow(row));
                }
            }
        }
        Ok(Dataset { columns, rows })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum FigureId {
    Fig1a,
    Fig1b,
    Fig2,
    Fig3,
    Fig4,
    Fig5a,
    Fig5b,
}

impl FigureId {
    pub const ALL: [FigureId; 7] = [
        FigureId::Fig1a,
        FigureId::Fig1b,
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5a,
        FigureId::Fig5b,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FigureId::Fig1a => "fig1a",
            FigureId::Fig1b => "fig1b",
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5a => "fig5a",
            FigureId::Fig5b => "fig5b",
        }
    }

    /// (x label, y label) for plots.
    pub fn axis_labels(self) -> (&'static str, &'static str) {
        match self {
            FigureId::Fig1a | FigureId::Fig1b => ("P_tau", "tau_QSL / tau"),
            FigureId::Fig2 => ("C", "P_tau_c"),
            FigureId::Fig3 | FigureId::Fig5a => ("C", "tau_QSL / tau"),
            FigureId::Fig4 => ("tau", "tau_QSL"),
            FigureId::Fig5b => ("mu", "tau_QSL / tau"),
        }
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Unknown {
                kind: "figure id",
                value: s.to_string(),
            })
    }
}

/// Correlation strengths plotted as separate curves.
pub const FIGURE_MU_VALUES: [f64; 4] = [0.0, 0.3, 0.6, 1.0];
/// Concurrences plotted as separate curves in the μ sweep.
pub const FIGURE_C_VALUES: [f64; 3] = [0.2, 0.5, 0.8];

fn interior(points: usize) -> Vec<f64> {
    (1..points).map(|k| k as f64 / points as f64).collect()
}

fn closed(points: usize, hi: f64) -> Vec<f64> {
    (0..=points)
        .map(|k| hi * k as f64 / points as f64)
        .collect()
}

fn labelled(prefix: &str, values: &[f64]) -> Vec<String> {
    values.iter().map(|v| format!("{prefix}_{v}")).collect()
}

fn table<F>(x_name: &str, xs: &[f64], curves: Vec<String>, mut cell: F) -> Result<Dataset>
where
    F: FnMut(f64, usize) -> Result<Option<f64>>,
{
    let n = curves.len();
    let mut columns = vec![x_name.to_string()];
    columns.extend(curves);
    let mut rows = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut row = vec![Some(x)];
        for j in 0..n {
            row.push(cell(x, j)?);
        }
        rows.push(ScanRow(row));
    }
    Ok(Dataset { columns, rows })
}

/// Dataset behind one figure. `points` is the number of grid intervals on
/// the swept axis; open axes drop the endpoints that are stationary.
pub fn figure_dataset(id: FigureId, points: usize) -> Result<Dataset> {
    if points < 2 {
        return Err(Error::Domain(format!(
            "need at least 2 grid intervals, got {points}"
        )));
    }
    let mus = FIGURE_MU_VALUES;
    match id {
        FigureId::Fig1a | FigureId::Fig1b => {
            let state = if id == FigureId::Fig1a {
                BellLikeState::new(0.0)?
            } else {
                BellLikeState::maximally_entangled()
            };
            table("P_tau", &interior(points), labelled("mu", &mus), |p, j| {
                ratio(Family::AmplitudeDamping, mus[j], &state, p)
            })
        }
        FigureId::Fig2 => {
            let curves = &mus[1..];
            table("C", &interior(points), labelled("mu", curves), |c, j| {
                Ok(find_p_tau_c(c, curves[j])?.value)
            })
        }
        FigureId::Fig3 => table("C", &closed(points, 1.0), labelled("mu", &mus), |c, j| {
            ratio(
                Family::AmplitudeDamping,
                mus[j],
                &BellLikeState::from_concurrence(c)?,
                0.5,
            )
        }),
        FigureId::Fig4 => {
            let state = BellLikeState::maximally_entangled();
            table(
                "tau",
                &closed(points, 5.0),
                labelled("mu", &mus),
                |tau, j| {
                    let spec = ChannelSpec::new(Family::PhaseDamping, mus[j], 0.5)?;
                    Ok(qslt_mixed(&MixedBoundQuery::new(spec, state, tau, 1.0)?)?.value)
                },
            )
        }
        FigureId::Fig5a => table("C", &closed(points, 1.0), labelled("mu", &mus), |c, j| {
            ratio(
                Family::Depolarizing,
                mus[j],
                &BellLikeState::from_concurrence(c)?,
                0.5,
            )
        }),
        FigureId::Fig5b => {
            let cs = FIGURE_C_VALUES;
            let states: Vec<BellLikeState> = cs
                .iter()
                .map(|&c| BellLikeState::from_concurrence(c))
                .collect::<Result<_>>()?;
            table("mu", &closed(points, 1.0), labelled("C", &cs), |mu, j| {
                ratio(Family::Depolarizing, mu, &states[j], 0.5)
            })
        }
    }
}
