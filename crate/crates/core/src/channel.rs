//! Correlated two-use noise channels.
//!
//! A channel use on two qubits is the mixture
//! `ρ = (1 − μ)·ε_un(ρ0) + μ·ε_co(ρ0)` where `ε_un` applies independent
//! single-qubit Kraus operators to each qubit and `ε_co` applies the same
//! operation to both. Both branches are stored in one [`KrausSet`] with the
//! branch weights √(1 − μ), √μ folded into the operators.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{kron, pauli, ComplexMatrix};
use crate::state::{BellLikeState, DensityMatrix};

/// Completeness tolerance accepted by [`apply`].
pub const COMPLETENESS_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Amplitude damping, decay parameter P = e^{−Γt}.
    #[serde(rename = "ad")]
    AmplitudeDamping,
    /// Phase damping, decay parameter p = e^{−γt}.
    #[serde(rename = "pd")]
    PhaseDamping,
    /// Depolarizing, decay parameter p = e^{−γt}.
    #[serde(rename = "depol")]
    Depolarizing,
}

impl Family {
    pub const ALL: [Family; 3] = [
        Family::AmplitudeDamping,
        Family::PhaseDamping,
        Family::Depolarizing,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Family::AmplitudeDamping => "ad",
            Family::PhaseDamping => "pd",
            Family::Depolarizing => "depol",
        }
    }

    /// Default decay rate: Γ = 1 for amplitude damping, γ = 1/2 otherwise.
    pub fn default_rate(self) -> f64 {
        match self {
            Family::AmplitudeDamping => 1.0,
            Family::PhaseDamping | Family::Depolarizing => 0.5,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ad" | "amplitude-damping" => Ok(Family::AmplitudeDamping),
            "pd" | "phase-damping" => Ok(Family::PhaseDamping),
            "depol" | "depolarizing" => Ok(Family::Depolarizing),
            _ => Err(Error::Unknown {
                kind: "channel family",
                value: s.to_string(),
            }),
        }
    }
}

/// Channel family, correlation strength μ ∈ [0, 1] and decay rate > 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChannelSpec {
    pub family: Family,
    pub mu: f64,
    pub rate: f64,
}

impl ChannelSpec {
    pub fn new(family: Family, mu: f64, rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(Error::Domain(format!("mu must lie in [0, 1], got {mu}")));
        }
        if !(rate > 0.0 && rate.is_finite()) {
            return Err(Error::Domain(format!("rate must be positive, got {rate}")));
        }
        Ok(Self { family, mu, rate })
    }

    /// Spec with the family's default rate.
    pub fn with_default_rate(family: Family, mu: f64) -> Result<Self> {
        Self::new(family, mu, family.default_rate())
    }

    /// Decay parameter after elapsed time `t`.
    pub fn decay_at(&self, t: f64) -> Result<DecayPoint> {
        DecayPoint::new((-self.rate * t).exp())
    }
}

/// Decay parameter in (0, 1]; 1 means no elapsed time.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize)]
pub struct DecayPoint(f64);

impl DecayPoint {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value <= 1.0 {
            Ok(Self(value))
        } else {
            Err(Error::Domain(format!(
                "decay parameter must lie in (0, 1], got {value}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// One single-qubit Kraus operator `weighted = √p · bare`.
///
/// For amplitude damping the decay is already inside the operators, so
/// `probability` is 1 and `weighted == bare`.
#[derive(Clone, Copy, Debug)]
pub struct SingleQubitOp {
    pub index: usize,
    pub probability: f64,
    pub bare: ComplexMatrix,
    pub weighted: ComplexMatrix,
}

pub fn single_qubit_kraus(family: Family, decay: DecayPoint) -> Vec<SingleQubitOp> {
    let p = decay.value();
    match family {
        Family::AmplitudeDamping => {
            let b0 = ComplexMatrix::diag(&[1.0, p.sqrt()]).expect("2x2");
            let b1 =
                ComplexMatrix::from_real(2, 2, &[0.0, (1.0 - p).sqrt(), 0.0, 0.0]).expect("2x2");
            [b0, b1]
                .into_iter()
                .enumerate()
                .map(|(index, b)| SingleQubitOp {
                    index,
                    probability: 1.0,
                    bare: b,
                    weighted: b,
                })
                .collect()
        }
        Family::PhaseDamping => [(0, (1.0 + p) / 2.0), (3, (1.0 - p) / 2.0)]
            .into_iter()
            .map(|(k, prob)| pauli_op(k, prob))
            .collect(),
        Family::Depolarizing => {
            let flip = (1.0 - p) / 6.0;
            [(0, (1.0 + p) / 2.0), (1, flip), (2, flip), (3, flip)]
                .into_iter()
                .map(|(k, prob)| pauli_op(k, prob))
                .collect()
        }
    }
}

fn pauli_op(k: usize, probability: f64) -> SingleQubitOp {
    let bare = pauli(k);
    SingleQubitOp {
        index: k,
        probability,
        bare,
        weighted: bare.scale(probability.sqrt()),
    }
}

/// Which branch of the mixture an operator belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum KrausLabel {
    /// Independent branch, operator `B_{i1} ⊗ B_{i2}`.
    Pair(usize, usize),
    /// Fully correlated branch, operator `E_{kk}`.
    Diagonal(usize),
}

#[derive(Clone, Debug)]
pub struct KrausSet {
    operators: Vec<(KrausLabel, ComplexMatrix)>,
}

impl KrausSet {
    pub fn new(operators: Vec<(KrausLabel, ComplexMatrix)>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::Contract("empty Kraus set".into()));
        }
        if let Some((label, _)) = operators.iter().find(|(_, m)| m.dim() != 4) {
            return Err(Error::Dimension(format!(
                "Kraus operator {label:?} is not 4x4"
            )));
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> impl Iterator<Item = &ComplexMatrix> {
        self.operators.iter().map(|(_, m)| m)
    }

    pub fn labels(&self) -> impl Iterator<Item = KrausLabel> + '_ {
        self.operators.iter().map(|(l, _)| *l)
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Frobenius norm of `Σ E†E − I`.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(4).expect("4x4");
        for (_, e) in &self.operators {
            sum = sum + &e.adjoint() * e;
        }
        (sum - ComplexMatrix::identity(4).expect("4x4")).frobenius_norm()
    }

    /// Copy with operator `index` multiplied by `factor`. Breaks completeness
    /// unless `factor` is 1; exists for fault-injection checks.
    pub fn with_scaled_operator(&self, index: usize, factor: f64) -> Self {
        let mut out = self.clone();
        if let Some((_, m)) = out.operators.get_mut(index) {
            *m = m.scale(factor);
        }
        out
    }
}

/// Full two-qubit Kraus set for one correlated channel use.
///
/// μ = 0 gives exactly the tensor products of single-qubit operators, μ = 1
/// exactly the correlated operators; branches with zero weight are omitted.
/// The amplitude-damping correlated branch is the full-memory pair
/// `E00 = diag(1, 1, 1, √P)`, `E11 = √(1−P)|00⟩⟨11|`.
pub fn correlated_kraus(spec: &ChannelSpec, decay: DecayPoint) -> KrausSet {
    let singles = single_qubit_kraus(spec.family, decay);
    let mut ops = Vec::new();

    if spec.mu < 1.0 {
        let w = (1.0 - spec.mu).sqrt();
        for a in &singles {
            for b in &singles {
                let e = kron(&a.weighted, &b.weighted).expect("2x2 inputs").scale(w);
                ops.push((KrausLabel::Pair(a.index, b.index), e));
            }
        }
    }

    if spec.mu > 0.0 {
        let w = spec.mu.sqrt();
        match spec.family {
            Family::AmplitudeDamping => {
                let p = decay.value();
                let e00 = ComplexMatrix::diag(&[1.0, 1.0, 1.0, p.sqrt()]).expect("4x4");
                let mut e11 = ComplexMatrix::zeros(4).expect("4x4");
                e11[(0, 3)] = Complex64::new((1.0 - p).sqrt(), 0.0);
                ops.push((KrausLabel::Diagonal(0), e00.scale(w)));
                ops.push((KrausLabel::Diagonal(1), e11.scale(w)));
            }
            Family::PhaseDamping | Family::Depolarizing => {
                for s in &singles {
                    let e = kron(&s.weighted, &s.bare).expect("2x2 inputs").scale(w);
                    ops.push((KrausLabel::Diagonal(s.index), e));
                }
            }
        }
    }

    KrausSet::new(ops).expect("channel operators are 4x4 and non-empty")
}

/// `ρ = Σ E ρ0 E†`.
pub fn apply(kraus: &KrausSet, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    let defect = kraus.completeness_defect();
    if defect > COMPLETENESS_TOL {
        return Err(Error::Contract(format!(
            "Kraus set is not trace preserving (completeness defect {defect:.3e})"
        )));
    }
    let mut out = ComplexMatrix::zeros(4)?;
    for e in kraus.operators() {
        let er = e * rho0.matrix();
        out = out + &er * &e.adjoint();
    }
    DensityMatrix::new(out)
}

/// Closed-form evolved state of α|00⟩ + β|11⟩, in the
/// |00⟩, |01⟩, |10⟩, |11⟩ basis.
pub fn evolved_closed_form(
    spec: &ChannelSpec,
    s: &BellLikeState,
    decay: DecayPoint,
) -> DensityMatrix {
    let entries = closed_form_entries(spec.family, spec.mu, s, decay.value());
    DensityMatrix::new_unchecked(block_matrix(entries))
}

/// Real entries (ground, |01⟩, |10⟩, excited, coherence) of the evolved state.
struct BlockEntries {
    ground: f64,
    mid1: f64,
    mid2: f64,
    excited: f64,
    coherence: f64,
}

fn block_matrix(e: BlockEntries) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4).expect("4x4");
    m[(0, 0)] = e.ground.into();
    m[(1, 1)] = e.mid1.into();
    m[(2, 2)] = e.mid2.into();
    m[(3, 3)] = e.excited.into();
    m[(0, 3)] = e.coherence.into();
    m[(3, 0)] = e.coherence.into();
    m
}

fn closed_form_entries(family: Family, mu: f64, s: &BellLikeState, x: f64) -> BlockEntries {
    let (a, b) = (s.alpha(), s.beta());
    let (a2, b2) = (a * a, b * b);
    match family {
        Family::AmplitudeDamping => {
            let mid = (-1.0 + x) * x * b2 * (-1.0 + mu);
            BlockEntries {
                ground: a2 - (-1.0 + x) * b2 * (1.0 + x * (-1.0 + mu)),
                mid1: mid,
                mid2: mid,
                excited: x * b2 * (x + mu - x * mu),
                coherence: -x * a * b * (-1.0 + mu) + x.sqrt() * a * b * mu,
            }
        }
        Family::PhaseDamping => BlockEntries {
            ground: a2,
            mid1: 0.0,
            mid2: 0.0,
            excited: b2,
            coherence: a * b * (1.0 - (1.0 - x * x) * (1.0 - mu)),
        },
        Family::Depolarizing => {
            let mid = (-2.0 + x + x * x) * (-1.0 + mu) / 9.0;
            BlockEntries {
                ground: -(2.0 + x) * a2 * (-2.0 + x * (-1.0 + mu) - mu) / 9.0
                    - (-1.0 + x) * b2 * (1.0 + x * (-1.0 + mu) + 2.0 * mu) / 9.0,
                mid1: mid,
                mid2: mid,
                excited: -(-1.0 + x) * a2 * (1.0 + x * (-1.0 + mu) + 2.0 * mu) / 9.0
                    + b2 * ((2.0 + x).powi(2) - (-2.0 + x + x * x) * mu) / 9.0,
                coherence: a * b * (1.0 - 4.0 * x * (1.0 + x) * (-1.0 + mu) + 8.0 * mu) / 9.0,
            }
        }
    }
}

/// Entrywise derivative of the closed-form state with respect to the decay
/// parameter (P for amplitude damping, p otherwise).
///
/// `decay` may be any value in [0, 1]; at 0 the amplitude-damping
/// coherence derivative μαβ/(2√P) diverges for μ > 0 and a
/// [`Error::Singular`] is returned. Use [`d_rho_d_path`] to integrate
/// through that point.
pub fn d_rho_d_decay(spec: &ChannelSpec, s: &BellLikeState, decay: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&decay) {
        return Err(Error::Domain(format!(
            "decay parameter must lie in [0, 1], got {decay}"
        )));
    }
    let (a, b, mu) = (s.alpha(), s.beta(), spec.mu);
    let (a2, b2) = (a * a, b * b);
    let x = decay;
    let e = match spec.family {
        Family::AmplitudeDamping => {
            if x == 0.0 && mu > 0.0 && a * b > 0.0 {
                return Err(Error::Singular(
                    "d rho / dP diverges at P = 0 for correlated amplitude damping".into(),
                ));
            }
            let excited = b2 * (2.0 * x * (1.0 - mu) + mu);
            let mid = (1.0 - mu) * (1.0 - 2.0 * x) * b2;
            let coherence = if a * b == 0.0 {
                0.0
            } else {
                a * b * ((1.0 - mu) + mu / (2.0 * x.sqrt()))
            };
            BlockEntries {
                ground: -excited - 2.0 * mid,
                mid1: mid,
                mid2: mid,
                excited,
                coherence,
            }
        }
        Family::PhaseDamping => BlockEntries {
            ground: 0.0,
            mid1: 0.0,
            mid2: 0.0,
            excited: 0.0,
            coherence: 2.0 * x * a * b * (1.0 - mu),
        },
        Family::Depolarizing => {
            let mid = (1.0 + 2.0 * x) * (-1.0 + mu) / 9.0;
            let excited = excited_derivative_depol(a2, b2, mu, x);
            BlockEntries {
                ground: -excited - 2.0 * mid,
                mid1: mid,
                mid2: mid,
                excited,
                coherence: -4.0 * a * b * (1.0 + 2.0 * x) * (-1.0 + mu) / 9.0,
            }
        }
    };
    Ok(block_matrix(e))
}

fn excited_derivative_depol(a2: f64, b2: f64, mu: f64, x: f64) -> f64 {
    // excited = −(x − 1) a² (1 + x(μ − 1) + 2μ)/9 + b² ((2 + x)² − (x² + x − 2) μ)/9
    let term_a = -a2 * ((1.0 + x * (-1.0 + mu) + 2.0 * mu) + (x - 1.0) * (-1.0 + mu)) / 9.0;
    let term_b = b2 * (2.0 * (2.0 + x) - (2.0 * x + 1.0) * mu) / 9.0;
    term_a + term_b
}

/// Coordinate used to integrate along the decay path.
///
/// Amplitude damping uses v = √P so that the correlated coherence term
/// becomes regular; the other families use the decay parameter directly.
pub fn path_coordinate(family: Family, decay: f64) -> f64 {
    match family {
        Family::AmplitudeDamping => decay.sqrt(),
        Family::PhaseDamping | Family::Depolarizing => decay,
    }
}

/// Derivative of the evolved state with respect to the path coordinate of
/// [`path_coordinate`]. Finite on the whole closed interval [0, 1].
pub fn d_rho_d_path(spec: &ChannelSpec, s: &BellLikeState, coord: f64) -> Result<ComplexMatrix> {
    match spec.family {
        Family::PhaseDamping | Family::Depolarizing => d_rho_d_decay(spec, s, coord),
        Family::AmplitudeDamping => {
            if !(0.0..=1.0).contains(&coord) {
                return Err(Error::Domain(format!(
                    "path coordinate must lie in [0, 1], got {coord}"
                )));
            }
            let (a, b, mu) = (s.alpha(), s.beta(), spec.mu);
            let b2 = b * b;
            let v = coord;
            let v3 = v * v * v;
            let excited = b2 * (4.0 * v3 * (1.0 - mu) + 2.0 * mu * v);
            let mid = (1.0 - mu) * b2 * (2.0 * v - 4.0 * v3);
            Ok(block_matrix(BlockEntries {
                ground: -excited - 2.0 * mid,
                mid1: mid,
                mid2: mid,
                excited,
                coherence: a * b * (2.0 * (1.0 - mu) * v + mu),
            }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::bell_like_density;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn dp(x: f64) -> DecayPoint {
        DecayPoint::new(x).unwrap()
    }

    fn spec(f: Family, mu: f64) -> ChannelSpec {
        ChannelSpec::with_default_rate(f, mu).unwrap()
    }

    #[test]
    fn domain_checks() {
        assert!(ChannelSpec::new(Family::PhaseDamping, 1.1, 0.5).is_err());
        assert!(ChannelSpec::new(Family::PhaseDamping, 0.5, 0.0).is_err());
        assert!(DecayPoint::new(0.0).is_err());
        assert!(DecayPoint::new(1.0 + 1e-12).is_err());
        assert!("xyz".parse::<Family>().is_err());
        assert_eq!("DEPOL".parse::<Family>().unwrap(), Family::Depolarizing);
    }

    #[test]
    fn single_qubit_no_decay() {
        let i2 = ComplexMatrix::identity(2).unwrap();
        let z2 = ComplexMatrix::zeros(2).unwrap();
        for f in [Family::AmplitudeDamping, Family::PhaseDamping] {
            let ops = single_qubit_kraus(f, dp(1.0));
            assert_eq!(ops.len(), 2);
            assert!(ops[0].weighted.max_abs_diff(&i2) < 1e-15);
            assert!(ops[1].weighted.max_abs_diff(&z2) < 1e-15);
        }
    }

    #[test]
    fn depolarizing_probabilities_at_full_decay() {
        let ops = single_qubit_kraus(Family::Depolarizing, dp(1e-300));
        let probs: Vec<f64> = ops.iter().map(|o| o.probability).collect();
        assert!((probs[0] - 0.5).abs() < 1e-15);
        for p in &probs[1..] {
            assert!((p - 1.0 / 6.0).abs() < 1e-15);
        }
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn uncorrelated_is_tensor_product() {
        for f in Family::ALL {
            let singles = single_qubit_kraus(f, dp(0.37));
            let set = correlated_kraus(&spec(f, 0.0), dp(0.37));
            assert_eq!(set.len(), singles.len() * singles.len());
            let mut it = set.operators();
            for a in &singles {
                for b in &singles {
                    let expected = kron(&a.weighted, &b.weighted).unwrap();
                    assert!(it.next().unwrap().max_abs_diff(&expected) < 1e-15);
                }
            }
        }
    }

    #[test]
    fn fully_correlated_depolarizing_operators() {
        let p = 0.42;
        let set = correlated_kraus(&spec(Family::Depolarizing, 1.0), dp(p));
        assert_eq!(set.len(), 4);
        let probs = [
            (1.0 + p) / 2.0,
            (1.0 - p) / 6.0,
            (1.0 - p) / 6.0,
            (1.0 - p) / 6.0,
        ];
        for ((k, op), label) in set.operators().enumerate().zip(set.labels()) {
            assert_eq!(label, KrausLabel::Diagonal(k));
            let expected = kron(&pauli(k), &pauli(k)).unwrap().scale(probs[k].sqrt());
            assert!(op.max_abs_diff(&expected) < 1e-15);
        }
    }

    #[test]
    fn partially_correlated_completeness() {
        for f in Family::ALL {
            let set = correlated_kraus(&spec(f, 0.5), dp(0.3));
            assert!(set.completeness_defect() < 1e-12);
        }
    }

    #[test]
    fn perturbed_kraus_set_is_rejected() {
        let set = correlated_kraus(&spec(Family::PhaseDamping, 0.5), dp(0.3));
        let bad = set.with_scaled_operator(0, 1.0 + 1e-3);
        let rho = bell_like_density(&BellLikeState::new(0.6).unwrap());
        assert!(matches!(apply(&bad, &rho), Err(Error::Contract(_))));
    }

    #[test]
    fn identity_channel_leaves_state() {
        let s = BellLikeState::new(0.4).unwrap();
        let rho = bell_like_density(&s);
        for f in Family::ALL {
            for mu in [0.0, 0.3, 1.0] {
                let out = apply(&correlated_kraus(&spec(f, mu), dp(1.0)), &rho).unwrap();
                assert!(out.matrix().max_abs_diff(rho.matrix()) < 1e-15);
            }
        }
    }

    #[test]
    fn amplitude_damping_excited_product_state() {
        let s = BellLikeState::new(0.0).unwrap();
        let p = 0.3;
        let out = apply(
            &correlated_kraus(&spec(Family::AmplitudeDamping, 0.0), dp(p)),
            &bell_like_density(&s),
        )
        .unwrap();
        let m = out.matrix();
        let expected = [(1.0 - p) * (1.0 - p), p * (1.0 - p), p * (1.0 - p), p * p];
        for (i, e) in expected.iter().enumerate() {
            assert!((m[(i, i)].re - e).abs() < 1e-15);
        }
    }

    #[test]
    fn phase_damping_full_memory_keeps_coherence() {
        let s = BellLikeState::new(FRAC_1_SQRT_2).unwrap();
        let rho0 = bell_like_density(&s);
        let out = apply(
            &correlated_kraus(&spec(Family::PhaseDamping, 1.0), dp(0.5)),
            &rho0,
        )
        .unwrap();
        assert!(out.matrix().max_abs_diff(rho0.matrix()) < 1e-15);
    }

    #[test]
    fn closed_form_limits() {
        let s = BellLikeState::new(0.6).unwrap();
        let ad = evolved_closed_form(&spec(Family::AmplitudeDamping, 0.0), &s, dp(1e-12));
        assert!((ad.matrix()[(0, 0)].re - 1.0).abs() < 1e-11);
        assert!(
            ad.matrix()
                .max_abs_diff(&ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0]).unwrap())
                < 1e-5
        );

        let rho0 = bell_like_density(&s);
        for mu in [0.0, 0.5, 1.0] {
            let dep = evolved_closed_form(&spec(Family::Depolarizing, mu), &s, dp(1.0));
            assert!(dep.matrix().max_abs_diff(rho0.matrix()) < 1e-15);
        }

        let pd = evolved_closed_form(
            &spec(Family::PhaseDamping, 0.5),
            &BellLikeState::maximally_entangled(),
            dp(0.5),
        );
        assert!((pd.matrix()[(0, 3)].re - 0.3125).abs() < 1e-15);
    }

    #[test]
    fn derivative_examples() {
        let bell = BellLikeState::maximally_entangled();
        let d = d_rho_d_decay(&spec(Family::PhaseDamping, 0.0), &bell, 0.5).unwrap();
        assert!((d[(0, 3)].re - 0.5).abs() < 1e-15);

        let excited = BellLikeState::new(0.0).unwrap();
        let p = 0.3;
        let d = d_rho_d_decay(&spec(Family::AmplitudeDamping, 0.0), &excited, p).unwrap();
        assert!((d[(3, 3)].re - 2.0 * p).abs() < 1e-15);
    }

    #[test]
    fn derivative_singular_point() {
        let s = BellLikeState::new(0.6).unwrap();
        let r = d_rho_d_decay(&spec(Family::AmplitudeDamping, 0.5), &s, 0.0);
        assert!(matches!(r, Err(Error::Singular(_))));
        assert!(d_rho_d_decay(&spec(Family::AmplitudeDamping, 0.0), &s, 0.0).is_ok());
        assert!(d_rho_d_path(&spec(Family::AmplitudeDamping, 0.5), &s, 0.0).is_ok());
        assert!(d_rho_d_decay(&spec(Family::PhaseDamping, 0.5), &s, 1.5).is_err());
    }

    #[test]
    fn amplitude_damping_eigenvalues_match_populations() {
        // α = 0, β = 1, μ = 0: the derivative is diagonal with entries
        // −2(1 − P), 1 − 2P, 1 − 2P, 2P.
        let s = BellLikeState::new(0.0).unwrap();
        let p = 0.25;
        let d = d_rho_d_decay(&spec(Family::AmplitudeDamping, 0.0), &s, p).unwrap();
        let mut abs_eig: Vec<f64> = crate::matrix::eig_hermitian(&d)
            .unwrap()
            .iter()
            .map(|x| x.abs())
            .collect();
        abs_eig.sort_by(|x, y| y.total_cmp(x));
        let expected = [
            2.0 * (1.0 - p),
            2.0 * p,
            (2.0 * p - 1.0).abs(),
            (2.0 * p - 1.0).abs(),
        ];
        for (x, e) in abs_eig.iter().zip(expected) {
            assert!((x - e).abs() < 1e-14);
        }
    }

    fn finite_difference(spec: &ChannelSpec, s: &BellLikeState, x: f64, h: f64) -> ComplexMatrix {
        let up = *evolved_closed_form(spec, s, dp(x + h)).matrix();
        let down = *evolved_closed_form(spec, s, dp(x - h)).matrix();
        (up - down).scale(0.5 / h)
    }

    proptest! {
        #[test]
        fn derivative_matches_finite_difference(
            fam in 0usize..3, mu in 0.0f64..=1.0, alpha in 0.0f64..=1.0, x in 0.05f64..0.95,
        ) {
            let spec = spec(Family::ALL[fam], mu);
            let s = BellLikeState::new(alpha).unwrap();
            let analytic = d_rho_d_decay(&spec, &s, x).unwrap();
            let fd = finite_difference(&spec, &s, x, 1e-6);
            prop_assert!(analytic.max_abs_diff(&fd) < 1e-8);
        }

        #[test]
        fn path_derivative_is_chain_rule(mu in 0.0f64..=1.0, alpha in 0.0f64..=1.0, v in 0.1f64..=1.0) {
            let spec = spec(Family::AmplitudeDamping, mu);
            let s = BellLikeState::new(alpha).unwrap();
            let by_path = d_rho_d_path(&spec, &s, v).unwrap();
            let by_decay = d_rho_d_decay(&spec, &s, v * v).unwrap().scale(2.0 * v);
            prop_assert!(by_path.max_abs_diff(&by_decay) < 1e-13);
        }

        #[test]
        fn kraus_matches_closed_form(
            fam in 0usize..3, mu in 0.0f64..=1.0, alpha in 0.0f64..=1.0, x in 1e-6f64..=1.0,
        ) {
            let spec = spec(Family::ALL[fam], mu);
            let s = BellLikeState::new(alpha).unwrap();
            let kraus = correlated_kraus(&spec, dp(x));
            prop_assert!(kraus.completeness_defect() < 1e-12);
            let out = apply(&kraus, &bell_like_density(&s)).unwrap();
            let closed = evolved_closed_form(&spec, &s, dp(x));
            prop_assert!(out.matrix().max_abs_diff(closed.matrix()) < 1e-12);
            prop_assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
            prop_assert!(out.min_eigenvalue() >= -1e-9);
        }

        #[test]
        fn output_is_linear_in_mu(fam in 0usize..3, mu in 0.0f64..=1.0, alpha in 0.0f64..=1.0, x in 1e-6f64..=1.0) {
            let f = Family::ALL[fam];
            let s = bell_like_density(&BellLikeState::new(alpha).unwrap());
            let run = |m: f64| *apply(&correlated_kraus(&spec(f, m), dp(x)), &s).unwrap().matrix();
            let mixed = run(0.0).scale(1.0 - mu) + run(1.0).scale(mu);
            prop_assert!(run(mu).max_abs_diff(&mixed) < 1e-12);
        }
    }
}
