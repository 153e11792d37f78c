//! Two-qubit states and the scalar functionals the speed-limit bounds use.
//!
//! Basis ordering is |00⟩, |01⟩, |10⟩, |11⟩ (index 3 is the doubly excited
//! level that amplitude damping drains).

use std::f64::consts::FRAC_1_SQRT_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{eig_hermitian, mat_trace_product, ComplexMatrix, HERMITIAN_TOL};

/// Trace tolerance for a valid density matrix.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest eigenvalue a density matrix may have (numeric noise allowance).
pub const POSITIVITY_TOL: f64 = 1e-9;
/// Purity tolerance for treating a state as pure.
pub const PURITY_TOL: f64 = 1e-8;

/// A 4×4 Hermitian, unit-trace, positive semidefinite matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix(ComplexMatrix);

impl DensityMatrix {
    /// Validates the density-matrix invariants on a 4×4 matrix.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        if m.dim() != 4 {
            return Err(Error::Dimension(format!(
                "two-qubit states are 4x4, got {0}x{0}",
                m.dim()
            )));
        }
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::Contract(format!(
                "state is not Hermitian (defect {defect:.3e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::Contract(format!("state trace is {tr}, expected 1")));
        }
        let min_eig = *eig_hermitian(&m)?.last().expect("four eigenvalues");
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::Contract(format!(
                "state has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(Self(m))
    }

    /// Wraps a matrix without checking. Used for closed-form expressions that
    /// are valid by construction.
    pub(crate) fn new_unchecked(m: ComplexMatrix) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn purity(&self) -> f64 {
        mat_trace_product(&self.0, &self.0).expect("4x4").re
    }

    pub fn is_pure(&self) -> bool {
        (self.purity() - 1.0).abs() <= PURITY_TOL
    }

    pub fn min_eigenvalue(&self) -> f64 {
        *eig_hermitian(&self.0)
            .expect("density matrices are Hermitian")
            .last()
            .expect("four eigenvalues")
    }
}

/// The pure state α|00⟩ + β|11⟩ with real α ∈ [0, 1] and β = √(1 − α²).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BellLikeState {
    alpha: f64,
    beta: f64,
}

impl BellLikeState {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::Domain(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        Ok(Self {
            alpha,
            beta: (1.0 - alpha * alpha).max(0.0).sqrt(),
        })
    }

    /// The state with concurrence `c` on the α ≤ √2/2 branch:
    /// α = √((1 − √(1 − C²)) / 2).
    pub fn from_concurrence(c: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::Domain(format!(
                "concurrence must lie in [0, 1], got {c}"
            )));
        }
        if c == 1.0 {
            return Ok(Self::maximally_entangled());
        }
        // (1 - √(1 - C²)) / 2 rewritten as C² / (2 (1 + √(1 - C²))) to avoid cancellation.
        let root = (1.0 - c * c).sqrt();
        let alpha = (c * c / (2.0 * (1.0 + root))).sqrt();
        Self::new(alpha)
    }

    pub fn maximally_entangled() -> Self {
        Self {
            alpha: FRAC_1_SQRT_2,
            beta: FRAC_1_SQRT_2,
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// C = 2αβ.
pub fn concurrence(s: &BellLikeState) -> f64 {
    2.0 * s.alpha * s.beta
}

/// The projector |Φ⟩⟨Φ| for Φ = α|00⟩ + β|11⟩.
pub fn bell_like_density(s: &BellLikeState) -> DensityMatrix {
    let (a, b) = (s.alpha, s.beta);
    let mut m = ComplexMatrix::zeros(4).expect("4x4");
    m[(0, 0)] = (a * a).into();
    m[(3, 3)] = (b * b).into();
    m[(0, 3)] = (a * b).into();
    m[(3, 0)] = (a * b).into();
    DensityMatrix::new_unchecked(m)
}

/// sin²B(ρ0, ρτ) = |Tr(ρ0 ρτ) − 1| for a pure initial state ρ0.
pub fn bures_sin2(rho0: &DensityMatrix, rho_tau: &DensityMatrix) -> Result<f64> {
    if !rho0.is_pure() {
        return Err(Error::Contract(format!(
            "Bures-angle form needs a pure initial state (purity {:.12})",
            rho0.purity()
        )));
    }
    let overlap = mat_trace_product(rho0.matrix(), rho_tau.matrix())?.re;
    Ok((overlap - 1.0).abs())
}

/// f = Tr(ρ_b ρ_a) / Tr(ρ_a²).
pub fn relative_purity(rho_a: &DensityMatrix, rho_b: &DensityMatrix) -> Result<f64> {
    let purity = rho_a.purity();
    if purity.is_nan() || purity <= 0.0 {
        return Err(Error::Numeric(format!(
            "reference state has purity {purity}"
        )));
    }
    let overlap = mat_trace_product(rho_b.matrix(), rho_a.matrix())?.re;
    Ok(overlap / purity)
}
