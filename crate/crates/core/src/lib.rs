//! Quantum speed limit times of two-qubit Bell-like states sent through
//! correlated (memory) noise channels: amplitude damping, phase damping and
//! depolarizing.
//!
//! The crate is organised bottom-up:
//!
//! * [`matrix`]: 2×2 / 4×4 complex kernels (Kronecker products, Hermitian
//!   eigenvalues, singular values).
//! * [`state`]: Bell-like states α|00⟩ + β|11⟩ and the overlaps the bounds use.
//! * [`channel`]: correlated Kraus sets, closed-form evolved states and their
//!   derivatives with respect to the decay parameter.
//! * [`qslt`]: the pure-state and mixed-state speed-limit bounds.
//! * [`scan`]: sweeps, critical-value searches and figure datasets.
//! * [`cli`]: the `qslchan` command implementations and output writers.
//!
//! ```
//! use qslchan::channel::Family;
//! use qslchan::qslt::pure_ratio;
//! use qslchan::state::BellLikeState;
//!
//! let state = BellLikeState::from_concurrence(0.6).unwrap();
//! let ratio = pure_ratio(Family::Depolarizing, 1.0, &state, 0.5).unwrap().unwrap();
//! assert!((ratio - 0.8).abs() < 1e-9);
//! ```

pub mod analytic;
pub mod channel;
pub mod cli;
pub mod error;
pub mod matrix;
pub mod output;
pub mod qslt;
pub mod quad;
pub mod scan;
pub mod state;
pub mod validate;

pub use crate::error::{Error, Result};
