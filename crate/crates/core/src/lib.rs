//! Stochastic quantum teleportation and entanglement swapping with neutral
//! kaons.
//!
//! - [`qstate`]: labeled multi-kaon state vectors and pair projections.
//! - [`kaon`]: constants, mass eigenstates and non-unitary decay evolution.
//! - [`analytic`]: closed-form coefficients, probabilities, ξ(t) and A(t).
//! - [`protocols`]: teleportation, swapping and general teleportation as
//!   exact state-vector pipelines.
//! - [`montecarlo`]: reproducible event generation and estimators.

pub mod analytic;
pub mod error;
pub mod kaon;
pub mod montecarlo;
pub mod protocols;
pub mod qstate;

pub use analytic::Observable;
pub use error::{Error, Result};
pub use kaon::{Constants, Kinematics, SingleKaon, TimeConvention};
pub use montecarlo::{Detection, EventRecord, EventSampler, ObservableEstimate};
pub use protocols::{DecayedSubsystem, GeneralSource, Mode, ProjectionOutcome, ProtocolSetup, RetainPolicy};
pub use qstate::{Label, Matrix2, MultiKaonState, PairBasisVector, Projection};

/// Complex amplitude type used throughout.
pub use num_complex::Complex64 as C64;
