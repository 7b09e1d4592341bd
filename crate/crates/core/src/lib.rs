//! Time-of-arrival (TOA) distributions for a free particle in one dimension.
//!
//! Four densities are compared for a Gaussian wave packet launched towards a
//! detector at position `D`:
//!
//! * **QC**, the quantum-clock density `|ψ(D,t)|²` normalised over a window
//!   `T′` much longer than the observation time,
//! * **K**, the Kijowski density built from the right-moving momentum
//!   components,
//! * **F**, the probability current through `D`,
//! * **SC**, a classical ensemble mapped through the flight-time relation.
//!
//! On top of the densities the crate computes tail curves
//! `T ↦ ∫_T^{t_max} Π(t) dt`, their pairwise comparison, and the classical
//! dwell-time model (`p(found) = τ/T`).
//!
//! All quantities are in natural units `ħ = m = ω = 1`, so lengths are in
//! `l0 = √(ħ/mω)`, momenta in `ħ/l0` and times in `1/ω`.
//!
//! Density evaluation over time grids runs on rayon when the `parallel`
//! feature is enabled (the default); [`Execution`] selects the path at
//! runtime and falls back to a sequential loop without the feature.

pub mod classical;
pub mod distributions;
pub mod error;
pub mod exec;
pub mod oracle;
pub mod packet;
pub mod quadrature;
pub mod tails;

pub use classical::{
    classical_found_probability, classical_not_found_probability, ClassicalScenario, Seconds,
};
pub use distributions::{
    qc_normalization_constant, sample_flux, sample_kijowski, sample_qc, sample_semiclassical,
    DistributionKind, SampledDistribution, Sampler, SemiClassicalModel, TimeGrid,
};
pub use error::{Error, Result};
pub use exec::Execution;
pub use oracle::{discretize, spectral_propagate, GridState};
pub use packet::{
    make_gaussian, psi_momentum, psi_position, DetectorSpec, InitialState, ObservationWindow,
    UnitSystem, WavePacketSpec,
};
pub use tails::{
    compare_tails, qc_found_probability, qc_not_found_probability, tail_curve, ComparisonReport,
    TailCurve,
};
