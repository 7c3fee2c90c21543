//! Bound states of the D-dimensional Dirac and Klein-Gordon equations with the
//! Hulthén potential and a position-dependent mass.
//!
//! The crate pairs the closed-form energy and spinor expressions with an
//! independent shooting eigensolver, and provides the parameter scans,
//! threshold maps and consistency reports built on top of them.
//!
//! Everything below [`analysis`] is generic over the scalar type through
//! [`Real`]; the concrete `f64`/`f32` aliases re-exported here are what most
//! callers want.
//!
//! ```
//! use hulthen::{spectra, Alignment, Branch, ModelParams64, QuantumState64};
//!
//! let params = ModelParams64::new(1.0, 0.1, 1.0).unwrap();
//! let state = QuantumState64::new(0, 0, 3, Alignment::Unaligned).unwrap();
//! let energy = spectra::dirac_energy(&state, &params, Branch::Minus);
//! assert!(energy.is_real());
//! ```

pub mod analysis;
pub mod error;
pub mod model;
pub mod ode;
pub mod oracle;
pub mod real;
pub mod specfun;
pub mod spectra;
pub mod wavefn;

pub use error::{Error, Result};
pub use model::{Alignment, ModelParams, QuantumState, RadialGrid};
pub use real::Real;
pub use spectra::{
    AuxiliaryQuantities, Branch, DeltaPolicy, EnergyResult, EnergySource, EnergyValue,
    PrincipalNumber, ThresholdKind,
};
pub use wavefn::{RadialFunction, SpinorSolution};

pub type ModelParams64 = ModelParams<f64>;
pub type QuantumState64 = QuantumState<f64>;
pub type EnergyResult64 = EnergyResult<f64>;
pub type AuxiliaryQuantities64 = AuxiliaryQuantities<f64>;
pub type RadialGrid64 = RadialGrid<f64>;
pub type SpinorSolution64 = SpinorSolution<f64>;
pub type RadialFunction64 = RadialFunction<f64>;

pub type ModelParams32 = ModelParams<f32>;
pub type QuantumState32 = QuantumState<f32>;
pub type EnergyResult32 = EnergyResult<f32>;
