//! Simulation of a data qubit (DQ) protected from radiative decay into its
//! control line by a Josephson quantum filter (JQF): a strongly coupled qubit
//! on the same semi-infinite waveguide.
//!
//! * [`model`]: parameters and waveguide-mediated couplings (ξ, J, Ŝ).
//! * [`single_excitation`]: closed-form decay, adiabatic frequencies,
//!   subradiant decomposition, emitted wavepacket.
//! * [`delay`]: the exact retarded amplitude equations.
//! * [`driven`]: master equation and closed moment system under a classical
//!   control field.
//! * [`scenario`]: configuration, runs and the regression report used by the
//!   `jqf` binary.

pub mod delay;
pub mod driven;
pub mod error;
pub mod model;
pub mod numerics;
pub mod regression;
pub mod scenario;
pub mod single_excitation;

pub use error::{JqfError, JqfResult};
pub use model::{derive_couplings, DerivedCouplings, ReferenceFrequency, SystemParameters};
