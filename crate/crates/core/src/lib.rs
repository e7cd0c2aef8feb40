//! Massive and massless Dirac fields in a one-dimensional box: boundary
//! condition classification, spectra, Majorana states and their dynamics.

pub mod algebra;
pub mod boundary;
pub mod error;
pub mod evolution;
pub mod spectral;
pub mod verify;

pub use algebra::{Complex2Matrix, Complex2Vector, GammaSet, PhysicalParams};
pub use boundary::{BoundaryCondition, Family, MatrixBC, NamedBC, PhaseBC, WeylBranch};
pub use error::{Error, Result};
pub use evolution::{GridWaveFunction, ModeExpansion, Observables};
pub use spectral::{EnergyWindow, Spectrum};
