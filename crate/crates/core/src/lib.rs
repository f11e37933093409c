//! Exact numerics for U(1) lattice gauge theories at desk scale.
//!
//! The crate is organised bottom-up:
//!
//! - [`lattice`]: geometry, site/link/plaquette tables and staggering signs.
//! - [`hilbert`]: link Hilbert spaces, many-body bases, Gauss-law sectors.
//! - [`operator`]: sparse complex operators and states over a basis.
//! - [`hamiltonians`]: Schwinger, spin-encoded, energy-penalty and 2D models.
//! - [`dynamics`]: exact, Krylov, Trotter and one-period Floquet propagation.
//! - [`floquet`]: first-order effective Hamiltonians and lattice shaking.
//! - [`static_gauge`]: Peierls phases, Hofstadter bands, Chern numbers and
//!   dressed-state geometric potentials.
//! - [`observables`]: densities, persistence amplitudes, entanglement.
//! - [`scenario`]: the batch runner behind the `lgt` binary.

pub mod dynamics;
pub mod error;
pub mod floquet;
pub mod hamiltonians;
pub mod hilbert;
pub mod lattice;
pub mod linalg;
pub mod observables;
pub mod operator;
pub mod scenario;
pub mod static_gauge;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
