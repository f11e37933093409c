//! Periodic driving: high-frequency effective Hamiltonians, shaken-lattice
//! hopping renormalization and the laser-assisted staggered-flux model.

mod drive;
mod laser;
mod shaking;

pub use drive::{
    effective_hamiltonian_first_order, floquet_hamiltonian, stroboscopic_error, DriveSpec, Harmonic,
};
pub use laser::{laser_assisted_model, LaserAssistedParams};
pub use shaking::{shaken_hopping_factors, ShakingProtocol, Waveform};
