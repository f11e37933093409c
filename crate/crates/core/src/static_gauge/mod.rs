//! Static background gauge fields: Peierls phases, the Hofstadter model
//! and geometric potentials of a dressed two-level atom.

mod dressed;
mod hofstadter;
mod peierls;

pub use dressed::{
    berry_connection, berry_flux, dressed_potentials, line_berry_phase, wilson_loop_phase,
    DressedPotentials, TwoLevelField,
};
pub use hofstadter::{chern_numbers, hofstadter_spectrum, HofstadterBands};
pub use peierls::{
    link_phase_fluxes, peierls_hamiltonian, plaquette_fluxes, wrap_angle, LandauGauge, PeierlsField,
};
