use crate::lattice::Lattice;
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Effective staggered-flux model from laser-assisted tunnelling along x.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaserAssistedParams {
    /// Flux per plaquette, alternating in sign along x.
    pub phi: f64,
    /// Effective laser-assisted hopping amplitude along x.
    pub coupling: f64,
    /// Plain hopping along y.
    #[serde(default = "unit")]
    pub t_y: f64,
}

fn unit() -> f64 {
    1.0
}

/// Single-particle Hamiltonian with `-K e^{i Phi y} c^dag_{x,y} c_{x+1,y}`
/// on even columns, `-K e^{-i Phi y} c^dag_{x,y} c_{x+1,y}` on odd ones and
/// `-t_y` along y (zero-based coordinates).
pub fn laser_assisted_model(
    lattice: &Lattice,
    params: &LaserAssistedParams,
) -> Result<SparseOperator> {
    if lattice.dim() != 2 {
        return Err(Error::Geometry(format!(
            "laser-assisted model needs a 2D lattice, got {}D",
            lattice.dim()
        )));
    }
    if ![params.phi, params.coupling, params.t_y]
        .iter()
        .all(|v| v.is_finite())
    {
        return Err(Error::InvalidParameter(
            "non-finite laser-assisted parameters".into(),
        ));
    }
    let mut triplets = Vec::with_capacity(2 * lattice.n_links());
    for l in lattice.links() {
        let c = lattice.coords(l.origin);
        let amp = if l.direction == 0 {
            let sign = if c[0] % 2 == 0 { 1.0 } else { -1.0 };
            C64::from_polar(-params.coupling, sign * params.phi * c[1] as f64)
        } else {
            C64::new(-params.t_y, 0.0)
        };
        triplets.push((l.origin, l.target, amp));
        triplets.push((l.target, l.origin, amp.conj()));
    }
    Ok(SparseOperator::from_triplets(lattice.n_sites(), triplets))
}
