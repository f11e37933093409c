use crate::lattice::{Boundary, Lattice};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Reduces an angle to `(-pi, pi]`.
pub fn wrap_angle(x: f64) -> f64 {
    let y = x.rem_euclid(2.0 * PI);
    if y > PI {
        y - 2.0 * PI
    } else {
        y
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LandauGauge {
    /// `theta_x(r) = -Phi y`, `theta_y = 0`.
    #[default]
    X,
    /// `theta_x = 0`, `theta_y(r) = Phi x`.
    Y,
}

/// Hopping phases `theta_j(r)` on every link, either given explicitly or
/// fixed from a uniform flux per plaquette.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PeierlsField {
    /// One phase per link, in lattice link order.
    LinkPhases { phases: Vec<f64> },
    UniformFlux {
        flux: f64,
        #[serde(default)]
        gauge: LandauGauge,
    },
}

impl PeierlsField {
    pub fn link_phases(&self, lattice: &Lattice) -> Result<Vec<f64>> {
        if lattice.dim() != 2 {
            return Err(Error::Geometry(format!(
                "Peierls fields need a 2D lattice, got {}D",
                lattice.dim()
            )));
        }
        match self {
            PeierlsField::LinkPhases { phases } => {
                if phases.len() != lattice.n_links() {
                    return Err(Error::InvalidParameter(format!(
                        "phase table has {} entries for {} links",
                        phases.len(),
                        lattice.n_links()
                    )));
                }
                if phases.iter().any(|p| !p.is_finite()) {
                    return Err(Error::InvalidParameter("non-finite link phase".into()));
                }
                Ok(phases.clone())
            }
            PeierlsField::UniformFlux { flux, gauge } => {
                if !flux.is_finite() {
                    return Err(Error::InvalidParameter("non-finite flux".into()));
                }
                let phases: Vec<f64> = lattice
                    .links()
                    .iter()
                    .map(|l| {
                        let c = lattice.coords(l.origin);
                        match (gauge, l.direction) {
                            (LandauGauge::X, 0) => -flux * c[1] as f64,
                            (LandauGauge::Y, 1) => flux * c[0] as f64,
                            _ => 0.0,
                        }
                    })
                    .collect();
                if lattice.boundary().contains(&Boundary::Periodic) {
                    let worst = link_phase_fluxes(lattice, &phases)?
                        .iter()
                        .map(|f| wrap_angle(f - flux).abs())
                        .fold(0.0, f64::max);
                    if worst > 1e-9 {
                        return Err(Error::InvalidParameter(format!(
                            "flux {flux} is not commensurate with the periodic lattice (mismatch {worst:.3e})"
                        )));
                    }
                }
                Ok(phases)
            }
        }
    }
}

/// Phase sum `theta_1 + theta_2 - theta_3 - theta_4` around every
/// plaquette, reduced to `(-pi, pi]`.
pub fn link_phase_fluxes(lattice: &Lattice, phases: &[f64]) -> Result<Vec<f64>> {
    if phases.len() != lattice.n_links() {
        return Err(Error::InvalidParameter(format!(
            "{} phases for {} links",
            phases.len(),
            lattice.n_links()
        )));
    }
    (0..lattice.n_plaquettes())
        .map(|p| {
            let sum: f64 = lattice
                .plaquette_links(p)?
                .iter()
                .map(|o| {
                    if o.forward {
                        phases[o.link]
                    } else {
                        -phases[o.link]
                    }
                })
                .sum();
            Ok(wrap_angle(sum))
        })
        .collect()
}

/// `-t sum_{r,j} e^{i theta_j(r)} a^dag_{r+j} a_r + h.c.` in the
/// single-particle basis.
pub fn peierls_hamiltonian(
    lattice: &Lattice,
    field: &PeierlsField,
    t: f64,
) -> Result<SparseOperator> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter("non-finite hopping".into()));
    }
    let phases = field.link_phases(lattice)?;
    let mut triplets = Vec::with_capacity(2 * lattice.n_links());
    for (l, &theta) in lattice.links().iter().zip(&phases) {
        let amp = C64::from_polar(-t, theta);
        triplets.push((l.target, l.origin, amp));
        triplets.push((l.origin, l.target, amp.conj()));
    }
    Ok(SparseOperator::from_triplets(lattice.n_sites(), triplets))
}

/// Flux through every plaquette read off a single-particle Hamiltonian as
/// `arg(H_{r+x,r} H_{r+x+y,r+x} H_{r+y,r+x+y} H_{r,r+y})`.
///
/// Periodic axes of extent 2 merge parallel hoppings and are refused.
pub fn plaquette_fluxes(h: &SparseOperator, lattice: &Lattice) -> Result<Vec<f64>> {
    if h.dim() != lattice.n_sites() {
        return Err(Error::BasisMismatch(format!(
            "operator of dimension {} on {} sites",
            h.dim(),
            lattice.n_sites()
        )));
    }
    if lattice.dim() == 2
        && (0..2).any(|d| lattice.extents()[d] == 2 && lattice.boundary()[d] == Boundary::Periodic)
    {
        return Err(Error::Geometry(
            "periodic axis of extent 2 has ambiguous plaquettes".into(),
        ));
    }
    (0..lattice.n_plaquettes())
        .map(|p| {
            let r = lattice.plaquette_origin(p)?;
            let rx = lattice.neighbor(r, 0).expect("plaquette corner");
            let rxy = lattice.neighbor(rx, 1).expect("plaquette corner");
            let ry = lattice.neighbor(r, 1).expect("plaquette corner");
            let product = h.get(rx, r) * h.get(rxy, rx) * h.get(ry, rxy) * h.get(r, ry);
            if product.norm() == 0.0 {
                return Err(Error::Precondition(format!(
                    "plaquette {p} has a missing hopping"
                )));
            }
            Ok(product.arg())
        })
        .collect()
}
