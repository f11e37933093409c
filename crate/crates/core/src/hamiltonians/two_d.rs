use super::assemble;
use super::schwinger::{push_gauge_hop, HoppingConvention};
use crate::hilbert::{BasisState, SectorBasis};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Couplings of the 2D staggered-fermion gauge model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Staggered2dParams {
    /// Hopping amplitude along x and y.
    pub t: [f64; 2],
    pub m: f64,
    pub g2: f64,
    /// Coefficient `K` of `-K sum (U_plaq + h.c.)`.
    pub plaquette: f64,
    #[serde(default)]
    pub convention: HoppingConvention,
}

impl Staggered2dParams {
    /// Isotropic hopping with the Kogut-Susskind plaquette coefficient `1/(4 g^2)`.
    pub fn new(t: f64, m: f64, g2: f64) -> Self {
        let plaquette = if g2 > 0.0 { 0.25 / g2 } else { 0.0 };
        Staggered2dParams {
            t: [t, t],
            m,
            g2,
            plaquette,
            convention: HoppingConvention::Imaginary,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.t[0], self.t[1], self.m, self.g2, self.plaquette];
        if !all.iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite 2D coupling".into()));
        }
        if self.t.iter().any(|&t| t < 0.0) || self.g2 < 0.0 {
            return Err(Error::InvalidParameter(
                "hoppings and g^2 must be non-negative".into(),
            ));
        }
        Ok(())
    }
}

fn require_2d_links(basis: &SectorBasis) -> Result<()> {
    if basis.lattice().dim() != 2 {
        return Err(Error::Geometry(format!(
            "expected a 2D lattice, got {}D",
            basis.lattice().dim()
        )));
    }
    if basis.link_kind().is_none() {
        return Err(Error::BasisMismatch("basis has no link variables".into()));
    }
    Ok(())
}

/// Emits `coef (U_plaq + U_plaq^dag)` for every plaquette.
fn push_plaquettes(
    basis: &SectorBasis,
    s: &BasisState,
    coef: f64,
    out: &mut Vec<(BasisState, C64)>,
) {
    let kind = basis.link_kind().expect("links");
    let lat = basis.lattice();
    for p in 0..lat.n_plaquettes() {
        let links = lat.plaquette_links(p).expect("plaquette");
        for dagger in [false, true] {
            let mut state = *s;
            let mut amp = coef;
            for ol in &links {
                let level = basis.link_level(&state, ol.link);
                let raise = ol.forward != dagger;
                let step = if raise {
                    kind.raise_amplitude(level).map(|u| (u, level + 1))
                } else if level > 0 {
                    kind.raise_amplitude(level - 1).map(|u| (u, level - 1))
                } else {
                    None
                };
                match step {
                    Some((u, next)) => {
                        amp *= u;
                        state = basis.with_link_level(&state, ol.link, next);
                    }
                    None => {
                        amp = 0.0;
                        break;
                    }
                }
            }
            if amp != 0.0 {
                out.push((state, C64::new(amp, 0.0)));
            }
        }
    }
}

fn electric(basis: &SectorBasis, s: &BasisState) -> f64 {
    (0..basis.n_links())
        .map(|l| basis.link_value(s, l).powi(2))
        .sum()
}

/// `(g^2/2) sum L^2 - 1/(4 g^2) sum (U_plaq + h.c.)` on a pure-gauge basis.
pub fn pure_gauge_2d_hamiltonian(basis: &SectorBasis, g2: f64) -> Result<SparseOperator> {
    require_2d_links(basis)?;
    if basis.has_matter() {
        return Err(Error::BasisMismatch(
            "pure-gauge model expects a basis without fermions".into(),
        ));
    }
    if !(g2.is_finite() && g2 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "g^2 must be positive, got {g2}"
        )));
    }
    let k = 0.25 / g2;
    let op = assemble(basis, |s, out| {
        out.push((*s, C64::new(0.5 * g2 * electric(basis, s), 0.0)));
        push_plaquettes(basis, s, -k, out);
    })?;
    op.require_hermitian("2D pure-gauge Hamiltonian")
}

/// Staggered fermions on a square lattice with hopping signs
/// `(-1)^(r_1 + ... + r_{i-1})`, staggered mass, electric energy and
/// plaquette term.
pub fn staggered_hamiltonian_2d(
    params: &Staggered2dParams,
    basis: &SectorBasis,
) -> Result<SparseOperator> {
    params.validate()?;
    require_2d_links(basis)?;
    if !basis.has_matter() {
        return Err(Error::BasisMismatch("basis has no fermion modes".into()));
    }
    let lat = basis.lattice();
    let op = assemble(basis, |s, out| {
        let mass: f64 = (0..lat.n_sites())
            .filter(|&n| s.occupied(n))
            .map(|n| lat.parity(n).sign())
            .sum();
        out.push((
            *s,
            C64::new(params.m * mass + 0.5 * params.g2 * electric(basis, s), 0.0),
        ));
        for link in 0..basis.n_links() {
            let l = lat.link(link);
            let t = params.t[l.direction];
            if t != 0.0 {
                let coef =
                    params.convention.coefficient(t) * lat.hopping_sign(l.origin, l.direction);
                push_gauge_hop(basis, s, link, coef, out);
            }
        }
        if params.plaquette != 0.0 {
            push_plaquettes(basis, s, -params.plaquette, out);
        }
    })?;
    op.require_hermitian("2D staggered Hamiltonian")
}
