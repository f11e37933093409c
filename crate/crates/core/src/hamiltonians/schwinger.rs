use super::{assemble, require_matter_chain};
use crate::hilbert::{hop_sign, BasisState, SectorBasis};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Phase of the gauge-matter hopping.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HoppingConvention {
    /// `-i t (c^dag_n U_n c_{n+1} - h.c.)`
    #[default]
    Imaginary,
    /// `-t (c^dag_n U_n c_{n+1} + h.c.)`, reached by `c_n -> (-i)^n c_n`.
    Real,
}

impl HoppingConvention {
    pub(crate) fn coefficient(self, t: f64) -> C64 {
        match self {
            HoppingConvention::Imaginary => C64::new(0.0, -t),
            HoppingConvention::Real => C64::new(-t, 0.0),
        }
    }
}

/// Couplings of the lattice Schwinger model in lattice units. Geometry,
/// link kind and background field come with the basis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchwingerParams {
    pub t: f64,
    pub m: f64,
    pub g2: f64,
    #[serde(default)]
    pub convention: HoppingConvention,
}

impl SchwingerParams {
    pub fn new(t: f64, m: f64, g2: f64) -> Self {
        SchwingerParams {
            t,
            m,
            g2,
            convention: HoppingConvention::Imaginary,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.t, self.m, self.g2].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite Schwinger coupling".into(),
            ));
        }
        if self.t < 0.0 || self.g2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "t and g^2 must be non-negative (t = {}, g^2 = {})",
                self.t, self.g2
            )));
        }
        Ok(())
    }
}

/// Emits the correlated hopping `coef c^dag_a U_l c_b + h.c.` on `link`.
pub(crate) fn push_gauge_hop(
    basis: &SectorBasis,
    s: &BasisState,
    link: usize,
    coef: C64,
    out: &mut Vec<(BasisState, C64)>,
) {
    let kind = basis.link_kind().expect("links");
    let l = basis.lattice().link(link);
    let (a, b) = (l.origin, l.target);
    let level = basis.link_level(s, link);
    let flip = BasisState {
        occupation: s.occupation ^ (1 << a | 1 << b),
        links: s.links,
    };
    let sign = hop_sign(s.occupation, a, b);
    if !s.occupied(a) && s.occupied(b) {
        if let Some(u) = kind.raise_amplitude(level) {
            out.push((
                basis.with_link_level(&flip, link, level + 1),
                coef * u * sign,
            ));
        }
    } else if s.occupied(a) && !s.occupied(b) && level > 0 {
        let u = kind.raise_amplitude(level - 1).expect("interior level");
        out.push((
            basis.with_link_level(&flip, link, level - 1),
            coef.conj() * u * sign,
        ));
    }
}

/// `H = hop + m sum_n (-1)^n n_n + (g^2/2) sum_links L^2` on a chain basis
/// with link variables. Open and periodic chains are both supported; the
/// periodic wrap hop carries the usual Jordan-Wigner string.
pub fn schwinger_hamiltonian(
    params: &SchwingerParams,
    basis: &SectorBasis,
) -> Result<SparseOperator> {
    params.validate()?;
    require_matter_chain(basis, true)?;
    let lat = basis.lattice();
    let coef = params.convention.coefficient(params.t);
    let op = assemble(basis, |s, out| {
        let mass: f64 = (0..lat.n_sites())
            .filter(|&n| s.occupied(n))
            .map(|n| lat.parity(n).sign())
            .sum();
        let electric: f64 = (0..basis.n_links())
            .map(|l| basis.link_value(s, l).powi(2))
            .sum();
        out.push((
            *s,
            C64::new(params.m * mass + 0.5 * params.g2 * electric, 0.0),
        ));
        if params.t != 0.0 {
            for link in 0..basis.n_links() {
                push_gauge_hop(basis, s, link, coef, out);
            }
        }
    })?;
    op.require_hermitian("Schwinger Hamiltonian")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{
        enumerate_basis, gauss_generators, gauss_sector_1d, GaussLaw, HalfInt, LinkKind,
    };
    use crate::lattice::{Boundary, Lattice};
    use crate::linalg::{max_deviation, spectrum};
    use std::sync::Arc;

    fn chain(n: usize, b: Boundary) -> Arc<Lattice> {
        Arc::new(Lattice::chain(n, b).unwrap())
    }

    #[test]
    fn hopping_off_gives_diagonal_energies() {
        let basis = enumerate_basis(
            chain(3, Boundary::Open),
            true,
            Some(LinkKind::TruncatedWilson { cutoff: 1 }),
            None,
        )
        .unwrap();
        let p = SchwingerParams::new(0.0, 0.7, 1.3);
        let h = schwinger_hamiltonian(&p, &basis).unwrap();
        assert!(h.is_diagonal());
        for (i, s) in basis.states().iter().enumerate() {
            // sites 1,2,3 (one-based): signs -, +, -
            let mass = [-1.0, 1.0, -1.0]
                .iter()
                .enumerate()
                .filter(|(n, _)| s.occupied(*n))
                .map(|(_, v)| v)
                .sum::<f64>();
            let el: f64 = (0..2).map(|l| basis.link_value(s, l).powi(2)).sum();
            assert!((h.get(i, i).re - (0.7 * mass + 0.65 * el)).abs() < 1e-14);
        }
    }

    #[test]
    fn two_site_pair_creation_is_a_two_level_system() {
        let sector = gauss_sector_1d(
            chain(2, Boundary::Open),
            LinkKind::TruncatedWilson { cutoff: 1 },
            &GaussLaw::default(),
            Some(1),
        )
        .unwrap();
        assert_eq!(sector.len(), 2);
        let h = schwinger_hamiltonian(&SchwingerParams::new(1.0, 0.0, 0.0), &sector).unwrap();
        // oracle: [[0, a], [a*, 0]] with |a| = t has eigenvalues -t, t
        let a = h.get(0, 1);
        assert!((a.norm() - 1.0).abs() < 1e-15);
        let spec = spectrum(&h).unwrap();
        assert!(max_deviation(&spec, &[-1.0, 1.0]) < 1e-12);
    }

    #[test]
    fn gauge_invariance_on_full_space() {
        for kind in [
            LinkKind::spin_half(),
            LinkKind::QuantumLinkSpin { two_s: 2 },
        ] {
            for boundary in [Boundary::Open, Boundary::Periodic] {
                let basis = enumerate_basis(chain(4, boundary), true, Some(kind), None).unwrap();
                let h =
                    schwinger_hamiltonian(&SchwingerParams::new(0.8, 0.3, 1.1), &basis).unwrap();
                let law = GaussLaw::with_background(HalfInt::ZERO);
                for r in 0..4 {
                    let g = crate::hilbert::gauss_generator(&basis, r, &law).unwrap();
                    assert!(
                        h.commutator(&g).max_abs() < 1e-12,
                        "{kind:?} {boundary:?} site {r}"
                    );
                }
                let _ = gauss_generators(&basis, &law).unwrap();
            }
        }
    }

    #[test]
    fn conventions_are_unitarily_equivalent() {
        for boundary in [Boundary::Open, Boundary::Periodic] {
            let basis = enumerate_basis(
                chain(4, boundary),
                true,
                Some(LinkKind::TruncatedWilson { cutoff: 1 }),
                Some(2),
            )
            .unwrap();
            let mut p = SchwingerParams::new(1.0, 0.4, 0.9);
            let a = spectrum(&schwinger_hamiltonian(&p, &basis).unwrap()).unwrap();
            p.convention = HoppingConvention::Real;
            let b = spectrum(&schwinger_hamiltonian(&p, &basis).unwrap()).unwrap();
            assert!(max_deviation(&a, &b) < 1e-12, "{boundary:?}");
        }
    }

    #[test]
    fn particle_number_is_conserved() {
        let basis = enumerate_basis(
            chain(3, Boundary::Periodic),
            true,
            Some(LinkKind::spin_half()),
            None,
        )
        .unwrap();
        let h = schwinger_hamiltonian(&SchwingerParams::new(1.0, 0.5, 0.5), &basis).unwrap();
        let number: Vec<f64> = basis
            .states()
            .iter()
            .map(|s| s.n_fermions() as f64)
            .collect();
        let n = SparseOperator::from_diagonal(&number);
        assert!(h.commutator(&n).max_abs() < 1e-12);
    }

    #[test]
    fn rejects_negative_coupling_and_wrong_basis() {
        let basis = enumerate_basis(
            chain(2, Boundary::Open),
            true,
            Some(LinkKind::spin_half()),
            None,
        )
        .unwrap();
        assert!(schwinger_hamiltonian(&SchwingerParams::new(1.0, 0.0, -1.0), &basis).is_err());
        let bare = SectorBasis::matter_only(chain(2, Boundary::Open), None).unwrap();
        assert!(matches!(
            schwinger_hamiltonian(&SchwingerParams::new(1.0, 0.0, 1.0), &bare),
            Err(Error::BasisMismatch(_))
        ));
    }
}
