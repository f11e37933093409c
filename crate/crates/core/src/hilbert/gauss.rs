use super::{BasisState, HalfInt, LinkKind, SectorBasis, SectorTag};
use crate::lattice::{Boundary, Lattice};
use crate::operator::SparseOperator;
use crate::{Error, Result};
use std::sync::Arc;

/// Background data entering the Gauss generators
/// `G_r = sum_j (L_{r,j} - L_{r-j,j}) - Q_r`,
/// `Q_r = n_r - [r odd] + q_r`.
///
/// In an open chain the missing link to the left of the first site carries
/// the background field `L_0`; the field leaving the last site is not
/// constrained. Other absent links contribute zero.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct GaussLaw {
    pub background: HalfInt,
    /// Static charges `q_r` per site; empty means none.
    pub static_charges: Vec<i32>,
}

impl GaussLaw {
    pub fn with_background(background: HalfInt) -> Self {
        GaussLaw {
            background,
            static_charges: Vec::new(),
        }
    }

    pub fn static_charge(&self, site: usize) -> i32 {
        self.static_charges.get(site).copied().unwrap_or(0)
    }

    /// Sites whose generator is imposed as a constraint.
    pub fn constrained_sites(lattice: &Lattice) -> Vec<usize> {
        let n = lattice.n_sites();
        if lattice.dim() == 1 && lattice.boundary()[0] == Boundary::Open {
            (0..n - 1).collect()
        } else {
            (0..n).collect()
        }
    }

    fn validate(&self, lattice: &Lattice) -> Result<()> {
        if !self.static_charges.is_empty() && self.static_charges.len() != lattice.n_sites() {
            return Err(Error::InvalidParameter(format!(
                "{} static charges for {} sites",
                self.static_charges.len(),
                lattice.n_sites()
            )));
        }
        Ok(())
    }
}

fn uses_background(lattice: &Lattice, site: usize, direction: usize) -> bool {
    lattice.dim() == 1 && lattice.boundary()[0] == Boundary::Open && site == 0 && direction == 0
}

/// Twice the eigenvalue of `G_site` on a basis state.
pub fn gauss_eigenvalue_twice(
    basis: &SectorBasis,
    state: &BasisState,
    site: usize,
    law: &GaussLaw,
) -> i32 {
    let lattice = basis.lattice();
    let mut twice = 0i32;
    if basis.link_kind().is_some() {
        for direction in 0..lattice.dim() {
            if let Some(l) = lattice.link_from(site, direction) {
                twice += basis.link_twice_l(state, l);
            }
            match lattice.link_into(site, direction) {
                Some(l) => twice -= basis.link_twice_l(state, l),
                None if uses_background(lattice, site, direction) => {
                    twice -= law.background.twice()
                }
                None => {}
            }
        }
    }
    let mut charge = law.static_charge(site);
    if basis.has_matter() {
        charge += state.occupied(site) as i32 - lattice.parity(site).is_odd() as i32;
    }
    twice - 2 * charge
}

/// `G_site` as a diagonal operator on `basis`.
pub fn gauss_generator(basis: &SectorBasis, site: usize, law: &GaussLaw) -> Result<SparseOperator> {
    let n = basis.n_sites();
    if site >= n {
        return Err(Error::OutOfRange {
            index: site,
            len: n,
        });
    }
    law.validate(basis.lattice())?;
    let diag: Vec<f64> = basis
        .states()
        .iter()
        .map(|s| gauss_eigenvalue_twice(basis, s, site, law) as f64 / 2.0)
        .collect();
    Ok(SparseOperator::from_diagonal(&diag))
}

/// Generators at every constrained site.
pub fn gauss_generators(basis: &SectorBasis, law: &GaussLaw) -> Result<Vec<SparseOperator>> {
    GaussLaw::constrained_sites(basis.lattice())
        .into_iter()
        .map(|s| gauss_generator(basis, s, law))
        .collect()
}

fn fermion_number_of(tag: &SectorTag) -> Option<usize> {
    match tag {
        SectorTag::Unconstrained => None,
        SectorTag::FermionNumber(k) => Some(*k),
        SectorTag::Gauss { fermion_number, .. } => *fermion_number,
    }
}

/// Keeps the states annihilated by every constrained generator. An empty
/// result is a valid (empty) sector.
pub fn project_gauss_sector(basis: &SectorBasis, law: &GaussLaw) -> Result<SectorBasis> {
    let lattice = basis.lattice();
    law.validate(lattice)?;
    let sites = GaussLaw::constrained_sites(lattice);
    let states: Vec<BasisState> = basis
        .states()
        .iter()
        .filter(|s| {
            sites
                .iter()
                .all(|&r| gauss_eigenvalue_twice(basis, s, r, law) == 0)
        })
        .copied()
        .collect();
    Ok(SectorBasis::from_parts(
        lattice.clone(),
        basis.has_matter(),
        basis.link_kind(),
        states,
        SectorTag::Gauss {
            law: law.clone(),
            fermion_number: fermion_number_of(basis.tag()),
        },
    ))
}

/// Gauss sector of an open chain built directly: every fermion
/// configuration fixes the links through `L_n = L_{n-1} + Q_n`, and
/// configurations whose fields leave the link space are dropped.
pub fn gauss_sector_1d(
    lattice: Arc<Lattice>,
    link_kind: LinkKind,
    law: &GaussLaw,
    fermion_number: Option<usize>,
) -> Result<SectorBasis> {
    if lattice.dim() != 1 || lattice.boundary()[0] != Boundary::Open {
        return Err(Error::Geometry(
            "direct sector construction needs an open chain".into(),
        ));
    }
    law.validate(&lattice)?;
    let n = lattice.n_sites();
    if n > 30 {
        return Err(Error::Capacity {
            what: "chain sites".into(),
            required: n as u128,
            limit: 30,
        });
    }
    let d = link_kind.local_dim() as u64;
    let mut states = Vec::new();
    'configs: for occupation in 0..1u64 << n {
        if fermion_number.is_some_and(|k| occupation.count_ones() as usize != k) {
            continue;
        }
        let mut field = law.background.twice();
        let mut links = 0u64;
        for site in 0..n - 1 {
            let q = (occupation >> site & 1) as i32 - lattice.parity(site).is_odd() as i32
                + law.static_charge(site);
            field += 2 * q;
            match link_kind.level_of(field) {
                Some(level) => links = links * d + level as u64,
                None => continue 'configs,
            }
        }
        states.push(BasisState { occupation, links });
    }
    if states.len() as u128 > super::MAX_BASIS_STATES {
        return Err(Error::Capacity {
            what: "sector states".into(),
            required: states.len() as u128,
            limit: super::MAX_BASIS_STATES,
        });
    }
    Ok(SectorBasis::from_parts(
        lattice,
        true,
        Some(link_kind),
        states,
        SectorTag::Gauss {
            law: law.clone(),
            fermion_number,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::enumerate_basis;

    fn chain(n: usize) -> Arc<Lattice> {
        Arc::new(Lattice::chain(n, Boundary::Open).unwrap())
    }

    fn state_with(basis: &SectorBasis, occupied: &[usize], twice_l: &[i32]) -> BasisState {
        let kind = basis.link_kind().unwrap();
        let levels: Vec<usize> = twice_l.iter().map(|&t| kind.level_of(t).unwrap()).collect();
        let occupation = occupied.iter().fold(0u64, |acc, &s| acc | 1 << s);
        let s = BasisState {
            occupation,
            links: basis.encode_links(&levels),
        };
        assert!(basis.index_of(&s).is_some());
        s
    }

    #[test]
    fn bare_vacuum_is_gauge_invariant() {
        let basis = enumerate_basis(
            chain(4),
            true,
            Some(LinkKind::TruncatedWilson { cutoff: 1 }),
            None,
        )
        .unwrap();
        let vac = basis.state(basis.bare_vacuum(HalfInt::ZERO).unwrap());
        let law = GaussLaw::default();
        for r in 0..4 {
            assert_eq!(gauss_eigenvalue_twice(&basis, &vac, r, &law), 0);
        }
    }

    #[test]
    fn single_pair_state_on_two_sites() {
        // first site emptied, second filled: the string between them carries L = -1
        let basis = enumerate_basis(
            chain(2),
            true,
            Some(LinkKind::TruncatedWilson { cutoff: 1 }),
            None,
        )
        .unwrap();
        let law = GaussLaw::default();
        let pair = state_with(&basis, &[1], &[-2]);
        assert_eq!(gauss_eigenvalue_twice(&basis, &pair, 0, &law), 0);
        assert_eq!(gauss_eigenvalue_twice(&basis, &pair, 1, &law), 0);
        let flipped = state_with(&basis, &[1], &[2]);
        assert_eq!(gauss_eigenvalue_twice(&basis, &flipped, 0, &law), 4);
    }

    #[test]
    fn stray_fermion_on_even_site() {
        let basis = enumerate_basis(
            chain(4),
            true,
            Some(LinkKind::TruncatedWilson { cutoff: 1 }),
            None,
        )
        .unwrap();
        let law = GaussLaw::default();
        // vacuum fills sites 0 and 2; add one on site 1
        let s = state_with(&basis, &[0, 1, 2], &[0, 0, 0]);
        let g: Vec<i32> = (0..4)
            .map(|r| gauss_eigenvalue_twice(&basis, &s, r, &law) / 2)
            .collect();
        assert_eq!(g, vec![0, -1, 0, 0]);
    }

    #[test]
    fn generator_rejects_bad_site() {
        let basis = enumerate_basis(chain(2), true, Some(LinkKind::spin_half()), None).unwrap();
        assert!(matches!(
            gauss_generator(&basis, 2, &GaussLaw::default()),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn small_sector_dimensions() {
        let law = GaussLaw::default();
        let b2 = enumerate_basis(
            chain(2),
            true,
            Some(LinkKind::TruncatedWilson { cutoff: 1 }),
            Some(1),
        )
        .unwrap();
        let s2 = project_gauss_sector(&b2, &law).unwrap();
        assert_eq!(s2.len(), 2);
        let b4 = enumerate_basis(
            chain(4),
            true,
            Some(LinkKind::TruncatedWilson { cutoff: 2 }),
            Some(2),
        )
        .unwrap();
        assert_eq!(project_gauss_sector(&b4, &law).unwrap().len(), 6);
    }

    #[test]
    fn direct_chain_sector_matches_filter() {
        for (n, kind, bg, k) in [
            (2, LinkKind::TruncatedWilson { cutoff: 1 }, 0, None),
            (4, LinkKind::TruncatedWilson { cutoff: 2 }, 0, Some(2)),
            (4, LinkKind::TruncatedWilson { cutoff: 1 }, 2, None),
            (4, LinkKind::QuantumLinkSpin { two_s: 1 }, 1, None),
            (5, LinkKind::QuantumLinkSpin { two_s: 2 }, -2, Some(3)),
        ] {
            let law = GaussLaw {
                background: HalfInt::from_twice(bg),
                static_charges: Vec::new(),
            };
            let full = enumerate_basis(chain(n), true, Some(kind), k).unwrap();
            let filtered = project_gauss_sector(&full, &law).unwrap();
            let direct = gauss_sector_1d(chain(n), kind, &law, k).unwrap();
            assert_eq!(filtered.states(), direct.states(), "n={n} {kind:?} bg={bg}");
        }
    }

    #[test]
    fn static_charges_shift_the_sector() {
        let law = GaussLaw {
            background: HalfInt::ZERO,
            static_charges: vec![1, -1, 0, 0],
        };
        let full = enumerate_basis(
            chain(4),
            true,
            Some(LinkKind::TruncatedWilson { cutoff: 2 }),
            None,
        )
        .unwrap();
        let filtered = project_gauss_sector(&full, &law).unwrap();
        let direct = gauss_sector_1d(
            chain(4),
            LinkKind::TruncatedWilson { cutoff: 2 },
            &law,
            None,
        )
        .unwrap();
        assert_eq!(filtered.states(), direct.states());
        assert!(filtered.bare_vacuum(HalfInt::ZERO).is_none());
    }

    #[test]
    fn empty_sector_is_not_an_error() {
        let law = GaussLaw::with_background(HalfInt::from_int(0));
        let full = enumerate_basis(chain(3), true, Some(LinkKind::spin_half()), None).unwrap();
        let sector = project_gauss_sector(&full, &law).unwrap();
        assert!(sector.is_empty());
    }

    #[test]
    fn generators_commute_and_vanish_on_sector() {
        let torus = Arc::new(Lattice::square(2, 2, Boundary::Periodic).unwrap());
        let basis = enumerate_basis(torus, false, Some(LinkKind::spin_half()), None).unwrap();
        let law = GaussLaw::default();
        let gens = gauss_generators(&basis, &law).unwrap();
        for a in &gens {
            for b in &gens {
                assert!(a.commutator(b).max_abs() < 1e-12);
            }
        }
        let sector = project_gauss_sector(&basis, &law).unwrap();
        assert!(!sector.is_empty());
        let sector_gens = gauss_generators(&sector, &law).unwrap();
        for g in sector_gens {
            assert_eq!(g.max_abs(), 0.0);
        }
    }
}
