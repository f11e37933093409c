//! Hypercubic lattices in one and two spatial dimensions.
//!
//! Sites are numbered row-major with the x coordinate running fastest.
//! Links are numbered by origin site, then by direction (x before y). A
//! plaquette is identified by its origin site and is traversed
//! `r -> r+x -> r+x+y -> r+y -> r`.
//!
//! Coordinates are stored zero-based, but staggering signs use the
//! one-based convention of the lattice gauge literature: the first site of
//! a chain is odd, and in 2D the origin `(1, 1)` is even.

use crate::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

/// Staggered-fermion parity of a site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SiteParity {
    Even,
    Odd,
}

impl SiteParity {
    /// `+1` for even sites, `-1` for odd ones.
    pub fn sign(self) -> f64 {
        match self {
            SiteParity::Even => 1.0,
            SiteParity::Odd => -1.0,
        }
    }

    pub fn is_odd(self) -> bool {
        self == SiteParity::Odd
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Link {
    pub origin: usize,
    pub target: usize,
    pub direction: usize,
}

/// A link as it appears along a plaquette, with `forward` set when the
/// loop traverses it from origin to target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OrientedLink {
    pub link: usize,
    pub origin: usize,
    pub direction: usize,
    pub forward: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    extents: Vec<usize>,
    boundary: Vec<Boundary>,
    links: Vec<Link>,
    /// `site * dim + direction -> link`
    outgoing: Vec<Option<usize>>,
    /// `site * dim + direction -> link` ending at `site`
    incoming: Vec<Option<usize>>,
    plaquettes: Vec<usize>,
}

impl Lattice {
    /// Builds a lattice with `extents.len()` spatial dimensions.
    pub fn new(extents: &[usize], boundary: &[Boundary]) -> Result<Self> {
        let dim = extents.len();
        if !(1..=2).contains(&dim) {
            return Err(Error::Geometry(format!(
                "spatial dimension must be 1 or 2, got {dim}"
            )));
        }
        if boundary.len() != dim {
            return Err(Error::Geometry(format!(
                "{} boundary conditions for {dim} directions",
                boundary.len()
            )));
        }
        if let Some(e) = extents.iter().find(|&&e| e < 2) {
            return Err(Error::Geometry(format!("extent {e} < 2")));
        }

        let mut lattice = Lattice {
            extents: extents.to_vec(),
            boundary: boundary.to_vec(),
            links: Vec::new(),
            outgoing: Vec::new(),
            incoming: Vec::new(),
            plaquettes: Vec::new(),
        };
        let n_sites = lattice.n_sites();
        lattice.outgoing = vec![None; n_sites * dim];
        lattice.incoming = vec![None; n_sites * dim];
        for site in 0..n_sites {
            for direction in 0..dim {
                if let Some(target) = lattice.neighbor(site, direction) {
                    let id = lattice.links.len();
                    lattice.links.push(Link {
                        origin: site,
                        target,
                        direction,
                    });
                    lattice.outgoing[site * dim + direction] = Some(id);
                    lattice.incoming[target * dim + direction] = Some(id);
                }
            }
        }
        if dim == 2 {
            lattice.plaquettes = (0..n_sites)
                .filter(|&s| {
                    lattice.outgoing[s * 2].is_some()
                        && lattice.outgoing[s * 2 + 1].is_some()
                        && lattice
                            .neighbor(s, 0)
                            .and_then(|r| lattice.neighbor(r, 1))
                            .is_some()
                })
                .collect();
        }
        Ok(lattice)
    }

    /// Open or periodic chain of `n` sites.
    pub fn chain(n: usize, boundary: Boundary) -> Result<Self> {
        Self::new(&[n], &[boundary])
    }

    /// `lx` by `ly` square lattice with one boundary condition for both axes.
    pub fn square(lx: usize, ly: usize, boundary: Boundary) -> Result<Self> {
        Self::new(&[lx, ly], &[boundary, boundary])
    }

    pub fn dim(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn boundary(&self) -> &[Boundary] {
        &self.boundary
    }

    pub fn n_sites(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn n_links(&self) -> usize {
        self.links.len()
    }

    pub fn n_plaquettes(&self) -> usize {
        self.plaquettes.len()
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn link(&self, id: usize) -> Link {
        self.links[id]
    }

    pub fn coords(&self, site: usize) -> Vec<usize> {
        let mut rest = site;
        self.extents
            .iter()
            .map(|&e| {
                let c = rest % e;
                rest /= e;
                c
            })
            .collect()
    }

    pub fn site_index(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.dim() {
            return None;
        }
        let mut index = 0;
        let mut stride = 1;
        for (&c, &e) in coords.iter().zip(&self.extents) {
            if c >= e {
                return None;
            }
            index += c * stride;
            stride *= e;
        }
        Some(index)
    }

    /// Nearest neighbour of `site` one step along `direction`, wrapping on
    /// periodic axes.
    pub fn neighbor(&self, site: usize, direction: usize) -> Option<usize> {
        let mut c = self.coords(site);
        let e = self.extents[direction];
        if c[direction] + 1 < e {
            c[direction] += 1;
        } else if self.boundary[direction] == Boundary::Periodic {
            c[direction] = 0;
        } else {
            return None;
        }
        self.site_index(&c)
    }

    /// Link leaving `site` along `direction`.
    pub fn link_from(&self, site: usize, direction: usize) -> Option<usize> {
        self.outgoing
            .get(site * self.dim() + direction)
            .copied()
            .flatten()
    }

    /// Link arriving at `site` along `direction`.
    pub fn link_into(&self, site: usize, direction: usize) -> Option<usize> {
        self.incoming
            .get(site * self.dim() + direction)
            .copied()
            .flatten()
    }

    /// Staggering parity `(-1)^(r_1 + ... + r_d)` with one-based coordinates.
    pub fn parity(&self, site: usize) -> SiteParity {
        let s: usize = self.coords(site).iter().map(|c| c + 1).sum();
        if s % 2 == 0 {
            SiteParity::Even
        } else {
            SiteParity::Odd
        }
    }

    /// Kogut-Susskind hopping sign `(-1)^(r_1 + ... + r_{i-1})` for a hop
    /// along `direction` (one-based coordinates).
    pub fn hopping_sign(&self, site: usize, direction: usize) -> f64 {
        let s: usize = self.coords(site)[..direction].iter().map(|c| c + 1).sum();
        if s % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }

    /// Origin site of plaquette `index`.
    pub fn plaquette_origin(&self, index: usize) -> Result<usize> {
        if self.dim() < 2 {
            return Err(Error::Geometry("no plaquettes in 1D".into()));
        }
        self.plaquettes
            .get(index)
            .copied()
            .ok_or(Error::OutOfRange {
                index,
                len: self.plaquettes.len(),
            })
    }

    /// The four links of a plaquette in the order of
    /// `U_{r,x} U_{r+x,y} U^dag_{r+y,x} U^dag_{r,y}`.
    pub fn plaquette_links(&self, index: usize) -> Result<[OrientedLink; 4]> {
        let r = self.plaquette_origin(index)?;
        let rx = self.neighbor(r, 0).expect("plaquette corner");
        let ry = self.neighbor(r, 1).expect("plaquette corner");
        let oriented = |site: usize, direction: usize, forward: bool| OrientedLink {
            link: self.link_from(site, direction).expect("plaquette link"),
            origin: site,
            direction,
            forward,
        };
        Ok([
            oriented(r, 0, true),
            oriented(rx, 1, true),
            oriented(ry, 0, false),
            oriented(r, 1, false),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashMap, HashSet};

    fn brute_force_counts(lat: &Lattice) -> (usize, usize) {
        // nearest-neighbour ordered pairs (r, r + e_j)
        let mut links = 0;
        let mut plaquettes = 0;
        let dim = lat.dim();
        let step = |c: &Vec<usize>, d: usize| -> Option<Vec<usize>> {
            let mut c = c.clone();
            c[d] += 1;
            if c[d] == lat.extents()[d] {
                if lat.boundary()[d] == Boundary::Periodic {
                    c[d] = 0;
                } else {
                    return None;
                }
            }
            Some(c)
        };
        for s in 0..lat.n_sites() {
            let c = lat.coords(s);
            for d in 0..dim {
                if step(&c, d).is_some() {
                    links += 1;
                }
            }
            if dim == 2 {
                let corner = step(&c, 0).and_then(|cx| step(&cx, 1));
                if step(&c, 1).is_some() && corner.is_some() {
                    plaquettes += 1;
                }
            }
        }
        (links, plaquettes)
    }

    #[test]
    fn counts_open_chain() {
        let lat = Lattice::chain(4, Boundary::Open).unwrap();
        assert_eq!(
            (lat.n_sites(), lat.n_links(), lat.n_plaquettes()),
            (4, 3, 0)
        );
        let lat = Lattice::chain(5, Boundary::Periodic).unwrap();
        assert_eq!(lat.n_links(), 5);
    }

    #[test]
    fn counts_small_torus() {
        let lat = Lattice::square(2, 2, Boundary::Periodic).unwrap();
        assert_eq!(
            (lat.n_sites(), lat.n_links(), lat.n_plaquettes()),
            (4, 8, 4)
        );
    }

    #[test]
    fn counts_open_rectangle_match_enumeration() {
        let lat = Lattice::square(3, 2, Boundary::Open).unwrap();
        assert_eq!(brute_force_counts(&lat), (7, 2));
        assert_eq!(
            (lat.n_sites(), lat.n_links(), lat.n_plaquettes()),
            (6, 7, 2)
        );
        for (lx, ly, b) in [
            (3, 3, Boundary::Open),
            (4, 3, Boundary::Periodic),
            (2, 5, Boundary::Open),
        ] {
            let lat = Lattice::square(lx, ly, b).unwrap();
            assert_eq!(
                brute_force_counts(&lat),
                (lat.n_links(), lat.n_plaquettes())
            );
        }
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(Lattice::new(&[2, 2, 2], &[Boundary::Open; 3]).is_err());
        assert!(Lattice::new(&[], &[]).is_err());
        assert!(Lattice::chain(1, Boundary::Open).is_err());
        assert!(Lattice::square(3, 1, Boundary::Open).is_err());
    }

    #[test]
    fn plaquette_zero_of_open_square() {
        let lat = Lattice::square(2, 2, Boundary::Open).unwrap();
        let p = lat.plaquette_links(0).unwrap();
        let summary: Vec<_> = p
            .iter()
            .map(|l| (l.origin, l.direction, l.forward))
            .collect();
        assert_eq!(
            summary,
            vec![(0, 0, true), (1, 1, true), (2, 0, false), (0, 1, false)]
        );
    }

    #[test]
    fn plaquettes_rejected_in_1d() {
        let lat = Lattice::chain(4, Boundary::Periodic).unwrap();
        match lat.plaquette_links(0) {
            Err(Error::Geometry(msg)) => assert!(msg.contains("no plaquettes in 1D")),
            other => panic!("unexpected {other:?}"),
        }
        let sq = Lattice::square(2, 2, Boundary::Open).unwrap();
        assert!(matches!(
            sq.plaquette_links(1),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn shared_links_have_opposite_orientation() {
        let lat = Lattice::square(3, 3, Boundary::Open).unwrap();
        assert_eq!(lat.n_plaquettes(), 4);
        let mut uses: HashMap<usize, Vec<bool>> = HashMap::new();
        for p in 0..lat.n_plaquettes() {
            let links = lat.plaquette_links(p).unwrap();
            // each plaquette is a closed 4-cycle
            let walk: Vec<(usize, usize)> = links
                .iter()
                .map(|l| {
                    let link = lat.link(l.link);
                    if l.forward {
                        (link.origin, link.target)
                    } else {
                        (link.target, link.origin)
                    }
                })
                .collect();
            for k in 0..4 {
                assert_eq!(walk[k].1, walk[(k + 1) % 4].0);
            }
            for l in links {
                uses.entry(l.link).or_default().push(l.forward);
            }
        }
        for dirs in uses.values() {
            assert!(dirs.len() <= 2);
            if dirs.len() == 2 {
                assert_ne!(dirs[0], dirs[1]);
            }
        }
    }

    #[test]
    fn index_maps_round_trip() {
        for lat in [
            Lattice::chain(6, Boundary::Open).unwrap(),
            Lattice::square(3, 4, Boundary::Periodic).unwrap(),
            Lattice::new(&[4, 3], &[Boundary::Open, Boundary::Periodic]).unwrap(),
        ] {
            for s in 0..lat.n_sites() {
                assert_eq!(lat.site_index(&lat.coords(s)), Some(s));
            }
            let mut seen = HashSet::new();
            for (id, l) in lat.links().iter().enumerate() {
                assert_eq!(lat.link_from(l.origin, l.direction), Some(id));
                assert_eq!(lat.link_into(l.target, l.direction), Some(id));
                assert!(seen.insert((l.origin, l.direction)));
            }
        }
    }

    #[test]
    fn parity_alternates_between_neighbours() {
        let chain = Lattice::chain(5, Boundary::Open).unwrap();
        assert!(chain.parity(0).is_odd());
        let sq = Lattice::square(4, 4, Boundary::Periodic).unwrap();
        assert_eq!(sq.parity(0), SiteParity::Even);
        for lat in [chain, sq] {
            for l in lat.links() {
                assert_ne!(lat.parity(l.origin), lat.parity(l.target));
            }
        }
    }

    #[test]
    fn translation_permutes_periodic_tables() {
        let lat = Lattice::square(4, 3, Boundary::Periodic).unwrap();
        for shift_dir in 0..2 {
            let shift = |s: usize| lat.neighbor(s, shift_dir).unwrap();
            let sites: HashSet<usize> = (0..lat.n_sites()).map(shift).collect();
            assert_eq!(sites.len(), lat.n_sites());
            let mut links = HashSet::new();
            for l in lat.links() {
                let id = lat.link_from(shift(l.origin), l.direction).unwrap();
                assert_eq!(lat.link(id).target, shift(l.target));
                links.insert(id);
            }
            assert_eq!(links.len(), lat.n_links());
            let origins: HashSet<usize> = (0..lat.n_plaquettes())
                .map(|p| shift(lat.plaquette_origin(p).unwrap()))
                .collect();
            assert_eq!(origins.len(), lat.n_plaquettes());
        }
    }
}
