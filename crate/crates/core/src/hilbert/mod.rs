//! Many-body bases for staggered fermions coupled to finite link spaces.
//!
//! A basis state is a fermion occupation bitstring (bit `n` is site `n`)
//! together with one level index per link. Link levels are packed into a
//! mixed-radix integer with link 0 as the most significant digit, so the
//! natural ordering of `(occupation, links)` is lexicographic in
//! `(bitstring, link values)`.

mod gauss;
mod link;

pub use gauss::{
    gauss_eigenvalue_twice, gauss_generator, gauss_generators, gauss_sector_1d,
    project_gauss_sector, GaussLaw,
};
pub use link::{HalfInt, LinkKind};

use crate::lattice::Lattice;
use crate::{Error, Result};
use serde_json::json;
use std::sync::Arc;

/// Maximum number of states a basis may hold.
pub const MAX_BASIS_STATES: u128 = 1 << 26;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisState {
    pub occupation: u64,
    pub links: u64,
}

impl BasisState {
    pub fn occupied(&self, site: usize) -> bool {
        self.occupation >> site & 1 == 1
    }

    pub fn n_fermions(&self) -> u32 {
        self.occupation.count_ones()
    }
}

/// What a basis was restricted to.
#[derive(Clone, Debug, PartialEq)]
pub enum SectorTag {
    Unconstrained,
    FermionNumber(usize),
    Gauss {
        law: GaussLaw,
        fermion_number: Option<usize>,
    },
}

#[derive(Clone, Debug)]
pub struct SectorBasis {
    lattice: Arc<Lattice>,
    matter: bool,
    link_kind: Option<LinkKind>,
    radix: Vec<u64>,
    states: Vec<BasisState>,
    tag: SectorTag,
}

/// Sign picked up by `c^dag_a c_b` acting on `occupation` (site-major mode
/// ordering): the parity of occupied modes strictly between `a` and `b`.
pub fn hop_sign(occupation: u64, a: usize, b: usize) -> f64 {
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    if hi <= lo + 1 {
        return 1.0;
    }
    let mask = ((1u64 << hi) - 1) & !((1u64 << (lo + 1)) - 1);
    if (occupation & mask).count_ones() % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

impl SectorBasis {
    pub(crate) fn from_parts(
        lattice: Arc<Lattice>,
        matter: bool,
        link_kind: Option<LinkKind>,
        mut states: Vec<BasisState>,
        tag: SectorTag,
    ) -> Self {
        let radix = Self::radix_for(&lattice, link_kind);
        states.sort_unstable();
        states.dedup();
        SectorBasis {
            lattice,
            matter,
            link_kind,
            radix,
            states,
            tag,
        }
    }

    fn radix_for(lattice: &Lattice, link_kind: Option<LinkKind>) -> Vec<u64> {
        let n_links = if link_kind.is_some() {
            lattice.n_links()
        } else {
            0
        };
        let d = link_kind.map(|k| k.local_dim() as u64).unwrap_or(1);
        let mut radix = vec![1u64; n_links];
        for l in (0..n_links.saturating_sub(1)).rev() {
            radix[l] = radix[l + 1] * d;
        }
        radix
    }

    /// Fermions only: the full `2^N` space or a fixed-number subspace. This
    /// is also the qubit basis of the spin-encoded chain.
    pub fn matter_only(lattice: Arc<Lattice>, fermion_number: Option<usize>) -> Result<Self> {
        enumerate_basis(lattice, true, None, fermion_number)
    }

    pub fn lattice(&self) -> &Arc<Lattice> {
        &self.lattice
    }

    pub fn has_matter(&self) -> bool {
        self.matter
    }

    pub fn link_kind(&self) -> Option<LinkKind> {
        self.link_kind
    }

    pub fn tag(&self) -> &SectorTag {
        &self.tag
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_sites(&self) -> usize {
        self.lattice.n_sites()
    }

    /// Number of links carrying a Hilbert space (zero for matter-only bases).
    pub fn n_links(&self) -> usize {
        self.radix.len()
    }

    pub fn states(&self) -> &[BasisState] {
        &self.states
    }

    pub fn state(&self, index: usize) -> BasisState {
        self.states[index]
    }

    pub fn index_of(&self, state: &BasisState) -> Option<usize> {
        self.states.binary_search(state).ok()
    }

    pub fn link_level(&self, state: &BasisState, link: usize) -> usize {
        let d = self.link_kind.expect("basis has no links").local_dim() as u64;
        (state.links / self.radix[link] % d) as usize
    }

    pub fn with_link_level(&self, state: &BasisState, link: usize, level: usize) -> BasisState {
        let old = self.link_level(state, link) as u64;
        let links = state.links - old * self.radix[link] + level as u64 * self.radix[link];
        BasisState {
            occupation: state.occupation,
            links,
        }
    }

    /// Electric field value of `link`, doubled so half-integers stay exact.
    pub fn link_twice_l(&self, state: &BasisState, link: usize) -> i32 {
        self.link_kind
            .expect("basis has no links")
            .twice_l(self.link_level(state, link))
    }

    pub fn link_value(&self, state: &BasisState, link: usize) -> f64 {
        self.link_twice_l(state, link) as f64 / 2.0
    }

    pub(crate) fn encode_links(&self, levels: &[usize]) -> u64 {
        levels
            .iter()
            .zip(&self.radix)
            .map(|(&l, &r)| l as u64 * r)
            .sum()
    }

    /// Index of the bare staggered vacuum (odd sites filled) with every link
    /// at `background`, if that state belongs to the basis.
    pub fn bare_vacuum(&self, background: HalfInt) -> Option<usize> {
        let occupation = (0..self.n_sites())
            .filter(|&s| self.lattice.parity(s).is_odd())
            .fold(0u64, |acc, s| acc | 1 << s);
        let links = match self.link_kind {
            Some(kind) => {
                let level = kind.level_of(background.twice())?;
                self.encode_links(&vec![level; self.n_links()])
            }
            None => 0,
        };
        self.index_of(&BasisState { occupation, links })
    }

    /// Debug dump of the state list.
    pub fn to_json(&self) -> serde_json::Value {
        let states: Vec<_> = self
            .states
            .iter()
            .map(|s| {
                let occ: Vec<u8> = (0..self.n_sites()).map(|n| s.occupied(n) as u8).collect();
                let links: Vec<f64> = (0..self.n_links()).map(|l| self.link_value(s, l)).collect();
                json!({ "occupation": occ, "links": links })
            })
            .collect();
        let tag = match &self.tag {
            SectorTag::Unconstrained => json!({ "kind": "unconstrained" }),
            SectorTag::FermionNumber(n) => json!({ "kind": "fermion-number", "n": n }),
            SectorTag::Gauss {
                law,
                fermion_number,
            } => json!({
                "kind": "gauss",
                "background": law.background.value(),
                "static_charges": law.static_charges,
                "fermion_number": fermion_number,
            }),
        };
        json!({
            "extents": self.lattice.extents(),
            "boundary": self.lattice.boundary(),
            "matter": self.matter,
            "link_kind": self.link_kind.map(|k| k.describe()),
            "tag": tag,
            "dimension": self.len(),
            "states": states,
        })
    }
}

/// Enumerates the full tensor-product basis (optionally at fixed fermion
/// number) in lexicographic order.
pub fn enumerate_basis(
    lattice: Arc<Lattice>,
    matter: bool,
    link_kind: Option<LinkKind>,
    fermion_number: Option<usize>,
) -> Result<SectorBasis> {
    let n_sites = lattice.n_sites();
    if matter && n_sites > 63 {
        return Err(Error::Capacity {
            what: "fermion modes".into(),
            required: n_sites as u128,
            limit: 63,
        });
    }
    if !matter && fermion_number.is_some() {
        return Err(Error::InvalidParameter(
            "fermion number given for a pure-gauge basis".into(),
        ));
    }
    if let Some(k) = fermion_number {
        if k > n_sites {
            return Err(Error::InvalidParameter(format!(
                "{k} fermions on {n_sites} sites"
            )));
        }
    }
    let link_dim = link_kind.map(|k| k.local_dim() as u128).unwrap_or(1);
    let n_links = if link_kind.is_some() {
        lattice.n_links()
    } else {
        0
    };
    let mut link_configs: u128 = 1;
    for _ in 0..n_links {
        link_configs = link_configs.saturating_mul(link_dim);
    }
    let fermion_configs = match (matter, fermion_number) {
        (false, _) => 1,
        (true, None) => 1u128 << n_sites,
        (true, Some(k)) => binomial(n_sites as u32, k as u32),
    };
    let required = fermion_configs.saturating_mul(link_configs);
    if required > MAX_BASIS_STATES {
        return Err(Error::Capacity {
            what: "basis states".into(),
            required,
            limit: MAX_BASIS_STATES,
        });
    }

    let occupations: Vec<u64> = if matter {
        (0..1u64 << n_sites)
            .filter(|o| fermion_number.is_none_or(|k| o.count_ones() as usize == k))
            .collect()
    } else {
        vec![0]
    };
    let mut states = Vec::with_capacity(required as usize);
    for &occupation in &occupations {
        for links in 0..link_configs as u64 {
            states.push(BasisState { occupation, links });
        }
    }
    let tag = match fermion_number {
        Some(k) => SectorTag::FermionNumber(k),
        None => SectorTag::Unconstrained,
    };
    Ok(SectorBasis::from_parts(
        lattice, matter, link_kind, states, tag,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Boundary;

    fn chain(n: usize) -> Arc<Lattice> {
        Arc::new(Lattice::chain(n, Boundary::Open).unwrap())
    }

    #[test]
    fn dimension_counts() {
        let b = enumerate_basis(chain(2), true, Some(LinkKind::spin_half()), None).unwrap();
        assert_eq!(b.len(), 8);
        let b = enumerate_basis(
            chain(4),
            true,
            Some(LinkKind::TruncatedWilson { cutoff: 1 }),
            Some(2),
        )
        .unwrap();
        assert_eq!(b.len(), 162);
        let torus = Arc::new(Lattice::square(2, 2, Boundary::Periodic).unwrap());
        let b = enumerate_basis(torus, false, Some(LinkKind::spin_half()), None).unwrap();
        assert_eq!(b.len(), 256);
    }

    #[test]
    fn ordering_is_lexicographic_and_unique() {
        let b = enumerate_basis(
            chain(3),
            true,
            Some(LinkKind::TruncatedWilson { cutoff: 1 }),
            None,
        )
        .unwrap();
        let keys: Vec<(u64, Vec<i32>)> = b
            .states()
            .iter()
            .map(|s| {
                (
                    s.occupation,
                    (0..b.n_links()).map(|l| b.link_twice_l(s, l)).collect(),
                )
            })
            .collect();
        for w in keys.windows(2) {
            assert!(w[0] < w[1]);
        }
        for (i, s) in b.states().iter().enumerate() {
            assert_eq!(b.index_of(s), Some(i));
        }
    }

    #[test]
    fn capacity_error_is_explicit() {
        let lat = Arc::new(Lattice::chain(20, Boundary::Open).unwrap());
        let err = enumerate_basis(
            lat,
            true,
            Some(LinkKind::TruncatedWilson { cutoff: 2 }),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn link_level_updates() {
        let b = enumerate_basis(
            chain(4),
            false,
            Some(LinkKind::TruncatedWilson { cutoff: 2 }),
            None,
        )
        .unwrap();
        let s = b.state(17);
        for l in 0..b.n_links() {
            for level in 0..5 {
                let t = b.with_link_level(&s, l, level);
                assert_eq!(b.link_level(&t, l), level);
                for other in (0..b.n_links()).filter(|&o| o != l) {
                    assert_eq!(b.link_level(&t, other), b.link_level(&s, other));
                }
            }
        }
    }

    #[test]
    fn hop_sign_counts_modes_between() {
        assert_eq!(hop_sign(0b0000, 0, 3), 1.0);
        assert_eq!(hop_sign(0b0010, 0, 3), -1.0);
        assert_eq!(hop_sign(0b0110, 3, 0), 1.0);
        assert_eq!(hop_sign(0b1111, 1, 2), 1.0);
    }

    #[test]
    fn json_dump_lists_states() {
        let b = enumerate_basis(chain(2), true, Some(LinkKind::spin_half()), None).unwrap();
        let v = b.to_json();
        assert_eq!(v["dimension"], 8);
        assert_eq!(v["states"].as_array().unwrap().len(), 8);
        assert_eq!(v["states"][0]["links"][0], -0.5);
    }
}
