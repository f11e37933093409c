//! Model Hamiltonians assembled as sparse operators over a [`SectorBasis`].
//!
//! Every builder applies its terms to each basis state and looks the image
//! up in the basis, so the same builder works on the full product space,
//! on a fixed-number subspace and on a Gauss sector. An image outside the
//! basis is reported as a basis mismatch.

mod effective;
mod encoded;
mod penalty;
mod schwinger;
mod two_d;

pub use effective::{effective_second_order, EffectiveHamiltonian};
pub use encoded::{spin_encoded_hamiltonian, EncodedCouplings, SpinModelParams};
pub use penalty::{penalty_hamiltonian, penalty_parts, PenaltyParams};
pub use schwinger::{schwinger_hamiltonian, HoppingConvention, SchwingerParams};
pub use two_d::{pure_gauge_2d_hamiltonian, staggered_hamiltonian_2d, Staggered2dParams};

use crate::hilbert::{BasisState, SectorBasis};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use rayon::prelude::*;

/// Builds `sum_j sum_i a_ij |i><j|` where `term(|j>)` emits `(i, a_ij)`.
pub(crate) fn assemble<F>(basis: &SectorBasis, term: F) -> Result<SparseOperator>
where
    F: Fn(&BasisState, &mut Vec<(BasisState, C64)>) + Sync,
{
    let columns: Vec<Result<Vec<(usize, usize, C64)>>> = basis
        .states()
        .par_iter()
        .enumerate()
        .map(|(j, s)| {
            let mut out = Vec::new();
            term(s, &mut out);
            out.into_iter()
                .map(|(target, amp)| {
                    basis.index_of(&target).map(|i| (i, j, amp)).ok_or_else(|| {
                        Error::BasisMismatch(format!(
                            "operator maps basis state {j} outside the basis (occupation {:#b})",
                            target.occupation
                        ))
                    })
                })
                .collect()
        })
        .collect();
    let mut triplets = Vec::new();
    for c in columns {
        triplets.extend(c?);
    }
    Ok(SparseOperator::from_triplets(basis.len(), triplets))
}

pub(crate) fn require_matter_chain(basis: &SectorBasis, links: bool) -> Result<()> {
    let lat = basis.lattice();
    if lat.dim() != 1 {
        return Err(Error::Geometry(format!(
            "expected a 1D chain, got {}D",
            lat.dim()
        )));
    }
    if !basis.has_matter() {
        return Err(Error::BasisMismatch("basis has no fermion modes".into()));
    }
    if links != basis.link_kind().is_some() {
        return Err(Error::BasisMismatch(if links {
            "basis has no link variables".into()
        } else {
            "spin-encoded model expects a matter-only basis".into()
        }));
    }
    Ok(())
}

/// `sum_r G_r^2` for a list of diagonal or general generators.
pub fn sum_of_squares(generators: &[SparseOperator], dim: usize) -> SparseOperator {
    generators
        .iter()
        .fold(SparseOperator::zeros(dim), |acc, g| acc.add(&g.matmul(g)))
}

/// Splits a nearest-neighbour chain Hamiltonian into its diagonal, its
/// hops across even bonds `(2k, 2k+1)` and its hops across odd bonds.
/// The wrap bond of a periodic chain counts as bond `N - 1`.
pub fn bond_parity_split(h: &SparseOperator, basis: &SectorBasis) -> Result<[SparseOperator; 3]> {
    if h.dim() != basis.len() {
        return Err(Error::BasisMismatch(format!(
            "operator of dimension {} on {} states",
            h.dim(),
            basis.len()
        )));
    }
    if basis.lattice().dim() != 1 || !basis.has_matter() {
        return Err(Error::Geometry(
            "bond splitting needs fermions on a chain".into(),
        ));
    }
    let n = basis.n_sites();
    let mut parts: [Vec<(usize, usize, C64)>; 3] = Default::default();
    for (r, c, v) in h.triplets() {
        if r == c {
            parts[0].push((r, c, v));
            continue;
        }
        let moved = basis.state(r).occupation ^ basis.state(c).occupation;
        let (lo, hi) = (
            moved.trailing_zeros() as usize,
            63 - moved.leading_zeros() as usize,
        );
        let bond = match (moved.count_ones(), hi - lo) {
            (2, 1) => lo,
            (2, d) if d + 1 == n && n > 2 => hi,
            _ => {
                return Err(Error::Precondition(format!(
                    "entry ({r}, {c}) is not a nearest-neighbour fermion hop"
                )))
            }
        };
        parts[1 + bond % 2].push((r, c, v));
    }
    Ok(parts.map(|t| SparseOperator::from_triplets(h.dim(), t)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::HalfInt;
    use crate::lattice::{Boundary, Lattice};
    use std::sync::Arc;

    #[test]
    fn bond_split_sums_back_and_separates_bonds() {
        let lat = Arc::new(Lattice::chain(5, Boundary::Open).unwrap());
        let basis = SectorBasis::matter_only(lat, None).unwrap();
        let params = SpinModelParams {
            t: 0.8,
            m: 0.4,
            g2: 1.2,
            n_sites: 5,
            background: HalfInt::ZERO,
        };
        let h = spin_encoded_hamiltonian(&params, &basis).unwrap();
        let [d, even, odd] = bond_parity_split(&h, &basis).unwrap();
        assert!(d.add(&even).add(&odd).sub(&h).max_abs() < 1e-15);
        assert!(d.is_diagonal());
        for (part, parity) in [(&even, 0), (&odd, 1)] {
            for (r, c, _) in part.triplets() {
                let moved = basis.state(r).occupation ^ basis.state(c).occupation;
                assert_eq!(moved.trailing_zeros() % 2, parity);
            }
        }
        assert!(even.commutator(&odd).max_abs() > 0.1);
        assert_eq!(even.nnz() + odd.nnz() + d.nnz(), h.nnz());
    }
}
