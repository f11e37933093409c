//! Measurements on states and trajectories.
//!
//! Entanglement quantities use the Jordan-Wigner qubit representation in
//! the basis order; each link belongs to the block of its origin site.

use crate::dynamics::EvolutionResult;
use crate::hilbert::{HalfInt, SectorBasis};
use crate::lattice::Boundary;
use crate::linalg::{eigh, DENSE_LIMIT};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use std::collections::BTreeMap;

/// Reduced-density eigenvalues below this are dropped from entropies.
const EIGEN_FLOOR: f64 = 1e-14;

fn check_len(basis: &SectorBasis, psi: &DVector<C64>) -> Result<()> {
    if psi.len() != basis.len() {
        return Err(Error::BasisMismatch(format!(
            "state of length {} on a basis of {} states",
            psi.len(),
            basis.len()
        )));
    }
    Ok(())
}

/// Excitation count `nu_n` per site: holes on odd sites, particles on
/// even ones (one-based parity).
pub fn site_densities(basis: &SectorBasis, psi: &DVector<C64>) -> Result<Vec<f64>> {
    check_len(basis, psi)?;
    if !basis.has_matter() {
        return Err(Error::BasisMismatch(
            "particle density needs matter fields".into(),
        ));
    }
    let lattice = basis.lattice();
    let mut nu = vec![0.0; basis.n_sites()];
    for (state, amp) in basis.states().iter().zip(psi.iter()) {
        let w = amp.norm_sqr();
        if w == 0.0 {
            continue;
        }
        for (s, v) in nu.iter_mut().enumerate() {
            if state.occupied(s) != lattice.parity(s).is_odd() {
                *v += w;
            }
        }
    }
    Ok(nu)
}

/// Mean of [`site_densities`].
pub fn particle_density(basis: &SectorBasis, psi: &DVector<C64>) -> Result<f64> {
    let nu = site_densities(basis, psi)?;
    Ok(nu.iter().sum::<f64>() / nu.len() as f64)
}

/// `<psi0 | psi(t)>` at every recorded time.
pub fn vacuum_persistence(trajectory: &EvolutionResult, psi0: &DVector<C64>) -> Result<Vec<C64>> {
    trajectory
        .states
        .iter()
        .map(|s| {
            if s.len() != psi0.len() {
                return Err(Error::BasisMismatch(
                    "initial state does not match the trajectory".into(),
                ));
            }
            Ok(psi0.dotc(s))
        })
        .collect()
}

/// `<L>` on every link, measured directly on the link register.
pub fn electric_field_profile(basis: &SectorBasis, psi: &DVector<C64>) -> Result<Vec<f64>> {
    check_len(basis, psi)?;
    if basis.link_kind().is_none() {
        return Err(Error::BasisMismatch(
            "basis carries no link variables".into(),
        ));
    }
    let mut field = vec![0.0; basis.n_links()];
    for (state, amp) in basis.states().iter().zip(psi.iter()) {
        let w = amp.norm_sqr();
        for (l, f) in field.iter_mut().enumerate() {
            *f += w * basis.link_value(state, l);
        }
    }
    Ok(field)
}

/// `<L_n>` on the links of an open chain reconstructed from the matter
/// configuration through `L_n = L_{n-1} + n_n - [n odd]`, starting from the
/// background field.
pub fn reconstructed_electric_field(
    basis: &SectorBasis,
    psi: &DVector<C64>,
    background: HalfInt,
) -> Result<Vec<f64>> {
    check_len(basis, psi)?;
    let lattice = basis.lattice();
    if lattice.dim() != 1 || lattice.boundary()[0] != Boundary::Open || !basis.has_matter() {
        return Err(Error::BasisMismatch(
            "field reconstruction needs matter on an open chain".into(),
        ));
    }
    let n_links = lattice.n_links();
    let mut field = vec![0.0; n_links];
    for (state, amp) in basis.states().iter().zip(psi.iter()) {
        let w = amp.norm_sqr();
        let mut l = background.value();
        for (s, f) in field.iter_mut().enumerate() {
            l += state.occupied(s) as i32 as f64 - lattice.parity(s).is_odd() as i32 as f64;
            *f += w * l;
        }
    }
    Ok(field)
}

/// `sum_r <psi| G_r^2 |psi>`.
pub fn gauss_violation(psi: &DVector<C64>, generators: &[SparseOperator]) -> Result<f64> {
    generators
        .iter()
        .map(|g| {
            if g.dim() != psi.len() {
                return Err(Error::BasisMismatch(
                    "generator does not match the state".into(),
                ));
            }
            Ok(g.apply(psi).norm_squared())
        })
        .sum()
}

/// Configuration of the degrees of freedom owned by `sites` as a sortable key.
fn block_key(
    basis: &SectorBasis,
    state: &crate::hilbert::BasisState,
    sites: &[usize],
) -> (u64, Vec<u8>) {
    let lattice = basis.lattice();
    let mask = sites.iter().fold(0u64, |m, &s| m | 1 << s);
    let mut levels = Vec::new();
    if basis.link_kind().is_some() {
        for &s in sites {
            for d in 0..lattice.dim() {
                if let Some(l) = lattice.link_from(s, d) {
                    levels.push(basis.link_level(state, l) as u8);
                }
            }
        }
    }
    (state.occupation & mask, levels)
}

fn validate_blocks(basis: &SectorBasis, blocks: &[&[usize]]) -> Result<()> {
    let n = basis.n_sites();
    let mut seen = vec![false; n];
    for block in blocks {
        if block.is_empty() {
            return Err(Error::InvalidParameter("empty block".into()));
        }
        for &s in *block {
            if s >= n {
                return Err(Error::OutOfRange { index: s, len: n });
            }
            if std::mem::replace(&mut seen[s], true) {
                return Err(Error::InvalidParameter(format!(
                    "site {s} appears in two blocks"
                )));
            }
        }
    }
    Ok(())
}

fn indexer<K: Ord + Clone>(keys: &[K]) -> (Vec<usize>, usize) {
    let mut map: BTreeMap<K, usize> = BTreeMap::new();
    for k in keys {
        let next = map.len();
        map.entry(k.clone()).or_insert(next);
    }
    // renumber in key order so results do not depend on basis order
    let order: BTreeMap<K, usize> = map
        .keys()
        .cloned()
        .enumerate()
        .map(|(i, k)| (k, i))
        .collect();
    (keys.iter().map(|k| order[k]).collect(), order.len())
}

/// Reduced density matrix of the degrees of freedom on `block`.
pub fn reduced_density_matrix(
    basis: &SectorBasis,
    psi: &DVector<C64>,
    block: &[usize],
) -> Result<DMatrix<C64>> {
    check_len(basis, psi)?;
    validate_blocks(basis, &[block])?;
    let rest: Vec<usize> = (0..basis.n_sites())
        .filter(|s| !block.contains(s))
        .collect();
    let a_keys: Vec<_> = basis
        .states()
        .iter()
        .map(|s| block_key(basis, s, block))
        .collect();
    let b_keys: Vec<_> = basis
        .states()
        .iter()
        .map(|s| block_key(basis, s, &rest))
        .collect();
    let (a_idx, da) = indexer(&a_keys);
    let (b_idx, _) = indexer(&b_keys);
    if da > DENSE_LIMIT {
        return Err(Error::Capacity {
            what: "reduced density matrix".into(),
            required: da as u128,
            limit: DENSE_LIMIT as u128,
        });
    }
    let mut by_rest: BTreeMap<usize, Vec<(usize, C64)>> = BTreeMap::new();
    for (k, amp) in psi.iter().enumerate() {
        if amp.norm_sqr() > 0.0 {
            by_rest.entry(b_idx[k]).or_default().push((a_idx[k], *amp));
        }
    }
    let mut rho = DMatrix::zeros(da, da);
    for column in by_rest.values() {
        for &(i, x) in column {
            for &(j, y) in column {
                rho[(i, j)] += x * y.conj();
            }
        }
    }
    Ok(rho)
}

/// Von Neumann entropy (natural log) of sites `0..cut` against the rest.
pub fn entanglement_entropy(basis: &SectorBasis, psi: &DVector<C64>, cut: usize) -> Result<f64> {
    let n = basis.n_sites();
    if cut == 0 || cut >= n {
        return Err(Error::InvalidParameter(format!(
            "cut {cut} must lie in 1..{n}"
        )));
    }
    let left: Vec<usize> = (0..cut).collect();
    let right: Vec<usize> = (cut..n).collect();
    check_len(basis, psi)?;
    let dl = indexer(
        &basis
            .states()
            .iter()
            .map(|s| block_key(basis, s, &left))
            .collect::<Vec<_>>(),
    )
    .1;
    let dr = indexer(
        &basis
            .states()
            .iter()
            .map(|s| block_key(basis, s, &right))
            .collect::<Vec<_>>(),
    )
    .1;
    let block = if dl <= dr { &left } else { &right };
    let rho = reduced_density_matrix(basis, psi, block)?;
    Ok(von_neumann(&rho))
}

fn von_neumann(rho: &DMatrix<C64>) -> f64 {
    eigh(rho)
        .values
        .iter()
        .filter(|&&p| p > EIGEN_FLOOR)
        .map(|p| -p * p.ln())
        .sum()
}

/// `ln || rho_AB^{T_B} ||_1` of the two-block reduced state.
pub fn logarithmic_negativity(
    basis: &SectorBasis,
    psi: &DVector<C64>,
    a: &[usize],
    b: &[usize],
) -> Result<f64> {
    check_len(basis, psi)?;
    validate_blocks(basis, &[a, b])?;
    let rest: Vec<usize> = (0..basis.n_sites())
        .filter(|s| !a.contains(s) && !b.contains(s))
        .collect();
    let (a_idx, da) = indexer(
        &basis
            .states()
            .iter()
            .map(|s| block_key(basis, s, a))
            .collect::<Vec<_>>(),
    );
    let (b_idx, db) = indexer(
        &basis
            .states()
            .iter()
            .map(|s| block_key(basis, s, b))
            .collect::<Vec<_>>(),
    );
    let (c_idx, _) = indexer(
        &basis
            .states()
            .iter()
            .map(|s| block_key(basis, s, &rest))
            .collect::<Vec<_>>(),
    );
    let dim = da * db;
    if dim > DENSE_LIMIT {
        return Err(Error::Capacity {
            what: "two-block density matrix".into(),
            required: dim as u128,
            limit: DENSE_LIMIT as u128,
        });
    }
    let mut by_rest: BTreeMap<usize, Vec<(usize, usize, C64)>> = BTreeMap::new();
    for (k, amp) in psi.iter().enumerate() {
        if amp.norm_sqr() > 0.0 {
            by_rest
                .entry(c_idx[k])
                .or_default()
                .push((a_idx[k], b_idx[k], *amp));
        }
    }
    // partial transpose on B: (a b, a' b') -> (a b', a' b)
    let mut pt = DMatrix::zeros(dim, dim);
    for group in by_rest.values() {
        for &(ia, ib, x) in group {
            for &(ja, jb, y) in group {
                pt[(ia * db + jb, ja * db + ib)] += x * y.conj();
            }
        }
    }
    let trace_norm: f64 = eigh(&pt).values.iter().map(|v| v.abs()).sum();
    Ok(trace_norm.ln())
}

/// Per-time summary of a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRecord {
    pub time: f64,
    pub density: f64,
    pub persistence: C64,
    pub electric_field: Vec<f64>,
    pub gauss_violation: f64,
    pub entropy: f64,
    pub negativity: Option<f64>,
}

/// What [`trajectory_records`] measures beyond the defaults.
#[derive(Clone, Debug, Default)]
pub struct RecordOptions {
    /// Background field used when the basis has no link register.
    pub background: HalfInt,
    /// Generators whose violation is recorded; none records zero.
    pub generators: Vec<SparseOperator>,
    /// Entropy cut; defaults to half the chain.
    pub cut: Option<usize>,
    pub negativity_blocks: Option<(Vec<usize>, Vec<usize>)>,
}

pub fn trajectory_records(
    basis: &SectorBasis,
    trajectory: &EvolutionResult,
    psi0: &DVector<C64>,
    options: &RecordOptions,
) -> Result<Vec<TrajectoryRecord>> {
    let persistence = vacuum_persistence(trajectory, psi0)?;
    let cut = options.cut.unwrap_or(basis.n_sites() / 2);
    trajectory
        .times
        .iter()
        .zip(&trajectory.states)
        .zip(persistence)
        .map(|((&time, psi), g)| {
            let electric_field = if basis.link_kind().is_some() {
                electric_field_profile(basis, psi)?
            } else {
                reconstructed_electric_field(basis, psi, options.background)?
            };
            let negativity = match &options.negativity_blocks {
                Some((a, b)) => Some(logarithmic_negativity(basis, psi, a, b)?),
                None => None,
            };
            Ok(TrajectoryRecord {
                time,
                density: particle_density(basis, psi)?,
                persistence: g,
                electric_field,
                gauss_violation: gauss_violation(psi, &options.generators)?,
                entropy: entanglement_entropy(basis, psi, cut)?,
                negativity,
            })
        })
        .collect()
}
