use crate::linalg::eigh;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Largest magnetic unit cell accepted.
const MAX_Q: u32 = 50;

/// Band pairs closer than this (in units of `|t|`) anywhere on the grid
/// are treated as touching.
const TOUCHING_GAP: f64 = 1e-6;

/// Hofstadter bands at flux `alpha = p/q` on a uniform grid over the
/// magnetic Brillouin zone.
///
/// The cell holds `q` sites along x. Grid coordinates are
/// `kappa = k_x q` and `k_y`, both in `[0, 2 pi)`.
#[derive(Clone, Debug)]
pub struct HofstadterBands {
    pub p: u32,
    pub q: u32,
    pub t: f64,
    pub nk: [usize; 2],
    /// Ascending band energies per k-point, k-point index `i + nk[0] * j`.
    pub energies: Vec<Vec<f64>>,
    vectors: Vec<DMatrix<C64>>,
}

impl HofstadterBands {
    pub fn n_bands(&self) -> usize {
        self.q as usize
    }

    pub fn k_point(&self, i: usize, j: usize) -> (f64, f64) {
        (
            2.0 * PI * i as f64 / self.nk[0] as f64,
            2.0 * PI * j as f64 / self.nk[1] as f64,
        )
    }

    pub fn energy(&self, band: usize, i: usize, j: usize) -> f64 {
        self.energies[i + self.nk[0] * j][band]
    }

    fn vector(&self, band: usize, i: usize, j: usize) -> nalgebra::DVectorView<'_, C64> {
        self.vectors[(i % self.nk[0]) + self.nk[0] * (j % self.nk[1])].column(band)
    }

    /// Smallest direct gap between `band` and `band + 1` over the grid.
    pub fn min_gap_above(&self, band: usize) -> f64 {
        self.energies
            .iter()
            .map(|e| e[band + 1] - e[band])
            .fold(f64::INFINITY, f64::min)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn bloch_matrix(p: u32, q: u32, t: f64, kappa: f64, ky: f64) -> DMatrix<C64> {
    let q = q as usize;
    let alpha = p as f64 / q as f64;
    let mut h = DMatrix::zeros(q, q);
    for m in 0..q {
        h[(m, m)] = C64::new(-2.0 * t * (ky + 2.0 * PI * alpha * m as f64).cos(), 0.0);
    }
    for m in 0..q - 1 {
        h[(m + 1, m)] += C64::new(-t, 0.0);
        h[(m, m + 1)] += C64::new(-t, 0.0);
    }
    let wrap = C64::from_polar(-t, kappa);
    h[(0, q - 1)] += wrap;
    h[(q - 1, 0)] += wrap.conj();
    h
}

/// Diagonalizes the `q x q` magnetic Bloch Hamiltonian on an
/// `nkx x nky` grid.
pub fn hofstadter_spectrum(p: u32, q: u32, nk: [usize; 2], t: f64) -> Result<HofstadterBands> {
    if q == 0 || q > MAX_Q {
        return Err(Error::InvalidParameter(format!(
            "q must lie in 1..={MAX_Q}, got {q}"
        )));
    }
    if gcd(p, q) != 1 {
        return Err(Error::InvalidParameter(format!(
            "p = {p} and q = {q} are not coprime"
        )));
    }
    if nk[0] == 0 || nk[1] == 0 || !t.is_finite() {
        return Err(Error::InvalidParameter(
            "empty k-grid or non-finite hopping".into(),
        ));
    }
    let results: Vec<(Vec<f64>, DMatrix<C64>)> = (0..nk[0] * nk[1])
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx % nk[0], idx / nk[0]);
            let kappa = 2.0 * PI * i as f64 / nk[0] as f64;
            let ky = 2.0 * PI * j as f64 / nk[1] as f64;
            let e = eigh(&bloch_matrix(p, q, t, kappa, ky));
            (e.values, e.vectors)
        })
        .collect();
    let (energies, vectors) = results.into_iter().unzip();
    Ok(HofstadterBands {
        p,
        q,
        t,
        nk,
        energies,
        vectors,
    })
}

/// Chern number of every band from plaquette products of overlaps,
/// `None` for bands touching a neighbour somewhere on the grid.
pub fn chern_numbers(bands: &HofstadterBands) -> Result<Vec<Option<i32>>> {
    let [nx, ny] = bands.nk;
    if nx < 20 || ny < 20 {
        return Err(Error::Precondition(format!(
            "Chern numbers need at least a 20x20 grid, got {nx}x{ny}"
        )));
    }
    let n = bands.n_bands();
    let tol = TOUCHING_GAP * bands.t.abs().max(f64::MIN_POSITIVE);
    let gapped_above: Vec<bool> = (0..n.saturating_sub(1))
        .map(|b| bands.min_gap_above(b) > tol)
        .collect();
    Ok((0..n)
        .map(|b| {
            let below = b == 0 || gapped_above[b - 1];
            let above = b + 1 == n || gapped_above[b];
            if !(below && above) {
                return None;
            }
            let link = |i0: usize, j0: usize, i1: usize, j1: usize| {
                let z = bands.vector(b, i0, j0).dotc(&bands.vector(b, i1, j1));
                z / z.norm()
            };
            let total: f64 = (0..nx * ny)
                .map(|idx| {
                    let (i, j) = (idx % nx, idx / nx);
                    let w = link(i, j, i + 1, j)
                        * link(i + 1, j, i + 1, j + 1)
                        * link(i + 1, j + 1, i, j + 1)
                        * link(i, j + 1, i, j);
                    w.arg()
                })
                .sum();
            Some((total / (2.0 * PI)).round() as i32)
        })
        .collect())
}
