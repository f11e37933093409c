use super::{assemble, require_matter_chain};
use crate::hilbert::{BasisState, HalfInt, SectorBasis};
use crate::lattice::Boundary;
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// Open-chain Schwinger couplings for the link-free spin formulation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinModelParams {
    pub t: f64,
    pub m: f64,
    pub g2: f64,
    pub n_sites: usize,
    pub background: HalfInt,
}

/// `H = t sum (s+_n s-_{n+1} + h.c.) + sum_n h_n Z_n + sum_{l<k} J_lk Z_l Z_k + c`
/// with `Z = 2 n - 1`. Indices are zero-based.
#[derive(Clone, Debug, PartialEq)]
pub struct EncodedCouplings {
    pub zz: DMatrix<f64>,
    pub field: Vec<f64>,
    pub constant: f64,
}

impl SpinModelParams {
    pub fn validate(&self) -> Result<()> {
        if ![self.t, self.m, self.g2].iter().all(|v| v.is_finite()) {
            return Err(Error::InvalidParameter(
                "non-finite spin-model coupling".into(),
            ));
        }
        if self.t < 0.0 || self.g2 < 0.0 {
            return Err(Error::InvalidParameter(
                "t and g^2 must be non-negative".into(),
            ));
        }
        if self.n_sites < 2 {
            return Err(Error::InvalidParameter(format!(
                "need N >= 2 sites, got {}",
                self.n_sites
            )));
        }
        Ok(())
    }

    /// Expands `m sum (-1)^n n_n + (g^2/2) sum_{n<N} L_n^2` with
    /// `L_n = L_0 + (1/2) sum_{l<=n} (Z_l + (-1)^l)` into fields, couplings
    /// and a constant.
    pub fn couplings(&self) -> EncodedCouplings {
        let n = self.n_sites;
        let stagger = |site: usize| if (site + 1) % 2 == 0 { 1.0 } else { -1.0 };
        // offset[k] = L_0 + (1/2) sum_{l<=k} (-1)^l, for link k (zero-based)
        let mut offset = vec![0.0; n - 1];
        let mut acc = self.background.value();
        for (k, o) in offset.iter_mut().enumerate() {
            acc += 0.5 * stagger(k);
            *o = acc;
        }
        let half_g2 = 0.5 * self.g2;
        let mut field: Vec<f64> = (0..n).map(|s| 0.5 * self.m * stagger(s)).collect();
        let mut constant: f64 = (0..n).map(|s| 0.5 * self.m * stagger(s)).sum();
        let mut zz = DMatrix::zeros(n, n);
        for (k, &c) in offset.iter().enumerate() {
            // L_k^2 = c^2 + c sum Z + (1/4) sum_{l,l'} Z_l Z_l'
            constant += half_g2 * (c * c + 0.25 * (k + 1) as f64);
            for f in field.iter_mut().take(k + 1) {
                *f += half_g2 * c;
            }
            for a in 0..=k {
                for b in (a + 1)..=k {
                    zz[(a, b)] += half_g2 * 0.5;
                    zz[(b, a)] += half_g2 * 0.5;
                }
            }
        }
        EncodedCouplings {
            zz,
            field,
            constant,
        }
    }
}

/// Gauss-law-eliminated Schwinger model on a matter-only open chain. The
/// spectrum coincides with the link model restricted to the Gauss sector
/// with background `L_0` whenever the link space is large enough to hold
/// every induced field.
pub fn spin_encoded_hamiltonian(
    params: &SpinModelParams,
    basis: &SectorBasis,
) -> Result<SparseOperator> {
    params.validate()?;
    require_matter_chain(basis, false)?;
    let lat = basis.lattice();
    if lat.boundary()[0] != Boundary::Open {
        return Err(Error::Geometry(
            "the spin encoding is built for open chains".into(),
        ));
    }
    if lat.n_sites() != params.n_sites {
        return Err(Error::BasisMismatch(format!(
            "basis has {} sites, parameters {}",
            lat.n_sites(),
            params.n_sites
        )));
    }
    let c = params.couplings();
    let n = params.n_sites;
    let op = assemble(basis, |s, out| {
        let z = |k: usize| if s.occupied(k) { 1.0 } else { -1.0 };
        let mut diag = c.constant;
        for a in 0..n {
            diag += c.field[a] * z(a);
            for b in (a + 1)..n {
                diag += c.zz[(a, b)] * z(a) * z(b);
            }
        }
        out.push((*s, C64::new(diag, 0.0)));
        if params.t != 0.0 {
            for a in 0..n - 1 {
                if s.occupied(a) != s.occupied(a + 1) {
                    let flipped = BasisState {
                        occupation: s.occupation ^ (0b11 << a),
                        links: 0,
                    };
                    out.push((flipped, C64::new(params.t, 0.0)));
                }
            }
        }
    })?;
    op.require_hermitian("spin-encoded Hamiltonian")
}
