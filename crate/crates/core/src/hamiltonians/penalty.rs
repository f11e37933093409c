use super::{assemble, require_matter_chain, sum_of_squares};
use crate::hilbert::{
    gauss_generators, hop_sign, BasisState, GaussLaw, HalfInt, LinkKind, SectorBasis,
};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use serde::{Deserialize, Serialize};

/// Schwinger-boson chain with an energy penalty on the Gauss law.
///
/// Each link carries two boson species with `2S` bosons in total; the
/// basis uses the quantum-link levels of spin `S`, where level `k` holds
/// `n2 = k` right-end bosons and `n1 = 2S - k` left-end bosons, so that
/// `L = (n2 - n1) / 2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PenaltyParams {
    pub t_f: f64,
    pub t_b: f64,
    /// On-site fermion potentials; empty means zero.
    #[serde(default)]
    pub v_f: Vec<f64>,
    /// Per-link boson potentials `[v1, v2]`; empty means zero.
    #[serde(default)]
    pub v_b: Vec<[f64; 2]>,
    #[serde(default)]
    pub u: f64,
    pub gamma: f64,
    pub two_s: u32,
    #[serde(default)]
    pub background: HalfInt,
}

impl PenaltyParams {
    pub fn validate(&self) -> Result<()> {
        let scalars = [self.t_f, self.t_b, self.u, self.gamma];
        let finite = scalars
            .iter()
            .chain(&self.v_f)
            .chain(self.v_b.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidParameter(
                "non-finite penalty-model parameter".into(),
            ));
        }
        if self.gamma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "penalty scale must be non-negative, got {}",
                self.gamma
            )));
        }
        if self.two_s == 0 {
            return Err(Error::InvalidParameter(
                "need at least one boson per link".into(),
            ));
        }
        Ok(())
    }

    pub fn link_kind(&self) -> LinkKind {
        LinkKind::QuantumLinkSpin { two_s: self.two_s }
    }

    pub fn law(&self) -> GaussLaw {
        GaussLaw::with_background(self.background)
    }

    fn check_lengths(&self, basis: &SectorBasis) -> Result<()> {
        if !self.v_f.is_empty() && self.v_f.len() != basis.n_sites() {
            return Err(Error::InvalidParameter(format!(
                "{} fermion potentials for {} sites",
                self.v_f.len(),
                basis.n_sites()
            )));
        }
        if !self.v_b.is_empty() && self.v_b.len() != basis.n_links() {
            return Err(Error::InvalidParameter(format!(
                "{} boson potentials for {} links",
                self.v_b.len(),
                basis.n_links()
            )));
        }
        Ok(())
    }
}

/// The unpenalized Hamiltonian `H0` and the Gauss generators whose squares
/// are penalized.
pub fn penalty_parts(
    params: &PenaltyParams,
    basis: &SectorBasis,
) -> Result<(SparseOperator, Vec<SparseOperator>)> {
    params.validate()?;
    require_matter_chain(basis, true)?;
    if basis.link_kind() != Some(params.link_kind()) {
        return Err(Error::BasisMismatch(format!(
            "penalty model with 2S = {} needs {} links",
            params.two_s,
            params.link_kind().describe()
        )));
    }
    params.check_lengths(basis)?;
    let lat = basis.lattice();
    let two_s = params.two_s as usize;
    let h0 = assemble(basis, |s, out| {
        let mut diag = 0.0;
        for (n, v) in params.v_f.iter().enumerate() {
            if s.occupied(n) {
                diag += v;
            }
        }
        for link in 0..basis.n_links() {
            let n2 = basis.link_level(s, link);
            let n1 = two_s - n2;
            if let Some([v1, v2]) = params.v_b.get(link) {
                diag += v1 * n1 as f64 + v2 * n2 as f64;
            }
            diag += params.u * (n2 as f64 - n1 as f64).powi(2);
            if params.t_b != 0.0 {
                if n1 > 0 {
                    let amp = ((n2 + 1) as f64 * n1 as f64).sqrt();
                    out.push((
                        basis.with_link_level(s, link, n2 + 1),
                        C64::new(params.t_b * amp, 0.0),
                    ));
                }
                if n2 > 0 {
                    let amp = (n2 as f64 * (n1 + 1) as f64).sqrt();
                    out.push((
                        basis.with_link_level(s, link, n2 - 1),
                        C64::new(params.t_b * amp, 0.0),
                    ));
                }
            }
            if params.t_f != 0.0 {
                let l = lat.link(link);
                let (a, b) = (l.origin, l.target);
                if s.occupied(a) != s.occupied(b) {
                    let flipped = BasisState {
                        occupation: s.occupation ^ (1 << a | 1 << b),
                        links: s.links,
                    };
                    out.push((
                        flipped,
                        C64::new(-params.t_f * hop_sign(s.occupation, a, b), 0.0),
                    ));
                }
            }
        }
        out.push((*s, C64::new(diag, 0.0)));
    })?;
    let generators = gauss_generators(basis, &params.law())?;
    Ok((h0.require_hermitian("penalty-model H0")?, generators))
}

/// `H0 + Gamma sum_r G_r^2`.
pub fn penalty_hamiltonian(params: &PenaltyParams, basis: &SectorBasis) -> Result<SparseOperator> {
    let (h0, generators) = penalty_parts(params, basis)?;
    let penalty = sum_of_squares(&generators, basis.len()).scale(C64::new(params.gamma, 0.0));
    h0.add(&penalty).require_hermitian("penalty Hamiltonian")
}
