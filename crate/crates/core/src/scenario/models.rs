use super::config::{LinkConfig, ModelConfig, PenaltySystem};
use crate::hamiltonians::{
    penalty_hamiltonian, penalty_parts, schwinger_hamiltonian, spin_encoded_hamiltonian,
    staggered_hamiltonian_2d, PenaltyParams, SchwingerParams, SpinModelParams, Staggered2dParams,
};
use crate::hilbert::{
    enumerate_basis, gauss_generators, gauss_sector_1d, project_gauss_sector, GaussLaw, HalfInt,
    LinkKind, SectorBasis,
};
use crate::lattice::{Boundary, Lattice};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use nalgebra::DVector;
use std::sync::Arc;

/// Tolerance on `max |[H, G_r]|` accepted before a run.
pub const GAUGE_TOL: f64 = 1e-10;

/// A model ready to run: its basis, Hamiltonian and Gauss generators.
#[derive(Clone, Debug)]
pub struct BuiltModel {
    pub basis: Arc<SectorBasis>,
    pub h: SparseOperator,
    /// Generators whose violation is recorded.
    pub generators: Vec<SparseOperator>,
    /// Whether `H` must commute with every generator.
    pub gauge_invariant: bool,
    pub background: HalfInt,
}

impl BuiltModel {
    /// Refuses non-Hermitian Hamiltonians and, for gauge models, any
    /// generator that fails to commute with `H`.
    pub fn validate(&self) -> Result<f64> {
        let defect = self.h.hermiticity_defect();
        if defect >= crate::operator::HERMITICITY_TOL {
            return Err(Error::Validation(format!(
                "Hamiltonian is not Hermitian (defect {defect:.3e})"
            )));
        }
        if !self.gauge_invariant {
            return Ok(0.0);
        }
        let worst = self
            .generators
            .iter()
            .map(|g| self.h.commutator(g).max_abs())
            .fold(0.0, f64::max);
        if worst >= GAUGE_TOL {
            return Err(Error::Validation(format!(
                "Hamiltonian breaks gauge invariance: max |[H, G]| = {worst:.3e}"
            )));
        }
        Ok(worst)
    }

    /// The bare staggered vacuum with every link at the background field.
    pub fn bare_vacuum(&self) -> Result<DVector<C64>> {
        let index = self.basis.bare_vacuum(self.background).ok_or_else(|| {
            Error::InvalidParameter(format!(
                "the bare vacuum with field {} is not in the basis",
                self.background
            ))
        })?;
        let mut psi = DVector::zeros(self.basis.len());
        psi[index] = C64::new(1.0, 0.0);
        Ok(psi)
    }
}

fn link_kind(link: &LinkConfig) -> Result<LinkKind> {
    match *link {
        LinkConfig::QuantumLink { spin } => LinkKind::quantum_link(spin),
        LinkConfig::TruncatedWilson { cutoff } => Ok(LinkKind::TruncatedWilson { cutoff }),
    }
}

fn chain(n_sites: usize, boundary: Boundary) -> Result<Arc<Lattice>> {
    Ok(Arc::new(Lattice::chain(n_sites, boundary)?))
}

fn nonempty(basis: SectorBasis) -> Result<Arc<SectorBasis>> {
    if basis.is_empty() {
        return Err(Error::InvalidParameter(
            "the requested sector is empty".into(),
        ));
    }
    Ok(Arc::new(basis))
}

pub(crate) fn penalty_params(system: &PenaltySystem, gamma: f64) -> Result<PenaltyParams> {
    let two_s = HalfInt::from_f64(system.spin)?.twice();
    if two_s <= 0 {
        return Err(Error::InvalidParameter(format!(
            "boson spin must be positive, got {}",
            system.spin
        )));
    }
    Ok(PenaltyParams {
        t_f: system.t_f,
        t_b: system.t_b,
        v_f: system.v_f.clone(),
        v_b: system.v_b.clone(),
        u: system.u,
        gamma,
        two_s: two_s as u32,
        background: HalfInt::from_f64(system.background)?,
    })
}

pub(crate) fn penalty_basis(
    system: &PenaltySystem,
    params: &PenaltyParams,
) -> Result<Arc<SectorBasis>> {
    nonempty(enumerate_basis(
        chain(system.n_sites, Boundary::Open)?,
        true,
        Some(params.link_kind()),
        system.fermion_number,
    )?)
}

pub fn build_model(config: &ModelConfig) -> Result<BuiltModel> {
    match config {
        ModelConfig::Schwinger {
            n_sites,
            boundary,
            t,
            m,
            g2,
            link,
            background,
            fermion_number,
            convention,
        } => {
            let params = SchwingerParams {
                t: *t,
                m: *m,
                g2: *g2,
                convention: *convention,
            };
            params.validate()?;
            let kind = link_kind(link)?;
            let background = HalfInt::from_f64(*background)?;
            let law = GaussLaw::with_background(background);
            let lattice = chain(*n_sites, *boundary)?;
            let basis = match boundary {
                Boundary::Open => gauss_sector_1d(lattice, kind, &law, *fermion_number)?,
                Boundary::Periodic => project_gauss_sector(
                    &enumerate_basis(lattice, true, Some(kind), *fermion_number)?,
                    &law,
                )?,
            };
            let basis = nonempty(basis)?;
            let h = schwinger_hamiltonian(&params, &basis)?;
            let generators = gauss_generators(&basis, &law)?;
            Ok(BuiltModel {
                basis,
                h,
                generators,
                gauge_invariant: true,
                background,
            })
        }
        ModelConfig::Encoded {
            n_sites,
            t,
            m,
            g2,
            background,
            fermion_number,
        } => {
            let background = HalfInt::from_f64(*background)?;
            let params = SpinModelParams {
                t: *t,
                m: *m,
                g2: *g2,
                n_sites: *n_sites,
                background,
            };
            params.validate()?;
            let basis = nonempty(SectorBasis::matter_only(
                chain(*n_sites, Boundary::Open)?,
                *fermion_number,
            )?)?;
            let h = spin_encoded_hamiltonian(&params, &basis)?;
            Ok(BuiltModel {
                basis,
                h,
                generators: Vec::new(),
                gauge_invariant: false,
                background,
            })
        }
        ModelConfig::Penalty {
            n_sites,
            t_f,
            t_b,
            spin,
            background,
            gamma,
            v_f,
            v_b,
            u,
            fermion_number,
        } => {
            let system = PenaltySystem {
                n_sites: *n_sites,
                t_f: *t_f,
                t_b: *t_b,
                spin: *spin,
                background: *background,
                v_f: v_f.clone(),
                v_b: v_b.clone(),
                u: *u,
                fermion_number: *fermion_number,
            };
            let params = penalty_params(&system, *gamma)?;
            params.validate()?;
            let basis = penalty_basis(&system, &params)?;
            let (_, generators) = penalty_parts(&params, &basis)?;
            let h = penalty_hamiltonian(&params, &basis)?;
            Ok(BuiltModel {
                basis,
                h,
                generators,
                gauge_invariant: false,
                background: params.background,
            })
        }
        ModelConfig::Staggered2d {
            lx,
            ly,
            boundary,
            t,
            m,
            g2,
            plaquette,
            link,
            fermion_number,
        } => {
            let mut params = Staggered2dParams::new(1.0, *m, *g2);
            params.t = *t;
            if let Some(k) = plaquette {
                params.plaquette = *k;
            }
            params.validate()?;
            let kind = link_kind(link)?;
            let lattice = Arc::new(Lattice::square(*lx, *ly, *boundary)?);
            let law = GaussLaw::default();
            let full = enumerate_basis(lattice, true, Some(kind), *fermion_number)?;
            let basis = nonempty(project_gauss_sector(&full, &law)?)?;
            let h = staggered_hamiltonian_2d(&params, &basis)?;
            let generators = gauss_generators(&basis, &law)?;
            Ok(BuiltModel {
                basis,
                h,
                generators,
                gauge_invariant: true,
                background: HalfInt::ZERO,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::HoppingConvention;

    #[test]
    fn built_models_pass_validation() {
        let configs = [
            ModelConfig::Schwinger {
                n_sites: 4,
                boundary: Boundary::Open,
                t: 1.0,
                m: 0.5,
                g2: 1.0,
                link: LinkConfig::QuantumLink { spin: 0.5 },
                background: 0.5,
                fermion_number: None,
                convention: HoppingConvention::Imaginary,
            },
            ModelConfig::Schwinger {
                n_sites: 4,
                boundary: Boundary::Periodic,
                t: 1.0,
                m: 0.5,
                g2: 1.0,
                link: LinkConfig::TruncatedWilson { cutoff: 1 },
                background: 0.0,
                fermion_number: Some(2),
                convention: HoppingConvention::Real,
            },
            ModelConfig::Encoded {
                n_sites: 4,
                t: 1.0,
                m: 0.5,
                g2: 1.0,
                background: 0.0,
                fermion_number: None,
            },
            ModelConfig::Staggered2d {
                lx: 2,
                ly: 2,
                boundary: Boundary::Open,
                t: [1.0, 1.0],
                m: 0.3,
                g2: 1.0,
                plaquette: None,
                link: LinkConfig::TruncatedWilson { cutoff: 1 },
                fermion_number: None,
            },
        ];
        for c in &configs {
            let model = build_model(c).unwrap();
            assert!(model.validate().unwrap() < GAUGE_TOL);
            assert_eq!(model.bare_vacuum().unwrap().norm(), 1.0);
        }
    }

    #[test]
    fn unrepresentable_vacuum_is_reported() {
        let c = ModelConfig::Schwinger {
            n_sites: 2,
            boundary: Boundary::Open,
            t: 1.0,
            m: 0.5,
            g2: 1.0,
            link: LinkConfig::QuantumLink { spin: 0.5 },
            background: 0.0,
            fermion_number: None,
            convention: HoppingConvention::Imaginary,
        };
        assert!(matches!(build_model(&c), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn penalty_model_is_not_checked_for_invariance() {
        let c = ModelConfig::Penalty {
            n_sites: 2,
            t_f: 1.0,
            t_b: 0.5,
            spin: 0.5,
            background: 0.5,
            gamma: 10.0,
            v_f: vec![],
            v_b: vec![],
            u: 0.0,
            fermion_number: None,
        };
        let model = build_model(&c).unwrap();
        assert_eq!(model.basis.len(), 8);
        assert_eq!(model.validate().unwrap(), 0.0);
    }
}
