use super::{EvolutionResult, MethodInfo};
use crate::linalg::{dense_checked, eigh};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use nalgebra::DVector;

/// `e^{-iHt} |psi0>` at each requested time from one full diagonalization.
/// At `t = 0` the initial state is recorded unchanged.
pub fn evolve_exact(
    h: &SparseOperator,
    psi0: &DVector<C64>,
    times: &[f64],
) -> Result<EvolutionResult> {
    if psi0.len() != h.dim() {
        return Err(Error::BasisMismatch(format!(
            "state of length {} for operator of dimension {}",
            psi0.len(),
            h.dim()
        )));
    }
    if !h.is_hermitian() {
        return Err(Error::Precondition(
            "exact evolution needs a Hermitian operator".into(),
        ));
    }
    let e = eigh(&dense_checked(h, "exact evolution")?);
    let coeffs = e.vectors.adjoint() * psi0;
    let mut result = EvolutionResult::new(MethodInfo::Exact);
    for &t in times {
        if t == 0.0 {
            result.record(t, psi0.clone());
            continue;
        }
        let phased = DVector::from_iterator(
            coeffs.len(),
            coeffs
                .iter()
                .zip(&e.values)
                .map(|(c, &v)| c * C64::from_polar(1.0, -v * t)),
        );
        result.record(t, &e.vectors * phased);
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::{schwinger_hamiltonian, SchwingerParams};
    use crate::hilbert::{gauss_sector_1d, GaussLaw, LinkKind};
    use crate::lattice::{Boundary, Lattice};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    use std::sync::Arc;

    #[test]
    fn zero_time_is_identity() {
        let h = SparseOperator::from_diagonal(&[1.0, 2.0, 3.0]);
        let psi = DVector::from_vec(vec![
            C64::new(0.6, 0.0),
            C64::new(0.0, 0.8),
            C64::new(0.0, 0.0),
        ]);
        let r = evolve_exact(&h, &psi, &[0.0]).unwrap();
        assert!((&r.states[0] - &psi).camax() < 1e-15);
    }

    #[test]
    fn pauli_z_rotation_matches_closed_form() {
        // e^{-i Z t} |+> = (e^{-it}, e^{it}) / sqrt(2)
        let h = SparseOperator::from_diagonal(&[1.0, -1.0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = DVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]);
        let times = [FRAC_PI_4, FRAC_PI_2, 1.3];
        let r = evolve_exact(&h, &plus, &times).unwrap();
        for (state, &t) in r.states.iter().zip(&times) {
            let expect = DVector::from_vec(vec![C64::from_polar(s, -t), C64::from_polar(s, t)]);
            assert!((state - expect).camax() < 1e-14);
        }
        // a quarter turn lands on |+i>, a half turn on |->
        let plus_i = DVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, s)]);
        let minus = DVector::from_vec(vec![C64::new(s, 0.0), C64::new(-s, 0.0)]);
        assert!(super::super::infidelity(&r.states[0], &plus_i) < 1e-14);
        assert!(super::super::infidelity(&r.states[1], &minus) < 1e-14);
    }

    #[test]
    fn energy_is_conserved_for_schwinger_chain() {
        let lat = Arc::new(Lattice::chain(4, Boundary::Open).unwrap());
        let basis = gauss_sector_1d(
            lat,
            LinkKind::TruncatedWilson { cutoff: 2 },
            &GaussLaw::default(),
            None,
        )
        .unwrap();
        let h = schwinger_hamiltonian(&SchwingerParams::new(1.0, 0.5, 1.0), &basis).unwrap();
        let v = basis.bare_vacuum(crate::hilbert::HalfInt::ZERO).unwrap();
        let mut psi = DVector::zeros(basis.len());
        psi[v] = C64::new(1.0, 0.0);
        let times: Vec<f64> = (0..=50).map(|k| k as f64).collect();
        let r = evolve_exact(&h, &psi, &times).unwrap();
        let e0 = h.expectation(&psi).re;
        for s in &r.states {
            assert!((h.expectation(s).re - e0).abs() < 1e-10);
        }
        assert!(r.max_norm_drift() < 1e-12);
    }

    #[test]
    fn oversized_operator_is_refused() {
        let h = SparseOperator::identity(crate::linalg::DENSE_LIMIT + 1);
        let psi = DVector::from_element(h.dim(), C64::new(0.0, 0.0));
        assert!(matches!(
            evolve_exact(&h, &psi, &[1.0]),
            Err(Error::Capacity { .. })
        ));
    }
}
