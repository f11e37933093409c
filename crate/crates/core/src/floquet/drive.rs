use crate::dynamics::floquet_operator;
use crate::linalg::{dense_checked, eigh, operator_norm};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Harmonic `n` of the drive: `V_{n+} e^{i n w t} + V_{n-} e^{-i n w t}`.
#[derive(Clone, Debug)]
pub struct Harmonic {
    pub n: u32,
    pub v_plus: SparseOperator,
    pub v_minus: SparseOperator,
}

/// `H(t) = H0 + sum_n (V_{n+} e^{i n w t} + V_{n-} e^{-i n w t})`.
#[derive(Clone, Debug)]
pub struct DriveSpec {
    h0: SparseOperator,
    harmonics: Vec<Harmonic>,
    omega: f64,
}

impl DriveSpec {
    /// Builds the drive from the `V_{n+}`; each `V_{n-}` is its adjoint.
    pub fn new(
        h0: SparseOperator,
        harmonics: Vec<(u32, SparseOperator)>,
        omega: f64,
    ) -> Result<Self> {
        let pairs = harmonics
            .into_iter()
            .map(|(n, v)| {
                let minus = v.adjoint();
                (n, v, minus)
            })
            .collect();
        Self::with_pairs(h0, pairs, omega)
    }

    /// Builds the drive from explicit `(n, V_{n+}, V_{n-})` triples, which
    /// must be adjoint pairs.
    pub fn with_pairs(
        h0: SparseOperator,
        pairs: Vec<(u32, SparseOperator, SparseOperator)>,
        omega: f64,
    ) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "drive frequency must be positive, got {omega}"
            )));
        }
        if !h0.is_hermitian() {
            return Err(Error::InvalidParameter(
                "static part of the drive is not Hermitian".into(),
            ));
        }
        let mut seen = Vec::new();
        let mut harmonics = Vec::new();
        for (n, v_plus, v_minus) in pairs {
            if n == 0 || seen.contains(&n) {
                return Err(Error::InvalidParameter(format!(
                    "harmonic indices must be distinct and >= 1, got {n}"
                )));
            }
            seen.push(n);
            if v_plus.dim() != h0.dim() || v_minus.dim() != h0.dim() {
                return Err(Error::BasisMismatch(format!(
                    "harmonic {n} has the wrong dimension"
                )));
            }
            let defect = v_plus.adjoint().sub(&v_minus).max_abs();
            if defect > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "V_{n}- is not the adjoint of V_{n}+ (defect {defect:.3e})"
                )));
            }
            harmonics.push(Harmonic { n, v_plus, v_minus });
        }
        Ok(DriveSpec {
            h0,
            harmonics,
            omega,
        })
    }

    pub fn h0(&self) -> &SparseOperator {
        &self.h0
    }

    pub fn harmonics(&self) -> &[Harmonic] {
        &self.harmonics
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn period(&self) -> f64 {
        2.0 * PI / self.omega
    }

    pub fn dim(&self) -> usize {
        self.h0.dim()
    }

    /// Same drive at another frequency.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        let pairs = self
            .harmonics
            .iter()
            .map(|h| (h.n, h.v_plus.clone(), h.v_minus.clone()))
            .collect();
        Self::with_pairs(self.h0.clone(), pairs, omega)
    }

    pub fn hamiltonian_at(&self, t: f64) -> SparseOperator {
        self.harmonics.iter().fold(self.h0.clone(), |acc, h| {
            let phase = C64::from_polar(1.0, h.n as f64 * self.omega * t);
            acc.add(&h.v_plus.scale(phase))
                .add(&h.v_minus.scale(phase.conj()))
        })
    }

    fn dense_at(&self, t: f64) -> DMatrix<C64> {
        self.hamiltonian_at(t).to_dense()
    }
}

/// `H0 + (1/w) sum_n (1/n) [V_{n+}, V_{n-}]`.
pub fn effective_hamiltonian_first_order(drive: &DriveSpec) -> Result<SparseOperator> {
    let mut h = drive.h0.clone();
    for hm in &drive.harmonics {
        let c = hm.v_plus.commutator(&hm.v_minus);
        h = h.add(&c.scale(C64::new(1.0 / (hm.n as f64 * drive.omega), 0.0)));
    }
    h.require_hermitian("first-order effective Hamiltonian")
}

/// Principal Floquet Hamiltonian `(i/T) log U` of a one-period propagator.
///
/// Computed as `arcsin(B) / T` with `B = (U^dag - U) / 2i`, which is exact
/// when every quasienergy satisfies `|e T| < pi/2`; that condition is
/// checked through the positivity of `(U + U^dag) / 2`.
pub fn floquet_hamiltonian(u: &DMatrix<C64>, period: f64) -> Result<DMatrix<C64>> {
    let cos_part = (u + u.adjoint()).scale(0.5);
    let lowest = eigh(&cos_part).values.first().copied().unwrap_or(1.0);
    if lowest <= 1e-8 {
        return Err(Error::Precondition(format!(
            "quasienergies leave the principal branch (min cos(eT) = {lowest:.3e}); shorten the period"
        )));
    }
    let sin_part = (u.adjoint() - u) * C64::new(0.0, -0.5);
    let e = eigh(&sin_part);
    let mut left = e.vectors.clone();
    for (j, &s) in e.values.iter().enumerate() {
        let value = s.clamp(-1.0, 1.0).asin() / period;
        left.column_mut(j).iter_mut().for_each(|z| *z *= value);
    }
    Ok(left * e.vectors.adjoint())
}

/// Operator-norm distance between the first-order effective Hamiltonian
/// and the exact stroboscopic Floquet Hamiltonian over one period.
pub fn stroboscopic_error(drive: &DriveSpec, n_substeps: usize) -> Result<f64> {
    let h_eff = dense_checked(
        &effective_hamiltonian_first_order(drive)?,
        "effective Hamiltonian",
    )?;
    let u = floquet_operator(|t| drive.dense_at(t), drive.period(), n_substeps)?;
    let h_f = floquet_hamiltonian(&u, drive.period())?;
    Ok(operator_norm(&(h_eff - h_f)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_hermitian, loglog_slope};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_plus() -> SparseOperator {
        SparseOperator::from_triplets(2, vec![(0, 1, c(1.0, 0.0))])
    }

    fn sigma_y() -> SparseOperator {
        SparseOperator::from_triplets(2, vec![(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))])
    }

    fn sigma_z() -> SparseOperator {
        SparseOperator::from_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn no_harmonics_returns_static_part() {
        let drive = DriveSpec::new(sigma_y(), vec![], 3.0).unwrap();
        assert_eq!(
            effective_hamiltonian_first_order(&drive).unwrap(),
            sigma_y()
        );
    }

    #[test]
    fn single_harmonic_adds_sigma_z() {
        let (omega, big_omega) = (7.0, 1.3);
        let drive = DriveSpec::new(
            SparseOperator::zeros(2),
            vec![(1, sigma_plus().scale(c(big_omega, 0.0)))],
            omega,
        )
        .unwrap();
        let h = effective_hamiltonian_first_order(&drive).unwrap();
        let expect = sigma_z().scale(c(big_omega * big_omega / omega, 0.0));
        assert!(h.sub(&expect).max_abs() < 1e-14);
    }

    #[test]
    fn non_adjoint_pair_is_rejected() {
        let v = sigma_plus();
        assert!(
            DriveSpec::with_pairs(SparseOperator::zeros(2), vec![(1, v.clone(), v)], 1.0).is_err()
        );
        assert!(DriveSpec::new(SparseOperator::zeros(2), vec![(0, sigma_plus())], 1.0).is_err());
        assert!(DriveSpec::new(
            SparseOperator::zeros(2),
            vec![(1, sigma_plus()), (1, sigma_plus())],
            1.0
        )
        .is_err());
    }

    #[test]
    fn floquet_hamiltonian_inverts_exponential() {
        let h = sigma_y()
            .scale(c(0.4, 0.0))
            .add(&sigma_z().scale(c(-0.9, 0.0)))
            .to_dense();
        let u = expm_hermitian(&h, 1.1);
        let back = floquet_hamiltonian(&u, 1.1).unwrap();
        assert!((back - h).camax() < 1e-12);
        let far = expm_hermitian(&sigma_z().to_dense(), 2.0);
        assert!(matches!(
            floquet_hamiltonian(&far, 2.0),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn two_level_error_scales_quadratically() {
        let h0 = sigma_y().scale(c(0.5, 0.0));
        let base = DriveSpec::new(h0, vec![(1, sigma_plus())], 1.0).unwrap();
        let taus = [0.1, 0.05, 0.025, 0.0125];
        let errors: Vec<f64> = taus
            .iter()
            .map(|&tau| {
                stroboscopic_error(&base.with_omega(2.0 * PI / tau).unwrap(), 4000).unwrap()
            })
            .collect();
        let slope = loglog_slope(&taus, &errors);
        assert!(
            (slope - 2.0).abs() < 0.1,
            "slope {slope}, errors {errors:?}"
        );
    }
}
