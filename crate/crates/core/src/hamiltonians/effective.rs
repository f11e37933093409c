use super::sum_of_squares;
use crate::linalg::{dense_checked, eigh};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;

/// Second-order effective Hamiltonian on the common kernel of a set of
/// generators, expressed in an orthonormal basis of that kernel.
#[derive(Clone, Debug)]
pub struct EffectiveHamiltonian {
    /// Columns span the kernel inside the original space (`dim x k`).
    pub isometry: DMatrix<C64>,
    pub matrix: DMatrix<C64>,
}

impl EffectiveHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.dim() == 0
    }

    pub fn spectrum(&self) -> Vec<f64> {
        if self.is_empty() {
            return Vec::new();
        }
        eigh(&self.matrix).values.iter().copied().collect()
    }

    pub fn to_sparse(&self) -> SparseOperator {
        SparseOperator::from_dense(&self.matrix, 0.0)
    }
}

const COMMUTE_TOL: f64 = 1e-10;
const KERNEL_TOL: f64 = 1e-9;

/// `H_eff = P H0 P - (1/Gamma) P H0 Q (sum G^2)^{-1} Q H0 P`, with `P` the
/// projector on the joint kernel of `generators` and `Q = 1 - P`.
pub fn effective_second_order(
    h0: &SparseOperator,
    generators: &[SparseOperator],
    gamma: f64,
) -> Result<EffectiveHamiltonian> {
    if !(gamma.is_finite() && gamma > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "penalty scale must be positive, got {gamma}"
        )));
    }
    if !h0.is_hermitian() {
        return Err(Error::Precondition("H0 is not Hermitian".into()));
    }
    let dim = h0.dim();
    for (i, g) in generators.iter().enumerate() {
        if g.dim() != dim {
            return Err(Error::BasisMismatch(format!(
                "generator {i} has dimension {}, H0 has {dim}",
                g.dim()
            )));
        }
        if !g.is_hermitian() {
            return Err(Error::Precondition(format!(
                "generator {i} is not Hermitian"
            )));
        }
        for (j, other) in generators.iter().enumerate().skip(i + 1) {
            let c = g.commutator(other).max_abs();
            if c > COMMUTE_TOL {
                return Err(Error::Precondition(format!(
                    "generators {i} and {j} do not commute (|[G,G']| = {c:.3e})"
                )));
            }
        }
    }
    let penalty = sum_of_squares(generators, dim);
    if penalty.is_diagonal() {
        Ok(diagonal_case(
            h0,
            &penalty.diagonal().iter().map(|z| z.re).collect::<Vec<_>>(),
            gamma,
        ))
    } else {
        dense_case(h0, &penalty, gamma)
    }
}

fn diagonal_case(h0: &SparseOperator, penalty: &[f64], gamma: f64) -> EffectiveHamiltonian {
    let dim = h0.dim();
    let kernel: Vec<usize> = (0..dim)
        .filter(|&i| penalty[i].abs() < KERNEL_TOL)
        .collect();
    let mut position = vec![None; dim];
    for (k, &i) in kernel.iter().enumerate() {
        position[i] = Some(k);
    }
    let k = kernel.len();
    let mut matrix = DMatrix::<C64>::zeros(k, k);
    for (a, &i) in kernel.iter().enumerate() {
        let mut virtual_amps: Vec<(usize, C64)> = Vec::new();
        for (c, v) in h0.row(i) {
            match position[c] {
                Some(b) => matrix[(a, b)] += v,
                None => virtual_amps.push((c, v / penalty[c])),
            }
        }
        for (c, w) in virtual_amps {
            for (j, v) in h0.row(c) {
                if let Some(b) = position[j] {
                    matrix[(a, b)] -= w * v / gamma;
                }
            }
        }
    }
    let mut isometry = DMatrix::<C64>::zeros(dim, k);
    for (a, &i) in kernel.iter().enumerate() {
        isometry[(i, a)] = C64::new(1.0, 0.0);
    }
    EffectiveHamiltonian {
        isometry,
        matrix: hermitize(matrix),
    }
}

fn dense_case(
    h0: &SparseOperator,
    penalty: &SparseOperator,
    gamma: f64,
) -> Result<EffectiveHamiltonian> {
    let p = dense_checked(penalty, "generator penalty")?;
    let h = dense_checked(h0, "H0")?;
    let e = eigh(&p);
    let kernel: Vec<usize> = (0..e.values.len())
        .filter(|&i| e.values[i].abs() < KERNEL_TOL)
        .collect();
    let complement: Vec<usize> = (0..e.values.len())
        .filter(|&i| e.values[i].abs() >= KERNEL_TOL)
        .collect();
    let v0 = e.vectors.select_columns(&kernel);
    let v1 = e.vectors.select_columns(&complement);
    let first = v0.adjoint() * &h * &v0;
    let coupling = v1.adjoint() * &h * &v0;
    let mut scaled = coupling.clone();
    for (r, &c) in complement.iter().enumerate() {
        let inv = 1.0 / e.values[c];
        scaled.row_mut(r).iter_mut().for_each(|z| *z *= inv);
    }
    let second = coupling.adjoint() * scaled;
    let matrix = first - second.scale(1.0 / gamma);
    Ok(EffectiveHamiltonian {
        isometry: v0,
        matrix: hermitize(matrix),
    })
}

fn hermitize(m: DMatrix<C64>) -> DMatrix<C64> {
    (&m + m.adjoint()).scale(0.5)
}
