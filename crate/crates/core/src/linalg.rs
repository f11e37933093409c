//! Dense linear-algebra helpers shared by the engines.

use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;

/// Largest dimension handled by dense diagonalization.
pub const DENSE_LIMIT: usize = 4096;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: DMatrix<C64>,
}

pub fn eigh(m: &DMatrix<C64>) -> Eigh {
    let n = m.nrows();
    // symmetrize to suppress rounding asymmetry
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(k));
    }
    Eigh { values, vectors }
}

/// Eigen-decomposition of a real symmetric matrix, eigenvalues ascending.
pub fn eigh_real(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (j, &k) in order.iter().enumerate() {
        vectors.set_column(j, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

/// Dense Hermitian matrix of a sparse operator, refusing dimensions above
/// [`DENSE_LIMIT`].
pub fn dense_checked(op: &SparseOperator, what: &str) -> Result<DMatrix<C64>> {
    if op.dim() > DENSE_LIMIT {
        return Err(Error::Capacity {
            what: format!("dense {what} (use the Krylov engine)"),
            required: op.dim() as u128,
            limit: DENSE_LIMIT as u128,
        });
    }
    Ok(op.to_dense())
}

/// Ascending spectrum of a Hermitian operator.
pub fn spectrum(op: &SparseOperator) -> Result<Vec<f64>> {
    if !op.is_hermitian() {
        return Err(Error::Validation(format!(
            "spectrum requested for a non-Hermitian operator (defect {:.3e})",
            op.hermiticity_defect()
        )));
    }
    if op.is_diagonal() {
        let mut d: Vec<f64> = op.diagonal().iter().map(|v| v.re).collect();
        d.sort_by(f64::total_cmp);
        return Ok(d);
    }
    Ok(eigh(&dense_checked(op, "spectrum")?).values)
}

/// `exp(-i H t)` for Hermitian `H`.
pub fn expm_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let e = eigh(h);
    propagator(&e, t)
}

/// `V diag(exp(-i E t)) V^dag` from a precomputed decomposition.
pub fn propagator(e: &Eigh, t: f64) -> DMatrix<C64> {
    let mut left = e.vectors.clone();
    for (j, &v) in e.values.iter().enumerate() {
        let p = C64::from_polar(1.0, -v * t);
        for x in left.column_mut(j).iter_mut() {
            *x *= p;
        }
    }
    left * e.vectors.adjoint()
}

/// Largest elementwise deviation between two equally long spectra.
pub fn max_deviation(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    assert_eq!(x.len(), y.len());
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Spectral norm of a matrix.
pub fn operator_norm(m: &DMatrix<C64>) -> f64 {
    m.clone()
        .singular_values()
        .iter()
        .cloned()
        .fold(0.0, f64::max)
}
