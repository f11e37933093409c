use crate::linalg::{expm_hermitian, DENSE_LIMIT};
use crate::{Error, Result, C64};
use nalgebra::DMatrix;

/// One-period propagator `U(0 -> period)` of a time-dependent Hamiltonian,
/// as a time-ordered product of midpoint-sampled substep exponentials.
pub fn floquet_operator<F>(
    hamiltonian_at: F,
    period: f64,
    n_substeps: usize,
) -> Result<DMatrix<C64>>
where
    F: Fn(f64) -> DMatrix<C64>,
{
    if !(period.is_finite() && period > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "drive period must be positive, got {period}"
        )));
    }
    if n_substeps < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 substeps per period, got {n_substeps}"
        )));
    }
    let dt = period / n_substeps as f64;
    let mut u: Option<DMatrix<C64>> = None;
    for k in 0..n_substeps {
        let h = hamiltonian_at((k as f64 + 0.5) * dt);
        if h.nrows() != h.ncols() || h.nrows() > DENSE_LIMIT {
            return Err(Error::Capacity {
                what: "dense Floquet propagator".into(),
                required: h.nrows() as u128,
                limit: DENSE_LIMIT as u128,
            });
        }
        let step = expm_hermitian(&h, dt);
        u = Some(match u {
            None => step,
            Some(prev) => step * prev,
        });
    }
    Ok(u.expect("at least one substep"))
}
