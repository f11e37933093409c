use super::{EvolutionResult, MethodInfo};
use crate::linalg::eigh_real;
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrylovOptions {
    #[serde(default = "default_dim")]
    pub krylov_dim: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_dim() -> usize {
    20
}

fn default_tol() -> f64 {
    1e-10
}

impl Default for KrylovOptions {
    fn default() -> Self {
        KrylovOptions {
            krylov_dim: default_dim(),
            tol: default_tol(),
        }
    }
}

/// One Lanczos step `psi -> e^{-iH dt} psi`. Returns the new state and the
/// residual error estimate `beta_m |[e^{-iT dt} e_1]_m|` (zero after a
/// happy breakdown).
pub fn krylov_step(
    h: &SparseOperator,
    psi: &DVector<C64>,
    dt: f64,
    opts: &KrylovOptions,
) -> Result<(DVector<C64>, f64)> {
    let norm = psi.norm();
    if norm == 0.0 {
        return Ok((psi.clone(), 0.0));
    }
    let n = psi.len();
    let m_max = opts.krylov_dim.min(n);
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(m_max);
    let mut alpha = Vec::with_capacity(m_max);
    let mut beta: Vec<f64> = Vec::with_capacity(m_max);
    basis.push(psi / C64::new(norm, 0.0));
    let mut w = DVector::zeros(n);
    let scale = h.max_abs().max(1.0);
    let residual = loop {
        let j = basis.len() - 1;
        h.apply_into(basis[j].as_slice(), w.as_mut_slice());
        let a = basis[j].dotc(&w).re;
        alpha.push(a);
        // two passes of full Gram-Schmidt keep the Lanczos vectors orthogonal
        for _ in 0..2 {
            for v in &basis {
                let c = v.dotc(&w);
                w.axpy(-c, v, C64::new(1.0, 0.0));
            }
        }
        let b = w.norm();
        if b <= 1e-13 * scale || basis.len() == m_max {
            break if b <= 1e-13 * scale { 0.0 } else { b };
        }
        beta.push(b);
        basis.push(&w / C64::new(b, 0.0));
    };
    let m = alpha.len();
    let t = DMatrix::from_fn(m, m, |r, c| {
        if r == c {
            alpha[r]
        } else if r == c + 1 {
            beta[c]
        } else if c == r + 1 {
            beta[r]
        } else {
            0.0
        }
    });
    let (values, vectors) = eigh_real(&t);
    let coeffs: Vec<C64> = (0..m)
        .map(|r| {
            (0..m)
                .map(|k| C64::from_polar(vectors[(r, k)] * vectors[(0, k)], -values[k] * dt))
                .sum::<C64>()
        })
        .collect();
    let estimate = residual * coeffs[m - 1].norm() * norm;
    let mut out = DVector::zeros(n);
    for (v, c) in basis.iter().zip(&coeffs) {
        out.axpy(c * norm, v, C64::new(1.0, 0.0));
    }
    Ok((out, estimate))
}

/// Fixed-step Lanczos propagation recording `n_steps + 1` states at
/// `t = k dt`. A step whose error estimate exceeds `tol` is an error.
pub fn evolve_krylov(
    h: &SparseOperator,
    psi0: &DVector<C64>,
    dt: f64,
    n_steps: usize,
    opts: &KrylovOptions,
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
            "Krylov evolution needs a Hermitian operator".into(),
        ));
    }
    if opts.krylov_dim == 0 || !(opts.tol > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidParameter(
            "Krylov dimension, tolerance and step must be positive and finite".into(),
        ));
    }
    let mut result = EvolutionResult::new(MethodInfo::Krylov {
        dt,
        krylov_dim: opts.krylov_dim,
        tol: opts.tol,
        max_error_estimate: 0.0,
    });
    let mut psi = psi0.clone();
    let mut worst: f64 = 0.0;
    result.record(0.0, psi.clone());
    for k in 1..=n_steps {
        let (next, estimate) = krylov_step(h, &psi, dt, opts)?;
        if estimate > opts.tol {
            return Err(Error::KrylovTolerance {
                estimate,
                tol: opts.tol,
                krylov_dim: opts.krylov_dim,
            });
        }
        worst = worst.max(estimate);
        psi = next;
        result.record(k as f64 * dt, psi.clone());
    }
    if let MethodInfo::Krylov {
        max_error_estimate, ..
    } = &mut result.method
    {
        *max_error_estimate = worst;
    }
    Ok(result)
}
