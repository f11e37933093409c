//! Sparse complex operators and states.

use crate::hilbert::SectorBasis;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};
use std::fmt::Write as _;
use std::sync::Arc;

/// Tolerance used when a builder certifies Hermiticity.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Square complex matrix in compressed-row form.
///
/// Entries within a row are sorted by column and deduplicated; explicit
/// zeros are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseOperator {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<C64>,
    hermitian: bool,
}

impl SparseOperator {
    pub fn zeros(dim: usize) -> Self {
        SparseOperator {
            dim,
            row_ptr: vec![0; dim + 1],
            cols: Vec::new(),
            vals: Vec::new(),
            hermitian: true,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_diagonal(&vec![1.0; dim])
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        Self::from_triplets(
            diag.len(),
            diag.iter()
                .enumerate()
                .map(|(i, &d)| (i, i, C64::new(d, 0.0)))
                .collect(),
        )
    }

    /// Builds the canonical form from unordered `(row, col, value)` entries,
    /// summing duplicates.
    pub fn from_triplets(dim: usize, mut triplets: Vec<(usize, usize, C64)>) -> Self {
        triplets.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut cols = Vec::with_capacity(triplets.len());
        let mut vals: Vec<C64> = Vec::with_capacity(triplets.len());
        let mut last: Option<(usize, usize)> = None;
        let mut rows = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            assert!(
                r < dim && c < dim,
                "triplet ({r}, {c}) outside dimension {dim}"
            );
            if last == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
                last = Some((r, c));
            }
        }
        // drop exact zeros left over after merging
        let mut keep_cols = Vec::with_capacity(cols.len());
        let mut keep_vals = Vec::with_capacity(vals.len());
        for ((r, c), v) in rows.into_iter().zip(cols).zip(vals) {
            if v != C64::new(0.0, 0.0) {
                row_ptr[r + 1] += 1;
                keep_cols.push(c);
                keep_vals.push(v);
            }
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut op = SparseOperator {
            dim,
            row_ptr,
            cols: keep_cols,
            vals: keep_vals,
            hermitian: false,
        };
        op.hermitian = op.hermiticity_defect() < HERMITICITY_TOL;
        op
    }

    /// Keeps entries with magnitude above `tol`.
    pub fn from_dense(m: &DMatrix<C64>, tol: f64) -> Self {
        assert_eq!(m.nrows(), m.ncols());
        let mut t = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                if m[(r, c)].norm() > tol {
                    t.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::from_triplets(m.nrows(), t)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Whether the operator was certified Hermitian at construction
    /// (`max |A - A^dag| < 1e-12`).
    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, C64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.cols[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn is_diagonal(&self) -> bool {
        self.triplets().all(|(r, c, _)| r == c)
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(
            self.dim,
            self.triplets().map(|(r, c, v)| (c, r, v.conj())).collect(),
        )
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.triplets()
            .map(|(r, c, v)| (v - self.get(c, r).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::from_triplets(
            self.dim,
            self.triplets().map(|(r, c, v)| (r, c, v * s)).collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        Self::from_triplets(self.dim, self.triplets().chain(other.triplets()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// Sparse product `self * other`.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let mut t = Vec::new();
        let mut acc: Vec<C64> = vec![C64::new(0.0, 0.0); self.dim];
        let mut touched: Vec<usize> = Vec::new();
        let mut mark = vec![false; self.dim];
        for r in 0..self.dim {
            for (k, a) in self.row(r) {
                for (c, b) in other.row(k) {
                    if !mark[c] {
                        mark[c] = true;
                        touched.push(c);
                    }
                    acc[c] += a * b;
                }
            }
            for &c in &touched {
                t.push((r, c, acc[c]));
                acc[c] = C64::new(0.0, 0.0);
                mark[c] = false;
            }
            touched.clear();
        }
        Self::from_triplets(self.dim, t)
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    pub fn apply(&self, x: &DVector<C64>) -> DVector<C64> {
        let mut y = DVector::zeros(self.dim);
        self.apply_into(x.as_slice(), y.as_mut_slice());
        y
    }

    pub fn apply_into(&self, x: &[C64], y: &mut [C64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        for (r, out) in y.iter_mut().enumerate() {
            *out = self.row(r).map(|(c, v)| v * x[c]).sum();
        }
    }

    /// `<x|A|x>` for normalized `x`.
    pub fn expectation(&self, x: &DVector<C64>) -> C64 {
        x.dotc(&self.apply(x))
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (r, c, v) in self.triplets() {
            m[(r, c)] = v;
        }
        m
    }

    /// Returns the operator after checking Hermiticity, or a validation
    /// error naming `what`.
    pub fn require_hermitian(self, what: &str) -> Result<Self> {
        let defect = self.hermiticity_defect();
        if defect < HERMITICITY_TOL {
            Ok(self)
        } else {
            Err(Error::Validation(format!(
                "{what} is not Hermitian (defect {defect:.3e})"
            )))
        }
    }

    /// Debug dump: `row,col,re,im` per stored entry.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("row,col,re,im\n");
        for (r, c, v) in self.triplets() {
            let _ = writeln!(s, "{r},{c},{:.16e},{:.16e}", v.re, v.im);
        }
        s
    }
}

/// Normalized amplitude vector over a basis.
#[derive(Clone, Debug)]
pub struct QuantumState {
    basis: Arc<SectorBasis>,
    amplitudes: DVector<C64>,
}

impl QuantumState {
    /// Wraps `amplitudes`, normalizing them. Fails on length mismatch or a
    /// zero vector.
    pub fn new(basis: Arc<SectorBasis>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "{} amplitudes for a basis of {} states",
                amplitudes.len(),
                basis.len()
            )));
        }
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidParameter(
                "state has zero or non-finite norm".into(),
            ));
        }
        Ok(QuantumState {
            basis,
            amplitudes: amplitudes / C64::new(norm, 0.0),
        })
    }

    /// The basis vector with index `index`.
    pub fn basis_state(basis: Arc<SectorBasis>, index: usize) -> Result<Self> {
        let len = basis.len();
        if index >= len {
            return Err(Error::OutOfRange { index, len });
        }
        let mut v = DVector::zeros(len);
        v[index] = C64::new(1.0, 0.0);
        Ok(QuantumState {
            basis,
            amplitudes: v,
        })
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn overlap(&self, other: &QuantumState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn triplets_are_merged_and_zeros_dropped() {
        let op = SparseOperator::from_triplets(
            3,
            vec![
                (2, 0, c(1.0, 0.0)),
                (0, 1, c(2.0, 0.0)),
                (0, 1, c(-2.0, 0.0)),
                (2, 0, c(0.5, 1.0)),
            ],
        );
        assert_eq!(op.nnz(), 1);
        assert_eq!(op.get(2, 0), c(1.5, 1.0));
        assert!(!op.is_hermitian());
    }

    #[test]
    fn pauli_commutator() {
        let x = SparseOperator::from_triplets(2, vec![(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))]);
        let y = SparseOperator::from_triplets(2, vec![(0, 1, c(0.0, -1.0)), (1, 0, c(0.0, 1.0))]);
        let z = SparseOperator::from_diagonal(&[1.0, -1.0]);
        let comm = x.commutator(&y);
        let expect = z.scale(c(0.0, 2.0));
        assert!(comm.sub(&expect).max_abs() < 1e-15);
        assert!(x.is_hermitian() && y.is_hermitian());
    }

    #[test]
    fn csv_dump_has_header_and_rows() {
        let op = SparseOperator::from_diagonal(&[1.0, 0.0, -2.0]);
        let csv = op.to_csv();
        assert!(csv.starts_with("row,col,re,im\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    fn small_op() -> impl Strategy<Value = SparseOperator> {
        prop::collection::vec((0usize..5, 0usize..5, -2.0f64..2.0, -2.0f64..2.0), 0..20).prop_map(
            |t| {
                SparseOperator::from_triplets(
                    5,
                    t.into_iter()
                        .map(|(r, cc, a, b)| (r, cc, c(a, b)))
                        .collect(),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn sparse_algebra_matches_dense(a in small_op(), b in small_op()) {
            let prod = a.matmul(&b).to_dense();
            let dense = a.to_dense() * b.to_dense();
            prop_assert!((prod - dense).camax() < 1e-12);
            let adj = a.adjoint().to_dense();
            prop_assert!((adj - a.to_dense().adjoint()).camax() < 1e-15);
            let h = a.add(&a.adjoint());
            prop_assert!(h.is_hermitian());
        }
    }
}
