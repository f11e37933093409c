use super::{EvolutionResult, MethodInfo};
use crate::linalg::{eigh, propagator};
use crate::operator::SparseOperator;
use crate::{Error, Result, C64};
use nalgebra::{DMatrix, DVector};

/// Largest connected block of a single term that is exponentiated densely.
pub const MAX_TERM_BLOCK: usize = 512;

/// Decomposition `H = sum_a H_a` into Hermitian terms, checked on
/// construction.
#[derive(Clone, Debug)]
pub struct TermSplit {
    terms: Vec<SparseOperator>,
}

impl TermSplit {
    pub fn new(terms: Vec<SparseOperator>, h: &SparseOperator) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Validation("empty term split".into()));
        }
        let mut sum = SparseOperator::zeros(h.dim());
        for (k, t) in terms.iter().enumerate() {
            if t.dim() != h.dim() {
                return Err(Error::Validation(format!(
                    "term {k} has dimension {}, H has {}",
                    t.dim(),
                    h.dim()
                )));
            }
            if !t.is_hermitian() {
                return Err(Error::Validation(format!("term {k} is not Hermitian")));
            }
            sum = sum.add(t);
        }
        let defect = sum.sub(h).max_abs();
        if defect > 1e-12 {
            return Err(Error::Validation(format!(
                "terms do not sum to H (max deviation {defect:.3e})"
            )));
        }
        Ok(TermSplit { terms })
    }

    pub fn terms(&self) -> &[SparseOperator] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.terms[0].dim()
    }
}

/// `e^{-i H_a dt}` stored block by block over the connected components of
/// the term's matrix graph.
struct TermPropagator {
    phases: Vec<(usize, C64)>,
    blocks: Vec<(Vec<usize>, DMatrix<C64>)>,
}

fn components(op: &SparseOperator) -> Vec<Vec<usize>> {
    let n = op.dim();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (r, c, _) in op.triplets() {
        let (a, b) = (find(&mut parent, r), find(&mut parent, c));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        let root = find(&mut parent, i);
        groups[root].push(i);
    }
    groups.into_iter().filter(|g| !g.is_empty()).collect()
}

impl TermPropagator {
    fn new(op: &SparseOperator, dt: f64) -> Result<Self> {
        let mut phases = Vec::new();
        let mut blocks = Vec::new();
        for group in components(op) {
            if group.len() == 1 {
                let i = group[0];
                let d = op.get(i, i).re;
                if d != 0.0 {
                    phases.push((i, C64::from_polar(1.0, -d * dt)));
                }
                continue;
            }
            if group.len() > MAX_TERM_BLOCK {
                return Err(Error::Capacity {
                    what: "connected block of a Trotter term".into(),
                    required: group.len() as u128,
                    limit: MAX_TERM_BLOCK as u128,
                });
            }
            let m = DMatrix::from_fn(group.len(), group.len(), |r, c| op.get(group[r], group[c]));
            blocks.push((group, propagator(&eigh(&m), dt)));
        }
        Ok(TermPropagator { phases, blocks })
    }

    fn apply(&self, psi: &mut DVector<C64>) {
        for &(i, p) in &self.phases {
            psi[i] *= p;
        }
        for (idx, u) in &self.blocks {
            let sub = DVector::from_iterator(idx.len(), idx.iter().map(|&i| psi[i]));
            let out = u * sub;
            for (k, &i) in idx.iter().enumerate() {
                psi[i] = out[k];
            }
        }
    }
}

/// Product-formula evolution to time `t` in `n_steps` steps; order 1 is
/// `prod_a e^{-i H_a dt}`, order 2 the symmetric (Strang) product.
pub fn trotter_evolve(
    split: &TermSplit,
    psi0: &DVector<C64>,
    t: f64,
    n_steps: usize,
    order: u8,
) -> Result<EvolutionResult> {
    if psi0.len() != split.dim() {
        return Err(Error::BasisMismatch(format!(
            "state of length {} for terms of dimension {}",
            psi0.len(),
            split.dim()
        )));
    }
    if n_steps == 0 || !t.is_finite() {
        return Err(Error::InvalidParameter(
            "Trotter evolution needs n_steps >= 1 and finite t".into(),
        ));
    }
    let dt = t / n_steps as f64;
    let m = split.len();
    let sequence: Vec<TermPropagator> = match order {
        1 => split
            .terms
            .iter()
            .map(|h| TermPropagator::new(h, dt))
            .collect::<Result<_>>()?,
        2 => {
            let mut seq: Vec<TermPropagator> = Vec::with_capacity(2 * m - 1);
            for h in &split.terms[..m - 1] {
                seq.push(TermPropagator::new(h, dt / 2.0)?);
            }
            seq.push(TermPropagator::new(&split.terms[m - 1], dt)?);
            for h in split.terms[..m - 1].iter().rev() {
                seq.push(TermPropagator::new(h, dt / 2.0)?);
            }
            seq
        }
        _ => {
            return Err(Error::InvalidParameter(format!(
                "Trotter order must be 1 or 2, got {order}"
            )))
        }
    };
    let mut result = EvolutionResult::new(MethodInfo::Trotter {
        dt,
        order,
        n_terms: m,
        gate_count: sequence.len() * n_steps,
    });
    let mut psi = psi0.clone();
    result.record(0.0, psi.clone());
    for k in 1..=n_steps {
        // the operator applied first is the rightmost factor
        for p in sequence.iter().rev() {
            p.apply(&mut psi);
        }
        result.record(k as f64 * dt, psi.clone());
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm_hermitian, loglog_slope};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> SparseOperator {
        SparseOperator::from_triplets(2, vec![(0, 1, c(1.0, 0.0)), (1, 0, c(1.0, 0.0))])
    }

    fn pauli_z() -> SparseOperator {
        SparseOperator::from_diagonal(&[1.0, -1.0])
    }

    fn trotter_error(n: usize, order: u8) -> f64 {
        let h = pauli_x().add(&pauli_z());
        let split = TermSplit::new(vec![pauli_x(), pauli_z()], &h).unwrap();
        let psi = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let r = trotter_evolve(&split, &psi, 1.0, n, order).unwrap();
        let exact = expm_hermitian(&h.to_dense(), 1.0) * &psi;
        (r.final_state().unwrap() - exact).norm()
    }

    #[test]
    fn commuting_terms_are_exact() {
        let a = SparseOperator::from_diagonal(&[0.5, -0.2, 1.0]);
        let b = SparseOperator::from_diagonal(&[0.1, 0.3, -0.7]);
        let h = a.add(&b);
        let split = TermSplit::new(vec![a, b], &h).unwrap();
        let psi = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0)]);
        let r = trotter_evolve(&split, &psi, 2.0, 1, 1).unwrap();
        let exact = expm_hermitian(&h.to_dense(), 2.0) * &psi;
        assert!((r.final_state().unwrap() - exact).camax() < 1e-14);
    }

    #[test]
    fn error_slopes_match_order() {
        let ns = [8usize, 16, 32, 64, 128];
        let x: Vec<f64> = ns.iter().map(|&n| n as f64).collect();
        for order in [1u8, 2] {
            let y: Vec<f64> = ns.iter().map(|&n| trotter_error(n, order)).collect();
            let slope = loglog_slope(&x, &y);
            let expect = -(order as f64);
            assert!(
                (slope - expect).abs() < 0.1 * expect.abs(),
                "order {order}: slope {slope}"
            );
        }
        for &n in &ns {
            assert!(trotter_error(n, 2) <= trotter_error(n, 1));
        }
    }

    #[test]
    fn gate_count_is_recorded() {
        let h = pauli_x().add(&pauli_z());
        let split = TermSplit::new(vec![pauli_x(), pauli_z()], &h).unwrap();
        let psi = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let r = trotter_evolve(&split, &psi, 1.0, 10, 1).unwrap();
        assert_eq!(
            r.method,
            MethodInfo::Trotter {
                dt: 0.1,
                order: 1,
                n_terms: 2,
                gate_count: 20
            }
        );
        assert_eq!(r.len(), 11);
    }

    #[test]
    fn inconsistent_split_is_rejected() {
        let h = pauli_x().add(&pauli_z());
        assert!(TermSplit::new(vec![pauli_x()], &h).is_err());
        let split = TermSplit::new(vec![pauli_x(), pauli_z()], &h).unwrap();
        let psi = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(trotter_evolve(&split, &psi, 1.0, 4, 3).is_err());
    }

    #[test]
    fn components_split_block_diagonal_terms() {
        let op = SparseOperator::from_triplets(
            5,
            vec![
                (0, 3, c(1.0, 0.0)),
                (3, 0, c(1.0, 0.0)),
                (1, 1, c(2.0, 0.0)),
                (2, 4, c(0.0, 1.0)),
                (4, 2, c(0.0, -1.0)),
            ],
        );
        let mut groups = components(&op);
        groups.sort();
        assert_eq!(groups, vec![vec![0, 3], vec![1], vec![2, 4]]);
    }
}
