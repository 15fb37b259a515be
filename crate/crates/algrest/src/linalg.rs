//! Exact linear algebra over the rationals: row echelon, rank, kernels and
//! full solution spaces. Matrices are dense; the graded pieces this engine
//! works with are small.

use crate::Q;
use num_traits::Zero;

/// Dense matrix over `Q`, row major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Q>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        Mat {
            rows,
            cols,
            data: vec![Q::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Q>>) -> Self {
        let r = rows.len();
        let c = rows.first().map(|x| x.len()).unwrap_or(0);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn at(&self, i: usize, j: usize) -> &Q {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Q] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Q]) -> Vec<Q> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut s = Q::zero();
                for j in 0..self.cols {
                    let a = self.at(i, j);
                    if !a.is_zero() && !v[j].is_zero() {
                        s += a * &v[j];
                    }
                }
                s
            })
            .collect()
    }

    /// In-place reduced row echelon form. Returns the pivot columns in order.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            // find a pivot row
            let Some(p) = (r..self.rows).find(|&i| !self.at(i, c).is_zero()) else {
                continue;
            };
            self.swap_rows(r, p);
            let inv = {
                let pv = self.at(r, c).clone();
                Q::new(pv.denom().clone(), pv.numer().clone())
            };
            for j in c..self.cols {
                let v = self.at(r, j) * &inv;
                self.set(r, j, v);
            }
            for i in 0..self.rows {
                if i != r && !self.at(i, c).is_zero() {
                    let f = self.at(i, c).clone();
                    for j in c..self.cols {
                        let v = self.at(i, j) - &(self.at(r, j) * &f);
                        self.set(i, j, v);
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

/// Exact rank of a set of coordinate vectors.
pub fn span_dim(vectors: &[Vec<Q>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    let mut m = Mat::from_rows(vectors.to_vec());
    m.rref().len()
}

/// Outcome of an exact linear solve.
#[derive(Debug, Clone)]
pub enum Solve {
    /// A particular solution together with a basis of the homogeneous kernel.
    Solution {
        particular: Vec<Q>,
        kernel: Vec<Vec<Q>>,
    },
    Infeasible,
}

/// Solve `a * x = b` exactly.
pub fn solve_linear(a: &Mat, b: &[Q]) -> Solve {
    assert_eq!(a.rows, b.len());
    let mut aug = Mat::zero(a.rows, a.cols + 1);
    for i in 0..a.rows {
        for j in 0..a.cols {
            aug.set(i, j, a.at(i, j).clone());
        }
        aug.set(i, a.cols, b[i].clone());
    }
    let pivots = aug.rref();
    if pivots.last() == Some(&a.cols) {
        return Solve::Infeasible;
    }
    let mut particular = vec![Q::zero(); a.cols];
    for (r, &c) in pivots.iter().enumerate() {
        particular[c] = aug.at(r, a.cols).clone();
    }
    let pivot_set: std::collections::BTreeSet<usize> = pivots.iter().copied().collect();
    let mut kernel = Vec::new();
    for free in 0..a.cols {
        if pivot_set.contains(&free) {
            continue;
        }
        let mut v = vec![Q::zero(); a.cols];
        v[free] = Q::new(1.into(), 1.into());
        for (r, &c) in pivots.iter().enumerate() {
            v[c] = -aug.at(r, free).clone();
        }
        kernel.push(v);
    }
    Solve::Solution { particular, kernel }
}

/// Kernel basis of the homogeneous system `a * x = 0`.
pub fn kernel_basis(a: &Mat) -> Vec<Vec<Q>> {
    match solve_linear(a, &vec![Q::zero(); a.rows]) {
        Solve::Solution { kernel, .. } => kernel,
        Solve::Infeasible => unreachable!("homogeneous systems are feasible"),
    }
}

/// Forward-elimination state that accepts rows one at a time and reports as
/// soon as the accumulated system `A x = b` becomes infeasible. Rows carry
/// the right-hand side as a trailing entry.
pub struct IncrementalSolver {
    cols: usize,
    /// Echelon rows, each normalized to a unit pivot; `pivot[i]` is the pivot
    /// column of `rows[i]`. Kept in increasing pivot order.
    rows: Vec<Vec<Q>>,
    pivots: Vec<usize>,
}

impl IncrementalSolver {
    pub fn new(cols: usize) -> Self {
        IncrementalSolver {
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    /// Add the constraint `coeffs . x = rhs`. Returns `false` exactly when
    /// the system has become infeasible.
    pub fn push(&mut self, coeffs: &[Q], rhs: Q) -> bool {
        assert_eq!(coeffs.len(), self.cols);
        let mut row: Vec<Q> = coeffs.to_vec();
        row.push(rhs);
        // reduce against existing echelon
        for (r, &p) in self.pivots.iter().enumerate() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                let er = &self.rows[r];
                for j in p..=self.cols {
                    if !er[j].is_zero() {
                        row[j] = &row[j] - &(&er[j] * &f);
                    }
                }
            }
        }
        let pivot = (0..self.cols).find(|&j| !row[j].is_zero());
        match pivot {
            None => row[self.cols].is_zero(),
            Some(p) => {
                let inv = {
                    let pv = row[p].clone();
                    Q::new(pv.denom().clone(), pv.numer().clone())
                };
                for j in p..=self.cols {
                    if !row[j].is_zero() {
                        row[j] = &row[j] * &inv;
                    }
                }
                let at = self.pivots.partition_point(|&q| q < p);
                self.pivots.insert(at, p);
                self.rows.insert(at, row);
                true
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q, qi};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn solve_two_by_two() {
        // x + y = 1, x - y = 0
        let a = Mat::from_rows(vec![vec![qi(1), qi(1)], vec![qi(1), qi(-1)]]);
        match solve_linear(&a, &[qi(1), qi(0)]) {
            Solve::Solution { particular, kernel } => {
                assert_eq!(particular, vec![q(1, 2), q(1, 2)]);
                assert!(kernel.is_empty());
            }
            Solve::Infeasible => panic!("feasible system reported infeasible"),
        }
    }

    #[test]
    fn infeasible_is_certified() {
        let a = Mat::from_rows(vec![vec![qi(1)], vec![qi(1)]]);
        assert!(matches!(solve_linear(&a, &[qi(0), qi(1)]), Solve::Infeasible));
    }

    fn random_q(rng: &mut ChaCha20Rng) -> Q {
        q(rng.gen_range(-9..=9), rng.gen_range(1..=4))
    }

    #[test]
    fn random_system_solution_substitutes_back() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..10 {
            let rows = 6;
            let cols = 9;
            let mut a = Mat::zero(rows, cols);
            for i in 0..rows {
                for j in 0..cols {
                    a.set(i, j, random_q(&mut rng));
                }
            }
            // make a consistent rhs from a known vector
            let x0: Vec<Q> = (0..cols).map(|_| random_q(&mut rng)).collect();
            let b = a.mul_vec(&x0);
            match solve_linear(&a, &b) {
                Solve::Solution { particular, kernel } => {
                    assert_eq!(a.mul_vec(&particular), b);
                    for k in &kernel {
                        let z = a.mul_vec(k);
                        assert!(z.iter().all(|v| v.is_zero()));
                    }
                }
                Solve::Infeasible => panic!("constructed system must be feasible"),
            }
        }
    }

    #[test]
    fn span_dims() {
        assert_eq!(span_dim(&[]), 0);
        assert_eq!(
            span_dim(&[
                vec![qi(1), qi(0)],
                vec![qi(0), qi(1)],
                vec![qi(1), qi(1)]
            ]),
            2
        );
    }

    #[test]
    fn rank_invariant_under_row_order_and_scaling() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let vecs: Vec<Vec<Q>> = (0..20)
            .map(|_| (0..12).map(|_| random_q(&mut rng)).collect())
            .collect();
        let r1 = span_dim(&vecs);
        assert!(r1 <= 12);
        let mut permuted: Vec<Vec<Q>> = vecs.iter().rev().cloned().collect();
        for v in permuted.iter_mut() {
            for e in v.iter_mut() {
                *e = &*e * &q(3, 7);
            }
        }
        assert_eq!(span_dim(&permuted), r1);
    }

    #[test]
    fn incremental_solver_detects_first_contradiction() {
        let mut s = IncrementalSolver::new(2);
        assert!(s.push(&[qi(1), qi(1)], qi(1)));
        assert!(s.push(&[qi(2), qi(2)], qi(2))); // dependent, still fine
        assert!(s.push(&[qi(1), qi(-1)], qi(0)));
        assert!(!s.push(&[qi(3), qi(1)], qi(0))); // 3x+y = 2 forced, 0 demanded
        assert_eq!(s.rank(), 2);
    }
}
