//! Smith normal form with unimodular transforms, and the invariant-factor bound.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{Int, IntMatrix};

/// `d = q * n * p` with `d = diag(k_1, .., k_r, 0, .., 0)`, `k_j | k_{j+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult {
    pub d: IntMatrix,
    pub p: IntMatrix,
    pub q: IntMatrix,
    pub rank: usize,
}

impl SnfResult {
    /// The nonzero diagonal entries `k_1, .., k_r`.
    pub fn invariant_factors(&self) -> Vec<Int> {
        (0..self.rank).map(|i| self.d[(i, i)].clone()).collect()
    }

    /// Product `k_1 * .. * k_r` (1 when the rank is zero).
    pub fn factor_product(&self) -> Int {
        self.invariant_factors().iter().product()
    }

    /// Re-checks every structural property against the original matrix.
    pub fn verify(&self, n: &IntMatrix) -> Result<(), String> {
        if &(&self.q * n) * &self.p != self.d {
            return Err("D != Q N P".into());
        }
        for (name, m) in [("P", &self.p), ("Q", &self.q)] {
            if !m.det().abs().is_one() {
                return Err(format!("{name} is not unimodular"));
            }
        }
        for i in 0..self.d.rows() {
            for j in 0..self.d.cols() {
                let e = &self.d[(i, j)];
                let on_diag_nonzero = i == j && i < self.rank;
                if on_diag_nonzero {
                    if !e.is_positive() {
                        return Err(format!("k_{} is not positive", i + 1));
                    }
                } else if !e.is_zero() {
                    return Err(format!("unexpected nonzero entry at ({i}, {j})"));
                }
            }
        }
        for i in 1..self.rank {
            if !self.d[(i, i)].is_multiple_of(&self.d[(i - 1, i - 1)]) {
                return Err(format!("k_{} does not divide k_{}", i, i + 1));
            }
        }
        Ok(())
    }
}

fn row_axpy(m: &mut IntMatrix, target: usize, source: usize, factor: &Int) {
    for j in 0..m.cols() {
        let t = factor * &m[(source, j)];
        m[(target, j)] -= t;
    }
}

fn col_axpy(m: &mut IntMatrix, target: usize, source: usize, factor: &Int) {
    for i in 0..m.rows() {
        let t = factor * &m[(i, source)];
        m[(i, target)] -= t;
    }
}

fn negate_row(m: &mut IntMatrix, i: usize) {
    for j in 0..m.cols() {
        m[(i, j)] = -m[(i, j)].clone();
    }
}

/// Classical elimination: the pivot is always the entry of least nonzero
/// absolute value in the trailing submatrix.
pub fn snf(n: &IntMatrix) -> SnfResult {
    let (rows, cols) = (n.rows(), n.cols());
    let mut a = n.clone();
    let mut q = IntMatrix::identity(rows);
    let mut p = IntMatrix::identity(cols);
    let mut rank = 0;

    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    let e = &a[(i, j)];
                    if !e.is_zero() && best.is_none_or(|(bi, bj)| e.abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap_rows(t, pi);
            q.swap_rows(t, pi);
            a.swap_cols(t, pj);
            p.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let f = &a[(i, t)] / &a[(t, t)];
                row_axpy(&mut a, i, t, &f);
                row_axpy(&mut q, i, t, &f);
                dirty |= !a[(i, t)].is_zero();
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let f = &a[(t, j)] / &a[(t, t)];
                col_axpy(&mut a, j, t, &f);
                col_axpy(&mut p, j, t, &f);
                dirty |= !a[(t, j)].is_zero();
            }
            if dirty {
                continue;
            }
            // Row and column are clear; enforce divisibility of the remainder.
            let offender = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !a[(i, j)].is_multiple_of(&a[(t, t)])));
            match offender {
                Some(i) => {
                    let one = -Int::one();
                    row_axpy(&mut a, t, i, &one);
                    row_axpy(&mut q, t, i, &one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_zero() {
            break;
        }
        if a[(t, t)].is_negative() {
            negate_row(&mut a, t);
            negate_row(&mut q, t);
        }
        rank += 1;
    }

    let result = SnfResult { d: a, p, q, rank };
    debug_assert_eq!(result.verify(n), Ok(()));
    result
}

/// Rank over the rationals.
pub fn rank(n: &IntMatrix) -> usize {
    n.to_rational().rank()
}

/// Upper bound `ceil(r^(r/2) * a^r)` for `k_1 * .. * k_r`, where `r` is the
/// rank and `a` the largest absolute entry.
pub fn invariant_factor_bound(n: &IntMatrix) -> Int {
    let r = rank(n);
    let a = n.max_abs();
    let r_int = Int::from(r);
    // r^(r/2) a^r = sqrt(r^r a^(2r)); take the integer ceiling of the root.
    let square = num_traits::pow(r_int, r) * num_traits::pow(a, 2 * r);
    ceil_sqrt(&square)
}

/// `ceil(sqrt(s) * a^s)` with `s` the matrix size. Not an upper bound on
/// `k_1 * .. * k_r` in general: `[[4, -2], [-4, -4]]` has determinant 24 > 23.
pub fn size_based_factor_bound(n: &IntMatrix) -> Int {
    let s = n.rows();
    let a = n.max_abs();
    ceil_sqrt(&(Int::from(s) * num_traits::pow(a, 2 * s)))
}

pub(crate) fn ceil_sqrt(x: &Int) -> Int {
    let root = x.sqrt();
    if &(&root * &root) == x {
        root
    } else {
        root + 1
    }
}
