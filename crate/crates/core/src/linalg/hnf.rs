//! Hermite normal form of integer row lattices.
//!
//! Rows are generators. The canonical form is lower-triangular echelon: the
//! last nonzero entry of each row is its pivot, pivots are positive and move
//! strictly right going down, and every entry in a pivot column below the
//! pivot lies in `[0, pivot)`. Two generator sets span the same lattice iff
//! their forms are equal.

use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::matrix::{Int, IntMatrix};

fn sub_multiple(target: &mut [Int], source: &[Int], factor: &Int) {
    if factor.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(source) {
        *t -= factor * s;
    }
}

/// Canonical basis of the lattice spanned by the rows of `a`; zero rows are
/// dropped, so the result has `rank(a)` rows.
pub fn hnf(a: &IntMatrix) -> IntMatrix {
    let cols = a.cols();
    let mut remaining: Vec<Vec<Int>> = a
        .to_rows()
        .into_iter()
        .filter(|r| r.iter().any(|x| !x.is_zero()))
        .collect();
    // Pivot rows found so far, right-most pivot first.
    let mut pivots: Vec<(usize, Vec<Int>)> = Vec::new();

    for c in (0..cols).rev() {
        loop {
            let mut nonzero: Vec<usize> = (0..remaining.len())
                .filter(|&i| !remaining[i][c].is_zero())
                .collect();
            if nonzero.len() <= 1 {
                break;
            }
            nonzero.sort_by(|&i, &j| remaining[i][c].abs().cmp(&remaining[j][c].abs()));
            let src = nonzero[0];
            let source = remaining[src].clone();
            for &i in &nonzero[1..] {
                let f = remaining[i][c].div_floor(&source[c]);
                sub_multiple(&mut remaining[i], &source, &f);
            }
        }
        let Some(idx) = remaining.iter().position(|r| !r[c].is_zero()) else {
            continue;
        };
        let mut row = remaining.swap_remove(idx);
        if row[c].is_negative() {
            row.iter_mut().for_each(|x| *x = -x.clone());
        }
        for (_, lower) in pivots.iter_mut() {
            let f = lower[c].div_floor(&row[c]);
            sub_multiple(lower, &row, &f);
        }
        pivots.push((c, row));
        remaining.retain(|r| r.iter().any(|x| !x.is_zero()));
    }
    debug_assert!(remaining.iter().all(|r| r.iter().all(Zero::is_zero)));

    pivots.reverse();
    let rows: Vec<Vec<Int>> = pivots.into_iter().map(|(_, r)| r).collect();
    if rows.is_empty() {
        IntMatrix::zeros(0, cols)
    } else {
        IntMatrix::from_rows(rows)
    }
}

/// Basis of the integer left kernel `{z : z * w = 0}`, one vector per row.
pub fn left_kernel(w: &IntMatrix) -> IntMatrix {
    let k = w.rows();
    let m = w.cols();
    // Reduce [I | W]; rows whose W-part vanishes span the kernel.
    let augmented = IntMatrix::from_fn(k, k + m, |i, j| {
        if j < k {
            Int::from((i == j) as i64)
        } else {
            w[(i, j - k)].clone()
        }
    });
    let h = hnf(&augmented);
    let rows: Vec<Vec<Int>> = (0..h.rows())
        .filter(|&i| h.row(i)[k..].iter().all(Zero::is_zero))
        .map(|i| h.row(i)[..k].to_vec())
        .collect();
    if rows.is_empty() {
        IntMatrix::zeros(0, k)
    } else {
        IntMatrix::from_rows(rows)
    }
}
