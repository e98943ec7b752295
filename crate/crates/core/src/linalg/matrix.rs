//! Dense matrices over arbitrary-precision integers and rationals.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<Int>;
pub type RatMatrix = Matrix<Rat>;

impl<T> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from its rows. Panics on ragged input.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(nrows * ncols);
        for row in rows {
            assert_eq!(row.len(), ncols, "ragged matrix rows");
            data.extend(row);
        }
        Matrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn entries(&self) -> impl Iterator<Item = &T> {
        self.data.iter()
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }
}

impl<T: Clone> Matrix<T> {
    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Copies the block with top-left corner `(r0, c0)` and the given size.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// Reorders columns so that new column `j` is old column `perm[j]`.
    pub fn permute_cols(&self, perm: &[usize]) -> Self {
        Matrix::from_fn(self.rows, perm.len(), |i, j| self[(i, perm[j])].clone())
    }

    /// Reorders rows so that new row `i` is old row `perm[i]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Self {
        Matrix::from_fn(perm.len(), self.cols, |i, j| self[(perm[i], j)].clone())
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix::from_fn(rows, cols, |_, _| T::zero())
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn diagonal(diag: &[T]) -> Self {
        let n = diag.len();
        Matrix::from_fn(
            n,
            n,
            |i, j| if i == j { diag[i].clone() } else { T::zero() },
        )
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    pub fn scale(&self, k: &T) -> Self {
        self.map(|x| x.clone() * k.clone())
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    /// Exact power by repeated squaring; `e = 0` gives the identity.
    pub fn pow(&self, mut e: u64) -> Self {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut result = Matrix::identity(self.rows);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }
}

impl<T: Clone + Zero + One + std::ops::Neg<Output = T> + std::ops::Sub<Output = T>> Matrix<T> {
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<'a, T: Clone + Zero + One> Mul<&'a Matrix<T>> for &'a Matrix<T> {
    type Output = Matrix<T>;

    fn mul(self, rhs: &'a Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, j)].clone();
                    let slot: &mut T = &mut out[(i, j)];
                    *slot = std::mem::replace(slot, T::zero()) + prod;
                }
            }
        }
        out
    }
}

impl<T: fmt::Display> fmt::Display for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matrix{}x{}{}", self.rows, self.cols, self)
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Int::from(x)).collect())
                .collect(),
        )
    }

    pub fn to_rational(&self) -> RatMatrix {
        self.map(|x| Rat::from_integer(x.clone()))
    }

    /// Largest absolute value of an entry (0 for an empty matrix).
    pub fn max_abs(&self) -> Int {
        self.entries()
            .map(Signed::abs)
            .max()
            .unwrap_or_else(Int::zero)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Int {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)];
                    a[(i, j)] = num / &prev;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }
}

impl RatMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMatrix::from_i64(rows).to_rational()
    }

    pub fn is_integral(&self) -> bool {
        self.entries().all(Rat::is_integer)
    }

    /// Converts to an integer matrix if every entry is integral.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        self.is_integral().then(|| self.map(|x| x.to_integer()))
    }

    /// Least common multiple of the entry denominators.
    pub fn denominator_lcm(&self) -> Int {
        self.entries().fold(Int::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// Gauss-Jordan inverse; `None` when singular.
    pub fn inverse(&self) -> Option<RatMatrix> {
        assert!(self.is_square(), "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RatMatrix::identity(n);
        for col in 0..n {
            let pivot = (col..n).find(|&i| !a[(i, col)].is_zero())?;
            a.swap_rows(pivot, col);
            inv.swap_rows(pivot, col);
            let p = a[(col, col)].clone();
            for j in 0..n {
                a[(col, j)] = &a[(col, j)] / &p;
                inv[(col, j)] = &inv[(col, j)] / &p;
            }
            for i in 0..n {
                if i == col || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in 0..n {
                    let t = &f * &a[(col, j)];
                    a[(i, j)] = &a[(i, j)] - t;
                    let t = &f * &inv[(col, j)];
                    inv[(i, j)] = &inv[(i, j)] - t;
                }
            }
        }
        Some(inv)
    }

    pub fn det(&self) -> Rat {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rat::one();
        for col in 0..n {
            let Some(pivot) = (col..n).find(|&i| !a[(i, col)].is_zero()) else {
                return Rat::zero();
            };
            if pivot != col {
                a.swap_rows(pivot, col);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det *= &p;
            for i in col + 1..n {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let f = &a[(i, col)] / &p;
                for j in col..n {
                    let t = &f * &a[(col, j)];
                    a[(i, j)] = &a[(i, j)] - t;
                }
            }
        }
        det
    }

    /// Rank over the rationals.
    pub fn rank(&self) -> usize {
        let mut a = self.clone();
        let mut rank = 0;
        for col in 0..a.cols {
            let Some(pivot) = (rank..a.rows).find(|&i| !a[(i, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(pivot, rank);
            let p = a[(rank, col)].clone();
            for i in rank + 1..a.rows {
                if a[(i, col)].is_zero() {
                    continue;
                }
                let f = &a[(i, col)] / &p;
                for j in col..a.cols {
                    let t = &f * &a[(rank, j)];
                    a[(i, j)] = &a[(i, j)] - t;
                }
            }
            rank += 1;
        }
        rank
    }

    /// Solves `self * x = b`, returning one solution (free variables set to 0)
    /// or `None` if the system is inconsistent.
    pub fn solve(&self, b: &[Rat]) -> Option<Vec<Rat>> {
        assert_eq!(self.rows, b.len(), "right-hand side has wrong length");
        let (m, n) = (self.rows, self.cols);
        let mut a = Matrix::from_fn(m, n + 1, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else {
                b[i].clone()
            }
        });
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..n {
            let Some(p) = (r..m).find(|&i| !a[(i, col)].is_zero()) else {
                continue;
            };
            a.swap_rows(p, r);
            let pv = a[(r, col)].clone();
            for j in col..=n {
                a[(r, j)] = &a[(r, j)] / &pv;
            }
            for i in 0..m {
                if i == r || a[(i, col)].is_zero() {
                    continue;
                }
                let f = a[(i, col)].clone();
                for j in col..=n {
                    let t = &f * &a[(r, j)];
                    a[(i, j)] = &a[(i, j)] - t;
                }
            }
            pivots.push(col);
            r += 1;
        }
        if (r..m).any(|i| !a[(i, n)].is_zero()) {
            return None;
        }
        let mut x = vec![Rat::zero(); n];
        for (i, &col) in pivots.iter().enumerate() {
            x[col] = a[(i, n)].clone();
        }
        Some(x)
    }

    /// Integral power allowing negative exponents; `None` if singular and `e < 0`.
    pub fn pow_signed(&self, e: i64) -> Option<RatMatrix> {
        if e >= 0 {
            Some(self.pow(e as u64))
        } else {
            Some(self.inverse()?.pow(e.unsigned_abs()))
        }
    }
}

/// Exact power of a rational matrix by binary exponentiation.
pub fn mat_pow(m: &RatMatrix, e: u64) -> RatMatrix {
    m.pow(e)
}

/// Lifts an integer vector to rationals.
pub fn to_rat_vec(v: &[Int]) -> Vec<Rat> {
    v.iter().map(|x| Rat::from_integer(x.clone())).collect()
}

pub fn is_integral_vec(v: &[Rat]) -> bool {
    v.iter().all(Rat::is_integer)
}

/// Integer parts of a vector known to be integral.
pub fn to_int_vec(v: &[Rat]) -> Option<Vec<Int>> {
    is_integral_vec(v).then(|| v.iter().map(Rat::to_integer).collect())
}

/// Least common multiple of the denominators of `v` (1 for an empty vector).
pub fn denominator_lcm(v: &[Rat]) -> Int {
    v.iter().fold(Int::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn vec_add(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_neg(a: &[Rat]) -> Vec<Rat> {
    a.iter().map(|x| -x).collect()
}

pub fn vec_scale(a: &[Rat], k: &Rat) -> Vec<Rat> {
    a.iter().map(|x| x * k).collect()
}

pub fn zero_vec(n: usize) -> Vec<Rat> {
    vec![Rat::zero(); n]
}
