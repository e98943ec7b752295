//! Rational lattices in canonical form.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::hnf::{hnf, left_kernel};
use super::matrix::{denominator_lcm, Int, IntMatrix, Rat, RatMatrix};
use crate::error::Error;

/// The lattice `(1/denom) * rowspan(basis)`, with `denom` the least positive
/// integer clearing every denominator and `basis` in Hermite normal form.
/// Structural equality is lattice equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice {
    dim: usize,
    denom: Int,
    basis: IntMatrix,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LatticeIndex {
    Finite(Int),
    Infinite,
}

impl Lattice {
    /// Lattice generated by the given rational vectors (need not be independent).
    pub fn from_generators(dim: usize, gens: &[Vec<Rat>]) -> Self {
        let denom = gens.iter().fold(Int::one(), |acc, g| {
            assert_eq!(g.len(), dim, "generator has wrong dimension");
            acc.lcm(&denominator_lcm(g))
        });
        let scaled = IntMatrix::from_fn(gens.len(), dim, |i, j| {
            (&gens[i][j] * Rat::from_integer(denom.clone())).to_integer()
        });
        Self::from_scaled(dim, denom, &scaled)
    }

    /// Lattice spanned by the columns of `m` (the image `m * Z^k`).
    pub fn column_span(m: &RatMatrix) -> Self {
        let gens: Vec<Vec<Rat>> = (0..m.cols()).map(|j| m.column(j)).collect();
        Self::from_generators(m.rows(), &gens)
    }

    /// `Z^dim`.
    pub fn integer(dim: usize) -> Self {
        Lattice {
            dim,
            denom: Int::one(),
            basis: IntMatrix::identity(dim),
        }
    }

    /// `(1/k) Z^dim`.
    pub fn scaled_integer(dim: usize, k: &Int) -> Self {
        let gens: Vec<Vec<Rat>> = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| {
                        if i == j {
                            Rat::new(Int::one(), k.clone())
                        } else {
                            Rat::zero()
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_generators(dim, &gens)
    }

    fn from_scaled(dim: usize, denom: Int, scaled: &IntMatrix) -> Self {
        let basis = if scaled.rows() == 0 {
            IntMatrix::zeros(0, dim)
        } else {
            hnf(scaled)
        };
        let content = basis.entries().fold(Int::zero(), |acc, x| acc.gcd(x));
        let g = denom.gcd(&content);
        let (denom, basis) = if g.is_one() || g.is_zero() {
            (denom, basis)
        } else {
            (&denom / &g, basis.map(|x| x / &g))
        };
        let denom = if basis.rows() == 0 { Int::one() } else { denom };
        Lattice { dim, denom, basis }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn denom(&self) -> &Int {
        &self.denom
    }

    /// Canonical basis vectors as rationals.
    pub fn basis(&self) -> Vec<Vec<Rat>> {
        (0..self.rank())
            .map(|i| {
                self.basis
                    .row(i)
                    .iter()
                    .map(|x| Rat::new(x.clone(), self.denom.clone()))
                    .collect()
            })
            .collect()
    }

    /// Integer coordinates of `v` in the canonical basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[Rat]) -> Option<Vec<Int>> {
        assert_eq!(v.len(), self.dim, "vector has wrong dimension");
        if self.rank() == 0 {
            return v.iter().all(Zero::is_zero).then(Vec::new);
        }
        // Solve basis^T * x = denom * v.
        let bt = self.basis.transpose().to_rational();
        let rhs: Vec<Rat> = v
            .iter()
            .map(|x| x * Rat::from_integer(self.denom.clone()))
            .collect();
        let x = bt.solve(&rhs)?;
        x.iter()
            .all(Rat::is_integer)
            .then(|| x.iter().map(Rat::to_integer).collect())
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn is_sublattice_of(&self, other: &Lattice) -> bool {
        self.basis().iter().all(|b| other.contains(b))
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim, "lattices live in different spaces");
        let dim = self.dim;
        if self.rank() == 0 || other.rank() == 0 {
            return Lattice::from_generators(dim, &[]);
        }
        let common = self.denom.lcm(&other.denom);
        let lift = |l: &Lattice| {
            let f = &common / &l.denom;
            l.basis.map(|x| x * &f)
        };
        let a = lift(self);
        let b = lift(other);
        let k1 = a.rows();
        let stacked = IntMatrix::from_fn(k1 + b.rows(), dim, |i, j| {
            if i < k1 {
                a[(i, j)].clone()
            } else {
                b[(i - k1, j)].clone()
            }
        });
        let ker = left_kernel(&stacked);
        let coeffs = ker.block(0, 0, ker.rows(), k1);
        let gens = &coeffs * &a;
        Self::from_scaled(dim, common, &gens)
    }

    /// `[sup : self]`; errors if `self` is not contained in `sup`.
    pub fn index_in(&self, sup: &Lattice) -> Result<LatticeIndex, Error> {
        assert_eq!(self.dim, sup.dim, "lattices live in different spaces");
        let coords: Option<Vec<Vec<Int>>> =
            self.basis().iter().map(|b| sup.coordinates(b)).collect();
        let coords = coords.ok_or(Error::NotSublattice)?;
        if self.rank() != sup.rank() {
            return Ok(LatticeIndex::Infinite);
        }
        if self.rank() == 0 {
            return Ok(LatticeIndex::Finite(Int::one()));
        }
        let m = IntMatrix::from_rows(coords);
        Ok(LatticeIndex::Finite(m.det().abs()))
    }
}

pub fn lattice_intersect(a: &Lattice, b: &Lattice) -> Lattice {
    a.intersect(b)
}

pub fn lattice_equal(a: &Lattice, b: &Lattice) -> bool {
    a == b
}

pub fn lattice_index(sub: &Lattice, sup: &Lattice) -> Result<LatticeIndex, Error> {
    sub.index_in(sup)
}
