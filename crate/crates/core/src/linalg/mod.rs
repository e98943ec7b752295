//! Exact integer and rational linear algebra.

mod hnf;
mod lattice;
mod matrix;
mod snf;

pub use hnf::{hnf, left_kernel};
pub use lattice::{lattice_equal, lattice_index, lattice_intersect, Lattice, LatticeIndex};
pub use matrix::{
    denominator_lcm, is_integral_vec, mat_pow, to_int_vec, to_rat_vec, vec_add, vec_neg, vec_scale,
    vec_sub, zero_vec, Int, IntMatrix, Matrix, Rat, RatMatrix,
};
pub(crate) use snf::ceil_sqrt;
pub use snf::{invariant_factor_bound, rank, size_based_factor_bound, snf, SnfResult};
