#![allow(dead_code)]

use metacsp::linalg::{Int, IntMatrix, Rat, RatMatrix};
use metacsp::linsolver::BSolveStatus;
use metacsp::membership::{brute_force_in_b, smallest_t};
use metacsp::presentation::{parse_spec, GroupSpec};
use rand::Rng;

pub const EXALPHA: &str = include_str!("../../specs/exalpha.json");
pub const GENBS23: &str = include_str!("../../specs/genbs23.json");
pub const GENBS10_2: &str = include_str!("../../specs/genbs10_2.json");
pub const UNITRI11: &str = include_str!("../../specs/unitri11.json");

pub fn exalpha() -> GroupSpec {
    parse_spec(EXALPHA).unwrap()
}

pub fn genbs23() -> GroupSpec {
    parse_spec(GENBS23).unwrap()
}

pub fn genbs10_2() -> GroupSpec {
    parse_spec(GENBS10_2).unwrap()
}

pub fn unitri11() -> GroupSpec {
    parse_spec(UNITRI11).unwrap()
}

pub fn spec_path(name: &str) -> String {
    format!("{}/specs/{name}", env!("CARGO_MANIFEST_DIR"))
}

pub fn r(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn ri(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Diagonal spec with entries drawn from `{±1, .., ±6}`.
pub fn random_diagonal_spec<R: Rng>(rng: &mut R, n: usize, s: usize) -> GroupSpec {
    let mats = (0..n)
        .map(|_| {
            let diag: Vec<Int> = (0..s)
                .map(|_| {
                    let m = rng.gen_range(1i64..=6);
                    Int::from(if rng.gen_bool(0.2) { -m } else { m })
                })
                .collect();
            IntMatrix::diagonal(&diag)
        })
        .collect();
    GroupSpec::new(mats).unwrap()
}

/// Vector with entries `a / b`, `a ∈ [-9, 9]`, `b` drawn from `dens`.
pub fn random_fraction_vec<R: Rng>(rng: &mut R, s: usize, dens: &[i64]) -> Vec<Rat> {
    (0..s)
        .map(|_| r(rng.gen_range(-9..=9), dens[rng.gen_range(0..dens.len())]))
        .collect()
}

pub fn random_int_vec<R: Rng>(rng: &mut R, s: usize, bound: i64) -> Vec<Rat> {
    (0..s).map(|_| ri(rng.gen_range(-bound..=bound))).collect()
}

/// `X = M^-j w` with `j <= 2`, `w ∈ [-5, 5]^s`.
pub fn random_b_element<R: Rng>(rng: &mut R, spec: &GroupSpec) -> Vec<Rat> {
    let j = rng.gen_range(0..=2u64);
    let w = random_int_vec(rng, spec.s(), 5);
    spec.action().product_inverse().pow(j).mul_vec(&w)
}

/// `a_0 I + sum a_l M_l + b M_1 M_n` with coefficients in `[-2, 2]`; commutes
/// with every `M_l`.
pub fn random_commuting_matrix<R: Rng>(rng: &mut R, spec: &GroupSpec) -> IntMatrix {
    let s = spec.s();
    let mut acc = IntMatrix::identity(s).scale(&Int::from(rng.gen_range(-2i64..=2)));
    for m in spec.matrices() {
        acc = acc.add(&m.scale(&Int::from(rng.gen_range(-2i64..=2))));
    }
    let first = &spec.matrices()[0];
    let last = &spec.matrices()[spec.n() - 1];
    acc.add(&(first * last).scale(&Int::from(rng.gen_range(-1i64..=1))))
}

/// Independent expectation for the status of `N X = u`.
pub fn expected_status(n: &IntMatrix, u: &[Rat], spec: &GroupSpec) -> BSolveStatus {
    if smallest_t(u, spec.d()).is_none() {
        return BSolveStatus::UNotInZd;
    }
    let nr = n.to_rational();
    let aug = RatMatrix::from_fn(n.rows(), n.cols() + 1, |i, j| {
        if j < n.cols() {
            nr[(i, j)].clone()
        } else {
            u[i].clone()
        }
    });
    if aug.rank() > nr.rank() {
        return BSolveStatus::NoRationalSolution;
    }
    let x = nr
        .inverse()
        .expect("only called with nonsingular N here")
        .mul_vec(u);
    if brute_force_in_b(&x, spec, 64) {
        BSolveStatus::Solved
    } else {
        BSolveStatus::RationalButNotInB
    }
}
