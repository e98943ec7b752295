//! Conjugacy search for `g = (b, x)` and `g1 = (b1, x)`.
//!
//! `(c, y) g (c, y)^-1 = (M_y b + N_x c, x)` with `N_x = I - M_x`, so a
//! conjugator is a `y` with `b1 - M_y b ∈ N_x B` together with a solution
//! `c ∈ B` of `N_x c = b1 - M_y b`. Candidates `y` are enumerated by
//! increasing l1-norm, lexicographically inside each shell.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::Error;
use crate::linalg::{
    ceil_sqrt, is_integral_vec, snf, vec_sub, zero_vec, Int, IntMatrix, Lattice, LatticeIndex, Rat,
    RatMatrix,
};
use crate::linsolver::{solve_in_b, BSolveStatus};
use crate::membership::{is_in_b, smallest_t, Verdict};
use crate::presentation::GroupSpec;
use crate::words::{from_semidirect, sd_conjugate, SemidirectElem};

#[derive(Clone, Debug)]
pub struct CspInstance {
    spec: GroupSpec,
    g: SemidirectElem,
    g1: SemidirectElem,
    len: u64,
    m_x: RatMatrix,
    n_x: RatMatrix,
    /// Least `e` with `d^e N_x` integral.
    scale_exp: u64,
    /// `d^e N_x`.
    n_scaled: IntMatrix,
}

fn require_member(v: &[Rat], spec: &GroupSpec) -> Result<(), Error> {
    match is_in_b(v, spec)? {
        Verdict::InB { .. } => Ok(()),
        Verdict::NotInZd => Err(Error::NotInZd),
        Verdict::FailsPowerTest { .. } => Err(Error::NotInB),
    }
}

impl CspInstance {
    pub fn new(spec: &GroupSpec, g: SemidirectElem, g1: SemidirectElem) -> Result<Self, Error> {
        for x in [&g.x, &g1.x] {
            if x.len() != spec.n() {
                return Err(Error::DimensionMismatch {
                    expected: spec.n(),
                    got: x.len(),
                });
            }
        }
        require_member(&g.v, spec)?;
        require_member(&g1.v, spec)?;
        if g.x != g1.x {
            return Err(Error::QPartsDiffer);
        }
        let len = g.x.iter().map(|e| e.unsigned_abs()).sum();
        let m_x = spec.action().element_matrix(&g.x);
        let n_x = RatMatrix::identity(spec.s()).sub(&m_x);
        let entries: Vec<Rat> = n_x.entries().cloned().collect();
        let scale_exp = smallest_t(&entries, spec.d()).expect("N_x has d-power denominators");
        let factor = Rat::from_integer(num_traits::pow(spec.d().clone(), scale_exp as usize));
        let n_scaled = n_x
            .scale(&factor)
            .to_integer()
            .expect("scaled N_x is integral");
        Ok(CspInstance {
            spec: spec.clone(),
            g,
            g1,
            len,
            m_x,
            n_x,
            scale_exp,
            n_scaled,
        })
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn g(&self) -> &SemidirectElem {
        &self.g
    }

    pub fn g1(&self) -> &SemidirectElem {
        &self.g1
    }

    pub fn b(&self) -> &[Rat] {
        &self.g.v
    }

    pub fn b1(&self) -> &[Rat] {
        &self.g1.v
    }

    pub fn x(&self) -> &[i64] {
        &self.g.x
    }

    /// l1-norm of `x`.
    pub fn x_len(&self) -> u64 {
        self.len
    }

    pub fn is_trivial_x(&self) -> bool {
        self.len == 0
    }

    pub fn m_x(&self) -> &RatMatrix {
        &self.m_x
    }

    pub fn n_x(&self) -> &RatMatrix {
        &self.n_x
    }

    pub fn scale_exp(&self) -> u64 {
        self.scale_exp
    }

    pub fn n_scaled(&self) -> &IntMatrix {
        &self.n_scaled
    }

    /// Some `c ∈ B` with `N_x c = u`, or `None` when `u ∉ N_x B`.
    pub fn quotient_solve(&self, u: &[Rat]) -> Result<Option<Vec<Rat>>, Error> {
        require_member(u, &self.spec)?;
        if self.is_trivial_x() {
            return Ok(u.iter().all(Zero::is_zero).then(|| zero_vec(self.spec.s())));
        }
        // R = M^alpha from the normal form of u makes R u integral.
        let nf = from_semidirect(&SemidirectElem::from_b(&self.spec, u.to_vec()), &self.spec)?;
        let r = self.spec.action().element_matrix(&nf.alpha);
        let ru = r.mul_vec(u);
        debug_assert!(is_integral_vec(&ru));
        let factor = Rat::from_integer(num_traits::pow(
            self.spec.d().clone(),
            self.scale_exp as usize,
        ));
        let rhs: Vec<Rat> = ru.iter().map(|e| e * &factor).collect();
        let out = solve_in_b(&self.n_scaled, &rhs, &self.spec)?;
        if out.status != BSolveStatus::Solved {
            return Ok(None);
        }
        let x1 = out.solution.expect("solved outcome carries a solution");
        let r_inv = self
            .spec
            .action()
            .element_matrix(&nf.alpha.iter().map(|a| -a).collect::<Vec<_>>());
        let c = r_inv.mul_vec(&x1);
        debug_assert_eq!(self.n_x.mul_vec(&c), u);
        Ok(Some(c))
    }

    /// `b - b' ∈ N_x B`.
    pub fn quotient_equal(&self, b: &[Rat], b_prime: &[Rat]) -> Result<bool, Error> {
        Ok(self.quotient_solve(&vec_sub(b, b_prime))?.is_some())
    }

    fn candidate(&self, y: &[i64]) -> Result<Option<Conjugator>, Error> {
        let moved = self.spec.action().act(y, self.b());
        let target = vec_sub(self.b1(), &moved);
        let Some(c) = self.quotient_solve(&target)? else {
            return Ok(None);
        };
        let conj = Conjugator { c, y: y.to_vec() };
        assert_eq!(
            sd_conjugate(&self.spec, &conj.as_element(), &self.g),
            self.g1,
            "conjugator failed verification"
        );
        Ok(Some(conj))
    }
}

pub fn quotient_equal(b: &[Rat], b_prime: &[Rat], inst: &CspInstance) -> Result<bool, Error> {
    inst.quotient_equal(b, b_prime)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conjugator {
    pub c: Vec<Rat>,
    pub y: Vec<i64>,
}

impl Conjugator {
    pub fn as_element(&self) -> SemidirectElem {
        SemidirectElem::new(self.c.clone(), self.y.clone())
    }

    pub fn y_len(&self) -> u64 {
        self.y.iter().map(|e| e.unsigned_abs()).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CspOutcome {
    Found(Conjugator),
    NotFound { max_len: u64 },
}

impl CspOutcome {
    pub fn conjugator(&self) -> Option<&Conjugator> {
        match self {
            CspOutcome::Found(c) => Some(c),
            CspOutcome::NotFound { .. } => None,
        }
    }
}

/// Vectors in `Z^n` with l1-norm exactly `len`, in lexicographic order.
pub fn shell(n: usize, len: u64) -> Vec<Vec<i64>> {
    fn rec(n: usize, left: i64, prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if n == 1 {
            for e in [-left, left] {
                prefix.push(e);
                out.push(prefix.clone());
                prefix.pop();
                if left == 0 {
                    break;
                }
            }
            return;
        }
        for e in -left..=left {
            prefix.push(e);
            rec(n - 1, left - e.abs(), prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if len == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, len as i64, &mut Vec::with_capacity(n), &mut out);
    out
}

/// All vectors in `Z^m` with l1-norm below `index`.
pub fn coset_reps(m: usize, index: u64) -> Vec<Vec<i64>> {
    (0..index).flat_map(|len| shell(m, len)).collect()
}

pub fn csp_solve(inst: &CspInstance, max_len: u64) -> Result<CspOutcome, Error> {
    for len in 0..=max_len {
        for y in shell(inst.spec.n(), len) {
            if let Some(conj) = inst.candidate(&y)? {
                return Ok(CspOutcome::Found(conj));
            }
        }
    }
    Ok(CspOutcome::NotFound { max_len })
}

/// Same result as [`csp_solve`]; each shell is searched on `threads` workers
/// and the lexicographically first success in the lowest shell wins.
pub fn csp_solve_parallel(
    inst: &CspInstance,
    max_len: u64,
    threads: usize,
) -> Result<CspOutcome, Error> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Parse(e.to_string()))?;
    pool.install(|| {
        for len in 0..=max_len {
            let hit = shell(inst.spec.n(), len)
                .par_iter()
                .map(|y| inst.candidate(y))
                .find_first(|r| !matches!(r, Ok(None)));
            match hit {
                Some(Ok(Some(conj))) => return Ok(CspOutcome::Found(conj)),
                Some(Err(e)) => return Err(e),
                _ => {}
            }
        }
        Ok(CspOutcome::NotFound { max_len })
    })
}

/// `y` up to `max_len` with `M_y b ≡ b (mod N_x B)`.
pub fn stabilizer_probe(inst: &CspInstance, max_len: u64) -> Result<Vec<Vec<i64>>, Error> {
    let mut out = Vec::new();
    for len in 0..=max_len {
        for y in shell(inst.spec.n(), len) {
            let moved = inst.spec.action().act(&y, inst.b());
            if inst.quotient_equal(&moved, inst.b())? {
                out.push(y);
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionBounds {
    /// `ceil(sqrt(s) d^(L s) (a+1)^s)`.
    pub exp_bound: Int,
    /// `ceil(sqrt(s)^s d^(L s^2) (a+1)^(s^2))`.
    pub order_bound: Int,
    /// `ceil((sqrt(s) d s mu + sqrt(s) d)^(s^2))`.
    pub k: Int,
    /// `ceil(sqrt(s) (2 mu_A)^(s^2)) * L^(s^2)` for unitriangular specs.
    pub gamma_bound: Option<Int>,
}

impl TorsionBounds {
    /// `K^L`.
    pub fn k_power(&self, len: u64) -> Int {
        num_traits::pow(self.k.clone(), len as usize)
    }
}

/// `ceil(sqrt(x))` for a non-negative rational.
fn ceil_sqrt_rat(x: &Rat) -> Int {
    ceil_sqrt(&x.ceil().to_integer())
}

pub fn torsion_bounds(inst: &CspInstance) -> Result<TorsionBounds, Error> {
    if inst.is_trivial_x() {
        return Err(Error::TrivialX);
    }
    let spec = &inst.spec;
    let s = spec.s();
    let s_int = Int::from(s);
    let d = spec.d().clone();
    let len = inst.len as usize;
    let a = inst
        .m_x
        .entries()
        .map(Signed::abs)
        .max()
        .unwrap_or_else(Rat::zero);
    let a1 = a + Rat::one();
    let d_rat = Rat::from_integer(d.clone());

    let e_inner = num_traits::pow(d_rat.clone(), len * s) * num_traits::pow(a1.clone(), s);
    let exp_bound = ceil_sqrt_rat(&(Rat::from_integer(s_int.clone()) * &e_inner * &e_inner));

    let o_inner = num_traits::pow(d_rat, len * s * s) * num_traits::pow(a1, s * s);
    let s_pow = Rat::from_integer(num_traits::pow(s_int.clone(), s));
    let order_bound = ceil_sqrt_rat(&(s_pow * &o_inner * &o_inner));

    let mu = spec
        .matrices()
        .iter()
        .map(IntMatrix::max_abs)
        .max()
        .unwrap_or_else(Int::zero);
    // (sqrt(s) d (s mu + 1))^(s^2) = sqrt(s^(s^2) (d (s mu + 1))^(2 s^2))
    let base = &d * (&s_int * &mu + Int::one());
    let k = ceil_sqrt(&(num_traits::pow(s_int.clone(), s * s) * num_traits::pow(base, 2 * s * s)));

    let gamma_bound = spec.classify().unitriangular.map(|(s1, s2)| {
        let mu_a = spec
            .matrices()
            .iter()
            .map(|m| m.block(0, s1, s1, s2).max_abs())
            .max()
            .unwrap_or_else(Int::zero)
            .max(Int::one());
        let two_mu = Int::from(2) * mu_a;
        let k_gamma = ceil_sqrt(&(s_int.clone() * num_traits::pow(two_mu, 2 * s * s)));
        k_gamma * num_traits::pow(Int::from(inst.len), s * s)
    });

    Ok(TorsionBounds {
        exp_bound,
        order_bound,
        k,
        gamma_bound,
    })
}

/// Exact order of the torsion subgroup of `B / N_x B`.
///
/// For nonsingular `N_x` the quotient is finite and equals
/// `Z^s / (Z^s ∩ N_x B)`, with `Z^s ∩ N_x B = N_x (Λ ∩ B)` and
/// `Λ = N_x^-1 Z^s`. Every `v ∈ Λ ∩ B` has `d^T v` integral where `T` is
/// fixed by the denominator of `Λ`, so `Λ ∩ B = Λ ∩ M^-(T alpha) Z^s`.
/// `max_exponent` caps `T alpha`. For singular `N_x` only `d = 1` is handled,
/// where the torsion is the product of the nonzero invariant factors.
pub fn torsion_brute_force(inst: &CspInstance, max_exponent: usize) -> Result<Int, Error> {
    if inst.is_trivial_x() {
        return Err(Error::TrivialX);
    }
    let spec = &inst.spec;
    let s = spec.s();
    let Some(n_inv) = inst.n_x.inverse() else {
        if spec.d().is_one() {
            return Ok(snf(&inst.n_scaled).factor_product());
        }
        return Err(Error::SingularNx);
    };
    let lambda = Lattice::column_span(&n_inv);
    let mut t = 0u64;
    let mut den = lambda.denom().clone();
    loop {
        let g = num_integer::Integer::gcd(&den, spec.d());
        if g.is_one() {
            break;
        }
        den /= g;
        t += 1;
    }
    let j = t * spec.alpha();
    if j > max_exponent as u64 {
        return Err(Error::NoStabilization(max_exponent));
    }
    let mj = spec.action().product_inverse().pow(j);
    let stable = lambda.intersect(&Lattice::column_span(&mj));
    let image: Vec<Vec<Rat>> = stable.basis().iter().map(|v| inst.n_x.mul_vec(v)).collect();
    let sub = Lattice::from_generators(s, &image);
    match sub.index_in(&Lattice::integer(s))? {
        LatticeIndex::Finite(k) => Ok(k),
        LatticeIndex::Infinite => unreachable!("nonsingular N_x has full-rank image"),
    }
}

/// Exhaustive cross-check of [`torsion_brute_force`] for small `d = 1`
/// instances: counts classes of `Z^s / N_x Z^s` within the box `[0, k)^s`.
pub fn torsion_by_enumeration(inst: &CspInstance, k: i64) -> Result<Int, Error> {
    if !inst.spec.d().is_one() {
        return Err(Error::NotInB);
    }
    let s = inst.spec.s();
    let mut reps: Vec<Vec<Rat>> = Vec::new();
    let mut point = vec![0i64; s];
    loop {
        let v: Vec<Rat> = point
            .iter()
            .map(|&e| Rat::from_integer(Int::from(e)))
            .collect();
        let mut fresh = true;
        for r in &reps {
            if inst.quotient_equal(&v, r)? {
                fresh = false;
                break;
            }
        }
        if fresh {
            reps.push(v);
        }
        let mut i = 0;
        loop {
            if i == s {
                return Ok(Int::from(reps.len()));
            }
            point[i] += 1;
            if point[i] < k {
                break;
            }
            point[i] = 0;
            i += 1;
        }
    }
}
