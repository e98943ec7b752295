//! Deciding whether a rational vector lies in `B = ∪_j M^-j Z^s`.
//!
//! If `t` is least with `d^t v` integral, then `v ∈ B` iff `M^(t*alpha) v` is
//! integral. The exact `alpha` replaces the coarser `s * floor(log2 d)`.

use num_integer::Integer;
use num_traits::One;

use crate::error::Error;
use crate::linalg::{denominator_lcm, is_integral_vec, Int, Rat};
use crate::presentation::{floor_log2, GroupSpec, LinearAction};

/// Least `t >= 0` with `d^t v` integral, or `None` if no power of `d` clears
/// the denominators.
pub fn smallest_t(v: &[Rat], d: &Int) -> Option<u64> {
    let mut m = denominator_lcm(v);
    let original = m.clone();
    let mut t = 0u64;
    // m | d^t  iff  (m / g) | d^(t-1)  with g = gcd(m, d)
    while !m.is_one() {
        let g = m.gcd(d);
        if g.is_one() {
            return None;
        }
        m /= g;
        t += 1;
    }
    debug_assert!(Int::from(t) <= original);
    Some(t)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `M^witness v` is integral and `witness` is least with that property.
    InB {
        witness: u64,
        t: u64,
        /// `t * alpha`, the exponent actually tested.
        tested_exponent: u64,
        /// `t * s * floor(log2 d)`, the coarser general exponent.
        general_exponent: u64,
    },
    /// Some denominator has a prime factor not dividing `d`.
    NotInZd,
    /// `v ∈ Z[1/d]^s` but `M^(t*alpha) v` is not integral.
    FailsPowerTest { t: u64, tested_exponent: u64 },
}

impl Verdict {
    pub fn is_member(&self) -> bool {
        matches!(self, Verdict::InB { .. })
    }

    pub fn witness(&self) -> Option<u64> {
        match self {
            Verdict::InB { witness, .. } => Some(*witness),
            _ => None,
        }
    }
}

fn integral_after_power(action: &LinearAction, v: &[Rat], k: u64) -> bool {
    if k == 0 {
        return is_integral_vec(v);
    }
    let m = action.product().to_rational().pow(k);
    is_integral_vec(&m.mul_vec(v))
}

/// Membership in `∪_j M^-j Z^dim` for an arbitrary action (used both for the
/// group itself and for induced actions on quotients).
pub fn action_membership(v: &[Rat], action: &LinearAction) -> Verdict {
    let Some(t) = smallest_t(v, action.d()) else {
        return Verdict::NotInZd;
    };
    let general_exponent = t * action.dim() as u64 * floor_log2(action.d());
    let tested_exponent = t * action.alpha();
    if !integral_after_power(action, v, tested_exponent) {
        return Verdict::FailsPowerTest { t, tested_exponent };
    }
    // Integrality of M^k v is monotone in k.
    let (mut lo, mut hi) = (0u64, tested_exponent);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if integral_after_power(action, v, mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    debug_assert!(tested_exponent <= general_exponent);
    Verdict::InB {
        witness: lo,
        t,
        tested_exponent,
        general_exponent,
    }
}

pub fn is_in_b(v: &[Rat], spec: &GroupSpec) -> Result<Verdict, Error> {
    if v.len() != spec.s() {
        return Err(Error::DimensionMismatch {
            expected: spec.s(),
            got: v.len(),
        });
    }
    Ok(action_membership(v, spec.action()))
}

/// Test oracle: is `M^j v` integral for some `j <= j_max`?
pub fn brute_force_in_b(v: &[Rat], spec: &GroupSpec, j_max: u64) -> bool {
    let m = spec.action().product().to_rational();
    let mut w = v.to_vec();
    for j in 0..=j_max {
        if is_integral_vec(&w) {
            return true;
        }
        if j < j_max {
            w = m.mul_vec(&w);
        }
    }
    false
}
