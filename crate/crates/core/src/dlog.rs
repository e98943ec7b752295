//! Discrete-log reduction for generalized Baumslag-Solitar groups.
//!
//! With `s = 1`, `M_l = (m_l)` and `x = q1`, `B / (1 - m1) B` is `Z / (m1 - 1)`
//! and `m1` acts trivially on it, so conjugacy reduces to finding
//! `t_2, .., t_k` with `m_2^t_2 .. m_k^t_k b ≡ b1 (mod m1 - 1)`.

use std::collections::HashMap;

use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::conjugacy::{Conjugator, CspInstance};
use crate::error::Error;
use crate::linalg::{Int, Rat};
use crate::membership::is_in_b;
use crate::words::sd_conjugate;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DlogInstance {
    pub modulus: u64,
    /// Residues of `m_2, .., m_k`.
    pub bases: Vec<u64>,
    pub source: u64,
    pub target: u64,
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

/// Multiplicative order of a unit `a` modulo `m` (1 when `m = 1`).
pub fn multiplicative_order(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    let mut x = a % m;
    let mut k = 1;
    while x != 1 {
        x = mul_mod(x, a, m);
        k += 1;
    }
    k
}

fn residue(v: &Rat, modulus: u64) -> Option<u64> {
    let m = Int::from(modulus);
    let num = v.numer().mod_floor(&m).to_u64()?;
    let den = v.denom().mod_floor(&m).to_u64()?;
    Some(mul_mod(num, inv_mod(den, modulus)?, modulus))
}

/// The genBS multipliers `m_1, .., m_k` of the instance's spec.
fn gen_bs_multipliers(inst: &CspInstance) -> Result<Vec<Int>, Error> {
    let spec = inst.spec();
    if spec.s() != 1 {
        return Err(Error::NotGenBs(format!("s = {}, expected 1", spec.s())));
    }
    spec.matrices()
        .iter()
        .enumerate()
        .map(|(l, m)| {
            let e = m[(0, 0)].clone();
            if e < Int::from(2) {
                Err(Error::NotGenBs(format!("m{} = {e} is below 2", l + 1)))
            } else {
                Ok(e)
            }
        })
        .collect()
}

pub fn bs_reduce(inst: &CspInstance) -> Result<DlogInstance, Error> {
    let ms = gen_bs_multipliers(inst)?;
    let q1: Vec<i64> = (0..ms.len()).map(|l| i64::from(l == 0)).collect();
    if inst.x() != q1.as_slice() {
        return Err(Error::XNotQ1);
    }
    let modulus = (&ms[0] - Int::one())
        .to_u64()
        .ok_or(Error::ModulusTooLarge)?;
    if modulus > u64::MAX / 2 {
        return Err(Error::ModulusTooLarge);
    }
    let mut bases = Vec::with_capacity(ms.len() - 1);
    for (l, m) in ms.iter().enumerate().skip(1) {
        let r = m
            .mod_floor(&Int::from(modulus))
            .to_u64()
            .expect("residue fits");
        if r.gcd(&modulus) != 1 && modulus != 1 {
            return Err(Error::NotCoprime { l: l + 1 });
        }
        bases.push(r);
    }
    // Denominators are products of the m_l, all units modulo m1 - 1.
    let source = residue(&inst.b()[0], modulus).expect("denominator is a unit");
    let target = residue(&inst.b1()[0], modulus).expect("denominator is a unit");
    Ok(DlogInstance {
        modulus,
        bases,
        source,
        target,
    })
}

/// Least `t >= 0` with `base^t * source ≡ target`, by baby-step/giant-step.
pub fn bsgs(modulus: u64, base: u64, source: u64, target: u64) -> Option<u64> {
    if modulus == 1 {
        return Some(0);
    }
    let (base, source, target) = (base % modulus, source % modulus, target % modulus);
    if base.gcd(&modulus) != 1 {
        // the orbit is not a cycle; walk it directly
        return exhaustive_dlog(modulus, base, source, target);
    }
    let step = (modulus as f64).sqrt().ceil() as u64 + 1;
    let mut table: HashMap<u64, u64> = HashMap::with_capacity(step as usize);
    let mut cur = source;
    for j in 0..step {
        table.entry(cur).or_insert(j);
        cur = mul_mod(cur, base, modulus);
    }
    let giant = inv_mod(pow_mod(base, step, modulus), modulus).expect("base is a unit");
    let mut cur = target;
    for i in 0..=step {
        if let Some(&j) = table.get(&cur) {
            return Some(i * step + j);
        }
        cur = mul_mod(cur, giant, modulus);
    }
    None
}

/// Exponents `t_2, .., t_k` solving the congruence. One base uses
/// [`bsgs`]; several bases use nested enumeration with each `t_l < cap`.
pub fn solve_congruence(inst: &DlogInstance, cap: u64) -> Option<Vec<u64>> {
    let m = inst.modulus;
    match inst.bases.as_slice() {
        [] => (inst.source % m == inst.target % m).then(Vec::new),
        [base] => bsgs(m, *base, inst.source, inst.target).map(|t| vec![t]),
        bases => {
            fn rec(
                bases: &[u64],
                m: u64,
                cur: u64,
                target: u64,
                cap: u64,
                out: &mut Vec<u64>,
            ) -> bool {
                let Some((&first, rest)) = bases.split_first() else {
                    return cur == target;
                };
                let mut v = cur;
                for t in 0..cap {
                    out.push(t);
                    if rec(rest, m, v, target, cap, out) {
                        return true;
                    }
                    out.pop();
                    v = mul_mod(v, first, m);
                }
                false
            }
            let mut out = Vec::new();
            rec(bases, m, inst.source % m, inst.target % m, cap, &mut out).then_some(out)
        }
    }
}

/// Exhaustive reference: least `t < modulus` with `base^t * source ≡ target`.
pub fn exhaustive_dlog(modulus: u64, base: u64, source: u64, target: u64) -> Option<u64> {
    let mut cur = source % modulus;
    for t in 0..modulus.max(1) {
        if cur == target % modulus {
            return Some(t);
        }
        cur = mul_mod(cur, base, modulus);
    }
    None
}

/// Conjugator via the congruence, lifting `t_2` by multiples of the order
/// of `m_2` until `c` lands in `B` (at most `lift_cap` attempts).
pub fn dlog_csp_solve(inst: &CspInstance, lift_cap: u64) -> Result<Option<Conjugator>, Error> {
    let dl = bs_reduce(inst)?;
    let Some(ts) = solve_congruence(&dl, dl.modulus.max(1)) else {
        return Ok(None);
    };
    let spec = inst.spec();
    let m1 = spec.matrices()[0][(0, 0)].clone();
    let step = dl
        .bases
        .first()
        .map_or(0, |&b| multiplicative_order(b, dl.modulus));
    for lift in 0..lift_cap.max(1) {
        let mut y = vec![0i64];
        for (i, &t) in ts.iter().enumerate() {
            let t = if i == 0 { t + lift * step } else { t };
            y.push(i64::try_from(t).map_err(|_| Error::ExponentOverflow(t.to_string()))?);
        }
        let moved = spec.action().act(&y, inst.b());
        let c = (&inst.b1()[0] - &moved[0]) / Rat::from_integer(Int::one() - &m1);
        let c = vec![c];
        if !is_in_b(&c, spec)?.is_member() {
            continue;
        }
        let conj = Conjugator { c, y };
        assert_eq!(
            sd_conjugate(spec, &conj.as_element(), inst.g()),
            *inst.g1(),
            "conjugator failed verification"
        );
        return Ok(Some(conj));
    }
    Ok(None)
}
