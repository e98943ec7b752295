//! Solving `N X = u` with `X ∈ B`, for `N` commuting with the action.
//!
//! With `D = Q N P` in Smith form (zero block first), `X = P Y` solves the
//! system iff `D_2 Y_2 = (Q u)_2` and the leading `s - r` entries of `Q u`
//! vanish. The kernel `{Y_2 = 0}` is invariant under every `P^-1 M_l P`, so
//! these are block upper triangular `[[A_l, S_l], [0, C_l]]`. A solution in
//! `B` exists iff `Y_2` lies in the `B` of the quotient action `{C_l}`; the
//! top block is then cleared by `Y_1 = -A^-1 S Y_2` where
//! `[[A, S], [0, C^k]] = P^-1 M^k P` for the membership witness `k`.

use std::fmt;

use num_traits::Zero;

use crate::error::Error;
use crate::linalg::{snf, to_rat_vec, Int, IntMatrix, Rat, RatMatrix, SnfResult};
use crate::membership::{action_membership, is_in_b, smallest_t, Verdict};
use crate::presentation::{floor_log2, GroupSpec, LinearAction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BSolveStatus {
    Solved,
    NoRationalSolution,
    RationalButNotInB,
    UNotInZd,
}

impl fmt::Display for BSolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BSolveStatus::Solved => "solved",
            BSolveStatus::NoRationalSolution => "no-rational-solution",
            BSolveStatus::RationalButNotInB => "rational-but-not-in-B",
            BSolveStatus::UNotInZd => "u-not-in-Zd",
        })
    }
}

/// Block decomposition of `P^-1 M^k P` for the reconstruction exponent `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blocks {
    pub k: u64,
    pub a: RatMatrix,
    pub s: RatMatrix,
    /// `C = C_1 ... C_n`, the quotient product.
    pub c: IntMatrix,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Diagnostics {
    /// Smith form with the zero block moved first.
    pub snf: Option<SnfResult>,
    pub rank: usize,
    pub v2: Option<Vec<Rat>>,
    /// Least `t_0` with `d^t_0 u` integral.
    pub t0: Option<u64>,
    /// Least `t` with `d^t v_2` integral.
    pub t: Option<u64>,
    /// `det D_2 = k_1 ... k_r`.
    pub det_d2: Option<Int>,
    pub blocks: Option<Blocks>,
    pub quotient_verdict: Option<Verdict>,
}

impl Diagnostics {
    /// `t <= t_0 + floor(log2 det D_2)`, vacuous when `t` is undefined.
    pub fn t_bound_holds(&self) -> bool {
        match (self.t, self.t0, &self.det_d2) {
            (Some(t), Some(t0), Some(det)) => t <= t0 + floor_log2(det),
            _ => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSolveOutcome {
    pub status: BSolveStatus,
    pub solution: Option<Vec<Rat>>,
    pub diagnostics: Diagnostics,
}

impl BSolveOutcome {
    fn negative(status: BSolveStatus, diagnostics: Diagnostics) -> Self {
        BSolveOutcome {
            status,
            solution: None,
            diagnostics,
        }
    }
}

fn check_system(n: &IntMatrix, u: &[Rat], spec: &GroupSpec) -> Result<(), Error> {
    let s = spec.s();
    if n.rows() != s || n.cols() != s {
        return Err(Error::SystemShape(s));
    }
    if u.len() != s {
        return Err(Error::DimensionMismatch {
            expected: s,
            got: u.len(),
        });
    }
    for (l, m) in spec.matrices().iter().enumerate() {
        if n * m != m * n {
            return Err(Error::SystemNotCommuting(l + 1));
        }
    }
    Ok(())
}

/// Smith form of `n` with the `s - r` zero positions moved to the front.
fn zero_first_snf(n: &IntMatrix) -> SnfResult {
    let base = snf(n);
    let s = n.rows();
    let r = base.rank;
    let perm: Vec<usize> = (r..s).chain(0..r).collect();
    let p = base.p.permute_cols(&perm);
    let q = base.q.permute_rows(&perm);
    let d = &(&q * n) * &p;
    SnfResult { d, p, q, rank: r }
}

fn trailing_factor_product(smith: &SnfResult) -> Int {
    let s = smith.d.rows();
    (s - smith.rank..s)
        .map(|i| smith.d[(i, i)].clone())
        .product()
}

pub fn solve_in_b(n: &IntMatrix, u: &[Rat], spec: &GroupSpec) -> Result<BSolveOutcome, Error> {
    check_system(n, u, spec)?;
    let s = spec.s();
    let mut diag = Diagnostics {
        t0: smallest_t(u, spec.d()),
        ..Default::default()
    };
    if diag.t0.is_none() {
        return Ok(BSolveOutcome::negative(BSolveStatus::UNotInZd, diag));
    }

    let smith = zero_first_snf(n);
    let r = smith.rank;
    let k0 = s - r;
    diag.rank = r;
    diag.det_d2 = Some(trailing_factor_product(&smith));
    let qu = smith.q.to_rational().mul_vec(u);
    diag.snf = Some(smith.clone());
    if qu[..k0].iter().any(|e| !e.is_zero()) {
        return Ok(BSolveOutcome::negative(
            BSolveStatus::NoRationalSolution,
            diag,
        ));
    }
    if r == 0 {
        // u = 0 here, and X = 0 is a solution in B.
        return Ok(BSolveOutcome {
            status: BSolveStatus::Solved,
            solution: Some(vec![Rat::zero(); s]),
            diagnostics: diag,
        });
    }

    let v2: Vec<Rat> = (0..r)
        .map(|i| &qu[k0 + i] / Rat::from_integer(smith.d[(k0 + i, k0 + i)].clone()))
        .collect();
    diag.t = smallest_t(&v2, spec.d());
    diag.v2 = Some(v2.clone());

    let p = smith.p.to_rational();
    let p_inv = p.inverse().expect("P is unimodular");
    let conj = |m: &RatMatrix| &(&p_inv * m) * &p;
    let c_mats: Vec<IntMatrix> = spec
        .matrices()
        .iter()
        .map(|m| {
            let full = conj(&m.to_rational());
            debug_assert!(full.block(k0, 0, r, k0).is_zero(), "kernel not invariant");
            full.block(k0, k0, r, r)
                .to_integer()
                .expect("P^-1 M_l P is integral")
        })
        .collect();
    let quotient = LinearAction::new(c_mats, spec.d().clone());
    let verdict = action_membership(&v2, &quotient);
    diag.quotient_verdict = Some(verdict.clone());
    let k = match verdict {
        Verdict::InB { witness, .. } => witness,
        _ => {
            return Ok(BSolveOutcome::negative(
                BSolveStatus::RationalButNotInB,
                diag,
            ))
        }
    };

    let mk = conj(&spec.action().product().to_rational().pow(k));
    let a = mk.block(0, 0, k0, k0);
    let s_block = mk.block(0, k0, k0, r);
    let v1 = if k0 == 0 {
        Vec::new()
    } else {
        let a_inv = a.inverse().expect("A is invertible");
        let sv2 = s_block.mul_vec(&v2);
        a_inv.mul_vec(&sv2).into_iter().map(|e| -e).collect()
    };
    diag.blocks = Some(Blocks {
        k,
        a,
        s: s_block,
        c: quotient.product().clone(),
    });

    let y: Vec<Rat> = v1.into_iter().chain(v2).collect();
    let v = p.mul_vec(&y);
    assert_eq!(
        n.to_rational().mul_vec(&v),
        u,
        "solution does not satisfy N v = u"
    );
    assert!(is_in_b(&v, spec)?.is_member(), "solution is not in B");
    Ok(BSolveOutcome {
        status: BSolveStatus::Solved,
        solution: Some(v),
        diagnostics: diag,
    })
}

/// Convenience for integral right-hand sides.
pub fn solve_in_b_int(n: &IntMatrix, u: &[Int], spec: &GroupSpec) -> Result<BSolveOutcome, Error> {
    solve_in_b(n, &to_rat_vec(u), spec)
}

/// `true` when `det D_2` respects the invariant-factor bound of `N`.
pub fn det_within_factor_bound(outcome: &BSolveOutcome, n: &IntMatrix) -> bool {
    outcome
        .diagnostics
        .det_d2
        .as_ref()
        .is_none_or(|det| det <= &crate::linalg::invariant_factor_bound(n))
}
