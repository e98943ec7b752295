//! Group presentations `B ⋊ Q` given by pairwise-commuting integer matrices.
//!
//! `q_l` acts on `B ⊆ Q^s` by `M_l`. The derived constant `d` is the least
//! positive integer with `d * M_l^-1` integral for every `l`, so that
//! `B ⊆ Z[1/d]^s`. The stabilization exponent `alpha` is the first `j` with
//! `M^-j Z^s ∩ (1/d) Z^s = M^-(j+1) Z^s ∩ (1/d) Z^s`, `M = M_1 ... M_n`.

use std::sync::OnceLock;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::error::Error;
use crate::linalg::{Int, IntMatrix, Lattice, Rat, RatMatrix};

/// A family of commuting invertible integer matrices together with a common
/// denominator bound `d` for their inverses.
#[derive(Clone, Debug)]
pub struct LinearAction {
    mats: Vec<IntMatrix>,
    inverses: Vec<RatMatrix>,
    product: IntMatrix,
    product_inv: RatMatrix,
    d: Int,
    alpha: OnceLock<u64>,
}

impl LinearAction {
    /// Builds the action; `d` must clear the denominators of every inverse.
    /// Panics on singular input (callers validate first).
    pub fn new(mats: Vec<IntMatrix>, d: Int) -> Self {
        let dim = mats.first().map_or(0, IntMatrix::rows);
        let inverses: Vec<RatMatrix> = mats
            .iter()
            .map(|m| {
                m.to_rational()
                    .inverse()
                    .expect("action matrix must be invertible")
            })
            .collect();
        let product = mats
            .iter()
            .fold(IntMatrix::identity(dim), |acc, m| &acc * m);
        let product_inv = product
            .to_rational()
            .inverse()
            .expect("action matrix must be invertible");
        debug_assert!(inverses
            .iter()
            .all(|inv| inv.scale(&Rat::from_integer(d.clone())).is_integral()));
        LinearAction {
            mats,
            inverses,
            product,
            product_inv,
            d,
            alpha: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.product.rows()
    }

    pub fn count(&self) -> usize {
        self.mats.len()
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        &self.mats
    }

    pub fn matrix(&self, l: usize) -> &IntMatrix {
        &self.mats[l]
    }

    pub fn inverse(&self, l: usize) -> &RatMatrix {
        &self.inverses[l]
    }

    /// `M = M_1 ... M_n`.
    pub fn product(&self) -> &IntMatrix {
        &self.product
    }

    pub fn product_inverse(&self) -> &RatMatrix {
        &self.product_inv
    }

    pub fn d(&self) -> &Int {
        &self.d
    }

    /// Exact stabilization exponent, computed once.
    pub fn alpha(&self) -> u64 {
        *self.alpha.get_or_init(|| stabilization_exponent(self))
    }

    /// Matrix of the element with exponent vector `x`: `M_1^x_1 ... M_n^x_n`.
    pub fn element_matrix(&self, x: &[i64]) -> RatMatrix {
        assert_eq!(x.len(), self.count(), "exponent vector has wrong length");
        let dim = self.dim();
        let mut acc = RatMatrix::identity(dim);
        for (l, &e) in x.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let p = if e > 0 {
                self.mats[l].to_rational().pow(e as u64)
            } else {
                self.inverses[l].pow(e.unsigned_abs())
            };
            acc = &acc * &p;
        }
        acc
    }

    /// Applies `element_matrix(x)` to `v`.
    pub fn act(&self, x: &[i64], v: &[Rat]) -> Vec<Rat> {
        if x.iter().all(|&e| e == 0) {
            return v.to_vec();
        }
        self.element_matrix(x).mul_vec(v)
    }
}

/// General bound `s * floor(log2 d)` on `alpha` (0 for `d = 1`).
pub fn alpha_upper_bound(dim: usize, d: &Int) -> u64 {
    dim as u64 * floor_log2(d)
}

pub fn floor_log2(d: &Int) -> u64 {
    if d.is_zero() {
        0
    } else {
        d.bits() - 1
    }
}

fn stabilization_exponent(action: &LinearAction) -> u64 {
    let dim = action.dim();
    if action.d().is_one() {
        return 0;
    }
    let box_lattice = Lattice::scaled_integer(dim, action.d());
    let inv = action.product_inverse();
    let bound = alpha_upper_bound(dim, action.d());
    let mut power = RatMatrix::identity(dim);
    let mut current = Lattice::integer(dim).intersect(&box_lattice);
    let mut j = 0u64;
    loop {
        power = &power * inv;
        let next = Lattice::column_span(&power).intersect(&box_lattice);
        if next == current {
            assert!(j <= bound, "alpha = {j} exceeds the bound {bound}");
            return j;
        }
        current = next;
        j += 1;
    }
}

/// Validated presentation data.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    action: LinearAction,
    d_parts: Vec<Int>,
}

/// Structural classification of a spec.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    /// Every `M_l^-1` is integral (equivalently `d = 1`).
    pub polycyclic: bool,
    /// A common block split `(s1, s2)` putting every `M_l` in
    /// `[[I_s1, A], [0, I_s2]]`.
    pub unitriangular: Option<(usize, usize)>,
}

impl Classification {
    pub fn is_generic(&self) -> bool {
        self.unitriangular.is_none()
    }
}

impl GroupSpec {
    /// Validates the matrices and computes `d_l` and `d = lcm(d_l)`.
    pub fn new(mats: Vec<IntMatrix>) -> Result<Self, Error> {
        if mats.is_empty() {
            return Err(Error::MalformedSpec(
                "at least one q-generator is required".into(),
            ));
        }
        let s = mats[0].rows();
        if s == 0 {
            return Err(Error::MalformedSpec(
                "at least one b-generator is required".into(),
            ));
        }
        let mut d_parts = Vec::with_capacity(mats.len());
        for (i, m) in mats.iter().enumerate() {
            if m.rows() != s || m.cols() != s {
                return Err(Error::BadMatrixShape { index: i + 1, s });
            }
            let inv = m
                .to_rational()
                .inverse()
                .ok_or(Error::SingularAction { index: i + 1 })?;
            d_parts.push(inv.denominator_lcm());
        }
        for l in 0..mats.len() {
            for t in l + 1..mats.len() {
                if &mats[l] * &mats[t] != &mats[t] * &mats[l] {
                    return Err(Error::NonCommuting { l: l + 1, t: t + 1 });
                }
            }
        }
        let d = d_parts.iter().fold(Int::one(), |acc, x| acc.lcm(x));
        Ok(GroupSpec {
            action: LinearAction::new(mats, d),
            d_parts,
        })
    }

    /// Generalized Baumslag-Solitar group with `b^{q_l} = b^{m_l}`.
    pub fn gen_bs(ms: &[i64]) -> Result<Self, Error> {
        Self::new(ms.iter().map(|&m| IntMatrix::from_i64(&[&[m]])).collect())
    }

    pub fn n(&self) -> usize {
        self.action.count()
    }

    pub fn s(&self) -> usize {
        self.action.dim()
    }

    pub fn matrices(&self) -> &[IntMatrix] {
        self.action.matrices()
    }

    pub fn action(&self) -> &LinearAction {
        &self.action
    }

    pub fn d_parts(&self) -> &[Int] {
        &self.d_parts
    }

    pub fn d(&self) -> &Int {
        self.action.d()
    }

    pub fn alpha(&self) -> u64 {
        self.action.alpha()
    }

    pub fn classify(&self) -> Classification {
        classify(self)
    }

    pub fn to_json(&self) -> String {
        let mats: Vec<Vec<Vec<Value>>> = self
            .matrices()
            .iter()
            .map(|m| {
                m.to_rows()
                    .into_iter()
                    .map(|row| row.into_iter().map(int_to_json).collect())
                    .collect()
            })
            .collect();
        serde_json::json!({ "n": self.n(), "s": self.s(), "matrices": mats }).to_string()
    }
}

fn int_to_json(x: Int) -> Value {
    match i64::try_from(&x) {
        Ok(v) => Value::from(v),
        Err(_) => Value::from(x.to_string()),
    }
}

fn json_int(v: &Value) -> Option<Int> {
    match v {
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                Some(Int::from(i))
            } else {
                num.as_u64().map(Int::from)
            }
        }
        Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

/// Parses the JSON group-spec document `{"n": .., "s": .., "matrices": [..]}`.
/// Entries may be JSON integers or decimal strings for values beyond 64 bits.
pub fn parse_spec(text: &str) -> Result<GroupSpec, Error> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::MalformedSpec(e.to_string()))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::MalformedSpec("top level must be an object".into()))?;
    let field = |name: &str| {
        obj.get(name)
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::MalformedSpec(format!("missing or invalid `{name}`")))
    };
    let n = field("n")? as usize;
    let s = field("s")? as usize;
    let mats = obj
        .get("matrices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::MalformedSpec("missing or invalid `matrices`".into()))?;
    if mats.len() != n {
        return Err(Error::MalformedSpec(format!(
            "expected {n} matrices, found {}",
            mats.len()
        )));
    }
    let mut parsed = Vec::with_capacity(n);
    for (index, m) in mats.iter().enumerate() {
        let shape_err = || Error::BadMatrixShape {
            index: index + 1,
            s,
        };
        let rows = m.as_array().ok_or_else(shape_err)?;
        if rows.len() != s {
            return Err(shape_err());
        }
        let mut out = Vec::with_capacity(s);
        for row in rows {
            let row = row.as_array().ok_or_else(shape_err)?;
            if row.len() != s {
                return Err(shape_err());
            }
            let entries: Option<Vec<Int>> = row.iter().map(json_int).collect();
            out.push(entries.ok_or_else(|| {
                Error::MalformedSpec(format!("matrix {} has a non-integer entry", index + 1))
            })?);
        }
        parsed.push(IntMatrix::from_rows(out));
    }
    GroupSpec::new(parsed)
}

/// Least `alpha` at which the chain `M^-j Z^s ∩ (1/d) Z^s` stabilizes.
pub fn compute_alpha(spec: &GroupSpec) -> u64 {
    spec.alpha()
}

fn is_unitriangular_block(m: &IntMatrix, s1: usize) -> bool {
    let s = m.rows();
    (0..s).all(|i| {
        (0..s).all(|j| {
            let e = &m[(i, j)];
            let upper_right = i < s1 && j >= s1;
            if i == j {
                e.is_one()
            } else if upper_right {
                true
            } else {
                e.is_zero()
            }
        })
    })
}

pub fn classify(spec: &GroupSpec) -> Classification {
    let polycyclic = spec.d().is_one();
    let s = spec.s();
    let unitriangular = (0..=s)
        .find(|&s1| {
            spec.matrices()
                .iter()
                .all(|m| is_unitriangular_block(m, s1))
        })
        .map(|s1| (s1, s - s1));
    Classification {
        polycyclic,
        unitriangular,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXALPHA: &str = r#"{"n":3,"s":3,"matrices":[[[2,0,0],[0,1,0],[0,0,1]],[[1,0,0],[0,4,0],[0,0,1]],[[1,0,0],[0,1,0],[0,0,16]]]}"#;

    #[test]
    fn exalpha_constants() {
        let spec = parse_spec(EXALPHA).unwrap();
        assert_eq!(spec.d(), &Int::from(16));
        assert_eq!(spec.d_parts(), &[Int::from(2), Int::from(4), Int::from(16)]);
        assert_eq!(compute_alpha(&spec), 4);
        let c = classify(&spec);
        assert!(!c.polycyclic);
        assert!(c.is_generic());
    }

    #[test]
    fn identity_action() {
        let spec = parse_spec(r#"{"n":1,"s":1,"matrices":[[[1]]]}"#).unwrap();
        assert_eq!(spec.d(), &Int::one());
        assert_eq!(compute_alpha(&spec), 0);
    }

    #[test]
    fn gen_bs_2_3() {
        let spec = GroupSpec::gen_bs(&[2, 3]).unwrap();
        assert_eq!(spec.d_parts(), &[Int::from(2), Int::from(3)]);
        assert_eq!(spec.d(), &Int::from(6));
    }

    #[test]
    fn alpha_of_doubling() {
        let spec = GroupSpec::gen_bs(&[2]).unwrap();
        assert_eq!(compute_alpha(&spec), 1);
    }

    #[test]
    fn rejects_bad_documents() {
        assert!(matches!(parse_spec("[1]"), Err(Error::MalformedSpec(_))));
        assert!(matches!(
            parse_spec(r#"{"n":1,"s":2,"matrices":[[[1,0]]]}"#),
            Err(Error::BadMatrixShape { index: 1, s: 2 })
        ));
        assert!(matches!(
            parse_spec(r#"{"n":1,"s":2,"matrices":[[[1,2],[2,4]]]}"#),
            Err(Error::SingularAction { index: 1 })
        ));
        assert!(matches!(
            parse_spec(r#"{"n":2,"s":2,"matrices":[[[1,1],[0,1]],[[1,0],[1,1]]]}"#),
            Err(Error::NonCommuting { l: 1, t: 2 })
        ));
        assert!(matches!(
            parse_spec(r#"{"n":2,"s":1,"matrices":[[[2]]]}"#),
            Err(Error::MalformedSpec(_))
        ));
    }

    #[test]
    fn big_entries_as_strings() {
        let spec =
            parse_spec(r#"{"n":1,"s":1,"matrices":[[["100000000000000000000000"]]]}"#).unwrap();
        assert_eq!(spec.d().to_string(), "100000000000000000000000");
        let again = parse_spec(&spec.to_json()).unwrap();
        assert_eq!(again.matrices(), spec.matrices());
    }

    #[test]
    fn classification() {
        let uni = parse_spec(r#"{"n":2,"s":2,"matrices":[[[1,2],[0,1]],[[1,-3],[0,1]]]}"#).unwrap();
        let c = classify(&uni);
        assert_eq!(c.unitriangular, Some((1, 1)));
        assert!(c.polycyclic);

        let flip = GroupSpec::gen_bs(&[-1]).unwrap();
        let c = classify(&flip);
        assert!(c.polycyclic);
        assert_eq!(flip.d(), &Int::one());
        assert!(c.is_generic());
    }
}
