//! Words in the generators, the collected normal form, and the semidirect
//! `(v, x)` representation of group elements.
//!
//! The normal form is `q_1^-a_1 .. q_n^-a_n b_1^c_1 .. b_s^c_s q_1^g_1 .. q_n^g_n`
//! with every `a_i >= 0`, and `M_i^-1 c` non-integral whenever `a_i > 0`.
//! It corresponds to `v = M_1^-a_1 .. M_n^-a_n c` and `x = g - a`.

use std::fmt;

use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::Error;
use crate::linalg::{
    is_integral_vec, to_int_vec, to_rat_vec, vec_add, vec_neg, zero_vec, Int, Rat,
};
use crate::membership::{is_in_b, Verdict};
use crate::presentation::GroupSpec;

/// Generator with a 0-based index; displayed 1-based (`q1`, `b1`, ..).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    Q(usize),
    B(usize),
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Q(i) => write!(f, "q{}", i + 1),
            Generator::B(j) => write!(f, "b{}", j + 1),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub gen: Generator,
    pub exp: Int,
}

/// Free word with nonzero exponents and no two adjacent letters sharing a
/// generator.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn identity() -> Self {
        Word::default()
    }

    /// Builds a word, merging adjacent powers of the same generator.
    pub fn from_letters(letters: impl IntoIterator<Item = (Generator, Int)>) -> Self {
        let mut out: Vec<Letter> = Vec::new();
        for (gen, exp) in letters {
            if exp.is_zero() {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.gen == gen => {
                    last.exp += exp;
                    if last.exp.is_zero() {
                        out.pop();
                    }
                }
                _ => out.push(Letter { gen, exp }),
            }
        }
        Word { letters: out }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Total absolute exponent, i.e. the length over the generators.
    pub fn length(&self) -> Int {
        self.letters.iter().map(|l| l.exp.abs()).sum()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(
            self.letters
                .iter()
                .chain(&other.letters)
                .map(|l| (l.gen, l.exp.clone())),
        )
    }

    pub fn inverse(&self) -> Word {
        Word::from_letters(self.letters.iter().rev().map(|l| (l.gen, -l.exp.clone())))
    }

    /// Fails if a generator index exceeds the spec's `n` or `s`.
    pub fn check_generators(&self, spec: &GroupSpec) -> Result<(), Error> {
        for l in &self.letters {
            let ok = match l.gen {
                Generator::Q(i) => i < spec.n(),
                Generator::B(j) => j < spec.s(),
            };
            if !ok {
                return Err(Error::GeneratorOutOfRange {
                    gen: l.gen.to_string(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            if l.exp == Int::from(1) {
                write!(f, "{}", l.gen)?;
            } else {
                write!(f, "{}^{}", l.gen, l.exp)?;
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::WordSyntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn uint(&mut self) -> Result<Int, Error> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let digits = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digits parse as an integer"))
    }
}

/// Parses `word := WS* (term (WS | "*")*)*`, `term := gen ("^" sint)?`,
/// `gen := ("q" | "b") uint`, `sint := "-"? uint`. Indices start at 1.
pub fn parse_word(text: &str) -> Result<Word, Error> {
    let mut cur = Cursor {
        bytes: text.as_bytes(),
        pos: 0,
    };
    let mut letters = Vec::new();
    loop {
        while cur
            .peek()
            .is_some_and(|c| c.is_ascii_whitespace() || c == b'*')
        {
            cur.pos += 1;
        }
        let Some(c) = cur.peek() else { break };
        let gen_pos = cur.pos;
        let is_q = match c {
            b'q' => true,
            b'b' => false,
            _ => return Err(cur.err(format!("unexpected character {:?}", c as char))),
        };
        cur.pos += 1;
        let index = cur.uint()?;
        let index = index
            .to_usize()
            .filter(|&i| i >= 1)
            .ok_or(Error::WordSyntax {
                pos: gen_pos,
                msg: "generator index must be a positive integer".into(),
            })?;
        let gen = if is_q {
            Generator::Q(index - 1)
        } else {
            Generator::B(index - 1)
        };
        let mut exp = Int::from(1);
        if cur.peek() == Some(b'^') {
            cur.pos += 1;
            let negative = cur.peek() == Some(b'-');
            if negative {
                cur.pos += 1;
            }
            exp = cur.uint()?;
            if negative {
                exp = -exp;
            }
        }
        letters.push((gen, exp));
    }
    Ok(Word::from_letters(letters))
}

/// Element `(v, x)`: `v ∈ Q^s` is the `B`-part and `x ∈ Z^n` the exponent
/// vector of the `Q`-part.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SemidirectElem {
    pub v: Vec<Rat>,
    pub x: Vec<i64>,
}

impl SemidirectElem {
    pub fn new(v: Vec<Rat>, x: Vec<i64>) -> Self {
        SemidirectElem { v, x }
    }

    pub fn identity(spec: &GroupSpec) -> Self {
        SemidirectElem {
            v: zero_vec(spec.s()),
            x: vec![0; spec.n()],
        }
    }

    pub fn is_identity(&self) -> bool {
        self.v.iter().all(Zero::is_zero) && self.x.iter().all(|&e| e == 0)
    }

    /// Element of `Q` alone.
    pub fn from_q(spec: &GroupSpec, x: Vec<i64>) -> Self {
        SemidirectElem {
            v: zero_vec(spec.s()),
            x,
        }
    }

    /// Element of `B` alone.
    pub fn from_b(spec: &GroupSpec, v: Vec<Rat>) -> Self {
        SemidirectElem {
            v,
            x: vec![0; spec.n()],
        }
    }
}

/// `(v, x)(w, y) = (v + M_x w, x + y)`.
pub fn sd_multiply(spec: &GroupSpec, g: &SemidirectElem, h: &SemidirectElem) -> SemidirectElem {
    let moved = spec.action().act(&g.x, &h.v);
    SemidirectElem {
        v: vec_add(&g.v, &moved),
        x: g.x.iter().zip(&h.x).map(|(a, b)| a + b).collect(),
    }
}

/// `(v, x)^-1 = (-M_{-x} v, -x)`.
pub fn sd_inverse(spec: &GroupSpec, g: &SemidirectElem) -> SemidirectElem {
    let neg_x: Vec<i64> = g.x.iter().map(|e| -e).collect();
    let moved = spec.action().act(&neg_x, &g.v);
    SemidirectElem {
        v: vec_neg(&moved),
        x: neg_x,
    }
}

/// `h g h^-1`.
pub fn sd_conjugate(spec: &GroupSpec, h: &SemidirectElem, g: &SemidirectElem) -> SemidirectElem {
    let hg = sd_multiply(spec, h, g);
    sd_multiply(spec, &hg, &sd_inverse(spec, h))
}

/// Collected word `q^-alpha b^beta q^gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub alpha: Vec<i64>,
    pub beta: Vec<Int>,
    pub gamma: Vec<i64>,
}

impl NormalForm {
    pub fn identity(spec: &GroupSpec) -> Self {
        NormalForm {
            alpha: vec![0; spec.n()],
            beta: vec![Int::zero(); spec.s()],
            gamma: vec![0; spec.n()],
        }
    }

    /// True when no `alpha_i` can be lowered without leaving integral `beta`.
    pub fn is_minimal(&self, spec: &GroupSpec) -> bool {
        let beta = to_rat_vec(&self.beta);
        (0..spec.n()).all(|i| {
            self.alpha[i] == 0 || !is_integral_vec(&spec.action().inverse(i).mul_vec(&beta))
        })
    }

    /// Lowers each `alpha_i` in turn (ascending `i`) while `M_i^-1 beta`
    /// stays integral. Once `M_i^-1 beta` is non-integral it stays so after
    /// later steps, so one pass reaches a minimal form.
    pub fn minimize(mut self, spec: &GroupSpec) -> Self {
        let mut beta = to_rat_vec(&self.beta);
        for i in 0..spec.n() {
            while self.alpha[i] > 0 {
                let lowered = spec.action().inverse(i).mul_vec(&beta);
                if !is_integral_vec(&lowered) {
                    break;
                }
                beta = lowered;
                self.alpha[i] -= 1;
                self.gamma[i] -= 1;
            }
        }
        self.beta = to_int_vec(&beta).expect("beta stays integral");
        debug_assert!(self.is_minimal(spec));
        self
    }

    pub fn to_word(&self) -> Word {
        let q_neg = self
            .alpha
            .iter()
            .enumerate()
            .map(|(i, &a)| (Generator::Q(i), Int::from(-a)));
        let b = self
            .beta
            .iter()
            .enumerate()
            .map(|(j, c)| (Generator::B(j), c.clone()));
        let q_pos = self
            .gamma
            .iter()
            .enumerate()
            .map(|(i, &g)| (Generator::Q(i), Int::from(g)));
        // Built letter by letter so that merging never crosses the three blocks.
        let mut letters: Vec<Letter> = Vec::new();
        for (gen, exp) in q_neg.chain(b).chain(q_pos) {
            if !exp.is_zero() {
                letters.push(Letter { gen, exp });
            }
        }
        Word::from_letters(letters.into_iter().map(|l| (l.gen, l.exp)))
    }

    /// `sum(alpha) + sum |beta| + sum |gamma|`.
    pub fn word_length(&self) -> Int {
        let a: i64 = self.alpha.iter().sum();
        let g: i64 = self.gamma.iter().map(|x| x.abs()).sum();
        Int::from(a) + Int::from(g) + self.beta.iter().map(Signed::abs).sum::<Int>()
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_word().fmt(f)
    }
}

fn q_exponent(exp: &Int) -> Result<i64, Error> {
    exp.to_i64()
        .filter(|e| e.checked_abs().is_some())
        .ok_or_else(|| Error::ExponentOverflow(exp.to_string()))
}

/// Semidirect representation of a word, multiplying letter by letter.
pub fn word_to_semidirect(w: &Word, spec: &GroupSpec) -> Result<SemidirectElem, Error> {
    w.check_generators(spec)?;
    let mut acc = SemidirectElem::identity(spec);
    for l in w.letters() {
        match l.gen {
            Generator::Q(i) => {
                let e = q_exponent(&l.exp)?;
                acc.x[i] = acc.x[i]
                    .checked_add(e)
                    .ok_or_else(|| Error::ExponentOverflow(l.exp.to_string()))?;
            }
            Generator::B(j) => {
                let mut unit = zero_vec(spec.s());
                unit[j] = Rat::from_integer(l.exp.clone());
                let moved = spec.action().act(&acc.x, &unit);
                acc.v = vec_add(&acc.v, &moved);
            }
        }
    }
    Ok(acc)
}

/// Collects a word into its minimal normal form.
pub fn collect(w: &Word, spec: &GroupSpec) -> Result<NormalForm, Error> {
    let g = word_to_semidirect(w, spec)?;
    from_semidirect(&g, spec)
}

/// `v = M_1^-a_1 .. M_n^-a_n beta`, `x = gamma - alpha`.
pub fn to_semidirect(nf: &NormalForm, spec: &GroupSpec) -> SemidirectElem {
    let neg_alpha: Vec<i64> = nf.alpha.iter().map(|a| -a).collect();
    let v = spec.action().act(&neg_alpha, &to_rat_vec(&nf.beta));
    let x = nf.gamma.iter().zip(&nf.alpha).map(|(g, a)| g - a).collect();
    SemidirectElem { v, x }
}

/// Normal form of `(v, x)`: start from the least `k` with `M^k v` integral,
/// take `alpha = (k, .., k)`, `beta = M^k v`, `gamma = alpha + x`, then minimize.
pub fn from_semidirect(g: &SemidirectElem, spec: &GroupSpec) -> Result<NormalForm, Error> {
    if g.x.len() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: spec.n(),
            got: g.x.len(),
        });
    }
    let k = match is_in_b(&g.v, spec)? {
        Verdict::InB { witness, .. } => witness,
        Verdict::NotInZd => return Err(Error::NotInZd),
        Verdict::FailsPowerTest { .. } => return Err(Error::NotInB),
    };
    let k = i64::try_from(k).map_err(|_| Error::ExponentOverflow(k.to_string()))?;
    let beta = spec
        .action()
        .product()
        .to_rational()
        .pow(k as u64)
        .mul_vec(&g.v);
    let alpha = vec![k; spec.n()];
    let gamma = g.x.iter().map(|x| x + k).collect();
    let nf = NormalForm {
        alpha,
        beta: to_int_vec(&beta).expect("membership witness clears denominators"),
        gamma,
    };
    Ok(nf.minimize(spec))
}
