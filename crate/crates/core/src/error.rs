use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed group spec: {0}")]
    MalformedSpec(String),
    #[error("matrix {index} is not {s}x{s}")]
    BadMatrixShape { index: usize, s: usize },
    #[error("matrix {index} has zero determinant")]
    SingularAction { index: usize },
    #[error("matrices {l} and {t} do not commute")]
    NonCommuting { l: usize, t: usize },

    #[error("syntax error at byte {pos}: {msg}")]
    WordSyntax { pos: usize, msg: String },
    #[error("generator {gen} is out of range for this group")]
    GeneratorOutOfRange { gen: String },
    #[error("exponent {0} is too large")]
    ExponentOverflow(String),

    #[error("vector has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vector is not in Z[1/d]^s")]
    NotInZd,
    #[error("vector is not in B")]
    NotInB,
    #[error("lattice is not contained in the given superlattice")]
    NotSublattice,

    #[error("system matrix does not commute with the action of q{0}")]
    SystemNotCommuting(usize),
    #[error("system matrix must be square of size {0}")]
    SystemShape(usize),

    #[error("elements have different Q-parts; not conjugate")]
    QPartsDiffer,
    #[error("N_x is singular")]
    SingularNx,
    #[error("x is the identity; no torsion bounds")]
    TrivialX,
    #[error("lattice chain did not stabilize within {0} steps")]
    NoStabilization(usize),

    #[error("not a generalized Baumslag-Solitar spec: {0}")]
    NotGenBs(String),
    #[error("reduction needs x = q1")]
    XNotQ1,
    #[error("m{l} is not coprime to 1 - m1")]
    NotCoprime { l: usize },
    #[error("modulus does not fit in 64 bits")]
    ModulusTooLarge,

    #[error("{0}")]
    Parse(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
