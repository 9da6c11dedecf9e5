use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: i64, m: u64 },

    #[error("value out of supported range: {0}")]
    OutOfRange(String),

    #[error("{0} is not an odd prime")]
    NotPrime(u64),

    #[error("summation budget exceeded: {needed} terms requested, budget is {budget}")]
    BudgetExceeded { needed: u64, budget: u64 },

    #[error("character modulus {character} does not divide sum modulus {modulus}")]
    ModulusMismatch { character: u64, modulus: u64 },

    #[error("operation requires a non-principal character")]
    PrincipalCharacter,

    #[error("{p} shares a factor with modulus {modulus}")]
    SharedFactor { p: u64, modulus: u64 },

    #[error("{v} is not a unit modulo {m}")]
    NotUnit { v: i64, m: u64 },

    #[error("inconsistent parameters: {0}")]
    ParameterInconsistency(String),

    #[error("quadrature did not converge: {0}")]
    QuadratureNonConvergence(String),

    #[error("bound problem is infeasible")]
    Infeasible,

    #[error("bound problem is unbounded below")]
    Unbounded,

    #[error("staged elimination could not pair the forms: {0}")]
    ShapeMismatch(String),

    #[error("point violates constraint {0}")]
    InfeasiblePoint(usize),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
