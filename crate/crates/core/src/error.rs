use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The factorization budget ran out before `cofactor` was split.
    #[error("factorization effort exceeded on cofactor {cofactor}")]
    EffortExceeded { cofactor: BigUint },

    #[error("{left} and {right} are not coprime")]
    NotCoprime { left: BigUint, right: BigUint },

    /// `level_via_orders` was asked about a base that shares a factor with L(n).
    #[error("base {base} is not coprime to L({modulus}) = {big_l}")]
    NotCoprimeToL { base: BigUint, modulus: BigUint, big_l: BigUint },

    #[error("naive oracle infeasible: {0}")]
    OracleInfeasible(String),

    #[error("no j <= {cap} with {prime} | ord_{{{prime}^j}}({base})")]
    MNotFound { base: BigUint, prime: BigUint, cap: u32 },

    #[error("no discrete logarithm exists")]
    NoSolution,

    #[error("{what} too large: {size} exceeds cap {cap}")]
    TooLarge { what: &'static str, size: BigUint, cap: BigUint },

    /// A cofactor resisted both splitting and primality testing.
    #[error("unresolved composite cofactor {cofactor}")]
    Unresolved { cofactor: BigUint },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two routes that must agree did not. Always a bug.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn not_coprime(left: impl Into<BigUint>, right: impl Into<BigUint>) -> Self {
        Error::NotCoprime { left: left.into(), right: right.into() }
    }

    /// True for errors that signal an exhausted budget rather than a domain violation.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::EffortExceeded { .. } | Error::TooLarge { .. } | Error::OracleInfeasible(_)
        )
    }
}
