use crate::closed_form::VolumeSign;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("binomial({n}, {k}) is undefined: k > n")]
    Binomial { n: u64, k: u64 },

    #[error("invalid rational {input:?} at byte {position}: {reason}")]
    Parse {
        input: String,
        position: usize,
        reason: &'static str,
    },

    #[error("unsupported dimension d={d} ({sign}): {rule}")]
    UnsupportedDimension {
        d: usize,
        sign: VolumeSign,
        rule: &'static str,
    },

    #[error("{0}")]
    Domain(String),

    #[error("invalid auxiliary instance: {0}")]
    InvalidInstance(String),

    #[error("malformed structure: {0}")]
    Structural(String),

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
