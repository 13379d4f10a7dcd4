//! Truncated series in several non-commuting variables.

mod gl;
mod series;
mod word;

use thiserror::Error;

use crate::ring::RingError;

pub use gl::gl_change_of_vars;
pub use series::{geometric, geometric_with_limits, NCSeries};
pub use word::{Word, MAX_WORD_LEN};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NcError {
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("series differ in variable count or coefficient ring")]
    ShapeMismatch,
    #[error("constant term {0} is not invertible")]
    NonInvertibleConstantTerm(u32),
    #[error("constant term must be 1, got {0}")]
    BadConstantTerm(u32),
    #[error("operation needs coefficients in F_p")]
    NotField,
    #[error("no convergence after {0} iterations")]
    NonConvergence(usize),
    #[error("inverse failed its round-trip check")]
    RoundTrip,
    #[error("matrix is singular over F_p")]
    SingularMatrix,
    #[error("matrix must be {0}x{0}")]
    MatrixShape(usize),
    #[error("{what} = {value} exceeds the limit {limit}")]
    LimitExceeded { what: &'static str, value: usize, limit: usize },
    #[error("word of length {word} leaves nothing of order {order}")]
    OrderExhausted { word: usize, order: usize },
}

/// Size caps for NC series; the default keeps `k ≤ 4` and `N ≤ 10`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NcLimits {
    pub max_vars: usize,
    pub max_order: usize,
}

impl Default for NcLimits {
    fn default() -> Self {
        NcLimits { max_vars: 4, max_order: 10 }
    }
}

impl NcLimits {
    /// Longest order the packed words can carry at all.
    pub const fn extended() -> Self {
        NcLimits { max_vars: 4, max_order: MAX_WORD_LEN + 1 }
    }

    pub fn check(&self, k: usize, order: usize) -> Result<(), NcError> {
        let vars_limit = self.max_vars.min(4);
        if k == 0 || k > vars_limit {
            return Err(NcError::LimitExceeded { what: "variable count", value: k, limit: vars_limit });
        }
        let order_limit = self.max_order.min(MAX_WORD_LEN + 1);
        if order == 0 || order > order_limit {
            return Err(NcError::LimitExceeded { what: "order", value: order, limit: order_limit });
        }
        Ok(())
    }
}
