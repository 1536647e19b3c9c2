use thiserror::Error;

use crate::Rational;

/// Errors raised by the analysis library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid market: {0}")]
    InvalidMarket(&'static str),
    #[error("value {value} is not in the market")]
    UnknownValue { value: Rational },
    #[error("coalition has no consumers")]
    EmptyCoalition,
    #[error("negative mass at value index {index}")]
    NegativeMass { index: usize },
    #[error("negative scale factor")]
    NegativeScale,
    #[error("operands belong to different markets")]
    MarketMismatch,
    #[error("mass vector has {found} entries, market has {expected} values")]
    LengthMismatch { expected: usize, found: usize },
    #[error("price {price} is not optimal for the coalition")]
    PriceNotOptimal { price: Rational },
    #[error("segment coalitions do not sum to the market mass at value index {index}")]
    PartitionViolated { index: usize },
    #[error("segmentation has no segments")]
    EmptySegmentation,
    #[error(
        "transport plan marginals do not match at {side} segment {segment}, value index {index}"
    )]
    PlanMarginal {
        side: &'static str,
        segment: usize,
        index: usize,
    },
    #[error("transport plan has the wrong shape")]
    PlanShape,
    #[error("index {index} out of range (length {len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("operation not applicable: {0}")]
    NotApplicable(&'static str),
    #[error("expected {expected} values, market has {found}")]
    WrongArity { expected: usize, found: usize },
    #[error("the core of this market is empty")]
    EmptyCore,
    #[error("precondition for blocking fails: {0}")]
    NotBlocking(&'static str),
    #[error("malformed chain at step {step}: {reason}")]
    MalformedChain { step: usize, reason: &'static str },
    #[error("{atoms} atoms exceed the enumeration cap of {cap}")]
    CapExceeded { atoms: usize, cap: usize },
    #[error("price is not optimal for the atom set")]
    InvalidSegment,
    #[error("masses are not representable on the atom grid")]
    NotAtomizable,
}

pub type Result<T> = core::result::Result<T, Error>;
