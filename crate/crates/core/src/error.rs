use alloc::vec::Vec;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("site ({m}, {n}) outside the {l}x{l} lattice")]
    SiteOutOfBounds { m: i64, n: i64, l: usize },

    #[error("flat index {index} outside a lattice of {sites} sites")]
    IndexOutOfBounds { index: usize, sites: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },

    #[error("flux denominator must be nonzero")]
    ZeroDenominator,

    #[error("state dimension {found} does not match lattice size {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("wave packet {index} is linearly dependent on the preceding packets")]
    LinearlyDependentPackets { index: usize },

    #[error("non-finite derivative at t = {time}")]
    NonFinite { time: f64 },

    #[error("trace drift {drift:e} exceeds bound {bound:e} at t = {time}")]
    TraceDrift { time: f64, drift: f64, bound: f64 },

    #[error("ambiguous edge localization at {} crossing(s), k_y = {ky:?}", ky.len())]
    AmbiguousLocalization { ky: Vec<f64> },
}

pub type Result<T> = core::result::Result<T, Error>;
