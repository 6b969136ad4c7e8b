//! Error types shared across the synthesis, simulation, and reporting layers.

use crate::ir::{Metric, RoundLabel, Variant};
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// A register width of zero was requested.
    #[error("register width must be at least 1")]
    ZeroWidth,

    /// The (modulus, addend) pair does not describe a valid problem instance.
    #[error("invalid instance for n={n}: modulus={modulus}, addend={addend}")]
    InvalidInstance {
        /// Register width.
        n: usize,
        /// Offending modulus, rendered in decimal.
        modulus: String,
        /// Offending addend, rendered in decimal.
        addend: String,
    },

    /// A classical constant does not fit in the targeted register.
    #[error("constant {value} does not fit in {n} bits")]
    ConstantOutOfRange {
        /// Register width.
        n: usize,
        /// Offending constant, rendered in decimal.
        value: String,
    },

    /// A primitive-gate depth metric was requested on a circuit that still
    /// contains block-level Toffoli variants.
    #[error("metric {metric:?} is undefined while block-level Toffoli variants remain; lower the circuit first")]
    BlockLevelDepth {
        /// The rejected metric.
        metric: Metric,
    },

    /// A simulation was requested on a circuit wider than the backend allows.
    #[error("circuit uses {got} wires but this backend supports at most {max}")]
    WireBudget {
        /// Backend wire limit.
        max: usize,
        /// Requested wire count.
        got: usize,
    },

    /// The variant has no standalone matrix (it only exists as half of a
    /// two-part lowering).
    #[error("variant {0:?} has no standalone matrix")]
    NoVariantMatrix(Variant),

    /// A block was constructed with the wrong number of wires for its kind.
    #[error("block kind {kind} expects {want} wires, got {got}")]
    WrongArity {
        /// Human-readable kind name.
        kind: String,
        /// Expected wire count.
        want: usize,
        /// Actual wire count.
        got: usize,
    },

    /// A relative-phase variant was placed where its phase would be
    /// observable.
    #[error("variant {variant:?} is not phase-safe in round {round}")]
    PhaseSafety {
        /// Offending variant.
        variant: Variant,
        /// Round in which it was placed.
        round: RoundLabel,
    },

    /// The strategy exists only as a closed-form cost model and cannot be
    /// lowered to gates.
    #[error("strategy {0} is a cost model only and cannot be synthesized")]
    ModelOnlyStrategy(String),

    /// The monomial simulator encountered a state it cannot represent.
    #[error("state is not a phase-tagged basis state: {0}")]
    NonMonomial(String),

    /// A T-gate scheduling width of zero was requested.
    #[error("T-gate width must be at least 1")]
    ZeroTWidth,

    /// An uncompute block did not match the most recent held compute block.
    #[error("held uncompute does not match the most recent held compute block")]
    HeldMismatch,

    /// A circuit file could not be parsed.
    #[error("parse error on line {line}: {reason}")]
    Parse {
        /// 1-based line number.
        line: usize,
        /// What went wrong.
        reason: String,
    },

    /// An I/O error, wrapped.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
