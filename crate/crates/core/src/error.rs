use thiserror::Error;

use crate::fndsl::{EvalError, ParseError};
use crate::interval::Interval;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arithmetic overflow: {0}")]
    Overflow(&'static str),

    #[error("zero is not a natural number here")]
    Zero,

    #[error("invalid interval [{a}, {b}]: need 1 <= a <= b")]
    InvalidInterval { a: u64, b: u64 },

    #[error("invalid rational {0:?}")]
    InvalidRational(String),

    #[error("parameter {name} = {value} out of range: {expected}")]
    OutOfRange {
        name: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("query at {n} lies beyond the set's known window (ends at {horizon})")]
    BeyondHorizon { n: u64, horizon: u64 },

    #[error("intervals not disjoint: {0} and {1}")]
    NotDisjoint(Interval, Interval),

    #[error("{interval} is not an m-interval for m = {m}")]
    NotMInterval { interval: Interval, m: String },

    #[error("{interval} is not a +p-interval for p = {p}")]
    NotPlusInterval { interval: Interval, p: String },

    #[error("target {target} is not covered by the images of the intervals (first gap at {missing})")]
    NotCovered { target: Interval, missing: u64 },

    #[error("map {map} is not injective: {first} and {second} both map to {value}")]
    NotInjective {
        map: String,
        first: u64,
        second: u64,
        value: u64,
    },

    #[error("map {0} declares no reach bound; an explicit domain scan bound is required")]
    MissingScanBound(String),

    #[error("map {0} offers neither a structured preimage nor a reach bound")]
    NoPreimage(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("witness rejected: {0}")]
    BadWitness(String),

    #[error("guarantee violated: {0}")]
    Guarantee(String),

    #[error("set specification {spec:?}: {reason}")]
    SetSpec { spec: String, reason: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
