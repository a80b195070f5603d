use std::path::PathBuf;

use crate::basecases::BaseKey;
use crate::exactpoly::Polynomial;

/// Everything that can go wrong while loading data or evaluating counts.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("base table is missing {} key(s): {}", .0.len(), join_keys(.0))]
    MissingKey(Vec<BaseKey>),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("A1 entry at n={n} is {found}, expected {expected}")]
    A1Mismatch {
        n: u32,
        expected: Polynomial,
        found: Polynomial,
    },

    #[error("{context}: {poly} is not exactly divisible by {divisor}")]
    NonExactDivision {
        context: String,
        poly: Polynomial,
        divisor: i64,
    },

    #[error("bundle {0} is not a line bundle")]
    NotLineBundle(String),

    #[error("pairing mode {0} is not handled by this derivation")]
    UnsupportedMode(String),

    #[error("invalid key: {0}")]
    InvalidKey(String),

    #[error("d = {d} is below the validity bound {bound} for {target}")]
    BelowBound { target: String, d: i64, bound: u32 },

    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn join_keys(keys: &[BaseKey]) -> String {
    keys.iter()
        .map(|k| k.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
