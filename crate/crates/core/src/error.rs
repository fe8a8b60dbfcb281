//! Error types shared across the crate.

use std::fmt;

use thiserror::Error;

/// Which coordinate of a paired sample an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coord {
    X,
    Y,
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coord::X => write!(f, "x"),
            Coord::Y => write!(f, "y"),
        }
    }
}

/// Errors produced by estimators, moment formulas and test routines.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("sample too small: n = {n}, need n >= {min}")]
    SampleTooSmall { n: usize, min: usize },

    #[error("coordinate lengths differ: xs has {xs} values, ys has {ys}")]
    LengthMismatch { xs: usize, ys: usize },

    #[error("non-finite value in {coord} at row {row}")]
    NonFiniteValue { coord: Coord, row: usize },

    #[error("ties present in {coord}: value {value} occurs at rows {first} and {second}")]
    TiesPresent {
        coord: Coord,
        value: f64,
        first: usize,
        second: usize,
    },

    #[error("invalid neighbor count M = {m}: require 1 <= M <= n-1 with n = {n}")]
    InvalidM { m: usize, n: usize },

    #[error("exhaustive enumeration capped at n <= {max}, got n = {n}")]
    TooLarge { n: usize, max: usize },

    #[error("pair index out of range: (i, j) = ({i}, {j}) must lie in 1..={max} for n = {n}")]
    IndexOutOfRange {
        n: usize,
        i: usize,
        j: usize,
        max: usize,
    },

    #[error("degenerate correlation rho = {rho}: shape parameter requires |rho| < 1")]
    DegenerateCorrelation { rho: f64 },

    #[error("scale must be positive and finite, got {scale}")]
    InvalidScale { scale: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
