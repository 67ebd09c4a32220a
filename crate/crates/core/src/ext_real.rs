//! Extended reals `ℝ ∪ {+∞}` for value oracles.
//!
//! `+∞` is an explicit variant rather than `f64::INFINITY`, so that values
//! outside a domain are never confused with overflow. Sums follow the convex
//! analysis convention `(−∞) + (+∞) = +∞`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Sub};

use serde::{Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtReal {
    Finite(f64),
    PosInf,
}

pub use ExtReal::PosInf;

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);

    /// Maps `+inf` to [`ExtReal::PosInf`]; every other float is kept as is.
    pub fn from_f64(v: f64) -> Self {
        if v == f64::INFINITY {
            PosInf
        } else {
            ExtReal::Finite(v)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtReal::Finite(v) => Some(v),
            PosInf => None,
        }
    }

    /// Lossy conversion to `f64` (`+∞` becomes `f64::INFINITY`).
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(v) => v,
            PosInf => f64::INFINITY,
        }
    }

    /// Multiplication by a nonnegative scalar, with `0 · (+∞) = +∞`
    /// (the scaled function keeps its domain).
    pub fn scale(self, c: f64) -> Self {
        debug_assert!(c >= 0.0, "ExtReal::scale expects a nonnegative factor");
        match self {
            ExtReal::Finite(v) => ExtReal::Finite(c * v),
            PosInf => PosInf,
        }
    }

    pub fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::from_f64(v)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::from_f64(a + b),
            _ => PosInf,
        }
    }
}

impl Add<f64> for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: f64) -> ExtReal {
        match self {
            ExtReal::Finite(a) => ExtReal::from_f64(a + rhs),
            PosInf => PosInf,
        }
    }
}

impl Sub<f64> for ExtReal {
    type Output = ExtReal;

    fn sub(self, rhs: f64) -> ExtReal {
        self + (-rhs)
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.partial_cmp(b),
            (PosInf, PosInf) => Some(Ordering::Equal),
            (PosInf, _) => Some(Ordering::Greater),
            (_, PosInf) => Some(Ordering::Less),
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(v) => write!(f, "{v}"),
            PosInf => f.write_str("+inf"),
        }
    }
}

impl Serialize for ExtReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(v) => serializer.serialize_f64(*v),
            PosInf => serializer.serialize_str("+inf"),
        }
    }
}
