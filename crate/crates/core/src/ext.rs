//! Nonnegative reals extended with `+inf`.
//!
//! Travel costs may become infinite on fully congested roads. Instead of
//! leaning on IEEE infinities, [`ExtReal`] keeps the infinite value as a
//! separate tag: sums propagate it, positive scalings keep it, and the one
//! ambiguous product `0 * inf` is refused by [`ExtReal::scale`]. The only
//! place where that product is given a value is [`ExtReal::weighted`], which
//! encodes the mean-time convention that an unused route contributes nothing.

use core::cmp::Ordering;
use core::fmt;
use core::iter::Sum;
use core::ops::Add;

/// A value in `[0, +inf]`.
#[derive(Clone, Copy, Debug)]
pub enum ExtReal {
    Finite(f64),
    Infinity,
}

impl ExtReal {
    pub const ZERO: ExtReal = ExtReal::Finite(0.0);
    pub const INFINITY: ExtReal = ExtReal::Infinity;

    /// Wraps a finite nonnegative value.
    ///
    /// Panics on NaN, negative or IEEE-infinite input: those are bugs in the
    /// caller, not values of the type.
    pub fn finite(x: f64) -> Self {
        assert!(
            x.is_finite() && x >= 0.0,
            "ExtReal::finite requires a finite nonnegative value, got {x}"
        );
        // normalize -0.0
        ExtReal::Finite(x + 0.0)
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtReal::Finite(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ExtReal::Infinity)
    }

    /// The finite value, if any.
    pub fn value(self) -> Option<f64> {
        match self {
            ExtReal::Finite(x) => Some(x),
            ExtReal::Infinity => None,
        }
    }

    /// IEEE view, for residual arithmetic only.
    pub fn to_f64(self) -> f64 {
        match self {
            ExtReal::Finite(x) => x,
            ExtReal::Infinity => f64::INFINITY,
        }
    }

    /// `c * self` for `c >= 0`.
    ///
    /// Panics on `0 * inf`; callers that can legitimately reach that product
    /// must branch before calling.
    pub fn scale(self, c: f64) -> Self {
        assert!(c.is_finite() && c >= 0.0, "scale factor must be finite and nonnegative, got {c}");
        match self {
            ExtReal::Finite(x) => ExtReal::finite(c * x),
            ExtReal::Infinity if c > 0.0 => ExtReal::Infinity,
            ExtReal::Infinity => panic!("0 * inf is undefined"),
        }
    }

    /// `share * self` with the convention `0 * inf = 0`.
    pub fn weighted(self, share: f64) -> Self {
        if share == 0.0 {
            ExtReal::ZERO
        } else {
            self.scale(share)
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

    /// `max(0, self - other)`; infinite when `self` is infinite and `other` is not.
    pub fn excess_over(self, other: Self) -> Self {
        match (self, other) {
            (_, ExtReal::Infinity) => ExtReal::ZERO,
            (ExtReal::Infinity, ExtReal::Finite(_)) => ExtReal::Infinity,
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::finite(if a > b { a - b } else { 0.0 }),
        }
    }
}

impl Default for ExtReal {
    fn default() -> Self {
        ExtReal::ZERO
    }
}

impl From<f64> for ExtReal {
    /// IEEE `+inf` becomes [`ExtReal::Infinity`]; other values go through
    /// [`ExtReal::finite`].
    fn from(x: f64) -> Self {
        if x == f64::INFINITY {
            ExtReal::Infinity
        } else {
            ExtReal::finite(x)
        }
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: ExtReal) -> ExtReal {
        match (self, rhs) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => ExtReal::finite(a + b),
            _ => ExtReal::Infinity,
        }
    }
}

impl Sum for ExtReal {
    fn sum<I: Iterator<Item = ExtReal>>(iter: I) -> ExtReal {
        iter.fold(ExtReal::ZERO, Add::add)
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => a.total_cmp(b),
            (ExtReal::Finite(_), ExtReal::Infinity) => Ordering::Less,
            (ExtReal::Infinity, ExtReal::Finite(_)) => Ordering::Greater,
            (ExtReal::Infinity, ExtReal::Infinity) => Ordering::Equal,
        }
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtReal::Finite(x) => fmt::Display::fmt(x, f),
            ExtReal::Infinity => f.write_str("inf"),
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            ExtReal::Finite(x) => s.serialize_f64(*x),
            ExtReal::Infinity => s.serialize_str("inf"),
        }
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl serde::de::Visitor<'_> for Visitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a nonnegative number or the token \"inf\"")
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<ExtReal, E> {
                if v.is_finite() && v >= 0.0 {
                    Ok(ExtReal::finite(v))
                } else {
                    Err(E::custom("expected a finite nonnegative number"))
                }
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal::finite(v as f64))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<ExtReal, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<ExtReal, E> {
                if v == "inf" {
                    Ok(ExtReal::Infinity)
                } else {
                    Err(E::custom("expected the token \"inf\""))
                }
            }
        }

        d.deserialize_any(Visitor)
    }
}
