//! Real-value descriptors and the certified comparison engine.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::enclosure::Enclosure;
use super::rational::{cmp_rational, Fraction, Rational};
use super::transcendental::{enclose_e, enclose_exp_of, enclose_log1p_of, exp_raw, log1p_raw};
use super::ExactError;

/// An exact rational or an expression over e, exp and log1p that can be
/// enclosed to any precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Real {
    Exact(Rational),
    E,
    Exp(Box<Real>),
    Log1p(Box<Real>),
    Neg(Box<Real>),
    Add(Box<Real>, Box<Real>),
    Sub(Box<Real>, Box<Real>),
    Mul(Box<Real>, Box<Real>),
    Div(Box<Real>, Box<Real>),
}

impl Real {
    pub fn exact(q: Rational) -> Real {
        Real::Exact(q)
    }

    pub fn int(v: i64) -> Real {
        Real::Exact(Rational::from_integer(v.into()))
    }

    pub fn e() -> Real {
        Real::E
    }

    /// `1/e`.
    pub fn inv_e() -> Real {
        Real::int(1) / Real::E
    }

    pub fn exp(self) -> Real {
        Real::Exp(Box::new(self))
    }

    pub fn log1p(self) -> Real {
        Real::Log1p(Box::new(self))
    }

    pub fn recip(self) -> Real {
        Real::int(1) / self
    }

    /// Folds the expression to a rational when no transcendental part survives
    /// (`exp(0) = 1` and `log1p(0) = 0` are folded as well).
    pub fn as_exact(&self) -> Option<Rational> {
        match self {
            Real::Exact(q) => Some(q.clone()),
            Real::E => None,
            Real::Exp(x) => x.as_exact().filter(Zero::is_zero).map(|_| Rational::one()),
            Real::Log1p(x) => x.as_exact().filter(Zero::is_zero),
            Real::Neg(x) => x.as_exact().map(|q| -q),
            Real::Add(a, b) => Some(a.as_exact()? + b.as_exact()?),
            Real::Sub(a, b) => Some(a.as_exact()? - b.as_exact()?),
            Real::Mul(a, b) => Some(a.as_exact()? * b.as_exact()?),
            Real::Div(a, b) => {
                let d = b.as_exact()?;
                if d.is_zero() {
                    None
                } else {
                    Some(a.as_exact()? / d)
                }
            }
        }
    }

    /// Encloses the value with sub-expressions evaluated at `precision_bits`
    /// plus a few guard bits per nesting level. Width is not guaranteed; callers
    /// escalate precision until they get what they need.
    pub fn enclose(&self, precision_bits: u32) -> Result<Enclosure, ExactError> {
        let bits = precision_bits + 4;
        Ok(match self {
            Real::Exact(q) => Enclosure::point(q.clone()),
            Real::E => enclose_e(bits),
            Real::Exp(x) => match x.as_exact() {
                Some(q) => exp_raw(&q, bits)?,
                None => enclose_exp_of(&x.enclose(bits)?, bits)?,
            },
            Real::Log1p(x) => match x.as_exact() {
                Some(q) => log1p_raw(&q, bits)?,
                None => enclose_log1p_of(&x.enclose(bits)?, bits)?,
            },
            Real::Neg(x) => x.enclose(bits)?.neg(),
            Real::Add(a, b) => a.enclose(bits)?.add(&b.enclose(bits)?),
            Real::Sub(a, b) => a.enclose(bits)?.sub(&b.enclose(bits)?),
            Real::Mul(a, b) => a.enclose(bits)?.mul(&b.enclose(bits)?),
            Real::Div(a, b) => a.enclose(bits)?.div(&b.enclose(bits)?)?,
        })
    }
}

impl From<Rational> for Real {
    fn from(q: Rational) -> Self {
        Real::Exact(q)
    }
}

impl From<&Rational> for Real {
    fn from(q: &Rational) -> Self {
        Real::Exact(q.clone())
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl $trait for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                Real::$variant(Box::new(self), Box::new(rhs))
            }
        }
        impl $trait<Rational> for Real {
            type Output = Real;
            fn $method(self, rhs: Rational) -> Real {
                Real::$variant(Box::new(self), Box::new(Real::Exact(rhs)))
            }
        }
    };
}

real_binop!(Add, add, Add);
real_binop!(Sub, sub, Sub);
real_binop!(Mul, mul, Mul);
real_binop!(Div, div, Div);

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::Neg(Box::new(self))
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(q) => write!(f, "{}", Fraction(q)),
            Real::E => f.write_str("e"),
            Real::Exp(x) => write!(f, "exp({x})"),
            Real::Log1p(x) => write!(f, "log1p({x})"),
            Real::Neg(x) => write!(f, "-({x})"),
            Real::Add(a, b) => write!(f, "({a} + {b})"),
            Real::Sub(a, b) => write!(f, "({a} - {b})"),
            Real::Mul(a, b) => write!(f, "{a}·{b}"),
            Real::Div(a, b) => write!(f, "{a}/({b})"),
        }
    }
}

/// Outcome of a certified comparison of `a` against `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `a < b`, the enclosures were disjoint.
    Less,
    /// `a > b`, the enclosures were disjoint.
    Greater,
    /// Both sides reduced to the same exact rational.
    Equal,
    /// The refinement budget ran out with overlapping enclosures.
    Unresolved,
}

impl Comparison {
    /// Certified `a <= b`.
    pub fn is_le(self) -> bool {
        matches!(self, Comparison::Less | Comparison::Equal)
    }

    /// Certified `a >= b`.
    pub fn is_ge(self) -> bool {
        matches!(self, Comparison::Greater | Comparison::Equal)
    }

    pub fn reverse(self) -> Comparison {
        match self {
            Comparison::Less => Comparison::Greater,
            Comparison::Greater => Comparison::Less,
            other => other,
        }
    }

    fn from_ordering(o: Ordering) -> Comparison {
        match o {
            Ordering::Less => Comparison::Less,
            Ordering::Greater => Comparison::Greater,
            Ordering::Equal => Comparison::Equal,
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparison::Less => "less",
            Comparison::Greater => "greater",
            Comparison::Equal => "equal",
            Comparison::Unresolved => "unresolved",
        })
    }
}

/// Refinement schedule: start at `start_bits`, double, stop after `cap_bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Precision {
    pub start_bits: u32,
    pub cap_bits: u32,
}

impl Precision {
    pub const DEFAULT_START: u32 = 32;
    pub const DEFAULT_CAP: u32 = 4096;
    pub const MIN_BITS: u32 = 8;
    pub const MAX_BITS: u32 = 65536;

    pub fn new(start_bits: u32, cap_bits: u32) -> Result<Self, ExactError> {
        if start_bits < Self::MIN_BITS || start_bits > cap_bits || cap_bits > Self::MAX_BITS {
            return Err(ExactError::PrecisionPolicy {
                start_bits,
                cap_bits,
            });
        }
        Ok(Precision {
            start_bits,
            cap_bits,
        })
    }

    /// The precisions tried in order, ending exactly at the cap.
    pub fn schedule(&self) -> impl Iterator<Item = u32> {
        let cap = self.cap_bits;
        std::iter::successors(Some(self.start_bits), move |&b| {
            (b < cap).then(|| (b.saturating_mul(2)).min(cap))
        })
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            start_bits: Self::DEFAULT_START,
            cap_bits: Self::DEFAULT_CAP,
        }
    }
}

/// A comparison verdict together with the precision at which it was settled
/// (the cap, for `Unresolved`; 0 when both sides were exact).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Certified {
    pub comparison: Comparison,
    pub precision_bits: u32,
}

/// Compares two reals, refining geometrically until their enclosures separate.
///
/// Two exact rationals are compared exactly. Enclosure failures at a given
/// precision (a divisor enclosure touching zero) count as "not yet separated".
pub fn cmp_certified(a: &Real, b: &Real, policy: Precision) -> Certified {
    let exact_a = a.as_exact();
    let exact_b = b.as_exact();
    if let (Some(x), Some(y)) = (&exact_a, &exact_b) {
        return Certified {
            comparison: Comparison::from_ordering(cmp_rational(x, y)),
            precision_bits: 0,
        };
    }
    for bits in policy.schedule() {
        let ea = match &exact_a {
            Some(q) => Enclosure::point(q.clone()),
            None => match a.enclose(bits) {
                Ok(e) => e,
                Err(_) => continue,
            },
        };
        let eb = match &exact_b {
            Some(q) => Enclosure::point(q.clone()),
            None => match b.enclose(bits) {
                Ok(e) => e,
                Err(_) => continue,
            },
        };
        if let Some(o) = ea.certified_cmp(&eb) {
            return Certified {
                comparison: Comparison::from_ordering(o),
                precision_bits: bits,
            };
        }
    }
    Certified {
        comparison: Comparison::Unresolved,
        precision_bits: policy.cap_bits,
    }
}

/// Encloses `x` with escalating precision until the width is at most `width`
/// or the cap is reached; returns the tightest enclosure found.
pub fn enclose_to_width(
    x: &Real,
    width: &Rational,
    policy: Precision,
) -> Result<Enclosure, ExactError> {
    let mut best: Option<Enclosure> = None;
    for bits in policy.schedule() {
        let Ok(enc) = x.enclose(bits) else { continue };
        let done = cmp_rational(&enc.width(), width) != Ordering::Greater;
        best = Some(match best {
            Some(prev) => prev.intersect(&enc).ok_or(ExactError::Unsound)?,
            None => enc,
        });
        if done {
            break;
        }
    }
    best.ok_or(ExactError::DivisionByZero)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;

    fn q(n: i64, d: i64) -> Real {
        Real::exact(ratio(n, d))
    }

    #[test]
    fn lemma_instance_at_two() {
        // 4/9 ≈ 0.4444 against (1/e)(5/4) ≈ 0.4598
        let bound = Real::inv_e() * ratio(5, 4);
        let c = cmp_certified(&q(4, 9), &bound, Precision::default());
        assert_eq!(c.comparison, Comparison::Less);
        assert_eq!(
            cmp_certified(&bound, &q(4, 9), Precision::default()).comparison,
            Comparison::Greater
        );
    }

    #[test]
    fn exact_equality() {
        let c = cmp_certified(&q(1, 2), &q(2, 4), Precision::default());
        assert_eq!(c.comparison, Comparison::Equal);
        assert_eq!(c.precision_bits, 0);
        // log1p(0) folds to 0, exp(0) to 1.
        assert_eq!(
            cmp_certified(&q(0, 1).log1p(), &q(0, 1), Precision::default()).comparison,
            Comparison::Equal
        );
        assert_eq!(
            cmp_certified(&q(0, 1).exp(), &q(1, 1), Precision::default()).comparison,
            Comparison::Equal
        );
    }

    #[test]
    fn unresolved_when_budget_too_small() {
        // e vs a rational within 2^-60 of it cannot separate at 8..16 bits.
        let close = crate::exact::transcendental::enclose_e(60).lo().clone();
        let tight = Precision::new(8, 16).unwrap();
        assert_eq!(
            cmp_certified(&Real::e(), &Real::exact(close.clone()), tight).comparison,
            Comparison::Unresolved
        );
        assert_eq!(
            cmp_certified(&Real::e(), &Real::exact(close), Precision::default()).comparison,
            Comparison::Greater
        );
    }

    #[test]
    fn precision_policy_bounds() {
        assert!(Precision::new(4, 64).is_err());
        assert!(Precision::new(128, 64).is_err());
        assert!(Precision::new(8, 70000).is_err());
        let p = Precision::new(32, 100).unwrap();
        assert_eq!(p.schedule().collect::<Vec<_>>(), vec![32, 64, 100]);
        assert_eq!(Precision::default().schedule().last(), Some(4096));
    }

    #[test]
    fn composed_expressions_enclose() {
        // exp(log1p(3)) = 4
        let x = q(3, 1).log1p().exp();
        let enc = x.enclose(64).unwrap();
        assert!(enc.contains(&ratio(4, 1)));
        assert!(x.as_exact().is_none());
    }
}
