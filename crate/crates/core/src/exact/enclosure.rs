use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::rational::{
    cmp_rational, round_down, round_up, serde_rational, to_decimal_string, Fraction, Rational,
};
use super::ExactError;

/// A closed interval `[lo, hi]` with exact rational endpoints, guaranteed at
/// construction to contain the real value it stands for.
///
/// All arithmetic is outward: the result of an operation contains every value
/// the operation could produce from points of its operands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Enclosure {
    #[serde(with = "serde_rational")]
    lo: Rational,
    #[serde(with = "serde_rational")]
    hi: Rational,
}

impl Enclosure {
    pub fn new(lo: Rational, hi: Rational) -> Result<Self, ExactError> {
        if cmp_rational(&lo, &hi) == Ordering::Greater {
            return Err(ExactError::InvertedEnclosure);
        }
        Ok(Self { lo, hi })
    }

    pub fn point(value: Rational) -> Self {
        Self {
            lo: value.clone(),
            hi: value,
        }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, value: &Rational) -> bool {
        cmp_rational(&self.lo, value) != Ordering::Greater
            && cmp_rational(value, &self.hi) != Ordering::Greater
    }

    /// `self ⊆ outer`.
    pub fn is_subset_of(&self, outer: &Enclosure) -> bool {
        cmp_rational(&outer.lo, &self.lo) != Ordering::Greater
            && cmp_rational(&self.hi, &outer.hi) != Ordering::Greater
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    /// Intersection of two enclosures of the same value; `None` if they are
    /// disjoint, which would mean one of them was not a valid enclosure.
    pub fn intersect(&self, other: &Enclosure) -> Option<Enclosure> {
        let lo = if cmp_rational(&self.lo, &other.lo) == Ordering::Less {
            &other.lo
        } else {
            &self.lo
        };
        let hi = if cmp_rational(&self.hi, &other.hi) == Ordering::Greater {
            &other.hi
        } else {
            &self.hi
        };
        Enclosure::new(lo.clone(), hi.clone()).ok()
    }

    /// Certified ordering: `Some` only when the intervals are disjoint, or both
    /// are the same single point.
    pub fn certified_cmp(&self, other: &Enclosure) -> Option<Ordering> {
        if cmp_rational(&self.hi, &other.lo) == Ordering::Less {
            Some(Ordering::Less)
        } else if cmp_rational(&self.lo, &other.hi) == Ordering::Greater {
            Some(Ordering::Greater)
        } else if self.is_point() && other.is_point() && self.lo == other.lo {
            Some(Ordering::Equal)
        } else {
            None
        }
    }

    /// Rounds the endpoints outward onto the grid `2^-bits`.
    pub fn round_outward(&self, bits: u32) -> Enclosure {
        Enclosure {
            lo: round_down(&self.lo, bits),
            hi: round_up(&self.hi, bits),
        }
    }

    /// Widens both endpoints by `radius >= 0`.
    pub fn widen(&self, radius: &Rational) -> Enclosure {
        Enclosure {
            lo: &self.lo - radius,
            hi: &self.hi + radius,
        }
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo + &other.lo,
            hi: &self.hi + &other.hi,
        }
    }

    pub fn sub(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lo: &self.lo - &other.hi,
            hi: &self.hi - &other.lo,
        }
    }

    pub fn neg(&self) -> Enclosure {
        Enclosure {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }

    pub fn add_rational(&self, q: &Rational) -> Enclosure {
        Enclosure {
            lo: &self.lo + q,
            hi: &self.hi + q,
        }
    }

    pub fn scale(&self, q: &Rational) -> Enclosure {
        let a = &self.lo * q;
        let b = &self.hi * q;
        if q.is_negative() {
            Enclosure { lo: b, hi: a }
        } else {
            Enclosure { lo: a, hi: b }
        }
    }

    pub fn mul(&self, other: &Enclosure) -> Enclosure {
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Enclosure {
                lo: &self.lo * &other.lo,
                hi: &self.hi * &other.hi,
            };
        }
        let products = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = products[0].clone();
        let mut hi = products[0].clone();
        for p in &products[1..] {
            if cmp_rational(p, &lo) == Ordering::Less {
                lo = p.clone();
            }
            if cmp_rational(p, &hi) == Ordering::Greater {
                hi = p.clone();
            }
        }
        Enclosure { lo, hi }
    }

    /// Square of an interval; tighter than `mul(self, self)` when it straddles 0.
    pub fn square(&self) -> Enclosure {
        if !self.lo.is_negative() {
            Enclosure {
                lo: &self.lo * &self.lo,
                hi: &self.hi * &self.hi,
            }
        } else if !self.hi.is_positive() {
            Enclosure {
                lo: &self.hi * &self.hi,
                hi: &self.lo * &self.lo,
            }
        } else {
            let a = &self.lo * &self.lo;
            let b = &self.hi * &self.hi;
            Enclosure {
                lo: Rational::zero(),
                hi: if a > b { a } else { b },
            }
        }
    }

    pub fn recip(&self) -> Result<Enclosure, ExactError> {
        if self.contains_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Ok(Enclosure {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn div(&self, other: &Enclosure) -> Result<Enclosure, ExactError> {
        Ok(self.mul(&other.recip()?))
    }

    pub(crate) fn into_parts(self) -> (Rational, Rational) {
        (self.lo, self.hi)
    }

    pub(crate) fn from_parts_unchecked(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Enclosure { lo, hi }
    }
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(digits) = f.precision() {
            write!(
                f,
                "[{}, {}]",
                to_decimal_string(&self.lo, digits),
                to_decimal_string(&self.hi, digits)
            )
        } else {
            write!(f, "[{}, {}]", Fraction(&self.lo), Fraction(&self.hi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;

    fn enc(a: (i64, i64), b: (i64, i64)) -> Enclosure {
        Enclosure::new(ratio(a.0, a.1), ratio(b.0, b.1)).unwrap()
    }

    #[test]
    fn rejects_inverted_bounds() {
        assert_eq!(
            Enclosure::new(ratio(1, 1), ratio(0, 1)),
            Err(ExactError::InvertedEnclosure)
        );
    }

    #[test]
    fn mul_handles_signs() {
        let a = enc((-1, 1), (2, 1));
        let b = enc((-3, 1), (1, 1));
        assert_eq!(a.mul(&b), enc((-6, 1), (3, 1)));
        assert_eq!(a.square(), enc((0, 1), (4, 1)));
        assert_eq!(enc((-3, 1), (-2, 1)).square(), enc((4, 1), (9, 1)));
    }

    #[test]
    fn recip_rejects_zero() {
        assert_eq!(
            enc((-1, 1), (1, 1)).recip(),
            Err(ExactError::DivisionByZero)
        );
        assert_eq!(enc((2, 1), (4, 1)).recip().unwrap(), enc((1, 4), (1, 2)));
    }

    #[test]
    fn certified_cmp_requires_disjointness() {
        let a = enc((0, 1), (1, 1));
        let b = enc((2, 1), (3, 1));
        assert_eq!(a.certified_cmp(&b), Some(Ordering::Less));
        assert_eq!(b.certified_cmp(&a), Some(Ordering::Greater));
        assert_eq!(a.certified_cmp(&enc((1, 1), (2, 1))), None);
        let p = Enclosure::point(ratio(1, 2));
        assert_eq!(p.certified_cmp(&p), Some(Ordering::Equal));
    }

    #[test]
    fn intersect_and_subset() {
        let a = enc((0, 1), (2, 1));
        let b = enc((1, 1), (3, 1));
        let i = a.intersect(&b).unwrap();
        assert_eq!(i, enc((1, 1), (2, 1)));
        assert!(i.is_subset_of(&a) && i.is_subset_of(&b));
        assert!(a.intersect(&enc((5, 1), (6, 1))).is_none());
    }
}
