//! Rigorous enclosures of e, exp(x) and log(1+x) for rational arguments.
//!
//! Every series is summed in exact rationals, rounded outward onto a dyadic
//! grid a few guard bits finer than the requested precision, and closed off
//! with an explicit tail bound. The public `enclose_*` entry points additionally
//! intersect the results of a fixed doubling ladder of working precisions, so a
//! request at higher precision always yields a sub-interval of a request at
//! lower precision.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::enclosure::Enclosure;
use super::rational::{cmp_rational, floor_log2, from_u64, pow2, ratio, to_f64, Rational};
use super::ExactError;

/// Smallest ladder level; requests below this are served at this level.
const LADDER_FLOOR: u32 = 8;

/// Extra bits carried through series summation.
const GUARD_BITS: u32 = 20;

fn ladder_levels(precision_bits: u32) -> impl Iterator<Item = u32> {
    let top = precision_bits.max(LADDER_FLOOR).next_power_of_two();
    std::iter::successors(Some(LADDER_FLOOR), move |&level| {
        (level < top).then_some(level * 2)
    })
}

/// Intersects `raw(level)` over the ladder up to the first power of two `>= precision_bits`.
fn nested<F>(precision_bits: u32, raw: F) -> Result<Enclosure, ExactError>
where
    F: Fn(u32) -> Result<Enclosure, ExactError>,
{
    let mut acc: Option<Enclosure> = None;
    for level in ladder_levels(precision_bits) {
        let next = raw(level)?;
        acc = Some(match acc {
            None => next,
            Some(prev) => prev.intersect(&next).ok_or(ExactError::Unsound)?,
        });
    }
    Ok(acc.expect("ladder is never empty"))
}

fn epsilon(bits: u32) -> Rational {
    Rational::new(BigInt::one(), pow2(u64::from(bits)))
}

fn ceil_log2_u32(v: u32) -> u32 {
    32 - v.max(1).saturating_sub(1).leading_zeros()
}

/// `[S_K, S_K + 1/(K!·K)]` where `S_K = Σ_{k=0..K} 1/k!`. Requires `terms >= 1`.
pub fn e_partial_enclosure(terms: u32) -> Enclosure {
    assert!(terms >= 1, "need at least one term");
    let mut sum = Rational::one();
    let mut inv_fact = Rational::one();
    for k in 1..=terms {
        inv_fact /= from_u64(u64::from(k));
        sum += &inv_fact;
    }
    let tail = inv_fact / from_u64(u64::from(terms));
    Enclosure::from_parts_unchecked(sum.clone(), sum + tail)
}

/// Enclosure of e with width at most `2^-precision_bits`.
///
/// The partial-sum intervals are nested in the number of terms, so no ladder
/// intersection is needed here.
pub fn enclose_e(precision_bits: u32) -> Enclosure {
    let target = epsilon(precision_bits.max(1));
    let mut inv_fact_times_k = Rational::one(); // 1/(K!·K) for K = 1
    let mut inv_fact = Rational::one();
    let mut k = 1u32;
    while cmp_rational(&inv_fact_times_k, &target) == std::cmp::Ordering::Greater {
        k += 1;
        inv_fact /= from_u64(u64::from(k));
        inv_fact_times_k = &inv_fact / from_u64(u64::from(k));
    }
    e_partial_enclosure(k)
}

/// Enclosure of `exp(x)`; the width is at most about `2^-precision_bits · max(1, exp(x))`.
pub fn enclose_exp(x: &Rational, precision_bits: u32) -> Result<Enclosure, ExactError> {
    nested(precision_bits, |bits| exp_raw(x, bits))
}

/// Enclosure of `log(1 + x)` for `x >= 0`, absolute width at most about `2^-precision_bits`.
pub fn enclose_log1p(x: &Rational, precision_bits: u32) -> Result<Enclosure, ExactError> {
    if x.is_negative() {
        return Err(ExactError::Domain("log1p argument must be non-negative"));
    }
    nested(precision_bits, |bits| log1p_raw(x, bits))
}

/// Enclosure of `exp` over an enclosed argument (exp is increasing).
pub fn enclose_exp_of(arg: &Enclosure, precision_bits: u32) -> Result<Enclosure, ExactError> {
    if arg.is_point() {
        return exp_raw(arg.lo(), precision_bits);
    }
    let lo = exp_raw(arg.lo(), precision_bits)?;
    let hi = exp_raw(arg.hi(), precision_bits)?;
    Ok(Enclosure::from_parts_unchecked(
        lo.into_parts().0,
        hi.into_parts().1,
    ))
}

/// Enclosure of `log1p` over an enclosed argument; requires `arg.lo() >= 0`.
pub fn enclose_log1p_of(arg: &Enclosure, precision_bits: u32) -> Result<Enclosure, ExactError> {
    if arg.lo().is_negative() {
        return Err(ExactError::Domain("log1p argument must be non-negative"));
    }
    if arg.is_point() {
        return log1p_raw(arg.lo(), precision_bits);
    }
    let lo = log1p_raw(arg.lo(), precision_bits)?;
    let hi = log1p_raw(arg.hi(), precision_bits)?;
    Ok(Enclosure::from_parts_unchecked(
        lo.into_parts().0,
        hi.into_parts().1,
    ))
}

/// Single-shot exp enclosure at working precision `bits`: halve until
/// `|y| <= 1/2`, Taylor with Lagrange remainder, square back.
pub(crate) fn exp_raw(x: &Rational, bits: u32) -> Result<Enclosure, ExactError> {
    if x.is_zero() {
        return Ok(Enclosure::point(Rational::one()));
    }
    let half = ratio(1, 2);
    let mut halvings: u32 = 0;
    let mut y = x.clone();
    if cmp_rational(&y.abs(), &half) == std::cmp::Ordering::Greater {
        // Smallest m with |x| / 2^m <= 1/2.
        let m = (floor_log2(&y.abs()) + 2).max(0) as u32;
        halvings = m;
        y /= Rational::from_integer(pow2(u64::from(m)));
        if cmp_rational(&y.abs(), &half) == std::cmp::Ordering::Greater {
            y /= Rational::from_integer(2.into());
            halvings += 1;
        }
    }
    if halvings > 64 {
        return Err(ExactError::Domain("exp argument too large"));
    }
    let magnitude_bits = if x.is_positive() {
        (to_f64(x) * std::f64::consts::LOG2_E).ceil() as u32 + 1
    } else {
        0
    };
    let work = bits + halvings + magnitude_bits + GUARD_BITS + ceil_log2_u32(bits);
    let target = epsilon(work);
    let abs_y = y.abs();

    let mut term = Enclosure::point(Rational::one());
    let mut sum = term.clone();
    let mut k: u64 = 0;
    let remainder = loop {
        k += 1;
        term = term.scale(&(&y / from_u64(k))).round_outward(work);
        sum = sum.add(&term);
        // |R_k| <= e^{1/2} |y|^{k+1} / (k+1)! <= 2 |t_k| |y| / (k+1)
        let t_abs = if term.lo().abs() > term.hi().abs() {
            term.lo().abs()
        } else {
            term.hi().abs()
        };
        let bound = t_abs * &abs_y * ratio(2, 1) / from_u64(k + 1);
        if cmp_rational(&bound, &target) != std::cmp::Ordering::Greater {
            break bound;
        }
    };
    let mut acc = sum.widen(&remainder).round_outward(work);
    if !acc.lo().is_positive() {
        acc = Enclosure::from_parts_unchecked(Rational::zero(), acc.hi().clone());
    }
    for _ in 0..halvings {
        acc = acc.square().round_outward(work);
    }
    Ok(acc)
}

/// `Σ_{k>=0} z^{2k+1}/(2k+1)` for `0 <= z < 1`, with the geometric tail bound
/// `z^{2K+3} / ((2K+3)(1 - z^2))` after the last included term.
fn artanh_series(z: &Rational, work: u32) -> Enclosure {
    if z.is_zero() {
        return Enclosure::point(Rational::zero());
    }
    let z2 = z * z;
    let geometric = (Rational::one() - &z2).recip();
    let target = epsilon(work);
    let mut power = Enclosure::point(z.clone()).round_outward(work);
    let mut sum = power.clone();
    let mut k: u64 = 0;
    loop {
        k += 1;
        power = power.scale(&z2).round_outward(work);
        let term = power
            .scale(&Rational::new(BigInt::one(), BigInt::from(2 * k + 1)))
            .round_outward(work);
        sum = sum.add(&term);
        let tail = power.hi() * &z2 / from_u64(2 * k + 3) * &geometric;
        if cmp_rational(&tail, &target) != std::cmp::Ordering::Greater {
            let (lo, hi) = sum.into_parts();
            return Enclosure::from_parts_unchecked(lo, hi + tail).round_outward(work);
        }
    }
}

/// `log(1+x) = k·ln 2 + 2·artanh((r-1)/(r+1))` with `1+x = 2^k·r`, `r ∈ [1, 2)`.
pub(crate) fn log1p_raw(x: &Rational, bits: u32) -> Result<Enclosure, ExactError> {
    if x.is_negative() {
        return Err(ExactError::Domain("log1p argument must be non-negative"));
    }
    if x.is_zero() {
        return Ok(Enclosure::point(Rational::zero()));
    }
    let one_plus = Rational::one() + x;
    let k = floor_log2(&one_plus).max(0) as u64;
    let r = one_plus / Rational::from_integer(pow2(k));
    let k_bits = 64 - k.leading_zeros();
    let work = bits + GUARD_BITS + k_bits + ceil_log2_u32(bits);
    let two = ratio(2, 1);

    let z = (&r - Rational::one()) / (&r + Rational::one());
    let mut result = artanh_series(&z, work).scale(&two);
    if k > 0 {
        let ln2 = artanh_series(&ratio(1, 3), work).scale(&two);
        result = result.add(&ln2.scale(&from_u64(k)));
    }
    Ok(result.round_outward(work))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::parse_rational;

    /// Independent oracle: plain alternating/positive partial sums in exact
    /// rationals with a generous number of terms and no argument reduction.
    fn exp_oracle(x: &Rational, terms: u64) -> Rational {
        let mut sum = Rational::one();
        let mut term = Rational::one();
        for k in 1..=terms {
            term = term * x / from_u64(k);
            sum += &term;
        }
        sum
    }

    #[test]
    fn e_two_term_construction() {
        let e2 = e_partial_enclosure(2);
        assert_eq!(e2.lo(), &ratio(5, 2));
        assert_eq!(e2.hi(), &ratio(11, 4));
        assert!(e2.contains(&parse_rational("2.718281828").unwrap()));
    }

    #[test]
    fn e_width_and_digits() {
        for p in 8..=128 {
            let e = enclose_e(p);
            assert!(e.width() <= epsilon(p), "width at {p}");
        }
        let e40 = enclose_e(40);
        // Width 2^-40 is far below 1e-9, so the enclosure sits inside the digit bracket.
        assert!(e40.lo() >= &ratio(2718281828, 1_000_000_000));
        assert!(e40.hi() <= &ratio(2718281829, 1_000_000_000));
        // 200-term oracle partial sum is within 1e-300 of e.
        let oracle = exp_oracle(&Rational::one(), 200);
        assert!(e40.contains(&oracle));
        assert!(enclose_e(60).is_subset_of(&enclose_e(20)));
    }

    #[test]
    fn exp_zero_is_exact() {
        assert_eq!(
            enclose_exp(&Rational::zero(), 64).unwrap(),
            Enclosure::point(Rational::one())
        );
    }

    #[test]
    fn exp_five_twelfths() {
        let enc = enclose_exp(&ratio(5, 12), 40).unwrap();
        let oracle = exp_oracle(&ratio(5, 12), 80);
        assert!(enc.contains(&oracle));
        assert!(enc.lo() >= &parse_rational("1.516896796388").unwrap());
        assert!(enc.hi() <= &parse_rational("1.516896796389").unwrap());
        assert!(enc.lo() > &ratio(3, 2));
        assert!(enc.width() <= ratio(1, 1 << 30) * ratio(1, 1 << 10));
    }

    #[test]
    fn exp_ell_two_exponent_below_five_quarters() {
        let x = ratio(1, 4) - ratio(1, 12) + ratio(1, 32);
        let enc = enclose_exp(&x, 40).unwrap();
        assert!(enc.contains(&exp_oracle(&x, 80)));
        assert!(enc.hi() < &ratio(5, 4));
    }

    #[test]
    fn exp_negative_and_large_arguments() {
        for x in [
            ratio(-3, 2),
            ratio(-1, 1000),
            ratio(7, 3),
            ratio(-20, 1),
            ratio(15, 1),
        ] {
            let enc = enclose_exp(&x, 64).unwrap();
            let oracle = exp_oracle(&x, 400);
            assert!(enc.contains(&oracle), "exp({x}) = {enc:.20}");
            assert!(enc.lo().is_positive());
        }
    }

    #[test]
    fn log1p_zero_is_exact() {
        assert_eq!(
            enclose_log1p(&Rational::zero(), 64).unwrap(),
            Enclosure::point(Rational::zero())
        );
        assert!(enclose_log1p(&ratio(-1, 2), 64).is_err());
    }

    #[test]
    fn log1p_one_and_half() {
        let ln2 = enclose_log1p(&ratio(1, 1), 40).unwrap();
        // Alternating series oracle: Σ (-1)^{k+1}/k; two consecutive partial sums bracket ln 2.
        let mut s = Rational::zero();
        let mut prev = Rational::zero();
        for k in 1..=4001i64 {
            prev = s.clone();
            let t = ratio(1, k);
            if k % 2 == 1 {
                s += t
            } else {
                s -= t
            }
        }
        let (a, b) = if s < prev { (s, prev) } else { (prev, s) };
        assert!(ln2.lo() <= &b && ln2.hi() >= &a);
        assert!(ln2.lo() >= &parse_rational("0.693147180559").unwrap());
        assert!(ln2.hi() <= &parse_rational("0.693147180560").unwrap());
        assert!(ln2.lo() > &ratio(2, 3));
        let half = enclose_log1p(&ratio(1, 2), 40).unwrap();
        assert!(half.lo() > &ratio(77, 192));
        assert!(half.lo() >= &parse_rational("0.405465108108").unwrap());
        assert!(half.hi() <= &parse_rational("0.405465108109").unwrap());
    }

    #[test]
    fn log1p_large_argument_uses_reduction() {
        let x = Rational::from_integer(999_999.into());
        let enc = enclose_log1p(&x, 64).unwrap();
        // log(10^6) = 13.815510557964274...
        assert!(enc.lo() >= &parse_rational("13.815510557964").unwrap());
        assert!(enc.hi() <= &parse_rational("13.815510557965").unwrap());
        assert!(enc.width() < ratio(1, 1 << 30));
    }

    #[test]
    fn exp_of_log1p_brackets_argument() {
        for k in 0..=32i64 {
            let x = ratio(k, 16);
            let log = enclose_log1p(&x, 64).unwrap();
            let back = enclose_exp_of(&log, 64).unwrap();
            assert!(back.contains(&(Rational::one() + &x)), "k = {k}");
        }
    }

    #[test]
    fn refinement_is_nested() {
        let x = ratio(5, 12);
        for (p, q) in [(20, 60), (33, 64), (64, 65), (100, 300)] {
            assert!(enclose_exp(&x, q)
                .unwrap()
                .is_subset_of(&enclose_exp(&x, p).unwrap()));
            assert!(enclose_log1p(&x, q)
                .unwrap()
                .is_subset_of(&enclose_log1p(&x, p).unwrap()));
        }
    }
}
