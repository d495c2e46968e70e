//! Exact φ(ℓ) = (1 + 1/ℓ)^-ℓ and certified checks of its upper bounds and of
//! the elementary logarithm inequalities behind them.

use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_traits::{One, Pow, Signed};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::rational::{from_u64, ratio};
use crate::exact::{
    cmp_certified, enclose_to_width, Certified, Comparison, Enclosure, ExactError, Precision,
    Rational, Real,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundError {
    #[error("ℓ must be at least 1")]
    ZeroEll,
    #[error("{kind} requires ℓ >= {min}, got {ell}")]
    Domain { kind: BoundKind, min: u64, ell: u64 },
    #[error("ℓ = {0} is too large for an exact power")]
    EllTooLarge(u64),
    #[error("empty ℓ range")]
    EmptyRange,
    #[error("argument must be non-negative, got {0}")]
    NegativeArgument(String),
    #[error("expansion check requires ℓ >= 10, got {0}")]
    ExpansionRange(u64),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `(ℓ/(ℓ+1))^ℓ` as an exact rational.
pub fn phi(ell: u64) -> Result<Rational, BoundError> {
    if ell == 0 {
        return Err(BoundError::ZeroEll);
    }
    let e = u32::try_from(ell).map_err(|_| BoundError::EllTooLarge(ell))?;
    let num: BigInt = Pow::pow(&BigInt::from(ell), e);
    let den: BigInt = Pow::pow(&BigInt::from(ell + 1), e);
    // gcd(ℓ, ℓ+1) = 1, so the fraction is already reduced.
    Ok(Rational::new_raw(num, den))
}

/// `ρ(ℓ) = 1 - φ(ℓ)`, the approximation ratio reached at depth ℓ.
pub fn rho(ell: u64) -> Result<Rational, BoundError> {
    Ok(Rational::one() - phi(ell)?)
}

/// The `1/(2ℓ) - 1/(3ℓ²) + 1/(4ℓ³)` exponent of the sharp bound.
pub fn sharp_exponent(ell: u64) -> Rational {
    let l = from_u64(ell);
    let l2 = &l * &l;
    let l3 = &l2 * &l;
    (&l * ratio(2, 1)).recip() - (&l2 * ratio(3, 1)).recip() + (&l3 * ratio(4, 1)).recip()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `1/(e(1 - 1/ℓ))`, ℓ ≥ 2.
    LooseRecip,
    /// `(1/e)(1 + 2/ℓ)`, ℓ ≥ 2.
    LooseLinear,
    /// `(1/e)(1 + 1/(2ℓ))`, ℓ ≥ 1.
    PolyaSzego,
    /// `(1/e)·exp(1/(2ℓ) - 1/(3ℓ²) + 1/(4ℓ³))`, ℓ ≥ 1.
    Sharp,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [
        BoundKind::LooseRecip,
        BoundKind::LooseLinear,
        BoundKind::PolyaSzego,
        BoundKind::Sharp,
    ];

    pub fn min_ell(self) -> u64 {
        match self {
            BoundKind::LooseRecip | BoundKind::LooseLinear => 2,
            BoundKind::PolyaSzego | BoundKind::Sharp => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::LooseRecip => "loose_recip",
            BoundKind::LooseLinear => "loose_linear",
            BoundKind::PolyaSzego => "polya_szego",
            BoundKind::Sharp => "sharp",
        }
    }

    /// `e · bound(ℓ)`, the bound with the common `1/e` factor removed.
    pub fn scaled_value(self, ell: u64) -> Result<Real, BoundError> {
        if ell < self.min_ell() {
            return Err(BoundError::Domain {
                kind: self,
                min: self.min_ell(),
                ell,
            });
        }
        let l = from_u64(ell);
        Ok(match self {
            BoundKind::LooseRecip => Real::exact(&l / (&l - Rational::one())),
            BoundKind::LooseLinear => Real::exact(Rational::one() + ratio(2, 1) / &l),
            BoundKind::PolyaSzego => Real::exact(Rational::one() + (&l * ratio(2, 1)).recip()),
            BoundKind::Sharp => Real::exact(sharp_exponent(ell)).exp(),
        })
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for BoundKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown bound kind {s:?}"))
    }
}

/// The bound as a real-value descriptor, `(1/e) · scaled_value`.
pub fn bound_value(kind: BoundKind, ell: u64) -> Result<Real, BoundError> {
    Ok(Real::inv_e() * kind.scaled_value(ell)?)
}

/// Certified comparison of `φ(ℓ)` against `bound(kind, ℓ)`.
pub fn compare_phi_to_bound(
    phi_value: &Rational,
    kind: BoundKind,
    ell: u64,
    policy: Precision,
) -> Result<Certified, BoundError> {
    Ok(cmp_certified(
        &Real::exact(phi_value.clone()),
        &bound_value(kind, ell)?,
        policy,
    ))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundFailure {
    pub ell: u64,
    pub comparison: Comparison,
}

/// Outcome of sweeping `φ(ℓ) <= bound(kind, ℓ)` over a range of ℓ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundReport {
    pub kind: BoundKind,
    pub first_ell: u64,
    pub last_ell: u64,
    pub passed: u64,
    /// Certified counterexamples, sorted by ℓ.
    pub failures: Vec<BoundFailure>,
    /// ℓ values where the precision cap was hit, sorted.
    pub inconclusive: Vec<u64>,
    pub max_precision_bits: u32,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty() && self.inconclusive.is_empty()
    }
}

fn check_range(range: &RangeInclusive<u64>) -> Result<(), BoundError> {
    if range.is_empty() {
        return Err(BoundError::EmptyRange);
    }
    if *range.start() == 0 {
        return Err(BoundError::ZeroEll);
    }
    Ok(())
}

/// Certifies `φ(ℓ) <= bound(kind, ℓ)` for every ℓ in `range`.
pub fn verify_bound(
    kind: BoundKind,
    range: RangeInclusive<u64>,
    policy: Precision,
) -> Result<BoundReport, BoundError> {
    Ok(verify_bounds(&[kind], range, policy)?.remove(0))
}

/// Like [`verify_bound`] for several kinds at once, computing each φ(ℓ) once.
/// Reports come back in the order of `kinds`.
pub fn verify_bounds(
    kinds: &[BoundKind],
    range: RangeInclusive<u64>,
    policy: Precision,
) -> Result<Vec<BoundReport>, BoundError> {
    check_range(&range)?;
    for &kind in kinds {
        if *range.start() < kind.min_ell() {
            return Err(BoundError::Domain {
                kind,
                min: kind.min_ell(),
                ell: *range.start(),
            });
        }
    }
    let per_ell: Vec<Vec<Certified>> = range
        .clone()
        .into_par_iter()
        .map(|ell| {
            let p = phi(ell)?;
            kinds
                .iter()
                .map(|&k| compare_phi_to_bound(&p, k, ell, policy))
                .collect()
        })
        .collect::<Result<_, BoundError>>()?;

    Ok(kinds
        .iter()
        .enumerate()
        .map(|(i, &kind)| {
            let mut report = BoundReport {
                kind,
                first_ell: *range.start(),
                last_ell: *range.end(),
                passed: 0,
                failures: Vec::new(),
                inconclusive: Vec::new(),
                max_precision_bits: 0,
            };
            for (ell, row) in range.clone().zip(&per_ell) {
                let c = row[i];
                report.max_precision_bits = report.max_precision_bits.max(c.precision_bits);
                match c.comparison {
                    Comparison::Less | Comparison::Equal => report.passed += 1,
                    Comparison::Unresolved => report.inconclusive.push(ell),
                    Comparison::Greater => report.failures.push(BoundFailure {
                        ell,
                        comparison: c.comparison,
                    }),
                }
            }
            report
        })
        .collect())
}

/// One link of the bound ordering at a given ℓ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingFailure {
    pub ell: u64,
    pub lower: BoundKind,
    pub upper: BoundKind,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub first_ell: u64,
    pub last_ell: u64,
    pub passed: u64,
    pub failures: Vec<OrderingFailure>,
    /// `Sharp(1)` against `PolyaSzego(1)`; certified `greater` is the expected crossover.
    pub exception_at_one: Comparison,
}

impl OrderingReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty() && self.exception_at_one == Comparison::Greater
    }
}

/// The links checked by [`verify_bound_ordering`], lower bound first.
pub const ORDERING_CHAIN: [(BoundKind, BoundKind); 3] = [
    (BoundKind::Sharp, BoundKind::PolyaSzego),
    (BoundKind::PolyaSzego, BoundKind::LooseRecip),
    (BoundKind::LooseRecip, BoundKind::LooseLinear),
];

/// Certified comparison of `bound(lower, ℓ)` against `bound(upper, ℓ)`.
///
/// Both sides share the positive factor `1/e`, so the scaled values are compared.
pub fn compare_bounds(
    lower: BoundKind,
    upper: BoundKind,
    ell: u64,
    policy: Precision,
) -> Result<Certified, BoundError> {
    Ok(cmp_certified(
        &lower.scaled_value(ell)?,
        &upper.scaled_value(ell)?,
        policy,
    ))
}

/// Certifies `Sharp <= PolyaSzego <= LooseRecip <= LooseLinear` on `range`
/// (which must start at 2 or later) and records the ℓ = 1 crossover where
/// `Sharp > PolyaSzego`.
pub fn verify_bound_ordering(
    range: RangeInclusive<u64>,
    policy: Precision,
) -> Result<OrderingReport, BoundError> {
    check_range(&range)?;
    if *range.start() < 2 {
        return Err(BoundError::Domain {
            kind: BoundKind::LooseRecip,
            min: 2,
            ell: *range.start(),
        });
    }
    let rows: Vec<Vec<OrderingFailure>> = range
        .clone()
        .into_par_iter()
        .map(|ell| {
            ORDERING_CHAIN
                .iter()
                .map(|&(lower, upper)| {
                    Ok((lower, upper, compare_bounds(lower, upper, ell, policy)?))
                })
                .filter_map(|r: Result<_, BoundError>| match r {
                    Ok((_, _, c)) if c.comparison.is_le() => None,
                    Ok((lower, upper, c)) => Some(Ok(OrderingFailure {
                        ell,
                        lower,
                        upper,
                        comparison: c.comparison,
                    })),
                    Err(e) => Some(Err(e)),
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let passed = rows.iter().filter(|r| r.is_empty()).count() as u64;
    let exception_at_one =
        compare_bounds(BoundKind::Sharp, BoundKind::PolyaSzego, 1, policy)?.comparison;
    Ok(OrderingReport {
        first_ell: *range.start(),
        last_ell: *range.end(),
        passed,
        failures: rows.into_iter().flatten().collect(),
        exception_at_one,
    })
}

/// The three elementary lower bounds on `log(1+x)` for `x >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LogInequality {
    /// `x/(1+x) <= log(1+x)`
    Weak,
    /// `2x/(2+x) <= log(1+x)`
    Pade,
    /// `x - x²/2 + x³/3 - x⁴/4 <= log(1+x)`
    Tail4,
}

impl LogInequality {
    pub const ALL: [LogInequality; 3] = [
        LogInequality::Weak,
        LogInequality::Pade,
        LogInequality::Tail4,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LogInequality::Weak => "log_weak",
            LogInequality::Pade => "log_pade",
            LogInequality::Tail4 => "log_tail4",
        }
    }

    /// The rational lower bound at `x`.
    pub fn lower_bound(self, x: &Rational) -> Rational {
        match self {
            LogInequality::Weak => x / (Rational::one() + x),
            LogInequality::Pade => x * ratio(2, 1) / (ratio(2, 1) + x),
            LogInequality::Tail4 => {
                let x2 = x * x;
                let x3 = &x2 * x;
                let x4 = &x3 * x;
                x - x2 / ratio(2, 1) + x3 / ratio(3, 1) - x4 / ratio(4, 1)
            }
        }
    }

    /// Certified comparison of the lower bound against `log(1+x)`;
    /// `Less` or `Equal` means the inequality holds at `x`.
    pub fn check(self, x: &Rational, policy: Precision) -> Result<Certified, BoundError> {
        if x.is_negative() {
            return Err(BoundError::NegativeArgument(x.to_string()));
        }
        Ok(cmp_certified(
            &Real::exact(self.lower_bound(x)),
            &Real::exact(x.clone()).log1p(),
            policy,
        ))
    }

    /// Enclosure of `log(1+x) - lower_bound(x)`.
    pub fn slack(self, x: &Rational, precision_bits: u32) -> Result<Enclosure, BoundError> {
        if x.is_negative() {
            return Err(BoundError::NegativeArgument(x.to_string()));
        }
        let log = crate::exact::enclose_log1p(x, precision_bits)?;
        Ok(log.add_rational(&-self.lower_bound(x)))
    }
}

impl fmt::Display for LogInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn check_log_weak(s: &Rational, policy: Precision) -> Result<Certified, BoundError> {
    LogInequality::Weak.check(s, policy)
}

pub fn check_log_pade(x: &Rational, policy: Precision) -> Result<Certified, BoundError> {
    LogInequality::Pade.check(x, policy)
}

pub fn check_log_tail4(t: &Rational, policy: Precision) -> Result<Certified, BoundError> {
    LogInequality::Tail4.check(t, policy)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogFailure {
    pub inequality: LogInequality,
    #[serde(with = "crate::exact::rational::serde_rational")]
    pub x: Rational,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogReport {
    pub points: u64,
    pub passed: u64,
    /// Checks that resolved to exact equality (only at x = 0).
    pub exact_equalities: u64,
    pub failures: Vec<LogFailure>,
}

impl LogReport {
    pub fn all_pass(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks all three log inequalities at every point, in input order.
pub fn verify_log_inequalities(
    points: &[Rational],
    policy: Precision,
) -> Result<LogReport, BoundError> {
    let results: Vec<Vec<(LogInequality, Certified)>> = points
        .par_iter()
        .map(|x| {
            LogInequality::ALL
                .iter()
                .map(|&k| Ok((k, k.check(x, policy)?)))
                .collect()
        })
        .collect::<Result<_, BoundError>>()?;
    let mut report = LogReport {
        points: points.len() as u64,
        passed: 0,
        exact_equalities: 0,
        failures: Vec::new(),
    };
    for (x, row) in points.iter().zip(results) {
        for (inequality, c) in row {
            match c.comparison {
                Comparison::Less => report.passed += 1,
                Comparison::Equal => {
                    report.passed += 1;
                    report.exact_equalities += 1;
                }
                comparison => report.failures.push(LogFailure {
                    inequality,
                    x: x.clone(),
                    comparison,
                }),
            }
        }
    }
    Ok(report)
}

/// `e·Sharp(ℓ) - (1 + 1/(2ℓ) - 5/(24ℓ²) + 5/(48ℓ³))` as a descriptor.
///
/// `e·Sharp(ℓ)` is exactly `exp(η(ℓ))`, so no enclosure of e is involved.
pub fn expansion_defect(ell: u64) -> Real {
    let l = from_u64(ell);
    let l2 = &l * &l;
    let l3 = &l2 * &l;
    let truncated =
        Rational::one() + (&l * ratio(2, 1)).recip() - ratio(5, 24) / &l2 + ratio(5, 48) / &l3;
    Real::exact(sharp_exponent(ell)).exp() - truncated
}

/// Empirical envelope for `|ℓ⁴·D(ℓ)|`; the limit of `ℓ⁴·D(ℓ)` is 163/1152 ≈ 0.1415.
pub const EXPANSION_ENVELOPE: i64 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionPoint {
    pub ell: u64,
    /// Enclosure of `ℓ⁴·D(ℓ)`.
    pub scaled_defect: Enclosure,
    pub within_envelope: Comparison,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub envelope: i64,
    pub points: Vec<ExpansionPoint>,
}

impl ExpansionReport {
    pub fn all_pass(&self) -> bool {
        self.points
            .iter()
            .all(|p| p.within_envelope == Comparison::Less)
    }
}

/// Encloses `ℓ⁴·D(ℓ)` for each ℓ (each ≥ 10) and certifies `|ℓ⁴·D(ℓ)| < envelope`.
pub fn check_expansion_agreement(
    ells: &[u64],
    policy: Precision,
) -> Result<ExpansionReport, BoundError> {
    if let Some(&bad) = ells.iter().find(|&&l| l < 10) {
        return Err(BoundError::ExpansionRange(bad));
    }
    let envelope = Rational::from_integer(BigInt::from(EXPANSION_ENVELOPE));
    let width = ratio(1, 1 << 20);
    let points = ells
        .par_iter()
        .map(|&ell| {
            let l4 = Pow::pow(&from_u64(ell), 4u32);
            let scaled = expansion_defect(ell) * l4;
            let enc = enclose_to_width(&scaled, &width, policy)?;
            let abs_hi = if enc.lo().abs() > enc.hi().abs() {
                enc.lo().abs()
            } else {
                enc.hi().abs()
            };
            let within = if abs_hi < envelope {
                Comparison::Less
            } else if enc.lo() > &envelope || enc.hi() < &-envelope.clone() {
                Comparison::Greater
            } else {
                Comparison::Unresolved
            };
            Ok(ExpansionPoint {
                ell,
                scaled_defect: enc,
                within_envelope: within,
            })
        })
        .collect::<Result<Vec<_>, BoundError>>()?;
    Ok(ExpansionReport {
        envelope: EXPANSION_ENVELOPE,
        points,
    })
}

/// Sign of `D(ℓ)` and `|D(a)|` vs `|D(b)|` helpers for tests and reports.
pub fn enclose_expansion_defect(ell: u64, policy: Precision) -> Result<Enclosure, BoundError> {
    let width = Rational::new(BigInt::one(), crate::exact::rational::pow2(100))
        / Pow::pow(&from_u64(ell), 4u32);
    Ok(enclose_to_width(&expansion_defect(ell), &width, policy)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::parse_rational;
    use num_traits::Zero;

    fn policy() -> Precision {
        Precision::default()
    }

    #[test]
    fn phi_small_values() {
        assert_eq!(phi(1).unwrap(), ratio(1, 2));
        assert_eq!(phi(2).unwrap(), ratio(4, 9));
        assert_eq!(phi(4).unwrap(), ratio(256, 625));
        assert_eq!(phi(0), Err(BoundError::ZeroEll));
    }

    #[test]
    fn phi_is_reduced() {
        let p = phi(6).unwrap();
        let canonical = Rational::new(p.numer().clone(), p.denom().clone());
        assert_eq!(p.numer(), canonical.numer());
        assert_eq!(p.denom(), canonical.denom());
    }

    #[test]
    fn rho_values() {
        assert_eq!(rho(1).unwrap(), ratio(1, 2));
        assert_eq!(rho(2).unwrap(), ratio(5, 9));
        assert_eq!(rho(0), Err(BoundError::ZeroEll));
        // ρ(2) against 1 - 1/e - 1/10 ≈ 0.5321
        let target = Real::int(1) - Real::inv_e() - ratio(1, 10);
        assert_eq!(
            cmp_certified(&Real::exact(rho(2).unwrap()), &target, policy()).comparison,
            Comparison::Greater
        );
    }

    #[test]
    fn bound_value_examples() {
        let p2 = phi(2).unwrap();
        for kind in [
            BoundKind::PolyaSzego,
            BoundKind::LooseRecip,
            BoundKind::LooseLinear,
            BoundKind::Sharp,
        ] {
            assert_eq!(
                compare_phi_to_bound(&p2, kind, 2, policy())
                    .unwrap()
                    .comparison,
                Comparison::Less,
                "{kind}"
            );
        }
        // (1/e)(5/4) ≈ 0.4598 and 2/e ≈ 0.7358
        let ps = bound_value(BoundKind::PolyaSzego, 2)
            .unwrap()
            .enclose(64)
            .unwrap();
        assert!(
            ps.lo() > &parse_rational("0.4598").unwrap()
                && ps.hi() < &parse_rational("0.4599").unwrap()
        );
        let lr = bound_value(BoundKind::LooseRecip, 2)
            .unwrap()
            .enclose(64)
            .unwrap();
        assert!(
            lr.lo() > &parse_rational("0.7357").unwrap()
                && lr.hi() < &parse_rational("0.7358").unwrap()
        );
        let sh = bound_value(BoundKind::Sharp, 1)
            .unwrap()
            .enclose(64)
            .unwrap();
        assert!(
            sh.lo() > &parse_rational("0.5580").unwrap()
                && sh.hi() < &parse_rational("0.5581").unwrap()
        );
        assert_eq!(
            compare_phi_to_bound(&phi(1).unwrap(), BoundKind::Sharp, 1, policy())
                .unwrap()
                .comparison,
            Comparison::Less
        );
    }

    #[test]
    fn loose_bounds_reject_ell_one() {
        assert!(matches!(
            bound_value(BoundKind::LooseLinear, 1),
            Err(BoundError::Domain { .. })
        ));
        assert!(matches!(
            bound_value(BoundKind::LooseRecip, 1),
            Err(BoundError::Domain { .. })
        ));
        assert!(matches!(
            verify_bound(BoundKind::LooseLinear, 1..=1, policy()),
            Err(BoundError::Domain { .. })
        ));
        assert!(bound_value(BoundKind::PolyaSzego, 1).is_ok());
    }

    #[test]
    fn short_sweeps_pass() {
        for kind in BoundKind::ALL {
            let r = verify_bound(kind, kind.min_ell()..=300, policy()).unwrap();
            assert!(r.all_pass(), "{kind}: {r:?}");
            assert_eq!(r.passed, 300 - kind.min_ell() + 1);
        }
    }

    #[test]
    fn ordering_examples() {
        // ℓ = 2: exp(1/4 - 1/12 + 1/32) < 5/4
        assert_eq!(
            compare_bounds(BoundKind::Sharp, BoundKind::PolyaSzego, 2, policy())
                .unwrap()
                .comparison,
            Comparison::Less
        );
        // ℓ = 1: exp(5/12) > 3/2
        assert_eq!(
            compare_bounds(BoundKind::Sharp, BoundKind::PolyaSzego, 1, policy())
                .unwrap()
                .comparison,
            Comparison::Greater
        );
        // ℓ = 2: 5/4 < 2, exact
        let c = compare_bounds(BoundKind::PolyaSzego, BoundKind::LooseLinear, 2, policy()).unwrap();
        assert_eq!((c.comparison, c.precision_bits), (Comparison::Less, 0));
        // The loose forms coincide at ℓ = 2 and separate afterwards: 1/(1-1/ℓ) < 1 + 2/ℓ.
        assert_eq!(
            compare_bounds(BoundKind::LooseRecip, BoundKind::LooseLinear, 2, policy())
                .unwrap()
                .comparison,
            Comparison::Equal
        );
        assert_eq!(
            compare_bounds(BoundKind::LooseRecip, BoundKind::LooseLinear, 3, policy())
                .unwrap()
                .comparison,
            Comparison::Less
        );
        let report = verify_bound_ordering(2..=100, policy()).unwrap();
        assert!(report.all_pass(), "{report:?}");
        assert_eq!(report.exception_at_one, Comparison::Greater);
        assert!(verify_bound_ordering(1..=5, policy()).is_err());
    }

    #[test]
    fn log_inequalities_at_zero_are_exact() {
        for k in LogInequality::ALL {
            let c = k.check(&Rational::zero(), policy()).unwrap();
            assert_eq!(c.comparison, Comparison::Equal, "{k}");
            assert_eq!(c.precision_bits, 0);
        }
    }

    #[test]
    fn log_inequality_examples() {
        assert_eq!(
            LogInequality::Tail4.lower_bound(&Rational::one()),
            ratio(7, 12)
        );
        assert_eq!(
            check_log_tail4(&Rational::one(), policy())
                .unwrap()
                .comparison,
            Comparison::Less
        );
        assert_eq!(
            LogInequality::Pade.lower_bound(&Rational::one()),
            ratio(2, 3)
        );
        assert_eq!(
            check_log_pade(&Rational::one(), policy())
                .unwrap()
                .comparison,
            Comparison::Less
        );
        assert_eq!(
            check_log_weak(&ratio(1, 2), policy()).unwrap().comparison,
            Comparison::Less
        );
        assert_eq!(
            LogInequality::Tail4.lower_bound(&ratio(1, 2)),
            ratio(77, 192)
        );
        assert!(matches!(
            check_log_weak(&ratio(-1, 2), policy()),
            Err(BoundError::NegativeArgument(_))
        ));
    }

    #[test]
    fn tail4_is_tight_at_zero() {
        let t = ratio(1, 1024);
        let slack = LogInequality::Tail4.slack(&t, 256).unwrap();
        let t5: Rational = Pow::pow(&t, 5u32);
        assert!(slack.hi() < &(t5.clone() * ratio(2, 1)));
        // h(t) = ∫ s⁴/(1+s) ds lies between t⁵/(5(1+t)) and t⁵/5.
        assert!(slack.hi() > &(t5 / ratio(5, 1) / (Rational::one() + &t)));
    }

    #[test]
    fn expansion_examples() {
        let report = check_expansion_agreement(&[100, 1000, 10_000], policy()).unwrap();
        assert!(report.all_pass());
        let d100 = enclose_expansion_defect(100, policy()).unwrap();
        let d1000 = enclose_expansion_defect(1000, policy()).unwrap();
        assert!(d100.lo().is_positive());
        assert!(d1000.hi() < d100.lo());
        assert!(check_expansion_agreement(&[9], policy()).is_err());
    }
}
