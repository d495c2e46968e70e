//! The three ℓ-selection rules, the closed-form sufficiency certificate and
//! the asymptotic residual of the exact minimum.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::exact::rational::{
    ceil_int, from_u64, parse_rational, pow2, ratio, serde_rational, to_decimal_string, Fraction,
};
use crate::exact::{
    cmp_certified, enclose_to_width, Certified, Comparison, Enclosure, ExactError,
    ParseRationalError, Precision, Rational, Real,
};
use crate::phi::{phi, sharp_exponent, BoundError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("invalid ε: {0}")]
    Parse(#[from] ParseRationalError),
    #[error("ε must be positive, got {0}")]
    NonPositiveEps(String),
    #[error("ε = {0} is too small: ℓ would not fit in 64 bits")]
    EpsTooSmall(String),
    #[error("asymptotic residual needs ε <= 1/10, got {0}")]
    ResidualRange(String),
    #[error("{what} unresolved at the {cap_bits}-bit precision cap")]
    Inconclusive { what: String, cap_bits: u32 },
    #[error("upper endpoint ℓ_PS = {0} does not satisfy φ(ℓ) <= 1/e + ε")]
    UpperEndpoint(u64),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A positive rational ε, ingested exactly from its decimal spelling.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EpsSpec(Rational);

impl EpsSpec {
    pub fn new(eps: Rational) -> Result<Self, PlanError> {
        if !eps.is_positive() {
            return Err(PlanError::NonPositiveEps(Fraction(&eps).to_string()));
        }
        Ok(EpsSpec(eps))
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    /// `1/e + ε` as a descriptor.
    pub fn threshold(&self) -> Real {
        Real::inv_e() + self.0.clone()
    }

    /// Approximate decimal rendering, for humans.
    pub fn to_decimal(&self, digits: usize) -> String {
        to_decimal_string(&self.0, digits)
    }
}

impl FromStr for EpsSpec {
    type Err = PlanError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EpsSpec::new(parse_rational(s)?)
    }
}

impl fmt::Display for EpsSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", Fraction(&self.0))
    }
}

impl Serialize for EpsSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        serde_rational::serialize(&self.0, s)
    }
}

impl<'de> Deserialize<'de> for EpsSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let q = serde_rational::deserialize(d)?;
        EpsSpec::new(q).map_err(serde::de::Error::custom)
    }
}

fn to_u64(v: BigInt, eps: &EpsSpec) -> Result<u64, PlanError> {
    v.to_u64()
        .ok_or_else(|| PlanError::EpsTooSmall(eps.to_string()))
}

fn settle(c: Certified, what: impl FnOnce() -> String) -> Result<Certified, PlanError> {
    if c.comparison == Comparison::Unresolved {
        return Err(PlanError::Inconclusive {
            what: what(),
            cap_bits: c.precision_bits,
        });
    }
    Ok(c)
}

/// `1 + ⌈1/ε⌉`.
pub fn ell_bf(eps: &EpsSpec) -> Result<u64, PlanError> {
    to_u64(ceil_int(&eps.0.recip()) + BigInt::one(), eps)
}

/// `⌈1/(2eε)⌉` (at least 1), with the enclosure refined until the ceiling is
/// unambiguous. Returns the value and the precision that settled it.
pub fn ell_ps_with_precision(eps: &EpsSpec, policy: Precision) -> Result<(u64, u32), PlanError> {
    let target = Real::exact((&eps.0 * ratio(2, 1)).recip()) / Real::e();
    for bits in policy.schedule() {
        let enc = target.enclose(bits)?;
        // v ∈ [lo, hi] with lo > ⌈hi⌉ - 1 forces ⌈v⌉ = ⌈hi⌉.
        let c = ceil_int(enc.hi());
        if Rational::from_integer(c.clone() - BigInt::one()) < *enc.lo() {
            return Ok((to_u64(c, eps)?.max(1), bits));
        }
    }
    Err(PlanError::Inconclusive {
        what: format!("⌈1/(2eε)⌉ for ε = {eps}"),
        cap_bits: policy.cap_bits,
    })
}

pub fn ell_ps(eps: &EpsSpec, policy: Precision) -> Result<u64, PlanError> {
    Ok(ell_ps_with_precision(eps, policy)?.0)
}

/// Certified comparison of `φ(ℓ)` with `1/e + ε`.
pub fn compare_phi_to_threshold(
    ell: u64,
    eps: &EpsSpec,
    policy: Precision,
) -> Result<Certified, PlanError> {
    let c = cmp_certified(&Real::exact(phi(ell)?), &eps.threshold(), policy);
    settle(c, || format!("φ({ell}) vs 1/e + {eps}"))
}

/// Result of the ℓ_star search with the certified verdicts that pin it down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StarSearch {
    pub ell_star: u64,
    /// `φ(ℓ_star)` vs `1/e + ε`; `Less` by construction.
    pub at_star: Comparison,
    /// `φ(ℓ_star - 1)` vs `1/e + ε`; `Greater` unless `ℓ_star = 1`.
    pub below_star: Option<Comparison>,
    pub precision_bits: u32,
}

/// Smallest ℓ ≥ 1 with `φ(ℓ) <= 1/e + ε`, by bisection on `[1, ℓ_PS]`.
pub fn ell_star_search(eps: &EpsSpec, policy: Precision) -> Result<StarSearch, PlanError> {
    let (upper, mut bits) = ell_ps_with_precision(eps, policy)?;
    let top = compare_phi_to_threshold(upper, eps, policy)?;
    bits = bits.max(top.precision_bits);
    if !top.comparison.is_le() {
        return Err(PlanError::UpperEndpoint(upper));
    }
    // Invariant: φ(hi) <= threshold (certified); lo = 0 or φ(lo) > threshold (certified).
    let (mut lo, mut hi) = (0u64, upper);
    let mut at_hi = top.comparison;
    let mut at_lo: Option<Comparison> = None;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let c = compare_phi_to_threshold(mid, eps, policy)?;
        bits = bits.max(c.precision_bits);
        if c.comparison.is_le() {
            hi = mid;
            at_hi = c.comparison;
        } else {
            lo = mid;
            at_lo = Some(c.comparison);
        }
    }
    Ok(StarSearch {
        ell_star: hi,
        at_star: at_hi,
        below_star: if lo == 0 { None } else { at_lo },
        precision_bits: bits,
    })
}

pub fn ell_star(eps: &EpsSpec, policy: Precision) -> Result<u64, PlanError> {
    Ok(ell_star_search(eps, policy)?.ell_star)
}

/// Certified check of `exp(1/(2ℓ) - 1/(3ℓ²) + 1/(4ℓ³)) <= 1 + eε`.
///
/// `true` implies `φ(ℓ) <= 1/e + ε`; `false` says nothing about φ(ℓ).
pub fn certificate_sharp(ell: u64, eps: &EpsSpec, policy: Precision) -> Result<bool, PlanError> {
    Ok(certificate_sharp_certified(ell, eps, policy)?
        .comparison
        .is_le())
}

pub fn certificate_sharp_certified(
    ell: u64,
    eps: &EpsSpec,
    policy: Precision,
) -> Result<Certified, PlanError> {
    if ell == 0 {
        return Err(BoundError::ZeroEll.into());
    }
    let lhs = Real::exact(sharp_exponent(ell)).exp();
    let rhs = Real::int(1) + Real::e() * eps.0.clone();
    settle(cmp_certified(&lhs, &rhs, policy), || {
        format!("sharp certificate at ℓ = {ell}, ε = {eps}")
    })
}

/// Enclosure of `ℓ_star(ε) - (1/(2eε) - 5/12)`; requires `ε <= 1/10`.
pub fn asymptotic_residual(eps: &EpsSpec, policy: Precision) -> Result<Enclosure, PlanError> {
    if eps.0 > ratio(1, 10) {
        return Err(PlanError::ResidualRange(eps.to_string()));
    }
    let star = ell_star(eps, policy)?;
    Ok(residual_for(star, eps, policy)?)
}

pub(crate) fn residual_for(
    ell: u64,
    eps: &EpsSpec,
    policy: Precision,
) -> Result<Enclosure, ExactError> {
    let asymptote = Real::exact((&eps.0 * ratio(2, 1)).recip()) / Real::e() - ratio(5, 12);
    let residual = Real::exact(from_u64(ell)) - asymptote;
    enclose_to_width(&residual, &Rational::new(BigInt::one(), pow2(24)), policy)
}

/// Everything the planner certifies for one ε.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EllPlan {
    pub eps: EpsSpec,
    pub ell_bf: u64,
    pub ell_ps: u64,
    pub ell_star: u64,
    /// `ρ(ℓ_star) = 1 - φ(ℓ_star)`.
    #[serde(with = "serde_rational")]
    pub rho_star: Rational,
    pub certificate_holds_at_star: bool,
    pub precision_used: u32,
}

impl EllPlan {
    /// Holds on every tabulated ε; not asserted for arbitrary ε.
    pub fn ps_within_bf(&self) -> bool {
        self.ell_ps <= self.ell_bf
    }

    pub fn sharp_gain(&self) -> u64 {
        self.ell_ps - self.ell_star
    }
}

pub fn plan(eps: &EpsSpec, policy: Precision) -> Result<EllPlan, PlanError> {
    let bf = ell_bf(eps)?;
    let (ps, ps_bits) = ell_ps_with_precision(eps, policy)?;
    let search = ell_star_search(eps, policy)?;
    let cert = certificate_sharp_certified(search.ell_star, eps, policy)?;
    Ok(EllPlan {
        eps: eps.clone(),
        ell_bf: bf,
        ell_ps: ps,
        ell_star: search.ell_star,
        rho_star: Rational::one() - phi(search.ell_star)?,
        certificate_holds_at_star: cert.comparison.is_le(),
        precision_used: ps_bits.max(search.precision_bits).max(cert.precision_bits),
    })
}
