//! Certified selection of the local-search depth ℓ for deterministic
//! `(1 - 1/e - ε)` monotone submodular maximization under a matroid.
//!
//! The guarantee of the local search degrades by `φ(ℓ) = (1 + 1/ℓ)^-ℓ`; this
//! crate finds how large ℓ must be for `φ(ℓ) <= 1/e + ε`, under three rules:
//!
//! * `ℓ_BF = 1 + ⌈1/ε⌉`, from the loose bound `φ(ℓ) <= (1/e)(1 + 2/ℓ)`;
//! * `ℓ_PS = ⌈1/(2eε)⌉`, from `φ(ℓ) <= (1/e)(1 + 1/(2ℓ))`;
//! * `ℓ_star`, the exact minimum, with a closed-form sufficient certificate.
//!
//! Every inequality is decided with exact rationals against rigorous
//! enclosures of the transcendental side ([`exact`]); nothing is decided in
//! floating point.

pub mod cost;
pub mod exact;
pub mod phi;
pub mod planner;
pub mod testbed;

pub use planner::{plan, EllPlan, EpsSpec};

pub use exact::{cmp_certified, Comparison, Enclosure, Precision, Rational, Real};
