//! Exact rational arithmetic and rigorous enclosures of e, exp and log1p.

mod enclosure;
pub mod rational;
mod real;
mod transcendental;

use thiserror::Error;

pub use enclosure::Enclosure;
pub use rational::{parse_rational, ParseRationalError, Rational};
pub use real::{cmp_certified, enclose_to_width, Certified, Comparison, Precision, Real};
pub use transcendental::{
    e_partial_enclosure, enclose_e, enclose_exp, enclose_exp_of, enclose_log1p, enclose_log1p_of,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExactError {
    #[error("enclosure lower bound exceeds upper bound")]
    InvertedEnclosure,
    #[error("division by an enclosure that contains zero")]
    DivisionByZero,
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("precision policy needs 8 <= start ({start_bits}) <= cap ({cap_bits}) <= 65536")]
    PrecisionPolicy { start_bits: u32, cap_bits: u32 },
    #[error("two enclosures of the same value are disjoint")]
    Unsound,
}
