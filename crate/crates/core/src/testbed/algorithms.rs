use std::cmp::Ordering;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    CoverageInstance, ElementSet, OracleCounter, SetFunction, TestbedError, MAX_BRUTE_GROUND,
    MAX_CHECK_GROUND, MAX_SUBSET_ELL,
};
use crate::exact::rational::serde_rational;
use crate::exact::Rational;

/// A violation of monotonicity or diminishing returns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "property", rename_all = "snake_case")]
pub enum Witness {
    /// `S ⊆ T` but `f(S) > f(T)`.
    Monotonicity { s: ElementSet, t: ElementSet },
    /// `S ⊆ T`, `x ∉ T`, but `f(S+x) - f(S) < f(T+x) - f(T)`.
    Submodularity {
        s: ElementSet,
        t: ElementSet,
        x: usize,
    },
}

impl Witness {
    pub fn describe(&self, f: &dyn SetFunction) -> String {
        let names = |s: ElementSet| {
            format!(
                "{{{}}}",
                s.iter()
                    .map(|i| f.element_name(i))
                    .collect::<Vec<_>>()
                    .join(",")
            )
        };
        match *self {
            Witness::Monotonicity { s, t } => {
                format!("monotonicity fails: S = {}, T = {}", names(s), names(t))
            }
            Witness::Submodularity { s, t, x } => {
                format!(
                    "submodularity fails: S = {}, T = {}, x = {}",
                    names(s),
                    names(t),
                    f.element_name(x)
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    pub witness: Option<Witness>,
    pub evaluations: u64,
}

/// Submasks of `t` in ascending order.
fn submasks(t: ElementSet) -> impl Iterator<Item = ElementSet> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let s = next?;
        next = if s == t.0 {
            None
        } else {
            Some((s | !t.0).wrapping_add(1) & t.0)
        };
        Some(ElementSet(s))
    })
}

/// Exhaustive check over `T` ascending, `S ⊆ T` ascending, then `x ∉ T`
/// ascending; the first violation found is returned.
pub fn check_monotone_submodular(
    f: &dyn SetFunction,
    counter: &mut OracleCounter,
) -> Result<Verdict, TestbedError> {
    let n = f.ground_size();
    if n > MAX_CHECK_GROUND {
        return Err(TestbedError::GroundTooLarge {
            n,
            limit: MAX_CHECK_GROUND,
            op: "submodularity check",
        });
    }
    let table = (0..1u64 << n)
        .map(|m| f.eval(ElementSet(m), counter))
        .collect::<Result<Vec<_>, _>>()?;
    let val = |s: ElementSet| &table[s.0 as usize];
    let ground = ElementSet::full(n);
    for t in (0..1u64 << n).map(ElementSet) {
        for s in submasks(t) {
            if val(s) > val(t) {
                return Ok(Verdict {
                    holds: false,
                    witness: Some(Witness::Monotonicity { s, t }),
                    evaluations: table.len() as u64,
                });
            }
            for x in ElementSet(ground.0 & !t.0).iter() {
                if val(s.with(x)) - val(s) < val(t.with(x)) - val(t) {
                    let witness = Witness::Submodularity { s, t, x };
                    return Ok(Verdict {
                        holds: false,
                        witness: Some(witness),
                        evaluations: table.len() as u64,
                    });
                }
            }
        }
    }
    Ok(Verdict {
        holds: true,
        witness: None,
        evaluations: table.len() as u64,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub set: ElementSet,
    #[serde(with = "serde_rational")]
    pub value: Rational,
}

/// Higher value wins; equal values go to the lexicographically smaller set.
fn better(a: &(ElementSet, BigUint), b: &(ElementSet, BigUint)) -> bool {
    match a.1.cmp(&b.1) {
        Ordering::Greater => true,
        Ordering::Less => false,
        Ordering::Equal => a.0.lex_cmp(b.0) == Ordering::Less,
    }
}

const CHUNKS: u64 = 64;

/// Maximum of `f` over all independent sets. One oracle call per
/// independent set; chunks are evaluated in parallel and their counts summed.
pub fn brute_force_opt(
    instance: &CoverageInstance,
    counter: &mut OracleCounter,
) -> Result<Solution, TestbedError> {
    let n = instance.n();
    if n > MAX_BRUTE_GROUND {
        return Err(TestbedError::GroundTooLarge {
            n,
            limit: MAX_BRUTE_GROUND,
            op: "brute force",
        });
    }
    let total = 1u64 << n;
    let step = total.div_ceil(CHUNKS);
    let (best, calls) = (0..total.div_ceil(step))
        .into_par_iter()
        .map(|c| {
            let mut best: Option<(ElementSet, BigUint)> = None;
            let mut calls = 0u64;
            for m in c * step..((c + 1) * step).min(total) {
                let s = ElementSet(m);
                if !instance.matroid().is_independent(s) {
                    continue;
                }
                calls += 1;
                let cand = (s, instance.scaled_value(s));
                if best.as_ref().is_none_or(|b| better(&cand, b)) {
                    best = Some(cand);
                }
            }
            (best, calls)
        })
        .reduce(
            || (None, 0),
            |(a, ca), (b, cb)| {
                let best = match (a, b) {
                    (Some(a), Some(b)) => Some(if better(&b, &a) { b } else { a }),
                    (a, b) => a.or(b),
                };
                (best, ca + cb)
            },
        );
    counter.record(calls);
    // The empty set is always independent, so some set was evaluated.
    let (set, scaled) = best.expect("empty set is independent");
    Ok(Solution {
        set,
        value: instance.unscale(scaled),
    })
}

/// Matroid greedy: add the feasible element of largest marginal gain (ties to
/// the smallest index) while that gain is positive. Coverage functions vanish
/// on the empty set, so `f(∅)` is not queried and the call count stays within
/// `n·r`.
pub fn greedy(
    instance: &CoverageInstance,
    counter: &mut OracleCounter,
) -> Result<Solution, TestbedError> {
    let mut current = ElementSet::EMPTY;
    let mut value = Rational::default();
    loop {
        let mut best: Option<(usize, Rational)> = None;
        for x in 0..instance.n() {
            let cand = current.with(x);
            if current.contains(x) || !instance.matroid().is_independent(cand) {
                continue;
            }
            let v = instance.eval(cand, counter)?;
            if best.as_ref().is_none_or(|(_, bv)| v > *bv) {
                best = Some((x, v));
            }
        }
        match best {
            Some((x, v)) if v > value => {
                current = current.with(x);
                value = v;
            }
            _ => {
                return Ok(Solution {
                    set: current,
                    value,
                })
            }
        }
    }
}

/// Materializes every subset of a size-ℓ set and returns how many there were.
pub fn subset_query_cost(ell: u32) -> Result<u64, TestbedError> {
    if ell > MAX_SUBSET_ELL {
        return Err(TestbedError::EllTooLarge(ell));
    }
    let mut members: Vec<u32> = Vec::with_capacity(ell as usize);
    let mut count = 0u64;
    for mask in 0..1u64 << ell {
        members.clear();
        members.extend(ElementSet(mask).iter().map(|i| i as u32));
        std::hint::black_box(&members);
        count += 1;
    }
    Ok(count)
}
