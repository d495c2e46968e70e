use serde::{Deserialize, Serialize};

use super::{CoverageInstance, ElementSet, TestbedError};
use crate::exact::Rational;

/// Number of value-oracle calls made so far.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCounter {
    count: u64,
}

impl OracleCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub(crate) fn record(&mut self, calls: u64) {
        self.count += calls;
    }
}

/// A set function on ground `{0, .., n-1}`, queried through a counter.
pub trait SetFunction: Sync {
    fn ground_size(&self) -> usize;

    fn element_name(&self, i: usize) -> String {
        i.to_string()
    }

    /// `f(S)`, without counting. Callers go through [`SetFunction::eval`].
    fn value(&self, s: ElementSet) -> Rational;

    fn eval(&self, s: ElementSet, counter: &mut OracleCounter) -> Result<Rational, TestbedError> {
        if !s.is_subset_of(ElementSet::full(self.ground_size())) {
            return Err(TestbedError::NotSubset(s));
        }
        counter.record(1);
        Ok(self.value(s))
    }
}

impl SetFunction for CoverageInstance {
    fn ground_size(&self) -> usize {
        self.n()
    }

    fn element_name(&self, i: usize) -> String {
        self.elements()[i].clone()
    }

    fn value(&self, s: ElementSet) -> Rational {
        self.unscale(self.scaled_value(s))
    }
}

/// Total weight of the items covered by `S`; one oracle call.
pub fn f_eval(
    instance: &CoverageInstance,
    s: ElementSet,
    counter: &mut OracleCounter,
) -> Result<Rational, TestbedError> {
    instance.eval(s, counter)
}

/// A set function given by its full value table, indexed by mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TabularFunction {
    names: Vec<String>,
    values: Vec<Rational>,
}

impl TabularFunction {
    /// `values[mask]` is `f` of the set with bitmask `mask`; needs `2^names.len()` entries.
    pub fn new(names: Vec<String>, values: Vec<Rational>) -> Result<Self, TestbedError> {
        if names.len() > super::MAX_CHECK_GROUND {
            return Err(TestbedError::GroundTooLarge {
                n: names.len(),
                limit: super::MAX_CHECK_GROUND,
                op: "tabular function",
            });
        }
        if values.len() != 1 << names.len() {
            return Err(TestbedError::Format(format!(
                "{} names need {} values, got {}",
                names.len(),
                1 << names.len(),
                values.len()
            )));
        }
        Ok(TabularFunction { names, values })
    }

    /// Tabulates `f` on every subset of the named ground set.
    pub fn from_fn(
        names: Vec<String>,
        f: impl Fn(ElementSet) -> Rational,
    ) -> Result<Self, TestbedError> {
        let values = (0..1u64 << names.len()).map(|m| f(ElementSet(m))).collect();
        Self::new(names, values)
    }
}

impl SetFunction for TabularFunction {
    fn ground_size(&self) -> usize {
        self.names.len()
    }

    fn element_name(&self, i: usize) -> String {
        self.names[i].clone()
    }

    fn value(&self, s: ElementSet) -> Rational {
        self.values[s.0 as usize].clone()
    }
}
