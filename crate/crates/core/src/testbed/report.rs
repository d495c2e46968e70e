use serde::{Deserialize, Serialize};

use super::{
    brute_force_opt, check_monotone_submodular, greedy, CoverageInstance, OracleCounter,
    TestbedError, Verdict, MAX_CHECK_GROUND,
};
use crate::exact::rational::{pow2, serde_rational};
use crate::exact::{
    cmp_certified, enclose_to_width, Comparison, Enclosure, Precision, Rational, Real,
};
use crate::phi::rho;
use crate::planner::{ell_star, EpsSpec};

/// The ℓ-parameterised local-search output `S_[ℓ]` and its potential `g′`
/// have no implementable definition here, so they are reported as absent.
pub const NOT_IMPLEMENTED_LABEL: &str =
    "S_[l] (non-oblivious local search output, potential g'): not implemented; only the target rho(l)*f(OPT) is reported";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCalls {
    pub check: u64,
    pub brute_force: u64,
    pub greedy: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioReport {
    pub eps: EpsSpec,
    pub seed: Option<u64>,
    pub n: usize,
    pub rank: usize,
    /// Exhaustive check; absent above the check size limit.
    pub monotone_submodular: Option<Verdict>,
    pub opt_set: Vec<String>,
    #[serde(with = "serde_rational")]
    pub opt_value: Rational,
    pub ell_star: u64,
    #[serde(with = "serde_rational")]
    pub rho: Rational,
    /// Enclosure of `1 - 1/e - ε`.
    pub threshold: Enclosure,
    /// Certified comparison of `ρ(ℓ_star)` against the threshold.
    pub rho_vs_threshold: Comparison,
    /// `ρ(ℓ_star)·f(OPT)`.
    #[serde(with = "serde_rational")]
    pub target: Rational,
    pub greedy_set: Vec<String>,
    #[serde(with = "serde_rational")]
    pub greedy_value: Rational,
    /// `greedy / OPT`, absent when `OPT = 0`.
    pub greedy_ratio: Option<String>,
    pub oracle_calls: OracleCalls,
    pub local_search_output: String,
}

impl RatioReport {
    pub fn rho_certified(&self) -> bool {
        self.rho_vs_threshold.is_ge()
    }

    pub fn greedy_ratio_value(&self) -> Option<Rational> {
        (!num_traits::Zero::is_zero(&self.opt_value)).then(|| &self.greedy_value / &self.opt_value)
    }
}

pub fn ratio_report(
    instance: &CoverageInstance,
    eps: &EpsSpec,
    seed: Option<u64>,
    policy: Precision,
) -> Result<RatioReport, TestbedError> {
    let mut calls = OracleCalls::default();
    let monotone_submodular = if instance.n() <= MAX_CHECK_GROUND {
        let mut c = OracleCounter::new();
        let v = check_monotone_submodular(instance, &mut c)?;
        calls.check = c.count();
        Some(v)
    } else {
        None
    };
    let mut c = OracleCounter::new();
    let opt = brute_force_opt(instance, &mut c)?;
    calls.brute_force = c.count();
    let mut c = OracleCounter::new();
    let g = greedy(instance, &mut c)?;
    calls.greedy = c.count();

    let ell = ell_star(eps, policy)?;
    let rho = rho(ell).map_err(crate::planner::PlanError::from)?;
    let threshold_real = Real::int(1) - Real::inv_e() - eps.value().clone();
    let threshold = enclose_to_width(&threshold_real, &Rational::new(1.into(), pow2(40)), policy)?;
    let rho_vs_threshold =
        cmp_certified(&Real::exact(rho.clone()), &threshold_real, policy).comparison;
    let greedy_ratio = (!num_traits::Zero::is_zero(&opt.value))
        .then(|| crate::exact::rational::to_fraction_string(&(&g.value / &opt.value)));
    Ok(RatioReport {
        eps: eps.clone(),
        seed,
        n: instance.n(),
        rank: instance.matroid().rank(),
        monotone_submodular,
        opt_set: instance.names(opt.set),
        target: &rho * &opt.value,
        opt_value: opt.value,
        ell_star: ell,
        rho,
        threshold,
        rho_vs_threshold,
        greedy_set: instance.names(g.set),
        greedy_value: g.value,
        greedy_ratio,
        oracle_calls: calls,
        local_search_output: NOT_IMPLEMENTED_LABEL.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rational::ratio;

    fn three() -> CoverageInstance {
        CoverageInstance::from_json(
            r#"{"universe": {"a": 1, "b": 1, "c": 1}, "ground": {"e1": ["a", "b"], "e2": ["b", "c"], "e3": ["c"]},
                "matroid": {"type": "uniform", "rank": 2}}"#,
        )
        .unwrap()
    }

    #[test]
    fn report_examples() {
        let r = ratio_report(
            &three(),
            &"0.1".parse().unwrap(),
            Some(5),
            Precision::default(),
        )
        .unwrap();
        assert_eq!((r.ell_star, r.rho.clone()), (2, ratio(5, 9)));
        assert!(r.rho_certified());
        assert_eq!(r.target, ratio(5, 3));
        assert_eq!(r.opt_value, ratio(3, 1));
        assert_eq!(r.greedy_ratio.as_deref(), Some("1"));
        assert_eq!(
            r.oracle_calls,
            OracleCalls {
                check: 8,
                brute_force: 7,
                greedy: 5
            }
        );
        assert!(r.monotone_submodular.as_ref().unwrap().holds);
        let back: RatioReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);

        let r = ratio_report(
            &three(),
            &"0.05".parse().unwrap(),
            None,
            Precision::default(),
        )
        .unwrap();
        assert_eq!((r.ell_star, r.rho.clone()), (4, ratio(369, 625)));
        assert_eq!(r.rho_vs_threshold, Comparison::Greater);
    }
}
