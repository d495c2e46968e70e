use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    brute_force_opt, greedy, CoverageInstance, ElementSet, Matroid, OracleCounter, MAX_BRUTE_GROUND,
};
use crate::exact::rational::ratio;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomParams {
    /// Ground set size.
    pub n: usize,
    /// Upper bound on the universe size; the actual size is drawn from `1..=max_items`.
    pub max_items: usize,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { n: 8, max_items: 8 }
    }
}

/// A coverage instance determined entirely by `seed`: weights are multiples
/// of 1/4, each element covers each item with probability 2/5, and the matroid
/// is a uniform or a partition matroid with equal odds.
pub fn random_instance(seed: u64, params: RandomParams) -> CoverageInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = params.n.min(MAX_BRUTE_GROUND);
    let m = rng.random_range(1..=params.max_items.max(1));
    let items = (0..m)
        .map(|i| (format!("u{i}"), ratio(rng.random_range(1..=12), 4)))
        .collect();
    let elements = (0..n)
        .map(|e| {
            (
                format!("e{e}"),
                (0..m).filter(|_| rng.random_bool(0.4)).collect(),
            )
        })
        .collect();
    let matroid = if n == 0 || rng.random_bool(0.5) {
        Matroid::Uniform {
            rank: rng.random_range(0..=n),
        }
    } else {
        let k = rng.random_range(1..=n.min(3));
        let mut blocks = vec![ElementSet::EMPTY; k];
        for (e, block) in (0..n).map(|e| (e, e % k)) {
            // The first k elements seed distinct blocks; the rest land anywhere.
            let b = if e < k { block } else { rng.random_range(0..k) };
            blocks[b] = blocks[b].with(e);
        }
        Matroid::Partition {
            blocks: blocks
                .into_iter()
                .map(|b| (b, rng.random_range(1..=b.len())))
                .collect(),
        }
    };
    CoverageInstance::new(items, elements, matroid).expect("generated instance is valid")
}

/// Scans seeds `start..start + tries` for an instance on which greedy falls
/// short of the optimum.
pub fn find_gap_instance(
    start: u64,
    tries: u64,
    params: RandomParams,
) -> Option<(u64, CoverageInstance)> {
    (start..start.saturating_add(tries)).find_map(|seed| {
        let inst = random_instance(seed, params);
        let mut c = OracleCounter::new();
        let g = greedy(&inst, &mut c).ok()?;
        let opt = brute_force_opt(&inst, &mut c).ok()?;
        (g.value < opt.value).then_some((seed, inst))
    })
}
