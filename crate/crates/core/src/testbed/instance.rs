use std::fmt;

use indexmap::IndexMap;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::TestbedError;
use crate::exact::rational::{parse_rational, to_fraction_string};
use crate::exact::Rational;

/// Largest ground set an instance may have (sets are 64-bit masks).
pub const MAX_GROUND: usize = 64;

/// A subset of the ground set, as a bitmask over element indices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementSet(pub u64);

impl ElementSet {
    pub const EMPTY: ElementSet = ElementSet(0);

    pub fn full(n: usize) -> ElementSet {
        if n >= 64 {
            ElementSet(u64::MAX)
        } else {
            ElementSet((1u64 << n) - 1)
        }
    }

    pub fn singleton(i: usize) -> ElementSet {
        ElementSet(1u64 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> ElementSet {
        ElementSet(indices.into_iter().fold(0, |m, i| m | (1u64 << i)))
    }

    pub fn contains(self, i: usize) -> bool {
        i < 64 && self.0 >> i & 1 == 1
    }

    pub fn with(self, i: usize) -> ElementSet {
        ElementSet(self.0 | 1u64 << i)
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn is_subset_of(self, other: ElementSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Indices in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                return None;
            }
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        })
    }

    /// Order on ascending index sequences: `{0,2} < {1}` and `{0} < {0,1}`.
    pub fn lex_cmp(self, other: ElementSet) -> std::cmp::Ordering {
        self.iter().cmp(other.iter())
    }
}

impl Serialize for ElementSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ElementSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let indices = Vec::<usize>::deserialize(d)?;
        if let Some(i) = indices.iter().find(|&&i| i >= MAX_GROUND) {
            return Err(serde::de::Error::custom(format!(
                "element index {i} out of range"
            )));
        }
        Ok(ElementSet::from_indices(indices))
    }
}

impl fmt::Display for ElementSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Matroid {
    Uniform { rank: usize },
    Partition { blocks: Vec<(ElementSet, usize)> },
}

impl Matroid {
    pub fn is_independent(&self, s: ElementSet) -> bool {
        match self {
            Matroid::Uniform { rank } => s.len() <= *rank,
            Matroid::Partition { blocks } => blocks
                .iter()
                .all(|(b, cap)| ElementSet(s.0 & b.0).len() <= *cap),
        }
    }

    pub fn rank(&self) -> usize {
        match self {
            Matroid::Uniform { rank } => *rank,
            Matroid::Partition { blocks } => blocks.iter().map(|(b, cap)| b.len().min(*cap)).sum(),
        }
    }
}

/// Weighted coverage function on a named ground set, plus a matroid.
///
/// Weights are held over a common denominator so set values are sums of
/// integers; `f(S)` is the scaled sum divided by that denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageInstance {
    items: Vec<String>,
    weights: Vec<Rational>,
    elements: Vec<String>,
    covers: Vec<Vec<usize>>,
    matroid: Matroid,
    cover_words: Vec<Vec<u64>>,
    scaled: Vec<BigUint>,
    small: Option<Vec<u64>>,
    denominator: BigUint,
}

impl CoverageInstance {
    /// Builds and validates an instance from indexed parts.
    pub fn new(
        items: Vec<(String, Rational)>,
        elements: Vec<(String, Vec<usize>)>,
        matroid: Matroid,
    ) -> Result<Self, TestbedError> {
        let n = elements.len();
        if n > MAX_GROUND {
            return Err(TestbedError::GroundTooLarge {
                n,
                limit: MAX_GROUND,
                op: "instance",
            });
        }
        for (name, w) in &items {
            if !w.is_positive() {
                return Err(TestbedError::NonPositiveWeight {
                    item: name.clone(),
                    weight: to_fraction_string(w),
                });
            }
        }
        let m = items.len();
        for (name, cov) in &elements {
            if let Some(&bad) = cov.iter().find(|&&i| i >= m) {
                return Err(TestbedError::UnknownItem {
                    element: name.clone(),
                    item: bad.to_string(),
                });
            }
        }
        match &matroid {
            Matroid::Uniform { rank } if *rank > n => {
                return Err(TestbedError::RankTooLarge { rank: *rank, n })
            }
            Matroid::Partition { blocks } => {
                let mut seen = ElementSet::EMPTY;
                for (b, _) in blocks {
                    if let Some(i) = b.iter().find(|&i| i >= n) {
                        return Err(TestbedError::BlockUnknownMember(i.to_string()));
                    }
                    if let Some(i) = ElementSet(seen.0 & b.0).iter().next() {
                        return Err(TestbedError::BlockOverlap(elements[i].0.clone()));
                    }
                    seen = ElementSet(seen.0 | b.0);
                }
                if let Some(i) = ElementSet(ElementSet::full(n).0 & !seen.0).iter().next() {
                    return Err(TestbedError::BlockMissing(elements[i].0.clone()));
                }
            }
            Matroid::Uniform { .. } => {}
        }

        let denominator = items
            .iter()
            .fold(BigInt::one(), |d, (_, w)| d.lcm(w.denom()));
        let scaled: Vec<BigUint> = items
            .iter()
            .map(|(_, w)| {
                (w.numer() * (&denominator / w.denom()))
                    .to_biguint()
                    .expect("positive weight")
            })
            .collect();
        let total: BigUint = scaled.iter().sum();
        let small = total.to_u64().map(|_| {
            scaled
                .iter()
                .map(|v| v.to_u64().expect("bounded by total"))
                .collect()
        });
        let words = m.div_ceil(64).max(1);
        let cover_words = elements
            .iter()
            .map(|(_, cov)| {
                let mut w = vec![0u64; words];
                for &i in cov {
                    w[i / 64] |= 1 << (i % 64);
                }
                w
            })
            .collect();
        let (items, weights) = items.into_iter().unzip();
        let (elements, covers) = elements.into_iter().unzip();
        Ok(CoverageInstance {
            items,
            weights,
            elements,
            covers,
            matroid,
            cover_words,
            scaled,
            small,
            denominator: denominator.to_biguint().expect("positive"),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, TestbedError> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| TestbedError::Format(e.to_string()))?;
        Self::try_from(file)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from(self)).expect("instance serializes")
    }

    pub fn n(&self) -> usize {
        self.elements.len()
    }

    pub fn items(&self) -> &[String] {
        &self.items
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    /// Item indices covered by element `i`.
    pub fn cover(&self, i: usize) -> &[usize] {
        &self.covers[i]
    }

    pub fn matroid(&self) -> &Matroid {
        &self.matroid
    }

    pub fn ground(&self) -> ElementSet {
        ElementSet::full(self.n())
    }

    pub fn total_weight(&self) -> Rational {
        self.weights.iter().sum()
    }

    pub fn names(&self, s: ElementSet) -> Vec<String> {
        s.iter().map(|i| self.elements[i].clone()).collect()
    }

    /// `f(S)` times the common denominator. Does not touch any counter.
    pub(crate) fn scaled_value(&self, s: ElementSet) -> BigUint {
        let words = self.cover_words.first().map_or(1, Vec::len);
        let mut union = vec![0u64; words];
        for i in s.iter() {
            for (u, c) in union.iter_mut().zip(&self.cover_words[i]) {
                *u |= c;
            }
        }
        let covered = union
            .iter()
            .enumerate()
            .flat_map(|(w, &bits)| ElementSet(bits).iter().map(move |b| w * 64 + b));
        match &self.small {
            Some(small) => BigUint::from(covered.map(|i| small[i]).sum::<u64>()),
            None => covered.map(|i| &self.scaled[i]).sum(),
        }
    }

    pub(crate) fn unscale(&self, v: BigUint) -> Rational {
        Rational::new(v.into(), self.denominator.clone().into())
    }
}

/// On-disk shape of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub universe: IndexMap<String, WeightText>,
    pub ground: IndexMap<String, Vec<String>>,
    pub matroid: MatroidFile,
}

/// A weight written either as a JSON string or a JSON number; both are read exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightText {
    Text(String),
    Number(serde_json::Number),
}

impl WeightText {
    fn as_text(&self) -> String {
        match self {
            WeightText::Text(s) => s.clone(),
            WeightText::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum MatroidFile {
    Uniform { rank: usize },
    Partition { blocks: Vec<BlockFile> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockFile {
    pub members: Vec<String>,
    pub capacity: usize,
}

impl TryFrom<InstanceFile> for CoverageInstance {
    type Error = TestbedError;

    fn try_from(file: InstanceFile) -> Result<Self, TestbedError> {
        let items = file
            .universe
            .iter()
            .map(|(name, w)| {
                let text = w.as_text();
                parse_rational(&text)
                    .map(|q| (name.clone(), q))
                    .map_err(|e| TestbedError::Weight {
                        item: name.clone(),
                        message: e.to_string(),
                    })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let elements = file
            .ground
            .iter()
            .map(|(name, cov)| {
                cov.iter()
                    .map(|item| {
                        file.universe
                            .get_index_of(item)
                            .ok_or_else(|| TestbedError::UnknownItem {
                                element: name.clone(),
                                item: item.clone(),
                            })
                    })
                    .collect::<Result<Vec<_>, _>>()
                    .map(|c| (name.clone(), c))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let matroid = match file.matroid {
            MatroidFile::Uniform { rank } => Matroid::Uniform { rank },
            MatroidFile::Partition { blocks } => Matroid::Partition {
                blocks: blocks
                    .iter()
                    .map(|b| {
                        b.members
                            .iter()
                            .map(|m| {
                                file.ground
                                    .get_index_of(m)
                                    .ok_or_else(|| TestbedError::BlockUnknownMember(m.clone()))
                            })
                            .collect::<Result<Vec<_>, _>>()
                            .and_then(|idx| {
                                let set = ElementSet::from_indices(idx.iter().copied());
                                if set.len() != idx.len() {
                                    return Err(TestbedError::BlockOverlap(b.members.join(",")));
                                }
                                Ok((set, b.capacity))
                            })
                    })
                    .collect::<Result<_, _>>()?,
            },
        };
        CoverageInstance::new(items, elements, matroid)
    }
}

impl From<&CoverageInstance> for InstanceFile {
    fn from(inst: &CoverageInstance) -> Self {
        let universe = inst
            .items
            .iter()
            .zip(&inst.weights)
            .map(|(name, w)| (name.clone(), WeightText::Text(to_fraction_string(w))))
            .collect();
        let ground = inst
            .elements
            .iter()
            .zip(&inst.covers)
            .map(|(name, cov)| {
                (
                    name.clone(),
                    cov.iter().map(|&i| inst.items[i].clone()).collect(),
                )
            })
            .collect();
        let matroid = match &inst.matroid {
            Matroid::Uniform { rank } => MatroidFile::Uniform { rank: *rank },
            Matroid::Partition { blocks } => MatroidFile::Partition {
                blocks: blocks
                    .iter()
                    .map(|(b, cap)| BlockFile {
                        members: inst.names(*b),
                        capacity: *cap,
                    })
                    .collect(),
            },
        };
        InstanceFile {
            universe,
            ground,
            matroid,
        }
    }
}
