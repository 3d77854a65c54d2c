//! Co-occurrence filtering of pattern pairs with weighted MinHash.
//!
//! Every pattern (singletons included) gets a weight map from global segment
//! index to the number of its accepted occurrences touching that segment.
//! Sketches are built with improved consistent weighted sampling, whose
//! per-sample collision probability equals the weighted Jaccard similarity.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::codetable::PatternId;
use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::model::ValueId;

/// Segment index to occurrence count.
pub type WeightMap = BTreeMap<usize, u64>;

pub const DEFAULT_SEGMENT_LEN: usize = 20;
pub const DEFAULT_SAMPLES: usize = 64;

/// Weight maps of every table row from the latest covers.
#[derive(Clone, Debug, Default)]
pub struct SegmentWeights {
    /// Indexed by dense singleton index.
    pub singletons: Vec<WeightMap>,
    pub patterns: BTreeMap<PatternId, WeightMap>,
}

/// First global segment index of each sequence, plus the total count.
pub fn segment_offsets(lens: &[usize], segment_len: usize) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(lens.len());
    let mut total = 0;
    for &n in lens {
        offsets.push(total);
        total += n.div_ceil(segment_len);
    }
    (offsets, total)
}

/// Builds weight maps for singletons and mined patterns. An occurrence
/// spanning several segments increments each of them.
pub fn segment_weights(
    covers: &[Cover],
    lens: &[usize],
    singleton_of: impl Fn(usize, ValueId) -> usize,
    singletons: usize,
    segment_len: usize,
) -> SegmentWeights {
    let (offsets, _) = segment_offsets(lens, segment_len);
    let mut out = SegmentWeights {
        singletons: vec![WeightMap::new(); singletons],
        patterns: BTreeMap::new(),
    };
    for (cover, &base) in covers.iter().zip(&offsets) {
        for &(e, k, v) in cover.singleton_fills() {
            *out.singletons[singleton_of(k, v)]
                .entry(base + e / segment_len)
                .or_insert(0) += 1;
        }
        for a in cover.assignments() {
            let map = out.patterns.entry(a.pattern).or_default();
            let first = a.occurrence.start() / segment_len;
            let last = a.occurrence.end() / segment_len;
            for seg in first..=last {
                *map.entry(base + seg).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Σ min / Σ max over the union of keys; 0 when both maps are empty.
pub fn weighted_jaccard(w1: &WeightMap, w2: &WeightMap) -> f64 {
    let (mut num, mut den) = (0u64, 0u64);
    let mut a = w1.iter().peekable();
    let mut b = w2.iter().peekable();
    loop {
        match (a.peek(), b.peek()) {
            (Some(&(ka, &va)), Some(&(kb, &vb))) => {
                if ka == kb {
                    num += va.min(vb);
                    den += va.max(vb);
                    a.next();
                    b.next();
                } else if ka < kb {
                    den += va;
                    a.next();
                } else {
                    den += vb;
                    b.next();
                }
            }
            (Some(&(_, &va)), None) => {
                den += va;
                a.next();
            }
            (None, Some(&(_, &vb))) => {
                den += vb;
                b.next();
            }
            (None, None) => break,
        }
    }
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

// Uniform draws in (0, 1) keyed by (seed, sample, element).
struct Draws(u64);

impl Draws {
    fn new(seed: u64, sample: usize, element: usize) -> Self {
        Draws(splitmix64(
            splitmix64(seed ^ splitmix64(sample as u64)) ^ element as u64,
        ))
    }

    fn next(&mut self) -> f64 {
        self.0 = splitmix64(self.0);
        ((self.0 >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    fn gamma2(&mut self) -> f64 {
        -(self.next().ln() + self.next().ln())
    }
}

/// One consistent weighted sample: the winning element and its quantized
/// weight level.
pub type Sample = (usize, i64);

/// `k` improved consistent weighted samples of `w`.
pub fn icws_signature(w: &WeightMap, k: usize, seed: u64) -> Result<Vec<Sample>> {
    if w.values().all(|&x| x == 0) {
        return Err(Error::NoSignature);
    }
    Ok((0..k)
        .map(|s| {
            let mut best = (f64::INFINITY, (0usize, 0i64));
            for (&elem, &weight) in w {
                if weight == 0 {
                    continue;
                }
                let mut d = Draws::new(seed, s, elem);
                let r = d.gamma2();
                let c = d.gamma2();
                let beta = d.next();
                let t = ((weight as f64).ln() / r + beta).floor();
                let y = (r * (t - beta)).exp();
                let a = c / (y * r.exp());
                if a < best.0 {
                    best = (a, (elem, t as i64));
                }
            }
            best.1
        })
        .collect())
}

/// A pattern's weight map with its signature.
#[derive(Clone, Debug, PartialEq)]
pub struct PositionSketch {
    weights: WeightMap,
    signature: Vec<Sample>,
    seed: u64,
}

impl PositionSketch {
    pub fn new(weights: WeightMap, k: usize, seed: u64) -> Result<Self> {
        let signature = icws_signature(&weights, k, seed)?;
        Ok(PositionSketch {
            weights,
            signature,
            seed,
        })
    }

    pub fn weights(&self) -> &WeightMap {
        &self.weights
    }

    pub fn signature(&self) -> &[Sample] {
        &self.signature
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.values().sum()
    }

    /// Fraction of agreeing samples.
    pub fn similarity(&self, other: &PositionSketch) -> Result<f64> {
        if self.seed != other.seed || self.signature.len() != other.signature.len() {
            return Err(Error::IncomparableSketches);
        }
        if self.signature.is_empty() {
            return Ok(0.0);
        }
        let same = self
            .signature
            .iter()
            .zip(&other.signature)
            .filter(|(a, b)| a == b)
            .count();
        Ok(same as f64 / self.signature.len() as f64)
    }
}

/// How a pair's similarity threshold is chosen.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PairThreshold {
    /// Fixed similarity in `[0, 1]`.
    Similarity(f64),
    /// Minimum co-occurrence count, converted per pair into
    /// `min(1, count / larger total weight)`.
    MinCooccur(f64),
}

impl PairThreshold {
    pub fn for_pair(&self, a: &PositionSketch, b: &PositionSketch) -> f64 {
        match *self {
            PairThreshold::Similarity(th) => th,
            PairThreshold::MinCooccur(count) => {
                let heavier = a.total_weight().max(b.total_weight());
                if heavier == 0 {
                    1.0
                } else {
                    (count / heavier as f64).min(1.0)
                }
            }
        }
    }

    fn is_zero(&self) -> bool {
        match *self {
            PairThreshold::Similarity(th) | PairThreshold::MinCooccur(th) => th <= 0.0,
        }
    }
}

/// Unordered index pairs `(i, j)` with `i <= j` whose estimated similarity
/// reaches the threshold. A missing sketch (unused pattern) passes only a
/// zero threshold.
pub fn promising_pairs(
    sketches: &[Option<PositionSketch>],
    threshold: PairThreshold,
) -> Result<BTreeSet<(usize, usize)>> {
    let n = sketches.len();
    let keep_all = threshold.is_zero();
    let rows: Vec<Result<Vec<(usize, usize)>>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut row = Vec::new();
            for j in i..n {
                let pass = match (&sketches[i], &sketches[j]) {
                    _ if keep_all => true,
                    (Some(a), Some(b)) => a.similarity(b)? >= threshold.for_pair(a, b),
                    _ => false,
                };
                if pass {
                    row.push((i, j));
                }
            }
            Ok(row)
        })
        .collect();
    let mut out = BTreeSet::new();
    for row in rows {
        out.extend(row?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(pairs: &[(usize, u64)]) -> WeightMap {
        pairs.iter().copied().collect()
    }

    #[test]
    fn jaccard_examples() {
        let a = map(&[(0, 2), (1, 1)]);
        let b = map(&[(0, 1), (1, 3)]);
        assert!((weighted_jaccard(&a, &b) - 0.4).abs() < 1e-12);
        assert_eq!(weighted_jaccard(&a, &a), 1.0);
        assert_eq!(weighted_jaccard(&a, &map(&[(5, 1)])), 0.0);
        assert_eq!(weighted_jaccard(&map(&[]), &map(&[])), 0.0);
    }

    #[test]
    fn segment_counts() {
        assert_eq!(segment_offsets(&[45], 20), (vec![0], 3));
        assert_eq!(segment_offsets(&[20, 21, 1], 20), (vec![0, 1, 3], 4));
    }

    #[test]
    fn signatures_are_deterministic_and_guarded() {
        let a = map(&[(0, 2), (3, 1)]);
        let s1 = PositionSketch::new(a.clone(), 32, 7).unwrap();
        let s2 = PositionSketch::new(a.clone(), 32, 7).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(s1.similarity(&s2).unwrap(), 1.0);
        let s3 = PositionSketch::new(a, 32, 8).unwrap();
        assert!(matches!(
            s1.similarity(&s3),
            Err(Error::IncomparableSketches)
        ));
        assert!(matches!(
            icws_signature(&map(&[]), 4, 0),
            Err(Error::NoSignature)
        ));
    }

    #[test]
    fn estimate_tracks_true_similarity() {
        let a = map(&[(0, 2), (1, 1)]);
        let b = map(&[(0, 1), (1, 3)]);
        let sa = PositionSketch::new(a, 256, 11).unwrap();
        let sb = PositionSketch::new(b, 256, 11).unwrap();
        let est = sa.similarity(&sb).unwrap();
        // 0.1 is about 3.3 standard deviations of a 256-sample binomial at 0.4
        assert!((est - 0.4).abs() <= 0.1, "estimate {est}");
    }

    #[test]
    fn pair_filter() {
        let same = map(&[(0, 1), (1, 1)]);
        let far = map(&[(9, 4)]);
        let sk = |m: &WeightMap| Some(PositionSketch::new(m.clone(), 64, 1).unwrap());
        let sketches = vec![sk(&same), sk(&same), sk(&far), None];
        let pairs = promising_pairs(&sketches, PairThreshold::Similarity(1.0)).unwrap();
        assert!(pairs.contains(&(0, 1)));
        assert!(!pairs.contains(&(0, 2)));
        assert!(!pairs.contains(&(3, 3)));
        let all = promising_pairs(&sketches, PairThreshold::Similarity(0.0)).unwrap();
        assert_eq!(all.len(), 10);
        let cooc = promising_pairs(&sketches, PairThreshold::MinCooccur(2.0)).unwrap();
        assert!(cooc.contains(&(0, 1)));
        assert!(!cooc.contains(&(0, 2)));
    }
}
