//! Synthetic datasets with planted patterns, and scoring against the plant.

use std::collections::BTreeSet;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cover::Cover;
use crate::error::{Error, Result};
use crate::matcher::Cell;
use crate::model::{is_subsequence, Event, EventDataset, Pattern, Schema, ValueId};

/// Ratio the least frequent value of an attribute must reach relative to the
/// most frequent one in the background.
pub const BALANCE_RATIO: f64 = 0.9;

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticSpec {
    pub num_sequences: usize,
    pub sequence_length: usize,
    pub num_attributes: usize,
    pub values_per_attribute: usize,
    pub num_patterns: usize,
    pub values_per_pattern: usize,
    /// Share of all events each planted pattern occupies.
    pub coverage_fraction: f64,
    pub planted_misses_per_pattern: usize,
    /// Spread occurrences over random gaps instead of contiguous events.
    pub inject_gaps: bool,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            num_sequences: 50,
            sequence_length: 20,
            num_attributes: 5,
            values_per_attribute: 100,
            num_patterns: 5,
            values_per_pattern: 5,
            coverage_fraction: 0.10,
            planted_misses_per_pattern: 2,
            inject_gaps: false,
            seed: 0,
        }
    }
}

impl SyntheticSpec {
    pub fn total_events(&self) -> usize {
        self.num_sequences * self.sequence_length
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Unplantable(m));
        if self.num_sequences == 0
            || self.sequence_length == 0
            || self.num_attributes == 0
            || self.values_per_attribute == 0
            || self.values_per_pattern == 0
        {
            return bad("all sizes must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.coverage_fraction) {
            return bad(format!(
                "coverage {} outside [0, 1]",
                self.coverage_fraction
            ));
        }
        if self.coverage_fraction * (self.total_events() as f64) < self.num_patterns as f64 {
            return bad("coverage too small to plant every pattern once".into());
        }
        if self.values_per_pattern > self.sequence_length * self.num_attributes {
            return bad("pattern values do not fit into one sequence".into());
        }
        if self.num_patterns > 0
            && self.values_per_pattern > 1
            && self.values_per_attribute < 2
            && self.planted_misses_per_pattern > 0
        {
            return bad("a miss needs a second value to substitute".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedOccurrence {
    pub pattern: usize,
    pub sequence: usize,
    pub events: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlantedMiss {
    pub pattern: usize,
    pub sequence: usize,
    pub event: usize,
    pub attribute: usize,
    /// Value written in place of the pattern's value.
    pub value: ValueId,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PlantedTruth {
    pub patterns: Vec<Pattern>,
    pub occurrences: Vec<PlantedOccurrence>,
    pub misses: Vec<PlantedMiss>,
}

/// Uniform background rebalanced until every attribute's value counts are
/// within the balance ratio (or differ by at most one).
pub fn balanced_background(rng: &mut impl Rng, slots: usize, values: usize) -> Vec<u32> {
    let mut column: Vec<u32> = (0..slots)
        .map(|_| rng.random_range(0..values as u32))
        .collect();
    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); values];
    for (i, &v) in column.iter().enumerate() {
        holders[v as usize].push(i);
    }
    loop {
        let (hi, lo) = extremes(&holders);
        let (max, min) = (holders[hi].len(), holders[lo].len());
        if max - min <= 1 || min as f64 >= BALANCE_RATIO * max as f64 {
            break;
        }
        let pick = rng.random_range(0..max);
        let slot = holders[hi].swap_remove(pick);
        column[slot] = lo as u32;
        holders[lo].push(slot);
    }
    column
}

fn extremes(holders: &[Vec<usize>]) -> (usize, usize) {
    let mut hi = 0;
    let mut lo = 0;
    for (v, h) in holders.iter().enumerate() {
        if h.len() > holders[hi].len() {
            hi = v;
        }
        if h.len() < holders[lo].len() {
            lo = v;
        }
    }
    (hi, lo)
}

fn random_pattern(rng: &mut impl Rng, spec: &SyntheticSpec) -> Pattern {
    let arity = spec.num_attributes;
    let lo = spec.values_per_pattern.div_ceil(arity);
    let hi = spec.values_per_pattern.min(spec.sequence_length).max(lo);
    let len = rng.random_range(lo..=hi);
    let mut cells: Vec<(usize, usize)> =
        (0..len).map(|e| (e, rng.random_range(0..arity))).collect();
    let mut rest: Vec<(usize, usize)> = (0..len)
        .flat_map(|e| (0..arity).map(move |k| (e, k)))
        .filter(|c| !cells.contains(c))
        .collect();
    rest.shuffle(rng);
    cells.extend(rest.into_iter().take(spec.values_per_pattern - len));
    let mut events = vec![Event::new(vec![None; arity]); len];
    for (e, k) in cells {
        let v = ValueId(rng.random_range(0..spec.values_per_attribute as u32));
        events[e].set(k, Some(v));
    }
    Pattern::from_events_unchecked(events)
}

fn placement(rng: &mut impl Rng, len: usize, seq_len: usize, gaps: bool) -> Option<Vec<usize>> {
    if len > seq_len {
        return None;
    }
    let spare = if gaps {
        (len - 1).min(seq_len - len)
    } else {
        0
    };
    let extra = if spare > 0 {
        rng.random_range(0..=spare)
    } else {
        0
    };
    let span = len + extra;
    let start = rng.random_range(0..=seq_len - span);
    let mut inner: Vec<usize> = (1..span - 1).collect();
    inner.shuffle(rng);
    let mut picked: Vec<usize> = inner.into_iter().take(len.saturating_sub(2)).collect();
    picked.push(0);
    if len > 1 {
        picked.push(span - 1);
    }
    picked.sort_unstable();
    Some(picked.into_iter().map(|o| start + o).collect())
}

/// Builds a dataset and its planted ground truth; identical for equal specs.
pub fn generate_dataset(spec: &SyntheticSpec) -> Result<(EventDataset, PlantedTruth)> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (n, len, arity) = (
        spec.num_sequences,
        spec.sequence_length,
        spec.num_attributes,
    );
    let schema = Schema::anonymous(&vec![spec.values_per_attribute; arity])?;
    let total = n * len;

    let columns: Vec<Vec<u32>> = (0..arity)
        .map(|_| balanced_background(&mut rng, total, spec.values_per_attribute))
        .collect();
    let mut grid: Vec<Vec<Event>> = (0..n)
        .map(|i| {
            (0..len)
                .map(|j| Event::full(columns.iter().map(|c| c[i * len + j])))
                .collect()
        })
        .collect();

    let mut truth = PlantedTruth::default();
    while truth.patterns.len() < spec.num_patterns {
        let p = random_pattern(&mut rng, spec);
        if !truth.patterns.contains(&p) {
            truth.patterns.push(p);
        }
    }

    let mut taken = vec![false; total * arity];
    for (pi, p) in truth.patterns.iter().enumerate() {
        let want = ((spec.coverage_fraction * total as f64) / p.len() as f64)
            .round()
            .max(1.0) as usize;
        let mut placed = 0;
        let mut attempts = 0;
        while placed < want {
            attempts += 1;
            if attempts > 1000 * want {
                return Err(Error::Unplantable(format!(
                    "placed {placed} of {want} occurrences of pattern {pi}"
                )));
            }
            let seq = rng.random_range(0..n);
            let Some(events) = placement(&mut rng, p.len(), len, spec.inject_gaps) else {
                return Err(Error::Unplantable(format!(
                    "pattern {pi} longer than a sequence"
                )));
            };
            let slot = |e: usize, k: usize| (seq * len + e) * arity + k;
            let cells: Vec<(usize, usize, ValueId)> =
                p.cells().map(|(j, k, v)| (events[j], k, v)).collect();
            if cells.iter().any(|&(e, k, _)| taken[slot(e, k)]) {
                continue;
            }
            for &(e, k, v) in &cells {
                taken[slot(e, k)] = true;
                grid[seq][e].set(k, Some(v));
            }
            truth.occurrences.push(PlantedOccurrence {
                pattern: pi,
                sequence: seq,
                events,
            });
            placed += 1;
        }
    }

    for (pi, p) in truth.patterns.iter().enumerate() {
        if p.max_misses() == 0 {
            continue;
        }
        let mine: Vec<&PlantedOccurrence> = truth
            .occurrences
            .iter()
            .filter(|o| o.pattern == pi)
            .collect();
        let chosen: Vec<&&PlantedOccurrence> = mine
            .choose_multiple(&mut rng, spec.planted_misses_per_pattern)
            .collect();
        // A miss may not empty the first event: the matcher anchors there.
        let first_size = p.events()[0].size();
        let cells: Vec<(usize, usize, ValueId)> = p
            .cells()
            .filter(|&(j, _, _)| j > 0 || first_size > 1)
            .collect();
        if cells.is_empty() {
            continue;
        }
        for occ in chosen {
            let &(j, k, v) = cells.choose(&mut rng).expect("pattern has values");
            let e = occ.events[j];
            let mut w = rng.random_range(0..spec.values_per_attribute as u32 - 1);
            if w >= v.0 {
                w += 1;
            }
            grid[occ.sequence][e].set(k, Some(ValueId(w)));
            truth.misses.push(PlantedMiss {
                pattern: pi,
                sequence: occ.sequence,
                event: e,
                attribute: k,
                value: ValueId(w),
            });
        }
    }

    Ok((EventDataset::new(schema, grid)?, truth))
}

/// Scores of a mining result against the planted truth.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub planted_patterns: usize,
    pub recovered_patterns: usize,
    pub planted_misses: usize,
    pub detected_misses: usize,
    pub mined_patterns: usize,
    /// Mined patterns that match no planted pattern.
    pub spurious_patterns: usize,
}

impl Evaluation {
    pub fn recovery(&self) -> f64 {
        ratio(self.recovered_patterns, self.planted_patterns)
    }

    pub fn miss_detection(&self) -> f64 {
        ratio(self.detected_misses, self.planted_misses)
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// `mined` recovers `planted` when either is a subsequence of the other and
/// the mined one has at most one value fewer.
pub fn recovers(mined: &Pattern, planted: &Pattern) -> bool {
    mined.size() + 1 >= planted.size()
        && (is_subsequence(planted.events(), mined.events()).unwrap_or(false)
            || is_subsequence(mined.events(), planted.events()).unwrap_or(false))
}

/// `(sequence, event, attribute)` of every miss in a set of covers.
pub fn cover_misses(covers: &[Cover]) -> BTreeSet<(usize, usize, usize)> {
    covers
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.misses().map(move |(_, (e, k)): (_, Cell)| (i, e, k)))
        .collect()
}

pub fn evaluate(
    mined: &[Pattern],
    reported_misses: &BTreeSet<(usize, usize, usize)>,
    truth: &PlantedTruth,
) -> Evaluation {
    let recovered_patterns = truth
        .patterns
        .iter()
        .filter(|q| mined.iter().any(|m| recovers(m, q)))
        .count();
    let spurious_patterns = mined
        .iter()
        .filter(|m| !truth.patterns.iter().any(|q| recovers(m, q)))
        .count();
    let detected_misses = truth
        .misses
        .iter()
        .filter(|m| reported_misses.contains(&(m.sequence, m.event, m.attribute)))
        .count();
    Evaluation {
        planted_patterns: truth.patterns.len(),
        recovered_patterns,
        planted_misses: truth.misses.len(),
        detected_misses,
        mined_patterns: mined.len(),
        spurious_patterns,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcher::search_occurrences;

    fn small() -> SyntheticSpec {
        SyntheticSpec {
            num_sequences: 10,
            sequence_length: 20,
            values_per_attribute: 20,
            ..SyntheticSpec::default()
        }
    }

    #[test]
    fn background_is_balanced() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for &(slots, values) in &[(1000, 100), (1000, 7), (55, 10)] {
            let col = balanced_background(&mut rng, slots, values);
            let mut counts = vec![0usize; values];
            for v in col {
                counts[v as usize] += 1;
            }
            let (max, min) = (*counts.iter().max().unwrap(), *counts.iter().min().unwrap());
            assert!(max - min <= 1 || min as f64 >= BALANCE_RATIO * max as f64);
        }
    }

    #[test]
    fn defaults_plant_ten_misses() {
        let spec = SyntheticSpec::default();
        let (data, truth) = generate_dataset(&spec).unwrap();
        assert_eq!(data.total_events(), 1000);
        assert_eq!(truth.patterns.len(), 5);
        assert_eq!(truth.misses.len(), 10);
        for (pi, p) in truth.patterns.iter().enumerate() {
            assert_eq!(p.size(), 5);
            let events: usize = truth
                .occurrences
                .iter()
                .filter(|o| o.pattern == pi)
                .map(|o| o.events.len())
                .sum();
            assert!(
                (events as i64 - 100).abs() <= p.len() as i64,
                "pattern {pi} covers {events}"
            );
        }
    }

    #[test]
    fn planted_occurrences_are_found_by_the_matcher() {
        for gaps in [false, true] {
            let spec = SyntheticSpec {
                inject_gaps: gaps,
                ..small()
            };
            let (data, truth) = generate_dataset(&spec).unwrap();
            for occ in &truth.occurrences {
                let p = &truth.patterns[occ.pattern];
                let found = search_occurrences(p, data.sequence(occ.sequence));
                assert!(
                    found.iter().any(|o| o.start() == occ.events[0]),
                    "planted occurrence not matched"
                );
            }
        }
    }

    #[test]
    fn deterministic_and_noise_only() {
        let a = generate_dataset(&small()).unwrap();
        let b = generate_dataset(&small()).unwrap();
        assert_eq!(a, b);
        let spec = SyntheticSpec {
            num_patterns: 0,
            ..small()
        };
        let (_, truth) = generate_dataset(&spec).unwrap();
        assert_eq!(truth, PlantedTruth::default());
    }

    #[test]
    fn unplantable_spec() {
        let spec = SyntheticSpec {
            coverage_fraction: 0.001,
            ..small()
        };
        assert!(matches!(
            generate_dataset(&spec),
            Err(Error::Unplantable(_))
        ));
    }

    #[test]
    fn evaluation_edges() {
        let (_, truth) = generate_dataset(&small()).unwrap();
        let all: BTreeSet<_> = truth
            .misses
            .iter()
            .map(|m| (m.sequence, m.event, m.attribute))
            .collect();
        let exact = evaluate(&truth.patterns, &all, &truth);
        assert_eq!(exact.recovery(), 1.0);
        assert_eq!(exact.miss_detection(), 1.0);
        assert_eq!(exact.spurious_patterns, 0);
        let none = evaluate(&[], &BTreeSet::new(), &truth);
        assert_eq!(none.recovery(), 0.0);
        assert_eq!(none.miss_detection(), 0.0);
        let mut rev = truth.patterns.clone();
        rev.reverse();
        assert_eq!(evaluate(&rev, &all, &truth), exact);
    }
}
