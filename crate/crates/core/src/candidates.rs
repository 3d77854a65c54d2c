//! Candidate construction: pairwise merges, gap variations and Candidate Order.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::codetable::PatternId;
use crate::cover::Cover;
use crate::model::{max_misses_for_size, Event, Pattern, ValueId};

/// All valid patterns obtained by merging the events of `p1` and `p2`.
///
/// A merge keeps each parent's event order and may place an event of each
/// parent into the same merged event. Each parent tolerates at most
/// `|p_i| - 1` foreign events inside its own span. Colliding cells with
/// different values yield one candidate per kept value; every collision is
/// charged as a miss of the result, at most one per event and within the
/// result's miss budget. Results equal to a parent are dropped.
pub fn combine(p1: &Pattern, p2: &Pattern) -> BTreeSet<Pattern> {
    let mut out = BTreeSet::new();
    if p1.arity() != p2.arity() {
        return out;
    }
    let mut walk = Merge {
        a: p1.events(),
        b: p2.events(),
        events: Vec::with_capacity(p1.len() + p2.len()),
        conflicts: 0,
        out: &mut out,
    };
    walk.step(0, 0, 0, 0);
    out.remove(p1);
    out.remove(p2);
    out
}

struct Merge<'a> {
    a: &'a [Event],
    b: &'a [Event],
    events: Vec<Event>,
    conflicts: usize,
    out: &'a mut BTreeSet<Pattern>,
}

impl Merge<'_> {
    // i, j: next event of each parent; fa, fb: foreign events inside each open span
    fn step(&mut self, i: usize, j: usize, fa: usize, fb: usize) {
        let (na, nb) = (self.a.len(), self.b.len());
        if i == na && j == nb {
            let p = Pattern::from_events_unchecked(self.events.clone());
            if self.conflicts <= max_misses_for_size(p.size()) {
                self.out.insert(p);
            }
            return;
        }
        let a_open = i > 0 && i < na;
        let b_open = j > 0 && j < nb;
        if i < na {
            let fb2 = fb + b_open as usize;
            if fb2 < nb {
                self.events.push(self.a[i].clone());
                self.step(i + 1, j, fa, fb2);
                self.events.pop();
            }
        }
        if j < nb {
            let fa2 = fa + a_open as usize;
            if fa2 < na {
                self.events.push(self.b[j].clone());
                self.step(i, j + 1, fa2, fb);
                self.events.pop();
            }
        }
        if i < na && j < nb {
            for (event, conflict) in overlay(&self.a[i], &self.b[j]) {
                self.events.push(event);
                self.conflicts += conflict as usize;
                self.step(i + 1, j + 1, fa, fb);
                self.conflicts -= conflict as usize;
                self.events.pop();
            }
        }
    }
}

// Merged events of two aligned events; more than one conflicting cell is
// rejected outright since an event carries at most one miss.
fn overlay(x: &Event, y: &Event) -> Vec<(Event, bool)> {
    let mut merged = x.clone();
    let mut conflict = None;
    for (k, v) in y.values() {
        match x.get(k) {
            None => merged.set(k, Some(v)),
            Some(u) if u == v => {}
            Some(_) => {
                if conflict.is_some() {
                    return Vec::new();
                }
                conflict = Some((k, v));
            }
        }
    }
    match conflict {
        None => vec![(merged, false)],
        Some((k, v)) => {
            let mut other = merged.clone();
            other.set(k, Some(v));
            vec![(merged, true), (other, true)]
        }
    }
}

/// A candidate with its support estimate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub pattern: Pattern,
    pub estimated_support: u64,
}

/// Candidate Order: higher support first, then longer, then canonical.
pub fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    b.estimated_support
        .cmp(&a.estimated_support)
        .then(b.pattern.len().cmp(&a.pattern.len()))
        .then_with(|| a.pattern.cmp(&b.pattern))
}

/// Combines every unordered pair (self-pairs included) of `patterns` that
/// `allowed` admits, and returns the deduplicated candidates in Candidate
/// Order. A candidate's support estimate is the smaller parent support,
/// maximized over the pairs that produce it.
pub fn generate_candidates<F>(patterns: &[(Pattern, u64)], allowed: F) -> Vec<Candidate>
where
    F: Fn(usize, usize) -> bool + Sync,
{
    let n = patterns.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i..n).map(move |j| (i, j)))
        .filter(|&(i, j)| allowed(i, j))
        .collect();
    let merged = pairs
        .par_iter()
        .map(|&(i, j)| {
            let support = patterns[i].1.min(patterns[j].1);
            combine(&patterns[i].0, &patterns[j].0)
                .into_iter()
                .map(|p| (p, support))
                .collect::<BTreeMap<_, _>>()
        })
        .reduce(BTreeMap::new, |mut acc, part| {
            for (p, s) in part {
                let slot = acc.entry(p).or_insert(0);
                *slot = (*slot).max(s);
            }
            acc
        });
    let mut out: Vec<Candidate> = merged
        .into_iter()
        .map(|(pattern, estimated_support)| Candidate {
            pattern,
            estimated_support,
        })
        .collect();
    out.sort_by(candidate_order);
    out
}

/// Per-pattern counts of singleton-covered values in gap events, keyed by
/// `(insert position, attribute, value)`. Position `j` is the gap between
/// pattern events `j - 1` and `j`. A value counts once per usage.
pub type GapValueCounts = BTreeMap<PatternId, BTreeMap<(usize, usize, ValueId), u64>>;

pub fn gap_value_counts(covers: &[Cover], arity: usize, lens: &[usize]) -> GapValueCounts {
    let mut out: GapValueCounts = BTreeMap::new();
    for (cover, &len) in covers.iter().zip(lens) {
        let mut singleton = vec![None; len * arity];
        for &(e, k, v) in cover.singleton_fills() {
            singleton[e * arity + k] = Some(v);
        }
        for a in cover.assignments() {
            let events = a.occurrence.events();
            let mut seen = BTreeSet::new();
            for (j, w) in events.windows(2).enumerate() {
                for e in w[0] + 1..w[1] {
                    for k in 0..arity {
                        if let Some(v) = singleton[e * arity + k] {
                            seen.insert((j + 1, k, v));
                        }
                    }
                }
            }
            let counts = out.entry(a.pattern).or_default();
            for key in seen {
                *counts.entry(key).or_insert(0) += 1;
            }
        }
    }
    out
}

/// Extensions of `pattern` by one single-value event inserted at a gap
/// position, for every `(position, attribute)` whose most frequent gap value
/// was seen in at least `threshold * usage` usages.
pub fn variations(
    pattern: &Pattern,
    counts: &BTreeMap<(usize, usize, ValueId), u64>,
    usage: u64,
    threshold: f64,
) -> BTreeSet<Pattern> {
    let mut best: BTreeMap<(usize, usize), (u64, ValueId)> = BTreeMap::new();
    for (&(pos, k, v), &c) in counts {
        let slot = best.entry((pos, k)).or_insert((c, v));
        if c > slot.0 {
            *slot = (c, v);
        }
    }
    let mut out = BTreeSet::new();
    for ((pos, k), (c, v)) in best {
        if c == 0 || (c as f64) < threshold * usage as f64 || pos == 0 || pos >= pattern.len() {
            continue;
        }
        let mut events = pattern.events().to_vec();
        events.insert(pos, Event::single(pattern.arity(), k, v));
        if let Ok(p) = Pattern::new(events) {
            out.insert(p);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(values: &[u32]) -> Pattern {
        Pattern::new(values.iter().map(|&v| Event::full([v])).collect()).unwrap()
    }

    fn ev(slots: &[Option<u32>]) -> Event {
        Event::new(slots.iter().map(|s| s.map(ValueId)).collect())
    }

    #[test]
    fn univariate_four_candidates() {
        let (a, b, c, d) = (0, 1, 2, 3);
        let got = combine(&uni(&[a, b]), &uni(&[c, d]));
        let want: BTreeSet<Pattern> = [
            uni(&[a, b, c, d]),
            uni(&[a, c, b, d]),
            uni(&[c, a, d, b]),
            uni(&[c, d, a, b]),
        ]
        .into_iter()
        .collect();
        assert_eq!(got, want);
    }

    #[test]
    fn self_combination_does_not_reproduce_parent() {
        let p = uni(&[0, 1]);
        let got = combine(&p, &p);
        assert!(!got.contains(&p));
        assert!(got.contains(&uni(&[0, 1, 0, 1])));
        assert!(got.contains(&uni(&[0, 0, 1, 1])));
    }

    #[test]
    fn multivariate_overlay_and_conflicts() {
        let p1 = Pattern::new(vec![ev(&[Some(0), None]), ev(&[Some(1), None])]).unwrap();
        let p2 = Pattern::new(vec![ev(&[None, Some(0)]), ev(&[None, Some(1)])]).unwrap();
        let got = combine(&p1, &p2);
        let full = Pattern::new(vec![ev(&[Some(0), Some(0)]), ev(&[Some(1), Some(1)])]).unwrap();
        assert!(got.contains(&full));
        // a conflict costs one miss, which a size-3 result cannot afford
        let q = Pattern::new(vec![ev(&[Some(0), None]), ev(&[Some(2), None])]).unwrap();
        let got = combine(&p1, &q);
        let conflicted = Pattern::new(vec![
            ev(&[Some(0), None]),
            ev(&[Some(0), None]),
            ev(&[Some(1), None]),
        ])
        .unwrap();
        assert!(!got.contains(&conflicted));
        let overlaid = Pattern::new(vec![
            ev(&[Some(0), None]),
            ev(&[Some(1), None]),
            ev(&[Some(2), None]),
        ])
        .unwrap();
        assert!(got.contains(&overlaid));
    }

    #[test]
    fn conflict_allowed_within_budget() {
        // size-5 results may carry one miss
        let p1 = Pattern::new(vec![ev(&[Some(0), Some(0), Some(0)])]).unwrap();
        let p2 = Pattern::new(vec![
            ev(&[Some(1), Some(0), Some(0)]),
            ev(&[Some(2), Some(2), None]),
        ])
        .unwrap();
        let got = combine(&p1, &p2);
        let keep_p2 = Pattern::new(vec![
            ev(&[Some(1), Some(0), Some(0)]),
            ev(&[Some(2), Some(2), None]),
        ])
        .unwrap();
        assert!(!got.contains(&keep_p2), "equal to a parent");
        let keep_p1 = Pattern::new(vec![
            ev(&[Some(0), Some(0), Some(0)]),
            ev(&[Some(2), Some(2), None]),
        ])
        .unwrap();
        assert!(got.contains(&keep_p1));
    }

    #[test]
    fn candidate_order_and_filter() {
        let pats = vec![(uni(&[0]), 5), (uni(&[1]), 3)];
        assert!(generate_candidates(&pats, |_, _| false).is_empty());
        let c = generate_candidates(&pats, |_, _| true);
        // [0,0] has support 5, every pair with 1 has support 3
        assert_eq!(c[0].pattern, uni(&[0, 0]));
        assert_eq!(c[0].estimated_support, 5);
        for w in c.windows(2) {
            assert_eq!(candidate_order(&w[0], &w[1]), Ordering::Less);
        }
        let rest: BTreeSet<Pattern> = c[1..].iter().map(|c| c.pattern.clone()).collect();
        let want: BTreeSet<Pattern> = [uni(&[0, 1]), uni(&[1, 0]), uni(&[1, 1])]
            .into_iter()
            .collect();
        assert_eq!(rest, want);
    }

    #[test]
    fn variation_threshold() {
        let p = uni(&[0, 1]);
        let mut counts = BTreeMap::new();
        counts.insert((1, 0, ValueId(7)), 7);
        counts.insert((1, 0, ValueId(8)), 2);
        let got = variations(&p, &counts, 10, 0.5);
        assert_eq!(got.into_iter().collect::<Vec<_>>(), vec![uni(&[0, 7, 1])]);
        assert!(variations(&p, &counts, 20, 0.5).is_empty());
        assert!(variations(&p, &BTreeMap::new(), 10, 0.5).is_empty());
    }
}
