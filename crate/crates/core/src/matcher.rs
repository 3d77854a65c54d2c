//! Occurrence search under gap and miss budgets.
//!
//! For every start index the search runs a depth-first extension that tries
//! gap sizes in increasing order and keeps the first complete embedding. The
//! gap budget `|p| - 1` is shared by the whole occurrence; the miss budget is
//! `⌊||p|| / 10 + 0.5⌋` with at most one miss per event. The first pattern
//! event anchors the occurrence and must keep at least one of its values.

use crate::error::{Error, Result};
use crate::model::{Event, Pattern};

/// `(event index, attribute index)` within a sequence.
pub type Cell = (usize, usize);

/// One embedding of a pattern in a sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Occurrence {
    events: Vec<usize>,
    marks: Vec<Cell>,
    misses: Vec<Cell>,
}

impl Occurrence {
    fn from_embedding(pattern: &Pattern, seq: &[Event], events: Vec<usize>) -> Self {
        let mut marks = Vec::with_capacity(pattern.size());
        let mut misses = Vec::new();
        for (pe, &si) in pattern.events().iter().zip(&events) {
            for (k, v) in pe.values() {
                if seq[si].get(k) == Some(v) {
                    marks.push((si, k));
                } else {
                    misses.push((si, k));
                }
            }
        }
        Occurrence {
            events,
            marks,
            misses,
        }
    }

    /// Sequence index of each pattern event, strictly increasing.
    pub fn events(&self) -> &[usize] {
        &self.events
    }

    /// Cells where the pattern's value equals the sequence value, event-major.
    pub fn marks(&self) -> &[Cell] {
        &self.marks
    }

    /// Cells where the pattern's value disagrees with the sequence value.
    pub fn misses(&self) -> &[Cell] {
        &self.misses
    }

    pub fn start(&self) -> usize {
        self.events[0]
    }

    pub fn end(&self) -> usize {
        self.events[self.events.len() - 1]
    }

    /// Sequence events inside the span that no pattern event claims.
    pub fn gaps(&self) -> usize {
        self.end() - self.start() + 1 - self.events.len()
    }
}

#[inline]
fn event_admissible(pe: &Event, pi: usize, misses: usize, misses_left: usize) -> bool {
    misses <= 1 && misses <= misses_left && (pi > 0 || misses < pe.size())
}

#[inline]
fn misses_between(pe: &Event, se: &Event) -> usize {
    pe.slots()
        .iter()
        .zip(se.slots())
        .filter(|(p, s)| p.is_some() && p != s)
        .count()
}

/// All occurrences of `pattern` in `seq` with the pattern's own miss budget.
pub fn search_occurrences(pattern: &Pattern, seq: &[Event]) -> Vec<Occurrence> {
    search_with_miss_budget(pattern, seq, pattern.max_misses())
}

/// Same as [`search_occurrences`] with an explicit miss budget (0 disables
/// miss matching).
pub fn search_with_miss_budget(
    pattern: &Pattern,
    seq: &[Event],
    max_misses: usize,
) -> Vec<Occurrence> {
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(pattern.len());
    for start in 0..seq.len() {
        path.clear();
        if dfs(
            pattern.events(),
            seq,
            start,
            0,
            pattern.max_gaps(),
            max_misses,
            &mut path,
        ) {
            out.push(Occurrence::from_embedding(pattern, seq, path.clone()));
        }
    }
    out
}

/// Number of start indices at which the pattern occurs.
pub fn count_occurrences(pattern: &Pattern, seq: &[Event], max_misses: usize) -> usize {
    let mut path = Vec::with_capacity(pattern.len());
    (0..seq.len())
        .filter(|&start| {
            path.clear();
            dfs(
                pattern.events(),
                seq,
                start,
                0,
                pattern.max_gaps(),
                max_misses,
                &mut path,
            )
        })
        .count()
}

fn dfs(
    pattern: &[Event],
    seq: &[Event],
    si: usize,
    pi: usize,
    gaps_left: usize,
    misses_left: usize,
    path: &mut Vec<usize>,
) -> bool {
    if si >= seq.len() || seq.len() - si < pattern.len() - pi {
        return false;
    }
    let misses = misses_between(&pattern[pi], &seq[si]);
    if !event_admissible(&pattern[pi], pi, misses, misses_left) {
        return false;
    }
    path.push(si);
    if pi + 1 == pattern.len() {
        return true;
    }
    for gap in 0..=gaps_left {
        if dfs(
            pattern,
            seq,
            si + 1 + gap,
            pi + 1,
            gaps_left - gap,
            misses_left - misses,
            path,
        ) {
            return true;
        }
    }
    path.pop();
    false
}

/// Largest sequence the brute-force oracle accepts.
pub const ORACLE_MAX_SEQUENCE: usize = 12;
/// Largest pattern the brute-force oracle accepts.
pub const ORACLE_MAX_PATTERN: usize = 4;

/// Exhaustive-enumeration oracle for [`search_occurrences`].
pub fn brute_force_occurrences(pattern: &Pattern, seq: &[Event]) -> Result<Vec<Occurrence>> {
    brute_force_with_miss_budget(pattern, seq, pattern.max_misses())
}

/// Enumerates every strictly increasing assignment of pattern events to
/// sequence indices in lexicographic order and keeps, per start index, the
/// first one satisfying the budgets.
pub fn brute_force_with_miss_budget(
    pattern: &Pattern,
    seq: &[Event],
    max_misses: usize,
) -> Result<Vec<Occurrence>> {
    if seq.len() > ORACLE_MAX_SEQUENCE || pattern.len() > ORACLE_MAX_PATTERN {
        return Err(Error::OracleScale(format!(
            "|s| = {} (max {ORACLE_MAX_SEQUENCE}), |p| = {} (max {ORACLE_MAX_PATTERN})",
            seq.len(),
            pattern.len()
        )));
    }
    let n = pattern.len();
    let mut out = Vec::new();
    for start in 0..seq.len() {
        let mut idx: Vec<usize> = (start..start + n).collect();
        if idx[n - 1] >= seq.len() {
            continue;
        }
        loop {
            if satisfies_budgets(pattern, seq, &idx, max_misses) {
                out.push(Occurrence::from_embedding(pattern, seq, idx));
                break;
            }
            if !next_combination(&mut idx, seq.len()) {
                break;
            }
        }
    }
    Ok(out)
}

// Lexicographic successor of an increasing tuple with idx[0] held fixed.
fn next_combination(idx: &mut [usize], len: usize) -> bool {
    let n = idx.len();
    for pos in (1..n).rev() {
        if idx[pos] + (n - pos) < len {
            idx[pos] += 1;
            for j in pos + 1..n {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn satisfies_budgets(pattern: &Pattern, seq: &[Event], idx: &[usize], max_misses: usize) -> bool {
    let gaps = idx[idx.len() - 1] - idx[0] + 1 - idx.len();
    if gaps > pattern.max_gaps() {
        return false;
    }
    let mut total = 0;
    for (pi, (pe, &si)) in pattern.events().iter().zip(idx).enumerate() {
        let m = misses_between(pe, &seq[si]);
        if m > 1 || (pi == 0 && m == pe.size()) {
            return false;
        }
        total += m;
    }
    total <= max_misses
}

/// Checks every occurrence invariant from first principles.
pub fn validate_occurrence(
    pattern: &Pattern,
    seq: &[Event],
    occ: &Occurrence,
    max_misses: usize,
) -> Result<()> {
    let fail = |msg: String| Err(Error::Internal(msg));
    if occ.events.len() != pattern.len() {
        return fail(format!(
            "occurrence maps {} events for a pattern of length {}",
            occ.events.len(),
            pattern.len()
        ));
    }
    if occ.events.windows(2).any(|w| w[0] >= w[1]) {
        return fail("occurrence events not strictly increasing".into());
    }
    if occ.end() >= seq.len() {
        return fail("occurrence runs past the sequence".into());
    }
    if occ.gaps() > pattern.max_gaps() {
        return fail(format!(
            "{} gaps exceed budget {}",
            occ.gaps(),
            pattern.max_gaps()
        ));
    }
    if occ.misses.len() > max_misses {
        return fail(format!(
            "{} misses exceed budget {max_misses}",
            occ.misses.len()
        ));
    }
    let mut marks = Vec::new();
    let mut misses = Vec::new();
    for (pe, &si) in pattern.events().iter().zip(&occ.events) {
        let mut event_misses = 0;
        for (k, v) in pe.values() {
            if seq[si].get(k) == Some(v) {
                marks.push((si, k));
            } else {
                misses.push((si, k));
                event_misses += 1;
            }
        }
        if event_misses > 1 {
            return fail(format!("event {si} carries {event_misses} misses"));
        }
        if si == occ.events[0] && event_misses == pe.size() {
            return fail("first event keeps none of its pattern values".into());
        }
    }
    if marks != occ.marks || misses != occ.misses {
        return fail("marks or misses disagree with the sequence".into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ValueId;

    fn ev(slots: &[Option<u32>]) -> Event {
        Event::new(slots.iter().map(|s| s.map(ValueId)).collect())
    }

    #[test]
    fn single_event_pattern_matches_every_index() {
        let s = vec![
            ev(&[Some(0), Some(1)]),
            ev(&[Some(2), Some(1)]),
            ev(&[Some(0), Some(3)]),
        ];
        let p = Pattern::new(vec![ev(&[Some(0), None])]).unwrap();
        let occ = search_occurrences(&p, &s);
        assert_eq!(
            occ.iter().map(Occurrence::start).collect::<Vec<_>>(),
            vec![0, 2]
        );
        assert!(occ.iter().all(|o| o.gaps() == 0 && o.misses().is_empty()));
        assert_eq!(occ, brute_force_occurrences(&p, &s).unwrap());
    }

    #[test]
    fn identity_pattern_covers_everything_once() {
        let s = vec![ev(&[Some(0), Some(1)]), ev(&[Some(2), Some(3)])];
        let p = Pattern::new(s.clone()).unwrap();
        let occ = search_occurrences(&p, &s);
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].marks().len(), 4);
        assert_eq!(occ, brute_force_occurrences(&p, &s).unwrap());
    }

    #[test]
    fn budget_exhaustion_yields_nothing() {
        // ||p|| = 6 allows one miss, but every event disagrees entirely
        let p = Pattern::new(vec![
            ev(&[Some(0), Some(0), Some(0)]),
            ev(&[Some(0), Some(0), Some(0)]),
        ])
        .unwrap();
        let s = vec![ev(&[Some(1), Some(1), Some(1)]); 5];
        assert!(search_occurrences(&p, &s).is_empty());
    }

    #[test]
    fn gap_budget_is_shared() {
        // |p| = 3 allows two gap events in total
        let p = Pattern::new(vec![ev(&[Some(0)]), ev(&[Some(1)]), ev(&[Some(2)])]).unwrap();
        let s: Vec<Event> = [0, 9, 1, 9, 2].iter().map(|&v| ev(&[Some(v)])).collect();
        let occ = search_occurrences(&p, &s);
        assert_eq!(occ.len(), 1);
        assert_eq!(occ[0].events(), &[0, 2, 4]);
        assert_eq!(occ[0].gaps(), 2);
        let s: Vec<Event> = [0, 9, 1, 9, 9, 2].iter().map(|&v| ev(&[Some(v)])).collect();
        assert!(search_occurrences(&p, &s).is_empty());
    }

    #[test]
    fn oracle_refuses_large_inputs() {
        let p = Pattern::new(vec![ev(&[Some(0)])]).unwrap();
        let s = vec![ev(&[Some(0)]); ORACLE_MAX_SEQUENCE + 1];
        assert!(matches!(
            brute_force_occurrences(&p, &s),
            Err(Error::OracleScale(_))
        ));
    }

    #[test]
    fn validator_rejects_tampered_occurrence() {
        let s = vec![ev(&[Some(0)]), ev(&[Some(1)])];
        let p = Pattern::new(vec![ev(&[Some(0)]), ev(&[Some(1)])]).unwrap();
        let mut occ = search_occurrences(&p, &s).remove(0);
        validate_occurrence(&p, &s, &occ, 0).unwrap();
        occ.marks.pop();
        assert!(validate_occurrence(&p, &s, &occ, 0).is_err());
    }
}
