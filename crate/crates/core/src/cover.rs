//! Greedy covering, code-stream encoding and the data-side description length.

use rayon::prelude::*;

use crate::codetable::{
    data_header_length, length_of_model, CodeTable, CoverStats, PatternId, SingletonIndex,
    UsageStats,
};
use crate::error::{Error, Result};
use crate::matcher::{search_with_miss_budget, Cell, Occurrence};
use crate::model::{Event, EventDataset, ValueId};

/// An accepted pattern occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    pub pattern: PatternId,
    pub occurrence: Occurrence,
}

/// How one sequence is covered: accepted occurrences plus singleton leftovers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cover {
    assignments: Vec<Assignment>,
    singleton_fills: Vec<(usize, usize, ValueId)>,
}

impl Cover {
    /// Accepted occurrences in acceptance order.
    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    /// `(event, attribute, value)` cells left to singletons, event-major.
    pub fn singleton_fills(&self) -> &[(usize, usize, ValueId)] {
        &self.singleton_fills
    }

    pub fn misses(&self) -> impl Iterator<Item = (PatternId, Cell)> + '_ {
        self.assignments
            .iter()
            .flat_map(|a| a.occurrence.misses().iter().map(move |&c| (a.pattern, c)))
    }

    /// Adds this cover's code counts to `stats`.
    pub fn contribute(&self, index: &SingletonIndex, stats: &mut CoverStats) {
        for &(_, k, v) in &self.singleton_fills {
            stats.singleton_usage[index.index(k, v)] += 1;
        }
        for a in &self.assignments {
            *stats.patterns.entry(a.pattern).or_default() += assignment_stats(&a.occurrence);
        }
    }

    /// Removes this cover's code counts from `stats`.
    pub fn retract(&self, index: &SingletonIndex, stats: &mut CoverStats) {
        for &(_, k, v) in &self.singleton_fills {
            stats.singleton_usage[index.index(k, v)] -= 1;
        }
        for a in &self.assignments {
            let entry = stats.patterns.entry(a.pattern).or_default();
            *entry -= assignment_stats(&a.occurrence);
            if *entry == UsageStats::default() {
                stats.patterns.remove(&a.pattern);
            }
        }
    }
}

fn assignment_stats(occ: &Occurrence) -> UsageStats {
    UsageStats {
        usage: 1,
        gaps: occ.gaps() as u64,
        fills: occ.events().len() as u64 - 1,
        misses: occ.misses().len() as u64,
    }
}

/// Covers `seq` from precomputed occurrence lists already in cover order.
pub(crate) fn cover_from_occurrences<'a, I>(seq: &[Event], arity: usize, ordered: I) -> Cover
where
    I: IntoIterator<Item = (PatternId, &'a [Occurrence])>,
{
    let total = seq.len() * arity;
    let mut marked = vec![false; total];
    let mut count = 0;
    let mut assignments = Vec::new();
    'patterns: for (id, occs) in ordered {
        for occ in occs {
            if occ.marks().iter().any(|&(e, k)| marked[e * arity + k]) {
                continue;
            }
            for &(e, k) in occ.marks() {
                marked[e * arity + k] = true;
            }
            count += occ.marks().len();
            assignments.push(Assignment {
                pattern: id,
                occurrence: occ.clone(),
            });
            if count == total {
                break 'patterns;
            }
        }
    }
    let mut singleton_fills = Vec::with_capacity(total - count);
    for (e, event) in seq.iter().enumerate() {
        for (k, v) in event.values() {
            if !marked[e * arity + k] {
                singleton_fills.push((e, k, v));
            }
        }
    }
    Cover {
        assignments,
        singleton_fills,
    }
}

/// Greedy cover of one sequence: patterns in cover order, each occurrence
/// accepted iff its marks are still free, leftovers to singletons.
pub fn cover_sequence(table: &CodeTable, seq: &[Event]) -> Cover {
    let order = table.cover_order();
    let found: Vec<(PatternId, Vec<Occurrence>)> = order
        .iter()
        .map(|&i| {
            let e = &table.entries()[i];
            (
                e.id,
                search_with_miss_budget(&e.pattern, seq, table.miss_budget(&e.pattern)),
            )
        })
        .collect();
    cover_from_occurrences(
        seq,
        table.arity(),
        found.iter().map(|(id, occs)| (*id, occs.as_slice())),
    )
}

/// Covers every sequence in parallel; results are in sequence order.
pub fn cover_dataset(table: &CodeTable, data: &EventDataset) -> Vec<Cover> {
    data.sequences()
        .par_iter()
        .map(|s| cover_sequence(table, s))
        .collect()
}

/// Sums the code counts of a set of covers.
pub fn aggregate_stats(table: &CodeTable, covers: &[Cover]) -> CoverStats {
    let mut stats = CoverStats::new(table.singletons().len());
    for c in covers {
        c.contribute(table.singletons(), &mut stats);
    }
    stats
}

/// One code in a sequence's code stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CodeToken {
    Pattern(PatternId),
    Gap(PatternId),
    Fill(PatternId),
    /// Missing value of the pattern at the given attribute.
    Miss(PatternId, usize),
    /// Dense singleton index, see [`SingletonIndex`].
    Singleton(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CodeStream {
    pub tokens: Vec<CodeToken>,
}

impl CodeStream {
    /// Code counts implied by the tokens.
    pub fn stats(&self, singletons: usize) -> CoverStats {
        let mut stats = CoverStats::new(singletons);
        for t in &self.tokens {
            match *t {
                CodeToken::Pattern(id) => stats.patterns.entry(id).or_default().usage += 1,
                CodeToken::Gap(id) => stats.patterns.entry(id).or_default().gaps += 1,
                CodeToken::Fill(id) => stats.patterns.entry(id).or_default().fills += 1,
                CodeToken::Miss(id, _) => stats.patterns.entry(id).or_default().misses += 1,
                CodeToken::Singleton(g) => stats.singleton_usage[g] += 1,
            }
        }
        stats
    }
}

#[derive(Clone, Copy)]
enum Owner {
    Assignment(usize),
    Singleton(usize),
}

/// Serializes a cover into codes: repeatedly take the first unencoded cell in
/// event-major order and emit the codes of whatever owns it.
pub fn encode_cover(seq: &[Event], table: &CodeTable, cover: &Cover) -> Result<CodeStream> {
    let arity = table.arity();
    let index = table.singletons();
    let mut owner: Vec<Option<Owner>> = vec![None; seq.len() * arity];
    let mut claim = |e: usize, k: usize, o: Owner| -> Result<()> {
        let slot = owner
            .get_mut(e * arity + k)
            .ok_or_else(|| Error::Internal(format!("cell ({e}, {k}) outside the sequence")))?;
        if slot.is_some() {
            return Err(Error::Internal(format!("cell ({e}, {k}) covered twice")));
        }
        *slot = Some(o);
        Ok(())
    };
    for (a, asg) in cover.assignments.iter().enumerate() {
        for &(e, k) in asg.occurrence.marks() {
            claim(e, k, Owner::Assignment(a))?;
        }
    }
    for &(e, k, v) in &cover.singleton_fills {
        if seq[e].get(k) != Some(v) {
            return Err(Error::Internal(format!(
                "singleton fill disagrees at ({e}, {k})"
            )));
        }
        claim(e, k, Owner::Singleton(index.index(k, v)))?;
    }

    let mut encoded = vec![false; owner.len()];
    let mut tokens = Vec::new();
    for cell in 0..owner.len() {
        if encoded[cell] {
            continue;
        }
        match owner[cell] {
            None => {
                if seq[cell / arity].get(cell % arity).is_some() {
                    return Err(Error::Internal(format!(
                        "cell ({}, {}) is not covered",
                        cell / arity,
                        cell % arity
                    )));
                }
            }
            Some(Owner::Singleton(g)) => {
                tokens.push(CodeToken::Singleton(g));
                encoded[cell] = true;
            }
            Some(Owner::Assignment(a)) => {
                let asg = &cover.assignments[a];
                emit_occurrence(asg.pattern, &asg.occurrence, &mut tokens);
                for &(e, k) in asg.occurrence.marks() {
                    encoded[e * arity + k] = true;
                }
            }
        }
    }
    Ok(CodeStream { tokens })
}

fn emit_occurrence(id: PatternId, occ: &Occurrence, tokens: &mut Vec<CodeToken>) {
    let miss_at = |event: usize| occ.misses().iter().find(|c| c.0 == event).map(|c| c.1);
    let events = occ.events();
    tokens.push(CodeToken::Pattern(id));
    if let Some(k) = miss_at(events[0]) {
        tokens.push(CodeToken::Miss(id, k));
    }
    for w in events.windows(2) {
        tokens.extend(std::iter::repeat_n(CodeToken::Gap(id), w[1] - w[0] - 1));
        tokens.push(CodeToken::Fill(id));
        if let Some(k) = miss_at(w[1]) {
            tokens.push(CodeToken::Miss(id, k));
        }
    }
}

/// Rebuilds a sequence of `len` complete events from its code stream.
pub fn decode(stream: &CodeStream, table: &CodeTable, len: usize) -> Result<Vec<Event>> {
    let arity = table.arity();
    let bad = |msg: String| Error::Internal(format!("undecodable stream: {msg}"));
    let mut grid: Vec<Option<ValueId>> = vec![None; len * arity];
    let mut cursor = 0;
    let mut tokens = stream.tokens.iter().peekable();
    while let Some(&token) = tokens.next() {
        while cursor < grid.len() && grid[cursor].is_some() {
            cursor += 1;
        }
        if cursor == grid.len() {
            return Err(bad("tokens left after the sequence is complete".into()));
        }
        let (event, attr) = (cursor / arity, cursor % arity);
        match token {
            CodeToken::Singleton(g) => {
                if g >= table.singletons().len() {
                    return Err(bad(format!("unknown singleton {g}")));
                }
                let (k, v) = table.singletons().cell(g);
                if k != attr {
                    return Err(bad(format!(
                        "singleton of attribute {k} at attribute {attr}"
                    )));
                }
                grid[cursor] = Some(v);
            }
            CodeToken::Pattern(id) => {
                let pattern = &table
                    .get(id)
                    .ok_or_else(|| bad(format!("unknown pattern {}", id.0)))?
                    .pattern;
                let mut offsets = vec![0usize; pattern.len()];
                let mut missed: Vec<(usize, usize)> = Vec::new();
                let mut take_miss = |j: usize,
                                     tokens: &mut std::iter::Peekable<
                    std::slice::Iter<'_, CodeToken>,
                >| {
                    if let Some(&&CodeToken::Miss(mid, k)) = tokens.peek() {
                        if mid == id {
                            tokens.next();
                            missed.push((j, k));
                        }
                    }
                };
                take_miss(0, &mut tokens);
                for j in 1..pattern.len() {
                    let mut step = 1;
                    loop {
                        match tokens.next() {
                            Some(&CodeToken::Gap(g)) if g == id => step += 1,
                            Some(&CodeToken::Fill(f)) if f == id => break,
                            other => {
                                return Err(bad(format!("expected gap/fill, found {other:?}")))
                            }
                        }
                    }
                    offsets[j] = offsets[j - 1] + step;
                    take_miss(j, &mut tokens);
                }
                let marks: Vec<(usize, usize, ValueId)> = pattern
                    .cells()
                    .filter(|&(j, k, _)| !missed.contains(&(j, k)))
                    .collect();
                let &(j0, k0, _) = marks
                    .first()
                    .ok_or_else(|| bad("occurrence without marks".into()))?;
                if k0 != attr || offsets[j0] > event {
                    return Err(bad("occurrence does not start at the cursor".into()));
                }
                let anchor = event - offsets[j0];
                for (j, k, v) in marks {
                    let e = anchor + offsets[j];
                    let slot = grid
                        .get_mut(e * arity + k)
                        .filter(|_| e < len)
                        .ok_or_else(|| bad("occurrence runs past the sequence".into()))?;
                    if slot.is_some() {
                        return Err(bad(format!("cell ({e}, {k}) decoded twice")));
                    }
                    *slot = Some(v);
                }
            }
            other => return Err(bad(format!("stray {other:?}"))),
        }
    }
    if grid.iter().any(Option::is_none) {
        return Err(bad("stream ends before the sequence is complete".into()));
    }
    Ok(grid
        .chunks(arity.max(1))
        .map(|c| Event::new(c.to_vec()))
        .collect())
}

/// `L(S | P)`: covers every sequence, installs the fresh statistics into
/// `table` and returns the code-stream bits plus the dataset header.
pub fn length_of_data(data: &EventDataset, table: &mut CodeTable) -> f64 {
    let covers = cover_dataset(table, data);
    let stats = aggregate_stats(table, &covers);
    table.install_stats(&stats);
    table.code_stream_length() + data_header_length(data)
}

/// `L(P) + L(S | P)` from a single covering pass.
pub fn total_description_length(data: &EventDataset, table: &mut CodeTable) -> f64 {
    let data_bits = length_of_data(data, table);
    length_of_model(table, data) + data_bits
}
