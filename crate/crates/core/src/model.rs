//! Dataset, schema and pattern types.
//!
//! Every attribute carries a closed, ordered list of categorical values. Values
//! are referred to by dense [`ValueId`]s assigned in declaration order, and all
//! comparisons and hashing work on those ids, never on display names.
//!
//! A dataset event has every slot filled. A pattern event may leave slots
//! empty (`None`); an empty slot matches anything.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};

/// Dense id of a value within one attribute, in schema declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueId(pub u32);

impl ValueId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attribute {
    name: String,
    values: Vec<String>,
}

impl Attribute {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }
}

/// Ordered list of categorical attributes shared by every event of a dataset.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    attributes: Vec<Attribute>,
}

impl Schema {
    pub fn new<N, V>(attributes: impl IntoIterator<Item = (N, V)>) -> Result<Self>
    where
        N: Into<String>,
        V: IntoIterator,
        V::Item: Into<String>,
    {
        let attributes: Vec<Attribute> = attributes
            .into_iter()
            .map(|(name, values)| Attribute {
                name: name.into(),
                values: values.into_iter().map(Into::into).collect(),
            })
            .collect();
        if attributes.is_empty() {
            return Err(Error::InvalidInput("schema has no attributes".into()));
        }
        let mut names = HashSet::new();
        for attr in &attributes {
            if !names.insert(attr.name.as_str()) {
                return Err(Error::InvalidInput(format!(
                    "duplicate attribute name `{}`",
                    attr.name
                )));
            }
            if attr.values.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "attribute `{}` declares no values",
                    attr.name
                )));
            }
            let mut seen = HashSet::new();
            for v in &attr.values {
                if !seen.insert(v.as_str()) {
                    return Err(Error::InvalidInput(format!(
                        "attribute `{}` declares value `{v}` twice",
                        attr.name
                    )));
                }
            }
        }
        Ok(Schema { attributes })
    }

    /// Schema whose attributes are named `a0, a1, ...` with values `v0, v1, ...`.
    pub fn anonymous(value_counts: &[usize]) -> Result<Self> {
        Schema::new(value_counts.iter().enumerate().map(|(k, &n)| {
            (
                format!("a{k}"),
                (0..n).map(|v| format!("v{v}")).collect::<Vec<_>>(),
            )
        }))
    }

    /// Number of attributes, |A|.
    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn attributes(&self) -> &[Attribute] {
        &self.attributes
    }

    pub fn attribute(&self, k: usize) -> &Attribute {
        &self.attributes[k]
    }

    /// |V_k|
    pub fn value_count(&self, k: usize) -> usize {
        self.attributes[k].values.len()
    }

    pub fn value_counts(&self) -> Vec<usize> {
        self.attributes.iter().map(|a| a.values.len()).collect()
    }

    /// Σ_k |V_k|, the number of singleton patterns.
    pub fn total_values(&self) -> usize {
        self.attributes.iter().map(|a| a.values.len()).sum()
    }

    pub fn attribute_index(&self, name: &str) -> Option<usize> {
        self.attributes.iter().position(|a| a.name == name)
    }

    pub fn value_id(&self, k: usize, name: &str) -> Option<ValueId> {
        self.attributes[k]
            .values
            .iter()
            .position(|v| v == name)
            .map(|i| ValueId(i as u32))
    }

    pub fn value_name(&self, k: usize, id: ValueId) -> &str {
        &self.attributes[k].values[id.index()]
    }

    /// Does the event conform to this schema (arity and value ranges)?
    pub fn admits(&self, event: &Event) -> bool {
        event.arity() == self.arity()
            && event
                .slots()
                .iter()
                .enumerate()
                .all(|(k, v)| v.is_none_or(|v| v.index() < self.value_count(k)))
    }
}

/// A vector of `|A|` slots, each either a value id or empty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Event(Vec<Option<ValueId>>);

impl Event {
    pub fn new(slots: Vec<Option<ValueId>>) -> Self {
        Event(slots)
    }

    /// Event with every slot filled.
    pub fn full(values: impl IntoIterator<Item = u32>) -> Self {
        Event(values.into_iter().map(|v| Some(ValueId(v))).collect())
    }

    /// Event holding a single value at attribute `k`.
    pub fn single(arity: usize, k: usize, value: ValueId) -> Self {
        let mut slots = vec![None; arity];
        slots[k] = Some(value);
        Event(slots)
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn slots(&self) -> &[Option<ValueId>] {
        &self.0
    }

    pub fn get(&self, k: usize) -> Option<ValueId> {
        self.0[k]
    }

    pub(crate) fn set(&mut self, k: usize, v: Option<ValueId>) {
        self.0[k] = v;
    }

    /// Number of non-empty slots.
    pub fn size(&self) -> usize {
        self.0.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.0.iter().all(Option::is_some)
    }

    /// Iterator over `(attribute, value)` of the non-empty slots.
    pub fn values(&self) -> impl Iterator<Item = (usize, ValueId)> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter_map(|(k, v)| v.map(|v| (k, v)))
    }
}

/// `ea ⪯ eb`: every non-empty slot of `ea` holds the same value in `eb`.
pub fn event_part_of(ea: &Event, eb: &Event) -> Result<bool> {
    if ea.arity() != eb.arity() {
        return Err(Error::InvalidInput(format!(
            "event arity mismatch: {} vs {}",
            ea.arity(),
            eb.arity()
        )));
    }
    Ok(part_of_unchecked(ea, eb))
}

#[inline]
pub(crate) fn part_of_unchecked(ea: &Event, eb: &Event) -> bool {
    ea.0.iter().zip(&eb.0).all(|(a, b)| a.is_none() || a == b)
}

/// Maximum number of missing values a pattern of `size` values tolerates:
/// `⌊size / 10 + 0.5⌋`.
pub fn max_misses_for_size(size: usize) -> usize {
    (size + 5) / 10
}

/// A sequence of partial events. Every event holds at least one value.
///
/// The derived ordering is the canonical order used for all lexicographic
/// tie-breaks: event-major, then attribute-major, empty before any value,
/// values by declaration order, and a proper prefix before its extensions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    events: Vec<Event>,
}

impl Pattern {
    pub fn new(events: Vec<Event>) -> Result<Self> {
        let Some(first) = events.first() else {
            return Err(Error::InvalidInput("pattern has no events".into()));
        };
        let arity = first.arity();
        for (i, e) in events.iter().enumerate() {
            if e.arity() != arity {
                return Err(Error::InvalidInput(format!(
                    "pattern event {i} has arity {} instead of {arity}",
                    e.arity()
                )));
            }
            if e.size() == 0 {
                return Err(Error::InvalidInput(format!(
                    "pattern event {i} has no values"
                )));
            }
        }
        Ok(Pattern { events })
    }

    pub(crate) fn from_events_unchecked(events: Vec<Event>) -> Self {
        debug_assert!(Pattern::new(events.clone()).is_ok());
        Pattern { events }
    }

    /// One-event, one-value pattern.
    pub fn singleton(arity: usize, k: usize, value: ValueId) -> Self {
        Pattern {
            events: vec![Event::single(arity, k, value)],
        }
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn arity(&self) -> usize {
        self.events[0].arity()
    }

    /// |p|, the number of events.
    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// Always false: a pattern has at least one event.
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// ||p||, the number of non-empty values.
    pub fn size(&self) -> usize {
        self.events.iter().map(Event::size).sum()
    }

    pub fn max_gaps(&self) -> usize {
        self.events.len() - 1
    }

    pub fn max_misses(&self) -> usize {
        max_misses_for_size(self.size())
    }

    pub fn is_singleton(&self) -> bool {
        self.events.len() == 1 && self.size() == 1
    }

    /// Iterator over `(event, attribute, value)` of the non-empty slots.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize, ValueId)> + '_ {
        self.events
            .iter()
            .enumerate()
            .flat_map(|(i, e)| e.values().map(move |(k, v)| (i, k, v)))
    }

    pub fn display<'a>(&'a self, schema: &'a Schema) -> PatternDisplay<'a> {
        PatternDisplay {
            pattern: self,
            schema,
        }
    }
}

pub struct PatternDisplay<'a> {
    pattern: &'a Pattern,
    schema: &'a Schema,
}

impl fmt::Display for PatternDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.pattern.events.iter().enumerate() {
            if i > 0 {
                f.write_str(" -> ")?;
            }
            f.write_str("(")?;
            let mut first = true;
            for (k, v) in e.values() {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write!(
                    f,
                    "{}={}",
                    self.schema.attribute(k).name(),
                    self.schema.value_name(k, v)
                )?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Strict subsequence relation: an increasing index assignment exists with
/// every pattern event part of its assigned sequence event. No gap or miss
/// budgets are applied.
pub fn is_subsequence(pattern: &[Event], sequence: &[Event]) -> Result<bool> {
    if let (Some(p), Some(s)) = (pattern.first(), sequence.first()) {
        if p.arity() != s.arity() {
            return Err(Error::InvalidInput(format!(
                "arity mismatch: {} vs {}",
                p.arity(),
                s.arity()
            )));
        }
    }
    // Earliest-match greedy is optimal for per-pair predicates.
    let mut rest = sequence.iter();
    Ok(pattern
        .iter()
        .all(|pe| rest.by_ref().any(|se| part_of_unchecked(pe, se))))
}

/// Total order on patterns; equal iff structurally identical.
pub fn canonical_compare(a: &Pattern, b: &Pattern) -> Ordering {
    a.cmp(b)
}

/// Ordered list of complete-event sequences over a shared schema.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventDataset {
    schema: Schema,
    sequences: Vec<Vec<Event>>,
}

impl EventDataset {
    pub fn new(schema: Schema, sequences: Vec<Vec<Event>>) -> Result<Self> {
        for (i, seq) in sequences.iter().enumerate() {
            if seq.is_empty() {
                return Err(Error::InvalidInput(format!("sequence {i} is empty")));
            }
            for (j, e) in seq.iter().enumerate() {
                if !e.is_complete() || !schema.admits(e) {
                    return Err(Error::InvalidInput(format!(
                        "event {j} of sequence {i} does not conform to the schema"
                    )));
                }
            }
        }
        Ok(EventDataset { schema, sequences })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn sequences(&self) -> &[Vec<Event>] {
        &self.sequences
    }

    pub fn sequence(&self, i: usize) -> &[Event] {
        &self.sequences[i]
    }

    /// |S|
    pub fn num_sequences(&self) -> usize {
        self.sequences.len()
    }

    /// ||S||, the total number of events.
    pub fn total_events(&self) -> usize {
        self.sequences.iter().map(Vec::len).sum()
    }

    /// ||S|| · |A|
    pub fn total_values(&self) -> usize {
        self.total_events() * self.schema.arity()
    }

    /// Occurrence count of every value, indexed `[attribute][value]`.
    pub fn value_frequencies(&self) -> Vec<Vec<usize>> {
        let mut counts: Vec<Vec<usize>> = self
            .schema
            .value_counts()
            .into_iter()
            .map(|n| vec![0; n])
            .collect();
        for e in self.sequences.iter().flatten() {
            for (k, v) in e.values() {
                counts[k][v.index()] += 1;
            }
        }
        counts
    }
}
