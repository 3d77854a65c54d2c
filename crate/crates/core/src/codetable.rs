//! Code table, usage statistics and the model-side description length.
//!
//! Code lengths are idealized Shannon lengths in bits; no bit strings are
//! materialized. Pattern codes share one distribution over every table row
//! with non-zero usage. Gap, fill and miss codes form a separate distribution
//! per mined pattern, and a miss code additionally pays `L_N(|A|)` bits for the
//! attribute index.

use std::collections::BTreeMap;
use std::ops::{AddAssign, SubAssign};

use statrs::function::factorial::ln_binomial;

use crate::error::{Error, Result};
use crate::matcher::count_occurrences;
use crate::model::{EventDataset, Pattern, Schema, ValueId};

/// Normalizing constant of the universal code for integers.
pub const RISSANEN_C0: f64 = 2.865064;

/// `L_N(n)`: bits of the MDL-optimal universal code for integers, with
/// `L_N(0) = 0`.
pub fn universal_int_length(n: u64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let mut bits = RISSANEN_C0.log2();
    let mut term = (n as f64).log2();
    while term > 0.0 {
        bits += term;
        term = term.log2();
    }
    bits
}

/// `log2 C(n, k)`, defined as 0 when `k > n` or `k == 0`.
pub fn log2_binomial(n: u64, k: u64) -> f64 {
    if k == 0 || k > n {
        return 0.0;
    }
    ln_binomial(n, k) / std::f64::consts::LN_2
}

/// Code counts of one table row, accumulated over all code streams.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UsageStats {
    pub usage: u64,
    pub gaps: u64,
    pub fills: u64,
    pub misses: u64,
}

impl UsageStats {
    /// Gap + fill + miss codes, the denominator of the per-pattern distribution.
    pub fn secondary_total(&self) -> u64 {
        self.gaps + self.fills + self.misses
    }
}

impl AddAssign for UsageStats {
    fn add_assign(&mut self, rhs: Self) {
        self.usage += rhs.usage;
        self.gaps += rhs.gaps;
        self.fills += rhs.fills;
        self.misses += rhs.misses;
    }
}

impl SubAssign for UsageStats {
    fn sub_assign(&mut self, rhs: Self) {
        self.usage -= rhs.usage;
        self.gaps -= rhs.gaps;
        self.fills -= rhs.fills;
        self.misses -= rhs.misses;
    }
}

/// Stable handle of a mined pattern; never reused within a table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternId(pub u32);

/// A row of CT*.
#[derive(Clone, Debug)]
pub struct PatternEntry {
    pub id: PatternId,
    pub pattern: Pattern,
    /// Occurrences found by the matcher over the whole dataset.
    pub support: u64,
    pub stats: UsageStats,
}

/// Aggregated code counts of a covering pass.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverStats {
    pub singleton_usage: Vec<u64>,
    pub patterns: BTreeMap<PatternId, UsageStats>,
}

impl CoverStats {
    pub fn new(singletons: usize) -> Self {
        CoverStats {
            singleton_usage: vec![0; singletons],
            patterns: BTreeMap::new(),
        }
    }

    pub fn pattern(&self, id: PatternId) -> UsageStats {
        self.patterns.get(&id).copied().unwrap_or_default()
    }
}

/// Maps `(attribute, value)` pairs to dense singleton indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingletonIndex {
    offsets: Vec<usize>,
    total: usize,
}

impl SingletonIndex {
    pub fn new(schema: &Schema) -> Self {
        let mut offsets = Vec::with_capacity(schema.arity());
        let mut total = 0;
        for k in 0..schema.arity() {
            offsets.push(total);
            total += schema.value_count(k);
        }
        SingletonIndex { offsets, total }
    }

    #[inline]
    pub fn index(&self, k: usize, v: ValueId) -> usize {
        self.offsets[k] + v.index()
    }

    /// Inverse of [`SingletonIndex::index`].
    pub fn cell(&self, g: usize) -> (usize, ValueId) {
        let k = self.offsets.partition_point(|&o| o <= g) - 1;
        (k, ValueId((g - self.offsets[k]) as u32))
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn arity(&self) -> usize {
        self.offsets.len()
    }
}

/// The model: all singletons (ST) plus the mined patterns (CT*).
#[derive(Clone, Debug)]
pub struct CodeTable {
    index: SingletonIndex,
    miss_codes: bool,
    singleton_usage: Vec<u64>,
    entries: Vec<PatternEntry>,
    next_id: u32,
}

impl CodeTable {
    /// Table holding only the singletons of `schema`, all usages zero.
    pub fn standard(schema: &Schema) -> Self {
        let index = SingletonIndex::new(schema);
        CodeTable {
            singleton_usage: vec![0; index.len()],
            index,
            miss_codes: true,
            entries: Vec::new(),
            next_id: 0,
        }
    }

    pub fn with_miss_codes(mut self, enabled: bool) -> Self {
        self.miss_codes = enabled;
        self
    }

    pub fn miss_codes(&self) -> bool {
        self.miss_codes
    }

    /// Miss budget the matcher uses for `pattern` under this table.
    pub fn miss_budget(&self, pattern: &Pattern) -> usize {
        if self.miss_codes {
            pattern.max_misses()
        } else {
            0
        }
    }

    pub fn singletons(&self) -> &SingletonIndex {
        &self.index
    }

    pub fn arity(&self) -> usize {
        self.index.arity()
    }

    pub fn singleton_usage(&self) -> &[u64] {
        &self.singleton_usage
    }

    /// CT* in insertion order.
    pub fn entries(&self) -> &[PatternEntry] {
        &self.entries
    }

    pub fn get(&self, id: PatternId) -> Option<&PatternEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn find(&self, pattern: &Pattern) -> Option<PatternId> {
        self.entries
            .iter()
            .find(|e| &e.pattern == pattern)
            .map(|e| e.id)
    }

    pub fn contains(&self, pattern: &Pattern) -> bool {
        self.find(pattern).is_some()
    }

    /// The id the next inserted pattern will receive.
    pub fn next_id(&self) -> PatternId {
        PatternId(self.next_id)
    }

    /// Adds a pattern to CT* with a known support.
    pub fn insert(&mut self, pattern: Pattern, support: u64) -> Result<PatternId> {
        if pattern.arity() != self.arity() {
            return Err(Error::InvalidInput(format!(
                "pattern arity {} does not match table arity {}",
                pattern.arity(),
                self.arity()
            )));
        }
        if pattern.is_singleton() {
            return Err(Error::InvalidInput(
                "singletons live in the standard table".into(),
            ));
        }
        if self.contains(&pattern) {
            return Err(Error::InvalidInput("pattern already in the table".into()));
        }
        let id = PatternId(self.next_id);
        self.next_id += 1;
        self.entries.push(PatternEntry {
            id,
            pattern,
            support,
            stats: UsageStats::default(),
        });
        Ok(id)
    }

    /// Adds a pattern to CT*, counting its support over `data`.
    pub fn insert_counted(&mut self, pattern: Pattern, data: &EventDataset) -> Result<PatternId> {
        let budget = self.miss_budget(&pattern);
        let support = data
            .sequences()
            .iter()
            .map(|s| count_occurrences(&pattern, s, budget) as u64)
            .sum();
        self.insert(pattern, support)
    }

    pub fn remove(&mut self, id: PatternId) -> Option<PatternEntry> {
        let pos = self.entries.iter().position(|e| e.id == id)?;
        Some(self.entries.remove(pos))
    }

    /// Entry indices in cover order: more values first, then higher support,
    /// then canonical order.
    pub fn cover_order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.entries.len()).collect();
        order.sort_by(|&a, &b| {
            cover_order_cmp(
                (&self.entries[a].pattern, self.entries[a].support),
                (&self.entries[b].pattern, self.entries[b].support),
            )
        });
        order
    }

    /// Replaces all usage statistics.
    pub fn install_stats(&mut self, stats: &CoverStats) {
        self.singleton_usage.clone_from(&stats.singleton_usage);
        for entry in &mut self.entries {
            entry.stats = stats.pattern(entry.id);
        }
    }

    pub fn stats(&self) -> CoverStats {
        CoverStats {
            singleton_usage: self.singleton_usage.clone(),
            patterns: self.entries.iter().map(|e| (e.id, e.stats)).collect(),
        }
    }

    /// Σ usage over ST and CT*.
    pub fn total_usage(&self) -> u64 {
        self.singleton_usage.iter().sum::<u64>()
            + self.entries.iter().map(|e| e.stats.usage).sum::<u64>()
    }

    pub fn code_lengths(&self) -> Result<CodeLengths> {
        let total = self.total_usage();
        if total == 0 {
            return Err(Error::UndefinedLength);
        }
        let arity = self.arity() as u64;
        let shannon = |count: u64, of: u64| (count > 0).then(|| -(count as f64 / of as f64).log2());
        let singletons = self
            .singleton_usage
            .iter()
            .map(|&u| shannon(u, total))
            .collect();
        let patterns = self
            .entries
            .iter()
            .map(|e| {
                let s = e.stats;
                let d = s.secondary_total();
                (
                    e.id,
                    PatternCodeLengths {
                        pattern: shannon(s.usage, total),
                        gap: shannon(s.gaps, d),
                        fill: shannon(s.fills, d),
                        miss: shannon(s.misses, d).map(|b| b + universal_int_length(arity)),
                    },
                )
            })
            .collect();
        Ok(CodeLengths {
            singletons,
            patterns,
        })
    }

    /// `L(CT*)` under the installed statistics.
    pub fn ct_star_length(&self) -> f64 {
        let rows: Vec<(&Pattern, UsageStats)> =
            self.entries.iter().map(|e| (&e.pattern, e.stats)).collect();
        ct_star_length(&self.index, &self.singleton_usage, &rows, self.miss_codes)
    }

    /// `L(CS)` under the installed statistics.
    pub fn code_stream_length(&self) -> f64 {
        let rows: Vec<(&Pattern, UsageStats)> =
            self.entries.iter().map(|e| (&e.pattern, e.stats)).collect();
        code_stream_length(self.arity(), &self.singleton_usage, &rows)
    }
}

pub(crate) fn cover_order_cmp(a: (&Pattern, u64), b: (&Pattern, u64)) -> std::cmp::Ordering {
    b.0.size()
        .cmp(&a.0.size())
        .then(b.1.cmp(&a.1))
        .then_with(|| a.0.cmp(b.0))
}

/// Per-pattern code lengths in bits; `None` for codes with zero count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatternCodeLengths {
    pub pattern: Option<f64>,
    pub gap: Option<f64>,
    pub fill: Option<f64>,
    pub miss: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct CodeLengths {
    singletons: Vec<Option<f64>>,
    patterns: BTreeMap<PatternId, PatternCodeLengths>,
}

impl CodeLengths {
    pub fn singleton(&self, g: usize) -> Result<f64> {
        self.singletons
            .get(g)
            .copied()
            .flatten()
            .ok_or(Error::UndefinedLength)
    }

    /// Lengths of a used pattern's codes.
    pub fn pattern(&self, id: PatternId) -> Result<PatternCodeLengths> {
        match self.patterns.get(&id) {
            Some(l) if l.pattern.is_some() => Ok(*l),
            _ => Err(Error::UndefinedLength),
        }
    }

    /// Pattern-code lengths of every used row, singletons first.
    pub fn live_pattern_lengths(&self) -> impl Iterator<Item = f64> + '_ {
        self.singletons
            .iter()
            .flatten()
            .copied()
            .chain(self.patterns.values().filter_map(|l| l.pattern))
    }
}

fn entropy_bits(count: u64, total: u64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * -(count as f64 / total as f64).log2()
    }
}

/// `L(CS)`: Σ usage·L(code_p) + gaps·L(code_g) + fills·L(code_f) + misses·L(code_m).
pub(crate) fn code_stream_length(
    arity: usize,
    singleton_usage: &[u64],
    rows: &[(&Pattern, UsageStats)],
) -> f64 {
    let total: u64 =
        singleton_usage.iter().sum::<u64>() + rows.iter().map(|(_, s)| s.usage).sum::<u64>();
    if total == 0 {
        return 0.0;
    }
    let miss_index_bits = universal_int_length(arity as u64);
    let mut bits: f64 = singleton_usage
        .iter()
        .map(|&u| entropy_bits(u, total))
        .sum();
    for (_, s) in rows {
        bits += entropy_bits(s.usage, total);
        let d = s.secondary_total();
        bits += entropy_bits(s.gaps, d) + entropy_bits(s.fills, d) + entropy_bits(s.misses, d);
        bits += s.misses as f64 * miss_index_bits;
    }
    bits
}

/// `L(CT*)`: counts, the usage distribution, and each pattern spelled out in
/// singleton codes.
pub(crate) fn ct_star_length(
    index: &SingletonIndex,
    singleton_usage: &[u64],
    rows: &[(&Pattern, UsageStats)],
    miss_codes: bool,
) -> f64 {
    let total: u64 =
        singleton_usage.iter().sum::<u64>() + rows.iter().map(|(_, s)| s.usage).sum::<u64>();
    let uniform = (index.len() as f64).log2();
    let st_code = |k: usize, v: ValueId| {
        let u = singleton_usage[index.index(k, v)];
        if u == 0 {
            uniform
        } else {
            -(u as f64 / total as f64).log2()
        }
    };
    let count = rows.len() as u64;
    let usage: u64 = rows.iter().map(|(_, s)| s.usage).sum();
    let mut bits =
        universal_int_length(count) + universal_int_length(usage) + log2_binomial(usage, count);
    for (p, s) in rows {
        bits += universal_int_length(p.len() as u64)
            + universal_int_length(p.size() as u64)
            + universal_int_length(s.gaps + 1);
        if miss_codes {
            bits += universal_int_length(s.misses + 1);
        }
        bits += p.cells().map(|(_, k, v)| st_code(k, v)).sum::<f64>();
    }
    bits
}

/// `L(ST)`: per attribute, `L_N(|V_k|) + log2 C(|S^k|, |V_k|)`.
pub fn standard_table_length(data: &EventDataset) -> f64 {
    let events = data.total_events() as u64;
    data.schema()
        .value_counts()
        .into_iter()
        .map(|n| universal_int_length(n as u64) + log2_binomial(events, n as u64))
        .sum()
}

/// `L_N(|S|) + Σ L_N(|s_i|) + L_N(|A|)`.
pub fn data_header_length(data: &EventDataset) -> f64 {
    universal_int_length(data.num_sequences() as u64)
        + data
            .sequences()
            .iter()
            .map(|s| universal_int_length(s.len() as u64))
            .sum::<f64>()
        + universal_int_length(data.schema().arity() as u64)
}

/// `L(P) = L(ST) + L(CT*)` under the installed statistics.
pub fn length_of_model(table: &CodeTable, data: &EventDataset) -> f64 {
    standard_table_length(data) + table.ct_star_length()
}
