//! The outer loop: propose candidates, keep those that shrink the total
//! description length, prune what they make redundant, repeat to a fixpoint.
//!
//! Candidate evaluation re-covers only the sequences a change can affect:
//! those where the candidate occurs (or the pruned pattern is used). Every
//! other cover is provably unchanged, so the resulting statistics equal a
//! from-scratch pass. [`MinerState::full_recompute`] checks that claim.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use log::{debug, info};
use rayon::prelude::*;

use crate::candidates::{
    candidate_order, gap_value_counts, generate_candidates, variations, Candidate,
};
use crate::codetable::{
    code_stream_length, cover_order_cmp, ct_star_length, data_header_length, standard_table_length,
    CodeTable, CoverStats, PatternId, UsageStats,
};
use crate::cover::{aggregate_stats, cover_from_occurrences, total_description_length, Cover};
use crate::error::{Error, Result};
use crate::lsh::{
    promising_pairs, segment_weights, PairThreshold, PositionSketch, DEFAULT_SAMPLES,
    DEFAULT_SEGMENT_LEN,
};
use crate::matcher::{search_with_miss_budget, Occurrence};
use crate::model::{EventDataset, Pattern, ValueId};

/// Smallest decrease in bits that counts as an improvement.
pub const IMPROVEMENT_EPSILON: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct MinerConfig {
    pub enable_miss_codes: bool,
    pub enable_lsh: bool,
    pub lsh_threshold: PairThreshold,
    pub lsh_samples: usize,
    pub segment_len: usize,
    /// Fraction of a pattern's usages a gap value must appear in to seed a
    /// variation.
    pub variation_threshold: f64,
    pub max_iterations: usize,
    pub seed: u64,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig {
            enable_miss_codes: true,
            enable_lsh: true,
            lsh_threshold: PairThreshold::Similarity(0.3),
            lsh_samples: DEFAULT_SAMPLES,
            segment_len: DEFAULT_SEGMENT_LEN,
            variation_threshold: 0.5,
            max_iterations: 100,
            seed: 0,
        }
    }
}

impl MinerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.into()));
        if self.max_iterations == 0 {
            return bad("max_iterations must be at least 1");
        }
        if self.lsh_samples == 0 {
            return bad("lsh_samples must be at least 1");
        }
        if self.segment_len == 0 {
            return bad("segment_len must be at least 1");
        }
        match self.lsh_threshold {
            PairThreshold::Similarity(t) if !(0.0..=1.0).contains(&t) => {
                return bad("lsh similarity threshold must lie in [0, 1]")
            }
            PairThreshold::MinCooccur(c) if !(c >= 0.0 && c.is_finite()) => {
                return bad("lsh co-occurrence floor must be a finite non-negative number")
            }
            _ => {}
        }
        if !(0.0..=1.0).contains(&self.variation_threshold) {
            return bad("variation_threshold must lie in [0, 1]");
        }
        Ok(())
    }
}

/// A step that changed the model.
#[derive(Clone, Debug, PartialEq)]
pub enum TraceStep {
    Accepted {
        iteration: usize,
        pattern: PatternId,
        total: f64,
    },
    Pruned {
        iteration: usize,
        pattern: PatternId,
        total: f64,
    },
}

impl TraceStep {
    pub fn total(&self) -> f64 {
        match *self {
            TraceStep::Accepted { total, .. } | TraceStep::Pruned { total, .. } => total,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiningReport {
    pub pattern_count: usize,
    /// Total length of the singleton-only model, in bits.
    pub baseline: f64,
    pub final_total: f64,
    pub delta_l_percent: f64,
    /// Misses in the final cover.
    pub miss_count: u64,
    pub runtime_secs: f64,
    /// Total length at the end of every iteration.
    pub iteration_trace: Vec<f64>,
    pub steps: Vec<TraceStep>,
    pub candidates_evaluated: u64,
}

impl MiningReport {
    pub fn accepted(&self) -> usize {
        self.steps
            .iter()
            .filter(|s| matches!(s, TraceStep::Accepted { .. }))
            .count()
    }

    pub fn pruned(&self) -> usize {
        self.steps.len() - self.accepted()
    }
}

pub struct MiningResult {
    pub table: CodeTable,
    pub covers: Vec<Cover>,
    pub report: MiningReport,
}

impl MiningResult {
    pub fn patterns(&self) -> Vec<Pattern> {
        self.table
            .entries()
            .iter()
            .map(|e| e.pattern.clone())
            .collect()
    }
}

type OccurrenceLists = Vec<Vec<Occurrence>>;

/// The model under construction with its covers and cached occurrences.
pub struct MinerState<'a> {
    data: &'a EventDataset,
    table: CodeTable,
    occurrences: HashMap<PatternId, OccurrenceLists>,
    covers: Vec<Cover>,
    stats: CoverStats,
    fixed_bits: f64,
    total: f64,
}

impl<'a> MinerState<'a> {
    /// Singleton-only model over `data`.
    pub fn new(data: &'a EventDataset, miss_codes: bool) -> Self {
        let table = CodeTable::standard(data.schema()).with_miss_codes(miss_codes);
        let arity = table.arity();
        let covers: Vec<Cover> = data
            .sequences()
            .par_iter()
            .map(|s| cover_from_occurrences(s, arity, std::iter::empty()))
            .collect();
        let stats = aggregate_stats(&table, &covers);
        let mut state = MinerState {
            data,
            table,
            occurrences: HashMap::new(),
            covers,
            stats,
            fixed_bits: standard_table_length(data) + data_header_length(data),
            total: 0.0,
        };
        state.table.install_stats(&state.stats);
        state.total = state.evaluate(&state.stats, None, None);
        state
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn table(&self) -> &CodeTable {
        &self.table
    }

    pub fn covers(&self) -> &[Cover] {
        &self.covers
    }

    pub fn stats(&self) -> &CoverStats {
        &self.stats
    }

    // Total length for `stats` over CT*, optionally with one extra row and
    // without one existing row.
    fn evaluate(
        &self,
        stats: &CoverStats,
        extra: Option<(PatternId, &Pattern)>,
        removed: Option<PatternId>,
    ) -> f64 {
        let mut rows: Vec<(&Pattern, UsageStats)> = self
            .table
            .entries()
            .iter()
            .filter(|e| Some(e.id) != removed)
            .map(|e| (&e.pattern, stats.pattern(e.id)))
            .collect();
        if let Some((id, p)) = extra {
            rows.push((p, stats.pattern(id)));
        }
        self.fixed_bits
            + ct_star_length(
                self.table.singletons(),
                &stats.singleton_usage,
                &rows,
                self.table.miss_codes(),
            )
            + code_stream_length(self.table.arity(), &stats.singleton_usage, &rows)
    }

    // Occurrence lists in cover order, optionally with one extra pattern and
    // without one existing pattern.
    fn ordered<'s>(
        &'s self,
        extra: Option<(PatternId, &'s Pattern, u64, &'s OccurrenceLists)>,
        removed: Option<PatternId>,
    ) -> Vec<(PatternId, &'s OccurrenceLists)> {
        let mut rows: Vec<(PatternId, &Pattern, u64, &OccurrenceLists)> = self
            .table
            .entries()
            .iter()
            .filter(|e| Some(e.id) != removed)
            .map(|e| (e.id, &e.pattern, e.support, &self.occurrences[&e.id]))
            .collect();
        rows.extend(extra);
        rows.sort_by(|a, b| cover_order_cmp((a.1, a.2), (b.1, b.2)));
        rows.into_iter().map(|r| (r.0, r.3)).collect()
    }

    fn recover(&self, seqs: &[usize], order: &[(PatternId, &OccurrenceLists)]) -> Vec<Cover> {
        let arity = self.table.arity();
        seqs.par_iter()
            .map(|&i| {
                cover_from_occurrences(
                    self.data.sequence(i),
                    arity,
                    order.iter().map(|(id, occ)| (*id, occ[i].as_slice())),
                )
            })
            .collect()
    }

    fn delta_stats(&self, seqs: &[usize], fresh: &[Cover]) -> CoverStats {
        let index = self.table.singletons();
        let mut stats = self.stats.clone();
        for (&i, cover) in seqs.iter().zip(fresh) {
            self.covers[i].retract(index, &mut stats);
            cover.contribute(index, &mut stats);
        }
        stats
    }

    fn commit(&mut self, seqs: Vec<usize>, fresh: Vec<Cover>, stats: CoverStats, total: f64) {
        for (i, cover) in seqs.into_iter().zip(fresh) {
            self.covers[i] = cover;
        }
        self.stats = stats;
        self.table.install_stats(&self.stats);
        self.total = total;
    }

    /// Adds `candidate` to CT* iff that strictly lowers the total length.
    /// Returns whether it was accepted and the total afterwards.
    pub fn try_accept(&mut self, candidate: &Pattern) -> Result<(bool, f64)> {
        if self.table.contains(candidate) {
            return Err(Error::InvalidInput(
                "candidate already in the code table".into(),
            ));
        }
        if candidate.arity() != self.table.arity() || candidate.is_singleton() {
            return Err(Error::InvalidInput(
                "not a valid multi-value candidate".into(),
            ));
        }
        let budget = self.table.miss_budget(candidate);
        let found: OccurrenceLists = self
            .data
            .sequences()
            .par_iter()
            .map(|s| search_with_miss_budget(candidate, s, budget))
            .collect();
        let support: u64 = found.iter().map(|o| o.len() as u64).sum();
        let id = self.table.next_id();
        let seqs: Vec<usize> = (0..found.len()).filter(|&i| !found[i].is_empty()).collect();
        let order = self.ordered(Some((id, candidate, support, &found)), None);
        let fresh = self.recover(&seqs, &order);
        let stats = self.delta_stats(&seqs, &fresh);
        let total = self.evaluate(&stats, Some((id, candidate)), None);
        if total >= self.total - IMPROVEMENT_EPSILON {
            return Ok((false, self.total));
        }
        let inserted = self.table.insert(candidate.clone(), support)?;
        debug_assert_eq!(inserted, id);
        self.occurrences.insert(id, found);
        self.commit(seqs, fresh, stats, total);
        Ok((true, total))
    }

    /// Removes `id` from CT* iff that strictly lowers the total length.
    pub fn try_remove(&mut self, id: PatternId) -> Result<bool> {
        if self.table.get(id).is_none() {
            return Err(Error::InvalidInput(format!(
                "pattern {} not in the table",
                id.0
            )));
        }
        let seqs: Vec<usize> = (0..self.covers.len())
            .filter(|&i| self.covers[i].assignments().iter().any(|a| a.pattern == id))
            .collect();
        let order = self.ordered(None, Some(id));
        let fresh = self.recover(&seqs, &order);
        let stats = self.delta_stats(&seqs, &fresh);
        let total = self.evaluate(&stats, None, Some(id));
        if total >= self.total - IMPROVEMENT_EPSILON {
            return Ok(false);
        }
        self.table.remove(id);
        self.occurrences.remove(&id);
        self.commit(seqs, fresh, stats, total);
        Ok(true)
    }

    /// Visits CT* patterns whose usage fell below `before` in decreasing
    /// order of the drop and removes each one whose removal strictly lowers
    /// the total. Returns the removed ids in removal order, each with the
    /// total right after its removal.
    pub fn prune(&mut self, before: &BTreeMap<PatternId, u64>) -> Result<Vec<(PatternId, f64)>> {
        let mut drops: Vec<(u64, PatternId)> = self
            .table
            .entries()
            .iter()
            .filter_map(|e| {
                let old = *before.get(&e.id)?;
                (e.stats.usage < old).then(|| (old - e.stats.usage, e.id))
            })
            .collect();
        drops.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut removed = Vec::new();
        for (_, id) in drops {
            if self.try_remove(id)? {
                removed.push((id, self.total));
            }
        }
        Ok(removed)
    }

    fn usages(&self) -> BTreeMap<PatternId, u64> {
        self.table
            .entries()
            .iter()
            .map(|e| (e.id, e.stats.usage))
            .collect()
    }

    /// Total length recomputed from scratch by covering every sequence anew.
    pub fn full_recompute(&self) -> f64 {
        let mut table = self.table.clone();
        total_description_length(self.data, &mut table)
    }

    fn miss_count(&self) -> u64 {
        self.stats.patterns.values().map(|s| s.misses).sum()
    }
}

fn singleton_supports(data: &EventDataset, table: &CodeTable) -> Vec<(Pattern, u64)> {
    let arity = table.arity();
    let freq = data.value_frequencies();
    (0..table.singletons().len())
        .map(|g| {
            let (k, v) = table.singletons().cell(g);
            (Pattern::singleton(arity, k, v), freq[k][v.index()] as u64)
        })
        .collect()
}

fn allowed_pairs(
    state: &MinerState,
    cfg: &MinerConfig,
    pool: usize,
) -> Result<Option<BTreeSet<(usize, usize)>>> {
    if !cfg.enable_lsh {
        return Ok(None);
    }
    let table = state.table();
    let lens: Vec<usize> = state.data.sequences().iter().map(Vec::len).collect();
    let weights = segment_weights(
        state.covers(),
        &lens,
        |k, v: ValueId| table.singletons().index(k, v),
        table.singletons().len(),
        cfg.segment_len,
    );
    let maps = weights.singletons.into_iter().chain(
        table
            .entries()
            .iter()
            .map(|e| weights.patterns.get(&e.id).cloned().unwrap_or_default()),
    );
    let sketches: Vec<Option<PositionSketch>> = maps
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|w| PositionSketch::new(w, cfg.lsh_samples, cfg.seed).ok())
        .collect();
    debug_assert_eq!(sketches.len(), pool);
    promising_pairs(&sketches, cfg.lsh_threshold).map(Some)
}

/// Runs the full mining loop over `data`.
pub fn mine(data: &EventDataset, cfg: &MinerConfig) -> Result<MiningResult> {
    cfg.validate()?;
    let started = Instant::now();
    let mut state = MinerState::new(data, cfg.enable_miss_codes);
    let baseline = state.total();
    let singles = singleton_supports(data, state.table());
    let mut steps = Vec::new();
    let mut iteration_trace = Vec::new();
    let mut pending_variations: Vec<Candidate> = Vec::new();
    let mut evaluated = 0u64;
    info!("baseline {baseline:.3} bits");

    for iteration in 0..cfg.max_iterations {
        let mut pool = singles.clone();
        pool.extend(
            state
                .table()
                .entries()
                .iter()
                .map(|e| (e.pattern.clone(), e.support)),
        );
        let allowed = allowed_pairs(&state, cfg, pool.len())?;
        let mut candidates = generate_candidates(&pool, |i, j| {
            allowed.as_ref().is_none_or(|set| set.contains(&(i, j)))
        });
        if !pending_variations.is_empty() {
            let mut merged: BTreeMap<Pattern, u64> = candidates
                .drain(..)
                .map(|c| (c.pattern, c.estimated_support))
                .collect();
            for v in pending_variations.drain(..) {
                let slot = merged.entry(v.pattern).or_insert(0);
                *slot = (*slot).max(v.estimated_support);
            }
            candidates = merged
                .into_iter()
                .map(|(pattern, estimated_support)| Candidate {
                    pattern,
                    estimated_support,
                })
                .collect();
            candidates.sort_by(candidate_order);
        }
        candidates.retain(|c| !state.table().contains(&c.pattern));
        debug!("iteration {iteration}: {} candidates", candidates.len());

        let mut accepted = Vec::new();
        for cand in &candidates {
            if state.table().contains(&cand.pattern) {
                continue;
            }
            let before = state.usages();
            evaluated += 1;
            let (ok, total) = state.try_accept(&cand.pattern)?;
            if !ok {
                continue;
            }
            let id = state.table().find(&cand.pattern).ok_or_else(|| {
                Error::Internal("accepted candidate missing from the table".into())
            })?;
            steps.push(TraceStep::Accepted {
                iteration,
                pattern: id,
                total,
            });
            accepted.push(id);
            for (pattern, total) in state.prune(&before)? {
                steps.push(TraceStep::Pruned {
                    iteration,
                    pattern,
                    total,
                });
            }
        }
        iteration_trace.push(state.total());
        info!(
            "iteration {iteration}: {} accepted, |P| = {}, total {:.3} bits",
            accepted.len(),
            state.table().entries().len(),
            state.total()
        );
        if accepted.is_empty() {
            break;
        }

        let lens: Vec<usize> = data.sequences().iter().map(Vec::len).collect();
        let gaps = gap_value_counts(state.covers(), state.table().arity(), &lens);
        for id in accepted {
            let (Some(entry), Some(counts)) = (state.table().get(id), gaps.get(&id)) else {
                continue;
            };
            for pattern in variations(
                &entry.pattern,
                counts,
                entry.stats.usage,
                cfg.variation_threshold,
            ) {
                pending_variations.push(Candidate {
                    pattern,
                    estimated_support: entry.stats.usage,
                });
            }
        }
    }

    let final_total = state.total();
    let report = MiningReport {
        pattern_count: state.table().entries().len(),
        baseline,
        final_total,
        delta_l_percent: 100.0 * (baseline - final_total) / baseline,
        miss_count: state.miss_count(),
        runtime_secs: started.elapsed().as_secs_f64(),
        iteration_trace,
        steps,
        candidates_evaluated: evaluated,
    };
    Ok(MiningResult {
        table: state.table,
        covers: state.covers,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Event, Schema};

    fn uni(values: &[u32]) -> Vec<Event> {
        values.iter().map(|&v| Event::full([v])).collect()
    }

    fn repeated(seq: &[u32], times: usize, alphabet: usize) -> EventDataset {
        EventDataset::new(
            Schema::anonymous(&[alphabet]).unwrap(),
            vec![uni(seq); times],
        )
        .unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(MinerConfig::default().validate().is_ok());
        let bad = MinerConfig {
            max_iterations: 0,
            ..MinerConfig::default()
        };
        assert!(matches!(bad.validate(), Err(Error::Config(_))));
        let bad = MinerConfig {
            lsh_threshold: PairThreshold::Similarity(1.5),
            ..MinerConfig::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn useless_candidate_rejected_and_state_restored() {
        let data = repeated(&[0, 1, 2, 3], 10, 6);
        let mut state = MinerState::new(&data, true);
        let before = state.total();
        let (ok, total) = state
            .try_accept(&Pattern::new(uni(&[4, 5])).unwrap())
            .unwrap();
        assert!(!ok);
        assert_eq!(total, before);
        assert!(state.table().entries().is_empty());
        assert_eq!(state.full_recompute(), before);
    }

    #[test]
    fn accepting_twice_is_a_precondition_violation() {
        let data = repeated(&[0, 1, 2, 3], 10, 4);
        let mut state = MinerState::new(&data, true);
        let p = Pattern::new(uni(&[0, 1])).unwrap();
        assert!(state.try_accept(&p).unwrap().0);
        assert!(state.try_accept(&p).is_err());
    }

    #[test]
    fn incremental_total_matches_full_recompute() {
        let data = repeated(&[0, 1, 2, 3, 0, 1], 8, 4);
        let mut state = MinerState::new(&data, true);
        for p in [&[0u32, 1][..], &[2, 3], &[0, 1, 2, 3], &[3, 0]] {
            let before = state.usages();
            state.try_accept(&Pattern::new(uni(p)).unwrap()).unwrap();
            state.prune(&before).unwrap();
            assert!((state.total() - state.full_recompute()).abs() < 1e-9);
        }
    }

    #[test]
    fn subsumed_pattern_is_pruned() {
        let data = repeated(&[0, 1, 2, 3], 20, 4);
        let mut state = MinerState::new(&data, true);
        let small = Pattern::new(uni(&[0, 1])).unwrap();
        assert!(state.try_accept(&small).unwrap().0);
        let before = state.usages();
        let big = Pattern::new(uni(&[0, 1, 2, 3])).unwrap();
        assert!(state.try_accept(&big).unwrap().0);
        let removed = state.prune(&before).unwrap();
        assert_eq!(removed.len(), 1);
        assert!(!state.table().contains(&small));
        assert!(state.table().contains(&big));
    }

    #[test]
    fn repeated_sequence_is_compressed() {
        let data = repeated(&[0, 1, 2, 3, 4, 5], 30, 6);
        let cfg = MinerConfig {
            enable_lsh: false,
            ..MinerConfig::default()
        };
        let res = mine(&data, &cfg).unwrap();
        assert!(res.report.delta_l_percent > 50.0, "{:?}", res.report);
        for w in res.report.steps.windows(2) {
            assert!(w[1].total() < w[0].total());
        }
        assert!(res.report.final_total <= res.report.baseline);
    }
}
