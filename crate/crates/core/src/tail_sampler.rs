//! Two-stage sampling of tails proportionally to their uncovered area.
//!
//! Stage one draws a record `D` with weight `w(D)`, stage two draws a tail
//! from that record with weight `|ccov_D(T)|`, the number of its labels on
//! `D` that the current rule set does not cover yet. Summed over records this
//! is exactly the uncovered area of `T`.
//!
//! Over the full power set `w(D) = |uncov_D| · 2^(|L_D| - 1)` and the second
//! stage needs no enumeration: one uncovered label is drawn uniformly as a
//! mandatory member and every other label of `L_D` joins with probability
//! 1/2, which gives `P(T | D) ∝ |T ∩ uncov_D|`.
//!
//! Over an interpretable space the tails of `D` are the members listed in its
//! containment index and `w(D) = Σ_{S ∈ I[D]} |S \ cov_D|`.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::data::{Dataset, LabelId, Record, RecordId};
use crate::error::{Error, Result};
use crate::label_space::{ContainmentIndex, InterpretableSpace};
use crate::objective::{tail_coverage, CoverageSet, Rule, RuleSet};
use crate::sets;

/// Tails with more enumerable candidates than this are refused by the exact
/// oracle.
pub const ORACLE_GUARD: usize = 1 << 20;

/// cov_D(R): the labels of `D` covered by `R`, empty unless `D ∈ D[R]`.
pub fn record_specific_coverage(record: &Record, rule: &Rule) -> Vec<LabelId> {
    if rule.matches(record) {
        sets::intersect(&record.labels, rule.tail())
    } else {
        Vec::new()
    }
}

/// cov_D over a collection of rules.
pub fn record_specific_coverage_of(record: &Record, rules: &[Rule]) -> Vec<LabelId> {
    rules.iter().fold(Vec::new(), |acc, r| {
        sets::union(&acc, &record_specific_coverage(record, r))
    })
}

/// ccov_D(T) = (L_D ∩ T) \ covered.
pub fn marginal_coverage(record: &Record, tail: &[LabelId], covered: &[LabelId]) -> Vec<LabelId> {
    sets::difference(&sets::intersect(&record.labels, tail), covered)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailSpaceKind {
    Full,
    Reduced,
}

/// Per-record weights for the first stage plus what the second stage needs.
#[derive(Debug, Clone)]
pub struct TailWeights {
    kind: TailSpaceKind,
    weights: Vec<f64>,
    uncovered: Vec<Vec<LabelId>>,
    // reduced space only: |S \ cov_D| aligned with I[D]
    member_weights: Vec<Vec<u32>>,
    positive: Vec<RecordId>,
    table: Option<WeightedIndex<f64>>,
}

impl TailWeights {
    fn finish(
        kind: TailSpaceKind,
        weights: Vec<f64>,
        uncovered: Vec<Vec<LabelId>>,
        member_weights: Vec<Vec<u32>>,
    ) -> Self {
        let positive: Vec<RecordId> = weights
            .iter()
            .enumerate()
            .filter(|(_, &w)| w > 0.0)
            .map(|(i, _)| i as RecordId)
            .collect();
        let table = if positive.is_empty() {
            None
        } else {
            WeightedIndex::new(positive.iter().map(|&i| weights[i as usize])).ok()
        };
        TailWeights {
            kind,
            weights,
            uncovered,
            member_weights,
            positive,
            table,
        }
    }

    pub fn kind(&self) -> TailSpaceKind {
        self.kind
    }

    pub fn weight(&self, i: RecordId) -> f64 {
        self.weights[i as usize]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// uncov_D(ruleset) for record `i`.
    pub fn uncovered(&self, i: RecordId) -> &[LabelId] {
        &self.uncovered[i as usize]
    }

    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Probability that stage one picks record `i`.
    pub fn first_stage_probability(&self, i: RecordId) -> f64 {
        let total = self.total();
        if total == 0.0 {
            0.0
        } else {
            self.weights[i as usize] / total
        }
    }

    pub fn is_fully_covered(&self) -> bool {
        self.table.is_none()
    }

    fn draw_record<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<RecordId> {
        let table = self.table.as_ref().ok_or(Error::FullyCovered)?;
        Ok(self.positive[table.sample(rng)])
    }
}

fn uncovered_per_record(dataset: &Dataset, ruleset: &RuleSet) -> Vec<Vec<LabelId>> {
    dataset
        .records()
        .iter()
        .enumerate()
        .map(|(i, r)| sets::difference(&r.labels, &ruleset.covered_labels(i as RecordId)))
        .collect()
}

/// w(D) = |uncov_D| · 2^(|L_D| - 1).
pub fn compute_weights_full(dataset: &Dataset, ruleset: &RuleSet) -> TailWeights {
    let uncovered = uncovered_per_record(dataset, ruleset);
    let weights = dataset
        .records()
        .iter()
        .zip(&uncovered)
        .map(|(r, u)| {
            if u.is_empty() {
                0.0
            } else {
                u.len() as f64 * 2f64.powi(r.labels.len() as i32 - 1)
            }
        })
        .collect();
    TailWeights::finish(TailSpaceKind::Full, weights, uncovered, Vec::new())
}

/// w(D) = Σ_{S ∈ I[D]} |S \ cov_D|.
pub fn compute_weights_reduced(
    dataset: &Dataset,
    space: &InterpretableSpace,
    index: &ContainmentIndex,
    ruleset: &RuleSet,
) -> TailWeights {
    let mut weights = Vec::with_capacity(dataset.len());
    let mut member_weights = Vec::with_capacity(dataset.len());
    let mut uncovered = Vec::with_capacity(dataset.len());
    for (i, r) in dataset.records().iter().enumerate() {
        let i = i as RecordId;
        let covered = ruleset.covered_labels(i);
        let mw: Vec<u32> = index
            .members_of(i)
            .iter()
            .map(|&m| sets::difference_len(space.member(m), &covered) as u32)
            .collect();
        weights.push(mw.iter().map(|&w| w as f64).sum());
        member_weights.push(mw);
        uncovered.push(sets::difference(&r.labels, &covered));
    }
    TailWeights::finish(TailSpaceKind::Reduced, weights, uncovered, member_weights)
}

/// Draws tails from one weight snapshot.
#[derive(Debug, Clone)]
pub struct TailSampler<'a> {
    dataset: &'a Dataset,
    reduced: Option<(&'a InterpretableSpace, &'a ContainmentIndex)>,
    weights: TailWeights,
}

impl<'a> TailSampler<'a> {
    pub fn full(dataset: &'a Dataset, ruleset: &RuleSet) -> Self {
        TailSampler {
            dataset,
            reduced: None,
            weights: compute_weights_full(dataset, ruleset),
        }
    }

    pub fn reduced(
        dataset: &'a Dataset,
        space: &'a InterpretableSpace,
        index: &'a ContainmentIndex,
        ruleset: &RuleSet,
    ) -> Self {
        TailSampler {
            dataset,
            reduced: Some((space, index)),
            weights: compute_weights_reduced(dataset, space, index, ruleset),
        }
    }

    pub fn weights(&self) -> &TailWeights {
        &self.weights
    }

    /// One tail; `Error::FullyCovered` when every weight is zero.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<LabelId>> {
        let i = self.weights.draw_record(rng)?;
        match self.reduced {
            None => Ok(self.second_stage_full(i, rng)),
            Some((space, index)) => {
                let mw = &self.weights.member_weights[i as usize];
                let total: u32 = mw.iter().sum();
                let mut x = rng.gen_range(0..total);
                for (pos, &w) in mw.iter().enumerate() {
                    if x < w {
                        return Ok(space.member(index.members_of(i)[pos]).to_vec());
                    }
                    x -= w;
                }
                unreachable!("member weights sum to the record weight")
            }
        }
    }

    fn second_stage_full<R: Rng + ?Sized>(&self, i: RecordId, rng: &mut R) -> Vec<LabelId> {
        let uncov = self.weights.uncovered(i);
        let mandatory = uncov[rng.gen_range(0..uncov.len())];
        let mut tail: Vec<LabelId> = self
            .dataset
            .record(i)
            .labels
            .iter()
            .copied()
            .filter(|&k| k == mandatory || rng.gen_bool(0.5))
            .collect();
        tail.sort_unstable();
        tail
    }
}

pub fn sample_tail_full<R: Rng + ?Sized>(
    dataset: &Dataset,
    ruleset: &RuleSet,
    rng: &mut R,
) -> Result<Vec<LabelId>> {
    TailSampler::full(dataset, ruleset).sample(rng)
}

pub fn sample_tail_reduced<R: Rng + ?Sized>(
    dataset: &Dataset,
    space: &InterpretableSpace,
    index: &ContainmentIndex,
    ruleset: &RuleSet,
    rng: &mut R,
) -> Result<Vec<LabelId>> {
    TailSampler::reduced(dataset, space, index, ruleset).sample(rng)
}

/// Uncovered area of every candidate tail, normalized, by brute force over
/// explicit coverage sets.
///
/// Candidates are every non-empty subset of every record's label set, or the
/// members of `space` when given. Tails of zero area are omitted.
pub fn exact_tail_distribution(
    dataset: &Dataset,
    ruleset: &RuleSet,
    space: Option<&InterpretableSpace>,
) -> Result<BTreeMap<Vec<LabelId>, f64>> {
    let candidates: Vec<Vec<LabelId>> = match space {
        Some(s) => s.members().to_vec(),
        None => {
            let budget: usize = dataset
                .records()
                .iter()
                .map(|r| 1usize.checked_shl(r.labels.len() as u32).unwrap_or(usize::MAX))
                .fold(0usize, |a, b| a.saturating_add(b));
            if budget > ORACLE_GUARD {
                return Err(Error::TooLarge(format!("{budget} candidate tails")));
            }
            let mut all = std::collections::BTreeSet::new();
            for r in dataset.records() {
                let n = r.labels.len();
                for mask in 1u64..(1u64 << n) {
                    let t: Vec<LabelId> = (0..n)
                        .filter(|b| mask & (1 << b) != 0)
                        .map(|b| r.labels[b])
                        .collect();
                    all.insert(t);
                }
            }
            all.into_iter().collect()
        }
    };
    let covered = ruleset
        .rules()
        .iter()
        .fold(CoverageSet::default(), |acc, r| acc.union(&r.coverage()));
    let mut dist = BTreeMap::new();
    let mut total = 0.0;
    for t in candidates {
        let area = tail_coverage(dataset, &t).difference_len(&covered);
        if area > 0 {
            total += area as f64;
            dist.insert(t, area as f64);
        }
    }
    if total == 0.0 {
        return Err(Error::FullyCovered);
    }
    for v in dist.values_mut() {
        *v /= total;
    }
    Ok(dist)
}
