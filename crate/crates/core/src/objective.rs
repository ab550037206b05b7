//! Rules and the scoring functions of the selection objective.
//!
//! A rule `H → T` *matches* record `D` when `H ⊆ F_D` and `T ⊆ L_D`, so its
//! coverage is the product set `D[R] × T`. Products make intersections of
//! coverages cheap: `(S₁ × T₁) ∩ (S₂ × T₂) = (S₁ ∩ S₂) × (T₁ ∩ T₂)`.
//!
//! The objective of a rule set `S` is
//!
//! ```text
//! f(S) = Σ_{R ∈ S} a(R) · |cov(R) \ ∪_{R' ∈ S, R' ≠ R} cov(R')|  +  λ · Σ_{i < j} d(R_i, R_j)
//! ```
//!
//! with the diversity sum over unordered pairs.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureId, LabelId, Record, RecordId};
use crate::error::{Error, Result};
use crate::sets;

/// Probability clamp used by the Bernoulli KL divergence.
pub const PROB_CLAMP: f64 = 1e-12;

/// Serialized form of a rule: `{"head":[..],"tail":[..]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RuleSpec {
    pub head: Vec<FeatureId>,
    pub tail: Vec<LabelId>,
}

/// A conjunctive rule with its supports cached against one dataset.
#[derive(Debug, Clone)]
pub struct Rule {
    head: Vec<FeatureId>,
    tail: Vec<LabelId>,
    support: Vec<RecordId>,
    head_support: usize,
    tail_support: usize,
    n_records: usize,
}

impl Rule {
    pub fn new(dataset: &Dataset, mut head: Vec<FeatureId>, mut tail: Vec<LabelId>) -> Result<Rule> {
        sets::normalize(&mut head);
        sets::normalize(&mut tail);
        if head.is_empty() || tail.is_empty() {
            return Err(Error::InvalidArgument("rule head and tail must be non-empty".into()));
        }
        if let Some(&f) = head.iter().find(|&&f| f as usize >= dataset.n_features()) {
            return Err(Error::IdOutOfRange {
                kind: "feature",
                id: f as u64,
                bound: dataset.n_features(),
            });
        }
        if let Some(&k) = tail.iter().find(|&&k| k as usize >= dataset.n_labels()) {
            return Err(Error::IdOutOfRange {
                kind: "label",
                id: k as u64,
                bound: dataset.n_labels(),
            });
        }
        let head_ids = dataset.support_of_features(&head);
        let tail_ids = dataset.support_of_labels(&tail);
        let support = sets::intersect(&head_ids, &tail_ids);
        Ok(Rule {
            head,
            tail,
            support,
            head_support: head_ids.len(),
            tail_support: tail_ids.len(),
            n_records: dataset.len(),
        })
    }

    pub fn from_spec(dataset: &Dataset, spec: &RuleSpec) -> Result<Rule> {
        Rule::new(dataset, spec.head.clone(), spec.tail.clone())
    }

    pub fn spec(&self) -> RuleSpec {
        RuleSpec {
            head: self.head.clone(),
            tail: self.tail.clone(),
        }
    }

    pub fn head(&self) -> &[FeatureId] {
        &self.head
    }

    pub fn tail(&self) -> &[LabelId] {
        &self.tail
    }

    /// D[R] = D[H] ∩ D[T].
    pub fn support(&self) -> &[RecordId] {
        &self.support
    }

    pub fn head_support_len(&self) -> usize {
        self.head_support
    }

    pub fn tail_support_len(&self) -> usize {
        self.tail_support
    }

    /// |cov(R)| = |D[R]| · |T|.
    pub fn coverage_len(&self) -> usize {
        self.support.len() * self.tail.len()
    }

    pub fn coverage(&self) -> CoverageSet {
        CoverageSet::product(&self.support, &self.tail)
    }

    /// Whether the head fires on a feature set (prediction semantics).
    pub fn fires_on(&self, features: &[FeatureId]) -> bool {
        sets::is_subset(&self.head, features)
    }

    /// Whether the record lies in D[R].
    pub fn matches(&self, record: &Record) -> bool {
        sets::is_subset(&self.head, &record.features) && sets::is_subset(&self.tail, &record.labels)
    }

    fn precision_and_base_rate(&self) -> Option<(f64, f64)> {
        if self.head_support == 0 || self.n_records == 0 {
            return None;
        }
        Some((
            self.support.len() as f64 / self.head_support as f64,
            self.tail_support as f64 / self.n_records as f64,
        ))
    }
}

/// KL(Bernoulli(p) ‖ Bernoulli(q)) in nats, both clamped to `[1e-12, 1-1e-12]`.
pub fn bernoulli_kl(p: f64, q: f64) -> f64 {
    let p = p.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    let q = q.clamp(PROB_CLAMP, 1.0 - PROB_CLAMP);
    p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
}

/// `a(R) = 1[P_DR > P_D] · KL(Bern(P_DR) ‖ Bern(P_D))` with precision
/// `P_DR = |D[R]|/|D[H]|` and base rate `P_D = |D[T]|/|D|`.
pub fn adjusted_accuracy(rule: &Rule) -> Result<f64> {
    let (p, q) = rule.precision_and_base_rate().ok_or(Error::UndefinedPrecision)?;
    Ok(accuracy_from_rates(p, q))
}

pub fn accuracy_from_rates(precision: f64, base_rate: f64) -> f64 {
    if precision > base_rate {
        bernoulli_kl(precision, base_rate)
    } else {
        0.0
    }
}

/// Set of `(record, label)` occurrences, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverageSet {
    pairs: Vec<(RecordId, LabelId)>,
}

impl CoverageSet {
    pub fn from_pairs(mut pairs: Vec<(RecordId, LabelId)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        CoverageSet { pairs }
    }

    pub fn product(records: &[RecordId], labels: &[LabelId]) -> Self {
        let mut pairs = Vec::with_capacity(records.len() * labels.len());
        for &i in records {
            for &k in labels {
                pairs.push((i, k));
            }
        }
        CoverageSet::from_pairs(pairs)
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(RecordId, LabelId)] {
        &self.pairs
    }

    pub fn contains(&self, pair: (RecordId, LabelId)) -> bool {
        self.pairs.binary_search(&pair).is_ok()
    }

    pub fn union(&self, other: &CoverageSet) -> CoverageSet {
        let mut pairs = self.pairs.clone();
        pairs.extend_from_slice(&other.pairs);
        CoverageSet::from_pairs(pairs)
    }

    pub fn intersection_len(&self, other: &CoverageSet) -> usize {
        let (a, b) = (&self.pairs, &other.pairs);
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// |self \ other|.
    pub fn difference_len(&self, other: &CoverageSet) -> usize {
        self.len() - self.intersection_len(other)
    }

    /// Jaccard distance; two empty sets are at distance 0, which keeps
    /// `d(x, x) = 0` and with it the metric axioms.
    pub fn jaccard_distance(&self, other: &CoverageSet) -> f64 {
        let inter = self.intersection_len(other);
        let union = self.len() + other.len() - inter;
        if union == 0 {
            0.0
        } else {
            1.0 - inter as f64 / union as f64
        }
    }
}

/// Coverage of a bare tail: `D[T] × T`.
pub fn tail_coverage(dataset: &Dataset, tail: &[LabelId]) -> CoverageSet {
    CoverageSet::product(&dataset.support_of_labels(tail), tail)
}

/// Jaccard distance between rule coverages, from the product structure.
pub fn jaccard_distance(a: &Rule, b: &Rule) -> f64 {
    let inter = coverage_intersection_len(a, b);
    let union = a.coverage_len() + b.coverage_len() - inter;
    if union == 0 {
        0.0
    } else {
        1.0 - inter as f64 / union as f64
    }
}

/// |cov(a) ∩ cov(b)|.
pub fn coverage_intersection_len(a: &Rule, b: &Rule) -> usize {
    let t = sets::intersect_len(&a.tail, &b.tail);
    if t == 0 {
        return 0;
    }
    sets::intersect_len(&a.support, &b.support) * t
}

#[derive(Debug, Clone, Default)]
struct Cell {
    label: LabelId,
    count: u32,
    // sum of indexes of the rules covering this cell; the owner when count == 1
    owner_sum: u64,
}

/// Ordered rule set with incrementally maintained union coverage and
/// objective terms.
#[derive(Debug, Clone)]
pub struct RuleSet {
    rules: Vec<Rule>,
    accuracies: Vec<f64>,
    exclusive: Vec<usize>,
    cells: Vec<Vec<Cell>>,
    diversity_sum: f64,
}

impl RuleSet {
    pub fn new(dataset: &Dataset) -> Self {
        RuleSet {
            rules: Vec::new(),
            accuracies: Vec::new(),
            exclusive: Vec::new(),
            cells: vec![Vec::new(); dataset.len()],
            diversity_sum: 0.0,
        }
    }

    pub fn with_rules(dataset: &Dataset, rules: impl IntoIterator<Item = Rule>) -> Self {
        let mut s = RuleSet::new(dataset);
        for r in rules {
            s.insert(r);
        }
        s
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn n_records(&self) -> usize {
        self.cells.len()
    }

    /// cov_D(ruleset) for record `i`: labels of `i` covered by some rule.
    pub fn covered_labels(&self, i: RecordId) -> Vec<LabelId> {
        self.cells[i as usize].iter().map(|c| c.label).collect()
    }

    pub fn is_covered(&self, i: RecordId, k: LabelId) -> bool {
        self.cells[i as usize]
            .binary_search_by_key(&k, |c| c.label)
            .is_ok()
    }

    /// Number of labels of `tail` not yet covered on record `i`.
    pub fn uncovered_count(&self, i: RecordId, tail: &[LabelId]) -> usize {
        let cells = &self.cells[i as usize];
        if cells.is_empty() {
            return tail.len();
        }
        tail.iter()
            .filter(|&&k| cells.binary_search_by_key(&k, |c| c.label).is_err())
            .count()
    }

    pub fn union_coverage(&self) -> CoverageSet {
        let mut pairs = Vec::new();
        for (i, cells) in self.cells.iter().enumerate() {
            pairs.extend(cells.iter().map(|c| (i as RecordId, c.label)));
        }
        CoverageSet { pairs }
    }

    pub fn insert(&mut self, rule: Rule) {
        let idx = self.rules.len();
        let acc = adjusted_accuracy(&rule).unwrap_or(0.0);
        let mut exclusive_new = 0;
        for &i in rule.support() {
            let cells = &mut self.cells[i as usize];
            for &k in rule.tail() {
                match cells.binary_search_by_key(&k, |c| c.label) {
                    Ok(pos) => {
                        let c = &mut cells[pos];
                        if c.count == 1 {
                            self.exclusive[c.owner_sum as usize] -= 1;
                        }
                        c.count += 1;
                        c.owner_sum += idx as u64;
                    }
                    Err(pos) => {
                        cells.insert(
                            pos,
                            Cell {
                                label: k,
                                count: 1,
                                owner_sum: idx as u64,
                            },
                        );
                        exclusive_new += 1;
                    }
                }
            }
        }
        self.diversity_sum += self.rules.iter().map(|r| jaccard_distance(&rule, r)).sum::<f64>();
        self.rules.push(rule);
        self.accuracies.push(acc);
        self.exclusive.push(exclusive_new);
    }

    /// Σ_R q(R; S \ {R}), maintained incrementally.
    pub fn quality_sum(&self) -> f64 {
        self.accuracies
            .iter()
            .zip(&self.exclusive)
            .map(|(a, &e)| a * e as f64)
            .sum()
    }

    /// Σ_{i<j} d(R_i, R_j), maintained incrementally.
    pub fn diversity_sum(&self) -> f64 {
        self.diversity_sum
    }

    pub fn objective(&self, lambda: f64) -> f64 {
        self.quality_sum() + lambda * self.diversity_sum
    }
}

/// |cov(R) \ ∪ cov(ruleset)|.
pub fn uncovered_area(rule: &Rule, ruleset: &RuleSet) -> usize {
    rule.support()
        .iter()
        .map(|&i| ruleset.uncovered_count(i, rule.tail()))
        .sum()
}

/// Uncovered area of a bare tail over its support `D[T]`.
pub fn tail_uncovered_area(dataset: &Dataset, tail: &[LabelId], ruleset: &RuleSet) -> usize {
    dataset
        .support_of_labels(tail)
        .iter()
        .map(|&i| ruleset.uncovered_count(i, tail))
        .sum()
}

/// q(R; S) = rarea(R; S) · a(R). Rules whose head matches nothing score 0.
pub fn quality(rule: &Rule, ruleset: &RuleSet) -> f64 {
    match adjusted_accuracy(rule) {
        Ok(a) if a > 0.0 => a * uncovered_area(rule, ruleset) as f64,
        _ => 0.0,
    }
}

/// λ · Σ_{R ∈ S} d(candidate, R).
pub fn diversity_gain(candidate: &Rule, ruleset: &RuleSet, lambda: f64) -> f64 {
    if lambda == 0.0 {
        return 0.0;
    }
    lambda
        * ruleset
            .rules()
            .iter()
            .map(|r| jaccard_distance(candidate, r))
            .sum::<f64>()
}

/// q(candidate; S) + λ · Σ_{R ∈ S} d(candidate, R).
pub fn marginal_gain(candidate: &Rule, ruleset: &RuleSet, lambda: f64) -> f64 {
    quality(candidate, ruleset) + diversity_gain(candidate, ruleset, lambda)
}

/// Objective recomputed from scratch with explicit coverage sets.
pub fn objective_value(rules: &[Rule], lambda: f64) -> f64 {
    let covs: Vec<CoverageSet> = rules.iter().map(Rule::coverage).collect();
    let mut total = 0.0;
    for (j, rule) in rules.iter().enumerate() {
        let others = covs
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != j)
            .fold(CoverageSet::default(), |acc, (_, c)| acc.union(c));
        let a = adjusted_accuracy(rule).unwrap_or(0.0);
        total += a * covs[j].difference_len(&others) as f64;
    }
    let mut div = 0.0;
    for i in 0..covs.len() {
        for j in i + 1..covs.len() {
            div += covs[i].jaccard_distance(&covs[j]);
        }
    }
    total + lambda * div
}

/// Ordering for greedy selection: larger gain first, then larger coverage,
/// then lexicographically smaller `(head, tail)`. `Ordering::Greater` means
/// `a` is preferred.
pub fn compare_candidates(a: (f64, &Rule), b: (f64, &Rule)) -> Ordering {
    a.0.partial_cmp(&b.0)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.1.coverage_len().cmp(&b.1.coverage_len()))
        .then_with(|| (b.1.head(), b.1.tail()).cmp(&(a.1.head(), a.1.tail())))
}
