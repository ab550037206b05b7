//! Greedy rule-set learning over sampled candidate pools.
//!
//! Each iteration draws a pool of candidates (tail by uncovered area over
//! the interpretable label space, head by the exact reduced-space sampler or
//! the greedy builder), adds the candidate of largest marginal gain and
//! measures `c`, the share of all label occurrences the new rule predicts
//! correctly for the first time. Learning stops when `c ≤ τ` (that rule is
//! not kept unless it would be the only one), at the rule cap, or when
//! everything is covered.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureId, LabelId, Record};
use crate::error::{Error, Result};
use crate::head_sampler::{GreedyParams, HeadSampler, HeadSpace, DEFAULT_HORIZON_CAP};
use crate::label_space::{
    build_containment_index, build_feature_space, build_label_space, ContainmentIndex,
    InterpretableSpace, Side, DEFAULT_MAX_SIZE, DEFAULT_NODE_BUDGET,
};
use crate::objective::{compare_candidates, marginal_gain, objective_value, Rule, RuleSet, RuleSpec};
use crate::sets;
use crate::tail_sampler::TailSampler;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplerVariant {
    /// Exact head sampling over the interpretable feature space.
    Surs,
    /// Greedy head construction.
    Gh,
}

impl std::str::FromStr for SamplerVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "surs" => Ok(SamplerVariant::Surs),
            "gh" => Ok(SamplerVariant::Gh),
            _ => Err(Error::InvalidArgument(format!("unknown sampler variant {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub lambda: f64,
    /// Stop once a new rule predicts at most this share of label
    /// occurrences. `None` learns until `max_rules`.
    pub tau: Option<f64>,
    pub max_rules: usize,
    pub pool_size: usize,
    pub variant: SamplerVariant,
    pub two_pass: bool,
    pub theta: f64,
    pub max_size: usize,
    pub feature_theta: f64,
    pub feature_max_size: usize,
    pub node_budget: usize,
    pub gamma: f64,
    pub epsilon: f64,
    pub horizon_cap: usize,
    pub seed: u64,
    /// Worker threads, 0 for all cores. Results do not depend on it.
    pub threads: usize,
}

impl Default for LearnerConfig {
    fn default() -> Self {
        LearnerConfig {
            lambda: 0.1,
            tau: None,
            max_rules: 150,
            pool_size: 500,
            variant: SamplerVariant::Surs,
            two_pass: false,
            theta: 0.3,
            max_size: DEFAULT_MAX_SIZE,
            feature_theta: 0.3,
            feature_max_size: DEFAULT_MAX_SIZE,
            node_budget: DEFAULT_NODE_BUDGET,
            gamma: 0.5,
            epsilon: 0.05,
            horizon_cap: DEFAULT_HORIZON_CAP,
            seed: 0,
            threads: 0,
        }
    }
}

impl LearnerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be finite and non-negative, got {}", self.lambda));
        }
        if let Some(t) = self.tau {
            if !(0.0..=1.0).contains(&t) {
                return bad(format!("tau must lie in [0, 1], got {t}"));
            }
        }
        if self.max_rules == 0 || self.pool_size == 0 {
            return bad("max_rules and pool_size must be positive".into());
        }
        self.greedy_params().validate()
    }

    pub fn greedy_params(&self) -> GreedyParams {
        GreedyParams {
            gamma: self.gamma,
            epsilon: self.epsilon,
        }
    }
}

/// One greedy insertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub iteration: usize,
    pub pool_size: usize,
    pub rule: RuleSpec,
    pub gain: f64,
    /// Sum of the marginal gains so far.
    pub cumulative_gain: f64,
    /// Objective of the rule set after the insertion, recomputed exactly.
    pub objective: f64,
    pub coverage_ratio: f64,
}

/// A learned rule set, serializable to JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSetModel {
    pub rules: Vec<RuleSpec>,
    pub lambda: f64,
    pub variant: SamplerVariant,
    pub seed: u64,
    pub n_features: usize,
    pub n_labels: usize,
    pub objective: f64,
    pub second_pass_used: bool,
    pub trace: Vec<IterationTrace>,
    pub config: LearnerConfig,
}

impl RuleSetModel {
    /// Union of the tails of the rules whose head is contained in `features`.
    pub fn predict(&self, features: &[FeatureId]) -> Vec<LabelId> {
        predict_with(&self.rules, features)
    }

    pub fn predict_dataset(&self, dataset: &Dataset) -> Vec<Vec<LabelId>> {
        dataset
            .records()
            .iter()
            .map(|r| self.predict(&r.features))
            .collect()
    }

    /// Rules bound to `dataset`, for scoring against it.
    pub fn bind(&self, dataset: &Dataset) -> Result<Vec<Rule>> {
        self.rules.iter().map(|s| Rule::from_spec(dataset, s)).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

pub fn predict_with(rules: &[RuleSpec], features: &[FeatureId]) -> Vec<LabelId> {
    let mut out = Vec::new();
    for r in rules {
        if sets::is_subset(&r.head, features) {
            out = sets::union(&out, &r.tail);
        }
    }
    out
}

/// Seed of draw `j` in iteration `t`, independent of thread scheduling.
pub fn stream_seed(seed: u64, iteration: u64, draw: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    splitmix(seed ^ splitmix(iteration ^ splitmix(draw)))
}

/// Samplers' immutable inputs, built once per fit.
pub struct Context<'a> {
    pub dataset: &'a Dataset,
    pub config: &'a LearnerConfig,
    pub label_space: InterpretableSpace,
    pub label_index: ContainmentIndex,
    pub feature_space: Option<(InterpretableSpace, ContainmentIndex)>,
}

impl<'a> Context<'a> {
    pub fn new(dataset: &'a Dataset, config: &'a LearnerConfig) -> Result<Self> {
        let label_space = build_label_space(dataset, config.theta, config.max_size)?;
        let label_index = build_containment_index(dataset, &label_space);
        let feature_space = match config.variant {
            SamplerVariant::Surs => {
                let fs = build_feature_space(
                    dataset,
                    config.feature_theta,
                    config.feature_max_size,
                    config.node_budget,
                )?;
                let idx = ContainmentIndex::build(dataset, &fs, Side::Features);
                Some((fs, idx))
            }
            SamplerVariant::Gh => None,
        };
        log::info!(
            "label space: {} members, feature space: {} members",
            label_space.len(),
            feature_space.as_ref().map_or(0, |f| f.0.len())
        );
        Ok(Context {
            dataset,
            config,
            label_space,
            label_index,
            feature_space,
        })
    }

    fn head_for<R: rand::Rng>(&self, tail: &[LabelId], rng: &mut R) -> Result<Vec<FeatureId>> {
        let gh = |rng: &mut R| {
            HeadSampler::new(self.dataset, tail, HeadSpace::Full)?
                .with_horizon_cap(self.config.horizon_cap)
                .greedy(&self.config.greedy_params(), rng)
        };
        match &self.feature_space {
            Some((space, index)) => {
                let exact = HeadSampler::new(self.dataset, tail, HeadSpace::Reduced { space, index })
                    .map(|s| s.with_horizon_cap(self.config.horizon_cap))
                    .and_then(|s| s.sample(rng));
                match exact {
                    Ok(h) => Ok(h),
                    Err(e) => {
                        log::debug!("exact head sampling failed ({e}), using greedy head");
                        gh(rng)
                    }
                }
            }
            None => gh(rng),
        }
    }
}

/// Draws up to `pool_size` distinct candidates not already in `ruleset`.
/// An empty pool means every label occurrence is covered.
pub fn gen_cand_rules(ctx: &Context<'_>, ruleset: &RuleSet, iteration: u64) -> Result<Vec<Rule>> {
    let dataset = ctx.dataset;
    let tails = TailSampler::reduced(dataset, &ctx.label_space, &ctx.label_index, ruleset);
    if tails.weights().is_fully_covered() {
        return Ok(Vec::new());
    }
    let drawn: Vec<Option<(Vec<FeatureId>, Vec<LabelId>)>> = (0..ctx.config.pool_size as u64)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(ctx.config.seed, iteration, j));
            let tail = tails.sample(&mut rng).ok()?;
            match ctx.head_for(&tail, &mut rng) {
                Ok(head) => Some((head, tail)),
                Err(e) => {
                    log::debug!("no head for tail {tail:?}: {e}");
                    None
                }
            }
        })
        .collect();
    let existing: BTreeSet<RuleSpec> = ruleset.rules().iter().map(Rule::spec).collect();
    let mut seen = BTreeSet::new();
    let mut pool = Vec::new();
    for (head, tail) in drawn.into_iter().flatten() {
        let spec = RuleSpec { head, tail };
        if existing.contains(&spec) || !seen.insert(spec.clone()) {
            continue;
        }
        let rule = Rule::from_spec(dataset, &spec)?;
        if crate::objective::adjusted_accuracy(&rule).map_or(true, |a| a == 0.0) {
            log::trace!("zero-accuracy candidate {spec:?}");
        }
        pool.push(rule);
    }
    Ok(pool)
}

// best candidate, ties by the objective's rule; with `positive` only
// candidates that add something qualify
fn best_candidate<'r>(
    pool: &'r [Rule],
    ruleset: &RuleSet,
    lambda: f64,
    positive: bool,
) -> Option<(f64, &'r Rule)> {
    let gains: Vec<f64> = pool
        .par_iter()
        .map(|r| marginal_gain(r, ruleset, lambda))
        .collect();
    gains
        .into_iter()
        .zip(pool)
        .filter(|(g, _)| !positive || *g > 0.0)
        .max_by(|a, b| compare_candidates((a.0, a.1), (b.0, b.1)))
}

/// Plain greedy: `budget` insertions (fewer if the pool runs out) of the
/// candidate of largest marginal gain.
pub fn greedy_over_pool(dataset: &Dataset, pool: &[Rule], budget: usize, lambda: f64) -> RuleSet {
    let mut ruleset = RuleSet::new(dataset);
    let mut remaining: Vec<Rule> = pool.to_vec();
    for _ in 0..budget {
        let Some((_, best)) = best_candidate(&remaining, &ruleset, lambda, false) else {
            break;
        };
        let spec = best.spec();
        let pos = remaining
            .iter()
            .position(|r| r.spec() == spec)
            .expect("best is in the pool");
        ruleset.insert(remaining.swap_remove(pos));
    }
    ruleset
}

// labels predicted so far per record, for the c statistic
struct Predictions {
    per_record: Vec<Vec<LabelId>>,
    total_labels: usize,
}

impl Predictions {
    fn new(dataset: &Dataset) -> Self {
        Predictions {
            per_record: vec![Vec::new(); dataset.len()],
            total_labels: dataset.total_label_occurrences(),
        }
    }

    /// Share of all label occurrences `rule` predicts correctly for the
    /// first time.
    fn newly_predicted(&self, dataset: &Dataset, rule: &Rule) -> f64 {
        if self.total_labels == 0 {
            return 0.0;
        }
        let n: usize = dataset
            .support_of_features(rule.head())
            .iter()
            .map(|&i| {
                let hit = sets::intersect(&dataset.record(i).labels, rule.tail());
                sets::difference_len(&hit, &self.per_record[i as usize])
            })
            .sum();
        n as f64 / self.total_labels as f64
    }

    fn add(&mut self, dataset: &Dataset, rule: &Rule) {
        for i in dataset.support_of_features(rule.head()) {
            let p = &mut self.per_record[i as usize];
            *p = sets::union(p, rule.tail());
        }
    }
}

/// Learns a rule set.
pub fn fit(dataset: &Dataset, config: &LearnerConfig) -> Result<RuleSetModel> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::InvalidArgument("empty dataset".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    pool.install(|| fit_inner(dataset, config))
}

fn fit_inner(dataset: &Dataset, config: &LearnerConfig) -> Result<RuleSetModel> {
    let ctx = Context::new(dataset, config)?;
    let lambda = config.lambda;
    let mut ruleset = RuleSet::new(dataset);
    let mut predictions = Predictions::new(dataset);
    let mut archive: BTreeMap<RuleSpec, Rule> = BTreeMap::new();
    let mut trace = Vec::new();
    let mut cumulative = 0.0;
    let mut iteration = 0u64;
    let mut refilled = false;
    while ruleset.len() < config.max_rules {
        let pool = gen_cand_rules(&ctx, &ruleset, iteration)?;
        iteration += 1;
        if pool.is_empty() {
            log::info!("everything covered, stopping");
            break;
        }
        for r in &pool {
            archive.entry(r.spec()).or_insert_with(|| r.clone());
        }
        let Some((gain, best)) = best_candidate(&pool, &ruleset, lambda, true) else {
            if refilled {
                log::info!("no candidate with positive gain, stopping");
                break;
            }
            refilled = true;
            continue;
        };
        refilled = false;
        let best = best.clone();
        let c = predictions.newly_predicted(dataset, &best);
        let below_tolerance = config.tau.is_some_and(|tau| c <= tau);
        // a rule below tolerance ends learning without joining the set,
        // unless the set would stay empty
        if below_tolerance && !ruleset.is_empty() {
            log::info!("c = {c:.5} at or below tolerance, stopping");
            break;
        }
        predictions.add(dataset, &best);
        cumulative += gain;
        let spec = best.spec();
        ruleset.insert(best);
        let objective = objective_value(ruleset.rules(), lambda);
        log::info!(
            "iter {} pool {} rule {:?} -> {:?} gain {:.4} c {:.5} objective {:.4}",
            trace.len(),
            pool.len(),
            spec.head,
            spec.tail,
            gain,
            c,
            objective
        );
        trace.push(IterationTrace {
            iteration: trace.len(),
            pool_size: pool.len(),
            rule: spec,
            gain,
            cumulative_gain: cumulative,
            objective,
            coverage_ratio: c,
        });
        if below_tolerance {
            break;
        }
    }
    let first: Vec<Rule> = ruleset.rules().to_vec();
    let mut chosen = first;
    let mut objective = objective_value(&chosen, lambda);
    let mut second_pass_used = false;
    if config.two_pass && !chosen.is_empty() {
        let archive: Vec<Rule> = archive.into_values().collect();
        let second = greedy_over_pool(dataset, &archive, chosen.len(), lambda);
        let f2 = objective_value(second.rules(), lambda);
        log::info!("second pass objective {f2:.4} vs {objective:.4}");
        if f2 > objective {
            chosen = second.rules().to_vec();
            objective = f2;
            second_pass_used = true;
        }
    }
    Ok(RuleSetModel {
        rules: chosen.iter().map(Rule::spec).collect(),
        lambda,
        variant: config.variant,
        seed: config.seed,
        n_features: dataset.n_features(),
        n_labels: dataset.n_labels(),
        objective,
        second_pass_used,
        trace,
        config: config.clone(),
    })
}

/// Convenience for callers holding bare records.
pub fn predict_records(model: &RuleSetModel, records: &[Record]) -> Vec<Vec<LabelId>> {
    records.iter().map(|r| model.predict(&r.features)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn planted() -> Dataset {
        // features {0,1} imply labels {0,1}; feature 2 implies label 2
        let mut recs = Vec::new();
        for i in 0..40u32 {
            let mut f = vec![];
            let mut l = vec![];
            if i % 2 == 0 {
                f.extend([0, 1]);
                l.extend([0, 1]);
            }
            if i % 5 == 0 {
                f.push(2);
                l.push(2);
            }
            f.push(3 + i % 3);
            recs.push(Record::new(f, l));
        }
        Dataset::new(recs, 6, 3).unwrap()
    }

    fn small_config() -> LearnerConfig {
        LearnerConfig {
            pool_size: 40,
            max_rules: 5,
            seed: 7,
            ..LearnerConfig::default()
        }
    }

    #[test]
    fn learns_planted_rules() {
        let d = planted();
        for variant in [SamplerVariant::Surs, SamplerVariant::Gh] {
            let cfg = LearnerConfig { variant, ..small_config() };
            let m = fit(&d, &cfg).unwrap();
            let preds = m.predict_dataset(&d);
            let exact = preds
                .iter()
                .zip(d.records())
                .filter(|(p, r)| **p == r.labels)
                .count();
            assert!(exact >= 36, "{variant:?}: {exact} of 40, rules {:?}", m.rules);
        }
    }

    #[test]
    fn tau_one_stops_after_first_rule() {
        let d = planted();
        let cfg = LearnerConfig { tau: Some(1.0), ..small_config() };
        assert_eq!(fit(&d, &cfg).unwrap().rules.len(), 1);
    }

    #[test]
    fn deterministic_and_thread_independent() {
        let d = planted();
        let a = fit(&d, &LearnerConfig { threads: 1, ..small_config() }).unwrap();
        let mut b = fit(&d, &LearnerConfig { threads: 4, ..small_config() }).unwrap();
        b.config.threads = 1;
        assert_eq!(a, b);
    }

    #[test]
    fn coverage_ratio_bounded_and_gains_accumulate() {
        let d = planted();
        let m = fit(&d, &small_config()).unwrap();
        let mut last = 0.0;
        for t in &m.trace {
            assert!((0.0..=1.0).contains(&t.coverage_ratio));
            assert!(t.cumulative_gain >= last);
            last = t.cumulative_gain;
        }
    }

    #[test]
    fn two_pass_is_never_worse() {
        let d = planted();
        let one = fit(&d, &small_config()).unwrap();
        let two = fit(&d, &LearnerConfig { two_pass: true, ..small_config() }).unwrap();
        assert!(two.objective >= one.objective - 1e-9);
    }

    #[test]
    fn fully_covered_gives_empty_pool() {
        let d = Dataset::new(vec![Record::new(vec![0], vec![0])], 1, 1).unwrap();
        let cfg = LearnerConfig { pool_size: 1, ..small_config() };
        let ctx = Context::new(&d, &cfg).unwrap();
        let rs = RuleSet::with_rules(&d, [Rule::new(&d, vec![0], vec![0]).unwrap()]);
        assert!(gen_cand_rules(&ctx, &rs, 0).unwrap().is_empty());
        assert!(gen_cand_rules(&ctx, &RuleSet::new(&d), 0).unwrap().len() <= 1);
    }

    #[test]
    fn rejects_bad_config() {
        let d = planted();
        for cfg in [
            LearnerConfig { lambda: -1.0, ..small_config() },
            LearnerConfig { tau: Some(1.5), ..small_config() },
            LearnerConfig { pool_size: 0, ..small_config() },
            LearnerConfig { gamma: 0.0, ..small_config() },
        ] {
            assert!(matches!(fit(&d, &cfg), Err(Error::InvalidArgument(_))));
        }
    }

    #[test]
    fn model_json_round_trip() {
        let d = planted();
        let m = fit(&d, &small_config()).unwrap();
        let back = RuleSetModel::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(back.predict_dataset(&d), m.predict_dataset(&d));
    }
}
