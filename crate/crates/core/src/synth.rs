//! Planted-rule synthetic data.
//!
//! Start from all-zero feature and label matrices. Each generating rule gets
//! a random support of records on which its features and labels are set to
//! one. Finally every cell of both matrices is flipped independently with
//! probability `noise`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureId, LabelId, Record, RecordId};
use crate::error::{Error, Result};
use crate::objective::{jaccard_distance, Rule, RuleSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoverageMode {
    /// Support fractions drawn uniformly from `[min_support, max_support]`.
    Uniform,
    /// Fractions proportional to `rank^-skew_exponent`, with the same
    /// expected total mass as the uniform mode.
    Skewed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub n_records: usize,
    pub n_features: usize,
    pub n_labels: usize,
    /// Defaults to a third of `min(n_features, n_labels)`.
    pub n_rules: Option<usize>,
    pub features_per_rule: usize,
    pub labels_per_rule: usize,
    pub coverage: CoverageMode,
    pub min_support: f64,
    pub max_support: f64,
    pub skew_exponent: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            n_records: 1000,
            n_features: 100,
            n_labels: 100,
            n_rules: None,
            features_per_rule: 3,
            labels_per_rule: 3,
            coverage: CoverageMode::Uniform,
            min_support: 0.05,
            max_support: 0.15,
            skew_exponent: 2.0,
            noise: 0.01,
            seed: 0,
        }
    }
}

impl GeneratorConfig {
    pub fn rule_count(&self) -> usize {
        self.n_rules
            .unwrap_or(self.n_features.min(self.n_labels) / 3)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.features_per_rule == 0 || self.labels_per_rule == 0 {
            return bad("rules need at least one feature and one label".into());
        }
        if self.features_per_rule > self.n_features || self.labels_per_rule > self.n_labels {
            return bad(format!(
                "rule size {}x{} exceeds {} features / {} labels",
                self.features_per_rule, self.labels_per_rule, self.n_features, self.n_labels
            ));
        }
        if !(0.0..=1.0).contains(&self.noise) {
            return bad(format!("noise must lie in [0, 1], got {}", self.noise));
        }
        if !(0.0 <= self.min_support && self.min_support <= self.max_support && self.max_support <= 1.0) {
            return bad("need 0 <= min_support <= max_support <= 1".into());
        }
        if !(self.skew_exponent > 0.0) {
            return bad("skew exponent must be positive".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedRule {
    pub head: Vec<FeatureId>,
    pub tail: Vec<LabelId>,
    pub support: Vec<RecordId>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedGroundTruth {
    pub rules: Vec<PlantedRule>,
    pub config: GeneratorConfig,
}

impl PlantedGroundTruth {
    pub fn specs(&self) -> Vec<RuleSpec> {
        self.rules
            .iter()
            .map(|r| RuleSpec {
                head: r.head.clone(),
                tail: r.tail.clone(),
            })
            .collect()
    }
}

// takes ids from a stream of shuffled permutations, so rules share items
// only once every id has been used
struct IdStream {
    n: u32,
    queue: Vec<u32>,
}

impl IdStream {
    fn take<R: Rng>(&mut self, k: usize, rng: &mut R) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::with_capacity(k);
        while out.len() < k {
            if self.queue.is_empty() {
                self.queue = (0..self.n).collect();
                self.queue.shuffle(rng);
            }
            let pos = self.queue.iter().rposition(|x| !out.contains(x));
            match pos {
                Some(p) => out.push(self.queue.remove(p)),
                // everything left is already in this rule
                None => self.queue.clear(),
            }
        }
        out.sort_unstable();
        out
    }
}

fn support_fractions<R: Rng>(cfg: &GeneratorConfig, n_rules: usize, rng: &mut R) -> Vec<f64> {
    match cfg.coverage {
        CoverageMode::Uniform => (0..n_rules)
            .map(|_| rng.gen_range(cfg.min_support..=cfg.max_support))
            .collect(),
        CoverageMode::Skewed => {
            let raw: Vec<f64> = (1..=n_rules)
                .map(|r| (r as f64).powf(-cfg.skew_exponent))
                .collect();
            let mass = n_rules as f64 * (cfg.min_support + cfg.max_support) / 2.0;
            let sum: f64 = raw.iter().sum();
            raw.iter().map(|x| (x / sum * mass).min(1.0)).collect()
        }
    }
}

pub fn generate(cfg: &GeneratorConfig) -> Result<(Dataset, PlantedGroundTruth)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = cfg.n_records;
    let n_rules = cfg.rule_count();
    let mut fmat = vec![vec![false; cfg.n_features]; n];
    let mut lmat = vec![vec![false; cfg.n_labels]; n];
    let mut features = IdStream { n: cfg.n_features as u32, queue: Vec::new() };
    let mut labels = IdStream { n: cfg.n_labels as u32, queue: Vec::new() };
    let all: Vec<RecordId> = (0..n as RecordId).collect();
    let mut rules = Vec::with_capacity(n_rules);
    for phi in support_fractions(cfg, n_rules, &mut rng) {
        let head = features.take(cfg.features_per_rule, &mut rng);
        let tail = labels.take(cfg.labels_per_rule, &mut rng);
        let size = ((phi * n as f64).ceil() as usize).min(n);
        let mut support: Vec<RecordId> = all.choose_multiple(&mut rng, size).copied().collect();
        support.sort_unstable();
        for &i in &support {
            for &f in &head {
                fmat[i as usize][f as usize] = true;
            }
            for &k in &tail {
                lmat[i as usize][k as usize] = true;
            }
        }
        rules.push(PlantedRule { head, tail, support });
    }
    if cfg.noise > 0.0 {
        for row in fmat.iter_mut().chain(lmat.iter_mut()) {
            for cell in row.iter_mut() {
                if rng.gen_bool(cfg.noise) {
                    *cell = !*cell;
                }
            }
        }
    }
    let ones = |row: &[bool]| -> Vec<u32> {
        row.iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(j, _)| j as u32)
            .collect()
    };
    let records = fmat
        .iter()
        .zip(&lmat)
        .map(|(f, l)| Record::new(ones(f), ones(l)))
        .collect();
    let dataset = Dataset::new(records, cfg.n_features, cfg.n_labels)?;
    Ok((
        dataset,
        PlantedGroundTruth {
            rules,
            config: cfg.clone(),
        },
    ))
}

/// Share of planted rules matched by some learned rule whose coverage on
/// `dataset` lies within Jaccard distance `0.2`.
pub fn recovery_score(truth: &PlantedGroundTruth, learned: &[RuleSpec], dataset: &Dataset) -> Result<f64> {
    if truth.rules.is_empty() {
        return Ok(1.0);
    }
    let learned: Vec<Rule> = learned
        .iter()
        .map(|s| Rule::from_spec(dataset, s))
        .collect::<Result<_>>()?;
    let mut hit = 0;
    for spec in truth.specs() {
        let planted = Rule::from_spec(dataset, &spec)?;
        if learned.iter().any(|r| jaccard_distance(&planted, r) <= 0.2) {
            hit += 1;
        }
    }
    Ok(hit as f64 / truth.rules.len() as f64)
}
