//! Head sampling for a fixed tail.
//!
//! The exact sampler draws a head with probability proportional to its
//! discriminativity `|D⁺[H]| · |D⁻ \ D⁻[H]|`. It first draws a pair
//! (positive record, negative record) by coupling from the past over an
//! independence Metropolis chain, then a head uniformly among those contained
//! in the positive record and not contained in the negative one.
//!
//! Over the full feature power set the pair weight
//! `2^a - 2^b - (a - b)` (with `a = |F_D⁺|`, `b = |F_D⁺ ∩ F_D⁻|`) counts heads
//! of at least two features, so the second stage rejects singletons and the
//! composite law is discriminativity restricted to `|H| ≥ 2`. Over an
//! interpretable feature space the pair weight counts members instead and
//! the composite law is discriminativity restricted to the space.
//!
//! The greedy alternative grows a head one feature at a time.

use std::collections::{BTreeMap, HashMap};

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::data::{Dataset, FeatureId, LabelId, RecordId};
use crate::error::{Error, Result};
use crate::label_space::{ContainmentIndex, InterpretableSpace};
use crate::sets;

/// Total number of chain steps allowed before CFTP gives up.
pub const DEFAULT_HORIZON_CAP: usize = 1 << 20;

/// Records split by whether they carry the whole tail.
#[derive(Debug, Clone)]
pub struct Bipartition {
    positives: Vec<RecordId>,
    negatives: Vec<RecordId>,
    is_positive: Vec<bool>,
}

impl Bipartition {
    pub fn new(dataset: &Dataset, tail: &[LabelId]) -> Self {
        let positives = dataset.support_of_labels(tail);
        let mut is_positive = vec![false; dataset.len()];
        for &i in &positives {
            is_positive[i as usize] = true;
        }
        let negatives = (0..dataset.len() as RecordId)
            .filter(|&i| !is_positive[i as usize])
            .collect();
        Bipartition {
            positives,
            negatives,
            is_positive,
        }
    }

    pub fn positives(&self) -> &[RecordId] {
        &self.positives
    }

    pub fn negatives(&self) -> &[RecordId] {
        &self.negatives
    }

    pub fn is_positive(&self, i: RecordId) -> bool {
        self.is_positive[i as usize]
    }

    /// (positives, negatives) among `records`.
    pub fn count_in(&self, records: &[RecordId]) -> (usize, usize) {
        let pos = records.iter().filter(|&&i| self.is_positive(i)).count();
        (pos, records.len() - pos)
    }
}

/// |D⁺_T[H]| · |D⁻_T \ D⁻_T[H]|.
pub fn discriminativity(dataset: &Dataset, head: &[FeatureId], tail: &[LabelId]) -> u64 {
    let bip = Bipartition::new(dataset, tail);
    let (pos, neg) = bip.count_in(&dataset.support_of_features(head));
    pos as u64 * (bip.negatives().len() - neg) as u64
}

/// Feature space the heads live in.
#[derive(Debug, Clone, Copy)]
pub enum HeadSpace<'a> {
    Full,
    Reduced {
        space: &'a InterpretableSpace,
        index: &'a ContainmentIndex,
    },
}

/// Pair weight over the full space: the number of heads with at least two
/// features contained in `F_D⁺` but not in `F_D⁻`.
pub fn pair_weight(dataset: &Dataset, dp: RecordId, dn: RecordId) -> f64 {
    let fp = &dataset.record(dp).features;
    let a = fp.len() as i32;
    let b = sets::intersect_len(fp, &dataset.record(dn).features) as i32;
    2f64.powi(a) - 2f64.powi(b) - (a - b) as f64
}

/// Pair weight over a feature space: members of `I_F[D⁺]` not contained in
/// `F_D⁻`.
pub fn reduced_pair_weight(
    dataset: &Dataset,
    space: &InterpretableSpace,
    index: &ContainmentIndex,
    dp: RecordId,
    dn: RecordId,
) -> usize {
    let fneg = &dataset.record(dn).features;
    index
        .members_of(dp)
        .iter()
        .filter(|&&m| !sets::is_subset(space.member(m), fneg))
        .count()
}

/// `w1(D⁺) = 2^a - a - 1`.
pub fn positive_weight(n_features: usize) -> f64 {
    2f64.powi(n_features as i32) - n_features as f64 - 1.0
}

/// `w2(D⁻) = 2^|F| - 2^d - d - 1` from the original general-purpose proposal.
pub fn boley_negative_weight(n_universe: usize, d: usize) -> f64 {
    2f64.powi(n_universe as i32) - 2f64.powi(d as i32) - d as f64 - 1.0
}

// w / w1 computed without forming 2^a
fn full_ratio(a: usize, b: usize) -> f64 {
    if a < 2 || b >= a {
        return 0.0;
    }
    let a_i = a as i32;
    let num = 1.0 - 2f64.powi(b as i32 - a_i) - (a - b) as f64 * 2f64.powi(-a_i);
    let den = 1.0 - (a + 1) as f64 * 2f64.powi(-a_i);
    (num / den).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProposalKind {
    /// `w̄ = w1(D⁺)`, uniform over negatives.
    Tight,
    /// `w̄ = √(w1(D⁺) · w2(D⁻))`, full space only.
    Boley,
}

/// Independence proposal over pairs together with the normalized
/// acceptance ratio `r = (w / w̄) / max(w / w̄)`.
#[derive(Debug, Clone)]
pub struct PairProposal<'a> {
    dataset: &'a Dataset,
    space: HeadSpace<'a>,
    kind: ProposalKind,
    positives: Vec<RecordId>,
    pos_table: WeightedIndex<f64>,
    negatives: Vec<RecordId>,
    neg_table: Option<WeightedIndex<f64>>,
    scale: f64,
}

impl<'a> PairProposal<'a> {
    /// The proposal used by the sampler. Positives that form no pair of
    /// positive weight are left out, which keeps `w̄` an upper bound.
    pub fn tight(dataset: &'a Dataset, bip: &Bipartition, space: HeadSpace<'a>) -> Result<Self> {
        if bip.negatives().is_empty() {
            return Err(Error::InvalidArgument("tail has no negative records".into()));
        }
        let feasible = feasible_positives(dataset, bip, space);
        if feasible.is_empty() {
            return Err(Error::Unlearnable("no positive record forms a pair of positive weight"));
        }
        let weights: Vec<f64> = match space {
            HeadSpace::Full => {
                let amax = feasible
                    .iter()
                    .map(|&i| dataset.record(i).features.len())
                    .max()
                    .unwrap_or(0) as i32;
                feasible
                    .iter()
                    .map(|&i| {
                        let a = dataset.record(i).features.len() as i32;
                        // w1 / 2^amax
                        2f64.powi(a - amax) * (1.0 - (a + 1) as f64 * 2f64.powi(-a))
                    })
                    .collect()
            }
            HeadSpace::Reduced { index, .. } => feasible
                .iter()
                .map(|&i| index.members_of(i).len() as f64)
                .collect(),
        };
        let pos_table = WeightedIndex::new(&weights)
            .map_err(|_| Error::Unlearnable("proposal weights vanish"))?;
        Ok(PairProposal {
            dataset,
            space,
            kind: ProposalKind::Tight,
            positives: feasible,
            pos_table,
            negatives: bip.negatives().to_vec(),
            neg_table: None,
            scale: 1.0,
        })
    }

    /// The general-purpose proposal, for comparison. Its normalizing bound is
    /// found by scanning every pair, so this is meant for small inputs.
    pub fn boley(dataset: &'a Dataset, bip: &Bipartition) -> Result<Self> {
        if bip.negatives().is_empty() {
            return Err(Error::InvalidArgument("tail has no negative records".into()));
        }
        let nf = dataset.n_features();
        let positives: Vec<RecordId> = bip
            .positives()
            .iter()
            .copied()
            .filter(|&i| dataset.record(i).features.len() >= 2)
            .collect();
        if positives.is_empty() {
            return Err(Error::Unlearnable("no positive record with two features"));
        }
        let w1: Vec<f64> = positives
            .iter()
            .map(|&i| positive_weight(dataset.record(i).features.len()))
            .collect();
        let w2: Vec<f64> = bip
            .negatives()
            .iter()
            .map(|&i| boley_negative_weight(nf, dataset.record(i).features.len()).max(0.0))
            .collect();
        let mut scale: f64 = 0.0;
        for (p, &dp) in positives.iter().enumerate() {
            for (n, &dn) in bip.negatives().iter().enumerate() {
                let w = pair_weight(dataset, dp, dn);
                if w <= 0.0 {
                    continue;
                }
                let wbar = (w1[p] * w2[n]).sqrt();
                if wbar <= 0.0 {
                    return Err(Error::InvalidArgument(
                        "proposal misses a pair of positive weight".into(),
                    ));
                }
                scale = scale.max(w / wbar);
            }
        }
        if scale == 0.0 {
            return Err(Error::Unlearnable("every pair has zero weight"));
        }
        let sq = |v: &[f64]| v.iter().map(|x| x.sqrt()).collect::<Vec<_>>();
        Ok(PairProposal {
            dataset,
            space: HeadSpace::Full,
            kind: ProposalKind::Boley,
            pos_table: WeightedIndex::new(sq(&w1)).map_err(|_| Error::EmptyPool)?,
            positives,
            neg_table: Some(WeightedIndex::new(sq(&w2)).map_err(|_| Error::EmptyPool)?),
            negatives: bip.negatives().to_vec(),
            scale,
        })
    }

    pub fn kind(&self) -> ProposalKind {
        self.kind
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> (RecordId, RecordId) {
        let dp = self.positives[self.pos_table.sample(rng)];
        let dn = match &self.neg_table {
            Some(t) => self.negatives[t.sample(rng)],
            None => self.negatives[rng.gen_range(0..self.negatives.len())],
        };
        (dp, dn)
    }

    /// Target weight of a pair in this proposal's space.
    pub fn target_weight(&self, dp: RecordId, dn: RecordId) -> f64 {
        match self.space {
            HeadSpace::Full => pair_weight(self.dataset, dp, dn),
            HeadSpace::Reduced { space, index } => {
                reduced_pair_weight(self.dataset, space, index, dp, dn) as f64
            }
        }
    }

    /// Normalized `w / w̄`, in [0, 1].
    pub fn ratio(&self, dp: RecordId, dn: RecordId) -> f64 {
        let r = match (self.kind, self.space) {
            (ProposalKind::Tight, HeadSpace::Full) => {
                let fp = &self.dataset.record(dp).features;
                full_ratio(fp.len(), sets::intersect_len(fp, &self.dataset.record(dn).features))
            }
            (ProposalKind::Tight, HeadSpace::Reduced { space, index }) => {
                let all = index.members_of(dp).len();
                if all == 0 {
                    0.0
                } else {
                    reduced_pair_weight(self.dataset, space, index, dp, dn) as f64 / all as f64
                }
            }
            (ProposalKind::Boley, _) => {
                let nf = self.dataset.n_features();
                let w1 = positive_weight(self.dataset.record(dp).features.len());
                let w2 = boley_negative_weight(nf, self.dataset.record(dn).features.len());
                let wbar = (w1 * w2.max(0.0)).sqrt();
                if wbar <= 0.0 {
                    0.0
                } else {
                    pair_weight(self.dataset, dp, dn) / wbar / self.scale
                }
            }
        };
        debug_assert!((0.0..=1.0 + 1e-12).contains(&r), "acceptance ratio {r}");
        r
    }
}

// positives having at least one negative that yields a positive pair weight
fn feasible_positives(dataset: &Dataset, bip: &Bipartition, space: HeadSpace<'_>) -> Vec<RecordId> {
    let n_neg = bip.negatives().len();
    let negatives_containing = |set: &[FeatureId]| {
        let (_, neg) = bip.count_in(&dataset.support_of_features(set));
        neg
    };
    match space {
        HeadSpace::Full => bip
            .positives()
            .iter()
            .copied()
            .filter(|&i| {
                let f = &dataset.record(i).features;
                f.len() >= 2 && negatives_containing(f) < n_neg
            })
            .collect(),
        HeadSpace::Reduced { space, index } => {
            let mut ok: HashMap<u32, bool> = HashMap::new();
            bip.positives()
                .iter()
                .copied()
                .filter(|&i| {
                    index.members_of(i).iter().any(|&m| {
                        *ok.entry(m)
                            .or_insert_with(|| negatives_containing(space.member(m)) < n_neg)
                    })
                })
                .collect()
        }
    }
}

/// A pair drawn by CFTP and the horizon at which the chain coalesced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CftpOutcome {
    pub positive: RecordId,
    pub negative: RecordId,
    pub horizon: usize,
}

/// Coupling from the past for the independence chain defined by
/// `proposal`. Runs start in the bounding state at times `-1, -2, -4, ...`;
/// the proposal and the uniform used at each time are drawn once and reused
/// by every later restart. From the bounding state a proposal is accepted
/// when `u ≤ r(C)`, after which the chain has coalesced.
pub fn cftp_sample_pair<R: Rng + ?Sized>(
    proposal: &PairProposal<'_>,
    rng: &mut R,
    horizon_cap: usize,
) -> Result<CftpOutcome> {
    // cache[k] holds the randomness of time -(k+1)
    let mut cache: Vec<(f64, RecordId, RecordId, f64)> = Vec::new();
    let mut horizon = 1usize;
    let mut steps = 0usize;
    loop {
        while cache.len() < horizon {
            let (dp, dn) = proposal.draw(rng);
            let u: f64 = rng.gen();
            cache.push((u, dp, dn, proposal.ratio(dp, dn)));
        }
        let mut state: Option<(RecordId, RecordId, f64)> = None;
        for &(u, dp, dn, r) in cache[..horizon].iter().rev() {
            let current = state.map_or(1.0, |s| s.2);
            // r(C)/r(X) with r(X) > 0 once a state was accepted
            if u * current <= r && r > 0.0 {
                state = Some((dp, dn, r));
            }
        }
        steps += horizon;
        if let Some((dp, dn, _)) = state {
            return Ok(CftpOutcome {
                positive: dp,
                negative: dn,
                horizon,
            });
        }
        if steps >= horizon_cap {
            return Err(Error::CftpTimeout(horizon));
        }
        horizon *= 2;
    }
}

/// `H1 ∪ H2` with `H1` a uniform non-empty subset of `F_D⁺ \ F_D⁻` and `H2`
/// a uniform subset of `F_D⁺ ∩ F_D⁻`.
pub fn sample_head_from_pair<R: Rng + ?Sized>(
    dataset: &Dataset,
    dp: RecordId,
    dn: RecordId,
    rng: &mut R,
) -> Result<Vec<FeatureId>> {
    let fp = &dataset.record(dp).features;
    let fneg = &dataset.record(dn).features;
    let diff = sets::difference(fp, fneg);
    if diff.is_empty() {
        return Err(Error::EmptyPool);
    }
    let inter = sets::intersect(fp, fneg);
    let h1 = loop {
        let s: Vec<FeatureId> = diff.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if !s.is_empty() {
            break s;
        }
    };
    let h2: Vec<FeatureId> = inter.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
    Ok(sets::union(&h1, &h2))
}

/// Feature-selection knobs of the greedy head builder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreedyParams {
    /// Penalty on negative support.
    pub gamma: f64,
    /// Stop once the head support falls below this fraction of the positives.
    pub epsilon: f64,
}

impl Default for GreedyParams {
    fn default() -> Self {
        GreedyParams {
            gamma: 0.5,
            epsilon: 0.05,
        }
    }
}

impl GreedyParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0) || !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "need gamma > 0 and 0 < epsilon < 1, got {} and {}",
                self.gamma, self.epsilon
            )));
        }
        Ok(())
    }
}

/// φ(H) = |D[H] ∩ D⁺| - γ |D[H] ∩ D⁻|.
pub fn modified_discriminativity(
    dataset: &Dataset,
    bip: &Bipartition,
    head: &[FeatureId],
    gamma: f64,
) -> f64 {
    let (pos, neg) = bip.count_in(&dataset.support_of_features(head));
    pos as f64 - gamma * neg as f64
}

/// Grows a head from `F_D⁺ \ F_D⁻` by the largest increase of φ and returns
/// the best prefix. With no negative record the pool is all of `F_D⁺`.
pub fn greedy_head(
    dataset: &Dataset,
    bip: &Bipartition,
    dp: RecordId,
    dn: Option<RecordId>,
    params: &GreedyParams,
) -> Result<Vec<FeatureId>> {
    params.validate()?;
    let fp = &dataset.record(dp).features;
    let mut pool = match dn {
        Some(dn) => sets::difference(fp, &dataset.record(dn).features),
        None => fp.clone(),
    };
    if pool.is_empty() {
        return Err(Error::EmptyPool);
    }
    let min_support = params.epsilon * bip.positives().len() as f64;
    let mut head: Vec<FeatureId> = Vec::new();
    let mut support: Vec<RecordId> = dataset.all_ids().to_vec();
    let mut best = (f64::NEG_INFINITY, 0usize);
    while !pool.is_empty() {
        let mut pick: Option<(f64, usize, Vec<RecordId>)> = None;
        for (pos, &h) in pool.iter().enumerate() {
            let s = sets::intersect(&support, dataset.feature_index(h));
            let (p, n) = bip.count_in(&s);
            let phi = p as f64 - params.gamma * n as f64;
            // pool is sorted, so strict > keeps the smallest id on ties
            if pick.as_ref().is_none_or(|(b, _, _)| phi > *b) {
                pick = Some((phi, pos, s));
            }
        }
        let (phi, pos, s) = pick.expect("pool is not empty");
        head.push(pool.remove(pos));
        support = s;
        if phi > best.0 {
            best = (phi, head.len());
        }
        if (support.len() as f64) < min_support {
            break;
        }
    }
    head.truncate(best.1);
    head.sort_unstable();
    Ok(head)
}

/// Draws heads for one tail.
#[derive(Debug, Clone)]
pub struct HeadSampler<'a> {
    dataset: &'a Dataset,
    space: HeadSpace<'a>,
    bip: Bipartition,
    proposal: Option<PairProposal<'a>>,
    fallback: Option<WeightedIndex<f64>>,
    horizon_cap: usize,
}

impl<'a> HeadSampler<'a> {
    pub fn new(dataset: &'a Dataset, tail: &[LabelId], space: HeadSpace<'a>) -> Result<Self> {
        let bip = Bipartition::new(dataset, tail);
        if bip.positives().is_empty() {
            return Err(Error::Unlearnable("tail has no positive record"));
        }
        let (proposal, fallback) = if bip.negatives().is_empty() {
            // every record is positive: discriminativity vanishes, draw
            // heads by their support instead
            let w: Vec<f64> = match space {
                HeadSpace::Full => {
                    let amax = bip
                        .positives()
                        .iter()
                        .map(|&i| dataset.record(i).features.len())
                        .max()
                        .unwrap_or(0) as i32;
                    bip.positives()
                        .iter()
                        .map(|&i| {
                            let a = dataset.record(i).features.len() as i32;
                            2f64.powi(a - amax) * (1.0 - 2f64.powi(-a))
                        })
                        .collect()
                }
                HeadSpace::Reduced { index, .. } => bip
                    .positives()
                    .iter()
                    .map(|&i| index.members_of(i).len() as f64)
                    .collect(),
            };
            let t = WeightedIndex::new(w).map_err(|_| Error::Unlearnable("records carry no features"))?;
            (None, Some(t))
        } else {
            (Some(PairProposal::tight(dataset, &bip, space)?), None)
        };
        Ok(HeadSampler {
            dataset,
            space,
            bip,
            proposal,
            fallback,
            horizon_cap: DEFAULT_HORIZON_CAP,
        })
    }

    pub fn with_horizon_cap(mut self, cap: usize) -> Self {
        self.horizon_cap = cap;
        self
    }

    pub fn bipartition(&self) -> &Bipartition {
        &self.bip
    }

    pub fn sample_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<CftpOutcome> {
        let proposal = self.proposal.as_ref().ok_or(Error::Unlearnable("tail has no negative record"))?;
        cftp_sample_pair(proposal, rng, self.horizon_cap)
    }

    /// One head from the exact sampler.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<FeatureId>> {
        if let Some(t) = &self.fallback {
            let dp = self.bip.positives()[t.sample(rng)];
            return Ok(self.uniform_head_of(dp, None, rng));
        }
        let pair = self.sample_pair(rng)?;
        match self.space {
            HeadSpace::Full => loop {
                let h = sample_head_from_pair(self.dataset, pair.positive, pair.negative, rng)?;
                if h.len() >= 2 {
                    return Ok(h);
                }
            },
            HeadSpace::Reduced { .. } => Ok(self.uniform_head_of(pair.positive, Some(pair.negative), rng)),
        }
    }

    // uniform member of the heads of `dp` not contained in `dn`
    fn uniform_head_of<R: Rng + ?Sized>(
        &self,
        dp: RecordId,
        dn: Option<RecordId>,
        rng: &mut R,
    ) -> Vec<FeatureId> {
        match self.space {
            HeadSpace::Full => {
                let fp = &self.dataset.record(dp).features;
                loop {
                    let h: Vec<FeatureId> = fp.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
                    if !h.is_empty() {
                        return h;
                    }
                }
            }
            HeadSpace::Reduced { space, index } => {
                let members: Vec<u32> = match dn {
                    None => index.members_of(dp).to_vec(),
                    Some(dn) => {
                        let fneg = &self.dataset.record(dn).features;
                        index
                            .members_of(dp)
                            .iter()
                            .copied()
                            .filter(|&m| !sets::is_subset(space.member(m), fneg))
                            .collect()
                    }
                };
                space.member(members[rng.gen_range(0..members.len())]).to_vec()
            }
        }
    }

    /// A pair for the greedy builder: CFTP when it finishes in time, else a
    /// raw proposal draw with a non-empty feature pool.
    pub fn greedy<R: Rng + ?Sized>(&self, params: &GreedyParams, rng: &mut R) -> Result<Vec<FeatureId>> {
        if let Some(t) = &self.fallback {
            let dp = self.bip.positives()[t.sample(rng)];
            return greedy_head(self.dataset, &self.bip, dp, None, params);
        }
        let proposal = self.proposal.as_ref().expect("negatives exist");
        let (dp, dn) = match cftp_sample_pair(proposal, rng, self.horizon_cap) {
            Ok(o) => (o.positive, o.negative),
            Err(Error::CftpTimeout(_)) => {
                log::debug!("cftp timed out, using a proposal draw");
                let mut found = None;
                for _ in 0..100 {
                    let (dp, dn) = proposal.draw(rng);
                    if proposal.ratio(dp, dn) > 0.0 {
                        found = Some((dp, dn));
                        break;
                    }
                }
                found.ok_or(Error::EmptyPool)?
            }
            Err(e) => return Err(e),
        };
        greedy_head(self.dataset, &self.bip, dp, Some(dn), params)
    }
}

fn subsets_of(universe: &[u32], min_size: usize) -> impl Iterator<Item = Vec<u32>> + '_ {
    let n = universe.len();
    (1u64..(1u64 << n)).filter_map(move |mask| {
        if (mask.count_ones() as usize) < min_size {
            return None;
        }
        Some((0..n).filter(|b| mask & (1 << b) != 0).map(|b| universe[b]).collect())
    })
}

/// Exact law of the full-space pair sampler, by scanning all pairs.
pub fn exact_pair_distribution(
    dataset: &Dataset,
    tail: &[LabelId],
    space: HeadSpace<'_>,
) -> Result<BTreeMap<(RecordId, RecordId), f64>> {
    let bip = Bipartition::new(dataset, tail);
    let mut out = BTreeMap::new();
    let mut total = 0.0;
    for &dp in bip.positives() {
        for &dn in bip.negatives() {
            let w = match space {
                HeadSpace::Full => pair_weight(dataset, dp, dn),
                HeadSpace::Reduced { space, index } => {
                    reduced_pair_weight(dataset, space, index, dp, dn) as f64
                }
            };
            if w > 0.0 {
                total += w;
                out.insert((dp, dn), w);
            }
        }
    }
    if total == 0.0 {
        return Err(Error::Unlearnable("every pair has zero weight"));
    }
    out.values_mut().for_each(|v| *v /= total);
    Ok(out)
}

/// Discriminativity normalized over every head of at least `min_size`
/// features drawn from the feature universe, or over the members of
/// `space` when given.
pub fn exact_head_distribution(
    dataset: &Dataset,
    tail: &[LabelId],
    min_size: usize,
    space: Option<&InterpretableSpace>,
) -> Result<BTreeMap<Vec<FeatureId>, f64>> {
    let heads: Vec<Vec<FeatureId>> = match space {
        Some(s) => s.members().to_vec(),
        None => {
            if dataset.n_features() > 16 {
                return Err(Error::TooLarge(format!("{} features", dataset.n_features())));
            }
            let universe: Vec<u32> = (0..dataset.n_features() as u32).collect();
            subsets_of(&universe, min_size.max(1)).collect()
        }
    };
    let bip = Bipartition::new(dataset, tail);
    let mut out = BTreeMap::new();
    let mut total = 0.0;
    for h in heads {
        // plain scan, independent of the inverted index
        let (mut pos, mut neg_hit) = (0u64, 0u64);
        for (i, r) in dataset.records().iter().enumerate() {
            if sets::is_subset(&h, &r.features) {
                if bip.is_positive(i as RecordId) {
                    pos += 1;
                } else {
                    neg_hit += 1;
                }
            }
        }
        let q = pos * (bip.negatives().len() as u64 - neg_hit);
        if q > 0 {
            total += q as f64;
            out.insert(h, q as f64);
        }
    }
    if total == 0.0 {
        return Err(Error::Unlearnable("every head has zero discriminativity"));
    }
    out.values_mut().for_each(|v| *v /= total);
    Ok(out)
}
