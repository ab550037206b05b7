//! Interpretable sample spaces.
//!
//! Items (labels, or features for reduced-space head sampling) form a
//! directed co-occurrence graph with `p(u, v) = |D[u] ∩ D[v]| / |D[u]|`. A
//! set `S` is admitted when every pair in it is connected in both directions
//! and the product of all `2·C(|S|, 2)` directed weights is at least `θ`.
//! Singletons are always admitted. The product can only shrink as `S` grows,
//! so the depth-first enumeration prunes a branch as soon as it drops below
//! `θ`.
//!
//! [`ContainmentIndex`] answers "which members are contained in record D"
//! for every record at once with an inverted index plus a prefix tree over
//! the members.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::data::{Dataset, Record, RecordId};
use crate::error::{Error, Result};
use crate::sets;

pub const DEFAULT_MAX_SIZE: usize = 5;
pub const DEFAULT_NODE_BUDGET: usize = 5_000_000;

/// Which side of the records a space is built over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Labels,
    Features,
}

impl Side {
    pub fn items(self, record: &Record) -> &[u32] {
        match self {
            Side::Labels => &record.labels,
            Side::Features => &record.features,
        }
    }

    pub fn index(self, dataset: &Dataset, item: u32) -> &[RecordId] {
        match self {
            Side::Labels => dataset.label_index(item),
            Side::Features => dataset.feature_index(item),
        }
    }

    pub fn n_items(self, dataset: &Dataset) -> usize {
        match self {
            Side::Labels => dataset.n_labels(),
            Side::Features => dataset.n_features(),
        }
    }
}

/// Directed weighted co-occurrence graph.
#[derive(Debug, Clone)]
pub struct CooccurrenceGraph {
    support: Vec<usize>,
    out: Vec<Vec<(u32, f64)>>,
}

pub type LabelGraph = CooccurrenceGraph;

impl CooccurrenceGraph {
    pub fn build(dataset: &Dataset, side: Side) -> Self {
        let n = side.n_items(dataset);
        let support: Vec<usize> = (0..n as u32).map(|u| side.index(dataset, u).len()).collect();
        let mut counts: BTreeMap<(u32, u32), u32> = BTreeMap::new();
        if n <= 2048 {
            let mut dense = vec![0u32; n * n];
            for r in dataset.records() {
                let items = side.items(r);
                for (a, &u) in items.iter().enumerate() {
                    for &v in &items[a + 1..] {
                        dense[u as usize * n + v as usize] += 1;
                    }
                }
            }
            for u in 0..n {
                for v in u + 1..n {
                    let c = dense[u * n + v];
                    if c > 0 {
                        counts.insert((u as u32, v as u32), c);
                    }
                }
            }
        } else {
            let mut sparse: HashMap<(u32, u32), u32> = HashMap::new();
            for r in dataset.records() {
                let items = side.items(r);
                for (a, &u) in items.iter().enumerate() {
                    for &v in &items[a + 1..] {
                        *sparse.entry((u, v)).or_default() += 1;
                    }
                }
            }
            counts.extend(sparse);
        }
        let mut out = vec![Vec::new(); n];
        for (&(u, v), &c) in &counts {
            out[u as usize].push((v, c as f64 / support[u as usize] as f64));
            out[v as usize].push((u, c as f64 / support[v as usize] as f64));
        }
        for edges in &mut out {
            edges.sort_by_key(|e| e.0);
        }
        CooccurrenceGraph { support, out }
    }

    pub fn n_nodes(&self) -> usize {
        self.out.len()
    }

    pub fn support_len(&self, u: u32) -> usize {
        self.support[u as usize]
    }

    /// Out-edges of `u` as `(v, p(u, v))`, ascending in `v`.
    pub fn out_edges(&self, u: u32) -> &[(u32, f64)] {
        &self.out[u as usize]
    }

    pub fn weight(&self, u: u32, v: u32) -> Option<f64> {
        let edges = &self.out[u as usize];
        edges
            .binary_search_by_key(&v, |e| e.0)
            .ok()
            .map(|i| edges[i].1)
    }

    pub fn n_edges(&self) -> usize {
        self.out.iter().map(Vec::len).sum()
    }
}

pub fn build_label_graph(dataset: &Dataset) -> LabelGraph {
    CooccurrenceGraph::build(dataset, Side::Labels)
}

/// Family of admitted item sets with their clique probabilities.
#[derive(Debug, Clone)]
pub struct InterpretableSpace {
    members: Vec<Vec<u32>>,
    probabilities: Vec<f64>,
    theta: f64,
    max_size: usize,
}

impl InterpretableSpace {
    pub fn members(&self) -> &[Vec<u32>] {
        &self.members
    }

    pub fn member(&self, id: u32) -> &[u32] {
        &self.members[id as usize]
    }

    pub fn probability(&self, id: u32) -> f64 {
        self.probabilities[id as usize]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn max_size(&self) -> usize {
        self.max_size
    }

    pub fn position(&self, set: &[u32]) -> Option<u32> {
        self.members.iter().position(|m| m == set).map(|p| p as u32)
    }

    /// Tab-separated dump, one member per line: ids, then probability.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (m, p) in self.members.iter().zip(&self.probabilities) {
            let ids: Vec<String> = m.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{}\t{p}", ids.join(" "));
        }
        out
    }

    /// Space made of the given sets, each with probability 1. Mostly for tests
    /// and hand-built spaces.
    pub fn from_members(mut members: Vec<Vec<u32>>) -> Self {
        for m in &mut members {
            sets::normalize(m);
        }
        members.retain(|m| !m.is_empty());
        members.sort();
        members.dedup();
        let max_size = members.iter().map(Vec::len).max().unwrap_or(0);
        let probabilities = vec![1.0; members.len()];
        InterpretableSpace {
            members,
            probabilities,
            theta: 1.0,
            max_size,
        }
    }
}

/// Depth-first enumeration of probable cliques.
///
/// `node_budget` bounds the number of extension attempts.
pub fn enumerate_probable_cliques(
    graph: &CooccurrenceGraph,
    theta: f64,
    max_size: usize,
    node_budget: usize,
) -> Result<InterpretableSpace> {
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(Error::InvalidArgument(format!("theta {theta} outside (0, 1]")));
    }
    if max_size == 0 {
        return Err(Error::InvalidArgument("max_size must be at least 1".into()));
    }
    let n = graph.n_nodes();
    // mutual[u] = (v, p(u,v)·p(v,u)) for v > u with edges both ways
    let mutual: Vec<Vec<(u32, f64)>> = (0..n as u32)
        .map(|u| {
            graph
                .out_edges(u)
                .iter()
                .filter(|&&(v, _)| v > u)
                .filter_map(|&(v, w)| graph.weight(v, u).map(|back| (v, w * back)))
                .collect()
        })
        .collect();

    let mut members = Vec::new();
    let mut probabilities = Vec::new();
    let mut visited = 0usize;
    let mut stack_set = Vec::with_capacity(max_size);
    for u in 0..n as u32 {
        members.push(vec![u]);
        probabilities.push(1.0);
        if max_size < 2 {
            continue;
        }
        stack_set.clear();
        stack_set.push(u);
        extend(
            &mutual,
            &mut stack_set,
            1.0,
            mutual[u as usize].clone(),
            theta,
            max_size,
            node_budget,
            &mut visited,
            &mut members,
            &mut probabilities,
        )?;
    }
    Ok(InterpretableSpace {
        members,
        probabilities,
        theta,
        max_size,
    })
}

#[allow(clippy::too_many_arguments)]
fn extend(
    mutual: &[Vec<(u32, f64)>],
    current: &mut Vec<u32>,
    prob: f64,
    candidates: Vec<(u32, f64)>,
    theta: f64,
    max_size: usize,
    budget: usize,
    visited: &mut usize,
    members: &mut Vec<Vec<u32>>,
    probabilities: &mut Vec<f64>,
) -> Result<()> {
    for (pos, &(v, factor)) in candidates.iter().enumerate() {
        *visited += 1;
        if *visited > budget {
            return Err(Error::NodeBudgetExceeded(budget));
        }
        let p = prob * factor;
        if p < theta {
            continue;
        }
        current.push(v);
        members.push(current.clone());
        probabilities.push(p);
        if current.len() < max_size {
            let links = &mutual[v as usize];
            let next: Vec<(u32, f64)> = candidates[pos + 1..]
                .iter()
                .filter_map(|&(x, acc)| {
                    links
                        .binary_search_by_key(&x, |e| e.0)
                        .ok()
                        .map(|i| (x, acc * links[i].1))
                })
                .collect();
            if !next.is_empty() {
                extend(
                    mutual,
                    current,
                    p,
                    next,
                    theta,
                    max_size,
                    budget,
                    visited,
                    members,
                    probabilities,
                )?;
            }
        }
        current.pop();
    }
    Ok(())
}

/// Label-side interpretable space.
pub fn build_label_space(dataset: &Dataset, theta: f64, max_size: usize) -> Result<InterpretableSpace> {
    let g = build_label_graph(dataset);
    enumerate_probable_cliques(&g, theta, max_size, DEFAULT_NODE_BUDGET)
}

/// Feature-side space for reduced-space head sampling. Dense feature
/// matrices can make the enumeration explode; `node_budget` turns that into
/// an error instead of a hang.
pub fn build_feature_space(
    dataset: &Dataset,
    theta: f64,
    max_size: usize,
    node_budget: usize,
) -> Result<InterpretableSpace> {
    let g = CooccurrenceGraph::build(dataset, Side::Features);
    enumerate_probable_cliques(&g, theta, max_size, node_budget)
}

/// For every record, the ids of the space members it contains.
#[derive(Debug, Clone)]
pub struct ContainmentIndex {
    side: Side,
    per_record: Vec<Vec<u32>>,
}

#[derive(Default)]
struct TrieNode {
    children: BTreeMap<u32, usize>,
    ending: Vec<u32>,
}

impl ContainmentIndex {
    /// Set-containment join of the records against the space members.
    ///
    /// Members are rewritten in a global item order (ascending frequency,
    /// ties by id) and inserted in a prefix tree. Walking the tree carries
    /// the list of records containing the current prefix, intersected with
    /// one inverted list per edge, so members sharing a prefix share that
    /// work.
    pub fn build(dataset: &Dataset, space: &InterpretableSpace, side: Side) -> Self {
        let n_items = side.n_items(dataset);
        let mut order: Vec<u32> = (0..n_items as u32).collect();
        order.sort_by_key(|&u| (side.index(dataset, u).len(), u));
        let mut rank = vec![0u32; n_items];
        for (r, &u) in order.iter().enumerate() {
            rank[u as usize] = r as u32;
        }

        let mut nodes = vec![TrieNode::default()];
        for (id, m) in space.members().iter().enumerate() {
            let mut ranked: Vec<u32> = m.iter().map(|&u| rank[u as usize]).collect();
            ranked.sort_unstable();
            let mut at = 0;
            for r in ranked {
                at = match nodes[at].children.get(&r) {
                    Some(&c) => c,
                    None => {
                        nodes.push(TrieNode::default());
                        let c = nodes.len() - 1;
                        nodes[at].children.insert(r, c);
                        c
                    }
                };
            }
            nodes[at].ending.push(id as u32);
        }

        let mut per_record = vec![Vec::new(); dataset.len()];
        let mut stack: Vec<(usize, Vec<RecordId>)> = Vec::new();
        for (&r, &c) in &nodes[0].children {
            let item = order[r as usize];
            stack.push((c, side.index(dataset, item).to_vec()));
        }
        while let Some((node, records)) = stack.pop() {
            for &m in &nodes[node].ending {
                for &i in &records {
                    per_record[i as usize].push(m);
                }
            }
            for (&r, &c) in &nodes[node].children {
                let item = order[r as usize];
                let next = sets::intersect(&records, side.index(dataset, item));
                if !next.is_empty() {
                    stack.push((c, next));
                }
            }
        }
        for l in &mut per_record {
            l.sort_unstable();
        }
        ContainmentIndex { side, per_record }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    /// I[D] for record `i`: ascending member ids.
    pub fn members_of(&self, i: RecordId) -> &[u32] {
        &self.per_record[i as usize]
    }

    pub fn n_records(&self) -> usize {
        self.per_record.len()
    }
}

pub fn build_containment_index(dataset: &Dataset, space: &InterpretableSpace) -> ContainmentIndex {
    ContainmentIndex::build(dataset, space, Side::Labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn labels_only(sets: &[&[u32]], nl: usize) -> Dataset {
        Dataset::new(
            sets.iter().map(|l| Record::new(vec![], l.to_vec())).collect(),
            0,
            nl,
        )
        .unwrap()
    }

    #[test]
    fn graph_weights_are_conditional_frequencies() {
        // u=0 in records {1,2}, v=1 in {2,3}, w=2 only with v
        let d = labels_only(&[&[], &[0], &[0, 1], &[1, 2]], 3);
        let g = build_label_graph(&d);
        assert_eq!(g.weight(0, 1), Some(0.5));
        assert_eq!(g.weight(1, 0), Some(0.5));
        assert_eq!(g.weight(2, 1), Some(1.0));
        assert_eq!(g.weight(0, 2), None);
    }

    #[test]
    fn asymmetric_pair_product() {
        // p(0,1) = 0.8, p(1,0) = 0.5
        let mut recs: Vec<&[u32]> = vec![&[0, 1]; 4];
        recs.push(&[0]);
        recs.extend([&[1][..]; 4]);
        let d = labels_only(&recs, 2);
        let g = build_label_graph(&d);
        assert!((g.weight(0, 1).unwrap() - 0.8).abs() < 1e-12);
        assert!((g.weight(1, 0).unwrap() - 0.5).abs() < 1e-12);
        let s = enumerate_probable_cliques(&g, 0.3, 5, 1000).unwrap();
        let id = s.position(&[0, 1]).unwrap();
        assert!((s.probability(id) - 0.4).abs() < 1e-12);
        let s = enumerate_probable_cliques(&g, 0.5, 5, 1000).unwrap();
        assert!(s.position(&[0, 1]).is_none());
    }

    #[test]
    fn theta_one_keeps_only_certain_cliques() {
        let d = labels_only(&[&[0, 1], &[0, 1], &[1, 2], &[3]], 4);
        let g = build_label_graph(&d);
        let s = enumerate_probable_cliques(&g, 1.0, 5, 1000).unwrap();
        // p(0,1) = 1 but p(1,0) = 2/3, p(2,1) = 1 but p(1,2) = 1/3
        let mut members = s.members().to_vec();
        members.sort();
        assert_eq!(members, vec![vec![0], vec![1], vec![2], vec![3]]);
        let d = labels_only(&[&[0, 1], &[0, 1], &[3]], 4);
        let s = enumerate_probable_cliques(&build_label_graph(&d), 1.0, 5, 1000).unwrap();
        assert!(s.position(&[0, 1]).is_some());
        assert_eq!(s.len(), 5);
    }

    #[test]
    fn budget_overflow_is_an_error() {
        let all: Vec<u32> = (0..12).collect();
        let d = labels_only(&[&all], 12);
        let g = build_label_graph(&d);
        assert!(matches!(
            enumerate_probable_cliques(&g, 0.5, 12, 100),
            Err(Error::NodeBudgetExceeded(100))
        ));
        assert!(enumerate_probable_cliques(&g, 0.0, 3, 100).is_err());
    }

    #[test]
    fn containment_small_cases() {
        let d = labels_only(&[&[0, 2], &[]], 3);
        let space = InterpretableSpace::from_members(vec![vec![0], vec![0, 1]]);
        let idx = build_containment_index(&d, &space);
        assert_eq!(idx.members_of(0), &[space.position(&[0]).unwrap()]);
        assert!(idx.members_of(1).is_empty());
    }

    /// Product of all directed weights, straight from the definition.
    fn clique_probability(g: &CooccurrenceGraph, s: &[u32]) -> Option<f64> {
        let mut p = 1.0;
        for &u in s {
            for &v in s {
                if u != v {
                    p *= g.weight(u, v)?;
                }
            }
        }
        Some(p)
    }

    fn random_labels() -> impl Strategy<Value = Dataset> {
        proptest::collection::vec(proptest::collection::vec(0u32..10, 0..6), 1..32)
            .prop_map(|ls| {
                Dataset::new(ls.into_iter().map(|l| Record::new(vec![], l)).collect(), 0, 10).unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn dfs_matches_exhaustive_enumeration(d in random_labels(), theta in 0.05f64..1.0, max_size in 1usize..5) {
            let g = build_label_graph(&d);
            let space = enumerate_probable_cliques(&g, theta, max_size, usize::MAX).unwrap();
            let mut got: Vec<Vec<u32>> = space.members().to_vec();
            got.sort();
            let mut want = Vec::new();
            for mask in 1u32..(1 << 10) {
                let s: Vec<u32> = (0..10).filter(|b| mask & (1 << b) != 0).collect();
                if s.len() > max_size {
                    continue;
                }
                if s.len() == 1 {
                    want.push(s);
                    continue;
                }
                if let Some(p) = clique_probability(&g, &s) {
                    if p >= theta {
                        want.push(s);
                    }
                }
            }
            want.sort();
            prop_assert_eq!(got, want);
            for (m, &p) in space.members().iter().zip(&space.probabilities) {
                let exact = clique_probability(&g, m).unwrap();
                prop_assert!((exact - p).abs() < 1e-9);
            }
        }

        #[test]
        fn containment_matches_naive_scan(d in random_labels(), theta in 0.05f64..1.0) {
            let space = build_label_space(&d, theta, 4).unwrap();
            let idx = build_containment_index(&d, &space);
            for (i, r) in d.records().iter().enumerate() {
                let naive: Vec<u32> = space.members().iter().enumerate()
                    .filter(|(_, m)| sets::is_subset(m, &r.labels))
                    .map(|(j, _)| j as u32)
                    .collect();
                prop_assert_eq!(idx.members_of(i as u32), naive.as_slice());
            }
        }

        #[test]
        fn every_present_label_is_in_some_member(d in random_labels(), theta in 0.05f64..1.0) {
            let space = build_label_space(&d, theta, 3).unwrap();
            for k in 0..10u32 {
                if !d.label_index(k).is_empty() {
                    prop_assert!(space.members().iter().any(|m| m.contains(&k)));
                }
            }
        }
    }
}
