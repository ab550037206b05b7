//! Brute-force oracles and fixtures shared by the integration tests. The
//! oracles work from the definitions on plain vectors and do not call the
//! library's coverage or weight code.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use corset::data::{Dataset, Record};
use corset::objective::{Rule, RuleSet};
use rand::Rng;

pub fn subset(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|x| b.contains(x))
}

/// Non-empty subsets of `universe` with at least `min_size` elements.
pub fn subsets(universe: &[u32], min_size: usize) -> Vec<Vec<u32>> {
    let n = universe.len();
    (1u32..(1 << n))
        .filter(|m| m.count_ones() as usize >= min_size.max(1))
        .map(|m| (0..n).filter(|b| m & (1 << b) != 0).map(|b| universe[b]).collect())
        .collect()
}

/// Labels of record `d` covered by `rules` (head and tail both matched).
pub fn covered_on(d: &Record, rules: &[(Vec<u32>, Vec<u32>)]) -> Vec<u32> {
    let mut out: Vec<u32> = Vec::new();
    for (h, t) in rules {
        if subset(h, &d.features) && subset(t, &d.labels) {
            for &k in t {
                if !out.contains(&k) {
                    out.push(k);
                }
            }
        }
    }
    out
}

/// Uncovered area of each candidate tail, normalized.
pub fn tail_oracle(
    d: &Dataset,
    rules: &[(Vec<u32>, Vec<u32>)],
    candidates: &[Vec<u32>],
) -> BTreeMap<Vec<u32>, f64> {
    let mut out = BTreeMap::new();
    let mut total = 0.0;
    for t in candidates {
        let mut area = 0usize;
        for r in d.records() {
            if subset(t, &r.labels) {
                let cov = covered_on(r, rules);
                area += t.iter().filter(|k| !cov.contains(k)).count();
            }
        }
        if area > 0 {
            out.insert(t.clone(), area as f64);
            total += area as f64;
        }
    }
    out.values_mut().for_each(|v| *v /= total);
    out
}

/// Discriminativity of every head of at least `min_size` features.
pub fn head_oracle(d: &Dataset, tail: &[u32], heads: &[Vec<u32>]) -> BTreeMap<Vec<u32>, f64> {
    let mut out = BTreeMap::new();
    let mut total = 0.0;
    for h in heads {
        let (mut pos, mut neg_miss) = (0usize, 0usize);
        for r in d.records() {
            let positive = subset(tail, &r.labels);
            let hit = subset(h, &r.features);
            if positive && hit {
                pos += 1;
            }
            if !positive && !hit {
                neg_miss += 1;
            }
        }
        let q = (pos * neg_miss) as f64;
        if q > 0.0 {
            out.insert(h.clone(), q);
            total += q;
        }
    }
    out.values_mut().for_each(|v| *v /= total);
    out
}

/// Pair weights by counting heads of at least two features in the positive
/// record and not in the negative one.
pub fn pair_oracle(d: &Dataset, tail: &[u32]) -> BTreeMap<(u32, u32), f64> {
    let pos: Vec<u32> = (0..d.len() as u32)
        .filter(|&i| subset(tail, &d.record(i).labels))
        .collect();
    let neg: Vec<u32> = (0..d.len() as u32).filter(|i| !pos.contains(i)).collect();
    let mut out = BTreeMap::new();
    let mut total = 0.0;
    for &p in &pos {
        for &n in &neg {
            let fp = &d.record(p).features;
            let fneg = &d.record(n).features;
            let w = subsets(fp, 2).iter().filter(|h| !subset(h, fneg)).count() as f64;
            if w > 0.0 {
                out.insert((p, n), w);
                total += w;
            }
        }
    }
    out.values_mut().for_each(|v| *v /= total);
    out
}

pub fn total_variation<K: Ord + Hash + Clone>(exact: &BTreeMap<K, f64>, counts: &HashMap<K, usize>) -> f64 {
    let n: usize = counts.values().sum();
    let mut tv = 0.0;
    for (k, p) in exact {
        let q = counts.get(k).copied().unwrap_or(0) as f64 / n as f64;
        tv += (p - q).abs();
    }
    for (k, c) in counts {
        if !exact.contains_key(k) {
            tv += *c as f64 / n as f64;
        }
    }
    tv / 2.0
}

pub fn random_dataset<R: Rng>(rng: &mut R, n: usize, nf: usize, nl: usize, pf: f64, pl: f64) -> Dataset {
    let recs = (0..n)
        .map(|_| {
            let f = (0..nf as u32).filter(|_| rng.gen_bool(pf)).collect();
            let l = (0..nl as u32).filter(|_| rng.gen_bool(pl)).collect();
            Record::new(f, l)
        })
        .collect();
    Dataset::new(recs, nf, nl).unwrap()
}

pub fn random_nonempty<R: Rng>(rng: &mut R, n: usize, p: f64) -> Vec<u32> {
    loop {
        let s: Vec<u32> = (0..n as u32).filter(|_| rng.gen_bool(p)).collect();
        if !s.is_empty() {
            return s;
        }
    }
}

pub fn random_rules<R: Rng>(rng: &mut R, d: &Dataset, k: usize) -> Vec<Rule> {
    (0..k)
        .map(|_| {
            let h = random_nonempty(rng, d.n_features(), 0.3);
            let t = random_nonempty(rng, d.n_labels(), 0.4);
            Rule::new(d, h, t).unwrap()
        })
        .collect()
}

pub fn as_pairs(rules: &[Rule]) -> Vec<(Vec<u32>, Vec<u32>)> {
    rules.iter().map(|r| (r.head().to_vec(), r.tail().to_vec())).collect()
}

pub fn ruleset(d: &Dataset, rules: &[Rule]) -> RuleSet {
    RuleSet::with_rules(d, rules.iter().cloned())
}

/// Spearman correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
