//! Multi-label metrics. Gold and predicted label sets are paired by
//! position.

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, LabelId};
use crate::error::{Error, Result};
use crate::learner::RuleSetModel;
use crate::objective::{coverage_intersection_len, Rule};
use crate::sets;

fn check_lengths(gold: &[Vec<LabelId>], pred: &[Vec<LabelId>]) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::InvalidArgument(format!(
            "{} gold label sets but {} predictions",
            gold.len(),
            pred.len()
        )));
    }
    Ok(())
}

/// Pooled (tp, fp, fn) over all (instance, label) pairs.
pub fn confusion(gold: &[Vec<LabelId>], pred: &[Vec<LabelId>]) -> Result<(usize, usize, usize)> {
    check_lengths(gold, pred)?;
    let mut c = (0, 0, 0);
    for (g, p) in gold.iter().zip(pred) {
        let tp = sets::intersect_len(g, p);
        c.0 += tp;
        c.1 += p.len() - tp;
        c.2 += g.len() - tp;
    }
    Ok(c)
}

fn f1(tp: usize, fp: usize, fn_: usize) -> Option<f64> {
    let den = 2 * tp + fp + fn_;
    (den > 0).then(|| 2.0 * tp as f64 / den as f64)
}

/// `2TP / (2TP + FP + FN)`. Two empty collections agree perfectly and
/// score 1.
pub fn micro_f1(gold: &[Vec<LabelId>], pred: &[Vec<LabelId>]) -> Result<f64> {
    let (tp, fp, fn_) = confusion(gold, pred)?;
    Ok(f1(tp, fp, fn_).unwrap_or(1.0))
}

/// Mean per-label F1 over `n_labels` labels. A label absent from both gold
/// and predictions scores 0, or is left out when `ignore_absent` is set.
pub fn macro_f1(
    gold: &[Vec<LabelId>],
    pred: &[Vec<LabelId>],
    n_labels: usize,
    ignore_absent: bool,
) -> Result<f64> {
    check_lengths(gold, pred)?;
    let mut counts = vec![(0usize, 0usize, 0usize); n_labels];
    let mut bump = |k: LabelId, which: usize| -> Result<()> {
        let c = counts.get_mut(k as usize).ok_or(Error::IdOutOfRange {
            kind: "label",
            id: k as u64,
            bound: n_labels,
        })?;
        match which {
            0 => c.0 += 1,
            1 => c.1 += 1,
            _ => c.2 += 1,
        }
        Ok(())
    };
    for (g, p) in gold.iter().zip(pred) {
        for &k in &sets::intersect(g, p) {
            bump(k, 0)?;
        }
        for &k in &sets::difference(p, g) {
            bump(k, 1)?;
        }
        for &k in &sets::difference(g, p) {
            bump(k, 2)?;
        }
    }
    let scores: Vec<f64> = counts
        .iter()
        .filter_map(|&(tp, fp, fn_)| match f1(tp, fp, fn_) {
            Some(s) => Some(s),
            None if ignore_absent => None,
            None => Some(0.0),
        })
        .collect();
    Ok(if scores.is_empty() {
        0.0
    } else {
        scores.iter().sum::<f64>() / scores.len() as f64
    })
}

/// Share of mismatched (instance, label) cells.
pub fn hamming_loss(gold: &[Vec<LabelId>], pred: &[Vec<LabelId>], n_labels: usize) -> Result<f64> {
    let (_, fp, fn_) = confusion(gold, pred)?;
    let cells = gold.len() * n_labels;
    Ok(if cells == 0 {
        0.0
    } else {
        (fp + fn_) as f64 / cells as f64
    })
}

pub fn hamming_score(gold: &[Vec<LabelId>], pred: &[Vec<LabelId>], n_labels: usize) -> Result<f64> {
    Ok(1.0 - hamming_loss(gold, pred, n_labels)?)
}

/// Mean `|cov_i ∩ cov_j|` over unordered pairs of rules, 0 with fewer than
/// two rules.
pub fn avg_pairwise_overlap(rules: &[Rule]) -> f64 {
    let n = rules.len();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0usize;
    for i in 0..n {
        for j in i + 1..n {
            total += coverage_intersection_len(&rules[i], &rules[j]);
        }
    }
    total as f64 / (n * (n - 1) / 2) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub micro_f1: f64,
    pub macro_f1: f64,
    pub hamming_score: f64,
    pub avg_pairwise_overlap: f64,
    pub rule_count: usize,
}

impl MetricReport {
    pub fn to_table(&self) -> String {
        let rows = [
            ("micro_f1", format!("{:.4}", self.micro_f1)),
            ("macro_f1", format!("{:.4}", self.macro_f1)),
            ("hamming_score", format!("{:.4}", self.hamming_score)),
            ("avg_pairwise_overlap", format!("{:.2}", self.avg_pairwise_overlap)),
            ("rule_count", self.rule_count.to_string()),
        ];
        rows.iter()
            .map(|(k, v)| format!("{k:<22}{v:>12}\n"))
            .collect()
    }
}

/// Scores `model` on `dataset`; overlaps are measured on the same data.
pub fn evaluate(model: &RuleSetModel, dataset: &Dataset, ignore_absent: bool) -> Result<MetricReport> {
    let gold = dataset.label_sets();
    let pred = model.predict_dataset(dataset);
    let rules = model.bind(dataset)?;
    Ok(MetricReport {
        micro_f1: micro_f1(&gold, &pred)?,
        macro_f1: macro_f1(&gold, &pred, dataset.n_labels(), ignore_absent)?,
        hamming_score: hamming_score(&gold, &pred, dataset.n_labels())?,
        avg_pairwise_overlap: avg_pairwise_overlap(&rules),
        rule_count: model.rules.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn micro_f1_cases() {
        let g = vec![vec![0, 1]];
        assert_eq!(micro_f1(&g, &g).unwrap(), 1.0);
        assert_eq!(micro_f1(&g, &[vec![]]).unwrap(), 0.0);
        // gold {a,b}, predicted {a,c}
        assert_eq!(micro_f1(&g, &[vec![0, 2]]).unwrap(), 0.5);
        assert!(micro_f1(&g, &[]).is_err());
    }

    #[test]
    fn hamming_cases() {
        let g = vec![vec![0, 1]];
        assert_eq!(hamming_score(&g, &g, 2).unwrap(), 1.0);
        assert_eq!(hamming_score(&g, &[vec![]], 2).unwrap(), 0.0);
        // one wrong cell out of ten
        let g = vec![vec![0], vec![0]];
        let p = vec![vec![0], vec![0, 4]];
        assert!((hamming_score(&g, &p, 5).unwrap() - 0.9).abs() < 1e-12);
    }

    #[test]
    fn macro_f1_absent_labels() {
        let g = vec![vec![0], vec![1]];
        let p = vec![vec![0], vec![]];
        // label 0: 1, label 1: 0, label 2 absent
        assert!((macro_f1(&g, &p, 3, false).unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((macro_f1(&g, &p, 3, true).unwrap() - 0.5).abs() < 1e-12);
        assert!(macro_f1(&g, &[vec![7], vec![]], 3, false).is_err());
    }

    #[test]
    fn report_table_lists_every_metric() {
        let r = MetricReport {
            micro_f1: 1.0,
            macro_f1: 0.5,
            hamming_score: 0.9,
            avg_pairwise_overlap: 0.0,
            rule_count: 3,
        };
        let t = r.to_table();
        assert_eq!(t.lines().count(), 5);
        assert!(t.contains("rule_count"));
    }

    fn label_sets() -> impl Strategy<Value = Vec<Vec<u32>>> {
        proptest::collection::vec(
            proptest::collection::btree_set(0u32..6, 0..4).prop_map(|s| s.into_iter().collect()),
            1..8,
        )
    }

    proptest! {
        #[test]
        fn scores_in_unit_interval_and_permutation_invariant(
            g in label_sets(),
            p in label_sets(),
            shift in 0u32..6,
        ) {
            let n = g.len().min(p.len());
            let (g, p) = (&g[..n], &p[..n]);
            let perm = |v: &[Vec<u32>]| -> Vec<Vec<u32>> {
                v.iter()
                    .map(|s| {
                        let mut t: Vec<u32> = s.iter().map(|k| (k + shift) % 6).collect();
                        t.sort_unstable();
                        t
                    })
                    .collect()
            };
            let m = micro_f1(g, p).unwrap();
            prop_assert!((0.0..=1.0).contains(&m));
            prop_assert!((m - micro_f1(&perm(g), &perm(p)).unwrap()).abs() < 1e-12);
            let h = hamming_score(g, p, 6).unwrap();
            prop_assert!((h + hamming_loss(g, p, 6).unwrap() - 1.0).abs() < 1e-12);
            let ma = macro_f1(g, p, 6, false).unwrap();
            prop_assert!((0.0..=1.0).contains(&ma));
        }
    }
}
