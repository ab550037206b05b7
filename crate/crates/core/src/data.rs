//! Binary multi-label datasets: records, inverted indexes, the sparse text
//! format, percentile binarization of dense inputs and train/validation/test
//! splitting.
//!
//! Sparse text format (UTF-8, line oriented):
//!
//! ```text
//! <n_records> <n_features> <n_labels>
//! <feature ids...> | <label ids...>
//! ```
//!
//! One record per line after the header, ids 0-based. Either side of the `|`
//! may be empty.

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::sets;

pub type FeatureId = u32;
pub type LabelId = u32;
/// Stable 0-based position of a record in its dataset.
pub type RecordId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Record {
    pub features: Vec<FeatureId>,
    pub labels: Vec<LabelId>,
}

impl Record {
    /// Builds a record, sorting and deduplicating both sides.
    pub fn new(mut features: Vec<FeatureId>, mut labels: Vec<LabelId>) -> Self {
        sets::normalize(&mut features);
        sets::normalize(&mut labels);
        Record { features, labels }
    }
}

/// Immutable binary feature/label matrices with record↔feature and
/// record↔label inverted indexes.
#[derive(Debug, Clone)]
pub struct Dataset {
    records: Vec<Record>,
    n_features: usize,
    n_labels: usize,
    feature_index: Vec<Vec<RecordId>>,
    label_index: Vec<Vec<RecordId>>,
    total_feature_occurrences: usize,
    total_label_occurrences: usize,
    all_ids: Vec<RecordId>,
}

/// Query argument for [`Dataset::support_set`].
#[derive(Debug, Clone, Copy)]
pub enum Itemset<'a> {
    Features(&'a [FeatureId]),
    Labels(&'a [LabelId]),
    Rule {
        head: &'a [FeatureId],
        tail: &'a [LabelId],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub records: usize,
    pub features: usize,
    pub labels: usize,
    /// Mean number of labels per record.
    pub cardinality: f64,
    pub distinct_label_sets: usize,
}

impl Dataset {
    pub fn new(records: Vec<Record>, n_features: usize, n_labels: usize) -> Result<Self> {
        let mut feature_index = vec![Vec::new(); n_features];
        let mut label_index = vec![Vec::new(); n_labels];
        let mut tf = 0;
        let mut tl = 0;
        let mut normalized = Vec::with_capacity(records.len());
        for (i, r) in records.into_iter().enumerate() {
            let r = if sets::is_sorted_set(&r.features) && sets::is_sorted_set(&r.labels) {
                r
            } else {
                Record::new(r.features, r.labels)
            };
            for &f in &r.features {
                let slot = feature_index.get_mut(f as usize).ok_or(Error::IdOutOfRange {
                    kind: "feature",
                    id: f as u64,
                    bound: n_features,
                })?;
                slot.push(i as RecordId);
            }
            for &l in &r.labels {
                let slot = label_index.get_mut(l as usize).ok_or(Error::IdOutOfRange {
                    kind: "label",
                    id: l as u64,
                    bound: n_labels,
                })?;
                slot.push(i as RecordId);
            }
            tf += r.features.len();
            tl += r.labels.len();
            normalized.push(r);
        }
        let all_ids = (0..normalized.len() as RecordId).collect();
        Ok(Dataset {
            records: normalized,
            n_features,
            n_labels,
            feature_index,
            label_index,
            total_feature_occurrences: tf,
            total_label_occurrences: tl,
            all_ids,
        })
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn record(&self, id: RecordId) -> &Record {
        &self.records[id as usize]
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_labels(&self) -> usize {
        self.n_labels
    }

    /// Records containing feature `f`, ascending.
    pub fn feature_index(&self, f: FeatureId) -> &[RecordId] {
        &self.feature_index[f as usize]
    }

    /// Records containing label `k`, ascending.
    pub fn label_index(&self, k: LabelId) -> &[RecordId] {
        &self.label_index[k as usize]
    }

    /// ‖F‖, the total number of feature occurrences.
    pub fn total_feature_occurrences(&self) -> usize {
        self.total_feature_occurrences
    }

    /// ‖L‖, the total number of label occurrences.
    pub fn total_label_occurrences(&self) -> usize {
        self.total_label_occurrences
    }

    pub fn all_ids(&self) -> &[RecordId] {
        &self.all_ids
    }

    /// Records whose features include every id of `head`. Empty head matches
    /// every record.
    pub fn support_of_features(&self, head: &[FeatureId]) -> Vec<RecordId> {
        if head.is_empty() {
            return self.all_ids.clone();
        }
        let lists: Vec<&[RecordId]> = head.iter().map(|&f| self.feature_index(f)).collect();
        sets::intersect_all(&lists)
    }

    pub fn support_of_labels(&self, tail: &[LabelId]) -> Vec<RecordId> {
        if tail.is_empty() {
            return self.all_ids.clone();
        }
        let lists: Vec<&[RecordId]> = tail.iter().map(|&k| self.label_index(k)).collect();
        sets::intersect_all(&lists)
    }

    /// D[H] ∩ D[T].
    pub fn support_of_rule(&self, head: &[FeatureId], tail: &[LabelId]) -> Vec<RecordId> {
        let mut lists: Vec<&[RecordId]> = head.iter().map(|&f| self.feature_index(f)).collect();
        lists.extend(tail.iter().map(|&k| self.label_index(k)));
        if lists.is_empty() {
            return self.all_ids.clone();
        }
        sets::intersect_all(&lists)
    }

    pub fn support_set(&self, query: Itemset<'_>) -> Vec<RecordId> {
        match query {
            Itemset::Features(h) => self.support_of_features(h),
            Itemset::Labels(t) => self.support_of_labels(t),
            Itemset::Rule { head, tail } => self.support_of_rule(head, tail),
        }
    }

    /// New dataset made of the given records, renumbered 0.. in the given order.
    pub fn subset(&self, ids: &[RecordId]) -> Dataset {
        let records = ids.iter().map(|&i| self.records[i as usize].clone()).collect();
        Dataset::new(records, self.n_features, self.n_labels).expect("ids already validated")
    }

    pub fn label_sets(&self) -> Vec<Vec<LabelId>> {
        self.records.iter().map(|r| r.labels.clone()).collect()
    }

    pub fn stats(&self) -> DatasetStats {
        let distinct: HashSet<&[LabelId]> = self.records.iter().map(|r| r.labels.as_slice()).collect();
        DatasetStats {
            records: self.len(),
            features: self.n_features,
            labels: self.n_labels,
            cardinality: if self.is_empty() {
                0.0
            } else {
                self.total_label_occurrences as f64 / self.len() as f64
            },
            distinct_label_sets: distinct.len(),
        }
    }

    pub fn parse_sparse(text: &str) -> Result<Dataset> {
        let mut lines = text.lines().enumerate();
        let (n, nf, nl) = loop {
            let Some((i, line)) = lines.next() else {
                return Err(Error::Parse {
                    line: 1,
                    msg: "missing header".into(),
                });
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<&str> = line.split_whitespace().collect();
            if nums.len() != 3 {
                return Err(Error::Parse {
                    line: i + 1,
                    msg: format!("header needs 3 integers, found {}", nums.len()),
                });
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("bad header value `{s}`: {e}"),
                })
            };
            break (parse(nums[0])?, parse(nums[1])?, parse(nums[2])?);
        };

        let mut records = Vec::with_capacity(n);
        for (i, line) in lines {
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                // a record line always carries `|`, so blank lines are padding
                continue;
            }
            let Some((fpart, lpart)) = trimmed.split_once('|') else {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "missing `|` separator".into(),
                });
            };
            let features = parse_ids(fpart, lineno, "feature", nf)?;
            let labels = parse_ids(lpart, lineno, "label", nl)?;
            records.push(Record::new(features, labels));
        }
        if records.len() != n {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("header declares {n} records, found {}", records.len()),
            });
        }
        Dataset::new(records, nf, nl)
    }

    pub fn load_sparse(path: impl AsRef<Path>) -> Result<Dataset> {
        let text = std::fs::read_to_string(path)?;
        Dataset::parse_sparse(&text)
    }

    pub fn to_sparse_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.len(), self.n_features, self.n_labels);
        for r in &self.records {
            out.push_str(&join_ids(&r.features));
            out.push_str(if r.features.is_empty() { "|" } else { " |" });
            if !r.labels.is_empty() {
                out.push(' ');
                out.push_str(&join_ids(&r.labels));
            }
            out.push('\n');
        }
        out
    }

    pub fn write_sparse(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_sparse_string())?;
        Ok(())
    }

    /// Random partition into train/validation/test by record id.
    ///
    /// `fractions` must be positive and sum to 1. Record ids inside each part
    /// keep their original relative order.
    pub fn split_ids(&self, fractions: [f64; 3], seed: u64) -> Result<[Vec<RecordId>; 3]> {
        if fractions.iter().any(|&f| !(f > 0.0)) {
            return Err(Error::InvalidArgument("split fractions must be positive".into()));
        }
        let total: f64 = fractions.iter().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidArgument(format!(
                "split fractions sum to {total}, expected 1"
            )));
        }
        let mut ids = self.all_ids.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ids.shuffle(&mut rng);
        let n = ids.len();
        let n_train = (fractions[0] * n as f64).round() as usize;
        let n_val = ((fractions[1] * n as f64).round() as usize).min(n - n_train.min(n));
        let n_train = n_train.min(n);
        let mut train = ids[..n_train].to_vec();
        let mut val = ids[n_train..n_train + n_val].to_vec();
        let mut test = ids[n_train + n_val..].to_vec();
        for (part, name) in [(&train, "train"), (&val, "validation"), (&test, "test")] {
            if part.is_empty() {
                return Err(Error::EmptySplit(name));
            }
        }
        train.sort_unstable();
        val.sort_unstable();
        test.sort_unstable();
        Ok([train, val, test])
    }

    pub fn split(&self, fractions: [f64; 3], seed: u64) -> Result<(Dataset, Dataset, Dataset)> {
        let [a, b, c] = self.split_ids(fractions, seed)?;
        Ok((self.subset(&a), self.subset(&b), self.subset(&c)))
    }
}

fn parse_ids(part: &str, line: usize, kind: &'static str, bound: usize) -> Result<Vec<u32>> {
    part.split_whitespace()
        .map(|tok| {
            let id: u64 = tok.parse().map_err(|e| Error::Parse {
                line,
                msg: format!("bad {kind} id `{tok}`: {e}"),
            })?;
            if id as usize >= bound {
                return Err(Error::Parse {
                    line,
                    msg: Error::IdOutOfRange { kind, id, bound }.to_string(),
                });
            }
            Ok(id as u32)
        })
        .collect()
}

fn join_ids(ids: &[u32]) -> String {
    let mut s = String::new();
    for (i, id) in ids.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{id}");
    }
    s
}

/// Per-column percentile thresholds fitted on training rows.
///
/// Percentiles use linear interpolation between order statistics; a cell
/// maps to 1 iff its value is `>=` the column threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct PercentileBinarizer {
    pub thresholds: Vec<f64>,
}

impl PercentileBinarizer {
    pub fn fit(rows: &[Vec<f64>], percentile: f64) -> Result<Self> {
        if !(0.0..=100.0).contains(&percentile) {
            return Err(Error::InvalidArgument(format!(
                "percentile {percentile} outside [0, 100]"
            )));
        }
        let Some(first) = rows.first() else {
            return Err(Error::InvalidArgument("no rows to fit".into()));
        };
        let width = first.len();
        let mut thresholds = Vec::with_capacity(width);
        let mut column = Vec::with_capacity(rows.len());
        for j in 0..width {
            column.clear();
            for (i, row) in rows.iter().enumerate() {
                let v = *row.get(j).ok_or_else(|| Error::Parse {
                    line: i + 1,
                    msg: format!("row has {} columns, expected {width}", row.len()),
                })?;
                column.push(v);
            }
            column.sort_by(|a, b| a.total_cmp(b));
            thresholds.push(percentile_of_sorted(&column, percentile));
        }
        Ok(PercentileBinarizer { thresholds })
    }

    /// Feature set of one row.
    pub fn transform_row(&self, row: &[f64]) -> Vec<FeatureId> {
        row.iter()
            .zip(&self.thresholds)
            .enumerate()
            .filter(|(_, (v, t))| *v >= *t)
            .map(|(j, _)| j as FeatureId)
            .collect()
    }
}

/// Linear-interpolation percentile of an ascending slice.
pub fn percentile_of_sorted(sorted: &[f64], percentile: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = percentile / 100.0 * (n - 1) as f64;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

/// Binarizes a dense table column by column, thresholds computed over all of
/// its rows.
pub fn binarize_numeric(matrix: &[Vec<f64>], percentile: f64) -> Result<Vec<Vec<bool>>> {
    let b = PercentileBinarizer::fit(matrix, percentile)?;
    Ok(matrix
        .iter()
        .map(|row| row.iter().zip(&b.thresholds).map(|(v, t)| v >= t).collect())
        .collect())
}

pub fn read_dense_csv(path: impl AsRef<Path>) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)?;
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|s| {
                s.parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 1,
                    msg: format!("bad number `{s}`: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Reads a label sidecar: one line per record of space-separated label ids
/// (an optional leading `|` is accepted).
pub fn parse_label_lines(text: &str) -> Result<Vec<Vec<LabelId>>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| {
            let line = line.trim().trim_start_matches('|');
            parse_ids(line, i + 1, "label", u32::MAX as usize)
        })
        .collect()
}

/// Builds a dataset from a dense numeric table and per-record label sets.
/// Thresholds are fitted on the first `fit_rows` rows (all rows when `None`).
pub fn dataset_from_dense(
    rows: &[Vec<f64>],
    labels: Vec<Vec<LabelId>>,
    n_labels: Option<usize>,
    percentile: f64,
    fit_rows: Option<usize>,
) -> Result<(Dataset, PercentileBinarizer)> {
    if rows.len() != labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{} feature rows but {} label rows",
            rows.len(),
            labels.len()
        )));
    }
    let fit = &rows[..fit_rows.unwrap_or(rows.len()).min(rows.len())];
    let binarizer = PercentileBinarizer::fit(fit, percentile)?;
    let n_features = binarizer.thresholds.len();
    let inferred = labels.iter().flatten().map(|&k| k as usize + 1).max().unwrap_or(0);
    let n_labels = n_labels.unwrap_or(inferred);
    let records = rows
        .iter()
        .zip(labels)
        .map(|(row, l)| Record::new(binarizer.transform_row(row), l))
        .collect();
    Ok((Dataset::new(records, n_features, n_labels)?, binarizer))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const TOY: &str = "2 4 3\n0 1 | 0\n2 3 | 1 2\n";

    #[test]
    fn parses_toy_file() {
        let d = Dataset::parse_sparse(TOY).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.record(0).features, vec![0, 1]);
        assert_eq!(d.record(1).labels, vec![1, 2]);
        assert_eq!(d.total_feature_occurrences(), 4);
        assert_eq!(d.total_label_occurrences(), 3);
        assert_eq!(d.label_index(2), &[1]);
    }

    #[test]
    fn empty_record_line() {
        let d = Dataset::parse_sparse("1 3 3\n|\n").unwrap();
        assert!(d.record(0).features.is_empty());
        assert!(d.record(0).labels.is_empty());
    }

    #[test]
    fn sparse_round_trip() {
        let d = Dataset::parse_sparse("3 4 3\n0 1 | 0\n|\n| 2\n").unwrap();
        let again = Dataset::parse_sparse(&d.to_sparse_string()).unwrap();
        assert_eq!(d.records(), again.records());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = Dataset::parse_sparse("1 2 2\n0 5 | 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = Dataset::parse_sparse("1 2 2\n0 1 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = Dataset::parse_sparse("2 2 2\n0 | 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = Dataset::parse_sparse("1 2 2\n0 x | 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }

    #[test]
    fn empty_query_matches_everything() {
        let d = Dataset::parse_sparse(TOY).unwrap();
        assert_eq!(d.support_set(Itemset::Features(&[])), vec![0, 1]);
        assert_eq!(d.support_set(Itemset::Labels(&[])), vec![0, 1]);
    }

    #[test]
    fn worked_record_head_match() {
        let d = Dataset::new(vec![Record::new(vec![0, 1, 2, 3], vec![0, 1, 2])], 4, 3).unwrap();
        assert_eq!(d.support_of_features(&[1, 2]), vec![0]);
    }

    #[test]
    fn ninetieth_percentile_keeps_only_the_top_value() {
        let col: Vec<Vec<f64>> = (1..=10).map(|v| vec![v as f64]).collect();
        let b = binarize_numeric(&col, 90.0).unwrap();
        let ones: Vec<usize> = b.iter().enumerate().filter(|(_, r)| r[0]).map(|(i, _)| i).collect();
        assert_eq!(ones, vec![9]);
    }

    #[test]
    fn zero_percentile_and_constant_columns_are_all_ones() {
        let col: Vec<Vec<f64>> = (1..=10).map(|v| vec![v as f64, 3.5]).collect();
        let b = binarize_numeric(&col, 0.0).unwrap();
        assert!(b.iter().all(|r| r[0] && r[1]));
        let b = binarize_numeric(&col, 90.0).unwrap();
        assert!(b.iter().all(|r| r[1]));
    }

    #[test]
    fn split_is_a_deterministic_partition() {
        let records = (0..50).map(|i| Record::new(vec![i % 3], vec![i % 2])).collect();
        let d = Dataset::new(records, 3, 2).unwrap();
        let a = d.split_ids([0.6, 0.2, 0.2], 7).unwrap();
        let b = d.split_ids([0.6, 0.2, 0.2], 7).unwrap();
        assert_eq!(a, b);
        let mut all: Vec<u32> = a.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, d.all_ids());
        assert_eq!(a[0].len(), 30);
    }

    #[test]
    fn split_rejects_empty_parts_and_bad_fractions() {
        let records = (0..3).map(|i| Record::new(vec![i], vec![])).collect();
        let d = Dataset::new(records, 3, 1).unwrap();
        assert!(matches!(d.split_ids([0.9, 0.05, 0.05], 1), Err(Error::EmptySplit(_))));
        assert!(d.split_ids([0.5, 0.5, 0.5], 1).is_err());
        assert!(d.split_ids([1.0, 0.0, 0.0], 1).is_err());
    }

    fn random_dataset() -> impl Strategy<Value = Dataset> {
        let rec = (
            proptest::collection::vec(0u32..6, 0..6),
            proptest::collection::vec(0u32..5, 0..5),
        );
        proptest::collection::vec(rec, 1..64).prop_map(|rs| {
            let records = rs.into_iter().map(|(f, l)| Record::new(f, l)).collect();
            Dataset::new(records, 6, 5).unwrap()
        })
    }

    proptest! {
        #[test]
        fn index_round_trip(d in random_dataset()) {
            for f in 0..6u32 {
                for (i, r) in d.records().iter().enumerate() {
                    prop_assert_eq!(d.feature_index(f).contains(&(i as u32)), r.features.contains(&f));
                }
            }
            let tf: usize = d.records().iter().map(|r| r.features.len()).sum();
            prop_assert_eq!(tf, d.total_feature_occurrences());
        }

        #[test]
        fn indexed_support_equals_scan(
            d in random_dataset(),
            head in proptest::collection::btree_set(0u32..6, 0..3),
            tail in proptest::collection::btree_set(0u32..5, 0..3),
        ) {
            let head: Vec<u32> = head.into_iter().collect();
            let tail: Vec<u32> = tail.into_iter().collect();
            let scan: Vec<u32> = d.records().iter().enumerate()
                .filter(|(_, r)| head.iter().all(|h| r.features.contains(h))
                    && tail.iter().all(|t| r.labels.contains(t)))
                .map(|(i, _)| i as u32)
                .collect();
            prop_assert_eq!(d.support_set(Itemset::Rule { head: &head, tail: &tail }), scan);
        }

        #[test]
        fn binarize_is_idempotent_on_its_output(
            rows in proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, 3), 1..30),
            p in 0.0f64..=100.0,
        ) {
            let once = binarize_numeric(&rows, p).unwrap();
            let as_num: Vec<Vec<f64>> = once.iter()
                .map(|r| r.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect())
                .collect();
            let twice = binarize_numeric(&as_num, p).unwrap();
            prop_assert_eq!(once, twice);
        }
    }
}
