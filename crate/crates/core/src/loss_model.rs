//! Loss-sample data model, dataset file formats, and group configuration.
//!
//! A [`LossDataset`] is an ordered collection of scalar reconstruction
//! losses grouped by category name. Datasets round-trip losslessly through
//! CSV (header `id,category,loss,seed`) and JSON (array of records); float
//! fields are serialized as shortest round-trip decimals.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Binary class label. `Generated` is the classifier's positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Generated,
    Manipulated,
}

impl std::fmt::Display for Label {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Label::Generated => write!(f, "generated"),
            Label::Manipulated => write!(f, "manipulated"),
        }
    }
}

/// One scalar reconstruction-loss observation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSample {
    pub id: String,
    pub category: String,
    pub loss: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<i64>,
}

impl LossSample {
    fn validate(&self) -> Result<()> {
        if self.category.is_empty() {
            return Err(Error::InvalidData(format!(
                "sample '{}' has an empty category",
                self.id
            )));
        }
        if !self.loss.is_finite() {
            return Err(Error::InvalidData(format!(
                "non-finite loss for sample '{}'",
                self.id
            )));
        }
        if self.loss < 0.0 {
            return Err(Error::InvalidData(format!(
                "negative loss for sample '{}'",
                self.id
            )));
        }
        Ok(())
    }
}

/// Ordered, validated collection of loss samples.
///
/// Invariants: every sample's category is registered, losses are finite and
/// nonnegative, and `(id, category)` pairs are unique. Immutable after
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct LossDataset {
    samples: Vec<LossSample>,
    categories: BTreeSet<String>,
    category_order: Vec<String>,
}

impl LossDataset {
    pub fn from_samples(samples: Vec<LossSample>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut categories = BTreeSet::new();
        let mut category_order = Vec::new();
        for sample in &samples {
            sample.validate()?;
            if !seen.insert((sample.id.clone(), sample.category.clone())) {
                return Err(Error::InvalidData(format!(
                    "duplicate (id, category) pair ('{}', '{}')",
                    sample.id, sample.category
                )));
            }
            if categories.insert(sample.category.clone()) {
                category_order.push(sample.category.clone());
            }
        }
        Ok(Self {
            samples,
            categories,
            category_order,
        })
    }

    pub fn samples(&self) -> &[LossSample] {
        &self.samples
    }

    pub fn categories(&self) -> &BTreeSet<String> {
        &self.categories
    }

    /// Category names in order of first appearance in the sample list.
    pub fn categories_in_order(&self) -> &[String] {
        &self.category_order
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Losses of all samples in the given category, in dataset order.
    pub fn losses_for(&self, category: &str) -> Vec<f64> {
        self.samples
            .iter()
            .filter(|s| s.category == category)
            .map(|s| s.loss)
            .collect()
    }

    /// Keep only samples whose category satisfies the predicate.
    pub fn filter_categories(&self, keep: impl Fn(&str) -> bool) -> Result<Self> {
        Self::from_samples(
            self.samples
                .iter()
                .filter(|s| keep(&s.category))
                .cloned()
                .collect(),
        )
    }

    /// Keep only samples at indices satisfying the predicate; order is
    /// preserved.
    pub fn filter_samples(&self, keep: impl Fn(usize) -> bool) -> Result<Self> {
        Self::from_samples(
            self.samples
                .iter()
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .map(|(_, s)| s.clone())
                .collect(),
        )
    }

    /// Project the dataset onto a binary classification problem.
    ///
    /// Samples in the positive categories are labeled [`Label::Generated`],
    /// samples in the negative categories [`Label::Manipulated`]; samples in
    /// neither set are dropped. Dataset order is preserved. Errors if the
    /// group references a category absent from the dataset.
    pub fn select_binary(&self, group: &GroupConfig) -> Result<LabeledLosses> {
        for category in group.positive_categories().iter().chain(group.negative_categories()) {
            if !self.categories.contains(category) {
                return Err(Error::InvalidData(format!(
                    "group '{}' references unknown category '{}'",
                    group.name(),
                    category
                )));
            }
        }
        let mut losses = Vec::new();
        let mut labels = Vec::new();
        for sample in &self.samples {
            let label = if group.positive_categories().contains(&sample.category) {
                Label::Generated
            } else if group.negative_categories().contains(&sample.category) {
                Label::Manipulated
            } else {
                continue;
            };
            losses.push(sample.loss);
            labels.push(label);
        }
        let labeled = LabeledLosses::new(losses, labels)?;
        for label in [Label::Generated, Label::Manipulated] {
            if labeled.count_of(label) == 0 {
                log::warn!(
                    "group '{}' selected no {} samples; training on this selection will fail",
                    group.name(),
                    label
                );
            }
        }
        Ok(labeled)
    }
}

/// Losses paired with class labels, in dataset order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledLosses {
    losses: Vec<f64>,
    labels: Vec<Label>,
}

impl LabeledLosses {
    pub fn new(losses: Vec<f64>, labels: Vec<Label>) -> Result<Self> {
        if losses.len() != labels.len() {
            return Err(Error::InvalidData(format!(
                "losses ({}) and labels ({}) have different lengths",
                losses.len(),
                labels.len()
            )));
        }
        Ok(Self { losses, labels })
    }

    pub fn losses(&self) -> &[f64] {
        &self.losses
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.losses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.losses.is_empty()
    }

    pub fn count_of(&self, label: Label) -> usize {
        self.labels.iter().filter(|&&l| l == label).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, Label)> + '_ {
        self.losses.iter().copied().zip(self.labels.iter().copied())
    }
}

/// Positive/negative category sets defining one binary evaluation group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupConfig {
    name: String,
    #[serde(rename = "positive")]
    positive_categories: BTreeSet<String>,
    #[serde(rename = "negative")]
    negative_categories: BTreeSet<String>,
}

impl GroupConfig {
    pub fn new(
        name: impl Into<String>,
        positive: impl IntoIterator<Item = String>,
        negative: impl IntoIterator<Item = String>,
    ) -> Result<Self> {
        let config = Self {
            name: name.into(),
            positive_categories: positive.into_iter().collect(),
            negative_categories: negative.into_iter().collect(),
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<()> {
        if self.positive_categories.is_empty() || self.negative_categories.is_empty() {
            return Err(Error::InvalidConfig(format!(
                "group '{}' must have nonempty positive and negative sets",
                self.name
            )));
        }
        if let Some(shared) = self
            .positive_categories
            .intersection(&self.negative_categories)
            .next()
        {
            return Err(Error::InvalidConfig(format!(
                "category '{shared}' appears in both positive and negative sets of group '{}'",
                self.name
            )));
        }
        Ok(())
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let config: Self = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("group config serializes")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn positive_categories(&self) -> &BTreeSet<String> {
        &self.positive_categories
    }

    pub fn negative_categories(&self) -> &BTreeSet<String> {
        &self.negative_categories
    }
}

/// On-disk dataset encodings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Csv,
    Json,
}

const CSV_HEADER: [&str; 4] = ["id", "category", "loss", "seed"];

/// Parse a loss dataset from raw bytes.
///
/// CSV input must carry the exact header `id,category,loss,seed`; the seed
/// field may be empty. JSON input is an array of `{id, category, loss,
/// seed?}` records. Errors report 1-based line numbers.
pub fn parse_loss_file(bytes: &[u8], format: FileFormat) -> Result<LossDataset> {
    match format {
        FileFormat::Csv => parse_csv(bytes),
        FileFormat::Json => parse_json(bytes),
    }
}

fn parse_csv(bytes: &[u8]) -> Result<LossDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(bytes);
    let headers = reader.headers().map_err(|e| csv_error(e, 1))?.clone();
    if headers.iter().collect::<Vec<_>>() != CSV_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header 'id,category,loss,seed', found '{}'",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or(samples.len() + 2);
            csv_error(e, line)
        })?;
        let line = record
            .position()
            .map(|p| p.line() as usize)
            .unwrap_or(samples.len() + 2);
        if record.len() != 4 {
            return Err(Error::Parse {
                line,
                message: format!("expected 4 fields, found {}", record.len()),
            });
        }
        let loss: f64 = record[2].parse().map_err(|_| Error::Parse {
            line,
            message: format!("invalid loss value '{}'", &record[2]),
        })?;
        if !loss.is_finite() {
            return Err(Error::Parse {
                line,
                message: format!("non-finite loss '{}'", &record[2]),
            });
        }
        if loss < 0.0 {
            return Err(Error::Parse {
                line,
                message: format!("negative loss {loss}"),
            });
        }
        let seed = if record[3].is_empty() {
            None
        } else {
            Some(record[3].parse::<i64>().map_err(|_| Error::Parse {
                line,
                message: format!("invalid seed value '{}'", &record[3]),
            })?)
        };
        samples.push(LossSample {
            id: record[0].to_string(),
            category: record[1].to_string(),
            loss,
            seed,
        });
    }
    LossDataset::from_samples(samples)
}

fn csv_error(e: csv::Error, line: usize) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

fn parse_json(bytes: &[u8]) -> Result<LossDataset> {
    let samples: Vec<LossSample> = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    LossDataset::from_samples(samples)
}

/// Serialize a dataset. `parse_loss_file` inverts the output exactly:
/// string fields byte-for-byte, losses via shortest round-trip decimals.
pub fn write_loss_file(dataset: &LossDataset, format: FileFormat) -> Vec<u8> {
    match format {
        FileFormat::Csv => write_csv(dataset),
        FileFormat::Json => {
            serde_json::to_vec_pretty(dataset.samples()).expect("dataset serializes")
        }
    }
}

fn write_csv(dataset: &LossDataset) -> Vec<u8> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(CSV_HEADER).expect("header writes");
    for sample in dataset.samples() {
        let seed = sample.seed.map(|s| s.to_string()).unwrap_or_default();
        writer
            .write_record([
                sample.id.as_str(),
                sample.category.as_str(),
                &sample.loss.to_string(),
                &seed,
            ])
            .expect("record writes");
    }
    writer.into_inner().expect("csv buffer flushes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(id: &str, category: &str, loss: f64) -> LossSample {
        LossSample {
            id: id.to_string(),
            category: category.to_string(),
            loss,
            seed: None,
        }
    }

    #[test]
    fn parses_single_row_csv() {
        let ds = parse_loss_file(b"id,category,loss,seed\na1,sd-v2-base,0.0042,", FileFormat::Csv)
            .unwrap();
        assert_eq!(ds.len(), 1);
        assert_eq!(ds.samples()[0].loss, 0.0042);
        assert_eq!(ds.samples()[0].category, "sd-v2-base");
    }

    #[test]
    fn rejects_negative_loss_with_line_number() {
        let err =
            parse_loss_file(b"id,category,loss,seed\na1,x,-0.1,\n", FileFormat::Csv).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "message was: {msg}");
        assert!(msg.contains("negative loss"), "message was: {msg}");
    }

    #[test]
    fn rejects_wrong_header() {
        let err = parse_loss_file(b"id,cat,loss\na,b,1", FileFormat::Csv).unwrap_err();
        assert!(err.to_string().contains("line 1"));
    }

    #[test]
    fn rejects_duplicate_id_category() {
        let err = LossDataset::from_samples(vec![sample("a", "x", 1.0), sample("a", "x", 2.0)])
            .unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn allows_same_id_in_different_categories() {
        let ds =
            LossDataset::from_samples(vec![sample("a", "x", 1.0), sample("a", "y", 2.0)]).unwrap();
        assert_eq!(ds.categories().len(), 2);
    }

    #[test]
    fn json_two_categories_round_trips() {
        let samples: Vec<LossSample> = (0..3)
            .map(|i| sample(&format!("a{i}"), "gen", 0.1 + i as f64))
            .chain((0..3).map(|i| sample(&format!("b{i}"), "edit", 0.2 + i as f64)))
            .collect();
        let ds = LossDataset::from_samples(samples).unwrap();
        assert_eq!(ds.categories().len(), 2);
        let bytes = write_loss_file(&ds, FileFormat::Json);
        let parsed = parse_loss_file(&bytes, FileFormat::Json).unwrap();
        assert_eq!(parsed, ds);
    }

    #[test]
    fn empty_dataset_writes_header_only_csv() {
        let ds = LossDataset::from_samples(vec![]).unwrap();
        assert_eq!(write_loss_file(&ds, FileFormat::Csv), b"id,category,loss,seed\n");
    }

    #[test]
    fn one_sample_writes_two_line_csv() {
        let ds = LossDataset::from_samples(vec![sample("a1", "gen", 0.5)]).unwrap();
        let text = String::from_utf8(write_loss_file(&ds, FileFormat::Csv)).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text, "id,category,loss,seed\na1,gen,0.5,\n");
    }

    #[test]
    fn csv_round_trips_with_seeds() {
        let mut s = sample("a1", "gen", 1e-9);
        s.seed = Some(-42);
        let ds = LossDataset::from_samples(vec![s, sample("a2", "edit-1", 0.25)]).unwrap();
        let parsed = parse_loss_file(&write_loss_file(&ds, FileFormat::Csv), FileFormat::Csv)
            .unwrap();
        assert_eq!(parsed, ds);
    }

    #[test]
    fn select_binary_drops_unlisted_categories() {
        let ds = LossDataset::from_samples(vec![
            sample("1", "A", 0.1),
            sample("2", "B", 0.2),
            sample("3", "C", 0.3),
        ])
        .unwrap();
        let group =
            GroupConfig::new("g", ["A".to_string()], ["B".to_string()]).unwrap();
        let labeled = ds.select_binary(&group).unwrap();
        assert_eq!(labeled.len(), 2);
        assert_eq!(labeled.labels(), &[Label::Generated, Label::Manipulated]);
    }

    #[test]
    fn select_binary_rejects_unknown_category() {
        let ds = LossDataset::from_samples(vec![sample("1", "A", 0.1)]).unwrap();
        let group = GroupConfig::new("g", ["A".to_string()], ["D".to_string()]).unwrap();
        let err = ds.select_binary(&group).unwrap_err();
        assert!(err.to_string().contains("unknown category 'D'"));
    }

    #[test]
    fn select_binary_counts_match_category_sizes() {
        let mut samples = Vec::new();
        for i in 0..400 {
            samples.push(sample(&format!("a{i}"), "A", 0.1));
            samples.push(sample(&format!("b{i}"), "B", 0.9));
        }
        let ds = LossDataset::from_samples(samples).unwrap();
        let group = GroupConfig::new("g", ["A".to_string()], ["B".to_string()]).unwrap();
        let labeled = ds.select_binary(&group).unwrap();
        assert_eq!(labeled.len(), 800);
        assert_eq!(labeled.count_of(Label::Generated), 400);
        assert_eq!(labeled.count_of(Label::Manipulated), 400);
    }

    #[test]
    fn group_config_rejects_overlap_and_empty_sets() {
        assert!(GroupConfig::new("g", ["A".to_string()], ["A".to_string()]).is_err());
        assert!(GroupConfig::new("g", [], ["A".to_string()]).is_err());
    }

    #[test]
    fn group_config_json_schema() {
        let group = GroupConfig::from_json(
            br#"{ "name": "g1", "positive": ["gen"], "negative": ["edit-1", "edit-2"] }"#,
        )
        .unwrap();
        assert_eq!(group.name(), "g1");
        assert_eq!(group.positive_categories().len(), 1);
        assert_eq!(group.negative_categories().len(), 2);
    }
}
