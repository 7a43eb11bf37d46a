//! Confusion counting, precision/recall/F1/accuracy, and group-wise
//! evaluation reports.
//!
//! Reports follow the detection orientation: the positive event is
//! *manipulated*, i.e. precision asks how many flagged images were really
//! modified. The classifier's own orientation (generated as positive class)
//! is emitted alongside in every report so neither reading is ambiguous.

use serde::{Deserialize, Serialize};

use crate::classifier::SvmModel;
use crate::error::{Error, Result};
use crate::loss_model::{GroupConfig, Label, LossDataset};

/// Confusion counts with respect to some positive event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    #[serde(rename = "tp")]
    pub true_pos: usize,
    #[serde(rename = "fp")]
    pub false_pos: usize,
    #[serde(rename = "fn")]
    pub false_neg: usize,
    #[serde(rename = "tn")]
    pub true_neg: usize,
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.false_neg + self.true_neg
    }

    /// TP/(TP+FP); 0.0 when the denominator is zero (see
    /// [`ConfusionCounts::flags`]).
    pub fn precision(&self) -> f64 {
        ratio(self.true_pos, self.true_pos + self.false_pos)
    }

    /// TP/(TP+FN); 0.0 when the denominator is zero.
    pub fn recall(&self) -> f64 {
        ratio(self.true_pos, self.true_pos + self.false_neg)
    }

    /// Harmonic mean of precision and recall; 0.0 when their sum is zero.
    pub fn f1(&self) -> f64 {
        f1_score(self.precision(), self.recall())
    }

    /// (TP+TN)/total; 0.0 on an empty count.
    pub fn accuracy(&self) -> f64 {
        ratio(self.true_pos + self.true_neg, self.total())
    }

    /// Which metric denominators were zero (and therefore reported as 0.0).
    pub fn flags(&self) -> ZeroDenominatorFlags {
        let precision = self.true_pos + self.false_pos == 0;
        let recall = self.true_pos + self.false_neg == 0;
        ZeroDenominatorFlags {
            precision,
            recall,
            f1: self.precision() + self.recall() == 0.0,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// 2PR/(P+R), 0.0 when P+R = 0.
pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

/// Marks metrics whose denominator was zero; the value is reported as 0.0
/// rather than raising an error so tabular reports always render.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ZeroDenominatorFlags {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
}

impl ZeroDenominatorFlags {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1
    }
}

/// Count a prediction/truth pairing with respect to `positive_event`.
pub fn confusion(
    predictions: &[Label],
    truth: &[Label],
    positive_event: Label,
) -> Result<ConfusionCounts> {
    if predictions.len() != truth.len() {
        return Err(Error::InvalidData(format!(
            "predictions ({}) and truth ({}) have different lengths",
            predictions.len(),
            truth.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::InvalidData("confusion counts need at least one pair".into()));
    }
    let mut counts = ConfusionCounts::default();
    for (&pred, &actual) in predictions.iter().zip(truth) {
        match (pred == positive_event, actual == positive_event) {
            (true, true) => counts.true_pos += 1,
            (true, false) => counts.false_pos += 1,
            (false, true) => counts.false_neg += 1,
            (false, false) => counts.true_neg += 1,
        }
    }
    Ok(counts)
}

/// Metrics in the classifier's orientation (generated as positive event).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub counts: ConfusionCounts,
}

impl OrientationMetrics {
    fn from_counts(counts: ConfusionCounts) -> Self {
        Self {
            precision: counts.precision(),
            recall: counts.recall(),
            f1: counts.f1(),
            counts,
        }
    }
}

/// Evaluation result for one manipulated subset.
///
/// The headline metrics treat manipulated as the positive event;
/// `generated_positive` carries the same pairing counted the other way.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub group_name: String,
    pub subset: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub accuracy: f64,
    pub counts: ConfusionCounts,
    pub lambda_star: Option<f64>,
    pub strategy: String,
    pub zero_denominator: ZeroDenominatorFlags,
    pub generated_positive: OrientationMetrics,
}

/// Evaluate a trained model against one group, one report per manipulated
/// subset plus an `overall` report over all positives and all negatives.
///
/// Each subset is a named list of negative categories; the report pairs
/// that subset's samples with every positive-category sample. Reports are
/// assembled in declared subset order.
pub fn evaluate(
    model: &SvmModel,
    dataset: &LossDataset,
    group: &GroupConfig,
    manipulated_subsets: &[(String, Vec<String>)],
) -> Result<Vec<EvalReport>> {
    for category in group.positive_categories().iter().chain(group.negative_categories()) {
        if !dataset.categories().contains(category) {
            return Err(Error::InvalidData(format!(
                "group '{}' references unknown category '{}'",
                group.name(),
                category
            )));
        }
    }
    let positives: Vec<f64> = dataset
        .samples()
        .iter()
        .filter(|s| group.positive_categories().contains(&s.category))
        .map(|s| s.loss)
        .collect();

    let mut reports = Vec::with_capacity(manipulated_subsets.len() + 1);
    for (name, categories) in manipulated_subsets {
        if categories.is_empty() {
            return Err(Error::InvalidData(format!("subset '{name}' lists no categories")));
        }
        for category in categories {
            if !group.negative_categories().contains(category) {
                return Err(Error::InvalidConfig(format!(
                    "subset '{name}' references '{category}', which is not a negative category of group '{}'",
                    group.name()
                )));
            }
        }
        let negatives: Vec<f64> = dataset
            .samples()
            .iter()
            .filter(|s| categories.iter().any(|c| c == &s.category))
            .map(|s| s.loss)
            .collect();
        if negatives.is_empty() {
            return Err(Error::InvalidData(format!(
                "subset '{name}' matches no samples in the dataset"
            )));
        }
        reports.push(subset_report(model, group, name, &positives, &negatives)?);
    }

    let all_negatives: Vec<f64> = dataset
        .samples()
        .iter()
        .filter(|s| group.negative_categories().contains(&s.category))
        .map(|s| s.loss)
        .collect();
    reports.push(subset_report(model, group, "overall", &positives, &all_negatives)?);
    Ok(reports)
}

fn subset_report(
    model: &SvmModel,
    group: &GroupConfig,
    subset: &str,
    positives: &[f64],
    negatives: &[f64],
) -> Result<EvalReport> {
    if positives.is_empty() {
        return Err(Error::InvalidData(format!(
            "group '{}' has no positive samples in the dataset",
            group.name()
        )));
    }
    let mut losses = Vec::with_capacity(positives.len() + negatives.len());
    let mut truth = Vec::with_capacity(losses.capacity());
    losses.extend_from_slice(positives);
    truth.extend(std::iter::repeat(Label::Generated).take(positives.len()));
    losses.extend_from_slice(negatives);
    truth.extend(std::iter::repeat(Label::Manipulated).take(negatives.len()));

    let predictions = model.predict(&losses)?;
    let counts = confusion(&predictions, &truth, Label::Manipulated)?;
    let generated = confusion(&predictions, &truth, Label::Generated)?;
    Ok(EvalReport {
        group_name: group.name().to_string(),
        subset: subset.to_string(),
        precision: counts.precision(),
        recall: counts.recall(),
        f1: counts.f1(),
        accuracy: counts.accuracy(),
        counts,
        lambda_star: model.lambda_spec.lambda,
        strategy: model.strategy.clone(),
        zero_denominator: counts.flags(),
        generated_positive: OrientationMetrics::from_counts(generated),
    })
}

/// Build the default manipulated-subset rows for a set of negative
/// categories, in the layout of an iterative-editing experiment.
///
/// Categories whose name ends in `-<k>` are grouped into one `k-iter` row
/// per iteration count; categories containing "photoshop" form a
/// `photoshop` row; anything else gets its own row. A final `aggregate` row
/// contains every negative category.
pub fn iteration_subsets(negative_categories: &[String]) -> Vec<(String, Vec<String>)> {
    let mut photoshop = Vec::new();
    let mut by_iteration: Vec<(u32, Vec<String>)> = Vec::new();
    let mut other = Vec::new();
    for category in negative_categories {
        if category.to_lowercase().contains("photoshop") {
            photoshop.push(category.clone());
        } else if let Some(k) = iteration_suffix(category) {
            match by_iteration.iter_mut().find(|(i, _)| *i == k) {
                Some((_, cats)) => cats.push(category.clone()),
                None => by_iteration.push((k, vec![category.clone()])),
            }
        } else {
            other.push(category.clone());
        }
    }
    by_iteration.sort_by_key(|(k, _)| *k);

    let mut subsets = Vec::new();
    if !photoshop.is_empty() {
        subsets.push(("photoshop".to_string(), photoshop));
    }
    for (k, cats) in by_iteration {
        subsets.push((format!("{k}-iter"), cats));
    }
    for category in other {
        subsets.push((category.clone(), vec![category]));
    }
    subsets.push(("aggregate".to_string(), negative_categories.to_vec()));
    subsets
}

fn iteration_suffix(category: &str) -> Option<u32> {
    let (_, suffix) = category.rsplit_once('-')?;
    suffix.parse().ok()
}
