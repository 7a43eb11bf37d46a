//! End-to-end composition: split → transform/λ-select → train → evaluate,
//! plus the dataset-wide overlap matrix.

use serde::Serialize;

use crate::classifier::{self, SvmModel, TrainConfig};
use crate::error::Result;
use crate::kde_overlap::{self, OverlapMatrix, DEFAULT_GRID_POINTS};
use crate::loss_model::{GroupConfig, LossDataset};
use crate::metrics::{self, EvalReport};
use crate::transform::LambdaSearchResult;

const FNV_OFFSET: u64 = 0xcbf29ce484222325;
const FNV_PRIME: u64 = 0x100000001b3;

fn fnv1a64(seed: u64, id: &str) -> u64 {
    let mut hash = FNV_OFFSET;
    for byte in seed.to_le_bytes().iter().chain(id.as_bytes()) {
        hash ^= u64::from(*byte);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Deterministic stratified 50/50 split.
///
/// Within each category, samples are ordered by a seed-mixed FNV-1a hash of
/// their id (id as tiebreak) and assigned alternately to the train and test
/// halves, so each category splits ⌈n/2⌉/⌊n/2⌋. Hashing only the id means a
/// sample id falls on the same side of the split in every category it
/// appears in.
pub fn stratified_split(dataset: &LossDataset, seed: u64) -> (LossDataset, LossDataset) {
    let mut in_train = vec![false; dataset.len()];
    for category in dataset.categories_in_order() {
        let mut members: Vec<(u64, &str, usize)> = dataset
            .samples()
            .iter()
            .enumerate()
            .filter(|(_, s)| &s.category == category)
            .map(|(i, s)| (fnv1a64(seed, &s.id), s.id.as_str(), i))
            .collect();
        members.sort();
        for (rank, (_, _, index)) in members.into_iter().enumerate() {
            in_train[index] = rank % 2 == 0;
        }
    }
    let train = dataset
        .filter_samples(|i| in_train[i])
        .expect("subset of a valid dataset is valid");
    let test = dataset
        .filter_samples(|i| !in_train[i])
        .expect("subset of a valid dataset is valid");
    (train, test)
}

/// Everything one pipeline run produces.
#[derive(Debug, Clone, Serialize)]
pub struct PipelineOutcome {
    pub model: SvmModel,
    pub lambda_search: Option<LambdaSearchResult>,
    pub overlap: OverlapMatrix,
    pub train_reports: Vec<EvalReport>,
    pub test_reports: Vec<EvalReport>,
    pub train_size: usize,
    pub test_size: usize,
    /// Samples in neither group category set (excluded from training and
    /// evaluation but kept in the overlap matrix).
    pub dropped: usize,
}

/// Run the full pipeline on a dataset: split it, fit the transform and the
/// classifier on the train half, and evaluate both halves subset by subset.
/// `config.seed` drives the split. Deterministic end to end.
pub fn run_pipeline(
    dataset: &LossDataset,
    group: &GroupConfig,
    config: &TrainConfig,
    subsets: Option<&[(String, Vec<String>)]>,
) -> Result<PipelineOutcome> {
    let default_subsets;
    let subsets = match subsets {
        Some(s) => s,
        None => {
            let negatives: Vec<String> = dataset
                .categories_in_order()
                .iter()
                .filter(|c| group.negative_categories().contains(*c))
                .cloned()
                .collect();
            default_subsets = metrics::iteration_subsets(&negatives);
            &default_subsets
        }
    };

    let (train_half, test_half) = stratified_split(dataset, config.seed);
    let labeled = train_half.select_binary(group)?;
    let in_group = |ds: &LossDataset| {
        ds.samples()
            .iter()
            .filter(|s| {
                group.positive_categories().contains(&s.category)
                    || group.negative_categories().contains(&s.category)
            })
            .count()
    };
    let outcome = classifier::train(&labeled, config)?;

    let train_reports = metrics::evaluate(&outcome.model, &train_half, group, subsets)?;
    let test_reports = metrics::evaluate(&outcome.model, &test_half, group, subsets)?;
    let overlap = kde_overlap::overlap_matrix(dataset, None, DEFAULT_GRID_POINTS)?;

    Ok(PipelineOutcome {
        model: outcome.model,
        lambda_search: outcome.lambda_search,
        overlap,
        train_size: in_group(&train_half),
        test_size: in_group(&test_half),
        dropped: dataset.len() - in_group(&train_half) - in_group(&test_half),
        train_reports,
        test_reports,
    })
}
