//! One-dimensional soft-margin linear SVM over transformed losses.
//!
//! Training fits a transform (Box-Cox with a selected λ, or a fixed
//! alternate), standardizes the transformed losses, and minimizes the
//! regularized hinge loss (1/2)w² + C·Σ ω_i·max(0, 1 − y_i(w·t_i + b)) by
//! deterministic full-batch subgradient descent with step 1/(C·t). The
//! exhaustive [`threshold_oracle`] is the independent reference every
//! trained model is checked against.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::loss_model::{LabeledLosses, Label};
use crate::metrics::ConfusionCounts;
use crate::transform::{self, LambdaSearchResult, LambdaStrategy, TransformSpec};

/// Trained 1-D classifier. The decision for a loss x is
/// sign(weight·((T(x) − mean)/std) + bias), with a decision value of
/// exactly 0 mapping to `generated`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub weight: f64,
    pub bias: f64,
    pub standardize_mean: f64,
    pub standardize_std: f64,
    pub lambda_spec: TransformSpec,
    pub c_param: f64,
    pub seed: u64,
    /// Which λ-selection strategy (or fixed transform) produced
    /// `lambda_spec`; carried for reporting.
    #[serde(default)]
    pub strategy: String,
}

impl SvmModel {
    /// Decision values w·t̃ + b for a batch of losses.
    pub fn decision_values(&self, losses: &[f64]) -> Result<Vec<f64>> {
        for v in losses {
            if !v.is_finite() {
                return Err(Error::InvalidData("non-finite loss".into()));
            }
            if *v < 0.0 {
                return Err(Error::InvalidData(format!("negative loss {v}")));
            }
        }
        let transformed = self.lambda_spec.apply(losses)?;
        Ok(transformed
            .iter()
            .map(|t| self.weight * ((t - self.standardize_mean) / self.standardize_std) + self.bias)
            .collect())
    }

    /// Classify losses; nonnegative decision values map to `generated`.
    pub fn predict(&self, losses: &[f64]) -> Result<Vec<Label>> {
        Ok(self
            .decision_values(losses)?
            .iter()
            .map(|d| {
                if *d >= 0.0 {
                    Label::Generated
                } else {
                    Label::Manipulated
                }
            })
            .collect())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        let model: Self = serde_json::from_slice(bytes).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        if !(model.standardize_std > 0.0) || !model.weight.is_finite() {
            return Err(Error::InvalidData("model has degenerate parameters".into()));
        }
        model.lambda_spec.validate()?;
        Ok(model)
    }
}

/// How the training transform is obtained.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformChoice {
    /// Fit Box-Cox λ on the training losses with the given strategy.
    BoxCox {
        strategy: LambdaStrategy,
        grid: Vec<f64>,
        target: Option<f64>,
        shift_epsilon: f64,
    },
    /// Use a fixed transform (ablation path).
    Fixed(TransformSpec),
}

impl TransformChoice {
    pub fn box_cox_default(strategy: LambdaStrategy) -> Self {
        TransformChoice::BoxCox {
            strategy,
            grid: transform::default_grid(),
            target: None,
            shift_epsilon: transform::DEFAULT_SHIFT_EPSILON,
        }
    }

    pub fn strategy_label(&self) -> String {
        match self {
            TransformChoice::BoxCox { strategy, .. } => strategy.to_string(),
            TransformChoice::Fixed(spec) => format!("fixed:{}", spec.kind),
        }
    }
}

/// Which training losses feed the λ search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaPopulation {
    Pooled,
    PositiveOnly,
    NegativeOnly,
}

/// Training configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub transform: TransformChoice,
    pub lambda_population: LambdaPopulation,
    pub c_param: f64,
    pub iterations: usize,
    pub seed: u64,
    pub class_weighting: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            transform: TransformChoice::box_cox_default(LambdaStrategy::Mle),
            lambda_population: LambdaPopulation::Pooled,
            c_param: 1.0,
            iterations: 10_000,
            seed: 0,
            // inverse-frequency weighting by default: the canonical group
            // (one generated category against every edit level) is heavily
            // imbalanced, and an unweighted hinge can collapse to the
            // majority class there; on balanced data all weights are 1.
            class_weighting: true,
        }
    }
}

/// A trained model plus the λ search it ran (absent for fixed transforms).
#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub model: SvmModel,
    pub lambda_search: Option<LambdaSearchResult>,
}

/// Train the classifier. Deterministic: identical inputs and config yield a
/// bitwise-identical model.
pub fn train(data: &LabeledLosses, config: &TrainConfig) -> Result<TrainOutcome> {
    if !(config.c_param > 0.0 && config.c_param.is_finite()) {
        return Err(Error::InvalidConfig("c_param must be positive".into()));
    }
    if config.iterations == 0 {
        return Err(Error::InvalidConfig("iterations must be at least 1".into()));
    }
    let n_pos = data.count_of(Label::Generated);
    let n_neg = data.count_of(Label::Manipulated);
    if n_pos < 2 || n_neg < 2 {
        return Err(Error::InvalidData(format!(
            "training requires at least 2 samples per label, got {n_pos} generated / {n_neg} manipulated"
        )));
    }

    let (spec, lambda_search) = match &config.transform {
        TransformChoice::BoxCox {
            strategy,
            grid,
            target,
            shift_epsilon,
        } => {
            let fit_losses: Vec<f64> = match config.lambda_population {
                LambdaPopulation::Pooled => data.losses().to_vec(),
                LambdaPopulation::PositiveOnly => population(data, Label::Generated),
                LambdaPopulation::NegativeOnly => population(data, Label::Manipulated),
            };
            let search =
                transform::select_lambda(&fit_losses, *strategy, grid, *target, *shift_epsilon)?;
            let spec = TransformSpec::box_cox(search.lambda_star).with_epsilon(*shift_epsilon);
            (spec, Some(search))
        }
        TransformChoice::Fixed(spec) => {
            spec.validate()?;
            (spec.clone(), None)
        }
    };

    let transformed = spec.apply(data.losses())?;
    let n = transformed.len() as f64;
    let mean = transformed.iter().sum::<f64>() / n;
    let var = transformed.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n;
    if transform::is_constant(&transformed) || !(var > 0.0) || !var.is_finite() {
        return Err(Error::Degenerate("degenerate transform: zero variance".into()));
    }
    let std = var.sqrt();
    let standardized: Vec<f64> = transformed.iter().map(|t| (t - mean) / std).collect();

    let signs: Vec<f64> = data
        .labels()
        .iter()
        .map(|l| if *l == Label::Generated { 1.0 } else { -1.0 })
        .collect();
    let weights: Vec<f64> = if config.class_weighting {
        let total = n;
        data.labels()
            .iter()
            .map(|l| {
                let class_count = if *l == Label::Generated { n_pos } else { n_neg };
                total / (2.0 * class_count as f64)
            })
            .collect()
    } else {
        vec![1.0; data.len()]
    };

    let c = config.c_param;
    let mut w = 0.0;
    let mut b = 0.0;
    for step in 1..=config.iterations {
        let mut grad_w = w;
        let mut grad_b = 0.0;
        for ((t, y), omega) in standardized.iter().zip(&signs).zip(&weights) {
            if y * (w * t + b) < 1.0 {
                grad_w -= c * omega * y * t;
                grad_b -= c * omega * y;
            }
        }
        let eta = 1.0 / (c * step as f64);
        w -= eta * grad_w;
        b -= eta * grad_b;
    }

    let strategy = config.transform.strategy_label();
    Ok(TrainOutcome {
        model: SvmModel {
            weight: w,
            bias: b,
            standardize_mean: mean,
            standardize_std: std,
            lambda_spec: spec,
            c_param: c,
            seed: config.seed,
            strategy,
        },
        lambda_search,
    })
}

fn population(data: &LabeledLosses, label: Label) -> Vec<f64> {
    data.iter()
        .filter(|(_, l)| *l == label)
        .map(|(loss, _)| loss)
        .collect()
}

/// Which side of the threshold is classified as generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdDirection {
    /// Predict generated when the value is strictly above the threshold.
    PosAbove,
    /// Predict generated when the value is strictly below the threshold.
    PosBelow,
}

/// Result of the exhaustive 1-D threshold search. Confusion counts use
/// `generated` as the positive event, matching the classifier orientation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdOracle {
    pub threshold: f64,
    pub direction: ThresholdDirection,
    pub confusion: ConfusionCounts,
}

impl ThresholdOracle {
    pub fn accuracy(&self) -> f64 {
        self.confusion.accuracy()
    }
}

/// Exhaustively scan every threshold that can matter in 1-D: the midpoints
/// between consecutive sorted distinct values plus ±∞, in both directions.
/// Returns the accuracy-maximizing classifier; ties go to the smallest
/// threshold, and to `PosAbove` over `PosBelow` at the same threshold.
pub fn threshold_oracle(data: &LabeledLosses) -> Result<ThresholdOracle> {
    let n = data.len();
    let n_pos = data.count_of(Label::Generated);
    let n_neg = data.count_of(Label::Manipulated);
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidData(
            "threshold oracle requires both labels present".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        data.losses()[a]
            .partial_cmp(&data.losses()[b])
            .expect("finite losses")
    });
    let sorted: Vec<(f64, Label)> = order
        .iter()
        .map(|&i| (data.losses()[i], data.labels()[i]))
        .collect();

    // prefix_pos[k] = generated samples among the first k sorted values
    let mut prefix_pos = vec![0usize; n + 1];
    for (k, (_, label)) in sorted.iter().enumerate() {
        prefix_pos[k + 1] = prefix_pos[k] + usize::from(*label == Label::Generated);
    }

    // Candidate cut k predicts the first k sorted values as one class and
    // the rest as the other; k maps to −∞, the distinct-value midpoints,
    // and +∞ in ascending threshold order.
    let mut candidates: Vec<(usize, f64)> = vec![(0, f64::NEG_INFINITY)];
    for k in 1..n {
        let (prev, _) = sorted[k - 1];
        let (next, _) = sorted[k];
        if prev < next {
            candidates.push((k, 0.5 * (prev + next)));
        }
    }
    candidates.push((n, f64::INFINITY));

    let mut best: Option<(usize, usize, ThresholdDirection, f64)> = None; // (correct, k, dir, threshold)
    for &(k, threshold) in &candidates {
        let pos_in_prefix = prefix_pos[k];
        let neg_in_prefix = k - pos_in_prefix;
        let above_correct = neg_in_prefix + (n_pos - pos_in_prefix);
        let below_correct = pos_in_prefix + (n_neg - neg_in_prefix);
        for (direction, correct) in [
            (ThresholdDirection::PosAbove, above_correct),
            (ThresholdDirection::PosBelow, below_correct),
        ] {
            let improves = match best {
                None => true,
                Some((incumbent, ..)) => correct > incumbent,
            };
            if improves {
                best = Some((correct, k, direction, threshold));
            }
        }
    }

    let (_, k, direction, threshold) = best.expect("candidates nonempty");
    let pos_in_prefix = prefix_pos[k];
    let neg_in_prefix = k - pos_in_prefix;
    let confusion = match direction {
        ThresholdDirection::PosAbove => ConfusionCounts {
            true_pos: n_pos - pos_in_prefix,
            false_pos: n_neg - neg_in_prefix,
            false_neg: pos_in_prefix,
            true_neg: neg_in_prefix,
        },
        ThresholdDirection::PosBelow => ConfusionCounts {
            true_pos: pos_in_prefix,
            false_pos: neg_in_prefix,
            false_neg: n_pos - pos_in_prefix,
            true_neg: n_neg - neg_in_prefix,
        },
    };
    Ok(ThresholdOracle {
        threshold,
        direction,
        confusion,
    })
}
