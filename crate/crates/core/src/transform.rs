//! Box-Cox transformation, grid-scan selection of its λ parameter, and the
//! alternate transforms used for ablation.
//!
//! Three selection strategies are provided: maximizing the Gaussian profile
//! log-likelihood of the transformed data, minimizing |skewness − target|,
//! and minimizing |kurtosis − target|. All three scan a fixed λ grid in
//! order; the earliest grid value achieving the optimum wins ties. Inputs
//! are nonnegative losses, shifted by a small ε before transformation so
//! zeros stay in the Box-Cox domain.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shift applied to nonnegative losses before power transforms.
pub const DEFAULT_SHIFT_EPSILON: f64 = 1e-8;

/// Transform family selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransformKind {
    BoxCox,
    ZScore,
    Log,
    Exp,
    Power,
    Identity,
}

impl std::fmt::Display for TransformKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            TransformKind::BoxCox => "boxcox",
            TransformKind::ZScore => "zscore",
            TransformKind::Log => "log",
            TransformKind::Exp => "exp",
            TransformKind::Power => "power",
            TransformKind::Identity => "identity",
        };
        write!(f, "{name}")
    }
}

/// A concrete, applicable transformation.
///
/// `lambda` is present exactly for `BoxCox`, `power_exponent` exactly for
/// `Power`. The z-score transform standardizes with the population moments
/// of the batch it is applied to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformSpec {
    pub kind: TransformKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub power_exponent: Option<f64>,
    #[serde(default = "default_epsilon")]
    pub shift_epsilon: f64,
}

fn default_epsilon() -> f64 {
    DEFAULT_SHIFT_EPSILON
}

impl TransformSpec {
    pub fn box_cox(lambda: f64) -> Self {
        Self {
            kind: TransformKind::BoxCox,
            lambda: Some(lambda),
            power_exponent: None,
            shift_epsilon: DEFAULT_SHIFT_EPSILON,
        }
    }

    pub fn z_score() -> Self {
        Self::plain(TransformKind::ZScore)
    }

    pub fn log() -> Self {
        Self::plain(TransformKind::Log)
    }

    pub fn exp() -> Self {
        Self::plain(TransformKind::Exp)
    }

    pub fn power(exponent: f64) -> Self {
        Self {
            kind: TransformKind::Power,
            lambda: None,
            power_exponent: Some(exponent),
            shift_epsilon: DEFAULT_SHIFT_EPSILON,
        }
    }

    pub fn identity() -> Self {
        Self::plain(TransformKind::Identity)
    }

    fn plain(kind: TransformKind) -> Self {
        Self {
            kind,
            lambda: None,
            power_exponent: None,
            shift_epsilon: DEFAULT_SHIFT_EPSILON,
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.shift_epsilon = epsilon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambda.is_some() != (self.kind == TransformKind::BoxCox) {
            return Err(Error::InvalidConfig(
                "lambda must be present exactly for the boxcox kind".into(),
            ));
        }
        if self.power_exponent.is_some() != (self.kind == TransformKind::Power) {
            return Err(Error::InvalidConfig(
                "power_exponent must be present exactly for the power kind".into(),
            ));
        }
        if !(self.shift_epsilon > 0.0 && self.shift_epsilon.is_finite()) {
            return Err(Error::InvalidConfig("shift_epsilon must be positive".into()));
        }
        if let Some(lambda) = self.lambda {
            if !lambda.is_finite() {
                return Err(Error::InvalidConfig("lambda must be finite".into()));
            }
        }
        if let Some(p) = self.power_exponent {
            if !p.is_finite() {
                return Err(Error::InvalidConfig("power_exponent must be finite".into()));
            }
        }
        Ok(())
    }

    /// Apply the transform elementwise (batchwise for z-score).
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        match self.kind {
            TransformKind::BoxCox => {
                let shifted = shift_positive(x, self.shift_epsilon)?;
                boxcox_apply(&shifted, self.lambda.expect("validated"))
            }
            TransformKind::ZScore => {
                let (mean, var) = mean_and_population_variance(x)?;
                if var == 0.0 {
                    return Err(Error::Degenerate(
                        "z-score transform requires nonzero variance".into(),
                    ));
                }
                let std = var.sqrt();
                Ok(x.iter().map(|v| (v - mean) / std).collect())
            }
            TransformKind::Log => {
                let shifted = shift_positive(x, self.shift_epsilon)?;
                Ok(shifted.iter().map(|v| v.ln()).collect())
            }
            TransformKind::Exp => {
                if let Some(v) = x.iter().find(|v| **v > 700.0) {
                    return Err(Error::Degenerate(format!(
                        "exp transform overflows for input {v}"
                    )));
                }
                Ok(x.iter().map(|v| v.exp()).collect())
            }
            TransformKind::Power => {
                let p = self.power_exponent.expect("validated");
                let shifted = shift_positive(x, self.shift_epsilon)?;
                Ok(shifted.iter().map(|v| v.powf(p)).collect())
            }
            TransformKind::Identity => Ok(x.to_vec()),
        }
    }
}

/// Shift nonnegative values by ε so every output is strictly positive.
pub fn shift_positive(x: &[f64], epsilon: f64) -> Result<Vec<f64>> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig("shift epsilon must be positive".into()));
    }
    for v in x {
        if !v.is_finite() {
            return Err(Error::InvalidData("non-finite value in input".into()));
        }
        if *v < 0.0 {
            return Err(Error::InvalidData(format!(
                "negative value {v} cannot be shifted into the positive domain"
            )));
        }
    }
    Ok(x.iter().map(|v| v + epsilon).collect())
}

/// Elementwise Box-Cox: (x^λ − 1)/λ for λ ≠ 0, ln x for λ = 0.
pub fn boxcox_apply(x: &[f64], lambda: f64) -> Result<Vec<f64>> {
    for v in x {
        if !(*v > 0.0) {
            return Err(Error::InvalidData(format!(
                "Box-Cox requires strictly positive inputs, got {v}"
            )));
        }
    }
    if lambda == 0.0 {
        Ok(x.iter().map(|v| v.ln()).collect())
    } else {
        Ok(x.iter().map(|v| (v.powf(lambda) - 1.0) / lambda).collect())
    }
}

/// All values bit-equal. The mean of a constant list can round one ulp off
/// the value, so a plain variance test misses this case.
pub(crate) fn is_constant(x: &[f64]) -> bool {
    x.windows(2).all(|w| w[0] == w[1])
}

fn mean_and_population_variance(x: &[f64]) -> Result<(f64, f64)> {
    if x.len() < 2 {
        return Err(Error::InvalidData(
            "moment computation requires at least 2 values".into(),
        ));
    }
    if is_constant(x) {
        return Ok((x[0], 0.0));
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    Ok((mean, var))
}

fn standardized_moment(x: &[f64], order: i32) -> Result<f64> {
    let (mean, var) = mean_and_population_variance(x)?;
    if var == 0.0 || !var.is_finite() {
        return Err(Error::Degenerate(
            "standardized moment requires nonzero finite variance".into(),
        ));
    }
    let std = var.sqrt();
    let n = x.len() as f64;
    Ok(x.iter().map(|v| ((v - mean) / std).powi(order)).sum::<f64>() / n)
}

/// Population skewness: (1/n)·Σ((x_i − μ)/σ)³.
pub fn skewness(x: &[f64]) -> Result<f64> {
    standardized_moment(x, 3)
}

/// Population kurtosis (non-excess): (1/n)·Σ((x_i − μ)/σ)⁴.
pub fn kurtosis(x: &[f64]) -> Result<f64> {
    standardized_moment(x, 4)
}

/// Gaussian profile log-likelihood of the Box-Cox transform at λ:
/// ℓ(λ) = −(n/2)·ln σ̂²_λ + (λ−1)·Σ ln x_i, with σ̂²_λ the population
/// variance of the transformed data. Returns −∞ when the transformed data
/// degenerates (zero or non-finite variance).
pub fn boxcox_loglik(x: &[f64], lambda: f64) -> Result<f64> {
    if x.len() < 2 {
        return Err(Error::InvalidData(
            "log-likelihood requires at least 2 values".into(),
        ));
    }
    let sum_ln = sum_of_logs(x)?;
    let transformed = boxcox_apply(x, lambda)?;
    Ok(profile_loglik(&transformed, lambda, sum_ln))
}

fn sum_of_logs(x: &[f64]) -> Result<f64> {
    let mut sum = 0.0;
    for v in x {
        if !(*v > 0.0) {
            return Err(Error::InvalidData(format!(
                "log-likelihood requires strictly positive inputs, got {v}"
            )));
        }
        sum += v.ln();
    }
    Ok(sum)
}

fn profile_loglik(transformed: &[f64], lambda: f64, sum_ln: f64) -> f64 {
    if is_constant(transformed) {
        return f64::NEG_INFINITY;
    }
    let n = transformed.len() as f64;
    let mean = transformed.iter().sum::<f64>() / n;
    let var = transformed.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if !(var > 0.0) || !var.is_finite() {
        return f64::NEG_INFINITY;
    }
    -0.5 * n * var.ln() + (lambda - 1.0) * sum_ln
}

/// λ-selection strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaStrategy {
    /// Maximize the Gaussian profile log-likelihood.
    Mle,
    /// Minimize |skewness(T_λ(x)) − target|; default target 0.
    Skewness,
    /// Minimize |kurtosis(T_λ(x)) − target|; default target 1.
    Kurtosis,
}

impl LambdaStrategy {
    pub fn default_target(self) -> Option<f64> {
        match self {
            LambdaStrategy::Mle => None,
            LambdaStrategy::Skewness => Some(0.0),
            LambdaStrategy::Kurtosis => Some(1.0),
        }
    }
}

impl std::fmt::Display for LambdaStrategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            LambdaStrategy::Mle => "mle",
            LambdaStrategy::Skewness => "skewness",
            LambdaStrategy::Kurtosis => "kurtosis",
        };
        write!(f, "{name}")
    }
}

/// Outcome of a λ grid scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaSearchResult {
    pub lambda_star: f64,
    /// Every scanned (λ, objective) pair, in grid order. The objective is
    /// the log-likelihood for MLE and |moment − target| otherwise;
    /// degenerate grid points carry ∓∞ sentinels.
    pub objective_curve: Vec<(f64, f64)>,
    pub strategy: LambdaStrategy,
}

/// Default λ grid: −5.00 to 5.00 inclusive in steps of 0.01 (1001 points).
pub fn default_grid() -> Vec<f64> {
    (0..=1000).map(|i| (i as f64 - 500.0) / 100.0).collect()
}

/// Build an inclusive λ grid from CLI-style range parameters.
pub fn grid_from_range(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) || !min.is_finite() || !max.is_finite() || max < min {
        return Err(Error::InvalidConfig(format!(
            "invalid lambda grid range [{min}, {max}] step {step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    if count > 1_000_000 {
        return Err(Error::InvalidConfig(format!(
            "lambda grid would have {count} points"
        )));
    }
    // When the step is a unit fraction and min a whole multiple of it,
    // build each point as an integer divided by 1/step: division rounds
    // correctly to the decimal the user wrote, while additive accumulation
    // drifts (−5 + 532·0.01 ends in …0003 instead of 0.32).
    let inv = 1.0 / step;
    let base = min * inv;
    if (inv - inv.round()).abs() < 1e-6 && (base - base.round()).abs() < 1e-6 {
        let (inv, base) = (inv.round(), base.round());
        Ok((0..count).map(|i| (base + i as f64) / inv).collect())
    } else {
        Ok((0..count).map(|i| min + i as f64 * step).collect())
    }
}

/// Scan the λ grid in order and pick the optimum for the given strategy.
///
/// The input is shifted by ε once, before any objective is computed; the
/// same shifted data feeds every grid point. Strict improvement is required
/// to replace the incumbent, so the earliest optimal grid value wins.
/// Errors if every grid point degenerates.
pub fn select_lambda(
    x: &[f64],
    strategy: LambdaStrategy,
    grid: &[f64],
    target: Option<f64>,
    epsilon: f64,
) -> Result<LambdaSearchResult> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("lambda grid must be nonempty".into()));
    }
    let shifted = shift_positive(x, epsilon)?;
    if shifted.len() < 2 {
        return Err(Error::InvalidData(
            "lambda selection requires at least 2 values".into(),
        ));
    }
    let target = target
        .or_else(|| strategy.default_target())
        .unwrap_or(f64::NAN);
    let sum_ln = shifted.iter().map(|v| v.ln()).sum::<f64>();
    let maximize = strategy == LambdaStrategy::Mle;
    let degenerate_sentinel = if maximize {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    };

    let mut curve = Vec::with_capacity(grid.len());
    let mut best: Option<(f64, f64)> = None;
    for &lambda in grid {
        let transformed = boxcox_apply(&shifted, lambda).expect("shifted data is positive");
        let objective = match strategy {
            LambdaStrategy::Mle => profile_loglik(&transformed, lambda, sum_ln),
            LambdaStrategy::Skewness => moment_objective(&transformed, 3, target),
            LambdaStrategy::Kurtosis => moment_objective(&transformed, 4, target),
        };
        let objective = if objective.is_nan() {
            degenerate_sentinel
        } else {
            objective
        };
        curve.push((lambda, objective));
        let improves = match best {
            None => objective != degenerate_sentinel,
            Some((_, incumbent)) => {
                if maximize {
                    objective > incumbent
                } else {
                    objective < incumbent
                }
            }
        };
        if improves {
            best = Some((lambda, objective));
        }
    }

    let (lambda_star, _) = best.ok_or_else(|| {
        Error::Degenerate("every lambda in the grid produced degenerate data".into())
    })?;
    Ok(LambdaSearchResult {
        lambda_star,
        objective_curve: curve,
        strategy,
    })
}

fn moment_objective(transformed: &[f64], order: i32, target: f64) -> f64 {
    match standardized_moment_unchecked(transformed, order) {
        Some(m) => (m - target).abs(),
        None => f64::INFINITY,
    }
}

fn standardized_moment_unchecked(x: &[f64], order: i32) -> Option<f64> {
    if is_constant(x) {
        return None;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if !(var > 0.0) || !var.is_finite() {
        return None;
    }
    let std = var.sqrt();
    let m = x.iter().map(|v| ((v - mean) / std).powi(order)).sum::<f64>() / n;
    m.is_finite().then_some(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn normal_draws(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
    }

    #[test]
    fn boxcox_known_values() {
        assert_eq!(boxcox_apply(&[5.0], 1.0).unwrap(), vec![4.0]);
        assert_eq!(boxcox_apply(&[3.0], 2.0).unwrap(), vec![4.0]);
        let ln_e = boxcox_apply(&[std::f64::consts::E], 0.0).unwrap()[0];
        assert!((ln_e - 1.0).abs() < 1e-15);
    }

    #[test]
    fn boxcox_rejects_nonpositive() {
        assert!(boxcox_apply(&[0.0], 1.0).is_err());
        assert!(boxcox_apply(&[-1.0], 0.5).is_err());
    }

    #[test]
    fn boxcox_continuity_at_zero() {
        for &y in &[1e-6, 1e-3, 0.5, 1.0, 7.3, 1e3] {
            let near_zero = boxcox_apply(&[y], 1e-7).unwrap()[0];
            assert!(
                (near_zero - y.ln()).abs() <= 1e-5,
                "y={y}: {near_zero} vs {}",
                y.ln()
            );
        }
    }

    #[test]
    fn shift_positive_examples() {
        let out = shift_positive(&[0.0, 0.5], 1e-8).unwrap();
        assert_eq!(out, vec![1e-8, 0.50000001]);
        assert!(shift_positive(&[-1.0], 1e-8).is_err());
    }

    #[test]
    fn skewness_known_values() {
        assert!(skewness(&[1.0, 2.0, 3.0]).unwrap().abs() < 1e-14);
        let s = skewness(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!((s - 1.1547005383792515).abs() < 1e-12);
        assert!(skewness(&[2.0, 2.0]).is_err());
    }

    #[test]
    fn kurtosis_known_values() {
        assert!((kurtosis(&[-1.0, 1.0]).unwrap() - 1.0).abs() < 1e-14);
        assert!((kurtosis(&[1.0, 2.0, 3.0]).unwrap() - 1.5).abs() < 1e-14);
        assert!(kurtosis(&[5.0, 5.0, 5.0]).is_err());
    }

    #[test]
    fn moments_are_affine_invariant() {
        let x = normal_draws(3, 64);
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v + 7.0).collect();
        assert!((skewness(&x).unwrap() - skewness(&y).unwrap()).abs() < 1e-9);
        assert!((kurtosis(&x).unwrap() - kurtosis(&y).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn loglik_constant_input_is_neg_infinity() {
        assert_eq!(boxcox_loglik(&[2.0, 2.0, 2.0], 0.7).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn loglik_hand_computed_case() {
        // x = exp({−1, 0, 1}): at λ=0 the transform recovers {−1,0,1} with
        // population variance 2/3 and Σ ln x_i = 0.
        let x: Vec<f64> = [-1.0f64, 0.0, 1.0].iter().map(|v| v.exp()).collect();
        let got = boxcox_loglik(&x, 0.0).unwrap();
        let expected = 0.6081976621622466; // −(3/2)·ln(2/3)
        assert!((got - expected).abs() < 1e-12, "got {got}");
    }

    #[test]
    fn mle_recovers_zero_for_lognormal() {
        let x: Vec<f64> = normal_draws(7, 4000).iter().map(|z| z.exp()).collect();
        let result =
            select_lambda(&x, LambdaStrategy::Mle, &default_grid(), None, DEFAULT_SHIFT_EPSILON)
                .unwrap();
        assert!(
            result.lambda_star.abs() <= 0.15,
            "lambda_star = {}",
            result.lambda_star
        );
    }

    #[test]
    fn skewness_strategy_recovers_half_for_squared_gaussian() {
        // x = (z + 6)² has a symmetrizing exponent of 1/2: the Box-Cox
        // transform at λ = 0.5 is an affine map of z + 6.
        let x: Vec<f64> = normal_draws(11, 4000).iter().map(|z| (z + 6.0) * (z + 6.0)).collect();
        let result = select_lambda(
            &x,
            LambdaStrategy::Skewness,
            &default_grid(),
            None,
            DEFAULT_SHIFT_EPSILON,
        )
        .unwrap();
        assert!(
            (result.lambda_star - 0.5).abs() <= 0.2,
            "lambda_star = {}",
            result.lambda_star
        );
    }

    #[test]
    fn single_candidate_grid_wins_regardless_of_data() {
        let x = vec![0.3, 0.9, 2.7, 8.1];
        for strategy in [LambdaStrategy::Mle, LambdaStrategy::Skewness, LambdaStrategy::Kurtosis] {
            let result =
                select_lambda(&x, strategy, &[1.0], None, DEFAULT_SHIFT_EPSILON).unwrap();
            assert_eq!(result.lambda_star, 1.0);
            assert_eq!(result.objective_curve.len(), 1);
        }
    }

    #[test]
    fn select_lambda_is_deterministic() {
        let x: Vec<f64> = normal_draws(5, 300).iter().map(|z| z.exp()).collect();
        let grid = default_grid();
        let a = select_lambda(&x, LambdaStrategy::Kurtosis, &grid, None, 1e-8).unwrap();
        let b = select_lambda(&x, LambdaStrategy::Kurtosis, &grid, None, 1e-8).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn select_lambda_errors_when_everything_degenerates() {
        let err = select_lambda(
            &[0.5, 0.5, 0.5],
            LambdaStrategy::Mle,
            &default_grid(),
            None,
            1e-8,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Degenerate(_)));
    }

    #[test]
    fn mle_discrete_first_order_condition_holds_at_interior_optimum() {
        let x: Vec<f64> = normal_draws(13, 2000).iter().map(|z| z.exp()).collect();
        let grid = default_grid();
        let result =
            select_lambda(&x, LambdaStrategy::Mle, &grid, None, DEFAULT_SHIFT_EPSILON).unwrap();
        let idx = grid
            .iter()
            .position(|&l| l == result.lambda_star)
            .expect("lambda_star comes from the grid");
        assert!(idx > 0 && idx < grid.len() - 1, "optimum not interior");
        let before = result.objective_curve[idx - 1].1;
        let at = result.objective_curve[idx].1;
        let after = result.objective_curve[idx + 1].1;
        assert!(at >= before && at >= after);
    }

    #[test]
    fn default_grid_shape() {
        let grid = default_grid();
        assert_eq!(grid.len(), 1001);
        assert_eq!(grid[0], -5.0);
        assert_eq!(grid[500], 0.0);
        assert_eq!(grid[1000], 5.0);
    }

    #[test]
    fn grid_from_range_counts() {
        assert_eq!(grid_from_range(-5.0, 5.0, 0.01).unwrap().len(), 1001);
        assert_eq!(grid_from_range(1.0, 1.0, 0.5).unwrap(), vec![1.0]);
        assert!(grid_from_range(1.0, 0.0, 0.5).is_err());
        assert!(grid_from_range(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn grid_from_range_lands_on_clean_decimals() {
        let grid = grid_from_range(-5.0, 5.0, 0.01).unwrap();
        assert_eq!(grid[0], -5.0);
        assert_eq!(grid[500], 0.0);
        assert_eq!(grid[532], 0.32);
        assert_eq!(grid[1000], 5.0);
        assert_eq!(grid, default_grid());
    }

    #[test]
    fn zscore_known_values() {
        let out = TransformSpec::z_score().apply(&[1.0, 2.0, 3.0]).unwrap();
        let e = 1.224744871391589; // √(3/2)
        assert!((out[0] + e).abs() < 1e-12);
        assert!(out[1].abs() < 1e-12);
        assert!((out[2] - e).abs() < 1e-12);
    }

    #[test]
    fn zscore_rejects_zero_variance() {
        assert!(TransformSpec::z_score().apply(&[4.0, 4.0]).is_err());
    }

    #[test]
    fn log_and_power_examples() {
        let out = TransformSpec::log().apply(&[std::f64::consts::E - 1e-8]).unwrap();
        assert!((out[0] - 1.0).abs() < 1e-9);
        let out = TransformSpec::power(0.5).apply(&[4.0 - 1e-8]).unwrap();
        assert!((out[0] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn exp_overflow_guard() {
        assert!(TransformSpec::exp().apply(&[701.0]).is_err());
        assert!(TransformSpec::exp().apply(&[0.5]).is_ok());
    }

    #[test]
    fn identity_is_exact() {
        let x = vec![0.0, 1e-300, 3.5, 1e12];
        assert_eq!(TransformSpec::identity().apply(&x).unwrap(), x);
    }

    #[test]
    fn spec_validation_rules() {
        assert!(TransformSpec::box_cox(0.5).validate().is_ok());
        let mut bad = TransformSpec::identity();
        bad.lambda = Some(1.0);
        assert!(bad.validate().is_err());
        let mut bad = TransformSpec::box_cox(1.0);
        bad.shift_epsilon = 0.0;
        assert!(bad.validate().is_err());
        assert!(TransformSpec::power(0.5).validate().is_ok());
        let mut bad = TransformSpec::power(0.5);
        bad.power_exponent = None;
        assert!(bad.validate().is_err());
    }
}
