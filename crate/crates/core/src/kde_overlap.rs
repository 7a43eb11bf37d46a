//! Gaussian kernel density estimation and pairwise distribution overlap.
//!
//! The estimate at x is f(x) = 1/(n·h·√(2π)) · Σ exp(−(x − x_i)²/(2h²)),
//! summed over every stored point with no truncation. The overlap of two
//! estimates is ∫ min(f_a, f_b) dx, integrated by the trapezoidal rule over
//! a window extending five bandwidths past the pooled sample range and
//! clamped to [0, 1].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::loss_model::LossDataset;

/// Default number of quadrature nodes for overlap integrals.
pub const DEFAULT_GRID_POINTS: usize = 2048;

/// Integration window margin, in units of the larger bandwidth. Gaussian
/// mass beyond ±5h is below 6e-7.
const WINDOW_BANDWIDTHS: f64 = 5.0;

const SQRT_TWO_PI: f64 = 2.5066282746310002;

/// A fitted univariate Gaussian kernel density: sample points plus a
/// bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeEstimate {
    points: Vec<f64>,
    bandwidth: f64,
}

impl KdeEstimate {
    /// Fit a KDE, using Silverman's rule when no bandwidth is given:
    /// h = 0.9·min(σ̂, IQR/1.34)·n^(−1/5) with the sample standard
    /// deviation. When the rule degenerates to zero (constant input, or a
    /// single point), it falls back to h = max(|x̄|, 1)·1e-3 with a warning.
    pub fn fit(samples: &[f64], bandwidth: Option<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidData("KDE requires at least one sample".into()));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("KDE samples must be finite".into()));
        }
        let bandwidth = match bandwidth {
            Some(h) => {
                if !(h > 0.0 && h.is_finite()) {
                    return Err(Error::InvalidConfig(format!(
                        "bandwidth must be positive, got {h}"
                    )));
                }
                h
            }
            None => {
                let h = silverman_bandwidth(samples);
                if h > 0.0 {
                    h
                } else {
                    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
                    let fallback = mean.abs().max(1.0) * 1e-3;
                    log::warn!(
                        "Silverman bandwidth degenerated on {} samples; falling back to h={fallback}",
                        samples.len()
                    );
                    fallback
                }
            }
        };
        Ok(Self {
            points: samples.to_vec(),
            bandwidth,
        })
    }

    /// Evaluate the density at x.
    pub fn eval(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let sum: f64 = self
            .points
            .iter()
            .map(|xi| {
                let u = (x - xi) / h;
                (-0.5 * u * u).exp()
            })
            .sum();
        sum / (self.points.len() as f64 * h * SQRT_TWO_PI)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    fn min_point(&self) -> f64 {
        self.points.iter().copied().fold(f64::INFINITY, f64::min)
    }

    fn max_point(&self) -> f64 {
        self.points.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

fn silverman_bandwidth(samples: &[f64]) -> f64 {
    let n = samples.len();
    if n < 2 {
        return 0.0;
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (nf - 1.0);
    let std = var.sqrt();
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    0.9 * std.min(iqr / 1.34) * nf.powf(-0.2)
}

/// Linear-interpolation quantile over an ascending-sorted slice.
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = pos - lo as f64;
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    }
}

/// Overlap coefficient ∫ min(f_a, f_b) dx of two estimates, by trapezoidal
/// quadrature on `grid_points` nodes, clamped to [0, 1]. The integration
/// window covers both sample ranges plus five of the larger bandwidth on
/// each side; the result is symmetric in its arguments.
pub fn overlap(a: &KdeEstimate, b: &KdeEstimate, grid_points: usize) -> f64 {
    assert!(grid_points >= 16, "overlap requires at least 16 grid points");
    let h = a.bandwidth.max(b.bandwidth);
    let lo = a.min_point().min(b.min_point()) - WINDOW_BANDWIDTHS * h;
    let hi = a.max_point().max(b.max_point()) + WINDOW_BANDWIDTHS * h;
    let dx = (hi - lo) / (grid_points - 1) as f64;
    let mut sum = 0.0;
    let mut prev = a.eval(lo).min(b.eval(lo));
    for i in 1..grid_points {
        let x = lo + i as f64 * dx;
        let cur = a.eval(x).min(b.eval(x));
        sum += 0.5 * (prev + cur) * dx;
        prev = cur;
    }
    sum.clamp(0.0, 1.0)
}

/// Pairwise overlap of per-category loss distributions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapMatrix {
    pub categories: Vec<String>,
    /// Row-major square matrix; `values[i][j]` is the overlap between
    /// categories i and j. Symmetric, diagonal ≈ 1.
    pub values: Vec<Vec<f64>>,
}

impl OverlapMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<f64> {
        let i = self.categories.iter().position(|c| c == a)?;
        let j = self.categories.iter().position(|c| c == b)?;
        Some(self.values[i][j])
    }

    pub fn len(&self) -> usize {
        self.categories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.categories.is_empty()
    }
}

/// Fit one KDE per category (in dataset order) and fill every pair.
///
/// Each cell is computed independently on its own quadrature grid, so the
/// result does not depend on evaluation order; with the `parallel` feature
/// the cells are computed across threads. Errors if any category has fewer
/// than 2 samples.
pub fn overlap_matrix(
    dataset: &LossDataset,
    bandwidth: Option<f64>,
    grid_points: usize,
) -> Result<OverlapMatrix> {
    let categories: Vec<String> = dataset.categories_in_order().to_vec();
    let mut estimates = Vec::with_capacity(categories.len());
    for category in &categories {
        let losses = dataset.losses_for(category);
        if losses.len() < 2 {
            return Err(Error::InvalidData(format!(
                "category '{category}' has {} sample(s); overlap needs at least 2",
                losses.len()
            )));
        }
        estimates.push(KdeEstimate::fit(&losses, bandwidth)?);
    }

    let k = categories.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i..k).map(move |j| (i, j)))
        .collect();
    let cells = compute_cells(&estimates, &pairs, grid_points);

    let mut values = vec![vec![0.0; k]; k];
    for (&(i, j), &value) in pairs.iter().zip(cells.iter()) {
        values[i][j] = value;
        values[j][i] = value;
    }
    Ok(OverlapMatrix { categories, values })
}

#[cfg(feature = "parallel")]
fn compute_cells(estimates: &[KdeEstimate], pairs: &[(usize, usize)], grid_points: usize) -> Vec<f64> {
    use rayon::prelude::*;
    pairs
        .par_iter()
        .map(|&(i, j)| overlap(&estimates[i], &estimates[j], grid_points))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn compute_cells(estimates: &[KdeEstimate], pairs: &[(usize, usize)], grid_points: usize) -> Vec<f64> {
    pairs
        .iter()
        .map(|&(i, j)| overlap(&estimates[i], &estimates[j], grid_points))
        .collect()
}
