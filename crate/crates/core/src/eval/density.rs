use super::EvalError;
use serde::{Deserialize, Serialize};

/// Width of the "near zero" / "near one" bands when summarising a fit.
pub const NEAR_EPSILON: f64 = 0.05;

/// Mixture over per-example solve probabilities on the grid `p_j = j / M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityModel {
    pub grid: Vec<f64>,
    pub weights: Vec<f64>,
}

impl DensityModel {
    /// Grid `0, 1/m, ..., 1` with the given weights (length `m + 1`).
    pub fn on_grid(weights: Vec<f64>) -> Self {
        let m = weights.len().saturating_sub(1).max(1) as f64;
        let grid = (0..weights.len()).map(|j| j as f64 / m).collect();
        Self { grid, weights }
    }

    pub fn mass_where(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.grid
            .iter()
            .zip(&self.weights)
            .filter(|(p, _)| pred(**p))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn mass_near_zero(&self) -> f64 {
        self.mass_where(|p| p < NEAR_EPSILON)
    }

    pub fn mass_near_one(&self) -> f64 {
        self.mass_where(|p| p > 1.0 - NEAR_EPSILON)
    }
}

/// Probability that an example drawn from `model` is solved within `k` trials.
pub fn expected_accuracy(model: &DensityModel, k: usize) -> f64 {
    model
        .grid
        .iter()
        .zip(&model.weights)
        .map(|(p, w)| w * (1.0 - (1.0 - p).powi(k as i32)))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitOptions {
    /// Grid resolution M; the grid has M + 1 points.
    pub grid: usize,
    pub iterations: usize,
    pub learning_rate: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            grid: 50,
            iterations: 20_000,
            learning_rate: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityFit {
    pub model: DensityModel,
    /// Sum of squared errors against the observed curve.
    pub loss: f64,
    pub mass_near_zero: f64,
    pub mass_near_one: f64,
}

fn softmax(theta: &[f64]) -> Vec<f64> {
    let max = theta.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = theta.iter().map(|t| (t - max).exp()).collect();
    let sum: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / sum).collect()
}

/// Fits a grid density to an observed pass@k curve (`observed[k - 1]` is the
/// accuracy at k) by minimising the sum of squared errors.
///
/// Weights are a softmax of free parameters, so they stay on the simplex.
/// Steps use Adam moment estimates from a uniform start; plain gradient steps
/// stall on the flat softmax plateau long before the loss is small.
pub fn fit_density(observed: &[f64], options: &FitOptions) -> Result<DensityFit, EvalError> {
    if options.grid == 0 || options.learning_rate.is_nan() || options.learning_rate <= 0.0 {
        return Err(EvalError::Options(format!("{options:?}")));
    }
    for (i, &v) in observed.iter().enumerate() {
        if !(0.0..=1.0).contains(&v) {
            return Err(EvalError::OutOfRange { k: i + 1, value: v });
        }
    }
    for (i, w) in observed.windows(2).enumerate() {
        if w[1] < w[0] - 1e-12 {
            return Err(EvalError::NonMonotone {
                k: i + 2,
                prev: w[0],
                next: w[1],
            });
        }
    }

    let m = options.grid;
    let grid: Vec<f64> = (0..=m).map(|j| j as f64 / m as f64).collect();
    // q[k][j] = 1 - (1 - p_j)^(k+1)
    let q: Vec<Vec<f64>> = (1..=observed.len())
        .map(|k| grid.iter().map(|p| 1.0 - (1.0 - p).powi(k as i32)).collect())
        .collect();
    let sse = |w: &[f64]| -> (f64, Vec<f64>) {
        let residuals: Vec<f64> = q
            .iter()
            .zip(observed)
            .map(|(row, o)| row.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() - o)
            .collect();
        (residuals.iter().map(|r| r * r).sum(), residuals)
    };

    let (b1, b2, eps) = (0.9, 0.999, 1e-12);
    let mut theta = vec![0.0; m + 1];
    let mut first = vec![0.0; m + 1];
    let mut second = vec![0.0; m + 1];
    for step in 1..=options.iterations {
        let w = softmax(&theta);
        let (_, residuals) = sse(&w);
        // dL/dw_j = sum_k 2 r_k q_kj, then through the softmax Jacobian.
        let gw: Vec<f64> = (0..=m)
            .map(|j| q.iter().zip(&residuals).map(|(row, r)| 2.0 * r * row[j]).sum())
            .collect();
        let mean: f64 = w.iter().zip(&gw).map(|(a, b)| a * b).sum();
        let c1 = 1.0 - f64::powi(b1, step as i32);
        let c2 = 1.0 - f64::powi(b2, step as i32);
        for j in 0..=m {
            let g = w[j] * (gw[j] - mean);
            first[j] = b1 * first[j] + (1.0 - b1) * g;
            second[j] = b2 * second[j] + (1.0 - b2) * g * g;
            theta[j] -= options.learning_rate * (first[j] / c1) / ((second[j] / c2).sqrt() + eps);
        }
    }

    let weights = softmax(&theta);
    let (loss, _) = sse(&weights);
    let model = DensityModel { grid, weights };
    Ok(DensityFit {
        mass_near_zero: model.mass_near_zero(),
        mass_near_one: model.mass_near_one(),
        model,
        loss,
    })
}
