//! Hybrid training: exact least squares for the linear consequents, gradient
//! descent for the Gaussian premises.
//!
//! Each epoch solves the consequents globally for the current premises (the
//! forward half), then takes one gradient step on the premise centers and
//! widths (the backward half). Widths are clamped away from zero so the
//! membership functions stay well defined.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{forward, rmse_over, AnfisError, AnfisModel, Dataset, Gaussian, Rule};

/// Normalized rows: one `(inputs, target)` pair per example.
type Rows = Vec<(Vec<f64>, f64)>;

/// Minimum premise width, in normalized input units.
const SIGMA_FLOOR: f64 = 1e-3;

/// Initial premise width floor used by [`init_model`].
const INIT_SIGMA_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub n_rules: usize,
    pub seed: u64,
    /// Fraction of rows held out of training for validation, in `[0, 1)`.
    pub holdout_fraction: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 50,
            learning_rate: 0.05,
            n_rules: 9,
            seed: 0,
            holdout_fraction: 0.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), AnfisError> {
        if self.epochs == 0 {
            return Err(AnfisError::InvalidConfig {
                reason: "epochs must be at least 1".into(),
            });
        }
        if self.n_rules == 0 {
            return Err(AnfisError::InvalidConfig {
                reason: "n_rules must be at least 1".into(),
            });
        }
        if !(self.learning_rate > 0.0) {
            return Err(AnfisError::InvalidConfig {
                reason: format!("learning_rate must be positive, got {}", self.learning_rate),
            });
        }
        if !(0.0..1.0).contains(&self.holdout_fraction) {
            return Err(AnfisError::InvalidConfig {
                reason: format!(
                    "holdout_fraction must lie in [0, 1), got {}",
                    self.holdout_fraction
                ),
            });
        }
        Ok(())
    }
}

/// Seeds the rule base from the data: rule centers come from farthest-point
/// sampling over the normalized inputs (a deterministic, seeded stand-in for
/// cluster selection), widths from the per-axis data spread, consequents
/// start at zero.
pub fn init_model(data: &Dataset, config: &TrainConfig) -> Result<AnfisModel, AnfisError> {
    config.validate()?;
    let rows = data.normalized_rows();
    if rows.len() < config.n_rules {
        return Err(AnfisError::TooFewRows {
            needed: config.n_rules,
            got: rows.len(),
        });
    }
    let n_inputs = data.n_inputs();
    let anchors = farthest_point_sample(&rows, config.n_rules, config.seed);

    // With R rules covering d input axes, each axis sees roughly R^(1/d)
    // distinct cluster positions; half the resulting per-axis pitch is the
    // initial width.
    let spread = (config.n_rules as f64)
        .powf(1.0 / n_inputs as f64)
        .ceil()
        .max(1.0);
    let mut sigmas = Vec::with_capacity(n_inputs);
    for col in 0..n_inputs {
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        for (x, _) in &rows {
            min = min.min(x[col]);
            max = max.max(x[col]);
        }
        let range = (max - min).max(0.0);
        sigmas.push((range / (2.0 * spread)).max(INIT_SIGMA_FLOOR));
    }

    let rules = anchors
        .into_iter()
        .map(|row_index| {
            let center = &rows[row_index].0;
            Rule {
                premise: center
                    .iter()
                    .zip(&sigmas)
                    .map(|(&c, &sigma)| Gaussian { center: c, sigma })
                    .collect(),
                consequent: vec![0.0; n_inputs + 1],
            }
        })
        .collect();
    AnfisModel::new(n_inputs, rules, data.normalization().clone())
}

/// Farthest-point sampling: a seeded random start, then repeatedly the row
/// maximizing the distance to the chosen set. Ties break toward the lowest
/// index, so the result is deterministic for a given seed.
fn farthest_point_sample(rows: &[(Vec<f64>, f64)], count: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = rng.random_range(0..rows.len());
    let mut chosen = vec![start];
    let mut min_dist2: Vec<f64> = rows.iter().map(|(x, _)| dist2(x, &rows[start].0)).collect();
    while chosen.len() < count {
        let mut best = usize::MAX;
        let mut best_d = f64::NEG_INFINITY;
        for (i, &d) in min_dist2.iter().enumerate() {
            if !chosen.contains(&i) && d > best_d {
                best = i;
                best_d = d;
            }
        }
        chosen.push(best);
        for (i, d) in min_dist2.iter_mut().enumerate() {
            *d = d.min(dist2(&rows[i].0, &rows[best].0));
        }
    }
    chosen
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// What the least-squares solve saw: the effective rank of the design matrix
/// against its column count. A deficient system gets the minimum-norm
/// solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LseInfo {
    pub rank: usize,
    pub columns: usize,
}

impl LseInfo {
    pub fn rank_deficient(&self) -> bool {
        self.rank < self.columns
    }
}

/// Solves all consequent coefficients at once as the linear least-squares
/// system `A*theta = y`, where row `t` stacks `w_bar_k(x_t) * [x_t, 1]`
/// blocks across rules. The solve is SVD-based: numerically stable and
/// minimum-norm under rank deficiency. Premises are left untouched, and the
/// training SSE for the fixed premises is minimal over consequents.
pub fn lse_consequents(
    model: &AnfisModel,
    data: &Dataset,
) -> Result<(AnfisModel, LseInfo), AnfisError> {
    if data.is_empty() {
        return Err(AnfisError::EmptyDataset);
    }
    let rows: Vec<(Vec<f64>, f64)> = data
        .rows()
        .iter()
        .map(|row| model.normalization.normalize_row(row))
        .collect::<Result<_, _>>()?;
    lse_consequents_rows(model, &rows)
}

fn lse_consequents_rows(
    model: &AnfisModel,
    rows: &[(Vec<f64>, f64)],
) -> Result<(AnfisModel, LseInfo), AnfisError> {
    let n = model.n_inputs;
    let r = model.n_rules();
    let cols = r * (n + 1);
    let mut a = DMatrix::<f64>::zeros(rows.len(), cols);
    let mut y = DVector::<f64>::zeros(rows.len());
    for (t, (input, target)) in rows.iter().enumerate() {
        let trace = forward(model, input)?;
        for k in 0..r {
            let w = trace.normalized_firing[k];
            for (j, &x) in input.iter().enumerate() {
                a[(t, k * (n + 1) + j)] = w * x;
            }
            a[(t, k * (n + 1) + n)] = w;
        }
        y[t] = *target;
    }

    let svd = a.svd(true, true);
    let max_sv = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let eps = max_sv * (rows.len().max(cols) as f64) * f64::EPSILON;
    let rank = svd.rank(eps);
    let theta = svd
        .solve(&y, eps)
        .map_err(|reason| AnfisError::InvalidConfig {
            reason: reason.to_owned(),
        })?;

    let mut solved = model.clone();
    for (k, rule) in solved.rules.iter_mut().enumerate() {
        for j in 0..=n {
            rule.consequent[j] = theta[k * (n + 1) + j];
        }
    }
    Ok((
        solved,
        LseInfo {
            rank,
            columns: cols,
        },
    ))
}

/// Per-rule, per-input partial derivatives of the training SSE with respect
/// to the premise parameters, `[rule][input] = (d/dc, d/dsigma)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PremiseGradient {
    pub rules: Vec<Vec<(f64, f64)>>,
}

/// Analytic gradient of `SSE = sum_t (y_hat_t - y_t)^2` through the
/// normalization, firing, and output layers.
pub fn grad_premise(model: &AnfisModel, data: &Dataset) -> Result<PremiseGradient, AnfisError> {
    let rows: Vec<(Vec<f64>, f64)> = data
        .rows()
        .iter()
        .map(|row| model.normalization.normalize_row(row))
        .collect::<Result<_, _>>()?;
    grad_premise_rows(model, &rows)
}

fn grad_premise_rows(
    model: &AnfisModel,
    rows: &[(Vec<f64>, f64)],
) -> Result<PremiseGradient, AnfisError> {
    let mut grads = vec![vec![(0.0, 0.0); model.n_inputs]; model.n_rules()];
    for (input, target) in rows {
        let trace = forward(model, input)?;
        let total: f64 = trace.firing.iter().sum();
        let err = trace.output - target;
        for (k, rule) in model.rules.iter().enumerate() {
            // d(y_hat)/d(w_k) = (f_k - y_hat) / sum(w)
            let dy_dw = (trace.rule_outputs[k] - trace.output) / total;
            let common = 2.0 * err * dy_dw * trace.firing[k];
            for (i, g) in rule.premise.iter().enumerate() {
                let dx = input[i] - g.center;
                let sigma2 = g.sigma * g.sigma;
                grads[k][i].0 += common * dx / sigma2;
                grads[k][i].1 += common * dx * dx / (sigma2 * g.sigma);
            }
        }
    }
    Ok(PremiseGradient { rules: grads })
}

/// RMSE history entry for one epoch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_rmse: f64,
    pub holdout_rmse: Option<f64>,
}

/// Runs hybrid training: per epoch, one global consequent solve followed by
/// one premise gradient step. If the training RMSE blows up past 10x its
/// starting value the learning rate halves and training continues; the run
/// only fails if halving never rescues it. Deterministic for a fixed seed.
pub fn train(
    model: AnfisModel,
    data: &Dataset,
    config: &TrainConfig,
) -> Result<(AnfisModel, Vec<EpochStats>), AnfisError> {
    config.validate()?;
    let all_rows: Vec<(Vec<f64>, f64)> = data
        .rows()
        .iter()
        .map(|row| model.normalization.normalize_row(row))
        .collect::<Result<_, _>>()?;
    if all_rows.is_empty() {
        return Err(AnfisError::EmptyDataset);
    }
    let (train_rows, holdout_rows) = split_rows(&all_rows, config.holdout_fraction, config.seed);

    let mut model = model;
    let mut learning_rate = config.learning_rate;
    let mut history: Vec<EpochStats> = Vec::with_capacity(config.epochs);
    let mut baseline: Option<f64> = None;

    for epoch in 1..=config.epochs {
        let (solved, _info) = lse_consequents_rows(&model, &train_rows)?;
        model = solved;

        let grad = grad_premise_rows(&model, &train_rows)?;
        for (rule, rule_grad) in model.rules.iter_mut().zip(&grad.rules) {
            for (g, &(dc, dsigma)) in rule.premise.iter_mut().zip(rule_grad) {
                g.center -= learning_rate * dc;
                g.sigma = (g.sigma - learning_rate * dsigma).max(SIGMA_FLOOR);
            }
        }

        let train_rmse = rmse_over(&model, &train_rows)?;
        let holdout_rmse = if holdout_rows.is_empty() {
            None
        } else {
            Some(rmse_over(&model, &holdout_rows)?)
        };
        history.push(EpochStats {
            epoch,
            train_rmse,
            holdout_rmse,
        });

        let base = *baseline.get_or_insert(train_rmse);
        if train_rmse > 10.0 * base + 1e-9 {
            learning_rate /= 2.0;
            if learning_rate < 1e-15 {
                return Err(AnfisError::Diverged);
            }
        }
    }
    Ok((model, history))
}

/// Deterministic seeded split: shuffle indices, hold out the requested
/// fraction (rounded), keep both halves in ascending row order.
fn split_rows(rows: &[(Vec<f64>, f64)], holdout_fraction: f64, seed: u64) -> (Rows, Rows) {
    if holdout_fraction <= 0.0 {
        return (rows.to_vec(), Vec::new());
    }
    let n = rows.len();
    let n_holdout = ((n as f64 * holdout_fraction).round() as usize).min(n.saturating_sub(1));
    if n_holdout == 0 {
        return (rows.to_vec(), Vec::new());
    }
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    let mut holdout_idx = indices[..n_holdout].to_vec();
    let mut train_idx = indices[n_holdout..].to_vec();
    holdout_idx.sort_unstable();
    train_idx.sort_unstable();
    let take = |idx: &[usize]| idx.iter().map(|&i| rows[i].clone()).collect();
    (take(&train_idx), take(&holdout_idx))
}

/// Standard error summary of a model over a dataset, in normalized target
/// units. Residuals are `y_hat - y`, one per row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Evaluation {
    pub rmse: f64,
    pub mae: f64,
    pub residuals: Vec<f64>,
}

pub fn evaluate(model: &AnfisModel, data: &Dataset) -> Result<Evaluation, AnfisError> {
    if data.is_empty() {
        return Err(AnfisError::EmptyDataset);
    }
    let mut residuals = Vec::with_capacity(data.len());
    for row in data.rows() {
        let (input, target) = model.normalization.normalize_row(row)?;
        residuals.push(forward(model, &input)?.output - target);
    }
    let n = residuals.len() as f64;
    let rmse = (residuals.iter().map(|r| r * r).sum::<f64>() / n).sqrt();
    let mae = residuals.iter().map(|r| r.abs()).sum::<f64>() / n;
    Ok(Evaluation {
        rmse,
        mae,
        residuals,
    })
}
