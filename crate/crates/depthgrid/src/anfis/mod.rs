//! First-order Sugeno ANFIS: Gaussian premises, linear consequents, hybrid
//! least-squares/gradient training.
//!
//! The network is the usual five-layer arrangement. Layer 1 fuzzifies each
//! input through per-rule Gaussian membership functions; layer 2 multiplies
//! memberships into rule firing strengths; layer 3 normalizes the strengths
//! to sum to 1; layer 4 scales each rule's first-order polynomial by its
//! normalized strength; layer 5 sums the scaled outputs. Premise parameters
//! (centers, widths) are the nonlinear half of the model, consequent
//! coefficients the linear half.

mod dataset;
mod train;

pub use dataset::{Dataset, Normalization, Range};
pub use train::{
    evaluate, grad_premise, init_model, lse_consequents, train, EpochStats, Evaluation, LseInfo,
    PremiseGradient, TrainConfig,
};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum AnfisError {
    #[error("sigma must be positive, got {sigma}")]
    SigmaNotPositive { sigma: f64 },
    #[error("input has {got} components, model expects {expected}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("rule {rule} must carry {expected} consequent coefficients, got {got}")]
    BadConsequent {
        rule: usize,
        expected: usize,
        got: usize,
    },
    #[error("model needs at least one rule")]
    NoRules,
    #[error("all rule firing strengths underflowed to zero for input {input:?}")]
    DegenerateInput { input: Vec<f64> },
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset rows have mixed arity: saw {a} and {b}")]
    MixedArity { a: usize, b: usize },
    #[error("dataset row {row} contains a non-finite value")]
    NonFinite { row: usize },
    #[error("column {column} has zero range; min-max normalization is not invertible")]
    ZeroRange { column: String },
    #[error("need at least {needed} rows to place {needed} rules, got {got}")]
    TooFewRows { needed: usize, got: usize },
    #[error("invalid training config: {reason}")]
    InvalidConfig { reason: String },
    #[error("training diverged: RMSE kept growing after repeated learning-rate halvings")]
    Diverged,
    #[error("dataset csv: {reason}")]
    Csv { reason: String },
}

/// Gaussian membership function `exp(-(x - c)^2 / (2*sigma^2))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Gaussian {
    #[serde(rename = "c")]
    pub center: f64,
    pub sigma: f64,
}

impl Gaussian {
    pub fn new(center: f64, sigma: f64) -> Result<Self, AnfisError> {
        if !(sigma > 0.0) {
            return Err(AnfisError::SigmaNotPositive { sigma });
        }
        Ok(Self { center, sigma })
    }

    #[inline]
    pub(crate) fn eval(&self, x: f64) -> f64 {
        let z = (x - self.center) / self.sigma;
        (-0.5 * z * z).exp()
    }
}

/// Membership degree in (0, 1]; peaks at 1 when `x == c`.
pub fn gaussian_mf(x: f64, center: f64, sigma: f64) -> Result<f64, AnfisError> {
    Ok(Gaussian::new(center, sigma)?.eval(x))
}

/// One fuzzy rule: a Gaussian premise per input and a first-order linear
/// consequent `f(x) = p_1*x_1 + ... + p_n*x_n + r` (coefficients stored with
/// the bias last).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub premise: Vec<Gaussian>,
    pub consequent: Vec<f64>,
}

impl Rule {
    pub(crate) fn consequent_value(&self, input: &[f64]) -> f64 {
        let (coeffs, bias) = self.consequent.split_at(input.len());
        coeffs.iter().zip(input).map(|(p, x)| p * x).sum::<f64>() + bias[0]
    }
}

/// A trained (or trainable) Sugeno model plus the min-max transform that maps
/// raw inputs/targets into the normalized space the parameters live in.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnfisModel {
    #[serde(rename = "inputs")]
    pub n_inputs: usize,
    pub rules: Vec<Rule>,
    pub normalization: Normalization,
}

impl AnfisModel {
    pub fn new(
        n_inputs: usize,
        rules: Vec<Rule>,
        normalization: Normalization,
    ) -> Result<Self, AnfisError> {
        if rules.is_empty() {
            return Err(AnfisError::NoRules);
        }
        for (index, rule) in rules.iter().enumerate() {
            if rule.premise.len() != n_inputs {
                return Err(AnfisError::ArityMismatch {
                    expected: n_inputs,
                    got: rule.premise.len(),
                });
            }
            if rule.consequent.len() != n_inputs + 1 {
                return Err(AnfisError::BadConsequent {
                    rule: index,
                    expected: n_inputs + 1,
                    got: rule.consequent.len(),
                });
            }
            for g in &rule.premise {
                if !(g.sigma > 0.0) {
                    return Err(AnfisError::SigmaNotPositive { sigma: g.sigma });
                }
            }
        }
        Ok(Self {
            n_inputs,
            rules,
            normalization,
        })
    }

    pub fn n_rules(&self) -> usize {
        self.rules.len()
    }

    /// Serializes to the canonical JSON document. Byte-identical for
    /// identical parameters.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("model serializes");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        let model: AnfisModel = serde_json::from_str(text)?;
        Ok(model)
    }

    /// Forward pass on a raw (unnormalized) input; the output is mapped back
    /// into raw target units.
    pub fn predict(&self, raw_input: &[f64]) -> Result<f64, AnfisError> {
        let normalized = self.normalization.normalize_input(raw_input)?;
        let trace = forward(self, &normalized)?;
        Ok(self.normalization.target.denormalize(trace.output))
    }
}

/// Every intermediate of one forward evaluation, layer by layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ForwardTrace {
    /// Layer 1: membership degrees, `[rule][input]`.
    pub memberships: Vec<Vec<f64>>,
    /// Layer 2: rule firing strengths (products of memberships).
    pub firing: Vec<f64>,
    /// Layer 3: normalized firing strengths; sums to 1.
    pub normalized_firing: Vec<f64>,
    /// Layer 4 inputs: each rule's consequent value `f_k(x)`.
    pub rule_outputs: Vec<f64>,
    /// Layer 5: the crisp model output.
    pub output: f64,
}

/// Evaluates the five layers on a normalized input. Errors if every firing
/// strength underflows to zero (the input is too far from all rule centers).
pub fn forward(model: &AnfisModel, input: &[f64]) -> Result<ForwardTrace, AnfisError> {
    if input.len() != model.n_inputs {
        return Err(AnfisError::ArityMismatch {
            expected: model.n_inputs,
            got: input.len(),
        });
    }
    let memberships: Vec<Vec<f64>> = model
        .rules
        .iter()
        .map(|rule| {
            rule.premise
                .iter()
                .zip(input)
                .map(|(g, &x)| g.eval(x))
                .collect()
        })
        .collect();
    let firing: Vec<f64> = memberships.iter().map(|mu| mu.iter().product()).collect();
    let total: f64 = firing.iter().sum();
    if total <= 0.0 {
        return Err(AnfisError::DegenerateInput {
            input: input.to_vec(),
        });
    }
    let normalized_firing: Vec<f64> = firing.iter().map(|w| w / total).collect();
    let rule_outputs: Vec<f64> = model
        .rules
        .iter()
        .map(|rule| rule.consequent_value(input))
        .collect();
    let output = normalized_firing
        .iter()
        .zip(&rule_outputs)
        .map(|(w, f)| w * f)
        .sum();
    Ok(ForwardTrace {
        memberships,
        firing,
        normalized_firing,
        rule_outputs,
        output,
    })
}

/// Sum of squared errors of the model over normalized rows.
pub(crate) fn sse(model: &AnfisModel, rows: &[(Vec<f64>, f64)]) -> Result<f64, AnfisError> {
    let mut acc = 0.0;
    for (input, target) in rows {
        let e = forward(model, input)?.output - target;
        acc += e * e;
    }
    Ok(acc)
}

pub(crate) fn rmse_over(model: &AnfisModel, rows: &[(Vec<f64>, f64)]) -> Result<f64, AnfisError> {
    if rows.is_empty() {
        return Err(AnfisError::EmptyDataset);
    }
    Ok((sse(model, rows)? / rows.len() as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_rule_model(consequent: Vec<f64>) -> AnfisModel {
        AnfisModel::new(
            consequent.len() - 1,
            vec![Rule {
                premise: (0..consequent.len() - 1)
                    .map(|_| Gaussian::new(0.3, 0.7).unwrap())
                    .collect(),
                consequent,
            }],
            Normalization::identity(1),
        )
        .unwrap()
    }

    #[test]
    fn gaussian_peak_and_unit_width_point() {
        assert_eq!(gaussian_mf(2.0, 2.0, 0.5).unwrap(), 1.0);
        let at_sigma = gaussian_mf(3.0, 2.0, 1.0).unwrap();
        assert!((at_sigma - (-0.5f64).exp()).abs() < 1e-12);
        assert!((at_sigma - 0.60653).abs() < 1e-5);
    }

    #[test]
    fn gaussian_is_even_around_center() {
        // Dyadic offsets so c - t and c + t are exactly representable.
        for t in [0.25, 0.5, 2.0] {
            let left = gaussian_mf(1.0 - t, 1.0, 0.4).unwrap();
            let right = gaussian_mf(1.0 + t, 1.0, 0.4).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn gaussian_rejects_nonpositive_sigma() {
        assert_eq!(
            gaussian_mf(0.0, 0.0, 0.0).unwrap_err(),
            AnfisError::SigmaNotPositive { sigma: 0.0 }
        );
        assert!(gaussian_mf(0.0, 0.0, -1.0).is_err());
    }

    #[test]
    fn single_rule_output_is_its_consequent() {
        let model = single_rule_model(vec![2.0, -1.0]);
        for x in [-3.0, 0.0, 0.37, 5.0] {
            let trace = forward(&model, &[x]).unwrap();
            assert_eq!(trace.normalized_firing, vec![1.0]);
            assert!((trace.output - (2.0 * x - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_consequents_give_constant_output() {
        let rules = (0..4)
            .map(|k| Rule {
                premise: vec![Gaussian::new(k as f64 * 0.3, 0.5).unwrap()],
                consequent: vec![0.0, 7.5],
            })
            .collect();
        let model = AnfisModel::new(1, rules, Normalization::identity(1)).unwrap();
        for x in [-1.0, 0.0, 0.4, 2.0] {
            let trace = forward(&model, &[x]).unwrap();
            assert!((trace.output - 7.5).abs() < 1e-12);
        }
    }

    #[test]
    fn two_symmetric_rules_average_their_outputs() {
        // Premises centered at 0 and 1 with equal widths; x = 0.5 fires both
        // equally, so the output is the mean of f1 = 0 and f2 = 1.
        let rules = vec![
            Rule {
                premise: vec![Gaussian::new(0.0, 1.0).unwrap()],
                consequent: vec![0.0, 0.0],
            },
            Rule {
                premise: vec![Gaussian::new(1.0, 1.0).unwrap()],
                consequent: vec![0.0, 1.0],
            },
        ];
        let model = AnfisModel::new(1, rules, Normalization::identity(1)).unwrap();
        let trace = forward(&model, &[0.5]).unwrap();
        let w = (-0.125f64).exp();
        assert!((trace.firing[0] - w).abs() < 1e-15);
        assert!((trace.firing[1] - w).abs() < 1e-15);
        assert!((trace.output - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_input_is_reported() {
        let rules = vec![Rule {
            premise: vec![Gaussian::new(0.0, 1e-3).unwrap()],
            consequent: vec![1.0, 0.0],
        }];
        let model = AnfisModel::new(1, rules, Normalization::identity(1)).unwrap();
        match forward(&model, &[50.0]) {
            Err(AnfisError::DegenerateInput { input }) => assert_eq!(input, vec![50.0]),
            other => panic!("expected degenerate input, got {other:?}"),
        }
    }

    #[test]
    fn arity_is_checked() {
        let model = single_rule_model(vec![1.0, 0.0]);
        assert_eq!(
            forward(&model, &[1.0, 2.0]).unwrap_err(),
            AnfisError::ArityMismatch {
                expected: 1,
                got: 2
            }
        );
    }

    #[test]
    fn model_json_round_trip() {
        let model = single_rule_model(vec![0.25, -0.5]);
        let text = model.to_json();
        let back = AnfisModel::from_json(&text).unwrap();
        assert_eq!(back, model);
        // Canonical field names in the document.
        assert!(text.contains("\"inputs\""));
        assert!(text.contains("\"rules\""));
        assert!(text.contains("\"normalization\""));
        assert!(text.contains("\"c\""));
        assert!(text.contains("\"sigma\""));
    }
}
