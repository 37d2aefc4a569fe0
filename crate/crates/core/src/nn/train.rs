use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{adam_step, argmax_rows, backward, cross_entropy, forward, AdamState, MlpModel};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    /// Seeds minibatch shuffling.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            epochs: 200,
            batch_size: 32,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return bad("learning_rate must be positive");
        }
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if !(0.0..1.0).contains(&self.beta1) || !(0.0..1.0).contains(&self.beta2) {
            return bad("Adam betas must lie in [0, 1)");
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return bad("epsilon must be positive");
        }
        Ok(())
    }
}

/// Minibatch Adam training. Epoch `e` shuffles with stream `e` of the
/// generator seeded by `config.seed`; the last partial batch is kept.
///
/// Returns the trained model and the sample-weighted mean minibatch loss of
/// each epoch.
pub fn train(
    mut model: MlpModel,
    x: &Matrix,
    y: &[usize],
    config: &TrainConfig,
) -> Result<(MlpModel, Vec<f64>)> {
    config.validate()?;
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if x.cols() != model.sizes()[0] {
        return Err(Error::DimensionMismatch {
            expected: model.sizes()[0],
            got: x.cols(),
        });
    }
    let classes = model.sizes()[3];
    if let Some(&c) = y.iter().find(|&&c| c >= classes) {
        return Err(Error::ShapeMismatch(format!(
            "label {c} out of range for {classes} output classes"
        )));
    }
    if y.is_empty() {
        return Err(Error::EmptyCollection);
    }

    let mut state = AdamState::new(&model);
    let mut order: Vec<usize> = (0..y.len()).collect();
    let mut history = Vec::with_capacity(config.epochs);
    for epoch in 0..config.epochs {
        let mut rng = rng_from_seed(config.seed);
        rng.set_stream(epoch as u64);
        order.sort_unstable();
        order.shuffle(&mut rng);

        let mut epoch_loss = 0.0;
        for batch in order.chunks(config.batch_size) {
            let xb = x.select_rows(batch);
            let yb: Vec<usize> = batch.iter().map(|&i| y[i]).collect();
            let cache = forward(&model, &xb);
            epoch_loss += cross_entropy(&cache.probs, &yb) * batch.len() as f64;
            let grads = backward(&model, &cache, &yb);
            adam_step(&mut model, &grads, &mut state, config);
        }
        history.push(epoch_loss / y.len() as f64);
    }
    Ok((model, history))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub accuracy: f64,
    pub loss: f64,
}

pub fn evaluate(model: &MlpModel, x: &Matrix, y: &[usize]) -> Result<Evaluation> {
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            got: y.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::EmptyCollection);
    }
    let probs = forward(model, x).probs;
    let hits = argmax_rows(&probs)
        .iter()
        .zip(y)
        .filter(|(p, t)| p == t)
        .count();
    Ok(Evaluation {
        accuracy: hits as f64 / y.len() as f64,
        loss: cross_entropy(&probs, y),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::he_init;

    fn blobs() -> (Matrix, Vec<usize>) {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..60 {
            let t = i as f64 / 60.0;
            let c = i % 3;
            let mut r = vec![0.1 * t; 3];
            r[c] += 0.8;
            rows.push(r);
            y.push(c);
        }
        (Matrix::from_rows(&rows).unwrap(), y)
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        for bad in [
            TrainConfig {
                learning_rate: 0.0,
                ..Default::default()
            },
            TrainConfig {
                epochs: 0,
                ..Default::default()
            },
            TrainConfig {
                batch_size: 0,
                ..Default::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
        }
    }

    #[test]
    fn training_is_deterministic_and_learns() {
        let (x, y) = blobs();
        let init = he_init([3, 8, 8, 3], &mut crate::seed::rng_from_seed(1));
        let config = TrainConfig {
            epochs: 100,
            batch_size: 7,
            seed: 9,
            ..Default::default()
        };
        let before = evaluate(&init, &x, &y).unwrap();
        let (a, hist_a) = train(init.clone(), &x, &y, &config).unwrap();
        let (b, hist_b) = train(init, &x, &y, &config).unwrap();
        assert_eq!(a, b);
        assert_eq!(hist_a, hist_b);
        assert_eq!(hist_a.len(), 100);
        let after = evaluate(&a, &x, &y).unwrap();
        assert!(after.loss < before.loss);
        assert!(after.accuracy >= 0.95, "{after:?}");
    }

    #[test]
    fn rejects_bad_inputs() {
        let (x, y) = blobs();
        let init = he_init([2, 4, 4, 3], &mut crate::seed::rng_from_seed(1));
        assert!(train(init, &x, &y, &TrainConfig::default()).is_err());
        let init = he_init([3, 4, 4, 2], &mut crate::seed::rng_from_seed(1));
        assert!(matches!(
            train(init, &x, &y, &TrainConfig::default()),
            Err(Error::ShapeMismatch(_))
        ));
    }
}
