//! A dense feed-forward classifier with two ReLU hidden layers and a
//! softmax output, trained with Adam on mean cross-entropy.
//!
//! Weights are stored `(out, in)` and row-major. Batches are `(n, in)`
//! matrices, one sample per row. Everything is `f64`.

mod adam;
mod artifact;
mod train;

pub use adam::{adam_step, AdamState};
pub use artifact::{deserialize_model, serialize_model, write_history, ModelArtifact};
pub use train::{evaluate, train, Evaluation, TrainConfig};

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Probabilities are floored at this value before taking the log.
pub const PROB_FLOOR: f64 = 1e-12;

/// `[input, hidden1, hidden2, classes]`.
pub type Sizes = [usize; 4];

#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    /// `(out, in)`.
    pub weights: Matrix,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            weights: Matrix::zeros(outputs, inputs),
            bias: vec![0.0; outputs],
        }
    }

    /// Weights from `Normal(0, 2 / inputs)`, zero bias.
    pub fn he<R: Rng + ?Sized>(inputs: usize, outputs: usize, rng: &mut R) -> Self {
        let std = (2.0 / inputs as f64).sqrt();
        let normal = Normal::new(0.0, std).expect("He std is finite and positive");
        let data = (0..inputs * outputs).map(|_| normal.sample(rng)).collect();
        Self {
            weights: Matrix::from_vec(outputs, inputs, data),
            bias: vec![0.0; outputs],
        }
    }

    pub fn inputs(&self) -> usize {
        self.weights.cols()
    }

    pub fn outputs(&self) -> usize {
        self.weights.rows()
    }

    fn params(&self) -> impl Iterator<Item = &f64> {
        self.weights.as_slice().iter().chain(&self.bias)
    }

    fn params_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.weights
            .as_mut_slice()
            .iter_mut()
            .chain(self.bias.iter_mut())
    }

    /// `input · Wᵀ + b`.
    fn affine(&self, input: &Matrix) -> Matrix {
        let (n, _) = input.shape();
        let out = self.outputs();
        let mut z = Matrix::zeros(n, out);
        for i in 0..n {
            let x = input.row(i);
            let zi = z.row_mut(i);
            for (o, zo) in zi.iter_mut().enumerate() {
                let w = self.weights.row(o);
                *zo = self.bias[o] + w.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
            }
        }
        z
    }
}

/// Two hidden layers and an output layer. `freeze_mask[l]` marks layer `l`
/// as not trainable.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    pub layers: [Dense; 3],
    pub freeze_mask: [bool; 3],
}

impl MlpModel {
    pub fn sizes(&self) -> Sizes {
        [
            self.layers[0].inputs(),
            self.layers[0].outputs(),
            self.layers[1].outputs(),
            self.layers[2].outputs(),
        ]
    }

    pub fn params(&self) -> impl Iterator<Item = &f64> {
        self.layers.iter().flat_map(Dense::params)
    }

    /// Number of scalar parameters.
    pub fn n_params(&self) -> usize {
        self.params().count()
    }

    /// Shape and finiteness checks.
    pub fn validate(&self) -> Result<()> {
        for l in 0..3 {
            let layer = &self.layers[l];
            if layer.bias.len() != layer.outputs() {
                return Err(Error::ShapeMismatch(format!(
                    "layer {l}: bias has {} entries for {} outputs",
                    layer.bias.len(),
                    layer.outputs()
                )));
            }
            if l > 0 && layer.inputs() != self.layers[l - 1].outputs() {
                return Err(Error::ShapeMismatch(format!(
                    "layer {l} takes {} inputs but layer {} emits {}",
                    layer.inputs(),
                    l - 1,
                    self.layers[l - 1].outputs()
                )));
            }
        }
        if self.sizes().contains(&0) {
            return Err(Error::ShapeMismatch("zero-width layer".into()));
        }
        if !self.params().all(|p| p.is_finite()) {
            return Err(Error::ShapeMismatch("non-finite parameter".into()));
        }
        Ok(())
    }
}

pub fn he_init<R: Rng + ?Sized>(sizes: Sizes, rng: &mut R) -> MlpModel {
    let [k, h1, h2, c] = sizes;
    MlpModel {
        layers: [
            Dense::he(k, h1, rng),
            Dense::he(h1, h2, rng),
            Dense::he(h2, c, rng),
        ],
        freeze_mask: [false; 3],
    }
}

/// Intermediate values kept for the backward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub input: Matrix,
    pub z1: Matrix,
    pub a1: Matrix,
    pub z2: Matrix,
    pub a2: Matrix,
    pub probs: Matrix,
}

fn relu(mut z: Matrix) -> Matrix {
    for v in z.as_mut_slice() {
        *v = v.max(0.0);
    }
    z
}

/// Row-wise softmax with max subtraction.
pub fn softmax(mut logits: Matrix) -> Matrix {
    for i in 0..logits.rows() {
        let row = logits.row_mut(i);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            sum += *v;
        }
        for v in row.iter_mut() {
            *v /= sum;
        }
    }
    logits
}

/// Panics if `x` does not have `sizes()[0]` columns.
pub fn forward(model: &MlpModel, x: &Matrix) -> ForwardCache {
    assert_eq!(x.cols(), model.layers[0].inputs(), "input width mismatch");
    let z1 = model.layers[0].affine(x);
    let a1 = relu(z1.clone());
    let z2 = model.layers[1].affine(&a1);
    let a2 = relu(z2.clone());
    let probs = softmax(model.layers[2].affine(&a2));
    ForwardCache {
        input: x.clone(),
        z1,
        a1,
        z2,
        a2,
        probs,
    }
}

/// Mean of `-ln p[true class]`.
pub fn cross_entropy(probs: &Matrix, y: &[usize]) -> f64 {
    assert_eq!(probs.rows(), y.len(), "label count mismatch");
    let total: f64 = y
        .iter()
        .enumerate()
        .map(|(i, &c)| -probs[(i, c)].max(PROB_FLOOR).ln())
        .sum();
    total / y.len() as f64
}

/// Parameter-shaped gradients.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradients {
    pub layers: [Dense; 3],
}

impl Gradients {
    pub fn zeros_like(model: &MlpModel) -> Self {
        let [k, h1, h2, c] = model.sizes();
        Self {
            layers: [
                Dense::zeros(k, h1),
                Dense::zeros(h1, h2),
                Dense::zeros(h2, c),
            ],
        }
    }
}

fn accumulate_layer(grad: &mut Dense, delta: &Matrix, input: &Matrix) {
    for i in 0..delta.rows() {
        let a = input.row(i);
        for (o, &d) in delta.row(i).iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            grad.bias[o] += d;
            for (g, &x) in grad.weights.row_mut(o).iter_mut().zip(a) {
                *g += d * x;
            }
        }
    }
}

/// `delta · W`, masked by `z > 0`.
fn propagate(delta: &Matrix, layer: &Dense, z: &Matrix) -> Matrix {
    let mut out = Matrix::zeros(delta.rows(), layer.inputs());
    for i in 0..delta.rows() {
        let oi = out.row_mut(i);
        for (o, &d) in delta.row(i).iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            for (v, &w) in oi.iter_mut().zip(layer.weights.row(o)) {
                *v += d * w;
            }
        }
        for (v, &zv) in oi.iter_mut().zip(z.row(i)) {
            if zv <= 0.0 {
                *v = 0.0;
            }
        }
    }
    out
}

/// Gradients of the mean cross-entropy. Entries for frozen layers are zero.
pub fn backward(model: &MlpModel, cache: &ForwardCache, y: &[usize]) -> Gradients {
    let n = y.len();
    assert_eq!(cache.probs.rows(), n, "label count mismatch");
    let scale = 1.0 / n as f64;

    let mut delta3 = cache.probs.clone();
    for (i, &c) in y.iter().enumerate() {
        delta3[(i, c)] -= 1.0;
    }
    for v in delta3.as_mut_slice() {
        *v *= scale;
    }
    let delta2 = propagate(&delta3, &model.layers[2], &cache.z2);
    let delta1 = propagate(&delta2, &model.layers[1], &cache.z1);

    let mut grads = Gradients::zeros_like(model);
    accumulate_layer(&mut grads.layers[2], &delta3, &cache.a2);
    accumulate_layer(&mut grads.layers[1], &delta2, &cache.a1);
    accumulate_layer(&mut grads.layers[0], &delta1, &cache.input);

    for (g, &frozen) in grads.layers.iter_mut().zip(&model.freeze_mask) {
        if frozen {
            g.params_mut().for_each(|p| *p = 0.0);
        }
    }
    grads
}

/// Loss and gradients for one batch.
pub fn loss_and_gradients(model: &MlpModel, x: &Matrix, y: &[usize]) -> (f64, Gradients) {
    let cache = forward(model, x);
    let loss = cross_entropy(&cache.probs, y);
    (loss, backward(model, &cache, y))
}

/// Index of the largest entry in each row; ties go to the smaller index.
pub fn argmax_rows(m: &Matrix) -> Vec<usize> {
    (0..m.rows())
        .map(|i| {
            let row = m.row(i);
            let mut best = 0;
            for (j, &v) in row.iter().enumerate().skip(1) {
                if v > row[best] {
                    best = j;
                }
            }
            best
        })
        .collect()
}

pub fn predict(model: &MlpModel, x: &Matrix) -> Vec<usize> {
    argmax_rows(&forward(model, x).probs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    #[test]
    fn he_biases_zero_and_deterministic() {
        let a = he_init([4, 8, 8, 3], &mut rng_from_seed(3));
        let b = he_init([4, 8, 8, 3], &mut rng_from_seed(3));
        assert_eq!(a, b);
        assert!(a.layers.iter().all(|l| l.bias.iter().all(|&v| v == 0.0)));
        assert_eq!(a.freeze_mask, [false; 3]);
        assert_eq!(a.sizes(), [4, 8, 8, 3]);
        a.validate().unwrap();
    }

    #[test]
    fn cross_entropy_examples() {
        let one_hot = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(cross_entropy(&one_hot, &[0, 1]) <= 1e-11);
        let uniform = Matrix::from_vec(3, 4, vec![0.25; 12]);
        assert!((cross_entropy(&uniform, &[0, 3, 2]) - 4f64.ln()).abs() < 1e-15);
        // Floored: p = 0 costs -ln(1e-12).
        assert!((cross_entropy(&one_hot, &[1, 1]) - 0.5 * (-PROB_FLOOR.ln())).abs() < 1e-12);
    }

    #[test]
    fn softmax_handles_large_logits() {
        let p = softmax(Matrix::from_rows(&[vec![1000.0, 1000.0, -1000.0]]).unwrap());
        assert_eq!(p.row(0), &[0.5, 0.5, 0.0]);
    }

    #[test]
    fn argmax_ties_to_smallest() {
        let m = Matrix::from_rows(&[vec![0.4, 0.4, 0.2], vec![0.1, 0.3, 0.3]]).unwrap();
        assert_eq!(argmax_rows(&m), vec![0, 1]);
    }

    #[test]
    fn frozen_gradients_are_zero() {
        let mut m = he_init([3, 4, 4, 2], &mut rng_from_seed(5));
        m.freeze_mask = [true, false, true];
        let x = Matrix::from_rows(&[vec![0.1, 0.7, 0.3], vec![0.9, 0.2, 0.5]]).unwrap();
        let (_, g) = loss_and_gradients(&m, &x, &[0, 1]);
        assert!(g.layers[0].params().all(|&v| v == 0.0));
        assert!(g.layers[2].params().all(|&v| v == 0.0));
        assert!(g.layers[1].params().any(|&v| v != 0.0));
    }

    #[test]
    fn validate_rejects_bad_shapes() {
        let mut m = he_init([3, 4, 4, 2], &mut rng_from_seed(5));
        m.layers[1] = Dense::zeros(5, 4);
        assert!(matches!(m.validate(), Err(Error::ShapeMismatch(_))));
        let mut m = he_init([3, 4, 4, 2], &mut rng_from_seed(5));
        m.layers[2].bias[0] = f64::NAN;
        assert!(m.validate().is_err());
    }
}
