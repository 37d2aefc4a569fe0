//! Definitional reference computations. None of these call into the
//! implementation paths they are compared against.

#![allow(clippy::needless_range_loop)]

use metaxfer::nn::{MlpModel, PROB_FLOOR};

/// One-way ANOVA F by definition: every group mean is recomputed by a scan
/// of the whole column.
pub fn anova_f(column: &[f64], y: &[usize]) -> f64 {
    let n = column.len();
    let mut groups: Vec<usize> = y.to_vec();
    groups.sort_unstable();
    groups.dedup();
    let c = groups.len();
    let grand: f64 = column.iter().sum::<f64>() / n as f64;
    let mut between = 0.0;
    let mut within = 0.0;
    for &g in &groups {
        let members: Vec<f64> = (0..n).filter(|&i| y[i] == g).map(|i| column[i]).collect();
        let mean = members.iter().sum::<f64>() / members.len() as f64;
        between += members.len() as f64 * (mean - grand) * (mean - grand);
        for x in &members {
            within += (x - mean) * (x - mean);
        }
    }
    (between / (c - 1) as f64) / (within / (n - c) as f64)
}

/// Mean `-ln p` written as an explicit loop.
pub fn cross_entropy(probs: &[Vec<f64>], y: &[usize]) -> f64 {
    let mut total = 0.0;
    for (row, &label) in probs.iter().zip(y) {
        let p = if row[label] < PROB_FLOOR {
            PROB_FLOOR
        } else {
            row[label]
        };
        total -= p.ln();
    }
    total / y.len() as f64
}

pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mut mean = 0.0;
    for v in values {
        mean += v / n;
    }
    let mut var = 0.0;
    for v in values {
        var += (v - mean) * (v - mean) / n;
    }
    (mean, var.sqrt())
}

/// Forward pass and loss written with plain nested loops over the model's
/// public weights.
pub fn loss(model: &MlpModel, x: &[Vec<f64>], y: &[usize]) -> f64 {
    let mut probs = Vec::new();
    for row in x {
        let mut a = row.clone();
        for (l, layer) in model.layers.iter().enumerate() {
            let mut z = Vec::new();
            for o in 0..layer.outputs() {
                let mut s = layer.bias[o];
                for i in 0..layer.inputs() {
                    s += layer.weights[(o, i)] * a[i];
                }
                z.push(s);
            }
            a = if l < 2 {
                z.into_iter()
                    .map(|v| if v > 0.0 { v } else { 0.0 })
                    .collect()
            } else {
                let m = z.iter().cloned().fold(f64::MIN, f64::max);
                let e: Vec<f64> = z.iter().map(|v| (v - m).exp()).collect();
                let s: f64 = e.iter().sum();
                e.into_iter().map(|v| v / s).collect()
            };
        }
        probs.push(a);
    }
    cross_entropy(&probs, y)
}

/// Mutable access to parameter `idx` in flattened (layer, weights, bias) order.
pub fn param_mut(model: &mut MlpModel, mut idx: usize) -> &mut f64 {
    for layer in model.layers.iter_mut() {
        let nw = layer.weights.as_slice().len();
        if idx < nw {
            return &mut layer.weights.as_mut_slice()[idx];
        }
        idx -= nw;
        if idx < layer.bias.len() {
            return &mut layer.bias[idx];
        }
        idx -= layer.bias.len();
    }
    panic!("parameter index out of range");
}

/// Central finite differences of [`loss`] for every parameter.
pub fn numeric_gradient(model: &MlpModel, x: &[Vec<f64>], y: &[usize], h: f64) -> Vec<f64> {
    let n = model.n_params();
    let mut work = model.clone();
    (0..n)
        .map(|i| {
            let orig = *param_mut(&mut work, i);
            *param_mut(&mut work, i) = orig + h;
            let up = loss(&work, x, y);
            *param_mut(&mut work, i) = orig - h;
            let down = loss(&work, x, y);
            *param_mut(&mut work, i) = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// Sample variance (n - 1 denominator).
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// A small network with nonzero biases plus a random batch.
pub fn random_problem<R: rand::Rng>(rng: &mut R) -> (MlpModel, Vec<Vec<f64>>, Vec<usize>) {
    let k = rng.random_range(1..=6);
    let h1 = rng.random_range(2..=6);
    let h2 = rng.random_range(2..=6);
    let c = rng.random_range(2..=4);
    let n = rng.random_range(1..=8);
    let mut model = metaxfer::nn::he_init([k, h1, h2, c], rng);
    for layer in model.layers.iter_mut() {
        for b in layer.bias.iter_mut() {
            *b = rng.random_range(-0.5..0.5);
        }
    }
    let x = (0..n)
        .map(|_| (0..k).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let y = (0..n).map(|_| rng.random_range(0..c)).collect();
    (model, x, y)
}

/// True when no hidden pre-activation lies within `margin` of zero, so
/// finite differences do not straddle a ReLU kink.
pub fn kink_free(model: &MlpModel, x: &[Vec<f64>], margin: f64) -> bool {
    for row in x {
        let mut a = row.clone();
        for layer in &model.layers[..2] {
            let mut next = Vec::new();
            for o in 0..layer.outputs() {
                let mut z = layer.bias[o];
                for i in 0..layer.inputs() {
                    z += layer.weights[(o, i)] * a[i];
                }
                if z.abs() < margin {
                    return false;
                }
                next.push(z.max(0.0));
            }
            a = next;
        }
    }
    true
}
