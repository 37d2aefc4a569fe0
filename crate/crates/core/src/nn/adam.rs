use super::{Dense, Gradients, MlpModel, TrainConfig};

/// First and second moment estimates for every parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub first: [Dense; 3],
    pub second: [Dense; 3],
    pub t: u64,
}

impl AdamState {
    pub fn new(model: &MlpModel) -> Self {
        let zeros = Gradients::zeros_like(model).layers;
        Self {
            first: zeros.clone(),
            second: zeros,
            t: 0,
        }
    }
}

/// One bias-corrected Adam update. Frozen layers are skipped entirely, so
/// their parameters and moment estimates never change.
pub fn adam_step(
    model: &mut MlpModel,
    grads: &Gradients,
    state: &mut AdamState,
    config: &TrainConfig,
) {
    state.t += 1;
    let t = state.t as i32;
    let (b1, b2) = (config.beta1, config.beta2);
    let correction1 = 1.0 - b1.powi(t);
    let correction2 = 1.0 - b2.powi(t);
    let lr = config.learning_rate;
    let eps = config.epsilon;

    for l in 0..3 {
        if model.freeze_mask[l] {
            continue;
        }
        let params = model.layers[l].params_mut();
        let g = grads.layers[l].params();
        let m = state.first[l].params_mut();
        let v = state.second[l].params_mut();
        for (((p, &g), m), v) in params.zip(g).zip(m).zip(v) {
            *m = b1 * *m + (1.0 - b1) * g;
            *v = b2 * *v + (1.0 - b2) * g * g;
            let m_hat = *m / correction1;
            let v_hat = *v / correction2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
}
