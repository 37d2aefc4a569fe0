//! Trains the two-hidden-layer network on a synthetic meta-dataset and
//! saves the model artifact.
//!
//!     cargo run --example train_mlp -- [OUT_JSON]

use metaxfer::aslib::load_scenario;
use metaxfer::dataset::{apply_preprocessor, derive_labels, fit_preprocessor, stratified_split};
use metaxfer::nn::{evaluate, he_init, serialize_model, train, TrainConfig};
use metaxfer::seed::rng_from_seed;
use metaxfer::synthetic::SyntheticScenario;

fn main() -> metaxfer::Result<()> {
    let scratch = tempfile::tempdir().expect("temp dir");
    let spec = SyntheticScenario::new("demo");
    let data = derive_labels(&load_scenario(spec.write_to(scratch.path())?)?)?;
    let split = stratified_split(&data.y, 0.2, &mut rng_from_seed(1))?;
    let (xr, yr) = data.select_rows(&split.train_rows);
    let (xt, yt) = data.select_rows(&split.test_rows);
    let pre = fit_preprocessor(&xr, &yr, data.n_features())?;
    let (x_train, x_test) = (
        apply_preprocessor(&pre, &xr)?,
        apply_preprocessor(&pre, &xt)?,
    );

    let config = TrainConfig {
        seed: 2,
        ..TrainConfig::default()
    };
    let init = he_init([pre.k(), 64, 32, data.n_classes()], &mut rng_from_seed(3));
    let (model, history) = train(init, &x_train, &yr, &config)?;
    for (epoch, loss) in history.iter().enumerate().step_by(25) {
        println!("epoch {epoch:>3}  loss {loss:.4}");
    }
    let tr = evaluate(&model, &x_train, &yr)?;
    let te = evaluate(&model, &x_test, &yt)?;
    println!("train acc {:.3} loss {:.4}", tr.accuracy, tr.loss);
    println!("test  acc {:.3} loss {:.4}", te.accuracy, te.loss);

    if let Some(path) = std::env::args().nth(1) {
        std::fs::write(&path, serialize_model(&model, Some(&config))?).expect("write model");
        println!("model written to {path}");
    }
    Ok(())
}
