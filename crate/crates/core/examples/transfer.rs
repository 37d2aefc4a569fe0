//! Pre-trains on one synthetic scenario and fine-tunes on another at each
//! freeze level.

use metaxfer::aslib::load_scenario;
use metaxfer::dataset::{
    apply_preprocessor, derive_labels, fit_preprocessor, stratified_split, RawMetaDataset,
};
use metaxfer::matrix::Matrix;
use metaxfer::nn::{evaluate, he_init, train, TrainConfig};
use metaxfer::seed::rng_from_seed;
use metaxfer::synthetic::SyntheticScenario;
use metaxfer::transfer::{transplant, FreezeLevel, TransferConfig};

const K: usize = 6;
const HIDDEN: [usize; 2] = [32, 16];

fn prepare(data: &RawMetaDataset) -> metaxfer::Result<(Matrix, Vec<usize>, Matrix, Vec<usize>)> {
    let split = stratified_split(&data.y, 0.2, &mut rng_from_seed(5))?;
    let (xr, yr) = data.select_rows(&split.train_rows);
    let (xt, yt) = data.select_rows(&split.test_rows);
    let pre = fit_preprocessor(&xr, &yr, K)?;
    Ok((
        apply_preprocessor(&pre, &xr)?,
        yr,
        apply_preprocessor(&pre, &xt)?,
        yt,
    ))
}

fn main() -> metaxfer::Result<()> {
    let scratch = tempfile::tempdir().expect("temp dir");
    let load = |spec: SyntheticScenario| -> metaxfer::Result<RawMetaDataset> {
        derive_labels(&load_scenario(spec.write_to(scratch.path())?)?)
    };
    let source = load(SyntheticScenario {
        algorithms: 4,
        seed: 10,
        ..SyntheticScenario::new("source")
    })?;
    let target = load(SyntheticScenario {
        algorithms: 3,
        seed: 11,
        instances: 90,
        ..SyntheticScenario::new("target")
    })?;

    let config = TrainConfig {
        epochs: 100,
        seed: 1,
        ..TrainConfig::default()
    };
    let (sx, sy, _, _) = prepare(&source)?;
    let init = he_init(
        [K, HIDDEN[0], HIDDEN[1], source.n_classes()],
        &mut rng_from_seed(2),
    );
    let (pretrained, _) = train(init, &sx, &sy, &config)?;

    let (tx, ty, vx, vy) = prepare(&target)?;
    let scratch_init = he_init(
        [K, HIDDEN[0], HIDDEN[1], target.n_classes()],
        &mut rng_from_seed(3),
    );
    let (scratch_model, _) = train(scratch_init, &tx, &ty, &config)?;
    let e = evaluate(&scratch_model, &vx, &vy)?;
    println!("Normal  acc {:.3} loss {:.4}", e.accuracy, e.loss);

    for freeze in FreezeLevel::ALL {
        let cfg = TransferConfig {
            freeze,
            seed: 4,
            input_dim: K,
            hidden: HIDDEN,
        };
        let start = transplant(&pretrained, target.n_classes(), &cfg)?;
        let (model, _) = train(start, &tx, &ty, &config)?;
        let e = evaluate(&model, &vx, &vy)?;
        println!("{freeze}     acc {:.3} loss {:.4}", e.accuracy, e.loss);
    }
    Ok(())
}
