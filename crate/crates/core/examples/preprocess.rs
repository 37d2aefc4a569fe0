//! Stratified split, train-only imputation/scaling and Select-K-Best.
//!
//!     cargo run --example preprocess -- [K]

use metaxfer::aslib::load_scenario;
use metaxfer::dataset::{apply_preprocessor, derive_labels, fit_preprocessor, stratified_split};
use metaxfer::seed::rng_from_seed;
use metaxfer::synthetic::SyntheticScenario;

fn main() -> metaxfer::Result<()> {
    let k: usize = std::env::args()
        .nth(1)
        .map_or(4, |s| s.parse().expect("K must be an integer"));
    let scratch = tempfile::tempdir().expect("temp dir");
    let spec = SyntheticScenario::new("demo");
    let data = derive_labels(&load_scenario(spec.write_to(scratch.path())?)?)?;

    let split = stratified_split(&data.y, 0.2, &mut rng_from_seed(7))?;
    let (x_train, y_train) = data.select_rows(&split.train_rows);
    let (x_test, _) = data.select_rows(&split.test_rows);
    println!("{} train / {} test rows", x_train.len(), x_test.len());

    let pre = fit_preprocessor(&x_train, &y_train, k)?;
    for (j, name) in data.feature_names.iter().enumerate() {
        let mark = if pre.selected_indices.contains(&j) {
            "*"
        } else {
            " "
        };
        println!(
            "{mark} {name:<12} F = {:>12.4}  range [{:.3}, {:.3}]  median {:.3}",
            pre.f_scores[j], pre.min[j], pre.max[j], pre.median[j]
        );
    }
    let test = apply_preprocessor(&pre, &x_test)?;
    println!(
        "test matrix {:?}, first row {:?}",
        test.shape(),
        test.row(0)
    );
    Ok(())
}
