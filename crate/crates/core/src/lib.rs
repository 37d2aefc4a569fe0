//! Meta-level transfer learning for algorithm selection.
//!
//! The pipeline reads ASlib scenarios, labels each problem instance with
//! its best algorithm, scales and selects features, and trains a small
//! feed-forward classifier (two ReLU hidden layers, softmax output, He
//! initialization, Adam). Hidden layers trained on one scenario can be
//! transplanted into a model for another, with zero, one or both hidden
//! layers frozen, and every configuration is run over seeded repetitions.
//!
//! | module | role |
//! |---|---|
//! | [`arff`] | ARFF reader/writer |
//! | [`aslib`] | scenario loading, fetching and caching |
//! | [`dataset`] | labels, imputation, scaling, ANOVA-F selection, stratified split |
//! | [`nn`] | the network, backpropagation, Adam, model artifacts |
//! | [`transfer`] | hidden-layer transplant and freeze levels |
//! | [`experiment`] | repeated cells, the results grid, rendering |
//! | [`synthetic`] | separable ASlib-format fixtures |
//! | [`cli`] | the `metaxfer` command line |
//!
//! The `examples/` directory has one runnable program per capability.

pub mod arff;
pub mod aslib;
pub mod cli;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod matrix;
pub mod nn;
pub mod reference;
pub mod seed;
pub mod synthetic;
pub mod transfer;

pub use error::{Error, Result};
pub use matrix::Matrix;
