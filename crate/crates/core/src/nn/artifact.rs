//! JSON model artifact: `{sizes, freeze_mask, layers: [{W, b}], config_echo}`.
//!
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! save/load cycle preserves every weight bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Dense, MlpModel, Sizes, TrainConfig};
use crate::error::{Error, IoContext, Result};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerArtifact {
    #[serde(rename = "W")]
    pub weights: Vec<Vec<f64>>,
    #[serde(rename = "b")]
    pub bias: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelArtifact {
    pub sizes: Sizes,
    pub freeze_mask: [bool; 3],
    pub layers: Vec<LayerArtifact>,
    pub config_echo: Option<TrainConfig>,
}

impl ModelArtifact {
    pub fn from_model(model: &MlpModel, config: Option<&TrainConfig>) -> Self {
        Self {
            sizes: model.sizes(),
            freeze_mask: model.freeze_mask,
            layers: model
                .layers
                .iter()
                .map(|l| LayerArtifact {
                    weights: l.weights.to_rows(),
                    bias: l.bias.clone(),
                })
                .collect(),
            config_echo: config.cloned(),
        }
    }

    pub fn into_model(self) -> Result<MlpModel> {
        let layers: Vec<Dense> = self
            .layers
            .into_iter()
            .map(|l| {
                Ok(Dense {
                    weights: Matrix::from_rows(&l.weights)
                        .ok_or_else(|| Error::ShapeMismatch("ragged weight matrix".into()))?,
                    bias: l.bias,
                })
            })
            .collect::<Result<_>>()?;
        let layers: [Dense; 3] = layers.try_into().map_err(|v: Vec<Dense>| {
            Error::ShapeMismatch(format!("{} layers, expected 3", v.len()))
        })?;
        let model = MlpModel {
            layers,
            freeze_mask: self.freeze_mask,
        };
        model.validate()?;
        if model.sizes() != self.sizes {
            return Err(Error::ShapeMismatch(format!(
                "declared sizes {:?} but layers have {:?}",
                self.sizes,
                model.sizes()
            )));
        }
        Ok(model)
    }
}

pub fn serialize_model(model: &MlpModel, config: Option<&TrainConfig>) -> Result<String> {
    Ok(serde_json::to_string_pretty(&ModelArtifact::from_model(
        model, config,
    ))?)
}

pub fn deserialize_model(text: &str) -> Result<(MlpModel, Option<TrainConfig>)> {
    let artifact: ModelArtifact = serde_json::from_str(text)?;
    let config = artifact.config_echo.clone();
    Ok((artifact.into_model()?, config))
}

/// `epoch,loss` CSV, epochs counted from 1.
pub fn write_history(path: &Path, history: &[f64]) -> Result<()> {
    let mut out = String::from("epoch,loss\n");
    for (i, loss) in history.iter().enumerate() {
        writeln!(out, "{},{loss}", i + 1).expect("writing to a String");
    }
    fs::write(path, out).at(path)
}
