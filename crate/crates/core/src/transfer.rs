//! Reusing a source model's hidden layers on a target meta-dataset.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::nn::{Dense, MlpModel};
use crate::seed::rng_from_seed;

/// How many leading hidden layers stay fixed while training on the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum FreezeLevel {
    /// Warm start: copy both hidden layers, train everything.
    None,
    /// First hidden layer frozen.
    First,
    /// Both hidden layers frozen.
    Both,
}

impl FreezeLevel {
    pub const ALL: [FreezeLevel; 3] = [FreezeLevel::None, FreezeLevel::First, FreezeLevel::Both];

    pub fn frozen_hidden_layers(self) -> u8 {
        self as u8
    }

    /// The output layer is never frozen.
    pub fn mask(self) -> [bool; 3] {
        match self {
            FreezeLevel::None => [false, false, false],
            FreezeLevel::First => [true, false, false],
            FreezeLevel::Both => [true, true, false],
        }
    }

    /// `0HL`, `1HL` or `2HL`.
    pub fn label(self) -> &'static str {
        match self {
            FreezeLevel::None => "0HL",
            FreezeLevel::First => "1HL",
            FreezeLevel::Both => "2HL",
        }
    }
}

impl TryFrom<u8> for FreezeLevel {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            0 => Ok(FreezeLevel::None),
            1 => Ok(FreezeLevel::First),
            2 => Ok(FreezeLevel::Both),
            _ => Err(Error::InvalidConfig(format!(
                "frozen hidden layers must be 0, 1 or 2, got {n}"
            ))),
        }
    }
}

impl From<FreezeLevel> for u8 {
    fn from(level: FreezeLevel) -> u8 {
        level.frozen_hidden_layers()
    }
}

impl FromStr for FreezeLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let n: u8 = s
            .trim()
            .trim_end_matches("HL")
            .trim_end_matches("hl")
            .parse()
            .map_err(|_| Error::InvalidConfig(format!("bad freeze level `{s}`")))?;
        FreezeLevel::try_from(n)
    }
}

impl fmt::Display for FreezeLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferConfig {
    pub freeze: FreezeLevel,
    /// Seeds the fresh output layer.
    pub seed: u64,
    /// Target input width (the shared K).
    pub input_dim: usize,
    pub hidden: [usize; 2],
}

/// Copies the hidden layers of `source`, draws a new He-initialized output
/// layer with `target_classes` rows and applies the freeze mask. `source`
/// is left untouched.
pub fn transplant(
    source: &MlpModel,
    target_classes: usize,
    cfg: &TransferConfig,
) -> Result<MlpModel> {
    let [k, h1, h2, _] = source.sizes();
    if k != cfg.input_dim {
        return Err(Error::ShapeMismatch(format!(
            "source takes {k} inputs, target has {}",
            cfg.input_dim
        )));
    }
    if [h1, h2] != cfg.hidden {
        return Err(Error::ShapeMismatch(format!(
            "source hidden sizes {:?} differ from target architecture {:?}",
            [h1, h2],
            cfg.hidden
        )));
    }
    if target_classes == 0 {
        return Err(Error::ShapeMismatch("target has no classes".into()));
    }
    let mut rng = rng_from_seed(cfg.seed);
    Ok(MlpModel {
        layers: [
            source.layers[0].clone(),
            source.layers[1].clone(),
            Dense::he(h2, target_classes, &mut rng),
        ],
        freeze_mask: cfg.freeze.mask(),
    })
}
