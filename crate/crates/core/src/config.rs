//! Config file parsing (TOML, fail-closed).
//!
//! Three-layer schema: top-level `length` and `actuation`, tables
//! `layer.stiff`, `layer.core`, `layer.piezo`, and `gains`. Multilayer
//! schema replaces the layer tables with arrays `layer.odd` / `layer.even`
//! and the gains table carries the vector `s`. Unknown keys are errors.

use std::path::Path;

use serde::Deserialize;

use crate::error::Result;
use crate::model::{
    Actuation, BeamConfig, CoreLayer, ElasticLayer, FeedbackGains, LayerStack, PiezoLayer,
};
use crate::multilayer::{EvenLayerParams, MultilayerConfig, MultilayerGains, OddLayerParams};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBeamFile {
    length: f64,
    #[serde(default)]
    actuation: Option<RawActuation>,
    layer: RawLayers,
    #[serde(default)]
    gains: Option<RawGains>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum RawActuation {
    Charge,
    Voltage,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayers {
    stiff: RawElastic,
    core: RawCore,
    piezo: RawPiezo,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawElastic {
    rho: f64,
    h: f64,
    alpha: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCore {
    rho: f64,
    h: f64,
    alpha: f64,
    g: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiezo {
    rho: f64,
    h: f64,
    alpha: f64,
    gamma: f64,
    #[serde(default = "one")]
    eps1: f64,
    #[serde(default = "one")]
    eps3: f64,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGains {
    #[serde(default)]
    s1: f64,
    #[serde(default)]
    s3: f64,
    #[serde(default)]
    k1: f64,
    #[serde(default)]
    k2: f64,
}

fn one() -> f64 {
    1.0
}

/// Parses and validates a three-layer beam config from TOML text.
pub fn parse_beam_config(text: &str) -> Result<BeamConfig> {
    let raw: RawBeamFile = toml::from_str(text)?;
    let actuation = match raw.actuation {
        Some(RawActuation::Voltage) => Actuation::Voltage,
        _ => Actuation::Charge,
    };
    let gains = raw.gains.unwrap_or_default();
    BeamConfig::new(
        raw.length,
        LayerStack {
            stiff: ElasticLayer {
                rho: raw.layer.stiff.rho,
                h: raw.layer.stiff.h,
                alpha: raw.layer.stiff.alpha,
            },
            core: CoreLayer {
                rho: raw.layer.core.rho,
                h: raw.layer.core.h,
                alpha: raw.layer.core.alpha,
                g: raw.layer.core.g,
            },
            piezo: PiezoLayer {
                rho: raw.layer.piezo.rho,
                h: raw.layer.piezo.h,
                alpha: raw.layer.piezo.alpha,
                gamma: raw.layer.piezo.gamma,
                eps1: raw.layer.piezo.eps1,
                eps3: raw.layer.piezo.eps3,
            },
        },
        FeedbackGains {
            s1: gains.s1,
            s3: gains.s3,
            k1: gains.k1,
            k2: gains.k2,
        },
        actuation,
    )
}

/// Loads a three-layer beam config from a file.
pub fn load_beam_config(path: &Path) -> Result<BeamConfig> {
    parse_beam_config(&std::fs::read_to_string(path)?)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMultiFile {
    length: f64,
    layer: RawMultiLayers,
    gains: RawMultiGains,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMultiLayers {
    odd: Vec<RawOdd>,
    even: Vec<RawEven>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOdd {
    rho: f64,
    h: f64,
    alpha: f64,
    #[serde(default)]
    gamma: f64,
    #[serde(default = "one")]
    eps1: f64,
    #[serde(default = "one")]
    eps3: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEven {
    h: f64,
    g: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMultiGains {
    s: Vec<f64>,
    #[serde(default)]
    k1: f64,
    #[serde(default)]
    k2: f64,
}

/// Parses and validates a multilayer config from TOML text.
pub fn parse_multilayer_config(text: &str) -> Result<MultilayerConfig> {
    let raw: RawMultiFile = toml::from_str(text)?;
    MultilayerConfig::new(
        raw.length,
        raw.layer
            .odd
            .iter()
            .map(|l| OddLayerParams {
                rho: l.rho,
                h: l.h,
                alpha: l.alpha,
                gamma: l.gamma,
                eps1: l.eps1,
                eps3: l.eps3,
            })
            .collect(),
        raw.layer
            .even
            .iter()
            .map(|l| EvenLayerParams { h: l.h, g: l.g })
            .collect(),
        MultilayerGains {
            s: raw.gains.s,
            k1: raw.gains.k1,
            k2: raw.gains.k2,
        },
    )
}

/// Loads a multilayer config from a file.
pub fn load_multilayer_config(path: &Path) -> Result<MultilayerConfig> {
    parse_multilayer_config(&std::fs::read_to_string(path)?)
}

/// TOML text of the reference three-layer configuration.
pub fn reference_config_toml() -> String {
    r#"length = 1.0
actuation = "charge"

[layer.stiff]
rho = 1.0
h = 0.1
alpha = 1.0

[layer.core]
rho = 1.0
h = 0.05
alpha = 1.0
g = 1.0

[layer.piezo]
rho = 1.0
h = 0.1
alpha = 1.0
gamma = 0.1
eps1 = 1.0
eps3 = 1.0

[gains]
s1 = 0.5
s3 = 0.5
k1 = 0.5
k2 = 0.5
"#
    .to_string()
}
