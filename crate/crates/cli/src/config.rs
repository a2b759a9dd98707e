//! TOML configuration for the reflection-group curve.
//!
//! ```toml
//! s0 = 2.0
//! s1 = 0.0
//! [[spheres]]
//! center = [0.0, 0.0, 1.0]  # Re ξ, Im ξ, v
//! radius = 1.0
//! ```

use cxhyp::boundary::HeisSphere;
use cxhyp::deformations::QFCurveConfig;
use cxhyp::{Error, Result, C64};
use serde::Deserialize;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    s0: f64,
    s1: f64,
    spheres: Vec<RawSphere>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSphere {
    center: [f64; 3],
    radius: f64,
}

pub fn load(text: &str) -> Result<QFCurveConfig> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    let spheres = raw
        .spheres
        .iter()
        .map(|s| HeisSphere::new((C64::new(s.center[0], s.center[1]), s.center[2]), s.radius))
        .collect::<Result<Vec<_>>>()
        .map_err(|e| Error::Config(e.to_string()))?;
    Ok(QFCurveConfig {
        s0: raw.s0,
        s1: raw.s1,
        spheres,
    })
}
