//! Plain-text scene definitions.
//!
//! A scene file is `key = value` lines with `#` comments. Heights and
//! distances are metres, angles degrees, powers dBm:
//!
//! ```text
//! tx_height_m = 4.06
//! rx_height_m = 2.0
//! separation_m = 10.0
//! relative_permittivity = 5.0
//! alpha_db_per_m = 0.4
//! canopy_m = 2.0:6.0, 7.0:8.5
//! hpbw_deg = 7.0
//! sidelobe_rel_db = -30
//! angular_step_deg = 10.0
//! tx_power_dbm = -7.9
//! tx_gain_dbi = 27.0
//! rx_gain_dbi = 27.0
//! frequency_hz = 73.5e9
//! scenario = ground_reflection
//! fresnel = standard
//! ```
//!
//! Every key except `canopy_m`, `sidelobe_rel_db` and `fresnel` is required.

use crate::error::{Error, Result};
use crate::geometry::{CanopySpan, LinkGeometry};
use crate::pdp::Scenario;
use crate::propagation::LinkBudgetParams;
use crate::reflection::{FresnelForm, GroundMaterial};
use crate::sounder::{ConeAntenna, SweepSynthesis};
use std::collections::HashMap;
use std::path::Path;

/// A parsed scene, convertible into a sweep synthesis.
#[derive(Debug, Clone)]
pub struct SceneConfig {
    pub geometry: LinkGeometry,
    pub material: GroundMaterial,
    pub alpha_db_per_m: f64,
    pub canopy: Vec<CanopySpan>,
    pub link: LinkBudgetParams,
    pub antenna: ConeAntenna,
    pub angular_step_deg: f64,
    pub scenario: Scenario,
    pub fresnel_form: FresnelForm,
}

impl SceneConfig {
    pub fn into_synthesis(self) -> SweepSynthesis {
        SweepSynthesis {
            geometry: self.geometry,
            canopy: self.canopy,
            material: self.material,
            alpha_db_per_m: self.alpha_db_per_m,
            link: self.link,
            antenna: self.antenna,
            angular_step_deg: self.angular_step_deg,
            scenario: self.scenario,
            fresnel_form: self.fresnel_form,
        }
    }
}

/// Parse scene text.
pub fn parse_scene(text: &str) -> Result<SceneConfig> {
    let mut map: HashMap<String, (usize, String)> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::parse(lineno, format!("expected `key = value`, got {line:?}")));
        };
        map.insert(
            key.trim().to_string(),
            (lineno, value.trim().to_string()),
        );
    }

    let number = |key: &str| -> Result<f64> {
        let (lineno, value) = map
            .get(key)
            .ok_or_else(|| Error::InvalidScene(format!("missing required key {key:?}")))?;
        value
            .parse()
            .map_err(|_| Error::parse(*lineno, format!("bad number for {key}: {value:?}")))
    };

    let canopy = match map.get("canopy_m") {
        None => Vec::new(),
        Some((lineno, value)) if value.is_empty() => {
            return Err(Error::parse(*lineno, "canopy_m must list start:end spans"))
        }
        Some((lineno, value)) => {
            let mut spans = Vec::new();
            for part in value.split(',') {
                let Some((a, b)) = part.trim().split_once(':') else {
                    return Err(Error::parse(
                        *lineno,
                        format!("canopy span must be start:end, got {part:?}"),
                    ));
                };
                let start: f64 = a.trim().parse().map_err(|_| {
                    Error::parse(*lineno, format!("bad canopy start {a:?}"))
                })?;
                let end: f64 = b.trim().parse().map_err(|_| {
                    Error::parse(*lineno, format!("bad canopy end {b:?}"))
                })?;
                spans.push(CanopySpan::new(start, end)?);
            }
            spans
        }
    };

    let scenario = {
        let (lineno, value) = map
            .get("scenario")
            .ok_or_else(|| Error::InvalidScene("missing required key \"scenario\"".into()))?;
        value
            .parse::<Scenario>()
            .map_err(|_| Error::parse(*lineno, format!("bad scenario {value:?}")))?
    };

    let fresnel_form = match map.get("fresnel") {
        None => FresnelForm::Standard,
        Some((_, v)) if v == "standard" || v == "textbook" => FresnelForm::Standard,
        Some((_, v)) if v == "simplified" || v == "paper" => FresnelForm::Simplified,
        Some((lineno, v)) => {
            return Err(Error::parse(
                *lineno,
                format!("fresnel must be standard or simplified, got {v:?}"),
            ))
        }
    };

    let antenna = match map.get("sidelobe_rel_db") {
        None => ConeAntenna::new(number("hpbw_deg")?),
        Some(_) => ConeAntenna::with_sidelobe(number("hpbw_deg")?, number("sidelobe_rel_db")?),
    };

    Ok(SceneConfig {
        geometry: LinkGeometry::new(
            number("tx_height_m")?,
            number("rx_height_m")?,
            number("separation_m")?,
        )?,
        material: GroundMaterial::new(number("relative_permittivity")?)?,
        alpha_db_per_m: number("alpha_db_per_m")?,
        canopy,
        link: LinkBudgetParams::new(
            number("tx_power_dbm")?,
            number("tx_gain_dbi")?,
            number("rx_gain_dbi")?,
            number("frequency_hz")?,
        )?,
        antenna,
        angular_step_deg: number("angular_step_deg")?,
        scenario,
        fresnel_form,
    })
}

/// Read and parse a scene file.
pub fn read_scene(path: impl AsRef<Path>) -> Result<SceneConfig> {
    parse_scene(&std::fs::read_to_string(path)?)
}
