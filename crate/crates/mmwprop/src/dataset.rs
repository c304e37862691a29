//! Bundled reference data from the 73 GHz measurement campaign, plus
//! validation of user-supplied sweep files.
//!
//! The tables ship as versioned delimited text compiled into the binary and
//! guarded by a checksum, so every downstream computation reads the published
//! numbers from one place. Cells the campaign could not detect are explicit
//! absences, never zeros.

use crate::error::{Error, Result};
use crate::geometry::{ElevationSweepPlan, SweepPlanRow};
use crate::pdp::Polarization;
use crate::propagation::FoliageObservation;
use crate::sweepfile::{self, ParseOutcome};
use std::path::Path;

const ELEVATION_PLANS: &str = include_str!("../data/elevation_plans.txt");
const FOLIAGE_PATH_LOSS: &str = include_str!("../data/foliage_path_loss.txt");
const GROUND_BOUNCE_POWERS: &str = include_str!("../data/ground_bounce_powers.txt");
const SCENARIO: &str = include_str!("../data/scenario.txt");

/// FNV-1a 64 of the bundled files in load order; guards against silent edits.
const BUNDLE_CHECKSUM: u64 = 0x5114960091af59d0;

fn fnv1a64(chunks: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    for chunk in chunks {
        for b in chunk.as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x100000001b3);
        }
    }
    h
}

/// One paired free-space / foliage path-loss row as published, including the
/// printed excess column.
///
/// The printed excess is kept separately because the published cross-polarized
/// excesses differ from the rounded path-loss differences by 0.1 dB (they were
/// evidently computed before rounding); fits over the published table use the
/// printed column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliageRow {
    pub polarization: Polarization,
    pub distance_m: f64,
    pub pl_free_space_db: f64,
    pub pl_foliage_db: Option<f64>,
    pub delta_pl_db: Option<f64>,
}

/// One ground-bounce power row as published.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BounceRow {
    pub d_i_m: f64,
    pub d_tot_m: f64,
    pub d_foliage_m: f64,
    pub pr_fs_vv_dbm: Option<f64>,
    pub pr_foliage_vv_dbm: Option<f64>,
    pub pr_fs_vh_dbm: Option<f64>,
    pub pr_foliage_vh_dbm: Option<f64>,
}

impl BounceRow {
    /// The `(pr_fs, pr_foliage)` pair for a polarization, when both exist.
    pub fn powers(&self, pol: Polarization) -> Option<(f64, f64)> {
        match pol {
            Polarization::Vv => self.pr_fs_vv_dbm.zip(self.pr_foliage_vv_dbm),
            Polarization::Vh => self.pr_fs_vh_dbm.zip(self.pr_foliage_vh_dbm),
        }
    }
}

/// Constants of the reference campaign.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceScenario {
    pub tx_height_m: f64,
    pub rx_height_m: f64,
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub hpbw_deg: f64,
    pub frequency_hz: f64,
    pub foliage_alpha_db_per_m: f64,
    pub distances_m: Vec<f64>,
}

/// The bundled reference tables.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTables {
    pub elevation_plans: Vec<ElevationSweepPlan>,
    pub foliage: Vec<FoliageRow>,
    pub bounce: Vec<BounceRow>,
    pub scenario: ReferenceScenario,
}

impl ReferenceTables {
    /// Foliage rows of one polarization, in distance order.
    pub fn foliage_rows(&self, pol: Polarization) -> Vec<FoliageRow> {
        self.foliage
            .iter()
            .filter(|r| r.polarization == pol)
            .copied()
            .collect()
    }

    /// Paired observations of one polarization (rows with a foliage value).
    pub fn foliage_observations(&self, pol: Polarization) -> Vec<FoliageObservation> {
        self.foliage_rows(pol)
            .iter()
            .filter_map(|r| {
                r.pl_foliage_db.map(|fol| {
                    FoliageObservation::new(r.distance_m, r.pl_free_space_db, fol)
                        .expect("bundled rows are valid")
                })
            })
            .collect()
    }

    /// `(distance, printed excess)` samples of one polarization.
    pub fn foliage_excess_samples(&self, pol: Polarization) -> Vec<(f64, f64)> {
        self.foliage_rows(pol)
            .iter()
            .filter_map(|r| r.delta_pl_db.map(|d| (r.distance_m, d)))
            .collect()
    }

    /// Free-space path losses of one polarization, one per distance.
    pub fn free_space_path_losses(&self, pol: Polarization) -> Vec<f64> {
        self.foliage_rows(pol)
            .iter()
            .map(|r| r.pl_free_space_db)
            .collect()
    }

    /// Foliage path losses present for BOTH polarizations, index-aligned by
    /// distance, as `(vh, vv)` lists.
    pub fn aligned_foliage_path_losses(&self) -> (Vec<f64>, Vec<f64>) {
        let vv = self.foliage_rows(Polarization::Vv);
        let vh = self.foliage_rows(Polarization::Vh);
        let mut out_vh = Vec::new();
        let mut out_vv = Vec::new();
        for row_vh in &vh {
            if let Some(pl_vh) = row_vh.pl_foliage_db {
                if let Some(row_vv) = vv.iter().find(|r| {
                    (r.distance_m - row_vh.distance_m).abs() < 1e-9 && r.pl_foliage_db.is_some()
                }) {
                    out_vh.push(pl_vh);
                    out_vv.push(row_vv.pl_foliage_db.unwrap());
                }
            }
        }
        (out_vh, out_vv)
    }

    pub fn bounce_row(&self, d_i_m: f64) -> Option<&BounceRow> {
        self.bounce.iter().find(|r| (r.d_i_m - d_i_m).abs() < 1e-9)
    }
}

fn parse_cell(s: &str, line: usize) -> Result<Option<f64>> {
    if s == "-" {
        return Ok(None);
    }
    s.parse::<f64>()
        .map(Some)
        .map_err(|_| Error::parse(line, format!("bad numeric cell {s:?}")))
}

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#') && !l.starts_with("version"))
}

fn parse_elevation_plans(text: &str) -> Result<Vec<ElevationSweepPlan>> {
    let mut plans: Vec<ElevationSweepPlan> = Vec::new();
    for (lineno, line) in data_lines(text) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 4 {
            return Err(Error::parse(lineno, "expected 4 columns"));
        }
        let rx_id: u32 = cols[0]
            .parse()
            .map_err(|_| Error::parse(lineno, "bad rx_id"))?;
        let measurement: u32 = cols[1]
            .parse()
            .map_err(|_| Error::parse(lineno, "bad measurement number"))?;
        let tx_el: f64 = cols[2]
            .parse()
            .map_err(|_| Error::parse(lineno, "bad TX elevation"))?;
        let rx_els: Vec<f64> = cols[3]
            .split(',')
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(lineno, "bad RX elevation list"))?;
        let row = SweepPlanRow {
            measurement,
            tx_elevation_deg: tx_el,
            rx_elevations_deg: rx_els,
        };
        match plans.iter_mut().find(|p| p.rx_id == rx_id) {
            Some(plan) => plan.rows.push(row),
            None => plans.push(ElevationSweepPlan {
                rx_id,
                rows: vec![row],
            }),
        }
    }
    for plan in &plans {
        plan.validate()?;
    }
    Ok(plans)
}

fn parse_foliage(text: &str) -> Result<Vec<FoliageRow>> {
    let mut rows = Vec::new();
    for (lineno, line) in data_lines(text) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 5 {
            return Err(Error::parse(lineno, "expected 5 columns"));
        }
        rows.push(FoliageRow {
            polarization: cols[0].parse()?,
            distance_m: cols[1]
                .parse()
                .map_err(|_| Error::parse(lineno, "bad distance"))?,
            pl_free_space_db: cols[2]
                .parse()
                .map_err(|_| Error::parse(lineno, "bad free-space path loss"))?,
            pl_foliage_db: parse_cell(cols[3], lineno)?,
            delta_pl_db: parse_cell(cols[4], lineno)?,
        });
    }
    Ok(rows)
}

fn parse_bounce(text: &str) -> Result<Vec<BounceRow>> {
    let mut rows = Vec::new();
    for (lineno, line) in data_lines(text) {
        let cols: Vec<&str> = line.split_whitespace().collect();
        if cols.len() != 7 {
            return Err(Error::parse(lineno, "expected 7 columns"));
        }
        let req = |idx: usize| -> Result<f64> {
            cols[idx]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad numeric cell {:?}", cols[idx])))
        };
        rows.push(BounceRow {
            d_i_m: req(0)?,
            d_tot_m: req(1)?,
            d_foliage_m: req(2)?,
            pr_fs_vv_dbm: parse_cell(cols[3], lineno)?,
            pr_foliage_vv_dbm: parse_cell(cols[4], lineno)?,
            pr_fs_vh_dbm: parse_cell(cols[5], lineno)?,
            pr_foliage_vh_dbm: parse_cell(cols[6], lineno)?,
        });
    }
    Ok(rows)
}

fn parse_scenario(text: &str) -> Result<ReferenceScenario> {
    let mut map = std::collections::HashMap::new();
    for (lineno, line) in data_lines(text) {
        let mut parts = line.split_whitespace();
        let key = parts
            .next()
            .ok_or_else(|| Error::parse(lineno, "empty line"))?;
        let value = parts
            .next()
            .ok_or_else(|| Error::parse(lineno, format!("{key} needs a value")))?;
        map.insert(key.to_string(), (lineno, value.to_string()));
    }
    let get = |key: &str| -> Result<f64> {
        let (lineno, value) = map
            .get(key)
            .ok_or_else(|| Error::InvalidData(format!("scenario is missing {key:?}")))?;
        value
            .parse()
            .map_err(|_| Error::parse(*lineno, format!("bad value for {key}")))
    };
    let distances = map
        .get("distances_m")
        .ok_or_else(|| Error::InvalidData("scenario is missing distances_m".into()))?;
    let distances_m: Vec<f64> = distances
        .1
        .split(',')
        .map(|v| v.parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| Error::parse(distances.0, "bad distances list"))?;
    Ok(ReferenceScenario {
        tx_height_m: get("tx_height_m")?,
        rx_height_m: get("rx_height_m")?,
        tx_power_dbm: get("tx_power_dbm")?,
        tx_gain_dbi: get("tx_gain_dbi")?,
        rx_gain_dbi: get("rx_gain_dbi")?,
        hpbw_deg: get("hpbw_deg")?,
        frequency_hz: get("frequency_hz")?,
        foliage_alpha_db_per_m: get("foliage_alpha_db_per_m")?,
        distances_m,
    })
}

/// Load the bundled reference tables.
///
/// Referentially transparent; the checksum rejects a tampered bundle.
pub fn load_reference() -> Result<ReferenceTables> {
    let actual = fnv1a64(&[
        ELEVATION_PLANS,
        FOLIAGE_PATH_LOSS,
        GROUND_BOUNCE_POWERS,
        SCENARIO,
    ]);
    if actual != BUNDLE_CHECKSUM {
        return Err(Error::Integrity(format!(
            "bundled tables checksum {actual:#018x} does not match the pinned {BUNDLE_CHECKSUM:#018x}"
        )));
    }
    Ok(ReferenceTables {
        elevation_plans: parse_elevation_plans(ELEVATION_PLANS)?,
        foliage: parse_foliage(FOLIAGE_PATH_LOSS)?,
        bounce: parse_bounce(GROUND_BOUNCE_POWERS)?,
        scenario: parse_scenario(SCENARIO)?,
    })
}

/// Validate a user-supplied sweep file.
///
/// I/O failures are errors; every format violation is reported as a
/// line-numbered diagnostic instead of a crash.
pub fn validate_sweep_file(path: impl AsRef<Path>) -> Result<ParseOutcome> {
    sweepfile::read_file(path)
}
