//! Power-delay-profile reduction and omnidirectional synthesis.
//!
//! A directional sweep is reduced to an omnidirectional quantity by summing
//! the detected power of every unique pointing-angle record in the linear
//! domain, with the nominal antenna gains removed, and converting back to a
//! path loss only at the end:
//!
//! ```text
//! Pr_omni[mW] = sum over records of Pr(record)      (gains removed)
//! PL_omni[dB] = Pt[dBm] - 10 log10(Pr_omni[mW])
//! ```
//!
//! Powers add linearly because the multipath phases are effectively random
//! across pointing directions; there is no coherent combining here.

use crate::error::{Error, Result};
use crate::units::{dbm_to_milliwatts, milliwatts_to_dbm};

/// Default multipath detection threshold above the noise floor, dB.
pub const DEFAULT_DETECTION_THRESHOLD_DB: f64 = 5.0;

/// Antenna polarization pairing of a record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    /// Co-polarized, vertical to vertical.
    Vv,
    /// Cross-polarized, vertical to horizontal.
    Vh,
}

impl std::fmt::Display for Polarization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Polarization::Vv => write!(f, "V-V"),
            Polarization::Vh => write!(f, "V-H"),
        }
    }
}

impl std::str::FromStr for Polarization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "").as_str() {
            "vv" => Ok(Polarization::Vv),
            "vh" => Ok(Polarization::Vh),
            other => Err(Error::InvalidData(format!("unknown polarization {other:?}"))),
        }
    }
}

/// Which measurement family a sweep belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    FreeSpace,
    Foliage,
    GroundReflection,
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Scenario::FreeSpace => "free_space",
            Scenario::Foliage => "foliage",
            Scenario::GroundReflection => "ground_reflection",
        };
        write!(f, "{s}")
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free_space" => Ok(Scenario::FreeSpace),
            "foliage" => Ok(Scenario::Foliage),
            "ground_reflection" => Ok(Scenario::GroundReflection),
            other => Err(Error::InvalidData(format!("unknown scenario {other:?}"))),
        }
    }
}

/// Received power versus excess delay for one pointing direction.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerDelayProfile {
    /// Uniformly spaced excess-delay axis, nanoseconds.
    pub delay_bins_ns: Vec<f64>,
    /// Linear received power per bin, milliwatts. Same length as the axis.
    pub power_mw: Vec<f64>,
    /// Noise floor of the acquisition, dBm.
    pub noise_floor_dbm: f64,
    /// Bin spacing, nanoseconds.
    pub bin_spacing_ns: f64,
}

impl PowerDelayProfile {
    pub fn new(
        delay_bins_ns: Vec<f64>,
        power_mw: Vec<f64>,
        noise_floor_dbm: f64,
        bin_spacing_ns: f64,
    ) -> Result<Self> {
        if delay_bins_ns.is_empty() || delay_bins_ns.len() != power_mw.len() {
            return Err(Error::InvalidData(format!(
                "delay axis ({}) and power list ({}) must be non-empty and equal length",
                delay_bins_ns.len(),
                power_mw.len()
            )));
        }
        if bin_spacing_ns <= 0.0 || !bin_spacing_ns.is_finite() {
            return Err(Error::InvalidData(format!(
                "bin spacing must be positive, got {bin_spacing_ns}"
            )));
        }
        for pair in delay_bins_ns.windows(2) {
            if ((pair[1] - pair[0]) - bin_spacing_ns).abs() > 1e-6 * bin_spacing_ns {
                return Err(Error::InvalidData(
                    "delay axis must be uniformly spaced at the stated bin spacing".into(),
                ));
            }
        }
        if power_mw.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidData(
                "bin powers must be finite and non-negative".into(),
            ));
        }
        Ok(Self {
            delay_bins_ns,
            power_mw,
            noise_floor_dbm,
            bin_spacing_ns,
        })
    }

    /// Index and power of the strongest bin.
    pub fn peak(&self) -> (usize, f64) {
        self.power_mw
            .iter()
            .copied()
            .enumerate()
            .fold((0, 0.0), |best, (i, p)| if p > best.1 { (i, p) } else { best })
    }

    /// Delay bins whose power exceeds `noise_floor + threshold`, as
    /// `(delay_ns, power_mw)` pairs.
    pub fn detected_bins(&self, threshold_db_above_noise: f64) -> Vec<(f64, f64)> {
        let cut = dbm_to_milliwatts(self.noise_floor_dbm + threshold_db_above_noise);
        self.delay_bins_ns
            .iter()
            .zip(&self.power_mw)
            .filter(|(_, &p)| p > cut)
            .map(|(&d, &p)| (d, p))
            .collect()
    }
}

/// Total detected power of a profile, milliwatts.
///
/// Sums every bin exceeding `noise_floor + threshold`; zero when nothing
/// crosses the detection cut.
pub fn pdp_total_power(pdp: &PowerDelayProfile, threshold_db_above_noise: f64) -> Result<f64> {
    if threshold_db_above_noise < 0.0 {
        return Err(Error::Domain(format!(
            "detection threshold must be non-negative, got {threshold_db_above_noise}"
        )));
    }
    Ok(pdp
        .detected_bins(threshold_db_above_noise)
        .iter()
        .map(|(_, p)| p)
        .sum())
}

/// One acquired profile at a unique pointing-angle combination.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub tx_az_deg: f64,
    pub tx_el_deg: f64,
    pub rx_az_deg: f64,
    pub rx_el_deg: f64,
    pub polarization: Polarization,
    pub distance_m: f64,
    pub pdp: PowerDelayProfile,
}

impl SweepRecord {
    pub fn validate(&self) -> Result<()> {
        for (name, az) in [("tx_az_deg", self.tx_az_deg), ("rx_az_deg", self.rx_az_deg)] {
            if !(0.0..360.0).contains(&az) {
                return Err(Error::InvalidData(format!(
                    "{name} must lie in [0, 360), got {az}"
                )));
            }
        }
        if self.distance_m <= 0.0 {
            return Err(Error::InvalidData(format!(
                "record distance must be positive, got {}",
                self.distance_m
            )));
        }
        Ok(())
    }

    /// Pointing tuple rounded to whole degrees, used for deduplication.
    pub fn pointing_key(&self) -> (i64, i64, i64, i64) {
        (
            self.tx_az_deg.round() as i64,
            self.tx_el_deg.round() as i64,
            self.rx_az_deg.round() as i64,
            self.rx_el_deg.round() as i64,
        )
    }
}

/// A full directional sweep sharing one distance and polarization.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSet {
    pub records: Vec<SweepRecord>,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub tx_power_dbm: f64,
    pub scenario: Scenario,
}

impl SweepSet {
    /// Validate and construct a sweep set.
    ///
    /// Records with identical pointing tuples (rounded to one degree) are
    /// rejected; all records must share the distance and polarization. An
    /// empty record list is allowed at construction; reductions over it
    /// report a domain error instead.
    pub fn new(
        records: Vec<SweepRecord>,
        tx_gain_dbi: f64,
        rx_gain_dbi: f64,
        tx_power_dbm: f64,
        scenario: Scenario,
    ) -> Result<Self> {
        let mut seen = std::collections::HashMap::new();
        for (i, record) in records.iter().enumerate() {
            record.validate()?;
            if let Some(j) = seen.insert(record.pointing_key(), i) {
                return Err(Error::InvalidData(format!(
                    "records {j} and {i} share the pointing tuple {:?}",
                    record.pointing_key()
                )));
            }
        }
        if let Some(first) = records.first() {
            for record in &records[1..] {
                if (record.distance_m - first.distance_m).abs() > 1e-9 {
                    return Err(Error::InvalidData(
                        "all records in a sweep must share the distance".into(),
                    ));
                }
                if record.polarization != first.polarization {
                    return Err(Error::InvalidData(
                        "all records in a sweep must share the polarization".into(),
                    ));
                }
            }
        }
        Ok(Self {
            records,
            tx_gain_dbi,
            rx_gain_dbi,
            tx_power_dbm,
            scenario,
        })
    }
}

/// Omnidirectional received power of a sweep, milliwatts.
///
/// Sums the detected power of every record with the nominal TX and RX gains
/// removed in the linear domain first.
pub fn omni_received_power(sweeps: &SweepSet, threshold_db_above_noise: f64) -> Result<f64> {
    if sweeps.records.is_empty() {
        return Err(Error::Domain(
            "omnidirectional synthesis needs at least one record".into(),
        ));
    }
    let gain_linear = 10f64.powf((sweeps.tx_gain_dbi + sweeps.rx_gain_dbi) / 10.0);
    let mut total = 0.0;
    for record in &sweeps.records {
        total += pdp_total_power(&record.pdp, threshold_db_above_noise)? / gain_linear;
    }
    Ok(total)
}

/// Omnidirectional path loss in dB from a transmit power and omni power.
pub fn omni_path_loss(tx_power_dbm: f64, pr_omni_mw: f64) -> Result<f64> {
    if pr_omni_mw <= 0.0 || !pr_omni_mw.is_finite() {
        return Err(Error::NoSignal(format!(
            "omnidirectional power must be positive, got {pr_omni_mw} mW"
        )));
    }
    Ok(tx_power_dbm - milliwatts_to_dbm(pr_omni_mw))
}
