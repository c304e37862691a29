//! Link-budget and foliage-attenuation models.
//!
//! Covers free-space received power, the foliage-attenuated ground-bounce
//! power, the linear-in-distance foliage excess-loss model, the
//! minimum-mean-square-error attenuation-rate estimator, and
//! cross-polarization discrimination extraction.
//!
//! The attenuation-rate estimator divides the total excess loss by the total
//! distance:
//!
//! ```text
//! alpha = sum_i(PL_foliage(d_i) - PL_free_space(d_i)) / sum_i(d_i)
//! ```
//!
//! # Example
//!
//! ```rust
//! use mmwprop::propagation::{fit_attenuation_from_excess, foliage_path_loss_db};
//!
//! // One observation: 4 dB of excess loss over 10 m.
//! let fit = fit_attenuation_from_excess(&[(10.0, 4.0)]).unwrap();
//! assert!((fit.alpha_db_per_m - 0.4).abs() < 1e-12);
//! assert!((foliage_path_loss_db(89.6, fit.alpha_db_per_m, 10.0) - 93.6).abs() < 1e-9);
//! ```

use crate::error::{Error, Result};
use crate::units::{wavelength_m, SPEED_OF_LIGHT_M_S};
use std::f64::consts::PI;

/// Distances below this are treated as near-field for a warning flag.
pub const FAR_FIELD_MIN_M: f64 = 1.0;

/// Transmit power, antenna gains and carrier of one link budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudgetParams {
    pub tx_power_dbm: f64,
    pub tx_gain_dbi: f64,
    pub rx_gain_dbi: f64,
    pub frequency_hz: f64,
}

impl LinkBudgetParams {
    pub fn new(
        tx_power_dbm: f64,
        tx_gain_dbi: f64,
        rx_gain_dbi: f64,
        frequency_hz: f64,
    ) -> Result<Self> {
        if !frequency_hz.is_finite() || frequency_hz <= 0.0 {
            return Err(Error::Domain(format!(
                "frequency_hz must be finite and positive, got {frequency_hz}"
            )));
        }
        for (name, v) in [
            ("tx_power_dbm", tx_power_dbm),
            ("tx_gain_dbi", tx_gain_dbi),
            ("rx_gain_dbi", rx_gain_dbi),
        ] {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be finite, got {v}")));
            }
        }
        Ok(Self {
            tx_power_dbm,
            tx_gain_dbi,
            rx_gain_dbi,
            frequency_hz,
        })
    }

    pub fn wavelength_m(&self) -> f64 {
        wavelength_m(self.frequency_hz)
    }
}

/// Free-space path loss in dB at a carrier frequency and distance.
pub fn free_space_path_loss_db(frequency_hz: f64, distance_m: f64) -> Result<f64> {
    if distance_m <= 0.0 || !distance_m.is_finite() {
        return Err(Error::Domain(format!(
            "distance must be positive, got {distance_m}"
        )));
    }
    Ok(20.0 * (4.0 * PI * distance_m / wavelength_m(frequency_hz)).log10())
}

/// Free-space received power in dBm.
///
/// `Pr = Pt * Gt * Gr * (lambda / 4 pi d)^2`, expressed in dB form.
/// Distances below [`FAR_FIELD_MIN_M`] still evaluate; callers that care can
/// test [`is_near_field`] and warn.
pub fn friis_received_power(params: &LinkBudgetParams, distance_m: f64) -> Result<f64> {
    let pl = free_space_path_loss_db(params.frequency_hz, distance_m)?;
    Ok(params.tx_power_dbm + params.tx_gain_dbi + params.rx_gain_dbi - pl)
}

/// True when a distance is too short for the far-field assumption.
pub fn is_near_field(distance_m: f64) -> bool {
    distance_m < FAR_FIELD_MIN_M
}

/// Received power of a foliage-attenuated ground-reflected ray, dBm.
///
/// Free-space power over the total reflected path length, reduced by the
/// canopy attenuation `alpha * d_foliage` and the reflection `|Gamma|^2`.
/// A reflection magnitude of zero yields negative infinity (no signal).
pub fn ground_reflected_power(
    params: &LinkBudgetParams,
    d_tot_m: f64,
    d_foliage_m: f64,
    alpha_db_per_m: f64,
    gamma_mag: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&gamma_mag) {
        return Err(Error::Domain(format!(
            "reflection magnitude must lie in [0, 1], got {gamma_mag}"
        )));
    }
    if d_foliage_m < 0.0 || !d_foliage_m.is_finite() {
        return Err(Error::Domain(format!(
            "foliage path length must be non-negative, got {d_foliage_m}"
        )));
    }
    let friis = friis_received_power(params, d_tot_m)?;
    Ok(friis - d_foliage_m * alpha_db_per_m + 20.0 * gamma_mag.log10())
}

/// Foliage path loss in dB: free-space loss plus `alpha * distance`.
pub fn foliage_path_loss_db(pl_free_space_db: f64, alpha_db_per_m: f64, distance_m: f64) -> f64 {
    pl_free_space_db + alpha_db_per_m * distance_m
}

/// One paired free-space / through-foliage path-loss observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FoliageObservation {
    /// Transmitter-receiver separation, metres.
    pub distance_m: f64,
    pub pl_free_space_db: f64,
    pub pl_foliage_db: f64,
}

impl FoliageObservation {
    pub fn new(distance_m: f64, pl_free_space_db: f64, pl_foliage_db: f64) -> Result<Self> {
        if distance_m <= 0.0 || !distance_m.is_finite() {
            return Err(Error::Domain(format!(
                "observation distance must be positive, got {distance_m}"
            )));
        }
        if pl_free_space_db <= 0.0 || pl_foliage_db <= 0.0 {
            return Err(Error::Domain(
                "path losses must be positive dB values".into(),
            ));
        }
        Ok(Self {
            distance_m,
            pl_free_space_db,
            pl_foliage_db,
        })
    }

    /// Excess loss of the foliage path over free space, dB.
    pub fn excess_db(&self) -> f64 {
        self.pl_foliage_db - self.pl_free_space_db
    }
}

/// Result of the attenuation-rate fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FoliageFit {
    /// Fitted attenuation rate, dB per metre of separation.
    pub alpha_db_per_m: f64,
    /// Per-observation residuals `excess_i - alpha * d_i`, dB.
    pub residuals_db: Vec<f64>,
    /// Per-observation excess losses, dB.
    pub excess_losses_db: Vec<f64>,
    /// Set when any excess loss is negative (foliage below free space).
    pub negative_excess: bool,
}

impl FoliageFit {
    /// Root-mean-square of the fit residuals, dB.
    pub fn residual_rms_db(&self) -> f64 {
        let n = self.residuals_db.len() as f64;
        (self.residuals_db.iter().map(|r| r * r).sum::<f64>() / n).sqrt()
    }
}

/// Fit the attenuation rate from `(distance_m, excess_db)` samples.
///
/// This is the estimator itself: total excess loss divided by total
/// distance. Negative excess losses are retained, not clipped, and only
/// raise the `negative_excess` flag.
pub fn fit_attenuation_from_excess(samples: &[(f64, f64)]) -> Result<FoliageFit> {
    if samples.is_empty() {
        return Err(Error::Domain(
            "attenuation fit needs at least one observation".into(),
        ));
    }
    let mut sum_excess = 0.0;
    let mut sum_distance = 0.0;
    for &(d, excess) in samples {
        if d <= 0.0 || !d.is_finite() {
            return Err(Error::Domain(format!(
                "observation distance must be positive, got {d}"
            )));
        }
        sum_excess += excess;
        sum_distance += d;
    }
    let alpha = sum_excess / sum_distance;
    let excess_losses_db: Vec<f64> = samples.iter().map(|&(_, e)| e).collect();
    let residuals_db: Vec<f64> = samples.iter().map(|&(d, e)| e - alpha * d).collect();
    Ok(FoliageFit {
        alpha_db_per_m: alpha,
        negative_excess: excess_losses_db.iter().any(|&e| e < 0.0),
        residuals_db,
        excess_losses_db,
    })
}

/// Fit the attenuation rate from paired path-loss observations.
///
/// Unequal observation counts per polarization are fine; callers simply pass
/// whatever observations exist.
pub fn fit_foliage_attenuation(observations: &[FoliageObservation]) -> Result<FoliageFit> {
    let samples: Vec<(f64, f64)> = observations
        .iter()
        .map(|o| (o.distance_m, o.excess_db()))
        .collect();
    fit_attenuation_from_excess(&samples)
}

/// How cross-polarization discrimination is extracted from path losses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XpdMethod {
    /// Mean of the per-distance differences `PL_vh - PL_vv`. Requires the
    /// lists to be index-aligned by distance.
    MeanDifference,
    /// Difference of the path losses of the summed linear powers.
    TotalPowerDifference,
}

/// Cross-polarization discrimination in dB from co- and cross-polarized
/// path-loss lists.
///
/// Both definitions are provided because either is a defensible reading of
/// "extracted from the total path loss values"; `MeanDifference` is the
/// default elsewhere in the crate.
pub fn xpd(pl_vh_db: &[f64], pl_vv_db: &[f64], method: XpdMethod) -> Result<f64> {
    if pl_vh_db.is_empty() || pl_vv_db.is_empty() {
        return Err(Error::Domain("XPD needs non-empty path-loss lists".into()));
    }
    match method {
        XpdMethod::MeanDifference => {
            if pl_vh_db.len() != pl_vv_db.len() {
                return Err(Error::Domain(format!(
                    "mean-difference XPD needs index-aligned lists, got lengths {} and {}",
                    pl_vh_db.len(),
                    pl_vv_db.len()
                )));
            }
            let sum: f64 = pl_vh_db
                .iter()
                .zip(pl_vv_db)
                .map(|(vh, vv)| vh - vv)
                .sum();
            Ok(sum / pl_vh_db.len() as f64)
        }
        XpdMethod::TotalPowerDifference => {
            let total_pl = |pls: &[f64]| -> f64 {
                let linear: f64 = pls.iter().map(|pl| 10f64.powf(-pl / 10.0)).sum();
                -10.0 * linear.log10()
            };
            Ok(total_pl(pl_vh_db) - total_pl(pl_vv_db))
        }
    }
}

/// Propagation delay in nanoseconds over a path length in metres.
pub fn propagation_delay_ns(path_m: f64) -> f64 {
    path_m / SPEED_OF_LIGHT_M_S * 1e9
}
