//! Fresnel reflection coefficients and measured-coefficient recovery.
//!
//! Parallel polarization only (electric field in the plane of incidence),
//! lossless real permittivity. Two algebraic forms of the coefficient are
//! exposed:
//!
//! * [`FresnelForm::Simplified`] uses the refraction-angle cosine in both
//!   numerator and denominator,
//!   `(cos(theta_t) - sqrt(eps - sin^2 theta_i)) / (cos(theta_t) + sqrt(eps - sin^2 theta_i))`
//!   with `sin(theta_t) = sin(theta_i) / sqrt(eps)`. Substituting the Snell
//!   relation collapses it to the normal-incidence value
//!   `(1 - sqrt(eps)) / (1 + sqrt(eps))` at every angle, so its curves are
//!   flat in the incident angle.
//! * [`FresnelForm::Standard`] is the conventional permittivity-weighted
//!   form `(-eps cos(theta_i) + sqrt(eps - sin^2 theta_i)) /
//!   (eps cos(theta_i) + sqrt(eps - sin^2 theta_i))`, which carries the
//!   Brewster zero at `tan(theta_B) = sqrt(eps)`.
//!
//! Both agree at normal incidence; tests compare them explicitly.
//!
//! # Example
//!
//! ```rust
//! use mmwprop::reflection::{fresnel_parallel, FresnelForm, GroundMaterial};
//!
//! let soil = GroundMaterial::new(4.0).unwrap();
//! let g = fresnel_parallel(&soil, 0.0, FresnelForm::Simplified).unwrap();
//! assert!((g.abs() - 1.0 / 3.0).abs() < 1e-12);
//! ```

use crate::error::{Error, Result};
use crate::pdp::Polarization;

/// Lossless ground described by its real relative permittivity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundMaterial {
    pub relative_permittivity: f64,
}

impl GroundMaterial {
    /// Permittivities below 1 (total-internal-reflection regime) are out of
    /// scope and rejected.
    pub fn new(relative_permittivity: f64) -> Result<Self> {
        if !relative_permittivity.is_finite() || relative_permittivity < 1.0 {
            return Err(Error::Domain(format!(
                "relative permittivity must be >= 1, got {relative_permittivity}"
            )));
        }
        Ok(Self {
            relative_permittivity,
        })
    }
}

/// Default permittivity sweep for curve generation: 1 through 9 in steps of 2.
pub fn default_permittivity_sweep() -> Vec<GroundMaterial> {
    [1.0, 3.0, 5.0, 7.0, 9.0]
        .iter()
        .map(|&e| GroundMaterial { relative_permittivity: e })
        .collect()
}

/// Which algebraic form of the parallel coefficient to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FresnelForm {
    /// Refraction-angle-cosine form; angle-independent after Snell's law.
    Simplified,
    /// Conventional permittivity-weighted form with the Brewster zero.
    Standard,
}

/// Signed parallel-polarization reflection coefficient.
///
/// `incident_deg` is measured from the surface normal and must lie in
/// `[0, 90)`. The magnitude is `result.abs()`.
pub fn fresnel_parallel(
    material: &GroundMaterial,
    incident_deg: f64,
    form: FresnelForm,
) -> Result<f64> {
    if !(0.0..90.0).contains(&incident_deg) {
        return Err(Error::Domain(format!(
            "incident angle must lie in [0, 90) degrees, got {incident_deg}"
        )));
    }
    let eps = material.relative_permittivity;
    if eps == 1.0 {
        // Matched media reflect nothing; computing it would leave an
        // ulp-sized residue from cos(theta) vs sqrt(1 - sin^2(theta)).
        return Ok(0.0);
    }
    let theta_i = incident_deg.to_radians();
    let sin_i = theta_i.sin();
    let root = (eps - sin_i * sin_i).sqrt();
    Ok(match form {
        FresnelForm::Simplified => {
            let cos_t = (1.0 - sin_i * sin_i / eps).sqrt();
            (cos_t - root) / (cos_t + root)
        }
        FresnelForm::Standard => {
            let cos_i = theta_i.cos();
            (-eps * cos_i + root) / (eps * cos_i + root)
        }
    })
}

/// One point of a reflection-coefficient curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FresnelPoint {
    pub relative_permittivity: f64,
    pub incident_deg: f64,
    pub gamma_mag: f64,
}

/// Evaluate `|Gamma|` over a grid of materials and incident angles.
///
/// Output is ordered material-major, then angle, ready for plotting.
pub fn fresnel_curve(
    materials: &[GroundMaterial],
    theta_grid_deg: &[f64],
    form: FresnelForm,
) -> Result<Vec<FresnelPoint>> {
    if theta_grid_deg.is_empty() {
        return Err(Error::Domain("angle grid must be non-empty".into()));
    }
    if materials.is_empty() {
        return Err(Error::Domain("material list must be non-empty".into()));
    }
    let mut points = Vec::with_capacity(materials.len() * theta_grid_deg.len());
    for m in materials {
        for &theta in theta_grid_deg {
            points.push(FresnelPoint {
                relative_permittivity: m.relative_permittivity,
                incident_deg: theta,
                gamma_mag: fresnel_parallel(m, theta, form)?.abs(),
            });
        }
    }
    Ok(points)
}

/// Render curve points as delimited text (`eps theta_deg gamma_mag`).
pub fn curve_to_delimited(points: &[FresnelPoint]) -> String {
    let mut out = String::from("eps_r\ttheta_deg\tgamma_mag\n");
    for p in points {
        out.push_str(&format!(
            "{}\t{}\t{:.6}\n",
            p.relative_permittivity, p.incident_deg, p.gamma_mag
        ));
    }
    out
}

/// A reflection coefficient recovered from measured powers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReflectionEstimate {
    pub gamma_mag: f64,
    /// Incident angle from the surface normal, reconstructed from the path
    /// lengths via the image method.
    pub incident_deg: f64,
    /// Horizontal separation of the link, metres.
    pub distance_m: f64,
    pub polarization: Polarization,
    /// `-20 log10(gamma_mag)`; infinite when the magnitude is zero.
    pub reflection_loss_db: f64,
    /// Set when the recovered magnitude exceeds 1 (noisy inputs can do this).
    pub non_physical: bool,
}

/// Recover the reflection-coefficient magnitude from measured powers.
///
/// Inverts the ground-bounce link budget:
///
/// ```text
/// |Gamma| = (d_tot / d_i) * sqrt(10^(d_fol * alpha / 10))
///         * sqrt(10^((Pr_fol - Pr_fs + xpd_correction) / 10))
/// ```
///
/// The incident angle is reconstructed from `d_i` and `d_tot` (the height sum
/// is `sqrt(d_tot^2 - d_i^2)` under the image method). A result above 1 is
/// returned flagged rather than rejected.
#[allow(clippy::too_many_arguments)]
pub fn recover_reflection_coefficient(
    d_i_m: f64,
    d_tot_m: f64,
    d_foliage_m: f64,
    alpha_db_per_m: f64,
    pr_fs_dbm: f64,
    pr_foliage_dbm: f64,
    xpd_correction_db: f64,
    polarization: Polarization,
) -> Result<ReflectionEstimate> {
    if d_i_m <= 0.0 || d_tot_m <= 0.0 {
        return Err(Error::Domain(format!(
            "path lengths must be positive, got d_i={d_i_m}, d_tot={d_tot_m}"
        )));
    }
    if d_tot_m < d_i_m {
        return Err(Error::Domain(format!(
            "reflected path {d_tot_m} m cannot be shorter than the separation {d_i_m} m"
        )));
    }
    if d_foliage_m < 0.0 || alpha_db_per_m < 0.0 {
        return Err(Error::Domain(
            "foliage length and attenuation rate must be non-negative".into(),
        ));
    }
    let gamma_mag = (d_tot_m / d_i_m)
        * 10f64.powf(d_foliage_m * alpha_db_per_m / 20.0)
        * 10f64.powf((pr_foliage_dbm - pr_fs_dbm + xpd_correction_db) / 20.0);
    let height_sum = (d_tot_m * d_tot_m - d_i_m * d_i_m).sqrt();
    let grazing_deg = (height_sum / d_i_m).atan().to_degrees();
    Ok(ReflectionEstimate {
        gamma_mag,
        incident_deg: 90.0 - grazing_deg,
        distance_m: d_i_m,
        polarization,
        reflection_loss_db: -20.0 * gamma_mag.log10(),
        non_physical: gamma_mag > 1.0,
    })
}

/// Forward prediction of the ground-bounce received power from a measured
/// free-space anchor, dBm. Exact inverse of
/// [`recover_reflection_coefficient`].
pub fn predicted_foliage_power_dbm(
    d_i_m: f64,
    d_tot_m: f64,
    d_foliage_m: f64,
    alpha_db_per_m: f64,
    pr_fs_dbm: f64,
    gamma_mag: f64,
) -> Result<f64> {
    if d_i_m <= 0.0 || d_tot_m <= 0.0 {
        return Err(Error::Domain("path lengths must be positive".into()));
    }
    if gamma_mag <= 0.0 {
        return Err(Error::Domain(format!(
            "reflection magnitude must be positive, got {gamma_mag}"
        )));
    }
    Ok(pr_fs_dbm - 20.0 * (d_tot_m / d_i_m).log10() - d_foliage_m * alpha_db_per_m
        + 20.0 * gamma_mag.log10())
}

/// Reflection loss in dB of a coefficient magnitude.
pub fn reflection_loss_db(gamma_mag: f64) -> Result<f64> {
    if gamma_mag <= 0.0 || !gamma_mag.is_finite() {
        return Err(Error::Domain(format!(
            "reflection magnitude must be positive, got {gamma_mag}"
        )));
    }
    Ok(-20.0 * gamma_mag.log10())
}
