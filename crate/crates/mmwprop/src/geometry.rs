//! Ground-bounce and sweep-plan geometry.
//!
//! Everything here follows the image method on flat ground: the reflected
//! ray is the straight line from the transmitter to the receiver's mirror
//! image below the surface, which puts the specular point where the two
//! depression angles are equal. Angles are in degrees; downtilts are
//! negative (downward), elevations are measured from the horizontal, and
//! incident angles are measured from the surface normal.
//!
//! # Example
//!
//! ```rust
//! use mmwprop::geometry::LinkGeometry;
//!
//! let geom = LinkGeometry::new(4.06, 2.0, 10.0).unwrap();
//! let gb = geom.ground_bounce();
//! assert!((gb.d_tot_m - 11.693).abs() < 1e-3);
//! assert!((gb.grazing_deg + gb.incident_deg - 90.0).abs() < 1e-12);
//! ```

use crate::error::{Error, Result};

/// Antenna heights and horizontal separation of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry {
    /// Transmitter height above ground, metres.
    pub tx_height_m: f64,
    /// Receiver height above ground, metres.
    pub rx_height_m: f64,
    /// Horizontal transmitter-receiver separation, metres.
    pub separation_m: f64,
}

impl LinkGeometry {
    /// Validate and construct a link geometry.
    ///
    /// All three values must be finite and strictly positive.
    pub fn new(tx_height_m: f64, rx_height_m: f64, separation_m: f64) -> Result<Self> {
        for (name, v) in [
            ("tx_height_m", tx_height_m),
            ("rx_height_m", rx_height_m),
            ("separation_m", separation_m),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return Err(Error::InvalidGeometry(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self {
            tx_height_m,
            rx_height_m,
            separation_m,
        })
    }

    /// Solve the specular ground reflection for this link.
    pub fn ground_bounce(&self) -> GroundBounce {
        let h_sum = self.tx_height_m + self.rx_height_m;
        let d = self.separation_m;
        let grazing_deg = (h_sum / d).atan().to_degrees();
        GroundBounce {
            d_tot_m: (d * d + h_sum * h_sum).sqrt(),
            grazing_deg,
            incident_deg: 90.0 - grazing_deg,
            tx_downtilt_deg: -grazing_deg,
            rx_downtilt_deg: -grazing_deg,
            specular_x_m: d * self.tx_height_m / h_sum,
        }
    }

    /// Elevation angle of the direct ray leaving the transmitter, degrees.
    ///
    /// Negative when the transmitter sits above the receiver.
    pub fn direct_tx_elevation_deg(&self) -> f64 {
        -((self.tx_height_m - self.rx_height_m) / self.separation_m)
            .atan()
            .to_degrees()
    }

    /// Straight-line length of the direct ray, metres.
    pub fn direct_path_m(&self) -> f64 {
        let dh = self.tx_height_m - self.rx_height_m;
        (self.separation_m * self.separation_m + dh * dh).sqrt()
    }
}

/// Image-method solution of the specular ground reflection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroundBounce {
    /// Total reflected path length TX -> ground -> RX, metres.
    pub d_tot_m: f64,
    /// Ray angle above the ground plane, degrees, in (0, 90).
    pub grazing_deg: f64,
    /// Ray angle from the surface normal, degrees; complement of grazing.
    pub incident_deg: f64,
    /// Initial TX boresight tilt toward the specular point (negative = down).
    pub tx_downtilt_deg: f64,
    /// Initial RX boresight tilt toward the specular point (negative = down).
    pub rx_downtilt_deg: f64,
    /// Horizontal distance from the TX to the specular point, metres.
    pub specular_x_m: f64,
}

impl GroundBounce {
    /// Excess propagation delay of the bounce over the direct ray, ns.
    pub fn excess_delay_ns(&self, geom: &LinkGeometry) -> f64 {
        (self.d_tot_m - geom.direct_path_m()) / crate::units::SPEED_OF_LIGHT_M_S * 1e9
    }
}

/// Solve the specular ground reflection for a link.
///
/// Free-function form of [`LinkGeometry::ground_bounce`].
pub fn ground_bounce(geom: &LinkGeometry) -> GroundBounce {
    geom.ground_bounce()
}

/// How [`downtilt_schedule`] reports the initial downtilt.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rounding {
    /// The exact boresight-to-specular-point angle.
    Exact,
    /// Rounded to the nearest whole degree, as a field schedule would list it.
    NearestDegree,
}

/// Initial boresight downtilts used to aim both antennas at the specular point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialDowntilt {
    pub tx_deg: f64,
    pub rx_deg: f64,
}

/// Initial downtilt toward the specular point, for sweep planning.
///
/// Under the image method both antennas share the same tilt magnitude, so
/// the TX and RX entries are equal. `NearestDegree` rounds the exact angle
/// to the nearest integer degree.
pub fn downtilt_schedule(geom: &LinkGeometry, rounding: Rounding) -> InitialDowntilt {
    let exact = geom.ground_bounce().tx_downtilt_deg;
    let value = match rounding {
        Rounding::Exact => exact,
        Rounding::NearestDegree => exact.round(),
    };
    InitialDowntilt {
        tx_deg: value,
        rx_deg: value,
    }
}

/// One measurement of an elevation sweep plan: a fixed TX elevation and the
/// RX elevations stepped through while the TX holds still.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlanRow {
    pub measurement: u32,
    pub tx_elevation_deg: f64,
    pub rx_elevations_deg: Vec<f64>,
}

/// The bundled elevation sweep plan for one receiver location.
///
/// Successive RX elevations within a row step by exactly +7 degrees (one
/// half-power beamwidth of the campaign antennas).
#[derive(Debug, Clone, PartialEq)]
pub struct ElevationSweepPlan {
    pub rx_id: u32,
    pub rows: Vec<SweepPlanRow>,
}

impl ElevationSweepPlan {
    /// The scheduled initial elevation (first measurement's TX setting).
    pub fn initial_elevation_deg(&self) -> f64 {
        self.rows[0].tx_elevation_deg
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.rows.is_empty() {
            return Err(Error::InvalidData(format!(
                "sweep plan for RX {} has no rows",
                self.rx_id
            )));
        }
        for row in &self.rows {
            for pair in row.rx_elevations_deg.windows(2) {
                if (pair[1] - pair[0] - 7.0).abs() > 1e-9 {
                    return Err(Error::InvalidData(format!(
                        "RX {} measurement {}: elevations must step by +7 degrees",
                        self.rx_id, row.measurement
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Look up the bundled elevation sweep plan for a receiver location (1..=4).
pub fn elevation_sweep_plan(rx_id: u32) -> Result<ElevationSweepPlan> {
    let tables = crate::dataset::load_reference()?;
    tables
        .elevation_plans
        .iter()
        .find(|p| p.rx_id == rx_id)
        .cloned()
        .ok_or_else(|| Error::NotFound(format!("no sweep plan for RX {rx_id}")))
}

/// A canopy interval along the ground track, extruded vertically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanopySpan {
    /// Start of the span, metres from the transmitter along the ground track.
    pub start_m: f64,
    /// End of the span, metres from the transmitter along the ground track.
    pub end_m: f64,
}

impl CanopySpan {
    pub fn new(start_m: f64, end_m: f64) -> Result<Self> {
        if !start_m.is_finite() || !end_m.is_finite() || start_m < 0.0 || end_m <= start_m {
            return Err(Error::InvalidScene(format!(
                "canopy span must satisfy 0 <= start < end, got {start_m}..{end_m}"
            )));
        }
        Ok(Self { start_m, end_m })
    }

    fn overlap(&self, lo: f64, hi: f64) -> f64 {
        (self.end_m.min(hi) - self.start_m.max(lo)).max(0.0)
    }
}

/// Which ray of the two-path link a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RayPath {
    Direct,
    GroundBounce,
}

/// Total 3-D ray length intersecting the union of canopy spans, metres.
///
/// Spans are vertical extrusions over the ground track, so the in-canopy
/// length of a ray segment is its horizontal overlap scaled by the segment
/// secant. Spans must be non-overlapping and lie within `[0, separation_m]`.
pub fn canopy_path_length(
    intervals: &[CanopySpan],
    geom: &LinkGeometry,
    ray: RayPath,
) -> Result<f64> {
    let d = geom.separation_m;
    let mut sorted: Vec<CanopySpan> = intervals.to_vec();
    sorted.sort_by(|a, b| a.start_m.partial_cmp(&b.start_m).unwrap());
    for span in &sorted {
        if span.start_m < 0.0 || span.end_m > d {
            return Err(Error::InvalidScene(format!(
                "canopy span {}..{} falls outside the ground track 0..{d}",
                span.start_m, span.end_m
            )));
        }
    }
    for pair in sorted.windows(2) {
        if pair[1].start_m < pair[0].end_m {
            return Err(Error::InvalidScene(format!(
                "canopy spans {}..{} and {}..{} overlap",
                pair[0].start_m, pair[0].end_m, pair[1].start_m, pair[1].end_m
            )));
        }
    }

    let total = match ray {
        RayPath::Direct => {
            let secant = geom.direct_path_m() / d;
            sorted.iter().map(|s| s.overlap(0.0, d) * secant).sum()
        }
        RayPath::GroundBounce => {
            let gb = geom.ground_bounce();
            let xs = gb.specular_x_m;
            // Both legs rise at the grazing angle, so they share one secant.
            let secant = gb.d_tot_m / d;
            sorted
                .iter()
                .map(|s| (s.overlap(0.0, xs) + s.overlap(xs, d)) * secant)
                .sum()
        }
    };
    Ok(total)
}
