//! Deterministic sliding-correlator channel-sounder simulator.
//!
//! The simulated sounder spreads with a maximal-length pseudorandom chip
//! sequence, passes it through a discrete multipath channel at complex
//! baseband, and despreads against a replica of the same sequence clocked
//! slightly slower. The clock offset makes the replica slide through the
//! received sequence, so the cross-correlation appears dilated in time by
//! the slide factor `tx_rate / (tx_rate - rx_rate)`; dividing the observed
//! axis by that factor recovers true excess delay.
//!
//! Implementation notes, all visible in the output:
//!
//! * Tap delays quantize to the chip grid, keeping the delay resolution
//!   claim honest at half a chip with nearest-bin peaks and no sub-chip
//!   interpolation.
//! * Each delay bin integrates the product over exactly one replica period,
//!   centered where the accumulated slip crosses that bin. A unit-tap
//!   self-calibration normalizes the output so a tap of `g` dB yields a
//!   peak bin of `10^(g/10)` mW.
//! * The RF up/down conversion chain is not modeled; everything that
//!   matters to the correlation happens at baseband.
//!
//! # Example
//!
//! ```rust
//! use mmwprop::sounder::{slide_factor, PnSequence};
//!
//! assert_eq!(slide_factor(400e6, 399.95e6).unwrap(), 8000.0);
//! let pn = PnSequence::generate(11, &[11, 2], 1).unwrap();
//! assert_eq!(pn.len(), 2047);
//! assert_eq!(pn.autocorrelation(17), -1);
//! ```

use crate::error::{Error, Result};
use crate::geometry::{canopy_path_length, CanopySpan, LinkGeometry, RayPath};
use crate::pdp::{
    pdp_total_power, Polarization, PowerDelayProfile, Scenario, SweepRecord, SweepSet,
    DEFAULT_DETECTION_THRESHOLD_DB,
};
use crate::propagation::{friis_received_power, propagation_delay_ns, LinkBudgetParams};
use crate::reflection::{fresnel_parallel, FresnelForm, GroundMaterial};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

/// Maximum shift-register degree accepted by the generator; the full-period
/// primitivity check walks all `2^degree - 1` states.
pub const MAX_PN_DEGREE: u32 = 20;

// ---------------------------------------------------------------------------
// PN sequences
// ---------------------------------------------------------------------------

/// A maximal-length +/-1 chip sequence with its generator metadata.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PnSequence {
    chips: Vec<i8>,
    degree: u32,
    taps: Vec<u32>,
    seed: u32,
}

impl PnSequence {
    /// Generate a maximal-length sequence from a linear feedback shift
    /// register.
    ///
    /// `taps` lists the feedback polynomial exponents including the degree
    /// itself (the constant term is implicit). Non-primitive polynomials are
    /// rejected by walking the register: anything short of the full
    /// `2^degree - 1` period is a configuration error, as is a zero seed.
    pub fn generate(degree: u32, taps: &[u32], seed: u32) -> Result<Self> {
        if !(2..=MAX_PN_DEGREE).contains(&degree) {
            return Err(Error::Config(format!(
                "degree must lie in 2..={MAX_PN_DEGREE}, got {degree}"
            )));
        }
        let n = (1usize << degree) - 1;
        if seed == 0 || u64::from(seed) > n as u64 {
            return Err(Error::Config(format!(
                "seed must be a nonzero {degree}-bit state, got {seed}"
            )));
        }
        if taps.is_empty()
            || taps.iter().any(|&t| t == 0 || t > degree)
            || !taps.contains(&degree)
        {
            return Err(Error::Config(format!(
                "taps must be distinct exponents in 1..={degree} and include the degree, got {taps:?}"
            )));
        }
        let mut sorted = taps.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != taps.len() {
            return Err(Error::Config(format!("taps must be distinct, got {taps:?}")));
        }

        let step = |state: u32| -> u32 {
            let fb = taps.iter().fold(0u32, |acc, &t| acc ^ (state >> (degree - t))) & 1;
            (state >> 1) | (fb << (degree - 1))
        };

        // Full-period check: the register must return to the seed after
        // exactly 2^degree - 1 steps, not sooner.
        let mut state = seed;
        let mut period = 0usize;
        loop {
            state = step(state);
            period += 1;
            if state == seed || period > n {
                break;
            }
        }
        if period != n {
            return Err(Error::Config(format!(
                "taps {taps:?} are not primitive for degree {degree}: period {period} < {n}"
            )));
        }

        let mut chips = Vec::with_capacity(n);
        let mut state = seed;
        for _ in 0..n {
            chips.push(if state & 1 == 1 { -1 } else { 1 });
            state = step(state);
        }
        Ok(Self {
            chips,
            degree,
            taps: taps.to_vec(),
            seed,
        })
    }

    /// Sequence length `2^degree - 1`.
    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn taps(&self) -> &[u32] {
        &self.taps
    }

    pub fn seed(&self) -> u32 {
        self.seed
    }

    /// The +/-1 chips.
    pub fn chips(&self) -> &[i8] {
        &self.chips
    }

    /// Periodic autocorrelation at an integer lag.
    ///
    /// `len()` at zero lag, -1 at every other lag for a maximal sequence.
    pub fn autocorrelation(&self, lag: usize) -> i64 {
        let n = self.len();
        let lag = lag % n;
        (0..n)
            .map(|i| i64::from(self.chips[i]) * i64::from(self.chips[(i + lag) % n]))
            .sum()
    }

    /// Counts of (+1, -1) chips; they differ by exactly one.
    pub fn balance(&self) -> (usize, usize) {
        let plus = self.chips.iter().filter(|&&c| c == 1).count();
        (plus, self.len() - plus)
    }

    /// Sample the repeating chip stream at `samples_per_chip`, `n_samples`
    /// long.
    pub fn chip_waveform(&self, samples_per_chip: u32, n_samples: usize) -> Vec<f64> {
        let spc = samples_per_chip as usize;
        let n = self.len();
        (0..n_samples)
            .map(|s| f64::from(self.chips[(s / spc) % n]))
            .collect()
    }
}

/// Generate a maximal-length sequence; see [`PnSequence::generate`].
pub fn generate_pn(degree: u32, taps: &[u32], seed: u32) -> Result<PnSequence> {
    PnSequence::generate(degree, taps, seed)
}

/// Time-dilation ratio of a sliding correlator:
/// `tx_rate / (tx_rate - rx_rate)`.
pub fn slide_factor(tx_rate_hz: f64, rx_rate_hz: f64) -> Result<f64> {
    if !(tx_rate_hz.is_finite() && rx_rate_hz.is_finite()) || rx_rate_hz <= 0.0 {
        return Err(Error::Domain("chip rates must be finite and positive".into()));
    }
    if tx_rate_hz <= rx_rate_hz {
        return Err(Error::Domain(format!(
            "TX chip rate ({tx_rate_hz} Hz) must exceed the RX chip rate ({rx_rate_hz} Hz)"
        )));
    }
    Ok(tx_rate_hz / (tx_rate_hz - rx_rate_hz))
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Sounder configuration.
///
/// Chip rates must be whole numbers of hertz; the slide arithmetic runs on
/// exact integer ratios. `pdp_span_chips` bounds the excess-delay span of
/// the produced profile; `None` means the full sequence period, which also
/// demands a waveform at least one dilated period long.
#[derive(Debug, Clone, PartialEq)]
pub struct SounderConfig {
    pub tx_chip_rate_hz: f64,
    pub rx_chip_rate_hz: f64,
    pub samples_per_chip: u32,
    /// Signal-to-noise ratio at the correlator input; `None` disables noise.
    pub noise_snr_db: Option<f64>,
    pub rng_seed: u64,
    pub pn_degree: u32,
    pub pn_taps: Vec<u32>,
    pub pn_seed: u32,
    pub pdp_span_chips: Option<usize>,
}

impl Default for SounderConfig {
    fn default() -> Self {
        Self {
            tx_chip_rate_hz: 400e6,
            rx_chip_rate_hz: 399.95e6,
            samples_per_chip: 4,
            noise_snr_db: None,
            rng_seed: 0,
            pn_degree: 11,
            pn_taps: vec![11, 2],
            pn_seed: 1,
            pdp_span_chips: None,
        }
    }
}

impl SounderConfig {
    pub fn validate(&self) -> Result<()> {
        slide_factor(self.tx_chip_rate_hz, self.rx_chip_rate_hz)?;
        for (name, rate) in [
            ("tx_chip_rate_hz", self.tx_chip_rate_hz),
            ("rx_chip_rate_hz", self.rx_chip_rate_hz),
        ] {
            if rate.fract() != 0.0 || rate > 1e12 {
                return Err(Error::Config(format!(
                    "{name} must be a whole number of hertz, got {rate}"
                )));
            }
        }
        if self.samples_per_chip == 0 {
            return Err(Error::Config("samples_per_chip must be at least 1".into()));
        }
        Ok(())
    }

    pub fn slide_factor(&self) -> Result<f64> {
        slide_factor(self.tx_chip_rate_hz, self.rx_chip_rate_hz)
    }

    /// Chip duration at the TX clock, nanoseconds.
    pub fn chip_ns(&self) -> f64 {
        1e9 / self.tx_chip_rate_hz
    }

    /// Simulation sample rate, Hz.
    pub fn sample_rate_hz(&self) -> f64 {
        self.tx_chip_rate_hz * f64::from(self.samples_per_chip)
    }

    /// Build the configured spreading sequence.
    pub fn pn(&self) -> Result<PnSequence> {
        PnSequence::generate(self.pn_degree, &self.pn_taps, self.pn_seed)
    }

    /// Samples of received waveform needed for a PDP of `span_chips` bins.
    pub fn required_samples(&self, pn_len: usize, span_chips: usize) -> usize {
        let timing = SlideTiming::new(self, pn_len);
        timing.window_start(span_chips.saturating_sub(1)) + timing.window_len
    }
}

/// Integer timing of the dual-clock slide.
struct SlideTiming {
    /// Samples per replica period (the integration window).
    window_len: usize,
    /// Samples per chip of accumulated slip (bin-to-bin stride).
    stride: f64,
    /// Replica chip-phase numerator shift centering each window.
    shift: u128,
    frx: u128,
    fs: u128,
    pn_len: usize,
}

impl SlideTiming {
    fn new(config: &SounderConfig, pn_len: usize) -> Self {
        let ftx = config.tx_chip_rate_hz as u64;
        let frx = config.rx_chip_rate_hz as u64;
        let fs = ftx * u64::from(config.samples_per_chip);
        let delta = ftx - frx;
        let window_len =
            ((pn_len as f64) * (fs as f64) / (frx as f64)).round() as usize;
        Self {
            window_len,
            stride: fs as f64 / delta as f64,
            // Advance the replica by half the per-window slip so each bin's
            // window straddles its own chip offset symmetrically.
            shift: (window_len as u128) * (delta as u128) / 2,
            frx: u128::from(frx),
            fs: u128::from(fs),
            pn_len,
        }
    }

    fn window_start(&self, bin: usize) -> usize {
        (bin as f64 * self.stride).round() as usize
    }

    /// Mean replica chip value over the sample interval `[s, s+1)`.
    ///
    /// Received samples are zero-order-hold, so the correlation integral
    /// reduces to each sample value times the replica's average over that
    /// interval. Replica chip boundaries fall at exact rational positions
    /// `k * fs / frx`; at most one boundary crosses a sample interval, and
    /// the split is computed from the integer remainder, which keeps the
    /// dilated correlation free of sample-grid artifacts.
    fn replica_weight(&self, chips: &[i8], sample: usize) -> f64 {
        let n = self.pn_len as u128;
        let num = sample as u128 * self.frx + self.shift;
        let idx = num / self.fs;
        let idx_end = (num + self.frx) / self.fs;
        let c0 = f64::from(chips[(idx % n) as usize]);
        if idx_end > idx {
            let boundary_num = (idx + 1) * self.fs;
            let frac = (boundary_num - num) as f64 / self.frx as f64;
            let c1 = f64::from(chips[(idx_end % n) as usize]);
            frac * c0 + (1.0 - frac) * c1
        } else {
            c0
        }
    }
}

// ---------------------------------------------------------------------------
// Channel
// ---------------------------------------------------------------------------

/// One discrete multipath tap.
///
/// `gain_db` is the received power the tap should register at the
/// correlator, in dB relative to 1 mW. Delays quantize to the chip grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelTap {
    pub delay_ns: f64,
    pub gain_db: f64,
    pub phase_deg: f64,
}

/// Superpose delayed, scaled, phase-rotated copies of the chip stream, with
/// optional white Gaussian noise at the configured SNR.
///
/// The output has the same length as the input; samples before a tap's
/// arrival are unaffected by it. Tap delays must fit inside one sequence
/// period of the configured generator.
pub fn apply_channel(
    tx_waveform: &[f64],
    taps: &[ChannelTap],
    config: &SounderConfig,
) -> Result<Vec<Complex64>> {
    config.validate()?;
    if tx_waveform.is_empty() {
        return Err(Error::InvalidData("channel input waveform is empty".into()));
    }
    let chip_ns = config.chip_ns();
    let period_ns = ((1u64 << config.pn_degree) - 1) as f64 * chip_ns;
    let spc = config.samples_per_chip as usize;

    let mut rx = vec![Complex64::new(0.0, 0.0); tx_waveform.len()];
    let mut total_power_mw = 0.0;
    for tap in taps {
        if tap.delay_ns < 0.0 || !tap.delay_ns.is_finite() {
            return Err(Error::Config(format!(
                "tap delay must be non-negative, got {} ns",
                tap.delay_ns
            )));
        }
        if tap.delay_ns >= period_ns {
            return Err(Error::Config(format!(
                "tap delay {} ns does not fit inside one sequence period ({period_ns} ns)",
                tap.delay_ns
            )));
        }
        let delay_chips = (tap.delay_ns / chip_ns).round() as usize;
        let delay_samples = delay_chips * spc;
        let amp = 10f64.powf(tap.gain_db / 20.0);
        total_power_mw += amp * amp;
        let rot = Complex64::from_polar(amp, tap.phase_deg.to_radians());
        for n in delay_samples..tx_waveform.len() {
            rx[n] += rot * tx_waveform[n - delay_samples];
        }
    }

    if let Some(snr_db) = config.noise_snr_db {
        let noise_power = total_power_mw / 10f64.powf(snr_db / 10.0);
        let sigma = (noise_power / 2.0).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
        let normal = Normal::new(0.0, sigma).map_err(|e| Error::Config(e.to_string()))?;
        for sample in &mut rx {
            *sample += Complex64::new(normal.sample(&mut rng), normal.sample(&mut rng));
        }
    }
    Ok(rx)
}

// ---------------------------------------------------------------------------
// Sliding correlation
// ---------------------------------------------------------------------------

/// Despread a received waveform against the slow-clocked replica and return
/// the power delay profile.
///
/// The observed correlation time of bin `j` is `j / (tx_rate - rx_rate)`
/// seconds; dividing by the slide factor turns it into the true excess delay
/// `j` chips, which is what the profile's axis carries. The output is
/// normalized by a unit-tap self-calibration so peak bin power equals the
/// configured tap power, and the noise floor metadata is the median bin.
pub fn sliding_correlate(
    rx_waveform: &[Complex64],
    pn: &PnSequence,
    config: &SounderConfig,
) -> Result<PowerDelayProfile> {
    config.validate()?;
    let n = pn.len();
    let span = config.pdp_span_chips.unwrap_or(n);
    if span == 0 || span > n {
        return Err(Error::Config(format!(
            "PDP span must lie in 1..={n} chips, got {span}"
        )));
    }
    let timing = SlideTiming::new(config, n);
    let required = config.required_samples(n, span);
    if rx_waveform.len() < required {
        return Err(Error::InsufficientData(format!(
            "waveform has {} samples but a {span}-chip profile needs {required} \
             (one dilated replica period per bin)",
            rx_waveform.len()
        )));
    }

    let spc = config.samples_per_chip as usize;
    let window = timing.window_len;

    // Self-calibration: the same windowed product applied to a clean,
    // zero-delay, unit-amplitude tap. Exact for on-grid taps by symmetry.
    let mut cal = 0.0f64;
    for s in 0..window {
        let tx_chip = f64::from(pn.chips()[(s / spc) % n]);
        cal += tx_chip * timing.replica_weight(pn.chips(), s);
    }
    cal /= window as f64;
    if cal.abs() < 1e-12 {
        return Err(Error::Config(
            "correlator calibration collapsed; check the clock configuration".into(),
        ));
    }

    let chip_ns = config.chip_ns();
    let mut power_mw = Vec::with_capacity(span);
    let mut delays = Vec::with_capacity(span);
    for bin in 0..span {
        let start = timing.window_start(bin);
        let mut acc = Complex64::new(0.0, 0.0);
        for (s, sample) in rx_waveform.iter().enumerate().skip(start).take(window) {
            acc += sample * timing.replica_weight(pn.chips(), s);
        }
        let amplitude = acc / (window as f64 * cal);
        power_mw.push(amplitude.norm_sqr());
        delays.push(bin as f64 * chip_ns);
    }

    let mut sorted = power_mw.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let noise_floor_dbm = if median > 0.0 {
        10.0 * median.log10()
    } else {
        f64::NEG_INFINITY
    };

    PowerDelayProfile::new(delays, power_mw, noise_floor_dbm, chip_ns)
}

// ---------------------------------------------------------------------------
// Sweep synthesis
// ---------------------------------------------------------------------------

/// Rectangular-cone antenna: full gain inside the half-power beamwidth,
/// a flat sidelobe floor outside.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConeAntenna {
    pub hpbw_deg: f64,
    /// Gain outside the cone relative to boresight, dB.
    pub sidelobe_rel_db: f64,
}

impl ConeAntenna {
    pub fn new(hpbw_deg: f64) -> Self {
        Self {
            hpbw_deg,
            sidelobe_rel_db: -30.0,
        }
    }

    pub fn with_sidelobe(hpbw_deg: f64, sidelobe_rel_db: f64) -> Self {
        Self {
            hpbw_deg,
            sidelobe_rel_db,
        }
    }

    /// Gain relative to boresight at an angular offset.
    pub fn relative_gain_db(&self, offset_deg: f64) -> f64 {
        if offset_deg.abs() <= self.hpbw_deg / 2.0 {
            0.0
        } else {
            self.sidelobe_rel_db
        }
    }

    fn captures(&self, offset_deg: f64) -> bool {
        offset_deg.abs() <= self.hpbw_deg / 2.0
    }
}

/// Great-circle angle between two pointing directions, degrees.
pub fn angular_offset_deg(az_a_deg: f64, el_a_deg: f64, az_b_deg: f64, el_b_deg: f64) -> f64 {
    let (el_a, el_b) = (el_a_deg.to_radians(), el_b_deg.to_radians());
    let daz = (az_a_deg - az_b_deg).to_radians();
    let c = el_a.sin() * el_b.sin() + el_a.cos() * el_b.cos() * daz.cos();
    c.clamp(-1.0, 1.0).acos().to_degrees()
}

/// Scene description for sweep synthesis.
#[derive(Debug, Clone)]
pub struct SweepSynthesis {
    pub geometry: LinkGeometry,
    pub canopy: Vec<CanopySpan>,
    pub material: GroundMaterial,
    pub alpha_db_per_m: f64,
    pub link: LinkBudgetParams,
    pub antenna: ConeAntenna,
    pub angular_step_deg: f64,
    pub scenario: Scenario,
    pub fresnel_form: FresnelForm,
}

struct SceneRay {
    tx_el_deg: f64,
    rx_el_deg: f64,
    power_dbm: f64,
    delay_ns: f64,
    phase_deg: f64,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Synthesize a directional sweep with known ground truth.
///
/// The channel has a direct ray and a specular ground-bounce ray. Free-space
/// sweeps carry no foliage attenuation; foliage and ground-reflection sweeps
/// attenuate the direct ray by `alpha * separation` (the excess-loss model)
/// and the bounce ray by `alpha` times its canopy path length. The bounce
/// amplitude comes from the parallel Fresnel coefficient at the specular
/// incident angle; a coefficient of zero removes the ray entirely.
///
/// The receiver sweeps a full azimuth circle at the scenario's elevation row
/// (boresight-aligned for free-space and foliage, ground-pointing for
/// ground-reflection sweeps, matching how such campaigns are run). A record
/// is kept only when some ray falls inside the main lobe of both antennas --
/// the synthetic counterpart of recording a profile only where energy is
/// detected. Each kept record's profile is produced through
/// [`apply_channel`] and [`sliding_correlate`], with a per-record noise seed
/// derived from `(rng_seed, record index)` so parallel and serial generation
/// agree.
pub fn synthesize_sweep(synth: &SweepSynthesis, config: &SounderConfig) -> Result<SweepSet> {
    config.validate()?;
    let step = synth.angular_step_deg;
    if step <= 0.0 || (360.0 / step).fract().abs() > 1e-9 {
        return Err(Error::InvalidScene(format!(
            "angular step must divide 360 degrees, got {step}"
        )));
    }
    let geom = &synth.geometry;
    let gb = geom.ground_bounce();

    // Direct ray: boresight-to-boresight pointing.
    let tx_el_direct = geom.direct_tx_elevation_deg();
    let rx_el_direct = -tx_el_direct;
    let foliage_active = synth.scenario != Scenario::FreeSpace;
    let direct_power = friis_received_power(&synth.link, geom.separation_m)?
        - if foliage_active {
            synth.alpha_db_per_m * geom.separation_m
        } else {
            0.0
        };
    let lambda = synth.link.wavelength_m();
    let mut rays = vec![SceneRay {
        tx_el_deg: tx_el_direct,
        rx_el_deg: rx_el_direct,
        power_dbm: direct_power,
        delay_ns: 0.0,
        phase_deg: -360.0 * (geom.direct_path_m() / lambda).fract(),
    }];

    // Ground-bounce ray, when the ground reflects at all.
    let gamma = fresnel_parallel(&synth.material, gb.incident_deg, synth.fresnel_form)?;
    if gamma.abs() > 0.0 {
        let d_fol = if foliage_active {
            canopy_path_length(&synth.canopy, geom, RayPath::GroundBounce)?
        } else {
            0.0
        };
        let power = friis_received_power(&synth.link, gb.d_tot_m)?
            - synth.alpha_db_per_m * d_fol
            + 20.0 * gamma.abs().log10();
        let mut phase = -360.0 * (gb.d_tot_m / lambda).fract();
        if gamma < 0.0 {
            phase += 180.0;
        }
        rays.push(SceneRay {
            tx_el_deg: gb.tx_downtilt_deg,
            rx_el_deg: gb.rx_downtilt_deg,
            power_dbm: power,
            delay_ns: gb.excess_delay_ns(geom),
            phase_deg: phase,
        });
    }

    // Elevation row swept by this scenario; the TX stays fixed on it.
    let (row_tx_el, row_rx_el) = match synth.scenario {
        Scenario::FreeSpace | Scenario::Foliage => (tx_el_direct, rx_el_direct),
        Scenario::GroundReflection => (gb.tx_downtilt_deg, gb.rx_downtilt_deg),
    };

    let pn = config.pn()?;
    let chip_ns = config.chip_ns();
    let span = config.pdp_span_chips.unwrap_or_else(|| {
        let max_delay_chips = rays
            .iter()
            .map(|r| (r.delay_ns / chip_ns).round() as usize)
            .max()
            .unwrap_or(0);
        (max_delay_chips + 8).max(16).min(pn.len())
    });
    let mut record_config = config.clone();
    record_config.pdp_span_chips = Some(span);
    let tx_wave = pn.chip_waveform(
        config.samples_per_chip,
        record_config.required_samples(pn.len(), span),
    );

    let steps = (360.0 / step).round() as usize;
    let mut records = Vec::new();
    for az_index in 0..steps {
        let rx_az = az_index as f64 * step;
        let mut taps = Vec::new();
        let mut main_lobe = false;
        for ray in &rays {
            // The TX points along azimuth 0 (toward the RX); the RX azimuth
            // is measured from its boresight-to-TX direction. Both rays
            // travel in the vertical plane of the link, azimuth 0.
            let tx_off = angular_offset_deg(0.0, row_tx_el, 0.0, ray.tx_el_deg);
            let rx_off = angular_offset_deg(rx_az, row_rx_el, 0.0, ray.rx_el_deg);
            if synth.antenna.captures(tx_off) && synth.antenna.captures(rx_off) {
                main_lobe = true;
            }
            let gain_db = ray.power_dbm
                + synth.antenna.relative_gain_db(tx_off)
                + synth.antenna.relative_gain_db(rx_off);
            if gain_db.is_finite() {
                taps.push(ChannelTap {
                    delay_ns: ray.delay_ns,
                    gain_db,
                    phase_deg: ray.phase_deg,
                });
            }
        }
        if !main_lobe {
            continue;
        }
        record_config.rng_seed =
            splitmix64(config.rng_seed ^ splitmix64(records.len() as u64 + 1));
        let rx_wave = apply_channel(&tx_wave, &taps, &record_config)?;
        let pdp = sliding_correlate(&rx_wave, &pn, &record_config)?;
        let record = SweepRecord {
            tx_az_deg: 0.0,
            tx_el_deg: row_tx_el,
            rx_az_deg: rx_az,
            rx_el_deg: row_rx_el,
            polarization: Polarization::Vv,
            distance_m: geom.separation_m,
            pdp,
        };
        // Keep only records that actually detect energy.
        if pdp_total_power(&record.pdp, DEFAULT_DETECTION_THRESHOLD_DB)? > 0.0 {
            records.push(record);
        }
    }

    SweepSet::new(
        records,
        synth.link.tx_gain_dbi,
        synth.link.rx_gain_dbi,
        synth.link.tx_power_dbm,
        synth.scenario,
    )
}

/// Expected excess delay of the ground bounce for a scene, ns.
pub fn bounce_excess_delay_ns(geom: &LinkGeometry) -> f64 {
    propagation_delay_ns(geom.ground_bounce().d_tot_m - geom.direct_path_m())
}
