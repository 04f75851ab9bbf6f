//! Per-frame and per-study energy accounting.
//!
//! Internal arithmetic uses integer nanojoules and microseconds so study
//! totals add up with zero residual; reports surface microjoules. Capture
//! costs come straight from the demonstrator's measured module table;
//! compression and transmission are power x time products, with compression
//! runtime following a monotonically decreasing exponential in the achieved
//! compression ratio.

use alloc::vec::Vec;

use crate::controller::{
    missed_pathologies, run_trace, CaptureSchedule, ControllerConfig, StudyTrace,
};
use crate::error::{Error, Result};

/// Sensor exposure/readout time per capture, in microseconds (12.79 ms).
pub const CAPTURE_US: i64 = 12_790;

/// Power and energy constants of the modeled capsule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyModel {
    /// Image sensor energy per capture, nJ.
    pub capture_sensor_nj: i64,
    /// Illumination LEDs energy per capture, nJ.
    pub capture_leds_nj: i64,
    /// Core energy during capture, nJ.
    pub capture_core_nj: i64,
    /// Core power while compressing, microwatts.
    pub compression_power_uw: i64,
    /// Transceiver power while transmitting, microwatts.
    pub transceiver_power_uw: i64,
    /// Whole-system idle power, microwatts.
    pub idle_power_uw: i64,
    /// Radio throughput, bits per second. Calibrated so a raw frame takes
    /// 50 ms on air; the real link budget is not published.
    pub radio_bits_per_sec: i64,
    /// Uncompressed frame size in bits (320 x 320 x 8 by default).
    pub frame_bits: i64,
}

impl Default for EnergyModel {
    fn default() -> Self {
        Self {
            capture_sensor_nj: 108_930,
            capture_leds_nj: 189_150,
            capture_core_nj: 13_560,
            compression_power_uw: 1_060,
            transceiver_power_uw: 5_000,
            idle_power_uw: 430,
            radio_bits_per_sec: 16_384_000,
            frame_bits: 819_200,
        }
    }
}

impl EnergyModel {
    pub fn validate(&self) -> Result<()> {
        let all_positive = self.capture_sensor_nj > 0
            && self.capture_leds_nj > 0
            && self.capture_core_nj > 0
            && self.compression_power_uw > 0
            && self.transceiver_power_uw > 0
            && self.idle_power_uw > 0
            && self.radio_bits_per_sec > 0
            && self.frame_bits > 0;
        if all_positive {
            Ok(())
        } else {
            Err(Error::BadParameter("energy model values must be positive"))
        }
    }

    /// Energy of one capture event: sensor + LEDs + core.
    pub fn capture_total_nj(&self) -> i64 {
        self.capture_sensor_nj + self.capture_leds_nj + self.capture_core_nj
    }

    /// Air time for `bits` of payload, rounded to whole microseconds.
    pub fn transmission_us(&self, bits: f64) -> i64 {
        libm::round(bits * 1e6 / self.radio_bits_per_sec as f64) as i64
    }
}

/// Compression runtime model: IT(CR) = a * exp(-b * (CR - CR0)) + c, in
/// milliseconds, clamped to the saturation value a + c below CR0 so the
/// runtime stays within the measured range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuntimeModel {
    pub a_ms: f64,
    pub b_per_cr: f64,
    pub cr0: f64,
    pub c_ms: f64,
}

impl Default for RuntimeModel {
    fn default() -> Self {
        Self {
            a_ms: 45.0,
            b_per_cr: 0.35,
            cr0: 2.0,
            c_ms: 50.0,
        }
    }
}

impl RuntimeModel {
    /// Compression duration for one frame at the given CR, milliseconds.
    pub fn it_ms(&self, cr: f64) -> f64 {
        let x = if cr > self.cr0 { cr - self.cr0 } else { 0.0 };
        self.a_ms * libm::exp(-self.b_per_cr * x) + self.c_ms
    }

    pub fn it_us(&self, cr: f64) -> i64 {
        libm::round(self.it_ms(cr) * 1000.0) as i64
    }
}

/// nJ = uW * us / 1000, rounded to the nearest nanojoule.
#[inline]
fn energy_nj(power_uw: i64, time_us: i64) -> i64 {
    (power_uw * time_us + 500) / 1000
}

/// Energy breakdown of a single frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameEnergy {
    pub capture_nj: i64,
    pub compression_nj: i64,
    pub transmission_nj: i64,
    /// Time the frame keeps the system active (capture + compress + send).
    pub active_us: i64,
}

impl FrameEnergy {
    pub fn total_nj(&self) -> i64 {
        self.capture_nj + self.compression_nj + self.transmission_nj
    }
}

/// Energy of capturing, optionally compressing, and transmitting one frame.
pub fn frame_energy(
    cr: f64,
    compressed: bool,
    model: &EnergyModel,
    runtime: &RuntimeModel,
) -> Result<FrameEnergy> {
    if cr <= 0.0 || cr.is_nan() {
        return Err(Error::BadParameter("CR must be positive"));
    }
    let capture_nj = model.capture_total_nj();
    if compressed {
        let it_us = runtime.it_us(cr);
        let tx_us = model.transmission_us(model.frame_bits as f64 / cr);
        Ok(FrameEnergy {
            capture_nj,
            compression_nj: energy_nj(model.compression_power_uw, it_us),
            transmission_nj: energy_nj(model.transceiver_power_uw, tx_us),
            active_us: CAPTURE_US + it_us + tx_us,
        })
    } else {
        let tx_us = model.transmission_us(model.frame_bits as f64);
        Ok(FrameEnergy {
            capture_nj,
            compression_nj: 0,
            transmission_nj: energy_nj(model.transceiver_power_uw, tx_us),
            active_us: CAPTURE_US + tx_us,
        })
    }
}

/// Component totals of one simulated variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VariantEnergy {
    pub capture_nj: i64,
    pub compression_nj: i64,
    pub transmission_nj: i64,
    pub idle_nj: i64,
    pub frames_captured: usize,
}

impl VariantEnergy {
    pub fn total_nj(&self) -> i64 {
        self.capture_nj + self.compression_nj + self.transmission_nj + self.idle_nj
    }

    pub fn total_uj(&self) -> f64 {
        self.total_nj() as f64 / 1000.0
    }

    fn add_frame(&mut self, fe: &FrameEnergy) {
        self.capture_nj += fe.capture_nj;
        self.compression_nj += fe.compression_nj;
        self.transmission_nj += fe.transmission_nj;
        self.frames_captured += 1;
    }
}

/// Study-level totals for the three policies plus their reductions against
/// the uncompressed baseline.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyReport {
    pub baseline: VariantEnergy,
    pub compression_only: VariantEnergy,
    pub controller: VariantEnergy,
    pub reduction_compression_pct: f64,
    pub reduction_controller_pct: f64,
}

fn reduction_pct(baseline_nj: i64, variant_nj: i64) -> f64 {
    if baseline_nj == 0 {
        0.0
    } else {
        100.0 * (baseline_nj - variant_nj) as f64 / baseline_nj as f64
    }
}

/// Walks one study at the nominal cadence and accounts all three variants:
/// transmit-raw baseline, compress-every-frame, and compress-with-controller
/// (capturing only the scheduled frames). Idle power fills all inactive time
/// of the fixed study duration.
pub fn simulate_study(
    trace: &StudyTrace,
    schedule: &CaptureSchedule,
    config: &ControllerConfig,
    model: &EnergyModel,
    runtime: &RuntimeModel,
) -> Result<EnergyReport> {
    model.validate()?;
    config.validate()?;
    if trace.is_empty() {
        return Ok(EnergyReport {
            baseline: VariantEnergy::default(),
            compression_only: VariantEnergy::default(),
            controller: VariantEnergy::default(),
            reduction_compression_pct: 0.0,
            reduction_controller_pct: 0.0,
        });
    }
    trace.validate()?;
    let period_us = libm::round(1e6 / config.nominal_fps) as i64;
    let duration_us = period_us * trace.len() as i64;

    let mut baseline = VariantEnergy::default();
    let mut compression_only = VariantEnergy::default();
    let mut controller = VariantEnergy::default();
    let mut active = [0i64; 3];

    for frame in &trace.frames {
        let raw = frame_energy(1.0, false, model, runtime)?;
        baseline.add_frame(&raw);
        active[0] += raw.active_us;

        let comp = frame_energy(frame.cr, true, model, runtime)?;
        compression_only.add_frame(&comp);
        active[1] += comp.active_us;
    }
    for capture in &schedule.captures {
        let frame = trace
            .frames
            .get(capture.index)
            .ok_or(Error::BadParameter("schedule index outside trace"))?;
        let fe = frame_energy(frame.cr, true, model, runtime)?;
        controller.add_frame(&fe);
        active[2] += fe.active_us;
    }

    for (variant, used) in [&mut baseline, &mut compression_only, &mut controller]
        .into_iter()
        .zip(active)
    {
        let idle_us = (duration_us - used).max(0);
        variant.idle_nj = energy_nj(model.idle_power_uw, idle_us);
    }

    Ok(EnergyReport {
        baseline,
        compression_only,
        controller,
        reduction_compression_pct: reduction_pct(baseline.total_nj(), compression_only.total_nj()),
        reduction_controller_pct: reduction_pct(baseline.total_nj(), controller.total_nj()),
    })
}

/// One cell of a (threshold x reduced rate) sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepCell {
    pub cr_threshold: f64,
    pub reduced_fps: f64,
    pub missed_pathologies: usize,
    pub skipped_frames: usize,
    pub controller_total_nj: i64,
    pub reduction_controller_pct: f64,
}

/// Evaluates the controller over every (threshold, reduced rate) pair.
/// Output is row-major by threshold.
pub fn sweep(
    trace: &StudyTrace,
    thresholds: &[f64],
    reduced_rates: &[f64],
    base: &ControllerConfig,
    model: &EnergyModel,
    runtime: &RuntimeModel,
) -> Result<Vec<SweepCell>> {
    let mut cells = Vec::with_capacity(thresholds.len() * reduced_rates.len());
    for &cr_threshold in thresholds {
        for &reduced_fps in reduced_rates {
            let config = ControllerConfig {
                nominal_fps: base.nominal_fps,
                reduced_fps,
                cr_threshold,
            };
            let schedule = run_trace(trace, &config)?;
            let report = simulate_study(trace, &schedule, &config, model, runtime)?;
            cells.push(SweepCell {
                cr_threshold,
                reduced_fps,
                missed_pathologies: missed_pathologies(trace, &schedule),
                skipped_frames: schedule.skipped(trace.len()),
                controller_total_nj: report.controller.total_nj(),
                reduction_controller_pct: report.reduction_controller_pct,
            });
        }
    }
    Ok(cells)
}
