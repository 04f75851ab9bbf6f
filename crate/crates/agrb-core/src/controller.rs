//! Compression-ratio-driven frame-rate control.
//!
//! A frame that compresses poorly is predominantly bubbles, so the capture
//! rate drops to the reduced rate until a captured frame compresses well
//! again. Decisions use only the latest captured frame; skipped frames are
//! never sampled.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Controller parameters. Defaults: 2 fps nominal, 0.67 fps reduced,
/// threshold 3.6.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig {
    pub nominal_fps: f64,
    pub reduced_fps: f64,
    pub cr_threshold: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self {
            nominal_fps: 2.0,
            reduced_fps: 0.67,
            cr_threshold: 3.6,
        }
    }
}

impl ControllerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad_rate = |v: f64| v <= 0.0 || v.is_nan();
        if bad_rate(self.nominal_fps) || bad_rate(self.reduced_fps) {
            return Err(Error::BadParameter("frame rates must be positive"));
        }
        if self.reduced_fps > self.nominal_fps {
            return Err(Error::BadParameter("reduced rate above nominal rate"));
        }
        if self.cr_threshold <= 1.0 || self.cr_threshold.is_nan() {
            return Err(Error::BadParameter("CR threshold must exceed 1"));
        }
        Ok(())
    }
}

/// Capture mode after observing a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Normal,
    Reduced,
}

/// Decides the mode and next capture interval from one observed CR.
/// A CR exactly at the threshold keeps the normal rate.
pub fn step(config: &ControllerConfig, observed_cr: f64) -> (Mode, f64) {
    if observed_cr < config.cr_threshold {
        (Mode::Reduced, 1.0 / config.reduced_fps)
    } else {
        (Mode::Normal, 1.0 / config.nominal_fps)
    }
}

/// One source frame of a study trace, recorded at the nominal rate.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFrame {
    pub cr: f64,
    pub pathology: bool,
    pub view_label: Option<String>,
}

/// A study: per-frame compression ratios with optional labels.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct StudyTrace {
    pub frames: Vec<TraceFrame>,
}

impl StudyTrace {
    pub fn from_crs(crs: &[f64]) -> Self {
        StudyTrace {
            frames: crs
                .iter()
                .map(|&cr| TraceFrame {
                    cr,
                    pathology: false,
                    view_label: None,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn validate(&self) -> Result<()> {
        if self.frames.is_empty() {
            return Err(Error::EmptyInput("trace has no frames"));
        }
        if self.frames.iter().any(|f| f.cr <= 0.0 || f.cr.is_nan()) {
            return Err(Error::BadParameter("trace CR must be positive"));
        }
        Ok(())
    }

    /// Maximal runs of consecutive pathology-labeled frames, as
    /// (first, last) inclusive index pairs.
    pub fn pathology_episodes(&self) -> Vec<(usize, usize)> {
        let mut episodes = Vec::new();
        let mut start = None;
        for (i, f) in self.frames.iter().enumerate() {
            match (f.pathology, start) {
                (true, None) => start = Some(i),
                (false, Some(s)) => {
                    episodes.push((s, i - 1));
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(s) = start {
            episodes.push((s, self.frames.len() - 1));
        }
        episodes
    }
}

/// One capture decision: which source frame was sampled and the mode the
/// controller entered after observing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Capture {
    pub index: usize,
    pub mode: Mode,
}

/// The set of captured source-frame indices for one run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CaptureSchedule {
    pub captures: Vec<Capture>,
}

impl CaptureSchedule {
    pub fn indices(&self) -> Vec<usize> {
        self.captures.iter().map(|c| c.index).collect()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.captures
            .binary_search_by_key(&index, |c| c.index)
            .is_ok()
    }

    pub fn skipped(&self, trace_len: usize) -> usize {
        trace_len - self.captures.len()
    }
}

/// Simulates capture times from t = 0: a capture at time t samples the source
/// frame floor(t * nominal_fps) and that frame's CR sets the next interval.
/// Deterministic; capture indices are strictly increasing.
pub fn run_trace(trace: &StudyTrace, config: &ControllerConfig) -> Result<CaptureSchedule> {
    config.validate()?;
    trace.validate()?;
    let mut schedule = CaptureSchedule::default();
    let mut t = 0.0f64;
    loop {
        let index = libm::floor(t * config.nominal_fps) as usize;
        if index >= trace.frames.len() {
            break;
        }
        let (mode, interval) = step(config, trace.frames[index].cr);
        schedule.captures.push(Capture { index, mode });
        t += interval;
    }
    Ok(schedule)
}

/// Counts pathology episodes with no captured frame inside them.
pub fn missed_pathologies(trace: &StudyTrace, schedule: &CaptureSchedule) -> usize {
    trace
        .pathology_episodes()
        .iter()
        .filter(|&&(first, last)| {
            !schedule
                .captures
                .iter()
                .any(|c| c.index >= first && c.index <= last)
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_examples() {
        let cfg = ControllerConfig::default();
        let (mode, dt) = step(&cfg, 5.0);
        assert_eq!(mode, Mode::Normal);
        assert_eq!(dt, 0.5);
        let (mode, dt) = step(&cfg, 2.0);
        assert_eq!(mode, Mode::Reduced);
        assert!((dt - 1.4925373134328357).abs() < 1e-12);
        // tie goes to the normal rate
        let (mode, _) = step(&cfg, 3.6);
        assert_eq!(mode, Mode::Normal);
    }

    #[test]
    fn config_validation() {
        assert!(ControllerConfig::default().validate().is_ok());
        let bad = ControllerConfig {
            reduced_fps: 3.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ControllerConfig {
            cr_threshold: 1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = ControllerConfig {
            nominal_fps: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn all_high_cr_trace_captures_everything() {
        let trace = StudyTrace::from_crs(&[5.0; 20]);
        let schedule = run_trace(&trace, &ControllerConfig::default()).unwrap();
        assert_eq!(schedule.indices(), (0..20).collect::<Vec<_>>());
        assert!(schedule.captures.iter().all(|c| c.mode == Mode::Normal));
    }

    #[test]
    fn reference_trace_schedule() {
        // hand simulation with the defaults:
        // t=0.0    -> idx 0, cr 5 -> NORMAL,  next +0.5
        // t=0.5    -> idx 1, cr 5 -> NORMAL,  next +0.5
        // t=1.0    -> idx 2, cr 2 -> REDUCED, next +1.4925...
        // t=2.4925 -> idx 4, cr 2 -> REDUCED, next +1.4925...
        // t=3.9851 -> idx 7 = past the end
        let trace = StudyTrace::from_crs(&[5.0, 5.0, 2.0, 2.0, 2.0, 5.0, 5.0]);
        let schedule = run_trace(&trace, &ControllerConfig::default()).unwrap();
        assert_eq!(schedule.indices(), vec![0, 1, 2, 4]);
        assert_eq!(
            schedule.captures.iter().map(|c| c.mode).collect::<Vec<_>>(),
            vec![Mode::Normal, Mode::Normal, Mode::Reduced, Mode::Reduced]
        );
        assert_eq!(schedule.skipped(trace.len()), 3);
    }

    #[test]
    fn degenerate_reduced_rate_equals_baseline() {
        let cfg = ControllerConfig {
            reduced_fps: 2.0,
            ..Default::default()
        };
        let trace = StudyTrace::from_crs(&[1.5; 30]);
        let schedule = run_trace(&trace, &cfg).unwrap();
        assert_eq!(schedule.indices(), (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn recovery_is_immediate_on_a_good_frame() {
        // after the reduced-cadence jump lands on a high-CR frame the very
        // next interval is nominal again
        let trace = StudyTrace::from_crs(&[2.0, 5.0, 5.0, 5.0, 5.0, 5.0]);
        let schedule = run_trace(&trace, &ControllerConfig::default()).unwrap();
        // t=0 idx0 reduced; t=1.4925 idx2 normal; t=1.9925 idx3; ...
        assert_eq!(schedule.indices(), vec![0, 2, 3, 4, 5]);
        assert_eq!(schedule.captures[1].mode, Mode::Normal);
    }

    #[test]
    fn empty_trace_is_rejected() {
        let trace = StudyTrace::default();
        assert!(run_trace(&trace, &ControllerConfig::default()).is_err());
    }

    #[test]
    fn episode_grouping() {
        let mut trace = StudyTrace::from_crs(&[5.0; 10]);
        for i in [2usize, 3, 4, 7, 9] {
            trace.frames[i].pathology = true;
        }
        assert_eq!(trace.pathology_episodes(), vec![(2, 4), (7, 7), (9, 9)]);
    }

    #[test]
    fn missed_pathology_counting() {
        let mut trace = StudyTrace::from_crs(&[5.0; 8]);
        trace.frames[3].pathology = true; // single-frame episode
        trace.frames[5].pathology = true;
        trace.frames[6].pathology = true; // two-frame episode

        // full schedule misses nothing
        let full = CaptureSchedule {
            captures: (0..8)
                .map(|index| Capture {
                    index,
                    mode: Mode::Normal,
                })
                .collect(),
        };
        assert_eq!(missed_pathologies(&trace, &full), 0);

        // schedule that skips index 3 misses the single-frame episode
        let partial = CaptureSchedule {
            captures: [0usize, 1, 2, 4, 5, 7]
                .iter()
                .map(|&index| Capture {
                    index,
                    mode: Mode::Normal,
                })
                .collect(),
        };
        assert_eq!(missed_pathologies(&trace, &partial), 1);

        // one captured frame inside a multi-frame episode is enough
        let sparse = CaptureSchedule {
            captures: [0usize, 6]
                .iter()
                .map(|&index| Capture {
                    index,
                    mode: Mode::Normal,
                })
                .collect(),
        };
        assert_eq!(missed_pathologies(&trace, &sparse), 1);
    }

    #[test]
    fn schedules_are_deterministic() {
        let crs: Vec<f64> = (0..200)
            .map(|i| if i % 7 < 3 { 2.2 } else { 5.5 })
            .collect();
        let trace = StudyTrace::from_crs(&crs);
        let cfg = ControllerConfig::default();
        let a = run_trace(&trace, &cfg).unwrap();
        let b = run_trace(&trace, &cfg).unwrap();
        assert_eq!(a, b);
    }
}
