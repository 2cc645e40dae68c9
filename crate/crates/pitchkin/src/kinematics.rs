//! Windowed differentiation of smoothed trajectories into speed and
//! acceleration signals.
//!
//! Frame-to-frame differences at broadcast frame rates act as a high-pass
//! filter and amplify localization noise, especially in the second
//! derivative. Velocity is therefore estimated over a symmetric temporal
//! window of `half_window_frames` frames on each side:
//!
//! `v(t_k) = (p(t_{k+}) - p(t_{k-})) / (t_{k+} - t_{k-})`
//!
//! with `k- = max(k - l, first)` and `k+ = min(k + l, last)` clamped to the
//! segment bounds, and acceleration computed analogously from the velocity
//! series. No value ever depends on samples from a different segment.

use crate::model::{AthleteId, FrameClock, Segment, Trajectory};
use crate::smoothing::{smooth_segment, SmoothingConfig, SmoothingError, SmoothingMethod};
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum KinematicsError {
    #[error("invalid kinematics config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Smoothing(#[from] SmoothingError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicsConfig {
    /// Half-window in frames on each side of the differentiation point.
    pub half_window_frames: u32,
    /// Speeds above this are discarded as unrealistic jumps.
    pub speed_cap_mps: f64,
    /// Width parameter of the central moving average applied to the
    /// acceleration signal.
    pub accel_ma_window: u32,
}

impl Default for KinematicsConfig {
    fn default() -> Self {
        KinematicsConfig {
            half_window_frames: 20,
            speed_cap_mps: 15.0,
            accel_ma_window: 20,
        }
    }
}

impl KinematicsConfig {
    pub fn with_half_window(half_window_frames: u32) -> Self {
        KinematicsConfig {
            half_window_frames,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        if self.half_window_frames < 1 {
            return Err(KinematicsError::InvalidConfig(
                "half_window_frames must be >= 1".into(),
            ));
        }
        if !(self.speed_cap_mps.is_finite() && self.speed_cap_mps > 0.0) {
            return Err(KinematicsError::InvalidConfig(format!(
                "speed_cap_mps must be positive, got {}",
                self.speed_cap_mps
            )));
        }
        if self.accel_ma_window < 1 {
            return Err(KinematicsError::InvalidConfig(
                "accel_ma_window must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// A 2-D vector sample on the frame grid (velocity or acceleration).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VectorSample {
    pub frame: u32,
    pub x: f64,
    pub y: f64,
}

impl VectorSample {
    pub fn magnitude(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// Windowed symmetric difference over a contiguous vector series. The window
/// is clamped to the series bounds (never crossing a gap, since a series
/// spans exactly one segment) and the denominator is the actual timestamp
/// difference. Series shorter than 2 produce no output.
fn windowed_derivative(
    series: &[VectorSample],
    half_window_frames: u32,
    clock: &FrameClock,
) -> Vec<VectorSample> {
    if series.len() < 2 {
        return Vec::new();
    }
    let first = series[0].frame;
    let last = series[series.len() - 1].frame;
    series
        .iter()
        .map(|s| {
            let k_minus = s.frame.saturating_sub(half_window_frames).max(first);
            let k_plus = s.frame.saturating_add(half_window_frames).min(last);
            let a = &series[(k_minus - first) as usize];
            let b = &series[(k_plus - first) as usize];
            let dt = clock.timestamp(k_plus) - clock.timestamp(k_minus);
            VectorSample {
                frame: s.frame,
                x: (b.x - a.x) / dt,
                y: (b.y - a.y) / dt,
            }
        })
        .collect()
}

/// Per-frame velocity vectors of one segment.
pub fn differentiate(
    segment: &Segment,
    half_window_frames: u32,
    clock: &FrameClock,
) -> Vec<VectorSample> {
    let series: Vec<VectorSample> = segment
        .samples
        .iter()
        .map(|s| VectorSample {
            frame: s.frame,
            x: s.x,
            y: s.y,
        })
        .collect();
    windowed_derivative(&series, half_window_frames, clock)
}

/// Per-frame acceleration vectors from a velocity series, with the identical
/// clamped-window contract.
pub fn differentiate_velocity(
    velocity: &[VectorSample],
    half_window_frames: u32,
    clock: &FrameClock,
) -> Vec<VectorSample> {
    windowed_derivative(velocity, half_window_frames, clock)
}

/// One per-frame kinematics entry. Values are magnitudes of the 2-D vectors;
/// invalid entries keep their computed value but must be ignored downstream.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicsEntry {
    pub frame: u32,
    pub speed_mps: f64,
    pub accel_mps2: f64,
    pub speed_valid: bool,
    pub accel_valid: bool,
}

/// Inclusive frame bounds of one segment that produced kinematics output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentSpan {
    pub first_frame: u32,
    pub last_frame: u32,
}

/// Per-frame speed and acceleration of one athlete with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicsSeries {
    pub athlete_id: AthleteId,
    pub clock: FrameClock,
    pub smoothing: SmoothingMethod,
    pub config: KinematicsConfig,
    pub entries: Vec<KinematicsEntry>,
    pub segments: Vec<SegmentSpan>,
    /// Segments of length 1 that could not be differentiated.
    pub short_segments_skipped: u32,
    /// Segments too short for the Savitzky-Golay window, passed through
    /// unsmoothed.
    pub smoothing_passthroughs: u32,
}

impl KinematicsSeries {
    /// Frames with a valid speed, as (frame, speed) pairs.
    pub fn valid_speed(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries
            .iter()
            .filter(|e| e.speed_valid)
            .map(|e| (e.frame, e.speed_mps))
    }

    /// Frames with a valid acceleration, as (frame, accel) pairs.
    pub fn valid_accel(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.entries
            .iter()
            .filter(|e| e.accel_valid)
            .map(|e| (e.frame, e.accel_mps2))
    }

    /// Frames where both signals are valid.
    pub fn valid_frames(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| e.speed_valid && e.accel_valid)
            .count()
    }
}

/// Applies the two post-processing steps to one segment's velocity and
/// acceleration vectors:
///
/// 1. speeds above the cap are marked invalid (unrealistic jumps);
/// 2. the acceleration vectors are smoothed with a central moving average
///    (half the window width on each side, clamped at segment edges), and
///    entries whose averaging window touches a frame with invalid speed are
///    marked invalid.
pub fn postprocess(
    velocity: &[VectorSample],
    accel: &[VectorSample],
    config: &KinematicsConfig,
) -> Vec<KinematicsEntry> {
    debug_assert_eq!(velocity.len(), accel.len());
    let n = velocity.len();
    if n == 0 {
        return Vec::new();
    }

    let speed_valid: Vec<bool> = velocity
        .iter()
        .map(|v| v.magnitude() <= config.speed_cap_mps)
        .collect();

    let half = (config.accel_ma_window / 2) as usize;
    (0..n)
        .map(|i| {
            let lo = i.saturating_sub(half);
            let hi = (i + half).min(n - 1);
            let count = (hi - lo + 1) as f64;
            let (mut sx, mut sy) = (0.0, 0.0);
            let mut window_valid = true;
            for a in &accel[lo..=hi] {
                sx += a.x;
                sy += a.y;
            }
            for valid in &speed_valid[lo..=hi] {
                window_valid &= valid;
            }
            KinematicsEntry {
                frame: velocity[i].frame,
                speed_mps: velocity[i].magnitude(),
                accel_mps2: (sx / count).hypot(sy / count),
                speed_valid: speed_valid[i],
                accel_valid: window_valid,
            }
        })
        .collect()
}

/// Full per-athlete pipeline: segment, smooth, differentiate twice, then
/// post-process. Ground-truth series use the same differentiation with
/// `SmoothingMethod::None`.
pub fn compute_kinematics(
    trajectory: &Trajectory,
    max_gap_frames: u32,
    smoothing: &SmoothingConfig,
    config: &KinematicsConfig,
) -> Result<KinematicsSeries, KinematicsError> {
    config.validate()?;
    let clock = trajectory.clock;
    let mut entries = Vec::new();
    let mut spans = Vec::new();
    let mut short_skipped = 0u32;
    let mut passthroughs = 0u32;

    for seg in crate::model::segment(trajectory, max_gap_frames) {
        if seg.len() < 2 {
            short_skipped += 1;
            continue;
        }
        let smoothed = smooth_segment(&seg, smoothing, clock.frame_rate_hz)?;
        if smoothed.passthrough {
            passthroughs += 1;
        }
        let velocity = differentiate(&smoothed.segment, config.half_window_frames, &clock);
        let accel = differentiate_velocity(&velocity, config.half_window_frames, &clock);
        entries.extend(postprocess(&velocity, &accel, config));
        spans.push(SegmentSpan {
            first_frame: seg.first_frame,
            last_frame: seg.last_frame,
        });
    }

    Ok(KinematicsSeries {
        athlete_id: trajectory.athlete_id.clone(),
        clock,
        smoothing: smoothing.method,
        config: *config,
        entries,
        segments: spans,
        short_segments_skipped: short_skipped,
        smoothing_passthroughs: passthroughs,
    })
}

/// Writes a series as CSV with columns
/// `frame,t_s,speed_mps,accel_mps2,valid_speed,valid_accel`.
pub fn write_series_csv<W: Write>(series: &KinematicsSeries, mut w: W) -> std::io::Result<()> {
    writeln!(w, "frame,t_s,speed_mps,accel_mps2,valid_speed,valid_accel")?;
    for e in &series.entries {
        writeln!(
            w,
            "{},{:.9},{:.9},{:.9},{},{}",
            e.frame,
            series.clock.timestamp(e.frame),
            e.speed_mps,
            e.accel_mps2,
            e.speed_valid,
            e.accel_valid
        )?;
    }
    Ok(())
}
