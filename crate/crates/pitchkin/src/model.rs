//! Core domain types: frame clock, position samples, trajectories and segments.
//!
//! All positions live in a single canonical frame: metres on the pitch plane,
//! origin at the pitch centre, x along the touchline (long side), y along the
//! goal line (short side). Ingestion converts any source convention into this
//! frame so every downstream computation works on one coordinate system.
//!
//! Timestamps are never stored per sample; they are always derived from the
//! [`FrameClock`] as `t_k = k / f` for 1-based frame index `k`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Position bound along x: half pitch length plus tolerance margin.
pub const MAX_ABS_X_M: f64 = 80.0;
/// Position bound along y: half pitch width plus tolerance margin.
pub const MAX_ABS_Y_M: f64 = 60.0;

/// Default maximum gap length (in missing frames) bridged by interpolation.
/// 3 frames is 0.12 s at 25 fps.
pub const DEFAULT_MAX_GAP_FRAMES: u32 = 3;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("frame rate must be positive and finite, got {0}")]
    InvalidFrameRate(f64),
    #[error("frame count must be positive")]
    InvalidFrameCount,
    #[error("trajectory {athlete} has no observed samples")]
    NoObservedSamples { athlete: AthleteId },
    #[error("trajectory {athlete}: frame indices not strictly increasing at frame {frame}")]
    NonIncreasingFrames { athlete: AthleteId, frame: u32 },
    #[error("trajectory {athlete}: non-finite position at frame {frame}")]
    NonFinitePosition { athlete: AthleteId, frame: u32 },
    #[error(
        "trajectory {athlete}: position ({x:.2}, {y:.2}) at frame {frame} outside pitch bounds \
         (|x| <= {MAX_ABS_X_M}, |y| <= {MAX_ABS_Y_M})"
    )]
    OutOfBounds {
        athlete: AthleteId,
        frame: u32,
        x: f64,
        y: f64,
    },
    #[error("frame {frame} outside clock range 1..={frame_count}")]
    FrameOutOfRange { frame: u32, frame_count: u32 },
}

/// Opaque athlete identifier (track id, optionally enriched with team/jersey).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AthleteId(pub String);

impl AthleteId {
    pub fn new(id: impl Into<String>) -> Self {
        AthleteId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for AthleteId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AthleteId {
    fn from(s: &str) -> Self {
        AthleteId(s.to_string())
    }
}

/// Sampling clock of one sequence: frame rate `f` and frame count `T`.
/// Frame indices are 1-based; `timestamp(k) = k / f`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameClock {
    pub frame_rate_hz: f64,
    pub frame_count: u32,
}

impl FrameClock {
    pub fn new(frame_rate_hz: f64, frame_count: u32) -> Result<Self, ModelError> {
        if !(frame_rate_hz.is_finite() && frame_rate_hz > 0.0) {
            return Err(ModelError::InvalidFrameRate(frame_rate_hz));
        }
        if frame_count == 0 {
            return Err(ModelError::InvalidFrameCount);
        }
        Ok(FrameClock {
            frame_rate_hz,
            frame_count,
        })
    }

    /// Timestamp in seconds of a 1-based frame index.
    pub fn timestamp(&self, frame: u32) -> f64 {
        f64::from(frame) / self.frame_rate_hz
    }

    /// Frame period in seconds.
    pub fn dt(&self) -> f64 {
        1.0 / self.frame_rate_hz
    }
}

/// Provenance of one per-frame position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleStatus {
    Observed,
    Interpolated,
    Missing,
}

/// One per-frame position in canonical pitch coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositionSample {
    pub frame: u32,
    pub x: f64,
    pub y: f64,
    pub status: SampleStatus,
}

impl PositionSample {
    pub fn observed(frame: u32, x: f64, y: f64) -> Self {
        PositionSample {
            frame,
            x,
            y,
            status: SampleStatus::Observed,
        }
    }

    pub fn is_present(&self) -> bool {
        self.status != SampleStatus::Missing
    }
}

/// Optional identity labels attached to a track by the upstream producer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrackLabels {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub team: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jersey: Option<String>,
}

/// Discrete trajectory of one athlete. Samples are ordered by frame index;
/// frames absent from `samples` are missing (not in view / not detected).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub athlete_id: AthleteId,
    #[serde(default)]
    pub labels: TrackLabels,
    pub samples: Vec<PositionSample>,
    pub clock: FrameClock,
}

impl Trajectory {
    /// Validates the trajectory invariants: strictly increasing frames, at
    /// least one observed sample, finite in-bounds positions for every
    /// present sample.
    pub fn new(
        athlete_id: AthleteId,
        labels: TrackLabels,
        samples: Vec<PositionSample>,
        clock: FrameClock,
    ) -> Result<Self, ModelError> {
        let mut prev_frame: Option<u32> = None;
        let mut observed = 0usize;
        for s in &samples {
            if let Some(p) = prev_frame {
                if s.frame <= p {
                    return Err(ModelError::NonIncreasingFrames {
                        athlete: athlete_id,
                        frame: s.frame,
                    });
                }
            }
            prev_frame = Some(s.frame);
            if s.frame == 0 || s.frame > clock.frame_count {
                return Err(ModelError::FrameOutOfRange {
                    frame: s.frame,
                    frame_count: clock.frame_count,
                });
            }
            if s.is_present() {
                if !(s.x.is_finite() && s.y.is_finite()) {
                    return Err(ModelError::NonFinitePosition {
                        athlete: athlete_id,
                        frame: s.frame,
                    });
                }
                if s.x.abs() > MAX_ABS_X_M || s.y.abs() > MAX_ABS_Y_M {
                    return Err(ModelError::OutOfBounds {
                        athlete: athlete_id,
                        frame: s.frame,
                        x: s.x,
                        y: s.y,
                    });
                }
            }
            if s.status == SampleStatus::Observed {
                observed += 1;
            }
        }
        if observed == 0 {
            return Err(ModelError::NoObservedSamples {
                athlete: athlete_id,
            });
        }
        Ok(Trajectory {
            athlete_id,
            labels,
            samples,
            clock,
        })
    }

    /// Samples that carry a position (observed or interpolated).
    pub fn present_samples(&self) -> impl Iterator<Item = &PositionSample> {
        self.samples.iter().filter(|s| s.is_present())
    }

    pub fn observed_count(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.status == SampleStatus::Observed)
            .count()
    }
}

/// Maximal run of consecutive present samples of one athlete: the unit over
/// which smoothing and differentiation operate. Contiguity is guaranteed:
/// every frame in `[first_frame, last_frame]` is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub athlete_id: AthleteId,
    pub first_frame: u32,
    pub last_frame: u32,
    pub samples: Vec<PositionSample>,
}

impl Segment {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Sample at a frame inside the segment bounds.
    pub fn sample_at(&self, frame: u32) -> &PositionSample {
        &self.samples[(frame - self.first_frame) as usize]
    }
}

/// All athlete tracks of one sequence, sorted by athlete id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySet {
    pub clock: FrameClock,
    pub trajectories: Vec<Trajectory>,
}

impl TrajectorySet {
    pub fn new(clock: FrameClock, mut trajectories: Vec<Trajectory>) -> Self {
        trajectories.sort_by(|a, b| a.athlete_id.cmp(&b.athlete_id));
        TrajectorySet {
            clock,
            trajectories,
        }
    }

    pub fn get(&self, id: &AthleteId) -> Option<&Trajectory> {
        self.trajectories
            .binary_search_by(|t| t.athlete_id.cmp(id))
            .ok()
            .map(|i| &self.trajectories[i])
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }
}

/// Pitch coordinate convention of a source file. The canonical internal frame
/// is centre-origin; a corner-origin source is shifted by half the pitch size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PitchConvention {
    pub origin: PitchOrigin,
    pub length_m: f64,
    pub width_m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PitchOrigin {
    Centre,
    Corner,
}

impl Default for PitchConvention {
    fn default() -> Self {
        PitchConvention {
            origin: PitchOrigin::Centre,
            length_m: 105.0,
            width_m: 68.0,
        }
    }
}

impl PitchConvention {
    /// Maps a source-convention point into the canonical centre-origin frame.
    pub fn to_canonical(&self, x: f64, y: f64) -> (f64, f64) {
        match self.origin {
            PitchOrigin::Centre => (x, y),
            PitchOrigin::Corner => (x - self.length_m / 2.0, y - self.width_m / 2.0),
        }
    }
}

/// Splits a trajectory into gap-free segments, linearly interpolating runs of
/// at most `max_gap_frames` missing frames. Longer gaps split the trajectory;
/// no positions are fabricated across them.
///
/// Segments are returned in temporal order and cover every present sample of
/// the input exactly once.
pub fn segment(trajectory: &Trajectory, max_gap_frames: u32) -> Vec<Segment> {
    let present: Vec<&PositionSample> = trajectory.present_samples().collect();
    if present.is_empty() {
        return Vec::new();
    }

    let mut segments = Vec::new();
    let mut run: Vec<PositionSample> = vec![*present[0]];

    for window in present.windows(2) {
        let (prev, next) = (window[0], window[1]);
        let gap = next.frame - prev.frame - 1;
        if gap == 0 {
            run.push(*next);
        } else if gap <= max_gap_frames {
            let span = f64::from(next.frame - prev.frame);
            for k in (prev.frame + 1)..next.frame {
                let w = f64::from(k - prev.frame) / span;
                run.push(PositionSample {
                    frame: k,
                    x: prev.x + w * (next.x - prev.x),
                    y: prev.y + w * (next.y - prev.y),
                    status: SampleStatus::Interpolated,
                });
            }
            run.push(*next);
        } else {
            segments.push(close_run(&trajectory.athlete_id, std::mem::take(&mut run)));
            run.push(*next);
        }
    }
    segments.push(close_run(&trajectory.athlete_id, run));
    segments
}

fn close_run(athlete_id: &AthleteId, samples: Vec<PositionSample>) -> Segment {
    debug_assert!(!samples.is_empty());
    Segment {
        athlete_id: athlete_id.clone(),
        first_frame: samples.first().unwrap().frame,
        last_frame: samples.last().unwrap().frame,
        samples,
    }
}

/// Re-flattens segments into a single sample list (used for re-segmentation
/// and for building trajectories out of smoothed segments).
pub fn flatten_segments(segments: &[Segment]) -> Vec<PositionSample> {
    segments.iter().flat_map(|s| s.samples.clone()).collect()
}
