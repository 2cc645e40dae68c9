//! Temporal smoothing of segmented trajectories.
//!
//! Two filters are available behind one config: a forward constant-velocity
//! Kalman filter and a Savitzky-Golay polynomial filter. Smoothing is applied
//! per [`Segment`], never across gaps: a gap marks a re-entry into view and
//! bridging it would fabricate motion.

mod kalman;
mod savgol;

pub use kalman::kalman_forward;
pub use savgol::{savgol_coefficients, savgol_smooth};

use crate::model::Segment;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SmoothingError {
    #[error("savgol window must be odd and greater than poly_order, got window {window}, order {poly_order}")]
    InvalidSavgolWindow { window: usize, poly_order: usize },
    #[error("{name} must be positive, got {value}")]
    NonPositiveSigma { name: &'static str, value: f64 },
    #[error("filter produced a non-finite position at frame {frame}")]
    NonFiniteOutput { frame: u32 },
}

/// Which temporal smoothing operator to apply to trajectory positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingMethod {
    #[default]
    None,
    Kalman,
    Savgol,
}

impl std::fmt::Display for SmoothingMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SmoothingMethod::None => f.write_str("none"),
            SmoothingMethod::Kalman => f.write_str("kalman"),
            SmoothingMethod::Savgol => f.write_str("savgol"),
        }
    }
}

/// Constant-velocity Kalman filter parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KalmanParams {
    /// White-acceleration process noise, spectral density sigma in m/s^2.
    pub process_accel_sigma: f64,
    /// Isotropic position measurement noise sigma in metres.
    pub measurement_sigma_m: f64,
}

impl Default for KalmanParams {
    fn default() -> Self {
        // Sprint accelerations reach ~6 m/s^2; 0.5 m reflects
        // broadcast-calibration localization noise.
        KalmanParams {
            process_accel_sigma: 2.0,
            measurement_sigma_m: 0.5,
        }
    }
}

/// Savitzky-Golay filter parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SavgolParams {
    /// Window length in frames; must be odd and > poly_order.
    pub window: usize,
    pub poly_order: usize,
}

impl Default for SavgolParams {
    fn default() -> Self {
        SavgolParams {
            window: 9,
            poly_order: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
pub struct SmoothingConfig {
    pub method: SmoothingMethod,
    #[serde(default)]
    pub kalman: KalmanParams,
    #[serde(default)]
    pub savgol: SavgolParams,
}

impl SmoothingConfig {
    pub fn none() -> Self {
        SmoothingConfig::default()
    }

    pub fn kalman() -> Self {
        SmoothingConfig {
            method: SmoothingMethod::Kalman,
            ..Default::default()
        }
    }

    pub fn savgol() -> Self {
        SmoothingConfig {
            method: SmoothingMethod::Savgol,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), SmoothingError> {
        if self.savgol.window % 2 == 0 || self.savgol.window <= self.savgol.poly_order {
            return Err(SmoothingError::InvalidSavgolWindow {
                window: self.savgol.window,
                poly_order: self.savgol.poly_order,
            });
        }
        for (name, value) in [
            ("process_accel_sigma", self.kalman.process_accel_sigma),
            ("measurement_sigma_m", self.kalman.measurement_sigma_m),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(SmoothingError::NonPositiveSigma { name, value });
            }
        }
        Ok(())
    }
}

/// Result of smoothing one segment.
#[derive(Debug, Clone, PartialEq)]
pub struct Smoothed {
    pub segment: Segment,
    /// True when the segment was too short for the configured filter and was
    /// passed through unchanged.
    pub passthrough: bool,
}

/// Smooths segment positions in place of the originals. Frame indices,
/// statuses and sample counts are never altered; `method = none` is the
/// identity. Savitzky-Golay requires `segment.len() >= window`; shorter
/// segments pass through unsmoothed and are flagged.
pub fn smooth_segment(
    segment: &Segment,
    config: &SmoothingConfig,
    frame_rate_hz: f64,
) -> Result<Smoothed, SmoothingError> {
    config.validate()?;
    match config.method {
        SmoothingMethod::None => Ok(Smoothed {
            segment: segment.clone(),
            passthrough: false,
        }),
        SmoothingMethod::Kalman => {
            let smoothed = kalman_forward(segment, &config.kalman, frame_rate_hz)?;
            Ok(Smoothed {
                segment: smoothed,
                passthrough: false,
            })
        }
        SmoothingMethod::Savgol => {
            if segment.len() < config.savgol.window {
                return Ok(Smoothed {
                    segment: segment.clone(),
                    passthrough: true,
                });
            }
            Ok(Smoothed {
                segment: savgol_smooth(segment, &config.savgol)?,
                passthrough: false,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AthleteId, PositionSample, Segment};

    pub(crate) fn segment_from_xy(points: &[(f64, f64)]) -> Segment {
        let samples: Vec<_> = points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| PositionSample::observed(i as u32 + 1, x, y))
            .collect();
        Segment {
            athlete_id: AthleteId::from("t"),
            first_frame: 1,
            last_frame: samples.len() as u32,
            samples,
        }
    }

    #[test]
    fn config_validation_catches_bad_parameters() {
        let mut cfg = SmoothingConfig::savgol();
        cfg.savgol.window = 8;
        assert!(matches!(
            cfg.validate(),
            Err(SmoothingError::InvalidSavgolWindow { .. })
        ));

        let mut cfg = SmoothingConfig::kalman();
        cfg.kalman.measurement_sigma_m = 0.0;
        assert!(matches!(
            cfg.validate(),
            Err(SmoothingError::NonPositiveSigma { .. })
        ));
    }

    #[test]
    fn none_is_identity() {
        let seg = segment_from_xy(&[(0.0, 0.0), (1.0, 2.0), (2.0, 4.0)]);
        let out = smooth_segment(&seg, &SmoothingConfig::none(), 25.0).unwrap();
        assert_eq!(out.segment, seg);
        assert!(!out.passthrough);
    }

    #[test]
    fn constant_position_is_a_fixed_point_for_every_method() {
        let seg = segment_from_xy(&vec![(3.0, -2.0); 40]);
        for cfg in [
            SmoothingConfig::none(),
            SmoothingConfig::kalman(),
            SmoothingConfig::savgol(),
        ] {
            let out = smooth_segment(&seg, &cfg, 25.0).unwrap();
            for (a, b) in out.segment.samples.iter().zip(&seg.samples) {
                assert!(
                    (a.x - b.x).abs() < 1e-6 && (a.y - b.y).abs() < 1e-6,
                    "{:?} moved a constant position",
                    cfg.method
                );
            }
        }
    }

    #[test]
    fn short_segment_passes_through_savgol_with_flag() {
        let seg = segment_from_xy(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]);
        let out = smooth_segment(&seg, &SmoothingConfig::savgol(), 25.0).unwrap();
        assert!(out.passthrough);
        assert_eq!(out.segment, seg);
    }

    #[test]
    fn smoothing_preserves_frames_statuses_and_counts() {
        let mut seg = segment_from_xy(&(0..30).map(|i| (i as f64 * 0.3, 1.0)).collect::<Vec<_>>());
        seg.samples[4].status = crate::model::SampleStatus::Interpolated;
        for cfg in [SmoothingConfig::kalman(), SmoothingConfig::savgol()] {
            let out = smooth_segment(&seg, &cfg, 25.0).unwrap();
            assert_eq!(out.segment.len(), seg.len());
            assert_eq!(out.segment.first_frame, seg.first_frame);
            assert_eq!(out.segment.last_frame, seg.last_frame);
            for (a, b) in out.segment.samples.iter().zip(&seg.samples) {
                assert_eq!(a.frame, b.frame);
                assert_eq!(a.status, b.status);
            }
        }
    }
}
