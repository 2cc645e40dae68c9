//! Athlete kinematics from pitch-coordinate trajectories.
//!
//! This crate turns per-frame athlete positions (as produced by broadcast
//! tracking pipelines) into temporally consistent speed and acceleration
//! signals, builds acceleration-speed profiles with their fatigue-related
//! indicators, and evaluates predicted kinematics against ground truth.
//!
//! Pipeline stages, each its own module:
//!
//! - [`model`]: domain types, gap interpolation and segmentation
//! - [`ingest`]: trajectory file parsing and predicted-to-truth track matching
//! - [`smoothing`]: Kalman and Savitzky-Golay temporal filters
//! - [`kinematics`]: windowed differentiation and signal post-processing
//! - [`asprofile`]: acceleration-speed profile construction
//! - [`metrics`]: agreement metrics, reliability scores, stratification
//! - [`synth`]: synthetic scenarios with closed-form kinematics (test oracle)
//! - [`golden`]: fixture verification with per-file-type comparison

pub mod kinematics;
pub mod model;
pub mod smoothing;

pub use model::{AthleteId, FrameClock, PositionSample, Segment, Trajectory, TrajectorySet};
