//! Forward constant-velocity Kalman filter over segment positions.
//!
//! The x and y axes are uncorrelated in both the motion and measurement
//! models, so the 4-state (x, y, vx, vy) filter factors into two independent
//! position-velocity filters. That keeps the covariance algebra explicit.

use super::{KalmanParams, SmoothingError};
use crate::model::Segment;

/// Initial velocity variance in (m/s)^2: deliberately large so the first few
/// measurements dominate the velocity estimate.
const INITIAL_VELOCITY_VAR: f64 = 100.0;

/// One-axis state: position, velocity and their 2x2 covariance.
#[derive(Debug, Clone, Copy)]
struct AxisFilter {
    pos: f64,
    vel: f64,
    p_pp: f64,
    p_pv: f64,
    p_vv: f64,
}

impl AxisFilter {
    fn init(measurement: f64, measurement_var: f64) -> Self {
        AxisFilter {
            pos: measurement,
            vel: 0.0,
            p_pp: measurement_var,
            p_pv: 0.0,
            p_vv: INITIAL_VELOCITY_VAR,
        }
    }

    /// Constant-velocity transition with white-acceleration process noise of
    /// spectral density `q`: Q = q * [dt^3/3, dt^2/2; dt^2/2, dt].
    fn predict(&mut self, dt: f64, q: f64) {
        self.pos += self.vel * dt;
        self.p_pp += dt * (2.0 * self.p_pv + dt * self.p_vv) + q * dt * dt * dt / 3.0;
        self.p_pv += dt * self.p_vv + q * dt * dt / 2.0;
        self.p_vv += q * dt;
    }

    fn update(&mut self, z: f64, r: f64) {
        let s = self.p_pp + r;
        let k_pos = self.p_pp / s;
        let k_vel = self.p_pv / s;
        let innovation = z - self.pos;
        self.pos += k_pos * innovation;
        self.vel += k_vel * innovation;
        let p_pp = self.p_pp;
        let p_pv = self.p_pv;
        self.p_pp = (1.0 - k_pos) * p_pp;
        self.p_pv = (1.0 - k_pos) * p_pv;
        self.p_vv -= k_vel * p_pv;
    }
}

/// Runs the forward (causal) filter over one contiguous segment and replaces
/// each position with the posterior estimate. The state is initialized at
/// the first measurement with zero velocity and large velocity covariance;
/// single-sample segments are returned unchanged.
pub fn kalman_forward(
    segment: &Segment,
    params: &KalmanParams,
    frame_rate_hz: f64,
) -> Result<Segment, SmoothingError> {
    if segment.len() < 2 {
        return Ok(segment.clone());
    }
    let dt = 1.0 / frame_rate_hz;
    let q = params.process_accel_sigma * params.process_accel_sigma;
    let r = params.measurement_sigma_m * params.measurement_sigma_m;

    let mut out = segment.clone();
    let first = &segment.samples[0];
    let mut fx = AxisFilter::init(first.x, r);
    let mut fy = AxisFilter::init(first.y, r);

    for (i, sample) in segment.samples.iter().enumerate().skip(1) {
        fx.predict(dt, q);
        fy.predict(dt, q);
        fx.update(sample.x, r);
        fy.update(sample.y, r);
        if !(fx.pos.is_finite() && fy.pos.is_finite()) {
            return Err(SmoothingError::NonFiniteOutput {
                frame: sample.frame,
            });
        }
        out.samples[i].x = fx.pos;
        out.samples[i].y = fy.pos;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::tests::segment_from_xy;
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    const FPS: f64 = 25.0;

    fn constant_velocity_path(n: usize, vx: f64, vy: f64) -> Vec<(f64, f64)> {
        (0..n)
            .map(|k| {
                let t = k as f64 / FPS;
                (vx * t - 40.0, vy * t)
            })
            .collect()
    }

    #[test]
    fn single_sample_segment_is_unchanged() {
        let seg = segment_from_xy(&[(1.0, 2.0)]);
        let out = kalman_forward(&seg, &KalmanParams::default(), FPS).unwrap();
        assert_eq!(out, seg);
    }

    #[test]
    fn noiseless_constant_velocity_converges_below_a_millimetre() {
        let path = constant_velocity_path(250, 5.0, -2.0);
        let seg = segment_from_xy(&path);
        let out = kalman_forward(&seg, &KalmanParams::default(), FPS).unwrap();
        let max_err = out.samples[125..]
            .iter()
            .zip(&path[125..])
            .map(|(s, &(x, y))| ((s.x - x).powi(2) + (s.y - y).powi(2)).sqrt())
            .fold(0.0, f64::max);
        assert!(max_err < 1e-3, "max error {max_err}");
    }

    #[test]
    fn filtering_reduces_position_rmse_on_noisy_constant_velocity() {
        let sigma = 0.3;
        let truth = constant_velocity_path(300, 4.0, 1.0);
        let mut improved = 0;
        let seeds = 200;
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let noisy: Vec<(f64, f64)> = truth
                .iter()
                .map(|&(x, y)| {
                    (
                        x + sigma * rng.sample::<f64, _>(StandardNormal),
                        y + sigma * rng.sample::<f64, _>(StandardNormal),
                    )
                })
                .collect();
            let seg = segment_from_xy(&noisy);
            let out = kalman_forward(&seg, &KalmanParams::default(), FPS).unwrap();
            let rmse = |pts: &[(f64, f64)]| {
                (pts.iter()
                    .zip(&truth)
                    .map(|(&(x, y), &(tx, ty))| (x - tx).powi(2) + (y - ty).powi(2))
                    .sum::<f64>()
                    / truth.len() as f64)
                    .sqrt()
            };
            let filtered: Vec<(f64, f64)> = out.samples.iter().map(|s| (s.x, s.y)).collect();
            if rmse(&filtered) < rmse(&noisy) {
                improved += 1;
            }
        }
        assert!(
            improved * 100 >= seeds * 95,
            "improved on {improved}/{seeds} seeds"
        );
    }

    #[test]
    fn innovation_sequence_is_zero_mean_on_matched_model_data() {
        // Matched model: true constant velocity plus white measurement noise
        // with the filter's own sigma. The one-step prediction residuals
        // (measurement minus filtered previous position advanced by dt) must
        // average to zero within 3 sigma / sqrt(n).
        let params = KalmanParams::default();
        let sigma = params.measurement_sigma_m;
        let truth = constant_velocity_path(400, 3.0, 0.0);
        let mut sum = 0.0;
        let mut count = 0usize;
        for seed in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let noisy: Vec<(f64, f64)> = truth
                .iter()
                .map(|&(x, y)| (x + sigma * rng.sample::<f64, _>(StandardNormal), y))
                .collect();
            let seg = segment_from_xy(&noisy);
            let out = kalman_forward(&seg, &params, FPS).unwrap();
            // Residuals from the second half, once the gains have settled.
            for i in 200..noisy.len() {
                // Reconstruct the one-step prediction from consecutive
                // posteriors is not directly exposed; use measurement minus
                // posterior as a proxy with the same zero-mean property.
                sum += noisy[i].0 - out.samples[i].x;
                count += 1;
            }
        }
        let mean = sum / count as f64;
        let bound = 3.0 * sigma / (count as f64).sqrt();
        assert!(mean.abs() < bound, "|{mean}| >= {bound}");
    }
}
