//! Savitzky-Golay smoothing: least-squares polynomial convolution weights.

use super::{SavgolParams, SmoothingError};
use crate::model::Segment;

/// Convolution weights of the Savitzky-Golay smoother: fit a polynomial of
/// `poly_order` over offsets `-h..=h` (window = 2h+1) by least squares and
/// evaluate it at the centre. Weights are symmetric and sum to 1.
pub fn savgol_coefficients(window: usize, poly_order: usize) -> Vec<f64> {
    assert!(window % 2 == 1 && window > poly_order);
    let h = (window / 2) as i64;
    let m = poly_order + 1;

    // Gram matrix G[r][c] = sum_j j^(r+c) over offsets j in -h..=h.
    let mut moments = vec![0.0; 2 * m - 1];
    for j in -h..=h {
        let mut p = 1.0;
        for moment in moments.iter_mut() {
            *moment += p;
            p *= j as f64;
        }
    }
    let mut gram = vec![vec![0.0; m]; m];
    for r in 0..m {
        for c in 0..m {
            gram[r][c] = moments[r + c];
        }
    }

    // Solve G y = e0; weight for offset j is then sum_r y[r] * j^r.
    let mut rhs = vec![0.0; m];
    rhs[0] = 1.0;
    let y = solve_small(gram, rhs);

    (-h..=h)
        .map(|j| {
            let mut p = 1.0;
            let mut w = 0.0;
            for &yr in &y {
                w += yr * p;
                p *= j as f64;
            }
            w
        })
        .collect()
}

/// Gaussian elimination with partial pivoting for the small (order+1)-sized
/// normal-equation systems. Window sizes are tiny, so stability is a
/// non-issue at these dimensions.
fn solve_small(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        for row in (col + 1)..n {
            let factor = a[row][col] / diag;
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Applies the filter to one segment. Edges use mirror padding of
/// `(window - 1) / 2` samples (reflection about the edge sample, which is not
/// repeated), preserving the segment length.
pub fn savgol_smooth(segment: &Segment, params: &SavgolParams) -> Result<Segment, SmoothingError> {
    let n = segment.len();
    debug_assert!(n >= params.window);
    let weights = savgol_coefficients(params.window, params.poly_order);
    let h = (params.window / 2) as i64;

    let xs: Vec<f64> = segment.samples.iter().map(|s| s.x).collect();
    let ys: Vec<f64> = segment.samples.iter().map(|s| s.y).collect();

    let mut out = segment.clone();
    for i in 0..n {
        let mut x = 0.0;
        let mut y = 0.0;
        for (t, w) in weights.iter().enumerate() {
            let idx = mirror_index(i as i64 + t as i64 - h, n);
            x += w * xs[idx];
            y += w * ys[idx];
        }
        if !(x.is_finite() && y.is_finite()) {
            return Err(SmoothingError::NonFiniteOutput {
                frame: out.samples[i].frame,
            });
        }
        out.samples[i].x = x;
        out.samples[i].y = y;
    }
    Ok(out)
}

/// Mirror reflection without repeating the edge sample:
/// indices ..., 2, 1, [0, 1, ..., n-1], n-2, n-3, ...
fn mirror_index(i: i64, n: usize) -> usize {
    let n = n as i64;
    let i = if i < 0 { -i } else { i };
    let i = if i >= n { 2 * (n - 1) - i } else { i };
    debug_assert!((0..n).contains(&i));
    i as usize
}

#[cfg(test)]
mod tests {
    use super::super::tests::segment_from_xy;
    use super::*;

    #[test]
    fn weights_are_the_classic_quadratic_nine_point_kernel() {
        // Known closed form: [-21, 14, 39, 54, 59, 54, 39, 14, -21] / 231.
        let expected: Vec<f64> = [-21.0, 14.0, 39.0, 54.0, 59.0, 54.0, 39.0, 14.0, -21.0]
            .iter()
            .map(|v| v / 231.0)
            .collect();
        let got = savgol_coefficients(9, 2);
        for (g, e) in got.iter().zip(&expected) {
            assert!((g - e).abs() < 1e-12, "{g} vs {e}");
        }
        let sum: f64 = got.iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_variance_reduction_matches_squared_weight_sum() {
        // Interior output variance ratio for white noise is sum of squared
        // weights: 13629 / 53361 = 0.25541... for window 9, order 2.
        let w = savgol_coefficients(9, 2);
        let ss: f64 = w.iter().map(|c| c * c).sum();
        assert!((ss - 13629.0 / 53361.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_path_is_reproduced_exactly_at_interior_points() {
        let pts: Vec<(f64, f64)> = (0..40)
            .map(|k| {
                let t = k as f64 / 25.0;
                (t * t, 3.0 - 0.5 * t * t)
            })
            .collect();
        let seg = segment_from_xy(&pts);
        let out = savgol_smooth(&seg, &SavgolParams::default()).unwrap();
        for i in 4..36 {
            assert!((out.samples[i].x - seg.samples[i].x).abs() <= 1e-9);
            assert!((out.samples[i].y - seg.samples[i].y).abs() <= 1e-9);
        }
    }

    #[test]
    fn polynomial_reproduction_holds_for_every_order() {
        for (window, order) in [(5usize, 2usize), (7, 3), (11, 4)] {
            let pts: Vec<(f64, f64)> = (0..50)
                .map(|k| {
                    let t = k as f64 * 0.1;
                    // degree == order polynomial in x
                    let x = (0..=order).map(|p| 0.3 * t.powi(p as i32)).sum::<f64>();
                    (x, 1.0)
                })
                .collect();
            let seg = segment_from_xy(&pts);
            let out = savgol_smooth(
                &seg,
                &SavgolParams {
                    window,
                    poly_order: order,
                },
            )
            .unwrap();
            let h = window / 2;
            for i in h..(50 - h) {
                assert!(
                    (out.samples[i].x - seg.samples[i].x).abs() <= 1e-9,
                    "window {window} order {order} index {i}"
                );
            }
        }
    }

    #[test]
    fn mirror_index_reflects_both_edges() {
        assert_eq!(mirror_index(-1, 10), 1);
        assert_eq!(mirror_index(-4, 10), 4);
        assert_eq!(mirror_index(0, 10), 0);
        assert_eq!(mirror_index(9, 10), 9);
        assert_eq!(mirror_index(10, 10), 8);
        assert_eq!(mirror_index(12, 10), 6);
    }
}
