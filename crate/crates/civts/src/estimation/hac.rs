//! Bartlett-kernel long-run variance (Newey-West) for IV moment conditions.

use nalgebra::{DMatrix, DVector};

/// The standard Newey-West bandwidth rule `floor(4 * (n / 100)^(2/9))`.
pub fn newey_west_bandwidth(n: usize) -> usize {
    (4.0 * (n as f64 / 100.0).powf(2.0 / 9.0)).floor() as usize
}

/// Long-run covariance of the moment series `m_t * u_t`, where `moments` is
/// n x k and `residuals` has length n:
///
/// `S = G_0 + sum_{l=1..L} w_l (G_l + G_l')`, `w_l = 1 - l / (L + 1)`,
/// `G_l = (1/n) sum_t s_t s_{t-l}'`.
///
/// Bandwidth 0 keeps only the lag-0 term, which is the
/// heteroskedasticity-robust (White) variance.
pub fn hac_covariance(moments: &DMatrix<f64>, residuals: &DVector<f64>, bandwidth: usize) -> DMatrix<f64> {
    let (n, k) = moments.shape();
    assert_eq!(n, residuals.len(), "hac: row mismatch");
    let mut scores = moments.clone();
    for t in 0..n {
        let u = residuals[t];
        scores.row_mut(t).scale_mut(u);
    }
    let mut total = scores.transpose() * &scores / n as f64;
    let max_lag = bandwidth.min(n.saturating_sub(1));
    for lag in 1..=max_lag {
        let w = 1.0 - lag as f64 / (bandwidth as f64 + 1.0);
        let g = scores.rows(lag, n - lag).transpose() * scores.rows(0, n - lag) / n as f64;
        total += (&g + g.transpose()) * w;
    }
    // Guard against asymmetry from floating-point accumulation.
    let sym = (&total + total.transpose()) * 0.5;
    let _ = k;
    sym
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn bandwidth_rule_reference_values() {
        assert_eq!(newey_west_bandwidth(100), 4);
        assert_eq!(newey_west_bandwidth(500), 5);
        assert_eq!(newey_west_bandwidth(1_000), 6);
        assert_eq!(newey_west_bandwidth(43_800), 15);
    }

    #[test]
    fn bandwidth_zero_is_white() {
        let n = 200;
        let m = DMatrix::from_fn(n, 1, |i, _| ((i % 7) as f64) - 3.0);
        let u = DVector::from_fn(n, |i, _| ((i % 5) as f64) - 2.0);
        let white = hac_covariance(&m, &u, 0);
        let direct: f64 = (0..n).map(|t| (m[(t, 0)] * u[t]).powi(2)).sum::<f64>() / n as f64;
        assert!((white[(0, 0)] - direct).abs() < 1e-12);
    }

    #[test]
    fn iid_scores_close_to_white() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let n = 20_000;
        let m = DMatrix::from_fn(n, 1, |_, _| rng.sample::<f64, _>(StandardNormal));
        let u = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let white = hac_covariance(&m, &u, 0)[(0, 0)];
        let hac = hac_covariance(&m, &u, newey_west_bandwidth(n))[(0, 0)];
        assert!((hac / white - 1.0).abs() < 0.10, "hac/white = {}", hac / white);
    }

    #[test]
    fn autocorrelated_scores_inflate_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let n = 20_000;
        // AR(1) residuals with coefficient 0.8, constant moment.
        let mut u = DVector::zeros(n);
        for t in 1..n {
            u[t] = 0.8 * u[t - 1] + rng.sample::<f64, _>(StandardNormal);
        }
        let m = DMatrix::from_element(n, 1, 1.0);
        let white = hac_covariance(&m, &u, 0)[(0, 0)];
        let hac = hac_covariance(&m, &u, newey_west_bandwidth(n))[(0, 0)];
        assert!(hac > 2.0 * white, "hac = {hac}, white = {white}");
    }

    #[test]
    fn result_is_symmetric_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 500;
        let m = DMatrix::from_fn(n, 3, |_, _| rng.sample::<f64, _>(StandardNormal));
        let u = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let s = hac_covariance(&m, &u, 6);
        assert!((s.clone() - s.transpose()).amax() < 1e-12);
        let eig = s.symmetric_eigenvalues();
        assert!(eig.iter().all(|&e| e > -1e-8), "eigenvalues {eig:?}");
    }
}
