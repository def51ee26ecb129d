//! Sample statistics: autocorrelation, AR fitting, summary tables.

use super::ScmError;
use crate::linalg;
use nalgebra::{DMatrix, DVector};

/// Sample autocorrelation of `x` at `lag` (biased normalization, the
/// standard ACF estimator).
pub fn observed_autocorrelation(x: &[f64], lag: usize) -> Result<f64, ScmError> {
    if x.len() <= lag {
        return Err(ScmError::SeriesTooShort { lag, len: x.len() });
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let denom: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    if denom == 0.0 {
        return Err(ScmError::ConstantSeries);
    }
    let num: f64 = (lag..x.len())
        .map(|t| (x[t] - mean) * (x[t - lag] - mean))
        .sum();
    Ok(num / denom)
}

/// An AR(L) fit by ordinary least squares on lagged regressors
/// (conditional least squares, exact on finite samples rather than
/// Yule-Walker's moment matching).
#[derive(Debug, Clone, PartialEq)]
pub struct ArFit {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
    /// Residual standard deviation (innovation scale).
    pub innovation_sd: f64,
}

/// Fit an AR model of the given order. Order 0 returns an empty coefficient
/// vector (the series is treated as i.i.d. around its mean).
pub fn fit_ar(x: &[f64], order: usize) -> Result<ArFit, ScmError> {
    if order >= x.len() {
        return Err(ScmError::OrderTooLarge { order, len: x.len() });
    }
    if order == 0 {
        let n = x.len() as f64;
        let mean = x.iter().sum::<f64>() / n;
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
        return Ok(ArFit { coefficients: vec![], intercept: mean, innovation_sd: var.sqrt() });
    }
    let rows = x.len() - order;
    let mut design = DMatrix::<f64>::zeros(rows, order + 1);
    let mut target = DVector::<f64>::zeros(rows);
    for r in 0..rows {
        let t = r + order;
        design[(r, 0)] = 1.0;
        for j in 0..order {
            design[(r, j + 1)] = x[t - 1 - j];
        }
        target[r] = x[t];
    }
    let (coef, rank) = linalg::lstsq_vec(&design, &target);
    if rank < order + 1 {
        return Err(ScmError::SingularDesign);
    }
    let resid = &target - &design * &coef;
    let innovation_sd = (resid.norm_squared() / rows as f64).sqrt();
    Ok(ArFit {
        coefficients: coef.as_slice()[1..].to_vec(),
        intercept: coef[0],
        innovation_sd,
    })
}

/// Summary statistics in the shape of a market-data overview table.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStats {
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

/// Mean, standard deviation, min, median, max, skewness, and excess
/// kurtosis of a series (NaN entries are skipped).
pub fn summary_stats(x: &[f64]) -> SummaryStats {
    let vals: Vec<f64> = x.iter().copied().filter(|v| v.is_finite()).collect();
    let n = vals.len() as f64;
    if vals.is_empty() {
        return SummaryStats {
            mean: f64::NAN,
            std_dev: f64::NAN,
            min: f64::NAN,
            median: f64::NAN,
            max: f64::NAN,
            skewness: f64::NAN,
            kurtosis: f64::NAN,
        };
    }
    let mean = vals.iter().sum::<f64>() / n;
    let m2 = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m3 = vals.iter().map(|v| (v - mean).powi(3)).sum::<f64>() / n;
    let m4 = vals.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let sd = m2.sqrt();
    let mut sorted = vals.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if sorted.len() % 2 == 1 {
        sorted[sorted.len() / 2]
    } else {
        0.5 * (sorted[sorted.len() / 2 - 1] + sorted[sorted.len() / 2])
    };
    SummaryStats {
        mean,
        std_dev: sd,
        min: sorted[0],
        median,
        max: sorted[sorted.len() - 1],
        skewness: if sd > 0.0 { m3 / sd.powi(3) } else { 0.0 },
        kurtosis: if sd > 0.0 { m4 / (m2 * m2) - 3.0 } else { 0.0 },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn white_noise(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
    }

    fn ar_series(coeffs: &[f64], n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = coeffs.len();
        let mut x = vec![0.0f64; n + 500];
        for t in p..x.len() {
            let mut v: f64 = rng.sample(StandardNormal);
            for (j, &c) in coeffs.iter().enumerate() {
                v += c * x[t - 1 - j];
            }
            x[t] = v;
        }
        x.split_off(500)
    }

    #[test]
    fn white_noise_autocorrelation_is_small() {
        let x = white_noise(50_000, 1);
        let r = observed_autocorrelation(&x, 1).unwrap();
        assert!(r.abs() < 3.0 / (x.len() as f64).sqrt(), "r = {r}");
    }

    #[test]
    fn ar1_autocorrelation_matches_coefficient() {
        let x = ar_series(&[0.9], 50_000, 2);
        let r = observed_autocorrelation(&x, 1).unwrap();
        assert!((r - 0.9).abs() < 0.02, "r = {r}");
    }

    #[test]
    fn alternating_series_is_negatively_correlated() {
        let x: Vec<f64> = (0..10_000).map(|t| if t % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = observed_autocorrelation(&x, 1).unwrap();
        assert!((r + 1.0).abs() < 2.0 / 10_000.0_f64.max(1.0) * 2.0, "r = {r}");
    }

    #[test]
    fn constant_series_rejected() {
        assert!(matches!(
            observed_autocorrelation(&[2.0; 100], 1),
            Err(ScmError::ConstantSeries)
        ));
        assert!(matches!(
            observed_autocorrelation(&[1.0, 2.0], 5),
            Err(ScmError::SeriesTooShort { .. })
        ));
    }

    #[test]
    fn fit_ar_recovers_known_coefficients() {
        let truth = [0.5, 0.2, -0.1];
        let x = ar_series(&truth, 100_000, 3);
        let fit = fit_ar(&x, 3).unwrap();
        for (got, want) in fit.coefficients.iter().zip(truth.iter()) {
            assert!((got - want).abs() < 0.02, "got {got}, want {want}");
        }
        assert!((fit.innovation_sd - 1.0).abs() < 0.02);
    }

    #[test]
    fn fit_ar_edge_cases() {
        let x = white_noise(100, 4);
        let fit = fit_ar(&x, 0).unwrap();
        assert!(fit.coefficients.is_empty());
        assert!(matches!(fit_ar(&x, 100), Err(ScmError::OrderTooLarge { .. })));
        assert!(matches!(fit_ar(&[1.0; 50], 2), Err(ScmError::SingularDesign)));
    }

    #[test]
    fn summary_of_simple_series() {
        let s = summary_stats(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert_eq!(s.min, 1.0);
        assert_eq!(s.max, 4.0);
        assert_eq!(s.median, 2.5);
    }
}
