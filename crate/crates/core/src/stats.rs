//! Goodness-of-fit and time-series helpers for the Monte Carlo checks.

use serde::{Deserialize, Serialize};

/// One-sample Kolmogorov–Smirnov distance between `samples` and `cdf`.
/// Sorts `samples` in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let above = (i + 1) as f64 / n - f;
            let below = f - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Asymptotic critical value of the KS distance at significance `alpha`,
/// `sqrt(-ln(alpha/2)/2) / (sqrt(n) + 0.12 + 0.11/sqrt(n))`.
pub fn ks_critical_value(n: usize, alpha: f64) -> f64 {
    let c = (-(alpha / 2.0).ln() / 2.0).sqrt();
    let root = (n as f64).sqrt();
    c / (root + 0.12 + 0.11 / root)
}

/// Significance level used throughout the acceptance checks.
pub const KS_ALPHA: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub quantity: String,
    pub statistic: f64,
    pub critical: f64,
    pub samples: usize,
    pub seed: u64,
}

impl KsReport {
    pub fn new<F: Fn(f64) -> f64>(quantity: &str, samples: &mut [f64], cdf: F, seed: u64) -> Self {
        let statistic = ks_statistic(samples, cdf);
        Self {
            quantity: quantity.to_string(),
            statistic,
            critical: ks_critical_value(samples.len(), KS_ALPHA),
            samples: samples.len(),
            seed,
        }
    }

    pub fn passed(&self) -> bool {
        self.statistic < self.critical
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean of a stationary series with a batch-means standard error.
pub fn mean_with_batch_se(series: &[f64], batches: usize) -> (f64, f64) {
    let m = mean(series);
    let len = series.len() / batches;
    let batch_means: Vec<f64> = series.chunks_exact(len).take(batches).map(mean).collect();
    let b = batch_means.len() as f64;
    let var = batch_means.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (b - 1.0);
    (m, (var / b).sqrt())
}

/// Lag-`lag` sample autocorrelation with a batch-means standard error.
///
/// The estimate is the ratio of whole-series lagged and unlagged sums about
/// the overall mean; the error comes from the linearized ratio over
/// `batches` contiguous blocks.
pub fn autocorrelation_with_se(series: &[f64], lag: usize, batches: usize) -> (f64, f64) {
    let m = mean(series);
    let usable = series.len() - lag;
    let len = usable / batches;
    let mut cross = Vec::with_capacity(batches);
    let mut square = Vec::with_capacity(batches);
    for b in 0..batches {
        let (mut c, mut s) = (0.0, 0.0);
        for t in b * len..(b + 1) * len {
            let d = series[t] - m;
            c += d * (series[t + lag] - m);
            s += d * d;
        }
        cross.push(c / len as f64);
        square.push(s / len as f64);
    }
    let rho = cross.iter().sum::<f64>() / square.iter().sum::<f64>();
    let z: Vec<f64> = cross
        .iter()
        .zip(&square)
        .map(|(c, s)| c - rho * s)
        .collect();
    let zbar = mean(&z);
    let nb = batches as f64;
    let var = z.iter().map(|x| (x - zbar) * (x - zbar)).sum::<f64>() / (nb - 1.0);
    let se = (var / nb).sqrt() / mean(&square);
    (rho, se)
}
