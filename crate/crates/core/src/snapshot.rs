//! Fixed-time (snapshot) laws: connectivity, component counts, degrees and
//! the extreme distances `c_n` and `b_n`.
//!
//! In a snapshot the interior gaps are independent exponentials, so every
//! quantity here reduces to independent threshold indicators or sums of
//! exponentials.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::RandomStream;
use crate::special::{erlang_cdf, ln_factorial, poisson_pmf};

/// Law of the number of successes among independent Bernoulli trials with
/// the given success probabilities. Entry `k` is `P(k successes)`.
pub fn poisson_binomial(probs: &[f64]) -> Vec<f64> {
    let mut pmf = vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (used, &q) in probs.iter().enumerate() {
        for k in (0..=used + 1).rev() {
            let stay = if k <= used { (1.0 - q) * pmf[k] } else { 0.0 };
            let step = if k > 0 { q * pmf[k - 1] } else { 0.0 };
            pmf[k] = stay + step;
        }
    }
    pmf
}

fn exceedance_probs(params: &ModelParams, y: f64) -> Vec<f64> {
    params
        .interior_rates()
        .iter()
        .map(|&rate| (-rate * y).exp())
        .collect()
}

fn log_all_below(params: &ModelParams, y: f64) -> f64 {
    params
        .interior_rates()
        .iter()
        .map(|&rate| (-(-rate * y).exp()).ln_1p())
        .sum()
}

/// `P_n(C) = prod_{l=1}^{n-1} (1 - e^{-rate_l r})`.
pub fn connectivity_probability(params: &ModelParams) -> f64 {
    log_all_below(params, params.r()).exp()
}

/// `psi_n(k)` for `k = 1..=n`, returned at index `k - 1`.
pub fn component_pmf(params: &ModelParams) -> Vec<f64> {
    poisson_binomial(&exceedance_probs(params, params.r()))
}

/// Probability of exactly `k` components, each with `m` vertices.
pub fn equal_size_components_probability(params: &ModelParams, k: usize, m: usize) -> Result<f64> {
    if k == 0 || m == 0 {
        return Err(Error::InvalidParams(format!(
            "k and m must be positive, got k = {k}, m = {m}"
        )));
    }
    if k * m != params.n() {
        return Ok(0.0);
    }
    let r = params.r();
    let log_prob: f64 = params
        .interior_rates()
        .iter()
        .enumerate()
        .map(|(idx, &rate)| {
            let l = idx + 1;
            if l % m == 0 {
                -rate * r
            } else {
                (-(-rate * r).exp()).ln_1p()
            }
        })
        .sum();
    Ok(log_prob.exp())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeFlavor {
    ClosedForm,
    ExactOracle,
}

/// Which closed-form class produced a degree probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeClass {
    Endpoint,
    Interior,
    NearBoundary,
    /// No class applied unambiguously; the exact value was substituted.
    Fallback,
    Exact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreePmf {
    /// 1-based vertex index.
    pub vertex: usize,
    pub flavor: DegreeFlavor,
    /// `probs[k] = P(d_i = k)`, `k = 0..n`.
    pub probs: Vec<f64>,
    pub classes: Vec<DegreeClass>,
}

impl DegreePmf {
    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

fn homogeneous_rate(params: &ModelParams, what: &str) -> Result<f64> {
    params.common_interior_rate().ok_or_else(|| {
        Error::Unsupported(format!(
            "{what} requires a common rate on all interior gaps"
        ))
    })
}

fn check_vertex(params: &ModelParams, i: usize) -> Result<()> {
    if i == 0 || i > params.n() {
        return Err(Error::IndexOutOfRange {
            index: i,
            n: params.n(),
        });
    }
    Ok(())
}

/// Three-class closed form for the degree of vertex `i`.
///
/// Endpoints are `Poisson(rate r)`; for `k+1 <= i <= n-k` the law is
/// `Poisson(2 rate r)`; for `2 <= i <= k` (mirrored for `i >= n+1-k`) it is
/// `e^{-2 rate r} (rate r)^k / k! * sum_{j<i} C(k, j)`. Where both boundary
/// conditions hold at once the exact value is used and tagged
/// [`DegreeClass::Fallback`].
pub fn degree_pmf_closed_form(params: &ModelParams, i: usize) -> Result<DegreePmf> {
    let rate = homogeneous_rate(params, "the degree closed form")?;
    check_vertex(params, i)?;
    let n = params.n();
    let lr = rate * params.r();
    let mut exact: Option<DegreePmf> = None;
    let mut probs = Vec::with_capacity(n);
    let mut classes = Vec::with_capacity(n);
    for k in 0..n {
        let (value, class) = if i == 1 || i == n {
            (poisson_pmf(k, lr), DegreeClass::Endpoint)
        } else if k < i && i + k <= n {
            (poisson_pmf(k, 2.0 * lr), DegreeClass::Interior)
        } else {
            let left_near = i <= k;
            let right_near = n + 1 - i <= k;
            match (left_near, right_near) {
                (true, false) => (near_boundary(k, i, lr), DegreeClass::NearBoundary),
                (false, true) => (near_boundary(k, n + 1 - i, lr), DegreeClass::NearBoundary),
                _ => {
                    let exact = match &exact {
                        Some(e) => e,
                        None => exact.insert(degree_pmf_exact(params, i)?),
                    };
                    (exact.probs[k], DegreeClass::Fallback)
                }
            }
        };
        probs.push(value);
        classes.push(class);
    }
    Ok(DegreePmf {
        vertex: i,
        flavor: DegreeFlavor::ClosedForm,
        probs,
        classes,
    })
}

fn near_boundary(k: usize, i: usize, lr: f64) -> f64 {
    let ln_k = ln_factorial(k);
    let terms: Vec<f64> = (0..i.min(k + 1))
        .map(|j| ln_k - ln_factorial(j) - ln_factorial(k - j))
        .collect();
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ln_sum = top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln();
    (-2.0 * lr + k as f64 * lr.ln() - ln_k + ln_sum).exp()
}

/// Exact finite-`n` degree law of vertex `i`.
///
/// Left and right degrees are independent. With `m` vertices on a side,
/// `P(side >= j) = G_j(r)`, the CDF at `r` of a sum of `j` exponentials, so
/// `P(side = j) = G_j - G_{j+1}` for `j < m` and `P(side = m) = G_m`. The
/// degree law is the convolution of the two sides.
pub fn degree_pmf_exact(params: &ModelParams, i: usize) -> Result<DegreePmf> {
    let rate = homogeneous_rate(params, "the exact degree law")?;
    check_vertex(params, i)?;
    let n = params.n();
    let r = params.r();
    let side = |m: usize| -> Vec<f64> {
        let g: Vec<f64> = (0..=m + 1).map(|j| erlang_cdf(j, rate, r)).collect();
        (0..=m)
            .map(|j| if j < m { g[j] - g[j + 1] } else { g[m] })
            .collect()
    };
    let left = side(i - 1);
    let right = side(n - i);
    let mut probs = vec![0.0; n];
    for (a, &pl) in left.iter().enumerate() {
        for (b, &pr) in right.iter().enumerate() {
            probs[a + b] += pl * pr;
        }
    }
    Ok(DegreePmf {
        vertex: i,
        flavor: DegreeFlavor::ExactOracle,
        probs,
        classes: vec![DegreeClass::Exact; n],
    })
}

/// `P(c_n <= y) = prod_l (1 - e^{-rate_l y})`.
pub fn connectivity_distance_cdf(params: &ModelParams, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    log_all_below(params, y).exp()
}

/// Quantile of `c_n` by bisection, to `1e-12` absolute in `y`.
pub fn connectivity_distance_quantile(params: &ModelParams, prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidParams(format!(
            "quantile level must be in (0, 1), got {prob}"
        )));
    }
    bisect(|y| connectivity_distance_cdf(params, y), prob)
}

/// Quantile of `b_n` by bisection.
pub fn nn_distance_quantile(params: &ModelParams, prob: f64) -> Result<f64> {
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidParams(format!(
            "quantile level must be in (0, 1), got {prob}"
        )));
    }
    bisect(|y| nn_distance_cdf(params, y), prob)
}

fn bisect<F: Fn(f64) -> f64>(cdf: F, prob: f64) -> Result<f64> {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while cdf(hi) < prob {
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::InvalidParams("quantile bracket diverged".into()));
        }
    }
    while hi - lo > 1e-12 * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if cdf(mid) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Exact `P(b_n <= y)`.
///
/// With `B_l = 1{Y_l > y}`, `b_n <= y` iff `B_1 = 0`, `B_{n-1} = 0` and no
/// two consecutive indicators are both 1. Evaluated by a two-state pass
/// over the interior gaps.
pub fn nn_distance_cdf(params: &ModelParams, y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    let q = exceedance_probs(params, y);
    let last = q.len() - 1;
    // mass of admissible prefixes ending with B = 0 / B = 1
    let mut end_low = 1.0 - q[0];
    let mut end_high = 0.0;
    for (l, &ql) in q.iter().enumerate().skip(1) {
        let low = (end_low + end_high) * (1.0 - ql);
        let high = if l == last { 0.0 } else { end_low * ql };
        end_low = low;
        end_high = high;
    }
    end_low + end_high
}

/// One row of the normalized extreme-distance experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StrongLawRow {
    pub n: usize,
    pub replications: usize,
    /// Mean of `rate c_n / ln n`.
    pub c_ratio_mean: f64,
    pub c_ratio_se: f64,
    pub c_ratio_var: f64,
    /// Mean of `rate b_n / ln n`.
    pub b_ratio_mean: f64,
    pub b_ratio_se: f64,
    pub b_ratio_var: f64,
}

impl StrongLawRow {
    /// Normal-approximation 95% interval for the `c_n` ratio.
    pub fn c_ci95(&self) -> (f64, f64) {
        (
            self.c_ratio_mean - 1.96 * self.c_ratio_se,
            self.c_ratio_mean + 1.96 * self.c_ratio_se,
        )
    }

    pub fn b_ci95(&self) -> (f64, f64) {
        (
            self.b_ratio_mean - 1.96 * self.b_ratio_se,
            self.b_ratio_mean + 1.96 * self.b_ratio_se,
        )
    }
}

/// Extreme distances of a fresh stationary snapshot with `n` vertices and a
/// common rate, without materializing the gaps.
pub fn sample_extremes(n: usize, rate: f64, rng: &mut RandomStream) -> (f64, f64) {
    let first = rng.exponential(rate);
    let mut c = first;
    let mut b_inner = 0.0f64;
    let mut prev = first;
    for _ in 2..n {
        let y = rng.exponential(rate);
        c = c.max(y);
        b_inner = b_inner.max(prev.min(y));
        prev = y;
    }
    let b = b_inner.max(first).max(prev);
    (c, b)
}

/// Monte Carlo of `rate c_n / ln n` and `rate b_n / ln n` along `n_grid`.
///
/// Replication `j` at grid position `g` uses substream
/// `g * replications + j` of `rng`.
pub fn strong_law_experiment(
    rate: f64,
    n_grid: &[usize],
    replications: usize,
    rng: &RandomStream,
) -> Result<Vec<StrongLawRow>> {
    if replications < 2 {
        return Err(Error::InvalidParams("need at least 2 replications".into()));
    }
    if n_grid.iter().any(|&n| n < 2) || n_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParams(
            "n_grid must be increasing with n >= 2".into(),
        ));
    }
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "rate must be positive, got {rate}"
        )));
    }
    let rows = n_grid
        .iter()
        .enumerate()
        .map(|(g, &n)| {
            let scale = rate / (n as f64).ln();
            let ratios: Vec<(f64, f64)> = (0..replications)
                .into_par_iter()
                .map(|j| {
                    let mut stream = rng.split((g * replications + j) as u64);
                    let (c, b) = sample_extremes(n, rate, &mut stream);
                    (c * scale, b * scale)
                })
                .collect();
            let (c_mean, c_var) = mean_var(ratios.iter().map(|x| x.0));
            let (b_mean, b_var) = mean_var(ratios.iter().map(|x| x.1));
            let m = replications as f64;
            StrongLawRow {
                n,
                replications,
                c_ratio_mean: c_mean,
                c_ratio_se: (c_var / m).sqrt(),
                c_ratio_var: c_var,
                b_ratio_mean: b_mean,
                b_ratio_se: (b_var / m).sqrt(),
                b_ratio_var: b_var,
            }
        })
        .collect();
    Ok(rows)
}

fn mean_var(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let (count, sum) = xs.clone().fold((0usize, 0.0), |(c, s), x| (c + 1, s + x));
    let mean = sum / count as f64;
    let ss: f64 = xs.map(|x| (x - mean) * (x - mean)).sum();
    (mean, ss / (count as f64 - 1.0))
}
