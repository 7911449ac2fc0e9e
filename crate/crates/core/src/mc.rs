//! Monte Carlo counterparts of the analytic results.
//!
//! Replicated experiments are cut into fixed batches; batch `b` draws from
//! `rng.split(b)` and batch results are reduced in batch order, so reports
//! depend only on the seed and stream id, not on the worker count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gap::{resample_stationary, sample_stationary, GapState};
use crate::params::ModelParams;
use crate::rng::RandomStream;
use crate::snapshot::{
    component_pmf, connectivity_distance_cdf, connectivity_probability, degree_pmf_exact,
    equal_size_components_probability, nn_distance_cdf,
};
use crate::stats::{autocorrelation_with_se, KsReport};

const BATCH: usize = 10_000;

/// Conditioning attempts allowed per hitting-time replication.
pub const RETRY_BUDGET: usize = 10_000;

/// Steps allowed per hitting-time replication before giving up.
pub const STEP_BUDGET: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub quantity: String,
    pub value: f64,
    pub se: f64,
    pub replications: u64,
    pub seed: u64,
    pub target: Option<f64>,
    pub z: Option<f64>,
}

impl EstimateReport {
    /// Binomial proportion. The standard error uses the smoothed frequency
    /// `(hits + 1/2) / (trials + 1)` so it stays positive at 0 and 1.
    pub fn proportion(quantity: impl Into<String>, hits: u64, trials: u64, seed: u64) -> Self {
        let value = hits as f64 / trials as f64;
        let smooth = (hits as f64 + 0.5) / (trials as f64 + 1.0);
        Self {
            quantity: quantity.into(),
            value,
            se: (smooth * (1.0 - smooth) / trials as f64).sqrt(),
            replications: trials,
            seed,
            target: None,
            z: None,
        }
    }

    pub fn with_se(
        quantity: impl Into<String>,
        value: f64,
        se: f64,
        replications: u64,
        seed: u64,
    ) -> Self {
        Self {
            quantity: quantity.into(),
            value,
            se,
            replications,
            seed,
            target: None,
            z: None,
        }
    }

    pub fn with_target(mut self, target: f64) -> Self {
        self.target = Some(target);
        self.z = Some((self.value - target) / self.se);
        self
    }

    /// `|z| <= limit`; reports without a target pass vacuously.
    pub fn within(&self, limit: f64) -> bool {
        self.z.is_none_or(|z| z.abs() <= limit)
    }
}

/// Acceptance threshold on z-scores.
pub const Z_LIMIT: f64 = 4.0;

/// Keeps histogram bins whose expected count is at least `min_expected` and
/// pools the rest into one bin, so that per-bin z-scores stay in the range
/// where the normal approximation means something.
///
/// Every report must be a proportion with a target over the same trials.
pub fn pool_sparse_bins(bins: &[EstimateReport], min_expected: f64) -> Vec<EstimateReport> {
    let mut kept = Vec::new();
    let (mut hits, mut target, mut trials, mut seed, mut pooled) = (0u64, 0.0, 0u64, 0u64, 0usize);
    for bin in bins {
        let t = bin.target.expect("bin without target");
        if t * bin.replications as f64 >= min_expected {
            kept.push(bin.clone());
        } else {
            hits += (bin.value * bin.replications as f64).round() as u64;
            target += t;
            trials = bin.replications;
            seed = bin.seed;
            pooled += 1;
        }
    }
    if pooled > 0 {
        kept.push(
            EstimateReport::proportion(
                format!("pooled ({pooled} sparse bins)"),
                hits,
                trials,
                seed,
            )
            .with_target(target),
        );
    }
    kept
}

fn check_trials(what: &str, count: usize, minimum: usize) -> Result<()> {
    if count < minimum {
        return Err(Error::InvalidParams(format!(
            "{what} must be at least {minimum}, got {count}"
        )));
    }
    Ok(())
}

/// Transition counts of the connectivity and component-count indicators
/// along one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionEstimates {
    pub steps: u64,
    pub seed: u64,
    /// `[from][to]`, 0 = connected, 1 = disconnected.
    pub connectivity_counts: [[u64; 2]; 2],
    /// `[from - 1][to - 1]` component counts.
    pub component_counts: Vec<Vec<u64>>,
}

impl TransitionEstimates {
    fn connectivity_entry(&self, from: usize, to: usize, name: &str) -> Result<EstimateReport> {
        let row = self.connectivity_counts[from];
        let visits = row[0] + row[1];
        if visits == 0 {
            return Err(Error::InsufficientData(format!(
                "{name}: state never visited"
            )));
        }
        Ok(EstimateReport::proportion(name, row[to], visits, self.seed))
    }

    pub fn p11(&self) -> Result<EstimateReport> {
        self.connectivity_entry(0, 0, "p11")
    }

    pub fn p21(&self) -> Result<EstimateReport> {
        self.connectivity_entry(1, 0, "p21")
    }

    /// `p'_{ij}`, 1-based.
    pub fn component(&self, i: usize, j: usize) -> Result<EstimateReport> {
        let row = &self.component_counts[i - 1];
        let visits: u64 = row.iter().sum();
        let name = format!("p'_{i},{j}");
        if visits == 0 {
            return Err(Error::InsufficientData(format!(
                "{name}: state never visited"
            )));
        }
        Ok(EstimateReport::proportion(
            name,
            row[j - 1],
            visits,
            self.seed,
        ))
    }
}

/// Counts one-step transitions along a single trajectory from a stationary
/// start, after `burn_in` discarded steps.
pub fn estimate_transitions(
    params: &ModelParams,
    steps: usize,
    burn_in: usize,
    rng: &mut RandomStream,
) -> Result<TransitionEstimates> {
    check_trials("steps", steps, 1_000)?;
    let n = params.n();
    let r = params.r();
    let mut state = sample_stationary(params, rng);
    for _ in 0..burn_in {
        state.step_in_place(params, rng);
    }
    let mut connectivity_counts = [[0u64; 2]; 2];
    let mut component_counts = vec![vec![0u64; n]; n];
    let mut prev = state.component_count(r);
    for _ in 0..steps {
        state.step_in_place(params, rng);
        let next = state.component_count(r);
        connectivity_counts[usize::from(prev > 1)][usize::from(next > 1)] += 1;
        component_counts[prev - 1][next - 1] += 1;
        prev = next;
    }
    Ok(TransitionEstimates {
        steps: steps as u64,
        seed: rng.seed(),
        connectivity_counts,
        component_counts,
    })
}

/// Threshold transition frequencies of a single gap: `(alpha, beta)`.
pub fn estimate_gap_step_probs(
    rate: f64,
    r: f64,
    p: f64,
    steps: usize,
    rng: &mut RandomStream,
) -> Result<(EstimateReport, EstimateReport)> {
    let params = ModelParams::homogeneous(2, p, rate, r)?;
    let est = estimate_transitions(&params, steps, 0, rng)?;
    Ok((est.p11()?.renamed("alpha"), est.p21()?.renamed("beta")))
}

impl EstimateReport {
    fn renamed(mut self, quantity: &str) -> Self {
        self.quantity = quantity.to_string();
        self
    }
}

/// Empirical hitting-time law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingEstimate {
    /// `P(T > k)` for `k = 0..=k_max`.
    pub tail: Vec<EstimateReport>,
    pub mean: EstimateReport,
}

#[derive(Default)]
struct HittingBatch {
    survive: Vec<u64>,
    sum: f64,
    sum_sq: f64,
}

/// Replicates `T` from the stationary law conditioned on connectivity
/// (rejection sampling, at most [`RETRY_BUDGET`] attempts per replication).
pub fn estimate_hitting_time(
    params: &ModelParams,
    replications: usize,
    k_max: usize,
    rng: &RandomStream,
) -> Result<HittingEstimate> {
    check_trials("replications", replications, 2)?;
    let r = params.r();
    let batches = replications.div_ceil(BATCH);
    let results: Vec<Result<HittingBatch>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut stream = rng.split(b as u64);
            let count = BATCH.min(replications - b * BATCH);
            let mut out = HittingBatch {
                survive: vec![0; k_max + 1],
                ..Default::default()
            };
            let mut state = sample_stationary(params, &mut stream);
            for _ in 0..count {
                let mut attempts = 1;
                while !state.is_connected(r) {
                    if attempts >= RETRY_BUDGET {
                        return Err(Error::RetryBudget {
                            budget: RETRY_BUDGET,
                        });
                    }
                    resample_stationary(&mut state, params, &mut stream);
                    attempts += 1;
                }
                let mut t = 0usize;
                loop {
                    state.step_in_place(params, &mut stream);
                    t += 1;
                    if !state.is_connected(r) {
                        break;
                    }
                    if t >= STEP_BUDGET {
                        return Err(Error::InsufficientData(format!(
                            "no disconnection within {STEP_BUDGET} steps"
                        )));
                    }
                }
                for slot in out.survive.iter_mut().take(t.min(k_max + 1)) {
                    *slot += 1;
                }
                out.sum += t as f64;
                out.sum_sq += (t * t) as f64;
                // the next replication starts from a fresh snapshot
                resample_stationary(&mut state, params, &mut stream);
            }
            Ok(out)
        })
        .collect();

    let mut survive = vec![0u64; k_max + 1];
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for batch in results {
        let batch = batch?;
        for (s, b) in survive.iter_mut().zip(&batch.survive) {
            *s += b;
        }
        sum += batch.sum;
        sum_sq += batch.sum_sq;
    }
    let m = replications as f64;
    let mean = sum / m;
    let var = (sum_sq - m * mean * mean) / (m - 1.0);
    let seed = rng.seed();
    Ok(HittingEstimate {
        tail: survive
            .iter()
            .enumerate()
            .map(|(k, &s)| {
                EstimateReport::proportion(format!("P(T>{k})"), s, replications as u64, seed)
            })
            .collect(),
        mean: EstimateReport::with_se(
            "E[T]",
            mean,
            (var.max(0.0) / m).sqrt(),
            replications as u64,
            seed,
        ),
    })
}

/// Snapshot statistics with analytic targets attached.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotEstimates {
    pub connectivity: EstimateReport,
    /// `psi(k)` for `k = 1..=n`, at index `k - 1`.
    pub components: Vec<EstimateReport>,
    /// Degree histograms of the requested vertices; targets are the exact
    /// finite-`n` law when the interior rates are homogeneous.
    pub degrees: Vec<(usize, Vec<EstimateReport>)>,
    pub connectivity_distance: KsReport,
    pub nn_distance: KsReport,
}

impl SnapshotEstimates {
    pub fn all_reports(&self) -> impl Iterator<Item = &EstimateReport> {
        std::iter::once(&self.connectivity)
            .chain(&self.components)
            .chain(self.degrees.iter().flat_map(|(_, h)| h))
    }
}

struct SnapshotBatch {
    connected: u64,
    components: Vec<u64>,
    degrees: Vec<Vec<u64>>,
    c: Vec<f64>,
    b: Vec<f64>,
}

pub fn estimate_snapshot_stats(
    params: &ModelParams,
    samples: usize,
    vertices: &[usize],
    rng: &RandomStream,
) -> Result<SnapshotEstimates> {
    check_trials("samples", samples, 1_000)?;
    let n = params.n();
    if let Some(&bad) = vertices.iter().find(|&&i| i == 0 || i > n) {
        return Err(Error::IndexOutOfRange { index: bad, n });
    }
    let r = params.r();
    let batches = samples.div_ceil(BATCH);
    let results: Vec<SnapshotBatch> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut stream = rng.split(b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let mut out = SnapshotBatch {
                connected: 0,
                components: vec![0; n],
                degrees: vec![vec![0; n]; vertices.len()],
                c: Vec::with_capacity(count),
                b: Vec::with_capacity(count),
            };
            let mut state = sample_stationary(params, &mut stream);
            for s in 0..count {
                if s > 0 {
                    resample_stationary(&mut state, params, &mut stream);
                }
                let k = state.component_count(r);
                out.connected += u64::from(k == 1);
                out.components[k - 1] += 1;
                for (hist, &i) in out.degrees.iter_mut().zip(vertices) {
                    hist[state.degree(r, i).expect("vertex checked")] += 1;
                }
                let e = state.extreme_distances();
                out.c.push(e.c);
                out.b.push(e.b);
            }
            out
        })
        .collect();

    let mut connected = 0;
    let mut components = vec![0u64; n];
    let mut degrees = vec![vec![0u64; n]; vertices.len()];
    let mut c = Vec::with_capacity(samples);
    let mut b = Vec::with_capacity(samples);
    for batch in results {
        connected += batch.connected;
        for (t, x) in components.iter_mut().zip(&batch.components) {
            *t += x;
        }
        for (t, x) in degrees.iter_mut().zip(&batch.degrees) {
            for (u, y) in t.iter_mut().zip(x) {
                *u += y;
            }
        }
        c.extend(batch.c);
        b.extend(batch.b);
    }

    let seed = rng.seed();
    let total = samples as u64;
    let psi = component_pmf(params);
    let degree_targets = vertices
        .iter()
        .map(|&i| degree_pmf_exact(params, i).ok())
        .collect::<Vec<_>>();
    Ok(SnapshotEstimates {
        connectivity: EstimateReport::proportion("P_n(C)", connected, total, seed)
            .with_target(connectivity_probability(params)),
        components: components
            .iter()
            .enumerate()
            .map(|(k, &h)| {
                EstimateReport::proportion(format!("psi({})", k + 1), h, total, seed)
                    .with_target(psi[k])
            })
            .collect(),
        degrees: vertices
            .iter()
            .zip(degrees)
            .zip(degree_targets)
            .map(|((&i, hist), target)| {
                let reports = hist
                    .iter()
                    .enumerate()
                    .map(|(k, &h)| {
                        let rep =
                            EstimateReport::proportion(format!("P(d_{i}={k})"), h, total, seed);
                        match &target {
                            Some(t) => rep.with_target(t.probs[k]),
                            None => rep,
                        }
                    })
                    .collect();
                (i, reports)
            })
            .collect(),
        connectivity_distance: KsReport::new(
            "c_n",
            &mut c,
            |y| connectivity_distance_cdf(params, y),
            seed,
        ),
        nn_distance: KsReport::new("b_n", &mut b, |y| nn_distance_cdf(params, y), seed),
    })
}

/// Frequency of exactly `k` components of `m` vertices each.
pub fn estimate_equal_size_components(
    params: &ModelParams,
    k: usize,
    m: usize,
    samples: usize,
    rng: &RandomStream,
) -> Result<EstimateReport> {
    check_trials("samples", samples, 1_000)?;
    let target = equal_size_components_probability(params, k, m)?;
    let r = params.r();
    let batches = samples.div_ceil(BATCH);
    let hits: u64 = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut stream = rng.split(b as u64);
            let count = BATCH.min(samples - b * BATCH);
            let mut state = sample_stationary(params, &mut stream);
            let mut hits = 0;
            for s in 0..count {
                if s > 0 {
                    resample_stationary(&mut state, params, &mut stream);
                }
                let sizes = state.component_sizes(r);
                hits += u64::from(sizes.len() == k && sizes.iter().all(|&x| x == m));
            }
            hits
        })
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(
        EstimateReport::proportion(format!("P_n^{m}({k})"), hits, samples as u64, rng.seed())
            .with_target(target),
    )
}

/// Values of gap `gap` along one trajectory of `steps` steps, stationary start
/// included.
pub fn gap_series(
    params: &ModelParams,
    gap: usize,
    steps: usize,
    rng: &mut RandomStream,
) -> Result<Vec<f64>> {
    if gap >= params.n() {
        return Err(Error::IndexOutOfRange {
            index: gap,
            n: params.n(),
        });
    }
    let mut state = sample_stationary(params, rng);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state.gaps()[gap]);
    for _ in 0..steps {
        state.step_in_place(params, rng);
        out.push(state.gaps()[gap]);
    }
    Ok(out)
}

/// Lag-`j` autocorrelations of one gap, `j = 1..=max_lag`, against `p^j`.
pub fn estimate_autocorrelation(
    params: &ModelParams,
    gap: usize,
    steps: usize,
    max_lag: usize,
    rng: &mut RandomStream,
) -> Result<Vec<EstimateReport>> {
    check_trials("steps", steps, 10_000)?;
    let series = gap_series(params, gap, steps, rng)?;
    Ok((1..=max_lag)
        .map(|j| {
            let (rho, se) = autocorrelation_with_se(&series, j, 100);
            EstimateReport::with_se(format!("corr(lag {j})"), rho, se, steps as u64, rng.seed())
                .with_target(params.p().powi(j as i32))
        })
        .collect())
}

/// KS check of one gap's marginal after `steps` steps, over independent
/// chains started from the stationary law.
pub fn estimate_marginal_ks(
    params: &ModelParams,
    gap: usize,
    steps: usize,
    replications: usize,
    rng: &RandomStream,
) -> Result<KsReport> {
    check_trials("replications", replications, 1_000)?;
    if gap >= params.n() {
        return Err(Error::IndexOutOfRange {
            index: gap,
            n: params.n(),
        });
    }
    let batches = replications.div_ceil(BATCH);
    let mut values: Vec<f64> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut stream = rng.split(b as u64);
            let count = BATCH.min(replications - b * BATCH);
            (0..count)
                .map(|_| {
                    let mut state: GapState = sample_stationary(params, &mut stream);
                    for _ in 0..steps {
                        state.step_in_place(params, &mut stream);
                    }
                    state.gaps()[gap]
                })
                .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .concat();
    let rate = params.rates()[gap];
    Ok(KsReport::new(
        &format!("Y_{gap} after {steps} steps"),
        &mut values,
        |y| -(-rate * y.max(0.0)).exp_m1(),
        rng.seed(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportion_se_is_positive_at_extremes() {
        let r = EstimateReport::proportion("x", 0, 100, 1);
        assert!(r.se > 0.0);
        let r = EstimateReport::proportion("x", 100, 100, 1).with_target(1.0);
        assert_eq!(r.z, Some(0.0));
        assert!(r.within(Z_LIMIT));
    }

    #[test]
    fn sparse_bins_are_pooled() {
        let bins: Vec<_> = [(900, 0.9), (95, 0.0995), (4, 0.0004), (1, 0.0001)]
            .iter()
            .map(|&(h, t)| EstimateReport::proportion("b", h, 1000, 3).with_target(t))
            .collect();
        let pooled = pool_sparse_bins(&bins, 10.0);
        assert_eq!(pooled.len(), 3);
        assert_eq!(pooled[2].value, 0.005);
        assert!((pooled[2].target.unwrap() - 0.0005).abs() < 1e-15);
    }

    #[test]
    fn transitions_require_enough_steps() {
        let params = ModelParams::homogeneous(3, 0.5, 1.0, 1.0).unwrap();
        let mut rng = RandomStream::new(1, 0);
        assert!(estimate_transitions(&params, 10, 0, &mut rng).is_err());
    }

    #[test]
    fn unvisited_state_is_insufficient_data() {
        // disconnection is practically impossible at this cutoff
        let params = ModelParams::homogeneous(3, 0.5, 1.0, 40.0).unwrap();
        let mut rng = RandomStream::new(1, 0);
        let est = estimate_transitions(&params, 1_000, 0, &mut rng).unwrap();
        assert!(est.p11().is_ok());
        assert!(matches!(est.p21(), Err(Error::InsufficientData(_))));
        assert!(matches!(
            est.component(3, 1),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn retry_budget_is_reported() {
        // connection probability is about 1e-40
        let params = ModelParams::homogeneous(100, 0.2, 1.0, 0.4).unwrap();
        let err = estimate_hitting_time(&params, 2, 3, &RandomStream::new(1, 0)).unwrap_err();
        assert_eq!(
            err,
            Error::RetryBudget {
                budget: RETRY_BUDGET
            }
        );
    }

    #[test]
    fn reports_are_deterministic() {
        let params = ModelParams::homogeneous(6, 0.3, 1.0, 1.0).unwrap();
        let rng = RandomStream::new(42, 0);
        let a = estimate_snapshot_stats(&params, 25_000, &[1, 3], &rng).unwrap();
        let b = estimate_snapshot_stats(&params, 25_000, &[1, 3], &rng).unwrap();
        assert_eq!(a, b);
        let a = estimate_hitting_time(&params, 25_000, 4, &rng).unwrap();
        let b = estimate_hitting_time(&params, 25_000, 4, &rng).unwrap();
        assert_eq!(a, b);
    }
}
