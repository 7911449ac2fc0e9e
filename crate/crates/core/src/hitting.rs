//! Distribution of the hitting time of disconnection,
//! `T = min{k >= 1 : graph disconnected at t + k}` given connectivity at `t`.
//!
//! Gaps are independent, so `P(T > k) = prod_l S_l(k)` where `S_l(k)` is the
//! probability that gap `l` stays below `r` for `k` steps, started from the
//! stationary law conditioned on `Y_l < r` (exponential truncated to
//! `(0, r)`). Two independent evaluations of `S_l(k)` are provided:
//!
//! * [`hitting_time_recursion`] conditions on the Bernoulli switch vector
//!   `xi` and evaluates the nested innovation integrals backwards, carrying
//!   each inner integral as a Chebyshev interpolant of the carried gap value.
//! * [`hitting_time_oracle`] uses that, given `xi`, the gap accumulates
//!   monotonically within a run of ones, so each run only constrains its
//!   final sum: an Erlang CDF for fresh runs and a single quadrature for the
//!   run continuing from the initial gap.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::quad::{integrate, Chebyshev};
use crate::special::erlang_cdf;

/// Largest truncation for which the `2^k` switch enumeration is allowed.
pub const MAX_K: usize = 24;

/// Enumeration stops once `P(T > k)` falls below this.
pub const TAIL_CUTOFF: f64 = 1e-12;

pub const DEFAULT_QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HittingTimeDist {
    /// `tail[k] = P(T > k)` for `k = 0..=truncation_k`.
    pub tail: Vec<f64>,
    /// `(partial sum, partial sum + geometric tail estimate)` bracketing `ET`.
    pub expectation_bracket: (f64, f64),
    pub truncation_k: usize,
}

impl HittingTimeDist {
    fn from_tail(tail: Vec<f64>) -> Self {
        let truncation_k = tail.len() - 1;
        let lower: f64 = tail.iter().sum();
        let last = tail[truncation_k];
        let upper = if truncation_k == 0 || last == 0.0 {
            lower
        } else {
            let ratio = last / tail[truncation_k - 1];
            if ratio < 1.0 {
                lower + last * ratio / (1.0 - ratio)
            } else {
                f64::INFINITY
            }
        };
        Self {
            tail,
            expectation_bracket: (lower, upper),
            truncation_k,
        }
    }

    /// `P(T = k)` for `k = 1..=truncation_k`, at index `k - 1`.
    pub fn pmf(&self) -> Vec<f64> {
        self.tail.windows(2).map(|w| w[0] - w[1]).collect()
    }
}

fn check_k(k_max: usize) -> Result<()> {
    if k_max == 0 || k_max > MAX_K {
        return Err(Error::KOutOfRange {
            k: k_max,
            max: MAX_K,
        });
    }
    Ok(())
}

/// Per-gap survival evaluator, cached per distinct rate.
fn combine<F>(params: &ModelParams, k_max: usize, mut survival: F) -> Result<HittingTimeDist>
where
    F: FnMut(usize, f64, usize) -> Result<f64>,
{
    check_k(k_max)?;
    let rates = params.interior_rates();
    let mut tail = vec![1.0];
    for k in 1..=k_max {
        let mut value = 1.0;
        if let Some(rate) = params.common_interior_rate() {
            value = survival(1, rate, k)?.powi(rates.len() as i32);
        } else {
            for (idx, &rate) in rates.iter().enumerate() {
                value *= survival(idx + 1, rate, k)?;
            }
        }
        tail.push(value);
        if value < TAIL_CUTOFF {
            break;
        }
    }
    Ok(HittingTimeDist::from_tail(tail))
}

/// Nested-integral evaluation of the hitting-time tail.
///
/// For a switch vector `xi = (V_0, .., V_{k-1})` define `H_j(s)`, the
/// probability that steps `j+1..=k` stay below `r` given `Y^{t+j} = s`:
/// `H_k = 1` and
///
/// ```text
/// H_j(s) = int_0^{r - V_j s} f(e) H_{j+1}(e + V_j s) de,   f = Exp(rate/(1-p)) density.
/// ```
///
/// `H_0` averaged over the truncated exponential start, weighted by
/// `p^{#ones} (1-p)^{#zeros}` and summed over `xi`, gives `S_l(k)`. Vectors
/// sharing a suffix share their inner integrals, so the enumeration walks a
/// suffix tree; sibling subtrees are evaluated in parallel and summed in a
/// fixed order.
pub fn hitting_time_recursion(
    params: &ModelParams,
    k_max: usize,
    quad_tol: f64,
) -> Result<HittingTimeDist> {
    if quad_tol.is_nan() || quad_tol <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "quad_tol must be positive, got {quad_tol}"
        )));
    }
    let mut cache: Vec<(f64, Vec<f64>)> = Vec::new();
    combine(params, k_max, |gap, rate, k| {
        if let Some((_, values)) = cache.iter().find(|(r, _)| *r == rate) {
            if let Some(&v) = values.get(k) {
                return Ok(v);
            }
        }
        let solver = NestedIntegrals::new(rate, params.r(), params.p(), quad_tol);
        let value = solver
            .survival(k)
            .map_err(|()| Error::Quadrature { gap, k })?;
        match cache.iter_mut().find(|(r, _)| *r == rate) {
            Some((_, values)) => {
                values.resize(k + 1, f64::NAN);
                values[k] = value;
            }
            None => {
                let mut values = vec![f64::NAN; k + 1];
                values[k] = value;
                cache.push((rate, values));
            }
        }
        Ok(value)
    })
}

struct NestedIntegrals {
    rate: f64,
    r: f64,
    p: f64,
    innovation_rate: f64,
    tol: f64,
    nodes: usize,
}

/// Below this remaining depth, subtrees are evaluated sequentially.
const PARALLEL_DEPTH: usize = 8;

impl NestedIntegrals {
    fn new(rate: f64, r: f64, p: f64, tol: f64) -> Self {
        let innovation_rate = rate / (1.0 - p);
        // resolves e^{-mu (r - s)} boundary layers to near machine precision
        let nodes = (24.0 + 2.0 * (innovation_rate * r).ceil()).min(400.0) as usize;
        Self {
            rate,
            r,
            p,
            innovation_rate,
            tol,
            nodes,
        }
    }

    fn density(&self, e: f64) -> f64 {
        self.innovation_rate * (-self.innovation_rate * e).exp()
    }

    /// One backward step: the function `H_j` from `H_{j+1}` and switch `bit`.
    fn prepend(&self, inner: &Chebyshev, bit: bool) -> std::result::Result<Chebyshev, ()> {
        if !bit {
            let c = integrate(|e| self.density(e) * inner.eval(e), 0.0, self.r, self.tol)
                .map_err(|_| ())?;
            return Ok(Chebyshev::constant(0.0, self.r, c));
        }
        let nodes = Chebyshev::nodes(0.0, self.r, self.nodes);
        let values = nodes
            .iter()
            .map(|&s| {
                integrate(
                    |e| self.density(e) * inner.eval(e + s),
                    0.0,
                    self.r - s,
                    self.tol,
                )
            })
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| ())?;
        Ok(Chebyshev::from_values(0.0, self.r, values))
    }

    /// Average of `H_0` over the truncated exponential start on `(0, r)`.
    fn start_average(&self, h0: &Chebyshev) -> std::result::Result<f64, ()> {
        let norm = -(-self.rate * self.r).exp_m1();
        let raw = integrate(
            |y| self.rate * (-self.rate * y).exp() * h0.eval(y),
            0.0,
            self.r,
            self.tol,
        )
        .map_err(|_| ())?;
        Ok(raw / norm)
    }

    fn survival(&self, k: usize) -> std::result::Result<f64, ()> {
        let leaf = Chebyshev::constant(0.0, self.r, 1.0);
        self.subtree(&leaf, k)
    }

    /// Weighted sum over all prefixes of length `remaining` of the start
    /// average of `H_0`, given the function after those prefixes.
    fn subtree(&self, inner: &Chebyshev, remaining: usize) -> std::result::Result<f64, ()> {
        if remaining == 0 {
            return self.start_average(inner);
        }
        let branch = |bit: bool| -> std::result::Result<f64, ()> {
            let weight = if bit { self.p } else { 1.0 - self.p };
            if weight == 0.0 {
                return Ok(0.0);
            }
            let h = self.prepend(inner, bit)?;
            Ok(weight * self.subtree(&h, remaining - 1)?)
        };
        let (zero, one) = if remaining >= PARALLEL_DEPTH {
            rayon::join(|| branch(false), || branch(true))
        } else {
            (branch(false), branch(true))
        };
        Ok(zero? + one?)
    }
}

/// Run-decomposition evaluation of the hitting-time tail.
///
/// Given `xi`, split the steps into maximal runs: the leading run of ones
/// continues the initial gap, every later run starts with a zero. A run of
/// `m` innovations stays below `r` iff its final value does, which is
/// `G_m(r)` (Erlang CDF with the innovation rate) for a fresh run and
/// `P(Y~ + sum of m innovations < r)` for the leading run.
pub fn hitting_time_oracle(params: &ModelParams, k_max: usize) -> Result<HittingTimeDist> {
    check_k(k_max)?;
    let p = params.p();
    let r = params.r();
    let mut cache: Vec<(f64, Vec<f64>)> = Vec::new();
    combine(params, k_max, |gap, rate, k| {
        let idx = match cache.iter().position(|(c, _)| *c == rate) {
            Some(idx) => idx,
            None => {
                let values = run_decomposition(rate, r, p, k_max)
                    .map_err(|()| Error::Quadrature { gap, k: k_max })?;
                cache.push((rate, values));
                cache.len() - 1
            }
        };
        Ok(cache[idx].1[k])
    })
}

/// `S(k)` for `k = 0..=k_max` by run decomposition.
fn run_decomposition(rate: f64, r: f64, p: f64, k_max: usize) -> std::result::Result<Vec<f64>, ()> {
    let mu = rate / (1.0 - p);
    let fresh: Vec<f64> = (0..=k_max).map(|m| erlang_cdf(m, mu, r)).collect();
    let norm = -(-rate * r).exp_m1();
    let mut leading = vec![1.0; k_max + 1];
    for (m, slot) in leading.iter_mut().enumerate().skip(1) {
        let raw = integrate(
            |y| rate * (-rate * y).exp() * erlang_cdf(m, mu, r - y),
            0.0,
            r,
            1e-14,
        )
        .map_err(|_| ())?;
        *slot = raw / norm;
    }

    let mut survival = vec![1.0; k_max + 1];
    for (k, slot) in survival.iter_mut().enumerate().skip(1) {
        let total: f64 = (0..1u32 << k)
            .into_par_iter()
            .map(|bits| {
                let ones = bits.count_ones() as i32;
                let weight = p.powi(ones) * (1.0 - p).powi(k as i32 - ones);
                if weight == 0.0 {
                    return 0.0;
                }
                // bit j of `bits` is V_{t+j}
                let lead = (bits.trailing_ones() as usize).min(k);
                let mut prob = leading[lead];
                let mut j = lead;
                while j < k {
                    // position j is a zero: a fresh run of length 1 + following ones
                    let mut len = 1;
                    while j + len < k && bits >> (j + len) & 1 == 1 {
                        len += 1;
                    }
                    prob *= fresh[len];
                    j += len;
                }
                weight * prob
            })
            .collect::<Vec<_>>()
            .iter()
            .sum();
        *slot = total;
    }
    Ok(survival)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chain::{gap_step_probs, transition_matrix};
    use crate::snapshot::connectivity_probability;

    #[test]
    fn rejects_bad_truncation() {
        let params = ModelParams::homogeneous(3, 0.5, 1.0, 1.0).unwrap();
        assert!(matches!(
            hitting_time_recursion(&params, 0, 1e-10),
            Err(Error::KOutOfRange { .. })
        ));
        assert!(matches!(
            hitting_time_oracle(&params, 25),
            Err(Error::KOutOfRange { .. })
        ));
    }

    #[test]
    fn memoryless_tail_is_geometric() {
        let params = ModelParams::new(4, 0.0, vec![1.0, 1.0, 0.5, 2.0], 1.0).unwrap();
        let pc = connectivity_probability(&params);
        for dist in [
            hitting_time_recursion(&params, 6, 1e-12).unwrap(),
            hitting_time_oracle(&params, 6).unwrap(),
        ] {
            for (k, &t) in dist.tail.iter().enumerate() {
                assert!((t - pc.powi(k as i32)).abs() < 1e-13, "k={k}");
            }
        }
    }

    #[test]
    fn one_step_survival_is_alpha() {
        for &p in &[0.0, 0.3, 0.9] {
            let params = ModelParams::homogeneous(2, p, 1.0, 1.0).unwrap();
            let alpha = gap_step_probs(1.0, 1.0, p).unwrap().alpha;
            let rec = hitting_time_recursion(&params, 1, 1e-10).unwrap();
            let ora = hitting_time_oracle(&params, 1).unwrap();
            assert!((rec.tail[1] - alpha).abs() < 1e-10, "p={p}");
            assert!((ora.tail[1] - alpha).abs() < 1e-13, "p={p}");
            let chain = transition_matrix(&params).unwrap();
            assert!((rec.tail[1] - chain.p11()).abs() < 1e-10);
        }
    }

    #[test]
    fn all_zero_switches_factor() {
        // only xi = 0...0 carries weight when p = 0; each step is a fresh innovation
        let params = ModelParams::homogeneous(2, 0.0, 2.0, 0.5).unwrap();
        let dist = hitting_time_oracle(&params, 5).unwrap();
        let fresh = 1.0 - (-2.0f64 * 0.5).exp();
        assert!((dist.tail[5] - fresh.powi(5)).abs() < 1e-14);
    }

    #[test]
    fn tail_is_monotone_and_bracket_ordered() {
        let params = ModelParams::homogeneous(3, 0.6, 1.0, 1.0).unwrap();
        let dist = hitting_time_recursion(&params, 8, 1e-10).unwrap();
        assert_eq!(dist.tail[0], 1.0);
        assert!(dist.tail.windows(2).all(|w| w[1] <= w[0]));
        let (lo, hi) = dist.expectation_bracket;
        assert!(lo <= hi);
        assert_eq!(dist.pmf().len(), dist.truncation_k);
    }

    #[test]
    fn truncates_once_tail_is_negligible() {
        let params = ModelParams::homogeneous(20, 0.0, 1.0, 0.3).unwrap();
        let dist = hitting_time_oracle(&params, 24).unwrap();
        assert!(dist.truncation_k < 24);
        assert!(dist.tail[dist.truncation_k] < TAIL_CUTOFF);
        assert!(dist.tail[dist.truncation_k - 1] >= TAIL_CUTOFF);
    }
}
