//! Inter-nodal gap state and its TEAR(1) evolution.
//!
//! Each gap follows `Y' = eps + V * Y` with `V ~ Bernoulli(p)` and
//! `eps = (1 - p) Z`, `Z ~ Exp(rate)`. Started from the exponential law the
//! process is stationary with exponential marginals and lag-`j`
//! autocorrelation `p^j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::rng::RandomStream;

/// Gap values `Y_0..Y_{n-1}` at one time step.
///
/// `Y_0` is the distance from the origin to the first vertex; `Y_l` for
/// `l >= 1` is the distance between vertices `l` and `l + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapState {
    gaps: Vec<f64>,
}

impl GapState {
    pub fn new(gaps: Vec<f64>) -> Result<Self> {
        if gaps.len() < 2 {
            return Err(Error::InvalidParams(format!(
                "a state needs n >= 2 gaps, got {}",
                gaps.len()
            )));
        }
        if let Some(bad) = gaps.iter().find(|&&y| !(y >= 0.0 && y.is_finite())) {
            return Err(Error::InvalidParams(format!(
                "gaps must be nonnegative and finite, got {bad}"
            )));
        }
        Ok(Self { gaps })
    }

    pub fn n(&self) -> usize {
        self.gaps.len()
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// Interior gaps `Y_1..Y_{n-1}`.
    pub fn interior(&self) -> &[f64] {
        &self.gaps[1..]
    }

    /// Vertex positions `X_i = Y_0 + ... + Y_{i-1}`, `i = 1..=n`.
    pub fn positions(&self) -> Vec<f64> {
        self.gaps
            .iter()
            .scan(0.0, |acc, &y| {
                *acc += y;
                Some(*acc)
            })
            .collect()
    }

    /// Connected iff every interior gap is strictly below `r`.
    pub fn is_connected(&self, r: f64) -> bool {
        self.interior().iter().all(|&y| y < r)
    }

    /// `1 + #{l >= 1 : Y_l >= r}`.
    pub fn component_count(&self, r: f64) -> usize {
        1 + self.interior().iter().filter(|&&y| y >= r).count()
    }

    /// Sizes of the connected components, left to right.
    pub fn component_sizes(&self, r: f64) -> Vec<usize> {
        let mut sizes = Vec::new();
        let mut current = 1;
        for &y in self.interior() {
            if y >= r {
                sizes.push(current);
                current = 1;
            } else {
                current += 1;
            }
        }
        sizes.push(current);
        sizes
    }

    /// Degree of vertex `i` (1-based): neighbours within distance `< r`.
    pub fn degree(&self, r: f64, i: usize) -> Result<usize> {
        let n = self.n();
        if i == 0 || i > n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        Ok(self.left_degree(r, i) + self.right_degree(r, i))
    }

    fn left_degree(&self, r: f64, i: usize) -> usize {
        // Vertex i sits after gap i-1; its left neighbours are reached through
        // gaps i-1, i-2, ..., 1.
        let mut dist = 0.0;
        let mut count = 0;
        for l in (1..i).rev() {
            dist += self.gaps[l];
            if dist >= r {
                break;
            }
            count += 1;
        }
        count
    }

    fn right_degree(&self, r: f64, i: usize) -> usize {
        let mut dist = 0.0;
        let mut count = 0;
        for l in i..self.n() {
            dist += self.gaps[l];
            if dist >= r {
                break;
            }
            count += 1;
        }
        count
    }

    /// All degrees, vertex 1 first.
    pub fn degrees(&self, r: f64) -> Vec<usize> {
        (1..=self.n())
            .map(|i| self.left_degree(r, i) + self.right_degree(r, i))
            .collect()
    }

    /// Connectivity distance `c` (largest interior gap) and largest
    /// nearest-neighbour distance `b`.
    pub fn extreme_distances(&self) -> ExtremeDistances {
        let inner = self.interior();
        let c = inner.iter().copied().fold(0.0, f64::max);
        let ends = inner[0].max(inner[inner.len() - 1]);
        let b = inner
            .windows(2)
            .map(|w| w[0].min(w[1]))
            .fold(ends, f64::max);
        ExtremeDistances { c, b }
    }

    /// One TEAR(1) step in place.
    ///
    /// Draw order is fixed: for each gap `l = 0..n`, one uniform for the
    /// Bernoulli switch followed by one uniform for the innovation.
    pub fn step_in_place(&mut self, params: &ModelParams, rng: &mut RandomStream) {
        let p = params.p();
        for (y, &rate) in self.gaps.iter_mut().zip(params.rates()) {
            let keep = rng.uniform() < p;
            let innovation = (1.0 - p) * rng.exponential(rate);
            *y = innovation + if keep { *y } else { 0.0 };
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtremeDistances {
    /// Smallest cutoff at which the snapshot is connected.
    pub c: f64,
    /// Largest nearest-neighbour distance.
    pub b: f64,
}

/// Independent exponential gaps, the stationary law of the process.
pub fn sample_stationary(params: &ModelParams, rng: &mut RandomStream) -> GapState {
    GapState {
        gaps: params.rates().iter().map(|&l| rng.exponential(l)).collect(),
    }
}

/// Refill `state` with a stationary sample, reusing its allocation.
pub fn resample_stationary(state: &mut GapState, params: &ModelParams, rng: &mut RandomStream) {
    state.gaps.clear();
    state
        .gaps
        .extend(params.rates().iter().map(|&l| rng.exponential(l)));
}

/// One TEAR(1) step.
pub fn step(state: &GapState, params: &ModelParams, rng: &mut RandomStream) -> Result<GapState> {
    if state.n() != params.n() {
        return Err(Error::InvalidParams(format!(
            "state has {} gaps but params have n = {}",
            state.n(),
            params.n()
        )));
    }
    let mut next = state.clone();
    next.step_in_place(params, rng);
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(gaps: &[f64]) -> GapState {
        GapState::new(gaps.to_vec()).unwrap()
    }

    #[test]
    fn positions_are_prefix_sums() {
        assert_eq!(state(&[1.0, 2.0, 3.0]).positions(), vec![1.0, 3.0, 6.0]);
        assert_eq!(state(&[0.0, 0.0, 0.0]).positions(), vec![0.0; 3]);
        assert!(GapState::new(vec![0.5]).is_err());
        assert!(GapState::new(vec![0.5, -1.0]).is_err());
    }

    #[test]
    fn connectivity_ignores_origin_gap() {
        assert!(state(&[5.0, 0.1, 0.1]).is_connected(1.0));
        assert!(!state(&[0.0, 0.5, 1.5]).is_connected(1.0));
        // ties count as disconnected
        assert!(!state(&[0.0, 1.0, 0.5]).is_connected(1.0));
    }

    #[test]
    fn component_counts() {
        assert_eq!(state(&[9.0, 0.1, 0.2, 0.3]).component_count(1.0), 1);
        assert_eq!(state(&[0.0, 2.0, 3.0, 4.0]).component_count(1.0), 4);
        assert_eq!(state(&[0.0, 2.0, 0.1, 2.0]).component_count(1.0), 3);
        assert_eq!(
            state(&[0.0, 2.0, 0.1, 2.0]).component_sizes(1.0),
            vec![1, 2, 1]
        );
    }

    #[test]
    fn degrees_on_a_lattice() {
        let s = state(&[0.4; 9]);
        assert_eq!(s.degree(1.0, 5).unwrap(), 4);
        assert_eq!(s.degree(1.0, 1).unwrap(), 2);
        assert_eq!(s.degree(0.3, 5).unwrap(), 0);
        assert!(s.degree(1.0, 0).is_err());
        assert!(s.degree(1.0, 10).is_err());
    }

    #[test]
    fn extremes_by_hand() {
        let e = state(&[0.0, 1.0, 2.0, 3.0]).extreme_distances();
        assert_eq!((e.c, e.b), (3.0, 3.0));
        let e = state(&[4.0, 0.7]).extreme_distances();
        assert_eq!((e.c, e.b), (0.7, 0.7));
        let e = state(&[0.0, 0.1, 5.0, 4.0, 0.2]).extreme_distances();
        assert_eq!((e.c, e.b), (5.0, 4.0));
    }

    #[test]
    fn zero_memory_step_ignores_input() {
        let params = ModelParams::homogeneous(4, 0.0, 1.0, 1.0).unwrap();
        let a = state(&[1.0, 2.0, 3.0, 4.0]);
        let b = state(&[9.0, 9.0, 9.0, 9.0]);
        let na = step(&a, &params, &mut RandomStream::new(3, 0)).unwrap();
        let nb = step(&b, &params, &mut RandomStream::new(3, 0)).unwrap();
        assert_eq!(na, nb);
    }

    #[test]
    fn step_rejects_size_mismatch() {
        let params = ModelParams::homogeneous(4, 0.3, 1.0, 1.0).unwrap();
        assert!(step(&state(&[1.0, 1.0]), &params, &mut RandomStream::new(0, 0)).is_err());
    }
}
