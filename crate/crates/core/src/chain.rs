//! Connectivity and component-count Markov chains.
//!
//! The per-gap threshold indicator `1{Y_l >= r}` has stationary exceedance
//! probability `q = e^{-rate r}`. Its one-step transition probabilities are
//!
//! ```text
//! alpha = P(Y' < r | Y < r) = 1 - (1-p) q (1 - e^{-rate r/(1-p)}) / (1 - q)
//! beta  = P(Y' < r | Y > r) = (1-p) (1 - e^{-rate r/(1-p)})
//! ```
//!
//! and gaps are independent, so the whole-graph chains factor over gaps.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::snapshot::poisson_binomial;

/// One-step threshold transition probabilities of a single gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapStepProbs {
    pub alpha: f64,
    pub beta: f64,
    pub q: f64,
}

impl GapStepProbs {
    /// Stationary joint law of (current exceeds r, next exceeds r), as
    /// `[[cc, co], [oc, oo]]` where `c` = below r and `o` = at or above r.
    pub fn joint(&self) -> [[f64; 2]; 2] {
        let below = 1.0 - self.q;
        [
            [below * self.alpha, below * (1.0 - self.alpha)],
            [self.q * self.beta, self.q * (1.0 - self.beta)],
        ]
    }
}

pub fn gap_step_probs(rate: f64, r: f64, p: f64) -> Result<GapStepProbs> {
    if !(rate > 0.0 && rate.is_finite()) || !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "rate and r must be positive, got rate = {rate}, r = {r}"
        )));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::InvalidParams(format!(
            "p must be in [0, 1), got {p}"
        )));
    }
    let lr = rate * r;
    let q = (-lr).exp();
    let below = -(-lr).exp_m1();
    let fresh_below = -(-lr / (1.0 - p)).exp_m1();
    let beta = (1.0 - p) * fresh_below;
    let alpha = 1.0 - (1.0 - p) * q * fresh_below / below;
    Ok(GapStepProbs { alpha, beta, q })
}

/// Two-state connectivity chain; state 1 = connected, state 2 = disconnected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwoStateChain {
    pub matrix: [[f64; 2]; 2],
    pub stationary: [f64; 2],
}

impl TwoStateChain {
    pub fn p11(&self) -> f64 {
        self.matrix[0][0]
    }
    pub fn p12(&self) -> f64 {
        self.matrix[0][1]
    }
    pub fn p21(&self) -> f64 {
        self.matrix[1][0]
    }
    pub fn p22(&self) -> f64 {
        self.matrix[1][1]
    }

    /// Builds a chain from its off-diagonal-determining entries and fills
    /// in the stationary law.
    pub fn from_entries(p11: f64, p21: f64) -> Result<Self> {
        let matrix = [[p11, 1.0 - p11], [p21, 1.0 - p21]];
        let stationary = stationary(&matrix)?;
        Ok(Self { matrix, stationary })
    }
}

/// `P(C_{t+1} | C_t)` and `P(C_{t+1} | D_t)` in product form.
pub fn transition_matrix(params: &ModelParams) -> Result<TwoStateChain> {
    let (log_p11, log_connected) = log_products(params)?;
    let p11 = log_p11.exp();
    let one_minus_p11 = -log_p11.exp_m1();
    let disconnected = -log_connected.exp_m1();
    if disconnected == 0.0 {
        return Err(Error::DegenerateChain(
            "disconnection has probability zero to machine precision".into(),
        ));
    }
    // numerator P(C_{t+1}) - P(C_{t+1} and C_t) = P(C)(1 - p11)
    let p21 = log_connected.exp() * one_minus_p11 / disconnected;
    TwoStateChain::from_entries(p11, p21)
}

fn log_products(params: &ModelParams) -> Result<(f64, f64)> {
    let mut log_p11 = 0.0;
    let mut log_connected = 0.0;
    for &rate in params.interior_rates() {
        let g = gap_step_probs(rate, params.r(), params.p())?;
        log_p11 += g.alpha.ln();
        log_connected += (-g.q).ln_1p();
    }
    Ok((log_p11, log_connected))
}

/// Stationary law of a 2x2 chain, in the first-return-time form
/// `pi_1 = (1-p22)^2 / (p11 (1-p22)^2 + p21 p12 (2 - p22))`.
pub fn stationary(matrix: &[[f64; 2]; 2]) -> Result<[f64; 2]> {
    let [[p11, p12], [p21, p22]] = *matrix;
    if matrix.iter().flatten().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::DegenerateChain(format!(
            "transition entries outside [0, 1]: {matrix:?}"
        )));
    }
    if !(p12 > 0.0 && p21 > 0.0) {
        return Err(Error::DegenerateChain(format!(
            "chain is reducible (p12 = {p12}, p21 = {p21})"
        )));
    }
    // 1 - p22 and 1 - p11 are the off-diagonal entries by row-stochasticity
    let (a, b) = (p21, p12);
    let pi1 = a * a / (p11 * a * a + p21 * p12 * (2.0 - p22));
    let pi2 = b * b / (p22 * b * b + p12 * p21 * (2.0 - p11));
    Ok([pi1, pi2])
}

/// `pi_1(n)` along a grid of vertex counts, homogeneous rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitRow {
    pub n: usize,
    pub pi1: f64,
    /// Disconnection was impossible to machine precision; `pi1` is then 1.
    pub degenerate: bool,
}

pub fn limit_diagnostics(rate: f64, r: f64, p: f64, n_grid: &[usize]) -> Result<Vec<LimitRow>> {
    n_grid
        .iter()
        .map(|&n| {
            let params = ModelParams::homogeneous(n, p, rate, r)?;
            match transition_matrix(&params) {
                Ok(chain) => Ok(LimitRow {
                    n,
                    pi1: chain.stationary[0],
                    degenerate: false,
                }),
                Err(Error::DegenerateChain(_)) => Ok(LimitRow {
                    n,
                    pi1: 1.0,
                    degenerate: true,
                }),
                Err(e) => Err(e),
            }
        })
        .collect()
}

/// Component-count chain on states `1..=n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentChain {
    /// `joint[i][j] = P(G'_t = i+1, G'_{t+1} = j+1)`.
    pub joint: Vec<Vec<f64>>,
    /// `P(G'_t = i+1)`.
    pub occupancy: Vec<f64>,
    /// Row `i` is `None` when state `i+1` is unreachable to machine precision.
    pub rows: Vec<Option<Vec<f64>>>,
}

impl ComponentChain {
    pub fn n(&self) -> usize {
        self.occupancy.len()
    }

    /// `p'_{ij}` with 1-based states.
    pub fn entry(&self, i: usize, j: usize) -> Option<f64> {
        self.rows[i - 1].as_ref().map(|row| row[j - 1])
    }
}

/// Joint law via the bivariate generating polynomial
/// `prod_l [J(cc) + J(co) y + J(oc) x + J(oo) x y]`, whose `x^a y^b`
/// coefficient is `P(a exceedances now, b exceedances next)`.
pub fn component_transition_matrix(params: &ModelParams) -> Result<ComponentChain> {
    let n = params.n();
    let gaps = params
        .interior_rates()
        .iter()
        .map(|&rate| gap_step_probs(rate, params.r(), params.p()))
        .collect::<Result<Vec<_>>>()?;

    let mut joint = vec![vec![0.0; n]; n];
    joint[0][0] = 1.0;
    for (used, g) in gaps.iter().enumerate() {
        let [[cc, co], [oc, oo]] = g.joint();
        // degree so far is `used` in each variable; update in place from the top
        for a in (0..=used + 1).rev() {
            for b in (0..=used + 1).rev() {
                let mut v = cc * joint[a][b];
                if b > 0 {
                    v += co * joint[a][b - 1];
                }
                if a > 0 {
                    v += oc * joint[a - 1][b];
                    if b > 0 {
                        v += oo * joint[a - 1][b - 1];
                    }
                }
                joint[a][b] = v;
            }
        }
    }

    let occupancy = poisson_binomial(&gaps.iter().map(|g| g.q).collect::<Vec<_>>());
    let rows = joint
        .iter()
        .zip(&occupancy)
        .map(|(row, &occ)| {
            (occ >= f64::MIN_POSITIVE).then(|| row.iter().map(|&v| v / occ).collect())
        })
        .collect();
    Ok(ComponentChain {
        joint,
        occupancy,
        rows,
    })
}

/// Solves `pi P = pi`, `sum pi = 1` on the reachable states; unreachable
/// states get probability zero.
pub fn component_stationary(chain: &ComponentChain) -> Result<Vec<f64>> {
    let support: Vec<usize> = (0..chain.n())
        .filter(|&i| chain.rows[i].is_some())
        .collect();
    let m = support.len();
    if m == 0 {
        return Err(Error::DegenerateChain("no reachable states".into()));
    }
    // (P^T - I) pi = 0 with the last equation replaced by normalization
    let mut a = DMatrix::<f64>::zeros(m, m);
    for (col, &i) in support.iter().enumerate() {
        let row = chain.rows[i].as_ref().expect("support rows are defined");
        for (r, &j) in support.iter().enumerate() {
            a[(r, col)] = row[j];
        }
        a[(col, col)] -= 1.0;
    }
    for col in 0..m {
        a[(m - 1, col)] = 1.0;
    }
    let mut rhs = DVector::<f64>::zeros(m);
    rhs[m - 1] = 1.0;
    let solution = a.lu().solve(&rhs).ok_or_else(|| {
        Error::DegenerateChain(format!(
            "stationary system is singular on support of {m} states"
        ))
    })?;
    let mut pi = vec![0.0; chain.n()];
    for (k, &i) in support.iter().enumerate() {
        pi[i] = solution[k];
    }
    Ok(pi)
}
