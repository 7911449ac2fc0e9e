//! Model parameters `(n, p, rates, r)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parameters of the exponential random geometric graph process.
///
/// `rates[l]` is the exponential rate of gap `l`, for `l = 0..n`. Gap 0 is the
/// distance from the origin to the first vertex and never affects topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    n: usize,
    p: f64,
    rates: Vec<f64>,
    r: f64,
}

impl ModelParams {
    pub fn new(n: usize, p: f64, rates: Vec<f64>, r: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParams(format!("n must be >= 2, got {n}")));
        }
        if !(0.0..1.0).contains(&p) {
            return Err(Error::InvalidParams(format!(
                "memory parameter p must satisfy 0 <= p < 1, got {p}"
            )));
        }
        if rates.len() != n {
            return Err(Error::InvalidParams(format!(
                "expected {n} rates, got {}",
                rates.len()
            )));
        }
        if let Some(bad) = rates.iter().find(|&&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidParams(format!(
                "rates must be positive and finite, got {bad}"
            )));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "cutoff r must be positive and finite, got {r}"
            )));
        }
        Ok(Self { n, p, rates, r })
    }

    /// All gaps share one rate.
    pub fn homogeneous(n: usize, p: f64, rate: f64, r: f64) -> Result<Self> {
        Self::new(n, p, vec![rate; n.max(1)], r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    /// Rates of the interior gaps `1..n`, the only ones that shape the graph.
    pub fn interior_rates(&self) -> &[f64] {
        &self.rates[1..]
    }

    /// `Some(rate)` when every interior gap shares the same rate.
    pub fn common_interior_rate(&self) -> Option<f64> {
        let first = self.rates[1];
        self.rates[1..].iter().all(|&l| l == first).then_some(first)
    }

    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(self.n, self.p, self.rates.clone(), r)
    }

    pub fn with_p(&self, p: f64) -> Result<Self> {
        Self::new(self.n, p, self.rates.clone(), self.r)
    }
}

/// Rate specification: a scalar, or a piecewise list of `count:rate` pairs.
///
/// In piecewise form the counts must add up to exactly `n` (gaps `0..n`).
/// The last count may be `*`, meaning "all remaining gaps".
#[derive(Debug, Clone, PartialEq)]
pub enum RateSpec {
    Scalar(f64),
    Piecewise(Vec<(PieceCount, f64)>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PieceCount {
    Exactly(usize),
    Rest,
}

impl RateSpec {
    pub fn expand(&self, n: usize) -> Result<Vec<f64>> {
        match self {
            RateSpec::Scalar(rate) => Ok(vec![*rate; n]),
            RateSpec::Piecewise(pieces) => {
                let mut rates = Vec::with_capacity(n);
                for (i, &(count, rate)) in pieces.iter().enumerate() {
                    match count {
                        PieceCount::Exactly(c) => rates.extend(std::iter::repeat_n(rate, c)),
                        PieceCount::Rest => {
                            if i + 1 != pieces.len() {
                                return Err(Error::InvalidParams(
                                    "'*' count is only allowed on the last piece".into(),
                                ));
                            }
                            if rates.len() > n {
                                break;
                            }
                            let rest = n - rates.len();
                            rates.extend(std::iter::repeat_n(rate, rest));
                        }
                    }
                }
                if rates.len() != n {
                    return Err(Error::InvalidParams(format!(
                        "rate spec covers {} gaps, expected exactly {n}",
                        rates.len()
                    )));
                }
                Ok(rates)
            }
        }
    }

    pub fn is_scalar(&self) -> bool {
        matches!(self, RateSpec::Scalar(_))
    }
}

impl FromStr for RateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |what: &str| Error::InvalidParams(format!("bad rate spec {s:?}: {what}"));
        if !s.contains(':') {
            let rate: f64 = s.parse().map_err(|_| bad("not a number"))?;
            return Ok(RateSpec::Scalar(rate));
        }
        let mut pieces = Vec::new();
        for piece in s.split(',') {
            let (count, rate) = piece
                .split_once(':')
                .ok_or_else(|| bad("expected count:rate"))?;
            let count = match count.trim() {
                "*" => PieceCount::Rest,
                c => PieceCount::Exactly(c.parse().map_err(|_| bad("count"))?),
            };
            let rate: f64 = rate.trim().parse().map_err(|_| bad("rate"))?;
            pieces.push((count, rate));
        }
        Ok(RateSpec::Piecewise(pieces))
    }
}

impl fmt::Display for RateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RateSpec::Scalar(rate) => write!(f, "{rate}"),
            RateSpec::Piecewise(pieces) => {
                for (i, (count, rate)) in pieces.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    match count {
                        PieceCount::Exactly(c) => write!(f, "{c}:{rate}")?,
                        PieceCount::Rest => write!(f, "*:{rate}")?,
                    }
                }
                Ok(())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_domain() {
        assert!(ModelParams::homogeneous(1, 0.5, 1.0, 1.0).is_err());
        assert!(ModelParams::homogeneous(3, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::homogeneous(3, -0.1, 1.0, 1.0).is_err());
        assert!(ModelParams::homogeneous(3, 0.5, 0.0, 1.0).is_err());
        assert!(ModelParams::homogeneous(3, 0.5, 1.0, 0.0).is_err());
        assert!(ModelParams::new(3, 0.5, vec![1.0, 1.0], 1.0).is_err());
        assert!(ModelParams::homogeneous(2, 0.0, 1.0, 1.0).is_ok());
    }

    #[test]
    fn piecewise_rates_must_cover_n() {
        let spec: RateSpec = "11:1,49:2".parse().unwrap();
        assert_eq!(spec.expand(60).unwrap().len(), 60);
        assert!(spec.expand(59).is_err());
        let spec: RateSpec = "11:1,*:2".parse().unwrap();
        let rates = spec.expand(20).unwrap();
        assert_eq!(rates[10], 1.0);
        assert_eq!(rates[11], 2.0);
        assert_eq!(spec.to_string(), "11:1,*:2");
    }

    #[test]
    fn scalar_spec() {
        let spec: RateSpec = "1.5".parse().unwrap();
        assert_eq!(spec.expand(3).unwrap(), vec![1.5; 3]);
        assert!("x".parse::<RateSpec>().is_err());
    }

    #[test]
    fn common_rate_ignores_origin_gap() {
        let p = ModelParams::new(3, 0.2, vec![5.0, 1.0, 1.0], 1.0).unwrap();
        assert_eq!(p.common_interior_rate(), Some(1.0));
        let p = ModelParams::new(3, 0.2, vec![1.0, 1.0, 2.0], 1.0).unwrap();
        assert_eq!(p.common_interior_rate(), None);
    }
}
