//! Log-gamma and the regularized lower incomplete gamma function.

#![allow(clippy::excessive_precision)]

use std::f64::consts::PI;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const MAX_ITER: usize = 1000;

/// `ln Γ(x)` for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// `ln k!`, exact summation for small `k`.
pub fn ln_factorial(k: usize) -> f64 {
    if k < 64 {
        (2..=k).map(|j| (j as f64).ln()).sum()
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// Regularized lower incomplete gamma `P(a, x)`, `a > 0`, `x >= 0`.
///
/// Series for `x < a + 1`, Lentz continued fraction for the complement
/// otherwise.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        let mut ap = a;
        let mut term = 1.0 / a;
        let mut sum = term;
        for _ in 0..MAX_ITER {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * f64::EPSILON {
                break;
            }
        }
        (log_prefactor.exp() * sum).min(1.0)
    } else {
        1.0 - gamma_q_cf(a, x, log_prefactor)
    }
}

/// Regularized upper incomplete gamma `Q(a, x) = 1 - P(a, x)`.
pub fn gamma_q(a: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 1.0;
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        1.0 - gamma_p(a, x)
    } else {
        gamma_q_cf(a, x, log_prefactor)
    }
}

fn gamma_q_cf(a: f64, x: f64, log_prefactor: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..=MAX_ITER {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < f64::EPSILON {
            break;
        }
    }
    (log_prefactor.exp() * h).clamp(0.0, 1.0)
}

/// CDF at `x` of a sum of `m` i.i.d. exponentials with the given rate.
/// `m = 0` is the point mass at zero.
pub fn erlang_cdf(m: usize, rate: f64, x: f64) -> f64 {
    if m == 0 {
        return if x >= 0.0 { 1.0 } else { 0.0 };
    }
    if x <= 0.0 {
        return 0.0;
    }
    gamma_p(m as f64, rate * x)
}

/// Poisson pmf `e^{-mu} mu^k / k!`.
pub fn poisson_pmf(k: usize, mu: f64) -> f64 {
    if mu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    (-mu + k as f64 * mu.ln() - ln_factorial(k)).exp()
}

/// Binomial coefficient as a float.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Integer-shape oracle: `P(m, x) = 1 - e^{-x} sum_{j<m} x^j / j!`.
    fn erlang_oracle(m: usize, x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 0.0;
        for j in 0..m {
            if j > 0 {
                term *= x / j as f64;
            }
            sum += term;
        }
        1.0 - (-x).exp() * sum
    }

    #[test]
    fn ln_gamma_at_integers() {
        let mut fact = 1.0f64;
        for k in 1..25 {
            fact *= k as f64;
            let got = ln_gamma(k as f64 + 1.0);
            assert!(
                (got - fact.ln()).abs() < 1e-12 * fact.ln().max(1.0),
                "k={k}"
            );
        }
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-13);
    }

    #[test]
    fn gamma_p_matches_poisson_sum() {
        for m in 1..30 {
            for &x in &[0.01, 0.3, 1.0, 2.5, 7.0, 15.0, 40.0] {
                let want = erlang_oracle(m, x);
                let got = gamma_p(m as f64, x);
                let tol = 1e-13 * want.max(1e-300) + 1e-15;
                assert!(
                    (got - want).abs() <= tol.max(1e-15),
                    "m={m} x={x}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn p_and_q_complement() {
        for &a in &[0.5, 1.0, 3.3, 12.0] {
            for &x in &[0.1, 1.0, 5.0, 30.0] {
                assert!((gamma_p(a, x) + gamma_q(a, x) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn erlang_edge_cases() {
        assert_eq!(erlang_cdf(0, 1.0, 0.3), 1.0);
        assert_eq!(erlang_cdf(2, 1.0, 0.0), 0.0);
        assert!((erlang_cdf(1, 2.0, 0.5) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    }

    #[test]
    fn poisson_and_binomial() {
        let total: f64 = (0..60).map(|k| poisson_pmf(k, 3.0)).sum();
        assert!((total - 1.0).abs() < 1e-14);
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(5, 7), 0.0);
        assert!((poisson_pmf(0, 2.0) - (-2.0f64).exp()).abs() < 1e-16);
    }
}
