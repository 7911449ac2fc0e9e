//! Brute-force oracles for the closed forms. Each oracle enumerates the
//! underlying events directly and shares no code path with the library
//! routine it checks.

use exprgg::chain::{
    component_stationary, component_transition_matrix, gap_step_probs, stationary,
    transition_matrix,
};
use exprgg::gap::{sample_stationary, GapState};
use exprgg::hitting::{hitting_time_oracle, hitting_time_recursion};
use exprgg::snapshot::{component_pmf, connectivity_probability};
use exprgg::{ModelParams, RandomStream};

fn random_params(rng: &mut RandomStream, n: usize) -> ModelParams {
    let p = 0.95 * rng.uniform();
    let rates: Vec<f64> = (0..n).map(|_| 0.2 + 2.8 * rng.uniform()).collect();
    let r = 0.2 + 1.8 * rng.uniform();
    ModelParams::new(n, p, rates, r).unwrap()
}

/// Per-gap one-step factors written out from the conditional densities,
/// independent of `gap_step_probs`.
struct GapFactors {
    q: f64,
    /// P(next < r | now < r)
    stay_below: f64,
    /// P(next < r | now > r)
    come_back: f64,
}

fn factors(rate: f64, r: f64, p: f64) -> GapFactors {
    let q = (-rate * r).exp();
    let fresh = 1.0 - (-rate * r / (1.0 - p)).exp();
    GapFactors {
        q,
        stay_below: 1.0 - (1.0 - p) * q * fresh / (1.0 - q),
        come_back: (1.0 - p) * fresh,
    }
}

/// `sum_{A != {}} P(C_{t+1} | E_A) P(E_A) / P(D_t)` over all exceedance sets.
fn p21_subset_sum(params: &ModelParams) -> f64 {
    let f: Vec<GapFactors> = params
        .interior_rates()
        .iter()
        .map(|&l| factors(l, params.r(), params.p()))
        .collect();
    let m = f.len();
    let mut total = 0.0;
    for set in 1u32..(1 << m) {
        let mut term = 1.0;
        for (l, g) in f.iter().enumerate() {
            if set >> l & 1 == 1 {
                term *= g.q * g.come_back;
            } else {
                term *= (1.0 - g.q) * g.stay_below;
            }
        }
        total += term;
    }
    let connected: f64 = f.iter().map(|g| 1.0 - g.q).product();
    total / (1.0 - connected)
}

#[test]
fn product_form_p21_matches_subset_sum() {
    let mut rng = RandomStream::new(2024, 1);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        for n in 2..=12 {
            let params = random_params(&mut rng, n);
            let chain = transition_matrix(&params).unwrap();
            worst = worst.max((chain.p21() - p21_subset_sum(&params)).abs());
        }
    }
    assert!(worst <= 1e-12, "max |diff| = {worst:e}");
}

#[test]
fn stationary_matches_linear_solve() {
    let mut rng = RandomStream::new(77, 0);
    for _ in 0..100 {
        let p11 = 0.01 + 0.98 * rng.uniform();
        let p21 = 0.01 + 0.98 * rng.uniform();
        let m = [[p11, 1.0 - p11], [p21, 1.0 - p21]];
        let pi = stationary(&m).unwrap();
        // pi P = pi with pi_1 + pi_2 = 1: pi_1 (1 - p11) = pi_2 p21
        let pi1 = p21 / (1.0 - p11 + p21);
        assert!((pi[0] - pi1).abs() < 1e-12);
        assert!((pi[1] - (1.0 - pi1)).abs() < 1e-12);
        let back = pi[0] * m[0][0] + pi[1] * m[1][0];
        assert!((back - pi[0]).abs() < 1e-12);
    }
}

/// Component-chain joint law by enumerating every pair of exceedance sets.
fn component_joint_brute(params: &ModelParams) -> (Vec<Vec<f64>>, Vec<f64>) {
    let f: Vec<GapFactors> = params
        .interior_rates()
        .iter()
        .map(|&l| factors(l, params.r(), params.p()))
        .collect();
    let m = f.len();
    let n = params.n();
    let mut joint = vec![vec![0.0; n]; n];
    let mut occupancy = vec![0.0; n];
    for a in 0u32..(1 << m) {
        let mut p_a = 1.0;
        for (l, g) in f.iter().enumerate() {
            p_a *= if a >> l & 1 == 1 { g.q } else { 1.0 - g.q };
        }
        occupancy[a.count_ones() as usize] += p_a;
        for b in 0u32..(1 << m) {
            let mut p_b_given_a = 1.0;
            for (l, g) in f.iter().enumerate() {
                let now = a >> l & 1 == 1;
                let next = b >> l & 1 == 1;
                p_b_given_a *= match (now, next) {
                    (true, true) => 1.0 - g.come_back,
                    (true, false) => g.come_back,
                    (false, true) => 1.0 - g.stay_below,
                    (false, false) => g.stay_below,
                };
            }
            joint[a.count_ones() as usize][b.count_ones() as usize] += p_b_given_a * p_a;
        }
    }
    (joint, occupancy)
}

#[test]
fn component_dp_matches_double_subset_enumeration() {
    let mut rng = RandomStream::new(31, 0);
    for n in 2..=10 {
        let params = random_params(&mut rng, n);
        let chain = component_transition_matrix(&params).unwrap();
        let (joint, occupancy) = component_joint_brute(&params);
        for i in 0..n {
            assert!((chain.occupancy[i] - occupancy[i]).abs() < 1e-12);
            let row = chain.rows[i].as_ref().unwrap();
            for j in 0..n {
                let want = joint[i][j] / occupancy[i];
                assert!((row[j] - want).abs() < 1e-12, "n={n} i={i} j={j}");
            }
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        let two = transition_matrix(&params).unwrap();
        assert!((chain.entry(1, 1).unwrap() - two.p11()).abs() < 1e-12);
        let pi = component_stationary(&chain).unwrap();
        for i in 0..n {
            assert!((pi[i] - occupancy[i]).abs() < 1e-10);
        }
        assert!((pi[0] - two.stationary[0]).abs() < 1e-10);
    }
}

#[test]
fn psi_matches_subset_enumeration() {
    let mut rng = RandomStream::new(5, 5);
    for n in 2..=12 {
        let params = random_params(&mut rng, n);
        let q: Vec<f64> = params
            .interior_rates()
            .iter()
            .map(|&l| (-l * params.r()).exp())
            .collect();
        let mut want = vec![0.0; n];
        for set in 0u32..(1 << (n - 1)) {
            let mut prob = 1.0;
            for (l, &ql) in q.iter().enumerate() {
                prob *= if set >> l & 1 == 1 { ql } else { 1.0 - ql };
            }
            want[set.count_ones() as usize] += prob;
        }
        let psi = component_pmf(&params);
        for k in 0..n {
            assert!((psi[k] - want[k]).abs() < 1e-14);
        }
        assert!((psi[0] - connectivity_probability(&params)).abs() < 1e-15);
    }
}

fn pairwise_degree(state: &GapState, r: f64, i: usize) -> usize {
    let x = state.positions();
    (0..x.len())
        .filter(|&j| j != i - 1 && (x[i - 1] - x[j]).abs() < r)
        .count()
}

#[test]
fn degree_scan_matches_pairwise_distances() {
    let mut rng = RandomStream::new(8, 0);
    for trial in 0..100 {
        let n = 2 + trial % 30;
        let params = ModelParams::homogeneous(n, 0.5, 1.0 + (trial % 3) as f64, 1.0).unwrap();
        let state = sample_stationary(&params, &mut rng);
        let r = 0.3 + rng.uniform();
        for i in 1..=n {
            assert_eq!(state.degree(r, i).unwrap(), pairwise_degree(&state, r, i));
        }
    }
}

#[test]
fn hitting_recursion_matches_run_decomposition() {
    let mut worst = 0.0f64;
    for &n in &[2, 3] {
        for &p in &[0.0, 0.3, 0.9] {
            let params = ModelParams::homogeneous(n, p, 1.0, 1.0).unwrap();
            let rec = hitting_time_recursion(&params, 6, 1e-10).unwrap();
            let ora = hitting_time_oracle(&params, 6).unwrap();
            for k in 0..=6 {
                worst = worst.max((rec.tail[k] - ora.tail[k]).abs());
            }
            let p11 = transition_matrix(&params).unwrap().p11();
            assert!((rec.tail[1] - p11).abs() < 1e-10);
        }
    }
    assert!(worst < 1e-9, "max |diff| = {worst:e}");
}

#[test]
fn hitting_routes_agree_on_heterogeneous_rates() {
    let params = ModelParams::new(4, 0.6, vec![1.0, 0.7, 2.0, 0.7], 0.9).unwrap();
    let rec = hitting_time_recursion(&params, 5, 1e-10).unwrap();
    let ora = hitting_time_oracle(&params, 5).unwrap();
    for k in 0..=5 {
        assert!((rec.tail[k] - ora.tail[k]).abs() < 1e-9, "k={k}");
    }
}

#[test]
fn run_decomposition_leading_run_by_hand() {
    // n = 2, k = 2: S(2) = sum over xi of weight * run product, written out.
    let (rate, r, p) = (1.0f64, 1.0f64, 0.4f64);
    let mu = rate / (1.0 - p);
    let g1 = 1.0 - (-mu * r).exp();
    let g2 = 1.0 - (-mu * r).exp() * (1.0 + mu * r);
    let trunc = 1.0 - (-rate * r).exp();
    // P(Y~ + e < r), Y~ truncated Exp(rate) on (0, r), e ~ Exp(mu)
    let lead1 =
        (1.0 / trunc) * (trunc - rate * (-mu * r).exp() * ((mu - rate) * r).exp_m1() / (mu - rate));
    // P(Y~ + e1 + e2 < r) by Simpson on the closed-form Erlang CDF
    let h = r / 2000.0;
    let mut lead2 = 0.0;
    for s in 0..=2000 {
        let y = s as f64 * h;
        let w = if s == 0 || s == 2000 {
            1.0
        } else if s % 2 == 1 {
            4.0
        } else {
            2.0
        };
        let z = mu * (r - y);
        lead2 += w * rate * (-rate * y).exp() * (1.0 - (-z).exp() * (1.0 + z));
    }
    lead2 *= h / 3.0 / trunc;
    let want = (1.0 - p).powi(2) * g1 * g1 // 00
        + p * (1.0 - p) * g2                // 01: fresh run of two
        + p * (1.0 - p) * lead1 * g1        // 10
        + p * p * lead2; // 11
    let params = ModelParams::homogeneous(2, p, rate, r).unwrap();
    let got = hitting_time_oracle(&params, 2).unwrap().tail[2];
    assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    let alpha = gap_step_probs(rate, r, p).unwrap().alpha;
    assert!((hitting_time_oracle(&params, 1).unwrap().tail[1] - alpha).abs() < 1e-13);
}

/// The trajectory z-test must tell the one-step law from plausible
/// mistakes in it.
#[test]
fn mc_check_rejects_mutated_alpha() {
    use exprgg::mc::{estimate_transitions, Z_LIMIT};

    let (rate, r, p, n) = (1.0f64, 1.0f64, 0.5f64, 5);
    let params = ModelParams::homogeneous(n, p, rate, r).unwrap();
    let est = estimate_transitions(&params, 1_000_000, 0, &mut RandomStream::new(99, 0)).unwrap();
    let p11 = est.p11().unwrap();

    let q = (-rate * r).exp();
    let fresh = 1.0 - (-rate * r / (1.0 - p)).exp();
    let alpha = |a: f64| a.powi(n as i32 - 1);
    let right = 1.0 - (1.0 - p) * q * fresh / (1.0 - q);
    let flipped_sign = 1.0 + (1.0 - p) * q * fresh / (1.0 - q);
    let flipped_denominator = 1.0 - (1.0 - p) * q * fresh / (1.0 + q);

    assert!(p11.clone().with_target(alpha(right)).within(Z_LIMIT));
    for wrong in [flipped_sign, flipped_denominator] {
        let z = p11.clone().with_target(alpha(wrong)).z.unwrap();
        assert!(z.abs() > 10.0 * Z_LIMIT, "z = {z}");
    }
}
