//! The operations behind the `exprgg` subcommands.
//!
//! Each command turns a model and its options into [`Artifact`]s. Every
//! probability table is checked for normalization before it is returned.

use serde_json::Value;

use crate::chain::{component_stationary, component_transition_matrix, transition_matrix};
use crate::error::{Error, Result};
use crate::gap::sample_stationary;
use crate::hitting::{hitting_time_oracle, hitting_time_recursion};
use crate::mc::{
    estimate_hitting_time, estimate_snapshot_stats, estimate_transitions, pool_sparse_bins,
    EstimateReport,
};
use crate::output::{ensure_normalized, num, Artifact, Table};
use crate::params::{ModelParams, RateSpec};
use crate::rng::RandomStream;
use crate::snapshot::{
    component_pmf, connectivity_distance_cdf, connectivity_distance_quantile,
    degree_pmf_closed_form, degree_pmf_exact, nn_distance_cdf, nn_distance_quantile,
    strong_law_experiment,
};
use crate::verify::{self, VerifyReport};

const NORM_TOL: f64 = 1e-10;

/// Model options shared by all commands.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub n: usize,
    pub p: f64,
    pub r: f64,
    pub lambda: RateSpec,
}

impl Model {
    pub fn params(&self) -> Result<ModelParams> {
        self.params_at(self.n)
    }

    /// Same model with `n` vertices; the rate spec is re-expanded.
    pub fn params_at(&self, n: usize) -> Result<ModelParams> {
        ModelParams::new(n, self.p, self.lambda.expand(n)?, self.r)
    }
}

/// Parses a grid of sizes: `2,5,10`, `1e2,1e3` or the inclusive range `12..60`.
pub fn parse_grid(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParams(format!("bad grid {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (parse_count(a)?, parse_count(b)?);
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    let grid = s.split(',').map(parse_count).collect::<Result<Vec<_>>>()?;
    if grid.is_empty() {
        return Err(bad());
    }
    Ok(grid)
}

/// Parses a count that may be written in scientific notation (`1e6`).
pub fn parse_count(s: &str) -> Result<usize> {
    let s = s.trim();
    if let Ok(v) = s.parse::<usize>() {
        return Ok(v);
    }
    match s.parse::<f64>() {
        Ok(v) if v >= 0.0 && v.fract() == 0.0 && v < 1e15 => Ok(v as usize),
        _ => Err(Error::InvalidParams(format!("not a count: {s:?}"))),
    }
}

fn row_check(table: &str, row: &[f64]) -> Result<()> {
    ensure_normalized(table, row, NORM_TOL)
}

pub fn chain(
    model: &Model,
    limit_grid: Option<&[usize]>,
    mc_steps: Option<usize>,
    seed: u64,
) -> Result<Vec<Artifact>> {
    let params = model.params()?;
    let two = transition_matrix(&params)?;
    let mut matrix = Table::new("chain_matrix", &["from", "to_connected", "to_disconnected"]);
    for (name, row) in ["connected", "disconnected"].iter().zip(two.matrix) {
        row_check("chain_matrix", &row)?;
        matrix.push(vec![(*name).into(), num(row[0]), num(row[1])]);
    }
    row_check("chain_stationary", &two.stationary)?;
    let mut stat = Table::new("chain_stationary", &["state", "pi"]);
    stat.push(vec!["connected".into(), num(two.stationary[0])]);
    stat.push(vec!["disconnected".into(), num(two.stationary[1])]);
    let mut out = vec![Artifact::Table(matrix), Artifact::Table(stat)];

    if let Some(grid) = limit_grid {
        let mut limit = Table::new("chain_limit", &["n", "pi1", "p11", "p21", "degenerate"]);
        for &n in grid {
            let params = model.params_at(n)?;
            match transition_matrix(&params) {
                Ok(c) => limit.push(vec![
                    n.into(),
                    num(c.stationary[0]),
                    num(c.p11()),
                    num(c.p21()),
                    false.into(),
                ]),
                // disconnection impossible to machine precision
                Err(Error::DegenerateChain(_)) => {
                    limit.push(vec![n.into(), num(1.0), num(1.0), Value::Null, true.into()])
                }
                Err(e) => return Err(e),
            }
        }
        out.push(Artifact::Table(limit));
    }
    if let Some(steps) = mc_steps {
        let est = estimate_transitions(&params, steps, 0, &mut RandomStream::new(seed, 0))?;
        let reports = vec![
            est.p11()?.with_target(two.p11()),
            est.p21()?.with_target(two.p21()),
        ];
        out.push(Artifact::Table(Table::from_reports("chain_mc", &reports)));
    }
    Ok(out)
}

pub fn components(model: &Model) -> Result<Vec<Artifact>> {
    let params = model.params()?;
    let n = params.n();
    let chain = component_transition_matrix(&params)?;
    let mut columns = vec!["from".to_string()];
    columns.extend((1..=n).map(|j| format!("to_{j}")));
    let mut matrix = Table::with_columns("component_matrix", columns);
    for (i, row) in chain.rows.iter().enumerate() {
        let mut cells: Vec<Value> = vec![(i + 1).into()];
        match row {
            Some(row) => {
                row_check("component_matrix", row)?;
                cells.extend(row.iter().map(|&x| num(x)));
            }
            // state never occupied at machine precision
            None => cells.extend(std::iter::repeat_n(Value::Null, n)),
        }
        matrix.push(cells);
    }
    let pi = component_stationary(&chain)?;
    row_check("component_stationary", &pi)?;
    let mut stat = Table::new("component_stationary", &["k", "pi", "occupancy"]);
    for (k, (&pk, &occ)) in pi.iter().zip(&chain.occupancy).enumerate() {
        stat.push(vec![(k + 1).into(), num(pk), num(occ)]);
    }
    Ok(vec![Artifact::Table(matrix), Artifact::Table(stat)])
}

pub struct HittingOptions {
    pub k_max: usize,
    pub quad_tol: f64,
    pub oracle: bool,
    pub mc: Option<usize>,
    pub seed: u64,
}

pub fn hitting(model: &Model, opts: &HittingOptions) -> Result<Vec<Artifact>> {
    let params = model.params()?;
    let rec = hitting_time_recursion(&params, opts.k_max, opts.quad_tol)?;
    let ora = if opts.oracle {
        Some(hitting_time_oracle(&params, opts.k_max)?)
    } else {
        None
    };
    let mc = match opts.mc {
        Some(reps) => Some(estimate_hitting_time(
            &params,
            reps,
            rec.truncation_k,
            &RandomStream::new(opts.seed, 0),
        )?),
        None => None,
    };
    // treating the connectivity indicator as a Markov chain gives p11^k
    let markov = transition_matrix(&params).ok().map(|c| c.p11());
    let mut cols = vec!["k", "recursion", "markov"];
    if ora.is_some() {
        cols.push("oracle");
    }
    if mc.is_some() {
        cols.extend(["mc", "mc_se", "z"]);
    }
    let mut tail = Table::new("hitting_tail", &cols);
    for k in 0..rec.tail.len() {
        let mut row = vec![
            k.into(),
            num(rec.tail[k]),
            markov.map_or(Value::Null, |m| num(m.powi(k as i32))),
        ];
        if let Some(o) = &ora {
            row.push(o.tail.get(k).map_or(Value::Null, |&t| num(t)));
        }
        if let Some(m) = &mc {
            let r = m.tail[k].clone().with_target(rec.tail[k]);
            // MC runs to the recursion's truncation point, so `k` is in range
            row.extend([num(r.value), num(r.se), r.z.map_or(Value::Null, num)]);
        }
        tail.push(row);
    }
    // the pmf of T on 1..=K plus the mass beyond K
    let mut pmf = rec.pmf();
    pmf.push(*rec.tail.last().expect("nonempty tail"));
    row_check("hitting_tail", &pmf)?;

    let (lo, hi) = rec.expectation_bracket;
    let mut mean = Table::new(
        "hitting_mean",
        &["quantity", "lower", "upper", "truncation_k", "mc", "mc_se"],
    );
    let (mv, ms) = mc.as_ref().map_or((Value::Null, Value::Null), |m| {
        (num(m.mean.value), num(m.mean.se))
    });
    mean.push(vec![
        "E[T]".into(),
        num(lo),
        num(hi),
        rec.truncation_k.into(),
        mv,
        ms,
    ]);
    Ok(vec![Artifact::Table(tail), Artifact::Table(mean)])
}

/// Connectivity, component counts and extreme-distance quantiles of one
/// snapshot, with MC reports when `mc` samples are requested.
pub fn snapshot_summary(model: &Model, mc: Option<usize>, seed: u64) -> Result<Vec<Artifact>> {
    let params = model.params()?;
    let psi = component_pmf(&params);
    row_check("snapshot_components", &psi)?;
    let mut comp = Table::new("snapshot_components", &["k", "psi"]);
    for (k, &p) in psi.iter().enumerate() {
        comp.push(vec![(k + 1).into(), num(p)]);
    }
    let mut quant = Table::new("snapshot_extremes", &["level", "c_n", "b_n"]);
    for level in [0.05, 0.25, 0.5, 0.75, 0.95] {
        quant.push(vec![
            num(level),
            num(connectivity_distance_quantile(&params, level)?),
            num(nn_distance_quantile(&params, level)?),
        ]);
    }
    let mut out = vec![Artifact::Table(comp), Artifact::Table(quant)];
    if let Some(samples) = mc {
        let est = estimate_snapshot_stats(&params, samples, &[], &RandomStream::new(seed, 0))?;
        let mut reports = vec![est.connectivity.clone()];
        reports.extend(pool_sparse_bins(&est.components, 10.0));
        out.push(Artifact::Table(Table::from_reports(
            "snapshot_mc",
            &reports,
        )));
        let mut ks = Table::new(
            "snapshot_ks",
            &["quantity", "statistic", "critical", "samples", "passed"],
        );
        for k in [&est.connectivity_distance, &est.nn_distance] {
            ks.push(vec![
                k.quantity.clone().into(),
                num(k.statistic),
                num(k.critical),
                k.samples.into(),
                k.passed().into(),
            ]);
        }
        out.push(Artifact::Table(ks));
    }
    Ok(out)
}

/// Component-count probabilities along `n` for the two-rate configuration
/// (rate 1 on the first ten interior gaps, 2 beyond).
pub fn snapshot_figure2(r: f64, n_grid: &[usize], ks: &[usize]) -> Result<Vec<Artifact>> {
    if n_grid.iter().any(|&n| n < 2) || ks.contains(&0) {
        return Err(Error::InvalidParams("need n >= 2 and k >= 1".into()));
    }
    let mut cols = vec!["n".to_string()];
    cols.extend(ks.iter().map(|k| format!("psi_{k}")));
    let mut table = Table::with_columns("figure2", cols);
    for (n, values) in verify::figure2_table(r, n_grid, ks)? {
        let mut row = vec![n.into()];
        row.extend(values.into_iter().map(num));
        table.push(row);
    }
    Ok(vec![Artifact::Table(table)])
}

pub fn snapshot_degree(
    model: &Model,
    vertex: usize,
    mc: Option<usize>,
    seed: u64,
) -> Result<Vec<Artifact>> {
    let params = model.params()?;
    let closed = degree_pmf_closed_form(&params, vertex)?;
    let exact = degree_pmf_exact(&params, vertex)?;
    row_check("degree", &exact.probs)?;
    let est = match mc {
        Some(samples) => Some(estimate_snapshot_stats(
            &params,
            samples,
            &[vertex],
            &RandomStream::new(seed, 0),
        )?),
        None => None,
    };
    let mut cols = vec!["k", "closed_form", "class", "exact"];
    if est.is_some() {
        cols.extend(["mc", "mc_se", "z"]);
    }
    let mut table = Table::new("degree", &cols);
    for k in 0..exact.probs.len() {
        let mut row = vec![
            k.into(),
            num(closed.probs[k]),
            format!("{:?}", closed.classes[k]).to_lowercase().into(),
            num(exact.probs[k]),
        ];
        if let Some(e) = &est {
            let r: &EstimateReport = &e.degrees[0].1[k];
            row.extend([num(r.value), num(r.se), r.z.map_or(Value::Null, num)]);
        }
        table.push(row);
    }
    Ok(vec![Artifact::Table(table)])
}

/// CDF tables of `c_n` and `b_n` for the model, and the normalized means
/// over `n_grid` when given.
pub fn snapshot_extremes(
    model: &Model,
    n_grid: Option<&[usize]>,
    reps: usize,
    seed: u64,
) -> Result<Vec<Artifact>> {
    let params = model.params()?;
    let top = connectivity_distance_quantile(&params, 0.999)?;
    let mut cdf = Table::new("extremes_cdf", &["y", "c_n_cdf", "b_n_cdf"]);
    for s in 0..=100 {
        let y = top * s as f64 / 100.0;
        cdf.push(vec![
            num(y),
            num(connectivity_distance_cdf(&params, y)),
            num(nn_distance_cdf(&params, y)),
        ]);
    }
    let mut out = vec![Artifact::Table(cdf)];
    if let Some(grid) = n_grid {
        let rate = params.common_interior_rate().ok_or_else(|| {
            Error::Unsupported("the extreme-distance experiment needs a single rate".into())
        })?;
        let rows = strong_law_experiment(rate, grid, reps, &RandomStream::new(seed, 0))?;
        let mut table = Table::new(
            "extremes_ratio",
            &[
                "n", "reps", "c_mean", "c_se", "c_lo95", "c_hi95", "b_mean", "b_se", "b_lo95",
                "b_hi95",
            ],
        );
        for row in rows {
            let (cl, ch) = row.c_ci95();
            let (bl, bh) = row.b_ci95();
            table.push(vec![
                row.n.into(),
                row.replications.into(),
                num(row.c_ratio_mean),
                num(row.c_ratio_se),
                num(cl),
                num(ch),
                num(row.b_ratio_mean),
                num(row.b_ratio_se),
                num(bl),
                num(bh),
            ]);
        }
        out.push(Artifact::Table(table));
    }
    Ok(out)
}

/// One trajectory from a stationary start: per step, connectivity, the
/// number of components and both extreme distances.
pub fn simulate(model: &Model, steps: usize, seed: u64) -> Result<Vec<Artifact>> {
    let params = model.params()?;
    let r = params.r();
    let mut rng = RandomStream::new(seed, 0);
    let mut state = sample_stationary(&params, &mut rng);
    let mut table = Table::new("trajectory", &["t", "connected", "components", "c", "b"]);
    for t in 0..=steps {
        if t > 0 {
            state.step_in_place(&params, &mut rng);
        }
        let k = state.component_count(r);
        let e = state.extreme_distances();
        table.push(vec![
            t.into(),
            (k == 1).into(),
            k.into(),
            num(e.c),
            num(e.b),
        ]);
    }
    Ok(vec![Artifact::Table(table)])
}

/// Runs the selected criteria (all when `only` is empty).
pub fn verify(seed: u64, only: &[u8]) -> Result<VerifyReport> {
    if let Some(bad) = only
        .iter()
        .find(|&&id| id == 0 || id as usize > verify::CRITERIA.len())
    {
        return Err(Error::InvalidParams(format!("no criterion {bad}")));
    }
    let criteria: Vec<_> = verify::CRITERIA
        .iter()
        .enumerate()
        .filter(|(i, _)| only.is_empty() || only.contains(&(*i as u8 + 1)))
        .map(|(_, c)| c(seed))
        .collect();
    Ok(VerifyReport {
        seed,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(n: usize, p: f64) -> Model {
        Model {
            n,
            p,
            r: 1.0,
            lambda: RateSpec::Scalar(1.0),
        }
    }

    fn table(a: &Artifact) -> &Table {
        match a {
            Artifact::Table(t) => t,
            _ => panic!("not a table"),
        }
    }

    #[test]
    fn grids() {
        assert_eq!(parse_grid("2,5,10").unwrap(), vec![2, 5, 10]);
        assert_eq!(parse_grid("1e2,1e3").unwrap(), vec![100, 1000]);
        assert_eq!(parse_grid("12..15").unwrap(), vec![12, 13, 14, 15]);
        assert!(parse_grid("5..2").is_err());
        assert!(parse_grid("1.5").is_err());
        assert_eq!(parse_count("1e6").unwrap(), 1_000_000);
    }

    #[test]
    fn chain_rows_sum_to_one_and_p0_rows_match() {
        let out = chain(&model(5, 0.0), Some(&[2, 5, 10, 20, 50]), None, 1).unwrap();
        let m = table(&out[0]);
        let to_c = m.column("to_connected").unwrap();
        assert!((to_c[0] - to_c[1]).abs() < 1e-15);
        let pi1 = table(&out[2]).column("pi1").unwrap();
        assert!(pi1.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn hitting_rejects_large_k() {
        let opts = HittingOptions {
            k_max: 25,
            quad_tol: 1e-10,
            oracle: false,
            mc: None,
            seed: 1,
        };
        let err = hitting(&model(3, 0.5), &opts).unwrap_err();
        assert!(matches!(err, Error::KOutOfRange { .. }));
        assert!(err.is_usage());
    }

    #[test]
    fn degree_table_sums_to_one() {
        let out = snapshot_degree(&model(50, 0.5), 25, None, 1).unwrap();
        let exact = table(&out[0]).column("exact").unwrap();
        assert!((exact.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn figure2_columns_decay() {
        let out = snapshot_figure2(1.0, &parse_grid("12..60").unwrap(), &[1, 2, 3, 4]).unwrap();
        let t = table(&out[0]);
        for k in 1..=4 {
            let col = t.column(&format!("psi_{k}")).unwrap();
            assert!(*col.last().unwrap() < 1e-2);
        }
    }

    #[test]
    fn heterogeneous_degree_is_rejected() {
        let mut m = model(20, 0.5);
        m.lambda = "10:1,*:2".parse().unwrap();
        assert!(matches!(
            snapshot_degree(&m, 5, None, 1),
            Err(Error::Unsupported(_))
        ));
    }
}
