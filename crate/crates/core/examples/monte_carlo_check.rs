//! Analytic values against simulation, as z-scores.
//!
//! cargo run --release --example monte_carlo_check

use exprgg::chain::transition_matrix;
use exprgg::mc::{
    estimate_autocorrelation, estimate_snapshot_stats, estimate_transitions, Z_LIMIT,
};
use exprgg::{ModelParams, RandomStream};

fn main() -> exprgg::Result<()> {
    let params = ModelParams::homogeneous(5, 0.5, 1.0, 1.0)?;
    let chain = transition_matrix(&params)?;
    let est = estimate_transitions(&params, 200_000, 0, &mut RandomStream::new(10, 0))?;
    let mut reports = vec![
        est.p11()?.with_target(chain.p11()),
        est.p21()?.with_target(chain.p21()),
    ];

    let snap = estimate_snapshot_stats(&params, 100_000, &[1, 3], &RandomStream::new(10, 1))?;
    reports.extend(snap.all_reports().cloned());
    reports.extend(estimate_autocorrelation(
        &params,
        1,
        200_000,
        3,
        &mut RandomStream::new(10, 2),
    )?);

    for r in &reports {
        let Some(z) = r.z else { continue };
        let flag = if z.abs() <= Z_LIMIT {
            ""
        } else {
            "  <-- beyond limit"
        };
        println!(
            "{:<16} {:>10.6} +- {:.1e}  target {:>10.6}  z {z:+.2}{flag}",
            r.quantity,
            r.value,
            r.se,
            r.target.unwrap_or(f64::NAN)
        );
    }
    for ks in [&snap.connectivity_distance, &snap.nn_distance] {
        println!(
            "{} KS {:.2e} (critical {:.2e})",
            ks.quantity, ks.statistic, ks.critical
        );
    }
    Ok(())
}
