//! Fixed-time laws with heterogeneous rates.
//!
//! cargo run --release --example snapshot_laws

use exprgg::snapshot::{
    component_pmf, connectivity_distance_quantile, connectivity_probability,
    equal_size_components_probability, nn_distance_quantile,
};
use exprgg::{ModelParams, RateSpec};

fn main() -> exprgg::Result<()> {
    let spec: RateSpec = "4:0.5,*:1.5".parse()?;
    let params = ModelParams::new(12, 0.5, spec.expand(12)?, 1.0)?;

    println!(
        "rates {spec}: P(connected) = {:.6}",
        connectivity_probability(&params)
    );
    for (k, p) in component_pmf(&params).iter().enumerate().take(6) {
        println!("  P({} components) = {p:.6}", k + 1);
    }
    for (k, m) in [(2, 6), (3, 4), (4, 3)] {
        println!(
            "  {k} components of {m} vertices each: {:.3e}",
            equal_size_components_probability(&params, k, m)?
        );
    }
    for level in [0.1, 0.5, 0.9] {
        println!(
            "  {level} quantiles: c_n {:.4}, b_n {:.4}",
            connectivity_distance_quantile(&params, level)?,
            nn_distance_quantile(&params, level)?
        );
    }
    Ok(())
}
