//! Largest gap and largest nearest-neighbour distance, normalized by ln n.
//!
//! cargo run --release --example extreme_distances

use exprgg::snapshot::strong_law_experiment;
use exprgg::RandomStream;

fn main() -> exprgg::Result<()> {
    let grid = [100, 1_000, 10_000, 100_000, 1_000_000];
    let rows = strong_law_experiment(1.0, &grid, 50, &RandomStream::new(3, 0))?;
    println!("       n   rate*c_n/ln n        rate*b_n/ln n");
    for row in rows {
        println!(
            "{:>8}   {:.4} +- {:.4}     {:.4} +- {:.4}",
            row.n, row.c_ratio_mean, row.c_ratio_se, row.b_ratio_mean, row.b_ratio_se
        );
    }
    Ok(())
}
