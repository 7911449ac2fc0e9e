//! Probability of k components along n, rate 1 on the first ten interior
//! gaps and 2 beyond. Prints plot-ready CSV.
//!
//! cargo run --release --example figure2 > figure2.csv

use exprgg::verify::figure2_table;

fn main() -> exprgg::Result<()> {
    let grid: Vec<usize> = (12..=60).collect();
    println!("n,k1,k2,k3,k4");
    for (n, psi) in figure2_table(1.0, &grid, &[1, 2, 3, 4])? {
        let cells: Vec<String> = psi.iter().map(|p| format!("{p:.6e}")).collect();
        println!("{n},{}", cells.join(","));
    }
    Ok(())
}
