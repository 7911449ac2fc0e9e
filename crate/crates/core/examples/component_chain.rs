//! Transition matrix of the number of components.
//!
//! cargo run --release --example component_chain

use exprgg::chain::{component_stationary, component_transition_matrix};
use exprgg::snapshot::component_pmf;
use exprgg::ModelParams;

fn main() -> exprgg::Result<()> {
    let params = ModelParams::homogeneous(6, 0.5, 1.0, 1.0)?;
    let chain = component_transition_matrix(&params)?;

    println!(
        "from\\to {}",
        (1..=6).map(|j| format!("{j:>8}")).collect::<String>()
    );
    for (i, row) in chain.rows.iter().enumerate() {
        let cells: String = match row {
            Some(row) => row.iter().map(|x| format!("{x:>8.4}")).collect(),
            None => "   (unreachable)".into(),
        };
        println!("{:>7} {cells}", i + 1);
    }

    let pi = component_stationary(&chain)?;
    let psi = component_pmf(&params);
    println!("\n k  stationary  occupancy");
    for k in 0..6 {
        println!("{:>2}  {:.8}  {:.8}", k + 1, pi[k], psi[k]);
    }
    Ok(())
}
