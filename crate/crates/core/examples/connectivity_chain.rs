//! The two-state connected/disconnected chain and its limit along n.
//!
//! cargo run --release --example connectivity_chain

use exprgg::chain::{gap_step_probs, limit_diagnostics, transition_matrix};
use exprgg::snapshot::connectivity_probability;
use exprgg::ModelParams;

fn main() -> exprgg::Result<()> {
    let (rate, r) = (1.0, 1.0);
    for p in [0.0, 0.5, 0.9] {
        let g = gap_step_probs(rate, r, p)?;
        let params = ModelParams::homogeneous(5, p, rate, r)?;
        let chain = transition_matrix(&params)?;
        println!("p = {p}: alpha {:.5}, beta {:.5}", g.alpha, g.beta);
        println!("  [{:.6} {:.6}]", chain.p11(), chain.p12());
        println!("  [{:.6} {:.6}]", chain.p21(), chain.p22());
        println!(
            "  stationary ({:.6}, {:.6}), P(C) = {:.6}",
            chain.stationary[0],
            chain.stationary[1],
            connectivity_probability(&params)
        );
    }

    println!("\n  n   pi_1(n)");
    for row in limit_diagnostics(rate, r, 0.5, &[2, 5, 10, 20, 50, 100])? {
        println!("{:>3}   {:.3e}", row.n, row.pi1);
    }
    Ok(())
}
