//! Simulate the gap process and watch the graph it induces.
//!
//! cargo run --release --example gap_process

use exprgg::gap::sample_stationary;
use exprgg::{ModelParams, RandomStream};

fn main() -> exprgg::Result<()> {
    let params = ModelParams::homogeneous(8, 0.7, 1.0, 1.0)?;
    let mut rng = RandomStream::new(1, 0);
    let mut state = sample_stationary(&params, &mut rng);

    println!("  t  components  sizes              c        b");
    for t in 0..12 {
        if t > 0 {
            state.step_in_place(&params, &mut rng);
        }
        let e = state.extreme_distances();
        println!(
            "{t:>3}  {:>10}  {:<17}  {:.4}  {:.4}",
            state.component_count(params.r()),
            format!("{:?}", state.component_sizes(params.r())),
            e.c,
            e.b
        );
    }

    let positions = state.positions();
    println!("\nfinal positions: {positions:.3?}");
    println!("degrees:         {:?}", state.degrees(params.r()));
    Ok(())
}
