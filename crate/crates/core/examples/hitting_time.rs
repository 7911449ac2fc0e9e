//! Survival law of the first disconnection time from a connected start.
//!
//! cargo run --release --example hitting_time -- [k_max] [n] [p]

use std::time::Instant;

use exprgg::hitting::{hitting_time_oracle, hitting_time_recursion, DEFAULT_QUAD_TOL};
use exprgg::mc::estimate_hitting_time;
use exprgg::{ModelParams, RandomStream};

fn arg<T: std::str::FromStr>(i: usize, default: T) -> T {
    std::env::args()
        .nth(i)
        .and_then(|s| s.parse().ok())
        .unwrap_or(default)
}

fn main() -> exprgg::Result<()> {
    let k_max: usize = arg(1, 8);
    let n: usize = arg(2, 3);
    let p: f64 = arg(3, 0.5);
    let params = ModelParams::homogeneous(n, p, 1.0, 1.0)?;

    let t = Instant::now();
    let rec = hitting_time_recursion(&params, k_max, DEFAULT_QUAD_TOL)?;
    let rec_secs = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let ora = hitting_time_oracle(&params, k_max)?;
    let ora_secs = t.elapsed().as_secs_f64();
    let mc = estimate_hitting_time(&params, 100_000, k_max, &RandomStream::new(7, 0))?;

    println!("n = {n}, p = {p}, rate 1, r = 1");
    println!(
        "{:>3} {:>14} {:>14} {:>10} {:>8}",
        "k", "recursion", "runs", "mc", "z"
    );
    for k in 0..rec.tail.len() {
        let z = (mc.tail[k].value - rec.tail[k]) / mc.tail[k].se;
        println!(
            "{k:>3} {:>14.10} {:>14.10} {:>10.6} {z:>+8.2}",
            rec.tail[k], ora.tail[k], mc.tail[k].value
        );
    }
    let (lo, hi) = rec.expectation_bracket;
    println!(
        "E[T] in [{lo:.8}, {hi:.8}], mc {:.5} +- {:.5}",
        mc.mean.value, mc.mean.se
    );
    println!(
        "recursion {rec_secs:.3}s, run decomposition {ora_secs:.3}s, K = {}",
        rec.truncation_k
    );
    Ok(())
}
