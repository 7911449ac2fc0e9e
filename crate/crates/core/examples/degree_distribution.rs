//! Degree laws: closed form by vertex class against the exact law.
//!
//! cargo run --release --example degree_distribution -- [n] [vertex]

use exprgg::snapshot::{degree_pmf_closed_form, degree_pmf_exact};
use exprgg::ModelParams;

fn main() -> exprgg::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(30);
    let vertex: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let params = ModelParams::homogeneous(n, 0.5, 1.0, 1.0)?;

    let closed = degree_pmf_closed_form(&params, vertex)?;
    let exact = degree_pmf_exact(&params, vertex)?;
    println!("vertex {vertex} of {n}");
    println!(" k  class         closed form   exact         diff");
    for k in 0..n.min(10) {
        println!(
            "{k:>2}  {:<12}  {:.10}  {:.10}  {:+.2e}",
            format!("{:?}", closed.classes[k]),
            closed.probs[k],
            exact.probs[k],
            closed.probs[k] - exact.probs[k]
        );
    }
    println!(
        "sum: closed form {:.12}, exact {:.12}",
        closed.total(),
        exact.total()
    );
    Ok(())
}
