//! Exponential random geometric graph process.
//!
//! `n` vertices sit on the half-line; the gaps between consecutive vertices
//! evolve as independent TEAR(1) processes with exponential marginals, and
//! two vertices are adjacent when closer than a cutoff `r`. The crate
//! provides:
//!
//! * [`gap`]: exact simulation of the gap dynamics and graph observables.
//! * [`chain`]: the connectivity and component-count Markov chains.
//! * [`hitting`]: the law of the time to disconnection, by two independent
//!   routes.
//! * [`snapshot`]: fixed-time laws (connectivity, components, degrees,
//!   extreme distances).
//! * [`mc`]: Monte Carlo estimates with standard errors for all of the above.
//! * [`verify`]: the acceptance checks, also exposed by the `exprgg verify`
//!   command.
//!
//! ```
//! use exprgg::{chain, ModelParams};
//!
//! let params = ModelParams::homogeneous(5, 0.5, 1.0, 1.0).unwrap();
//! let two_state = chain::transition_matrix(&params).unwrap();
//! assert!((two_state.p11() + two_state.p12() - 1.0).abs() < 1e-12);
//! ```

pub mod chain;
pub mod commands;
pub mod error;
pub mod gap;
pub mod hitting;
pub mod mc;
pub mod output;
pub mod params;
pub mod quad;
pub mod rng;
pub mod snapshot;
pub mod special;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use gap::GapState;
pub use params::{ModelParams, RateSpec};
pub use rng::RandomStream;
