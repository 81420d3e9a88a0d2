//! Generalized Poland-Scheraga pinning model with product disorder.
//!
//! Two strands carry i.i.d. charges `ω̂` and `ω̄`; a bivariate renewal `τ`
//! picks the contact points, and each contact `(i, j)` is rewarded by
//! `β ω̂_i ω̄_j - λ(β) + h`. The crate computes partition functions exactly by
//! dynamic programming, runs Monte Carlo estimators for free energies and
//! second moments, and ships brute-force oracles for small boxes.

pub mod analysis;
pub mod disorder;
pub mod error;
pub mod lattice;
pub mod numerics;
pub mod oracle;
pub mod partition;
pub mod renewal;
pub mod replica;
pub mod rng;

pub use disorder::{StrandLaw, StrandSample};
pub use error::{Error, Result};
pub use lattice::{BoxSize, Grid, Point, Trajectory};
pub use numerics::Estimate;
pub use renewal::{Mode, RenewalLaw, SlowVary};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
