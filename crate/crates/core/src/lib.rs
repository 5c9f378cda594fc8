//! Leader-follower equilibria in polymatrix games.
//!
//! A single leader commits to a mixed strategy; the followers observe it and
//! settle on a pure Nash equilibrium of the game that remains. Followers break
//! ties either in the leader's favour (optimistic) or against her
//! (pessimistic). This crate computes both kinds of equilibrium:
//!
//! - [`solve::plfe::solve_plfe`]: exact pessimistic equilibrium for one-level
//!   tree polymatrix games, with detection of unattained suprema and an
//!   additive `alpha`-approximate commitment when the supremum is not a maximum.
//! - [`solve::olfe::solve_olfe`]: optimistic equilibrium by one LP per
//!   follower action profile, for trees and for general polymatrix games with
//!   pure-strategy followers.
//! - [`solve::apx::solve_plfe_apx`]: the polynomial `1/(n-1)` approximation.
//!
//! Around them sit the Bayesian-game mapping ([`bayes`]), instance generators
//! including the hardness constructions ([`gen`]), brute-force verification
//! oracles ([`oracles`]), a benchmarking harness ([`bench`]) and the
//! command-line front end ([`cli`]).
//!
//! Player indices are zero-based throughout the API. The leader is always the
//! last player; followers are `0..n-1`.

pub mod bayes;
pub mod bench;
pub mod cli;
mod enumerate;
pub mod error;
pub mod game;
pub mod gen;
pub mod lp;
pub mod oracles;
pub mod solve;

pub use error::{Error, Result};
pub use game::{
    ActionProfile, Commitment, GameClass, MixedStrategy, Mode, PolymatrixGame, ValidationReport,
};
pub use solve::{LfeResult, SolveOptions, SolveStats};

/// Default absolute tolerance for best-response comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;
