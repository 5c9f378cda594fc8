//! Equilibrium solvers.

pub mod apx;
pub mod olfe;
pub mod plfe;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::game::{ActionProfile, MixedStrategy, Mode};

/// Default additive approximation for unattained suprema.
pub const DEFAULT_ALPHA: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub struct SolveOptions {
    /// Additive slack used when the supremum is not attained.
    pub alpha: f64,
    /// Stop enumerating profiles once this much wall time has passed.
    pub time_limit: Option<Duration>,
    /// Worker threads for profile enumeration; 0 uses every core.
    pub threads: usize,
    /// Process only the first `n` profiles in enumeration order.
    pub profile_limit: Option<u64>,
    /// Best-response tolerance.
    pub tol: f64,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            alpha: DEFAULT_ALPHA,
            time_limit: None,
            threads: 1,
            profile_limit: None,
            tol: crate::DEFAULT_TOL,
        }
    }
}

impl SolveOptions {
    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_profile_limit(mut self, limit: u64) -> Self {
        self.profile_limit = Some(limit);
        self
    }

    pub(crate) fn deadline(&self) -> Option<Instant> {
        self.time_limit.map(|d| Instant::now() + d)
    }

    pub(crate) fn worker_threads(&self) -> usize {
        match self.threads {
            0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
            t => t,
        }
    }
}

/// Counters describing a solver run.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveStats {
    /// Follower profiles examined.
    pub profiles_enumerated: u64,
    /// Profiles whose region has nonempty interior (pessimistic) or that are
    /// inducible at all (optimistic).
    pub profiles_surviving: u64,
    pub lp_solves: u64,
}

/// A leader-follower equilibrium, or the best one found before a time limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LfeResult {
    pub mode: Mode,
    /// Equilibrium value; the supremum when `attained` is false.
    pub value: f64,
    /// Maximizing commitment, or an `alpha`-approximate one when not attained.
    pub strategy: MixedStrategy,
    pub profile: ActionProfile,
    pub attained: bool,
    pub alpha: f64,
    /// False when the enumeration stopped early.
    pub anytime_complete: bool,
    /// Flag read directly off the max-min solution: some slack is zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw_beta: Option<bool>,
    pub stats: SolveStats,
}

/// Absolute tolerance for comparing leader values across profiles.
pub(crate) const VALUE_TOL: f64 = 1e-9;
