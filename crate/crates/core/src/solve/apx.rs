//! Polynomial `1/(n-1)` approximation of the pessimistic equilibrium: play the
//! best two-player commitment against a single follower.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plfe::solve_plfe;
use super::{LfeResult, SolveOptions, SolveStats};
use crate::error::{Error, Result};
use crate::game::{Mode, PolymatrixGame};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApxReport {
    /// The chosen commitment evaluated in the full game.
    pub result: LfeResult,
    /// Follower whose two-player game was used.
    pub chosen_follower: usize,
    /// Pessimistic value of each two-player game.
    pub subgame_values: Vec<f64>,
    /// Lower bound on `result.value` when the guarantee holds.
    pub certified_bound: f64,
    /// False when some leader payoff is negative.
    pub guarantee_holds: bool,
    pub warnings: Vec<String>,
}

/// With `strict`, negative leader payoffs are an error instead of a warning.
pub fn solve_plfe_apx(game: &PolymatrixGame, opts: &SolveOptions, strict: bool) -> Result<ApxReport> {
    let star = game.star_view()?;
    let negative = star.leader.iter().any(|u| u.iter().any(|&x| x < 0.0));
    let mut warnings = Vec::new();
    if negative {
        let msg = "leader payoffs contain negative entries, so the 1/(n-1) bound does not apply".to_string();
        if strict {
            return Err(Error::GuaranteeVoid(msg));
        }
        warnings.push(msg);
    }
    let followers: Vec<usize> = game.followers().collect();
    if followers.is_empty() {
        return Err(Error::InvalidGame("the game has no followers".into()));
    }

    let sub_opts = SolveOptions { threads: 1, ..opts.clone() };
    let solve_one = |&p: &usize| -> Result<LfeResult> { solve_plfe(&game.leader_subgame(p)?, &sub_opts) };
    let subs: Vec<Result<LfeResult>> = match opts.worker_threads() {
        1 => followers.iter().map(solve_one).collect(),
        t => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(|| followers.par_iter().map(solve_one).collect()),
    };
    let subs: Vec<LfeResult> = subs.into_iter().collect::<Result<_>>()?;

    let mut chosen = 0;
    for (p, r) in subs.iter().enumerate() {
        if r.value > subs[chosen].value {
            chosen = p;
        }
    }
    let sub = &subs[chosen];
    let full = game.evaluate_commitment(&sub.strategy, Mode::Pessimistic, opts.tol)?;
    let stats = SolveStats {
        profiles_enumerated: subs.iter().map(|r| r.stats.profiles_enumerated).sum(),
        profiles_surviving: subs.iter().map(|r| r.stats.profiles_surviving).sum(),
        lp_solves: subs.iter().map(|r| r.stats.lp_solves).sum(),
    };
    let certified_bound = if sub.attained { sub.value } else { sub.value - opts.alpha };
    Ok(ApxReport {
        result: LfeResult {
            mode: Mode::Pessimistic,
            value: full.value,
            strategy: sub.strategy.clone(),
            profile: full.profile,
            attained: true,
            alpha: opts.alpha,
            anytime_complete: subs.iter().all(|r| r.anytime_complete),
            raw_beta: None,
            stats,
        },
        chosen_follower: chosen,
        subgame_values: subs.iter().map(|r| r.value).collect(),
        certified_bound,
        guarantee_holds: !negative,
        warnings,
    })
}
