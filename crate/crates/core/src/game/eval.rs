use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{ActionProfile, GameClass, MixedStrategy, Mode, PolymatrixGame};
use crate::enumerate::Profiles;
use crate::error::{Error, Result};

/// Leader value and follower profile induced by a fixed commitment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Commitment {
    pub value: f64,
    pub profile: ActionProfile,
}

/// Leader-edge matrices of a one-level tree, indexed `[a_p][a_leader]`.
#[derive(Clone, Debug)]
pub struct StarView<'a> {
    /// `follower[p]` holds follower `p`'s payoffs.
    pub follower: Vec<&'a Array2<f64>>,
    /// `leader[p]` holds the leader's payoffs on the edge to `p`.
    pub leader: Vec<&'a Array2<f64>>,
}

impl StarView<'_> {
    pub fn num_followers(&self) -> usize {
        self.follower.len()
    }

    pub fn expected_follower(&self, p: usize, a: usize, s: &[f64]) -> f64 {
        dot(self.follower[p].row(a).iter(), s)
    }

    pub fn expected_leader(&self, p: usize, a: usize, s: &[f64]) -> f64 {
        dot(self.leader[p].row(a).iter(), s)
    }

    /// Tolerance-based best responses of `p` to `s`.
    pub fn best_responses(&self, p: usize, s: &[f64], tol: f64) -> Vec<usize> {
        let u: Vec<f64> = (0..self.follower[p].nrows())
            .map(|a| self.expected_follower(p, a, s))
            .collect();
        let best = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (0..u.len()).filter(|&a| best - u[a] <= tol).collect()
    }

    /// Per-follower tie-break, lowest index on equal leader utility.
    pub fn evaluate(&self, s: &[f64], mode: Mode, tol: f64) -> Commitment {
        let mut value = 0.0;
        let mut profile = Vec::with_capacity(self.num_followers());
        for p in 0..self.num_followers() {
            let mut chosen: Option<(usize, f64)> = None;
            for a in self.best_responses(p, s, tol) {
                let v = self.expected_leader(p, a, s);
                let better = match (chosen, mode) {
                    (None, _) => true,
                    (Some((_, c)), Mode::Pessimistic) => v < c,
                    (Some((_, c)), Mode::Optimistic) => v > c,
                };
                if better {
                    chosen = Some((a, v));
                }
            }
            let (a, v) = chosen.expect("best-response set is never empty");
            value += v;
            profile.push(a);
        }
        Commitment {
            value,
            profile: ActionProfile(profile),
        }
    }
}

pub(crate) fn dot<'a>(row: impl Iterator<Item = &'a f64>, s: &[f64]) -> f64 {
    row.zip(s).map(|(u, p)| u * p).sum()
}

impl PolymatrixGame {
    pub(crate) fn require(&self, required: GameClass) -> Result<GameClass> {
        let found = self.classify();
        if found < required {
            Err(Error::ClassMismatch { required, found })
        } else {
            Ok(found)
        }
    }

    /// Leader-edge matrices; fails unless the game is a one-level tree.
    pub fn star_view(&self) -> Result<StarView<'_>> {
        self.require(GameClass::Oltpg)?;
        let leader = self.leader();
        let edges: Vec<_> = self
            .followers()
            .map(|p| self.edge_between(p, leader).expect("tree has every leader edge"))
            .collect();
        Ok(StarView {
            follower: edges.iter().map(|e| &e.payoff_p).collect(),
            leader: edges.iter().map(|e| &e.payoff_q).collect(),
        })
    }

    /// Follower `p`'s payoffs for action `a_p` against each leader action.
    pub fn follower_payoff_vector(&self, p: usize, a_p: usize) -> Result<Vec<f64>> {
        let star = self.star_view()?;
        self.check_follower(p)?;
        if a_p >= self.num_actions(p) {
            return Err(Error::InvalidArgument(format!("action {a_p} out of range")));
        }
        Ok(star.follower[p].row(a_p).to_vec())
    }

    /// Utility of `player` when every player (leader included) plays the given action.
    pub fn pure_utility(&self, player: usize, full_profile: &[usize]) -> Result<f64> {
        if player >= self.num_players() {
            return Err(Error::InvalidArgument(format!("unknown player index {player}")));
        }
        if full_profile.len() != self.num_players()
            || full_profile.iter().enumerate().any(|(i, &a)| a >= self.num_actions(i))
        {
            return Err(Error::InvalidProfile("full profile does not fit the game".into()));
        }
        Ok(self
            .incident_edges(player)
            .map(|e| e.payoff(player, full_profile[player], full_profile[e.other(player)]))
            .sum())
    }

    pub fn best_response_set(&self, p: usize, s: &MixedStrategy, tol: f64) -> Result<Vec<usize>> {
        let star = self.star_view()?;
        self.check_follower(p)?;
        self.check_leader_strategy(s)?;
        Ok(star.best_responses(p, s.probs(), tol))
    }

    /// Exact leader value of committing to `s` in a one-level tree.
    pub fn evaluate_commitment(&self, s: &MixedStrategy, mode: Mode, tol: f64) -> Result<Commitment> {
        let star = self.star_view()?;
        self.check_leader_strategy(s)?;
        Ok(star.evaluate(s.probs(), mode, tol))
    }

    /// Expected leader-edge payoff of follower `p` for action `a` against `s`; zero
    /// when `p` has no edge to the leader.
    pub(crate) fn follower_vs_leader(&self, p: usize, a: usize, s: &[f64]) -> f64 {
        self.edge_between(p, self.leader())
            .map_or(0.0, |e| dot(e.payoff_p.row(a).iter(), s))
    }

    /// Payoff of follower `p` playing `a` from its edges to other followers.
    pub(crate) fn follower_vs_followers(&self, p: usize, a: usize, profile: &[usize]) -> f64 {
        let leader = self.leader();
        self.incident_edges(p)
            .filter(|e| e.other(p) != leader)
            .map(|e| e.payoff(p, a, profile[e.other(p)]))
            .sum()
    }

    /// Leader's expected utility against a follower profile.
    pub fn leader_value(&self, s: &MixedStrategy, profile: &ActionProfile) -> Result<f64> {
        self.check_leader_strategy(s)?;
        self.check_profile(profile)?;
        Ok(self.leader_value_unchecked(s.probs(), &profile.0))
    }

    pub(crate) fn leader_value_unchecked(&self, s: &[f64], profile: &[usize]) -> f64 {
        let leader = self.leader();
        self.incident_edges(leader)
            .map(|e| dot(e.payoff_q.row(profile[e.p]).iter(), s))
            .sum()
    }

    /// Every follower profile where no follower gains more than `tol` by a
    /// unilateral pure deviation, in lexicographic order.
    pub fn enumerate_pure_ne(&self, s: &MixedStrategy, tol: f64) -> Result<Vec<ActionProfile>> {
        self.check_leader_strategy(s)?;
        let base = self.leader_terms(s.probs());
        let radix: Vec<usize> = self.followers().map(|p| self.num_actions(p)).collect();
        Ok(Profiles::new(radix)
            .filter(|a| self.is_pure_ne(&base, a, tol))
            .map(ActionProfile)
            .collect())
    }

    /// Worst (pessimistic) or best (optimistic) pure NE for the leader, ties to
    /// the lexicographically first profile. `None` when no pure NE exists.
    pub fn pure_ne_extreme(&self, s: &MixedStrategy, mode: Mode, tol: f64) -> Result<Option<Commitment>> {
        let mut best: Option<Commitment> = None;
        for profile in self.enumerate_pure_ne(s, tol)? {
            let value = self.leader_value_unchecked(s.probs(), &profile.0);
            let better = match (&best, mode) {
                (None, _) => true,
                (Some(c), Mode::Pessimistic) => value < c.value,
                (Some(c), Mode::Optimistic) => value > c.value,
            };
            if better {
                best = Some(Commitment { value, profile });
            }
        }
        Ok(best)
    }

    /// `terms[p][a]`: expected leader-edge payoff of follower `p` playing `a`.
    pub(crate) fn leader_terms(&self, s: &[f64]) -> Vec<Vec<f64>> {
        self.followers()
            .map(|p| (0..self.num_actions(p)).map(|a| self.follower_vs_leader(p, a, s)).collect())
            .collect()
    }

    pub(crate) fn is_pure_ne(&self, terms: &[Vec<f64>], profile: &[usize], tol: f64) -> bool {
        self.followers().all(|p| {
            let current = terms[p][profile[p]] + self.follower_vs_followers(p, profile[p], profile);
            (0..self.num_actions(p)).all(|b| {
                b == profile[p] || terms[p][b] + self.follower_vs_followers(p, b, profile) - current <= tol
            })
        })
    }
}
