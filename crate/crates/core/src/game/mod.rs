//! Polymatrix games, leader strategies and follower profiles.
//!
//! Every edge `(p, q)` with `p < q` carries two matrices, one per endpoint,
//! both indexed `[action of p][action of q]`. The leader is the last player.

mod eval;
mod validate;

use std::fmt;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use eval::{Commitment, StarView};
pub use validate::{validate_document, ValidationReport};

/// Game classes ordered from least to most specific.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GameClass {
    GeneralPg,
    Oltpg,
    Spg,
}

impl fmt::Display for GameClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameClass::GeneralPg => "GENERAL_PG",
            GameClass::Oltpg => "OLTPG",
            GameClass::Spg => "SPG",
        })
    }
}

/// How followers break ties among their best responses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Pessimistic,
    Optimistic,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Pessimistic => "pessimistic",
            Mode::Optimistic => "optimistic",
        })
    }
}

/// A point of the leader's probability simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct MixedStrategy(Vec<f64>);

impl MixedStrategy {
    pub const SUM_TOL: f64 = 1e-9;

    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidStrategy("empty strategy".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidStrategy(format!("probability {p} outside [0, 1]")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidStrategy(format!("probabilities sum to {sum}")));
        }
        Ok(MixedStrategy(probs))
    }

    /// Builds a strategy from solver output: tiny negative entries are clamped
    /// and the vector is renormalized.
    pub fn from_solver(values: &[f64]) -> Result<Self> {
        let clamped: Vec<f64> = values.iter().map(|v| v.max(0.0)).collect();
        let sum: f64 = clamped.iter().sum();
        if !(sum > 0.0) || (sum - 1.0).abs() > 1e-6 {
            return Err(Error::Internal(format!("solver strategy sums to {sum}")));
        }
        Self::new(clamped.into_iter().map(|v| (v / sum).min(1.0)).collect())
    }

    pub fn uniform(m: usize) -> Self {
        MixedStrategy(vec![1.0 / m as f64; m])
    }

    pub fn pure(m: usize, action: usize) -> Self {
        let mut v = vec![0.0; m];
        v[action] = 1.0;
        MixedStrategy(v)
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl TryFrom<Vec<f64>> for MixedStrategy {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        MixedStrategy::new(v)
    }
}

impl From<MixedStrategy> for Vec<f64> {
    fn from(s: MixedStrategy) -> Vec<f64> {
        s.0
    }
}

/// One pure action per follower, indexed by follower.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionProfile(pub Vec<usize>);

impl ActionProfile {
    pub fn actions(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for ActionProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// A bilateral game on the edge `p -- q`, `p < q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub p: usize,
    pub q: usize,
    /// Payoff of `p`, indexed `[a_p][a_q]`.
    pub payoff_p: Array2<f64>,
    /// Payoff of `q`, indexed `[a_p][a_q]`.
    pub payoff_q: Array2<f64>,
}

impl Edge {
    /// Payoff of `player` (an endpoint) for its own action against the other endpoint's.
    pub fn payoff(&self, player: usize, own: usize, other: usize) -> f64 {
        if player == self.p {
            self.payoff_p[[own, other]]
        } else {
            debug_assert_eq!(player, self.q);
            self.payoff_q[[other, own]]
        }
    }

    pub fn other(&self, player: usize) -> usize {
        if player == self.p {
            self.q
        } else {
            self.p
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolymatrixGame {
    labels: Vec<Vec<String>>,
    original_ids: Vec<usize>,
    edges: Vec<Edge>,
    incident: Vec<Vec<usize>>,
}

impl PolymatrixGame {
    /// Builds a game from per-player action labels and edges. The last player
    /// is the leader.
    pub fn new(labels: Vec<Vec<String>>, mut edges: Vec<Edge>) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::InvalidGame("no players".into()));
        }
        if let Some(p) = labels.iter().position(|l| l.is_empty()) {
            return Err(Error::InvalidGame(format!("player {} has no actions", p + 1)));
        }
        edges.sort_by_key(|e| (e.p, e.q));
        let mut incident = vec![Vec::new(); n];
        for (k, e) in edges.iter().enumerate() {
            if e.p >= e.q || e.q >= n {
                return Err(Error::InvalidGame(format!(
                    "edge ({}, {}) must join two distinct players with p < q",
                    e.p + 1,
                    e.q + 1
                )));
            }
            if k > 0 && edges[k - 1].p == e.p && edges[k - 1].q == e.q {
                return Err(Error::InvalidGame(format!("duplicate edge ({}, {})", e.p + 1, e.q + 1)));
            }
            let dims = (labels[e.p].len(), labels[e.q].len());
            if e.payoff_p.dim() != dims || e.payoff_q.dim() != dims {
                return Err(Error::InvalidGame(format!(
                    "edge ({}, {}) matrices must be {}x{}",
                    e.p + 1,
                    e.q + 1,
                    dims.0,
                    dims.1
                )));
            }
            if e.payoff_p.iter().chain(e.payoff_q.iter()).any(|v| !v.is_finite()) {
                return Err(Error::InvalidGame(format!("edge ({}, {}) has non-finite payoffs", e.p + 1, e.q + 1)));
            }
            incident[e.p].push(k);
            incident[e.q].push(k);
        }
        Ok(PolymatrixGame {
            original_ids: (1..=n).collect(),
            labels,
            edges,
            incident,
        })
    }

    /// Builds a one-level tree: `followers[p] = (labels, follower payoff, leader payoff)`
    /// with both matrices indexed `[a_p][a_leader]`.
    pub fn star(
        leader_labels: Vec<String>,
        followers: Vec<(Vec<String>, Array2<f64>, Array2<f64>)>,
    ) -> Result<Self> {
        let leader = followers.len();
        let mut labels = Vec::with_capacity(leader + 1);
        let mut edges = Vec::with_capacity(leader);
        for (p, (l, fp, lp)) in followers.into_iter().enumerate() {
            labels.push(l);
            edges.push(Edge {
                p,
                q: leader,
                payoff_p: fp,
                payoff_q: lp,
            });
        }
        labels.push(leader_labels);
        Self::new(labels, edges)
    }

    /// Parses the JSON document form, renumbering players so that the leader is last.
    pub fn from_document(doc: &GameDocument) -> Result<Self> {
        let structural = validate::structural_violations(doc);
        if !structural.is_empty() {
            return Err(Error::InvalidGame(structural.join("; ")));
        }
        let mut followers: Vec<&PlayerDoc> = doc.players.iter().filter(|p| p.id != doc.leader).collect();
        followers.sort_by_key(|p| p.id);
        let leader = doc.players.iter().find(|p| p.id == doc.leader).unwrap();
        let order: Vec<&PlayerDoc> = followers.into_iter().chain(std::iter::once(leader)).collect();
        let index_of = |id: usize| order.iter().position(|p| p.id == id).unwrap();
        let mut edges = Vec::with_capacity(doc.edges.len());
        for e in &doc.edges {
            let (ip, iq) = (index_of(e.p), index_of(e.q));
            let mp = to_array(&e.payoff_p)?;
            let mq = to_array(&e.payoff_q)?;
            if ip < iq {
                edges.push(Edge {
                    p: ip,
                    q: iq,
                    payoff_p: mp,
                    payoff_q: mq,
                });
            } else {
                edges.push(Edge {
                    p: iq,
                    q: ip,
                    payoff_p: mq.reversed_axes(),
                    payoff_q: mp.reversed_axes(),
                });
            }
        }
        let mut game = Self::new(order.iter().map(|p| p.actions.clone()).collect(), edges)?;
        game.original_ids = order.iter().map(|p| p.id).collect();
        Ok(game)
    }

    /// JSON document with canonical ids `1..=n`.
    pub fn to_document(&self) -> GameDocument {
        GameDocument {
            players: self
                .labels
                .iter()
                .enumerate()
                .map(|(i, l)| PlayerDoc {
                    id: i + 1,
                    actions: l.clone(),
                })
                .collect(),
            leader: self.num_players(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    p: e.p + 1,
                    q: e.q + 1,
                    payoff_p: from_array(&e.payoff_p),
                    payoff_q: from_array(&e.payoff_q),
                })
                .collect(),
            class: None,
        }
    }

    pub fn num_players(&self) -> usize {
        self.labels.len()
    }

    pub fn leader(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn num_followers(&self) -> usize {
        self.labels.len() - 1
    }

    pub fn followers(&self) -> std::ops::Range<usize> {
        0..self.num_followers()
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.labels[player].len()
    }

    pub fn action_labels(&self, player: usize) -> &[String] {
        &self.labels[player]
    }

    /// Ids the players carried in the document this game was loaded from.
    pub fn original_ids(&self) -> &[usize] {
        &self.original_ids
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn incident_edges(&self, player: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.incident[player].iter().map(move |&k| &self.edges[k])
    }

    pub fn edge_between(&self, a: usize, b: usize) -> Option<&Edge> {
        let (p, q) = if a < b { (a, b) } else { (b, a) };
        self.incident[p].iter().map(|&k| &self.edges[k]).find(|e| e.p == p && e.q == q)
    }

    /// Number of follower action profiles, or `None` on overflow.
    pub fn num_profiles(&self) -> Option<u64> {
        self.followers()
            .try_fold(1u64, |acc, p| acc.checked_mul(self.num_actions(p) as u64))
    }

    /// The two-player game between the leader and follower `p` alone.
    pub fn leader_subgame(&self, p: usize) -> Result<PolymatrixGame> {
        let star = self.star_view()?;
        if p >= self.num_followers() {
            return Err(Error::InvalidArgument(format!("{} is not a follower", p + 1)));
        }
        Self::star(
            self.labels[self.leader()].clone(),
            vec![(self.labels[p].clone(), star.follower[p].clone(), star.leader[p].clone())],
        )
    }

    pub(crate) fn check_follower(&self, p: usize) -> Result<()> {
        if p < self.num_followers() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("player index {p} is not a follower")))
        }
    }

    pub(crate) fn check_leader_strategy(&self, s: &MixedStrategy) -> Result<()> {
        let m = self.num_actions(self.leader());
        if s.len() != m {
            return Err(Error::InvalidStrategy(format!(
                "strategy has {} entries, leader has {} actions",
                s.len(),
                m
            )));
        }
        Ok(())
    }

    pub(crate) fn check_profile(&self, a: &ActionProfile) -> Result<()> {
        if a.0.len() != self.num_followers() {
            return Err(Error::InvalidProfile(format!(
                "profile has {} actions for {} followers",
                a.0.len(),
                self.num_followers()
            )));
        }
        for (p, &x) in a.0.iter().enumerate() {
            if x >= self.num_actions(p) {
                return Err(Error::InvalidProfile(format!("action {x} out of range for follower {}", p + 1)));
            }
        }
        Ok(())
    }
}

fn to_array(rows: &[Vec<f64>]) -> Result<Array2<f64>> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    let flat: Vec<f64> = rows.iter().flatten().copied().collect();
    Array2::from_shape_vec((r, c), flat).map_err(|e| Error::InvalidGame(format!("ragged matrix: {e}")))
}

fn from_array(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// JSON form of a game.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameDocument {
    pub players: Vec<PlayerDoc>,
    pub leader: usize,
    pub edges: Vec<EdgeDoc>,
    /// Optional declared class that `validate` checks against.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<GameClass>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlayerDoc {
    pub id: usize,
    pub actions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub p: usize,
    pub q: usize,
    pub payoff_p: Vec<Vec<f64>>,
    pub payoff_q: Vec<Vec<f64>>,
}

/// Labels `prefix1, prefix2, ...`.
pub fn numbered_labels(prefix: &str, m: usize) -> Vec<String> {
    (1..=m).map(|i| format!("{prefix}{i}")).collect()
}

#[cfg(test)]
pub(crate) mod fixtures {
    use ndarray::{array, Array2};

    use super::*;

    fn abc() -> Vec<String> {
        vec!["a".into(), "b".into(), "c".into()]
    }

    /// Rows are the defender's actions, columns the attacker's; entries
    /// (defender, attacker) as printed in the airport/bank/church example.
    fn star_from_tables(tables: &[[[(f64, f64); 3]; 3]]) -> PolymatrixGame {
        let followers = tables
            .iter()
            .map(|t| {
                let follower = Array2::from_shape_fn((3, 3), |(ap, an)| t[an][ap].1);
                let leader = Array2::from_shape_fn((3, 3), |(ap, an)| t[an][ap].0);
                (abc(), follower, leader)
            })
            .collect();
        PolymatrixGame::star(abc(), followers).unwrap()
    }

    const A1: [[(f64, f64); 3]; 3] = [
        [(9., 0.), (0., 4.), (0., 6.)],
        [(0., 8.), (5., 0.), (0., 6.)],
        [(0., 8.), (0., 4.), (7., 0.)],
    ];

    /// Patrol game where the defender's payoffs depend on the gang.
    pub fn mixed_tree() -> PolymatrixGame {
        const A2: [[(f64, f64); 3]; 3] = [
            [(3., 0.), (0., 8.), (0., 4.)],
            [(0., 6.), (1., 0.), (0., 4.)],
            [(0., 6.), (0., 8.), (2., 0.)],
        ];
        star_from_tables(&[A1, A2])
    }

    /// Same game with a gang-independent defender.
    pub fn shared_star() -> PolymatrixGame {
        const A2: [[(f64, f64); 3]; 3] = [
            [(9., 0.), (0., 8.), (0., 4.)],
            [(0., 6.), (5., 0.), (0., 4.)],
            [(0., 6.), (0., 8.), (7., 0.)],
        ];
        star_from_tables(&[A1, A2])
    }

    /// Single follower with vectors a = (1, 0), b = (0, 1) over two leader actions.
    pub fn two_action(leader_vs_a: [f64; 2], leader_vs_b: [f64; 2]) -> PolymatrixGame {
        PolymatrixGame::star(
            vec!["x".into(), "y".into()],
            vec![(
                vec!["a".into(), "b".into()],
                array![[1.0, 0.0], [0.0, 1.0]],
                array![leader_vs_a, leader_vs_b],
            )],
        )
        .unwrap()
    }

    pub fn triangle() -> PolymatrixGame {
        let l = || vec!["0".to_string(), "1".to_string()];
        let m = || array![[1.0, 2.0], [3.0, 4.0]];
        let edges = vec![
            Edge { p: 0, q: 1, payoff_p: m(), payoff_q: m() },
            Edge { p: 0, q: 2, payoff_p: m(), payoff_q: m() },
            Edge { p: 1, q: 2, payoff_p: m(), payoff_q: m() },
        ];
        PolymatrixGame::new(vec![l(), l(), l()], edges).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;

    #[test]
    fn strategy_validation() {
        assert!(MixedStrategy::new(vec![0.5, 0.5]).is_ok());
        assert!(MixedStrategy::new(vec![0.5, 0.6]).is_err());
        assert!(MixedStrategy::new(vec![1.5, -0.5]).is_err());
        assert!(MixedStrategy::new(vec![]).is_err());
        let s = MixedStrategy::from_solver(&[0.5, 0.5 + 1e-12, -1e-15]).unwrap();
        assert!(s.probs().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn renumbering_moves_leader_last() {
        // Leader has id 1; follower id 2 sits on edge (1, 2).
        let doc = GameDocument {
            players: vec![
                PlayerDoc { id: 1, actions: vec!["l1".into(), "l2".into(), "l3".into()] },
                PlayerDoc { id: 2, actions: vec!["f1".into(), "f2".into()] },
            ],
            leader: 1,
            edges: vec![EdgeDoc {
                p: 1,
                q: 2,
                payoff_p: vec![vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]],
                payoff_q: vec![vec![7.0, 8.0], vec![9.0, 10.0], vec![11.0, 12.0]],
            }],
            class: None,
        };
        let g = PolymatrixGame::from_document(&doc).unwrap();
        assert_eq!(g.original_ids(), &[2, 1]);
        assert_eq!(g.leader(), 1);
        let e = &g.edges()[0];
        // Follower payoff for (f2, l3) was payoff_q[l3][f2] = 12.
        assert_eq!(e.payoff_p[[1, 2]], 12.0);
        assert_eq!(e.payoff_q[[1, 2]], 6.0);
        assert_eq!(e.payoff(1, 2, 1), 6.0);
    }

    #[test]
    fn document_round_trip() {
        let g = fixtures::mixed_tree();
        let back = PolymatrixGame::from_document(&g.to_document()).unwrap();
        assert_eq!(g, back);
    }

    #[test]
    fn rejects_bad_dimensions() {
        let e = Edge { p: 0, q: 1, payoff_p: array![[1.0]], payoff_q: array![[1.0, 2.0]] };
        let labels = vec![vec!["a".to_string()], vec!["x".to_string(), "y".to_string()]];
        assert!(PolymatrixGame::new(labels, vec![e]).is_err());
    }

    #[test]
    fn profile_count() {
        assert_eq!(fixtures::mixed_tree().num_profiles(), Some(9));
    }
}
