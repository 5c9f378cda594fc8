//! Bayesian leadership games with one follower of several types, and their
//! polymatrix counterparts: one leaf per type, leader at the root.
//!
//! Follower payoffs carry over unscaled. The leader's matrix on a leaf is her
//! Bayesian matrix scaled by the type probability, so her separable utility
//! in the tree equals her Bayesian expected utility.

use ndarray::Array2;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{numbered_labels, GameClass, PolymatrixGame};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BayesKind {
    /// The leader's payoffs depend on the follower's type.
    Interdependent,
    /// The leader's payoffs are the same for every type.
    Independent,
}

/// Matrices are indexed `[leader action][follower action]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesianType {
    pub name: String,
    pub prob: f64,
    pub follower_payoff: Array2<f64>,
    pub leader_payoff: Array2<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BayesianDocument", into = "BayesianDocument")]
pub struct BayesianGame {
    leader_actions: Vec<String>,
    follower_actions: Vec<String>,
    kind: BayesKind,
    types: Vec<BayesianType>,
}

const PROB_TOL: f64 = 1e-9;

impl BayesianGame {
    pub fn new(
        leader_actions: Vec<String>,
        follower_actions: Vec<String>,
        kind: BayesKind,
        types: Vec<BayesianType>,
    ) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidBayesian(m));
        if leader_actions.is_empty() || follower_actions.is_empty() {
            return bad("both players need at least one action".into());
        }
        if types.is_empty() {
            return bad("no follower types".into());
        }
        let dims = (leader_actions.len(), follower_actions.len());
        for t in &types {
            if !(t.prob >= 0.0 && t.prob.is_finite()) {
                return bad(format!("type {} has probability {}", t.name, t.prob));
            }
            if t.follower_payoff.dim() != dims || t.leader_payoff.dim() != dims {
                return bad(format!("type {} matrices must be {}x{}", t.name, dims.0, dims.1));
            }
            if t.follower_payoff.iter().chain(t.leader_payoff.iter()).any(|v| !v.is_finite()) {
                return bad(format!("type {} has non-finite payoffs", t.name));
            }
        }
        let sum: f64 = types.iter().map(|t| t.prob).sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return bad(format!("type probabilities sum to {sum}"));
        }
        if kind == BayesKind::Independent && types.iter().any(|t| t.leader_payoff != types[0].leader_payoff) {
            return bad("independent types must share the leader's payoffs".into());
        }
        Ok(BayesianGame { leader_actions, follower_actions, kind, types })
    }

    pub fn leader_actions(&self) -> &[String] {
        &self.leader_actions
    }

    pub fn follower_actions(&self) -> &[String] {
        &self.follower_actions
    }

    pub fn kind(&self) -> BayesKind {
        self.kind
    }

    pub fn types(&self) -> &[BayesianType] {
        &self.types
    }

    /// Leader's expected utility when type `i` plays `responses[i]`.
    pub fn leader_expected_utility(&self, s: &[f64], responses: &[usize]) -> f64 {
        self.types
            .iter()
            .zip(responses)
            .map(|(t, &a)| t.prob * t.leader_payoff.column(a).iter().zip(s).map(|(u, p)| u * p).sum::<f64>())
            .sum()
    }

    /// Utility of type `i` playing `a` against the leader's mixed strategy.
    pub fn follower_expected_utility(&self, i: usize, s: &[f64], a: usize) -> f64 {
        self.types[i].follower_payoff.column(a).iter().zip(s).map(|(u, p)| u * p).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BayesianDocument {
    pub leader_actions: Vec<String>,
    pub follower_actions: Vec<String>,
    pub kind: BayesKind,
    /// Shared leader matrix for independent types.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leader_payoff: Option<Vec<Vec<f64>>>,
    pub types: Vec<TypeDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TypeDocument {
    pub name: String,
    pub prob: f64,
    pub follower_payoff: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leader_payoff: Option<Vec<Vec<f64>>>,
}

fn matrix(rows: &[Vec<f64>]) -> Result<Array2<f64>> {
    let c = rows.first().map_or(0, Vec::len);
    Array2::from_shape_vec((rows.len(), c), rows.iter().flatten().copied().collect())
        .map_err(|e| Error::InvalidBayesian(format!("ragged matrix: {e}")))
}

fn rows(m: &Array2<f64>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

impl TryFrom<BayesianDocument> for BayesianGame {
    type Error = Error;

    fn try_from(doc: BayesianDocument) -> Result<Self> {
        let shared = doc.leader_payoff.as_deref().map(matrix).transpose()?;
        let types = doc
            .types
            .iter()
            .map(|t| {
                let leader_payoff = match (&t.leader_payoff, &shared) {
                    (Some(m), _) => matrix(m)?,
                    (None, Some(m)) => m.clone(),
                    (None, None) => {
                        return Err(Error::InvalidBayesian(format!("type {} has no leader payoffs", t.name)))
                    }
                };
                Ok(BayesianType {
                    name: t.name.clone(),
                    prob: t.prob,
                    follower_payoff: matrix(&t.follower_payoff)?,
                    leader_payoff,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        BayesianGame::new(doc.leader_actions, doc.follower_actions, doc.kind, types)
    }
}

impl From<BayesianGame> for BayesianDocument {
    fn from(bg: BayesianGame) -> Self {
        let independent = bg.kind == BayesKind::Independent;
        BayesianDocument {
            leader_payoff: independent.then(|| rows(&bg.types[0].leader_payoff)),
            types: bg
                .types
                .iter()
                .map(|t| TypeDocument {
                    name: t.name.clone(),
                    prob: t.prob,
                    follower_payoff: rows(&t.follower_payoff),
                    leader_payoff: (!independent).then(|| rows(&t.leader_payoff)),
                })
                .collect(),
            leader_actions: bg.leader_actions,
            follower_actions: bg.follower_actions,
            kind: bg.kind,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BgConversion {
    pub game: PolymatrixGame,
    /// `type_of_leaf[p]` is the type index behind follower `p`.
    pub type_of_leaf: Vec<usize>,
    pub warnings: Vec<String>,
}

/// One leaf per type with positive probability.
pub fn bg_to_polymatrix(bg: &BayesianGame) -> Result<BgConversion> {
    let mut warnings = Vec::new();
    let mut type_of_leaf = Vec::new();
    let mut leaves = Vec::new();
    for (i, t) in bg.types.iter().enumerate() {
        if t.prob == 0.0 {
            warnings.push(format!("type {} has probability zero and was dropped", t.name));
            continue;
        }
        type_of_leaf.push(i);
        leaves.push((
            bg.follower_actions.clone(),
            t.follower_payoff.t().to_owned(),
            t.leader_payoff.t().mapv(|u| t.prob * u),
        ));
    }
    let game = PolymatrixGame::star(bg.leader_actions.clone(), leaves)?;
    Ok(BgConversion { game, type_of_leaf, warnings })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PgConversion {
    pub bg: BayesianGame,
    pub warnings: Vec<String>,
}

/// Probabilities `2/K` then `1/K` with `K` the next power of two: dividing
/// by them is exact, so mapping back reproduces every payoff bit for bit.
pub fn dyadic_probabilities(t: usize) -> Vec<f64> {
    let k = t.next_power_of_two();
    (0..t)
        .map(|i| if i < k - t { 2.0 / k as f64 } else { 1.0 / k as f64 })
        .collect()
}

/// `y` with `prob * y == x` in floating point, searched near `x / prob`.
fn exact_preimage(x: f64, prob: f64) -> Option<f64> {
    let start = x / prob;
    if prob * start == x {
        return Some(start);
    }
    let mut up = start;
    let mut down = start;
    for _ in 0..64 {
        up = up.next_up();
        down = down.next_down();
        for y in [up, down] {
            if prob * y == x {
                return Some(y);
            }
        }
    }
    None
}

/// Inverse mapping. Star games become independent types with uniform
/// probabilities when an exact preimage exists; otherwise types are
/// interdependent with dyadic probabilities.
pub fn polymatrix_to_bg(game: &PolymatrixGame) -> Result<PgConversion> {
    let star = game.star_view()?;
    let t = star.num_followers();
    if t == 0 {
        return Err(Error::InvalidArgument("a game without followers has no types".into()));
    }
    let m_f = game.num_actions(0);
    if game.followers().any(|p| game.num_actions(p) != m_f) {
        return Err(Error::InvalidArgument("every follower needs the same number of actions".into()));
    }
    let leader_actions = game.action_labels(game.leader()).to_vec();
    let follower_actions = game.action_labels(0).to_vec();
    let name = |p: usize| format!("type{}", p + 1);
    let follower = |p: usize| star.follower[p].t().to_owned();
    let mut warnings = Vec::new();

    if game.classify() == GameClass::Spg {
        let prob = 1.0 / t as f64;
        let shared: Option<Vec<f64>> = star.leader[0].t().iter().map(|&x| exact_preimage(x, prob)).collect();
        if let Some(shared) = shared {
            let shared = Array2::from_shape_vec((leader_actions.len(), m_f), shared).unwrap();
            let types = (0..t)
                .map(|p| BayesianType {
                    name: name(p),
                    prob,
                    follower_payoff: follower(p),
                    leader_payoff: shared.clone(),
                })
                .collect();
            let bg = BayesianGame::new(leader_actions, follower_actions, BayesKind::Independent, types)?;
            return Ok(PgConversion { bg, warnings });
        }
        warnings.push(format!(
            "leader payoffs have no exact preimage under probability 1/{t}; using interdependent types"
        ));
    }
    let types = dyadic_probabilities(t)
        .into_iter()
        .enumerate()
        .map(|(p, prob)| BayesianType {
            name: name(p),
            prob,
            follower_payoff: follower(p),
            leader_payoff: star.leader[p].t().mapv(|x| x / prob),
        })
        .collect();
    let bg = BayesianGame::new(leader_actions, follower_actions, BayesKind::Interdependent, types)?;
    Ok(PgConversion { bg, warnings })
}

/// Random game with payoffs uniform in `[0, 100)` and random type probabilities.
pub fn random_bayesian<R: Rng>(
    rng: &mut R,
    kind: BayesKind,
    num_types: usize,
    leader_actions: usize,
    follower_actions: usize,
) -> Result<BayesianGame> {
    if num_types == 0 || leader_actions == 0 || follower_actions == 0 {
        return Err(Error::InvalidArgument("types and action counts must be positive".into()));
    }
    let draw = |rng: &mut R| Array2::from_shape_fn((leader_actions, follower_actions), |_| rng.gen_range(0.0..100.0));
    let weights: Vec<f64> = (0..num_types).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
    let head: f64 = probs[..num_types - 1].iter().sum();
    probs[num_types - 1] = (1.0 - head).max(0.0);
    let shared = draw(rng);
    let types = probs
        .into_iter()
        .enumerate()
        .map(|(i, prob)| BayesianType {
            name: format!("type{}", i + 1),
            prob,
            follower_payoff: draw(rng),
            leader_payoff: match kind {
                BayesKind::Independent => shared.clone(),
                BayesKind::Interdependent => draw(rng),
            },
        })
        .collect();
    BayesianGame::new(
        numbered_labels("l", leader_actions),
        numbered_labels("f", follower_actions),
        kind,
        types,
    )
}

#[cfg(test)]
mod tests {
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::game::fixtures;

    fn labels(n: usize) -> Vec<String> {
        numbered_labels("a", n)
    }

    #[test]
    fn independent_halves() {
        let m = array![[4.0, 2.0], [6.0, 8.0]];
        let ty = |name: &str| BayesianType {
            name: name.into(),
            prob: 0.5,
            follower_payoff: array![[1.0, 0.0], [0.0, 1.0]],
            leader_payoff: m.clone(),
        };
        let bg = BayesianGame::new(labels(2), labels(2), BayesKind::Independent, vec![ty("x"), ty("y")]).unwrap();
        let conv = bg_to_polymatrix(&bg).unwrap();
        assert_eq!(conv.game.classify(), GameClass::Spg);
        let star = conv.game.star_view().unwrap();
        assert_eq!(star.leader[0], &(m.t().to_owned() / 2.0));
    }

    #[test]
    fn single_type_is_unscaled() {
        let bg = BayesianGame::new(
            labels(2),
            labels(3),
            BayesKind::Interdependent,
            vec![BayesianType {
                name: "only".into(),
                prob: 1.0,
                follower_payoff: array![[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]],
                leader_payoff: array![[7.0, 8.0, 9.0], [10.0, 11.0, 12.0]],
            }],
        )
        .unwrap();
        let g = bg_to_polymatrix(&bg).unwrap().game;
        assert_eq!(g.edges()[0].payoff_q[[2, 1]], 12.0);
        assert_eq!(g.edges()[0].payoff_p[[0, 1]], 4.0);
        let back = polymatrix_to_bg(&g).unwrap().bg;
        assert_eq!(back.types()[0].prob, 1.0);
        assert_eq!(back.types()[0].leader_payoff, bg.types()[0].leader_payoff);
        assert_eq!(back.types()[0].follower_payoff, bg.types()[0].follower_payoff);
    }

    #[test]
    fn shared_star_round_trip() {
        let g = fixtures::shared_star();
        let conv = polymatrix_to_bg(&g).unwrap();
        assert_eq!(conv.bg.kind(), BayesKind::Independent);
        assert!(conv.bg.types().iter().all(|t| t.prob == 0.5));
        let back = bg_to_polymatrix(&conv.bg).unwrap().game;
        assert_eq!(back.edges(), g.edges());
    }

    #[test]
    fn zero_probability_types_are_dropped() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let bg = random_bayesian(&mut rng, BayesKind::Interdependent, 3, 2, 2).unwrap();
        let mut types = bg.types().to_vec();
        types[2].prob += types[1].prob;
        types[1].prob = 0.0;
        let bg = BayesianGame::new(labels(2), labels(2), BayesKind::Interdependent, types).unwrap();
        let conv = bg_to_polymatrix(&bg).unwrap();
        assert_eq!(conv.type_of_leaf, vec![0, 2]);
        assert_eq!(conv.warnings.len(), 1);
    }

    #[test]
    fn dyadic_probabilities_sum_to_one() {
        for t in 1..20 {
            let p = dyadic_probabilities(t);
            assert_eq!(p.len(), t);
            assert_eq!(p.iter().sum::<f64>(), 1.0);
        }
    }

    #[test]
    fn bad_probabilities_rejected() {
        let ty = BayesianType {
            name: "x".into(),
            prob: 0.7,
            follower_payoff: array![[1.0]],
            leader_payoff: array![[1.0]],
        };
        assert!(BayesianGame::new(labels(1), labels(1), BayesKind::Interdependent, vec![ty]).is_err());
    }

    #[test]
    fn json_shape() {
        let text = r#"{"leader_actions": ["x", "y"], "follower_actions": ["a"], "kind": "independent",
            "leader_payoff": [[1], [2]],
            "types": [{"name": "t1", "prob": 0.25, "follower_payoff": [[3], [4]]},
                      {"name": "t2", "prob": 0.75, "follower_payoff": [[5], [6]]}]}"#;
        let bg: BayesianGame = serde_json::from_str(text).unwrap();
        assert_eq!(bg.types()[1].leader_payoff, array![[1.0], [2.0]]);
        let again: BayesianGame = serde_json::from_str(&serde_json::to_string(&bg).unwrap()).unwrap();
        assert_eq!(again, bg);
    }
}
