use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::{GameClass, GameDocument, PolymatrixGame};

/// Outcome of checking a game against a class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    /// Most specific class the game belongs to.
    pub class: GameClass,
    /// Class the game was checked against; defaults to the strictest one.
    pub declared: GameClass,
    pub violations: Vec<String>,
    /// `renumbering[i]` is the original id of canonical player `i + 1`.
    pub renumbering: Vec<usize>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Problems that prevent the document from describing any polymatrix game.
pub(crate) fn structural_violations(doc: &GameDocument) -> Vec<String> {
    let mut out = Vec::new();
    let mut ids = HashSet::new();
    for p in &doc.players {
        if !ids.insert(p.id) {
            out.push(format!("player id {} appears more than once", p.id));
        }
        if p.actions.is_empty() {
            out.push(format!("player {} has no actions", p.id));
        }
    }
    if doc.players.is_empty() {
        out.push("game has no players".into());
    }
    if !ids.contains(&doc.leader) {
        out.push(format!("leader {} is not a player", doc.leader));
    }
    let actions = |id: usize| doc.players.iter().find(|p| p.id == id).map(|p| p.actions.len());
    let mut seen = HashSet::new();
    for e in &doc.edges {
        let name = format!("edge ({}, {})", e.p, e.q);
        if e.p >= e.q {
            out.push(format!("{name}: requires p < q"));
            continue;
        }
        if !seen.insert((e.p, e.q)) {
            out.push(format!("{name}: duplicate edge"));
        }
        let (Some(mp), Some(mq)) = (actions(e.p), actions(e.q)) else {
            out.push(format!("{name}: unknown player"));
            continue;
        };
        for (which, m) in [("payoff_p", &e.payoff_p), ("payoff_q", &e.payoff_q)] {
            if m.len() != mp || m.iter().any(|row| row.len() != mq) {
                out.push(format!("{name}: dimension mismatch in {which}, expected {mp}x{mq}"));
            } else if m.iter().flatten().any(|v| !v.is_finite()) {
                out.push(format!("{name}: non-finite entry in {which}"));
            }
        }
    }
    out
}

/// Checks a game against `declared`, or against the strictest class when absent.
pub fn validate_document(doc: &GameDocument) -> ValidationReport {
    let declared = doc.class.unwrap_or(GameClass::Spg);
    let structural = structural_violations(doc);
    if !structural.is_empty() {
        return ValidationReport {
            class: GameClass::GeneralPg,
            declared,
            violations: structural,
            renumbering: Vec::new(),
        };
    }
    match PolymatrixGame::from_document(doc) {
        Ok(game) => game.validate_against(declared),
        Err(e) => ValidationReport {
            class: GameClass::GeneralPg,
            declared,
            violations: vec![e.to_string()],
            renumbering: Vec::new(),
        },
    }
}

impl PolymatrixGame {
    /// Most specific class of this game.
    pub fn classify(&self) -> GameClass {
        if !self.tree_violations().is_empty() {
            GameClass::GeneralPg
        } else if !self.star_violations().is_empty() {
            GameClass::Oltpg
        } else {
            GameClass::Spg
        }
    }

    /// Checks against the strictest class.
    pub fn validate(&self) -> ValidationReport {
        self.validate_against(GameClass::Spg)
    }

    pub fn validate_against(&self, declared: GameClass) -> ValidationReport {
        let mut violations = Vec::new();
        let tree = self.tree_violations();
        let star = if tree.is_empty() { self.star_violations() } else { Vec::new() };
        let class = if !tree.is_empty() {
            GameClass::GeneralPg
        } else if !star.is_empty() {
            GameClass::Oltpg
        } else {
            GameClass::Spg
        };
        if declared >= GameClass::Oltpg {
            violations.extend(tree);
        }
        if declared == GameClass::Spg {
            violations.extend(star);
        }
        ValidationReport {
            class,
            declared,
            violations,
            renumbering: self.original_ids().to_vec(),
        }
    }

    fn tree_violations(&self) -> Vec<String> {
        let leader = self.leader();
        let mut out = Vec::new();
        for e in self.edges() {
            if e.q != leader {
                out.push(format!(
                    "edge ({}, {}) joins two followers, not a one-level tree",
                    e.p + 1,
                    e.q + 1
                ));
            }
        }
        for p in self.followers() {
            if self.edge_between(p, leader).is_none() {
                out.push(format!("follower {} is not connected to the leader", p + 1));
            }
        }
        out
    }

    /// Assumes a one-level tree.
    fn star_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let Some(first) = self.followers().next() else {
            return out;
        };
        if self.followers().any(|p| self.action_labels(p) != self.action_labels(first)) {
            out.push("followers do not share one action set".into());
            return out;
        }
        let leader = self.leader();
        let reference = &self.edge_between(first, leader).unwrap().payoff_q;
        if self
            .followers()
            .any(|p| self.edge_between(p, leader).unwrap().payoff_q != *reference)
        {
            out.push("leader payoffs differ across leaves".into());
        }
        out
    }
}
