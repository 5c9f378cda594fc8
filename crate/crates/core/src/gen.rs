//! Instance generators: random trees and stars, the clique construction and
//! the two 3-SAT constructions, plus the graph and CNF inputs they consume.

use std::fmt::Write as _;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{numbered_labels, Edge, GameClass, PolymatrixGame};

/// Default `epsilon` for the SAT constructions.
pub const DEFAULT_SAT_EPSILON: f64 = 0.01;

/// Largest variable count for brute-force satisfiability.
pub const MAX_SAT_VARS: usize = 20;

/// Simple undirected graph on vertices `0..vertices`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub vertices: usize,
    pub edges: Vec<[usize; 2]>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<[usize; 2]>) -> Result<Self> {
        let g = Graph { vertices, edges };
        g.check()?;
        Ok(g)
    }

    pub fn check(&self) -> Result<()> {
        for &[u, v] in &self.edges {
            if u >= self.vertices || v >= self.vertices {
                return Err(Error::InvalidGraph(format!("edge ({u}, {v}) has an unknown vertex")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!("self-loop on vertex {u}")));
            }
        }
        Ok(())
    }

    pub fn path(vertices: usize) -> Self {
        Graph {
            vertices,
            edges: (1..vertices).map(|v| [v - 1, v]).collect(),
        }
    }

    /// Erdos-Renyi graph: each pair is an edge with probability `p`.
    pub fn random(vertices: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..vertices {
            for v in u + 1..vertices {
                if rng.gen_bool(p) {
                    edges.push([u, v]);
                }
            }
        }
        Graph { vertices, edges }
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.vertices]; self.vertices];
        for &[u, v] in &self.edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        adj
    }

    pub fn is_complete(&self) -> bool {
        let adj = self.adjacency();
        (0..self.vertices).all(|u| (0..self.vertices).all(|v| u == v || adj[u][v]))
    }
}

/// Which kind of one-level tree to sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeKind {
    Oltpg,
    Spg,
}

/// One-level tree with `n - 1` leaves, `m` actions per player and payoffs
/// i.i.d. uniform on `[lo, hi)`. Star games share one leader matrix.
pub fn random_oltpg(n: usize, m: usize, seed: u64, lo: f64, hi: f64, kind: TreeKind) -> Result<PolymatrixGame> {
    if n < 2 || m < 1 {
        return Err(Error::InvalidArgument("need at least 2 players and 1 action".into()));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::InvalidArgument(format!("empty payoff range [{lo}, {hi})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || Array2::from_shape_fn((m, m), |_| rng.gen_range(lo..hi));
    let shared = (kind == TreeKind::Spg).then(&mut draw);
    let leaves = (0..n - 1)
        .map(|_| {
            let follower = draw();
            let leader = shared.clone().unwrap_or_else(&mut draw);
            (numbered_labels("a", m), follower, leader)
        })
        .collect();
    PolymatrixGame::star(numbered_labels("a", m), leaves)
}

/// Star game whose pessimistic value equals the size of a maximum clique.
///
/// Follower `p` stands for vertex `p` and chooses between staying out (`a0`)
/// and joining (`a1`); the leader plays vertex actions. A vertex counts as
/// adjacent to itself.
pub fn clique_to_spg(graph: &Graph) -> Result<PolymatrixGame> {
    graph.check()?;
    let r = graph.vertices;
    if r < 2 {
        return Err(Error::InvalidGraph("need at least 2 vertices".into()));
    }
    if graph.is_complete() {
        return Err(Error::InvalidGraph(
            "complete graphs are excluded: their maximum clique is all vertices".into(),
        ));
    }
    let adj = graph.adjacency();
    let rf = r as f64;
    let leaves = (0..r)
        .map(|p| {
            let follower = Array2::from_shape_fn((2, r), |(a, i)| match (a, i == p || adj[p][i]) {
                (0, true) => 1.0,
                (0, false) => 1.0 + rf * rf,
                _ if i == p => rf,
                _ => 0.0,
            });
            let leader = Array2::from_shape_fn((2, r), |(a, _)| a as f64);
            (vec!["a0".to_string(), "a1".to_string()], follower, leader)
        })
        .collect();
    PolymatrixGame::star(numbered_labels("v", r), leaves)
}

/// 3-CNF formula; literals are signed 1-based variable indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<[i32; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for c in &clauses {
            for &l in c {
                if l == 0 || l.unsigned_abs() as usize > num_vars {
                    return Err(Error::InvalidCnf(format!("literal {l} outside variables 1..{num_vars}")));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[i32; 3]] {
        &self.clauses
    }

    /// Parses DIMACS with a `p cnf <vars> <clauses>` header; every clause must
    /// have exactly three literals and end with `0`.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for line in text.lines().map(str::trim) {
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if line.starts_with('p') {
                let parts: Vec<&str> = line.split_whitespace().collect();
                match parts.as_slice() {
                    ["p", "cnf", v, c] => {
                        let num = |s: &str| s.parse::<usize>().map_err(|_| Error::InvalidCnf(format!("bad header: {line}")));
                        header = Some((num(v)?, num(c)?));
                    }
                    _ => return Err(Error::InvalidCnf(format!("bad header: {line}"))),
                }
                continue;
            }
            if header.is_none() {
                return Err(Error::InvalidCnf("clause before the p cnf header".into()));
            }
            for tok in line.split_whitespace() {
                let lit: i32 = tok.parse().map_err(|_| Error::InvalidCnf(format!("bad literal {tok:?}")))?;
                if lit == 0 {
                    let clause: [i32; 3] = current.as_slice().try_into().map_err(|_| {
                        Error::InvalidCnf(format!("clause {} has {} literals, expected 3", clauses.len() + 1, current.len()))
                    })?;
                    clauses.push(clause);
                    current.clear();
                } else {
                    current.push(lit);
                }
            }
        }
        let (vars, count) = header.ok_or_else(|| Error::InvalidCnf("missing p cnf header".into()))?;
        if !current.is_empty() {
            return Err(Error::InvalidCnf("last clause is not terminated by 0".into()));
        }
        if clauses.len() != count {
            return Err(Error::InvalidCnf(format!("header announces {count} clauses, found {}", clauses.len())));
        }
        Self::new(vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for [a, b, c] in &self.clauses {
            writeln!(out, "{a} {b} {c} 0").unwrap();
        }
        out
    }

    /// Truth of clause `c` under `assignment` (bit `v - 1` is variable `v`).
    fn clause_holds(clause: &[i32; 3], assignment: u32) -> bool {
        clause.iter().any(|&l| {
            let value = assignment >> (l.unsigned_abs() - 1) & 1 == 1;
            value == (l > 0)
        })
    }

    /// First satisfying assignment in counting order, by exhaustive search.
    pub fn satisfying_assignment(&self) -> Result<Option<Vec<bool>>> {
        if self.num_vars > MAX_SAT_VARS {
            return Err(Error::TooLarge(format!("{} variables, limit {MAX_SAT_VARS}", self.num_vars)));
        }
        Ok((0u32..1 << self.num_vars)
            .find(|&t| self.clauses.iter().all(|c| Self::clause_holds(c, t)))
            .map(|t| (0..self.num_vars).map(|v| t >> v & 1 == 1).collect()))
    }

    pub fn is_satisfiable(&self) -> Result<bool> {
        Ok(self.satisfying_assignment()?.is_some())
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")))
    }
}

fn leader_labels(r: usize) -> Vec<String> {
    let mut l = numbered_labels("v", r);
    l.push("w".into());
    l
}

/// General polymatrix game whose optimistic value is 1 for satisfiable
/// formulas and `epsilon` otherwise. One follower per clause (at least 3).
pub fn sat_to_pg_olfe(cnf: &CnfFormula, epsilon: f64) -> Result<PolymatrixGame> {
    check_epsilon(epsilon)?;
    let s = cnf.clauses.len();
    if s < 3 {
        return Err(Error::InvalidCnf(format!("need at least 3 clauses, got {s}")));
    }
    let r = cnf.num_vars;
    let (rf, sf) = (r as f64, s as f64);
    let leader = s;
    let mut edges = Vec::new();
    for p in 0..s {
        for q in p + 1..s {
            let own = |x: usize, y: usize| match (x, y) {
                (0, 0) => rf + 1.0,
                (0, _) => 1.0 / (sf - 1.0),
                _ => 0.0,
            };
            edges.push(Edge {
                p,
                q,
                payoff_p: Array2::from_shape_fn((4, 4), |(x, y)| own(x, y)),
                payoff_q: Array2::from_shape_fn((4, 4), |(x, y)| own(y, x)),
            });
        }
        let clause = cnf.clauses[p];
        let follower = Array2::from_shape_fn((4, r + 1), |(a, k)| {
            if a == 0 {
                return 0.0;
            }
            let lit = clause[a - 1];
            let on_var = k == lit.unsigned_abs() as usize - 1;
            match (lit > 0, on_var) {
                (true, true) => rf + 1.0,
                (true, false) => 0.0,
                (false, true) => 0.0,
                (false, false) => (rf + 1.0) / rf,
            }
        });
        let lead = Array2::from_shape_fn((4, r + 1), |(a, _)| if a == 0 { epsilon / sf } else { 1.0 / sf });
        edges.push(Edge { p, q: leader, payoff_p: follower, payoff_q: lead });
    }
    let mut labels: Vec<Vec<String>> = (0..s).map(|_| (0..4).map(|i| format!("a{i}")).collect()).collect();
    labels.push(leader_labels(r));
    PolymatrixGame::new(labels, edges)
}

/// Action `c * 8 + a` of the four-player construction: a sign pattern over
/// the positions of clause `c`, position `i` positive iff bit `2 - i` of `a`
/// is clear.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Pattern {
    clause: usize,
    bits: usize,
}

impl Pattern {
    fn positive(self, i: usize) -> bool {
        self.bits >> (2 - i) & 1 == 0
    }

    fn label(self) -> String {
        let signs: String = (0..3).map(|i| if self.positive(i) { '+' } else { '-' }).collect();
        format!("c{}{}", self.clause + 1, signs)
    }
}

/// Four-player general polymatrix game whose pessimistic value is 1 for
/// satisfiable formulas and `epsilon` otherwise. Each follower has one action
/// per clause and sign pattern, plus `f`; follower `p` reads position `p` of
/// the pattern it faces.
pub fn sat_to_pg_plfe(cnf: &CnfFormula, epsilon: f64) -> Result<PolymatrixGame> {
    check_epsilon(epsilon)?;
    let s = cnf.clauses.len();
    if s == 0 {
        return Err(Error::InvalidCnf("formula has no clauses".into()));
    }
    let r = cnf.num_vars;
    let rf = r as f64;
    let m = 8 * s + 1;
    let f = 8 * s;
    let pattern = |x: usize| Pattern { clause: x / 8, bits: x % 8 };
    // Literal at position `i` of pattern `x`: (variable index, positive).
    let literal = |x: usize, i: usize| {
        let pat = pattern(x);
        (cnf.clauses[pat.clause][i].unsigned_abs() as usize - 1, pat.positive(i))
    };
    let satisfies = |x: usize| {
        let pat = pattern(x);
        (0..3).any(|i| pat.positive(i) == (cnf.clauses[pat.clause][i] > 0))
    };
    let share = |positive: bool| if positive { 1.0 / (2.0 * (rf + 1.0)) } else { rf / (2.0 * (rf + 1.0)) };

    let mut edges = Vec::new();
    for p in 0..3 {
        for q in p + 1..3 {
            // (x, y) are the actions of p and q.
            let pay = |x: usize, y: usize| -> (f64, f64) {
                match (x == f, y == f) {
                    (false, false) if x == y => (0.0, 0.0),
                    (false, false) => (-1.0, -1.0),
                    (true, true) => (0.0, 1.0),
                    (true, false) => (share(literal(y, p).1), 0.0),
                    (false, true) => (1.0, share(literal(x, q).1)),
                }
            };
            edges.push(Edge {
                p,
                q,
                payoff_p: Array2::from_shape_fn((m, m), |(x, y)| pay(x, y).0),
                payoff_q: Array2::from_shape_fn((m, m), |(x, y)| pay(x, y).1),
            });
        }
        let follower = Array2::from_shape_fn((m, r + 1), |(x, k)| {
            if x == f {
                return 0.0;
            }
            let (v, positive) = literal(x, p);
            let hit = match k == r {
                true => !positive,
                false => (k == v) == positive,
            };
            if hit {
                1.0
            } else {
                0.0
            }
        });
        let lead = Array2::from_shape_fn((m, r + 1), |(x, _)| match x {
            _ if x == f => 1.0,
            _ if satisfies(x) => 1.0 / 3.0,
            _ => epsilon / 3.0,
        });
        edges.push(Edge { p, q: 3, payoff_p: follower, payoff_q: lead });
    }
    let mut actions: Vec<String> = (0..f).map(|x| pattern(x).label()).collect();
    actions.push("f".into());
    let labels = vec![actions.clone(), actions.clone(), actions, leader_labels(r)];
    let game = PolymatrixGame::new(labels, edges)?;
    debug_assert_eq!(game.classify(), GameClass::GeneralPg);
    Ok(game)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{ActionProfile, MixedStrategy, Mode};

    #[test]
    fn random_games_are_deterministic_and_in_range() {
        let a = random_oltpg(3, 4, 7, 0.0, 100.0, TreeKind::Oltpg).unwrap();
        let b = random_oltpg(3, 4, 7, 0.0, 100.0, TreeKind::Oltpg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.classify(), GameClass::Oltpg);
        assert!(a.edges().iter().all(|e| e.payoff_p.iter().chain(&e.payoff_q).all(|&x| (0.0..100.0).contains(&x))));
        let s = random_oltpg(4, 3, 7, 0.0, 100.0, TreeKind::Spg).unwrap();
        assert_eq!(s.classify(), GameClass::Spg);
        assert!(random_oltpg(1, 3, 0, 0.0, 1.0, TreeKind::Spg).is_err());
    }

    #[test]
    fn clique_payoffs_on_path() {
        let g = clique_to_spg(&Graph::path(3)).unwrap();
        assert_eq!(g.classify(), GameClass::Spg);
        let u = g.follower_payoff_vector(0, 0).unwrap();
        assert_eq!(u, vec![1.0, 1.0, 10.0]);
        assert_eq!(g.follower_payoff_vector(0, 1).unwrap(), vec![3.0, 0.0, 0.0]);
        let star = g.star_view().unwrap();
        assert!(star.leader[0].row(1).iter().all(|&x| x == 1.0));
        assert!(star.leader[0].row(0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn complete_graph_rejected() {
        let k3 = Graph::new(3, vec![[0, 1], [1, 2], [0, 2]]).unwrap();
        assert!(clique_to_spg(&k3).is_err());
        assert!(Graph::new(2, vec![[0, 0]]).is_err());
    }

    #[test]
    fn dimacs_round_trip() {
        let text = "c tiny\np cnf 3 2\n1 -2 3 0\n-1 -1 2 0\n";
        let cnf = CnfFormula::parse_dimacs(text).unwrap();
        assert_eq!(cnf.clauses(), &[[1, -2, 3], [-1, -1, 2]]);
        assert_eq!(CnfFormula::parse_dimacs(&cnf.to_dimacs()).unwrap(), cnf);
        assert!(CnfFormula::parse_dimacs("p cnf 3 1\n1 2 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 1 1\n1 2 1 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 3 2\n1 2 3 0\n").is_err());
    }

    #[test]
    fn brute_force_sat() {
        let unsat = CnfFormula::new(1, vec![[1, 1, 1], [-1, -1, -1], [1, 1, 1]]).unwrap();
        assert!(!unsat.is_satisfiable().unwrap());
        let sat = CnfFormula::new(3, vec![[1, 2, 3], [-1, 2, -3], [1, -2, 3]]).unwrap();
        assert!(sat.is_satisfiable().unwrap());
    }

    #[test]
    fn olfe_construction_all_out_is_always_equilibrium() {
        let cnf = CnfFormula::new(1, vec![[1, 1, 1], [-1, -1, -1], [1, 1, 1]]).unwrap();
        let g = sat_to_pg_olfe(&cnf, 0.01).unwrap();
        assert_eq!(g.classify(), GameClass::GeneralPg);
        for s in [vec![1.0, 0.0], vec![0.3, 0.7], vec![0.0, 1.0]] {
            let ne = g.enumerate_pure_ne(&MixedStrategy::new(s).unwrap(), 1e-9).unwrap();
            assert!(ne.contains(&ActionProfile(vec![0, 0, 0])));
        }
        assert!(sat_to_pg_olfe(&CnfFormula::new(1, vec![[1, 1, 1]]).unwrap(), 0.01).is_err());
    }

    #[test]
    fn olfe_construction_payoffs() {
        let cnf = CnfFormula::new(2, vec![[1, -2, 1], [2, 2, 2], [-1, -1, -1]]).unwrap();
        let g = sat_to_pg_olfe(&cnf, 0.5).unwrap();
        let e = g.edge_between(0, 3).unwrap();
        // a1 is literal x1: r + 1 on v1, 0 on v2 and w.
        assert_eq!(e.payoff_p.row(1).to_vec(), vec![3.0, 0.0, 0.0]);
        // a2 is literal not x2: 0 on v2, (r + 1) / r elsewhere.
        assert_eq!(e.payoff_p.row(2).to_vec(), vec![1.5, 0.0, 1.5]);
        assert_eq!(e.payoff_q.row(0).to_vec(), vec![0.5 / 3.0; 3]);
        let ff = g.edge_between(0, 1).unwrap();
        assert_eq!(ff.payoff_p[[0, 0]], 3.0);
        assert_eq!(ff.payoff_p[[0, 2]], 0.5);
        assert_eq!(ff.payoff_q[[2, 0]], 0.5);
        assert_eq!(ff.payoff_p[[1, 0]], 0.0);
        assert_eq!(g.pure_utility(0, &[0, 0, 0, 1]).unwrap(), 6.0);
    }

    #[test]
    fn plfe_construction_shape() {
        let cnf = CnfFormula::new(3, vec![[1, 2, 3]]).unwrap();
        let g = sat_to_pg_plfe(&cnf, 0.01).unwrap();
        assert_eq!(g.num_players(), 4);
        assert!(g.followers().all(|p| g.num_actions(p) == 9));
        assert_eq!(g.num_actions(3), 4);
        assert_eq!(g.classify(), GameClass::GeneralPg);
        // Both lower followers playing f contribute 0 to the first one.
        let e = g.edge_between(0, 1).unwrap();
        assert_eq!(e.payoff_p[[8, 8]], 0.0);
        assert_eq!(e.payoff_q[[8, 8]], 1.0);
        let s = MixedStrategy::uniform(4);
        let ne = g.enumerate_pure_ne(&s, 1e-9).unwrap();
        assert!(!ne.contains(&ActionProfile(vec![8, 8, 8])));
        // The all-positive pattern satisfies x1 v x2 v x3; the all-negative one does not.
        let lead = &g.edge_between(0, 3).unwrap().payoff_q;
        assert_eq!(lead[[0, 0]], 1.0 / 3.0);
        assert_eq!(lead[[7, 0]], 0.01 / 3.0);
        assert_eq!(lead[[8, 2]], 1.0);
    }

    #[test]
    fn plfe_agreeing_pattern_is_equilibrium_inside_its_region() {
        let cnf = CnfFormula::new(3, vec![[1, 2, 3]]).unwrap();
        let g = sat_to_pg_plfe(&cnf, 0.01).unwrap();
        // Pattern +++ needs every variable above 1/4.
        let s = MixedStrategy::new(vec![0.3, 0.3, 0.3, 0.1]).unwrap();
        let ne = g.enumerate_pure_ne(&s, 1e-9).unwrap();
        assert!(ne.contains(&ActionProfile(vec![0, 0, 0])));
        let worst = g.pure_ne_extreme(&s, Mode::Pessimistic, 1e-9).unwrap().unwrap();
        assert!((worst.value - 1.0).abs() < 1e-12);
    }
}
