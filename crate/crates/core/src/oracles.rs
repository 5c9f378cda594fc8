//! Brute-force verifiers: a simplex grid search, an exact oracle for two
//! leader actions, and maximum clique by branch and bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{GameClass, MixedStrategy, Mode, PolymatrixGame, StarView};
use crate::gen::Graph;

/// Largest number of grid points `grid_oracle` will visit.
pub const MAX_GRID_POINTS: u128 = 10_000_000;

/// Largest graph accepted by `max_clique_bruteforce`.
pub const MAX_CLIQUE_VERTICES: usize = 20;

const BREAKPOINT_TOL: f64 = 1e-12;
const TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub value: f64,
    pub strategy: MixedStrategy,
    /// Points evaluated, including skipped ones.
    pub points: u64,
    /// Points where the followers have no pure Nash equilibrium.
    pub skipped: u64,
}

/// `C(n, k)`, saturating.
fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

/// Calls `f` on every vector of `m` non-negative integers summing to `k`,
/// in lexicographic order.
fn for_each_composition(k: usize, m: usize, prefix: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if m == 1 {
        prefix.push(k);
        f(prefix);
        prefix.pop();
        return;
    }
    for c in 0..=k {
        prefix.push(c);
        for_each_composition(k - c, m - 1, prefix, f);
        prefix.pop();
    }
}

#[derive(Clone)]
struct Best {
    value: f64,
    point: Vec<usize>,
    points: u64,
    skipped: u64,
}

impl Best {
    fn merge(mut self, other: Best) -> Best {
        self.points += other.points;
        self.skipped += other.skipped;
        if other.value > self.value {
            self.value = other.value;
            self.point = other.point;
        }
        self
    }
}

/// Best leader value over strategies whose probabilities are multiples of
/// `1/k`. One-level trees use the closed-form evaluation; other games take
/// the worst (or best) pure equilibrium and skip points without one.
pub fn grid_oracle(game: &PolymatrixGame, k: usize, mode: Mode, threads: usize) -> Result<GridResult> {
    if k == 0 {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    let m = game.num_actions(game.leader());
    let count = binomial((k + m - 1) as u128, (m - 1) as u128);
    if count > MAX_GRID_POINTS {
        return Err(Error::TooLarge(format!("{count} grid points, limit {MAX_GRID_POINTS}")));
    }
    let star = match game.classify() {
        GameClass::GeneralPg => None,
        _ => Some(game.star_view()?),
    };
    let kf = k as f64;
    let eval = |point: &[usize]| -> Result<Option<f64>> {
        let s: Vec<f64> = point.iter().map(|&c| c as f64 / kf).collect();
        match &star {
            Some(star) => Ok(Some(star.evaluate(&s, mode, TOL).value)),
            None => Ok(game.pure_ne_extreme(&MixedStrategy::new(s)?, mode, TOL)?.map(|c| c.value)),
        }
    };
    let slice = |first: usize| -> Result<Best> {
        let mut best = Best { value: f64::NEG_INFINITY, point: Vec::new(), points: 0, skipped: 0 };
        let mut failure = None;
        let mut prefix = vec![first];
        let mut visit = |point: &[usize]| {
            best.points += 1;
            match eval(point) {
                Ok(Some(v)) if v > best.value => {
                    best.value = v;
                    best.point = point.to_vec();
                }
                Ok(Some(_)) => {}
                Ok(None) => best.skipped += 1,
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        };
        if m == 1 {
            visit(&[k]);
        } else {
            for_each_composition(k - first, m - 1, &mut prefix, &mut visit);
        }
        failure.map_or(Ok(best), Err)
    };
    let firsts: Vec<usize> = if m == 1 { vec![k] } else { (0..=k).collect() };
    let run = || firsts.par_iter().map(|&c| slice(c)).collect::<Vec<_>>();
    let parts = match threads {
        1 => firsts.iter().map(|&c| slice(c)).collect::<Vec<_>>(),
        0 => run(),
        t => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?
            .install(run),
    };
    let best = parts
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .reduce(Best::merge)
        .expect("at least one slice");
    if best.point.is_empty() {
        return Err(Error::NoPureNeCommitment);
    }
    Ok(GridResult {
        value: best.value,
        strategy: MixedStrategy::new(best.point.iter().map(|&c| c as f64 / kf).collect())?,
        points: best.points,
        skipped: best.skipped,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Supremum1d {
    pub value: f64,
    pub attained: bool,
    /// Probability of the first leader action at the supremum.
    pub t: f64,
}

/// Line `a * t + b` for `s = (t, 1 - t)`.
fn line(row: ndarray::ArrayView1<f64>) -> (f64, f64) {
    (row[0] - row[1], row[1])
}

fn at((a, b): (f64, f64), t: f64) -> f64 {
    a * t + b
}

/// Exact pessimistic supremum for one-level trees with two leader actions.
pub fn supremum_1d(game: &PolymatrixGame) -> Result<Supremum1d> {
    let star = game.star_view()?;
    let m = game.num_actions(game.leader());
    if m != 2 {
        return Err(Error::InvalidArgument(format!("supremum_1d needs 2 leader actions, got {m}")));
    }
    let mut cuts = vec![0.0, 1.0];
    let mut crossings = |u: &ndarray::Array2<f64>| {
        let lines: Vec<_> = u.rows().into_iter().map(line).collect();
        for (i, x) in lines.iter().enumerate() {
            for y in &lines[i + 1..] {
                let slope = x.0 - y.0;
                if slope != 0.0 {
                    let t = (y.1 - x.1) / slope;
                    if (0.0..=1.0).contains(&t) {
                        cuts.push(t);
                    }
                }
            }
        }
    };
    for p in 0..star.num_followers() {
        crossings(star.follower[p]);
        crossings(star.leader[p]);
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= BREAKPOINT_TOL);

    let point = |t: f64| star.evaluate(&[t, 1.0 - t], Mode::Pessimistic, TOL).value;
    let mut best_attained = (f64::NEG_INFINITY, 0.0);
    let mut best_limit = (f64::NEG_INFINITY, 0.0);
    for &t in &cuts {
        let v = point(t);
        if v > best_attained.0 {
            best_attained = (v, t);
        }
    }
    for w in cuts.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let mid = 0.5 * (lo + hi);
        let piece = interval_piece(&star, mid);
        let (a, b) = (at(piece, lo), at(piece, hi));
        let (v, t) = if a >= b { (a, lo) } else { (b, hi) };
        if piece.0 == 0.0 {
            if v > best_attained.0 {
                best_attained = (v, mid);
            }
        } else if v > best_limit.0 {
            best_limit = (v, t);
        }
    }
    let (value, t) = if best_limit.0 > best_attained.0 { best_limit } else { best_attained };
    Ok(Supremum1d {
        value,
        attained: best_attained.0 >= value - TOL,
        t,
    })
}

/// Affine leader value on the open interval containing `mid`.
fn interval_piece(star: &StarView<'_>, mid: f64) -> (f64, f64) {
    let s = [mid, 1.0 - mid];
    let mut total = (0.0, 0.0);
    for p in 0..star.num_followers() {
        let br = star.best_responses(p, &s, TOL);
        let worst = br
            .iter()
            .map(|&b| line(star.leader[p].row(b)))
            .min_by(|x, y| at(*x, mid).total_cmp(&at(*y, mid)))
            .expect("best responses are never empty");
        total = (total.0 + worst.0, total.1 + worst.1);
    }
    total
}

/// Size of a maximum clique.
pub fn max_clique_bruteforce(graph: &Graph) -> Result<usize> {
    graph.check()?;
    let r = graph.vertices;
    if r > MAX_CLIQUE_VERTICES {
        return Err(Error::TooLarge(format!("{r} vertices, limit {MAX_CLIQUE_VERTICES}")));
    }
    let mut nbr = vec![0u32; r];
    for &[u, v] in &graph.edges {
        nbr[u] |= 1 << v;
        nbr[v] |= 1 << u;
    }
    fn grow(nbr: &[u32], size: usize, candidates: u32, best: &mut usize) {
        if candidates == 0 {
            *best = (*best).max(size);
            return;
        }
        if size + candidates.count_ones() as usize <= *best {
            return;
        }
        let v = candidates.trailing_zeros() as usize;
        grow(nbr, size + 1, candidates & nbr[v], best);
        grow(nbr, size, candidates & !(1 << v), best);
    }
    let mut best = 0;
    let all = if r == 32 { u32::MAX } else { (1u32 << r) - 1 };
    grow(&nbr, 0, all, &mut best);
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::fixtures;
    use crate::gen::{random_oltpg, TreeKind};
    use crate::solve::{plfe::solve_plfe, SolveOptions};

    fn subset_clique(g: &Graph) -> usize {
        let adj = g.adjacency();
        (0u32..1 << g.vertices)
            .filter(|&mask| {
                let vs: Vec<usize> = (0..g.vertices).filter(|&v| mask >> v & 1 == 1).collect();
                vs.iter().all(|&a| vs.iter().all(|&b| a == b || adj[a][b]))
            })
            .map(|mask| mask.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn clique_examples() {
        assert_eq!(max_clique_bruteforce(&Graph::path(3)).unwrap(), 2);
        assert_eq!(max_clique_bruteforce(&Graph::new(4, vec![]).unwrap()).unwrap(), 1);
        for seed in 0..10 {
            let g = Graph::random(8, 0.5, seed);
            assert_eq!(max_clique_bruteforce(&g).unwrap(), subset_clique(&g));
        }
        assert!(max_clique_bruteforce(&Graph::new(21, vec![]).unwrap()).is_err());
    }

    #[test]
    fn grid_on_mixed_tree() {
        let g = fixtures::mixed_tree();
        let r = grid_oracle(&g, 3, Mode::Pessimistic, 1).unwrap();
        assert!(r.value >= 10.0 / 3.0 - 1e-9);
        assert_eq!(r.points, 10);
        let pure = grid_oracle(&g, 1, Mode::Pessimistic, 1).unwrap();
        let by_hand = (0..3)
            .map(|i| g.evaluate_commitment(&MixedStrategy::pure(3, i), Mode::Pessimistic, TOL).unwrap().value)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(pure.value, by_hand);
        let exact = solve_plfe(&g, &SolveOptions::default()).unwrap();
        assert!(r.value <= exact.value + 1e-7);
    }

    #[test]
    fn grid_is_monotone_and_thread_independent() {
        let g = random_oltpg(3, 3, 5, 0.0, 100.0, TreeKind::Oltpg).unwrap();
        let v: Vec<f64> = [2, 4, 8].iter().map(|&k| grid_oracle(&g, k, Mode::Pessimistic, 1).unwrap().value).collect();
        assert!(v[0] <= v[1] && v[1] <= v[2]);
        assert_eq!(grid_oracle(&g, 8, Mode::Pessimistic, 1).unwrap(), grid_oracle(&g, 8, Mode::Pessimistic, 4).unwrap());
    }

    #[test]
    fn grid_size_guard() {
        let g = random_oltpg(2, 12, 0, 0.0, 1.0, TreeKind::Spg).unwrap();
        assert!(matches!(grid_oracle(&g, 100, Mode::Pessimistic, 1), Err(Error::TooLarge(_))));
    }

    #[test]
    fn one_dimensional_examples() {
        let open = supremum_1d(&fixtures::two_action([0.0, 1.0], [0.0, 0.0])).unwrap();
        assert!((open.value - 0.5).abs() < 1e-12);
        assert!(!open.attained);
        let closed = supremum_1d(&fixtures::two_action([1.0, 1.0], [0.0, 0.0])).unwrap();
        assert!((closed.value - 1.0).abs() < 1e-12);
        assert!(closed.attained);
        assert!(supremum_1d(&fixtures::mixed_tree()).is_err());
    }

    #[test]
    fn constant_follower() {
        use ndarray::array;
        let g = PolymatrixGame::star(
            vec!["x".into(), "y".into()],
            vec![(vec!["a".into(), "b".into()], array![[2.0, 2.0], [2.0, 2.0]], array![[3.0, 3.0], [4.0, 4.0]])],
        )
        .unwrap();
        let r = supremum_1d(&g).unwrap();
        assert_eq!(r.value, 3.0);
        assert!(r.attained);
    }

    #[test]
    fn general_game_grid_skips_points_without_equilibria() {
        let g = fixtures::triangle();
        let r = grid_oracle(&g, 4, Mode::Pessimistic, 1);
        match r {
            Ok(r) => assert!(r.skipped < r.points),
            Err(e) => assert!(matches!(e, Error::NoPureNeCommitment)),
        }
    }
}
