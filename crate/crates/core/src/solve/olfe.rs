//! Optimistic equilibrium with pure-strategy followers: one LP per follower
//! profile, keeping the best feasible one.

use super::{LfeResult, SolveOptions, SolveStats, VALUE_TOL};
use crate::enumerate::scan;
use crate::error::{Error, Result};
use crate::game::{ActionProfile, MixedStrategy, Mode, PolymatrixGame};
use crate::lp::{LinearProgram, LpStatus, Relation, Var};

/// How the follower equilibrium constraints are written.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintForm {
    /// Pure Nash conditions including follower-follower payoffs; any game.
    General,
    /// Per-follower best-response conditions; one-level trees only.
    BestResponse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileOptimum {
    pub value: f64,
    pub strategy: MixedStrategy,
}

/// Tolerance for constraints that do not depend on the leader's strategy.
const CONSTANT_TOL: f64 = 1e-9;

struct Row {
    terms: Vec<(Var, f64)>,
    rhs: f64,
}

/// The optimum, if any, and whether an LP was actually solved.
fn profile_lp(game: &PolymatrixGame, a: &[usize], form: ConstraintForm) -> Result<(Option<ProfileOptimum>, bool)> {
    let leader = game.leader();
    let m = game.num_actions(leader);
    let mut lp = LinearProgram::new();
    let s: Vec<Var> = (0..m).map(|i| lp.add_nonneg(format!("s{i}"))).collect();
    lp.add_constraint(s.iter().map(|&x| (x, 1.0)).collect(), Relation::Eq, 1.0);

    let mut rows = Vec::new();
    match form {
        ConstraintForm::General => {
            for p in game.followers() {
                let lead = game.edge_between(p, leader);
                let here = game.follower_vs_followers(p, a[p], a);
                for b in (0..game.num_actions(p)).filter(|&b| b != a[p]) {
                    let terms = lead.map_or_else(Vec::new, |e| {
                        s.iter()
                            .enumerate()
                            .map(|(k, &x)| (x, e.payoff_p[[a[p], k]] - e.payoff_p[[b, k]]))
                            .filter(|&(_, c)| c != 0.0)
                            .collect()
                    });
                    rows.push(Row { terms, rhs: game.follower_vs_followers(p, b, a) - here });
                }
            }
        }
        ConstraintForm::BestResponse => {
            let star = game.star_view()?;
            for p in 0..star.num_followers() {
                let u = star.follower[p];
                for b in (0..u.nrows()).filter(|&b| u.row(b) != u.row(a[p])) {
                    let terms = s
                        .iter()
                        .enumerate()
                        .map(|(k, &x)| (x, u[[a[p], k]] - u[[b, k]]))
                        .filter(|&(_, c)| c != 0.0)
                        .collect();
                    rows.push(Row { terms, rhs: 0.0 });
                }
            }
        }
    }
    for row in rows {
        if row.terms.is_empty() {
            if row.rhs > CONSTANT_TOL {
                return Ok((None, false));
            }
        } else {
            lp.add_constraint(row.terms, Relation::Ge, row.rhs);
        }
    }

    let mut objective = vec![0.0; m];
    for e in game.incident_edges(leader) {
        for (k, o) in objective.iter_mut().enumerate() {
            *o += e.payoff_q[[a[e.p], k]];
        }
    }
    lp.set_objective(s.iter().zip(objective).filter(|&(_, c)| c != 0.0).map(|(&x, c)| (x, c)).collect());
    let sol = lp.solve()?;
    match sol.status {
        LpStatus::Optimal => {
            let strategy = MixedStrategy::from_solver(&s.iter().map(|&x| sol.value(x)).collect::<Vec<_>>())?;
            let opt = ProfileOptimum {
                value: sol.objective_value().unwrap(),
                strategy,
            };
            Ok((Some(opt), true))
        }
        LpStatus::Infeasible => Ok((None, true)),
        LpStatus::Unbounded => Err(Error::Internal("optimistic profile LP unbounded".into())),
    }
}

/// Best commitment that makes `a` a pure Nash equilibrium of the followers,
/// or `None` when no commitment does.
pub fn olfe_profile_lp(game: &PolymatrixGame, a: &ActionProfile) -> Result<Option<ProfileOptimum>> {
    game.check_profile(a)?;
    Ok(profile_lp(game, &a.0, ConstraintForm::General)?.0)
}

/// Optimistic equilibrium using the general constraint form.
pub fn solve_olfe(game: &PolymatrixGame, opts: &SolveOptions) -> Result<LfeResult> {
    solve_olfe_with(game, opts, ConstraintForm::General)
}

pub fn solve_olfe_with(game: &PolymatrixGame, opts: &SolveOptions, form: ConstraintForm) -> Result<LfeResult> {
    if form == ConstraintForm::BestResponse {
        game.star_view()?;
    }
    let radix: Vec<usize> = game.followers().map(|p| game.num_actions(p)).collect();
    let mut stats = SolveStats::default();
    let mut best: Option<(Vec<usize>, ProfileOptimum)> = None;
    let mut failure: Option<Error> = None;
    let outcome = scan(
        radix,
        opts.profile_limit,
        opts.deadline(),
        opts.worker_threads(),
        |a| profile_lp(game, a, form),
        |a, r| match r {
            Err(e) => {
                failure.get_or_insert(e);
            }
            Ok((None, solved)) => stats.lp_solves += solved as u64,
            Ok((Some(opt), _)) => {
                stats.lp_solves += 1;
                stats.profiles_surviving += 1;
                if best.as_ref().is_none_or(|(_, b)| opt.value > b.value + VALUE_TOL) {
                    best = Some((a.to_vec(), opt));
                }
            }
        },
    );
    stats.profiles_enumerated = outcome.processed;
    if let Some(e) = failure {
        return Err(e);
    }
    let Some((profile, opt)) = best else {
        return Err(if outcome.processed == 0 {
            Error::NoProfileProcessed
        } else {
            Error::NoPureNeCommitment
        });
    };
    Ok(LfeResult {
        mode: Mode::Optimistic,
        value: opt.value,
        strategy: opt.strategy,
        profile: ActionProfile(profile),
        attained: true,
        alpha: opts.alpha,
        anytime_complete: outcome.complete,
        raw_beta: None,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use ndarray::array;

    use super::*;
    use crate::game::fixtures;
    use crate::solve::plfe::solve_plfe;

    #[test]
    fn mixed_tree_profile_is_feasible() {
        let g = fixtures::mixed_tree();
        let opt = olfe_profile_lp(&g, &ActionProfile(vec![0, 1])).unwrap().unwrap();
        assert!(opt.value >= 10.0 / 3.0 - 1e-9);
    }

    #[test]
    fn dominated_action_is_infeasible() {
        let g = PolymatrixGame::star(
            vec!["x".into(), "y".into()],
            vec![(
                vec!["a".into(), "b".into()],
                array![[1.0, 1.0], [0.0, 0.0]],
                array![[0.0, 0.0], [5.0, 5.0]],
            )],
        )
        .unwrap();
        assert!(olfe_profile_lp(&g, &ActionProfile(vec![1])).unwrap().is_none());
        let r = solve_olfe(&g, &SolveOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn optimistic_dominates_pessimistic() {
        for g in [fixtures::mixed_tree(), fixtures::shared_star(), fixtures::two_action([0.0, 1.0], [0.0, 0.0])] {
            let o = solve_olfe(&g, &SolveOptions::default()).unwrap();
            let b = solve_olfe_with(&g, &SolveOptions::default(), ConstraintForm::BestResponse).unwrap();
            let p = solve_plfe(&g, &SolveOptions::default()).unwrap();
            assert!((o.value - b.value).abs() <= 1e-9);
            assert!(o.value >= p.value - 1e-7);
            assert!(o.attained);
        }
    }

    #[test]
    fn two_action_optimum_is_the_tie_point() {
        let g = fixtures::two_action([0.0, 1.0], [0.0, 0.0]);
        let r = solve_olfe(&g, &SolveOptions::default()).unwrap();
        assert!((r.value - 0.5).abs() < 1e-12);
        assert_eq!(r.profile, ActionProfile(vec![0]));
    }

    #[test]
    fn general_game_without_pure_ne() {
        use crate::game::Edge;
        let l = || vec!["h".to_string(), "t".to_string()];
        let edges = vec![Edge {
            p: 0,
            q: 1,
            payoff_p: array![[1.0, -1.0], [-1.0, 1.0]],
            payoff_q: array![[-1.0, 1.0], [1.0, -1.0]],
        }];
        let g = PolymatrixGame::new(vec![l(), l(), vec!["x".into()]], edges).unwrap();
        assert!(matches!(solve_olfe(&g, &SolveOptions::default()), Err(Error::NoPureNeCommitment)));
        assert!(solve_olfe_with(&g, &SolveOptions::default(), ConstraintForm::BestResponse).is_err());
    }
}
