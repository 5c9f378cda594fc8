//! Exact pessimistic equilibrium for one-level tree polymatrix games.
//!
//! Every follower profile `a` owns the region of leader strategies where `a`
//! is a best-response profile. For each region with nonempty interior a
//! max-min LP gives the supremum of the leader's pessimistic value over it.
//! The best profile wins; when its supremum sits on the region boundary and a
//! follower there switches to a response that is worse for the leader, the
//! supremum is not attained and an interior `alpha`-approximation is returned.

use serde::{Deserialize, Serialize};

use super::{LfeResult, SolveOptions, SolveStats, VALUE_TOL};
use crate::enumerate::scan;
use crate::error::{Error, Result};
use crate::game::{ActionProfile, MixedStrategy, Mode, PolymatrixGame, StarView};
use crate::lp::{LinearProgram, LpSolution, LpStatus, Relation, Var};

/// Regions with emptiness margin at or below this are discarded.
pub const EPSILON_TOL: f64 = 1e-9;
/// Slacks at or below this count as binding.
pub const ZETA_TOL: f64 = 1e-9;
/// Relative slack on the optimal value when exploring the optimal face. It
/// must stay well below `ZETA_TOL`, or slacks forced to zero on the face can
/// be pushed past the binding threshold.
const FACE_TOL: f64 = 1e-12;
/// Near-ties within this margin count as ties when checking attainment, so a
/// point a rounding error away from a region boundary is not mistaken for
/// an interior one.
const ROBUST_TIE_TOL: f64 = 1e-7;

/// Per follower, the partition of actions into classes with identical payoff
/// vectors against the leader.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TieSets {
    class: Vec<Vec<usize>>,
}

impl TieSets {
    pub fn new(game: &PolymatrixGame) -> Result<Self> {
        Ok(Self::from_star(&game.star_view()?))
    }

    pub fn from_star(star: &StarView<'_>) -> Self {
        let class = star
            .follower
            .iter()
            .map(|u| {
                (0..u.nrows())
                    .map(|a| (0..=a).find(|&b| u.row(b) == u.row(a)).unwrap())
                    .collect()
            })
            .collect();
        TieSets { class }
    }

    /// Actions of `p` whose payoff vector equals that of `a`, including `a`.
    pub fn ties(&self, p: usize, a: usize) -> Vec<usize> {
        let c = self.class[p][a];
        (0..self.class[p].len()).filter(|&b| self.class[p][b] == c).collect()
    }

    pub fn is_tied(&self, p: usize, a: usize, b: usize) -> bool {
        self.class[p][a] == self.class[p][b]
    }
}

pub fn tie_set(game: &PolymatrixGame, p: usize, a_p: usize) -> Result<Vec<usize>> {
    let ties = TieSets::new(game)?;
    game.check_follower(p)?;
    if a_p >= game.num_actions(p) {
        return Err(Error::InvalidArgument(format!("action {a_p} out of range")));
    }
    Ok(ties.ties(p, a_p))
}

/// Slack of the best-response equality for a non-tied action.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Slack {
    pub follower: usize,
    pub action: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Emptiness {
    pub epsilon: f64,
    /// Strategy achieving `epsilon`; absent when the region is empty.
    pub witness: Option<MixedStrategy>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MaxMin {
    pub value: f64,
    pub strategy: MixedStrategy,
    pub zeta: Vec<Slack>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Attainment {
    /// True when the supremum is not attained.
    pub beta: bool,
    /// Some slack is binding at the examined point, regardless of whether the
    /// tie hurts the leader.
    pub raw_beta: bool,
    /// Point of the optimal face that was examined.
    pub strategy: MixedStrategy,
    pub zeta: Vec<Slack>,
    pub lp_solves: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Approximation {
    pub strategy: MixedStrategy,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProfileResult {
    pub profile: ActionProfile,
    pub epsilon: f64,
    /// Absent when the profile was discarded.
    pub max_min: Option<MaxMin>,
    pub lp_solves: u64,
}

/// The LPs of one follower profile.
pub(crate) struct ProfileLps<'a> {
    star: &'a StarView<'a>,
    ties: &'a TieSets,
    profile: &'a [usize],
    tol: f64,
}

struct ValueModel {
    lp: LinearProgram,
    s: Vec<Var>,
    v: Vec<Var>,
    zeta: Vec<(usize, usize, Var)>,
}

impl<'a> ProfileLps<'a> {
    pub(crate) fn new(star: &'a StarView<'a>, ties: &'a TieSets, profile: &'a [usize], tol: f64) -> Self {
        ProfileLps { star, ties, profile, tol }
    }

    fn leader_actions(&self) -> usize {
        self.star.follower.first().map_or(1, |u| u.ncols())
    }

    /// `(p, b)` for every action `b` not tied with `p`'s profile action.
    fn non_tied(&self) -> Vec<(usize, usize)> {
        (0..self.star.num_followers())
            .flat_map(|p| {
                let a = self.profile[p];
                (0..self.star.follower[p].nrows())
                    .filter(move |&b| !self.ties.is_tied(p, a, b))
                    .map(move |b| (p, b))
            })
            .collect()
    }

    fn simplex(&self, lp: &mut LinearProgram) -> Vec<Var> {
        let s: Vec<Var> = (0..self.leader_actions()).map(|i| lp.add_nonneg(format!("s{i}"))).collect();
        lp.add_constraint(s.iter().map(|&v| (v, 1.0)).collect(), Relation::Eq, 1.0);
        s
    }

    /// `(U_p^{a_p} - U_p^b) . s`
    fn margin(&self, p: usize, b: usize, s: &[Var]) -> Vec<(Var, f64)> {
        let u = self.star.follower[p];
        let a = self.profile[p];
        s.iter()
            .enumerate()
            .map(|(k, &x)| (x, u[[a, k]] - u[[b, k]]))
            .filter(|&(_, c)| c != 0.0)
            .collect()
    }

    fn leader(&self, p: usize, t: usize, s: &[Var]) -> Vec<(Var, f64)> {
        let u = self.star.leader[p];
        s.iter()
            .enumerate()
            .map(|(k, &x)| (x, u[[t, k]]))
            .filter(|&(_, c)| c != 0.0)
            .collect()
    }

    fn value_model(&self, with_zeta: bool) -> ValueModel {
        let mut lp = LinearProgram::new();
        let s = self.simplex(&mut lp);
        let mut v = Vec::with_capacity(self.star.num_followers());
        for p in 0..self.star.num_followers() {
            let vp = lp.add_free(format!("v{p}"));
            for t in self.ties.ties(p, self.profile[p]) {
                let mut terms = vec![(vp, 1.0)];
                terms.extend(self.leader(p, t, &s).into_iter().map(|(x, c)| (x, -c)));
                lp.add_constraint(terms, Relation::Le, 0.0);
            }
            v.push(vp);
        }
        let mut zeta = Vec::new();
        if with_zeta {
            for (p, b) in self.non_tied() {
                let z = lp.add_nonneg(format!("zeta{p}_{b}"));
                let mut terms = self.margin(p, b, &s);
                terms.push((z, -1.0));
                lp.add_constraint(terms, Relation::Eq, 0.0);
                zeta.push((p, b, z));
            }
        }
        ValueModel { lp, s, v, zeta }
    }

    fn strategy(sol: &LpSolution, s: &[Var]) -> Result<MixedStrategy> {
        MixedStrategy::from_solver(&s.iter().map(|&x| sol.value(x)).collect::<Vec<_>>())
    }

    fn slacks(sol: &LpSolution, zeta: &[(usize, usize, Var)]) -> Vec<Slack> {
        zeta.iter()
            .map(|&(p, b, z)| Slack { follower: p, action: b, value: sol.value(z) })
            .collect()
    }

    pub(crate) fn emptiness(&self) -> Result<Emptiness> {
        let mut lp = LinearProgram::new();
        let s = self.simplex(&mut lp);
        let eps = lp.add_var("eps", 0.0, Some(1.0));
        for (p, b) in self.non_tied() {
            let mut terms = self.margin(p, b, &s);
            terms.push((eps, -1.0));
            lp.add_constraint(terms, Relation::Ge, 0.0);
        }
        lp.set_objective(vec![(eps, 1.0)]);
        let sol = lp.solve()?;
        match sol.status {
            LpStatus::Optimal => Ok(Emptiness {
                epsilon: sol.value(eps),
                witness: Some(Self::strategy(&sol, &s)?),
            }),
            LpStatus::Infeasible => Ok(Emptiness { epsilon: 0.0, witness: None }),
            LpStatus::Unbounded => Err(Error::Internal("emptiness LP unbounded".into())),
        }
    }

    pub(crate) fn max_min(&self) -> Result<MaxMin> {
        let mut m = self.value_model(true);
        m.lp.set_objective(m.v.iter().map(|&x| (x, 1.0)).collect());
        let sol = m.lp.solve()?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Internal(format!(
                "max-min LP is {:?} for profile {:?} although its region is nonempty",
                sol.status, self.profile
            )));
        }
        Ok(MaxMin {
            value: sol.objective_value().unwrap(),
            strategy: Self::strategy(&sol, &m.s)?,
            zeta: Self::slacks(&sol, &m.zeta),
        })
    }

    /// True when the leader's pessimistic value at `s` falls short of `v`.
    fn shortfall(&self, s: &MixedStrategy, v: f64) -> bool {
        let tol = self.tol.max(ROBUST_TIE_TOL);
        self.star.evaluate(s.probs(), Mode::Pessimistic, tol).value < v - VALUE_TOL
    }

    /// A non-tied action can only hurt the leader if its leader vector is not
    /// dominated by some tied action's.
    fn may_hurt(&self, p: usize, b: usize) -> bool {
        let u = self.star.leader[p];
        !self
            .ties
            .ties(p, self.profile[p])
            .into_iter()
            .any(|t| u.row(b).iter().zip(u.row(t).iter()).all(|(x, y)| x >= y))
    }

    /// Examines the point of the optimal face that keeps the potentially
    /// harmful slacks as large as possible.
    pub(crate) fn attainment(&self, v: f64) -> Result<Attainment> {
        match self.attainment_within(v, FACE_TOL * v.abs().max(1.0)) {
            Err(Error::Internal(_)) => self.attainment_within(v, VALUE_TOL),
            r => r,
        }
    }

    fn attainment_within(&self, v: f64, relax: f64) -> Result<Attainment> {
        let mut m = self.value_model(true);
        m.lp.add_constraint(m.v.iter().map(|&x| (x, 1.0)).collect(), Relation::Ge, v - relax);
        let tau = m.lp.add_var("tau", 0.0, Some(1.0));
        for &(p, b, z) in &m.zeta {
            if self.may_hurt(p, b) {
                m.lp.add_constraint(vec![(tau, 1.0), (z, -1.0)], Relation::Le, 0.0);
            }
        }
        m.lp.set_objective(vec![(tau, 1.0)]);
        let sol = m.lp.solve()?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::Internal(format!(
                "attainment LP is {:?} for profile {:?}",
                sol.status, self.profile
            )));
        }
        let strategy = Self::strategy(&sol, &m.s)?;
        let zeta = Self::slacks(&sol, &m.zeta);
        Ok(Attainment {
            beta: self.shortfall(&strategy, v),
            raw_beta: zeta.iter().any(|z| z.value <= ZETA_TOL),
            strategy,
            zeta,
            lp_solves: 1,
        })
    }

    /// Attainment starting from a max-min solution; the extra LP is only
    /// needed when that solution itself falls short.
    pub(crate) fn attainment_from(&self, mm: &MaxMin) -> Result<Attainment> {
        let raw_beta = mm.zeta.iter().any(|z| z.value <= ZETA_TOL);
        if !self.shortfall(&mm.strategy, mm.value) {
            return Ok(Attainment {
                beta: false,
                raw_beta,
                strategy: mm.strategy.clone(),
                zeta: mm.zeta.clone(),
                lp_solves: 0,
            });
        }
        let mut att = self.attainment(mm.value)?;
        att.raw_beta = raw_beta;
        Ok(att)
    }

    pub(crate) fn find_apx(&self, v_star: f64, alpha: f64) -> Result<Approximation> {
        if !(alpha > 0.0) {
            return Err(Error::ApproximationFailure(format!("alpha must be positive, got {alpha}")));
        }
        let mut m = self.value_model(false);
        m.lp.add_constraint(m.v.iter().map(|&x| (x, 1.0)).collect(), Relation::Ge, v_star - alpha);
        let eps = m.lp.add_var("eps", 0.0, Some(1.0));
        for (p, b) in self.non_tied() {
            let mut terms = self.margin(p, b, &m.s);
            terms.push((eps, -1.0));
            m.lp.add_constraint(terms, Relation::Ge, 0.0);
        }
        m.lp.set_objective(vec![(eps, 1.0)]);
        let sol = m.lp.solve()?;
        if sol.status != LpStatus::Optimal {
            return Err(Error::ApproximationFailure(format!(
                "LP is {:?} for profile {:?}, target {v_star}, alpha {alpha}",
                sol.status, self.profile
            )));
        }
        let epsilon = sol.value(eps);
        if epsilon <= EPSILON_TOL {
            return Err(Error::ApproximationFailure(format!(
                "best margin {epsilon} for profile {:?} is not strictly positive; try a larger alpha",
                self.profile
            )));
        }
        Ok(Approximation {
            strategy: Self::strategy(&sol, &m.s)?,
            epsilon,
        })
    }

    pub(crate) fn analyze(&self) -> Result<ProfileResult> {
        let e = self.emptiness()?;
        let max_min = if e.epsilon > EPSILON_TOL { Some(self.max_min()?) } else { None };
        Ok(ProfileResult {
            profile: ActionProfile(self.profile.to_vec()),
            epsilon: e.epsilon,
            lp_solves: 1 + max_min.is_some() as u64,
            max_min,
        })
    }
}

fn prepare<'g>(game: &'g PolymatrixGame, a: &ActionProfile) -> Result<StarView<'g>> {
    let star = game.star_view()?;
    game.check_profile(a)?;
    Ok(star)
}

/// Largest margin by which `a` can be a strict best-response profile.
pub fn emptiness_check(game: &PolymatrixGame, a: &ActionProfile, ties: &TieSets) -> Result<Emptiness> {
    let g = prepare(game, a)?;
    ProfileLps::new(&g, ties, &a.0, crate::DEFAULT_TOL).emptiness()
}

/// Supremum of the leader's pessimistic value over the region of `a`.
pub fn solve_max_min(game: &PolymatrixGame, a: &ActionProfile, ties: &TieSets) -> Result<MaxMin> {
    let g = prepare(game, a)?;
    ProfileLps::new(&g, ties, &a.0, crate::DEFAULT_TOL).max_min()
}

/// Decides whether the supremum `v` of profile `a` is attained.
pub fn attainment_flag(game: &PolymatrixGame, a: &ActionProfile, ties: &TieSets, v: f64) -> Result<Attainment> {
    let g = prepare(game, a)?;
    ProfileLps::new(&g, ties, &a.0, crate::DEFAULT_TOL).attainment(v)
}

/// Interior strategy of the region of `a` with value at least `v_star - alpha`.
pub fn find_apx(
    game: &PolymatrixGame,
    a: &ActionProfile,
    ties: &TieSets,
    v_star: f64,
    alpha: f64,
) -> Result<Approximation> {
    let g = prepare(game, a)?;
    ProfileLps::new(&g, ties, &a.0, crate::DEFAULT_TOL).find_apx(v_star, alpha)
}

pub fn analyze_profile(game: &PolymatrixGame, a: &ActionProfile, ties: &TieSets) -> Result<ProfileResult> {
    let g = prepare(game, a)?;
    ProfileLps::new(&g, ties, &a.0, crate::DEFAULT_TOL).analyze()
}

/// Exact pessimistic leader-follower equilibrium of a one-level tree.
pub fn solve_plfe(game: &PolymatrixGame, opts: &SolveOptions) -> Result<LfeResult> {
    if !(opts.alpha > 0.0 && opts.alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {}", opts.alpha)));
    }
    let star = game.star_view()?;
    let ties = TieSets::from_star(&star);
    let radix: Vec<usize> = star.follower.iter().map(|u| u.nrows()).collect();

    let mut stats = SolveStats::default();
    let mut best = f64::NEG_INFINITY;
    let mut candidates: Vec<(Vec<usize>, MaxMin)> = Vec::new();
    let mut failure: Option<Error> = None;
    let outcome = scan(
        radix,
        opts.profile_limit,
        opts.deadline(),
        opts.worker_threads(),
        |a| ProfileLps::new(&star, &ties, a, opts.tol).analyze(),
        |a, r| match r {
            Err(e) => {
                failure.get_or_insert(e);
            }
            Ok(r) => {
                stats.lp_solves += r.lp_solves;
                if let Some(mm) = r.max_min {
                    stats.profiles_surviving += 1;
                    if mm.value > best + VALUE_TOL {
                        candidates.clear();
                    }
                    if mm.value >= best - VALUE_TOL {
                        best = best.max(mm.value);
                        candidates.push((a.to_vec(), mm));
                    }
                }
            }
        },
    );
    stats.profiles_enumerated = outcome.processed;
    if let Some(e) = failure {
        return Err(e);
    }
    candidates.retain(|(_, mm)| mm.value >= best - VALUE_TOL);
    if candidates.is_empty() {
        return Err(if !outcome.complete {
            Error::NoProfileProcessed
        } else {
            Error::Internal("no profile region has nonempty interior".into())
        });
    }

    let result = |profile: &[usize], value, strategy, attained, raw_beta, stats| LfeResult {
        mode: Mode::Pessimistic,
        value,
        strategy,
        profile: ActionProfile(profile.to_vec()),
        attained,
        alpha: opts.alpha,
        anytime_complete: outcome.complete,
        raw_beta: Some(raw_beta),
        stats,
    };
    let mut first_raw = None;
    for (a, mm) in &candidates {
        let lps = ProfileLps::new(&star, &ties, a, opts.tol);
        let att = lps.attainment_from(mm)?;
        stats.lp_solves += att.lp_solves;
        first_raw.get_or_insert(att.raw_beta);
        if !att.beta {
            return Ok(result(a, mm.value, att.strategy, true, att.raw_beta, stats));
        }
    }
    let (a, mm) = &candidates[0];
    let apx = ProfileLps::new(&star, &ties, a, opts.tol).find_apx(mm.value, opts.alpha)?;
    stats.lp_solves += 1;
    Ok(result(a, mm.value, apx.strategy, false, first_raw.unwrap(), stats))
}
