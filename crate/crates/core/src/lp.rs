//! A small dense linear-programming solver.
//!
//! Problems are always maximized. The solver is a two-phase tableau simplex
//! with deterministic pivoting: Dantzig pricing with lowest-index ties, and a
//! switch to Bland's rule after a run of degenerate pivots. The same input
//! always produces the same vertex, which the equilibrium code relies on.

use std::fmt;

use thiserror::Error;

/// Feasibility tolerance applied when re-checking a returned assignment.
pub const FEASIBILITY_TOL: f64 = 1e-7;

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-9;
const DEGENERATE_STREAK: usize = 50;

/// Handle to a declared variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct VarDef {
    pub name: String,
    /// May be `f64::NEG_INFINITY` for a variable unbounded below.
    pub lower: f64,
    pub upper: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub terms: Vec<(Var, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpStatus::Optimal => write!(f, "optimal"),
            LpStatus::Infeasible => write!(f, "infeasible"),
            LpStatus::Unbounded => write!(f, "unbounded"),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("malformed linear program: {0}")]
    Malformed(String),
    #[error("simplex numerical failure: {0}")]
    NumericalFailure(String),
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    assignment: Vec<f64>,
    objective_value: Option<f64>,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        LpSolution {
            status,
            assignment: Vec::new(),
            objective_value: None,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    /// Value of `var` in the optimal assignment.
    ///
    /// Panics when the solution is not optimal.
    pub fn value(&self, var: Var) -> f64 {
        assert!(self.is_optimal(), "no assignment for a {} program", self.status);
        self.assignment[var.0]
    }

    pub fn assignment(&self) -> Option<&[f64]> {
        self.is_optimal().then_some(self.assignment.as_slice())
    }

    pub fn objective_value(&self) -> Option<f64> {
        self.objective_value
    }
}

/// A linear program `max c·x` subject to linear constraints and variable bounds.
#[derive(Clone, Debug, Default)]
pub struct LinearProgram {
    vars: Vec<VarDef>,
    objective: Vec<(Var, f64)>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, lower: f64, upper: Option<f64>) -> Var {
        self.vars.push(VarDef {
            name: name.into(),
            lower,
            upper,
        });
        Var(self.vars.len() - 1)
    }

    /// Shorthand for a variable with bounds `[0, +inf)`.
    pub fn add_nonneg(&mut self, name: impl Into<String>) -> Var {
        self.add_var(name, 0.0, None)
    }

    /// Shorthand for a variable with no bounds.
    pub fn add_free(&mut self, name: impl Into<String>) -> Var {
        self.add_var(name, f64::NEG_INFINITY, None)
    }

    pub fn set_objective(&mut self, terms: Vec<(Var, f64)>) {
        self.objective = terms;
    }

    pub fn add_constraint(&mut self, terms: Vec<(Var, f64)>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            terms,
            relation,
            rhs,
        });
    }

    pub fn vars(&self) -> &[VarDef] {
        &self.vars
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Evaluates the objective expression at `x`.
    pub fn objective_at(&self, x: &[f64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * x[v.0]).sum()
    }

    /// Largest violation of any constraint or bound at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for c in &self.constraints {
            let lhs: f64 = c.terms.iter().map(|&(v, a)| a * x[v.0]).sum();
            let viol = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Ge => c.rhs - lhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        for (d, &xi) in self.vars.iter().zip(x) {
            worst = worst.max(d.lower - xi);
            if let Some(u) = d.upper {
                worst = worst.max(xi - u);
            }
        }
        worst
    }

    fn check(&self) -> Result<(), LpError> {
        let n = self.vars.len();
        for d in &self.vars {
            if d.lower.is_nan() || d.lower == f64::INFINITY {
                return Err(LpError::Malformed(format!("bad lower bound on `{}`", d.name)));
            }
            if let Some(u) = d.upper {
                if !u.is_finite() {
                    return Err(LpError::Malformed(format!("bad upper bound on `{}`", d.name)));
                }
            }
        }
        let terms = self
            .objective
            .iter()
            .chain(self.constraints.iter().flat_map(|c| c.terms.iter()));
        for &(v, a) in terms {
            if v.0 >= n {
                return Err(LpError::Malformed(format!("undeclared variable #{}", v.0)));
            }
            if !a.is_finite() {
                return Err(LpError::Malformed("non-finite coefficient".into()));
            }
        }
        if self.constraints.iter().any(|c| !c.rhs.is_finite()) {
            return Err(LpError::Malformed("non-finite right-hand side".into()));
        }
        Ok(())
    }

    /// Solves the program. The returned vertex is a deterministic function of
    /// the program as built.
    pub fn solve(&self) -> Result<LpSolution, LpError> {
        self.check()?;
        for d in &self.vars {
            if let Some(u) = d.upper {
                if u < d.lower {
                    return Ok(LpSolution::without_point(LpStatus::Infeasible));
                }
            }
        }
        let std = StandardForm::build(self);
        let mut tab = Tableau::new(&std);
        match tab.run()? {
            Outcome::Infeasible => return Ok(LpSolution::without_point(LpStatus::Infeasible)),
            Outcome::Unbounded => return Ok(LpSolution::without_point(LpStatus::Unbounded)),
            Outcome::Optimal => {}
        }
        let y = tab.primal(std.num_cols);
        let x = std.recover(&y);
        let viol = self.max_violation(&x);
        if !(viol <= FEASIBILITY_TOL) {
            return Err(LpError::NumericalFailure(format!(
                "returned point violates constraints by {viol:e}"
            )));
        }
        Ok(LpSolution {
            status: LpStatus::Optimal,
            objective_value: Some(self.objective_at(&x)),
            assignment: x,
        })
    }
}

/// How an original variable is expressed through nonnegative columns:
/// `x = offset + Σ sign·y[col]`.
struct VarMap {
    offset: f64,
    cols: Vec<(usize, f64)>,
}

struct StdRow {
    coeffs: Vec<(usize, f64)>,
    relation: Relation,
    rhs: f64,
}

struct StandardForm {
    num_cols: usize,
    maps: Vec<VarMap>,
    rows: Vec<StdRow>,
    cost: Vec<f64>,
}

impl StandardForm {
    fn build(lp: &LinearProgram) -> Self {
        let mut maps = Vec::with_capacity(lp.vars.len());
        let mut rows = Vec::new();
        let mut num_cols = 0;
        for d in &lp.vars {
            if d.lower.is_finite() {
                let col = num_cols;
                num_cols += 1;
                if let Some(u) = d.upper {
                    rows.push(StdRow {
                        coeffs: vec![(col, 1.0)],
                        relation: Relation::Le,
                        rhs: u - d.lower,
                    });
                }
                maps.push(VarMap {
                    offset: d.lower,
                    cols: vec![(col, 1.0)],
                });
            } else if let Some(u) = d.upper {
                maps.push(VarMap {
                    offset: u,
                    cols: vec![(num_cols, -1.0)],
                });
                num_cols += 1;
            } else {
                maps.push(VarMap {
                    offset: 0.0,
                    cols: vec![(num_cols, 1.0), (num_cols + 1, -1.0)],
                });
                num_cols += 2;
            }
        }
        for c in &lp.constraints {
            let mut dense = vec![0.0; num_cols];
            let mut rhs = c.rhs;
            for &(v, a) in &c.terms {
                let m = &maps[v.0];
                rhs -= a * m.offset;
                for &(col, sign) in &m.cols {
                    dense[col] += a * sign;
                }
            }
            let coeffs = dense
                .into_iter()
                .enumerate()
                .filter(|&(_, a)| a != 0.0)
                .collect();
            rows.push(StdRow {
                coeffs,
                relation: c.relation,
                rhs,
            });
        }
        let mut cost = vec![0.0; num_cols];
        for &(v, a) in &lp.objective {
            for &(col, sign) in &maps[v.0].cols {
                cost[col] += a * sign;
            }
        }
        StandardForm {
            num_cols,
            maps,
            rows,
            cost,
        }
    }

    fn recover(&self, y: &[f64]) -> Vec<f64> {
        self.maps
            .iter()
            .map(|m| m.offset + m.cols.iter().map(|&(c, s)| s * y[c]).sum::<f64>())
            .collect()
    }
}

enum Outcome {
    Optimal,
    Infeasible,
    Unbounded,
}

struct Tableau {
    /// Row-major, `width = cols + 1`; the last entry of each row is the rhs.
    a: Vec<Vec<f64>>,
    basis: Vec<usize>,
    /// Reduced-cost row; the last entry holds `-z`.
    d: Vec<f64>,
    cols: usize,
    first_artificial: usize,
    cost: Vec<f64>,
    scale: f64,
    iterations: usize,
    max_iterations: usize,
}

impl Tableau {
    fn new(std: &StandardForm) -> Self {
        let m = std.rows.len();
        let n = std.num_cols;
        let mut slack_count = 0;
        let mut art_count = 0;
        // Normalize right-hand sides to be nonnegative first.
        let mut rows: Vec<(Vec<(usize, f64)>, Relation, f64)> = Vec::with_capacity(m);
        for r in &std.rows {
            if r.rhs < 0.0 {
                let rel = match r.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                rows.push((r.coeffs.iter().map(|&(c, a)| (c, -a)).collect(), rel, -r.rhs));
            } else {
                rows.push((r.coeffs.clone(), r.relation, r.rhs));
            }
            match rows.last().unwrap().1 {
                Relation::Le => slack_count += 1,
                Relation::Ge => {
                    slack_count += 1;
                    art_count += 1
                }
                Relation::Eq => art_count += 1,
            }
        }
        let first_artificial = n + slack_count;
        let cols = first_artificial + art_count;
        let mut a = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut next_slack = n;
        let mut next_art = first_artificial;
        let mut scale: f64 = 1.0;
        for (coeffs, rel, rhs) in rows {
            let mut row = vec![0.0; cols + 1];
            for (c, v) in coeffs {
                row[c] = v;
            }
            row[cols] = rhs;
            scale = scale.max(rhs.abs());
            match rel {
                Relation::Le => {
                    row[next_slack] = 1.0;
                    basis.push(next_slack);
                    next_slack += 1;
                }
                Relation::Ge => {
                    row[next_slack] = -1.0;
                    next_slack += 1;
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
                Relation::Eq => {
                    row[next_art] = 1.0;
                    basis.push(next_art);
                    next_art += 1;
                }
            }
            a.push(row);
        }
        let mut cost = vec![0.0; cols];
        cost[..n].copy_from_slice(&std.cost);
        Tableau {
            max_iterations: 10_000 + 50 * (m + cols),
            a,
            basis,
            d: vec![0.0; cols + 1],
            cols,
            first_artificial,
            cost,
            scale,
            iterations: 0,
        }
    }

    fn run(&mut self) -> Result<Outcome, LpError> {
        if self.first_artificial < self.cols {
            // Phase one: maximize minus the sum of artificials.
            let mut phase1 = vec![0.0; self.cols];
            for c in phase1.iter_mut().skip(self.first_artificial) {
                *c = -1.0;
            }
            self.price(&phase1);
            match self.iterate(self.cols)? {
                Outcome::Optimal => {}
                _ => return Err(LpError::NumericalFailure("phase one did not terminate at an optimum".into())),
            }
            let infeasibility = self.d[self.cols];
            if infeasibility > 1e-9 * self.scale {
                return Ok(Outcome::Infeasible);
            }
            self.expel_artificials();
        }
        let cost = self.cost.clone();
        self.price(&cost);
        self.iterate(self.first_artificial)
    }

    /// Recomputes the reduced-cost row for `cost` against the current basis.
    fn price(&mut self, cost: &[f64]) {
        let w = self.cols + 1;
        self.d = vec![0.0; w];
        self.d[..self.cols].copy_from_slice(cost);
        for (row, &b) in self.a.iter().zip(&self.basis) {
            let cb = cost[b];
            if cb != 0.0 {
                for j in 0..w {
                    self.d[j] -= cb * row[j];
                }
            }
        }
    }

    /// Simplex iterations over columns `0..allowed`.
    fn iterate(&mut self, allowed: usize) -> Result<Outcome, LpError> {
        let mut degenerate_run = 0;
        loop {
            self.iterations += 1;
            if self.iterations > self.max_iterations {
                return Err(LpError::NumericalFailure("iteration limit reached".into()));
            }
            let bland = degenerate_run >= DEGENERATE_STREAK;
            let mut enter = None;
            let mut best = COST_TOL;
            for j in 0..allowed {
                let dj = self.d[j];
                if !dj.is_finite() {
                    return Err(LpError::NumericalFailure("non-finite reduced cost".into()));
                }
                if dj > best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = dj;
                }
            }
            let Some(col) = enter else {
                return Ok(Outcome::Optimal);
            };
            let w = self.cols;
            let mut leave: Option<usize> = None;
            let mut best_ratio = f64::INFINITY;
            for (i, row) in self.a.iter().enumerate() {
                let aij = row[col];
                if aij > PIVOT_TOL {
                    let ratio = row[w] / aij;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            let tie = (ratio - best_ratio).abs() <= 1e-12 * (1.0 + best_ratio.abs());
                            if tie {
                                if bland {
                                    self.basis[i] < self.basis[l]
                                } else {
                                    aij > self.a[l][col]
                                        || (aij == self.a[l][col] && self.basis[i] < self.basis[l])
                                }
                            } else {
                                ratio < best_ratio
                            }
                        }
                    };
                    if better {
                        leave = Some(i);
                        best_ratio = ratio;
                    }
                }
            }
            let Some(row) = leave else {
                return Ok(Outcome::Unbounded);
            };
            if self.a[row][w] <= 1e-12 * self.scale {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(row, col);
        }
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.cols + 1;
        let p = self.a[r][c];
        for v in self.a[r].iter_mut() {
            *v /= p;
        }
        self.a[r][c] = 1.0;
        let pivot_row = self.a[r].clone();
        for (i, row) in self.a.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for j in 0..w {
                    row[j] -= f * pivot_row[j];
                }
                row[c] = 0.0;
                if row[w - 1] < 0.0 && row[w - 1] > -1e-11 * self.scale {
                    row[w - 1] = 0.0;
                }
            }
        }
        let f = self.d[c];
        if f != 0.0 {
            for j in 0..w {
                self.d[j] -= f * pivot_row[j];
            }
            self.d[c] = 0.0;
        }
        self.basis[r] = c;
    }

    /// Pivots zero-level artificials out of the basis, dropping rows that
    /// turn out to be redundant.
    fn expel_artificials(&mut self) {
        let mut i = 0;
        while i < self.a.len() {
            if self.basis[i] >= self.first_artificial {
                let col = (0..self.first_artificial)
                    .filter(|&j| self.a[i][j].abs() > PIVOT_TOL)
                    .max_by(|&x, &y| {
                        self.a[i][x]
                            .abs()
                            .partial_cmp(&self.a[i][y].abs())
                            .unwrap()
                            .then(y.cmp(&x))
                    });
                match col {
                    Some(j) => {
                        self.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        self.a.remove(i);
                        self.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
    }

    fn primal(&self, n: usize) -> Vec<f64> {
        let mut y = vec![0.0; n];
        for (row, &b) in self.a.iter().zip(&self.basis) {
            if b < n {
                y[b] = row[self.cols].max(0.0);
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounded_single_variable() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x");
        lp.set_objective(vec![(x, 1.0)]);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, 1.0);
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value(x) - 1.0).abs() < 1e-12);
        assert!((sol.objective_value().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_program() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x");
        lp.set_objective(vec![(x, 1.0)]);
        lp.add_constraint(vec![(x, 1.0)], Relation::Le, -1.0);
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
        assert!(sol.assignment().is_none());
        assert!(sol.objective_value().is_none());
    }

    #[test]
    fn capped_margin_program() {
        // max eps s.t. eps <= s1 - s2, s1 + s2 = 1, s >= 0, 0 <= eps <= 1
        let mut lp = LinearProgram::new();
        let s1 = lp.add_nonneg("s1");
        let s2 = lp.add_nonneg("s2");
        let eps = lp.add_var("eps", 0.0, Some(1.0));
        lp.set_objective(vec![(eps, 1.0)]);
        lp.add_constraint(vec![(s1, 1.0), (s2, -1.0), (eps, -1.0)], Relation::Ge, 0.0);
        lp.add_constraint(vec![(s1, 1.0), (s2, 1.0)], Relation::Eq, 1.0);
        let sol = lp.solve().unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value(eps) - 1.0).abs() < 1e-12);
        assert!((sol.value(s1) - 1.0).abs() < 1e-12);
        assert!(sol.value(s2).abs() < 1e-12);
    }

    #[test]
    fn unbounded_program() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x");
        let y = lp.add_nonneg("y");
        lp.set_objective(vec![(x, 1.0)]);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Le, 2.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn free_and_upper_only_variables() {
        // max v s.t. v <= 3 - w, w >= 1 with v free and w <= 5.
        let mut lp = LinearProgram::new();
        let v = lp.add_free("v");
        let w = lp.add_var("w", f64::NEG_INFINITY, Some(5.0));
        lp.set_objective(vec![(v, 1.0)]);
        lp.add_constraint(vec![(v, 1.0), (w, 1.0)], Relation::Le, 3.0);
        lp.add_constraint(vec![(w, 1.0)], Relation::Ge, 1.0);
        let sol = lp.solve().unwrap();
        assert!((sol.value(v) - 2.0).abs() < 1e-12);
        assert!((sol.value(w) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_objective_optimum() {
        // max -x - y s.t. x + y >= 2, x - y = 0
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x");
        let y = lp.add_nonneg("y");
        lp.set_objective(vec![(x, -1.0), (y, -1.0)]);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Ge, 2.0);
        lp.add_constraint(vec![(x, 1.0), (y, -1.0)], Relation::Eq, 0.0);
        let sol = lp.solve().unwrap();
        assert!((sol.objective_value().unwrap() + 2.0).abs() < 1e-12);
        assert!((sol.value(x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::new();
        let x = lp.add_nonneg("x");
        let y = lp.add_nonneg("y");
        lp.set_objective(vec![(x, 2.0), (y, 1.0)]);
        lp.add_constraint(vec![(x, 1.0), (y, 1.0)], Relation::Eq, 1.0);
        lp.add_constraint(vec![(x, 2.0), (y, 2.0)], Relation::Eq, 2.0);
        let sol = lp.solve().unwrap();
        assert!((sol.objective_value().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn empty_constraint_row() {
        let mut lp = LinearProgram::new();
        let x = lp.add_var("x", 0.0, Some(1.0));
        lp.set_objective(vec![(x, 1.0)]);
        lp.add_constraint(vec![], Relation::Ge, 1.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Infeasible);
        lp.constraints.pop();
        lp.add_constraint(vec![], Relation::Le, 1.0);
        assert_eq!(lp.solve().unwrap().status, LpStatus::Optimal);
    }

    #[test]
    fn rejects_undeclared_variables() {
        let mut lp = LinearProgram::new();
        lp.set_objective(vec![(Var(3), 1.0)]);
        assert!(matches!(lp.solve(), Err(LpError::Malformed(_))));
    }

    #[test]
    fn deterministic_vertex() {
        // Degenerate program with many optimal vertices.
        let build = || {
            let mut lp = LinearProgram::new();
            let xs: Vec<_> = (0..5).map(|i| lp.add_nonneg(format!("x{i}"))).collect();
            lp.set_objective(xs.iter().map(|&x| (x, 1.0)).collect());
            lp.add_constraint(xs.iter().map(|&x| (x, 1.0)).collect(), Relation::Le, 1.0);
            lp
        };
        let a = build().solve().unwrap();
        let b = build().solve().unwrap();
        assert_eq!(a.assignment().unwrap(), b.assignment().unwrap());
    }
}
