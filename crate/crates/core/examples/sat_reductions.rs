//! The two 3-SAT constructions: one separates satisfiable from unsatisfiable
//! formulas through the optimistic value, the other through the pessimistic
//! value (estimated here on a simplex grid).

use polystack::gen::{sat_to_pg_olfe, sat_to_pg_plfe, CnfFormula};
use polystack::oracles::grid_oracle;
use polystack::solve::olfe::solve_olfe;
use polystack::{Mode, SolveOptions};

fn main() -> polystack::Result<()> {
    let sat = CnfFormula::parse_dimacs("p cnf 3 3\n1 2 3 0\n-1 2 -3 0\n1 -2 3 0\n")?;
    let unsat = CnfFormula::parse_dimacs("p cnf 1 3\n1 1 1 0\n-1 -1 -1 0\n1 1 1 0\n")?;
    for (name, f) in [("satisfiable", &sat), ("unsatisfiable", &unsat)] {
        let game = sat_to_pg_olfe(f, 0.01)?;
        let r = solve_olfe(&game, &SolveOptions::default())?;
        println!(
            "optimistic construction, {name}: value {:.4} with strategy {:?}, profile {}",
            r.value,
            r.strategy.probs(),
            r.profile
        );
    }
    println!("  (weak equilibrium inequalities let the unsatisfiable case tie at the 1/(r+1) boundary)");

    let one_clause = CnfFormula::new(3, vec![[1, 2, 3]])?;
    let contradiction = CnfFormula::new(3, vec![[1, 1, 1], [-1, -1, -1]])?;
    for (name, f) in [("satisfiable", &one_clause), ("unsatisfiable", &contradiction)] {
        let game = sat_to_pg_plfe(f, 0.01)?;
        let g = grid_oracle(&game, 13, Mode::Pessimistic, 0)?;
        println!(
            "pessimistic construction, {name}: grid estimate {:.4} over {} points ({} without equilibria)",
            g.value, g.points, g.skipped
        );
    }
    Ok(())
}
