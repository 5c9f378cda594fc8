//! Cross-checking the exact solver against the brute-force oracles.

use polystack::gen::{random_oltpg, TreeKind};
use polystack::oracles::{grid_oracle, supremum_1d};
use polystack::solve::plfe::solve_plfe;
use polystack::{Mode, SolveOptions};

fn main() -> polystack::Result<()> {
    let game = random_oltpg(3, 3, 11, 0.0, 100.0, TreeKind::Oltpg)?;
    let exact = solve_plfe(&game, &SolveOptions::default())?;
    println!("exact pessimistic value {:.6} (attained: {})", exact.value, exact.attained);
    for k in [2, 4, 8, 16, 32] {
        let g = grid_oracle(&game, k, Mode::Pessimistic, 0)?;
        println!("  grid k = {k:>2}: {:.6} over {} points", g.value, g.points);
    }

    let mut agree = 0;
    for seed in 0..20 {
        let g = random_oltpg(2, 2, seed, 0.0, 100.0, TreeKind::Oltpg)?;
        let e = solve_plfe(&g, &SolveOptions::default())?;
        let o = supremum_1d(&g)?;
        agree += ((e.value - o.value).abs() <= 1e-6 && e.attained == o.attained) as usize;
    }
    println!("two leader actions: solver and breakpoint oracle agree on {agree}/20 games");
    Ok(())
}
