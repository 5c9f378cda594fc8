//! The polynomial approximation plays the best commitment against a single
//! follower and loses at most a factor n - 1 against the exact value.

use polystack::gen::{random_oltpg, TreeKind};
use polystack::solve::apx::solve_plfe_apx;
use polystack::solve::plfe::solve_plfe;
use polystack::SolveOptions;

fn main() -> polystack::Result<()> {
    let opts = SolveOptions::default();
    println!("{:>2} {:>4} {:>12} {:>12} {:>8} {:>6}", "n", "seed", "exact", "approx", "ratio", "lps");
    for n in 3..=5 {
        for seed in 0..3 {
            let game = random_oltpg(n, 4, seed, 0.0, 100.0, TreeKind::Oltpg)?;
            let exact = solve_plfe(&game, &opts)?;
            let apx = solve_plfe_apx(&game, &opts, true)?;
            println!(
                "{n:>2} {seed:>4} {:>12.4} {:>12.4} {:>8.4} {:>6}",
                exact.value,
                apx.result.value,
                apx.result.value / exact.value,
                apx.result.stats.lp_solves
            );
        }
    }
    Ok(())
}
