//! Followers that also play against each other: the optimistic solver with
//! pure Nash conditions works on any polymatrix graph.

use ndarray::array;
use polystack::game::Edge;
use polystack::solve::olfe::solve_olfe;
use polystack::{PolymatrixGame, SolveOptions};

fn main() -> polystack::Result<()> {
    let two = |a: &str, b: &str| vec![a.to_string(), b.to_string()];
    // Two firms choose a market; they prefer to avoid each other. The
    // regulator (leader) subsidises markets.
    let edges = vec![
        Edge { p: 0, q: 1, payoff_p: array![[-2.0, 1.0], [1.0, -2.0]], payoff_q: array![[-2.0, 1.0], [1.0, -2.0]] },
        Edge { p: 0, q: 2, payoff_p: array![[2.0, 0.0], [0.0, 1.0]], payoff_q: array![[1.0, 1.0], [3.0, 0.0]] },
        Edge { p: 1, q: 2, payoff_p: array![[2.0, 0.0], [0.0, 1.0]], payoff_q: array![[0.0, 2.0], [1.0, 1.0]] },
    ];
    let game = PolymatrixGame::new(vec![two("east", "west"), two("east", "west"), two("fund_east", "fund_west")], edges)?;
    println!("class {}", game.classify());
    let r = solve_olfe(&game, &SolveOptions::default())?;
    let picks: Vec<&str> = game.followers().map(|p| game.action_labels(p)[r.profile.0[p]].as_str()).collect();
    println!("regulator funds {:?}, firms go {picks:?}, regulator gets {:.4}", r.strategy.probs(), r.value);
    let ne = game.enumerate_pure_ne(&r.strategy, 1e-7)?;
    println!("equilibria of the firms at that commitment: {ne:?}");
    Ok(())
}
