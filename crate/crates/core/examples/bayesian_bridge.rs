//! A Bayesian leader-follower game with two attacker types becomes a star
//! polymatrix game with one leaf per type, and back again.

use ndarray::array;
use polystack::bayes::{bg_to_polymatrix, polymatrix_to_bg, BayesKind, BayesianGame, BayesianType};
use polystack::solve::plfe::solve_plfe;
use polystack::SolveOptions;

fn main() -> polystack::Result<()> {
    let labels = |p: &str| vec![format!("{p}1"), format!("{p}2")];
    let bg = BayesianGame::new(
        labels("guard"),
        labels("target"),
        BayesKind::Interdependent,
        vec![
            BayesianType {
                name: "professional".into(),
                prob: 0.75,
                follower_payoff: array![[0.0, 5.0], [3.0, 0.0]],
                leader_payoff: array![[4.0, 0.0], [0.0, 3.0]],
            },
            BayesianType {
                name: "amateur".into(),
                prob: 0.25,
                follower_payoff: array![[1.0, 2.0], [2.0, 1.0]],
                leader_payoff: array![[2.0, 1.0], [1.0, 2.0]],
            },
        ],
    )?;
    let conv = bg_to_polymatrix(&bg)?;
    println!("polymatrix game: {} players, class {}", conv.game.num_players(), conv.game.classify());
    let r = solve_plfe(&conv.game, &SolveOptions::default())?;
    println!("pessimistic commitment {:?} worth {:.4}", r.strategy.probs(), r.value);

    let back = polymatrix_to_bg(&conv.game)?;
    for w in &back.warnings {
        println!("warning: {w}");
    }
    let probs: Vec<f64> = back.bg.types().iter().map(|t| t.prob).collect();
    println!("mapped back: {:?} types with probabilities {probs:?}", back.bg.kind());
    let again = bg_to_polymatrix(&back.bg)?.game;
    println!("round trip reproduces the payoffs: {}", again.edges() == conv.game.edges());
    Ok(())
}
