//! The pessimistic value can be a supremum that no strategy reaches. Here the
//! follower switches to the action the leader dislikes exactly at the point
//! the leader would like to commit to, so only nearby strategies are on offer.

use ndarray::array;
use polystack::oracles::supremum_1d;
use polystack::solve::plfe::solve_plfe;
use polystack::{Mode, PolymatrixGame, SolveOptions};

fn main() -> polystack::Result<()> {
    let game = PolymatrixGame::star(
        vec!["x".into(), "y".into()],
        vec![(
            vec!["a".into(), "b".into()],
            array![[1.0, 0.0], [0.0, 1.0]],
            array![[0.0, 1.0], [0.0, 0.0]],
        )],
    )?;
    for alpha in [0.25, 0.01, 1e-6] {
        let r = solve_plfe(&game, &SolveOptions::default().with_alpha(alpha))?;
        let got = game.evaluate_commitment(&r.strategy, Mode::Pessimistic, polystack::DEFAULT_TOL)?;
        println!(
            "alpha {alpha:>8}: supremum {} attained {} strategy {:?} achieves {:.7}",
            r.value,
            r.attained,
            r.strategy.probs(),
            got.value
        );
    }
    let exact = supremum_1d(&game)?;
    println!("breakpoint oracle: supremum {} attained {} at t = {}", exact.value, exact.attained, exact.t);
    Ok(())
}
