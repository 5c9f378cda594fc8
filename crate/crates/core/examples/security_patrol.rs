//! A defender splits patrol time across three sites; two attackers each pick
//! a site to hit. Each attacker only cares about the defender, so the game is
//! a star with the defender in the middle.

use ndarray::Array2;
use polystack::solve::olfe::solve_olfe;
use polystack::solve::plfe::solve_plfe;
use polystack::{Mode, PolymatrixGame, SolveOptions};

fn main() -> polystack::Result<()> {
    let sites = || vec!["north".to_string(), "harbor".to_string(), "depot".to_string()];
    // What each site is worth to an attacker, and what its loss costs us.
    let attacker_gain = [[3.0, 6.0, 4.0], [5.0, 2.0, 4.0]];
    let our_loss = [[4.0, 8.0, 3.0], [2.0, 6.0, 5.0]];
    let leaves = (0..2)
        .map(|k| {
            // Rows: the attacker's target. Columns: where we patrol.
            let attacker = Array2::from_shape_fn((3, 3), |(t, s)| if t == s { -1.0 } else { attacker_gain[k][t] });
            let defender = Array2::from_shape_fn((3, 3), |(t, s)| if t == s { 9.0 } else { 8.0 - our_loss[k][t] });
            (sites(), attacker, defender)
        })
        .collect();
    let game = PolymatrixGame::star(sites(), leaves)?;

    let opts = SolveOptions::default();
    let worst_case = solve_plfe(&game, &opts)?;
    let best_case = solve_olfe(&game, &opts)?;
    println!("patrol plan (attackers break ties against us): {:?}", worst_case.strategy.probs());
    println!("  guaranteed value {:.4}, attained: {}", worst_case.value, worst_case.attained);
    println!("patrol plan (ties in our favour): {:?}", best_case.strategy.probs());
    println!("  value {:.4}", best_case.value);

    let check = game.evaluate_commitment(&worst_case.strategy, Mode::Pessimistic, polystack::DEFAULT_TOL)?;
    let targets: Vec<&str> = game.followers().map(|p| game.action_labels(p)[check.profile.0[p]].as_str()).collect();
    println!("under that plan the attackers go for {targets:?} and the defender gets {:.4}", check.value);
    Ok(())
}
