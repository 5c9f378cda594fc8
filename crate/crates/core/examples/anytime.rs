//! With a time or profile budget the solver stops early and reports the best
//! profile seen so far.

use std::time::Duration;

use polystack::gen::{random_oltpg, TreeKind};
use polystack::solve::plfe::solve_plfe;
use polystack::SolveOptions;

fn main() -> polystack::Result<()> {
    let game = random_oltpg(6, 6, 3, 0.0, 100.0, TreeKind::Oltpg)?;
    println!("{} follower profiles", game.num_profiles().unwrap_or(u64::MAX));
    for limit in [10, 100, 1000, 10_000] {
        match solve_plfe(&game, &SolveOptions::default().with_profile_limit(limit)) {
            Ok(r) => println!(
                "after {:>6} profiles: value {:.4} (complete: {})",
                r.stats.profiles_enumerated, r.value, r.anytime_complete
            ),
            Err(polystack::Error::NoProfileProcessed) => println!("after {limit:>6} profiles: no feasible region yet"),
            Err(e) => return Err(e),
        }
    }
    let r = solve_plfe(&game, &SolveOptions::default().with_time_limit(Duration::from_millis(50)).with_threads(0))?;
    println!(
        "50 ms on all cores: {} profiles, value {:.4} (complete: {})",
        r.stats.profiles_enumerated, r.value, r.anytime_complete
    );
    Ok(())
}
