//! Maximum clique as a star game: the pessimistic leader value equals the
//! clique number of the graph.

use polystack::gen::{clique_to_spg, Graph};
use polystack::oracles::max_clique_bruteforce;
use polystack::solve::plfe::solve_plfe;
use polystack::SolveOptions;

fn main() -> polystack::Result<()> {
    let path = Graph::path(3);
    let value = solve_plfe(&clique_to_spg(&path)?, &SolveOptions::default())?.value;
    println!("path on 3 vertices: leader value {value}, clique number {}", max_clique_bruteforce(&path)?);

    for seed in 0..5 {
        let g = Graph::random(8, 0.5, seed);
        if g.is_complete() {
            continue;
        }
        let r = solve_plfe(&clique_to_spg(&g)?, &SolveOptions::default())?;
        let joined: Vec<usize> = r.profile.0.iter().enumerate().filter(|(_, &a)| a == 1).map(|(v, _)| v).collect();
        println!(
            "G(8, 0.5) seed {seed}: {} edges, leader value {:.6}, clique number {}, joiners {joined:?}",
            g.edges.len(),
            r.value,
            max_clique_bruteforce(&g)?
        );
    }
    Ok(())
}
