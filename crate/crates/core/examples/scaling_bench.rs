//! Runtime of the exact solver as players and actions grow, written as CSV.

use std::time::Duration;

use polystack::bench::{run_bench, write_csv, BenchConfig};

fn main() -> polystack::Result<()> {
    let config = BenchConfig {
        players: vec![3, 4, 5],
        actions: vec![2, 4, 6],
        seeds: 5,
        time_limit: Duration::from_secs(10),
        threads: 1,
    };
    let rows = run_bench(&config, |row| eprintln!("n={} m={} done", row.n, row.m))?;
    write_csv(&rows, std::io::stdout().lock())
}
