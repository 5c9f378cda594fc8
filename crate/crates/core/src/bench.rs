//! Runtime scaling of the exact pessimistic solver on random one-level trees.

use std::io::Write;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gen::{random_oltpg, TreeKind};
use crate::solve::{plfe::solve_plfe, SolveOptions};

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub players: Vec<usize>,
    pub actions: Vec<usize>,
    pub seeds: u64,
    pub time_limit: Duration,
    pub threads: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            players: (3..=6).collect(),
            actions: (2..=12).collect(),
            seeds: 20,
            time_limit: Duration::from_secs(60),
            threads: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub n: usize,
    pub m: usize,
    pub mean_seconds: f64,
    pub std_seconds: f64,
    pub timeouts: u64,
    /// Smallest count over the instances; `m^(n-1)` unless one timed out.
    pub profiles_enumerated: u64,
}

/// Parses `3..6` (inclusive), `2,4,6` or a single number.
pub fn parse_range(text: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidArgument(format!("bad range {text:?}; use 3..6 or 2,4,6"));
    let num = |s: &str| s.trim().parse::<usize>().map_err(|_| bad());
    let values: Vec<usize> = match text.split_once("..") {
        Some((lo, hi)) => (num(lo)?..=num(hi)?).collect(),
        None => text.split(',').map(num).collect::<Result<_>>()?,
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

/// Solves `seeds` games for every `(n, m)` pair; instance `i` uses seed `i`.
pub fn run_bench(config: &BenchConfig, mut progress: impl FnMut(&BenchRow)) -> Result<Vec<BenchRow>> {
    let opts = SolveOptions::default().with_time_limit(config.time_limit).with_threads(config.threads);
    let mut rows = Vec::new();
    for &n in &config.players {
        for &m in &config.actions {
            let mut times = Vec::with_capacity(config.seeds as usize);
            let mut timeouts = 0;
            let mut profiles = u64::MAX;
            for seed in 0..config.seeds {
                let game = random_oltpg(n, m, seed, 0.0, 100.0, TreeKind::Oltpg)?;
                let start = Instant::now();
                let outcome = solve_plfe(&game, &opts);
                times.push(start.elapsed().as_secs_f64());
                match outcome {
                    Ok(r) => {
                        timeouts += u64::from(!r.anytime_complete);
                        profiles = profiles.min(r.stats.profiles_enumerated);
                    }
                    Err(Error::NoProfileProcessed) => {
                        timeouts += 1;
                        profiles = 0;
                    }
                    Err(e) => return Err(e),
                }
            }
            let k = times.len().max(1) as f64;
            let mean = times.iter().sum::<f64>() / k;
            let var = times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / k;
            let row = BenchRow {
                n,
                m,
                mean_seconds: mean,
                std_seconds: var.sqrt(),
                timeouts,
                profiles_enumerated: if profiles == u64::MAX { 0 } else { profiles },
            };
            progress(&row);
            rows.push(row);
        }
    }
    Ok(rows)
}

pub fn write_csv(rows: &[BenchRow], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| Error::Io(e.into()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..6").unwrap(), vec![3, 4, 5, 6]);
        assert_eq!(parse_range("2,4, 6").unwrap(), vec![2, 4, 6]);
        assert_eq!(parse_range("5").unwrap(), vec![5]);
        assert!(parse_range("6..3").is_err());
        assert!(parse_range("a").is_err());
    }

    #[test]
    fn small_bench_counts_profiles() {
        let config = BenchConfig { players: vec![3], actions: vec![4], seeds: 2, ..Default::default() };
        let rows = run_bench(&config, |_| {}).unwrap();
        assert_eq!(rows[0].profiles_enumerated, 16);
        assert_eq!(rows[0].timeouts, 0);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("n,m,mean_seconds,std_seconds,timeouts,profiles_enumerated\n3,4,"));
    }
}
