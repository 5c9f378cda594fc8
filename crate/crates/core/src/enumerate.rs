//! Ordered enumeration of follower action profiles.

use std::time::Instant;

use rayon::prelude::*;

/// Mixed-radix counter over profiles, first follower most significant, so the
/// order is lexicographic.
pub(crate) struct Profiles {
    radix: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl Profiles {
    pub(crate) fn new(radix: Vec<usize>) -> Self {
        let next = if radix.iter().all(|&m| m > 0) {
            Some(vec![0; radix.len()])
        } else {
            None
        };
        Profiles { radix, next }
    }
}

impl Iterator for Profiles {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for i in (0..succ.len()).rev() {
            succ[i] += 1;
            if succ[i] < self.radix[i] {
                self.next = Some(succ);
                return Some(current);
            }
            succ[i] = 0;
        }
        Some(current)
    }
}

const CHUNK: usize = 1024;

pub(crate) struct ScanOutcome {
    /// Profiles whose results were delivered, always a prefix of the order.
    pub processed: u64,
    /// Whether every profile was delivered.
    pub complete: bool,
}

/// Evaluates `work` on each profile, optionally in parallel, and feeds the
/// results to `sink` strictly in enumeration order. Stops at `limit` profiles
/// or when the deadline passes.
pub(crate) fn scan<T, W, S>(
    radix: Vec<usize>,
    limit: Option<u64>,
    deadline: Option<Instant>,
    threads: usize,
    work: W,
    mut sink: S,
) -> ScanOutcome
where
    T: Send,
    W: Fn(&[usize]) -> T + Sync,
    S: FnMut(&[usize], T),
{
    let pool = if threads > 1 {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().ok()
    } else {
        None
    };
    let expired = || deadline.is_some_and(|d| Instant::now() >= d);
    let run = |p: &Vec<usize>| if expired() { None } else { Some(work(p)) };

    let mut profiles = Profiles::new(radix);
    let mut processed = 0u64;
    loop {
        let want = limit.map_or(CHUNK, |l| CHUNK.min((l - processed) as usize));
        if want == 0 {
            let complete = profiles.next().is_none();
            return ScanOutcome { processed, complete };
        }
        let chunk: Vec<Vec<usize>> = profiles.by_ref().take(want).collect();
        if chunk.is_empty() {
            return ScanOutcome { processed, complete: true };
        }
        let results: Vec<Option<T>> = match &pool {
            Some(pool) => pool.install(|| chunk.par_iter().map(run).collect()),
            None => {
                let mut out = Vec::with_capacity(chunk.len());
                for p in &chunk {
                    let r = run(p);
                    let stop = r.is_none();
                    out.push(r);
                    if stop {
                        break;
                    }
                }
                out
            }
        };
        for (p, r) in chunk.iter().zip(results) {
            match r {
                Some(r) => {
                    sink(p, r);
                    processed += 1;
                }
                None => return ScanOutcome { processed, complete: false },
            }
        }
    }
}
