//! Acceptance suite. Each test prints one line `[PASS|FAIL] <criterion>: <detail>`
//! and then asserts the criterion.

use std::path::PathBuf;
use std::time::Instant;

use ndarray::Array2;
use polystack::bayes::{bg_to_polymatrix, polymatrix_to_bg, random_bayesian, BayesKind};
use polystack::bench::{run_bench, BenchConfig};
use polystack::game::numbered_labels;
use polystack::gen::{clique_to_spg, random_oltpg, sat_to_pg_olfe, sat_to_pg_plfe, CnfFormula, Graph, TreeKind};
use polystack::oracles::{grid_oracle, max_clique_bruteforce, supremum_1d};
use polystack::solve::apx::solve_plfe_apx;
use polystack::solve::olfe::solve_olfe;
use polystack::solve::plfe::solve_plfe;
use polystack::{MixedStrategy, Mode, PolymatrixGame, SolveOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(criterion: &str, pass: bool, detail: String) {
    println!("[{}] {criterion}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "{criterion} failed: {detail}");
}

fn simplex_point(rng: &mut impl Rng, m: usize) -> MixedStrategy {
    let w: Vec<f64> = (0..m).map(|_| -rng.gen_range(f64::EPSILON..1.0).ln()).collect();
    let total: f64 = w.iter().sum();
    MixedStrategy::from_solver(&w.iter().map(|x| x / total).collect::<Vec<_>>()).unwrap()
}

fn cnf(vars: usize, clauses: &[[i32; 3]]) -> CnfFormula {
    CnfFormula::new(vars, clauses.to_vec()).unwrap()
}

#[test]
fn criterion_1_clique_correspondence() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut rerolls = 0;
    for i in 0..20u64 {
        let g = (0..)
            .map(|attempt| Graph::random(8, 0.5, i * 1000 + attempt))
            .find(|g| !g.is_complete() || {
                rerolls += 1;
                false
            })
            .unwrap();
        let value = solve_plfe(&clique_to_spg(&g).unwrap(), &SolveOptions::default()).unwrap().value;
        let clique = max_clique_bruteforce(&g).unwrap() as f64;
        worst = worst.max((value - clique).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "1 clique correspondence",
        worst <= 1e-6 && secs < 60.0,
        format!("20 graphs, {rerolls} re-rolled, max |value - clique| = {worst:e}, {secs:.2}s"),
    );
}

#[test]
fn criterion_2_sat_olfe_gap() {
    let start = Instant::now();
    let satisfiable = [
        cnf(3, &[[1, 2, 3], [-1, 2, -3], [1, -2, 3]]),
        cnf(3, &[[1, 1, 1], [2, 2, 2], [3, 3, 3]]),
        cnf(3, &[[1, -2, 3], [-1, -2, -3], [2, 3, -1]]),
        cnf(2, &[[1, 2, 2], [-1, 2, 2], [1, -2, -2]]),
        cnf(3, &[[-1, -1, -1], [-2, -2, -2], [-3, -3, -3]]),
    ];
    let unsatisfiable = [
        cnf(1, &[[1, 1, 1], [-1, -1, -1], [1, 1, 1]]),
        cnf(2, &[[1, 1, 1], [-1, -1, -1], [2, 2, 2]]),
        cnf(2, &[[1, 1, 1], [-1, 2, 2], [-2, -2, -1]]),
        cnf(2, &[[1, 2, 2], [-1, -1, -1], [-2, -2, -2]]),
        cnf(2, &[[2, 2, 2], [-2, -2, -2], [1, -1, 1]]),
    ];
    let value = |f: &CnfFormula| solve_olfe(&sat_to_pg_olfe(f, 0.01).unwrap(), &SolveOptions::default()).unwrap().value;
    let mut lines = Vec::new();
    let mut pass = true;
    for (formulas, sat, target) in [(&satisfiable, true, 1.0), (&unsatisfiable, false, 0.01)] {
        for f in formulas.iter() {
            assert_eq!(f.is_satisfiable().unwrap(), sat);
            let v = value(f);
            pass &= (v - target).abs() <= 1e-6;
            lines.push(format!("{}:{v}", if sat { "sat" } else { "unsat" }));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report("2 SAT O-LFE gap", pass && secs < 30.0, format!("values [{}], {secs:.2}s", lines.join(", ")));
}

#[test]
fn criterion_3_sat_plfe_gap() {
    let start = Instant::now();
    // Unsatisfiable formulas need two clauses; three variables keep the
    // leader at four actions.
    let satisfiable = [cnf(3, &[[1, 2, 3]]), cnf(3, &[[1, -2, 3]]), cnf(3, &[[-1, -2, -3]])];
    let unsatisfiable = [cnf(3, &[[1, 1, 1], [-1, -1, -1]]), cnf(3, &[[2, 2, 2], [-2, -2, -2]])];
    let estimate = |f: &CnfFormula| {
        let g = sat_to_pg_plfe(f, 0.01).unwrap();
        grid_oracle(&g, 13, Mode::Pessimistic, 0).unwrap()
    };
    let mut pass = true;
    let mut lines = Vec::new();
    for f in &satisfiable {
        assert!(f.is_satisfiable().unwrap());
        let r = estimate(f);
        pass &= r.value >= 0.99;
        lines.push(format!("sat:{:.4} (skipped {})", r.value, r.skipped));
    }
    for f in &unsatisfiable {
        assert!(!f.is_satisfiable().unwrap());
        let r = estimate(f);
        pass &= r.value <= 0.02;
        lines.push(format!("unsat:{:.4} (skipped {})", r.value, r.skipped));
    }
    let secs = start.elapsed().as_secs_f64();
    report("3 SAT P-LFE gap", pass && secs < 120.0, format!("k=13: {}, {secs:.2}s", lines.join(", ")));
}

#[test]
fn criterion_4_two_action_consistency() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut agree = 0;
    let mut notes = Vec::new();
    for i in 0..100 {
        let mf = rng.gen_range(2..=6);
        let f = Array2::from_shape_fn((mf, 2), |_| rng.gen_range(0.0..100.0));
        let l = Array2::from_shape_fn((mf, 2), |_| rng.gen_range(0.0..100.0));
        let g = PolymatrixGame::star(numbered_labels("x", 2), vec![(numbered_labels("a", mf), f, l)]).unwrap();
        let r = solve_plfe(&g, &SolveOptions::default()).unwrap();
        let o = supremum_1d(&g).unwrap();
        worst = worst.max((r.value - o.value).abs());
        if r.attained == o.attained {
            agree += 1;
        } else {
            notes.push(format!("game {i}: solver attained={} oracle attained={}", r.attained, o.attained));
        }
    }
    for n in &notes {
        println!("    disagreement {n}");
    }
    report(
        "4 two-action consistency",
        worst <= 1e-6 && agree >= 99,
        format!("max |diff| = {worst:e}, attained flags agree on {agree}/100"),
    );
}

#[test]
fn criterion_5_property_suite() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = [0usize; 6];
    let opts = SolveOptions::default().with_alpha(1e-4);
    for i in 0..200u64 {
        let n = rng.gen_range(3..=4);
        let m = rng.gen_range(2..=5);
        let g = random_oltpg(n, m, 5000 + i, 0.0, 100.0, TreeKind::Oltpg).unwrap();
        for _ in 0..50 {
            let s = simplex_point(&mut rng, m);
            let lo = g.evaluate_commitment(&s, Mode::Pessimistic, 1e-9).unwrap().value;
            let hi = g.evaluate_commitment(&s, Mode::Optimistic, 1e-9).unwrap().value;
            failures[0] += (lo > hi) as usize;
        }
        let exact = solve_plfe(&g, &opts).unwrap();
        let grid = grid_oracle(&g, 8, Mode::Pessimistic, 1).unwrap();
        failures[1] += (exact.value < grid.value - 1e-7) as usize;
        let e = g.evaluate_commitment(&exact.strategy, Mode::Pessimistic, 1e-9).unwrap().value;
        if exact.attained {
            failures[2] += ((e - exact.value).abs() > 1e-7) as usize;
        } else {
            failures[3] += (e < exact.value - opts.alpha - 1e-7) as usize;
        }
        let opt = solve_olfe(&g, &opts).unwrap();
        failures[4] += (opt.value < exact.value - 1e-7) as usize;
        let apx = solve_plfe_apx(&g, &opts, true).unwrap();
        failures[5] += (apx.result.value < exact.value / (n - 1) as f64 - opts.alpha - 1e-7) as usize;
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        "5 property suite",
        failures.iter().all(|&f| f == 0) && secs < 600.0,
        format!("violations (a..f) = {failures:?} over 200 games, {secs:.2}s"),
    );
}

#[test]
fn criterion_6_bayesian_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut exact = true;
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let kind = if i % 2 == 0 { BayesKind::Interdependent } else { BayesKind::Independent };
        let types = rng.gen_range(1..=3);
        let (ml, mf) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let bg = random_bayesian(&mut rng, kind, types, ml, mf).unwrap();
        let conv = bg_to_polymatrix(&bg).unwrap();
        let pg = conv.game;
        let back = bg_to_polymatrix(&polymatrix_to_bg(&pg).unwrap().bg).unwrap().game;
        exact &= back.edges() == pg.edges();
        for _ in 0..100 {
            let s = simplex_point(&mut rng, ml);
            let responses: Vec<usize> = (0..types).map(|_| rng.gen_range(0..mf)).collect();
            let by_leaf: Vec<usize> = conv.type_of_leaf.iter().map(|&t| responses[t]).collect();
            let pg_value = pg.leader_value(&s, &polystack::ActionProfile(by_leaf.clone())).unwrap();
            worst = worst.max((bg.leader_expected_utility(s.probs(), &responses) - pg_value).abs());
            for (leaf, &t) in conv.type_of_leaf.iter().enumerate() {
                let u_pg: f64 = pg.follower_payoff_vector(leaf, by_leaf[leaf]).unwrap().iter().zip(s.probs()).map(|(x, p)| x * p).sum();
                let u_bg = bg.follower_expected_utility(t, s.probs(), responses[t]);
                worst = worst.max((u_pg - u_bg).abs());
            }
        }
    }
    report(
        "6 Bayesian round trip",
        exact && worst <= 1e-12,
        format!("payoff identity bit-exact: {exact}, max utility error {worst:e}"),
    );
}

#[test]
fn criterion_7_scaling_shape() {
    let start = Instant::now();
    let config = BenchConfig {
        players: (3..=6).collect(),
        actions: vec![2, 4, 6, 8],
        seeds: 20,
        ..BenchConfig::default()
    };
    let rows = run_bench(&config, |r| println!("    n={} m={} mean={:.6}s", r.n, r.m, r.mean_seconds)).unwrap();
    let mean = |n: usize, m: usize| rows.iter().find(|r| r.n == n && r.m == m).unwrap().mean_seconds;
    let counts_ok = rows.iter().all(|r| r.timeouts == 0 && r.profiles_enumerated == (r.m as u64).pow(r.n as u32 - 1));
    let in_n = [4, 6, 8].iter().all(|&m| (3..6).all(|n| mean(n, m) < mean(n + 1, m)));
    let in_m = (3..=6).all(|n| [2, 4, 6].iter().all(|&m| mean(n, m) < mean(n, m + 2)));
    let secs = start.elapsed().as_secs_f64();
    report(
        "7 scaling shape",
        counts_ok && in_n && in_m && secs < 1200.0,
        format!("profile counts exact: {counts_ok}, increasing in n: {in_n}, increasing in m: {in_m}, {secs:.1}s"),
    );
}

#[test]
fn criterion_8_determinism() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance_determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let write = |name: &str, game: &PolymatrixGame| {
        let path = dir.join(name);
        std::fs::write(&path, serde_json::to_string(&game.to_document()).unwrap()).unwrap();
        path
    };
    let two_action = PolymatrixGame::star(
        numbered_labels("x", 2),
        vec![(
            vec!["a".into(), "b".into()],
            ndarray::array![[1.0, 0.0], [0.0, 1.0]],
            ndarray::array![[0.0, 1.0], [0.0, 0.0]],
        )],
    )
    .unwrap();
    let trees = [
        write("two_action.json", &two_action),
        write("random.json", &random_oltpg(4, 3, 8, 0.0, 100.0, TreeKind::Oltpg).unwrap()),
        write("clique.json", &clique_to_spg(&Graph::random(6, 0.5, 8)).unwrap()),
    ];
    let general = write("sat.json", &sat_to_pg_olfe(&cnf(3, &[[1, 2, 3], [-1, 2, -3], [1, -2, 3]]), 0.01).unwrap());
    let mut runs = 0;
    let mut mismatches = Vec::new();
    let jobs = trees
        .iter()
        .flat_map(|g| ["pessimistic", "optimistic", "apx", "pure-olfe"].map(|m| (g.clone(), m)))
        .chain(std::iter::once((general, "pure-olfe")));
    for (game, mode) in jobs {
        let mut outputs = Vec::new();
        for threads in ["1", "2", "4", "1", "4"] {
            let (mut out, mut err) = (Vec::new(), Vec::new());
            let args = ["polystack", "solve", "--mode", mode, "--threads", threads, game.to_str().unwrap()];
            let code = polystack::cli::run(args, &mut out, &mut err);
            assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
            outputs.push(out);
            runs += 1;
        }
        if outputs.iter().any(|o| o != &outputs[0]) {
            mismatches.push(format!("{} {mode}", game.file_name().unwrap().to_string_lossy()));
        }
    }
    report(
        "8 determinism",
        mismatches.is_empty(),
        format!("{runs} solve runs over threads 1/2/4, mismatches: {mismatches:?}"),
    );
}
