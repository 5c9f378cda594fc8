//! Command-line front end. Every command prints one JSON document (CSV for
//! `bench`) and returns exit code 0 on success, 1 on domain errors and 2 on
//! usage errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::bayes::{bg_to_polymatrix, polymatrix_to_bg, BayesianGame};
use crate::bench::{parse_range, run_bench, write_csv, BenchConfig};
use crate::error::{Error, Result};
use crate::game::{validate_document, GameDocument, MixedStrategy, Mode, PolymatrixGame};
use crate::gen::{clique_to_spg, random_oltpg, sat_to_pg_olfe, sat_to_pg_plfe, CnfFormula, Graph, TreeKind};
use crate::oracles::{grid_oracle, supremum_1d};
use crate::solve::apx::solve_plfe_apx;
use crate::solve::olfe::{solve_olfe, solve_olfe_with, ConstraintForm};
use crate::solve::plfe::solve_plfe;
use crate::solve::{LfeResult, SolveOptions, DEFAULT_ALPHA};

/// Output format version.
pub const SCHEMA: &str = "polystack/1";

const CHECK_TOL: f64 = 1e-7;

#[derive(Parser, Debug)]
#[command(name = "polystack", version, about = "Leader-follower equilibria in polymatrix games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a game file against its declared class (SPG when absent).
    Validate { game: PathBuf },
    /// Report the most specific class of a game.
    Classify { game: PathBuf },
    /// Compute an equilibrium commitment.
    Solve(SolveArgs),
    /// Evaluate a given leader strategy.
    Eval {
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long, value_enum)]
        mode: ModeArg,
        game: PathBuf,
    },
    /// Map a Bayesian game to a polymatrix game or back.
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        input: PathBuf,
    },
    /// Write a generated game to standard output.
    #[command(subcommand)]
    Generate(Generate),
    /// Cross-check a solve result with a brute-force oracle.
    Verify {
        #[arg(long, value_enum)]
        against: Oracle,
        #[arg(long, default_value_t = 20)]
        resolution: usize,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        game: PathBuf,
        result: PathBuf,
    },
    /// Time the exact pessimistic solver on random trees; writes CSV.
    Bench {
        #[arg(long, default_value = "3..6")]
        players: String,
        #[arg(long, default_value = "2..12")]
        actions: String,
        #[arg(long, default_value_t = 20)]
        seeds: u64,
        /// Per-instance limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    mode: SolveMode,
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    alpha: f64,
    /// Seconds; the best profile so far is reported when it expires.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Worker threads, 0 for all cores.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Fail instead of warning when the approximation guarantee is void.
    #[arg(long)]
    strict: bool,
    game: PathBuf,
}

#[derive(Subcommand, Debug)]
enum Generate {
    /// Random one-level tree with uniform payoffs.
    Random {
        #[arg(long, default_value_t = 3)]
        players: usize,
        #[arg(long, default_value_t = 3)]
        actions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = KindArg::Oltpg)]
        kind: KindArg,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 100.0)]
        hi: f64,
    },
    /// Star game encoding maximum clique of a graph file.
    Clique {
        #[arg(long)]
        graph: PathBuf,
    },
    /// Optimistic-value gap game from a DIMACS 3-CNF file.
    SatOlfe {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, default_value_t = crate::gen::DEFAULT_SAT_EPSILON)]
        epsilon: f64,
    },
    /// Pessimistic-value gap game from a DIMACS 3-CNF file.
    SatPlfe {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, default_value_t = crate::gen::DEFAULT_SAT_EPSILON)]
        epsilon: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SolveMode {
    Pessimistic,
    Optimistic,
    Apx,
    PureOlfe,
}

impl SolveMode {
    fn name(self) -> &'static str {
        match self {
            SolveMode::Pessimistic => "pessimistic",
            SolveMode::Optimistic => "optimistic",
            SolveMode::Apx => "apx",
            SolveMode::PureOlfe => "pure-olfe",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Pessimistic,
    Optimistic,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Pessimistic => Mode::Pessimistic,
            ModeArg::Optimistic => Mode::Optimistic,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Polymatrix,
    Bayesian,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    Oltpg,
    Spg,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Oracle {
    Grid,
    #[value(name = "1d")]
    OneD,
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let sink: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match command {
        Command::Validate { game } => {
            let doc: GameDocument = read_json(&game)?;
            let report = validate_document(&doc);
            let valid = report.is_valid();
            emit(out, "validate", &report)?;
            Ok(if valid { 0 } else { 1 })
        }
        Command::Classify { game } => {
            let g = load_game(&game)?;
            emit(out, "classify", &json!({ "class": g.classify() }))?;
            Ok(0)
        }
        Command::Solve(args) => solve(args, out, err),
        Command::Eval { strategy, mode, game } => {
            let g = load_game(&game)?;
            let s = read_strategy(&strategy)?;
            let c = g.evaluate_commitment(&s, mode.into(), crate::DEFAULT_TOL)?;
            let mut body = Map::new();
            body.insert("mode".into(), json!(Mode::from(mode)));
            body.insert("value".into(), json!(c.value));
            body.insert("strategy".into(), json!(s));
            insert_profile(&mut body, &g, &c.profile.0);
            emit(out, "eval", &body)?;
            Ok(0)
        }
        Command::Convert { to, input } => {
            match to {
                Target::Polymatrix => {
                    let bg: BayesianGame = read_json(&input)?;
                    let conv = bg_to_polymatrix(&bg)?;
                    warn_all(err, &conv.warnings);
                    let mut doc = conv.game.to_document();
                    doc.class = Some(conv.game.classify());
                    let mut body = to_map(&doc)?;
                    body.insert("type_of_leaf".into(), json!(conv.type_of_leaf));
                    emit(out, "convert", &body)?;
                }
                Target::Bayesian => {
                    let g = load_game(&input)?;
                    let conv = polymatrix_to_bg(&g)?;
                    warn_all(err, &conv.warnings);
                    emit(out, "convert", &conv.bg)?;
                }
            }
            Ok(0)
        }
        Command::Generate(which) => {
            let game = match which {
                Generate::Random { players, actions, seed, kind, lo, hi } => {
                    let kind = match kind {
                        KindArg::Oltpg => TreeKind::Oltpg,
                        KindArg::Spg => TreeKind::Spg,
                    };
                    random_oltpg(players, actions, seed, lo, hi, kind)?
                }
                Generate::Clique { graph } => {
                    let g: Graph = read_json(&graph)?;
                    clique_to_spg(&g)?
                }
                Generate::SatOlfe { cnf, epsilon } => sat_to_pg_olfe(&read_cnf(&cnf)?, epsilon)?,
                Generate::SatPlfe { cnf, epsilon } => sat_to_pg_plfe(&read_cnf(&cnf)?, epsilon)?,
            };
            let mut doc = game.to_document();
            doc.class = Some(game.classify());
            emit(out, "generate", &doc)?;
            Ok(0)
        }
        Command::Verify { against, resolution, threads, game, result } => verify(against, resolution, threads, &game, &result, out),
        Command::Bench { players, actions, seeds, time_limit, threads } => {
            let config = BenchConfig {
                players: parse_range(&players)?,
                actions: parse_range(&actions)?,
                seeds,
                time_limit: seconds(time_limit)?,
                threads,
            };
            let rows = run_bench(&config, |row| {
                let _ = writeln!(err, "n={} m={} mean={:.6}s timeouts={}", row.n, row.m, row.mean_seconds, row.timeouts);
            })?;
            write_csv(&rows, out)?;
            Ok(0)
        }
    }
}

fn solve(args: SolveArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let game = load_game(&args.game)?;
    if !(args.alpha > 0.0) {
        return Err(Error::InvalidArgument(format!("alpha must be positive, got {}", args.alpha)));
    }
    let mut opts = SolveOptions::default().with_alpha(args.alpha).with_threads(args.threads);
    if let Some(t) = args.time_limit {
        opts = opts.with_time_limit(seconds(t)?);
    }
    let mut extra = Map::new();
    let result = match args.mode {
        SolveMode::Pessimistic => solve_plfe(&game, &opts)?,
        SolveMode::Optimistic => solve_olfe_with(&game, &opts, ConstraintForm::BestResponse)?,
        SolveMode::PureOlfe => solve_olfe(&game, &opts)?,
        SolveMode::Apx => {
            let report = solve_plfe_apx(&game, &opts, args.strict)?;
            warn_all(err, &report.warnings);
            extra.insert("chosen_follower".into(), json!(game.original_ids()[report.chosen_follower]));
            extra.insert("subgame_values".into(), json!(report.subgame_values));
            extra.insert("certified_bound".into(), json!(report.certified_bound));
            extra.insert("guarantee_holds".into(), json!(report.guarantee_holds));
            extra.insert("warnings".into(), json!(report.warnings));
            report.result
        }
    };
    let mut body = result_body(&game, &result)?;
    body.insert("solver".into(), json!(args.mode.name()));
    body.extend(extra);
    emit(out, "solve", &body)?;
    Ok(0)
}

fn result_body(game: &PolymatrixGame, r: &LfeResult) -> Result<Map<String, Value>> {
    let mut body = to_map(r)?;
    insert_profile(&mut body, game, &r.profile.0);
    Ok(body)
}

/// Adds follower ids and action labels next to the index profile.
fn insert_profile(body: &mut Map<String, Value>, game: &PolymatrixGame, profile: &[usize]) {
    let ids: Vec<usize> = game.followers().map(|p| game.original_ids()[p]).collect();
    let labels: Vec<&str> = game.followers().map(|p| game.action_labels(p)[profile[p]].as_str()).collect();
    body.insert("profile".into(), json!(profile));
    body.insert("followers".into(), json!(ids));
    body.insert("profile_actions".into(), json!(labels));
}

#[derive(Serialize)]
struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn verify(against: Oracle, k: usize, threads: usize, game: &Path, result: &Path, out: &mut dyn Write) -> Result<i32> {
    let g = load_game(game)?;
    let r: Value = read_json(result)?;
    let field = |name: &str| r.get(name).ok_or_else(|| Error::InvalidArgument(format!("result has no {name:?} field")));
    let value = field("value")?.as_f64().ok_or_else(|| Error::InvalidArgument("value is not a number".into()))?;
    let strategy: MixedStrategy = serde_json::from_value(field("strategy")?.clone())?;
    let mode: Mode = serde_json::from_value(field("mode")?.clone())?;
    let attained = field("attained")?.as_bool().unwrap_or(true);
    let alpha = r.get("alpha").and_then(Value::as_f64).unwrap_or(DEFAULT_ALPHA);
    let solver = r.get("solver").and_then(Value::as_str).unwrap_or(mode_name(mode));

    let mut checks = Vec::new();
    let eval = if solver == "pure-olfe" {
        g.pure_ne_extreme(&strategy, mode, crate::DEFAULT_TOL)?.map(|c| c.value)
    } else {
        Some(g.evaluate_commitment(&strategy, mode, crate::DEFAULT_TOL)?.value)
    };
    let (passed, detail) = match eval {
        Some(e) if attained => ((e - value).abs() <= CHECK_TOL, format!("strategy evaluates to {e}, reported {value}")),
        Some(e) => (e >= value - alpha - CHECK_TOL, format!("strategy evaluates to {e}, supremum {value}, alpha {alpha}")),
        None => (false, "no pure equilibrium at the reported strategy".to_string()),
    };
    checks.push(Check { name: "re-evaluation", passed, detail });

    match against {
        Oracle::Grid => {
            let grid = grid_oracle(&g, k, mode, threads)?;
            let (passed, detail) = if solver == "apx" {
                let bound = r.get("certified_bound").and_then(Value::as_f64).unwrap_or(f64::NEG_INFINITY);
                (value >= bound - CHECK_TOL, format!("value {value} against certified bound {bound}; grid {}", grid.value))
            } else {
                (grid.value <= value + CHECK_TOL, format!("grid value {} at resolution {k} vs reported {value}", grid.value))
            };
            checks.push(Check { name: "grid", passed, detail });
            if grid.skipped > 0 {
                checks.push(Check {
                    name: "grid-skipped",
                    passed: true,
                    detail: format!("{} of {} points have no pure equilibrium", grid.skipped, grid.points),
                });
            }
        }
        Oracle::OneD => {
            if mode != Mode::Pessimistic || solver == "apx" {
                return Err(Error::InvalidArgument("the 1d oracle checks exact pessimistic results only".into()));
            }
            let sup = supremum_1d(&g)?;
            let close = (sup.value - value).abs() <= 1e-6;
            checks.push(Check {
                name: "supremum",
                passed: close,
                detail: format!("oracle {} vs reported {value}", sup.value),
            });
            checks.push(Check {
                name: "attained",
                passed: sup.attained == attained,
                detail: format!("oracle {} vs reported {attained}", sup.attained),
            });
        }
    }
    let ok = checks.iter().all(|c| c.passed);
    emit(out, "verify", &json!({ "passed": ok, "checks": checks }))?;
    Ok(if ok { 0 } else { 1 })
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Pessimistic => "pessimistic",
        Mode::Optimistic => "optimistic",
    }
}

fn seconds(s: f64) -> Result<Duration> {
    Duration::try_from_secs_f64(s).map_err(|_| Error::InvalidArgument(format!("bad time limit {s}")))
}

fn warn_all(err: &mut dyn Write, warnings: &[String]) {
    for w in warnings {
        let _ = writeln!(err, "warning: {w}");
    }
}

fn to_map<T: Serialize>(value: &T) -> Result<Map<String, Value>> {
    match serde_json::to_value(value)? {
        Value::Object(m) => Ok(m),
        other => Ok(Map::from_iter([("data".to_string(), other)])),
    }
}

/// Prints `body` with the schema tag and command name in front.
fn emit<T: Serialize>(out: &mut dyn Write, command: &str, body: &T) -> Result<()> {
    let mut doc = Map::new();
    doc.insert("schema".into(), json!(SCHEMA));
    doc.insert("command".into(), json!(command));
    doc.extend(to_map(body)?);
    serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
    writeln!(out)?;
    Ok(())
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_str(&read_text(path)?).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn read_cnf(path: &Path) -> Result<CnfFormula> {
    CnfFormula::parse_dimacs(&read_text(path)?)
}

fn load_game(path: &Path) -> Result<PolymatrixGame> {
    PolymatrixGame::from_document(&read_json(path)?)
}

/// A bare probability array, or any object with a `strategy` field.
fn read_strategy(path: &Path) -> Result<MixedStrategy> {
    let v: Value = read_json(path)?;
    let probs = match v {
        Value::Object(mut m) => m.remove("strategy").ok_or_else(|| Error::InvalidStrategy("no strategy field".into()))?,
        other => other,
    };
    Ok(serde_json::from_value(probs)?)
}
