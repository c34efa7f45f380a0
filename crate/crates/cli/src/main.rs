use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use pushmean::formats::{read_doc, to_json, LassoDoc, StrategyDoc, WfaDoc, WpsDoc, WrgDoc};
use pushmean::{dimacs, input_err, script, search, CliError};
use pushmean_core::decide::{decide_with, Flavor, Objective, Relation};
use pushmean_core::games::{simulate, Player, Wpg};
use pushmean_core::gain::ExtWeight;
use pushmean_core::model::apply_in_place;
use pushmean_core::modular::{verify_modular, CounterWitness, ModularError, ModularVerdict, DEFAULT_SEARCH_CAP};
use pushmean_core::reductions::{sat_to_wrg, strict_variant, wfa_to_wpg};
use pushmean_core::rsm::Wrg;
use pushmean_core::summary::{bounded_summary, full_summary};

#[derive(Parser)]
#[command(name = "pushmean", version, about = "Mean-payoff objectives on weighted pushdown systems and recursive game graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether some infinite run meets a mean-payoff threshold.
    Decide {
        #[command(flatten)]
        objective: ObjectiveArgs,
        /// Include a lasso witness when one is available.
        #[arg(long)]
        witness: bool,
        /// Add wall-clock timings to the output.
        #[arg(long)]
        stats: bool,
        file: PathBuf,
    },
    /// Print the summary function, one row per (q1, top, q2).
    Summary {
        /// Bounded summary s_d instead of the full one.
        #[arg(long)]
        depth: Option<u32>,
        file: PathBuf,
    },
    /// Memoryless modular strategies of a recursive game graph.
    Modular {
        #[command(subcommand)]
        action: ModularCommand,
    },
    /// Build an instance: a recursive graph from a DIMACS 3-CNF file, or a
    /// pushdown game from a weighted automaton.
    Generate {
        #[arg(value_enum)]
        kind: GenerateKind,
        source: PathBuf,
        /// For sat3: reweight the loop-closing edge to 1.
        #[arg(long)]
        strict: bool,
    },
    /// Play a pushdown game with scripted strategies and print the trace.
    Simulate {
        /// Player 1 script: first, random:SEED, edges:I,J,..., doubling.
        #[arg(long)]
        p1: String,
        /// Player 2 script, same forms as --p1.
        #[arg(long)]
        p2: String,
        #[arg(long)]
        steps: usize,
        file: PathBuf,
    },
}

#[derive(Subcommand)]
enum ModularCommand {
    /// Check one strategy.
    Verify {
        #[command(flatten)]
        objective: ObjectiveArgs,
        #[arg(long)]
        strategy: PathBuf,
        file: PathBuf,
    },
    /// Find the first winning strategy in enumeration order.
    Search {
        #[command(flatten)]
        objective: ObjectiveArgs,
        /// Verify candidates on this many threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Largest strategy space to enumerate (default: PUSHMEAN_SEARCH_CAP or 2^24).
        #[arg(long)]
        cap: Option<u128>,
        /// Also write the strategy found to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum GenerateKind {
    Sat3,
    Wfa,
}

#[derive(Clone, Copy, ValueEnum)]
enum FlavorArg {
    Liminf,
    Limsup,
}

#[derive(Clone, Copy, ValueEnum)]
enum RelArg {
    Ge,
    Gt,
}

#[derive(Args)]
struct ObjectiveArgs {
    #[arg(long, value_enum, default_value = "liminf")]
    flavor: FlavorArg,
    #[arg(long, value_enum, default_value = "ge")]
    rel: RelArg,
    /// Integer, fraction `a/b` or decimal.
    #[arg(long, default_value = "0", value_parser = parse_rational, allow_hyphen_values = true)]
    threshold: BigRational,
    /// Only consider runs whose stack height stays bounded.
    #[arg(long)]
    stack_bounded: bool,
}

impl ObjectiveArgs {
    fn objective(&self) -> Objective {
        let flavor = match self.flavor {
            FlavorArg::Liminf => Flavor::LimInfAvg,
            FlavorArg::Limsup => Flavor::LimSupAvg,
        };
        let relation = match self.rel {
            RelArg::Ge => Relation::NonStrict,
            RelArg::Gt => Relation::Strict,
        };
        let o = Objective::new(flavor, relation).with_threshold(self.threshold.clone());
        if self.stack_bounded {
            o.stack_bounded()
        } else {
            o
        }
    }
}

fn parse_rational(s: &str) -> Result<BigRational, String> {
    let bad = || format!("`{s}` is not a rational number");
    let t = s.trim();
    if let Some((a, b)) = t.split_once('/') {
        let a: BigInt = a.trim().parse().map_err(|_| bad())?;
        let b: BigInt = b.trim().parse().map_err(|_| bad())?;
        if b.is_zero() {
            return Err(format!("`{s}` has a zero denominator"));
        }
        return Ok(BigRational::new(a, b));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int: BigInt = match int {
            "" | "-" | "+" => BigInt::zero(),
            _ => int.parse().map_err(|_| bad())?,
        };
        let scale = BigInt::from(10).pow(frac.len() as u32);
        let f: BigInt = frac.parse().map_err(|_| bad())?;
        let num = int * &scale + if negative { -f } else { f };
        return Ok(BigRational::new(num, scale));
    }
    t.parse::<BigInt>().map(BigRational::from_integer).map_err(|_| bad())
}

#[derive(Serialize)]
struct ObjectiveDoc {
    flavor: &'static str,
    relation: &'static str,
    threshold: String,
    stack_bounded: bool,
}

impl ObjectiveDoc {
    fn new(o: &Objective) -> ObjectiveDoc {
        ObjectiveDoc {
            flavor: match o.flavor {
                Flavor::LimInfAvg => "liminf",
                Flavor::LimSupAvg => "limsup",
            },
            relation: match o.relation {
                Relation::NonStrict => "ge",
                Relation::Strict => "gt",
            },
            threshold: o.threshold.to_string(),
            stack_bounded: o.stack_bounded,
        }
    }
}

#[derive(Serialize)]
struct Timings {
    decide_ms: f64,
}

#[derive(Serialize)]
struct DecideStatsDoc {
    d: u64,
    ell: u64,
    scale_bits: Option<u64>,
    levels: u32,
    rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings: Option<Timings>,
}

#[derive(Serialize)]
struct VerdictDoc {
    version: &'static str,
    kind: &'static str,
    answer: bool,
    objective: ObjectiveDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<LassoDoc>,
    stats: DecideStatsDoc,
}

#[derive(Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
enum CounterWitnessDoc {
    Lasso(LassoDoc),
    DeadEnd { edges: Vec<usize>, path: Vec<String>, end: String },
    Unwitnessed,
}

#[derive(Serialize)]
struct ModularVerdictDoc {
    version: &'static str,
    kind: &'static str,
    objective: ObjectiveDoc,
    winning: bool,
    /// Over the pushdown system of the restricted graph, weights shifted so
    /// the threshold is 0.
    #[serde(skip_serializing_if = "Option::is_none")]
    counter_witness: Option<CounterWitnessDoc>,
}

#[derive(Serialize)]
struct SearchDoc {
    version: &'static str,
    kind: &'static str,
    objective: ObjectiveDoc,
    space_size: String,
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    message: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    strategy: Option<StrategyDoc>,
}

#[derive(Serialize)]
struct TraceDoc {
    version: &'static str,
    kind: &'static str,
    steps: usize,
    played: usize,
    /// The play stopped early because the current player had no move.
    dead_end: bool,
    edges: Vec<usize>,
    players: Vec<u8>,
    prefix_avgs: Vec<String>,
    max_avg: Option<String>,
    min_avg: Option<String>,
    end: String,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn load_wps(path: &Path) -> Result<pushmean_core::model::Wps, CliError> {
    let (doc, _): (WpsDoc, _) = read_doc(&read(path)?, &path.display().to_string(), &["wps"])?;
    doc.to_wps()
}

fn load_wrg(path: &Path) -> Result<Wrg, CliError> {
    let (doc, _): (WrgDoc, _) = read_doc(&read(path)?, &path.display().to_string(), &["wrg"])?;
    doc.to_wrg()
}

fn load_game(path: &Path) -> Result<Wpg, CliError> {
    let (doc, kind): (WpsDoc, _) = read_doc(&read(path)?, &path.display().to_string(), &["wpg", "wps"])?;
    if kind == "wps" {
        return Ok(Wpg::one_player(doc.to_wps()?));
    }
    doc.to_wpg()
}

fn modular_err(e: ModularError) -> CliError {
    match e {
        ModularError::SearchSpaceTooLarge { .. } => CliError::Resource(e.to_string()),
        _ => CliError::Input(e.to_string()),
    }
}

fn search_cap(flag: Option<u128>) -> Result<u128, CliError> {
    if let Some(c) = flag {
        return Ok(c);
    }
    match std::env::var("PUSHMEAN_SEARCH_CAP") {
        Ok(v) => v.trim().parse().map_err(|_| input_err(format!("PUSHMEAN_SEARCH_CAP=`{v}` is not a number"))),
        Err(_) => Ok(DEFAULT_SEARCH_CAP),
    }
}

fn cmd_decide(objective: &ObjectiveArgs, witness: bool, stats: bool, file: &Path) -> Result<String, CliError> {
    let wps = load_wps(file)?;
    let obj = objective.objective();
    let t = Instant::now();
    let v = decide_with(&wps, &obj, witness);
    let elapsed = t.elapsed();
    let doc = VerdictDoc {
        version: "v1",
        kind: "verdict",
        answer: v.answer,
        objective: ObjectiveDoc::new(&obj),
        witness: v.witness.as_ref().map(|l| LassoDoc::new(&wps, l)),
        stats: DecideStatsDoc {
            d: v.stats.depth,
            ell: v.stats.ell,
            scale_bits: v.stats.scale_bits,
            levels: v.stats.levels,
            rows: v.stats.rows,
            timings: stats.then_some(Timings { decide_ms: elapsed.as_secs_f64() * 1e3 }),
        },
    };
    Ok(to_json(&doc))
}

fn cmd_summary(depth: Option<u32>, file: &Path) -> Result<String, CliError> {
    let wps = load_wps(file)?;
    let s = match depth {
        Some(d) => bounded_summary(&wps, d),
        None => full_summary(&wps),
    };
    // Rows in declaration order of states and symbols.
    let mut out = String::from("q1\ttop\tq2\tvalue\n");
    let (mut finite, mut omega, mut neg_inf) = (0, 0, 0);
    for ((q1, g, q2), v) in s.iter() {
        match v {
            ExtWeight::Finite(_) => finite += 1,
            ExtWeight::Omega => omega += 1,
            ExtWeight::NegInfinity => neg_inf += 1,
        }
        out.push_str(&format!("{}\t{}\t{}\t{v}\n", wps.states[q1], wps.alphabet[g], wps.states[q2]));
    }
    out.push_str(&format!("# finite {finite}, omega {omega}, -inf {neg_inf}\n"));
    Ok(out)
}

fn cmd_verify(objective: &ObjectiveArgs, strategy: &Path, file: &Path) -> Result<String, CliError> {
    let wrg = load_wrg(file)?;
    let (doc, _): (StrategyDoc, _) = read_doc(&read(strategy)?, &strategy.display().to_string(), &["strategy"])?;
    let sigma = doc.to_strategy(&wrg)?;
    let obj = objective.objective();
    let verdict = verify_modular(&wrg, &sigma, &obj).map_err(modular_err)?;
    let counter_witness = match &verdict {
        ModularVerdict::Winning => None,
        ModularVerdict::Losing { system, witness } => Some(match witness {
            CounterWitness::Lasso(l) => CounterWitnessDoc::Lasso(LassoDoc::new(system, l)),
            CounterWitness::DeadEnd(p) => CounterWitnessDoc::DeadEnd {
                edges: p.edges.clone(),
                path: p.edges.iter().map(|&e| system.display_edge(e)).collect(),
                end: p.end(system).map(|c| c.display(system)).unwrap_or_default(),
            },
            CounterWitness::Unwitnessed => CounterWitnessDoc::Unwitnessed,
        }),
    };
    let doc = ModularVerdictDoc {
        version: "v1",
        kind: "modular-verdict",
        objective: ObjectiveDoc::new(&obj),
        winning: verdict.is_winning(),
        counter_witness,
    };
    Ok(to_json(&doc))
}

fn cmd_search(
    objective: &ObjectiveArgs,
    jobs: usize,
    cap: Option<u128>,
    out: Option<&Path>,
    file: &Path,
) -> Result<String, CliError> {
    let wrg = load_wrg(file)?;
    let obj = objective.objective();
    let cap = search_cap(cap)?;
    let found = search::search(&wrg, &obj, cap, jobs.max(1)).map_err(modular_err)?;
    let strategy = found.as_ref().map(|s| StrategyDoc::from_strategy(&wrg, s));
    if let (Some(path), Some(s)) = (out, &strategy) {
        write(path, &to_json(s))?;
    }
    let doc = SearchDoc {
        version: "v1",
        kind: "search-result",
        objective: ObjectiveDoc::new(&obj),
        space_size: wrg.strategy_space_size().to_string(),
        found: strategy.is_some(),
        message: strategy.is_none().then_some("no winning modular strategy"),
        strategy,
    };
    Ok(to_json(&doc))
}

fn cmd_generate(kind: GenerateKind, source: &Path, strict: bool) -> Result<String, CliError> {
    let text = read(source)?;
    let origin = source.display().to_string();
    match kind {
        GenerateKind::Sat3 => {
            let phi = dimacs::parse(&text, &origin)?;
            let mut wrg = sat_to_wrg(&phi);
            if strict {
                wrg = strict_variant(&wrg).map_err(input_err)?;
            }
            Ok(to_json(&WrgDoc::from_wrg(&wrg)))
        }
        GenerateKind::Wfa => {
            if strict {
                return Err(input_err("--strict only applies to sat3"));
            }
            let (doc, _): (WfaDoc, _) = read_doc(&text, &origin, &["wfa"])?;
            let g = wfa_to_wpg(&doc.to_wfa()?);
            Ok(to_json(&WpsDoc::from_wfa_game(&g)))
        }
    }
}

fn cmd_simulate(p1: &str, p2: &str, steps: usize, file: &Path) -> Result<String, CliError> {
    let g = load_game(file)?;
    let mut s1 = script::parse(p1, Player::One, &g.wps)?;
    let mut s2 = script::parse(p2, Player::Two, &g.wps)?;
    let play = simulate(&g, &mut *s1, &mut *s2, steps).map_err(input_err)?;
    let mut cur = play.path.start.clone();
    let mut players = Vec::with_capacity(play.path.len());
    for (i, &e) in play.path.edges.iter().enumerate() {
        players.push(match g.owner[cur.state] {
            Player::One => 1,
            Player::Two => 2,
        });
        apply_in_place(&g.wps, &mut cur, e, i).map_err(input_err)?;
    }
    let doc = TraceDoc {
        version: "v1",
        kind: "trace",
        steps,
        played: play.path.len(),
        dead_end: play.dead_end,
        edges: play.path.edges.clone(),
        players,
        prefix_avgs: play.prefix_avgs.iter().map(|a| a.to_string()).collect(),
        max_avg: play.max_avg().map(|a| a.to_string()),
        min_avg: play.min_avg().map(|a| a.to_string()),
        end: cur.display(&g.wps),
    };
    Ok(to_json(&doc))
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Decide { objective, witness, stats, file } => cmd_decide(&objective, witness, stats, &file),
        Command::Summary { depth, file } => cmd_summary(depth, &file),
        Command::Modular { action } => match action {
            ModularCommand::Verify { objective, strategy, file } => cmd_verify(&objective, &strategy, &file),
            ModularCommand::Search { objective, jobs, cap, out, file } => {
                cmd_search(&objective, jobs, cap, out.as_deref(), &file)
            }
        },
        Command::Generate { kind, source, strict } => cmd_generate(kind, &source, strict),
        Command::Simulate { p1, p2, steps, file } => cmd_simulate(&p1, &p2, steps, &file),
    }
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
