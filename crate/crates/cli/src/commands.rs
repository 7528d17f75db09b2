use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use fles_core::benchgen::{
    allpar, ccnfs, mutate, order_mutations, random_mutation, random_structure, sharing,
    MutationKind, RandomParams,
};
use fles_core::decision::{check_inclusion_with, membership_with, DecisionOptions};
use fles_core::nfa::{encode, nfa_inclusion, DEFAULT_SUBSET_CAP};
use fles_core::reductions::{dhc_pair, hc_structure};
use fles_core::semantics::{count_words, maximal_member_sets, pc_metric};
use fles_core::{EventStructure, Label, Limits, Word};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::format::{parse_structure, serialize_structure, GraphDocument};

/// Environment variable overriding the configuration enumeration cap.
pub const MAX_CONFIGS_VAR: &str = "FLES_MAX_CONFIGS";

#[derive(Parser, Debug)]
#[command(name = "fles", version, about = "Language membership and inclusion for finite labeled prime event structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide whether L(A) is included in L(B).
    Check {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = Engine::Es)]
        engine: Engine,
        /// Print a JSON run report.
        #[arg(long)]
        json: bool,
        /// Run the check k times and report the median time.
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        /// Check left-hand configurations on all cores.
        #[arg(long)]
        parallel: bool,
        /// Product-state cap of the automaton engine.
        #[arg(long, default_value_t = DEFAULT_SUBSET_CAP)]
        subset_cap: usize,
    },
    /// Decide whether a space-separated word is in L(E).
    Member {
        word: String,
        file: PathBuf,
        /// Print a trace spelling the word.
        #[arg(long)]
        witness: bool,
    },
    /// Write a generated structure.
    Gen {
        #[command(subcommand)]
        family: Family,
        /// Output file; standard output when absent.
        #[arg(short, long, global = true)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0, global = true)]
        seed: u64,
    },
    /// Build the reduction structures for a graph file.
    Reduce {
        kind: Reduction,
        graph: PathBuf,
        /// Output file; dhc writes PATH.e1.fles and PATH.e2.fles.
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Print size, configuration, language and concurrency figures.
    Stats {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Export the configuration automaton as text.
    Nfa {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    /// Embedding-based decision on the event structures.
    Es,
    /// Subset construction on the configuration automata.
    Nfa,
    /// Both, failing if they disagree.
    Both,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Reduction {
    Hc,
    Dhc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MutationChoice {
    AddOrder,
    DropEvent,
    Relabel,
    AddConflict,
}

#[derive(Subcommand, Debug)]
pub enum Family {
    /// n pairwise concurrent events labeled 1..n.
    Allpar { n: usize },
    /// n events in conflicting pairs with silent reset events.
    Ccnfs { n: usize },
    /// n alternatives sharing an m-event suffix.
    Sharing { n: usize, m: usize },
    Random {
        #[arg(long, default_value_t = 6)]
        events: usize,
        #[arg(long, default_value_t = 3)]
        labels: usize,
        #[arg(long, default_value_t = 0.25)]
        cause_prob: f64,
        #[arg(long, default_value_t = 0.15)]
        conflict_prob: f64,
        #[arg(long, default_value_t = 0.0)]
        epsilon_prob: f64,
    },
    /// One random mutation of an existing structure.
    Mutate {
        input: PathBuf,
        #[arg(long, value_enum)]
        kind: Option<MutationChoice>,
    },
}

/// Yes/no answers map to exit codes 0 and 1; errors to 2.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Answer {
    Yes,
    No,
}

pub type CmdResult = Result<Answer, String>;

fn limits() -> Result<Limits, String> {
    let mut limits = Limits::default();
    if let Ok(v) = std::env::var(MAX_CONFIGS_VAR) {
        limits.max_configurations = v
            .trim()
            .parse()
            .map_err(|_| format!("{MAX_CONFIGS_VAR} must be a positive integer, got {v:?}"))?;
    }
    Ok(limits)
}

fn load(path: &Path) -> Result<EventStructure, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_structure(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn show_word(w: &Word) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.to_string()
    }
}

fn median(times: &mut [f64]) -> f64 {
    times.sort_by(f64::total_cmp);
    let k = times.len();
    if k % 2 == 1 {
        times[k / 2]
    } else {
        (times[k / 2 - 1] + times[k / 2]) / 2.0
    }
}

#[derive(Debug, Serialize)]
pub struct RunReport {
    pub engine: String,
    pub included: bool,
    pub counterexample: Option<String>,
    pub events: [usize; 2],
    pub maximal_configurations: [Option<usize>; 2],
    pub pc: [Option<f64>; 2],
    pub embeddings_tried: Option<u64>,
    pub splits: Option<u64>,
    pub nfa_product_states: Option<usize>,
    /// Median wall time over all repeats, in milliseconds.
    pub time_ms: f64,
    pub times_ms: Vec<f64>,
}

struct EngineRun {
    included: bool,
    counterexample: Option<Word>,
    maximal: [Option<usize>; 2],
    embeddings_tried: Option<u64>,
    splits: Option<u64>,
    product_states: Option<usize>,
}

fn run_es(a: &EventStructure, b: &EventStructure, options: DecisionOptions) -> Result<EngineRun, String> {
    let v = check_inclusion_with(a, b, options).map_err(|e| e.to_string())?;
    Ok(EngineRun {
        included: v.included,
        counterexample: v.counterexample.map(|c| c.word),
        maximal: [Some(v.maximal_left), Some(v.maximal_right)],
        embeddings_tried: Some(v.stats.embeddings_tried),
        splits: Some(v.stats.splits),
        product_states: None,
    })
}

fn run_nfa(a: &EventStructure, b: &EventStructure, limits: Limits, cap: usize) -> Result<EngineRun, String> {
    let a1 = encode(a, limits.max_configurations).map_err(|e| e.to_string())?;
    let a2 = encode(b, limits.max_configurations).map_err(|e| e.to_string())?;
    let r = nfa_inclusion(&a1, &a2, cap).map_err(|e| e.to_string())?;
    Ok(EngineRun {
        included: r.included,
        counterexample: r.witness,
        maximal: [None, None],
        embeddings_tried: None,
        splits: None,
        product_states: Some(r.product_states),
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_check(
    a: &Path,
    b: &Path,
    engine: Engine,
    json: bool,
    repeat: usize,
    parallel: bool,
    subset_cap: usize,
) -> CmdResult {
    let limits = limits()?;
    let (e1, e2) = (load(a)?, load(b)?);
    let options = DecisionOptions {
        limits,
        parallel,
        ..DecisionOptions::default()
    };
    let mut times = Vec::new();
    let mut last = None;
    for _ in 0..repeat.max(1) {
        let start = Instant::now();
        let run = match engine {
            Engine::Es => run_es(&e1, &e2, options)?,
            Engine::Nfa => run_nfa(&e1, &e2, limits, subset_cap)?,
            Engine::Both => {
                let es = run_es(&e1, &e2, options)?;
                let nfa = run_nfa(&e1, &e2, limits, subset_cap)?;
                if es.included != nfa.included {
                    return Err(format!(
                        "engines disagree: event structures say {}, automata say {}",
                        es.included, nfa.included
                    ));
                }
                EngineRun {
                    product_states: nfa.product_states,
                    ..es
                }
            }
        };
        times.push(start.elapsed().as_secs_f64() * 1000.0);
        last = Some(run);
    }
    let run = last.expect("at least one repeat");
    let answer = if run.included { Answer::Yes } else { Answer::No };
    if json {
        let pc = |s: &EventStructure| pc_metric(s, limits.max_configurations).ok();
        let report = RunReport {
            engine: format!("{engine:?}").to_lowercase(),
            included: run.included,
            counterexample: run.counterexample.as_ref().map(show_word),
            events: [e1.len(), e2.len()],
            maximal_configurations: run.maximal,
            pc: [pc(&e1), pc(&e2)],
            embeddings_tried: run.embeddings_tried,
            splits: run.splits,
            nfa_product_states: run.product_states,
            time_ms: median(&mut times.clone()),
            times_ms: times,
        };
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        match &run.counterexample {
            None => println!("included"),
            Some(w) => {
                println!("not included");
                println!("counterexample: {}", show_word(w));
            }
        }
        if repeat > 1 {
            println!("median time: {:.3} ms over {} runs", median(&mut times), times.len());
        }
    }
    Ok(answer)
}

fn cmd_member(word: &str, file: &Path, witness: bool) -> CmdResult {
    let limits = limits()?;
    let s = load(file)?;
    let labels: Vec<Label> = word
        .split_whitespace()
        .map(|t| if t == "ε" { Label::EPSILON } else { Label::new(t) })
        .collect();
    let m = membership_with(&labels, &s, limits).map_err(|e| e.to_string())?;
    if m.member {
        println!("member");
        if witness {
            let trace: Vec<String> = m.witness.unwrap_or_default().iter().map(|e| e.to_string()).collect();
            println!("trace: {}", trace.join(" "));
        }
        Ok(Answer::Yes)
    } else {
        println!("not a member");
        Ok(Answer::No)
    }
}

fn choice_matches(choice: MutationChoice, kind: &MutationKind) -> bool {
    matches!(
        (choice, kind),
        (MutationChoice::AddOrder, MutationKind::AddOrder(..))
            | (MutationChoice::DropEvent, MutationKind::DropEvent(..))
            | (MutationChoice::Relabel, MutationKind::Relabel(..))
            | (MutationChoice::AddConflict, MutationKind::AddConflict(..))
    )
}

fn pick_mutation(
    rng: &mut ChaCha8Rng,
    s: &EventStructure,
    choice: Option<MutationChoice>,
) -> Result<MutationKind, String> {
    use rand::seq::SliceRandom;
    if choice == Some(MutationChoice::AddOrder) {
        return order_mutations(s)
            .choose(rng)
            .copied()
            .ok_or_else(|| "no pair of events admits an order mutation".to_string());
    }
    for _ in 0..1000 {
        let Some(kind) = random_mutation(rng, s) else { break };
        if choice.is_none_or(|c| choice_matches(c, &kind)) {
            return Ok(kind);
        }
    }
    Err("no applicable mutation of the requested kind".to_string())
}

fn cmd_gen(family: &Family, output: Option<&Path>, seed: u64) -> CmdResult {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = match family {
        Family::Allpar { n } => allpar(*n).map_err(|e| e.to_string())?,
        Family::Ccnfs { n } => ccnfs(*n).map_err(|e| e.to_string())?,
        Family::Sharing { n, m } => sharing(*n, *m).map_err(|e| e.to_string())?,
        Family::Random {
            events,
            labels,
            cause_prob,
            conflict_prob,
            epsilon_prob,
        } => {
            for p in [cause_prob, conflict_prob, epsilon_prob] {
                if !(0.0..=1.0).contains(p) {
                    return Err(format!("probability {p} is outside [0, 1]"));
                }
            }
            let params = RandomParams {
                events: *events,
                labels: *labels,
                cause_prob: *cause_prob,
                conflict_prob: *conflict_prob,
                epsilon_prob: *epsilon_prob,
            };
            random_structure(&mut rng, params)
        }
        Family::Mutate { input, kind } => {
            let base = load(input)?;
            let k = pick_mutation(&mut rng, &base, *kind)?;
            eprintln!("mutation: {k:?}");
            mutate(&base, k).map_err(|e| e.to_string())?
        }
    };
    write_out(output, &serialize_structure(&s))?;
    Ok(Answer::Yes)
}

fn dhc_paths(output: &Path) -> (PathBuf, PathBuf) {
    let text = output.to_string_lossy();
    let base = text.strip_suffix(".fles").unwrap_or(&text);
    (
        PathBuf::from(format!("{base}.e1.fles")),
        PathBuf::from(format!("{base}.e2.fles")),
    )
}

fn cmd_reduce(kind: Reduction, graph: &Path, output: &Path) -> CmdResult {
    let text = fs::read_to_string(graph).map_err(|e| format!("{}: {e}", graph.display()))?;
    let doc = GraphDocument::from_json(&text).map_err(|e| e.to_string())?;
    match kind {
        Reduction::Hc => {
            let g = doc.digraph();
            let (stripped, loops) = g.without_self_loops();
            if loops > 0 {
                eprintln!("warning: removed {loops} self-loop(s)");
            }
            if g.n == 1 {
                let yes = loops > 0;
                println!("single vertex: Hamiltonian cycle {}; no file written", if yes { "exists" } else { "does not exist" });
                return Ok(if yes { Answer::Yes } else { Answer::No });
            }
            let s = hc_structure(&stripped).map_err(|e| e.to_string())?;
            write_out(Some(output), &serialize_structure(&s))?;
        }
        Reduction::Dhc => {
            let g = doc.ugraph().map_err(|e| e.to_string())?;
            let loops_in_b = g.b.iter().filter(|&&i| g.edges.get(i).is_some_and(|&(u, v)| u == v)).count();
            let (stripped, loops) = g.without_self_loops();
            if loops > 0 {
                eprintln!("warning: removed {loops} self-loop(s)");
            }
            if g.n == 1 {
                // Removing up to ⌊|B|/2⌋ marked loops must leave one.
                let yes = loops > loops_in_b.min(g.bh());
                println!("single vertex: dynamic Hamiltonian cycle {}; no files written", if yes { "exists" } else { "does not exist" });
                return Ok(if yes { Answer::Yes } else { Answer::No });
            }
            let (e1, e2) = dhc_pair(&stripped).map_err(|e| e.to_string())?;
            let (p1, p2) = dhc_paths(output);
            write_out(Some(&p1), &serialize_structure(&e1))?;
            write_out(Some(&p2), &serialize_structure(&e2))?;
        }
    }
    Ok(Answer::Yes)
}

#[derive(Debug, Serialize)]
pub struct StatsReport {
    pub events: usize,
    pub maximal_configurations: Option<usize>,
    /// Number of distinct words; absent when over the cap.
    pub words: Option<String>,
    pub pc: Option<f64>,
    pub nfa_states: Option<usize>,
}

fn cmd_stats(file: &Path, json: bool) -> CmdResult {
    let limits = limits()?;
    let s = load(file)?;
    let cap = limits.max_configurations;
    let report = StatsReport {
        events: s.len(),
        maximal_configurations: maximal_member_sets(&s, cap).ok().map(|v| v.len()),
        words: count_words(&s, cap).ok().map(|n| n.to_string()),
        pc: pc_metric(&s, cap).ok(),
        nfa_states: encode(&s, cap).ok().map(|a| a.state_count),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        let or_cap = |v: Option<String>| v.unwrap_or_else(|| "over cap".to_string());
        println!("events: {}", report.events);
        println!("maximal configurations: {}", or_cap(report.maximal_configurations.map(|n| n.to_string())));
        println!("words: {}", or_cap(report.words.clone()));
        println!("pc: {}", or_cap(report.pc.map(|p| format!("{p:.3}"))));
        println!("nfa states: {}", or_cap(report.nfa_states.map(|n| n.to_string())));
    }
    Ok(Answer::Yes)
}

fn cmd_nfa(file: &Path, output: Option<&Path>) -> CmdResult {
    let limits = limits()?;
    let s = load(file)?;
    let a = encode(&s, limits.max_configurations).map_err(|e| e.to_string())?;
    write_out(output, &a.to_text())?;
    Ok(Answer::Yes)
}

pub fn run(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Check {
            a,
            b,
            engine,
            json,
            repeat,
            parallel,
            subset_cap,
        } => cmd_check(a, b, *engine, *json, *repeat, *parallel, *subset_cap),
        Command::Member { word, file, witness } => cmd_member(word, file, *witness),
        Command::Gen { family, output, seed } => cmd_gen(family, output.as_deref(), *seed),
        Command::Reduce { kind, graph, output } => cmd_reduce(*kind, graph, output),
        Command::Stats { file, json } => cmd_stats(file, *json),
        Command::Nfa { file, output } => cmd_nfa(file, output.as_deref()),
    }
}
