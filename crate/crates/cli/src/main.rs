//! `bsreach`: decide, inspect and generate BSREACH instances.
//!
//! Exit status: 0 when a question was decided, 2 on malformed input,
//! 3 when a search budget ran out.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use bsreach::{
    bqa_graph, bva_graph, canonical_contexts, classify, decide, family, format_word, gen_bqa, gen_bva, gen_random,
    graph_from_json, is_identity, oracle_bsreach, parse_word, scope, Decision, Engine, Error, Family, GadgetMachine,
    Graph, Instance, Scope, ScopeMode, Slot, SolverOptions, TransitionSpec, ValenceSystem, Verdict, WitnessStep,
};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

/// Appends a line to the output buffer.
macro_rules! out {
    ($buf:expr, $($arg:tt)*) => {{
        use std::fmt::Write as _;
        writeln!($buf, $($arg)*).expect("writing to a String cannot fail");
    }};
}

const EXIT_INPUT: u8 = 2;
const EXIT_LIMIT: u8 = 3;

#[derive(Parser)]
#[command(name = "bsreach", version, about = "Scope-bounded reachability for valence systems over graph monoids")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FastPath {
    Auto,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    KInput,
    KFixed,
}

#[derive(Subcommand)]
enum Command {
    /// Decide reachability within scope bound k.
    Check {
        file: PathBuf,
        /// Overrides the instance's k.
        #[arg(long)]
        k: Option<usize>,
        /// Print the path of appended contexts after the verdict.
        #[arg(long)]
        witness: bool,
        #[arg(long, value_enum, default_value = "auto")]
        fast_path: FastPath,
        /// Maximum number of visited search nodes.
        #[arg(long, default_value_t = bsreach::solver::DEFAULT_NODE_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Print the scope of a word, or `inf`.
    Scope {
        /// Graph document or instance file.
        file: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Print whether a word equals the identity.
    Reduce {
        file: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Print the context decomposition of a word, one context per line.
    Decompose {
        file: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Print the complexity class of BSREACH for the graph.
    Classify {
        file: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
    /// Search runs by word length up to a bound.
    Oracle {
        file: PathBuf,
        /// Scope bound, or `inf`; defaults to the instance's k.
        #[arg(long)]
        k: Option<String>,
        #[arg(long)]
        max_len: usize,
    },
    /// Generate an instance as JSON on stdout.
    #[command(subcommand)]
    Gen(Gen),
}

#[derive(Subcommand)]
enum Gen {
    /// Family graph such as P_3, MP_2_3, UC_5, LC_3, UCminus_2, SC_4 or B_3,
    /// with one state looping on every operation.
    Family { name: String },
    /// Queue gadget for a machine file.
    Bqa {
        machine: PathBuf,
        /// Graph document; defaults to looped, independent `u` and `v`.
        #[arg(long)]
        graph: Option<PathBuf>,
        #[arg(long, default_value = "u")]
        u: String,
        #[arg(long, default_value = "v")]
        v: String,
    },
    /// Bit-vector gadget for a machine file.
    Bva {
        machine: PathBuf,
        #[arg(long)]
        k: usize,
        /// Graph document; defaults to the unlooped clique on a1, b1, ...
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Seeded random instance.
    Random {
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        vertices: usize,
        #[arg(long, default_value_t = 3)]
        states: usize,
        #[arg(long, default_value_t = 4)]
        transitions: usize,
        #[arg(long, default_value_t = 3)]
        word_len: usize,
        #[arg(long)]
        k: Option<usize>,
    },
}

/// Failures split by exit status.
enum Failure {
    Input(anyhow::Error),
    Limit(String),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Input(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut buf = String::new();
    let code = match run(cli.command, &mut buf) {
        Ok(code) => code,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Limit(msg)) => {
            buf.clear();
            out!(buf, "LIMIT");
            eprintln!("{msg}");
            ExitCode::from(EXIT_LIMIT)
        }
    };
    // A closed pipe only means the reader lost interest.
    let mut stdout = std::io::stdout().lock();
    let _ = stdout.write_all(buf.as_bytes()).and_then(|()| stdout.flush());
    code
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_instance(path: &Path) -> Result<Instance> {
    Instance::from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_graph(path: &Path) -> Result<Graph> {
    graph_from_json(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_machine(path: &Path) -> Result<GadgetMachine> {
    serde_json::from_str(&read(path)?).with_context(|| format!("malformed machine in {}", path.display()))
}

/// Budget errors from the library surface as LIMIT; everything else is input.
fn lib<T>(r: bsreach::Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(|e| match e {
        Error::ResourceLimit(msg) => Failure::Limit(msg),
        e => Failure::Input(e.into()),
    })
}

fn run(command: Command, buf: &mut String) -> std::result::Result<ExitCode, Failure> {
    match command {
        Command::Check { file, k, witness, fast_path, budget, workers, format } => {
            let inst = load_instance(&file)?;
            let k = k.or(inst.k).context("no scope bound: pass --k or set \"k\" in the instance")?;
            if workers == 0 {
                return Err(anyhow::anyhow!("--workers must be at least 1").into());
            }
            let opts = SolverOptions { fast_path: fast_path == FastPath::Auto, budget, workers };
            let decision = lib(decide(&inst.system, k, &opts))?;
            print_decision(buf, &inst.system, &decision, witness, format);
            Ok(if decision.verdict == Verdict::Limit { ExitCode::from(EXIT_LIMIT) } else { ExitCode::SUCCESS })
        }
        Command::Scope { file, word } => {
            let g = load_graph(&file)?;
            let w = parse_word(&g, &word).context("bad word")?;
            out!(buf, "{}", lib(scope(&g, &w, bsreach::words::DEFAULT_BUDGET))?);
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce { file, word } => {
            let g = load_graph(&file)?;
            let w = parse_word(&g, &word).context("bad word")?;
            out!(buf, "{}", if lib(is_identity(&g, &w))? { "identity" } else { "not-identity" });
            Ok(ExitCode::SUCCESS)
        }
        Command::Decompose { file, word } => {
            let g = load_graph(&file)?;
            let w = parse_word(&g, &word).context("bad word")?;
            let d = canonical_contexts(&g, &w);
            for i in 0..d.count() {
                out!(buf, "[class={}] {}", d.classes[i], format_word(&g, &w[d.range(i)]));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Classify { file, mode } => {
            let g = load_graph(&file)?;
            let mode = if mode == Mode::KInput { ScopeMode::KInput } else { ScopeMode::KFixed };
            out!(buf, "{}", classify(&g, mode));
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { file, k, max_len } => {
            let inst = load_instance(&file)?;
            let k = match k.as_deref() {
                Some("inf") => Scope::Infinite,
                Some(s) => match s.parse::<usize>() {
                    Ok(0) | Err(_) => return Err(anyhow::anyhow!("--k must be a positive integer or `inf`").into()),
                    Ok(k) => Scope::Finite(k),
                },
                None => Scope::Finite(inst.k.context("no scope bound: pass --k or set \"k\" in the instance")?),
            };
            let sys = &inst.system;
            match lib(oracle_bsreach(sys, k, max_len))? {
                Some(w) => {
                    out!(buf, "WITNESS");
                    let states: Vec<&str> = std::iter::once(sys.initial)
                        .chain(w.transitions.iter().map(|&t| sys.transitions[t].to))
                        .map(|q| sys.states[q].as_str())
                        .collect();
                    out!(buf, "states: {}", states.join(" "));
                    out!(buf, "word: {}", format_word(&sys.graph, &w.word));
                    out!(buf, "scope: {}", w.scope);
                }
                None => out!(buf, "NONE-UP-TO {max_len}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen(g) => {
            out!(buf, "{}", generate(g)?.to_json());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn generate(g: Gen) -> std::result::Result<Instance, Failure> {
    Ok(match g {
        Gen::Family { name } => {
            let f: Family = lib(name.parse())?;
            let g = lib(family(f))?;
            let transitions = g
                .names()
                .iter()
                .flat_map(|v| ["+", "-"].map(|s| TransitionSpec { from: "q".into(), word: vec![format!("{v}{s}")], to: "q".into() }))
                .collect();
            let spec = bsreach::SystemSpec { states: vec!["q".into()], initial: "q".into(), final_state: "q".into(), transitions };
            lib(Instance::new(lib(ValenceSystem::from_spec(g, &spec))?, None))?
        }
        Gen::Bqa { machine, graph, u, v } => {
            let m = load_machine(&machine)?;
            let (g, u, v) = match graph {
                Some(path) => {
                    let g = load_graph(&path)?;
                    let (u, v) = (lib(g.vertex(&u))?, lib(g.vertex(&v))?);
                    (g, u, v)
                }
                None => lib(bqa_graph())?,
            };
            let (sys, k) = lib(gen_bqa(&m, &g, u, v))?;
            lib(Instance::new(sys, Some(k)))?
        }
        Gen::Bva { machine, k, graph } => {
            let m = load_machine(&machine)?;
            let g = match graph {
                Some(path) => load_graph(&path)?,
                None => lib(bva_graph(m.n))?,
            };
            lib(Instance::new(lib(gen_bva(&m, &g, k))?, Some(k)))?
        }
        Gen::Random { seed, vertices, states, transitions, word_len, k } => {
            let (_, sys) = lib(gen_random(seed, vertices, states, transitions, word_len))?;
            lib(Instance::new(sys, k))?
        }
    })
}

fn engine_name(e: Engine) -> &'static str {
    match e {
        Engine::Trivial => "trivial",
        Engine::AntiClique => "anti-clique",
        Engine::Singleton => "singleton",
        Engine::Generic => "generic",
    }
}

/// One line per appended context: its class, end state and blocks.
fn witness_lines(sys: &ValenceSystem, steps: &[WitnessStep]) -> Vec<String> {
    let expanded = sys.expanded();
    let mut out = Vec::new();
    for (i, s) in steps.iter().enumerate() {
        let blocks: Vec<String> = s
            .context
            .blocks
            .iter()
            .map(|slot| match slot {
                Slot::E => "E".to_string(),
                Slot::Block(b) => b.display(&sys.graph, &expanded),
            })
            .collect();
        out.push(format!(
            "step {} class={} state={} blocks={}",
            i + 1,
            s.class,
            expanded.states[s.node.last_state],
            blocks.join(" ")
        ));
    }
    out
}

fn print_decision(buf: &mut String, sys: &ValenceSystem, d: &Decision, witness: bool, format: Format) {
    let steps = match &d.verdict {
        Verdict::Reachable(steps) => Some(steps.as_slice()),
        _ => None,
    };
    match format {
        Format::Text => {
            out!(buf, "{}", d.verdict.label());
            if witness {
                out!(buf, "engine {} nodes {}", engine_name(d.engine), d.nodes);
                if let Some(steps) = steps {
                    for line in witness_lines(sys, steps) {
                        out!(buf, "{line}");
                    }
                }
            }
        }
        Format::Json => {
            let witness = match steps {
                Some(steps) if witness => json!(witness_lines(sys, steps)),
                _ => serde_json::Value::Null,
            };
            let doc = json!({
                "verdict": d.verdict.label(),
                "engine": engine_name(d.engine),
                "nodes": d.nodes,
                "witness": witness,
            });
            out!(buf, "{doc}");
        }
    }
}
