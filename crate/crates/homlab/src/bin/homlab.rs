use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use homlab::cfi::build_cfi;
use homlab::comonad::{build_universe, check_comonad_laws, coalgebra_cover_bridge, cokleisli_search, BridgeObject, ComonadParams, Kind};
use homlab::decomp::{convert, DecompObject, ObjectKind};
use homlab::error::{Error, Result};
use homlab::graph::{set_of, to_dot, to_graph6, Alphabet, Graph, LabeledGraph, Pebble, RelStructure};
use homlab::harness::io::{from_json, parse_graph, to_json};
use homlab::harness::{
    enumerate_family_with_budget, enumerate_graphs_with_budget, read_graph6_list, run_suite, suite_names, FamilyClass, FamilySpec, SuiteConfig,
    DEFAULT_MAX_N, DEFAULT_SEED,
};
use homlab::homcount::{hom_lincomb, rat, spasm, sub_coefficients, sub_count, LinComb};
use homlab::logic::{analyze, evaluate, formula_from_construction, lincomb_from_formula, parse_formula, to_primitive_normal_form, Mode};
use homlab::modelgames::{solve_all_in_one, solve_bijective_pebble, solve_exists_pebble};
use homlab::pursuit::{solve_cr, solve_ns};

/// Hard cap on `--budget`.
const MAX_BUDGET: usize = 10;

#[derive(Parser)]
#[command(name = "homlab", version, about = "Decompositions, pursuit games, homomorphism counts, counting logic and game comonads on small graphs")]
struct Cli {
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Largest graph order to enumerate.
    #[arg(long, global = true)]
    budget: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Width {
    #[arg(long)]
    k1: usize,
    #[arg(long, default_value_t = 0)]
    k2: usize,
}

#[derive(Args, Default)]
struct Format {
    /// Graph6 output, one graph per line.
    #[arg(long)]
    g6: bool,
    /// DOT output.
    #[arg(long, conflicts_with = "g6")]
    dot: bool,
}

#[derive(Subcommand)]
enum Command {
    /// One graph per isomorphism class.
    Graphs {
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        connected: bool,
        /// Read graphs from a graph6 list instead of generating them.
        #[arg(long)]
        from: Option<String>,
        #[command(flatten)]
        format: Format,
    },
    /// Members of a decomposition class with certificates.
    Family {
        #[arg(long, value_enum)]
        class: ClassArg,
        #[command(flatten)]
        width: Width,
        #[arg(long)]
        q: Option<usize>,
        #[arg(long)]
        n_max: usize,
        #[arg(long)]
        connected: bool,
        #[command(flatten)]
        format: Format,
    },
    /// hom(F, G); F may also be a linear combination in JSON.
    Hom {
        pattern: String,
        target: String,
        /// Target labels as `x1=0`.
        #[arg(long = "label")]
        labels: Vec<String>,
    },
    /// Subgraph counts, directly and through the spasm coefficients.
    Sub {
        pattern: String,
        target: Option<String>,
        /// Print the coefficients and the spasm.
        #[arg(long)]
        coefficients: bool,
    },
    /// CFI graph of a connected base graph.
    Cfi {
        /// Connected base graph.
        #[arg(long)]
        graph: String,
        /// Twisted vertex; repeat or separate with commas.
        #[arg(long, value_delimiter = ',')]
        twist: Vec<usize>,
        #[command(flatten)]
        format: Format,
    },
    Solve {
        #[arg(value_enum)]
        game: SolveArg,
        #[arg(long)]
        graph: String,
        #[command(flatten)]
        width: Width,
        /// Round budget for cops and robber.
        #[arg(long, visible_alias = "q")]
        rounds: Option<usize>,
        /// Also write the winning strategy to this file.
        #[arg(long)]
        emit_strategy: Option<String>,
    },
    Game {
        #[arg(value_enum)]
        variant: GameArg,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[command(flatten)]
        width: Width,
        /// Round bound for the pebble games.
        #[arg(long)]
        rounds: Option<usize>,
        /// Largest pattern order for the all-in-one games.
        #[arg(long)]
        nmax: Option<usize>,
    },
    Logic {
        #[command(subcommand)]
        command: LogicCommand,
    },
    Comonad {
        #[command(subcommand)]
        command: ComonadCommand,
    },
    /// Runs a named suite; `--list` prints the names.
    Suite {
        name: Option<String>,
        #[arg(long)]
        list: bool,
        /// Rerun a single instance by id.
        #[arg(long)]
        instance: Option<String>,
    },
    /// Converts a decomposition, cover or construction tree given as JSON.
    Convert {
        object: String,
        graph: String,
        #[arg(long, value_enum)]
        to: TargetArg,
    },
}

#[derive(Subcommand)]
enum LogicCommand {
    /// Truth value on a graph; labels as `x1=0`.
    Eval {
        formula: String,
        graph: String,
        #[arg(long = "label")]
        labels: Vec<String>,
    },
    Analyze {
        formula: String,
        #[command(flatten)]
        width: Width,
        #[arg(long)]
        q: Option<usize>,
    },
    /// Formula stating hom(F, G) = m, from a decomposition found by the matching game.
    Compile {
        pattern: String,
        #[command(flatten)]
        width: Width,
        #[arg(long)]
        m: usize,
        /// Tree mode relative to graphs of this order.
        #[arg(long)]
        order: Option<usize>,
        /// Also print the primitive normal form (path mode).
        #[arg(long)]
        normal_form: bool,
    },
    /// Linear combination modelling a formula.
    Lincomb {
        formula: String,
        #[arg(long)]
        order: Option<usize>,
    },
}

#[derive(Subcommand)]
enum ComonadCommand {
    Build {
        graph: String,
        #[command(flatten)]
        params: ParamArgs,
    },
    Laws {
        graph: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long, default_value_t = 8)]
        panel: usize,
    },
    /// Converts a coalgebra or forest cover given as JSON.
    Bridge { object: String, graph: String },
    Search {
        left: String,
        right: String,
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        iso: bool,
    },
}

#[derive(Args)]
struct ParamArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    #[command(flatten)]
    width: Width,
    /// Round bound q, or the sequence length for the pebble-relation kind.
    #[arg(long, visible_alias = "length")]
    bound: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Path,
    UnionPath,
    Tree,
    All,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveArg {
    Ns,
    Cr,
}

#[derive(Clone, Copy, ValueEnum)]
enum GameArg {
    Exists,
    Bp,
    Ap,
    Abp,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    P,
    Pr,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    Decomposition,
    Cover,
    Construction,
}

/// A graph given inline as graph6 or JSON, or as `@path`.
fn graph_arg(arg: &str) -> Result<Graph> {
    parse_graph(&text_arg(arg)?)
}

fn text_arg(arg: &str) -> Result<String> {
    match arg.strip_prefix('@') {
        Some(path) => fs::read_to_string(path).map_err(|e| Error::invalid(format!("{path}: {e}"))),
        None => Ok(arg.to_string()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    emit(&format!("{}\n", to_json(value)?))
}

/// Writes to stdout; a closed pipe ends the output quietly.
fn emit(text: &str) -> Result<()> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::invalid(e.to_string())),
        _ => Ok(()),
    }
}

fn print_graphs(gs: &[Graph], format: &Format) -> Result<()> {
    if format.g6 {
        emit(&gs.iter().map(|g| to_graph6(g) + "\n").collect::<String>())?;
    } else if format.dot {
        for (i, g) in gs.iter().enumerate() {
            emit(&to_dot(&LabeledGraph::unlabeled(g.clone(), Alphabet::raw(0, 0)), &format!("g{i}")))?;
        }
    } else {
        print_json(&gs)?;
    }
    Ok(())
}

fn params(p: &ParamArgs) -> ComonadParams {
    let kind = match p.kind {
        KindArg::P => Kind::P,
        KindArg::Pr => Kind::Pr,
    };
    ComonadParams { kind, k1: p.width.k1, k2: p.width.k2, bound: p.bound }
}

/// A graph whose JSON may carry labels, with `x1=0` style labels from the command line on top.
fn labeled_arg(arg: &str, extra: &[String]) -> Result<LabeledGraph> {
    let text = text_arg(arg)?;
    let base = if text.trim_start().starts_with('{') {
        from_json::<LabeledGraph>(text.trim())?
    } else {
        LabeledGraph::unlabeled(parse_graph(&text)?, Alphabet::raw(0, 0))
    };
    let mut pairs: Vec<(Pebble, usize)> = base.labels().collect();
    for l in extra {
        let (p, v) = l.split_once('=').ok_or_else(|| Error::invalid(format!("label {l} is not of the form x1=0")))?;
        let v: usize = v.parse().map_err(|_| Error::invalid(format!("bad vertex in label {l}")))?;
        let p: Pebble = p.parse()?;
        pairs.retain(|&(q, _)| q != p);
        pairs.push((p, v));
    }
    let alphabet = base.alphabet().join(Alphabet::covering(pairs.iter().map(|&(p, _)| p)));
    LabeledGraph::with_labels(base.graph().clone(), alphabet, &pairs)
}

/// Returns whether the command succeeded; suite failures give `false`.
fn run(cli: Cli) -> Result<bool> {
    let budget = cli.budget.unwrap_or(DEFAULT_MAX_N);
    if budget > MAX_BUDGET {
        return Err(Error::invalid(format!("--budget is capped at {MAX_BUDGET}")));
    }
    match cli.command {
        Command::Graphs { n_max, connected, from, format } => {
            let gs = match from {
                Some(path) => read_graph6_list(&text_arg(&format!("@{path}"))?)?
                    .into_iter()
                    .filter(|g| g.n() <= n_max && (!connected || g.is_connected()))
                    .collect(),
                None => enumerate_graphs_with_budget(n_max, connected, budget)?,
            };
            print_graphs(&gs, &format)?;
        }
        Command::Family { class, width, q, n_max, connected, format } => {
            let Width { k1, k2 } = width;
            let class = match class {
                ClassArg::Path => FamilyClass::Path { k1, k2 },
                ClassArg::UnionPath => FamilyClass::UnionPath { k1, k2 },
                ClassArg::Tree => FamilyClass::Tree { k1, k2, q: q.ok_or_else(|| Error::invalid("tree families need --q"))? },
                ClassArg::All => FamilyClass::All,
            };
            let members = enumerate_family_with_budget(FamilySpec { class, max_n: n_max, connected }, budget)?;
            if format.g6 || format.dot {
                print_graphs(&members.into_iter().map(|m| m.graph).collect::<Vec<_>>(), &format)?;
            } else {
                print_json(&members)?;
            }
        }
        Command::Hom { pattern, target, labels } => {
            let text = text_arg(&pattern)?;
            let lc = if text.trim_start().starts_with('[') {
                from_json::<LinComb>(&text)?
            } else {
                LinComb::from_terms(vec![(rat(1), labeled_arg(&pattern, &[])?)])
            };
            let target = labeled_arg(&target, &labels)?;
            let alphabet = lc.terms().iter().fold(target.alphabet(), |a, (_, t)| a.join(t.alphabet()));
            let target = LabeledGraph::with_labels(target.graph().clone(), alphabet, &target.labels().collect::<Vec<_>>())?;
            print_json(&json!({ "hom": hom_lincomb(&lc, &target)?.to_string() }))?;
        }
        Command::Sub { pattern, target, coefficients } => {
            let f = graph_arg(&pattern)?;
            let mut out = serde_json::Map::new();
            if let Some(t) = target {
                let g = graph_arg(&t)?;
                let lc = sub_coefficients(&f)?;
                out.insert("direct".into(), json!(sub_count(&f, &g).to_string()));
                out.insert("via_coefficients".into(), json!(homlab::homcount::sub_via_coefficients(&lc, &g).to_string()));
            }
            if coefficients {
                out.insert("coefficients".into(), serde_json::to_value(sub_coefficients(&f)?).map_err(|e| Error::invalid(e.to_string()))?);
                out.insert("spasm".into(), json!(spasm(&f).iter().map(to_graph6).collect::<Vec<_>>()));
            }
            print_json(&out)?;
        }
        Command::Cfi { graph, twist, format } => {
            let x = build_cfi(&graph_arg(&graph)?, set_of(twist))?;
            if format.g6 || format.dot {
                print_graphs(&[x.graph], &format)?;
            } else {
                print_json(&x)?;
            }
        }
        Command::Solve { game, graph, width, rounds, emit_strategy } => {
            let g = graph_arg(&graph)?;
            let (solution, strategy) = match game {
                SolveArg::Ns => {
                    let s = solve_ns(&g, width.k1, width.k2)?;
                    let strategy = serde_json::to_value(&s.strategy).map_err(|e| Error::invalid(e.to_string()))?;
                    (serde_json::to_value(&s), strategy)
                }
                SolveArg::Cr => {
                    let q = rounds.ok_or_else(|| Error::invalid("cops and robber needs --rounds"))?;
                    let s = solve_cr(&g, width.k1, width.k2, q)?;
                    let strategy = serde_json::to_value(&s.strategy).map_err(|e| Error::invalid(e.to_string()))?;
                    (serde_json::to_value(&s), strategy)
                }
            };
            if let Some(path) = emit_strategy {
                fs::write(&path, to_json(&strategy)?).map_err(|e| Error::invalid(format!("{path}: {e}")))?;
            }
            print_json(&solution.map_err(|e| Error::invalid(e.to_string()))?)?;
        }
        Command::Game { variant, a, b, width, rounds, nmax } => {
            let (a, b) = (graph_arg(&a)?, graph_arg(&b)?);
            let (sa, sb) = (RelStructure::from_graph(&a), RelStructure::from_graph(&b));
            let Width { k1, k2 } = width;
            let nmax = || nmax.ok_or_else(|| Error::invalid("the all-in-one games need --nmax"));
            let verdict = match variant {
                GameArg::Exists => solve_exists_pebble(&sa, &sb, k1, k2, rounds)?,
                GameArg::Bp => solve_bijective_pebble(&a, &b, k1, k2, rounds.ok_or_else(|| Error::invalid("this game needs --rounds"))?)?,
                GameArg::Ap => solve_all_in_one(&sa, &sb, k1, k2, nmax()?, false)?,
                GameArg::Abp => solve_all_in_one(&sa, &sb, k1, k2, nmax()?, true)?,
            };
            print_json(&verdict)?;
        }
        Command::Logic { command } => logic(command)?,
        Command::Comonad { command } => comonad(command, cli.seed)?,
        Command::Suite { name, list, instance } => {
            if list {
                emit(&suite_names().iter().map(|n| format!("{n}\n")).collect::<String>())?;
                return Ok(true);
            }
            let name = name.ok_or_else(|| Error::invalid("give a suite name or --list"))?;
            let config = SuiteConfig { seed: cli.seed, budget: cli.budget, instance };
            let report = run_suite(&name, &config)?;
            print_json(&report)?;
            return Ok(report.passed);
        }
        Command::Convert { object, graph, to } => {
            let g = graph_arg(&graph)?;
            let src: DecompObject = from_json(&text_arg(&object)?)?;
            let kind = match to {
                TargetArg::Decomposition => ObjectKind::Decomposition,
                TargetArg::Cover => ObjectKind::Cover,
                TargetArg::Construction => ObjectKind::Construction,
            };
            print_json(&convert(&src, kind, &g)?)?;
        }
    }
    Ok(true)
}

fn logic(command: LogicCommand) -> Result<()> {
    match command {
        LogicCommand::Eval { formula, graph, labels } => {
            let f = parse_formula(&text_arg(&formula)?)?;
            let g = labeled_arg(&graph, &labels)?;
            print_json(&json!({ "holds": evaluate(&f, &g)? }))
        }
        LogicCommand::Analyze { formula, width, q } => {
            let f = parse_formula(&text_arg(&formula)?)?;
            print_json(&analyze(&f, Alphabet::new(width.k1, width.k2)?, q)?)
        }
        LogicCommand::Compile { pattern, width, m, order, normal_form } => {
            let f = graph_arg(&pattern)?;
            let (mode, decomposition) = match order {
                None => (Mode::Path, solve_ns(&f, width.k1, width.k2)?.decomposition),
                Some(order) => (Mode::Tree { order }, solve_cr(&f, width.k1, width.k2, f.n().max(1))?.decomposition),
            };
            let d = decomposition.ok_or_else(|| Error::invalid("the pattern is not in the class"))?;
            let ct = homlab::decomp::decomposition_to_construction(&d, &f)?;
            let phi = formula_from_construction(&ct, m, mode)?;
            let mut out = json!({ "formula": phi.to_string() });
            if normal_form && mode == Mode::Path {
                out["normal_form"] = json!(to_primitive_normal_form(&phi)?.to_string());
            }
            print_json(&out)
        }
        LogicCommand::Lincomb { formula, order } => {
            let f = parse_formula(&text_arg(&formula)?)?;
            let mode = order.map_or(Mode::Path, |order| Mode::Tree { order });
            print_json(&lincomb_from_formula(&f, mode)?)
        }
    }
}

fn comonad(command: ComonadCommand, seed: u64) -> Result<()> {
    match command {
        ComonadCommand::Build { graph, params: p } => {
            let u = build_universe(&RelStructure::from_graph(&graph_arg(&graph)?), params(&p))?;
            let elements: Vec<_> = (0..u.len()).map(|e| u.sequence(e)).collect();
            print_json(&json!({ "size": u.len(), "elements": elements, "structure": u.structure, "counit": u.counit }))
        }
        ComonadCommand::Laws { graph, params: p, panel } => {
            print_json(&check_comonad_laws(&RelStructure::from_graph(&graph_arg(&graph)?), params(&p), panel, seed)?)
        }
        ComonadCommand::Bridge { object, graph } => {
            let x: BridgeObject = from_json(&text_arg(&object)?)?;
            print_json(&coalgebra_cover_bridge(&x, &graph_arg(&graph)?)?)
        }
        ComonadCommand::Search { left, right, params: p, iso } => {
            let (a, b) = (graph_arg(&left)?, graph_arg(&right)?);
            print_json(&cokleisli_search(&RelStructure::from_graph(&a), &RelStructure::from_graph(&b), params(&p), iso)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
