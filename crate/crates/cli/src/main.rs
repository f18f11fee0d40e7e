use std::collections::BTreeSet;
use std::fmt;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use lpdecomp::decompose::{decompose_program, DecomposeOptions};
use lpdecomp::oracle::{answer_sets, ground, GroundingLimits, SolveLimits};
use lpdecomp::parse::{parse_atom_list, parse_graph, parse_program, parse_qdimacs, parse_reified, print_program};
use lpdecomp::rewrite::{self, AbductionInstance};
use lpdecomp::treedecomp::Heuristic;
use lpdecomp::{ErrorClass, GroundAtom, Program};

#[derive(Parser, Debug)]
#[command(
    name = "lpdecomp",
    version,
    about = "Decompose large logic-program rules along tree decompositions"
)]
struct Cli {
    /// Write results here instead of stdout.
    #[arg(short, long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    #[command(flatten)]
    limits: Limits,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Limits {
    /// Undecided atoms the answer-set enumerator accepts.
    #[arg(long, global = true, default_value_t = 24, value_parser = clap::value_parser!(u64).range(1..))]
    max_atoms: u64,

    #[arg(long, global = true, default_value_t = 1_000_000, value_parser = clap::value_parser!(u64).range(1..))]
    max_ground_rules: u64,

    /// Reject programs with an aggregate over more variables than this.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    max_aggregate_width: Option<u64>,
}

#[derive(Args, Debug)]
struct DecomposeArgs {
    #[arg(long, default_value = "min-fill")]
    heuristic: Heuristic,

    /// 0 breaks elimination ties by variable name, anything else seeds a RNG.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Decompose every rule, even when it does not shrink.
    #[arg(long)]
    no_threshold: bool,

    /// Rename predicates that clash with `temp_`/`dom_` instead of failing.
    #[arg(long)]
    auto_rename: bool,

    /// Domain size used for grounding estimates (default: the program's).
    #[arg(long)]
    domain_size: Option<u64>,
}

impl DecomposeArgs {
    fn options(&self) -> DecomposeOptions {
        DecomposeOptions {
            heuristic: self.heuristic,
            seed: self.seed,
            threshold: !self.no_threshold,
            auto_rename: self.auto_rename,
            domain_size: self.domain_size,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decompose every rule; the program goes to stdout, statistics to stderr.
    Decompose {
        input: String,
        #[command(flatten)]
        opts: DecomposeArgs,
    },
    /// Translate an instance into a logic program.
    #[command(subcommand)]
    Rewrite(RewriteCommand),
    /// Ground a program.
    Ground { input: String },
    /// Print every answer set; exit 10 if there is one, 20 otherwise.
    Solve { input: String },
    /// Compare the answer sets of two programs; exit 0 if equal, 3 otherwise.
    Check {
        left: String,
        right: String,
        /// Comma-separated predicate prefixes to drop before comparing.
        #[arg(long, value_delimiter = ',', default_value = "temp_,dom_")]
        project_away: Vec<String>,
    },
    /// Per-rule width and grounding estimates.
    Stats {
        input: String,
        #[command(flatten)]
        opts: DecomposeArgs,
    },
}

#[derive(Subcommand, Debug)]
enum RewriteCommand {
    /// 3-colorability as a single constraint.
    #[command(name = "3col")]
    ThreeCol { input: String },
    /// Second-level 3-coloring (needs a `#V1` partition section).
    #[command(name = "3col2")]
    ThreeColSecond { input: String },
    /// ∀∃ QBF with the guess-and-saturate encoding.
    #[command(name = "qbf2-classic")]
    Qbf2Classic { input: String },
    /// ∀∃ QBF as one large constraint.
    Qbf2 { input: String },
    /// ∃∀∃ QBF as one large rule.
    Qbf3 { input: String },
    /// Head-cycle-free disjunctive program (reified) to a normal program.
    Shift { input: String },
    /// Propositional abduction (reified program, hypothesis and manifestation id lists).
    Abduce {
        input: String,
        #[arg(long)]
        hyp: String,
        #[arg(long)]
        man: String,
    },
}

#[derive(Debug)]
struct AggregateTooWide {
    rule: String,
    width: usize,
    limit: u64,
}

impl fmt::Display for AggregateTooWide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "aggregate over {} variables exceeds the limit of {} in rule `{}`",
            self.width, self.limit, self.rule
        )
    }
}

impl std::error::Error for AggregateTooWide {}

/// A finished command: what to print and how to exit.
struct Outcome {
    stdout: String,
    code: u8,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }
}

fn read_input(path: &str) -> Result<String> {
    if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).context("reading stdin")?;
        Ok(s)
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {path}"))
    }
}

fn load_program(path: &str, limits: &Limits) -> Result<Program> {
    let program = parse_program(&read_input(path)?).with_context(|| format!("in {path}"))?;
    if let Some(limit) = limits.max_aggregate_width {
        for rule in &program.rules {
            for agg in &rule.aggregates {
                let width = agg.variables().len();
                if width as u64 > limit {
                    return Err(AggregateTooWide {
                        rule: rule.to_string(),
                        width,
                        limit,
                    }
                    .into());
                }
            }
        }
    }
    Ok(program)
}

fn answer_atom_sets(program: &Program, limits: &Limits) -> Result<BTreeSet<BTreeSet<GroundAtom>>> {
    let g = ground(
        program,
        &GroundingLimits {
            max_ground_rules: limits.max_ground_rules as usize,
        },
    )?;
    info!("{} ground rules over {} atoms", g.program.rules.len(), g.atom_count);
    let sets = answer_sets(
        &g.program,
        &SolveLimits {
            max_atoms: limits.max_atoms as usize,
        },
    )?;
    Ok(sets.iter().map(|m| g.program.atoms_of(m)).collect())
}

fn show_set(set: &BTreeSet<GroundAtom>) -> String {
    let atoms: Vec<String> = set.iter().map(ToString::to_string).collect();
    format!("{{{}}}", atoms.join(", "))
}

fn rewrite(cmd: &RewriteCommand) -> Result<Program> {
    use RewriteCommand::*;
    Ok(match cmd {
        ThreeCol { input } => rewrite::threecol_single_rule(&parse_graph(&read_input(input)?)?),
        ThreeColSecond { input } => rewrite::threecol_second_level(&parse_graph(&read_input(input)?)?)?,
        Qbf2Classic { input } => rewrite::qbf2_classic(&parse_qdimacs(&read_input(input)?)?)?,
        Qbf2 { input } => rewrite::qbf2_large_rule(&parse_qdimacs(&read_input(input)?)?)?,
        Qbf3 { input } => rewrite::qbf3_large_rule(&parse_qdimacs(&read_input(input)?)?)?,
        Shift { input } => rewrite::disjunctive_to_normal(&parse_reified(&read_input(input)?)?),
        Abduce { input, hyp, man } => {
            let gp = parse_reified(&read_input(input)?)?;
            let h = parse_atom_list(&read_input(hyp)?, &gp).with_context(|| format!("in {hyp}"))?;
            let m = parse_atom_list(&read_input(man)?, &gp).with_context(|| format!("in {man}"))?;
            rewrite::abduction_encoding(&AbductionInstance::new(gp, h, m)?)
        }
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let limits = &cli.limits;
    match &cli.command {
        Command::Decompose { input, opts } => {
            let program = load_program(input, limits)?;
            let (out, report) = decompose_program(&program, &opts.options())?;
            eprint!("{report}");
            let applied = report.rules.iter().filter(|r| r.applied).count();
            eprintln!(
                "decomposed {applied} of {} rules, {} rules emitted",
                report.rules.len(),
                out.rules.len()
            );
            Ok(Outcome::ok(print_program(&out)))
        }
        Command::Rewrite(cmd) => Ok(Outcome::ok(print_program(&rewrite(cmd)?))),
        Command::Ground { input } => {
            let program = load_program(input, limits)?;
            let g = ground(
                &program,
                &GroundingLimits {
                    max_ground_rules: limits.max_ground_rules as usize,
                },
            )?;
            Ok(Outcome::ok(g.program.to_string()))
        }
        Command::Solve { input } => {
            let sets = answer_atom_sets(&load_program(input, limits)?, limits)?;
            let mut stdout = String::new();
            for s in &sets {
                stdout.push_str(&show_set(s));
                stdout.push('\n');
            }
            let code = if sets.is_empty() { 20 } else { 10 };
            Ok(Outcome { stdout, code })
        }
        Command::Check {
            left,
            right,
            project_away,
        } => {
            let project = |sets: BTreeSet<BTreeSet<GroundAtom>>| -> BTreeSet<BTreeSet<GroundAtom>> {
                sets.into_iter()
                    .map(|s| {
                        s.into_iter()
                            .filter(|a| {
                                !project_away
                                    .iter()
                                    .any(|p| !p.is_empty() && a.predicate.starts_with(p.as_str()))
                            })
                            .collect()
                    })
                    .collect()
            };
            let a = project(answer_atom_sets(&load_program(left, limits)?, limits)?);
            let b = project(answer_atom_sets(&load_program(right, limits)?, limits)?);
            if a == b {
                return Ok(Outcome::ok(format!("equal ({} answer sets)\n", a.len())));
            }
            let stdout = match a.difference(&b).next() {
                Some(w) => format!("different\nonly in {left}: {}\n", show_set(w)),
                None => format!(
                    "different\nonly in {right}: {}\n",
                    show_set(b.difference(&a).next().unwrap())
                ),
            };
            Ok(Outcome { stdout, code: 3 })
        }
        Command::Stats { input, opts } => {
            let program = load_program(input, limits)?;
            let (_, report) = decompose_program(&program, &opts.options())?;
            let mut stdout = format!("domain size {}\n", report.domain_size);
            stdout.push_str("rule  vars  width  emitted  est_before  est_after  applied\n");
            for r in &report.rules {
                stdout.push_str(&format!(
                    "{:>4}  {:>4}  {:>5}  {:>7}  {:>10}  {:>9}  {}\n",
                    r.index,
                    r.vars,
                    r.width,
                    r.emitted,
                    r.est_before,
                    r.est_after,
                    if r.applied { "yes" } else { "no" }
                ));
            }
            Ok(Outcome::ok(stdout))
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<AggregateTooWide>().is_some() {
        return 4;
    }
    match err.downcast_ref::<lpdecomp::Error>().map(lpdecomp::Error::class) {
        Some(ErrorClass::Input) | None => 1,
        Some(ErrorClass::Semantic) => 2,
        Some(ErrorClass::Limit) => 4,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &outcome.stdout).with_context(|| format!("writing {}", path.display())),
        None => io::stdout()
            .lock()
            .write_all(outcome.stdout.as_bytes())
            .context("writing stdout"),
    };
    if let Err(e) = written {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    ExitCode::from(outcome.code)
}
