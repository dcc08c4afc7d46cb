use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use grig_core::equation::{parse_equation_file, Assignment};
use grig_core::pipeline::{Ledger, Solver, SolverConfig};
use grig_core::quotient::{multiplication_table_dump, ordered_classes};
use grig_core::split::split_standard;
use grig_core::width::{stabilization_index, theta_csv, theta_orbits, width_probe, WidthReport};
use grig_core::{order, to_standard, Constraint, Element};

#[derive(Parser, Debug)]
#[command(
    name = "grigsolve",
    version,
    about = "Constrained quadratic equations over the Grigorchuk group"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide a constrained equation read from a file.
    Solve {
        file: PathBuf,
        #[command(flatten)]
        run: RunConfig,
    },
    /// Print the order of a group element.
    Order { word: String },
    /// Show one splitting step for each completion of the file's constraint.
    Split {
        file: PathBuf,
        /// Number of constraint completions to show.
        #[arg(long, default_value_t = 1)]
        limit: usize,
    },
    /// Print the 16 classes of G/K.
    QuotientTable {
        /// Also print the multiplication table.
        #[arg(long)]
        multiplication: bool,
    },
    /// Probe the commutator width of an element.
    Width {
        word: String,
        #[arg(long, default_value_t = 3)]
        n_max: usize,
        #[command(flatten)]
        run: RunConfig,
    },
    /// CSV of theta class counts for n = 3..=n_max.
    Theta {
        #[arg(long, default_value_t = 6)]
        n_max: usize,
    },
}

#[derive(clap::Args, Debug)]
struct RunConfig {
    /// Largest coefficient length handled by brute force.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    max_len: u64,
    /// Splitting rounds per branch (default: the contraction bound).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    max_rounds: Option<u32>,
    /// Persistent ledger file.
    #[arg(long)]
    ledger: Option<PathBuf>,
    /// Print the decision trace.
    #[arg(long)]
    trace: bool,
    /// Print each splitting step.
    #[arg(long)]
    trace_split: bool,
    /// Skip the direct brute-force search and go straight to splitting.
    #[arg(long)]
    no_presearch: bool,
    /// Explore constraints in parallel (thread count from RAYON_NUM_THREADS).
    #[arg(long)]
    parallel: bool,
}

impl RunConfig {
    fn solver(&self) -> Result<Solver> {
        let config = SolverConfig {
            max_len: self.max_len as usize,
            max_rounds: self.max_rounds,
            presearch: !self.no_presearch,
            parallel: self.parallel,
            trace: self.trace,
            trace_split: self.trace_split,
            ..SolverConfig::default()
        };
        Ok(match &self.ledger {
            Some(path) => {
                let ledger = Ledger::open(path)
                    .with_context(|| format!("opening ledger {}", path.display()))?;
                Solver::with_ledger(config, Arc::new(ledger))
            }
            None => Solver::new(config),
        })
    }
}

fn element(word: &str) -> Result<Element> {
    word.parse()
        .with_context(|| format!("parsing element {word:?}"))
}

fn print_assignment(alpha: &Assignment) {
    for (v, g) in alpha {
        println!("  {v} = {g}");
    }
}

fn solve(file: &PathBuf, run: &RunConfig) -> Result<i32> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let (w, gamma) =
        parse_equation_file(&text).with_context(|| format!("parsing {}", file.display()))?;
    let solver = run.solver()?;
    let d = solver.decide(&w, &gamma)?;
    for line in &d.trace {
        eprintln!("{line}");
    }
    println!("{}", d.verdict);
    println!("equation: {w}");
    println!("standard form: {}", d.standard);
    if let Some(via) = &d.via {
        println!("via: {via:?}");
    }
    if let Some(alpha) = &d.witness {
        println!("witness:");
        print_assignment(alpha);
    }
    println!(
        "constraints: {} tried, {} pruned, {} unknown{}",
        d.constraints_tried,
        d.pruned,
        d.unknown,
        if d.truncated { " (truncated)" } else { "" }
    );
    Ok(d.verdict.exit_code())
}

fn split(file: &PathBuf, limit: usize) -> Result<i32> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let (w, gamma) =
        parse_equation_file(&text).with_context(|| format!("parsing {}", file.display()))?;
    let st = to_standard(&w)?;
    println!("equation: {w}");
    println!("standard form: {}", st.standard);
    let vars: Vec<_> = w.vars().into_iter().collect();
    let unset: Vec<_> = vars
        .iter()
        .filter(|v| !gamma.contains(v))
        .cloned()
        .collect();
    // Unconstrained variables range over all of G/K.
    let mut completions: Box<dyn Iterator<Item = _>> = Box::new(std::iter::once(gamma.clone()));
    for v in unset {
        completions = Box::new(completions.flat_map(move |g| {
            let v = v.clone();
            ordered_classes().iter().map(move |&q| {
                let mut g = g.clone();
                g.set(v.clone(), q);
                g
            })
        }));
    }
    let mut shown = 0;
    for g in completions.filter(|g| w.gamma_eval(g).is_ok_and(|q| q.is_identity())) {
        if shown == limit {
            break;
        }
        shown += 1;
        let full = st.automorphism.transport(&g);
        let zeta: Constraint = st
            .standard
            .vars()
            .into_iter()
            .map(|v| {
                let q = full.value_or_identity(&v);
                (v, q)
            })
            .collect();
        println!();
        println!("constraint: {g}");
        println!("transported: {zeta}");
        match split_standard(&st.standard, &zeta) {
            Ok(s) => {
                print!("{}", s.trace);
                println!("Psi0: {}", s.words[0]);
                println!("Psi1: {}", s.words[1]);
            }
            Err(e) => println!("pruned: {e}"),
        }
    }
    if shown == 0 {
        println!("no completion of the constraint satisfies gamma(W) = 1");
        return Ok(3);
    }
    Ok(0)
}

fn quotient_table(multiplication: bool) {
    println!(
        "{:>3} {:>8} {:>14} {:>5} {:>3} {:>8}",
        "#", "class", "representative", "order", "st", "bar"
    );
    for (i, q) in ordered_classes().iter().enumerate() {
        let rep = q.representative().to_string();
        let ord = (1..=16).find(|&k| q.pow(k).is_identity()).unwrap_or(0);
        println!(
            "{i:>3} {:>8} {rep:>14} {ord:>5} {:>3} {:>8}",
            q.name(),
            q.st_coset(),
            q.bar().name()
        );
    }
    if multiplication {
        println!();
        print!("{}", multiplication_table_dump());
    }
}

fn width(word: &str, n_max: usize, run: &RunConfig) -> Result<i32> {
    let g = element(word)?;
    let solver = run.solver()?;
    match width_probe(&solver, &g, n_max)? {
        WidthReport::NotInCommutator(ab) => {
            println!("{g} is not a product of commutators (abelianization {ab:?})");
            Ok(3)
        }
        WidthReport::Found {
            width,
            exact,
            witness,
            verdicts,
        } => {
            let verdicts: Vec<String> = verdicts.iter().map(|v| v.to_string()).collect();
            println!("width {} {width}", if exact { "=" } else { "<=" });
            println!("verdicts by n: {}", verdicts.join(", "));
            println!("witness:");
            print_assignment(&witness);
            Ok(0)
        }
        WidthReport::Unknown { verdicts } => {
            let verdicts: Vec<String> = verdicts.iter().map(|v| v.to_string()).collect();
            println!("width not determined for n <= {n_max}");
            println!("verdicts by n: {}", verdicts.join(", "));
            Ok(2)
        }
    }
}

fn theta(n_max: usize) -> Result<i32> {
    if n_max < 3 {
        bail!("--n-max must be at least 3");
    }
    let parts = theta_orbits(n_max)?;
    print!("{}", theta_csv(&parts));
    match stabilization_index(&parts) {
        Some(n) => eprintln!("class count stable from n = {n}"),
        None => eprintln!("class count not yet stable at n = {n_max}"),
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Solve { file, run } => solve(&file, &run),
        Command::Order { word } => {
            let g = element(&word)?;
            println!("{}", order(&g));
            Ok(0)
        }
        Command::Split { file, limit } => split(&file, limit),
        Command::QuotientTable { multiplication } => {
            quotient_table(multiplication);
            Ok(0)
        }
        Command::Width { word, n_max, run } => width(&word, n_max, &run),
        Command::Theta { n_max } => theta(n_max),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
