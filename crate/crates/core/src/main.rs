use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use collapsible::automata::{check_run, extract_run, member, StackAutomaton, StateSet};
use collapsible::cpds::{bounded_reach, CpdsError};
use collapsible::emptiness::{is_empty_bounded, EmptinessError, EmptinessVerdict, EnumerationBounds};
use collapsible::reduction::{build_automaton, encode_witness};
use collapsible::stack::{Stack, StackOp};
use collapsible::text;
use collapsible::tiling::{check_solution, solve_bruteforce, TilingError};

const BUDGET_VAR: &str = "COLLAPSIBLE_BUDGET";

#[derive(Parser)]
#[command(name = "collapsible", version, about = "Collapsible pushdown stacks and stack automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a stack is well-formed (exit 0 valid, 1 invalid).
    ValidateStack {
        file: PathBuf,
        /// Check against this outermost order instead of the stack's own.
        #[arg(long)]
        order: Option<u32>,
    },
    /// Apply a stack operation such as pop2, push2, collapse3, cpush2:b, rew:b.
    Apply {
        #[arg(long)]
        op: String,
        file: PathBuf,
    },
    /// Decide membership (exit 0 accept, 1 reject).
    Member {
        #[arg(long)]
        automaton: PathBuf,
        /// Initial state; repeat for a set. None means the empty set.
        #[arg(long = "state")]
        states: Vec<String>,
        #[arg(long)]
        stack: PathBuf,
        /// Write an accepting run certificate here when accepted.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Check a run certificate (exit 0 accepting run, 1 not).
    CheckRun {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long)]
        stack: PathBuf,
        #[arg(long)]
        run: PathBuf,
        #[arg(long = "state")]
        states: Vec<String>,
    },
    /// Search for an accepted stack within bounds (exit 0 found, 1 none, 3 budget).
    Empty {
        #[arg(long)]
        automaton: PathBuf,
        #[arg(long = "state")]
        states: Vec<String>,
        #[arg(long)]
        max_atoms: usize,
        #[arg(long)]
        max_width: usize,
        /// Most stacks to test; defaults to $COLLAPSIBLE_BUDGET if set.
        #[arg(long)]
        budget: Option<u64>,
    },
    /// Solve or check tiling problems.
    Tiling {
        #[command(subcommand)]
        action: TilingCommand,
    },
    /// Build the stack automaton for a tiling problem.
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Encode a tiling solution as a stack.
    EncodeWitness {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        solution: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pushdown system commands.
    Cpds {
        #[command(subcommand)]
        action: CpdsCommand,
    },
}

#[derive(Subcommand)]
enum TilingCommand {
    /// Print the least solution (exit 0) or `no-solution` (exit 1).
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        n: u32,
    },
    /// Check a solution (exit 0 valid, 1 invalid).
    Check {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        solution: PathBuf,
    },
}

#[derive(Subcommand)]
enum CpdsCommand {
    /// Print every configuration reachable within the depth.
    Step {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        depth: usize,
        /// Most configurations to visit (exit 3 beyond it).
        #[arg(long, default_value_t = 100_000)]
        cap: usize,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Failure {
            code: 2,
            message: message.to_string(),
        }
    }

    fn budget(message: impl ToString) -> Self {
        Failure {
            code: 3,
            message: message.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    let mut s = String::new();
    if path == Path::new("-") {
        io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::input(format!("stdin: {e}")))?;
    } else {
        s = fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    Ok(s)
}

fn parse<T>(path: &Path, f: impl FnOnce(&str) -> Result<T, text::ParseError>) -> Result<T, Failure> {
    let s = read(path)?;
    f(&s).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn write_out(output: Option<&Path>, content: &str) -> Result<(), Failure> {
    match output {
        Some(p) if p != Path::new("-") => {
            fs::write(p, content).map_err(|e| Failure::input(format!("{}: {e}", p.display())))
        }
        _ => {
            print!("{content}");
            Ok(())
        }
    }
}

fn initial(a: &StackAutomaton, names: &[String]) -> Result<StateSet, Failure> {
    names
        .iter()
        .map(|n| a.state(n).ok_or_else(|| Failure::input(format!("unknown state {n}"))))
        .collect()
}

fn verdict(ok: bool, yes: &str, no: &str) -> u8 {
    println!("{}", if ok { yes } else { no });
    if ok {
        0
    } else {
        1
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::ValidateStack { file, order } => {
            let w = parse(&file, text::parse_stack)?;
            let n = order.unwrap_or(w.order());
            if w.order() != n {
                println!("invalid: stack has order {}, expected {n}", w.order());
                return Ok(1);
            }
            match w.check_well_formed(n) {
                Ok(()) => Ok(verdict(true, "valid", "")),
                Err(e) => {
                    println!("invalid: {e}");
                    Ok(1)
                }
            }
        }
        Command::Apply { op, file } => {
            let op: StackOp = op.parse().map_err(Failure::input)?;
            let w = parse(&file, text::parse_stack)?;
            w.check_well_formed(w.order()).map_err(Failure::input)?;
            match w.apply(&op) {
                Ok(v) => Ok(verdict(true, &v.to_string(), "")),
                Err(e) => {
                    println!("undefined");
                    eprintln!("{op}: {e}");
                    Ok(1)
                }
            }
        }
        Command::Member {
            automaton,
            states,
            stack,
            certificate,
        } => {
            let a = parse(&automaton, text::parse_automaton)?;
            let init = initial(&a, &states)?;
            let w = parse(&stack, text::parse_stack)?;
            let ok = member(&w, &a, &init).map_err(Failure::input)?;
            if let (true, Some(path)) = (ok, certificate) {
                let cert = extract_run(&w, &a, &init).map_err(Failure::input)?;
                write_out(Some(&path), &text::print_run(&a, &cert))?;
            }
            Ok(verdict(ok, "accept", "reject"))
        }
        Command::CheckRun {
            automaton,
            stack,
            run,
            states,
        } => {
            let a = parse(&automaton, text::parse_automaton)?;
            let init = initial(&a, &states)?;
            let w = parse(&stack, text::parse_stack)?;
            let cert = parse(&run, |s| text::parse_run(s, &a))?;
            match check_run(&w, &a, &cert, &init) {
                Ok(ok) => Ok(verdict(ok, "accepting run", "not an accepting run")),
                Err(e) => Err(Failure::input(e)),
            }
        }
        Command::Empty {
            automaton,
            states,
            max_atoms,
            max_width,
            budget,
        } => {
            let a = parse(&automaton, text::parse_automaton)?;
            let init = initial(&a, &states)?;
            let budget = match budget {
                Some(b) => Some(b),
                None => match std::env::var(BUDGET_VAR) {
                    Ok(v) => Some(v.parse().map_err(|_| Failure::input(format!("{BUDGET_VAR}={v} is not a count")))?),
                    Err(_) => None,
                },
            };
            let bounds = EnumerationBounds::new(max_atoms, max_width.max(1), a.alphabet().iter().cloned());
            match is_empty_bounded(&a, &init, &bounds, budget) {
                Ok(EmptinessVerdict::Witness(w)) => Ok(verdict(true, &w.to_string(), "")),
                Ok(EmptinessVerdict::NoWitnessWithinBounds) => {
                    println!("no-witness-within-bounds");
                    println!(
                        "note: no stack with at most {max_atoms} characters and {max_width} components per level is accepted; larger stacks were not searched, so the language may still be non-empty"
                    );
                    Ok(1)
                }
                Err(e @ EmptinessError::ResourceBound(_)) => Err(Failure::budget(e)),
                Err(e) => Err(Failure::input(e)),
            }
        }
        Command::Tiling { action } => match action {
            TilingCommand::Solve { instance, n } => {
                let p = parse(&instance, text::parse_tiling)?;
                match solve_bruteforce(&p, n) {
                    Ok(Some(s)) => {
                        print!("{}", text::print_solution(&s));
                        Ok(0)
                    }
                    Ok(None) => Ok(verdict(false, "", "no-solution")),
                    Err(e @ TilingError::ResourceBound { .. }) => Err(Failure::budget(e)),
                    Err(e) => Err(Failure::input(e)),
                }
            }
            TilingCommand::Check { instance, n, solution } => {
                let p = parse(&instance, text::parse_tiling)?;
                let s = parse(&solution, text::parse_solution)?;
                let ok = check_solution(&p, n, &s).map_err(Failure::input)?;
                Ok(verdict(ok, "valid", "invalid"))
            }
        },
        Command::Reduce { instance, n, output } => {
            let p = parse(&instance, text::parse_tiling)?;
            let out = build_automaton(&p, n).map_err(Failure::input)?;
            write_out(output.as_deref(), &text::print_automaton(&out.automaton))?;
            eprintln!("initial state: {}", out.automaton.name(out.initial));
            Ok(0)
        }
        Command::EncodeWitness {
            instance,
            n,
            solution,
            output,
        } => {
            let p = parse(&instance, text::parse_tiling)?;
            let s = parse(&solution, text::parse_solution)?;
            let w: Stack = encode_witness(&p, n, &s).map_err(Failure::input)?;
            write_out(output.as_deref(), &format!("{w}\n"))?;
            Ok(0)
        }
        Command::Cpds { action } => match action {
            CpdsCommand::Step {
                system,
                config,
                depth,
                cap,
            } => {
                let sys = parse(&system, text::parse_cpds)?;
                let c = parse(&config, text::parse_configuration)?;
                sys.check_configuration(&c).map_err(Failure::input)?;
                match bounded_reach(&c, &sys, depth, cap) {
                    Ok(set) => {
                        for c in set {
                            print!("{}", text::print_configuration(&c));
                        }
                        Ok(0)
                    }
                    Err(e @ CpdsError::ResourceBound(_)) => Err(Failure::budget(e)),
                    Err(e) => Err(Failure::input(e)),
                }
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    };
    let _ = io::stdout().flush();
    ExitCode::from(code)
}
