//! `folmt`: command-line access to the finite model toolkit.
//!
//! The last line of every report is machine readable. Logical answers are
//! data and exit with 0; malformed input exits with 2.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use folmt_core::bpcp::{self, BpcpInstance};
use folmt_core::quotient::{quotient_env, quotient_model};
use folmt_core::reductions::{run_chain, Stage};
use folmt_core::search::{
    fsat_bounded, fsat_on_domain, fsateq_bounded, fsateq_on_domain, monadic_decide, SearchConfig, Verdict,
};
use folmt_core::semantics::{parse_assignment, parse_model, print_assignment, print_model, Assignment};
use folmt_core::syntax::{print_document, Formula, RelId, Signature};
use folmt_core::text::{parse_document, parse_signature};
use folmt_core::{satisfies, FiniteModel};

#[derive(Parser)]
#[command(name = "folmt", version, about = "Finite model search and signature reductions for first-order logic")]
struct Cli {
    /// Worker threads for model search.
    #[arg(long, global = true, env = "FOLMT_JOBS", default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a formula file and print it back in normal form.
    Parse { file: PathBuf },
    /// Evaluate a formula in a model.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: PathBuf,
        /// Assignment file; overrides an `(env ...)` stored with the model.
        #[arg(long)]
        env: Option<PathBuf>,
    },
    /// Search for a model of size 1 up to `--max-domain`.
    Fsat {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        max_domain: usize,
        /// Read this binary relation as identity.
        #[arg(long)]
        equality: Option<String>,
        #[arg(long)]
        emit_model: Option<PathBuf>,
    },
    /// Decide satisfiability over exactly `--domain-size` elements.
    FsatFixed {
        #[arg(long)]
        formula: PathBuf,
        #[arg(long)]
        domain_size: usize,
        #[arg(long)]
        equality: Option<String>,
        #[arg(long)]
        emit_model: Option<PathBuf>,
    },
    /// Decide a formula over unary symbols only.
    Monadic {
        #[arg(long)]
        formula: PathBuf,
        /// Largest number of unary predicates accepted.
        #[arg(long, default_value_t = 4)]
        cap: usize,
        #[arg(long)]
        emit_model: Option<PathBuf>,
    },
    /// Run a chain of reduction stages.
    Reduce {
        /// Comma separated stage names, e.g. `sig-gc,fun-elim,eq-elim`.
        #[arg(long, value_delimiter = ',', required = true)]
        chain: Vec<String>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Signature file for `embed`.
        #[arg(long)]
        target: Option<PathBuf>,
        #[arg(long)]
        trace: bool,
    },
    /// Binary Post correspondence problems.
    Bpcp {
        #[command(subcommand)]
        command: BpcpCommand,
    },
    /// Collapse indistinguishable elements of a model.
    Quotient {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: PathBuf,
        /// Where to write the minimized model; printed when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BpcpCommand {
    /// Shortest solution up to `--max-len`.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// The formula satisfiable exactly when the instance is solvable.
    Encode {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The string model for solutions of length `--len`.
    Model {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        len: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read a solution off a model of the encoding.
    Extract {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        model: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

fn read_document(path: &Path) -> Result<(Signature, Formula)> {
    parse_document(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn read_model(path: &Path, sig: &Signature) -> Result<(FiniteModel, Option<Assignment>)> {
    parse_model(&read(path)?, sig).with_context(|| format!("in {}", path.display()))
}

fn read_instance(path: &Path) -> Result<BpcpInstance> {
    bpcp::parse_instance(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn equality(sig: &Signature, name: Option<&str>) -> Result<Option<RelId>> {
    let Some(name) = name else { return Ok(None) };
    match sig.find_rel(name) {
        Some(p) if sig.rel(p).arity == 2 => Ok(Some(p)),
        Some(_) => bail!("`{name}` is not a binary relation"),
        None => bail!("no relation named `{name}`"),
    }
}

fn model_file(m: &FiniteModel, env: &Assignment) -> String {
    format!("{}{}", print_model(m), print_assignment(env))
}

/// Prints the model (or writes it), then the verdict line.
fn report(verdict: &Verdict, emit: Option<&Path>) -> Result<()> {
    match verdict {
        Verdict::Sat { model, env, size } => {
            let text = model_file(model, env);
            match emit {
                Some(path) => write(path, &text)?,
                None => print!("{text}"),
            }
            println!("SAT k={size}");
        }
        Verdict::Unsat => println!("UNSAT"),
        Verdict::UnknownWithinBound { bound } => println!("UNKNOWN bound={bound}"),
    }
    Ok(())
}

fn print_or_write(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let cfg = SearchConfig { jobs: cli.jobs.max(1), ..SearchConfig::default() };
    match cli.command {
        Command::Parse { file } => {
            let (sig, phi) = read_document(&file)?;
            print!("{}", print_document(&sig, &phi));
            println!(
                "OK funcs={} rels={} size={} free={}",
                sig.funcs().len(),
                sig.rels().len(),
                phi.size(),
                phi.free_vars().len()
            );
        }
        Command::Eval { model, formula, env } => {
            let (sig, phi) = read_document(&formula)?;
            let (m, stored) = read_model(&model, &sig)?;
            let env = match env {
                Some(path) => {
                    let env = parse_assignment(&read(&path)?).with_context(|| format!("in {}", path.display()))?;
                    env.check(m.size())?;
                    env
                }
                None => stored.unwrap_or_else(Assignment::zeros),
            };
            println!("{}", if satisfies(&m, &env, &phi) { "TRUE" } else { "FALSE" });
        }
        Command::Fsat { formula, max_domain, equality: eq, emit_model } => {
            let (sig, phi) = read_document(&formula)?;
            let v = match equality(&sig, eq.as_deref())? {
                Some(e) => fsateq_bounded(&sig, &phi, e, max_domain, &cfg)?,
                None => fsat_bounded(&sig, &phi, max_domain, &cfg)?,
            };
            report(&v, emit_model.as_deref())?;
        }
        Command::FsatFixed { formula, domain_size, equality: eq, emit_model } => {
            let (sig, phi) = read_document(&formula)?;
            let v = match equality(&sig, eq.as_deref())? {
                Some(e) => fsateq_on_domain(&sig, &phi, e, domain_size, &cfg)?,
                None => fsat_on_domain(&sig, &phi, domain_size, &cfg)?,
            };
            report(&v, emit_model.as_deref())?;
        }
        Command::Monadic { formula, cap, emit_model } => {
            let (sig, phi) = read_document(&formula)?;
            let cfg = SearchConfig { monadic_cap: cap, ..cfg };
            report(&monadic_decide(&sig, &phi, &cfg)?, emit_model.as_deref())?;
        }
        Command::Reduce { chain, input, out, target, trace } => {
            let stages = chain.iter().map(|s| s.trim().parse::<Stage>()).collect::<Result<Vec<_>, _>>()?;
            let (sig, phi) = read_document(&input)?;
            let target = match target {
                Some(path) => Some(parse_signature(&read(&path)?).with_context(|| format!("in {}", path.display()))?),
                None => None,
            };
            let red = run_chain(&sig, &phi, &stages, target.as_ref())?;
            write(&out, &print_document(&red.sig, &red.formula))?;
            if trace {
                for entry in &red.trace {
                    println!("{entry}");
                }
            }
            if let Some(e) = red.equality {
                println!("equality {}", red.sig.rel(e).name);
            }
            println!(
                "REDUCED stages={} funcs={} rels={} size={}",
                red.trace.len(),
                red.sig.funcs().len(),
                red.sig.rels().len(),
                red.formula.size()
            );
        }
        Command::Bpcp { command } => match command {
            BpcpCommand::Solve { instance, max_len } => {
                let r = read_instance(&instance)?;
                match bpcp::solve(&r, max_len) {
                    Some(s) => println!("SOLVED {s}"),
                    None => println!("NOSOLUTION bound={max_len}"),
                }
            }
            BpcpCommand::Encode { instance, out } => {
                let (sig, phi) = bpcp::encode(&read_instance(&instance)?);
                print_or_write(out.as_deref(), &print_document(&sig, &phi))?;
            }
            BpcpCommand::Model { instance, len, out } => {
                let m = bpcp::build_model(&read_instance(&instance)?, len);
                print_or_write(out.as_deref(), &print_model(&m))?;
            }
            BpcpCommand::Extract { instance, model } => {
                let r = read_instance(&instance)?;
                let (m, _) = read_model(&model, &bpcp::signature())?;
                println!("SOLVED {}", bpcp::extract_solution(&r, &m)?);
            }
        },
        Command::Quotient { model, formula, out } => {
            let (sig, phi) = read_document(&formula)?;
            let (m, env) = read_model(&model, &sig)?;
            let (q, classes) = quotient_model(&m, &phi);
            for x in 0..m.size() {
                println!("{x} -> {}", classes.c[x]);
            }
            let env = quotient_env(&env.unwrap_or_else(Assignment::zeros), &classes);
            let text = model_file(&q, &env);
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
            println!("CLASSES {}", classes.count);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
