//! `food`: check, inspect, transform and run FOOD programs.

use std::collections::BTreeSet;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use food_core::fuzz::{honest, run_properties_with, GenConfig, Limits, Mutant, Property};
use food_core::{
    canonicalize, check, desugar, eval_expr, parse, preprocess, pretty, trace_expr, transform, typecheck, Diagnostic,
    EvalOutcome, GlobalCtx, Program,
};
use similar::TextDiff;

#[derive(Parser)]
#[command(
    name = "food",
    version,
    about = "Switch FOOD programs between object-oriented and functional decomposition"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check that a program is well formed and well typed; prints its type.
    Check(Input),
    /// Print the global context of a program.
    Ctx(Input),
    /// Switch the selected types to the other decomposition.
    Transform {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        types: Types,
        /// Write the result here instead of standard output.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Transform twice and diff against the input; exits 0 iff they agree.
    Roundtrip {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        types: Types,
    },
    /// Evaluate the main expression.
    Eval {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fuel: Fuel,
    },
    /// Print every evaluation step, numbered.
    Trace {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        fuel: Fuel,
        /// Stop after this many steps.
        #[arg(long)]
        limit: Option<u64>,
    },
    /// Check the transformation's properties on generated programs; prints
    /// one JSON object per trial and a summary line.
    Fuzz {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        fuel: Fuel,
        /// Generator settings as JSON; `--seed` overrides the seed in it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Test a deliberately broken transformer instead of the real one.
        #[arg(long, value_parser = parse_mutant)]
        mutant: Option<Mutant>,
        /// Report failing programs as generated instead of minimized.
        #[arg(long)]
        no_shrink: bool,
    },
}

#[derive(Args)]
struct Input {
    /// Source file, or `-` for standard input.
    file: PathBuf,
}

#[derive(Args)]
struct Types {
    /// Comma-separated types to switch; all declared types if omitted.
    #[arg(long, value_delimiter = ',')]
    types: Option<Vec<String>>,
}

#[derive(Args)]
struct Fuel {
    /// Step budget.
    #[arg(long, env = "FOOD_FUEL", default_value_t = food_core::DEFAULT_FUEL)]
    fuel: u64,
}

fn parse_mutant(s: &str) -> Result<Mutant, String> {
    Mutant::ALL
        .into_iter()
        .find(|m| m.to_string().eq_ignore_ascii_case(s))
        .ok_or_else(|| {
            let names: Vec<String> = Mutant::ALL.iter().map(|m| m.to_string()).collect();
            format!("expected one of {}", names.join(", "))
        })
}

/// A failure already reported on standard error.
struct Failed;

type Run = Result<ExitCode, Failed>;

fn report(origin: &str, diags: &[Diagnostic]) -> Failed {
    for d in diags {
        if d.line > 0 {
            eprintln!("{origin}:{d}");
        } else {
            eprintln!("{origin}: {d}");
        }
    }
    Failed
}

fn fail(origin: &str, msg: impl std::fmt::Display) -> Failed {
    eprintln!("{origin}: {msg}");
    Failed
}

fn origin(path: &Path) -> String {
    if path == Path::new("-") {
        "<stdin>".into()
    } else {
        path.display().to_string()
    }
}

fn read_source(path: &Path) -> Result<String, Failed> {
    let mut text = String::new();
    let res = if path == Path::new("-") {
        io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| fail(&origin(path), e))?;
    Ok(text)
}

/// Parses and fully checks a program.
fn load(input: &Input) -> Result<(Program, GlobalCtx), Failed> {
    let name = origin(&input.file);
    let src = read_source(&input.file)?;
    let program = desugar(&parse(&src).map_err(|d| report(&name, &d))?);
    let ctx = preprocess(&program).map_err(|d| report(&name, &d))?;
    check(&program, &ctx).map_err(|d| report(&name, &d))?;
    typecheck(&program).map_err(|d| report(&name, &d))?;
    Ok((program, ctx))
}

fn selection(program: &Program, types: &Types) -> BTreeSet<String> {
    match &types.types {
        Some(ts) => ts
            .iter()
            .map(|t| t.trim().to_string())
            .filter(|t| !t.is_empty())
            .collect(),
        None => program.type_names().into_iter().collect(),
    }
}

fn print_program(name: &str, p: &Program) -> Result<String, Failed> {
    pretty(p).map_err(|e| fail(name, e))
}

fn write_stdout(text: &str) -> Result<(), Failed> {
    io::stdout().write_all(text.as_bytes()).map_err(|e| fail("<stdout>", e))
}

/// Unified diff of two texts, `None` when they are equal.
fn line_diff(want: &str, got: &str) -> Option<String> {
    (want != got).then(|| {
        TextDiff::from_lines(want, got)
            .unified_diff()
            .header("input", "round trip")
            .to_string()
    })
}

fn run(cli: Cli) -> Run {
    match cli.command {
        Command::Check(input) => {
            let (p, _) = load(&input)?;
            let ty = typecheck(&p).map_err(|d| report(&origin(&input.file), &d))?;
            println!("{ty}");
        }
        Command::Ctx(input) => {
            let (_, ctx) = load(&input)?;
            write_stdout(&ctx.dump())?;
        }
        Command::Transform { input, types, output } => {
            let name = origin(&input.file);
            let (p, _) = load(&input)?;
            let out = transform(&p, &selection(&p, &types)).map_err(|d| report(&name, &d))?;
            let text = print_program(&name, &canonicalize(&out.program))?;
            match output {
                Some(path) => std::fs::write(&path, text).map_err(|e| fail(&path.display().to_string(), e))?,
                None => write_stdout(&text)?,
            }
        }
        Command::Roundtrip { input, types } => {
            let name = origin(&input.file);
            let (p, _) = load(&input)?;
            let s = selection(&p, &types);
            let there = transform(&p, &s).map_err(|d| report(&name, &d))?;
            let back = transform(&there.program, &s).map_err(|d| report(&name, &d))?;
            let want = print_program(&name, &canonicalize(&p))?;
            let got = print_program(&name, &canonicalize(&back.program))?;
            if let Some(diff) = line_diff(&want, &got) {
                write_stdout(&diff)?;
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Eval { input, fuel } => {
            let (p, ctx) = load(&input)?;
            let (outcome, steps) = eval_expr(&p.main, &ctx, fuel.fuel);
            match outcome {
                EvalOutcome::Value(v) => println!("{v}"),
                other => {
                    println!("{other} after {steps} steps");
                    return Ok(ExitCode::FAILURE);
                }
            }
        }
        Command::Trace { input, fuel, limit } => {
            let (p, ctx) = load(&input)?;
            let budget = limit.map_or(fuel.fuel, |k| k.min(fuel.fuel));
            let t = trace_expr(&p.main, &ctx, budget);
            let mut out = String::new();
            for (i, e) in t.steps.iter().enumerate() {
                out.push_str(&format!("{i}: {e}\n"));
            }
            let stopped_early = matches!(t.outcome, EvalOutcome::FuelExhausted) && budget < fuel.fuel;
            match &t.outcome {
                EvalOutcome::Value(_) => {}
                _ if stopped_early => out.push_str(&format!("stopped at the limit of {budget} steps\n")),
                other => out.push_str(&format!("{other}\n")),
            }
            write_stdout(&out)?;
            if matches!(t.outcome, EvalOutcome::Stuck { .. })
                || (!stopped_early && t.outcome == EvalOutcome::FuelExhausted)
            {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Fuzz {
            trials,
            seed,
            fuel,
            config,
            mutant,
            no_shrink,
        } => {
            let mut cfg = match &config {
                Some(path) => {
                    let name = path.display().to_string();
                    let text = read_source(path)?;
                    serde_json::from_str::<GenConfig>(&text).map_err(|e| fail(&name, e))?
                }
                None => GenConfig::default(),
            };
            cfg.seed = seed;
            cfg.validate().map_err(|e| fail("config", e))?;
            let limits = Limits {
                fuel: fuel.fuel,
                ..Limits::default()
            };
            let report = match mutant {
                Some(m) => run_properties_with(&cfg, trials, limits, &m.transformer(), &Property::ALL, !no_shrink),
                None => run_properties_with(&cfg, trials, limits, &honest, &Property::ALL, !no_shrink),
            };
            write_stdout(&report.to_json_lines())?;
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    // clap exits with status 2 on usage errors and 0 for --help/--version.
    let cli = Cli::parse();
    run(cli).unwrap_or(ExitCode::FAILURE)
}
