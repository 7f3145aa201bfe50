//! `fgdict`: command-line driver for the FG toolchain.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use fgdict::diag::{diagnostics_json, Diagnostic};
use fgdict::equiv::{
    diff_run, DiffConfig, DiffReport, Verdict, DEFAULT_EVAL_FUEL, DEFAULT_REL_FUEL,
};
use fgdict::fg::typeck::TypeChecker;
use fgdict::fg::{self, Decls, Mode, Program};
use fgdict::gen::{gen_program, shrink, GenConfig};
use fgdict::tl;
use fgdict::translate::{translate_program, Options};

const EXIT_OK: u8 = 0;
const EXIT_DIAGNOSTICS: u8 = 1;
const EXIT_DISAGREE: u8 = 2;
const EXIT_BUDGET: u8 = 3;
const EXIT_INTERNAL: u8 = 4;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "fgdict",
    version,
    about = "Featherweight Go to dictionary-passing translation workbench"
)]
struct Cli {
    /// Enable the int/bool primitive extension.
    #[arg(long, global = true)]
    ext: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse an FG program and print its canonical form.
    Parse { file: PathBuf },
    /// Report well-formedness and typing diagnostics.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Translate an FG program to the target language.
    Compile {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Emit upcasts and downcasts as named helper bindings.
        #[arg(long)]
        hoist_helpers: bool,
    },
    /// Evaluate an FG program.
    RunFg {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Evaluate a target-language program.
    RunTl {
        file: PathBuf,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run an FG program and its translation and relate the results.
    Diff {
        file: PathBuf,
        #[command(flatten)]
        diff: DiffArgs,
        #[arg(long)]
        hoist_helpers: bool,
    },
    /// Differential testing on generated programs.
    Fuzz(FuzzArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Evaluation fuel.
    #[arg(long, default_value_t = DEFAULT_EVAL_FUEL)]
    steps: usize,
    /// Print every reduction step.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DiffArgs {
    /// Evaluation fuel for each side.
    #[arg(long, default_value_t = DEFAULT_EVAL_FUEL)]
    steps: usize,
    /// Step index for relating the results.
    #[arg(long, default_value_t = DEFAULT_REL_FUEL)]
    rel_fuel: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FuzzArgs {
    #[arg(long, default_value_t = 100)]
    count: u64,
    /// Seed of the first case; case i uses seed + i.
    #[arg(long)]
    seed: Option<u64>,
    /// Generator settings as a TOML file of key = value lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write programs that disagree or run out of fuel here.
    #[arg(long)]
    keep_failures: Option<PathBuf>,
    #[arg(long)]
    max_structs: Option<usize>,
    #[arg(long)]
    max_ifaces: Option<usize>,
    #[arg(long)]
    max_methods_per_iface: Option<usize>,
    #[arg(long)]
    max_fields: Option<usize>,
    #[arg(long)]
    expr_depth: Option<usize>,
    #[arg(long)]
    assert_probability: Option<f64>,
    #[command(flatten)]
    diff: DiffArgs,
}

/// Why a command stopped early.
enum Fail {
    Diagnostics(String, Vec<Diagnostic>),
    Usage(String),
    Internal(String),
}

type CmdResult = Result<u8, Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mode = if cli.ext { Mode::Ext } else { Mode::Core };
    let code = match run(cli.cmd, mode) {
        Ok(code) => code,
        Err(Fail::Diagnostics(file, diags)) => {
            for d in &diags {
                eprintln!("{}", d.render(&file));
            }
            EXIT_DIAGNOSTICS
        }
        Err(Fail::Usage(msg)) => {
            eprintln!("fgdict: {msg}");
            EXIT_USAGE
        }
        Err(Fail::Internal(msg)) => {
            eprintln!("fgdict: internal error: {msg}");
            EXIT_INTERNAL
        }
    };
    ExitCode::from(code)
}

fn run(cmd: Cmd, mode: Mode) -> CmdResult {
    match cmd {
        Cmd::Parse { file } => {
            let p = load(&file, mode)?;
            print!("{}", fg::print_program(&p));
            Ok(EXIT_OK)
        }
        Cmd::Check { file, json } => check(&file, mode, json),
        Cmd::Compile {
            file,
            output,
            hoist_helpers,
        } => {
            let p = load(&file, mode)?;
            let opts = Options {
                hoist_helpers,
                ..Options::default()
            };
            let t = translate_program(&p, &opts).map_err(|d| Fail::Diagnostics(show(&file), d))?;
            for w in &t.warnings {
                eprintln!("{}", w.render(&show(&file)));
            }
            let text = tl::print_program(&t.program);
            match output {
                Some(out) => fs::write(&out, text)
                    .map_err(|e| Fail::Internal(format!("writing {}: {e}", out.display())))?,
                None => print!("{text}"),
            }
            Ok(EXIT_OK)
        }
        Cmd::RunFg { file, run } => run_fg(&file, mode, &run),
        Cmd::RunTl { file, run } => run_tl(&file, mode, &run),
        Cmd::Diff {
            file,
            diff,
            hoist_helpers,
        } => {
            let p = load(&file, mode)?;
            let cfg = DiffConfig {
                eval_fuel: diff.steps,
                rel_fuel: diff.rel_fuel,
                options: Options {
                    hoist_helpers,
                    ..Options::default()
                },
            };
            let r = diff_run(&p, &cfg).map_err(|d| Fail::Diagnostics(show(&file), d))?;
            if diff.json {
                println!("{}", r.to_json(None));
            } else {
                print_report(&r);
            }
            Ok(verdict_exit(&r.verdict))
        }
        Cmd::Fuzz(args) => fuzz(args, mode),
    }
}

fn show(file: &Path) -> String {
    file.display().to_string()
}

fn read(file: &Path) -> Result<String, Fail> {
    fs::read_to_string(file).map_err(|e| Fail::Internal(format!("reading {}: {e}", file.display())))
}

fn load(file: &Path, mode: Mode) -> Result<Program, Fail> {
    fg::parse_program(&read(file)?, mode).map_err(|d| Fail::Diagnostics(show(file), d))
}

/// Parses, checks well-formedness and types `main`.
fn load_checked(file: &Path, mode: Mode) -> Result<(Program, String), Fail> {
    let p = load(file, mode)?;
    let wf = fg::check_wellformed(&p);
    if !wf.is_empty() {
        return Err(Fail::Diagnostics(show(file), wf));
    }
    let ty = TypeChecker::new(&Decls::of_program(&p))
        .check_program(&p)
        .map_err(|d| Fail::Diagnostics(show(file), d))?;
    Ok((p, ty))
}

fn check(file: &Path, mode: Mode, json: bool) -> CmdResult {
    let diags = match load_checked(file, mode) {
        Ok((p, _)) => match translate_program(&p, &Options::default()) {
            Ok(t) => t.warnings,
            Err(d) => d,
        },
        Err(Fail::Diagnostics(_, d)) => d,
        Err(other) => return Err(other),
    };
    if json {
        println!("{}", diagnostics_json(&show(file), &diags));
    } else {
        for d in &diags {
            eprintln!("{}", d.render(&show(file)));
        }
    }
    Ok(if diags.iter().any(Diagnostic::is_error) {
        EXIT_DIAGNOSTICS
    } else {
        EXIT_OK
    })
}

fn run_fg(file: &Path, mode: Mode, args: &RunArgs) -> CmdResult {
    let (p, _) = load_checked(file, mode)?;
    let decls = Decls::of_program(&p);
    let mut trace = |n: usize, rule: fg::interp::Rule, e: &fg::Expr| {
        println!("{n:>6} {:<10} {}", rule.name(), fg::print_expr(e));
    };
    let out = if args.trace && !args.json {
        fg::fg_eval_traced(&decls, &p.main, args.steps, &mut trace)
    } else {
        fg::fg_eval(&decls, &p.main, args.steps)
    };
    let (kind, shown, steps) = match &out {
        fg::Outcome::Value(v, n) => ("value", v.to_string(), Some(*n)),
        fg::Outcome::Stuck(r, n) => ("stuck", r.to_string(), Some(*n)),
        fg::Outcome::OutOfFuel => ("out-of-fuel", String::new(), None),
    };
    report_run(kind, &shown, steps, args)
}

fn run_tl(file: &Path, mode: Mode, args: &RunArgs) -> CmdResult {
    let text = read(file)?;
    let p = tl::parse_program(&text).map_err(|d| Fail::Diagnostics(show(file), vec![d]))?;
    let errors = tl::check_program(&p);
    if !errors.is_empty() {
        for e in &errors {
            eprintln!("{}: error[tl]: {e}", show(file));
        }
        return Ok(EXIT_DIAGNOSTICS);
    }
    if mode == Mode::Core && uses_primitives(&p) {
        eprintln!(
            "{}: error[extension-syntax]: primitives need --ext",
            show(file)
        );
        return Ok(EXIT_DIAGNOSTICS);
    }
    let mu = tl::MethodSubst::from_program(&p).map_err(|e| Fail::Internal(e.to_string()))?;
    let mut trace = |n: usize, rule: tl::interp::Rule, e: &tl::Expr| {
        println!("{n:>6} {:<10} {}", rule.name(), tl::print_expr(e));
    };
    let out = if args.trace && !args.json {
        tl::tl_eval_traced(&mu, &p.main, args.steps, &mut trace)
    } else {
        tl::tl_eval(&mu, &p.main, args.steps)
    };
    let (kind, shown, steps) = match &out {
        tl::Outcome::Value(v, n) => ("value", v.to_string(), Some(*n)),
        tl::Outcome::Stuck(r, n) => ("stuck", r.to_string(), Some(*n)),
        tl::Outcome::OutOfFuel => ("out-of-fuel", String::new(), None),
    };
    report_run(kind, &shown, steps, args)
}

fn uses_primitives(p: &tl::Program) -> bool {
    let mut found = false;
    let mut visit = |e: &tl::Expr| {
        found |= matches!(e, tl::Expr::Int(_) | tl::Expr::Bool(_) | tl::Expr::Prim(..));
    };
    p.main.walk(&mut visit);
    for b in &p.bindings {
        b.body.walk(&mut visit);
    }
    found
}

fn report_run(kind: &str, shown: &str, steps: Option<usize>, args: &RunArgs) -> CmdResult {
    if args.json {
        println!(
            "{}",
            json!({"v": 1, "outcome": kind, "result": shown, "steps": steps, "fuel": args.steps})
        );
    } else {
        match steps {
            Some(n) if kind == "value" => println!("{shown}\n({n} steps)"),
            Some(n) => println!("stuck after {n} steps: {shown}"),
            None => println!("out of fuel after {} steps", args.steps),
        }
    }
    Ok(if steps.is_some() {
        EXIT_OK
    } else {
        EXIT_BUDGET
    })
}

fn print_report(r: &DiffReport) {
    println!("verdict: {}", r.verdict.name());
    println!("main: {}", r.main_type);
    let fg_side = match &r.fg_outcome {
        fg::Outcome::Value(v, n) => format!("{v} ({n} steps)"),
        fg::Outcome::Stuck(s, n) => format!("stuck after {n} steps: {s}"),
        fg::Outcome::OutOfFuel => "out of fuel".to_string(),
    };
    let tl_side = match &r.tl_outcome {
        tl::Outcome::Value(v, n) => format!("{v} ({n} steps)"),
        tl::Outcome::Stuck(s, n) => format!("stuck after {n} steps: {s}"),
        tl::Outcome::OutOfFuel => "out of fuel".to_string(),
    };
    println!("fg: {fg_side}");
    println!("tl: {tl_side}");
    if let Verdict::Disagree(d) = &r.verdict {
        println!("detail: {d}");
    }
}

fn verdict_exit(v: &Verdict) -> u8 {
    match v {
        Verdict::Agree { .. } | Verdict::BothStuck { .. } => EXIT_OK,
        Verdict::Disagree(_) => EXIT_DISAGREE,
        Verdict::Budget(_) => EXIT_BUDGET,
    }
}

fn gen_config(args: &FuzzArgs, mode: Mode) -> Result<GenConfig, Fail> {
    let mut cfg = match &args.config {
        Some(path) => toml::from_str::<GenConfig>(&read(path)?)
            .map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?,
        None => GenConfig::default(),
    };
    if mode == Mode::Ext {
        cfg.mode = Mode::Ext;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    let overrides = [
        (&mut cfg.max_structs, args.max_structs),
        (&mut cfg.max_ifaces, args.max_ifaces),
        (&mut cfg.max_methods_per_iface, args.max_methods_per_iface),
        (&mut cfg.max_fields, args.max_fields),
        (&mut cfg.expr_depth, args.expr_depth),
    ];
    for (field, value) in overrides {
        if let Some(v) = value {
            *field = v;
        }
    }
    if let Some(p) = args.assert_probability {
        cfg.assert_probability = p;
    }
    cfg.validate().map_err(Fail::Usage)?;
    Ok(cfg)
}

fn fuzz(args: FuzzArgs, mode: Mode) -> CmdResult {
    let cfg = gen_config(&args, mode)?;
    let diff_cfg = DiffConfig {
        eval_fuel: args.diff.steps,
        rel_fuel: args.diff.rel_fuel,
        options: Options::default(),
    };
    if let Some(dir) = &args.keep_failures {
        fs::create_dir_all(dir).map_err(|e| Fail::Internal(format!("{}: {e}", dir.display())))?;
    }
    let seeds: Vec<u64> = (0..args.count).map(|i| cfg.seed.wrapping_add(i)).collect();
    let results: Vec<Result<(Program, DiffReport), String>> = seeds
        .par_iter()
        .map(|&seed| {
            let p = gen_program(&cfg.with_seed(seed));
            diff_run(&p, &diff_cfg)
                .map(|r| (p, r))
                .map_err(|d| format!("seed {seed}: generated program rejected: {}", d[0]))
        })
        .collect();

    let mut counts = [0usize; 4];
    for (seed, res) in seeds.iter().zip(&results) {
        let (p, r) = res.as_ref().map_err(|e| Fail::Internal(e.clone()))?;
        let idx = match r.verdict {
            Verdict::Agree { .. } => 0,
            Verdict::BothStuck { .. } => 1,
            Verdict::Disagree(_) => 2,
            Verdict::Budget(_) => 3,
        };
        counts[idx] += 1;
        if args.diff.json {
            println!("{}", r.to_json(Some(*seed)));
        } else {
            println!("seed {seed}: {}", r.verdict);
        }
        if let (Some(dir), false) = (&args.keep_failures, r.verdict.is_ok()) {
            keep_failure(dir, *seed, p, r, &diff_cfg)?;
        }
    }
    if !args.diff.json {
        println!(
            "{} cases: {} agree, {} both-stuck, {} disagree, {} budget",
            args.count, counts[0], counts[1], counts[2], counts[3]
        );
    }
    Ok(if counts[2] > 0 {
        EXIT_DISAGREE
    } else {
        EXIT_OK
    })
}

/// Saves a failing case, plus a shrunk copy when the sides disagree.
fn keep_failure(
    dir: &Path,
    seed: u64,
    p: &Program,
    r: &DiffReport,
    cfg: &DiffConfig,
) -> Result<(), Fail> {
    let write = |name: String, text: String| {
        fs::write(dir.join(&name), text).map_err(|e| Fail::Internal(format!("{name}: {e}")))
    };
    write(format!("seed-{seed}.fg"), fg::print_program(p))?;
    if matches!(r.verdict, Verdict::Disagree(_)) {
        let still_fails = |q: &Program| {
            matches!(
                diff_run(q, cfg).map(|r| r.verdict),
                Ok(Verdict::Disagree(_))
            )
        };
        write(
            format!("seed-{seed}.min.fg"),
            fg::print_program(&shrink(p, &still_fails)),
        )?;
    }
    Ok(())
}
