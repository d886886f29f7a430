//! Command-line front end: parse, solve, verify, enumerate, generate.

use std::fmt::Write as _;
use std::fs;
use std::io::Read as _;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use arbmatch::blocks::build_block_system;
use arbmatch::ffl::{run_ffl_with, FflOptions, VerifyLevel};
use arbmatch::instance::{parse_instance, random_instance, serialize_instance, ArbInstance};
use arbmatch::scarf_core::{run_scarf_capped, PivotRule};
use arbmatch::verify::{
    brute_force_stable_matchings, builtin_counterexample, is_extreme_point_q, is_stable_matching,
    q_membership, ConstraintKind, ConstraintStatus, Matching, StabilityReport,
};

/// Solve and check stable matchings on arborescence hypergraphs.
#[derive(Parser)]
#[command(name = "arbmatch", version, disable_help_subcommand = true)]
struct RunConfig {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the arborescence engine.
    Solve(SolveArgs),
    /// Solve an instance with the exact-arithmetic generic engine.
    SolveGeneric(SolveArgs),
    /// Check a 0/1 matching file against an instance.
    Verify {
        /// Instance path, or '-' for standard input.
        instance: String,
        /// Matching path (lines `e <id> <0|1>`), or '-' for standard input.
        matching: String,
    },
    /// Enumerate every stable matching of a small instance.
    Oracle {
        /// Instance path, or '-' for standard input.
        input: String,
    },
    /// Generate a random arborescence instance.
    Gen {
        /// Seed for the deterministic generator.
        #[arg(long)]
        seed: u64,
        /// Number of non-root vertices.
        #[arg(long)]
        n: usize,
        /// Non-singleton hyperedges to sample (capped by the available pool).
        #[arg(long, default_value_t = 0)]
        extra_edges: usize,
    },
    /// Print the built-in fractional extreme point and its reports.
    Counterexample,
}

#[derive(Args)]
struct SolveArgs {
    /// Instance path, or '-' for standard input.
    input: String,
    /// Re-check engine invariants at every pivot.
    #[arg(long)]
    verify_invariants: bool,
    /// Also write the pivot trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Fail if the run needs more pivots than this.
    #[arg(long)]
    max_iterations: Option<u64>,
    /// What to print on standard output.
    #[arg(long, value_enum, default_value_t = Format::Matching)]
    format: Format,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    /// The matching lines and the iteration count.
    Matching,
    /// The pivot trace, then the matching lines.
    Trace,
    /// The matching lines, then a stability report.
    Report,
}

/// Marker for failures caused by the input rather than the solver: exit 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct InputError(String);

fn input_error(msg: impl Into<String>) -> anyhow::Error {
    anyhow::Error::new(InputError(msg.into()))
}

fn main() -> ExitCode {
    match run(RunConfig::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {:#}", err);
            if err.is::<InputError>() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}

fn run(config: RunConfig) -> Result<()> {
    match config.command {
        Command::Solve(args) => cmd_solve(&args, false),
        Command::SolveGeneric(args) => cmd_solve(&args, true),
        Command::Verify { instance, matching } => cmd_verify(&instance, &matching),
        Command::Oracle { input } => cmd_oracle(&input),
        Command::Gen { seed, n, extra_edges } => cmd_gen(seed, n, extra_edges),
        Command::Counterexample => cmd_counterexample(),
    }
}

// ---------------------------------------------------------------------------
// Input plumbing

fn read_source(path: &str) -> Result<String> {
    if path == "-" {
        let mut text = String::new();
        std::io::stdin()
            .read_to_string(&mut text)
            .map_err(|e| input_error(format!("reading standard input: {}", e)))?;
        Ok(text)
    } else {
        fs::read_to_string(path).map_err(|e| input_error(format!("reading {}: {}", path, e)))
    }
}

fn load_instance(path: &str) -> Result<ArbInstance> {
    let text = read_source(path)?;
    parse_instance(&text).map_err(|e| input_error(format!("parsing {}: {}", path, e)))
}

fn load_matching(path: &str, m: usize) -> Result<Matching> {
    let text = read_source(path)?;
    let mut matching = Matching::empty(m);
    let mut seen = vec![false; m + 1];
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let parsed = match fields.as_slice() {
            ["e", id, value] => id.parse::<usize>().ok().zip(value.parse::<u8>().ok()),
            _ => None,
        };
        let (id, value) = parsed.filter(|&(id, v)| 1 <= id && id <= m && v <= 1).ok_or_else(
            || {
                input_error(format!(
                    "{}:{}: expected `e <id> <0|1>` with id in 1..={}, got `{}`",
                    path,
                    lineno + 1,
                    m,
                    line
                ))
            },
        )?;
        if seen[id] {
            return Err(input_error(format!(
                "{}:{}: hyperedge {} listed twice",
                path,
                lineno + 1,
                id
            )));
        }
        seen[id] = true;
        matching.set(id, value == 1);
    }
    Ok(matching)
}

// ---------------------------------------------------------------------------
// Commands

fn cmd_solve(args: &SolveArgs, generic: bool) -> Result<()> {
    let inst = load_instance(&args.input)?;
    let (matching, trace, iterations) = if generic {
        solve_generic(&inst, args)?
    } else {
        solve_ffl(&inst, args)?
    };
    if let Some(limit) = args.max_iterations {
        if iterations as u64 > limit {
            anyhow::bail!("run took {} iterations, over the limit of {}", iterations, limit);
        }
    }
    if let Some(path) = &args.trace {
        let mut text = trace.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        fs::write(path, text)
            .map_err(|e| input_error(format!("writing {}: {}", path.display(), e)))?;
    }
    let mut out = String::new();
    if args.format == Format::Trace {
        for line in &trace {
            writeln!(out, "{}", line)?;
        }
    }
    for e in matching.edges() {
        writeln!(out, "e {} = 1", e)?;
    }
    writeln!(out, "iterations={}", iterations)?;
    if args.format == Format::Report {
        let report = is_stable_matching(inst.system(), &matching)
            .map_err(|e| anyhow::anyhow!("checking the output: {}", e))?;
        render_stability(&mut out, &report)?;
    }
    print!("{}", out);
    Ok(())
}

fn solve_ffl(inst: &ArbInstance, args: &SolveArgs) -> Result<(Matching, Vec<String>, usize)> {
    let opts = FflOptions {
        verify: if args.verify_invariants { VerifyLevel::On } else { VerifyLevel::Auto },
        cross_check_generic: false,
    };
    let out = run_ffl_with(inst, opts).context("arborescence engine failed")?;
    let iterations = out.iterations();
    let lines = out.trace_lines();
    Ok((out.matching, lines, iterations))
}

fn solve_generic(inst: &ArbInstance, args: &SolveArgs) -> Result<(Matching, Vec<String>, usize)> {
    let bs = build_block_system(inst.system())
        .map_err(|e| input_error(format!("instance rejected: {}", e)))?;
    let cap = args.max_iterations.unwrap_or(1u64 << bs.m().min(24));
    let out = run_scarf_capped(&bs, PivotRule::default(), cap)
        .context("generic engine failed")?;
    let mut matching = Matching::empty(bs.m());
    let (zero, one) = (arbmatch::linalg::rat(0), arbmatch::linalg::rat(1));
    for j in 1..=bs.m() {
        if out.x[j] == one {
            matching.set(bs.edge_of_col(j), true);
        } else if out.x[j] != zero {
            anyhow::bail!("generic engine produced a fractional coordinate {}", out.x[j]);
        }
    }
    let iterations = out.trace.iterations.len();
    Ok((matching, out.trace.render_lines(), iterations))
}

fn cmd_verify(instance: &str, matching: &str) -> Result<()> {
    if instance == "-" && matching == "-" {
        return Err(input_error("only one of the two inputs may be '-'"));
    }
    let inst = load_instance(instance)?;
    let matching = load_matching(matching, inst.m())?;
    let report = is_stable_matching(inst.system(), &matching)
        .map_err(|e| input_error(format!("checking the matching: {}", e)))?;
    let mut out = String::new();
    render_stability(&mut out, &report)?;
    print!("{}", out);
    Ok(())
}

fn render_stability(out: &mut String, report: &StabilityReport) -> Result<()> {
    writeln!(out, "{}", if report.stable { "STABLE" } else { "UNSTABLE" })?;
    for line in report.render_lines() {
        writeln!(out, "{}", line)?;
    }
    Ok(())
}

fn cmd_oracle(input: &str) -> Result<()> {
    let inst = load_instance(input)?;
    let all = brute_force_stable_matchings(inst.system())
        .map_err(|e| input_error(format!("enumeration refused: {}", e)))?;
    let mut out = String::new();
    for matching in &all {
        let ids: Vec<String> = matching.edges().iter().map(|e| e.to_string()).collect();
        writeln!(out, "{}", ids.join(" "))?;
    }
    writeln!(out, "count={}", all.len())?;
    print!("{}", out);
    Ok(())
}

fn cmd_gen(seed: u64, n: usize, extra_edges: usize) -> Result<()> {
    if n == 0 {
        return Err(input_error("--n must be at least 1"));
    }
    let inst = random_instance(seed, n, extra_edges);
    print!("{}", serialize_instance(&inst));
    Ok(())
}

fn cmd_counterexample() -> Result<()> {
    let (inst, point) = builtin_counterexample();
    let system = inst.system();
    let mut out = String::new();
    out.push_str(&serialize_instance(&inst));
    for e in 1..=system.m() {
        writeln!(out, "x {} = {}", e, point.x[e])?;
    }
    let q = q_membership(system, &point)?;
    writeln!(out, "member={}", q.member)?;
    for check in &q.checks {
        let (label, id) = match check.kind {
            ConstraintKind::Degree(i) => ("degree", i),
            ConstraintKind::Dominance(e) => ("dominance", e),
            ConstraintKind::LowerBound(e) => ("lower", e),
            ConstraintKind::UpperBound(e) => ("upper", e),
        };
        let status = match check.status {
            ConstraintStatus::Tight => "tight",
            ConstraintStatus::Slack => "slack",
            ConstraintStatus::Violated => "VIOLATED",
        };
        writeln!(out, "{} {} = {} ({})", label, id, check.value, status)?;
    }
    let extreme = is_extreme_point_q(system, &point)?;
    writeln!(
        out,
        "extreme={} rank={} dimension={}",
        extreme.extreme,
        extreme.tight_rank,
        system.m()
    )?;
    print!("{}", out);
    Ok(())
}
