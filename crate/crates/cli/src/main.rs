// SPDX-License-Identifier: Apache-2.0

//! `miterscan` command-line front end.
//!
//! Exit codes: 0 secure, 1 counterexample, 2 uncovered signals, 3 error.

mod report;
mod stimulus;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use miterscan::bench::{gen_corpus_netlist, gen_random_shaped, generate, BenchSpec, RandomShape};
use miterscan::flow::{coverage, cross_check_decomposition, run_aggregate, run_detection, FlowConfig, FlowVerdict, ResetSpec};
use miterscan::netlist::{import_aiger, Netlist, SimState};
use miterscan::oracle::simulate_trace;

use report::{CrossCheckEntry, CrossCheckReport, InputInfo, RunReport};

const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "miterscan", version, about = "Golden-free sequential Trojan detection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the decomposed detection flow.
    Detect(RunArgs),
    /// Check the single multi-cycle property instead of the decomposed ones.
    Aggregate(RunArgs),
    /// Report signals outside the fanout of the analysis inputs.
    Coverage {
        file: PathBuf,
        #[arg(long, value_name = "S=V")]
        reset: Option<ResetSpec>,
    },
    /// Generate a benchmark netlist with an injected Trojan.
    Gen(GenArgs),
    /// Simulate a netlist from the all-zero state.
    Sim(SimArgs),
    /// Compare decomposed and aggregate verdicts on random netlists.
    Crosscheck(CrossArgs),
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    /// Reset input and its inactive value.
    #[arg(long, value_name = "S=V")]
    reset: Option<ResetSpec>,
    /// Exact property shapes, without assuming earlier levels equal.
    #[arg(long)]
    paper_literal: bool,
    /// Report the first counterexample without trying to resolve it.
    #[arg(long)]
    no_refine: bool,
    /// File of disqualified signals, one per line.
    #[arg(long, value_name = "FILE")]
    assume_equal: Option<PathBuf>,
    #[arg(long, default_value_t = 16)]
    max_refinements: usize,
    /// Write the JSON report here.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
    /// Directory for counterexample waveforms; defaults to the input's.
    #[arg(long, value_name = "DIR")]
    vcd_dir: Option<PathBuf>,
    /// Concurrent property checks; 0 picks a default.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    rounds: usize,
    #[arg(long)]
    width: usize,
    /// seq:D, event:W[:MASK] or cycle:W
    #[arg(long)]
    trigger: String,
    /// flip[:BIT], shift:W, leak or dos:W
    #[arg(long)]
    payload: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Netlist output; the manifest goes next to it. Prints to stdout if absent.
    #[arg(short, long, value_name = "FILE")]
    output: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    file: PathBuf,
    /// Number of clock edges; defaults to the number of stimulus lines.
    #[arg(long)]
    cycles: Option<usize>,
    /// Stimulus file: one line per cycle of `name=value` pairs.
    #[arg(long, value_name = "FILE")]
    inputs: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    vcd: Option<PathBuf>,
}

#[derive(Args)]
struct CrossArgs {
    #[arg(long, default_value_t = 200)]
    seeds: u64,
    /// Maximum register count of the generated netlists.
    #[arg(long, default_value_t = 8)]
    registers: usize,
    #[arg(long, default_value_t = 0)]
    first_seed: u64,
    /// Pipeline-shaped netlists instead of the flat corpus.
    #[arg(long)]
    layered: bool,
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(EXIT_ERROR);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn dispatch(cmd: Command) -> Result<u8> {
    match cmd {
        Command::Detect(a) => detect(a, false),
        Command::Aggregate(a) => detect(a, true),
        Command::Coverage { file, reset } => cover(&file, reset),
        Command::Gen(a) => gen(a),
        Command::Sim(a) => sim(a),
        Command::Crosscheck(a) => crosscheck(a),
    }
}

/// Reads SNL, or ASCII AIGER when the extension is `.aag`.
fn load(path: &Path) -> Result<(Netlist, InputInfo)> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let text = std::str::from_utf8(&bytes).with_context(|| format!("{} is not UTF-8", path.display()))?;
    let aiger = path.extension().is_some_and(|e| e == "aag");
    let n = if aiger {
        let imported = import_aiger(text).with_context(|| format!("parsing {}", path.display()))?;
        for w in &imported.warnings {
            eprintln!("warning: {w}");
        }
        imported.netlist.ensure_valid()?;
        imported.netlist
    } else {
        Netlist::load(text).with_context(|| format!("loading {}", path.display()))?
    };
    Ok((n, InputInfo::new(path, &bytes, if aiger { "aag" } else { "snl" })))
}

fn read_names(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect())
}

fn detect(a: RunArgs, aggregate: bool) -> Result<u8> {
    let (n, input) = load(&a.file)?;
    let cfg = FlowConfig {
        strengthen: !a.paper_literal,
        refine: !a.no_refine,
        reset: a.reset,
        assume_equal: match &a.assume_equal {
            Some(p) => read_names(p)?,
            None => Vec::new(),
        },
        max_refinements: a.max_refinements,
        jobs: a.jobs,
        ..FlowConfig::default()
    };
    let (summary, verdict, elapsed) = if aggregate {
        let run = run_aggregate(&n, &cfg)?;
        (run.summary(&n), run.verdict, run.elapsed)
    } else {
        let run = run_detection(&n, &cfg)?;
        (run.summary(&n), run.verdict, run.elapsed)
    };
    let mode = if aggregate { "aggregate" } else { "detect" };
    report::print_run(&n, &summary, &verdict, elapsed);

    if let FlowVerdict::Cex(d) = &verdict {
        let dir = match &a.vcd_dir {
            Some(d) => d.clone(),
            None => a.file.parent().map(Path::to_path_buf).unwrap_or_default(),
        };
        fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        let stem = a.file.file_stem().and_then(|s| s.to_str()).unwrap_or("netlist");
        let path = dir.join(format!("{stem}.{}.vcd", d.property.id));
        let vcd = d.cex.to_vcd(&n).context("replaying the counterexample")?;
        fs::write(&path, vcd).with_context(|| format!("writing {}", path.display()))?;
        println!("waveform: {}", path.display());
    }
    if let Some(path) = &a.report {
        let r = RunReport::new(mode, input, &cfg, summary);
        write_json(path, &r)?;
    }
    Ok(verdict.exit_code() as u8)
}

fn cover(file: &Path, reset: Option<ResetSpec>) -> Result<u8> {
    let (n, _) = load(file)?;
    let cfg = FlowConfig {
        reset,
        ..FlowConfig::default()
    };
    let (p, c) = coverage(&n, &cfg)?;
    println!("analysis inputs: {}", n.names(&p.analysis_inputs).join(" "));
    println!("covered: {}", c.covered.len());
    if c.is_complete() {
        println!("every register and output is in the input fanout");
        Ok(0)
    } else {
        println!("uncovered: {}", n.names(&c.uncovered).join(" "));
        Ok(2)
    }
}

fn gen(a: GenArgs) -> Result<u8> {
    let spec = BenchSpec::parse(a.rounds, a.width, &a.trigger, &a.payload, a.seed)?;
    let b = generate(&spec)?;
    let text = b.netlist.to_snl();
    match &a.output {
        None => print!("{text}"),
        Some(path) => {
            fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            let manifest = a.manifest.clone().unwrap_or_else(|| path.with_extension("manifest.json"));
            write_json(&manifest, &b.manifest)?;
            eprintln!("wrote {} and {}", path.display(), manifest.display());
        }
    }
    Ok(0)
}

fn sim(a: SimArgs) -> Result<u8> {
    let (n, _) = load(&a.file)?;
    let mut stimulus = match &a.inputs {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            stimulus::parse(&n, &text)?
        }
        None => Vec::new(),
    };
    let cycles = a.cycles.unwrap_or(stimulus.len());
    if cycles == 0 {
        bail!("nothing to simulate: give --cycles or a non-empty --inputs file");
    }
    // inputs of cycles beyond the file are held at zero
    stimulus.resize(cycles, miterscan::netlist::InputAssignment::zeros(&n));
    let trace = simulate_trace(&n, &SimState::zeros(&n), &stimulus)?;
    for (t, step) in trace.steps.iter().enumerate() {
        println!("{:>4}  {}", t + 1, stimulus::format_outputs(&n, &step.outputs));
    }
    if let Some(path) = &a.vcd {
        fs::write(path, trace.to_vcd(&n)).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

fn crosscheck(a: CrossArgs) -> Result<u8> {
    let cfg = FlowConfig::paper_literal();
    let mut r = CrossCheckReport::new(a.seeds, a.registers, a.layered);
    for seed in a.first_seed..a.first_seed + a.seeds {
        let n = if a.layered {
            let max = a.registers.max(1) as u64;
            let mut shape = RandomShape::new(1 + (seed % max) as usize, 1 + (seed % 3) as usize, 4 + (seed % 17) as usize);
            shape.layered = true;
            gen_random_shaped(seed, shape)
        } else {
            gen_corpus_netlist(seed, a.registers)
        };
        let c = cross_check_decomposition(&n, &cfg)?;
        r.record(CrossCheckEntry::new(seed, &c));
    }
    println!(
        "{} netlists: {} aggregate failures, {} inconsistencies",
        r.checked,
        r.aggregate_failures,
        r.inconsistent.len()
    );
    for e in &r.inconsistent {
        println!("  seed {}: aggregate holds={}, failing {:?}", e.seed, e.aggregate_holds, e.failing);
    }
    if let Some(path) = &a.report {
        write_json(path, &r)?;
    }
    Ok(if r.inconsistent.is_empty() { 0 } else { 1 })
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
