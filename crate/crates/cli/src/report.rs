// SPDX-License-Identifier: Apache-2.0

//! JSON reports and the terminal summary.

use std::path::Path;
use std::time::Duration;

use miterscan::flow::{CrossCheck, FlowConfig, FlowVerdict, RunSummary};
use miterscan::netlist::Netlist;
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Debug, Serialize)]
pub struct InputInfo {
    pub path: String,
    pub format: &'static str,
    pub sha256: String,
}

impl InputInfo {
    pub fn new(path: &Path, bytes: &[u8], format: &'static str) -> Self {
        InputInfo {
            path: path.display().to_string(),
            format,
            sha256: hex::encode(Sha256::digest(bytes)),
        }
    }
}

/// Everything needed to rerun a detection: tool version, input digest
/// and configuration, followed by the results. Only the `elapsed_ms`
/// fields vary between identical runs.
#[derive(Debug, Serialize)]
pub struct RunReport<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub mode: &'static str,
    pub input: InputInfo,
    pub config: &'a FlowConfig,
    #[serde(flatten)]
    pub summary: RunSummary,
}

impl<'a> RunReport<'a> {
    pub fn new(mode: &'static str, input: InputInfo, config: &'a FlowConfig, summary: RunSummary) -> Self {
        RunReport {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            mode,
            input,
            config,
            summary,
        }
    }
}

pub fn print_run(n: &Netlist, s: &RunSummary, verdict: &FlowVerdict, elapsed: Duration) {
    println!("netlist {}: {} signals, {} fanout levels", n.name(), n.len(), s.partition.levels.len());
    for p in &s.properties {
        let outcome = format!("{:?}", p.outcome).to_lowercase();
        println!("  {:<22} {:<8} {:>9.3} ms", p.property.id, outcome, p.elapsed_ms);
    }
    for st in &s.strengthenings {
        println!("  strengthened {} ({:?}): {}", st.property, st.scenario, st.signals.join(" "));
    }
    let v = &s.verdict;
    match verdict {
        FlowVerdict::Secure => println!("verdict: secure"),
        FlowVerdict::Cex(d) => {
            println!("verdict: counterexample to {} ({:?})", d.property.id, d.label);
            println!("  suspects: {}", v.suspects.join(" "));
            if let Some(c) = &v.counterexample {
                println!("  first violation: {}", c.first_violation);
            }
        }
        FlowVerdict::Uncovered(_) => println!("verdict: uncovered signals {}", v.uncovered.join(" ")),
    }
    println!("elapsed: {:.3} s", elapsed.as_secs_f64());
}

#[derive(Debug, Serialize)]
pub struct CrossCheckEntry {
    pub seed: u64,
    pub aggregate_holds: bool,
    pub failing: Vec<String>,
}

impl CrossCheckEntry {
    pub fn new(seed: u64, c: &CrossCheck) -> Self {
        CrossCheckEntry {
            seed,
            aggregate_holds: c.aggregate_holds,
            failing: c.decomposed.iter().filter(|(_, holds)| !holds).map(|(p, _)| p.clone()).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CrossCheckReport {
    pub seeds: u64,
    pub max_registers: usize,
    pub layered: bool,
    pub checked: usize,
    pub aggregate_failures: usize,
    pub decomposed_failures: usize,
    pub inconsistent: Vec<CrossCheckEntry>,
}

impl CrossCheckReport {
    pub fn new(seeds: u64, max_registers: usize, layered: bool) -> Self {
        CrossCheckReport {
            seeds,
            max_registers,
            layered,
            checked: 0,
            aggregate_failures: 0,
            decomposed_failures: 0,
            inconsistent: Vec::new(),
        }
    }

    pub fn record(&mut self, e: CrossCheckEntry) {
        self.checked += 1;
        self.aggregate_failures += usize::from(!e.aggregate_holds);
        self.decomposed_failures += usize::from(!e.failing.is_empty());
        let consistent = e.failing.is_empty() == e.aggregate_holds;
        if !consistent {
            self.inconsistent.push(e);
        }
    }
}
