// SPDX-License-Identifier: Apache-2.0

//! Structural input-fanout analysis.
//!
//! Level `k` of the partition holds the state and output signals reached
//! from the analysis inputs after `k` clock edges. Outputs that read an
//! input through combinational logic alone form level 0. Raw levels keep
//! every signal reachable at that distance (so a signal may recur); the
//! first-seen view assigns each signal its minimum distance only.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::netlist::{Netlist, Sig};

pub type SignalSet = BTreeSet<Sig>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FanoutError {
    #[error("unknown signal index {0}")]
    UnknownSignal(usize),
    #[error("`{0}` is not an input")]
    NotAnInput(String),
    #[error("netlist has a combinational cycle")]
    Cyclic,
}

/// Cached evaluation order for repeated fanout queries on one netlist.
#[derive(Debug, Clone)]
pub struct FanoutGraph<'n> {
    netlist: &'n Netlist,
    order: Vec<Sig>,
}

impl<'n> FanoutGraph<'n> {
    pub fn new(netlist: &'n Netlist) -> Result<Self, FanoutError> {
        let order = crate::netlist::comb_order(netlist).ok_or(FanoutError::Cyclic)?;
        Ok(FanoutGraph { netlist, order })
    }

    pub fn netlist(&self) -> &'n Netlist {
        self.netlist
    }

    /// Marks every signal whose same-cycle combinational cone contains a seed.
    fn taint(&self, seeds: impl IntoIterator<Item = Sig>) -> Vec<bool> {
        let n = self.netlist;
        let mut t = vec![false; n.len()];
        for s in seeds {
            t[s.index()] = true;
        }
        for &s in &self.order {
            if !t[s.index()] && n.signal(s).comb_operands().any(|o| t[o.index()]) {
                t[s.index()] = true;
            }
        }
        t
    }

    fn check(&self, seeds: &SignalSet) -> Result<(), FanoutError> {
        match seeds.iter().find(|s| s.index() >= self.netlist.len()) {
            Some(s) => Err(FanoutError::UnknownSignal(s.index())),
            None => Ok(()),
        }
    }

    /// Registers whose next state reads a seed, plus outputs that read one
    /// of those registers in the same cycle. An output reading a seed
    /// directly belongs to the seed's own level and is not returned.
    pub fn get_fanout(&self, seeds: &SignalSet) -> Result<SignalSet, FanoutError> {
        self.check(seeds)?;
        let n = self.netlist;
        let t = self.taint(seeds.iter().copied());
        let regs: Vec<Sig> = n
            .registers()
            .iter()
            .copied()
            .filter(|&r| t[n.next_state(r).unwrap().index()])
            .collect();
        let t2 = self.taint(regs.iter().copied());
        let mut out: SignalSet = regs.into_iter().collect();
        out.extend(n.outputs().iter().copied().filter(|o| t2[o.index()]));
        Ok(out)
    }

    /// Outputs combinationally reading any of `inputs`.
    pub fn zero_cycle_outputs(&self, inputs: &SignalSet) -> SignalSet {
        let t = self.taint(inputs.iter().copied());
        self.netlist.outputs().iter().copied().filter(|o| t[o.index()]).collect()
    }

    pub fn compute_partition(&self, analysis_inputs: &SignalSet) -> Result<FanoutPartition, FanoutError> {
        self.check(analysis_inputs)?;
        let n = self.netlist;
        if let Some(&s) = analysis_inputs.iter().find(|&&s| !n.is_input(s)) {
            return Err(FanoutError::NotAnInput(n.id(s).to_string()));
        }
        let level0 = self.zero_cycle_outputs(analysis_inputs);
        let mut seen: SignalSet = level0.clone();
        let mut levels: Vec<SignalSet> = Vec::new();
        let mut first_seen: Vec<SignalSet> = Vec::new();
        let mut frontier = analysis_inputs.clone();
        let tail_empty = loop {
            let next = self.get_fanout(&frontier)?;
            if next.is_empty() {
                break true;
            }
            let fresh: SignalSet = next.difference(&seen).copied().collect();
            let grows = !fresh.is_empty();
            seen.extend(fresh.iter().copied());
            levels.push(next.clone());
            first_seen.push(fresh);
            if !grows {
                break false;
            }
            frontier = next;
        };
        Ok(FanoutPartition {
            analysis_inputs: analysis_inputs.clone(),
            level0,
            levels,
            first_seen,
            tail_empty,
        })
    }
}

/// Input-fanout partition of a netlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanoutPartition {
    pub analysis_inputs: SignalSet,
    /// Outputs reading an analysis input combinationally.
    pub level0: SignalSet,
    /// Raw levels; `levels[k - 1]` is level `k`.
    pub levels: Vec<SignalSet>,
    /// Signals first reached at each level (pairwise disjoint, also
    /// disjoint from `level0`).
    pub first_seen: Vec<SignalSet>,
    /// Whether the fanout of the last level is empty. When it is not, the
    /// last level was reached again without adding signals.
    pub tail_empty: bool,
}

impl FanoutPartition {
    /// Number of levels `n` (excluding level 0); also the window length of
    /// the aggregate property.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Fanout iterations performed. Equals the level count.
    pub fn iterations(&self) -> usize {
        self.levels.len()
    }

    /// Raw level `k`, for `k` in `1..=len()`. Level 0 is `level0`.
    pub fn level(&self, k: usize) -> &SignalSet {
        if k == 0 {
            &self.level0
        } else {
            &self.levels[k - 1]
        }
    }

    /// Every partitioned signal, including level 0.
    pub fn union(&self) -> SignalSet {
        let mut u = self.level0.clone();
        for l in &self.levels {
            u.extend(l.iter().copied());
        }
        u
    }

    /// Minimum input distance of a signal, if it is partitioned.
    pub fn distance(&self, sig: Sig) -> Option<usize> {
        if self.level0.contains(&sig) {
            return Some(0);
        }
        self.first_seen.iter().position(|l| l.contains(&sig)).map(|k| k + 1)
    }

    pub fn summary(&self, n: &Netlist) -> PartitionSummary {
        PartitionSummary {
            analysis_inputs: n.names(&self.analysis_inputs),
            level0: n.names(&self.level0),
            levels: self.levels.iter().map(|l| n.names(l)).collect(),
            first_seen: self.first_seen.iter().map(|l| n.names(l)).collect(),
            iterations: self.iterations(),
            tail_empty: self.tail_empty,
        }
    }
}

/// Name-based view of a partition for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionSummary {
    pub analysis_inputs: Vec<String>,
    pub level0: Vec<String>,
    pub levels: Vec<Vec<String>>,
    pub first_seen: Vec<Vec<String>>,
    pub iterations: usize,
    pub tail_empty: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageReport {
    pub uncovered: SignalSet,
    pub covered: SignalSet,
}

impl CoverageReport {
    pub fn is_complete(&self) -> bool {
        self.uncovered.is_empty()
    }
}

pub fn get_fanout(n: &Netlist, seeds: &SignalSet) -> Result<SignalSet, FanoutError> {
    FanoutGraph::new(n)?.get_fanout(seeds)
}

pub fn compute_partition(n: &Netlist, analysis_inputs: &SignalSet) -> Result<FanoutPartition, FanoutError> {
    FanoutGraph::new(n)?.compute_partition(analysis_inputs)
}

/// All inputs except an optional designated reset.
pub fn default_analysis_inputs(n: &Netlist, reset: Option<Sig>) -> SignalSet {
    n.inputs().iter().copied().filter(|&i| Some(i) != reset).collect()
}

/// Splits registers and outputs into partitioned and uncovered.
pub fn check_signal_coverage(n: &Netlist, fanouts_all: &SignalSet) -> CoverageReport {
    let (covered, uncovered) = n.state_and_outputs().partition(|s| fanouts_all.contains(s));
    CoverageReport { uncovered, covered }
}
