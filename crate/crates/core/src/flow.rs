// SPDX-License-Identifier: Apache-2.0

//! End-to-end detection: partition, property schedule, refinement of
//! failing properties, coverage verdict.

use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use crate::fanout::{check_signal_coverage, default_analysis_inputs, CoverageReport, FanoutGraph, FanoutPartition, PartitionSummary, SignalSet};
use crate::miter::{CexSummary, Counterexample, EncodingStats, MiterConfig, MiterSession, Verdict};
use crate::netlist::{Netlist, Sig, SignalId};
use crate::property::{
    create_fanout_property, create_init_property, create_trojan_property, decomposed_properties, EqualityProperty,
    PropertyError, PropertyId, PropertySummary, ResetConstraint,
};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FlowError {
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("reset `{0}` is not an input")]
    ResetNotInput(String),
    #[error("bad reset designation `{0}`, expected SIGNAL=0 or SIGNAL=1")]
    BadReset(String),
    #[error("thread pool: {0}")]
    Pool(String),
}

/// Reset input by name and its inactive value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResetSpec {
    pub signal: String,
    pub inactive: bool,
}

impl FromStr for ResetSpec {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self, FlowError> {
        let bad = || FlowError::BadReset(s.to_string());
        let (signal, value) = s.split_once('=').ok_or_else(bad)?;
        let inactive = match value.trim() {
            "0" => false,
            "1" => true,
            _ => return Err(bad()),
        };
        Ok(ResetSpec {
            signal: signal.trim().to_string(),
            inactive,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlowConfig {
    /// Assume every earlier level equal in each fanout property.
    pub strengthen: bool,
    /// Try to resolve failing properties by adding proven or disqualified
    /// equalities.
    pub refine: bool,
    pub reset: Option<ResetSpec>,
    /// Signals the engineer has disqualified as benign dependencies. A bus
    /// name selects all of its bits.
    pub assume_equal: Vec<String>,
    pub max_refinements: usize,
    #[serde(skip)]
    pub miter: MiterConfig,
    /// Worker threads for property checks; 0 picks a default.
    pub jobs: usize,
}

impl Default for FlowConfig {
    fn default() -> Self {
        FlowConfig {
            strengthen: true,
            refine: true,
            reset: None,
            assume_equal: Vec::new(),
            max_refinements: 16,
            miter: MiterConfig {
                maximal_cex: true,
                ..MiterConfig::default()
            },
            jobs: 0,
        }
    }
}

impl FlowConfig {
    /// Exact property shapes: no up-front strengthening.
    pub fn paper_literal() -> Self {
        FlowConfig {
            strengthen: false,
            ..FlowConfig::default()
        }
    }

    pub fn with_reset(mut self, signal: &str, inactive: bool) -> Self {
        self.reset = Some(ResetSpec {
            signal: signal.to_string(),
            inactive,
        });
        self
    }

    fn resolve(&self, n: &Netlist) -> Result<Resolved, FlowError> {
        let reset = match &self.reset {
            None => None,
            Some(r) => {
                let sig = lookup(n, &r.signal)?;
                if !n.is_input(sig) {
                    return Err(FlowError::ResetNotInput(r.signal.clone()));
                }
                Some(ResetConstraint {
                    input: sig,
                    inactive: r.inactive,
                })
            }
        };
        let mut assume_equal = SignalSet::new();
        for name in &self.assume_equal {
            assume_equal.extend(lookup_all(n, name)?);
        }
        Ok(Resolved { reset, assume_equal })
    }
}

struct Resolved {
    reset: Option<ResetConstraint>,
    assume_equal: SignalSet,
}

fn lookup(n: &Netlist, name: &str) -> Result<Sig, FlowError> {
    SignalId::from_str(name)
        .ok()
        .and_then(|id| n.lookup(&id))
        .ok_or_else(|| FlowError::UnknownSignal(name.to_string()))
}

fn lookup_all(n: &Netlist, name: &str) -> Result<Vec<Sig>, FlowError> {
    if let Ok(s) = lookup(n, name) {
        return Ok(vec![s]);
    }
    let bus = n.find_all(name.trim());
    if bus.is_empty() {
        Err(FlowError::UnknownSignal(name.to_string()))
    } else {
        Ok(bus)
    }
}

/// Why a failing property was not resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CexLabel {
    /// The differing signals behind the violation are not known to be
    /// equal; inspect the trace.
    Suspicious,
    /// The violation traces back only to signals proven equal elsewhere,
    /// disqualified signals, or free inputs after the start; refinement was
    /// disabled or could not apply.
    FalseAlarmCandidate,
    /// The refinement bound was reached.
    LimitExceeded,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Equalities proven by another property of the same run.
    ProvenElsewhere,
    /// Equalities from the engineer's assume-equal list.
    AssumeEqual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strengthening {
    pub property: PropertyId,
    pub scenario: Scenario,
    pub signals: SignalSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refinement {
    /// The strengthened property holds.
    Resolved {
        property: EqualityProperty,
        added: Vec<Strengthening>,
    },
    Confirmed {
        property: EqualityProperty,
        cex: Box<Counterexample>,
        label: CexLabel,
        added: Vec<Strengthening>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Detection {
    /// The failing property as last checked, strengthenings included.
    pub property: EqualityProperty,
    pub cex: Counterexample,
    /// Violated signals and differing starting-state bits.
    pub suspects: SignalSet,
    pub label: CexLabel,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FlowVerdict {
    Secure,
    Cex(Box<Detection>),
    Uncovered(SignalSet),
}

impl FlowVerdict {
    /// Process exit code for this verdict.
    pub fn exit_code(&self) -> i32 {
        match self {
            FlowVerdict::Secure => 0,
            FlowVerdict::Cex(_) => 1,
            FlowVerdict::Uncovered(_) => 2,
        }
    }

    pub fn is_secure(&self) -> bool {
        matches!(self, FlowVerdict::Secure)
    }

    pub fn detection(&self) -> Option<&Detection> {
        match self {
            FlowVerdict::Cex(d) => Some(d),
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            FlowVerdict::Secure => "secure",
            FlowVerdict::Cex(_) => "cex",
            FlowVerdict::Uncovered(_) => "uncovered",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Holds,
    /// Failed at first, holds after strengthening.
    Refined,
    Fails,
    /// Scheduled after the reported failure and not needed for the verdict.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyRecord {
    pub property: EqualityProperty,
    pub outcome: Outcome,
    pub stats: EncodingStats,
    pub elapsed: Duration,
}

/// Everything a detection run produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetectionRun {
    pub partition: FanoutPartition,
    pub records: Vec<PropertyRecord>,
    pub strengthenings: Vec<Strengthening>,
    pub coverage: Option<CoverageReport>,
    pub verdict: FlowVerdict,
    pub elapsed: Duration,
}

struct Checked {
    verdict: Verdict,
    stats: EncodingStats,
    elapsed: Duration,
}

fn check_one(n: &Netlist, p: &EqualityProperty, cfg: &MiterConfig) -> Result<Checked, Error> {
    let start = Instant::now();
    let mut s = MiterSession::new(n, p, cfg)?;
    let verdict = s.check()?;
    Ok(Checked {
        verdict,
        stats: s.stats(),
        elapsed: start.elapsed(),
    })
}

fn with_pool<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T, FlowError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| FlowError::Pool(e.to_string()))?;
    Ok(pool.install(f))
}

/// Registers whose value at offset 0 can influence `sig` at `offset`.
pub fn start_support(n: &Netlist, offset: usize, sig: Sig) -> SignalSet {
    let mut frontier: SignalSet = [sig].into();
    for step in (0..=offset).rev() {
        let regs = comb_registers(n, &frontier);
        if step == 0 {
            return regs;
        }
        frontier = regs.iter().filter_map(|&r| n.next_state(r)).collect();
    }
    unreachable!("loop returns at step 0")
}

fn comb_registers(n: &Netlist, roots: &SignalSet) -> SignalSet {
    let mut seen = vec![false; n.len()];
    let mut stack: Vec<Sig> = roots.iter().copied().collect();
    let mut out = SignalSet::new();
    while let Some(s) = stack.pop() {
        if std::mem::replace(&mut seen[s.index()], true) {
            continue;
        }
        if n.is_register(s) {
            out.insert(s);
        } else {
            stack.extend(n.signal(s).comb_operands());
        }
    }
    out
}

/// Start registers behind the violations of `cex` that differ between the
/// instances and are not already assumed equal.
pub fn differing_support(n: &Netlist, p: &EqualityProperty, cex: &Counterexample) -> SignalSet {
    let assumed = p.assumed_at_start();
    let differing = cex.differing_start_bits(n);
    cex.violated()
        .into_iter()
        .flat_map(|(t, s)| start_support(n, t, s))
        .filter(|r| differing.contains(r) && !assumed.contains(r))
        .collect()
}

/// Tries to turn a failing property into a holding one by assuming the
/// equality of the differing signals behind the violation. Signals in
/// `proven` (proven by other properties of the run) are added first, then
/// signals from the configured assume-equal list; anything else confirms
/// the counterexample.
pub fn refine_on_cex(
    n: &Netlist,
    failing: &EqualityProperty,
    cex: &Counterexample,
    cfg: &FlowConfig,
    proven: &SignalSet,
) -> Result<Refinement, Error> {
    let resolved = cfg.resolve(n)?;
    refine(n, failing, cex, cfg, proven, &resolved.assume_equal)
}

fn refine(
    n: &Netlist,
    failing: &EqualityProperty,
    cex: &Counterexample,
    cfg: &FlowConfig,
    proven: &SignalSet,
    assume_equal: &SignalSet,
) -> Result<Refinement, Error> {
    let mut property = failing.clone();
    let mut cex = cex.clone();
    let mut added = Vec::new();
    for _ in 0..cfg.max_refinements {
        let x = differing_support(n, &property, &cex);
        let elsewhere: SignalSet = x.intersection(proven).copied().collect();
        let disqualified: SignalSet = x.difference(proven).filter(|s| assume_equal.contains(s)).copied().collect();
        if elsewhere.is_empty() && disqualified.is_empty() {
            let label = if x.is_empty() {
                CexLabel::FalseAlarmCandidate
            } else {
                CexLabel::Suspicious
            };
            return Ok(Refinement::Confirmed {
                property,
                cex: Box::new(cex),
                label,
                added,
            });
        }
        for (scenario, signals) in [(Scenario::ProvenElsewhere, elsewhere), (Scenario::AssumeEqual, disqualified)] {
            if !signals.is_empty() {
                property = property.assuming(0, signals.iter().copied());
                added.push(Strengthening {
                    property: property.id.clone(),
                    scenario,
                    signals,
                });
            }
        }
        match check_one(n, &property, &cfg.miter)?.verdict {
            Verdict::Holds => return Ok(Refinement::Resolved { property, added }),
            Verdict::Fails(c) => cex = *c,
        }
    }
    Ok(Refinement::Confirmed {
        property,
        cex: Box::new(cex),
        label: CexLabel::LimitExceeded,
        added,
    })
}

/// Label of an unrefined counterexample: whether refinement could have
/// applied.
fn classify(n: &Netlist, p: &EqualityProperty, cex: &Counterexample, proven: &SignalSet, assume_equal: &SignalSet) -> CexLabel {
    let x = differing_support(n, p, cex);
    if x.iter().all(|s| proven.contains(s) || assume_equal.contains(s)) {
        CexLabel::FalseAlarmCandidate
    } else {
        CexLabel::Suspicious
    }
}

fn detection(n: &Netlist, property: EqualityProperty, cex: Counterexample, label: CexLabel) -> FlowVerdict {
    let mut suspects: SignalSet = cex.violated().into_iter().map(|(_, s)| s).collect();
    suspects.extend(cex.differing_start_bits(n));
    FlowVerdict::Cex(Box::new(Detection {
        property,
        cex,
        suspects,
        label,
    }))
}

/// Partition of `n` under the configured reset.
pub fn partition(n: &Netlist, cfg: &FlowConfig) -> Result<FanoutPartition, Error> {
    n.ensure_valid()?;
    let resolved = cfg.resolve(n)?;
    partition_with(n, &resolved)
}

fn partition_with(n: &Netlist, r: &Resolved) -> Result<FanoutPartition, Error> {
    let inputs = default_analysis_inputs(n, r.reset.map(|r| r.input));
    Ok(FanoutGraph::new(n)?.compute_partition(&inputs)?)
}

/// Partition plus coverage check, no properties.
pub fn coverage(n: &Netlist, cfg: &FlowConfig) -> Result<(FanoutPartition, CoverageReport), Error> {
    let p = partition(n, cfg)?;
    let report = check_signal_coverage(n, &p.union());
    Ok((p, report))
}

/// The property schedule of a run: init, then `fanout_property_k` for every
/// level. With strengthening, property `k` additionally assumes levels
/// `0..k`.
pub fn schedule(partition: &FanoutPartition, strengthen: bool, reset: Option<ResetConstraint>) -> Result<Vec<EqualityProperty>, PropertyError> {
    let empty = SignalSet::new();
    let cc1 = partition.levels.first().unwrap_or(&empty);
    let mut out = vec![create_init_property(&partition.analysis_inputs, cc1, &partition.level0)?];
    let mut earlier = partition.level0.clone();
    for k in 1..=partition.len() {
        let next = partition.levels.get(k).unwrap_or(&empty);
        let extra = if strengthen { &earlier } else { &empty };
        out.push(create_fanout_property(k, partition.level(k), next, extra)?);
        earlier.extend(partition.level(k).iter().copied());
    }
    Ok(out.into_iter().map(|p| p.with_reset(reset)).collect())
}

fn proven_by(p: &EqualityProperty) -> impl Iterator<Item = Sig> + '_ {
    p.prove.iter().flat_map(|t| t.signals.iter().copied())
}

/// Runs the full detection flow.
pub fn run_detection(n: &Netlist, cfg: &FlowConfig) -> Result<DetectionRun, Error> {
    let start = Instant::now();
    n.ensure_valid()?;
    let resolved = cfg.resolve(n)?;
    let partition = partition_with(n, &resolved)?;
    let finish = |partition, records, strengthenings, coverage, verdict| DetectionRun {
        partition,
        records,
        strengthenings,
        coverage,
        verdict,
        elapsed: start.elapsed(),
    };
    if partition.is_empty() && partition.level0.is_empty() {
        let report = check_signal_coverage(n, &SignalSet::new());
        let verdict = if report.is_complete() {
            FlowVerdict::Secure
        } else {
            FlowVerdict::Uncovered(report.uncovered.clone())
        };
        return Ok(finish(partition, Vec::new(), Vec::new(), Some(report), verdict));
    }
    let props = schedule(&partition, cfg.strengthen, resolved.reset)?;
    let checked: Vec<Result<Checked, Error>> =
        with_pool(cfg.jobs, || props.par_iter().map(|p| check_one(n, p, &cfg.miter)).collect())?;
    let mut records = Vec::with_capacity(props.len());
    let mut strengthenings = Vec::new();
    let mut proven = SignalSet::new();
    let mut failure = None;
    for (p, c) in props.iter().zip(checked) {
        if failure.is_some() {
            records.push(PropertyRecord {
                property: p.clone(),
                outcome: Outcome::Skipped,
                stats: EncodingStats::default(),
                elapsed: Duration::ZERO,
            });
            continue;
        }
        let c = c?;
        let mut record = PropertyRecord {
            property: p.clone(),
            outcome: Outcome::Holds,
            stats: c.stats,
            elapsed: c.elapsed,
        };
        if let Verdict::Fails(cex) = c.verdict {
            let t = Instant::now();
            let outcome = if cfg.refine {
                refine(n, p, &cex, cfg, &proven, &resolved.assume_equal)?
            } else {
                Refinement::Confirmed {
                    property: p.clone(),
                    label: classify(n, p, &cex, &proven, &resolved.assume_equal),
                    cex,
                    added: Vec::new(),
                }
            };
            record.elapsed += t.elapsed();
            match outcome {
                Refinement::Resolved { property, added } => {
                    record.property = property;
                    record.outcome = Outcome::Refined;
                    strengthenings.extend(added);
                }
                Refinement::Confirmed {
                    property,
                    cex,
                    label,
                    added,
                } => {
                    record.property = property.clone();
                    record.outcome = Outcome::Fails;
                    strengthenings.extend(added);
                    failure = Some(detection(n, property, *cex, label));
                }
            }
        }
        proven.extend(proven_by(&record.property));
        records.push(record);
    }
    if let Some(verdict) = failure {
        return Ok(finish(partition, records, strengthenings, None, verdict));
    }
    let report = check_signal_coverage(n, &partition.union());
    let verdict = if report.is_complete() {
        FlowVerdict::Secure
    } else {
        FlowVerdict::Uncovered(report.uncovered.clone())
    };
    Ok(finish(partition, records, strengthenings, Some(report), verdict))
}

/// Result of the monolithic check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AggregateRun {
    pub partition: FanoutPartition,
    pub record: Option<PropertyRecord>,
    pub coverage: Option<CoverageReport>,
    pub verdict: FlowVerdict,
    pub elapsed: Duration,
}

/// Checks the single multi-cycle property covering every level, then
/// coverage.
pub fn run_aggregate(n: &Netlist, cfg: &FlowConfig) -> Result<AggregateRun, Error> {
    let start = Instant::now();
    n.ensure_valid()?;
    let resolved = cfg.resolve(n)?;
    let partition = partition_with(n, &resolved)?;
    let mut record = None;
    let mut verdict = None;
    if !(partition.is_empty() && partition.level0.is_empty()) {
        let p = create_trojan_property(&partition)?.with_reset(resolved.reset);
        let c = check_one(n, &p, &cfg.miter)?;
        let outcome = if c.verdict.holds() { Outcome::Holds } else { Outcome::Fails };
        if let Verdict::Fails(cex) = c.verdict {
            let label = classify(n, &p, &cex, &SignalSet::new(), &resolved.assume_equal);
            verdict = Some(detection(n, p.clone(), *cex, label));
        }
        record = Some(PropertyRecord {
            property: p,
            outcome,
            stats: c.stats,
            elapsed: c.elapsed,
        });
    }
    let (coverage, verdict) = match verdict {
        Some(v) => (None, v),
        None => {
            let report = check_signal_coverage(n, &partition.union());
            let v = if report.is_complete() {
                FlowVerdict::Secure
            } else {
                FlowVerdict::Uncovered(report.uncovered.clone())
            };
            (Some(report), v)
        }
    };
    Ok(AggregateRun {
        partition,
        record,
        coverage,
        verdict,
        elapsed: start.elapsed(),
    })
}

/// Agreement between the decomposed properties and the aggregate one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossCheck {
    /// `(property, holds)` for init and every fanout property.
    pub decomposed: Vec<(String, bool)>,
    pub aggregate_holds: bool,
}

impl CrossCheck {
    pub fn decomposed_fails(&self) -> bool {
        self.decomposed.iter().any(|(_, holds)| !holds)
    }

    /// Some decomposed property fails iff the aggregate property fails.
    pub fn consistent(&self) -> bool {
        self.decomposed_fails() != self.aggregate_holds
    }
}

/// Decides every unstrengthened decomposed property and the aggregate
/// property. Strengthening settings in `cfg` are ignored.
pub fn cross_check_decomposition(n: &Netlist, cfg: &FlowConfig) -> Result<CrossCheck, Error> {
    n.ensure_valid()?;
    let resolved = cfg.resolve(n)?;
    let partition = partition_with(n, &resolved)?;
    let miter = MiterConfig {
        maximal_cex: false,
        ..cfg.miter.clone()
    };
    let decomposed = match decomposed_properties(&partition) {
        Ok(ps) => ps,
        Err(PropertyError::NoInputFanout) => {
            return Ok(CrossCheck {
                decomposed: Vec::new(),
                aggregate_holds: true,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let aggregate = create_trojan_property(&partition)?.with_reset(resolved.reset);
    let mut all: Vec<EqualityProperty> = decomposed.into_iter().map(|p| p.with_reset(resolved.reset)).collect();
    all.push(aggregate);
    let results: Vec<Result<bool, Error>> = with_pool(cfg.jobs, || {
        all.par_iter()
            .map(|p| Ok(check_one(n, p, &miter)?.verdict.holds()))
            .collect()
    })?;
    let mut holds = results.into_iter().collect::<Result<Vec<bool>, Error>>()?;
    let aggregate_holds = holds.pop().expect("aggregate is last");
    Ok(CrossCheck {
        decomposed: all.iter().map(|p| p.id.to_string()).zip(holds).collect(),
        aggregate_holds,
    })
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub property: PropertySummary,
    pub outcome: Outcome,
    pub obligations: usize,
    pub encoding: EncodingStats,
    pub elapsed_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrengtheningReport {
    pub property: String,
    pub scenario: Scenario,
    pub signals: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerdictReport {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub property: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<CexLabel>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub suspects: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub uncovered: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<CexSummary>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageSummary {
    pub covered: Vec<String>,
    pub uncovered: Vec<String>,
}

impl CoverageSummary {
    pub fn new(n: &Netlist, c: &CoverageReport) -> Self {
        CoverageSummary {
            covered: n.names(&c.covered),
            uncovered: n.names(&c.uncovered),
        }
    }
}

/// Name-based, serializable view of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub partition: PartitionSummary,
    pub properties: Vec<PropertyReport>,
    pub strengthenings: Vec<StrengtheningReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coverage: Option<CoverageSummary>,
    pub verdict: VerdictReport,
    pub elapsed_ms: f64,
}

fn millis(d: Duration) -> f64 {
    (d.as_secs_f64() * 1e6).round() / 1e3
}

impl PropertyRecord {
    pub fn summary(&self, n: &Netlist) -> PropertyReport {
        PropertyReport {
            property: self.property.summary(n),
            outcome: self.outcome,
            obligations: self.property.obligations(n).len(),
            encoding: self.stats,
            elapsed_ms: millis(self.elapsed),
        }
    }
}

impl Strengthening {
    pub fn summary(&self, n: &Netlist) -> StrengtheningReport {
        StrengtheningReport {
            property: self.property.to_string(),
            scenario: self.scenario,
            signals: n.names(&self.signals),
        }
    }
}

impl FlowVerdict {
    pub fn summary(&self, n: &Netlist) -> VerdictReport {
        let mut r = VerdictReport {
            kind: self.kind(),
            property: None,
            label: None,
            suspects: Vec::new(),
            uncovered: Vec::new(),
            counterexample: None,
        };
        match self {
            FlowVerdict::Secure => {}
            FlowVerdict::Cex(d) => {
                r.property = Some(d.property.id.to_string());
                r.label = Some(d.label);
                r.suspects = n.names(&d.suspects);
                r.counterexample = Some(d.cex.summary(n));
            }
            FlowVerdict::Uncovered(u) => r.uncovered = n.names(u),
        }
        r
    }
}

impl DetectionRun {
    pub fn summary(&self, n: &Netlist) -> RunSummary {
        RunSummary {
            partition: self.partition.summary(n),
            properties: self.records.iter().map(|r| r.summary(n)).collect(),
            strengthenings: self.strengthenings.iter().map(|s| s.summary(n)).collect(),
            coverage: self.coverage.as_ref().map(|c| CoverageSummary::new(n, c)),
            verdict: self.verdict.summary(n),
            elapsed_ms: millis(self.elapsed),
        }
    }
}

impl AggregateRun {
    pub fn summary(&self, n: &Netlist) -> RunSummary {
        RunSummary {
            partition: self.partition.summary(n),
            properties: self.record.iter().map(|r| r.summary(n)).collect(),
            strengthenings: Vec::new(),
            coverage: self.coverage.as_ref().map(|c| CoverageSummary::new(n, c)),
            verdict: self.verdict.summary(n),
            elapsed_ms: millis(self.elapsed),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::parse_netlist;

    const TICKFLIP: &str = "module tickflip\ninput a\nreg t next=NOT(t)\nreg o next=XOR(a,t)\noutput y = o\n";
    const DOS: &str = "module dos\ninput a\nreg o next=a\noutput y = o\nreg c0 next=XOR(c0, CONST1)\n";
    const REUSE: &str = "module reuse\ninput a\nreg x next=a\nreg w next=x\nreg z next=XOR(w,x)\noutput y = z\n";

    #[test]
    fn tickflip_is_caught_by_init() {
        let n = parse_netlist(TICKFLIP).unwrap();
        let run = run_detection(&n, &FlowConfig::default()).unwrap();
        let d = run.verdict.detection().expect("cex");
        assert_eq!(d.property.id, PropertyId::Init);
        assert!(d.suspects.contains(&n.find("o").unwrap()));
        assert!(d.cex.differing_start_bits(&n).contains(&n.find("t").unwrap()));
        assert_eq!(run.verdict.exit_code(), 1);
        d.cex.replay(&n).unwrap();
    }

    #[test]
    fn detached_counter_is_uncovered() {
        let n = parse_netlist(DOS).unwrap();
        let run = run_detection(&n, &FlowConfig::default()).unwrap();
        assert_eq!(run.verdict, FlowVerdict::Uncovered([n.find("c0").unwrap()].into()));
        assert_eq!(run.verdict.exit_code(), 2);
    }

    #[test]
    fn reuse_fanout_2_is_resolved_by_proven_x() {
        let n = parse_netlist(REUSE).unwrap();
        let cfg = FlowConfig::paper_literal();
        let part = partition(&n, &cfg).unwrap();
        let props = schedule(&part, false, None).unwrap();
        let fp2 = &props[2];
        assert_eq!(fp2.id, PropertyId::Fanout(2));
        let Verdict::Fails(cex) = check_one(&n, fp2, &cfg.miter).unwrap().verdict else {
            panic!("fanout_property_2 should fail")
        };
        assert!(cex.violated().contains(&(1, n.find("z").unwrap())));
        let proven: SignalSet = proven_by(&props[0]).collect();
        match refine_on_cex(&n, fp2, &cex, &cfg, &proven).unwrap() {
            Refinement::Resolved { added, .. } => {
                assert_eq!(added.len(), 1);
                assert_eq!(added[0].scenario, Scenario::ProvenElsewhere);
                assert_eq!(n.names(&added[0].signals), ["x"]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn reset_designation_parses() {
        assert_eq!(
            "rst=1".parse::<ResetSpec>().unwrap(),
            ResetSpec {
                signal: "rst".into(),
                inactive: true
            }
        );
        assert!("rst".parse::<ResetSpec>().is_err());
        assert!("rst=2".parse::<ResetSpec>().is_err());
    }

    #[test]
    fn unknown_assume_equal_signal_is_rejected() {
        let n = parse_netlist(TICKFLIP).unwrap();
        let cfg = FlowConfig {
            assume_equal: vec!["nope".into()],
            ..FlowConfig::default()
        };
        assert!(matches!(run_detection(&n, &cfg), Err(Error::Flow(FlowError::UnknownSignal(_)))));
    }
}
