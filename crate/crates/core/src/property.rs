// SPDX-License-Identifier: Apache-2.0

//! Interval properties over two instances of a netlist.
//!
//! Every property assumes some signals equal between the instances at given
//! time offsets from a symbolic start `t` and asks whether other signals are
//! then necessarily equal at later offsets.

use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::fanout::{FanoutPartition, SignalSet};
use crate::netlist::{Netlist, Sig};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum PropertyId {
    Init,
    Fanout(usize),
    Trojan,
    Custom(String),
}

impl fmt::Display for PropertyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PropertyId::Init => f.write_str("init_property"),
            PropertyId::Fanout(k) => write!(f, "fanout_property_{k}"),
            PropertyId::Trojan => f.write_str("trojan_property"),
            PropertyId::Custom(s) => f.write_str(s),
        }
    }
}

impl PropertyId {
    /// Position in the decomposed schedule: init is 0, `fanout_property_k` is `k`.
    pub fn schedule_index(&self) -> Option<usize> {
        match self {
            PropertyId::Init => Some(0),
            PropertyId::Fanout(k) => Some(*k),
            _ => None,
        }
    }
}

/// A set of signals compared at `t + offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimedSet {
    pub offset: usize,
    pub signals: SignalSet,
}

/// Reset input held at its inactive value in both instances for the whole
/// window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ResetConstraint {
    pub input: Sig,
    pub inactive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualityProperty {
    pub id: PropertyId,
    pub assume: Vec<TimedSet>,
    pub prove: Vec<TimedSet>,
    pub reset: Option<ResetConstraint>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PropertyError {
    #[error("no input influences any state or output signal")]
    NoInputFanout,
    #[error("fanout property {0} has nothing to assume")]
    EmptyAssume(usize),
    #[error("empty partition")]
    EmptyPartition,
}

fn timed(offset: usize, signals: SignalSet) -> TimedSet {
    TimedSet { offset, signals }
}

impl EqualityProperty {
    pub fn new(id: PropertyId) -> Self {
        EqualityProperty {
            id,
            assume: Vec::new(),
            prove: Vec::new(),
            reset: None,
        }
    }

    pub fn assuming(mut self, offset: usize, signals: impl IntoIterator<Item = Sig>) -> Self {
        self.assume.push(timed(offset, signals.into_iter().collect()));
        self
    }

    pub fn proving(mut self, offset: usize, signals: impl IntoIterator<Item = Sig>) -> Self {
        self.prove.push(timed(offset, signals.into_iter().collect()));
        self
    }

    pub fn with_reset(mut self, reset: Option<ResetConstraint>) -> Self {
        self.reset = reset;
        self
    }

    /// Number of transitions to unroll; the largest offset mentioned.
    pub fn window(&self) -> usize {
        self.assume
            .iter()
            .chain(&self.prove)
            .map(|t| t.offset)
            .max()
            .unwrap_or(0)
    }

    /// A property with nothing to prove holds vacuously.
    pub fn is_vacuous(&self) -> bool {
        self.prove.iter().all(|t| t.signals.is_empty())
    }

    /// Prove obligations `(offset, signal)` in canonical order: by offset,
    /// then by signal name.
    pub fn obligations(&self, n: &Netlist) -> Vec<(usize, Sig)> {
        let mut out: Vec<(usize, Sig)> = Vec::new();
        for t in &self.prove {
            out.extend(t.signals.iter().map(|&s| (t.offset, s)));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| n.id(a.1).cmp(n.id(b.1))));
        out.dedup();
        out
    }

    /// Assumed equalities `(offset, signal)` in canonical order.
    pub fn assumptions(&self, n: &Netlist) -> Vec<(usize, Sig)> {
        let mut out: Vec<(usize, Sig)> = Vec::new();
        for t in &self.assume {
            out.extend(t.signals.iter().map(|&s| (t.offset, s)));
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| n.id(a.1).cmp(n.id(b.1))));
        out.dedup();
        out
    }

    /// Signals assumed equal at offset 0.
    pub fn assumed_at_start(&self) -> SignalSet {
        self.assume
            .iter()
            .filter(|t| t.offset == 0)
            .flat_map(|t| t.signals.iter().copied())
            .collect()
    }

    /// Every signal index mentioned by the property.
    pub fn signals(&self) -> impl Iterator<Item = Sig> + '_ {
        self.assume
            .iter()
            .chain(&self.prove)
            .flat_map(|t| t.signals.iter().copied())
            .chain(self.reset.map(|r| r.input))
    }

    /// Human-readable rendering in assume/prove layout.
    pub fn to_text(&self, n: &Netlist) -> String {
        let at = |o: usize| if o == 0 { "t".to_string() } else { format!("t+{o}") };
        let mut out = String::new();
        writeln!(out, "property {}", self.id).unwrap();
        writeln!(out, "  assume:").unwrap();
        for t in merged(&self.assume) {
            writeln!(out, "    at {}: {}", at(t.offset), n.names(&t.signals).join(", ")).unwrap();
        }
        if let Some(r) = self.reset {
            writeln!(
                out,
                "    during t..{}: {} = {}",
                at(self.window()),
                n.id(r.input),
                u8::from(r.inactive)
            )
            .unwrap();
        }
        writeln!(out, "  prove:").unwrap();
        for t in merged(&self.prove) {
            writeln!(out, "    at {}: {}", at(t.offset), n.names(&t.signals).join(", ")).unwrap();
        }
        out
    }

    pub fn summary(&self, n: &Netlist) -> PropertySummary {
        let list = |v: &[TimedSet]| {
            merged(v)
                .into_iter()
                .map(|t| TimedNames {
                    offset: t.offset,
                    signals: n.names(&t.signals),
                })
                .collect()
        };
        PropertySummary {
            id: self.id.to_string(),
            window: self.window(),
            assume: list(&self.assume),
            prove: list(&self.prove),
            reset: self.reset.map(|r| (n.id(r.input).to_string(), r.inactive)),
        }
    }
}

/// Sets with equal offsets combined, sorted by offset, empty ones dropped.
fn merged(v: &[TimedSet]) -> Vec<TimedSet> {
    let mut by: std::collections::BTreeMap<usize, SignalSet> = Default::default();
    for t in v {
        by.entry(t.offset).or_default().extend(t.signals.iter().copied());
    }
    by.into_iter()
        .filter(|(_, s)| !s.is_empty())
        .map(|(offset, signals)| TimedSet { offset, signals })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TimedNames {
    pub offset: usize,
    pub signals: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertySummary {
    pub id: String,
    pub window: usize,
    pub assume: Vec<TimedNames>,
    pub prove: Vec<TimedNames>,
    pub reset: Option<(String, bool)>,
}

/// Inputs equal at `t`; level-1 signals equal at `t+1` and zero-cycle
/// outputs equal at `t`.
pub fn create_init_property(
    inputs: &SignalSet,
    cc1: &SignalSet,
    level0: &SignalSet,
) -> Result<EqualityProperty, PropertyError> {
    if cc1.is_empty() && level0.is_empty() {
        return Err(PropertyError::NoInputFanout);
    }
    let mut p = EqualityProperty::new(PropertyId::Init).assuming(0, inputs.iter().copied());
    if !level0.is_empty() {
        p = p.proving(0, level0.iter().copied());
    }
    Ok(p.proving(1, cc1.iter().copied()))
}

/// Level `k` (plus `extra_assumes`) equal at `t`; level `k+1` equal at `t+1`.
pub fn create_fanout_property(
    k: usize,
    cc_k: &SignalSet,
    cc_k1: &SignalSet,
    extra_assumes: &SignalSet,
) -> Result<EqualityProperty, PropertyError> {
    if cc_k.is_empty() {
        return Err(PropertyError::EmptyAssume(k));
    }
    let p = EqualityProperty::new(PropertyId::Fanout(k)).assuming(0, cc_k.iter().copied());
    let p = if extra_assumes.is_empty() {
        p
    } else {
        p.assuming(0, extra_assumes.difference(cc_k).copied())
    };
    Ok(p.proving(1, cc_k1.iter().copied()))
}

/// Inputs equal at `t`; level `k` equal at `t+k` for every level, window
/// `n` = number of levels.
pub fn create_trojan_property(partition: &FanoutPartition) -> Result<EqualityProperty, PropertyError> {
    if partition.is_empty() && partition.level0.is_empty() {
        return Err(PropertyError::EmptyPartition);
    }
    let mut p =
        EqualityProperty::new(PropertyId::Trojan).assuming(0, partition.analysis_inputs.iter().copied());
    if !partition.level0.is_empty() {
        p = p.proving(0, partition.level0.iter().copied());
    }
    for (i, level) in partition.levels.iter().enumerate() {
        p = p.proving(i + 1, level.iter().copied());
    }
    Ok(p)
}

/// The unstrengthened decomposed property set of a partition: init, then
/// `fanout_property_k` for `k = 1..=n`. The last one has an empty prove part
/// when the partition tail is empty.
pub fn decomposed_properties(partition: &FanoutPartition) -> Result<Vec<EqualityProperty>, PropertyError> {
    let empty = SignalSet::new();
    let cc1 = partition.levels.first().unwrap_or(&empty);
    let mut out = vec![create_init_property(&partition.analysis_inputs, cc1, &partition.level0)?];
    for k in 1..=partition.len() {
        let next = partition.levels.get(k).unwrap_or(&empty);
        out.push(create_fanout_property(k, partition.level(k), next, &empty)?);
    }
    Ok(out)
}
