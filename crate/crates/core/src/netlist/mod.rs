// SPDX-License-Identifier: Apache-2.0

//! Bit-level synchronous netlist IR.
//!
//! A [`Netlist`] is a flat list of single-bit [`Signal`]s. Each signal is an
//! input, a register (with a next-state signal and *no* initial value), a
//! gate-driven wire, or an alias of another signal. Outputs are aliases with
//! the output flag set. Buses only exist in the text format; in the IR a bus
//! `a[4]` is the four signals `a.0` .. `a.3`.

mod aiger;
mod builder;
mod parse;
mod sim;
mod validate;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use aiger::{import_aiger, AigerError, AigerImport};
pub use builder::NetlistBuilder;
pub use parse::{parse_netlist, ParseError, ParseErrorKind};
pub use sim::{step, InputAssignment, OutputAssignment, SimState, Simulator, Word};
pub use validate::{validate_netlist, Issue, ValidationReport};
pub(crate) use validate::comb_order;

/// Name of a single bit. Scalars have no bit index; bus bits do.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignalId {
    pub name: String,
    pub bit: Option<u32>,
}

impl SignalId {
    pub fn scalar(name: impl Into<String>) -> Self {
        SignalId {
            name: name.into(),
            bit: None,
        }
    }

    pub fn bit(name: impl Into<String>, bit: u32) -> Self {
        SignalId {
            name: name.into(),
            bit: Some(bit),
        }
    }
}

impl fmt::Display for SignalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.bit {
            Some(b) => write!(f, "{}.{}", self.name, b),
            None => f.write_str(&self.name),
        }
    }
}

impl FromStr for SignalId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (name, bit) = match s.rsplit_once('.') {
            Some((n, b)) => {
                let bit = b.parse::<u32>().map_err(|_| format!("bad bit index in `{s}`"))?;
                (n, Some(bit))
            }
            None => (s, None),
        };
        if !parse::is_identifier(name) {
            return Err(format!("`{s}` is not a signal name"));
        }
        Ok(SignalId {
            name: name.to_string(),
            bit,
        })
    }
}

/// Index of a signal inside its netlist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sig(pub(crate) u32);

impl Sig {
    pub fn new(index: usize) -> Sig {
        Sig(u32::try_from(index).expect("signal index overflows u32"))
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Single-bit combinational operator with its operands.
///
/// `Mux(sel, a, b)` evaluates to `a` when `sel` is 1 and to `b` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    And(Sig, Sig),
    Or(Sig, Sig),
    Xor(Sig, Sig),
    Not(Sig),
    Mux(Sig, Sig, Sig),
    Const(bool),
}

impl Gate {
    pub fn operands(&self) -> impl Iterator<Item = Sig> {
        let ops = match *self {
            Gate::And(a, b) | Gate::Or(a, b) | Gate::Xor(a, b) => [Some(a), Some(b), None],
            Gate::Not(a) => [Some(a), None, None],
            Gate::Mux(s, a, b) => [Some(s), Some(a), Some(b)],
            Gate::Const(_) => [None, None, None],
        };
        ops.into_iter().flatten()
    }

    pub fn op_name(&self) -> &'static str {
        match self {
            Gate::And(..) => "AND",
            Gate::Or(..) => "OR",
            Gate::Xor(..) => "XOR",
            Gate::Not(..) => "NOT",
            Gate::Mux(..) => "MUX",
            Gate::Const(false) => "CONST0",
            Gate::Const(true) => "CONST1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Driver {
    Input,
    Register { next: Sig },
    Gate(Gate),
    Alias(Sig),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signal {
    pub id: SignalId,
    pub driver: Driver,
    pub is_output: bool,
}

impl Signal {
    /// Signals read combinationally in the same cycle. Register next-state
    /// references cross a clock edge and are not included.
    pub fn comb_operands(&self) -> impl Iterator<Item = Sig> + '_ {
        let (gate, alias) = match &self.driver {
            Driver::Gate(g) => (Some(*g), None),
            Driver::Alias(s) => (None, Some(*s)),
            _ => (None, None),
        };
        gate.into_iter().flat_map(|g| g.operands()).chain(alias)
    }

    /// Every signal this one references, including a register's next state.
    pub fn references(&self) -> impl Iterator<Item = Sig> + '_ {
        let next = match self.driver {
            Driver::Register { next } => Some(next),
            _ => None,
        };
        self.comb_operands().chain(next)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NetlistError {
    #[error("duplicate declaration of `{0}`")]
    Duplicate(SignalId),
    #[error("register `{0}` has no next-state function")]
    MissingNext(SignalId),
    #[error("unknown signal `{0}`")]
    UnknownSignal(String),
    #[error("signal `{signal}` is not {expected}")]
    WrongKind { signal: SignalId, expected: &'static str },
    #[error("invalid netlist: {0}")]
    Invalid(ValidationReport),
}

/// Immutable bit-level netlist.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Netlist {
    name: String,
    signals: Vec<Signal>,
    index: HashMap<SignalId, Sig>,
    inputs: Vec<Sig>,
    registers: Vec<Sig>,
    outputs: Vec<Sig>,
    // position of each signal within `inputs` / `registers`
    input_pos: Vec<Option<u32>>,
    register_pos: Vec<Option<u32>>,
}

impl Netlist {
    /// Assembles a netlist from raw signals. Only duplicate names are
    /// rejected here; references are checked by [`validate_netlist`].
    pub fn from_signals(name: impl Into<String>, signals: Vec<Signal>) -> Result<Netlist, NetlistError> {
        let mut index = HashMap::with_capacity(signals.len());
        let mut inputs = Vec::new();
        let mut registers = Vec::new();
        let mut outputs = Vec::new();
        let mut input_pos = vec![None; signals.len()];
        let mut register_pos = vec![None; signals.len()];
        for (i, s) in signals.iter().enumerate() {
            let sig = Sig::new(i);
            if index.insert(s.id.clone(), sig).is_some() {
                return Err(NetlistError::Duplicate(s.id.clone()));
            }
            match s.driver {
                Driver::Input => {
                    input_pos[i] = Some(inputs.len() as u32);
                    inputs.push(sig);
                }
                Driver::Register { .. } => {
                    register_pos[i] = Some(registers.len() as u32);
                    registers.push(sig);
                }
                _ => {}
            }
            if s.is_output {
                outputs.push(sig);
            }
        }
        Ok(Netlist {
            name: name.into(),
            signals,
            index,
            inputs,
            registers,
            outputs,
            input_pos,
            register_pos,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signals(&self) -> &[Signal] {
        &self.signals
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn signal(&self, sig: Sig) -> &Signal {
        &self.signals[sig.index()]
    }

    pub fn id(&self, sig: Sig) -> &SignalId {
        &self.signals[sig.index()].id
    }

    pub fn driver(&self, sig: Sig) -> &Driver {
        &self.signals[sig.index()].driver
    }

    pub fn lookup(&self, id: &SignalId) -> Option<Sig> {
        self.index.get(id).copied()
    }

    /// Looks up a signal by its printed name (`a`, `a.3`).
    pub fn find(&self, name: &str) -> Option<Sig> {
        name.parse::<SignalId>().ok().and_then(|id| self.lookup(&id))
    }

    /// Resolves a name to a bit, or to every bit of a bus when the name has
    /// no bit suffix and is declared as a bus.
    pub fn find_all(&self, name: &str) -> Vec<Sig> {
        if let Some(s) = self.find(name) {
            return vec![s];
        }
        let mut bits: Vec<(u32, Sig)> = self
            .signals
            .iter()
            .enumerate()
            .filter(|(_, s)| s.id.name == name && s.id.bit.is_some())
            .map(|(i, s)| (s.id.bit.unwrap(), Sig::new(i)))
            .collect();
        bits.sort();
        bits.into_iter().map(|(_, s)| s).collect()
    }

    pub fn inputs(&self) -> &[Sig] {
        &self.inputs
    }

    pub fn registers(&self) -> &[Sig] {
        &self.registers
    }

    pub fn outputs(&self) -> &[Sig] {
        &self.outputs
    }

    pub fn is_input(&self, sig: Sig) -> bool {
        self.input_pos[sig.index()].is_some()
    }

    pub fn is_register(&self, sig: Sig) -> bool {
        self.register_pos[sig.index()].is_some()
    }

    pub fn is_output(&self, sig: Sig) -> bool {
        self.signals[sig.index()].is_output
    }

    /// Position of an input in [`Netlist::inputs`].
    pub fn input_position(&self, sig: Sig) -> Option<usize> {
        self.input_pos[sig.index()].map(|p| p as usize)
    }

    /// Position of a register in [`Netlist::registers`].
    pub fn register_position(&self, sig: Sig) -> Option<usize> {
        self.register_pos[sig.index()].map(|p| p as usize)
    }

    pub fn next_state(&self, reg: Sig) -> Option<Sig> {
        match self.signals[reg.index()].driver {
            Driver::Register { next } => Some(next),
            _ => None,
        }
    }

    /// Registers followed by outputs: the signals whose instance equality
    /// the detection flow tries to establish.
    pub fn state_and_outputs(&self) -> impl Iterator<Item = Sig> + '_ {
        self.registers.iter().chain(self.outputs.iter()).copied()
    }

    /// Sorts signals by their printed identity, giving the canonical order
    /// used in reports and property files.
    pub fn sort_canonical(&self, sigs: &mut [Sig]) {
        sigs.sort_by(|a, b| self.id(*a).cmp(self.id(*b)));
    }

    pub fn names<'a>(&self, sigs: impl IntoIterator<Item = &'a Sig>) -> Vec<String> {
        let mut v: Vec<Sig> = sigs.into_iter().copied().collect();
        self.sort_canonical(&mut v);
        v.into_iter().map(|s| self.id(s).to_string()).collect()
    }

    /// Prints the netlist in the native text format. Every signal is
    /// emitted on its own line, so re-parsing yields an identical netlist.
    pub fn to_snl(&self) -> String {
        parse::print_netlist(self)
    }

    /// Returns a copy in which `target`'s driver is replaced. Used to pin
    /// signals (e.g. a Trojan trigger) to constants in analyses.
    pub fn with_driver(&self, target: Sig, driver: Driver) -> Netlist {
        let mut signals = self.signals.clone();
        signals[target.index()].driver = driver;
        Netlist::from_signals(self.name.clone(), signals).expect("names are unchanged")
    }

    /// Parses and validates in one go.
    pub fn load(text: &str) -> Result<Netlist, crate::Error> {
        let n = parse_netlist(text)?;
        n.ensure_valid()?;
        Ok(n)
    }

    pub fn ensure_valid(&self) -> Result<(), NetlistError> {
        let report = validate_netlist(self);
        if report.is_empty() {
            Ok(())
        } else {
            Err(NetlistError::Invalid(report))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_id_text_forms() {
        assert_eq!("a.3".parse::<SignalId>().unwrap(), SignalId::bit("a", 3));
        assert_eq!("s0".parse::<SignalId>().unwrap(), SignalId::scalar("s0"));
        assert_eq!(SignalId::bit("pt", 10).to_string(), "pt.10");
        assert!("3x".parse::<SignalId>().is_err());
        assert!("a.b".parse::<SignalId>().is_err());
    }

    #[test]
    fn canonical_order_is_numeric_in_bits() {
        let n = parse_netlist("input a[12]\noutput y = a.10\n").unwrap();
        let mut sigs: Vec<Sig> = n.inputs().to_vec();
        sigs.reverse();
        n.sort_canonical(&mut sigs);
        let names = n.names(&sigs);
        assert_eq!(names[2], "a.2");
        assert_eq!(names[10], "a.10");
    }

    #[test]
    fn find_all_resolves_buses() {
        let n = parse_netlist("input a[3]\ninput b\noutput y = b\n").unwrap();
        assert_eq!(n.find_all("a").len(), 3);
        assert_eq!(n.find_all("b").len(), 1);
        assert!(n.find_all("zz").is_empty());
    }
}
