// SPDX-License-Identifier: Apache-2.0

use std::collections::HashSet;

use super::{Driver, Gate, Netlist, NetlistError, Sig, Signal, SignalId};

const UNSET: Sig = Sig(u32::MAX);

/// Incremental construction of a [`Netlist`] by signal handle. Registers may
/// be created before their next-state logic exists and wired up later with
/// [`NetlistBuilder::set_next`].
#[derive(Debug, Clone)]
pub struct NetlistBuilder {
    name: String,
    signals: Vec<Signal>,
    used: HashSet<SignalId>,
    fresh: usize,
}

impl NetlistBuilder {
    pub fn new(name: impl Into<String>) -> Self {
        NetlistBuilder {
            name: name.into(),
            signals: Vec::new(),
            used: HashSet::new(),
            fresh: 0,
        }
    }

    /// Starts from an existing netlist, keeping every signal handle valid.
    pub fn from_netlist(n: &Netlist) -> Self {
        NetlistBuilder {
            name: n.name().to_string(),
            signals: n.signals().to_vec(),
            used: n.signals().iter().map(|s| s.id.clone()).collect(),
            fresh: 0,
        }
    }

    fn push(&mut self, id: SignalId, driver: Driver, is_output: bool) -> Sig {
        let sig = Sig::new(self.signals.len());
        self.used.insert(id.clone());
        self.signals.push(Signal { id, driver, is_output });
        sig
    }

    /// A `$k` name not used so far.
    pub fn fresh_id(&mut self) -> SignalId {
        loop {
            let id = SignalId::scalar(format!("${}", self.fresh));
            self.fresh += 1;
            if !self.used.contains(&id) {
                return id;
            }
        }
    }

    pub fn contains(&self, id: &SignalId) -> bool {
        self.used.contains(id)
    }

    pub fn input(&mut self, id: SignalId) -> Sig {
        self.push(id, Driver::Input, false)
    }

    pub fn register(&mut self, id: SignalId) -> Sig {
        self.push(id, Driver::Register { next: UNSET }, false)
    }

    pub fn set_next(&mut self, reg: Sig, next: Sig) {
        match &mut self.signals[reg.index()].driver {
            Driver::Register { next: n } => *n = next,
            other => panic!("set_next on non-register driver {other:?}"),
        }
    }

    /// Replaces the driver of an existing signal.
    pub fn redrive(&mut self, sig: Sig, driver: Driver) {
        self.signals[sig.index()].driver = driver;
    }

    pub fn named_gate(&mut self, id: SignalId, gate: Gate) -> Sig {
        self.push(id, Driver::Gate(gate), false)
    }

    pub fn gate(&mut self, gate: Gate) -> Sig {
        let id = self.fresh_id();
        self.named_gate(id, gate)
    }

    pub fn alias(&mut self, id: SignalId, src: Sig) -> Sig {
        self.push(id, Driver::Alias(src), false)
    }

    pub fn output(&mut self, id: SignalId, src: Sig) -> Sig {
        self.push(id, Driver::Alias(src), true)
    }

    pub fn and(&mut self, a: Sig, b: Sig) -> Sig {
        self.gate(Gate::And(a, b))
    }

    pub fn or(&mut self, a: Sig, b: Sig) -> Sig {
        self.gate(Gate::Or(a, b))
    }

    pub fn xor(&mut self, a: Sig, b: Sig) -> Sig {
        self.gate(Gate::Xor(a, b))
    }

    pub fn not(&mut self, a: Sig) -> Sig {
        self.gate(Gate::Not(a))
    }

    pub fn mux(&mut self, sel: Sig, a: Sig, b: Sig) -> Sig {
        self.gate(Gate::Mux(sel, a, b))
    }

    pub fn constant(&mut self, value: bool) -> Sig {
        self.gate(Gate::Const(value))
    }

    pub fn id(&self, sig: Sig) -> &SignalId {
        &self.signals[sig.index()].id
    }

    pub fn len(&self) -> usize {
        self.signals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signals.is_empty()
    }

    pub fn build(self) -> Result<Netlist, NetlistError> {
        for s in &self.signals {
            if matches!(s.driver, Driver::Register { next } if next == UNSET) {
                return Err(NetlistError::MissingNext(s.id.clone()));
            }
        }
        Netlist::from_signals(self.name, self.signals)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_register_wiring() {
        let mut b = NetlistBuilder::new("count");
        let c = b.register(SignalId::scalar("c"));
        let n = b.not(c);
        b.set_next(c, n);
        b.output(SignalId::scalar("y"), c);
        let net = b.build().unwrap();
        assert_eq!(net.registers().len(), 1);
        assert_eq!(net.next_state(c), Some(n));
        assert!(net.ensure_valid().is_ok());
    }

    #[test]
    fn unwired_register_is_rejected() {
        let mut b = NetlistBuilder::new("bad");
        b.register(SignalId::scalar("r"));
        assert!(matches!(b.build(), Err(NetlistError::MissingNext(_))));
    }

    #[test]
    fn fresh_names_skip_taken_ones() {
        let mut b = NetlistBuilder::new("f");
        b.input(SignalId::scalar("$0"));
        assert_eq!(b.fresh_id(), SignalId::scalar("$1"));
    }
}
