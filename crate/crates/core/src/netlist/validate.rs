// SPDX-License-Identifier: Apache-2.0

use std::fmt;

use super::{Driver, Netlist, Sig, SignalId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Issue {
    /// `signal` refers to signal index `target`, which does not exist.
    DanglingReference { signal: SignalId, target: usize },
    /// A strongly connected set of wires; `signals` is sorted.
    CombinationalCycle { signals: Vec<SignalId> },
    /// An output flag on an input or register.
    MalformedOutput { signal: SignalId },
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Issue::DanglingReference { signal, target } => {
                write!(f, "`{signal}` references undeclared signal #{target}")
            }
            Issue::CombinationalCycle { signals } => {
                let names: Vec<String> = signals.iter().map(|s| s.to_string()).collect();
                write!(f, "combinational cycle through {{{}}}", names.join(", "))
            }
            Issue::MalformedOutput { signal } => {
                write!(f, "output `{signal}` must alias another signal")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub issues: Vec<Issue>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

pub fn validate_netlist(n: &Netlist) -> ValidationReport {
    let mut issues = Vec::new();
    let len = n.len();
    for s in n.signals() {
        for r in s.references() {
            if r.index() >= len {
                issues.push(Issue::DanglingReference {
                    signal: s.id.clone(),
                    target: r.index(),
                });
            }
        }
        if s.is_output && matches!(s.driver, Driver::Input | Driver::Register { .. }) {
            issues.push(Issue::MalformedOutput { signal: s.id.clone() });
        }
    }
    for scc in cyclic_components(n) {
        let mut signals: Vec<SignalId> = scc.iter().map(|&s| n.id(s).clone()).collect();
        signals.sort();
        issues.push(Issue::CombinationalCycle { signals });
    }
    ValidationReport { issues }
}

fn comb_edges(n: &Netlist, s: Sig) -> impl Iterator<Item = Sig> + '_ {
    let len = n.len();
    n.signal(s).comb_operands().filter(move |o| o.index() < len)
}

/// Strongly connected components of the combinational graph that contain a
/// cycle (iterative Tarjan).
fn cyclic_components(n: &Netlist) -> Vec<Vec<Sig>> {
    const UNVISITED: u32 = u32::MAX;
    let len = n.len();
    let mut index = vec![UNVISITED; len];
    let mut low = vec![0u32; len];
    let mut on_stack = vec![false; len];
    let mut stack: Vec<Sig> = Vec::new();
    let mut counter = 0u32;
    let mut out = Vec::new();

    for root in 0..len {
        if index[root] != UNVISITED {
            continue;
        }
        // (node, operands yet to visit)
        let mut call: Vec<(Sig, Vec<Sig>)> = Vec::new();
        let r = Sig::new(root);
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(r);
        on_stack[root] = true;
        call.push((r, comb_edges(n, r).collect()));
        while let Some((v, pending)) = call.last_mut() {
            let v = *v;
            if let Some(w) = pending.pop() {
                let wi = w.index();
                if index[wi] == UNVISITED {
                    index[wi] = counter;
                    low[wi] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[wi] = true;
                    call.push((w, comb_edges(n, w).collect()));
                } else if on_stack[wi] {
                    low[v.index()] = low[v.index()].min(index[wi]);
                }
                continue;
            }
            call.pop();
            if let Some((parent, _)) = call.last() {
                let p = parent.index();
                low[p] = low[p].min(low[v.index()]);
            }
            if low[v.index()] == index[v.index()] {
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().unwrap();
                    on_stack[w.index()] = false;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                let self_loop = comp.len() == 1 && comb_edges(n, v).any(|o| o == v);
                if comp.len() > 1 || self_loop {
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// Gate and alias signals ordered so every operand precedes its reader.
/// `None` if the combinational graph has a cycle or dangling edge.
pub(crate) fn comb_order(n: &Netlist) -> Option<Vec<Sig>> {
    let len = n.len();
    // 0 = new, 1 = open, 2 = done
    let mut state = vec![0u8; len];
    let mut order = Vec::with_capacity(len);
    for root in 0..len {
        if state[root] != 0 {
            continue;
        }
        let mut stack: Vec<(Sig, bool)> = vec![(Sig::new(root), false)];
        while let Some((v, expanded)) = stack.pop() {
            let vi = v.index();
            if expanded {
                state[vi] = 2;
                if matches!(n.driver(v), Driver::Gate(_) | Driver::Alias(_)) {
                    order.push(v);
                }
                continue;
            }
            match state[vi] {
                2 => continue,
                1 => return None,
                _ => {}
            }
            state[vi] = 1;
            stack.push((v, true));
            for o in n.signal(v).comb_operands() {
                if o.index() >= len {
                    return None;
                }
                match state[o.index()] {
                    0 => stack.push((o, false)),
                    1 => return None,
                    _ => {}
                }
            }
        }
    }
    Some(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netlist::{parse_netlist, Gate, Signal};

    #[test]
    fn chain_is_clean() {
        let n = parse_netlist("module chain\ninput a\nreg s0 next=a\nreg s1 next=s0\noutput y = s1\n").unwrap();
        assert!(validate_netlist(&n).is_empty());
        assert!(comb_order(&n).is_some());
    }

    #[test]
    fn two_cycle() {
        let n = parse_netlist("wire w1 = NOT(w2)\nwire w2 = NOT(w1)\n").unwrap();
        let report = validate_netlist(&n);
        assert_eq!(
            report.issues,
            vec![Issue::CombinationalCycle {
                signals: vec![SignalId::scalar("w1"), SignalId::scalar("w2")]
            }]
        );
        assert!(comb_order(&n).is_none());
        assert!(report.to_string().contains("{w1, w2}"));
    }

    #[test]
    fn self_loop_and_register_loops() {
        let n = parse_netlist("wire w = AND(w, r)\nreg r next=NOT(r)\n").unwrap();
        let issues = validate_netlist(&n).issues;
        assert_eq!(issues.len(), 1);
        // a register feeding itself is sequential, not a cycle
        let ok = parse_netlist("reg r next=NOT(r)\n").unwrap();
        assert!(validate_netlist(&ok).is_empty());
    }

    #[test]
    fn dangling_reference() {
        let n = Netlist::from_signals(
            "d",
            vec![Signal {
                id: SignalId::scalar("r"),
                driver: Driver::Register { next: Sig::new(7) },
                is_output: false,
            }],
        )
        .unwrap();
        assert_eq!(
            validate_netlist(&n).issues,
            vec![Issue::DanglingReference {
                signal: SignalId::scalar("r"),
                target: 7
            }]
        );
        let w = Netlist::from_signals(
            "d",
            vec![Signal {
                id: SignalId::scalar("w"),
                driver: Driver::Gate(Gate::Not(Sig::new(3))),
                is_output: false,
            }],
        )
        .unwrap();
        assert!(comb_order(&w).is_none());
    }
}
