// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference semantics, independent of the SAT engine.
//!
//! [`exhaustive_check_property`] enumerates every pair of starting states
//! and every relevant input assignment, 64 assignments per pass.

use rayon::prelude::*;

use crate::miter::{Counterexample, TimedValue, Verdict};
use crate::netlist::{InputAssignment, Netlist, OutputAssignment, Sig, SimState, Simulator, Word};
use crate::property::EqualityProperty;
use crate::vcd::{write_vcd, VcdScope, VcdVar};

pub const DEFAULT_BOUND: u32 = 22;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("enumeration needs {bits} bits, the bound is {bound}")]
    BoundExceeded { bits: u32, bound: u32 },
    #[error("netlist has a combinational cycle")]
    Cyclic,
    #[error("property refers to unknown signal index {0}")]
    UnknownSignal(usize),
}

/// Where one enumerated bit goes.
#[derive(Debug, Clone, Copy)]
enum Slot {
    Start { inst: usize, reg: usize },
    Input { inst: Option<usize>, offset: usize, input: usize },
}

struct Plan {
    slots: Vec<Slot>,
    window: usize,
}

/// Variables to enumerate: all start-state bits of both instances, then
/// inputs offset by offset (once for inputs assumed equal at that offset).
/// Inputs at the last offset are only enumerated when a property signal
/// sampled there reads an input combinationally; the reset input is fixed.
fn plan(n: &Netlist, p: &EqualityProperty) -> Plan {
    let window = p.window();
    let mut slots = Vec::new();
    for inst in 0..2 {
        for reg in 0..n.registers().len() {
            slots.push(Slot::Start { inst, reg });
        }
    }
    let sampled_at_end = reads_inputs_at(n, p, window);
    let reset = p.reset.map(|r| r.input);
    for offset in 0..=window {
        if offset == window && !sampled_at_end {
            break;
        }
        let equal: Vec<Sig> = p
            .assume
            .iter()
            .filter(|t| t.offset == offset)
            .flat_map(|t| t.signals.iter().copied())
            .collect();
        for (k, &i) in n.inputs().iter().enumerate() {
            if Some(i) == reset {
                continue;
            }
            if equal.contains(&i) {
                slots.push(Slot::Input { inst: None, offset, input: k });
            } else {
                slots.push(Slot::Input { inst: Some(0), offset, input: k });
                slots.push(Slot::Input { inst: Some(1), offset, input: k });
            }
        }
    }
    Plan { slots, window }
}

fn reads_inputs_at(n: &Netlist, p: &EqualityProperty, offset: usize) -> bool {
    let readers = structural_input_readers(n);
    p.assume
        .iter()
        .chain(&p.prove)
        .filter(|t| t.offset == offset)
        .flat_map(|t| t.signals.iter())
        .any(|s| readers[s.index()])
}

/// Signals with an input in their combinational cone.
fn structural_input_readers(n: &Netlist) -> Vec<bool> {
    let order = crate::netlist::comb_order(n).expect("acyclic");
    let mut t = vec![false; n.len()];
    for &i in n.inputs() {
        t[i.index()] = true;
    }
    for s in order {
        if n.signal(s).comb_operands().any(|o| t[o.index()]) {
            t[s.index()] = true;
        }
    }
    t
}

const LANE_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

fn slot_word(bit: usize, chunk: u64) -> u64 {
    if bit < 6 {
        LANE_PATTERNS[bit]
    } else {
        u64::splat((chunk >> (bit - 6)) & 1 == 1)
    }
}

struct Frames<W> {
    /// `[inst][offset][signal]`
    values: [Vec<Vec<W>>; 2],
}

fn run<W: Word>(
    n: &Netlist,
    sim: &Simulator<'_>,
    window: usize,
    start: &[Vec<W>; 2],
    inputs: &[Vec<Vec<W>>; 2],
) -> Frames<W> {
    let mut values: [Vec<Vec<W>>; 2] = [Vec::new(), Vec::new()];
    for inst in 0..2 {
        let mut regs = start[inst].clone();
        for t in 0..=window {
            let mut v = Vec::with_capacity(n.len());
            sim.eval(&regs, &inputs[inst][t], &mut v);
            regs = sim.next_regs(&v);
            values[inst].push(v);
        }
    }
    Frames { values }
}

/// Lane mask of assignments that satisfy the assumptions and violate some
/// obligation.
fn failing_lanes(f: &Frames<u64>, assumed: &[(usize, Sig)], proven: &[(usize, Sig)]) -> u64 {
    let mut ok = !0u64;
    for &(t, s) in assumed {
        ok &= !(f.values[0][t][s.index()] ^ f.values[1][t][s.index()]);
    }
    let mut bad = 0u64;
    for &(t, s) in proven {
        bad |= f.values[0][t][s.index()] ^ f.values[1][t][s.index()];
    }
    ok & bad
}

/// Decides `p` by enumeration. Same semantics as
/// [`crate::miter::check_property`]; the witness is the lexicographically
/// first failing assignment.
pub fn exhaustive_check_property(n: &Netlist, p: &EqualityProperty) -> Result<Verdict, OracleError> {
    exhaustive_check_property_bounded(n, p, DEFAULT_BOUND)
}

pub fn enumeration_bits(n: &Netlist, p: &EqualityProperty) -> Result<u32, OracleError> {
    Simulator::new(n).map_err(|_| OracleError::Cyclic)?;
    Ok(plan(n, p).slots.len() as u32)
}

pub fn exhaustive_check_property_bounded(
    n: &Netlist,
    p: &EqualityProperty,
    bound: u32,
) -> Result<Verdict, OracleError> {
    if let Some(s) = p.signals().find(|s| s.index() >= n.len()) {
        return Err(OracleError::UnknownSignal(s.index()));
    }
    let sim = Simulator::new(n).map_err(|_| OracleError::Cyclic)?;
    let plan = plan(n, p);
    let bits = plan.slots.len() as u32;
    if bits > bound {
        return Err(OracleError::BoundExceeded { bits, bound });
    }
    let assumed = p.assumptions(n);
    let proven = p.obligations(n);
    let window = plan.window;
    let reset = p.reset;

    let assemble = |word: &dyn Fn(usize) -> u64| -> ([Vec<u64>; 2], [Vec<Vec<u64>>; 2]) {
        let mut start = [vec![0u64; n.registers().len()], vec![0u64; n.registers().len()]];
        let mut inputs: [Vec<Vec<u64>>; 2] = std::array::from_fn(|_| vec![vec![0u64; n.inputs().len()]; window + 1]);
        if let Some(r) = reset {
            let k = n.input_position(r.input).expect("reset is an input");
            for per_inst in &mut inputs {
                for frame in per_inst.iter_mut() {
                    frame[k] = u64::splat(r.inactive);
                }
            }
        }
        for (bit, slot) in plan.slots.iter().enumerate() {
            let w = word(bit);
            match *slot {
                Slot::Start { inst, reg } => start[inst][reg] = w,
                Slot::Input { inst: Some(i), offset, input } => inputs[i][offset][input] = w,
                Slot::Input { inst: None, offset, input } => {
                    inputs[0][offset][input] = w;
                    inputs[1][offset][input] = w;
                }
            }
        }
        (start, inputs)
    };

    let total: u64 = 1u64 << bits;
    let chunks = total.div_ceil(64);
    let live = if bits < 6 { (1u64 << total) - 1 } else { !0u64 };
    let witness = (0..chunks).into_par_iter().find_map_first(|chunk| {
        let (start, inputs) = assemble(&|bit| slot_word(bit, chunk));
        let frames = run(n, &sim, window, &start, &inputs);
        let mask = failing_lanes(&frames, &assumed, &proven) & live;
        (mask != 0).then(|| chunk * 64 + mask.trailing_zeros() as u64)
    });
    let Some(index) = witness else {
        return Ok(Verdict::Holds);
    };

    let (start, inputs) = assemble(&|bit| u64::splat((index >> bit) & 1 == 1));
    let to_bits = |v: &[u64]| v.iter().map(|&w| w & 1 == 1).collect::<Vec<bool>>();
    let frames = run(n, &sim, window, &start, &inputs);
    let timed = |&(t, s): &(usize, Sig)| TimedValue {
        offset: t,
        sig: s,
        values: [frames.values[0][t][s.index()] & 1 == 1, frames.values[1][t][s.index()] & 1 == 1],
    };
    let proven_vals: Vec<TimedValue> = proven.iter().map(timed).collect();
    let first_violation = proven_vals
        .iter()
        .find(|v| v.differs())
        .map(|v| (v.offset, v.sig))
        .expect("witness violates an obligation");
    Ok(Verdict::Fails(Box::new(Counterexample {
        property: p.id.clone(),
        window,
        start: [SimState(to_bits(&start[0])), SimState(to_bits(&start[1]))],
        inputs: [0, 1].map(|i| inputs[i].iter().map(|f| InputAssignment(to_bits(f))).collect()),
        reset,
        assumed: assumed.iter().map(timed).collect(),
        proven: proven_vals,
        first_violation,
    })))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub inputs: InputAssignment,
    /// State after the clock edge.
    pub state: SimState,
    /// Outputs of the new frame, inputs held.
    pub outputs: OutputAssignment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub initial: SimState,
    pub steps: Vec<TraceStep>,
}

impl Trace {
    /// Register values after each step, for one register.
    pub fn register_trace(&self, n: &Netlist, reg: Sig) -> Vec<bool> {
        self.steps.iter().map(|s| s.state.get(n, reg)).collect()
    }

    pub fn output_trace(&self, n: &Netlist, out: Sig) -> Vec<bool> {
        self.steps.iter().map(|s| s.outputs.get(n, out)).collect()
    }

    /// Inputs, registers and outputs over time; time 0 is the initial
    /// state with the first step's inputs.
    pub fn to_vcd(&self, n: &Netlist) -> String {
        let mut vars = Vec::new();
        for (k, &i) in n.inputs().iter().enumerate() {
            vars.push(VcdVar {
                id: n.id(i).clone(),
                values: self.steps.iter().map(|s| s.inputs.0[k]).collect(),
            });
        }
        for (k, &r) in n.registers().iter().enumerate() {
            let mut values = vec![self.initial.0[k]];
            values.extend(self.steps.iter().map(|s| s.state.0[k]));
            vars.push(VcdVar { id: n.id(r).clone(), values });
        }
        let first = self.steps.first().map(|s| {
            let sim = Simulator::new(n).expect("trace netlist is valid");
            let mut v = Vec::new();
            sim.eval(&self.initial.0, &s.inputs.0, &mut v);
            sim.outputs_of(&v)
        });
        for (k, &o) in n.outputs().iter().enumerate() {
            let mut values: Vec<bool> = first.iter().map(|f| f[k]).collect();
            values.extend(self.steps.iter().map(|s| s.outputs.0[k]));
            vars.push(VcdVar { id: n.id(o).clone(), values });
        }
        write_vcd(
            n.name(),
            &[VcdScope {
                name: "trace".into(),
                vars,
            }],
        )
    }
}

/// Iterated [`Simulator::step`] from `s0`.
pub fn simulate_trace(n: &Netlist, s0: &SimState, inputs: &[InputAssignment]) -> Result<Trace, crate::netlist::NetlistError> {
    let sim = Simulator::new(n)?;
    let mut s = s0.clone();
    let mut steps = Vec::with_capacity(inputs.len());
    for i in inputs {
        let (next, outputs) = sim.step(&s, i);
        steps.push(TraceStep {
            inputs: i.clone(),
            state: next.clone(),
            outputs,
        });
        s = next;
    }
    Ok(Trace {
        initial: s0.clone(),
        steps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fanout::{compute_partition, default_analysis_inputs};
    use crate::miter::check_property;
    use crate::netlist::parse_netlist;
    use crate::property::{create_trojan_property, decomposed_properties};

    const TICKFLIP: &str = "input a\nreg t next=NOT(t)\nreg o next=XOR(a, t)\noutput y = o\n";

    #[test]
    fn tickflip_agrees_with_engine() {
        let n = parse_netlist(TICKFLIP).unwrap();
        let p = compute_partition(&n, &default_analysis_inputs(&n, None)).unwrap();
        let init = &decomposed_properties(&p).unwrap()[0];
        let oracle = exhaustive_check_property(&n, init).unwrap();
        let engine = check_property(&n, init).unwrap();
        let (oc, ec) = (oracle.counterexample().unwrap(), engine.counterexample().unwrap());
        assert_eq!(n.id(oc.first_violation.1), n.id(ec.first_violation.1));
        assert_eq!(n.id(oc.first_violation.1).to_string(), "o");
        oc.replay(&n).unwrap();
    }

    #[test]
    fn pass_through_holds() {
        let n = parse_netlist("input a\nreg o next=a\noutput y = o\n").unwrap();
        let p = compute_partition(&n, &default_analysis_inputs(&n, None)).unwrap();
        for prop in decomposed_properties(&p).unwrap().iter().chain([&create_trojan_property(&p).unwrap()]) {
            assert!(exhaustive_check_property(&n, prop).unwrap().holds());
        }
    }

    #[test]
    fn first_witness_is_lexicographic() {
        // index bit 0 is t in instance 1, bit 1 is t in instance 2; the
        // smallest failing index has t1 = 1, t2 = 0
        let n = parse_netlist("input a\nreg t next=t\nreg o next=XOR(a, t)\n").unwrap();
        let p = compute_partition(&n, &default_analysis_inputs(&n, None)).unwrap();
        let init = &decomposed_properties(&p).unwrap()[0];
        let v = exhaustive_check_property(&n, init).unwrap();
        let c = v.counterexample().unwrap();
        let t = n.find("t").unwrap();
        assert!(c.start[0].get(&n, t));
        assert!(!c.start[1].get(&n, t));
    }

    #[test]
    fn bound_is_enforced() {
        let src: String = (0..12).map(|k| format!("input i{k}\nreg r{k} next=i{k}\n")).collect();
        let n = parse_netlist(&src).unwrap();
        let p = compute_partition(&n, &default_analysis_inputs(&n, None)).unwrap();
        let init = &decomposed_properties(&p).unwrap()[0];
        assert!(matches!(
            exhaustive_check_property(&n, init),
            Err(OracleError::BoundExceeded { bits: 36, bound: 22 })
        ));
    }

    #[test]
    fn chain_trace() {
        let n = parse_netlist("module chain\ninput a\nreg s0 next=a\nreg s1 next=s0\noutput y = s1\n").unwrap();
        let tr = simulate_trace(&n, &SimState::zeros(&n), &[InputAssignment(vec![true]), InputAssignment(vec![false])]).unwrap();
        assert_eq!(tr.register_trace(&n, n.find("s0").unwrap()), [true, false]);
        assert_eq!(tr.output_trace(&n, n.find("y").unwrap()), [false, true]);
        assert!(tr.to_vcd(&n).contains("$scope module trace $end"));
    }
}
