// SPDX-License-Identifier: Apache-2.0

use serde::Serialize;

use crate::fanout::SignalSet;
use crate::netlist::{InputAssignment, Netlist, Sig, SignalId, SimState, Simulator};
use crate::property::{PropertyId, ResetConstraint};
use crate::vcd::{write_vcd, VcdScope, VcdVar};

/// Values of one signal in both instances at one offset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TimedValue {
    pub offset: usize,
    pub sig: Sig,
    pub values: [bool; 2],
}

impl TimedValue {
    pub fn differs(&self) -> bool {
        self.values[0] != self.values[1]
    }
}

/// Two-instance execution violating a property's prove part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub property: PropertyId,
    pub window: usize,
    pub start: [SimState; 2],
    /// Inputs of each instance at offsets `0..=window`.
    pub inputs: [Vec<InputAssignment>; 2],
    pub reset: Option<ResetConstraint>,
    pub assumed: Vec<TimedValue>,
    pub proven: Vec<TimedValue>,
    pub first_violation: (usize, Sig),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("recorded value of `{signal}` at t+{offset} in instance {instance} disagrees with simulation")]
    Mismatch { signal: String, offset: usize, instance: usize },
    #[error("assumed equality of `{signal}` at t+{offset} does not hold")]
    AssumptionBroken { signal: String, offset: usize },
    #[error("reset input is active at t+{offset} in instance {instance}")]
    ResetActive { offset: usize, instance: usize },
    #[error("reported violation of `{signal}` at t+{offset} is not a difference")]
    NoViolation { signal: String, offset: usize },
    #[error("trace shape does not match the netlist")]
    Shape,
}

impl Counterexample {
    /// Obligations that differ in this trace, in canonical order.
    pub fn violated(&self) -> Vec<(usize, Sig)> {
        self.proven.iter().filter(|v| v.differs()).map(|v| (v.offset, v.sig)).collect()
    }

    /// Registers whose starting values differ between the instances.
    pub fn differing_start_bits(&self, n: &Netlist) -> SignalSet {
        n.registers()
            .iter()
            .zip(self.start[0].0.iter().zip(&self.start[1].0))
            .filter(|(_, (a, b))| a != b)
            .map(|(&r, _)| r)
            .collect()
    }

    /// The same trace with the instances exchanged.
    pub fn swapped(&self) -> Counterexample {
        let swap = |v: &TimedValue| TimedValue {
            values: [v.values[1], v.values[0]],
            ..*v
        };
        Counterexample {
            property: self.property.clone(),
            window: self.window,
            start: [self.start[1].clone(), self.start[0].clone()],
            inputs: [self.inputs[1].clone(), self.inputs[0].clone()],
            reset: self.reset,
            assumed: self.assumed.iter().map(swap).collect(),
            proven: self.proven.iter().map(swap).collect(),
            first_violation: self.first_violation,
        }
    }

    /// Full signal values of both instances for offsets `0..=window`,
    /// indexed `[instance][offset][signal]`.
    pub fn simulate(&self, n: &Netlist) -> Result<[Vec<Vec<bool>>; 2], ReplayError> {
        let sim = Simulator::new(n).map_err(|_| ReplayError::Shape)?;
        let mut frames: [Vec<Vec<bool>>; 2] = [Vec::new(), Vec::new()];
        for inst in 0..2 {
            if self.start[inst].0.len() != n.registers().len() || self.inputs[inst].len() != self.window + 1 {
                return Err(ReplayError::Shape);
            }
            let mut regs = self.start[inst].0.clone();
            for t in 0..=self.window {
                let inputs = &self.inputs[inst][t].0;
                if inputs.len() != n.inputs().len() {
                    return Err(ReplayError::Shape);
                }
                let mut values = Vec::new();
                sim.eval(&regs, inputs, &mut values);
                regs = sim.next_regs(&values);
                frames[inst].push(values);
            }
        }
        Ok(frames)
    }

    /// Re-simulates both instances and checks every recorded value, every
    /// assumed equality, the reset constraint and the reported violation.
    pub fn replay(&self, n: &Netlist) -> Result<(), ReplayError> {
        let frames = self.simulate(n)?;
        let name = |s: Sig| n.id(s).to_string();
        for v in self.assumed.iter().chain(&self.proven) {
            if v.offset > self.window || v.sig.index() >= n.len() {
                return Err(ReplayError::Shape);
            }
            for inst in 0..2 {
                if frames[inst][v.offset][v.sig.index()] != v.values[inst] {
                    return Err(ReplayError::Mismatch {
                        signal: name(v.sig),
                        offset: v.offset,
                        instance: inst + 1,
                    });
                }
            }
        }
        if let Some(v) = self.assumed.iter().find(|v| v.differs()) {
            return Err(ReplayError::AssumptionBroken {
                signal: name(v.sig),
                offset: v.offset,
            });
        }
        if let Some(r) = self.reset {
            for (inst, frame) in frames.iter().enumerate() {
                for (t, values) in frame.iter().enumerate() {
                    if values[r.input.index()] != r.inactive {
                        return Err(ReplayError::ResetActive {
                            offset: t,
                            instance: inst + 1,
                        });
                    }
                }
            }
        }
        let (t, s) = self.first_violation;
        if frames[0][t][s.index()] == frames[1][t][s.index()] {
            return Err(ReplayError::NoViolation {
                signal: name(s),
                offset: t,
            });
        }
        Ok(())
    }

    /// Waveform of both instances as sibling scopes. Parser temporaries
    /// (`$k` wires) are left out.
    pub fn to_vcd(&self, n: &Netlist) -> Result<String, ReplayError> {
        let frames = self.simulate(n)?;
        let mut sigs: Vec<Sig> = (0..n.len())
            .map(Sig::new)
            .filter(|&s| !n.id(s).name.starts_with('$'))
            .collect();
        n.sort_canonical(&mut sigs);
        let scopes: Vec<VcdScope> = (0..2)
            .map(|inst| VcdScope {
                name: format!("instance{}", inst + 1),
                vars: sigs
                    .iter()
                    .map(|&s| VcdVar {
                        id: n.id(s).clone(),
                        values: frames[inst].iter().map(|f| f[s.index()]).collect(),
                    })
                    .collect(),
            })
            .collect();
        Ok(write_vcd("miter", &scopes))
    }

    pub fn summary(&self, n: &Netlist) -> CexSummary {
        let named = |st: &SimState| -> Vec<(String, bool)> { st.named(n) };
        let values = |v: &[TimedValue]| -> Vec<CexValue> {
            v.iter()
                .map(|v| CexValue {
                    offset: v.offset,
                    signal: n.id(v.sig).to_string(),
                    instance1: v.values[0],
                    instance2: v.values[1],
                })
                .collect()
        };
        CexSummary {
            property: self.property.to_string(),
            window: self.window,
            start: [named(&self.start[0]), named(&self.start[1])],
            inputs: [
                self.inputs[0].iter().map(|i| i.named(n)).collect(),
                self.inputs[1].iter().map(|i| i.named(n)).collect(),
            ],
            assumed: values(&self.assumed),
            proven: values(&self.proven),
            violated: self
                .violated()
                .into_iter()
                .map(|(t, s)| format!("{}@t+{t}", n.id(s)))
                .collect(),
            first_violation: format!("{}@t+{}", n.id(self.first_violation.1), self.first_violation.0),
            differing_start_bits: n.names(&self.differing_start_bits(n)),
        }
    }

    pub fn first_violated_id<'a>(&self, n: &'a Netlist) -> &'a SignalId {
        n.id(self.first_violation.1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CexValue {
    pub offset: usize,
    pub signal: String,
    pub instance1: bool,
    pub instance2: bool,
}

/// Report-friendly counterexample, all signals by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CexSummary {
    pub property: String,
    pub window: usize,
    pub start: [Vec<(String, bool)>; 2],
    pub inputs: [Vec<Vec<(String, bool)>>; 2],
    pub assumed: Vec<CexValue>,
    pub proven: Vec<CexValue>,
    pub violated: Vec<String>,
    pub first_violation: String,
    pub differing_start_bits: Vec<String>,
}
