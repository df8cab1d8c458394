// SPDX-License-Identifier: Apache-2.0

//! Cycle-based evaluation.
//!
//! Frame `t` holds register values `s_t` and input values `i_t`; every wire
//! and output of frame `t` is a function of `(s_t, i_t)`, and
//! `s_{t+1}` is the next-state signal of each register evaluated in frame
//! `t`. Evaluation is generic over [`Word`] so the same code runs on single
//! bits and on 64 independent lanes at once.

use std::ops::{BitAnd, BitOr, BitXor, Not};

use super::validate::comb_order;
use super::{validate_netlist, Driver, Gate, Netlist, NetlistError, Sig};

pub trait Word:
    Copy + Eq + BitAnd<Output = Self> + BitOr<Output = Self> + BitXor<Output = Self> + Not<Output = Self>
{
    const ZERO: Self;
    const ONES: Self;

    #[inline]
    fn mux(sel: Self, a: Self, b: Self) -> Self {
        (sel & a) | (!sel & b)
    }

    #[inline]
    fn splat(b: bool) -> Self {
        if b {
            Self::ONES
        } else {
            Self::ZERO
        }
    }
}

impl Word for bool {
    const ZERO: bool = false;
    const ONES: bool = true;
}

impl Word for u64 {
    const ZERO: u64 = 0;
    const ONES: u64 = !0;
}

macro_rules! assignment {
    ($(#[$m:meta])* $name:ident, $pos:ident, $list:ident) => {
        $(#[$m])*
        #[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
        pub struct $name(pub Vec<bool>);

        impl $name {
            pub fn zeros(n: &Netlist) -> Self {
                $name(vec![false; n.$list().len()])
            }

            pub fn get(&self, n: &Netlist, sig: Sig) -> bool {
                self.0[n.$pos(sig).expect(concat!("not a member of ", stringify!($list)))]
            }

            pub fn set(&mut self, n: &Netlist, sig: Sig, value: bool) {
                let p = n.$pos(sig).expect(concat!("not a member of ", stringify!($list)));
                self.0[p] = value;
            }

            /// `(name, value)` pairs in netlist order.
            pub fn named(&self, n: &Netlist) -> Vec<(String, bool)> {
                n.$list().iter().zip(&self.0).map(|(&s, &v)| (n.id(s).to_string(), v)).collect()
            }
        }
    };
}

assignment!(
    /// Register values, in [`Netlist::registers`] order.
    SimState,
    register_position,
    registers
);
assignment!(
    /// Input values, in [`Netlist::inputs`] order.
    InputAssignment,
    input_position,
    inputs
);

/// Output values, in [`Netlist::outputs`] order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct OutputAssignment(pub Vec<bool>);

impl OutputAssignment {
    pub fn get(&self, n: &Netlist, sig: Sig) -> bool {
        let p = n.outputs().iter().position(|&o| o == sig).expect("not an output");
        self.0[p]
    }

    pub fn named(&self, n: &Netlist) -> Vec<(String, bool)> {
        n.outputs().iter().zip(&self.0).map(|(&s, &v)| (n.id(s).to_string(), v)).collect()
    }
}

/// A netlist paired with its combinational evaluation order.
#[derive(Debug, Clone)]
pub struct Simulator<'n> {
    netlist: &'n Netlist,
    order: Vec<Sig>,
}

impl<'n> Simulator<'n> {
    pub fn new(netlist: &'n Netlist) -> Result<Self, NetlistError> {
        match comb_order(netlist) {
            Some(order) => Ok(Simulator { netlist, order }),
            None => Err(NetlistError::Invalid(validate_netlist(netlist))),
        }
    }

    pub fn netlist(&self) -> &'n Netlist {
        self.netlist
    }

    /// Values of every signal in one frame.
    pub fn eval<W: Word>(&self, regs: &[W], inputs: &[W], values: &mut Vec<W>) {
        let n = self.netlist;
        values.clear();
        values.resize(n.len(), W::ZERO);
        for (&s, &v) in n.registers().iter().zip(regs) {
            values[s.index()] = v;
        }
        for (&s, &v) in n.inputs().iter().zip(inputs) {
            values[s.index()] = v;
        }
        for &s in &self.order {
            let v = |x: Sig| values[x.index()];
            let out = match *n.driver(s) {
                Driver::Alias(src) => v(src),
                Driver::Gate(g) => match g {
                    Gate::And(a, b) => v(a) & v(b),
                    Gate::Or(a, b) => v(a) | v(b),
                    Gate::Xor(a, b) => v(a) ^ v(b),
                    Gate::Not(a) => !v(a),
                    Gate::Mux(c, a, b) => W::mux(v(c), v(a), v(b)),
                    Gate::Const(c) => W::splat(c),
                },
                _ => unreachable!("only wires are ordered"),
            };
            values[s.index()] = out;
        }
    }

    /// Register values of the following frame.
    pub fn next_regs<W: Word>(&self, values: &[W]) -> Vec<W> {
        let n = self.netlist;
        n.registers()
            .iter()
            .map(|&r| values[n.next_state(r).unwrap().index()])
            .collect()
    }

    pub fn outputs_of<W: Word>(&self, values: &[W]) -> Vec<W> {
        self.netlist.outputs().iter().map(|&o| values[o.index()]).collect()
    }

    /// One clock edge. Returns the new state and the outputs of the new
    /// frame, with the inputs held at `i`.
    pub fn step(&self, s: &SimState, i: &InputAssignment) -> (SimState, OutputAssignment) {
        let mut values = Vec::new();
        self.eval(&s.0, &i.0, &mut values);
        let next = self.next_regs(&values);
        self.eval(&next, &i.0, &mut values);
        (SimState(next), OutputAssignment(self.outputs_of(&values)))
    }
}

/// One-shot [`Simulator::step`]. Panics on a netlist with a combinational
/// cycle; validate first.
pub fn step(n: &Netlist, s: &SimState, i: &InputAssignment) -> (SimState, OutputAssignment) {
    Simulator::new(n).expect("netlist must be valid").step(s, i)
}
