// SPDX-License-Identifier: Apache-2.0

use std::collections::HashMap;

use miterscan_sat::{CnfFormula, Lit, Solver};

use crate::netlist::{Driver, Gate, Netlist, Sig};

/// Lazy Tseitin unrolling of two netlist instances. Only the cones of
/// signals actually requested are encoded.
pub(crate) struct Encoder<'n> {
    n: &'n Netlist,
    pub(crate) solver: Solver,
    map: HashMap<(u8, u32, u32), Lit>,
    true_lit: Lit,
    recorded: Option<Vec<Vec<Lit>>>,
    clauses: usize,
}

impl<'n> Encoder<'n> {
    pub(crate) fn new(n: &'n Netlist, record: bool) -> Self {
        let mut solver = Solver::new();
        let true_lit = solver.new_var().positive();
        let mut e = Encoder {
            n,
            solver,
            map: HashMap::new(),
            true_lit,
            recorded: record.then(Vec::new),
            clauses: 0,
        };
        e.add(&[true_lit]);
        e
    }

    pub(crate) fn add(&mut self, clause: &[Lit]) {
        self.clauses += 1;
        if let Some(r) = &mut self.recorded {
            r.push(clause.to_vec());
        }
        self.solver.add_clause(clause);
    }

    pub(crate) fn fresh(&mut self) -> Lit {
        self.solver.new_var().positive()
    }

    pub(crate) fn constant(&self, v: bool) -> Lit {
        if v {
            self.true_lit
        } else {
            !self.true_lit
        }
    }

    pub(crate) fn num_vars(&self) -> usize {
        self.solver.num_vars()
    }

    pub(crate) fn num_clauses(&self) -> usize {
        self.clauses
    }

    pub(crate) fn formula(&self) -> Option<CnfFormula> {
        let rec = self.recorded.as_ref()?;
        let mut f = CnfFormula::with_vars(self.solver.num_vars());
        for c in rec {
            f.add_clause(c.iter().copied());
        }
        Some(f)
    }

    /// Literal already assigned to `(inst, t, sig)`, if encoded.
    pub(crate) fn get(&self, inst: u8, t: usize, sig: Sig) -> Option<Lit> {
        self.map.get(&(inst, t as u32, sig.0)).copied()
    }

    fn deps(&self, t: usize, sig: Sig, out: &mut Vec<(usize, Sig)>) {
        out.clear();
        match *self.n.driver(sig) {
            Driver::Input => {}
            Driver::Register { next } => {
                if t > 0 {
                    out.push((t - 1, next));
                }
            }
            Driver::Alias(src) => out.push((t, src)),
            Driver::Gate(g) => out.extend(g.operands().map(|o| (t, o))),
        }
    }

    /// Literal for `sig` of instance `inst` at offset `t`, encoding its
    /// cone on demand. Iterative, so deep cones cannot overflow the stack.
    pub(crate) fn lit(&mut self, inst: u8, t: usize, sig: Sig) -> Lit {
        if let Some(l) = self.get(inst, t, sig) {
            return l;
        }
        let mut stack = vec![(t, sig)];
        let mut deps = Vec::with_capacity(3);
        while let Some(&(t, s)) = stack.last() {
            if self.get(inst, t, s).is_some() {
                stack.pop();
                continue;
            }
            self.deps(t, s, &mut deps);
            let before = stack.len();
            for &(dt, ds) in &deps {
                if self.get(inst, dt, ds).is_none() {
                    stack.push((dt, ds));
                }
            }
            if stack.len() > before {
                continue;
            }
            stack.pop();
            let dl: Vec<Lit> = deps.iter().map(|&(dt, ds)| self.get(inst, dt, ds).unwrap()).collect();
            let l = self.define(s, &dl);
            self.map.insert((inst, t as u32, s.0), l);
        }
        self.get(inst, t, sig).unwrap()
    }

    fn define(&mut self, s: Sig, d: &[Lit]) -> Lit {
        match *self.n.driver(s) {
            Driver::Input => self.fresh(),
            Driver::Register { .. } if d.is_empty() => self.fresh(),
            Driver::Register { .. } | Driver::Alias(_) => d[0],
            Driver::Gate(g) => match g {
                Gate::Const(v) => self.constant(v),
                Gate::Not(_) => !d[0],
                Gate::And(..) => {
                    let v = self.fresh();
                    self.add(&[!v, d[0]]);
                    self.add(&[!v, d[1]]);
                    self.add(&[v, !d[0], !d[1]]);
                    v
                }
                Gate::Or(..) => {
                    let v = self.fresh();
                    self.add(&[v, !d[0]]);
                    self.add(&[v, !d[1]]);
                    self.add(&[!v, d[0], d[1]]);
                    v
                }
                Gate::Xor(..) => {
                    let v = self.fresh();
                    self.add(&[!v, d[0], d[1]]);
                    self.add(&[!v, !d[0], !d[1]]);
                    self.add(&[v, !d[0], d[1]]);
                    self.add(&[v, d[0], !d[1]]);
                    v
                }
                Gate::Mux(..) => {
                    let (c, a, b) = (d[0], d[1], d[2]);
                    let v = self.fresh();
                    self.add(&[!c, !a, v]);
                    self.add(&[!c, a, !v]);
                    self.add(&[c, !b, v]);
                    self.add(&[c, b, !v]);
                    v
                }
            },
        }
    }

    pub(crate) fn equal(&mut self, a: Lit, b: Lit) {
        if a != b {
            self.add(&[!a, b]);
            self.add(&[a, !b]);
        }
    }

    /// Literal implying `a != b` (one direction suffices for the negated
    /// prove part). `None` when the two are the same literal.
    pub(crate) fn difference(&mut self, a: Lit, b: Lit) -> Option<Lit> {
        if a == b {
            return None;
        }
        let d = self.fresh();
        self.add(&[!d, a, b]);
        self.add(&[!d, !a, !b]);
        Some(d)
    }
}
