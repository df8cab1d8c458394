// SPDX-License-Identifier: Apache-2.0

//! Two-instance miter with a symbolic starting state.
//!
//! Both instances are unrolled for the property window from unconstrained
//! registers. Assumed equalities and the reset constraint become clauses;
//! each prove obligation gets a difference literal, and the negated prove
//! part is the disjunction of those literals. UNSAT means the property
//! holds for every starting-state pair and every input history.

mod cex;
mod encode;

use miterscan_sat::external::ExternalSolver;
use miterscan_sat::{CnfFormula, Lit, SatResult, SolveResult};
use serde::Serialize;

pub use cex::{CexSummary, CexValue, Counterexample, ReplayError, TimedValue};
use encode::Encoder;

use crate::netlist::{InputAssignment, Netlist, Sig, SimState};
use crate::property::EqualityProperty;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiterConfig {
    /// Largest window that may be unrolled.
    pub max_window: usize,
    /// Conflict budget per SAT call; `None` is unbounded.
    pub conflict_budget: Option<u64>,
    /// Extend a failing model greedily so that as many obligations as
    /// possible are violated at once.
    pub maximal_cex: bool,
}

impl Default for MiterConfig {
    fn default() -> Self {
        MiterConfig {
            max_window: 256,
            conflict_budget: None,
            maximal_cex: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("{property} needs a window of {window} cycles, the bound is {bound}")]
    WindowExceeded { property: String, window: usize, bound: usize },
    #[error("conflict budget of {budget} exhausted while checking {property}")]
    ResourceLimit { property: String, budget: u64 },
    #[error("property refers to unknown signal index {0}")]
    UnknownSignal(usize),
    #[error("reset `{0}` is not an input")]
    ResetNotInput(String),
    #[error("netlist has a combinational cycle")]
    Cyclic,
    #[error("external solver: {0}")]
    External(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(Box<Counterexample>),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EncodingStats {
    pub variables: usize,
    pub clauses: usize,
    pub conflicts: u64,
}

struct Obligation {
    offset: usize,
    sig: Sig,
    diff: Option<Lit>,
}

/// An encoded miter for one property, reusable for several queries over
/// subsets of its obligations.
pub struct MiterSession<'n> {
    n: &'n Netlist,
    prop: EqualityProperty,
    cfg: MiterConfig,
    enc: Encoder<'n>,
    assumed: Vec<(usize, Sig)>,
    obligations: Vec<Obligation>,
    any: Lit,
}

impl<'n> MiterSession<'n> {
    pub fn new(n: &'n Netlist, p: &EqualityProperty, cfg: &MiterConfig) -> Result<Self, EngineError> {
        Self::build(n, p, cfg, false)
    }

    fn build(n: &'n Netlist, p: &EqualityProperty, cfg: &MiterConfig, record: bool) -> Result<Self, EngineError> {
        if let Some(s) = p.signals().find(|s| s.index() >= n.len()) {
            return Err(EngineError::UnknownSignal(s.index()));
        }
        if crate::netlist::comb_order(n).is_none() {
            return Err(EngineError::Cyclic);
        }
        let window = p.window();
        if window > cfg.max_window {
            return Err(EngineError::WindowExceeded {
                property: p.id.to_string(),
                window,
                bound: cfg.max_window,
            });
        }
        let mut enc = Encoder::new(n, record);
        let assumed = p.assumptions(n);
        for &(t, s) in &assumed {
            let a = enc.lit(0, t, s);
            let b = enc.lit(1, t, s);
            enc.equal(a, b);
        }
        if let Some(r) = p.reset {
            if !n.is_input(r.input) {
                return Err(EngineError::ResetNotInput(n.id(r.input).to_string()));
            }
            for t in 0..=window {
                for inst in 0..2 {
                    let l = enc.lit(inst, t, r.input);
                    enc.add(&[if r.inactive { l } else { !l }]);
                }
            }
        }
        let mut obligations = Vec::new();
        for (t, s) in p.obligations(n) {
            let a = enc.lit(0, t, s);
            let b = enc.lit(1, t, s);
            let diff = enc.difference(a, b);
            obligations.push(Obligation { offset: t, sig: s, diff });
        }
        let any = enc.fresh();
        let mut clause = vec![!any];
        clause.extend(obligations.iter().filter_map(|o| o.diff));
        enc.add(&clause);
        Ok(MiterSession {
            n,
            prop: p.clone(),
            cfg: cfg.clone(),
            enc,
            assumed,
            obligations,
            any,
        })
    }

    /// Obligations `(offset, signal)` in canonical order.
    pub fn obligations(&self) -> Vec<(usize, Sig)> {
        self.obligations.iter().map(|o| (o.offset, o.sig)).collect()
    }

    pub fn stats(&self) -> EncodingStats {
        EncodingStats {
            variables: self.enc.num_vars(),
            clauses: self.enc.num_clauses(),
            conflicts: self.enc.solver.stats().conflicts,
        }
    }

    fn solve(&mut self, assumptions: &[Lit]) -> Result<bool, EngineError> {
        self.enc.solver.set_conflict_budget(self.cfg.conflict_budget);
        match self.enc.solver.solve_under(assumptions) {
            SolveResult::Sat => Ok(true),
            SolveResult::Unsat => Ok(false),
            SolveResult::Unknown => Err(EngineError::ResourceLimit {
                property: self.prop.id.to_string(),
                budget: self.cfg.conflict_budget.unwrap_or(0),
            }),
        }
    }

    /// Decides the whole property.
    pub fn check(&mut self) -> Result<Verdict, EngineError> {
        let all: Vec<usize> = (0..self.obligations.len()).collect();
        self.check_subset(&all)
    }

    /// Decides whether any obligation in `subset` (indices into
    /// [`MiterSession::obligations`]) can be violated.
    pub fn check_subset(&mut self, subset: &[usize]) -> Result<Verdict, EngineError> {
        let sel = if subset.len() == self.obligations.len() {
            self.any
        } else {
            let sel = self.enc.fresh();
            let mut clause = vec![!sel];
            clause.extend(subset.iter().filter_map(|&i| self.obligations[i].diff));
            self.enc.add(&clause);
            sel
        };
        if !self.solve(&[sel])? {
            return Ok(Verdict::Holds);
        }
        let mut best = self.enc.solver.model().to_vec();
        if self.cfg.maximal_cex {
            let mut forced = vec![sel];
            for &i in subset {
                let Some(d) = self.obligations[i].diff else { continue };
                forced.push(d);
                if lit_value(&best, d) {
                    continue;
                }
                if self.solve(&forced)? {
                    best = self.enc.solver.model().to_vec();
                } else {
                    forced.pop();
                }
            }
        }
        Ok(Verdict::Fails(Box::new(self.extract(|l| lit_value(&best, l)))))
    }

    /// Which obligations hold individually.
    pub fn holding_obligations(&mut self) -> Result<Vec<bool>, EngineError> {
        let mut out = Vec::with_capacity(self.obligations.len());
        for i in 0..self.obligations.len() {
            out.push(match self.obligations[i].diff {
                None => true,
                Some(d) => !self.solve(&[d])?,
            });
        }
        Ok(out)
    }

    /// Decides the whole property with an external DIMACS solver.
    fn check_external(&mut self, solver: &ExternalSolver) -> Result<Verdict, EngineError> {
        let mut f = self.enc.formula().expect("recording session");
        f.add_clause([self.any]);
        match solver.solve(&f).map_err(|e| EngineError::External(e.to_string()))? {
            SatResult::Unsat => Ok(Verdict::Holds),
            SatResult::Sat(m) => {
                if !f.is_satisfied_by(&m) {
                    return Err(EngineError::External("model does not satisfy the formula".into()));
                }
                Ok(Verdict::Fails(Box::new(self.extract(|l| lit_value(&m, l)))))
            }
        }
    }

    fn extract(&self, value: impl Fn(Lit) -> bool) -> Counterexample {
        let n = self.n;
        let window = self.prop.window();
        let val = |inst: u8, t: usize, s: Sig| self.enc.get(inst, t, s).map(&value).unwrap_or(false);
        let start = [0u8, 1].map(|inst| SimState(n.registers().iter().map(|&r| val(inst, 0, r)).collect()));
        let inputs = [0u8, 1].map(|inst| {
            (0..=window)
                .map(|t| InputAssignment(n.inputs().iter().map(|&i| val(inst, t, i)).collect()))
                .collect::<Vec<_>>()
        });
        let timed = |&(t, s): &(usize, Sig)| TimedValue {
            offset: t,
            sig: s,
            values: [val(0, t, s), val(1, t, s)],
        };
        let assumed: Vec<TimedValue> = self.assumed.iter().map(timed).collect();
        let proven: Vec<TimedValue> = self.obligations().iter().map(timed).collect();
        let first_violation = proven
            .iter()
            .find(|v| v.differs())
            .map(|v| (v.offset, v.sig))
            .expect("a satisfying model violates some obligation");
        Counterexample {
            property: self.prop.id.clone(),
            window,
            start,
            inputs,
            reset: self.prop.reset,
            assumed,
            proven,
            first_violation,
        }
    }
}

fn lit_value(model: &[bool], l: Lit) -> bool {
    l.eval(model.get(l.var().index()).copied().unwrap_or(false))
}

/// Decides `p` on `n` with the default configuration.
pub fn check_property(n: &Netlist, p: &EqualityProperty) -> Result<Verdict, EngineError> {
    check_property_with(n, p, &MiterConfig::default())
}

pub fn check_property_with(n: &Netlist, p: &EqualityProperty, cfg: &MiterConfig) -> Result<Verdict, EngineError> {
    MiterSession::new(n, p, cfg)?.check()
}

/// Decides `p` with an external solver binary instead of the internal core.
pub fn check_property_external(
    n: &Netlist,
    p: &EqualityProperty,
    solver: &ExternalSolver,
) -> Result<Verdict, EngineError> {
    MiterSession::build(n, p, &MiterConfig::default(), true)?.check_external(solver)
}

/// The complete miter CNF for `p` with the negated prove part asserted;
/// satisfiable exactly when the property fails.
pub fn property_cnf(n: &Netlist, p: &EqualityProperty) -> Result<CnfFormula, EngineError> {
    let s = MiterSession::build(n, p, &MiterConfig::default(), true)?;
    let mut f = s.enc.formula().expect("recording session");
    f.add_clause([s.any]);
    Ok(f)
}

/// Encoding size of `p`, for scaling checks.
pub fn encoding_stats(n: &Netlist, p: &EqualityProperty) -> Result<EncodingStats, EngineError> {
    Ok(MiterSession::new(n, p, &MiterConfig::default())?.stats())
}
