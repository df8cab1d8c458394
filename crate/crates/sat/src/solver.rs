// SPDX-License-Identifier: Apache-2.0

//! Conflict-driven clause learning solver.
//!
//! - two watched literals with blocker literals
//! - first-UIP learning with local clause minimization
//! - VSIDS branching over a binary heap, phase saving
//! - Luby restarts and activity-based learnt clause reduction
//! - incremental solving under assumptions
//!
//! There is no randomness anywhere in the search: the same sequence of
//! `add_clause`/`solve` calls always yields the same models.

use crate::lit::{Lit, Var};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    True,
    False,
    Undef,
}

/// Outcome of a (possibly budgeted) solver call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveResult {
    Sat,
    Unsat,
    /// The conflict budget ran out before a verdict was reached.
    Unknown,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SolverStats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

type ClauseRef = usize;

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: ClauseRef,
    blocker: Lit,
}

/// Max-heap of variables ordered by activity.
#[derive(Default)]
struct VarHeap {
    heap: Vec<Var>,
    // position in `heap`, usize::MAX when absent
    pos: Vec<usize>,
}

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n, usize::MAX);
    }

    fn contains(&self, v: Var) -> bool {
        self.pos[v.index()] != usize::MAX
    }

    fn insert(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v.index()] = self.heap.len();
        self.heap.push(v);
        self.sift_up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("nonempty");
        self.pos[top.index()] = usize::MAX;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last.index()] = 0;
            self.sift_down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            self.sift_up(self.pos[v.index()], act);
        }
    }

    fn less(a: Var, b: Var, act: &[f64]) -> bool {
        // ties broken by index so the order is total and deterministic
        let (x, y) = (act[a.index()], act[b.index()]);
        x > y || (x == y && a < b)
    }

    fn sift_up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if !Self::less(v, self.heap[parent], act) {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i].index()] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v.index()] = i;
    }

    fn sift_down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let left = 2 * i + 1;
            if left >= self.heap.len() {
                break;
            }
            let right = left + 1;
            let child = if right < self.heap.len() && Self::less(self.heap[right], self.heap[left], act)
            {
                right
            } else {
                left
            };
            if !Self::less(self.heap[child], v, act) {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i].index()] = i;
            i = child;
        }
        self.heap[i] = v;
        self.pos[v.index()] = i;
    }

    fn rebuild(&mut self, vars: impl Iterator<Item = Var>, act: &[f64]) {
        for v in self.heap.drain(..) {
            self.pos[v.index()] = usize::MAX;
        }
        for v in vars {
            self.insert(v, act);
        }
    }
}

#[inline]
fn lit_value(assigns: &[Value], l: Lit) -> Value {
    match (assigns[l.var().index()], l.is_positive()) {
        (Value::Undef, _) => Value::Undef,
        (Value::True, true) | (Value::False, false) => Value::True,
        _ => Value::False,
    }
}

fn luby(y: f64, mut x: u64) -> f64 {
    let mut size = 1u64;
    let mut seq = 0i32;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

pub struct Solver {
    clauses: Vec<Clause>,
    learnts: Vec<ClauseRef>,
    watches: Vec<Vec<Watcher>>,

    assigns: Vec<Value>,
    level: Vec<u32>,
    reason: Vec<Option<ClauseRef>>,
    polarity: Vec<bool>,
    activity: Vec<f64>,
    seen: Vec<bool>,

    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,

    order: VarHeap,
    var_inc: f64,
    cla_inc: f64,
    max_learnts: f64,

    ok: bool,
    model: Vec<bool>,
    conflict_budget: Option<u64>,
    stats: SolverStats,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

const VAR_DECAY: f64 = 0.95;
const CLAUSE_DECAY: f64 = 0.999;
const RESTART_BASE: f64 = 100.0;

impl Solver {
    pub fn new() -> Self {
        Solver {
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            polarity: Vec::new(),
            activity: Vec::new(),
            seen: Vec::new(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            order: VarHeap::default(),
            var_inc: 1.0,
            cla_inc: 1.0,
            max_learnts: 0.0,
            ok: true,
            model: Vec::new(),
            conflict_budget: None,
            stats: SolverStats::default(),
        }
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var::new(self.assigns.len());
        self.assigns.push(Value::Undef);
        self.level.push(0);
        self.reason.push(None);
        self.polarity.push(false);
        self.activity.push(0.0);
        self.seen.push(false);
        self.watches.push(Vec::new());
        self.watches.push(Vec::new());
        self.order.grow(self.assigns.len());
        self.order.insert(v, &self.activity);
        v
    }

    pub fn num_vars(&self) -> usize {
        self.assigns.len()
    }

    pub fn reserve_vars(&mut self, n: usize) {
        while self.num_vars() < n {
            self.new_var();
        }
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.iter().filter(|c| !c.learnt && !c.deleted).count()
    }

    pub fn stats(&self) -> SolverStats {
        self.stats
    }

    /// Limits the number of conflicts per `solve` call. `None` removes the
    /// limit.
    pub fn set_conflict_budget(&mut self, budget: Option<u64>) {
        self.conflict_budget = budget;
    }

    /// False once the clause set is known to be unsatisfiable.
    pub fn is_ok(&self) -> bool {
        self.ok
    }

    #[inline]
    fn value(&self, l: Lit) -> Value {
        lit_value(&self.assigns, l)
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    /// Adds a clause. Returns false if the solver became trivially
    /// unsatisfiable. Variables are created on demand.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        if let Some(max) = lits.iter().map(|l| l.var().index()).max() {
            self.reserve_vars(max + 1);
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort();
        c.dedup();
        let mut out = Vec::with_capacity(c.len());
        for (i, &l) in c.iter().enumerate() {
            if i + 1 < c.len() && c[i + 1] == !l {
                return true; // tautology
            }
            match self.value(l) {
                Value::True => return true,
                Value::False => {}
                Value::Undef => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], None);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(out, false);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> ClauseRef {
        let cref = self.clauses.len();
        self.watches[lits[0].code()].push(Watcher {
            cref,
            blocker: lits[1],
        });
        self.watches[lits[1].code()].push(Watcher {
            cref,
            blocker: lits[0],
        });
        self.clauses.push(Clause {
            lits,
            learnt,
            deleted: false,
            activity: 0.0,
        });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn enqueue(&mut self, l: Lit, reason: Option<ClauseRef>) {
        let v = l.var().index();
        debug_assert_eq!(self.assigns[v], Value::Undef);
        self.assigns[v] = if l.is_positive() {
            Value::True
        } else {
            Value::False
        };
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let start = self.trail_lim[lvl];
        for i in (start..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.assigns[v.index()] = Value::Undef;
            self.reason[v.index()] = None;
            self.polarity[v.index()] = l.is_positive();
            self.order.insert(v, &self.activity);
        }
        self.trail.truncate(start);
        self.trail_lim.truncate(lvl);
        self.qhead = self.qhead.min(start);
    }

    /// Unit propagation. Returns the conflicting clause, if any.
    fn propagate(&mut self) -> Option<ClauseRef> {
        let mut conflict = None;
        while self.qhead < self.trail.len() && conflict.is_none() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let mut i = 0;
            let mut j = 0;
            'watchers: while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.assigns, w.blocker) == Value::True {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let clause = &mut self.clauses[w.cref];
                if clause.deleted {
                    continue;
                }
                if clause.lits[0] == false_lit {
                    clause.lits.swap(0, 1);
                }
                let first = clause.lits[0];
                let kept = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                if first != w.blocker && lit_value(&self.assigns, first) == Value::True {
                    ws[j] = kept;
                    j += 1;
                    continue;
                }
                for k in 2..clause.lits.len() {
                    let l = clause.lits[k];
                    if lit_value(&self.assigns, l) != Value::False {
                        clause.lits.swap(1, k);
                        self.watches[l.code()].push(kept);
                        continue 'watchers;
                    }
                }
                ws[j] = kept;
                j += 1;
                match lit_value(&self.assigns, first) {
                    Value::False => {
                        conflict = Some(w.cref);
                        self.qhead = self.trail.len();
                        while i < ws.len() {
                            ws[j] = ws[i];
                            j += 1;
                            i += 1;
                        }
                    }
                    Value::Undef => self.enqueue(first, Some(w.cref)),
                    Value::True => {}
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
        }
        conflict
    }

    fn bump_var(&mut self, v: Var) {
        let a = &mut self.activity[v.index()];
        *a += self.var_inc;
        if *a > 1e100 {
            for x in self.activity.iter_mut() {
                *x *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.order.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: ClauseRef) {
        let c = &mut self.clauses[cref];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: ClauseRef) -> (Vec<Lit>, usize) {
        let mut learnt: Vec<Lit> = vec![Lit::new(Var::new(0), true)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let current = self.decision_level() as u32;

        loop {
            self.bump_clause(confl);
            let lits = self.clauses[confl].lits.clone();
            let skip = usize::from(p.is_some());
            for &q in &lits[skip..] {
                let v = q.var().index();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(q.var());
                    if self.level[v] >= current {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var().index()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            self.seen[lit.var().index()] = false;
            path -= 1;
            p = Some(lit);
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var().index()].expect("implied literal has a reason");
        }
        learnt[0] = !p.expect("conflict has a UIP");

        // local minimization: drop literals implied by others already in the clause
        let mut keep = vec![learnt[0]];
        for &q in &learnt[1..] {
            let redundant = match self.reason[q.var().index()] {
                None => false,
                Some(r) => self.clauses[r].lits[1..].iter().all(|l| {
                    let v = l.var().index();
                    self.seen[v] || self.level[v] == 0
                }),
            };
            if !redundant {
                keep.push(q);
            }
        }
        for &q in &learnt {
            self.seen[q.var().index()] = false;
        }
        let mut learnt = keep;

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var().index()] > self.level[learnt[max_i].var().index()] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var().index()] as usize
        };
        (learnt, bt)
    }

    fn locked(&self, cref: ClauseRef) -> bool {
        let first = self.clauses[cref].lits[0];
        self.value(first) == Value::True && self.reason[first.var().index()] == Some(cref)
    }

    fn reduce_db(&mut self) {
        let mut learnts = std::mem::take(&mut self.learnts);
        learnts.retain(|&c| !self.clauses[c].deleted);
        learnts.sort_by(|&a, &b| {
            self.clauses[a]
                .activity
                .partial_cmp(&self.clauses[b].activity)
                .expect("activities are finite")
                .then(a.cmp(&b))
        });
        let half = learnts.len() / 2;
        let mut kept = Vec::with_capacity(learnts.len());
        for (i, &c) in learnts.iter().enumerate() {
            let clause = &self.clauses[c];
            if i < half && clause.lits.len() > 2 && !self.locked(c) {
                self.clauses[c].deleted = true;
            } else {
                kept.push(c);
            }
        }
        self.learnts = kept;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.assigns[v.index()] == Value::Undef {
                self.stats.decisions += 1;
                return Some(Lit::new(v, self.polarity[v.index()]));
            }
        }
        None
    }

    fn search(&mut self, nof_conflicts: u64, assumptions: &[Lit], budget_end: Option<u64>) -> Option<SolveResult> {
        let mut local_conflicts = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local_conflicts += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SolveResult::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(first, Some(cref));
                }
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLAUSE_DECAY;
            } else {
                if budget_end.is_some_and(|end| self.stats.conflicts >= end) {
                    self.cancel_until(0);
                    return Some(SolveResult::Unknown);
                }
                if local_conflicts >= nof_conflicts {
                    self.cancel_until(0);
                    return None;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= self.max_learnts {
                    self.reduce_db();
                }
                let mut next = None;
                while self.decision_level() < assumptions.len() {
                    let a = assumptions[self.decision_level()];
                    match self.value(a) {
                        Value::True => self.trail_lim.push(self.trail.len()),
                        Value::False => {
                            self.cancel_until(0);
                            return Some(SolveResult::Unsat);
                        }
                        Value::Undef => {
                            next = Some(a);
                            break;
                        }
                    }
                }
                let next = match next.or_else(|| self.pick_branch()) {
                    Some(l) => l,
                    None => {
                        self.model = self
                            .assigns
                            .iter()
                            .map(|&a| a == Value::True)
                            .collect();
                        self.cancel_until(0);
                        return Some(SolveResult::Sat);
                    }
                };
                self.trail_lim.push(self.trail.len());
                self.enqueue(next, None);
            }
        }
    }

    pub fn solve(&mut self) -> SolveResult {
        self.solve_under(&[])
    }

    /// Solves under the given assumption literals. An `Unsat` answer under
    /// nonempty assumptions does not make the solver unusable.
    pub fn solve_under(&mut self, assumptions: &[Lit]) -> SolveResult {
        if !self.ok {
            return SolveResult::Unsat;
        }
        if let Some(max) = assumptions.iter().map(|l| l.var().index()).max() {
            self.reserve_vars(max + 1);
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SolveResult::Unsat;
        }
        self.max_learnts = (self.num_clauses() as f64 / 3.0).max(1000.0);
        let budget_end = self.conflict_budget.map(|b| self.stats.conflicts + b);
        let mut restart = 0u64;
        loop {
            let limit = (luby(2.0, restart) * RESTART_BASE) as u64;
            if let Some(result) = self.search(limit, assumptions, budget_end) {
                return result;
            }
            restart += 1;
            self.stats.restarts += 1;
            self.max_learnts *= 1.1;
            if restart.is_multiple_of(8) {
                // keep the heap compact after many lazy removals
                let vars: Vec<Var> = (0..self.num_vars()).map(Var::new).collect();
                self.order.rebuild(vars.into_iter(), &self.activity);
            }
        }
    }

    /// Value of a variable in the last model. Only meaningful after `Sat`.
    pub fn model_value(&self, v: Var) -> bool {
        self.model.get(v.index()).copied().unwrap_or(false)
    }

    pub fn lit_model_value(&self, l: Lit) -> bool {
        l.eval(self.model_value(l.var()))
    }

    pub fn model(&self) -> &[bool] {
        &self.model
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(xs: &[i64]) -> Vec<Lit> {
        xs.iter().map(|&x| Lit::from_dimacs(x).unwrap()).collect()
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<f64> = (0..15).map(|i| luby(2.0, i)).collect();
        assert_eq!(
            seq,
            vec![1., 1., 2., 1., 1., 2., 4., 1., 1., 2., 1., 1., 2., 4., 8.]
        );
    }

    #[test]
    fn unit_chain() {
        let mut s = Solver::new();
        assert!(s.add_clause(&lits(&[1, 2])));
        assert!(s.add_clause(&lits(&[-1])));
        assert_eq!(s.solve(), SolveResult::Sat);
        assert!(s.model_value(Var::new(1)));
        assert!(!s.model_value(Var::new(0)));
    }

    #[test]
    fn contradiction() {
        let mut s = Solver::new();
        s.add_clause(&lits(&[1]));
        assert!(!s.add_clause(&lits(&[-1])));
        assert_eq!(s.solve(), SolveResult::Unsat);
    }

    #[test]
    fn assumptions_do_not_poison_solver() {
        let mut s = Solver::new();
        s.add_clause(&lits(&[1, 2]));
        s.add_clause(&lits(&[-1, 3]));
        assert_eq!(s.solve_under(&lits(&[-2, -3])), SolveResult::Unsat);
        assert!(s.is_ok());
        assert_eq!(s.solve_under(&lits(&[-2])), SolveResult::Sat);
        assert!(s.model_value(Var::new(2)));
        assert_eq!(s.solve(), SolveResult::Sat);
    }

    #[test]
    fn pigeonhole_unsat() {
        // 4 pigeons, 3 holes
        let p = |i: i64, j: i64| i * 3 + j + 1;
        let mut s = Solver::new();
        for i in 0..4 {
            s.add_clause(&lits(&[p(i, 0), p(i, 1), p(i, 2)]));
        }
        for j in 0..3 {
            for a in 0..4 {
                for b in a + 1..4 {
                    s.add_clause(&lits(&[-p(a, j), -p(b, j)]));
                }
            }
        }
        assert_eq!(s.solve(), SolveResult::Unsat);
    }

    #[test]
    fn budget_yields_unknown() {
        // pigeonhole 8 into 7 needs many conflicts
        let n = 8i64;
        let h = 7i64;
        let p = |i: i64, j: i64| i * h + j + 1;
        let mut s = Solver::new();
        for i in 0..n {
            let c: Vec<i64> = (0..h).map(|j| p(i, j)).collect();
            s.add_clause(&lits(&c));
        }
        for j in 0..h {
            for a in 0..n {
                for b in a + 1..n {
                    s.add_clause(&lits(&[-p(a, j), -p(b, j)]));
                }
            }
        }
        s.set_conflict_budget(Some(10));
        assert_eq!(s.solve(), SolveResult::Unknown);
    }
}
