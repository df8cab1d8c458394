// SPDX-License-Identifier: Apache-2.0

use crate::lit::{Lit, Var};

/// A formula in conjunctive normal form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: Vec<Vec<Lit>>,
}

impl CnfFormula {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars(num_vars: usize) -> Self {
        CnfFormula {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn new_var(&mut self) -> Var {
        let v = Var::new(self.num_vars);
        self.num_vars += 1;
        v
    }

    /// Adds a clause, growing the variable count if the clause mentions
    /// variables beyond it.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) {
        let clause: Vec<Lit> = lits.into_iter().collect();
        for l in &clause {
            self.num_vars = self.num_vars.max(l.var().index() + 1);
        }
        self.clauses.push(clause);
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    /// Checks a total assignment clause by clause.
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.first_falsified(assignment).is_none()
    }

    /// Index of the first clause not satisfied by `assignment`, if any.
    /// Variables outside the assignment count as false.
    pub fn first_falsified(&self, assignment: &[bool]) -> Option<usize> {
        self.clauses.iter().position(|c| {
            !c.iter().any(|l| {
                let v = assignment.get(l.var().index()).copied().unwrap_or(false);
                l.eval(v)
            })
        })
    }
}
