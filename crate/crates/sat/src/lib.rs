// SPDX-License-Identifier: Apache-2.0

//! Deterministic CDCL SAT core.
//!
//! [`Solver`] is the incremental interface used by the proof engine;
//! [`solve_cnf`] is a one-shot convenience over a [`CnfFormula`].

pub mod cnf;
pub mod dimacs;
pub mod external;
mod lit;
mod solver;

pub use cnf::CnfFormula;
pub use lit::{Lit, Var};
pub use solver::{SolveResult, Solver, SolverStats};

/// Verdict of a completed one-shot solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SatResult {
    /// A total assignment, indexed by variable.
    Sat(Vec<bool>),
    Unsat,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SolverError {
    #[error("conflict budget of {0} exhausted")]
    ResourceLimit(u64),
}

/// Solves `formula` with an optional conflict budget.
pub fn solve_cnf(formula: &CnfFormula, conflict_budget: Option<u64>) -> Result<SatResult, SolverError> {
    let mut solver = Solver::new();
    solver.reserve_vars(formula.num_vars());
    for clause in formula.clauses() {
        if !solver.add_clause(clause) {
            return Ok(SatResult::Unsat);
        }
    }
    solver.set_conflict_budget(conflict_budget);
    match solver.solve() {
        SolveResult::Sat => {
            let mut model = solver.model().to_vec();
            model.resize(formula.num_vars(), false);
            Ok(SatResult::Sat(model))
        }
        SolveResult::Unsat => Ok(SatResult::Unsat),
        SolveResult::Unknown => Err(SolverError::ResourceLimit(conflict_budget.unwrap_or(0))),
    }
}
