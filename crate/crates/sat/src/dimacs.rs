// SPDX-License-Identifier: Apache-2.0

//! DIMACS CNF reading and writing, plus parsing of the competition output
//! format (`s ...` / `v ...` lines) used by external solvers.

use std::fmt::Write as _;

use crate::cnf::CnfFormula;
use crate::lit::Lit;
use crate::SatResult;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("header declares {declared} clauses but {found} were read")]
    ClauseCount { declared: usize, found: usize },
    #[error("literal {lit} exceeds the declared {declared} variables")]
    VariableRange { lit: i64, declared: usize },
    #[error("solver output has no `s` status line")]
    MissingStatus,
    #[error("solver reported unknown status `{0}`")]
    UnknownStatus(String),
}

pub fn parse(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut formula = CnfFormula::new();
    let mut current: Vec<Lit> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::Syntax {
                    line: line_no,
                    msg: "duplicate header".into(),
                });
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 4 || parts[1] != "cnf" {
                return Err(DimacsError::Syntax {
                    line: line_no,
                    msg: format!("malformed header `{line}`"),
                });
            }
            let num = |s: &str| {
                s.parse::<usize>().map_err(|_| DimacsError::Syntax {
                    line: line_no,
                    msg: format!("bad number `{s}`"),
                })
            };
            let vars = num(parts[2])?;
            header = Some((vars, num(parts[3])?));
            formula = CnfFormula::with_vars(vars);
            continue;
        }
        let (vars, _) = header.ok_or(DimacsError::MissingHeader)?;
        for tok in line.split_whitespace() {
            let v: i64 = tok.parse().map_err(|_| DimacsError::Syntax {
                line: line_no,
                msg: format!("bad literal `{tok}`"),
            })?;
            match Lit::from_dimacs(v) {
                None => formula.add_clause(std::mem::take(&mut current)),
                Some(l) => {
                    if l.var().index() >= vars {
                        return Err(DimacsError::VariableRange {
                            lit: v,
                            declared: vars,
                        });
                    }
                    current.push(l);
                }
            }
        }
    }
    let (_, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !current.is_empty() {
        formula.add_clause(current);
    }
    if formula.num_clauses() != declared {
        return Err(DimacsError::ClauseCount {
            declared,
            found: formula.num_clauses(),
        });
    }
    Ok(formula)
}

pub fn write(formula: &CnfFormula) -> String {
    let mut out = String::new();
    writeln!(out, "p cnf {} {}", formula.num_vars(), formula.num_clauses()).unwrap();
    for clause in formula.clauses() {
        for l in clause {
            write!(out, "{} ", l.to_dimacs()).unwrap();
        }
        out.push_str("0\n");
    }
    out
}

/// Parses the standard solver output format. Variables not mentioned on a
/// `v` line default to false.
pub fn parse_solver_output(text: &str, num_vars: usize) -> Result<SatResult, DimacsError> {
    let mut status = None;
    let mut model = vec![false; num_vars];
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix("v ") {
            for tok in rest.split_whitespace() {
                let v: i64 = tok.parse().map_err(|_| DimacsError::Syntax {
                    line: idx + 1,
                    msg: format!("bad model literal `{tok}`"),
                })?;
                if let Some(l) = Lit::from_dimacs(v) {
                    if let Some(slot) = model.get_mut(l.var().index()) {
                        *slot = l.is_positive();
                    }
                }
            }
        }
    }
    match status.as_deref() {
        Some("SATISFIABLE") => Ok(SatResult::Sat(model)),
        Some("UNSATISFIABLE") => Ok(SatResult::Unsat),
        Some(other) => Err(DimacsError::UnknownStatus(other.to_string())),
        None => Err(DimacsError::MissingStatus),
    }
}
