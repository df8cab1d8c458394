// SPDX-License-Identifier: Apache-2.0

//! Bridge to an external DIMACS solver binary, used to cross-check the
//! internal core.

use std::path::PathBuf;
use std::process::Command;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::cnf::CnfFormula;
use crate::dimacs::{self, DimacsError};
use crate::SatResult;

#[derive(Debug, thiserror::Error)]
pub enum ExternalError {
    #[error("failed to run `{command}`: {source}")]
    Spawn {
        command: String,
        source: std::io::Error,
    },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Output(#[from] DimacsError),
}

/// An external solver invoked as `program [args..] <cnf-file>`, expected to
/// print competition-format output on stdout.
#[derive(Debug, Clone)]
pub struct ExternalSolver {
    pub program: String,
    pub args: Vec<String>,
}

static COUNTER: AtomicU64 = AtomicU64::new(0);

impl ExternalSolver {
    pub fn new(program: impl Into<String>) -> Self {
        ExternalSolver {
            program: program.into(),
            args: Vec::new(),
        }
    }

    pub fn solve(&self, formula: &CnfFormula) -> Result<SatResult, ExternalError> {
        let path = std::env::temp_dir().join(format!(
            "miterscan-{}-{}.cnf",
            std::process::id(),
            COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        std::fs::write(&path, dimacs::write(formula)).map_err(|source| ExternalError::Io {
            path: path.clone(),
            source,
        })?;
        let output = Command::new(&self.program)
            .args(&self.args)
            .arg(&path)
            .output();
        let _ = std::fs::remove_file(&path);
        let output = output.map_err(|source| ExternalError::Spawn {
            command: self.program.clone(),
            source,
        })?;
        // SAT solvers exit with 10/20, so the status code is not an error signal
        let stdout = String::from_utf8_lossy(&output.stdout);
        Ok(dimacs::parse_solver_output(&stdout, formula.num_vars())?)
    }
}
