// SPDX-License-Identifier: Apache-2.0

//! Golden-free detection of sequential hardware Trojans.
//!
//! Two copies of the design under test are started from independent
//! symbolic states and driven with equal inputs. If the design is
//! non-interfering, every state and output signal reachable from the inputs
//! must agree between the copies once the inputs have propagated to it.
//! The check is decomposed into one-cycle properties along the structural
//! input fanout, each decided by SAT. A failing property yields a
//! two-instance counterexample; signals outside every fanout level are
//! reported as uncovered.

pub mod bench;
pub mod fanout;
pub mod flow;
pub mod miter;
pub mod netlist;
pub mod oracle;
pub mod property;
pub mod vcd;

/// Errors surfaced by the top-level entry points.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] netlist::ParseError),
    #[error(transparent)]
    Aiger(#[from] netlist::AigerError),
    #[error(transparent)]
    Netlist(#[from] netlist::NetlistError),
    #[error(transparent)]
    Fanout(#[from] fanout::FanoutError),
    #[error(transparent)]
    Property(#[from] property::PropertyError),
    #[error(transparent)]
    Engine(#[from] miter::EngineError),
    #[error(transparent)]
    Oracle(#[from] oracle::OracleError),
    #[error(transparent)]
    Flow(#[from] flow::FlowError),
    #[error(transparent)]
    Bench(#[from] bench::BenchError),
}
