// SPDX-License-Identifier: Apache-2.0

//! Benchmark generation: a toy pipelined block cipher as Trojan-free host,
//! parameterized trigger and payload injection, and random netlists.

mod host;
mod random;
mod trojan;

use serde::Serialize;

pub use host::{
    gen_host_cipher, gen_host_with, permutation, reference_cipher, CipherParams, HostPorts, IDENTITY_SBOX,
    PRESENT_SBOX,
};
pub use random::{gen_corpus_netlist, gen_random_netlist, gen_random_shaped, RandomShape};
pub use trojan::{
    inject_trojan, inject_with_report, pin_trigger_inactive, BenchError, Injection, PayloadSpec, TriggerSpec,
    RESET_INPUT, TRIGGER_WIRE,
};

use crate::netlist::Netlist;

/// Everything needed to regenerate one benchmark.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BenchSpec {
    pub rounds: usize,
    pub width: usize,
    pub trigger: TriggerSpec,
    pub payload: PayloadSpec,
    pub seed: u64,
}

impl BenchSpec {
    /// Builds a spec from the textual trigger and payload forms accepted by
    /// [`TriggerSpec::parse`] and `PayloadSpec::from_str`.
    pub fn parse(rounds: usize, width: usize, trigger: &str, payload: &str, seed: u64) -> Result<Self, BenchError> {
        Ok(BenchSpec {
            rounds,
            width,
            trigger: TriggerSpec::parse(trigger, width, seed)?,
            payload: payload.parse()?,
            seed,
        })
    }
}

/// Ground truth written next to a generated netlist.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub name: String,
    pub rounds: usize,
    pub width: usize,
    /// Key width; equal to the data width in this host.
    pub key_width: usize,
    pub seed: u64,
    pub trigger: TriggerSpec,
    pub trigger_text: String,
    pub payload: PayloadSpec,
    pub payload_text: String,
    pub trigger_wire: String,
    #[serde(flatten)]
    pub injected: Injection,
    /// Pipeline depth of the ciphertext register.
    pub ciphertext_depth: usize,
}

#[derive(Debug, Clone)]
pub struct Benchmark {
    pub netlist: Netlist,
    pub manifest: Manifest,
}

/// Generates the host described by `spec` and injects its Trojan.
pub fn generate(spec: &BenchSpec) -> Result<Benchmark, BenchError> {
    if spec.rounds == 0 || spec.width < 2 {
        return Err(BenchError::Invalid("host needs rounds >= 1 and width >= 2".into()));
    }
    let host = gen_host_cipher(spec.rounds, spec.width);
    let (mut netlist, injected) = inject_with_report(&host, &spec.trigger, &spec.payload)?;
    let name = format!(
        "bench_r{}_w{}_{}_{}",
        spec.rounds,
        spec.width,
        spec.trigger.to_string().replace(':', ""),
        spec.payload.to_string().replace(':', "")
    );
    netlist = rename(netlist, &name);
    let manifest = Manifest {
        name,
        rounds: spec.rounds,
        width: spec.width,
        key_width: spec.width,
        seed: spec.seed,
        trigger_text: spec.trigger.to_string(),
        trigger: spec.trigger.clone(),
        payload_text: spec.payload.to_string(),
        payload: spec.payload.clone(),
        trigger_wire: TRIGGER_WIRE.to_string(),
        injected,
        ciphertext_depth: spec.rounds + 1,
    };
    Ok(Benchmark { netlist, manifest })
}

fn rename(n: Netlist, name: &str) -> Netlist {
    Netlist::from_signals(name, n.signals().to_vec()).expect("signals are unchanged")
}
