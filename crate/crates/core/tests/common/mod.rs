// SPDX-License-Identifier: Apache-2.0

//! Shared generators and independent oracles for the integration tests.

#![allow(dead_code)]

use std::collections::{BTreeMap, VecDeque};

use miterscan::bench::{gen_corpus_netlist, gen_random_shaped, RandomShape};
use miterscan::fanout::SignalSet;
use miterscan::netlist::{Netlist, Sig};
use miterscan::property::{EqualityProperty, PropertyId, ResetConstraint};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small random netlist for oracle comparisons.
pub fn small_netlist(seed: u64) -> Netlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xA5A5);
    let shape = RandomShape {
        registers: rng.gen_range(1..=4),
        inputs: rng.gen_range(1..=2),
        gates: rng.gen_range(0..=10),
        outputs: rng.gen_range(1..=2),
        layered: rng.gen_bool(0.3),
    };
    gen_random_shaped(seed, shape)
}

/// Fuzz corpus netlist with at most `max_registers` registers.
pub fn corpus_netlist(seed: u64, max_registers: usize) -> Netlist {
    gen_corpus_netlist(seed, max_registers)
}

fn subset(rng: &mut ChaCha8Rng, pool: &[Sig], max: usize) -> Vec<Sig> {
    let k = rng.gen_range(0..=max.min(pool.len()));
    pool.choose_multiple(rng, k).copied().collect()
}

/// Random property with window at most 2 and a nonempty prove part.
pub fn random_property(n: &Netlist, rng: &mut ChaCha8Rng) -> EqualityProperty {
    let window = rng.gen_range(0..=2usize);
    let all: Vec<Sig> = (0..n.len()).map(Sig::new).collect();
    let reset = (rng.gen_bool(0.25) && n.inputs().len() > 1).then(|| ResetConstraint {
        input: *n.inputs().choose(rng).expect("inputs"),
        inactive: rng.gen(),
    });
    let mut p = EqualityProperty::new(PropertyId::Custom("random".into())).with_reset(reset);
    for t in 0..=window {
        // inputs are the usual assumption; other signals occasionally
        let mut a: Vec<Sig> = if rng.gen_bool(0.7) {
            n.inputs().to_vec()
        } else {
            subset(rng, n.inputs(), 2)
        };
        let extra = if rng.gen_bool(0.5) { 2 } else { 0 };
        a.extend(subset(rng, &all, extra));
        if !a.is_empty() && (t == 0 || rng.gen_bool(0.4)) {
            p = p.assuming(t, a);
        }
    }
    let mut proved = false;
    for t in 0..=window {
        let s = subset(rng, &all, 3);
        if !s.is_empty() && (t == window || rng.gen_bool(0.5)) {
            p = p.proving(t, s);
            proved = true;
        }
    }
    if !proved {
        p = p.proving(window, [*all.choose(rng).expect("signals")]);
    }
    p
}

/// Minimum number of clock edges after which an analysis input can
/// influence each state and output signal, by breadth-first search over
/// the signal dependence graph. Outputs reading an input combinationally
/// get distance 0.
pub fn bfs_distances(n: &Netlist, inputs: &SignalSet) -> BTreeMap<Sig, usize> {
    // comb sources of a signal: inputs and registers in its same-cycle cone
    let sources = |root: Sig| -> Vec<Sig> {
        let mut seen = vec![false; n.len()];
        let mut stack = vec![root];
        let mut out = Vec::new();
        while let Some(s) = stack.pop() {
            if std::mem::replace(&mut seen[s.index()], true) {
                continue;
            }
            if n.is_register(s) || n.is_input(s) {
                out.push(s);
            } else {
                stack.extend(n.signal(s).comb_operands());
            }
        }
        out
    };
    // edge u -> v with weight: register v reads u through next state (1),
    // output v reads u in the same cycle (0)
    let mut edges: BTreeMap<Sig, Vec<(Sig, usize)>> = BTreeMap::new();
    for &r in n.registers() {
        for s in sources(n.next_state(r).expect("register")) {
            edges.entry(s).or_default().push((r, 1));
        }
    }
    for &o in n.outputs() {
        let srcs = if n.is_register(o) { vec![o] } else { sources(o) };
        for s in srcs {
            if s != o {
                edges.entry(s).or_default().push((o, 0));
            }
        }
    }
    let mut dist: BTreeMap<Sig, usize> = inputs.iter().map(|&i| (i, 0)).collect();
    let mut queue: VecDeque<Sig> = inputs.iter().copied().collect();
    // 0-1 BFS
    while let Some(u) = queue.pop_front() {
        let du = dist[&u];
        for &(v, w) in edges.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            if dist.get(&v).is_none_or(|&dv| du + w < dv) {
                dist.insert(v, du + w);
                if w == 0 {
                    queue.push_front(v);
                } else {
                    queue.push_back(v);
                }
            }
        }
    }
    dist.into_iter().filter(|(s, _)| !inputs.contains(s)).collect()
}
