// SPDX-License-Identifier: Apache-2.0

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::netlist::{Gate, Netlist, NetlistBuilder, Sig, SignalId};

/// Shape of a random netlist.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomShape {
    pub registers: usize,
    pub inputs: usize,
    pub gates: usize,
    /// Number of outputs; each aliases a register or a gate.
    pub outputs: usize,
    /// Arrange registers in pipeline stages: stage `s` reads stage `s-1`
    /// (stage 0 reads the inputs), with occasional cross-stage reads.
    pub layered: bool,
}

impl RandomShape {
    pub fn new(registers: usize, inputs: usize, gates: usize) -> Self {
        RandomShape {
            registers,
            inputs,
            gates,
            outputs: 2,
            layered: false,
        }
    }
}

/// Random acyclic netlist with inputs `i<k>`, registers `r<k>`, gates
/// `g<k>` and outputs `o<k>`. Gates only read earlier signals and never
/// read the same operand twice; no constant gates are generated.
pub fn gen_random_netlist(seed: u64, registers: usize, inputs: usize, gate_budget: usize) -> Netlist {
    gen_random_shaped(seed, RandomShape::new(registers, inputs, gate_budget))
}

/// Fuzz-corpus netlist: shape cycles through 1..=`max_registers`
/// registers, 1..=3 inputs and 4..=20 gates as `seed` advances.
pub fn gen_corpus_netlist(seed: u64, max_registers: usize) -> Netlist {
    let max = max_registers.max(1) as u64;
    let regs = 1 + (seed % max) as usize;
    let inputs = 1 + (seed / max % 3) as usize;
    let gates = 4 + (seed / 7 % 17) as usize;
    gen_random_netlist(seed, regs, inputs, gates)
}

pub fn gen_random_shaped(seed: u64, shape: RandomShape) -> Netlist {
    assert!(shape.registers >= 1 && shape.inputs >= 1, "counts must be at least 1");
    if shape.layered {
        return gen_layered(seed, shape);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetlistBuilder::new(format!("random_{seed}"));
    let mut pool: Vec<Sig> = (0..shape.inputs)
        .map(|k| b.input(SignalId::scalar(format!("i{k}"))))
        .collect();
    let regs: Vec<Sig> = (0..shape.registers)
        .map(|k| b.register(SignalId::scalar(format!("r{k}"))))
        .collect();
    pool.extend(&regs);
    let mut gates = Vec::with_capacity(shape.gates);
    for k in 0..shape.gates {
        let gate = random_gate(&mut rng, &pool);
        let g = b.named_gate(SignalId::scalar(format!("g{k}")), gate);
        gates.push(g);
        pool.push(g);
    }
    for &r in &regs {
        let next = if !gates.is_empty() && rng.gen_bool(0.8) {
            *gates.choose(&mut rng).expect("nonempty")
        } else {
            *pool.choose(&mut rng).expect("nonempty")
        };
        b.set_next(r, next);
    }
    for k in 0..shape.outputs {
        let src = if rng.gen_bool(0.7) || gates.is_empty() {
            *regs.choose(&mut rng).expect("nonempty")
        } else {
            *gates.choose(&mut rng).expect("nonempty")
        };
        b.output(SignalId::scalar(format!("o{k}")), src);
    }
    b.build().expect("every register is wired")
}

fn random_gate(rng: &mut ChaCha8Rng, pool: &[Sig]) -> Gate {
    let arity = match rng.gen_range(0..9) {
        0 => 1,
        1 | 2 if pool.len() >= 3 => 3,
        _ => 2,
    }
    .min(pool.len());
    let ops: Vec<Sig> = pool.choose_multiple(rng, arity).copied().collect();
    match (arity, rng.gen_range(0..3)) {
        (1, _) => Gate::Not(ops[0]),
        (3, _) => Gate::Mux(ops[0], ops[1], ops[2]),
        (_, 0) => Gate::And(ops[0], ops[1]),
        (_, 1) => Gate::Or(ops[0], ops[1]),
        _ => Gate::Xor(ops[0], ops[1]),
    }
}

fn gen_layered(seed: u64, shape: RandomShape) -> Netlist {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = NetlistBuilder::new(format!("layered_{seed}"));
    let inputs: Vec<Sig> = (0..shape.inputs)
        .map(|k| b.input(SignalId::scalar(format!("i{k}"))))
        .collect();
    let stages = rng.gen_range(1..=shape.registers);
    let regs: Vec<Sig> = (0..shape.registers)
        .map(|k| b.register(SignalId::scalar(format!("r{k}"))))
        .collect();
    // every stage gets at least one register
    let stage_of: Vec<usize> = (0..shape.registers)
        .map(|k| if k < stages { k } else { rng.gen_range(0..stages) })
        .collect();
    let per_reg = (shape.gates / shape.registers).max(1);
    let mut k = 0;
    for (i, &r) in regs.iter().enumerate() {
        let s = stage_of[i];
        let mut pool: Vec<Sig> = if s == 0 {
            inputs.clone()
        } else {
            (0..regs.len()).filter(|&j| stage_of[j] == s - 1).map(|j| regs[j]).collect()
        };
        if rng.gen_bool(0.15) {
            let extra = *regs.choose(&mut rng).expect("nonempty");
            if !pool.contains(&extra) {
                pool.push(extra);
            }
        }
        let mut last = *pool.choose(&mut rng).expect("nonempty");
        for _ in 0..rng.gen_range(0..=per_reg) {
            let g = random_gate(&mut rng, &pool);
            last = b.named_gate(SignalId::scalar(format!("g{k}")), g);
            k += 1;
            pool.push(last);
        }
        b.set_next(r, last);
    }
    for o in 0..shape.outputs {
        let src = *regs.choose(&mut rng).expect("nonempty");
        b.output(SignalId::scalar(format!("o{o}")), src);
    }
    b.build().expect("every register is wired")
}
