// SPDX-License-Identifier: Apache-2.0

use crate::netlist::{Netlist, NetlistBuilder, Sig, SignalId};

/// PRESENT S-box.
pub const PRESENT_SBOX: [u8; 16] = [0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD, 0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2];

pub const IDENTITY_SBOX: [u8; 16] = [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherParams {
    pub rounds: usize,
    pub width: usize,
    pub sbox: [u8; 16],
    /// PRESENT-style bit permutation when set, identity otherwise.
    pub permute: bool,
}

impl CipherParams {
    pub fn new(rounds: usize, width: usize) -> Self {
        CipherParams {
            rounds,
            width,
            sbox: PRESENT_SBOX,
            permute: true,
        }
    }

    pub fn degenerate(rounds: usize, width: usize) -> Self {
        CipherParams {
            rounds,
            width,
            sbox: IDENTITY_SBOX,
            permute: false,
        }
    }
}

/// Destination of bit `i` under the permutation layer. For widths that are
/// a multiple of 4 this is `i * w/4 mod (w - 1)` with the top bit fixed,
/// otherwise the identity.
pub fn permutation(width: usize, i: usize) -> usize {
    if !width.is_multiple_of(4) || width < 4 || i == width - 1 {
        i
    } else {
        i * (width / 4) % (width - 1)
    }
}

/// Signal or known constant during S-box lowering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Node {
    Const(bool),
    Sig(Sig),
}

fn mux(b: &mut NetlistBuilder, s: Sig, hi: Node, lo: Node) -> Node {
    use Node::*;
    match (hi, lo) {
        _ if hi == lo => hi,
        (Const(true), Const(false)) => Sig(s),
        (Const(false), Const(true)) => Sig(b.not(s)),
        (Const(true), Sig(l)) => Sig(b.or(s, l)),
        (Const(false), Sig(l)) => {
            let ns = b.not(s);
            Sig(b.and(ns, l))
        }
        (Sig(h), Const(false)) => Sig(b.and(s, h)),
        (Sig(h), Const(true)) => {
            let ns = b.not(s);
            Sig(b.or(ns, h))
        }
        (Sig(h), Sig(l)) => Sig(b.mux(s, h, l)),
        (Const(_), Const(_)) => unreachable!("equal constants handled above"),
    }
}

/// Shannon expansion of a truth table over `vars` (LSB first).
fn lower_function(b: &mut NetlistBuilder, vars: &[Sig], table: &[bool]) -> Node {
    if table.iter().all(|&v| v == table[0]) {
        return Node::Const(table[0]);
    }
    let top = vars.len() - 1;
    let half = table.len() / 2;
    let lo = lower_function(b, &vars[..top], &table[..half]);
    let hi = lower_function(b, &vars[..top], &table[half..]);
    mux(b, vars[top], hi, lo)
}

fn materialize(b: &mut NetlistBuilder, n: Node) -> Sig {
    match n {
        Node::Sig(s) => s,
        Node::Const(v) => b.constant(v),
    }
}

/// Applies a 4-bit S-box to `x` (LSB first).
pub(crate) fn sbox_layer(b: &mut NetlistBuilder, sbox: &[u8; 16], x: &[Sig]) -> Vec<Sig> {
    let mut out = x.to_vec();
    for nib in 0..x.len() / 4 {
        let vars = &x[4 * nib..4 * nib + 4];
        for bit in 0..4 {
            let table: Vec<bool> = (0..16).map(|v| (sbox[v] >> bit) & 1 == 1).collect();
            let node = lower_function(b, vars, &table);
            out[4 * nib + bit] = materialize(b, node);
        }
    }
    out
}

/// Bus handles of a generated host.
#[derive(Debug, Clone)]
pub struct HostPorts {
    pub plaintext: Vec<Sig>,
    pub key: Vec<Sig>,
    /// `data[j]` is the stage-`j` data register bus, `j = 0..=rounds`.
    pub data: Vec<Vec<Sig>>,
    /// `keys[j]` is the stage-`j` key register bus, `j = 0..rounds`.
    pub keys: Vec<Vec<Sig>>,
    pub ciphertext: Vec<Sig>,
}

fn bus(name: &str, w: usize) -> impl Iterator<Item = SignalId> + '_ {
    (0..w as u32).map(move |i| SignalId::bit(name, i))
}

/// Builds the toy pipelined cipher into `b`.
///
/// Stage 0 registers the plaintext (`d0`) and key (`k0`). Round `j`
/// computes `d<j> = P(S(d<j-1> ^ rotl(k<j-1>, j-1)))` and forwards the key
/// to `k<j>`. The ciphertext output `ct` aliases `d<rounds>`.
pub(crate) fn build_host(b: &mut NetlistBuilder, p: &CipherParams) -> HostPorts {
    let (r, w) = (p.rounds, p.width);
    let plaintext: Vec<Sig> = bus("pt", w).map(|id| b.input(id)).collect();
    let key: Vec<Sig> = bus("key", w).map(|id| b.input(id)).collect();
    let data: Vec<Vec<Sig>> = (0..=r)
        .map(|j| bus(&format!("d{j}"), w).map(|id| b.register(id)).collect())
        .collect();
    let keys: Vec<Vec<Sig>> = (0..r)
        .map(|j| bus(&format!("k{j}"), w).map(|id| b.register(id)).collect())
        .collect();
    for i in 0..w {
        b.set_next(data[0][i], plaintext[i]);
        b.set_next(keys[0][i], key[i]);
    }
    for j in 1..=r {
        let rot = (j - 1) % w;
        let mixed: Vec<Sig> = (0..w)
            .map(|i| b.xor(data[j - 1][i], keys[j - 1][(i + w - rot) % w]))
            .collect();
        let subst = sbox_layer(b, &p.sbox, &mixed);
        for i in 0..w {
            let dst = if p.permute { permutation(w, i) } else { i };
            b.set_next(data[j][dst], subst[i]);
        }
        if j < r {
            for i in 0..w {
                b.set_next(keys[j][i], keys[j - 1][i]);
            }
        }
    }
    let ciphertext = bus("ct", w)
        .zip(&data[r])
        .map(|(id, &d)| b.output(id, d))
        .collect();
    HostPorts {
        plaintext,
        key,
        data,
        keys,
        ciphertext,
    }
}

/// Trojan-free host cipher with `rounds` rounds over `width`-bit words.
pub fn gen_host_cipher(rounds: usize, width: usize) -> Netlist {
    gen_host_with(&CipherParams::new(rounds, width))
}

pub fn gen_host_with(p: &CipherParams) -> Netlist {
    assert!(p.rounds >= 1 && p.width >= 2, "host needs rounds >= 1 and width >= 2");
    let mut b = NetlistBuilder::new(format!("host_r{}_w{}", p.rounds, p.width));
    build_host(&mut b, p);
    b.build().expect("host construction wires every register")
}

/// Reference model of the host datapath on integers.
pub fn reference_cipher(p: &CipherParams, plaintext: u64, key: u64) -> u64 {
    let w = p.width;
    let mask = if w == 64 { !0 } else { (1u64 << w) - 1 };
    let bit = |x: u64, i: usize| (x >> i) & 1;
    let mut d = plaintext & mask;
    let k = key & mask;
    for j in 1..=p.rounds {
        let rot = (j - 1) % w;
        let rk = (0..w).fold(0u64, |acc, i| acc | bit(k, (i + w - rot) % w) << i);
        let x = d ^ rk;
        let mut s = x;
        for nib in 0..w / 4 {
            let v = (x >> (4 * nib)) & 0xF;
            s = (s & !(0xF << (4 * nib))) | (u64::from(p.sbox[v as usize]) << (4 * nib));
        }
        d = (0..w).fold(0u64, |acc, i| {
            let dst = if p.permute { permutation(w, i) } else { i };
            acc | bit(s, i) << dst
        });
    }
    d
}
