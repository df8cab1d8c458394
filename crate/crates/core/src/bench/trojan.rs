// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::netlist::{Driver, Gate, Netlist, NetlistBuilder, Sig, SignalId};

/// Name of the wire carrying the trigger condition in generated Trojans.
pub const TRIGGER_WIRE: &str = "ht_trigger";
/// Synchronous reset of the cycle-counter trigger.
pub const RESET_INPUT: &str = "rst";

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TriggerSpec {
    /// Fires after the plaintext bus has carried `values` on consecutive
    /// cycles; stays active afterwards.
    Sequence { values: Vec<u64> },
    /// Counts cycles on which every plaintext bit in `mask` is set; fires
    /// on the counter's top bit.
    EventCounter { width: usize, mask: u64 },
    /// Free-running counter with synchronous reset `rst`; fires on its top
    /// bit.
    CycleCounter { width: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayloadSpec {
    /// XORs the trigger into ciphertext bit `bit`.
    BitFlip { bit: usize },
    /// Key-fed shift register that only moves while triggered.
    ShiftRegister { width: usize },
    /// Multiplexes the final key register onto the ciphertext.
    Leak,
    /// Counter incremented by the trigger, read by nothing else.
    Dos { width: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BenchError {
    #[error("host has no `{0}` bus")]
    MissingBus(String),
    #[error("payload bit {bit} out of range for a {width}-bit ciphertext")]
    BitOutOfRange { bit: usize, width: usize },
    #[error("trigger value {value:#x} does not fit {width} plaintext bits")]
    ValueOutOfRange { value: u64, width: usize },
    #[error("invalid trigger or payload: {0}")]
    Invalid(String),
    #[error("signal `{0}` already exists in the host")]
    NameClash(String),
}

impl TriggerSpec {
    /// Parses `seq:D`, `event:W[:MASK]` or `cycle:W`. Sequence values are
    /// drawn from `seed` for a `width`-bit plaintext.
    pub fn parse(text: &str, width: usize, seed: u64) -> Result<TriggerSpec, BenchError> {
        let bad = || BenchError::Invalid(text.to_string());
        let mut parts = text.split(':');
        let kind = parts.next().ok_or_else(bad)?;
        let num = |s: Option<&str>| -> Result<usize, BenchError> { s.ok_or_else(bad)?.parse().map_err(|_| bad()) };
        let spec = match kind {
            "seq" => {
                let depth = num(parts.next())?;
                TriggerSpec::Sequence {
                    values: sequence_values(depth, width, seed),
                }
            }
            "event" => {
                let w = num(parts.next())?;
                let mask = match parts.next() {
                    None => 1,
                    Some(m) => parse_u64(m).ok_or_else(bad)?,
                };
                TriggerSpec::EventCounter { width: w, mask }
            }
            "cycle" => TriggerSpec::CycleCounter {
                width: num(parts.next())?,
            },
            _ => return Err(bad()),
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        spec.check(width)?;
        Ok(spec)
    }

    fn check(&self, width: usize) -> Result<(), BenchError> {
        let fits = |v: u64| width >= 64 || v >> width == 0;
        match self {
            TriggerSpec::Sequence { values } => {
                if values.is_empty() {
                    return Err(BenchError::Invalid("sequence depth must be at least 1".into()));
                }
                if let Some(&value) = values.iter().find(|&&v| !fits(v)) {
                    return Err(BenchError::ValueOutOfRange { value, width });
                }
            }
            TriggerSpec::EventCounter { width: w, mask } => {
                if *w == 0 {
                    return Err(BenchError::Invalid("counter width must be at least 1".into()));
                }
                if *mask == 0 || !fits(*mask) {
                    return Err(BenchError::ValueOutOfRange { value: *mask, width });
                }
            }
            TriggerSpec::CycleCounter { width: w } if *w == 0 => {
                return Err(BenchError::Invalid("counter width must be at least 1".into()));
            }
            TriggerSpec::CycleCounter { .. } => {}
        }
        Ok(())
    }

    /// Whether the trigger adds the `rst` input.
    pub fn has_reset(&self) -> bool {
        matches!(self, TriggerSpec::CycleCounter { .. })
    }
}

impl fmt::Display for TriggerSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TriggerSpec::Sequence { values } => write!(f, "seq:{}", values.len()),
            TriggerSpec::EventCounter { width, mask } if *mask == 1 => write!(f, "event:{width}"),
            TriggerSpec::EventCounter { width, mask } => write!(f, "event:{width}:{mask:#x}"),
            TriggerSpec::CycleCounter { width } => write!(f, "cycle:{width}"),
        }
    }
}

fn parse_u64(s: &str) -> Option<u64> {
    match s.strip_prefix("0x") {
        Some(hex) => u64::from_str_radix(hex, 16).ok(),
        None => s.parse().ok(),
    }
}

fn sequence_values(depth: usize, width: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_7219);
    let mask = if width >= 64 { !0 } else { (1u64 << width) - 1 };
    (0..depth).map(|_| rng.gen::<u64>() & mask).collect()
}

impl FromStr for PayloadSpec {
    type Err = BenchError;

    /// `flip[:BIT]`, `shift:W`, `leak` or `dos:W`.
    fn from_str(text: &str) -> Result<PayloadSpec, BenchError> {
        let bad = || BenchError::Invalid(text.to_string());
        let (kind, arg) = match text.split_once(':') {
            Some((k, a)) => (k, Some(a.parse::<usize>().map_err(|_| bad())?)),
            None => (text, None),
        };
        let spec = match (kind, arg) {
            ("flip", bit) => PayloadSpec::BitFlip { bit: bit.unwrap_or(0) },
            ("shift", Some(width)) if width > 0 => PayloadSpec::ShiftRegister { width },
            ("leak", None) => PayloadSpec::Leak,
            ("dos", Some(width)) if width > 0 => PayloadSpec::Dos { width },
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}

impl fmt::Display for PayloadSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PayloadSpec::BitFlip { bit } => write!(f, "flip:{bit}"),
            PayloadSpec::ShiftRegister { width } => write!(f, "shift:{width}"),
            PayloadSpec::Leak => f.write_str("leak"),
            PayloadSpec::Dos { width } => write!(f, "dos:{width}"),
        }
    }
}

/// Signals added by an injection, by name.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Injection {
    pub trigger_registers: Vec<String>,
    pub payload_registers: Vec<String>,
    /// Host outputs whose driver was replaced.
    pub modified_outputs: Vec<String>,
    pub reset: Option<String>,
}

fn host_bus(n: &Netlist, name: &str) -> Result<Vec<Sig>, BenchError> {
    let bus = n.find_all(name);
    if bus.is_empty() {
        Err(BenchError::MissingBus(name.to_string()))
    } else {
        Ok(bus)
    }
}

/// Highest-numbered `k<j>` key register bus of a generated host.
fn last_key_bus(n: &Netlist) -> Result<Vec<Sig>, BenchError> {
    (0..)
        .map(|j| n.find_all(&format!("k{j}")))
        .take_while(|b| !b.is_empty())
        .last()
        .ok_or_else(|| BenchError::MissingBus("k0".into()))
}

struct Injector {
    b: NetlistBuilder,
    added: Injection,
}

impl Injector {
    fn fresh_name(&self, base: &str) -> Result<(), BenchError> {
        if self.b.contains(&SignalId::scalar(base)) || self.b.contains(&SignalId::bit(base, 0)) {
            Err(BenchError::NameClash(base.to_string()))
        } else {
            Ok(())
        }
    }

    fn registers(&mut self, base: &str, width: usize, trigger: bool) -> Result<Vec<Sig>, BenchError> {
        self.fresh_name(base)?;
        let regs: Vec<Sig> = (0..width as u32).map(|i| self.b.register(SignalId::bit(base, i))).collect();
        let names = regs.iter().map(|&r| self.b.id(r).to_string());
        if trigger {
            self.added.trigger_registers.extend(names);
        } else {
            self.added.payload_registers.extend(names);
        }
        Ok(regs)
    }

    /// AND over the bus bits selected by `value`'s polarity.
    fn matches(&mut self, bus: &[Sig], value: u64, mask: u64) -> Sig {
        let mut acc: Option<Sig> = None;
        for (i, &s) in bus.iter().enumerate().filter(|(i, _)| *i < 64 && (mask >> i) & 1 == 1) {
            let lit = if (value >> i) & 1 == 1 { s } else { self.b.not(s) };
            acc = Some(match acc {
                None => lit,
                Some(a) => self.b.and(a, lit),
            });
        }
        acc.expect("mask selects at least one bit")
    }

    /// Ripple increment of `regs` by `carry`; `clear` forces zero.
    fn counter(&mut self, regs: &[Sig], mut carry: Sig, clear: Option<Sig>) {
        let keep = clear.map(|c| self.b.not(c));
        for &r in regs {
            let sum = self.b.xor(r, carry);
            let next = match keep {
                Some(k) => self.b.and(k, sum),
                None => sum,
            };
            self.b.set_next(r, next);
            carry = self.b.and(r, carry);
        }
    }

    /// Free-running counter: the least significant bit toggles every cycle.
    fn free_counter(&mut self, regs: &[Sig], clear: Sig) {
        let keep = self.b.not(clear);
        let mut carry = regs[0];
        let toggled = self.b.not(regs[0]);
        let next0 = self.b.and(keep, toggled);
        self.b.set_next(regs[0], next0);
        for &r in &regs[1..] {
            let sum = self.b.xor(r, carry);
            let next = self.b.and(keep, sum);
            self.b.set_next(r, next);
            carry = self.b.and(r, carry);
        }
    }

    fn trigger(&mut self, n: &Netlist, spec: &TriggerSpec) -> Result<Sig, BenchError> {
        let pt = host_bus(n, "pt")?;
        let fire = match spec {
            TriggerSpec::Sequence { values } => {
                let flags = self.registers("ht_seq", values.len(), true)?;
                let full = if pt.len() >= 64 { !0 } else { (1u64 << pt.len()) - 1 };
                for (i, &v) in values.iter().enumerate() {
                    let m = self.matches(&pt, v, full);
                    let next = if i == 0 { m } else { self.b.and(flags[i - 1], m) };
                    self.b.set_next(flags[i], next);
                }
                let sticky = self.registers("ht_armed", 1, true)?[0];
                let next = self.b.or(sticky, flags[values.len() - 1]);
                self.b.set_next(sticky, next);
                sticky
            }
            TriggerSpec::EventCounter { width, mask } => {
                let regs = self.registers("ht_cnt", *width, true)?;
                let event = self.matches(&pt, !0, *mask);
                self.counter(&regs, event, None);
                regs[width - 1]
            }
            TriggerSpec::CycleCounter { width } => {
                self.fresh_name(RESET_INPUT)?;
                let rst = self.b.input(SignalId::scalar(RESET_INPUT));
                self.added.reset = Some(RESET_INPUT.to_string());
                let regs = self.registers("ht_cnt", *width, true)?;
                self.free_counter(&regs, rst);
                regs[width - 1]
            }
        };
        self.fresh_name(TRIGGER_WIRE)?;
        Ok(self.b.alias(SignalId::scalar(TRIGGER_WIRE), fire))
    }

    fn redrive_output(&mut self, n: &Netlist, out: Sig, gate: Gate) {
        let g = self.b.gate(gate);
        self.b.redrive(out, Driver::Alias(g));
        self.added.modified_outputs.push(n.id(out).to_string());
    }

    fn payload(&mut self, n: &Netlist, spec: &PayloadSpec, trig: Sig) -> Result<(), BenchError> {
        match spec {
            PayloadSpec::BitFlip { bit } => {
                let ct = host_bus(n, "ct")?;
                let &out = ct.get(*bit).ok_or(BenchError::BitOutOfRange { bit: *bit, width: ct.len() })?;
                let src = alias_source(n, out);
                self.redrive_output(n, out, Gate::Xor(src, trig));
            }
            PayloadSpec::ShiftRegister { width } => {
                let key = host_bus(n, "key")?;
                let pt = host_bus(n, "pt")?;
                let sr = self.registers("ht_sr", *width, false)?;
                let feed = self.b.xor(key[0], pt[0]);
                for i in 0..*width {
                    let shifted = if i == 0 { feed } else { sr[i - 1] };
                    let next = self.b.mux(trig, shifted, sr[i]);
                    self.b.set_next(sr[i], next);
                }
            }
            PayloadSpec::Leak => {
                let ct = host_bus(n, "ct")?;
                let keys = last_key_bus(n)?;
                for (i, &out) in ct.iter().enumerate() {
                    let src = alias_source(n, out);
                    self.redrive_output(n, out, Gate::Mux(trig, keys[i % keys.len()], src));
                }
            }
            PayloadSpec::Dos { width } => {
                let regs = self.registers("ht_dos", *width, false)?;
                self.counter(&regs, trig, None);
            }
        }
        Ok(())
    }
}

fn alias_source(n: &Netlist, out: Sig) -> Sig {
    match n.driver(out) {
        Driver::Alias(src) => *src,
        _ => out,
    }
}

/// Adds trigger logic and a payload gated by it to a generated host.
pub fn inject_trojan(host: &Netlist, t: &TriggerSpec, p: &PayloadSpec) -> Result<Netlist, BenchError> {
    Ok(inject_with_report(host, t, p)?.0)
}

/// Like [`inject_trojan`], also naming the added state.
pub fn inject_with_report(
    host: &Netlist,
    t: &TriggerSpec,
    p: &PayloadSpec,
) -> Result<(Netlist, Injection), BenchError> {
    t.check(host_bus(host, "pt")?.len())?;
    let mut inj = Injector {
        b: NetlistBuilder::from_netlist(host),
        added: Injection::default(),
    };
    let trig = inj.trigger(host, t)?;
    inj.payload(host, p, trig)?;
    let Injector { b, added } = inj;
    let n = b.build().map_err(|e| BenchError::Invalid(e.to_string()))?;
    Ok((n, added))
}

/// Copy of a Trojaned netlist whose trigger wire is tied to 0.
pub fn pin_trigger_inactive(n: &Netlist) -> Option<Netlist> {
    let t = n.find(TRIGGER_WIRE)?;
    Some(n.with_driver(t, Driver::Gate(Gate::Const(false))))
}
