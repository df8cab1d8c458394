// SPDX-License-Identifier: Apache-2.0

//! Stimulus files for `sim`.
//!
//! One line per clock cycle, holding whitespace-separated `name=value`
//! pairs. A bus name takes an integer (`pt=0x5`, `pt=0b0101`, `pt=5`) whose
//! bit `i` drives `pt.i`. Unnamed inputs are 0. `#` starts a comment;
//! blank lines count as an all-zero cycle.

use anyhow::{anyhow, bail, Result};
use miterscan::netlist::{InputAssignment, Netlist, OutputAssignment};

fn parse_value(text: &str) -> Option<u128> {
    let t = text.replace('_', "");
    if let Some(h) = t.strip_prefix("0x") {
        u128::from_str_radix(h, 16).ok()
    } else if let Some(b) = t.strip_prefix("0b") {
        u128::from_str_radix(b, 2).ok()
    } else {
        t.parse().ok()
    }
}

pub fn parse(n: &Netlist, text: &str) -> Result<Vec<InputAssignment>> {
    let mut out = Vec::new();
    for (line_no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        let mut a = InputAssignment::zeros(n);
        for tok in line.split_whitespace() {
            let (name, value) = tok
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected name=value, found `{tok}`", line_no + 1))?;
            let v = parse_value(value).ok_or_else(|| anyhow!("line {}: bad value `{value}`", line_no + 1))?;
            let bits = n.find_all(name);
            if bits.is_empty() || bits.iter().any(|&s| !n.is_input(s)) {
                bail!("line {}: `{name}` is not an input", line_no + 1);
            }
            if bits.len() < 128 && v >> bits.len() != 0 {
                bail!("line {}: value {value} does not fit {} bits", line_no + 1, bits.len());
            }
            for (i, &s) in bits.iter().enumerate() {
                let pos = n.input_position(s).expect("checked above");
                a.0[pos] = i < 128 && (v >> i) & 1 == 1;
            }
        }
        out.push(a);
    }
    Ok(out)
}

/// Outputs grouped by bus, buses printed as hex.
pub fn format_outputs(n: &Netlist, o: &OutputAssignment) -> String {
    let mut groups: Vec<(String, Vec<(u32, bool)>)> = Vec::new();
    for (k, &s) in n.outputs().iter().enumerate() {
        let id = n.id(s);
        let bit = (id.bit.unwrap_or(0), o.0[k]);
        match groups.iter_mut().find(|(name, _)| *name == id.name) {
            Some((_, bits)) if id.bit.is_some() => bits.push(bit),
            _ => groups.push((id.name.clone(), vec![bit])),
        }
    }
    groups
        .into_iter()
        .map(|(name, bits)| {
            if n.find(&name).is_some() {
                format!("{name}={}", u8::from(bits[0].1))
            } else {
                let v = bits.iter().fold(0u128, |acc, &(i, b)| acc | (u128::from(b) << i));
                let digits = bits.len().div_ceil(4);
                format!("{name}=0x{v:0digits$x}")
            }
        })
        .collect::<Vec<_>>()
        .join(" ")
}

