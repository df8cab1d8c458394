// SPDX-License-Identifier: Apache-2.0

//! Minimal value-change-dump writer.

use std::fmt::Write as _;

use crate::netlist::SignalId;

pub struct VcdVar {
    pub id: SignalId,
    /// One value per time step.
    pub values: Vec<bool>,
}

pub struct VcdScope {
    pub name: String,
    pub vars: Vec<VcdVar>,
}

fn code(mut k: usize) -> String {
    // printable identifier characters `!` .. `~`
    let mut s = String::new();
    loop {
        s.push((b'!' + (k % 94) as u8) as char);
        k /= 94;
        if k == 0 {
            return s;
        }
        k -= 1;
    }
}

/// Writes `scopes` as sibling modules under `top`, one time unit per step.
pub fn write_vcd(top: &str, scopes: &[VcdScope]) -> String {
    let mut out = String::new();
    out.push_str("$timescale 1ns $end\n");
    writeln!(out, "$scope module {top} $end").unwrap();
    let mut codes: Vec<Vec<String>> = Vec::new();
    let mut next = 0;
    for scope in scopes {
        writeln!(out, "$scope module {} $end", scope.name).unwrap();
        let mut cs = Vec::new();
        for var in &scope.vars {
            let c = code(next);
            next += 1;
            match var.id.bit {
                Some(b) => writeln!(out, "$var wire 1 {c} {} [{b}] $end", var.id.name),
                None => writeln!(out, "$var wire 1 {c} {} $end", var.id.name),
            }
            .unwrap();
            cs.push(c);
        }
        out.push_str("$upscope $end\n");
        codes.push(cs);
    }
    out.push_str("$upscope $end\n$enddefinitions $end\n");
    let steps = scopes
        .iter()
        .flat_map(|s| s.vars.iter().map(|v| v.values.len()))
        .max()
        .unwrap_or(0);
    for t in 0..steps {
        let mut changes = String::new();
        for (scope, cs) in scopes.iter().zip(&codes) {
            for (var, c) in scope.vars.iter().zip(cs) {
                let Some(&v) = var.values.get(t) else { continue };
                if t == 0 || var.values[t - 1] != v {
                    writeln!(changes, "{}{c}", u8::from(v)).unwrap();
                }
            }
        }
        if t == 0 {
            writeln!(out, "#0\n$dumpvars\n{changes}$end").unwrap();
        } else if !changes.is_empty() {
            write!(out, "#{t}\n{changes}").unwrap();
        }
    }
    writeln!(out, "#{steps}").unwrap();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identifier_codes_are_unique() {
        let codes: std::collections::HashSet<String> = (0..20_000).map(code).collect();
        assert_eq!(codes.len(), 20_000);
        assert_eq!(code(0), "!");
        assert_eq!(code(93), "~");
    }

    #[test]
    fn layout() {
        let vcd = write_vcd(
            "miter",
            &[
                VcdScope {
                    name: "instance1".into(),
                    vars: vec![VcdVar {
                        id: SignalId::bit("a", 2),
                        values: vec![false, true, true],
                    }],
                },
                VcdScope {
                    name: "instance2".into(),
                    vars: vec![VcdVar {
                        id: SignalId::scalar("a"),
                        values: vec![true, true, false],
                    }],
                },
            ],
        );
        assert!(vcd.contains("$var wire 1 ! a [2] $end"));
        assert!(vcd.contains("$scope module instance2 $end"));
        assert!(vcd.contains("#1\n1!\n#2\n0\"\n#3\n"));
    }
}
