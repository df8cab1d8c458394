// SPDX-License-Identifier: Apache-2.0

//! ASCII AIGER (`aag`) import.
//!
//! AND nodes become `AND` gates named `a<var>`, complemented literals become
//! `NOT` gates named `n<var>`, latches become registers. Declared latch reset
//! values are dropped with a warning since every proof starts from a
//! symbolic state. Bad-state, constraint, justice and fairness sections are
//! rejected.

use std::collections::{HashMap, HashSet};

use super::builder::NetlistBuilder;
use super::{Driver, Gate, Netlist, Sig, SignalId};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AigerError {
    #[error("malformed header: {0}")]
    Header(String),
    #[error("unsupported AIGER feature: {0}")]
    Unsupported(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

#[derive(Debug, Clone)]
pub struct AigerImport {
    pub netlist: Netlist,
    pub warnings: Vec<String>,
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_fields(&mut self, what: &str, count: std::ops::RangeInclusive<usize>) -> Result<(usize, Vec<u64>), AigerError> {
        let (idx, line) = self.iter.next().ok_or_else(|| AigerError::Syntax {
            line: self.last + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })?;
        self.last = idx + 1;
        let fields: Result<Vec<u64>, _> = line.split_whitespace().map(str::parse::<u64>).collect();
        let fields = fields.map_err(|_| AigerError::Syntax {
            line: idx + 1,
            msg: format!("expected {what}, found `{line}`"),
        })?;
        if !count.contains(&fields.len()) {
            return Err(AigerError::Syntax {
                line: idx + 1,
                msg: format!("expected {what}, found `{line}`"),
            });
        }
        Ok((idx + 1, fields))
    }
}

/// Turns an AIGER symbol into a signal name: `x[3]` becomes bit 3 of `x`,
/// other characters outside the identifier alphabet become `_`.
fn symbol_id(sym: &str) -> SignalId {
    if let Some(stripped) = sym.strip_suffix(']') {
        if let Some((base, bit)) = stripped.rsplit_once('[') {
            if let Ok(b) = bit.parse::<u32>() {
                return SignalId::bit(sanitize(base), b);
            }
        }
    }
    SignalId::scalar(sanitize(sym))
}

fn sanitize(s: &str) -> String {
    let mut out: String = s
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '$' { c } else { '_' })
        .collect();
    if out.is_empty() || out.starts_with(|c: char| c.is_ascii_digit()) {
        out.insert(0, '_');
    }
    out
}

/// Default internal name, or a fresh one if a symbol already took it.
fn internal(b: &mut NetlistBuilder, taken: &HashSet<SignalId>, want: String) -> SignalId {
    let id = SignalId::scalar(want);
    if taken.contains(&id) || b.contains(&id) {
        b.fresh_id()
    } else {
        id
    }
}

pub fn import_aiger(text: &str) -> Result<AigerImport, AigerError> {
    let mut lines = Lines {
        iter: text.lines().enumerate(),
        last: 0,
    };
    let (_, header) = lines
        .iter
        .next()
        .ok_or_else(|| AigerError::Header("empty input".into()))?;
    lines.last = 1;
    let mut parts = header.split_whitespace();
    match parts.next() {
        Some("aag") => {}
        Some("aig") => return Err(AigerError::Unsupported("binary `aig` format".into())),
        _ => return Err(AigerError::Header(format!("expected `aag`, found `{header}`"))),
    }
    let nums: Result<Vec<u64>, _> = parts.map(str::parse::<u64>).collect();
    let nums = nums.map_err(|_| AigerError::Header(format!("non-numeric field in `{header}`")))?;
    if nums.len() < 5 || nums.len() > 9 {
        return Err(AigerError::Header(format!("expected `aag M I L O A [B C J F]`, found `{header}`")));
    }
    let (max_var, ni, nl, no, na) = (nums[0], nums[1], nums[2], nums[3], nums[4]);
    for (name, &count) in ["bad-state", "invariant-constraint", "justice", "fairness"]
        .iter()
        .zip(&nums[5..])
    {
        if count > 0 {
            return Err(AigerError::Unsupported(format!("{count} {name} section(s)")));
        }
    }
    if ni + nl + na > max_var {
        return Err(AigerError::Header(format!(
            "M = {max_var} is smaller than I + L + A = {}",
            ni + nl + na
        )));
    }

    let mut warnings = Vec::new();
    let mut defined: HashSet<u64> = HashSet::new();
    let mut define = |line: usize, lit: u64| -> Result<u64, AigerError> {
        if lit & 1 == 1 || lit < 2 || lit / 2 > max_var {
            return Err(AigerError::Syntax {
                line,
                msg: format!("`{lit}` is not a definable literal"),
            });
        }
        if !defined.insert(lit / 2) {
            return Err(AigerError::Syntax {
                line,
                msg: format!("variable {} defined twice", lit / 2),
            });
        }
        Ok(lit / 2)
    };
    let check_ref = |line: usize, lit: u64| -> Result<u64, AigerError> {
        if lit / 2 > max_var {
            return Err(AigerError::Syntax {
                line,
                msg: format!("literal {lit} exceeds M = {max_var}"),
            });
        }
        Ok(lit)
    };

    let mut input_vars = Vec::new();
    for _ in 0..ni {
        let (ln, f) = lines.next_fields("an input literal", 1..=1)?;
        input_vars.push(define(ln, f[0])?);
    }
    let mut latches = Vec::new();
    for k in 0..nl {
        let (ln, f) = lines.next_fields("a latch line", 2..=3)?;
        let var = define(ln, f[0])?;
        let next = check_ref(ln, f[1])?;
        if let Some(&reset) = f.get(2) {
            if reset != f[0] {
                warnings.push(format!("latch {k}: reset value {reset} ignored (symbolic start state)"));
            }
        }
        latches.push((var, next));
    }
    let mut outputs = Vec::new();
    for _ in 0..no {
        let (ln, f) = lines.next_fields("an output literal", 1..=1)?;
        outputs.push(check_ref(ln, f[0])?);
    }
    let mut ands = Vec::new();
    for _ in 0..na {
        let (ln, f) = lines.next_fields("an AND line", 3..=3)?;
        let var = define(ln, f[0])?;
        ands.push((ln, var, check_ref(ln, f[1])?, check_ref(ln, f[2])?));
    }

    // symbol table, then optional comment section
    let mut symbols: HashMap<(char, u64), String> = HashMap::new();
    for (idx, line) in lines.iter.by_ref() {
        if line == "c" || line.starts_with("c ") {
            break;
        }
        let Some((tag, name)) = line.split_once(' ') else {
            if line.trim().is_empty() {
                continue;
            }
            return Err(AigerError::Syntax {
                line: idx + 1,
                msg: format!("bad symbol line `{line}`"),
            });
        };
        let mut chars = tag.chars();
        let kind = chars.next().unwrap_or(' ');
        let pos: Option<u64> = chars.as_str().parse().ok();
        match (kind, pos) {
            ('i', Some(p)) | ('l', Some(p)) | ('o', Some(p)) => {
                symbols.insert((kind, p), name.to_string());
            }
            ('b' | 'c' | 'j' | 'f', Some(_)) => {}
            _ => {
                return Err(AigerError::Syntax {
                    line: idx + 1,
                    msg: format!("bad symbol line `{line}`"),
                })
            }
        }
    }

    let mut b = NetlistBuilder::new("aiger");
    let mut taken: HashSet<SignalId> = HashSet::new();
    let mut pick = |kind: char, pos: u64, default: String| -> SignalId {
        if let Some(sym) = symbols.get(&(kind, pos)) {
            let id = symbol_id(sym);
            if taken.insert(id.clone()) {
                return id;
            }
        }
        let id = SignalId::scalar(default);
        taken.insert(id.clone());
        id
    };
    let input_ids: Vec<SignalId> = (0..ni).map(|k| pick('i', k, format!("i{k}"))).collect();
    let latch_ids: Vec<SignalId> = (0..nl).map(|k| pick('l', k, format!("l{k}"))).collect();
    let output_ids: Vec<SignalId> = (0..no).map(|k| pick('o', k, format!("o{k}"))).collect();

    let mut var_sig: HashMap<u64, Sig> = HashMap::new();
    for (&v, id) in input_vars.iter().zip(&input_ids) {
        var_sig.insert(v, b.input(id.clone()));
    }
    for (&(v, _), id) in latches.iter().zip(&latch_ids) {
        var_sig.insert(v, b.register(id.clone()));
    }
    let mut and_sigs = Vec::with_capacity(ands.len());
    for &(_, v, _, _) in &ands {
        let id = internal(&mut b, &taken, format!("a{v}"));
        let sig = b.named_gate(id, Gate::Const(false));
        var_sig.insert(v, sig);
        and_sigs.push(sig);
    }

    let mut neg: HashMap<u64, Sig> = HashMap::new();
    let mut consts: [Option<Sig>; 2] = [None, None];
    let mut lit_sig = |b: &mut NetlistBuilder, line: usize, lit: u64| -> Result<Sig, AigerError> {
        if lit < 2 {
            let value = lit == 1;
            return Ok(*consts[lit as usize].get_or_insert_with(|| {
                let id = internal(b, &taken, format!("const{}", lit));
                b.named_gate(id, Gate::Const(value))
            }));
        }
        let base = *var_sig.get(&(lit / 2)).ok_or_else(|| AigerError::Syntax {
            line,
            msg: format!("literal {lit} refers to an undefined variable"),
        })?;
        if lit & 1 == 0 {
            return Ok(base);
        }
        Ok(*neg.entry(lit / 2).or_insert_with(|| {
            let id = internal(b, &taken, format!("n{}", lit / 2));
            b.named_gate(id, Gate::Not(base))
        }))
    };

    for (&(ln, _, r0, r1), &sig) in ands.iter().zip(&and_sigs) {
        let a = lit_sig(&mut b, ln, r0)?;
        let c = lit_sig(&mut b, ln, r1)?;
        b.redrive(sig, Driver::Gate(Gate::And(a, c)));
    }
    for (k, &(_, next)) in latches.iter().enumerate() {
        let n = lit_sig(&mut b, 0, next)?;
        b.set_next(Sig::new(ni as usize + k), n);
    }
    for (&lit, id) in outputs.iter().zip(&output_ids) {
        let src = lit_sig(&mut b, 0, lit)?;
        b.output(id.clone(), src);
    }

    let netlist = b.build().map_err(|e| AigerError::Syntax {
        line: 0,
        msg: e.to_string(),
    })?;
    Ok(AigerImport { netlist, warnings })
}
