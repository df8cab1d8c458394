// SPDX-License-Identifier: Apache-2.0

//! The line-oriented SNL text format.
//!
//! ```text
//! module chain
//! input a
//! reg s0 next=a
//! reg s1 next=s0
//! output y = s1
//! ```
//!
//! `ID[W]` declares a bus of `W` bits named `ID.0` .. `ID.W-1`; `ID.N`
//! declares (or references) a single bit. Inside a bus declaration a bare bus
//! reference is applied bit by bit and a scalar reference is broadcast.
//! Nested expressions are flattened into fresh `$k` wires.

use std::collections::{BTreeMap, HashMap};
use std::fmt::{self, Write as _};

use super::builder::NetlistBuilder;
use super::{Driver, Gate, Netlist, Sig, SignalId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax(String),
    Duplicate(String),
    Undefined(String),
    Arity { op: &'static str, expected: usize, found: usize },
    Width(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: ", self.line, self.column)?;
        match &self.kind {
            ParseErrorKind::Syntax(m) => write!(f, "syntax error: {m}"),
            ParseErrorKind::Duplicate(s) => write!(f, "duplicate declaration of `{s}`"),
            ParseErrorKind::Undefined(s) => write!(f, "undefined signal `{s}`"),
            ParseErrorKind::Arity { op, expected, found } => {
                write!(f, "{op} takes {expected} operand(s), found {found}")
            }
            ParseErrorKind::Width(m) => write!(f, "width mismatch: {m}"),
        }
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_' || c == '$')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '$')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Pos {
    line: usize,
    column: usize,
}

impl Pos {
    fn err(self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            line: self.line,
            column: self.column,
            kind,
        }
    }

    fn syntax(self, msg: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::Syntax(msg.into()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u32),
    Punct(char),
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let pos = Pos {
            line: line_no,
            column: i + 1,
        };
        if c == '#' {
            break;
        }
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == '_' || c == '$' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'$') {
                i += 1;
            }
            out.push((Tok::Ident(line[start..i].to_string()), pos));
        } else if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = line[start..i]
                .parse::<u32>()
                .map_err(|_| pos.syntax(format!("number `{}` is too large", &line[start..i])))?;
            out.push((Tok::Num(n), pos));
        } else if "[].(),=".contains(c) {
            out.push((Tok::Punct(c), pos));
            i += 1;
        } else {
            return Err(pos.syntax(format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Scalar,
    Bit(u32),
    Bus(u32),
}

#[derive(Debug, Clone)]
struct Decl {
    name: String,
    shape: Shape,
    pos: Pos,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Op {
    And,
    Or,
    Xor,
    Not,
    Mux,
}

impl Op {
    fn from_keyword(s: &str) -> Option<Op> {
        Some(match s {
            "AND" => Op::And,
            "OR" => Op::Or,
            "XOR" => Op::Xor,
            "NOT" => Op::Not,
            "MUX" => Op::Mux,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Op::And => "AND",
            Op::Or => "OR",
            Op::Xor => "XOR",
            Op::Not => "NOT",
            Op::Mux => "MUX",
        }
    }

    fn arity(self) -> usize {
        match self {
            Op::Not => 1,
            Op::Mux => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone)]
enum Expr {
    Ref { name: String, bit: Option<u32>, pos: Pos },
    Const(bool),
    Op { op: Op, args: Vec<Expr> },
}

#[derive(Debug, Clone)]
enum Stmt {
    Module(String, Pos),
    Input(Decl),
    Reg(Decl, Expr),
    Wire(Decl, Expr),
    Output(Decl, Expr),
}

const KEYWORDS: [&str; 12] = [
    "module", "input", "reg", "wire", "output", "AND", "OR", "XOR", "NOT", "MUX", "CONST0", "CONST1",
];

struct Cursor<'a> {
    toks: &'a [(Tok, Pos)],
    at: usize,
    eol: Pos,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<&'a Tok> {
        self.toks.get(self.at).map(|(t, _)| t)
    }

    fn pos(&self) -> Pos {
        self.toks.get(self.at).map(|(_, p)| *p).unwrap_or(self.eol)
    }

    fn next(&mut self) -> Option<(&'a Tok, Pos)> {
        let t = self.toks.get(self.at)?;
        self.at += 1;
        Some((&t.0, t.1))
    }

    fn expect_punct(&mut self, c: char) -> Result<(), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some((Tok::Punct(p), _)) if *p == c => Ok(()),
            Some((t, _)) => Err(pos.syntax(format!("expected `{c}`, found {}", describe(t)))),
            None => Err(pos.syntax(format!("expected `{c}` before end of line"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<(String, Pos), ParseError> {
        let pos = self.pos();
        match self.next() {
            Some((Tok::Ident(s), p)) => Ok((s.clone(), p)),
            Some((t, _)) => Err(pos.syntax(format!("expected {what}, found {}", describe(t)))),
            None => Err(pos.syntax(format!("expected {what} before end of line"))),
        }
    }

    fn number(&mut self) -> Result<u32, ParseError> {
        let pos = self.pos();
        match self.next() {
            Some((Tok::Num(n), _)) => Ok(*n),
            _ => Err(pos.syntax("expected a number")),
        }
    }

    fn done(&self) -> Result<(), ParseError> {
        match self.toks.get(self.at) {
            None => Ok(()),
            Some((t, p)) => Err(p.syntax(format!("unexpected {} after statement", describe(t)))),
        }
    }

    fn signal_name(&mut self) -> Result<(String, Pos), ParseError> {
        let (name, pos) = self.ident("a signal name")?;
        if KEYWORDS.contains(&name.as_str()) {
            return Err(pos.syntax(format!("`{name}` is a keyword")));
        }
        Ok((name, pos))
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let (name, pos) = self.signal_name()?;
        let shape = match self.peek() {
            Some(Tok::Punct('[')) => {
                self.next();
                let wpos = self.pos();
                let w = self.number()?;
                if w == 0 {
                    return Err(wpos.err(ParseErrorKind::Width("bus width must be at least 1".into())));
                }
                self.expect_punct(']')?;
                Shape::Bus(w)
            }
            Some(Tok::Punct('.')) => {
                self.next();
                Shape::Bit(self.number()?)
            }
            _ => Shape::Scalar,
        };
        Ok(Decl { name, shape, pos })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        let (tok, _) = self
            .next()
            .ok_or_else(|| pos.syntax("expected an expression before end of line"))?;
        let word = match tok {
            Tok::Ident(s) => s.as_str(),
            t => return Err(pos.syntax(format!("expected an expression, found {}", describe(t)))),
        };
        match word {
            "CONST0" => return Ok(Expr::Const(false)),
            "CONST1" => return Ok(Expr::Const(true)),
            _ => {}
        }
        if let Some(op) = Op::from_keyword(word) {
            self.expect_punct('(')?;
            let mut args = Vec::new();
            if self.peek() != Some(&Tok::Punct(')')) {
                loop {
                    args.push(self.expr()?);
                    match self.peek() {
                        Some(Tok::Punct(',')) => {
                            self.next();
                        }
                        _ => break,
                    }
                }
            }
            self.expect_punct(')')?;
            if args.len() != op.arity() {
                return Err(pos.err(ParseErrorKind::Arity {
                    op: op.name(),
                    expected: op.arity(),
                    found: args.len(),
                }));
            }
            return Ok(Expr::Op { op, args });
        }
        if KEYWORDS.contains(&word) {
            return Err(pos.syntax(format!("`{word}` cannot be used as a signal")));
        }
        let bit = if self.peek() == Some(&Tok::Punct('.')) {
            self.next();
            Some(self.number()?)
        } else {
            None
        };
        Ok(Expr::Ref {
            name: word.to_string(),
            bit,
            pos,
        })
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Num(n) => format!("`{n}`"),
        Tok::Punct(c) => format!("`{c}`"),
    }
}

fn parse_stmt(toks: &[(Tok, Pos)], eol: Pos) -> Result<Stmt, ParseError> {
    let mut c = Cursor { toks, at: 0, eol };
    let (kw, kw_pos) = c.ident("a statement keyword")?;
    let stmt = match kw.as_str() {
        "module" => {
            let (name, _) = c.ident("a module name")?;
            Stmt::Module(name, kw_pos)
        }
        "input" => Stmt::Input(c.decl()?),
        "reg" => {
            let d = c.decl()?;
            let (kw, p) = c.ident("`next=`")?;
            if kw != "next" {
                return Err(p.syntax(format!("expected `next=`, found `{kw}`")));
            }
            c.expect_punct('=')?;
            Stmt::Reg(d, c.expr()?)
        }
        "wire" => {
            let d = c.decl()?;
            c.expect_punct('=')?;
            Stmt::Wire(d, c.expr()?)
        }
        "output" => {
            let d = c.decl()?;
            c.expect_punct('=')?;
            let pos = c.pos();
            let e = c.expr()?;
            if !matches!(e, Expr::Ref { .. }) {
                return Err(pos.syntax("an output must name a signal"));
            }
            Stmt::Output(d, e)
        }
        other => return Err(kw_pos.syntax(format!("unknown statement `{other}`"))),
    };
    c.done()?;
    Ok(stmt)
}

#[derive(Default)]
struct NameEntry {
    scalar: Option<Sig>,
    bits: BTreeMap<u32, Sig>,
}

struct Lowering {
    b: NetlistBuilder,
    names: HashMap<String, NameEntry>,
}

impl Lowering {
    fn declare(&mut self, d: &Decl, mut make: impl FnMut(&mut NetlistBuilder, SignalId) -> Sig) -> Result<Vec<Sig>, ParseError> {
        let ids: Vec<SignalId> = match d.shape {
            Shape::Scalar => vec![SignalId::scalar(&d.name)],
            Shape::Bit(b) => vec![SignalId::bit(&d.name, b)],
            Shape::Bus(w) => (0..w).map(|i| SignalId::bit(&d.name, i)).collect(),
        };
        let entry = self.names.entry(d.name.clone()).or_default();
        let clash = match d.shape {
            Shape::Scalar => entry.scalar.is_some() || !entry.bits.is_empty(),
            _ => entry.scalar.is_some() || ids.iter().any(|id| entry.bits.contains_key(&id.bit.unwrap())),
        };
        if clash {
            return Err(d.pos.err(ParseErrorKind::Duplicate(d.name.clone())));
        }
        let mut sigs = Vec::with_capacity(ids.len());
        for id in ids {
            let bit = id.bit;
            let sig = make(&mut self.b, id);
            let entry = self.names.get_mut(&d.name).unwrap();
            match bit {
                Some(b) => {
                    entry.bits.insert(b, sig);
                }
                None => entry.scalar = Some(sig),
            }
            sigs.push(sig);
        }
        Ok(sigs)
    }

    /// `ctx` is `(bit, width)` inside a bus declaration.
    fn resolve(&self, name: &str, bit: Option<u32>, ctx: Option<(u32, u32)>, pos: Pos) -> Result<Sig, ParseError> {
        let undefined = |s: String| pos.err(ParseErrorKind::Undefined(s));
        let entry = self.names.get(name).ok_or_else(|| undefined(name.to_string()))?;
        if let Some(b) = bit {
            return entry
                .bits
                .get(&b)
                .copied()
                .ok_or_else(|| undefined(format!("{name}.{b}")));
        }
        if let Some(s) = entry.scalar {
            return Ok(s);
        }
        let width = entry.bits.len() as u32;
        match ctx {
            Some((j, w)) if w == width => entry
                .bits
                .get(&j)
                .copied()
                .ok_or_else(|| undefined(format!("{name}.{j}"))),
            Some((_, w)) => Err(pos.err(ParseErrorKind::Width(format!(
                "`{name}` has {width} bits but the declaration has {w}"
            )))),
            None => Err(pos.err(ParseErrorKind::Width(format!(
                "`{name}` is a {width}-bit bus; select a bit with `{name}.N`"
            )))),
        }
    }

    /// Returns a signal computing `e`, creating fresh wires as needed.
    fn lower(&mut self, e: &Expr, ctx: Option<(u32, u32)>) -> Result<Sig, ParseError> {
        match e {
            Expr::Ref { name, bit, pos } => self.resolve(name, *bit, ctx, *pos),
            _ => {
                let g = self.gate(e, ctx)?;
                Ok(self.b.gate(g))
            }
        }
    }

    fn gate(&mut self, e: &Expr, ctx: Option<(u32, u32)>) -> Result<Gate, ParseError> {
        Ok(match e {
            Expr::Const(v) => Gate::Const(*v),
            Expr::Op { op, args } => {
                let mut ops = Vec::with_capacity(args.len());
                for a in args {
                    ops.push(self.lower(a, ctx)?);
                }
                match op {
                    Op::And => Gate::And(ops[0], ops[1]),
                    Op::Or => Gate::Or(ops[0], ops[1]),
                    Op::Xor => Gate::Xor(ops[0], ops[1]),
                    Op::Not => Gate::Not(ops[0]),
                    Op::Mux => Gate::Mux(ops[0], ops[1], ops[2]),
                }
            }
            Expr::Ref { .. } => unreachable!("references are not gates"),
        })
    }
}

fn bit_contexts(d: &Decl, n: usize) -> Vec<Option<(u32, u32)>> {
    match d.shape {
        Shape::Bus(w) => (0..w).map(|j| Some((j, w))).collect(),
        _ => vec![None; n],
    }
}

pub fn parse_netlist(text: &str) -> Result<Netlist, ParseError> {
    let mut stmts = Vec::new();
    let mut module: Option<String> = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let toks = tokenize(line, line_no)?;
        if toks.is_empty() {
            continue;
        }
        let eol = Pos {
            line: line_no,
            column: line.len() + 1,
        };
        match parse_stmt(&toks, eol)? {
            Stmt::Module(name, pos) => {
                if module.is_some() {
                    return Err(pos.syntax("more than one `module` line"));
                }
                module = Some(name);
            }
            s => stmts.push(s),
        }
    }

    // `output y = bus` declares one output bit per bus bit
    let mut widths: HashMap<&str, u32> = HashMap::new();
    for s in &stmts {
        if let Stmt::Input(d) | Stmt::Reg(d, _) | Stmt::Wire(d, _) = s {
            match d.shape {
                Shape::Bus(w) => *widths.entry(&d.name).or_default() += w,
                Shape::Bit(_) => *widths.entry(&d.name).or_default() += 1,
                Shape::Scalar => {}
            }
        }
    }
    let widths: HashMap<String, u32> = widths.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
    for s in &mut stmts {
        if let Stmt::Output(d, Expr::Ref { name, bit: None, .. }) = s {
            if let (Shape::Scalar, Some(&w)) = (d.shape, widths.get(name.as_str())) {
                d.shape = Shape::Bus(w);
            }
        }
    }

    // declarations first, so expressions may reference later lines
    let mut low = Lowering {
        b: NetlistBuilder::new(module.unwrap_or_else(|| "top".to_string())),
        names: HashMap::new(),
    };
    let mut declared = Vec::with_capacity(stmts.len());
    for s in &stmts {
        let sigs = match s {
            Stmt::Input(d) => low.declare(d, |b, id| b.input(id))?,
            Stmt::Reg(d, _) => low.declare(d, |b, id| b.register(id))?,
            Stmt::Wire(d, _) => low.declare(d, |b, id| b.named_gate(id, Gate::Const(false)))?,
            Stmt::Output(d, _) => low.declare(d, |b, id| b.output(id, Sig(0)))?,
            Stmt::Module(..) => unreachable!(),
        };
        declared.push(sigs);
    }

    for (s, sigs) in stmts.iter().zip(&declared) {
        match s {
            Stmt::Input(_) | Stmt::Module(..) => {}
            Stmt::Reg(d, e) => {
                for (&sig, ctx) in sigs.iter().zip(bit_contexts(d, sigs.len())) {
                    let next = low.lower(e, ctx)?;
                    low.b.set_next(sig, next);
                }
            }
            Stmt::Wire(d, e) | Stmt::Output(d, e) => {
                for (&sig, ctx) in sigs.iter().zip(bit_contexts(d, sigs.len())) {
                    let driver = match e {
                        Expr::Ref { name, bit, pos } => Driver::Alias(low.resolve(name, *bit, ctx, *pos)?),
                        _ => Driver::Gate(low.gate(e, ctx)?),
                    };
                    low.b.redrive(sig, driver);
                }
            }
        }
    }
    Ok(low.b.build().expect("parser wires every register and checks duplicates"))
}

pub(crate) fn print_netlist(n: &Netlist) -> String {
    let mut out = String::new();
    writeln!(out, "module {}", n.name()).unwrap();
    for s in n.signals() {
        let name = |x: Sig| n.id(x).to_string();
        match &s.driver {
            Driver::Input => writeln!(out, "input {}", s.id),
            Driver::Register { next } => writeln!(out, "reg {} next={}", s.id, name(*next)),
            Driver::Alias(src) if s.is_output => writeln!(out, "output {} = {}", s.id, name(*src)),
            Driver::Alias(src) => writeln!(out, "wire {} = {}", s.id, name(*src)),
            Driver::Gate(g) => {
                let ops: Vec<String> = g.operands().map(name).collect();
                match g {
                    Gate::Const(_) => writeln!(out, "wire {} = {}", s.id, g.op_name()),
                    _ => writeln!(out, "wire {} = {}({})", s.id, g.op_name(), ops.join(", ")),
                }
            }
        }
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = "module chain\ninput a\nreg s0 next=a\nreg s1 next=s0\noutput y = s1\n";

    fn err(text: &str) -> ParseError {
        parse_netlist(text).unwrap_err()
    }

    #[test]
    fn chain() {
        let n = parse_netlist(CHAIN).unwrap();
        assert_eq!(n.name(), "chain");
        assert_eq!((n.inputs().len(), n.registers().len(), n.outputs().len()), (1, 2, 1));
        let s1 = n.find("s1").unwrap();
        assert_eq!(n.driver(n.find("y").unwrap()), &Driver::Alias(s1));
    }

    #[test]
    fn bus_expansion() {
        let n = parse_netlist("input a[4]\n").unwrap();
        let names: Vec<String> = n.inputs().iter().map(|&s| n.id(s).to_string()).collect();
        assert_eq!(names, ["a.0", "a.1", "a.2", "a.3"]);
    }

    #[test]
    fn bitwise_bus_expressions_broadcast_scalars() {
        let n = parse_netlist("input a[2]\ninput k\nreg s[2] next=XOR(a, k)\noutput y = s\n").unwrap();
        assert_eq!(n.registers().len(), 2);
        assert_eq!(n.outputs().len(), 2);
        let s1 = n.find("s.1").unwrap();
        let next = n.next_state(s1).unwrap();
        assert_eq!(
            n.driver(next),
            &Driver::Gate(Gate::Xor(n.find("a.1").unwrap(), n.find("k").unwrap()))
        );
    }

    #[test]
    fn arity_mismatch() {
        let e = err("input a\nreg r next=AND(r)\n");
        assert_eq!(e.line, 2);
        assert_eq!(e.column, 12);
        assert!(matches!(e.kind, ParseErrorKind::Arity { op: "AND", expected: 2, found: 1 }));
    }

    #[test]
    fn error_kinds() {
        assert!(matches!(err("input a\ninput a\n").kind, ParseErrorKind::Duplicate(_)));
        assert!(matches!(err("input a[2]\ninput a.1\n").kind, ParseErrorKind::Duplicate(_)));
        assert!(matches!(err("reg r next=b\n").kind, ParseErrorKind::Undefined(_)));
        assert!(matches!(err("input a[2]\nreg r next=a\n").kind, ParseErrorKind::Width(_)));
        assert!(matches!(err("input a[2]\nreg r[3] next=a\n").kind, ParseErrorKind::Width(_)));
        let e = err("input a\nreg r nxt=a\n");
        assert_eq!((e.line, e.column), (2, 7));
        assert!(matches!(err("input a @\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("output y = NOT(a)\n").kind, ParseErrorKind::Syntax(_)));
        assert!(matches!(err("input AND\n").kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn forward_references_and_comments() {
        let src = "# header\nmodule m\noutput y = w # out\nwire w = NOT(r)\nreg r next=XOR(r, CONST1)\n";
        let n = parse_netlist(src).unwrap();
        assert_eq!(n.registers().len(), 1);
        n.ensure_valid().unwrap();
    }

    #[test]
    fn nested_expressions_flatten() {
        let n = parse_netlist("input a\ninput b\nwire w = AND(a, NOT(b))\nreg r next=MUX(a, w, CONST0)\n").unwrap();
        let fresh: Vec<&str> = n
            .signals()
            .iter()
            .map(|s| s.id.name.as_str())
            .filter(|s| s.starts_with('$'))
            .collect();
        assert_eq!(fresh, ["$0", "$1", "$2"]);
    }

    #[test]
    fn print_round_trip() {
        let src = "module m\ninput a[3]\ninput k\nreg s[3] next=XOR(a, AND(k, s))\nwire z = MUX(k, s.0, CONST1)\noutput y = z\noutput q = s\n";
        let n = parse_netlist(src).unwrap();
        let printed = n.to_snl();
        assert_eq!(parse_netlist(&printed).unwrap(), n);
        assert_eq!(parse_netlist(&printed).unwrap().to_snl(), printed);
    }
}
