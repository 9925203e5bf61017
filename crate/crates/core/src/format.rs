//! The `.poly` text format.
//!
//! ```text
//! # comments run to the end of the line
//! gen mu : 2 -> 1
//! rule assoc : (mu * id:1) ; mu => (id:1 * mu) ; mu
//! currents min 1
//! interp mu { down: (2*x1 + x2); up: (y1, y1); heat: <x1> }
//! ```
//!
//! In circuit terms `*` (juxtaposition) binds tighter than `;` (plugging).
//! A comment of the form `# [tag] ...` on the line of a declaration is kept
//! as that declaration's provenance note.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::diagram::{Circuit, DiagramError, Signature};
use crate::interp::{
    CurrentExpr, GeneratorInterpretation, HeatExpr, InterpError, InterpretationAssignment, Var,
};
use crate::rewrite::{Polygraph, RewriteError, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("arity mismatch: cannot plug {outputs} wires into {inputs}")]
    Arity { outputs: usize, inputs: usize },
    #[error("rule sides not parallel: {0}")]
    Rule(String),
    #[error("{0}")]
    Diagram(DiagramError),
    #[error("{0}")]
    Interp(InterpError),
}

/// A parsed `.poly` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyFile {
    pub polygraph: Polygraph,
    /// Present when the file has an `interp` or `currents` declaration.
    pub interpretation: Option<InterpretationAssignment>,
    /// Provenance tags keyed by `gen NAME`, `rule NAME` or `interp NAME`.
    pub provenance: BTreeMap<String, String>,
    /// Non-fatal remarks, such as generators without any wires.
    pub warnings: Vec<String>,
}

impl PolyFile {
    pub fn signature(&self) -> &Signature {
        &self.polygraph.signature
    }

    /// Parses a circuit term against the file's signature.
    pub fn term(&self, text: &str) -> Result<Circuit, ParseError> {
        parse_term(self.signature(), text)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Nat(u64),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 14] = [
    "->", "=>", ":", "*", ";", "(", ")", "{", "}", ",", "+", "<", ">", "=",
];

/// Tokens, and the comment text found on each line.
fn lex(text: &str) -> Result<(Vec<Token>, BTreeMap<usize, String>), ParseError> {
    let mut out = Vec::new();
    let mut comments = BTreeMap::new();
    for (li, line) in text.lines().enumerate() {
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (lno, col) = (li + 1, i + 1);
            let push = |tok, out: &mut Vec<Token>| out.push(Token { tok, line: lno, col });
            if c.is_whitespace() {
                i += 1;
            } else if c == '#' {
                let rest: String = chars[i + 1..].iter().collect();
                comments.insert(lno, rest.trim().to_string());
                break;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| ParseError {
                    line: lno,
                    col,
                    kind: ParseErrorKind::Syntax(format!("number `{s}` too large")),
                })?;
                push(Tok::Nat(n), &mut out);
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                push(Tok::Ident(chars[start..i].iter().collect()), &mut out);
            } else {
                let rest: String = chars[i..].iter().take(2).collect();
                match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                    Some(s) => {
                        i += s.len();
                        push(Tok::Sym(s), &mut out);
                    }
                    None => {
                        return Err(ParseError {
                            line: lno,
                            col,
                            kind: ParseErrorKind::Syntax(format!("unexpected character `{c}`")),
                        })
                    }
                }
            }
        }
    }
    Ok((out, comments))
}

const KEYWORDS: [&str; 4] = ["gen", "rule", "interp", "currents"];

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    sig: &'a Signature,
    end: (usize, usize),
}

type PResult<T> = Result<T, ParseError>;

impl<'a> Parser<'a> {
    fn new(toks: Vec<Token>, sig: &'a Signature) -> Self {
        let end = toks
            .last()
            .map_or((1, 1), |t| (t.line, t.col + 1));
        Parser {
            toks,
            pos: 0,
            sig,
            end,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.col))
    }

    fn err_at<T>(&self, at: (usize, usize), kind: ParseErrorKind) -> PResult<T> {
        Err(ParseError {
            line: at.0,
            col: at.1,
            kind,
        })
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(Tok::Ident(s)) => format!("`{s}`"),
            Some(Tok::Nat(n)) => format!("`{n}`"),
            Some(Tok::Sym(s)) => format!("`{s}`"),
        };
        self.err_at(
            self.here(),
            ParseErrorKind::Syntax(format!("expected {}, found {found}", msg.into())),
        )
    }

    fn eat(&mut self, sym: &str) -> bool {
        if self.peek() == Some(&Tok::Sym(match SYMBOLS.iter().find(|s| **s == sym) {
            Some(s) => s,
            None => return false,
        })) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, sym: &str) -> PResult<()> {
        if self.eat(sym) {
            Ok(())
        } else {
            self.syntax(format!("`{sym}`"))
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.syntax("a name"),
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => self.syntax(format!("`{kw}`")),
        }
    }

    fn nat(&mut self) -> PResult<u64> {
        match self.peek() {
            Some(Tok::Nat(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => self.syntax("a number"),
        }
    }

    // term := hterm (';' hterm)*
    fn term(&mut self) -> PResult<Circuit> {
        let mut acc = self.hterm()?;
        loop {
            let at = self.here();
            if !self.eat(";") {
                return Ok(acc);
            }
            let next = self.hterm()?;
            acc = match acc.vcomp(&next) {
                Ok(c) => c,
                Err(DiagramError::InterfaceMismatch { outputs, inputs }) => {
                    return self.err_at(at, ParseErrorKind::Arity { outputs, inputs })
                }
                Err(e) => return self.err_at(at, ParseErrorKind::Diagram(e)),
            };
        }
    }

    // hterm := atom ('*' atom)*
    fn hterm(&mut self) -> PResult<Circuit> {
        let mut acc = self.atom()?;
        while self.eat("*") {
            acc = acc.hcomp(&self.atom()?);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> PResult<Circuit> {
        let at = self.here();
        if self.eat("(") {
            let c = self.term()?;
            self.expect(")")?;
            return Ok(c);
        }
        match self.peek() {
            Some(Tok::Ident(s)) if s == "id" => {
                self.pos += 1;
                self.expect(":")?;
                Ok(Circuit::identity(self.nat()? as usize))
            }
            Some(Tok::Ident(s)) if !KEYWORDS.contains(&s.as_str()) => {
                let name = s.clone();
                self.pos += 1;
                match self.sig.lookup(&name) {
                    Some(id) => Ok(self.sig.circuit_of(id)),
                    None => self.err_at(at, ParseErrorKind::UnknownGenerator(name)),
                }
            }
            _ => self.syntax("a circuit"),
        }
    }

    // expr := prod ('+' prod)*
    fn expr(&mut self) -> PResult<CurrentExpr> {
        let mut acc = self.prod()?;
        while self.eat("+") {
            acc = acc.add(self.prod()?);
        }
        Ok(acc)
    }

    // prod := NAT '*' prod | NAT | primary
    fn prod(&mut self) -> PResult<CurrentExpr> {
        if let Some(Tok::Nat(k)) = self.peek() {
            let k = *k;
            self.pos += 1;
            if self.eat("*") {
                return Ok(self.prod()?.scale(k));
            }
            return Ok(CurrentExpr::Const(k));
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<CurrentExpr> {
        if self.eat("(") {
            let e = self.expr()?;
            self.expect(")")?;
            return Ok(e);
        }
        let at = self.here();
        let name = match self.peek() {
            Some(Tok::Ident(s)) => s.clone(),
            _ => return self.syntax("an expression"),
        };
        self.pos += 1;
        if name == "max" {
            self.expect("(")?;
            let a = self.expr()?;
            self.expect(",")?;
            let b = self.expr()?;
            self.expect(")")?;
            return Ok(a.max(b));
        }
        let var = |s: &str| -> Option<Var> {
            let (head, digits) = s.split_at(1);
            let i: usize = digits.parse().ok()?;
            match head {
                "x" if i >= 1 => Some(Var::X(i)),
                "y" if i >= 1 => Some(Var::Y(i)),
                _ => None,
            }
        };
        match var(&name) {
            Some(v) => Ok(CurrentExpr::Var(v)),
            None => self.err_at(
                at,
                ParseErrorKind::Syntax(format!("`{name}` is not a variable (x1, y2, ...)")),
            ),
        }
    }

    fn tuple(&mut self) -> PResult<Vec<CurrentExpr>> {
        self.expect("(")?;
        let mut out = Vec::new();
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            out.push(self.expr()?);
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn heat(&mut self) -> PResult<HeatExpr> {
        if self.peek() == Some(&Tok::Nat(0)) {
            self.pos += 1;
            return Ok(HeatExpr::default());
        }
        let mut atoms = Vec::new();
        loop {
            self.expect("<")?;
            atoms.push(self.expr()?);
            self.expect(">")?;
            if !self.eat("+") {
                return Ok(HeatExpr { atoms });
            }
        }
    }

    /// Line of the last consumed token.
    fn last_line(&self) -> usize {
        self.toks[self.pos - 1].line
    }
}

/// A `# [tag] ...` comment on the given line.
fn tag_on(comments: &BTreeMap<usize, String>, line: usize) -> Option<String> {
    comments.get(&line).filter(|c| c.starts_with('[')).cloned()
}

/// Parses a circuit term such as `(mu * id:1) ; mu`.
pub fn parse_term(sig: &Signature, text: &str) -> Result<Circuit, ParseError> {
    let (toks, _) = lex(text)?;
    let mut p = Parser::new(toks, sig);
    let c = p.term()?;
    if p.pos < p.toks.len() {
        return p.syntax("end of term");
    }
    Ok(c)
}

pub fn parse(text: &str) -> Result<PolyFile, ParseError> {
    let (toks, comments) = lex(text)?;
    let mut sig = Signature::new();
    let mut rules: Vec<(Rule, (usize, usize))> = Vec::new();
    let mut interps: Vec<(String, GeneratorInterpretation, (usize, usize))> = Vec::new();
    let mut min: Option<u64> = None;
    let mut provenance = BTreeMap::new();
    let mut warnings = Vec::new();

    // Generators may be used before they are declared, so declarations are
    // collected in a first pass.
    {
        let empty = Signature::new();
        let mut p = Parser::new(toks.clone(), &empty);
        while p.pos < p.toks.len() {
            let at = p.here();
            match &p.toks[p.pos].tok {
                Tok::Ident(s) if s == "gen" => {
                    p.pos += 1;
                    let name = p.ident()?;
                    if KEYWORDS.contains(&name.as_str()) || name == "id" {
                        return p.err_at(
                            at,
                            ParseErrorKind::Syntax(format!("`{name}` is reserved")),
                        );
                    }
                    p.expect(":")?;
                    let m = p.nat()? as usize;
                    p.expect("->")?;
                    let n = p.nat()? as usize;
                    if m == 0 && n == 0 {
                        warnings.push(format!(
                            "{}:{}: generator `{name}` has no inputs and no outputs",
                            at.0, at.1
                        ));
                    }
                    if let Err(e) = sig.add(name.clone(), m, n) {
                        return p.err_at(at, ParseErrorKind::Diagram(e));
                    }
                    if let Some(tag) = tag_on(&comments, p.last_line()) {
                        provenance.insert(format!("gen {name}"), tag);
                    }
                }
                _ => p.pos += 1,
            }
        }
    }

    let mut p = Parser::new(toks, &sig);
    loop {
        let at = p.here();
        let kw = match p.peek() {
            None => break,
            Some(Tok::Ident(s)) if KEYWORDS.contains(&s.as_str()) => s.clone(),
            _ => return p.syntax("`gen`, `rule`, `interp` or `currents`"),
        };
        p.pos += 1;
        match kw.as_str() {
            "gen" => {
                // already declared in the first pass
                p.ident()?;
                p.expect(":")?;
                p.nat()?;
                p.expect("->")?;
                p.nat()?;
            }
            "rule" => {
                let name = p.ident()?;
                p.expect(":")?;
                let lhs = p.term()?;
                p.expect("=>")?;
                let rhs = p.term()?;
                let rule = match Rule::new(name.clone(), lhs, rhs) {
                    Ok(r) => r,
                    Err(RewriteError::NotParallel { lhs, rhs, .. }) => {
                        return p.err_at(at, ParseErrorKind::Rule(format!("{lhs} vs {rhs}")))
                    }
                    Err(e) => {
                        return p.err_at(at, ParseErrorKind::Syntax(e.to_string()));
                    }
                };
                if let Some(tag) = tag_on(&comments, p.last_line()) {
                    provenance.insert(format!("rule {name}"), tag);
                }
                rules.push((rule, at));
            }
            "interp" => {
                let name = p.ident()?;
                p.expect("{")?;
                p.keyword("down")?;
                p.expect(":")?;
                let down = p.tuple()?;
                p.expect(";")?;
                p.keyword("up")?;
                p.expect(":")?;
                let up = p.tuple()?;
                p.expect(";")?;
                p.keyword("heat")?;
                p.expect(":")?;
                let heat = p.heat()?;
                p.eat(";");
                p.expect("}")?;
                if let Some(tag) = tag_on(&comments, p.last_line()) {
                    provenance.insert(format!("interp {name}"), tag);
                }
                interps.push((name, GeneratorInterpretation { down, up, heat }, at));
            }
            _ => {
                p.keyword("min")?;
                let m = p.nat()?;
                if m > 1 {
                    return p.err_at(at, ParseErrorKind::Interp(InterpError::Minimum(m)));
                }
                min = Some(m);
            }
        }
    }

    let mut polygraph = Polygraph::new(sig.clone());
    for (rule, at) in rules {
        if let Err(e) = polygraph.add_rule(rule) {
            return p.err_at(at, ParseErrorKind::Syntax(e.to_string()));
        }
    }
    let interpretation = if interps.is_empty() && min.is_none() {
        None
    } else {
        let mut a = InterpretationAssignment::new(min.unwrap_or(0)).expect("checked above");
        for (name, gi, at) in interps {
            let Some(id) = sig.lookup(&name) else {
                return p.err_at(at, ParseErrorKind::UnknownGenerator(name));
            };
            if a.get(id).is_some() {
                return p.err_at(
                    at,
                    ParseErrorKind::Syntax(format!("generator `{name}` interpreted twice")),
                );
            }
            if let Err(e) = a.set(&sig, id, gi) {
                return p.err_at(at, ParseErrorKind::Interp(e));
            }
        }
        Some(a)
    };
    Ok(PolyFile {
        polygraph,
        interpretation,
        provenance,
        warnings,
    })
}

/// Renders a file in a form `parse` reads back to an equal value.
pub fn render(file: &PolyFile) -> String {
    let mut out = String::new();
    let sig = file.signature();
    let tag = |key: String| match file.provenance.get(&key) {
        Some(t) => format!("  # {t}"),
        None => String::new(),
    };
    for (_, d) in sig.iter() {
        let _ = writeln!(out, "gen {} : {} -> {}{}", d.name, d.inputs, d.outputs, tag(format!("gen {}", d.name)));
    }
    for r in file.polygraph.rules() {
        let _ = writeln!(
            out,
            "rule {} : {} => {}{}",
            r.name(),
            r.lhs().display(sig),
            r.rhs().display(sig),
            tag(format!("rule {}", r.name()))
        );
    }
    if let Some(a) = &file.interpretation {
        let _ = writeln!(out, "currents min {}", a.min);
        for (id, gi) in a.iter() {
            let name = &sig.decl(id).name;
            let _ = writeln!(
                out,
                "interp {name} {{ down: {}; up: {}; heat: {} }}{}",
                Tuple(&gi.down),
                Tuple(&gi.up),
                gi.heat,
                tag(format!("interp {name}"))
            );
        }
    }
    out
}

struct Tuple<'a>(&'a [CurrentExpr]);

impl fmt::Display for Tuple<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        f.write_str(")")
    }
}
