//! Line-oriented text format for theories.
//!
//! ```text
//! # comment
//! universe {a,b,c}
//! family lam[x] : S+x -> S @ S+x
//! op app{} : {}, {} -> {} @ {}
//! action w_b . app{} = app{b}
//! action (b/a) . k{a} = k{b}
//! eq eta (X : {}) : lam[a]{}(app{a}(w_a(X), var[a]{})) = X : {}
//! implication cong (X : {}, Y : {})
//!   premise X = Y : {}
//!   conclude s{}(X) = s{}(Y) : {}
//! end
//! judgment eta.nom (X : {})
//!   fresh a # X
//!   [a]app(X, a) = X
//! end
//! ```

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::frontend::{Judgment, NominalTerm};
use super::signature::{Family, OpSymbol, SortAtom, SortExpr, SymbolId, UniformSignature};
use super::term::{Equation, Implication, Term, VarName};
use crate::names::{GeneratorStep, Name, NameSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Theory {
    pub universe: Option<NameSet>,
    pub signature: UniformSignature,
    pub equations: Vec<Equation>,
    pub implications: Vec<Implication>,
    pub judgments: Vec<Judgment>,
}

impl Theory {
    pub fn equation(&self, id: &str) -> Option<&Equation> {
        self.equations.iter().find(|e| e.id == id)
    }

    pub fn judgment(&self, id: &str) -> Option<&Judgment> {
        self.judgments.iter().find(|j| j.id == id)
    }

    pub fn implication(&self, id: &str) -> Option<&Implication> {
        self.implications.iter().find(|i| i.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    column: usize,
}

const PUNCT: [&str; 16] = [
    "->", "{", "}", "[", "]", "(", ")", ",", ":", "=", "/", "+", "#", "'", "@", ".",
];

fn lex(line: &str, lineno: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let column = i + 1;
        if c.is_alphanumeric() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric()
                    || chars[i] == '_'
                    || (chars[i] == '.' && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric())))
            {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                column,
            });
            continue;
        }
        if c == '⊢' {
            i += 1;
            continue;
        }
        let rest: String = chars[i..].iter().take(2).collect();
        match PUNCT.iter().find(|p| rest.starts_with(**p)) {
            Some(p) => {
                out.push(Token {
                    tok: Tok::Sym(p),
                    column,
                });
                i += p.chars().count();
            }
            None => {
                return Err(ParseError {
                    line: lineno,
                    column,
                    message: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    Ok(out)
}

struct LineParser<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    width: usize,
}

impl<'a> LineParser<'a> {
    fn new(tokens: &'a [Token], line: usize, width: usize) -> Self {
        LineParser {
            tokens,
            pos: 0,
            line,
            width,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let column = self.tokens.get(self.pos).map(|t| t.column).unwrap_or(self.width + 1);
        Err(ParseError {
            line: self.line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.tokens.get(self.pos + k).map(|t| &t.tok)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(p)) if *p == s)
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected an identifier"),
        }
    }

    fn name(&mut self) -> Result<Name, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if Name::is_name_token(s) => {
                let n = s.parse().expect("name token");
                self.pos += 1;
                Ok(n)
            }
            _ => self.err("expected a name"),
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn end(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn name_set(&mut self) -> Result<NameSet, ParseError> {
        self.expect("{")?;
        let mut s = NameSet::new();
        if !self.eat("}") {
            loop {
                let col = self.pos;
                let n = self.name()?;
                if !s.insert(n) {
                    self.pos = col;
                    return self.err(format!("name {n} repeated"));
                }
                if self.eat("}") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(s)
    }

    fn name_list(&mut self, open: &str, close: &str) -> Result<Vec<Name>, ParseError> {
        self.expect(open)?;
        let mut out = Vec::new();
        if !self.eat(close) {
            loop {
                out.push(self.name()?);
                if self.eat(close) {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(out)
    }

    fn symbol_id(&mut self) -> Result<SymbolId, ParseError> {
        let family = self.ident()?;
        let params = if self.is_sym("[") {
            self.name_list("[", "]")?
        } else {
            Vec::new()
        };
        let base = self.name_set()?;
        Ok(SymbolId::new(family, params, base))
    }

    fn var_decls(&mut self) -> Result<BTreeMap<VarName, NameSet>, ParseError> {
        let mut out = BTreeMap::new();
        self.expect("(")?;
        if self.eat(")") {
            return Ok(out);
        }
        loop {
            let v = self.var_name()?;
            self.expect(":")?;
            let s = self.name_set()?;
            if out.insert(v.clone(), s).is_some() {
                return self.err(format!("variable {v} declared twice"));
            }
            if self.eat(")") {
                return Ok(out);
            }
            self.expect(",")?;
        }
    }

    fn var_name(&mut self) -> Result<VarName, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s.starts_with(|c: char| c.is_uppercase()) => {}
            _ => return self.err("expected a variable (capitalised identifier)"),
        }
        let base = self.ident()?;
        let adjoined = if self.eat("'") {
            self.name_set()?
        } else {
            NameSet::new()
        };
        Ok(VarName { base, adjoined })
    }

    fn term(&mut self, vars: &BTreeMap<VarName, NameSet>) -> Result<Term, ParseError> {
        if self.is_sym("(") {
            self.pos += 1;
            let to = self.name()?;
            self.expect("/")?;
            let from = self.name()?;
            self.expect(")")?;
            self.expect("(")?;
            let t = self.term(vars)?;
            self.expect(")")?;
            return Ok(Term::rename(to, from, t));
        }
        let Some(Tok::Ident(id)) = self.peek().cloned() else {
            return self.err("expected a term");
        };
        if id.starts_with(|c: char| c.is_uppercase()) {
            let start = self.pos;
            let v = self.var_name()?;
            return match vars.get(&v) {
                Some(s) => Ok(Term::Var {
                    name: v,
                    sort: s.clone(),
                }),
                None => {
                    self.pos = start;
                    self.err(format!("undeclared variable {v}"))
                }
            };
        }
        if let Some(rest) = id.strip_prefix("w_") {
            if Name::is_name_token(rest) && matches!(self.peek_at(1), Some(Tok::Sym("("))) {
                self.pos += 2;
                let t = self.term(vars)?;
                self.expect(")")?;
                return Ok(Term::weaken(rest.parse().expect("name token"), t));
            }
        }
        let sym = self.symbol_id()?;
        let mut args = Vec::new();
        if self.eat("(") && !self.eat(")") {
            loop {
                args.push(self.term(vars)?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        Ok(Term::app(sym, args))
    }

    /// `lhs = rhs : T`
    fn equation_body(&mut self, id: String, vars: &BTreeMap<VarName, NameSet>) -> Result<Equation, ParseError> {
        let lhs = self.term(vars)?;
        self.expect("=")?;
        let rhs = self.term(vars)?;
        self.expect(":")?;
        let sort = self.name_set()?;
        self.end()?;
        Ok(Equation::new(id, lhs, rhs, sort))
    }

    fn nominal_term(&mut self) -> Result<NominalTerm, ParseError> {
        if self.eat("[") {
            let a = self.name()?;
            self.expect("]")?;
            let t = self.nominal_term()?;
            return Ok(NominalTerm::Abs(a, Box::new(t)));
        }
        let Some(Tok::Ident(id)) = self.peek().cloned() else {
            return self.err("expected a nominal term");
        };
        if id.starts_with(|c: char| c.is_uppercase()) {
            self.pos += 1;
            return Ok(NominalTerm::Var(id));
        }
        if matches!(self.peek_at(1), Some(Tok::Sym("("))) {
            self.pos += 2;
            let mut args = Vec::new();
            if !self.eat(")") {
                loop {
                    args.push(self.nominal_term()?);
                    if self.eat(")") {
                        break;
                    }
                    self.expect(",")?;
                }
            }
            return Ok(NominalTerm::App(id, args));
        }
        Ok(NominalTerm::Atom(self.name()?))
    }

    fn sort_expr(&mut self, params: &[String]) -> Result<SortExpr, ParseError> {
        let mut atoms = Vec::new();
        loop {
            if self.is_sym("{") {
                self.pos += 1;
                self.expect("}")?;
            } else {
                let id = self.ident()?;
                if id == "S" {
                    atoms.push(SortAtom::Base);
                } else if let Some(i) = params.iter().position(|p| *p == id) {
                    atoms.push(SortAtom::Param(i));
                } else {
                    self.pos -= 1;
                    return self.err(format!("`{id}` is neither `S` nor a parameter"));
                }
            }
            if !self.eat("+") {
                return Ok(SortExpr(atoms));
            }
        }
    }
}

enum Block {
    Implication {
        id: String,
        vars: BTreeMap<VarName, NameSet>,
        premises: Vec<Equation>,
        conclusion: Option<Equation>,
        line: usize,
    },
    Judgment {
        id: String,
        vars: BTreeMap<String, NameSet>,
        fresh: Vec<(Name, String)>,
        body: Option<(NominalTerm, NominalTerm)>,
        line: usize,
    },
}

fn sig_err(line: usize, e: impl fmt::Display) -> ParseError {
    ParseError {
        line,
        column: 1,
        message: e.to_string(),
    }
}

pub fn parse_theory(text: &str) -> Result<Theory, ParseError> {
    let mut th = Theory::default();
    let mut block: Option<Block> = None;
    let mut pending_actions: Vec<(usize, GeneratorStep, SymbolId, SymbolId)> = Vec::new();
    let mut pending_action_names: Vec<(usize, ActionSpec, SymbolId, SymbolId)> = Vec::new();
    let mut eq_lines = Vec::new();
    let mut imp_lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let tokens = lex(raw, lineno)?;
        let mut p = LineParser::new(&tokens, lineno, raw.chars().count());
        let head = match p.peek() {
            Some(Tok::Ident(h)) => h.clone(),
            _ => String::new(),
        };
        let keyword = match &block {
            None => true,
            Some(Block::Implication { .. }) => matches!(head.as_str(), "premise" | "conclude" | "end"),
            Some(Block::Judgment { .. }) => matches!(head.as_str(), "fresh" | "end"),
        };
        if keyword {
            p.ident()?;
        }
        if let Some(b) = block.as_mut() {
            match (b, head.as_str()) {
                (
                    Block::Implication {
                        vars,
                        premises,
                        conclusion,
                        id,
                        ..
                    },
                    kw @ ("premise" | "conclude"),
                ) => {
                    if conclusion.is_some() {
                        return p.err("the conclusion must come last");
                    }
                    let eid = if kw == "premise" {
                        format!("{id}.p{}", premises.len() + 1)
                    } else {
                        format!("{id}.c")
                    };
                    let e = p.equation_body(eid, vars)?;
                    if kw == "premise" {
                        premises.push(e);
                    } else {
                        *conclusion = Some(e);
                    }
                }
                (Block::Judgment { fresh, vars, body, .. }, "fresh") => {
                    if body.is_some() {
                        return p.err("freshness constraints must precede the equation");
                    }
                    let a = p.name()?;
                    p.expect("#")?;
                    let x = p.ident()?;
                    if !vars.contains_key(&x) {
                        p.pos -= 1;
                        return p.err(format!("undeclared variable {x}"));
                    }
                    p.end()?;
                    fresh.push((a, x));
                }
                (_, "end") => {
                    p.end()?;
                    match block.take().expect("open block") {
                        Block::Implication {
                            id,
                            premises,
                            conclusion,
                            line,
                            ..
                        } => {
                            let conclusion = conclusion.ok_or_else(|| ParseError {
                                line,
                                column: 1,
                                message: format!("implication {id} has no conclusion"),
                            })?;
                            th.implications.push(Implication {
                                id,
                                premises,
                                conclusion,
                            });
                        }
                        Block::Judgment {
                            id,
                            vars,
                            fresh,
                            body,
                            line,
                        } => {
                            let (lhs, rhs) = body.ok_or_else(|| ParseError {
                                line,
                                column: 1,
                                message: format!("judgment {id} has no equation"),
                            })?;
                            th.judgments.push(Judgment {
                                id,
                                vars,
                                fresh,
                                lhs,
                                rhs,
                            });
                        }
                    }
                }
                (Block::Judgment { body, .. }, _) => {
                    if body.is_some() {
                        return p.err("a judgment has a single equation");
                    }
                    let lhs = p.nominal_term()?;
                    p.expect("=")?;
                    let rhs = p.nominal_term()?;
                    p.end()?;
                    *body = Some((lhs, rhs));
                }
                (Block::Implication { .. }, _) => {
                    p.pos = 0;
                    return p.err("expected `premise`, `conclude` or `end`");
                }
            }
            continue;
        }
        match head.as_str() {
            "universe" => {
                let u = p.name_set()?;
                p.end()?;
                th.universe = Some(u);
            }
            "family" => {
                let name = p.ident()?;
                let params = if p.eat("[") {
                    let mut ps = Vec::new();
                    loop {
                        ps.push(p.ident()?);
                        if p.eat("]") {
                            break;
                        }
                        p.expect(",")?;
                    }
                    ps
                } else {
                    Vec::new()
                };
                p.expect(":")?;
                let mut args = Vec::new();
                if !p.eat("->") {
                    loop {
                        args.push(p.sort_expr(&params)?);
                        if p.eat("->") {
                            break;
                        }
                        p.expect(",")?;
                    }
                }
                let result = p.sort_expr(&params)?;
                p.expect("@")?;
                let index = p.sort_expr(&params)?;
                p.end()?;
                th.signature
                    .add_family(Family {
                        name,
                        param_names: params,
                        args,
                        result,
                        index,
                    })
                    .map_err(|e| sig_err(lineno, e))?;
            }
            "op" => {
                let id = p.symbol_id()?;
                p.expect(":")?;
                let mut args = Vec::new();
                if !p.eat("->") {
                    loop {
                        args.push(p.name_set()?);
                        if p.eat("->") {
                            break;
                        }
                        p.expect(",")?;
                    }
                }
                let result = p.name_set()?;
                p.expect("@")?;
                let index = p.name_set()?;
                p.end()?;
                th.signature
                    .add_op(OpSymbol {
                        id,
                        index,
                        arg_sorts: args,
                        result_sort: result,
                    })
                    .map_err(|e| sig_err(lineno, e))?;
            }
            "action" => {
                let spec = if p.eat("(") {
                    let to = p.name()?;
                    p.expect("/")?;
                    let from = p.name()?;
                    p.expect(")")?;
                    ActionSpec::Rename { from, to }
                } else {
                    let w = p.ident()?;
                    match w.strip_prefix("w_").filter(|r| Name::is_name_token(r)) {
                        Some(r) => ActionSpec::Weaken(r.parse().expect("name token")),
                        None => {
                            p.pos -= 1;
                            return p.err("expected `w_<name>` or `(<name>/<name>)`");
                        }
                    }
                };
                p.expect(".")?;
                let from = p.symbol_id()?;
                p.expect("=")?;
                let to = p.symbol_id()?;
                p.end()?;
                pending_action_names.push((lineno, spec, from, to));
            }
            "eq" => {
                let id = p.ident()?;
                let vars = p.var_decls()?;
                p.expect(":")?;
                let e = p.equation_body(id, &vars)?;
                th.equations.push(e);
                eq_lines.push(lineno);
            }
            "implication" => {
                let id = p.ident()?;
                let vars = p.var_decls()?;
                p.end()?;
                imp_lines.push(lineno);
                block = Some(Block::Implication {
                    id,
                    vars,
                    premises: Vec::new(),
                    conclusion: None,
                    line: lineno,
                });
            }
            "judgment" => {
                let id = p.ident()?;
                let decls = p.var_decls()?;
                p.end()?;
                let mut vars = BTreeMap::new();
                for (v, s) in decls {
                    if !v.adjoined.is_empty() {
                        return Err(sig_err(lineno, "judgment variables cannot be primed"));
                    }
                    vars.insert(v.base, s);
                }
                block = Some(Block::Judgment {
                    id,
                    vars,
                    fresh: Vec::new(),
                    body: None,
                    line: lineno,
                });
            }
            other => {
                p.pos = 0;
                return p.err(format!("unknown declaration `{other}`"));
            }
        }
    }
    if let Some(b) = block {
        let line = match b {
            Block::Implication { line, .. } | Block::Judgment { line, .. } => line,
        };
        return Err(sig_err(line, "block is missing `end`"));
    }
    for (lineno, spec, from, to) in pending_action_names {
        let op = th
            .signature
            .symbol(&from)
            .ok_or_else(|| sig_err(lineno, format!("unknown symbol `{from}`")))?;
        let step = match spec {
            ActionSpec::Weaken(a) => GeneratorStep::weaken(op.index.clone(), a),
            ActionSpec::Rename { from: a, to: b } => GeneratorStep::rename(op.index.without(a), a, b),
        };
        if let ActionSpec::Rename { from: a, .. } = spec {
            if !op.index.contains(a) {
                return Err(sig_err(lineno, format!("{a} is not in the index of `{from}`")));
            }
        }
        pending_actions.push((lineno, step, from, to));
    }
    for (lineno, step, from, to) in pending_actions {
        th.signature
            .add_action(step, from, to)
            .map_err(|e| sig_err(lineno, e))?;
    }
    for (e, &line) in th.equations.iter().zip(&eq_lines) {
        e.check(&th.signature)
            .map_err(|err| sig_err(line, format!("equation {}: {err}", e.id)))?;
    }
    for (imp, &line) in th.implications.iter().zip(&imp_lines) {
        imp.check(&th.signature)
            .map_err(|err| sig_err(line, format!("implication {}: {err}", imp.id)))?;
    }
    Ok(th)
}

#[derive(Debug, Clone, Copy)]
enum ActionSpec {
    Weaken(Name),
    Rename { from: Name, to: Name },
}

fn render_vars(vars: &[(VarName, NameSet)]) -> String {
    let mut sorted = vars.to_vec();
    sorted.sort();
    let parts: Vec<String> = sorted.iter().map(|(v, s)| format!("{v} : {s}")).collect();
    format!("({})", parts.join(", "))
}

pub fn render_equation(eq: &Equation) -> String {
    format!("eq {} {} : {}", eq.id, render_vars(&eq.vars()), eq)
}

pub fn render_implication(imp: &Implication) -> String {
    let mut s = format!("implication {} {}\n", imp.id, render_vars(&imp.vars()));
    for p in &imp.premises {
        s.push_str(&format!("  premise {p}\n"));
    }
    s.push_str(&format!("  conclude {}\nend", imp.conclusion));
    s
}

pub fn render_judgment(j: &Judgment) -> String {
    let vars: Vec<String> = j.vars.iter().map(|(v, s)| format!("{v} : {s}")).collect();
    let mut s = format!("judgment {} ({})\n", j.id, vars.join(", "));
    for (a, x) in &j.fresh {
        s.push_str(&format!("  fresh {a} # {x}\n"));
    }
    s.push_str(&format!("  {} = {}\nend", j.lhs, j.rhs));
    s
}

fn render_action(from: &SymbolId, step: &GeneratorStep, to: &SymbolId) -> String {
    match step {
        GeneratorStep::Weaken { name, .. } => format!("action w_{name} . {from} = {to}"),
        GeneratorStep::Rename { from: a, to: b, .. } => format!("action ({b}/{a}) . {from} = {to}"),
    }
}

pub fn render_theory(th: &Theory) -> String {
    let mut lines = Vec::new();
    if let Some(u) = &th.universe {
        lines.push(format!("universe {u}"));
    }
    for f in th.signature.families() {
        lines.push(f.render());
    }
    for op in th.signature.ops() {
        let args: Vec<String> = op.arg_sorts.iter().map(NameSet::to_string).collect();
        lines.push(format!(
            "op {} : {}{}-> {} @ {}",
            op.id,
            args.join(", "),
            if args.is_empty() { "" } else { " " },
            op.result_sort,
            op.index
        ));
    }
    for (from, step, to) in th.signature.actions() {
        lines.push(render_action(from, step, to));
    }
    for e in &th.equations {
        lines.push(render_equation(e));
    }
    for i in &th.implications {
        lines.push(render_implication(i));
    }
    for j in &th.judgments {
        lines.push(render_judgment(j));
    }
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
