//! Uniform terms, equations and implications, sort checking and freshness sets.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use super::signature::{SymbolId, UniformSignature};
use crate::names::{Name, NameSet};

/// A variable name; translation adjoins names to variables it enlarges,
/// printed `X'{b,c}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarName {
    pub base: String,
    pub adjoined: NameSet,
}

impl VarName {
    pub fn new(base: impl Into<String>) -> Self {
        VarName {
            base: base.into(),
            adjoined: NameSet::new(),
        }
    }

    pub fn primed(&self, a: Name) -> Self {
        VarName {
            base: self.base.clone(),
            adjoined: self.adjoined.with(a),
        }
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.adjoined.is_empty() {
            f.write_str(&self.base)
        } else {
            write!(f, "{}'{}", self.base, self.adjoined)
        }
    }
}

impl Serialize for VarName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var {
        name: VarName,
        sort: NameSet,
    },
    App {
        sym: SymbolId,
        args: Vec<Term>,
    },
    /// `w_a(t)`.
    Weaken {
        name: Name,
        term: Box<Term>,
    },
    /// `(to/from)(t)`.
    Rename {
        to: Name,
        from: Name,
        term: Box<Term>,
    },
}

impl Term {
    pub fn var(name: impl Into<String>, sort: NameSet) -> Term {
        Term::Var {
            name: VarName::new(name),
            sort,
        }
    }

    pub fn app(sym: SymbolId, args: Vec<Term>) -> Term {
        Term::App { sym, args }
    }

    pub fn weaken(name: Name, t: Term) -> Term {
        Term::Weaken {
            name,
            term: Box::new(t),
        }
    }

    pub fn rename(to: Name, from: Name, t: Term) -> Term {
        Term::Rename {
            to,
            from,
            term: Box::new(t),
        }
    }

    pub fn contains_var(&self, x: &VarName) -> bool {
        match self {
            Term::Var { name, .. } => name == x,
            Term::App { args, .. } => args.iter().any(|t| t.contains_var(x)),
            Term::Weaken { term, .. } | Term::Rename { term, .. } => term.contains_var(x),
        }
    }

    /// Variables with their sorts, in first-occurrence order.
    pub fn vars_into(&self, out: &mut Vec<(VarName, NameSet)>) {
        match self {
            Term::Var { name, sort } => {
                if !out.iter().any(|(n, _)| n == name) {
                    out.push((name.clone(), sort.clone()));
                }
            }
            Term::App { args, .. } => args.iter().for_each(|t| t.vars_into(out)),
            Term::Weaken { term, .. } | Term::Rename { term, .. } => term.vars_into(out),
        }
    }

    /// Every name written in the term, including symbol parameters and bases.
    pub fn names(&self) -> NameSet {
        match self {
            Term::Var { sort, .. } => sort.clone(),
            Term::App { sym, args } => {
                let mut s = sym.base.union(&sym.params.iter().copied().collect());
                for t in args {
                    s = s.union(&t.names());
                }
                s
            }
            Term::Weaken { name, term } => term.names().with(*name),
            Term::Rename { to, from, term } => term.names().with(*to).with(*from),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var { .. } => 1,
            Term::App { args, .. } => 1 + args.iter().map(Term::size).sum::<usize>(),
            Term::Weaken { term, .. } | Term::Rename { term, .. } => 1 + term.size(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var { name, .. } => write!(f, "{name}"),
            Term::App { sym, args } => {
                write!(f, "{sym}")?;
                if !args.is_empty() {
                    let parts: Vec<String> = args.iter().map(Term::to_string).collect();
                    write!(f, "({})", parts.join(", "))?;
                }
                Ok(())
            }
            Term::Weaken { name, term } => write!(f, "w_{name}({term})"),
            Term::Rename { to, from, term } => write!(f, "({to}/{from})({term})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("at {at}: unknown symbol `{symbol}`")]
    UnknownSymbol { at: String, symbol: String },
    #[error("at {at}: `{symbol}` takes {expected} arguments, got {found}")]
    Arity {
        at: String,
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("at {at}: argument {position} of `{symbol}` has sort {found}, expected {expected}")]
    ArgSort {
        at: String,
        symbol: String,
        position: usize,
        expected: NameSet,
        found: NameSet,
    },
    #[error("at {at}: w_{name} applied to a term of sort {sort} already containing {name}")]
    WeakenNotFresh { at: String, name: Name, sort: NameSet },
    #[error("at {at}: ({to}/{from}) applied to a term of sort {sort} without {from}")]
    RenameAbsent {
        at: String,
        to: Name,
        from: Name,
        sort: NameSet,
    },
    #[error("at {at}: ({to}/{from}) applied to a term of sort {sort} already containing {to}")]
    RenameClash {
        at: String,
        to: Name,
        from: Name,
        sort: NameSet,
    },
    #[error("variable {var} used with sorts {first} and {second}")]
    VariableSort {
        var: String,
        first: NameSet,
        second: NameSet,
    },
    #[error("sides have sorts {lhs} and {rhs}")]
    SideSorts { lhs: NameSet, rhs: NameSet },
    #[error("equation declared with sort {declared} but its sides have sort {found}")]
    DeclaredSort { declared: NameSet, found: NameSet },
    #[error("variable {0} does not occur")]
    NoSuchVariable(String),
    #[error("name {name} lies in the sort {sort}")]
    NotFresh { name: Name, sort: NameSet },
}

fn path_text(path: &[usize]) -> String {
    if path.is_empty() {
        "root".to_string()
    } else {
        path.iter().map(usize::to_string).collect::<Vec<_>>().join(".")
    }
}

/// Sort of a uniform term under the four formation rules.
pub fn typecheck_term(sig: &UniformSignature, t: &Term) -> Result<NameSet, TermError> {
    sort_at(sig, t, &mut Vec::new())
}

fn sort_at(sig: &UniformSignature, t: &Term, path: &mut Vec<usize>) -> Result<NameSet, TermError> {
    match t {
        Term::Var { sort, .. } => Ok(sort.clone()),
        Term::App { sym, args } => {
            let op = sig.symbol(sym).ok_or_else(|| TermError::UnknownSymbol {
                at: path_text(path),
                symbol: sym.to_string(),
            })?;
            if op.arity() != args.len() {
                return Err(TermError::Arity {
                    at: path_text(path),
                    symbol: sym.to_string(),
                    expected: op.arity(),
                    found: args.len(),
                });
            }
            for (i, (arg, want)) in args.iter().zip(&op.arg_sorts).enumerate() {
                path.push(i);
                let got = sort_at(sig, arg, path)?;
                path.pop();
                if &got != want {
                    return Err(TermError::ArgSort {
                        at: path_text(path),
                        symbol: sym.to_string(),
                        position: i,
                        expected: want.clone(),
                        found: got,
                    });
                }
            }
            Ok(op.result_sort)
        }
        Term::Weaken { name, term } => {
            path.push(0);
            let s = sort_at(sig, term, path)?;
            path.pop();
            if s.contains(*name) {
                return Err(TermError::WeakenNotFresh {
                    at: path_text(path),
                    name: *name,
                    sort: s,
                });
            }
            Ok(s.with(*name))
        }
        Term::Rename { to, from, term } => {
            path.push(0);
            let s = sort_at(sig, term, path)?;
            path.pop();
            if !s.contains(*from) {
                return Err(TermError::RenameAbsent {
                    at: path_text(path),
                    to: *to,
                    from: *from,
                    sort: s,
                });
            }
            if to == from || s.contains(*to) {
                return Err(TermError::RenameClash {
                    at: path_text(path),
                    to: *to,
                    from: *from,
                    sort: s,
                });
            }
            Ok(s.without(*from).with(*to))
        }
    }
}

/// Calls `f(subterm, sort)` on every subterm, given a well-sorted term.
pub fn for_each_subterm(
    sig: &UniformSignature,
    t: &Term,
    f: &mut impl FnMut(&Term, &NameSet),
) -> Result<NameSet, TermError> {
    let s = match t {
        Term::Var { sort, .. } => sort.clone(),
        Term::App { args, .. } => {
            for a in args {
                for_each_subterm(sig, a, f)?;
            }
            typecheck_term(sig, t)?
        }
        Term::Weaken { name, term } => for_each_subterm(sig, term, f)?.with(*name),
        Term::Rename { to, from, term } => for_each_subterm(sig, term, f)?.without(*from).with(*to),
    };
    f(t, &s);
    Ok(s)
}

/// A pair of terms of the same sort.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub id: String,
    pub lhs: Term,
    pub rhs: Term,
    pub sort: NameSet,
}

impl Equation {
    pub fn new(id: impl Into<String>, lhs: Term, rhs: Term, sort: NameSet) -> Self {
        Equation {
            id: id.into(),
            lhs,
            rhs,
            sort,
        }
    }

    /// Variables of both sides with their sorts in first-occurrence order.
    pub fn vars(&self) -> Vec<(VarName, NameSet)> {
        let mut out = Vec::new();
        self.lhs.vars_into(&mut out);
        self.rhs.vars_into(&mut out);
        out
    }

    pub fn names(&self) -> NameSet {
        self.lhs.names().union(&self.rhs.names()).union(&self.sort)
    }

    /// Checks both sides, their common sort and consistent variable sorts.
    pub fn check(&self, sig: &UniformSignature) -> Result<(), TermError> {
        let l = typecheck_term(sig, &self.lhs)?;
        let r = typecheck_term(sig, &self.rhs)?;
        if l != r {
            return Err(TermError::SideSorts { lhs: l, rhs: r });
        }
        if l != self.sort {
            return Err(TermError::DeclaredSort {
                declared: self.sort.clone(),
                found: l,
            });
        }
        check_var_sorts([&self.lhs, &self.rhs].into_iter())
    }
}

fn check_var_sorts<'a>(terms: impl Iterator<Item = &'a Term>) -> Result<(), TermError> {
    let mut seen: BTreeMap<VarName, NameSet> = BTreeMap::new();
    fn walk(t: &Term, seen: &mut BTreeMap<VarName, NameSet>) -> Result<(), TermError> {
        match t {
            Term::Var { name, sort } => match seen.get(name) {
                Some(s) if s != sort => Err(TermError::VariableSort {
                    var: name.to_string(),
                    first: s.clone(),
                    second: sort.clone(),
                }),
                Some(_) => Ok(()),
                None => {
                    seen.insert(name.clone(), sort.clone());
                    Ok(())
                }
            },
            Term::App { args, .. } => args.iter().try_for_each(|a| walk(a, seen)),
            Term::Weaken { term, .. } | Term::Rename { term, .. } => walk(term, seen),
        }
    }
    for t in terms {
        walk(t, &mut seen)?;
    }
    Ok(())
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {} : {}", self.lhs, self.rhs, self.sort)
    }
}

/// An equation read in the ordinary many-sorted sense, with its sorts drawn
/// from a bounded universe.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UaEquation(pub Equation);

impl UaEquation {
    pub fn ground(eq: Equation) -> Self {
        UaEquation(eq)
    }

    pub fn equation(&self) -> &Equation {
        &self.0
    }

    pub fn within(&self, universe: &NameSet) -> bool {
        self.0.names().is_subset(universe)
    }
}

impl fmt::Display for UaEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// `(u_1=v_1) /\ ... /\ (u_n=v_n) => (u_0=v_0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Implication {
    pub id: String,
    pub premises: Vec<Equation>,
    pub conclusion: Equation,
}

impl Implication {
    pub fn sort(&self) -> NameSet {
        self.premises
            .iter()
            .fold(self.conclusion.sort.clone(), |acc, e| acc.union(&e.sort))
    }

    pub fn components(&self) -> impl Iterator<Item = &Equation> {
        self.premises.iter().chain(std::iter::once(&self.conclusion))
    }

    pub fn vars(&self) -> Vec<(VarName, NameSet)> {
        let mut out = Vec::new();
        for e in self.components() {
            e.lhs.vars_into(&mut out);
            e.rhs.vars_into(&mut out);
        }
        out
    }

    pub fn check(&self, sig: &UniformSignature) -> Result<(), TermError> {
        for e in self.components() {
            e.check(sig)?;
        }
        check_var_sorts(self.components().flat_map(|e| [&e.lhs, &e.rhs]))
    }
}

/// `Fr_E(X)`: the union of `T \ T_X` over subterms `t : T` containing `X`.
pub fn freshness_set(sig: &UniformSignature, eq: &Equation, x: &VarName) -> Result<NameSet, TermError> {
    freshness_in(sig, [&eq.lhs, &eq.rhs], x)
}

pub(crate) fn freshness_in<'a>(
    sig: &UniformSignature,
    terms: impl IntoIterator<Item = &'a Term>,
    x: &VarName,
) -> Result<NameSet, TermError> {
    let mut tx = None;
    let mut out = NameSet::new();
    let mut collected = Vec::new();
    for t in terms {
        for_each_subterm(sig, t, &mut |sub, sort| {
            if let Term::Var { name, sort } = sub {
                if name == x {
                    tx = Some(sort.clone());
                }
            }
            if sub.contains_var(x) {
                collected.push(sort.clone());
            }
        })?;
    }
    let tx = tx.ok_or_else(|| TermError::NoSuchVariable(x.to_string()))?;
    for s in collected {
        out = out.union(&s.difference(&tx));
    }
    Ok(out)
}

/// Normal form used to compare translations: consecutive weakenings are
/// sorted with the least name innermost and variables are renamed `V0,
/// V1, ...` by first occurrence.
pub fn canonical_equation(eq: &Equation) -> (Term, Term, NameSet) {
    let mut table: BTreeMap<VarName, VarName> = BTreeMap::new();
    let lhs = canonical_term(&eq.lhs, &mut table);
    let rhs = canonical_term(&eq.rhs, &mut table);
    (lhs, rhs, eq.sort.clone())
}

fn canonical_term(t: &Term, table: &mut BTreeMap<VarName, VarName>) -> Term {
    match t {
        Term::Var { name, sort } => {
            let n = table.len();
            let renamed = table
                .entry(name.clone())
                .or_insert_with(|| VarName::new(format!("V{n}")))
                .clone();
            Term::Var {
                name: renamed,
                sort: sort.clone(),
            }
        }
        Term::App { sym, args } => Term::App {
            sym: sym.clone(),
            args: args.iter().map(|a| canonical_term(a, table)).collect(),
        },
        Term::Weaken { .. } => {
            let mut names = Vec::new();
            let mut cur = t;
            while let Term::Weaken { name, term } = cur {
                names.push(*name);
                cur = term;
            }
            let inner = canonical_term(cur, table);
            names.sort();
            names.into_iter().fold(inner, |acc, a| Term::weaken(a, acc))
        }
        Term::Rename { to, from, term } => Term::rename(*to, *from, canonical_term(term, table)),
    }
}

pub fn canonically_equal(a: &Equation, b: &Equation) -> bool {
    canonical_equation(a) == canonical_equation(b)
}
