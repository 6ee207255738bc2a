//! Finite algebras over a truncated presheaf and exhaustive satisfaction.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::names::{GeneratorStep, NameSet};
use crate::presheaf::{validate_presheaf, Elem, PresheafError, TruncatedPresheaf};
use crate::theory::{
    Equation, Implication, OpSymbol, SymbolId, Term, TermError, UaEquation, UniformSignature, VarName,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error("carrier is not a presheaf: {0}")]
    NotAPresheaf(String),
    #[error("symbol `{0}` is not in the signature or lies outside the universe")]
    UnknownSymbol(String),
    #[error("table of `{symbol}`: {message}")]
    BadTable { symbol: String, message: String },
    #[error("equivariance fails: {0}")]
    Equivariance(Box<EopFailure>),
    #[error("{what} lies outside the universe {universe}")]
    Scope { what: String, universe: NameSet },
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("not a homomorphism: {0}")]
    NotHomomorphism(String),
    #[error("internal invariant broken: {0}")]
    Internal(String),
}

/// A failed equivariance instance: `step . f` disagrees with `f` on `args`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EopFailure {
    pub symbol: SymbolId,
    pub step: String,
    pub args: Vec<String>,
    pub expected: String,
    pub found: Option<String>,
}

impl fmt::Display for EopFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} . {} at ({}): expected {}, found {}",
            self.step,
            self.symbol,
            self.args.join(", "),
            self.expected,
            self.found.as_deref().unwrap_or("undefined")
        )
    }
}

/// The interpretation of one symbol; entries missing from the table are
/// undefined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interp {
    pub op: OpSymbol,
    pub table: HashMap<Vec<Elem>, Elem>,
}

impl Interp {
    pub fn get(&self, args: &[Elem]) -> Option<Elem> {
        self.table.get(args).copied()
    }

    /// Entries in argument order.
    pub fn sorted_entries(&self) -> Vec<(&Vec<Elem>, Elem)> {
        let mut v: Vec<_> = self.table.iter().map(|(k, &x)| (k, x)).collect();
        v.sort();
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    carrier: TruncatedPresheaf,
    signature: UniformSignature,
    interp: BTreeMap<SymbolId, Interp>,
}

impl FiniteAlgebra {
    /// Validates the carrier, the tables and every equivariance instance.
    pub fn new(
        carrier: TruncatedPresheaf,
        signature: UniformSignature,
        tables: BTreeMap<SymbolId, HashMap<Vec<Elem>, Elem>>,
    ) -> Result<Self, ModelError> {
        let alg = Self::new_unchecked(carrier, signature, tables)?;
        if let Some(f) = alg.check_eop() {
            return Err(ModelError::Equivariance(Box::new(f)));
        }
        Ok(alg)
    }

    /// Validates the carrier and the shape of the tables but not equivariance.
    pub fn new_unchecked(
        carrier: TruncatedPresheaf,
        signature: UniformSignature,
        mut tables: BTreeMap<SymbolId, HashMap<Vec<Elem>, Elem>>,
    ) -> Result<Self, ModelError> {
        let report = validate_presheaf(&carrier)?;
        if let Some(v) = report.violations.first() {
            return Err(ModelError::NotAPresheaf(v.to_string()));
        }
        let universe = carrier.universe().clone();
        let mut interp = BTreeMap::new();
        for op in signature.symbols_in(&universe) {
            let table = tables.remove(&op.id).unwrap_or_default();
            for (args, &v) in &table {
                let bad = |m: String| ModelError::BadTable {
                    symbol: op.id.to_string(),
                    message: m,
                };
                if args.len() != op.arity() {
                    return Err(bad(format!("entry with {} arguments", args.len())));
                }
                for (x, s) in args.iter().zip(&op.arg_sorts) {
                    if *x >= carrier.size(s)? {
                        return Err(bad(format!("argument {x} outside the carrier of {s}")));
                    }
                }
                if v >= carrier.size(&op.result_sort)? {
                    return Err(bad(format!("value {v} outside the carrier of {}", op.result_sort)));
                }
            }
            interp.insert(op.id.clone(), Interp { op, table });
        }
        if let Some(id) = tables.keys().next() {
            return Err(ModelError::UnknownSymbol(id.to_string()));
        }
        Ok(FiniteAlgebra {
            carrier,
            signature,
            interp,
        })
    }

    pub fn carrier(&self) -> &TruncatedPresheaf {
        &self.carrier
    }

    pub fn signature(&self) -> &UniformSignature {
        &self.signature
    }

    pub fn universe(&self) -> &NameSet {
        self.carrier.universe()
    }

    pub fn interp(&self, id: &SymbolId) -> Option<&Interp> {
        self.interp.get(id)
    }

    pub fn interps(&self) -> impl Iterator<Item = &Interp> {
        self.interp.values()
    }

    /// `f(args)`, `None` when undefined or `f` is unknown.
    pub fn apply(&self, id: &SymbolId, args: &[Elem]) -> Option<Elem> {
        self.interp.get(id)?.get(args)
    }

    pub fn is_total(&self) -> bool {
        self.interp.values().all(|i| {
            let expected: usize =
                i.op.arg_sorts
                    .iter()
                    .map(|s| self.carrier.size(s).unwrap_or(0))
                    .product();
            i.table.len() == expected
        })
    }

    /// Carrier of `step.target()` hit by transporting an argument of sort `s`.
    fn transport(&self, step: &GeneratorStep, s: &NameSet, x: Elem) -> Result<Elem, PresheafError> {
        match step {
            GeneratorStep::Weaken { name, .. } => self.carrier.wk(s, *name, x),
            GeneratorStep::Rename { from, to, .. } => {
                if s.contains(*from) {
                    self.carrier.ren(&s.without(*from), *from, *to, x)
                } else {
                    Ok(x)
                }
            }
        }
    }

    /// The least failing equivariance instance, checked entry by entry: each
    /// defined `f(x_1..x_n) = v` forces `(u.f)(u x_1..u x_n) = u v`.
    pub fn check_eop(&self) -> Option<EopFailure> {
        let universe = self.universe().clone();
        for interp in self.interp.values() {
            let op = &interp.op;
            let mut steps = Vec::new();
            for a in universe.difference(&op.index).iter() {
                steps.push(GeneratorStep::weaken(op.index.clone(), a));
                for b in op.index.iter() {
                    steps.push(GeneratorStep::rename(op.index.without(b), b, a));
                }
            }
            for step in steps {
                let label = |s: &NameSet, x: Elem| self.carrier.label(s, x).unwrap_or("?").to_string();
                let Some(g) = self.signature.act(&step, &op.id) else {
                    continue;
                };
                let Some(gi) = self.interp.get(&g) else { continue };
                for (args, v) in interp.sorted_entries() {
                    let moved: Vec<Elem> = args
                        .iter()
                        .zip(&op.arg_sorts)
                        .map(|(&x, s)| self.transport(&step, s, x).expect("valid carrier"))
                        .collect();
                    let want = self.transport(&step, &op.result_sort, v).expect("valid carrier");
                    let got = gi.get(&moved);
                    if got != Some(want) {
                        return Some(EopFailure {
                            symbol: op.id.clone(),
                            step: step.to_string(),
                            args: args.iter().zip(&op.arg_sorts).map(|(&x, s)| label(s, x)).collect(),
                            expected: label(&gi.op.result_sort, want),
                            found: got.map(|y| label(&gi.op.result_sort, y)),
                        });
                    }
                }
            }
        }
        None
    }

    fn compile<'a>(&'a self, t: &Term, vars: &BTreeMap<VarName, usize>) -> Result<(Compiled<'a>, NameSet), ModelError> {
        let universe = self.universe();
        Ok(match t {
            Term::Var { name, sort } => {
                if !sort.is_subset(universe) {
                    return Err(ModelError::Scope {
                        what: format!("sort {sort} of {name}"),
                        universe: universe.clone(),
                    });
                }
                (Compiled::Var(vars[name]), sort.clone())
            }
            Term::App { sym, args } => {
                let interp = self.interp.get(sym).ok_or_else(|| ModelError::Scope {
                    what: format!("symbol {sym}"),
                    universe: universe.clone(),
                })?;
                let args = args
                    .iter()
                    .map(|a| self.compile(a, vars).map(|(c, _)| c))
                    .collect::<Result<Vec<_>, _>>()?;
                (Compiled::App(interp, args), interp.op.result_sort.clone())
            }
            Term::Weaken { name, term } => {
                let (c, s) = self.compile(term, vars)?;
                let out = s.with(*name);
                if !out.is_subset(universe) {
                    return Err(ModelError::Scope {
                        what: format!("sort {out}"),
                        universe: universe.clone(),
                    });
                }
                (Compiled::Wk(s, *name, Box::new(c)), out)
            }
            Term::Rename { to, from, term } => {
                let (c, s) = self.compile(term, vars)?;
                let base = s.without(*from);
                let out = base.with(*to);
                if !out.is_subset(universe) {
                    return Err(ModelError::Scope {
                        what: format!("sort {out}"),
                        universe: universe.clone(),
                    });
                }
                (Compiled::Ren(base, *from, *to, Box::new(c)), out)
            }
        })
    }

    /// Evaluates a term under an assignment of its variables.
    pub fn eval(&self, t: &Term, valuation: &BTreeMap<VarName, Elem>) -> Result<Option<Elem>, ModelError> {
        let order: BTreeMap<VarName, usize> = valuation.keys().cloned().zip(0..).collect();
        let values: Vec<Elem> = valuation.values().copied().collect();
        let (c, _) = self.compile(t, &order)?;
        Ok(c.eval(&self.carrier, &values))
    }
}

enum Compiled<'a> {
    Var(usize),
    App(&'a Interp, Vec<Compiled<'a>>),
    Wk(NameSet, crate::names::Name, Box<Compiled<'a>>),
    Ren(NameSet, crate::names::Name, crate::names::Name, Box<Compiled<'a>>),
}

impl Compiled<'_> {
    fn eval(&self, carrier: &TruncatedPresheaf, vals: &[Elem]) -> Option<Elem> {
        match self {
            Compiled::Var(i) => Some(vals[*i]),
            Compiled::App(interp, args) => {
                let mut xs = Vec::with_capacity(args.len());
                for a in args {
                    xs.push(a.eval(carrier, vals)?);
                }
                interp.get(&xs)
            }
            Compiled::Wk(s, a, t) => carrier.wk(s, *a, t.eval(carrier, vals)?).ok(),
            Compiled::Ren(s, a, b, t) => carrier.ren(s, *a, *b, t.eval(carrier, vals)?).ok(),
        }
    }
}

/// A valuation of an equation's variables, as element labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub assignment: Vec<(VarName, String)>,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.assignment.iter().map(|(v, x)| format!("{v} := {x}")).collect();
        write!(f, "{} gives {} vs {}", parts.join(", "), self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    /// The lexicographically least failing valuation.
    pub witness: Option<Witness>,
    pub valuations: usize,
    /// Valuations on which some side is undefined.
    pub skipped: usize,
}

fn sorted_vars(terms: &[&Term]) -> Vec<(VarName, NameSet)> {
    let mut vars = Vec::new();
    for t in terms {
        t.vars_into(&mut vars);
    }
    vars.sort();
    vars
}

/// Calls `f` on every valuation in lexicographic order until it returns false.
fn for_each_valuation(
    carrier: &TruncatedPresheaf,
    vars: &[(VarName, NameSet)],
    mut f: impl FnMut(&[Elem]) -> bool,
) -> Result<(), ModelError> {
    let sizes: Vec<usize> = vars.iter().map(|(_, s)| carrier.size(s)).collect::<Result<_, _>>()?;
    if sizes.contains(&0) {
        return Ok(());
    }
    let mut cur = vec![0; vars.len()];
    loop {
        if !f(&cur) {
            return Ok(());
        }
        let mut i = vars.len();
        loop {
            if i == 0 {
                return Ok(());
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < sizes[i] {
                break;
            }
            cur[i] = 0;
        }
    }
}

fn scope_check(a: &FiniteAlgebra, sort: &NameSet) -> Result<(), ModelError> {
    if sort.is_subset(a.universe()) {
        Ok(())
    } else {
        Err(ModelError::Scope {
            what: format!("sort {sort}"),
            universe: a.universe().clone(),
        })
    }
}

/// Exhaustive check of `lhs = rhs` over every valuation; valuations where a
/// side is undefined are skipped.
pub fn satisfies(a: &FiniteAlgebra, e: &UaEquation) -> Result<Verdict, ModelError> {
    satisfies_equation(a, e.equation())
}

pub fn satisfies_equation(a: &FiniteAlgebra, e: &Equation) -> Result<Verdict, ModelError> {
    scope_check(a, &e.sort)?;
    let vars = sorted_vars(&[&e.lhs, &e.rhs]);
    let index: BTreeMap<VarName, usize> = vars.iter().map(|(v, _)| v.clone()).zip(0..).collect();
    let (l, ls) = a.compile(&e.lhs, &index)?;
    let (r, _) = a.compile(&e.rhs, &index)?;
    let mut verdict = Verdict {
        holds: true,
        witness: None,
        valuations: 0,
        skipped: 0,
    };
    let carrier = a.carrier();
    for_each_valuation(carrier, &vars, |vals| {
        verdict.valuations += 1;
        match (l.eval(carrier, vals), r.eval(carrier, vals)) {
            (Some(x), Some(y)) if x != y => {
                verdict.holds = false;
                verdict.witness = Some(Witness {
                    assignment: vars
                        .iter()
                        .zip(vals)
                        .map(|((v, s), &x)| (v.clone(), carrier.label(s, x).unwrap_or("?").to_string()))
                        .collect(),
                    lhs: carrier.label(&ls, x).unwrap_or("?").to_string(),
                    rhs: carrier.label(&ls, y).unwrap_or("?").to_string(),
                });
                false
            }
            (Some(_), Some(_)) => true,
            _ => {
                verdict.skipped += 1;
                true
            }
        }
    })?;
    Ok(verdict)
}

/// Every valuation satisfying all premises (with both sides defined)
/// satisfies the conclusion wherever it is defined.
pub fn satisfies_implication(a: &FiniteAlgebra, imp: &Implication) -> Result<Verdict, ModelError> {
    for e in imp.components() {
        scope_check(a, &e.sort)?;
    }
    let terms: Vec<&Term> = imp.components().flat_map(|e| [&e.lhs, &e.rhs]).collect();
    let vars = sorted_vars(&terms);
    let index: BTreeMap<VarName, usize> = vars.iter().map(|(v, _)| v.clone()).zip(0..).collect();
    let mut premises = Vec::new();
    for p in &imp.premises {
        premises.push((a.compile(&p.lhs, &index)?.0, a.compile(&p.rhs, &index)?.0));
    }
    let (cl, cs) = a.compile(&imp.conclusion.lhs, &index)?;
    let (cr, _) = a.compile(&imp.conclusion.rhs, &index)?;
    let carrier = a.carrier();
    let mut verdict = Verdict {
        holds: true,
        witness: None,
        valuations: 0,
        skipped: 0,
    };
    for_each_valuation(carrier, &vars, |vals| {
        verdict.valuations += 1;
        let premised = premises
            .iter()
            .all(|(l, r)| matches!((l.eval(carrier, vals), r.eval(carrier, vals)), (Some(x), Some(y)) if x == y));
        if !premised {
            verdict.skipped += 1;
            return true;
        }
        match (cl.eval(carrier, vals), cr.eval(carrier, vals)) {
            (Some(x), Some(y)) if x != y => {
                verdict.holds = false;
                verdict.witness = Some(Witness {
                    assignment: vars
                        .iter()
                        .zip(vals)
                        .map(|((v, s), &x)| (v.clone(), carrier.label(s, x).unwrap_or("?").to_string()))
                        .collect(),
                    lhs: carrier.label(&cs, x).unwrap_or("?").to_string(),
                    rhs: carrier.label(&cs, y).unwrap_or("?").to_string(),
                });
                false
            }
            (Some(_), Some(_)) => true,
            _ => {
                verdict.skipped += 1;
                true
            }
        }
    })?;
    Ok(verdict)
}
