//! Translation of uniform equations by fresh names: `tr_a` and `tr_S`.

use std::collections::BTreeMap;

use thiserror::Error;

use super::signature::UniformSignature;
use super::term::{freshness_in, Equation, Implication, Term, TermError, UaEquation, VarName};
use crate::names::{Name, NameSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("cannot translate by {name}: it lies in the sort {sort}")]
    NotFresh { name: Name, sort: NameSet },
    #[error("no action w_{name} . {symbol}")]
    MissingAction { symbol: String, name: Name },
    #[error(transparent)]
    Term(#[from] TermError),
}

type FreshTable = BTreeMap<VarName, NameSet>;

fn fresh_table<'a>(
    sig: &UniformSignature,
    terms: impl Iterator<Item = &'a Term> + Clone,
    vars: &[(VarName, NameSet)],
) -> Result<FreshTable, TermError> {
    let mut table = FreshTable::new();
    for (x, _) in vars {
        table.insert(x.clone(), freshness_in(sig, terms.clone(), x)?);
    }
    Ok(table)
}

fn tr(sig: &UniformSignature, t: &Term, a: Name, fr: &FreshTable) -> Result<Term, TranslateError> {
    Ok(match t {
        Term::App { sym, args } => {
            let op = sig.symbol(sym).ok_or_else(|| TermError::UnknownSymbol {
                at: "translation".into(),
                symbol: sym.to_string(),
            })?;
            if op.index.contains(a) {
                Term::weaken(a, t.clone())
            } else {
                let moved = sig.weaken_symbol(sym, a).ok_or_else(|| TranslateError::MissingAction {
                    symbol: sym.to_string(),
                    name: a,
                })?;
                let args = args.iter().map(|u| tr(sig, u, a, fr)).collect::<Result<Vec<_>, _>>()?;
                Term::app(moved, args)
            }
        }
        Term::Weaken { name, term } => Term::weaken(*name, tr(sig, term, a, fr)?),
        Term::Rename { to, from, term } => {
            if *from == a {
                Term::weaken(a, t.clone())
            } else {
                Term::rename(*to, *from, tr(sig, term, a, fr)?)
            }
        }
        Term::Var { name, sort } => {
            if fr.get(name).is_some_and(|f| f.contains(a)) {
                Term::weaken(a, t.clone())
            } else {
                Term::Var {
                    name: name.primed(a),
                    sort: sort.with(a),
                }
            }
        }
    })
}

fn translate_with(sig: &UniformSignature, eq: &Equation, a: Name, fr: &FreshTable) -> Result<Equation, TranslateError> {
    if eq.sort.contains(a) {
        return Err(TranslateError::NotFresh {
            name: a,
            sort: eq.sort.clone(),
        });
    }
    Ok(Equation {
        id: format!("{}.{a}", eq.id),
        lhs: tr(sig, &eq.lhs, a, fr)?,
        rhs: tr(sig, &eq.rhs, a, fr)?,
        sort: eq.sort.with(a),
    })
}

/// `tr_a(u) = tr_a(v) : T ∪ {a}`.
pub fn translate_by_name(sig: &UniformSignature, eq: &Equation, a: Name) -> Result<Equation, TranslateError> {
    eq.check(sig)?;
    let fr = fresh_table(sig, [&eq.lhs, &eq.rhs].into_iter(), &eq.vars())?;
    translate_with(sig, eq, a, &fr)
}

fn check_disjoint(sort: &NameSet, s: &NameSet) -> Result<(), TranslateError> {
    match s.intersection(sort).first() {
        Some(name) => Err(TranslateError::NotFresh {
            name,
            sort: sort.clone(),
        }),
        None => Ok(()),
    }
}

/// Translates by each name of `s` in the given order, first name first.
pub fn translate_in_order(sig: &UniformSignature, eq: &Equation, order: &[Name]) -> Result<Equation, TranslateError> {
    let mut cur = eq.clone();
    for &a in order {
        cur = translate_by_name(sig, &cur, a)?;
    }
    Ok(cur)
}

/// `tr_S` applied in increasing name order; the id lists the names of `s`.
pub fn translate_by_set(sig: &UniformSignature, eq: &Equation, s: &NameSet) -> Result<UaEquation, TranslateError> {
    check_disjoint(&eq.sort, s)?;
    let order: Vec<Name> = s.iter().collect();
    let out = translate_in_order(sig, eq, &order)?;
    Ok(UaEquation::ground(out))
}

/// Every translation `tr_S(eq)` whose names stay inside `universe`, by
/// increasing `S`.
pub fn translation_family(
    sig: &UniformSignature,
    eq: &Equation,
    universe: &NameSet,
) -> Result<Vec<(NameSet, UaEquation)>, TranslateError> {
    let mut out = Vec::new();
    if !eq.names().is_subset(universe) {
        return Ok(out);
    }
    for s in universe.difference(&eq.sort).subsets() {
        let t = translate_by_set(sig, eq, &s)?;
        if t.within(universe) {
            out.push((s, t));
        }
    }
    Ok(out)
}

/// Translates every component of an implication by `s`, with the
/// freshness set of each variable unioned across the components.
pub fn translate_implication(
    sig: &UniformSignature,
    imp: &Implication,
    s: &NameSet,
) -> Result<Implication, TranslateError> {
    imp.check(sig)?;
    check_disjoint(&imp.sort(), s)?;
    let mut cur = imp.clone();
    for a in s.iter() {
        let terms: Vec<&Term> = cur.components().flat_map(|e| [&e.lhs, &e.rhs]).collect();
        let fr = fresh_table(sig, terms.iter().copied(), &cur.vars())?;
        cur = Implication {
            id: format!("{}.{a}", cur.id),
            premises: cur
                .premises
                .iter()
                .map(|e| translate_with(sig, e, a, &fr))
                .collect::<Result<_, _>>()?,
            conclusion: translate_with(sig, &cur.conclusion, a, &fr)?,
        };
    }
    Ok(cur)
}
