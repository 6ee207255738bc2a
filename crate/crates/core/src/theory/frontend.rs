//! Nominal-algebra judgments `a#X, ... ⊢ s = t` and their uniform form.
//!
//! Atoms become constants of the atom family, abstractions become the
//! binder family, other term formers `f(..)` become `f{T}` at the union of
//! their argument sorts. Arguments are weakened up to that union, and a
//! freshness constraint `a#X` that no weakening already witnesses wraps every
//! occurrence of `X` in `w_a`.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::signature::{SymbolId, UniformSignature};
use super::term::{freshness_set, Equation, Term, TermError, VarName};
use crate::names::{Name, NameSet};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NominalTerm {
    Var(String),
    Atom(Name),
    Abs(Name, Box<NominalTerm>),
    App(String, Vec<NominalTerm>),
}

impl fmt::Display for NominalTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NominalTerm::Var(x) => f.write_str(x),
            NominalTerm::Atom(a) => write!(f, "{a}"),
            NominalTerm::Abs(a, t) => write!(f, "[{a}]{t}"),
            NominalTerm::App(g, args) => {
                let parts: Vec<String> = args.iter().map(NominalTerm::to_string).collect();
                write!(f, "{g}({})", parts.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub id: String,
    /// Declared sorts of the variables; undeclared variables have sort `{}`.
    pub vars: BTreeMap<String, NameSet>,
    pub fresh: Vec<(Name, String)>,
    pub lhs: NominalTerm,
    pub rhs: NominalTerm,
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ctx: Vec<String> = self.fresh.iter().map(|(a, x)| format!("{a}#{x}")).collect();
        write!(f, "{} ⊢ {} = {}", ctx.join(", "), self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error("contradictory context: {name}#{var} but {name} lies in the sort {sort} of {var}")]
    Contradictory { name: Name, var: String, sort: NameSet },
    #[error("the signature has no family `{0}`")]
    MissingFamily(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Which families stand for atoms and abstraction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrontendConfig {
    pub atom_family: String,
    pub abs_family: String,
}

impl Default for FrontendConfig {
    fn default() -> Self {
        FrontendConfig {
            atom_family: "var".into(),
            abs_family: "lam".into(),
        }
    }
}

fn weaken_to(t: Term, from: &NameSet, to: &NameSet) -> Term {
    to.difference(from).iter().fold(t, |acc, c| Term::weaken(c, acc))
}

struct Builder<'a> {
    cfg: &'a FrontendConfig,
    vars: &'a BTreeMap<String, NameSet>,
    wrap: &'a BTreeMap<String, NameSet>,
}

impl Builder<'_> {
    fn build(&self, t: &NominalTerm) -> (Term, NameSet) {
        match t {
            NominalTerm::Var(x) => {
                let sort = self.vars.get(x).cloned().unwrap_or_default();
                let v = Term::var(x.clone(), sort.clone());
                let wrap = self.wrap.get(x).cloned().unwrap_or_default();
                (weaken_to(v, &sort, &sort.union(&wrap)), sort.union(&wrap))
            }
            NominalTerm::Atom(a) => (
                Term::app(
                    SymbolId::new(self.cfg.atom_family.clone(), vec![*a], NameSet::new()),
                    vec![],
                ),
                NameSet::singleton(*a),
            ),
            NominalTerm::Abs(a, body) => {
                let (mut b, mut sort) = self.build(body);
                if !sort.contains(*a) {
                    b = Term::weaken(*a, b);
                    sort = sort.with(*a);
                }
                let base = sort.without(*a);
                (
                    Term::app(
                        SymbolId::new(self.cfg.abs_family.clone(), vec![*a], base.clone()),
                        vec![b],
                    ),
                    base,
                )
            }
            NominalTerm::App(g, args) => {
                let built: Vec<(Term, NameSet)> = args.iter().map(|u| self.build(u)).collect();
                let union = built.iter().fold(NameSet::new(), |acc, (_, s)| acc.union(s));
                let args = built.into_iter().map(|(t, s)| weaken_to(t, &s, &union)).collect();
                (Term::app(SymbolId::plain(g.clone(), union.clone()), args), union)
            }
        }
    }
}

/// The uniform equation of a nominal judgment.
pub fn frontend_nominal_judgment(
    sig: &UniformSignature,
    j: &Judgment,
    cfg: &FrontendConfig,
) -> Result<Equation, FrontendError> {
    for fam in [&cfg.atom_family, &cfg.abs_family] {
        if sig.family(fam).is_none() {
            return Err(FrontendError::MissingFamily(fam.clone()));
        }
    }
    for (a, x) in &j.fresh {
        let sort = j.vars.get(x).cloned().unwrap_or_default();
        if sort.contains(*a) {
            return Err(FrontendError::Contradictory {
                name: *a,
                var: x.clone(),
                sort,
            });
        }
    }
    let mut wrap: BTreeMap<String, NameSet> = BTreeMap::new();
    loop {
        let b = Builder {
            cfg,
            vars: &j.vars,
            wrap: &wrap,
        };
        let (l, ls) = b.build(&j.lhs);
        let (r, rs) = b.build(&j.rhs);
        let sort = ls.union(&rs);
        let eq = Equation::new(j.id.clone(), weaken_to(l, &ls, &sort), weaken_to(r, &rs, &sort), sort);
        eq.check(sig)?;
        let mut grew = false;
        for (a, x) in &j.fresh {
            let name = VarName::new(x.clone());
            if !eq.lhs.contains_var(&name) && !eq.rhs.contains_var(&name) {
                continue;
            }
            if !freshness_set(sig, &eq, &name)?.contains(*a) {
                wrap.entry(x.clone()).or_default().insert(*a);
                grew = true;
            }
        }
        if !grew {
            return Ok(eq);
        }
    }
}
