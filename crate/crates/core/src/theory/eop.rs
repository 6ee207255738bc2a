//! Equivariance equations `E_Op` tying each symbol to its weakened and
//! renamed instances.

use super::signature::{OpSymbol, SymbolId, UniformSignature};
use super::term::{Equation, Term, UaEquation};
use crate::names::{GeneratorStep, Name, NameSet};

/// Which generator an equivariance equation is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EopInstance {
    pub symbol: SymbolId,
    pub step: GeneratorStep,
    pub equation: UaEquation,
}

fn arg_vars(op: &OpSymbol) -> Vec<Term> {
    op.arg_sorts
        .iter()
        .enumerate()
        .map(|(i, s)| Term::var(format!("X{}", i + 1), s.clone()))
        .collect()
}

/// `(a/b)` applied when `b` lies in the sort, the identity otherwise.
fn angle(a: Name, b: Name, t: Term, sort: &NameSet) -> Term {
    if sort.contains(b) {
        Term::rename(a, b, t)
    } else {
        t
    }
}

/// For every `f` with index `S` inside `universe`, `a ∉ S` and `b ∈ S`:
/// `(w_a.f)(w_a x_1, ..) = w_a f(x_1, ..)` and
/// `((a/b).f)(<a/b> x_1, ..) = <a/b> f(x_1, ..)`.
pub fn gen_equivariance_equations(sig: &UniformSignature, universe: &NameSet) -> Vec<EopInstance> {
    let mut out = Vec::new();
    for op in sig.symbols_in(universe) {
        let xs = arg_vars(&op);
        let base = Term::app(op.id.clone(), xs.clone());
        for a in universe.difference(&op.index).iter() {
            let step = GeneratorStep::weaken(op.index.clone(), a);
            if let Some(g) = sig.act(&step, &op.id) {
                let lhs = Term::app(g, xs.iter().map(|x| Term::weaken(a, x.clone())).collect());
                let rhs = Term::weaken(a, base.clone());
                out.push(EopInstance {
                    symbol: op.id.clone(),
                    step: step.clone(),
                    equation: UaEquation::ground(Equation::new(
                        format!("eop.{}", out.len() + 1),
                        lhs,
                        rhs,
                        op.result_sort.with(a),
                    )),
                });
            }
            for b in op.index.iter() {
                let step = GeneratorStep::rename(op.index.without(b), b, a);
                let Some(g) = sig.act(&step, &op.id) else { continue };
                let lhs = Term::app(
                    g,
                    xs.iter()
                        .zip(&op.arg_sorts)
                        .map(|(x, s)| angle(a, b, x.clone(), s))
                        .collect(),
                );
                let rhs = angle(a, b, base.clone(), &op.result_sort);
                let sort = if op.result_sort.contains(b) {
                    op.result_sort.without(b).with(a)
                } else {
                    op.result_sort.clone()
                };
                out.push(EopInstance {
                    symbol: op.id.clone(),
                    step,
                    equation: UaEquation::ground(Equation::new(format!("eop.{}", out.len() + 1), lhs, rhs, sort)),
                });
            }
        }
    }
    out
}
