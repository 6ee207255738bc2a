//! The abstraction `δA` of an algebra and the check that `δA` satisfies an
//! equation exactly when `A` satisfies its translation.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::algebra::{satisfies, FiniteAlgebra, ModelError, Verdict};
use crate::names::{Name, NameSet};
use crate::presheaf::{convert_bound, delta_with, Elem, FreshChoice, PresheafError};
use crate::theory::{translate_by_name, Equation, UaEquation};

pub fn abstract_algebra(a: &FiniteAlgebra) -> Result<FiniteAlgebra, ModelError> {
    abstract_algebra_with(a, FreshChoice::Least)
}

/// `f^{δA}([a]x_1, ..) = [a] (w_a.f)^A(x_1, ..)` with `a` the bound name
/// chosen at the index of `f`, converted to each sort's own bound name.
pub fn abstract_algebra_with(a: &FiniteAlgebra, choice: FreshChoice) -> Result<FiniteAlgebra, ModelError> {
    if let Some(f) = a.check_eop() {
        return Err(ModelError::Equivariance(Box::new(f)));
    }
    let d = delta_with(a.carrier(), choice)?;
    let x = a.carrier();
    let sig = a.signature();
    let bound = |s: &NameSet| d.bound_name(s).expect("sort of the abstraction");
    let mut tables: BTreeMap<_, HashMap<Vec<Elem>, Elem>> = BTreeMap::new();
    for op in sig.symbols_in(d.presheaf().universe()) {
        let fresh = bound(&op.index);
        let g = sig
            .weaken_symbol(&op.id, fresh)
            .ok_or_else(|| ModelError::Internal(format!("no action w_{fresh} . {}", op.id)))?;
        let gi = a
            .interp(&g)
            .ok_or_else(|| ModelError::Internal(format!("{g} missing from the algebra")))?;
        let mut table = HashMap::new();
        for (args, v) in gi.sorted_entries() {
            let conv =
                |s: &NameSet, e: Elem| -> Result<Elem, PresheafError> { convert_bound(x, s, fresh, bound(s), e) };
            let ys = args
                .iter()
                .zip(&op.arg_sorts)
                .map(|(&e, s)| conv(s, e))
                .collect::<Result<Vec<_>, _>>()?;
            table.insert(ys, conv(&op.result_sort, v)?);
        }
        tables.insert(op.id.clone(), table);
    }
    FiniteAlgebra::new(d.into_presheaf(), sig.clone(), tables)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbstractionCheck {
    pub equation: String,
    pub name: Name,
    pub translated: String,
    pub abstract_verdict: Verdict,
    pub translated_verdict: Verdict,
    pub agrees: bool,
}

/// The translation name: the least name of `universe` outside the sort and
/// the names of `e`.
pub fn abstraction_name(e: &Equation, universe: &NameSet) -> Option<Name> {
    universe.difference(&e.names()).first()
}

pub fn check_abstraction_equivalence(a: &FiniteAlgebra, e: &Equation) -> Result<AbstractionCheck, ModelError> {
    let abs = abstract_algebra(a)?;
    check_abstraction_equivalence_with(a, &abs, e)
}

/// As [`check_abstraction_equivalence`] with `δA` already built.
pub fn check_abstraction_equivalence_with(
    a: &FiniteAlgebra,
    abs: &FiniteAlgebra,
    e: &Equation,
) -> Result<AbstractionCheck, ModelError> {
    if !e.names().is_subset(abs.universe()) {
        return Err(ModelError::Scope {
            what: format!("equation {}", e.id),
            universe: abs.universe().clone(),
        });
    }
    let name = abstraction_name(e, a.universe()).ok_or(ModelError::Presheaf(PresheafError::HeadroomExhausted {
        sort: e.sort.clone(),
    }))?;
    let translated = translate_by_name(a.signature(), e, name).map_err(|err| ModelError::Internal(err.to_string()))?;
    let abstract_verdict = satisfies(abs, &UaEquation::ground(e.clone()))?;
    let translated_verdict = satisfies(a, &UaEquation::ground(translated.clone()))?;
    Ok(AbstractionCheck {
        equation: e.id.clone(),
        name,
        translated: translated.to_string(),
        agrees: abstract_verdict.holds == translated_verdict.holds,
        abstract_verdict,
        translated_verdict,
    })
}
