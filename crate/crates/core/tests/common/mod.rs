#![allow(dead_code)]

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use nomalg::theory::{SymbolId, Term};
use nomalg::{Name, NameSet, NominalValue, Permutation};

pub fn set(s: &str) -> NameSet {
    s.parse().unwrap()
}

pub fn name(s: &str) -> Name {
    s.parse().unwrap()
}

/// Values over the first `names` names with at most `depth` nested constructors.
pub fn value(names: u32, depth: u32) -> impl Strategy<Value = NominalValue> {
    let leaf = prop_oneof![
        (0..names).prop_map(|i| NominalValue::atom(Name::new(i))),
        Just(NominalValue::Unit),
    ];
    leaf.prop_recursive(depth, 32, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(v, w)| NominalValue::pair(v, w)),
            inner.clone().prop_map(|v| NominalValue::tag("t", v)),
            (0..names, inner).prop_map(|(a, v)| NominalValue::abs_raw(Name::new(a), v)),
        ]
    })
}

pub fn permutation(names: usize) -> impl Strategy<Value = Permutation> {
    prop::sample::select(Permutation::all_on(&NameSet::first_n(names)))
}

/// Raw λ-terms over the first `names` names, binders not canonicalized.
pub fn lambda_term(names: u32, depth: u32) -> impl Strategy<Value = NominalValue> {
    let leaf = (0..names).prop_map(|i| nomalg::lambda::var(Name::new(i)));
    leaf.prop_recursive(depth, 32, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(t, u)| nomalg::lambda::app(t, u)),
            (0..names, inner).prop_map(|(a, t)| NominalValue::tag("lam", NominalValue::abs_raw(Name::new(a), t))),
        ]
    })
}

pub const TERM_THEORY: &str = "\
family app : S, S -> S @ S
family k : -> S @ S
family lam[x] : S+x -> S @ S+x
family s : S -> S @ S
family var[x] : -> S+x @ S+x
";

/// Random well-sorted terms over `TERM_THEORY`.
pub struct TermGen<'a> {
    pub rng: &'a mut ChaCha8Rng,
    pub pool: NameSet,
    pub vars: Vec<(String, NameSet)>,
}

impl<'a> TermGen<'a> {
    pub fn new(rng: &'a mut ChaCha8Rng, pool: NameSet) -> Self {
        TermGen {
            rng,
            pool,
            vars: Vec::new(),
        }
    }

    fn pick(&mut self, s: &NameSet) -> Name {
        let v: Vec<Name> = s.iter().collect();
        *v.choose(self.rng).unwrap()
    }

    fn var(&mut self, t: &NameSet) -> Term {
        let reuse = self.rng.gen_bool(0.7);
        if let Some((x, _)) = self.vars.iter().find(|(_, s)| s == t).filter(|_| reuse) {
            return Term::var(x.clone(), t.clone());
        }
        let x = format!("X{}", self.vars.len());
        self.vars.push((x.clone(), t.clone()));
        Term::var(x, t.clone())
    }

    pub fn term(&mut self, t: &NameSet, depth: usize) -> Term {
        let outside = self.pool.difference(t);
        loop {
            let choice = if depth == 0 {
                self.rng.gen_range(0..3)
            } else {
                self.rng.gen_range(0..8)
            };
            match choice {
                0 => return self.var(t),
                1 if !t.is_empty() => {
                    let a = self.pick(t);
                    return Term::app(SymbolId::new("var", vec![a], t.without(a)), vec![]);
                }
                2 => return Term::app(SymbolId::plain("k", t.clone()), vec![]),
                3 => {
                    let x = self.term(t, depth - 1);
                    return Term::app(SymbolId::plain("s", t.clone()), vec![x]);
                }
                4 => {
                    let x = self.term(t, depth - 1);
                    let y = self.term(t, depth - 1);
                    return Term::app(SymbolId::plain("app", t.clone()), vec![x, y]);
                }
                5 if !outside.is_empty() => {
                    let a = self.pick(&outside);
                    let x = self.term(&t.with(a), depth - 1);
                    return Term::app(SymbolId::new("lam", vec![a], t.clone()), vec![x]);
                }
                6 if !t.is_empty() => {
                    let a = self.pick(t);
                    let x = self.term(&t.without(a), depth - 1);
                    return Term::weaken(a, x);
                }
                7 if !t.is_empty() && !outside.is_empty() => {
                    let b = self.pick(t);
                    let a = self.pick(&outside);
                    let x = self.term(&t.without(b).with(a), depth - 1);
                    return Term::rename(b, a, x);
                }
                _ => {}
            }
        }
    }
}
