mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::set;
use nomalg::model::{
    abstract_algebra, enumerate_algebras, enumerate_presheaves, hom_image, identity_map, product_algebra, quotient,
    satisfies, satisfies_equation, satisfies_implication, subalgebra_generated, FiniteAlgebra, ModelError, ModelFile,
    SortedMap, SortedSet,
};
use nomalg::theory::{parse_theory, translation_family, Implication, Theory, UaEquation};
use nomalg::NameSet;

const THEORY: &str = "\
family k : -> S @ S
family lam[x] : S+x -> S @ S+x
family var[x] : -> S+x @ S+x
eq e1 (X : {}) : lam[a]{}(w_a(X)) = X : {}
eq e2 (X : {}, Y : {}) : X = Y : {}
eq e3 () : lam[a]{}(var[a]{}) = k{} : {}
eq e4 () : var[a]{} = w_a(k{}) : {a}
eq e5 (X : {a}) : lam[a]{}(X) = k{} : {}
eq e6 (X : {a}, Y : {a}) : X = Y : {a}
";

fn theory() -> Theory {
    parse_theory(THEORY).unwrap()
}

/// Every algebra on one name with at most three elements per sort.
fn one_name_sweep() -> Vec<FiniteAlgebra> {
    let th = theory();
    enumerate_presheaves(&set("{a}"), 3)
        .iter()
        .flat_map(|x| enumerate_algebras(&th.signature, x, usize::MAX))
        .collect()
}

/// Algebras on two names with at most two elements per sort, first `n` of them.
fn two_name_sample(n: usize) -> Vec<FiniteAlgebra> {
    let th = theory();
    enumerate_presheaves(&set("{a,b}"), 2)
        .iter()
        .flat_map(|x| enumerate_algebras(&th.signature, x, 4))
        .take(n)
        .collect()
}

fn holds(a: &FiniteAlgebra, family: &[(NameSet, UaEquation)]) -> bool {
    family.iter().all(|(_, e)| satisfies(a, e).unwrap().holds)
}

fn full_seed(a: &FiniteAlgebra) -> SortedSet {
    a.universe()
        .subsets()
        .into_iter()
        .map(|s| {
            let n = a.carrier().size(&s).unwrap();
            (s, (0..n).collect())
        })
        .collect()
}

fn merge_all(a: &FiniteAlgebra) -> SortedMap {
    a.universe()
        .subsets()
        .into_iter()
        .map(|s| {
            let n = a.carrier().size(&s).unwrap();
            (s, vec![0; n])
        })
        .collect()
}

#[test]
fn hsp_constructions_preserve_satisfaction() {
    let th = theory();
    for (algebras, u) in [(one_name_sweep(), set("{a}")), (two_name_sample(60), set("{a,b}"))] {
        assert!(!algebras.is_empty());
        for e in &th.equations {
            let family = translation_family(&th.signature, e, &u).unwrap();
            let models: Vec<&FiniteAlgebra> = algebras.iter().filter(|a| holds(a, &family)).collect();
            for (i, a) in models.iter().enumerate() {
                for h in [identity_map(a), merge_all(a)] {
                    if let Ok(q) = quotient(a, &h) {
                        assert!(holds(&q, &family), "{}: quotient", e.id);
                    }
                }
                for s in u.subsets() {
                    for x in 0..a.carrier().size(&s).unwrap() {
                        let seed = BTreeMap::from([(s.clone(), BTreeSet::from([x]))]);
                        let sub = subalgebra_generated(a, &seed).unwrap();
                        assert!(holds(&sub, &family), "{}: subalgebra", e.id);
                    }
                }
                for b in models.iter().skip(i).take(2) {
                    let p = product_algebra(a, b).unwrap();
                    assert!(holds(&p, &family), "{}: product", e.id);
                }
                if u.len() >= 2 {
                    let small = u.without(u.last().unwrap());
                    let small_family = translation_family(&th.signature, e, &small).unwrap();
                    assert!(
                        holds(&abstract_algebra(a).unwrap(), &small_family),
                        "{}: abstraction",
                        e.id
                    );
                }
            }
        }
    }
}

#[test]
fn trivial_constructions_are_identities() {
    for a in two_name_sample(30) {
        let q = quotient(&a, &identity_map(&a)).unwrap();
        let sub = subalgebra_generated(&a, &full_seed(&a)).unwrap();
        for s in a.universe().subsets() {
            assert_eq!(q.carrier().size(&s).unwrap(), a.carrier().size(&s).unwrap());
            assert_eq!(sub.carrier().size(&s).unwrap(), a.carrier().size(&s).unwrap());
        }
        let img = hom_image(&a, &a, &identity_map(&a)).unwrap();
        assert_eq!(img.carrier().sorts().len(), a.carrier().sorts().len());
    }
}

#[test]
fn products_multiply_and_project() {
    let algebras = two_name_sample(8);
    for a in &algebras {
        for b in &algebras {
            let p = product_algebra(a, b).unwrap();
            let mut left = SortedMap::new();
            for s in a.universe().subsets() {
                let (na, nb) = (a.carrier().size(&s).unwrap(), b.carrier().size(&s).unwrap());
                assert_eq!(p.carrier().size(&s).unwrap(), na * nb);
                left.insert(s, (0..na * nb).map(|i| i / nb).collect());
            }
            hom_image(&p, a, &left).unwrap();
        }
    }
}

#[test]
fn non_homomorphisms_are_rejected() {
    let algebras = two_name_sample(40);
    let mut rejected = 0;
    for a in &algebras {
        for b in &algebras {
            let h: SortedMap = a
                .universe()
                .subsets()
                .into_iter()
                .map(|s| (s.clone(), vec![0; a.carrier().size(&s).unwrap()]))
                .collect();
            if b.carrier().sorts().iter().all(|s| b.carrier().size(s).unwrap() > 0) {
                match hom_image(a, b, &h) {
                    Err(ModelError::NotHomomorphism(_)) => rejected += 1,
                    Err(e) => panic!("{e}"),
                    Ok(_) => {}
                }
            }
        }
    }
    assert!(rejected > 0);
}

#[test]
fn vacuous_premises_make_implications_hold() {
    let th = theory();
    let e3 = th.equation("e3").unwrap().clone();
    let e2 = th.equation("e2").unwrap().clone();
    let imp = Implication {
        id: "i".into(),
        premises: vec![e3.clone()],
        conclusion: e2.clone(),
    };
    for a in one_name_sweep() {
        let premise = satisfies_equation(&a, &e3).unwrap().holds;
        let conclusion = satisfies_equation(&a, &e2).unwrap().holds;
        let v = satisfies_implication(&a, &imp).unwrap();
        assert_eq!(v.holds, !premise || conclusion);
    }
}

#[test]
fn model_files_round_trip() {
    let th = theory();
    for a in two_name_sample(20) {
        let file = ModelFile::from_algebra(&a);
        let text = file.render();
        let back = ModelFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_algebra(&th.signature).unwrap(), a);
        assert_eq!(back.render(), text);
    }
}

#[test]
fn corrupted_interpretations_break_equivariance() {
    let th = theory();
    let a = two_name_sample(40)
        .into_iter()
        .find(|a| {
            let x = a.carrier();
            let a_ = "a".parse().unwrap();
            x.size(&set("{}")).unwrap() == 2 && x.wk(&set("{}"), a_, 0).unwrap() != x.wk(&set("{}"), a_, 1).unwrap()
        })
        .expect("an algebra with two constants at {}");
    let mut file = ModelFile::from_algebra(&a);
    let entry = &mut file.interp.get_mut("k{}").unwrap()[0];
    let other = a
        .carrier()
        .carrier(&set("{}"))
        .unwrap()
        .iter()
        .find(|l| **l != entry.value)
        .unwrap()
        .clone();
    entry.value = other;
    assert!(matches!(
        file.to_algebra(&th.signature),
        Err(ModelError::Equivariance(_))
    ));
}
