mod common;

use proptest::prelude::*;

use common::set;
use nomalg::{injection_factor, GeneratorStep, Injection, Name, NameSet, Permutation};

#[test]
fn composition_is_associative_with_identity() {
    let perms = Permutation::all_on(&NameSet::first_n(4));
    let names: Vec<Name> = NameSet::first_n(5).iter().collect();
    let same = |p: &Permutation, q: &Permutation| names.iter().all(|&a| p.apply(a) == q.apply(a));
    let id = Permutation::identity();
    for p in &perms {
        assert!(same(&p.compose(&id), p) && same(&id.compose(p), p));
        assert!(same(&p.compose(&p.inverse()), &id));
        for q in &perms {
            let pq = p.compose(q);
            for r in &perms {
                assert!(same(&pq.compose(r), &p.compose(&q.compose(r))));
            }
        }
    }
}

#[test]
fn factorizations_compose_back() {
    let u = NameSet::first_n(5);
    let mut seen = 0;
    for t in u.subsets() {
        for s in t.subsets() {
            for inj in Injection::enumerate(&s, &t) {
                let steps = injection_factor(&inj);
                assert!(steps.iter().all(GeneratorStep::is_valid), "{inj:?}: {steps:?}");
                let back = Injection::from_steps(&s, &steps).expect("steps compose");
                assert_eq!(back.target(), inj.target());
                for a in s.iter() {
                    assert_eq!(back.apply(a), inj.apply(a));
                }
                seen += 1;
            }
        }
    }
    assert_eq!(seen, 3012);
}

#[test]
fn emitted_steps_respect_side_conditions() {
    let u = NameSet::first_n(4);
    for s in u.subsets() {
        for step in GeneratorStep::out_of(&s, &u) {
            assert!(step.is_valid());
            match &step {
                GeneratorStep::Weaken { base, name } => assert!(!base.contains(*name)),
                GeneratorStep::Rename { base, from, to } => {
                    assert!(from != to && !base.contains(*from) && !base.contains(*to));
                }
            }
            assert!(step.target().is_subset(&u));
        }
    }
}

#[test]
fn display_letters() {
    assert_eq!(Name::new(0).to_string(), "a");
    assert_eq!(Name::new(25).to_string(), "z");
    assert_eq!(Name::new(26).to_string(), "a26");
    assert_eq!(set("{c,a}").to_string(), "{a,c}");
}

proptest! {
    #[test]
    fn names_round_trip(ids in prop::collection::btree_set(0u32..60, 0..6)) {
        let s: NameSet = ids.into_iter().map(Name::new).collect();
        prop_assert_eq!(s.to_string().parse::<NameSet>().unwrap(), s.clone());
        for a in s.iter() {
            prop_assert_eq!(a.to_string().parse::<Name>().unwrap(), a);
        }
    }

    #[test]
    fn least_fresh_is_fresh_and_least(ids in prop::collection::btree_set(0u32..8, 0..6)) {
        let s: NameSet = ids.into_iter().map(Name::new).collect();
        let c = s.least_fresh();
        prop_assert!(!s.contains(c));
        prop_assert!((0..c.id()).all(|i| s.contains(Name::new(i))));
    }
}
