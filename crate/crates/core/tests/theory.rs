mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{name, set, TermGen, TERM_THEORY};
use nomalg::lambda::{eta_judgment, lambda_signature};
use nomalg::theory::{
    canonically_equal, freshness_set, frontend_nominal_judgment, gen_equivariance_equations, parse_theory,
    render_theory, translate_by_name, translate_by_set, translate_in_order, typecheck_term, Equation, FrontendConfig,
    SymbolId, Term, TermError, Theory, UniformSignature,
};
use nomalg::{Name, NameSet};

fn signature() -> UniformSignature {
    parse_theory(TERM_THEORY).unwrap().signature
}

fn random_equation(seed: u64, sort: &NameSet, depth: usize) -> Equation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = TermGen::new(&mut rng, NameSet::first_n(4));
    let lhs = g.term(sort, depth);
    let rhs = g.term(sort, depth);
    Equation::new("r", lhs, rhs, sort.clone())
}

fn sort_from(bits: u8) -> NameSet {
    NameSet::first_n(3)
        .iter()
        .filter(|a| bits & (1 << a.id()) != 0)
        .collect()
}

fn same_up_to_orientation(a: &Equation, b: &Equation) -> bool {
    let flipped = Equation::new(b.id.clone(), b.rhs.clone(), b.lhs.clone(), b.sort.clone());
    canonically_equal(a, b) || canonically_equal(a, &flipped)
}

proptest! {
    #[test]
    fn translation_is_sort_sound(seed in any::<u64>(), bits in 0u8..8, a in 0u32..6, depth in 1usize..4) {
        let sig = signature();
        let sort = sort_from(bits);
        let a = Name::new(a);
        prop_assume!(!sort.contains(a));
        let e = random_equation(seed, &sort, depth);
        prop_assert!(e.check(&sig).is_ok());
        let t = translate_by_name(&sig, &e, a).unwrap();
        prop_assert_eq!(&t.sort, &sort.with(a));
        prop_assert_eq!(typecheck_term(&sig, &t.lhs).unwrap(), sort.with(a));
        prop_assert_eq!(typecheck_term(&sig, &t.rhs).unwrap(), sort.with(a));
        prop_assert!(t.check(&sig).is_ok());
    }

    #[test]
    fn freshness_grows_under_translation(seed in any::<u64>(), bits in 0u8..8, a in 0u32..6, depth in 1usize..4) {
        let sig = signature();
        let sort = sort_from(bits);
        let a = Name::new(a);
        prop_assume!(!sort.contains(a));
        let e = random_equation(seed, &sort, depth);
        let t = translate_by_name(&sig, &e, a).unwrap();
        for (x, _) in e.vars() {
            let fr = freshness_set(&sig, &e, &x).unwrap();
            if fr.contains(a) {
                let after = freshness_set(&sig, &t, &x).unwrap();
                prop_assert!(after.contains(a) && fr.is_subset(&after), "{} -> {}: {} vs {}", e, t, fr, after);
            }
        }
    }

    #[test]
    fn translation_order_is_irrelevant(seed in any::<u64>(), bits in 0u8..4, depth in 1usize..4) {
        let sig = signature();
        let sort = sort_from(bits);
        let e = random_equation(seed, &sort, depth);
        let s = NameSet::first_n(5).difference(&sort);
        let names: Vec<Name> = s.iter().take(3).collect();
        let by_set = translate_by_set(&sig, &e, &names.iter().copied().collect()).unwrap();
        for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let ordered: Vec<Name> = order.iter().map(|&i| names[i]).collect();
            let t = translate_in_order(&sig, &e, &ordered).unwrap();
            prop_assert!(canonically_equal(&t, by_set.equation()), "{} vs {}", t, by_set);
        }
    }

    #[test]
    fn theories_round_trip(seed in any::<u64>(), bits in 0u8..8, depth in 0usize..4) {
        let mut th: Theory = parse_theory(TERM_THEORY).unwrap();
        th.universe = Some(NameSet::first_n(4));
        let mut e = random_equation(seed, &sort_from(bits), depth);
        e.id = "r.1".into();
        th.equations.push(e);
        let text = render_theory(&th);
        prop_assert_eq!(parse_theory(&text).unwrap(), th);
    }
}

#[test]
fn eop_reproduces_the_abstraction_theory() {
    let th = parse_theory("family abs[x] : S+x -> S @ S+x\n").unwrap();
    let sig = &th.signature;
    let u = set("{a,b,c,d}");
    let eops: Vec<Equation> = gen_equivariance_equations(sig, &u)
        .into_iter()
        .map(|i| i.equation.0)
        .collect();
    let abs = |a: Name, s: &NameSet, t: Term| Term::app(SymbolId::new("abs", vec![a], s.clone()), vec![t]);
    let mut expected = Vec::new();
    for s in u.subsets() {
        for a in u.difference(&s).iter() {
            let t = Term::var("T", s.with(a));
            for b in u.difference(&s.with(a)).iter() {
                // [a]_S t = [b]_S (b/a)_S t
                expected.push(Equation::new(
                    "ren",
                    abs(a, &s, t.clone()),
                    abs(b, &s, Term::rename(b, a, t.clone())),
                    s.clone(),
                ));
                // w_b [a]_S t = [a]_{S+b} w_b t
                expected.push(Equation::new(
                    "wk",
                    Term::weaken(b, abs(a, &s, t.clone())),
                    abs(a, &s.with(b), Term::weaken(b, t.clone())),
                    s.with(b),
                ));
                // (c/b)_S [a]_{S+b} t = [a]_{S+c} (c/b) t
                let tb = Term::var("T", s.with(a).with(b));
                for c in u.difference(&s.with(a).with(b)).iter() {
                    expected.push(Equation::new(
                        "idx",
                        Term::rename(c, b, abs(a, &s.with(b), tb.clone())),
                        abs(a, &s.with(c), Term::rename(c, b, tb.clone())),
                        s.with(c),
                    ));
                }
            }
        }
    }
    for e in &expected {
        assert!(
            eops.iter().any(|f| same_up_to_orientation(e, f)),
            "{e} has no equivariance instance"
        );
    }
}

#[test]
fn frontend_gives_the_eta_line() {
    let e = frontend_nominal_judgment(&lambda_signature(), &eta_judgment(), &FrontendConfig::default()).unwrap();
    let t = translate_by_set(&lambda_signature(), &e, &NameSet::new()).unwrap();
    assert_eq!(t.to_string(), "lam[a]{}(app{a}(w_a(X), var[a]{})) = X : {}");
    let by_b = translate_by_name(&lambda_signature(), &e, name("b")).unwrap();
    assert_eq!(
        by_b.to_string(),
        "lam[a]{b}(app{a,b}(w_a(X'{b}), var[a]{b})) = X'{b} : {b}"
    );
}

#[test]
fn typechecking_explains_failures() {
    let sig = signature();
    let x = Term::var("X", set("{a}"));
    assert!(matches!(
        typecheck_term(&sig, &Term::weaken(name("a"), x.clone())),
        Err(TermError::WeakenNotFresh { .. })
    ));
    assert!(matches!(
        typecheck_term(&sig, &Term::rename(name("c"), name("b"), x.clone())),
        Err(TermError::RenameAbsent { .. })
    ));
    let bad = Term::app(SymbolId::plain("app", set("{a}")), vec![x.clone()]);
    assert!(matches!(typecheck_term(&sig, &bad), Err(TermError::Arity { .. })));
    let err = parse_theory(&format!("{TERM_THEORY}eq e (X : {{a}}) : s{{}}(X) = k{{}} : {{}}\n")).unwrap_err();
    assert_eq!(err.line, 6);
}

#[test]
fn dsl_reports_positions() {
    let err = parse_theory("universe {a,b}\nfamily lam[x] : S+x -> S @ S+\n").unwrap_err();
    assert_eq!(err.line, 2);
    let err = parse_theory("bogus\n").unwrap_err();
    assert_eq!((err.line, err.column), (1, 1));
}
