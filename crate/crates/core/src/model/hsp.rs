//! Products, generated subalgebras and homomorphic images.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::algebra::{FiniteAlgebra, ModelError};
use crate::names::NameSet;
use crate::presheaf::{Elem, TruncatedPresheaf};

pub type SortedSet = BTreeMap<NameSet, BTreeSet<Elem>>;
/// A sortwise map of elements.
pub type SortedMap = BTreeMap<NameSet, Vec<Elem>>;

pub fn product_algebra(a: &FiniteAlgebra, b: &FiniteAlgebra) -> Result<FiniteAlgebra, ModelError> {
    if a.signature() != b.signature() || a.universe() != b.universe() {
        return Err(ModelError::SignatureMismatch);
    }
    let (x, y) = (a.carrier(), b.carrier());
    let nb = |s: &NameSet| y.size(s).expect("same universe");
    let pair = |s: &NameSet, i: Elem, j: Elem| i * nb(s) + j;
    let carrier = TruncatedPresheaf::build(
        a.universe(),
        |s| {
            let mut out = Vec::new();
            for l in x.carrier(s).expect("sort") {
                for r in y.carrier(s).expect("sort") {
                    out.push(format!("<{l}|{r}>"));
                }
            }
            out
        },
        |s, n, e| {
            let (i, j) = (e / nb(s), e % nb(s));
            pair(&s.with(n), x.wk(s, n, i).unwrap(), y.wk(s, n, j).unwrap())
        },
        |s, from, to, e| {
            let src = s.with(from);
            let (i, j) = (e / nb(&src), e % nb(&src));
            pair(
                &s.with(to),
                x.ren(s, from, to, i).unwrap(),
                y.ren(s, from, to, j).unwrap(),
            )
        },
    );
    let mut tables = BTreeMap::new();
    for ia in a.interps() {
        let ib = b.interp(&ia.op.id).expect("same signature");
        let mut table = HashMap::new();
        for (ka, &va) in &ia.table {
            for (kb, &vb) in &ib.table {
                let args: Vec<Elem> = ka
                    .iter()
                    .zip(kb)
                    .zip(&ia.op.arg_sorts)
                    .map(|((&i, &j), s)| pair(s, i, j))
                    .collect();
                table.insert(args, pair(&ia.op.result_sort, va, vb));
            }
        }
        tables.insert(ia.op.id.clone(), table);
    }
    FiniteAlgebra::new(carrier, a.signature().clone(), tables)
}

/// The least sortwise subset containing `seed` and closed under the
/// presheaf maps and every defined operation.
pub fn generated_set(a: &FiniteAlgebra, seed: &SortedSet) -> SortedSet {
    let x = a.carrier();
    let u = a.universe().clone();
    let mut cur: SortedSet = u.subsets().into_iter().map(|s| (s, BTreeSet::new())).collect();
    for (s, es) in seed {
        if let Some(set) = cur.get_mut(s) {
            set.extend(es.iter().copied());
        }
    }
    loop {
        let mut added = Vec::new();
        for s in u.subsets() {
            for &e in &cur[&s] {
                for n in u.difference(&s).iter() {
                    added.push((s.with(n), x.wk(&s, n, e).unwrap()));
                }
                for from in s.iter() {
                    let base = s.without(from);
                    for to in u.difference(&s).iter() {
                        added.push((base.with(to), x.ren(&base, from, to, e).unwrap()));
                    }
                }
            }
        }
        for interp in a.interps() {
            for (args, &v) in &interp.table {
                if args.iter().zip(&interp.op.arg_sorts).all(|(e, s)| cur[s].contains(e)) {
                    added.push((interp.op.result_sort.clone(), v));
                }
            }
        }
        let mut grew = false;
        for (s, e) in added {
            grew |= cur.get_mut(&s).expect("sort").insert(e);
        }
        if !grew {
            return cur;
        }
    }
}

/// Restricts `a` to a closed sortwise subset, renumbering elements in order.
fn restrict(a: &FiniteAlgebra, keep: &SortedSet) -> Result<FiniteAlgebra, ModelError> {
    let x = a.carrier();
    let pos: BTreeMap<NameSet, HashMap<Elem, Elem>> = keep
        .iter()
        .map(|(s, es)| (s.clone(), es.iter().enumerate().map(|(i, &e)| (e, i)).collect()))
        .collect();
    let old: BTreeMap<NameSet, Vec<Elem>> = keep
        .iter()
        .map(|(s, es)| (s.clone(), es.iter().copied().collect()))
        .collect();
    let carrier = TruncatedPresheaf::build(
        a.universe(),
        |s| old[s].iter().map(|&e| x.label(s, e).unwrap().to_string()).collect(),
        |s, n, i| pos[&s.with(n)][&x.wk(s, n, old[s][i]).unwrap()],
        |s, from, to, i| pos[&s.with(to)][&x.ren(s, from, to, old[&s.with(from)][i]).unwrap()],
    );
    let mut tables = BTreeMap::new();
    for interp in a.interps() {
        let mut table = HashMap::new();
        for (args, &v) in &interp.table {
            let mapped: Option<Vec<Elem>> = args
                .iter()
                .zip(&interp.op.arg_sorts)
                .map(|(e, s)| pos[s].get(e).copied())
                .collect();
            if let Some(m) = mapped {
                table.insert(m, pos[&interp.op.result_sort][&v]);
            }
        }
        tables.insert(interp.op.id.clone(), table);
    }
    FiniteAlgebra::new(carrier, a.signature().clone(), tables)
}

pub fn subalgebra_generated(a: &FiniteAlgebra, seed: &SortedSet) -> Result<FiniteAlgebra, ModelError> {
    restrict(a, &generated_set(a, seed))
}

/// Checks that `h` commutes with the presheaf maps and with every defined
/// operation of `a`, landing in `b`'s (possibly partial) operations.
fn check_hom(
    a: &FiniteAlgebra,
    h: &SortedMap,
    b_wk: impl Fn(&NameSet, crate::names::Name, Elem) -> Elem,
    b_ren: impl Fn(&NameSet, crate::names::Name, crate::names::Name, Elem) -> Elem,
    mut b_op: impl FnMut(&crate::theory::SymbolId, Vec<Elem>, Elem) -> Result<(), String>,
) -> Result<(), ModelError> {
    let x = a.carrier();
    let u = a.universe().clone();
    let fail = |m: String| Err(ModelError::NotHomomorphism(m));
    for s in u.subsets() {
        let hs = h
            .get(&s)
            .ok_or_else(|| ModelError::NotHomomorphism(format!("no map at {s}")))?;
        if hs.len() != x.size(&s)? {
            return fail(format!("map at {s} has {} entries", hs.len()));
        }
        for (e, &he) in hs.iter().enumerate() {
            for n in u.difference(&s).iter() {
                if h[&s.with(n)][x.wk(&s, n, e)?] != b_wk(&s, n, he) {
                    return fail(format!("w_{{{s},{n}}} at {}", x.label(&s, e)?));
                }
            }
            for from in s.iter() {
                let base = s.without(from);
                for to in u.difference(&s).iter() {
                    if h[&base.with(to)][x.ren(&base, from, to, e)?] != b_ren(&base, from, to, he) {
                        return fail(format!("({to}/{from})_{base} at {}", x.label(&s, e)?));
                    }
                }
            }
        }
    }
    for interp in a.interps() {
        for (args, v) in interp.sorted_entries() {
            let hargs: Vec<Elem> = args.iter().zip(&interp.op.arg_sorts).map(|(&e, s)| h[s][e]).collect();
            if let Err(m) = b_op(&interp.op.id, hargs, h[&interp.op.result_sort][v]) {
                return fail(m);
            }
        }
    }
    Ok(())
}

/// The image of `a` under a homomorphism `h` into `b`.
pub fn hom_image(a: &FiniteAlgebra, b: &FiniteAlgebra, h: &SortedMap) -> Result<FiniteAlgebra, ModelError> {
    if a.signature() != b.signature() || a.universe() != b.universe() {
        return Err(ModelError::SignatureMismatch);
    }
    let y = b.carrier();
    for (s, hs) in h {
        if let Some(&bad) = hs.iter().find(|&&e| e >= y.size(s).unwrap_or(0)) {
            return Err(ModelError::NotHomomorphism(format!("{bad} is not an element of {s}")));
        }
    }
    check_hom(
        a,
        h,
        |s, n, e| y.wk(s, n, e).unwrap(),
        |s, f, t, e| y.ren(s, f, t, e).unwrap(),
        |id, args, v| match b.apply(id, &args) {
            Some(w) if w == v => Ok(()),
            got => Err(format!(
                "{id} at ({}) gives {got:?} in the target, expected {v}",
                args.iter().map(Elem::to_string).collect::<Vec<_>>().join(", ")
            )),
        },
    )?;
    let keep: SortedSet = h
        .iter()
        .map(|(s, hs)| (s.clone(), hs.iter().copied().collect()))
        .collect();
    // the image carries exactly the operations transported from `a`
    let pos: BTreeMap<NameSet, HashMap<Elem, Elem>> = keep
        .iter()
        .map(|(s, es)| (s.clone(), es.iter().enumerate().map(|(i, &e)| (e, i)).collect()))
        .collect();
    let old: BTreeMap<NameSet, Vec<Elem>> = keep
        .iter()
        .map(|(s, es)| (s.clone(), es.iter().copied().collect()))
        .collect();
    let carrier = TruncatedPresheaf::build(
        b.universe(),
        |s| old[s].iter().map(|&e| y.label(s, e).unwrap().to_string()).collect(),
        |s, n, i| pos[&s.with(n)][&y.wk(s, n, old[s][i]).unwrap()],
        |s, f, t, i| pos[&s.with(t)][&y.ren(s, f, t, old[&s.with(f)][i]).unwrap()],
    );
    let mut tables = BTreeMap::new();
    for interp in a.interps() {
        let table = interp
            .table
            .iter()
            .map(|(args, &v)| {
                let ks = args
                    .iter()
                    .zip(&interp.op.arg_sorts)
                    .map(|(&e, s)| pos[s][&h[s][e]])
                    .collect();
                (ks, pos[&interp.op.result_sort][&h[&interp.op.result_sort][v]])
            })
            .collect();
        tables.insert(interp.op.id.clone(), table);
    }
    FiniteAlgebra::new(carrier, a.signature().clone(), tables)
}

/// The image of `a` under the quotient map `h`, whose values name classes.
/// Fails unless `h` is a congruence.
pub fn quotient(a: &FiniteAlgebra, h: &SortedMap) -> Result<FiniteAlgebra, ModelError> {
    let x = a.carrier();
    let u = a.universe().clone();
    // renumber classes densely in order of first element
    let mut classes: SortedMap = BTreeMap::new();
    let mut reps: BTreeMap<NameSet, Vec<Elem>> = BTreeMap::new();
    for s in u.subsets() {
        let hs = h
            .get(&s)
            .ok_or_else(|| ModelError::NotHomomorphism(format!("no map at {s}")))?;
        let mut ids: BTreeMap<Elem, Elem> = BTreeMap::new();
        let mut rep = Vec::new();
        let mut out = Vec::new();
        for (e, &c) in hs.iter().enumerate() {
            let next = ids.len();
            let id = *ids.entry(c).or_insert_with(|| {
                rep.push(e);
                next
            });
            out.push(id);
        }
        classes.insert(s.clone(), out);
        reps.insert(s, rep);
    }
    let cls = &classes;
    let mut table_of: BTreeMap<crate::theory::SymbolId, HashMap<Vec<Elem>, Elem>> = BTreeMap::new();
    check_hom(
        a,
        cls,
        |s, n, c| cls[&s.with(n)][x.wk(s, n, reps[s][c]).unwrap()],
        |s, f, t, c| cls[&s.with(t)][x.ren(s, f, t, reps[&s.with(f)][c]).unwrap()],
        |id, args, v| {
            let table = table_of.entry(id.clone()).or_default();
            match table.insert(args, v) {
                Some(w) if w != v => Err(format!("{id} is not compatible with the classes")),
                _ => Ok(()),
            }
        },
    )?;
    let carrier = TruncatedPresheaf::build(
        &u,
        |s| reps[s].iter().map(|&e| x.label(s, e).unwrap().to_string()).collect(),
        |s, n, c| cls[&s.with(n)][x.wk(s, n, reps[s][c]).unwrap()],
        |s, f, t, c| cls[&s.with(t)][x.ren(s, f, t, reps[&s.with(f)][c]).unwrap()],
    );
    FiniteAlgebra::new(carrier, a.signature().clone(), table_of)
}

/// The identity map on every sort.
pub fn identity_map(a: &FiniteAlgebra) -> SortedMap {
    a.universe()
        .subsets()
        .into_iter()
        .map(|s| {
            let n = a.carrier().size(&s).unwrap();
            (s, (0..n).collect())
        })
        .collect()
}
