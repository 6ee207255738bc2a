//! Exhaustive enumeration of small presheaves and of the algebras on them.

use std::collections::{BTreeMap, HashMap};

use super::algebra::FiniteAlgebra;
use crate::names::{GeneratorStep, NameSet};
use crate::presheaf::{validate_presheaf, Elem, TruncatedPresheaf};
use crate::theory::{OpSymbol, SymbolId, UniformSignature};

/// Index-coded function from `0..dom` to `0..cod`, `code` in `0..cod^dom`.
fn decode(mut code: usize, dom: usize, cod: usize) -> Vec<Elem> {
    let mut out = Vec::with_capacity(dom);
    for _ in 0..dom {
        out.push(code % cod);
        code /= cod;
    }
    out
}

fn count_functions(dom: usize, cod: usize) -> usize {
    if dom == 0 {
        1
    } else {
        cod.pow(dom as u32)
    }
}

/// Every valid presheaf on `universe` with between 1 and `max` elements per sort.
pub fn enumerate_presheaves(universe: &NameSet, max: usize) -> Vec<TruncatedPresheaf> {
    let sorts = universe.subsets();
    let mut out = Vec::new();
    let mut sizes = vec![1; sorts.len()];
    loop {
        let size_of: BTreeMap<NameSet, usize> = sorts.iter().cloned().zip(sizes.iter().copied()).collect();
        let steps: Vec<GeneratorStep> = sorts.iter().flat_map(|s| GeneratorStep::out_of(s, universe)).collect();
        let counts: Vec<usize> = steps
            .iter()
            .map(|st| count_functions(size_of[&st.source()], size_of[&st.target()]))
            .collect();
        let mut codes = vec![0; steps.len()];
        'tables: loop {
            let mut wk = BTreeMap::new();
            let mut ren = BTreeMap::new();
            for (st, &c) in steps.iter().zip(&codes) {
                let t = decode(c, size_of[&st.source()], size_of[&st.target()]);
                match st {
                    GeneratorStep::Weaken { base, name } => {
                        wk.insert((base.clone(), *name), t);
                    }
                    GeneratorStep::Rename { base, from, to } => {
                        ren.insert((base.clone(), *from, *to), t);
                    }
                }
            }
            let carrier = sorts
                .iter()
                .map(|s| (s.clone(), (0..size_of[s]).map(|i| format!("{s}#{i}")).collect()))
                .collect();
            let p = TruncatedPresheaf::from_parts(universe.clone(), carrier, wk, ren);
            if validate_presheaf(&p).is_ok_and(|r| r.is_clean()) {
                out.push(p);
            }
            let mut i = 0;
            loop {
                if i == codes.len() {
                    break 'tables;
                }
                codes[i] += 1;
                if codes[i] < counts[i] {
                    break;
                }
                codes[i] = 0;
                i += 1;
            }
        }
        let mut i = 0;
        loop {
            if i == sizes.len() {
                return out;
            }
            sizes[i] += 1;
            if sizes[i] <= max {
                break;
            }
            sizes[i] = 1;
            i += 1;
        }
    }
}

struct Search<'a> {
    carrier: &'a TruncatedPresheaf,
    sig: &'a UniformSignature,
    symbols: Vec<OpSymbol>,
    /// `(f, step, g)` with `g = step . f`, grouped by `max(f, g)`.
    checks: Vec<Vec<(usize, GeneratorStep, usize)>>,
    chosen: Vec<Option<HashMap<Vec<Elem>, Elem>>>,
    out: Vec<FiniteAlgebra>,
    limit: usize,
}

fn domain(carrier: &TruncatedPresheaf, sorts: &[NameSet]) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for s in sorts {
        let n = carrier.size(s).unwrap();
        let mut next = Vec::new();
        for t in &out {
            for e in 0..n {
                let mut t2 = t.clone();
                t2.push(e);
                next.push(t2);
            }
        }
        out = next;
    }
    out
}

fn transport(carrier: &TruncatedPresheaf, step: &GeneratorStep, s: &NameSet, x: Elem) -> Elem {
    match step {
        GeneratorStep::Weaken { name, .. } => carrier.wk(s, *name, x).unwrap(),
        GeneratorStep::Rename { from, to, .. } => {
            if s.contains(*from) {
                carrier.ren(&s.without(*from), *from, *to, x).unwrap()
            } else {
                x
            }
        }
    }
}

impl Search<'_> {
    fn consistent(&self, f: usize, step: &GeneratorStep, g: usize) -> bool {
        let (Some(tf), Some(tg)) = (&self.chosen[f], &self.chosen[g]) else {
            return true;
        };
        let op = &self.symbols[f];
        tf.iter().all(|(args, &v)| {
            let moved: Vec<Elem> = args
                .iter()
                .zip(&op.arg_sorts)
                .map(|(&x, s)| transport(self.carrier, step, s, x))
                .collect();
            tg.get(&moved) == Some(&transport(self.carrier, step, &op.result_sort, v))
        })
    }

    fn run(&mut self, k: usize) {
        if self.out.len() >= self.limit {
            return;
        }
        if k == self.symbols.len() {
            let tables: BTreeMap<SymbolId, HashMap<Vec<Elem>, Elem>> = self
                .symbols
                .iter()
                .zip(&self.chosen)
                .map(|(op, t)| (op.id.clone(), t.clone().unwrap()))
                .collect();
            if let Ok(a) = FiniteAlgebra::new(self.carrier.clone(), self.sig.clone(), tables) {
                self.out.push(a);
            }
            return;
        }
        let op = self.symbols[k].clone();
        let dom = domain(self.carrier, &op.arg_sorts);
        let cod = self.carrier.size(&op.result_sort).unwrap();
        if cod == 0 && !dom.is_empty() {
            return;
        }
        for code in 0..count_functions(dom.len(), cod) {
            let values = decode(code, dom.len(), cod);
            self.chosen[k] = Some(dom.iter().cloned().zip(values).collect());
            let ok = self.checks[k].iter().all(|(f, st, g)| self.consistent(*f, st, *g));
            if ok {
                self.run(k + 1);
            }
        }
        self.chosen[k] = None;
    }
}

/// Every algebra for `sig` on `carrier` with total operations satisfying the
/// equivariance equations, up to `limit` of them.
pub fn enumerate_algebras(sig: &UniformSignature, carrier: &TruncatedPresheaf, limit: usize) -> Vec<FiniteAlgebra> {
    let universe = carrier.universe().clone();
    let mut symbols = sig.symbols_in(&universe);
    symbols.sort_by(|a, b| (a.index.len(), &a.id).cmp(&(b.index.len(), &b.id)));
    let pos: HashMap<SymbolId, usize> = symbols.iter().enumerate().map(|(i, s)| (s.id.clone(), i)).collect();
    let mut checks = vec![Vec::new(); symbols.len()];
    for (i, op) in symbols.iter().enumerate() {
        for a in universe.difference(&op.index).iter() {
            let mut steps = vec![GeneratorStep::weaken(op.index.clone(), a)];
            for b in op.index.iter() {
                steps.push(GeneratorStep::rename(op.index.without(b), b, a));
            }
            for st in steps {
                if let Some(g) = sig.act(&st, &op.id).and_then(|g| pos.get(&g).copied()) {
                    checks[i.max(g)].push((i, st, g));
                }
            }
        }
    }
    let n = symbols.len();
    let mut search = Search {
        carrier,
        sig,
        symbols,
        checks,
        chosen: vec![None; n],
        out: Vec::new(),
        limit,
    };
    search.run(0);
    search.out
}
