//! The λ-calculus as a uniform theory: the signature `var`, `app`, `lam`, the
//! depth-truncated algebra of α-classes of λ-terms, η-normalization and the
//! η-quotient.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;

use serde::Serialize;

use crate::model::{check_abstraction_equivalence, satisfies, AbstractionCheck, FiniteAlgebra, ModelError, Verdict};
use crate::names::{Name, NameSet};
use crate::nominal::{make_abstraction, NominalValue};
use crate::presheaf::{nominal_to_presheaf, validate_presheaf, Elem, NominalPresheaf};
use crate::theory::{
    check_uniform_signature, frontend_nominal_judgment, parse_theory, translation_family, Equation, FrontendConfig,
    Judgment, Theory, UniformSignature,
};

/// A λ-term is a nominal value built from `var:a`, `app:(t, u)` and `lam:[a]t`.
pub type LambdaTerm = NominalValue;

pub const LAMBDA_THEORY: &str = "\
family app : S, S -> S @ S
family lam[x] : S+x -> S @ S+x
family var[x] : -> S+x @ S+x
judgment eta (X : {})
  fresh a # X
  [a]app(X, a) = X
end
";

pub fn lambda_theory() -> Theory {
    parse_theory(LAMBDA_THEORY).expect("built-in theory parses")
}

pub fn lambda_signature() -> UniformSignature {
    lambda_theory().signature
}

/// `a#X ⊢ [a]app(X, a) = X`.
pub fn eta_judgment() -> Judgment {
    lambda_theory().judgments.remove(0)
}

/// The η-judgment as a uniform equation.
pub fn eta_equation() -> Equation {
    frontend_nominal_judgment(&lambda_signature(), &eta_judgment(), &FrontendConfig::default())
        .expect("η-judgment translates")
}

pub fn var(a: Name) -> LambdaTerm {
    NominalValue::tag("var", NominalValue::atom(a))
}

pub fn app(t: LambdaTerm, u: LambdaTerm) -> LambdaTerm {
    NominalValue::tag("app", NominalValue::pair(t, u))
}

pub fn lam(a: Name, t: LambdaTerm) -> LambdaTerm {
    NominalValue::tag("lam", make_abstraction(a, t))
}

enum View<'a> {
    Var(Name),
    App(&'a LambdaTerm, &'a LambdaTerm),
    Lam(Name, &'a LambdaTerm),
}

fn view(t: &LambdaTerm) -> Option<View<'_>> {
    let NominalValue::Tag(tag, v) = t else { return None };
    match (tag.as_str(), v.as_ref()) {
        ("var", NominalValue::Atom(a)) => Some(View::Var(*a)),
        ("app", NominalValue::Pair(t, u)) => Some(View::App(t, u)),
        ("lam", NominalValue::Abs(a, t)) => Some(View::Lam(*a, t)),
        _ => None,
    }
}

/// Constructor depth, with a variable at depth 1; `None` off the grammar.
pub fn depth(t: &LambdaTerm) -> Option<usize> {
    match view(t)? {
        View::Var(_) => Some(1),
        View::App(t, u) => Some(1 + depth(t)?.max(depth(u)?)),
        View::Lam(_, t) => Some(1 + depth(t)?),
    }
}

pub fn is_lambda_term(t: &LambdaTerm) -> bool {
    depth(t).is_some()
}

/// Innermost-first η-reduction `lam(a, app(u, var a)) → u` for `a # u`.
/// Values off the grammar are returned unchanged.
pub fn eta_normalize(t: &LambdaTerm) -> LambdaTerm {
    fn go(t: &LambdaTerm) -> LambdaTerm {
        match view(t) {
            None | Some(View::Var(_)) => t.clone(),
            Some(View::App(u, v)) => app(go(u), go(v)),
            Some(View::Lam(a, body)) => {
                let body = go(body);
                if let Some(View::App(u, v)) = view(&body) {
                    if matches!(view(v), Some(View::Var(b)) if b == a) && u.is_fresh(a) {
                        return u.clone();
                    }
                }
                lam(a, body)
            }
        }
    }
    if !is_lambda_term(t) {
        return t.clone();
    }
    go(t).canonical()
}

pub fn is_eta_normal(t: &LambdaTerm) -> bool {
    eta_normalize(t).structurally_eq(&t.canonical())
}

/// Memoized enumeration of the α-classes of λ-terms over a name set, by depth.
#[derive(Debug, Default)]
pub struct TermGenerator {
    memo: HashMap<(NameSet, usize), Rc<Vec<LambdaTerm>>>,
}

impl TermGenerator {
    pub fn new() -> Self {
        Self::default()
    }

    /// Canonical representatives of the terms with free names in `s` and
    /// depth at most `d`, sorted.
    pub fn terms(&mut self, s: &NameSet, d: usize) -> Rc<Vec<LambdaTerm>> {
        if let Some(v) = self.memo.get(&(s.clone(), d)) {
            return v.clone();
        }
        let mut out = BTreeSet::new();
        if d > 0 {
            for a in s.iter() {
                out.insert(var(a));
            }
            let sub = self.terms(s, d - 1);
            for t in sub.iter() {
                for u in sub.iter() {
                    out.insert(app(t.clone(), u.clone()).canonical());
                }
            }
            let c = s.least_fresh();
            for t in self.terms(&s.with(c), d - 1).iter() {
                out.insert(lam(c, t.clone()).canonical());
            }
        }
        let v = Rc::new(out.into_iter().collect::<Vec<_>>());
        self.memo.insert((s.clone(), d), v.clone());
        v
    }
}

pub fn count_alpha_classes(s: &NameSet, d: usize) -> usize {
    TermGenerator::new().terms(s, d).len()
}

/// The truncated λ-algebra together with its terms.
#[derive(Debug, Clone)]
pub struct LambdaModel {
    pub algebra: FiniteAlgebra,
    pub terms: NominalPresheaf,
    pub depth: usize,
    pub eta_quotient: bool,
}

impl LambdaModel {
    pub fn count(&self, s: &NameSet) -> usize {
        self.terms.elements.get(s).map_or(0, Vec::len)
    }
}

/// Carriers hold the α-classes of depth at most `d` (only the η-normal ones
/// when `eta_quotient`). `app` and `lam` are defined where the built term
/// stays within depth `d`; in the quotient their results are normalized.
pub fn lambda_model(universe: &NameSet, d: usize, eta_quotient: bool) -> Result<LambdaModel, ModelError> {
    let sig = lambda_signature();
    let mut gen = TermGenerator::new();
    let mut values: Vec<LambdaTerm> = gen.terms(universe, d).iter().cloned().collect();
    if eta_quotient {
        values.retain(is_eta_normal);
    }
    let terms = nominal_to_presheaf(&values, universe)?;
    let result = |t: LambdaTerm| if eta_quotient { eta_normalize(&t) } else { t };
    let mut tables: BTreeMap<_, HashMap<Vec<Elem>, Elem>> = BTreeMap::new();
    for op in sig.symbols_in(universe) {
        let mut table = HashMap::new();
        let at = |s: &NameSet, t: &LambdaTerm| terms.index_of(s, t);
        match (op.id.family.as_str(), op.id.params.as_slice()) {
            ("var", [a]) => {
                if let Some(v) = at(&op.result_sort, &var(*a)) {
                    table.insert(Vec::new(), v);
                }
            }
            ("app", []) => {
                let s = &op.index;
                let args: Vec<&LambdaTerm> = terms.elements[s]
                    .iter()
                    .filter(|t| d > 0 && depth(t).unwrap() < d)
                    .collect();
                for t in &args {
                    for u in &args {
                        let (Some(x), Some(y)) = (at(s, t), at(s, u)) else {
                            continue;
                        };
                        let v = at(s, &result(app((*t).clone(), (*u).clone())))
                            .ok_or_else(|| ModelError::Internal(format!("app({t}, {u}) missing")))?;
                        table.insert(vec![x, y], v);
                    }
                }
            }
            ("lam", [a]) => {
                let arg = &op.arg_sorts[0];
                for t in &terms.elements[arg] {
                    if depth(t).unwrap() >= d {
                        continue;
                    }
                    let x = at(arg, t).expect("element of its own sort");
                    let v = at(&op.result_sort, &result(lam(*a, t.clone())))
                        .ok_or_else(|| ModelError::Internal(format!("lam({a}, {t}) missing")))?;
                    table.insert(vec![x], v);
                }
            }
            _ => return Err(ModelError::UnknownSymbol(op.id.to_string())),
        }
        tables.insert(op.id.clone(), table);
    }
    let algebra = FiniteAlgebra::new(terms.presheaf.clone(), sig, tables)?;
    Ok(LambdaModel {
        algebra,
        terms,
        depth: d,
        eta_quotient,
    })
}

pub fn build_lambda_model(universe: &NameSet, d: usize) -> Result<FiniteAlgebra, ModelError> {
    Ok(lambda_model(universe, d, false)?.algebra)
}

pub fn eta_quotient_model(universe: &NameSet, d: usize) -> Result<FiniteAlgebra, ModelError> {
    Ok(lambda_model(universe, d, true)?.algebra)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SortCount {
    pub sort: NameSet,
    pub terms: usize,
    pub eta_normal: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EtaInstance {
    pub names: NameSet,
    pub equation: String,
    pub terms: Verdict,
    pub eta_normal: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaDemoReport {
    pub universe: NameSet,
    pub depth: usize,
    pub signature_symbols: usize,
    pub signature_uniform: bool,
    pub counts: Vec<SortCount>,
    pub terms_presheaf_valid: bool,
    pub eta_normal_presheaf_valid: bool,
    pub eta_equation: String,
    pub eta_family: Vec<EtaInstance>,
    pub abstraction: Option<(AbstractionCheck, AbstractionCheck)>,
}

impl LambdaDemoReport {
    /// The unquotiented model fails some η-instance and the quotient
    /// satisfies all of them.
    pub fn eta_separates(&self) -> bool {
        self.eta_family.iter().all(|i| i.eta_normal.holds) && self.eta_family.iter().any(|i| !i.terms.holds)
    }
}

pub fn lambda_demo(universe: &NameSet, d: usize) -> Result<LambdaDemoReport, ModelError> {
    let sig = lambda_signature();
    let report = check_uniform_signature(&sig, universe).map_err(|e| ModelError::Internal(e.to_string()))?;
    let raw = lambda_model(universe, d, false)?;
    let quo = lambda_model(universe, d, true)?;
    let counts = universe
        .subsets()
        .into_iter()
        .map(|s| SortCount {
            terms: raw.count(&s),
            eta_normal: quo.count(&s),
            sort: s,
        })
        .collect();
    let valid = |m: &LambdaModel| validate_presheaf(m.algebra.carrier()).is_ok_and(|r| r.is_clean());
    let eta = eta_equation();
    let family = translation_family(&sig, &eta, universe).map_err(|e| ModelError::Internal(e.to_string()))?;
    let mut eta_family = Vec::new();
    for (s, e) in family {
        eta_family.push(EtaInstance {
            names: s,
            equation: e.equation().to_string(),
            terms: satisfies(&raw.algebra, &e)?,
            eta_normal: satisfies(&quo.algebra, &e)?,
        });
    }
    let abstraction = if universe.len() >= 2 && eta.names().is_subset(&universe.without(universe.last().unwrap())) {
        Some((
            check_abstraction_equivalence(&raw.algebra, &eta)?,
            check_abstraction_equivalence(&quo.algebra, &eta)?,
        ))
    } else {
        None
    };
    Ok(LambdaDemoReport {
        universe: universe.clone(),
        depth: d,
        signature_symbols: report.symbols,
        signature_uniform: report.is_clean(),
        counts,
        terms_presheaf_valid: valid(&raw),
        eta_normal_presheaf_valid: valid(&quo),
        eta_equation: eta.to_string(),
        eta_family,
        abstraction,
    })
}

fn verdict_text(v: &Verdict) -> String {
    match &v.witness {
        None => format!("holds ({} valuations, {} skipped)", v.valuations, v.skipped),
        Some(w) => format!("fails at {w}"),
    }
}

impl fmt::Display for LambdaDemoReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ok = |b: bool| if b { "ok" } else { "FAILED" };
        writeln!(f, "lambda demo: universe {}, depth {}", self.universe, self.depth)?;
        writeln!(
            f,
            "signature: {} symbols, uniform {}",
            self.signature_symbols,
            ok(self.signature_uniform)
        )?;
        writeln!(f, "classes:")?;
        for c in &self.counts {
            writeln!(f, "  {}: {} terms, {} eta-normal", c.sort, c.terms, c.eta_normal)?;
        }
        writeln!(
            f,
            "presheaf: terms {}, eta-normal {}",
            ok(self.terms_presheaf_valid),
            ok(self.eta_normal_presheaf_valid)
        )?;
        writeln!(f, "eta: {}", self.eta_equation)?;
        for i in &self.eta_family {
            writeln!(f, "  by {}: {}", i.names, i.equation)?;
            writeln!(f, "    terms: {}", verdict_text(&i.terms))?;
            writeln!(f, "    eta-normal: {}", verdict_text(&i.eta_normal))?;
        }
        if let Some((r, q)) = &self.abstraction {
            writeln!(f, "abstraction with {}: {}", r.name, r.translated)?;
            for (label, c) in [("terms", r), ("eta-normal", q)] {
                writeln!(
                    f,
                    "  {label}: abstract {}, translated {}, {}",
                    c.abstract_verdict.holds,
                    c.translated_verdict.holds,
                    if c.agrees { "agree" } else { "DISAGREE" }
                )?;
            }
        }
        write!(f, "eta separates the models: {}", self.eta_separates())
    }
}
