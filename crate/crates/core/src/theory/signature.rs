//! Uniform signatures: operation symbols organised as a presheaf over
//! finite name sets, with the arity-transport law.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::names::{GeneratorStep, Name, NameSet};
use crate::presheaf::{validate_presheaf, TruncatedPresheaf, Violation};

/// An operation symbol instance, printed `fam[p,q]{base}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolId {
    pub family: String,
    pub params: Vec<Name>,
    pub base: NameSet,
}

impl SymbolId {
    pub fn new(family: impl Into<String>, params: Vec<Name>, base: NameSet) -> Self {
        SymbolId {
            family: family.into(),
            params,
            base,
        }
    }

    pub fn plain(family: impl Into<String>, base: NameSet) -> Self {
        SymbolId::new(family, Vec::new(), base)
    }
}

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.family)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(Name::to_string).collect();
            write!(f, "[{}]", ps.join(","))?;
        }
        write!(f, "{}", self.base)
    }
}

impl std::str::FromStr for SymbolId {
    type Err = SignatureError;

    /// Parses `fam[p,q]{base}`; the parameter list is optional.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || SignatureError::UnknownSymbol(s.to_string());
        let brace = s.find('{').ok_or_else(bad)?;
        let (head, base) = s.split_at(brace);
        let base: NameSet = base.parse().map_err(|_| bad())?;
        let (family, params) = match head.find('[') {
            Some(i) => {
                let inner = head[i..]
                    .strip_prefix('[')
                    .and_then(|r| r.strip_suffix(']'))
                    .ok_or_else(bad)?;
                let params = inner
                    .split(',')
                    .map(|p| p.trim().parse::<Name>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| bad())?;
                (&head[..i], params)
            }
            None => (head, Vec::new()),
        };
        if family.is_empty() || !family.chars().all(|c| c.is_alphanumeric() || c == '_') {
            return Err(bad());
        }
        Ok(SymbolId::new(family, params, base))
    }
}

impl Serialize for SymbolId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// A symbol together with its index and arity `S_1, ..., S_n -> S_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OpSymbol {
    pub id: SymbolId,
    pub index: NameSet,
    pub arg_sorts: Vec<NameSet>,
    pub result_sort: NameSet,
}

impl OpSymbol {
    pub fn arity(&self) -> usize {
        self.arg_sorts.len()
    }

    fn arity_text(&self) -> String {
        let args: Vec<String> = self.arg_sorts.iter().map(NameSet::to_string).collect();
        format!("{} -> {}", args.join(", "), self.result_sort)
    }
}

/// One atom of a schematic sort: the base `S`, a parameter, or nothing.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SortAtom {
    Base,
    Param(usize),
}

/// A schematic sort such as `S+x`; the empty list is `{}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SortExpr(pub Vec<SortAtom>);

impl SortExpr {
    pub fn eval(&self, params: &[Name], base: &NameSet) -> NameSet {
        let mut out = NameSet::new();
        for atom in &self.0 {
            match atom {
                SortAtom::Base => out = out.union(base),
                SortAtom::Param(i) => {
                    out.insert(params[*i]);
                }
            }
        }
        out
    }

    pub fn render(&self, param_names: &[String]) -> String {
        if self.0.is_empty() {
            return "{}".to_string();
        }
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|a| match a {
                SortAtom::Base => "S",
                SortAtom::Param(i) => param_names[*i].as_str(),
            })
            .collect();
        parts.join("+")
    }

    fn contains_base(&self) -> bool {
        self.0.contains(&SortAtom::Base)
    }

    fn mentions(&self, i: usize) -> bool {
        self.0.contains(&SortAtom::Param(i))
    }
}

/// A symbol family `fam[x,..]{S}` instantiated at every base `S` and every
/// choice of distinct parameter names outside `S`. The presheaf action is
/// `u . fam[p]{S} = fam[u(p)]{T \ u(p)}` for `u : S+p -> T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    pub name: String,
    pub param_names: Vec<String>,
    pub args: Vec<SortExpr>,
    pub result: SortExpr,
    pub index: SortExpr,
}

impl Family {
    pub fn instance(&self, params: &[Name], base: &NameSet) -> Option<OpSymbol> {
        if params.len() != self.param_names.len() {
            return None;
        }
        let pset: NameSet = params.iter().copied().collect();
        if pset.len() != params.len() || !pset.is_disjoint(base) {
            return None;
        }
        Some(OpSymbol {
            id: SymbolId::new(self.name.clone(), params.to_vec(), base.clone()),
            index: self.index.eval(params, base),
            arg_sorts: self.args.iter().map(|s| s.eval(params, base)).collect(),
            result_sort: self.result.eval(params, base),
        })
    }

    /// The index expression must name `S` and every parameter so that the
    /// index determines the instance's base.
    pub fn check_shape(&self) -> Result<(), SignatureError> {
        let ok = self.index.contains_base() && (0..self.param_names.len()).all(|i| self.index.mentions(i));
        if ok {
            Ok(())
        } else {
            Err(SignatureError::FamilyIndex(self.name.clone()))
        }
    }

    pub fn instances_in(&self, universe: &NameSet) -> Vec<OpSymbol> {
        let mut out = Vec::new();
        let k = self.param_names.len();
        let mut tuples = vec![Vec::new()];
        for _ in 0..k {
            let mut next = Vec::new();
            for t in &tuples {
                for a in universe.iter() {
                    if !t.contains(&a) {
                        let mut t2: Vec<Name> = t.clone();
                        t2.push(a);
                        next.push(t2);
                    }
                }
            }
            tuples = next;
        }
        for params in tuples {
            let pset: NameSet = params.iter().copied().collect();
            for base in universe.difference(&pset).subsets() {
                if let Some(op) = self.instance(&params, &base) {
                    out.push(op);
                }
            }
        }
        out
    }

    pub fn render(&self) -> String {
        let mut s = format!("family {}", self.name);
        if !self.param_names.is_empty() {
            s.push_str(&format!("[{}]", self.param_names.join(",")));
        }
        let args: Vec<String> = self.args.iter().map(|a| a.render(&self.param_names)).collect();
        s.push_str(&format!(
            " : {}{}-> {} @ {}",
            args.join(", "),
            if args.is_empty() { "" } else { " " },
            self.result.render(&self.param_names),
            self.index.render(&self.param_names)
        ));
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{0}` declared twice")]
    Duplicate(String),
    #[error("action `{step} . {symbol}` is not a generator out of the index of `{symbol}`")]
    BadAction { step: String, symbol: String },
    #[error("family `{0}` must mention `S` and every parameter in its index")]
    FamilyIndex(String),
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct UniformSignature {
    families: BTreeMap<String, Family>,
    ops: BTreeMap<SymbolId, OpSymbol>,
    actions: BTreeMap<(SymbolId, GeneratorStep), SymbolId>,
}

impl UniformSignature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_family(&mut self, family: Family) -> Result<(), SignatureError> {
        family.check_shape()?;
        if self.families.contains_key(&family.name) || self.ops.keys().any(|k| k.family == family.name) {
            return Err(SignatureError::Duplicate(family.name));
        }
        self.families.insert(family.name.clone(), family);
        Ok(())
    }

    pub fn add_op(&mut self, op: OpSymbol) -> Result<(), SignatureError> {
        if self.families.contains_key(&op.id.family) || self.ops.contains_key(&op.id) {
            return Err(SignatureError::Duplicate(op.id.to_string()));
        }
        self.ops.insert(op.id.clone(), op);
        Ok(())
    }

    /// Records `step . from = to`; both symbols must already be declared.
    pub fn add_action(&mut self, step: GeneratorStep, from: SymbolId, to: SymbolId) -> Result<(), SignatureError> {
        let src = self
            .symbol(&from)
            .ok_or_else(|| SignatureError::UnknownSymbol(from.to_string()))?;
        if self.symbol(&to).is_none() {
            return Err(SignatureError::UnknownSymbol(to.to_string()));
        }
        if !step.is_valid() || step.source() != src.index {
            return Err(SignatureError::BadAction {
                step: step.to_string(),
                symbol: from.to_string(),
            });
        }
        self.actions.insert((from, step), to);
        Ok(())
    }

    pub fn families(&self) -> impl Iterator<Item = &Family> {
        self.families.values()
    }

    pub fn family(&self, name: &str) -> Option<&Family> {
        self.families.get(name)
    }

    pub fn ops(&self) -> impl Iterator<Item = &OpSymbol> {
        self.ops.values()
    }

    pub fn actions(&self) -> impl Iterator<Item = (&SymbolId, &GeneratorStep, &SymbolId)> {
        self.actions.iter().map(|((f, s), g)| (f, s, g))
    }

    pub fn symbol(&self, id: &SymbolId) -> Option<OpSymbol> {
        if let Some(op) = self.ops.get(id) {
            return Some(op.clone());
        }
        self.families.get(&id.family)?.instance(&id.params, &id.base)
    }

    /// `step . f`, or `None` when no action is recorded.
    pub fn act(&self, step: &GeneratorStep, id: &SymbolId) -> Option<SymbolId> {
        if let Some(fam) = self.families.get(&id.family) {
            let op = fam.instance(&id.params, &id.base)?;
            if step.source() != op.index || !step.is_valid() {
                return None;
            }
            let params: Vec<Name> = id.params.iter().map(|&p| step.apply_name(p)).collect();
            let mut base = step.target();
            for p in &params {
                base.remove(*p);
            }
            return Some(SymbolId::new(id.family.clone(), params, base));
        }
        self.actions.get(&(id.clone(), step.clone())).cloned()
    }

    /// `w_a . f` for `a` outside the index of `f`.
    pub fn weaken_symbol(&self, id: &SymbolId, a: Name) -> Option<SymbolId> {
        let op = self.symbol(id)?;
        self.act(&GeneratorStep::weaken(op.index, a), id)
    }

    /// Every symbol whose index lies inside `universe`, in id order.
    pub fn symbols_in(&self, universe: &NameSet) -> Vec<OpSymbol> {
        let mut out: Vec<OpSymbol> = self
            .ops
            .values()
            .filter(|op| op.index.is_subset(universe))
            .cloned()
            .collect();
        for fam in self.families.values() {
            out.extend(fam.instances_in(universe));
        }
        out.sort_by(|a, b| a.id.cmp(&b.id));
        out
    }
}

/// A failure of one of the uniformity conditions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SignatureIssue {
    ArityUnion {
        symbol: SymbolId,
        union: NameSet,
        index: NameSet,
    },
    MissingAction {
        symbol: SymbolId,
        step: String,
    },
    IndexMismatch {
        symbol: SymbolId,
        step: String,
        image: SymbolId,
        expected: NameSet,
        found: NameSet,
    },
    ArityTransport {
        symbol: SymbolId,
        step: String,
        image: SymbolId,
        expected: String,
        found: String,
    },
    Functoriality {
        violation: String,
    },
}

impl fmt::Display for SignatureIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureIssue::ArityUnion { symbol, union, index } => {
                write!(f, "arity union: sorts of {symbol} cover {union}, index is {index}")
            }
            SignatureIssue::MissingAction { symbol, step } => {
                write!(f, "missing action: {step} . {symbol}")
            }
            SignatureIssue::IndexMismatch {
                symbol,
                step,
                image,
                expected,
                found,
            } => write!(
                f,
                "index mismatch: {step} . {symbol} = {image} has index {found}, expected {expected}"
            ),
            SignatureIssue::ArityTransport {
                symbol,
                step,
                image,
                expected,
                found,
            } => write!(
                f,
                "arity transport: {step} . {symbol} must have arity {expected} but {image} declares {found}"
            ),
            SignatureIssue::Functoriality { violation } => {
                write!(f, "functoriality: {violation}")
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SignatureReport {
    pub symbols: usize,
    pub issues: Vec<SignatureIssue>,
}

impl SignatureReport {
    pub fn is_clean(&self) -> bool {
        self.issues.is_empty()
    }
}

/// The arity `u . f` must have: `T \ u[S \ S_i]` at each position.
pub fn transported_arity(op: &OpSymbol, step: &GeneratorStep) -> (Vec<NameSet>, NameSet) {
    let target = step.target();
    let shift = |si: &NameSet| target.difference(&op.index.difference(si).image(|a| step.apply_name(a)));
    (op.arg_sorts.iter().map(shift).collect(), shift(&op.result_sort))
}

/// Checks the uniformity conditions for every symbol and generator inside `universe`.
pub fn check_uniform_signature(sig: &UniformSignature, universe: &NameSet) -> Result<SignatureReport, SignatureError> {
    for (from, _, to) in sig.actions() {
        for id in [from, to] {
            if sig.symbol(id).is_none() {
                return Err(SignatureError::UnknownSymbol(id.to_string()));
            }
        }
    }
    let symbols = sig.symbols_in(universe);
    let mut report = SignatureReport {
        symbols: symbols.len(),
        issues: Vec::new(),
    };
    let mut total = true;
    for op in &symbols {
        let union = op.arg_sorts.iter().fold(op.result_sort.clone(), |acc, s| acc.union(s));
        if union != op.index {
            report.issues.push(SignatureIssue::ArityUnion {
                symbol: op.id.clone(),
                union,
                index: op.index.clone(),
            });
        }
        for step in GeneratorStep::out_of(&op.index, universe) {
            let Some(image_id) = sig.act(&step, &op.id) else {
                report.issues.push(SignatureIssue::MissingAction {
                    symbol: op.id.clone(),
                    step: step.to_string(),
                });
                total = false;
                continue;
            };
            let image = sig.symbol(&image_id).expect("action targets are declared");
            if image.index != step.target() {
                report.issues.push(SignatureIssue::IndexMismatch {
                    symbol: op.id.clone(),
                    step: step.to_string(),
                    image: image_id,
                    expected: step.target(),
                    found: image.index,
                });
                total = false;
                continue;
            }
            let (args, result) = transported_arity(op, &step);
            let expected = OpSymbol {
                arg_sorts: args,
                result_sort: result,
                ..image.clone()
            };
            if expected.arg_sorts != image.arg_sorts || expected.result_sort != image.result_sort {
                report.issues.push(SignatureIssue::ArityTransport {
                    symbol: op.id.clone(),
                    step: step.to_string(),
                    image: image_id,
                    expected: expected.arity_text(),
                    found: image.arity_text(),
                });
            }
        }
    }
    if total {
        for v in op_presheaf_violations(sig, universe, &symbols) {
            report.issues.push(SignatureIssue::Functoriality {
                violation: v.to_string(),
            });
        }
    }
    Ok(report)
}

fn op_presheaf_violations(sig: &UniformSignature, universe: &NameSet, symbols: &[OpSymbol]) -> Vec<Violation> {
    let mut by_index: BTreeMap<NameSet, Vec<SymbolId>> =
        universe.subsets().into_iter().map(|s| (s, Vec::new())).collect();
    for op in symbols {
        by_index
            .get_mut(&op.index)
            .expect("index inside universe")
            .push(op.id.clone());
    }
    let pos = |s: &NameSet, id: &SymbolId| by_index[s].iter().position(|x| x == id).expect("closed");
    let step_image = |step: GeneratorStep, x: usize| {
        let id = &by_index[&step.source()][x];
        pos(&step.target(), &sig.act(&step, id).expect("total"))
    };
    let op_presheaf = TruncatedPresheaf::build(
        universe,
        |s| by_index[s].iter().map(SymbolId::to_string).collect(),
        |s, a, x| step_image(GeneratorStep::weaken(s.clone(), a), x),
        |s, a, b, x| step_image(GeneratorStep::rename(s.clone(), a, b), x),
    );
    validate_presheaf(&op_presheaf)
        .map(|r| r.violations)
        .unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(s: &str) -> NameSet {
        s.parse().unwrap()
    }

    fn lam_family() -> Family {
        Family {
            name: "lam".into(),
            param_names: vec!["x".into()],
            args: vec![SortExpr(vec![SortAtom::Base, SortAtom::Param(0)])],
            result: SortExpr(vec![SortAtom::Base]),
            index: SortExpr(vec![SortAtom::Base, SortAtom::Param(0)]),
        }
    }

    #[test]
    fn family_action_follows_the_injection() {
        let mut sig = UniformSignature::new();
        sig.add_family(lam_family()).unwrap();
        let a = "a".parse().unwrap();
        let b = "b".parse().unwrap();
        let c = "c".parse().unwrap();
        let lam_a = SymbolId::new("lam", vec![a], NameSet::new());
        assert_eq!(sig.weaken_symbol(&lam_a, b).unwrap().to_string(), "lam[a]{b}");
        let ren = GeneratorStep::rename(NameSet::new(), a, b);
        assert_eq!(sig.act(&ren, &lam_a).unwrap().to_string(), "lam[b]{}");
        let lam_ab = SymbolId::new("lam", vec![a], set("{b}"));
        let ren = GeneratorStep::rename(set("{a}"), b, c);
        assert_eq!(sig.act(&ren, &lam_ab).unwrap().to_string(), "lam[a]{c}");
    }

    #[test]
    fn lam_family_is_uniform() {
        let mut sig = UniformSignature::new();
        sig.add_family(lam_family()).unwrap();
        let report = check_uniform_signature(&sig, &NameSet::first_n(3)).unwrap();
        assert!(report.is_clean(), "{:?}", report.issues);
        assert_eq!(report.symbols, 3 * 4);
    }

    #[test]
    fn transported_arity_of_weakened_lam() {
        let fam = lam_family();
        let a = "a".parse().unwrap();
        let op = fam.instance(&[a], &NameSet::new()).unwrap();
        let (args, res) = transported_arity(&op, &GeneratorStep::weaken(set("{a}"), "b".parse().unwrap()));
        assert_eq!(args, vec![set("{a,b}")]);
        assert_eq!(res, set("{b}"));
    }

    #[test]
    fn action_on_unknown_symbol_is_structural() {
        let mut sig = UniformSignature::new();
        let op = OpSymbol {
            id: SymbolId::plain("k", NameSet::new()),
            index: NameSet::new(),
            arg_sorts: vec![],
            result_sort: NameSet::new(),
        };
        sig.add_op(op).unwrap();
        let err = sig
            .add_action(
                GeneratorStep::weaken(NameSet::new(), "a".parse().unwrap()),
                SymbolId::plain("k", NameSet::new()),
                SymbolId::plain("k", set("{a}")),
            )
            .unwrap_err();
        assert!(matches!(err, SignatureError::UnknownSymbol(_)));
    }
}
