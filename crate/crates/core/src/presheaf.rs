//! Finite truncations of presheaves over finite name sets and injections.
//!
//! A [`TruncatedPresheaf`] stores a carrier for every subset of a bounded
//! universe together with the weakening maps `w_{S,a}` and renaming maps
//! `(b/a)_S` between them. Its elements are indices into per-sort label
//! lists.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::names::{injection_factor, GeneratorStep, Injection, Name, NameSet, Permutation};
use crate::nominal::NominalValue;

pub type Elem = usize;

/// Default cap on universe size; carriers are stored for all `2^n` sorts.
pub const MAX_UNIVERSE: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresheafError {
    #[error("no carrier for sort {0}")]
    MissingCarrier(NameSet),
    #[error("missing table w_{{{base},{name}}}")]
    MissingWeakening { base: NameSet, name: Name },
    #[error("missing table ({to}/{from})_{base}")]
    MissingRenaming { base: NameSet, from: Name, to: Name },
    #[error("table {table} has {found} entries, expected {expected}")]
    TableLength {
        table: String,
        expected: usize,
        found: usize,
    },
    #[error("table {table} maps to element {value} outside the target carrier")]
    ElementOutOfRange { table: String, value: Elem },
    #[error("duplicate element `{label}` in sort {sort}")]
    DuplicateLabel { sort: NameSet, label: String },
    #[error("sort {0} is outside the universe")]
    OutsideUniverse(NameSet),
    #[error("element {element} is not in the carrier of {sort}")]
    NotInCarrier { sort: NameSet, element: String },
    #[error("headroom exhausted: no fresh name for sort {sort}")]
    HeadroomExhausted { sort: NameSet },
    #[error("value {value} has support outside the universe")]
    SupportOutsideUniverse { value: String },
    #[error("value set not closed: {perm} sends {value} outside the set")]
    NotClosed { value: String, perm: String },
    #[error("invalid generator step {0}")]
    InvalidStep(String),
    #[error("universe of {0} names exceeds the cap of {MAX_UNIVERSE}")]
    UniverseTooLarge(usize),
    #[error("model format: {0}")]
    Format(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncatedPresheaf {
    universe: NameSet,
    carrier: BTreeMap<NameSet, Vec<String>>,
    wk: BTreeMap<(NameSet, Name), Vec<Elem>>,
    ren: BTreeMap<(NameSet, Name, Name), Vec<Elem>>,
    index: BTreeMap<NameSet, HashMap<String, Elem>>,
}

impl TruncatedPresheaf {
    /// Assembles a presheaf from raw tables. The structure is not checked
    /// here; see [`TruncatedPresheaf::check_structure`].
    pub fn from_parts(
        universe: NameSet,
        carrier: BTreeMap<NameSet, Vec<String>>,
        wk: BTreeMap<(NameSet, Name), Vec<Elem>>,
        ren: BTreeMap<(NameSet, Name, Name), Vec<Elem>>,
    ) -> Self {
        let index = carrier
            .iter()
            .map(|(s, labels)| {
                let idx = labels.iter().enumerate().map(|(i, l)| (l.clone(), i)).collect();
                (s.clone(), idx)
            })
            .collect();
        TruncatedPresheaf {
            universe,
            carrier,
            wk,
            ren,
            index,
        }
    }

    /// Builds every table from closures over the universe.
    pub fn build(
        universe: &NameSet,
        mut carrier: impl FnMut(&NameSet) -> Vec<String>,
        mut wk: impl FnMut(&NameSet, Name, Elem) -> Elem,
        mut ren: impl FnMut(&NameSet, Name, Name, Elem) -> Elem,
    ) -> Self {
        let sorts = universe.subsets();
        let carriers: BTreeMap<NameSet, Vec<String>> = sorts.iter().map(|s| (s.clone(), carrier(s))).collect();
        let mut wk_tables = BTreeMap::new();
        let mut ren_tables = BTreeMap::new();
        for s in &sorts {
            for a in universe.difference(s).iter() {
                let table = (0..carriers[s].len()).map(|x| wk(s, a, x)).collect();
                wk_tables.insert((s.clone(), a), table);
                for b in universe.difference(s).iter().filter(|&b| b != a) {
                    let n = carriers[&s.with(a)].len();
                    let table = (0..n).map(|x| ren(s, a, b, x)).collect();
                    ren_tables.insert((s.clone(), a, b), table);
                }
            }
        }
        TruncatedPresheaf::from_parts(universe.clone(), carriers, wk_tables, ren_tables)
    }

    pub fn universe(&self) -> &NameSet {
        &self.universe
    }

    /// All sorts, smallest first.
    pub fn sorts(&self) -> Vec<NameSet> {
        self.universe.subsets()
    }

    pub fn carrier(&self, s: &NameSet) -> Result<&[String], PresheafError> {
        self.carrier
            .get(s)
            .map(Vec::as_slice)
            .ok_or_else(|| self.missing_sort(s))
    }

    fn missing_sort(&self, s: &NameSet) -> PresheafError {
        if s.is_subset(&self.universe) {
            PresheafError::MissingCarrier(s.clone())
        } else {
            PresheafError::OutsideUniverse(s.clone())
        }
    }

    pub fn size(&self, s: &NameSet) -> Result<usize, PresheafError> {
        self.carrier(s).map(<[String]>::len)
    }

    pub fn label(&self, s: &NameSet, x: Elem) -> Result<&str, PresheafError> {
        self.carrier(s)?
            .get(x)
            .map(String::as_str)
            .ok_or_else(|| PresheafError::NotInCarrier {
                sort: s.clone(),
                element: x.to_string(),
            })
    }

    pub fn find(&self, s: &NameSet, label: &str) -> Option<Elem> {
        self.index.get(s).and_then(|m| m.get(label)).copied()
    }

    /// `w_{S,a}(x)`.
    pub fn wk(&self, s: &NameSet, a: Name, x: Elem) -> Result<Elem, PresheafError> {
        let table = self
            .wk
            .get(&(s.clone(), a))
            .ok_or_else(|| self.missing_step(&GeneratorStep::weaken(s.clone(), a)))?;
        table.get(x).copied().ok_or_else(|| PresheafError::NotInCarrier {
            sort: s.clone(),
            element: x.to_string(),
        })
    }

    /// `(to/from)_S(x)` for `x` in the carrier of `S∪{from}`.
    pub fn ren(&self, s: &NameSet, from: Name, to: Name, x: Elem) -> Result<Elem, PresheafError> {
        let table = self
            .ren
            .get(&(s.clone(), from, to))
            .ok_or_else(|| self.missing_step(&GeneratorStep::rename(s.clone(), from, to)))?;
        table.get(x).copied().ok_or_else(|| PresheafError::NotInCarrier {
            sort: s.with(from),
            element: x.to_string(),
        })
    }

    fn missing_step(&self, step: &GeneratorStep) -> PresheafError {
        if !step.is_valid() {
            return PresheafError::InvalidStep(step.to_string());
        }
        if !step.source().union(&step.target()).is_subset(&self.universe) {
            return PresheafError::OutsideUniverse(step.source().union(&step.target()));
        }
        match step {
            GeneratorStep::Weaken { base, name } => PresheafError::MissingWeakening {
                base: base.clone(),
                name: *name,
            },
            GeneratorStep::Rename { base, from, to } => PresheafError::MissingRenaming {
                base: base.clone(),
                from: *from,
                to: *to,
            },
        }
    }

    pub fn apply_step(&self, step: &GeneratorStep, x: Elem) -> Result<Elem, PresheafError> {
        match step {
            GeneratorStep::Weaken { base, name } => self.wk(base, *name, x),
            GeneratorStep::Rename { base, from, to } => self.ren(base, *from, *to, x),
        }
    }

    /// Applies a composable sequence of generators, first step first.
    pub fn apply_steps(&self, source: &NameSet, steps: &[GeneratorStep], x: Elem) -> Result<Elem, PresheafError> {
        let mut current = source.clone();
        let mut x = x;
        if x >= self.size(source)? {
            return Err(PresheafError::NotInCarrier {
                sort: source.clone(),
                element: x.to_string(),
            });
        }
        for step in steps {
            if step.source() != current || !step.is_valid() {
                return Err(PresheafError::InvalidStep(step.to_string()));
            }
            x = self.apply_step(step, x)?;
            current = step.target();
        }
        Ok(x)
    }

    pub fn wk_table(&self, s: &NameSet, a: Name) -> Option<&[Elem]> {
        self.wk.get(&(s.clone(), a)).map(Vec::as_slice)
    }

    pub fn ren_table(&self, s: &NameSet, from: Name, to: Name) -> Option<&[Elem]> {
        self.ren.get(&(s.clone(), from, to)).map(Vec::as_slice)
    }

    pub fn wk_tables(&self) -> impl Iterator<Item = (&(NameSet, Name), &Vec<Elem>)> {
        self.wk.iter()
    }

    pub fn ren_tables(&self) -> impl Iterator<Item = (&(NameSet, Name, Name), &Vec<Elem>)> {
        self.ren.iter()
    }

    pub fn carriers(&self) -> impl Iterator<Item = (&NameSet, &Vec<String>)> {
        self.carrier.iter()
    }

    /// Overwrites one entry of a weakening table.
    pub fn set_wk(&mut self, s: &NameSet, a: Name, x: Elem, y: Elem) {
        if let Some(t) = self.wk.get_mut(&(s.clone(), a)) {
            t[x] = y;
        }
    }

    /// Overwrites one entry of a renaming table.
    pub fn set_ren(&mut self, s: &NameSet, from: Name, to: Name, x: Elem, y: Elem) {
        if let Some(t) = self.ren.get_mut(&(s.clone(), from, to)) {
            t[x] = y;
        }
    }

    /// Every carrier and generator table exists, is total and maps into range.
    pub fn check_structure(&self) -> Result<(), PresheafError> {
        for s in self.sorts() {
            let labels = self.carrier(&s)?;
            let mut seen = std::collections::HashSet::new();
            for l in labels {
                if !seen.insert(l) {
                    return Err(PresheafError::DuplicateLabel {
                        sort: s.clone(),
                        label: l.clone(),
                    });
                }
            }
        }
        for s in self.sorts() {
            for step in GeneratorStep::out_of(&s, &self.universe) {
                let table = match &step {
                    GeneratorStep::Weaken { base, name } => self.wk.get(&(base.clone(), *name)),
                    GeneratorStep::Rename { base, from, to } => self.ren.get(&(base.clone(), *from, *to)),
                }
                .ok_or_else(|| self.missing_step(&step))?;
                let expected = self.size(&step.source())?;
                let target = self.size(&step.target())?;
                if table.len() != expected {
                    return Err(PresheafError::TableLength {
                        table: step.to_string(),
                        expected,
                        found: table.len(),
                    });
                }
                if let Some(&bad) = table.iter().find(|&&y| y >= target) {
                    return Err(PresheafError::ElementOutOfRange {
                        table: step.to_string(),
                        value: bad,
                    });
                }
            }
        }
        Ok(())
    }

    /// Carriers restricted to the subsets of `sub`, which must be a subset of the universe.
    pub fn restrict(&self, sub: &NameSet) -> TruncatedPresheaf {
        assert!(sub.is_subset(&self.universe));
        TruncatedPresheaf::build(
            sub,
            |s| self.carrier[s].clone(),
            |s, a, x| self.wk(s, a, x).expect("restricted table"),
            |s, a, b, x| self.ren(s, a, b, x).expect("restricted table"),
        )
    }
}

/// The six equation schemes presenting presheaves on finite name sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum SetIScheme {
    RenameInverse,
    RenameCommute,
    RenameCompose,
    RenameWeakenCommute,
    RenameAfterWeaken,
    WeakenCommute,
}

impl SetIScheme {
    pub const ALL: [SetIScheme; 6] = [
        SetIScheme::RenameInverse,
        SetIScheme::RenameCommute,
        SetIScheme::RenameCompose,
        SetIScheme::RenameWeakenCommute,
        SetIScheme::RenameAfterWeaken,
        SetIScheme::WeakenCommute,
    ];

    pub fn number(self) -> usize {
        self as usize + 1
    }

    pub fn equation(self) -> &'static str {
        match self {
            SetIScheme::RenameInverse => "(a/b)_S(b/a)_S(x)=x",
            SetIScheme::RenameCommute => "(b/a)_{S∪{d}}(d/c)_{S∪{a}}(x)=(d/c)_{S∪{b}}(b/a)_{S∪{c}}(x)",
            SetIScheme::RenameCompose => "(c/b)_S(b/a)_S(x)=(c/a)_S(x)",
            SetIScheme::RenameWeakenCommute => "(b/a)_{S∪{c}}w_{S∪{a},c}(x)=w_{S∪{b},c}(b/a)_S(x)",
            SetIScheme::RenameAfterWeaken => "(b/a)_Sw_{S,a}(x)=w_{S,b}(x)",
            SetIScheme::WeakenCommute => "w_{S∪{b},a}w_{S,b}(x)=w_{S∪{a},b}w_{S,a}(x)",
        }
    }
}

impl fmt::Display for SetIScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "E{} {}", self.number(), self.equation())
    }
}

/// One failing instance of an equation scheme.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub scheme: SetIScheme,
    pub base: NameSet,
    /// The scheme's name parameters in the order `a, b, c, d`.
    pub names: Vec<Name>,
    pub element: String,
    pub lhs: String,
    pub rhs: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let letters = ["a", "b", "c", "d"];
        write!(f, "{} at S={}", self.scheme, self.base)?;
        for (l, n) in letters.iter().zip(&self.names) {
            write!(f, " {l}={n}")?;
        }
        write!(f, " x={}: lhs={} rhs={}", self.element, self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn mentions(&self, scheme: SetIScheme) -> bool {
        self.violations.iter().any(|v| v.scheme == scheme)
    }
}

/// Ordered tuples of `k` distinct names drawn from `pool`.
fn distinct_tuples(pool: &NameSet, k: usize) -> Vec<Vec<Name>> {
    fn rec(pool: &[Name], k: usize, cur: &mut Vec<Name>, out: &mut Vec<Vec<Name>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for &a in pool {
            if !cur.contains(&a) {
                cur.push(a);
                rec(pool, k, cur, out);
                cur.pop();
            }
        }
    }
    let items: Vec<Name> = pool.iter().collect();
    let mut out = Vec::new();
    rec(&items, k, &mut Vec::new(), &mut out);
    out
}

/// Checks every instance of the six schemes inside the universe.
pub fn validate_presheaf(x: &TruncatedPresheaf) -> Result<ValidationReport, PresheafError> {
    x.check_structure()?;
    let mut report = ValidationReport::default();
    let u = x.universe().clone();
    for s in x.sorts() {
        let outside = u.difference(&s);
        for scheme in SetIScheme::ALL {
            let arity = match scheme {
                SetIScheme::RenameCommute => 4,
                SetIScheme::RenameCompose | SetIScheme::RenameWeakenCommute => 3,
                _ => 2,
            };
            for names in distinct_tuples(&outside, arity) {
                check_instance(x, scheme, &s, &names, &mut report)?;
            }
        }
    }
    Ok(report)
}

/// Both sides of a scheme instance at an element, with the sort they land in.
type Sides<'a> = Box<dyn Fn(Elem) -> Result<(Elem, Elem, NameSet), PresheafError> + 'a>;

fn check_instance(
    x: &TruncatedPresheaf,
    scheme: SetIScheme,
    s: &NameSet,
    names: &[Name],
    report: &mut ValidationReport,
) -> Result<(), PresheafError> {
    let a = names[0];
    let b = names[1];
    let (domain, sides): (NameSet, Sides) = match scheme {
        SetIScheme::RenameInverse => (
            s.with(a),
            Box::new(move |e| {
                let l = x.ren(s, b, a, x.ren(s, a, b, e)?)?;
                Ok((l, e, s.with(a)))
            }),
        ),
        SetIScheme::RenameCommute => {
            let (c, d) = (names[2], names[3]);
            (
                s.with(a).with(c),
                Box::new(move |e| {
                    let l = x.ren(&s.with(d), a, b, x.ren(&s.with(a), c, d, e)?)?;
                    let r = x.ren(&s.with(b), c, d, x.ren(&s.with(c), a, b, e)?)?;
                    Ok((l, r, s.with(b).with(d)))
                }),
            )
        }
        SetIScheme::RenameCompose => {
            let c = names[2];
            (
                s.with(a),
                Box::new(move |e| {
                    let l = x.ren(s, b, c, x.ren(s, a, b, e)?)?;
                    let r = x.ren(s, a, c, e)?;
                    Ok((l, r, s.with(c)))
                }),
            )
        }
        SetIScheme::RenameWeakenCommute => {
            let c = names[2];
            (
                s.with(a),
                Box::new(move |e| {
                    let l = x.ren(&s.with(c), a, b, x.wk(&s.with(a), c, e)?)?;
                    let r = x.wk(&s.with(b), c, x.ren(s, a, b, e)?)?;
                    Ok((l, r, s.with(b).with(c)))
                }),
            )
        }
        SetIScheme::RenameAfterWeaken => (
            s.clone(),
            Box::new(move |e| {
                let l = x.ren(s, a, b, x.wk(s, a, e)?)?;
                let r = x.wk(s, b, e)?;
                Ok((l, r, s.with(b)))
            }),
        ),
        SetIScheme::WeakenCommute => (
            s.clone(),
            Box::new(move |e| {
                let l = x.wk(&s.with(b), a, x.wk(s, b, e)?)?;
                let r = x.wk(&s.with(a), b, x.wk(s, a, e)?)?;
                Ok((l, r, s.with(a).with(b)))
            }),
        ),
    };
    for e in 0..x.size(&domain)? {
        let (l, r, target) = sides(e)?;
        if l != r {
            report.violations.push(Violation {
                scheme,
                base: s.clone(),
                names: names.to_vec(),
                element: x.label(&domain, e)?.to_string(),
                lhs: x.label(&target, l)?.to_string(),
                rhs: x.label(&target, r)?.to_string(),
            });
        }
    }
    Ok(())
}

/// Transports `x` along an injection by composing its canonical factorization.
pub fn apply_injection(x: &TruncatedPresheaf, u: &Injection, e: Elem) -> Result<Elem, PresheafError> {
    for s in [u.source(), u.target()] {
        if !s.is_subset(x.universe()) {
            return Err(PresheafError::OutsideUniverse(s.clone()));
        }
    }
    let steps = injection_factor(u);
    for step in &steps {
        if !step.source().union(&step.target()).is_subset(x.universe()) {
            return Err(PresheafError::HeadroomExhausted { sort: step.source() });
        }
    }
    x.apply_steps(u.source(), &steps, e)
}

/// How the abstraction functor picks the bound name for each sort.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FreshChoice {
    /// The least name of the universe outside the sort.
    #[default]
    Least,
    /// The greatest name of the universe outside the sort.
    Greatest,
}

impl FreshChoice {
    pub fn pick(self, universe: &NameSet, s: &NameSet) -> Option<Name> {
        let mut avail = universe.difference(s).iter().collect::<Vec<_>>().into_iter();
        match self {
            FreshChoice::Least => avail.next(),
            FreshChoice::Greatest => avail.next_back(),
        }
    }
}

/// The abstraction `δX` with `δX(S) = X(S∪{a_S})`, over the universe of `X`
/// minus its greatest name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaPresheaf {
    presheaf: TruncatedPresheaf,
    bound: BTreeMap<NameSet, Name>,
    source_universe: NameSet,
}

impl DeltaPresheaf {
    pub fn presheaf(&self) -> &TruncatedPresheaf {
        &self.presheaf
    }

    pub fn into_presheaf(self) -> TruncatedPresheaf {
        self.presheaf
    }

    /// The name `a_S` abstracted at sort `S`.
    pub fn bound_name(&self, s: &NameSet) -> Option<Name> {
        self.bound.get(s).copied()
    }

    pub fn bound_names(&self) -> &BTreeMap<NameSet, Name> {
        &self.bound
    }

    pub fn source_universe(&self) -> &NameSet {
        &self.source_universe
    }
}

/// Renames the abstracted name of an element of `X(S∪{from})` to `to`, i.e.
/// `[from]_S x = [to]_S (to/from)_S x`.
pub fn convert_bound(x: &TruncatedPresheaf, s: &NameSet, from: Name, to: Name, e: Elem) -> Result<Elem, PresheafError> {
    if from == to {
        Ok(e)
    } else {
        x.ren(s, from, to, e)
    }
}

pub fn delta(x: &TruncatedPresheaf) -> Result<DeltaPresheaf, PresheafError> {
    delta_with(x, FreshChoice::Least)
}

pub fn delta_with(x: &TruncatedPresheaf, choice: FreshChoice) -> Result<DeltaPresheaf, PresheafError> {
    let u = x.universe().clone();
    let top = u
        .last()
        .ok_or(PresheafError::HeadroomExhausted { sort: NameSet::new() })?;
    let target = u.without(top);
    let pick = |s: &NameSet| {
        choice
            .pick(&u, s)
            .ok_or_else(|| PresheafError::HeadroomExhausted { sort: s.clone() })
    };
    let mut bound = BTreeMap::new();
    for s in target.subsets() {
        bound.insert(s.clone(), pick(&s)?);
    }
    let err = std::cell::RefCell::new(None);
    let record = |r: Result<Elem, PresheafError>| match r {
        Ok(v) => v,
        Err(e) => {
            err.borrow_mut().get_or_insert(e);
            0
        }
    };
    let presheaf = {
        let bound = &bound;
        let carrier = |s: &NameSet| -> Vec<String> {
            let a = bound[s];
            x.carrier(&s.with(a))
                .map(|labels| labels.iter().map(|l| format!("[{a}]{l}")).collect())
                .unwrap_or_default()
        };
        let wk_at = |s: &NameSet, b: Name, e: Elem| -> Result<Elem, PresheafError> {
            let a = bound[s];
            let a2 = bound[&s.with(b)];
            let y = convert_bound(x, s, a, a2, e)?;
            x.wk(&s.with(a2), b, y)
        };
        let ren_at = |s: &NameSet, b: Name, c: Name, e: Elem| -> Result<Elem, PresheafError> {
            let a1 = bound[&s.with(b)];
            let mid = if a1 != c {
                a1
            } else {
                u.difference(&s.with(b).with(c))
                    .first()
                    .ok_or_else(|| PresheafError::HeadroomExhausted {
                        sort: s.with(b).with(c),
                    })?
            };
            let y = convert_bound(x, &s.with(b), a1, mid, e)?;
            let z = x.ren(&s.with(mid), b, c, y)?;
            convert_bound(x, &s.with(c), mid, bound[&s.with(c)], z)
        };
        TruncatedPresheaf::build(
            &target,
            carrier,
            |s, b, e| record(wk_at(s, b, e)),
            |s, b, c, e| record(ren_at(s, b, c, e)),
        )
    };
    if let Some(e) = err.into_inner() {
        return Err(e);
    }
    Ok(DeltaPresheaf {
        presheaf,
        bound,
        source_universe: u,
    })
}

/// A presheaf built from nominal values: carriers are the values supported
/// by each sort.
#[derive(Debug, Clone)]
pub struct NominalPresheaf {
    pub presheaf: TruncatedPresheaf,
    pub elements: BTreeMap<NameSet, Vec<NominalValue>>,
}

impl NominalPresheaf {
    pub fn value(&self, s: &NameSet, e: Elem) -> Option<&NominalValue> {
        self.elements.get(s).and_then(|v| v.get(e))
    }

    pub fn index_of(&self, s: &NameSet, v: &NominalValue) -> Option<Elem> {
        self.presheaf.find(s, &v.canonical().to_string())
    }
}

/// Embeds a permutation-closed set of values: `X(S)` holds the values
/// supported by `S`, weakenings are inclusions and renamings act by swaps.
pub fn nominal_to_presheaf(values: &[NominalValue], universe: &NameSet) -> Result<NominalPresheaf, PresheafError> {
    if universe.len() > MAX_UNIVERSE {
        return Err(PresheafError::UniverseTooLarge(universe.len()));
    }
    let mut canon: Vec<NominalValue> = values.iter().map(NominalValue::canonical).collect();
    canon.sort();
    canon.dedup();
    let labels: HashMap<String, usize> = canon.iter().enumerate().map(|(i, v)| (v.to_string(), i)).collect();
    for v in &canon {
        if !v.support().is_subset(universe) {
            return Err(PresheafError::SupportOutsideUniverse { value: v.to_string() });
        }
    }
    // transpositions generate the permutations of the universe
    let names: Vec<Name> = universe.iter().collect();
    for (i, &a) in names.iter().enumerate() {
        for &b in &names[i + 1..] {
            let p = Permutation::swap(a, b);
            for v in &canon {
                let moved = v.act(&p).canonical();
                if !labels.contains_key(&moved.to_string()) {
                    return Err(PresheafError::NotClosed {
                        value: v.to_string(),
                        perm: p.to_string(),
                    });
                }
            }
        }
    }
    let elements: BTreeMap<NameSet, Vec<NominalValue>> = universe
        .subsets()
        .into_iter()
        .map(|s| {
            let vs = canon.iter().filter(|v| v.support().is_subset(&s)).cloned().collect();
            (s, vs)
        })
        .collect();
    let index: BTreeMap<NameSet, HashMap<String, Elem>> = elements
        .iter()
        .map(|(s, vs)| {
            let m = vs.iter().enumerate().map(|(i, v)| (v.to_string(), i)).collect();
            (s.clone(), m)
        })
        .collect();
    let presheaf = TruncatedPresheaf::build(
        universe,
        |s| elements[s].iter().map(|v| v.to_string()).collect(),
        |s, a, e| index[&s.with(a)][&elements[s][e].to_string()],
        |s, a, b, e| {
            let v = elements[&s.with(a)][e].act(&Permutation::swap(a, b)).canonical();
            index[&s.with(b)][&v.to_string()]
        },
    );
    Ok(NominalPresheaf { presheaf, elements })
}

/// The truncation of the representable presheaf `I(A, -)`: `X(S)` is the set
/// of injections `A → S`.
pub fn representable(universe: &NameSet, a: &NameSet) -> TruncatedPresheaf {
    assert!(a.is_subset(universe));
    let label = |u: &Injection| -> String {
        let parts: Vec<String> = u
            .source()
            .iter()
            .map(|x| format!("{x}>{}", u.apply(x).expect("domain")))
            .collect();
        format!("[{}]", parts.join(","))
    };
    let carriers: BTreeMap<NameSet, Vec<Injection>> = universe
        .subsets()
        .into_iter()
        .map(|s| {
            let injs = Injection::enumerate(a, &s);
            (s, injs)
        })
        .collect();
    let find = |s: &NameSet, u: &Injection| -> Elem {
        carriers[s]
            .iter()
            .position(|v| v == u)
            .expect("composite injection is enumerated")
    };
    TruncatedPresheaf::build(
        universe,
        |s| carriers[s].iter().map(label).collect(),
        |s, n, e| {
            let t = s.with(n);
            find(&t, &carriers[s][e].then(&Injection::inclusion(s, &t)))
        },
        |s, from, to, e| {
            let src = s.with(from);
            let tgt = s.with(to);
            let step =
                Injection::from_steps(&src, &[GeneratorStep::rename(s.clone(), from, to)]).expect("valid renaming");
            find(&tgt, &carriers[&src][e].then(&step))
        },
    )
}

/// JSON-compatible model file: carriers keyed by sort, weakening tables keyed
/// `"{S}+a"`, renaming tables keyed `"{S}:a->b"` for `(b/a)_S`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresheafFile {
    pub universe: String,
    pub carrier: BTreeMap<String, Vec<String>>,
    pub wk: BTreeMap<String, BTreeMap<String, String>>,
    pub ren: BTreeMap<String, BTreeMap<String, String>>,
}

fn bad(msg: impl Into<String>) -> PresheafError {
    PresheafError::Format(msg.into())
}

impl PresheafFile {
    pub fn from_presheaf(x: &TruncatedPresheaf) -> Self {
        let label = |s: &NameSet, e: Elem| x.carrier[s][e].clone();
        PresheafFile {
            universe: x.universe.to_string(),
            carrier: x.carrier.iter().map(|(s, l)| (s.to_string(), l.clone())).collect(),
            wk: x
                .wk
                .iter()
                .map(|((s, a), t)| {
                    let entries = t
                        .iter()
                        .enumerate()
                        .map(|(i, &y)| (label(s, i), label(&s.with(*a), y)))
                        .collect();
                    (format!("{s}+{a}"), entries)
                })
                .collect(),
            ren: x
                .ren
                .iter()
                .map(|((s, a, b), t)| {
                    let entries = t
                        .iter()
                        .enumerate()
                        .map(|(i, &y)| (label(&s.with(*a), i), label(&s.with(*b), y)))
                        .collect();
                    (format!("{s}:{a}->{b}"), entries)
                })
                .collect(),
        }
    }

    pub fn to_presheaf(&self) -> Result<TruncatedPresheaf, PresheafError> {
        let universe: NameSet = self
            .universe
            .parse()
            .map_err(|_| bad(format!("bad universe `{}`", self.universe)))?;
        if universe.len() > MAX_UNIVERSE {
            return Err(PresheafError::UniverseTooLarge(universe.len()));
        }
        let mut carrier = BTreeMap::new();
        for (k, labels) in &self.carrier {
            let s: NameSet = k.parse().map_err(|_| bad(format!("bad sort `{k}`")))?;
            if !s.is_subset(&universe) {
                return Err(PresheafError::OutsideUniverse(s));
            }
            carrier.insert(s, labels.clone());
        }
        let lookup = |s: &NameSet, l: &str| -> Result<Elem, PresheafError> {
            carrier
                .get(s)
                .and_then(|ls: &Vec<String>| ls.iter().position(|x| x == l))
                .ok_or_else(|| PresheafError::NotInCarrier {
                    sort: s.clone(),
                    element: l.to_string(),
                })
        };
        let table = |src: &NameSet,
                     tgt: &NameSet,
                     entries: &BTreeMap<String, String>,
                     name: &str|
         -> Result<Vec<Elem>, PresheafError> {
            let n = carrier
                .get(src)
                .map(Vec::len)
                .ok_or_else(|| PresheafError::MissingCarrier(src.clone()))?;
            let mut out = vec![None; n];
            for (k, v) in entries {
                let i = lookup(src, k)?;
                out[i] = Some(lookup(tgt, v)?);
            }
            out.into_iter()
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| PresheafError::TableLength {
                    table: name.to_string(),
                    expected: n,
                    found: entries.len(),
                })
        };
        let mut wk = BTreeMap::new();
        for (k, entries) in &self.wk {
            let (s, a) = k
                .rsplit_once('+')
                .ok_or_else(|| bad(format!("bad weakening key `{k}`")))?;
            let s: NameSet = s.parse().map_err(|_| bad(format!("bad weakening key `{k}`")))?;
            let a: Name = a.parse().map_err(|_| bad(format!("bad weakening key `{k}`")))?;
            wk.insert((s.clone(), a), table(&s, &s.with(a), entries, k)?);
        }
        let mut ren = BTreeMap::new();
        for (k, entries) in &self.ren {
            let parse = || -> Option<(NameSet, Name, Name)> {
                let (s, rest) = k.rsplit_once(':')?;
                let (a, b) = rest.split_once("->")?;
                Some((s.parse().ok()?, a.parse().ok()?, b.parse().ok()?))
            };
            let (s, a, b) = parse().ok_or_else(|| bad(format!("bad renaming key `{k}`")))?;
            ren.insert((s.clone(), a, b), table(&s.with(a), &s.with(b), entries, k)?);
        }
        let x = TruncatedPresheaf::from_parts(universe, carrier, wk, ren);
        x.check_structure()?;
        Ok(x)
    }
}

pub fn presheaf_to_json(x: &TruncatedPresheaf) -> String {
    serde_json::to_string_pretty(&PresheafFile::from_presheaf(x)).expect("serializable") + "\n"
}

pub fn presheaf_from_json(s: &str) -> Result<TruncatedPresheaf, PresheafError> {
    let file: PresheafFile = serde_json::from_str(s).map_err(|e| bad(e.to_string()))?;
    file.to_presheaf()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    fn set(s: &str) -> NameSet {
        s.parse().unwrap()
    }

    fn v(s: &str) -> NominalValue {
        s.parse().unwrap()
    }

    /// The constant presheaf with `k` elements and identity maps.
    fn constant(universe: &NameSet, k: usize) -> TruncatedPresheaf {
        TruncatedPresheaf::build(
            universe,
            |_| (0..k).map(|i| i.to_string()).collect(),
            |_, _, x| x,
            |_, _, _, x| x,
        )
    }

    #[test]
    fn representable_of_empty_is_clean() {
        let x = representable(&NameSet::first_n(3), &NameSet::new());
        for s in x.sorts() {
            assert_eq!(x.size(&s).unwrap(), 1);
        }
        assert!(validate_presheaf(&x).unwrap().is_clean());
    }

    #[test]
    fn redirected_renaming_breaks_inverse_law() {
        let u = NameSet::first_n(2);
        let mut x = constant(&u, 2);
        x.set_ren(&NameSet::new(), n("a"), n("b"), 0, 1);
        let report = validate_presheaf(&x).unwrap();
        assert!(report.mentions(SetIScheme::RenameInverse));
        let hit = report
            .violations
            .iter()
            .find(|v| v.scheme == SetIScheme::RenameInverse)
            .unwrap();
        assert_eq!(hit.scheme.equation(), "(a/b)_S(b/a)_S(x)=x");
    }

    #[test]
    fn missing_table_is_structural() {
        let u = NameSet::first_n(2);
        let x = constant(&u, 1);
        let mut wk: BTreeMap<(NameSet, Name), Vec<Elem>> = x.wk_tables().map(|(k, v)| (k.clone(), v.clone())).collect();
        wk.remove(&(NameSet::new(), n("a")));
        let carrier = x.carriers().map(|(k, v)| (k.clone(), v.clone())).collect();
        let ren = x.ren_tables().map(|(k, v)| (k.clone(), v.clone())).collect();
        let broken = TruncatedPresheaf::from_parts(u, carrier, wk, ren);
        assert!(matches!(
            validate_presheaf(&broken),
            Err(PresheafError::MissingWeakening { .. })
        ));
    }

    #[test]
    fn apply_injection_examples() {
        let x = representable(&NameSet::first_n(3), &set("{a}"));
        let s = set("{a}");
        for e in 0..x.size(&s).unwrap() {
            assert_eq!(apply_injection(&x, &Injection::identity(&s), e).unwrap(), e);
            let incl = Injection::inclusion(&s, &set("{a,b}"));
            assert_eq!(apply_injection(&x, &incl, e).unwrap(), x.wk(&s, n("b"), e).unwrap());
        }
        assert!(matches!(
            apply_injection(&x, &Injection::identity(&s), 7),
            Err(PresheafError::NotInCarrier { .. })
        ));
    }

    #[test]
    fn two_factorizations_agree() {
        let x = representable(&NameSet::first_n(3), &set("{a}"));
        let (a, b, c) = (n("a"), n("b"), n("c"));
        let first = [
            GeneratorStep::rename(NameSet::new(), a, b),
            GeneratorStep::weaken(set("{b}"), c),
        ];
        let second = [
            GeneratorStep::weaken(set("{a}"), c),
            GeneratorStep::rename(set("{c}"), a, b),
        ];
        let u = Injection::new(set("{a}"), set("{b,c}"), [(a, b)]).unwrap();
        assert_eq!(Injection::from_steps(&set("{a}"), &first).unwrap(), u);
        assert_eq!(Injection::from_steps(&set("{a}"), &second).unwrap(), u);
        for e in 0..x.size(&set("{a}")).unwrap() {
            let l = x.apply_steps(&set("{a}"), &first, e).unwrap();
            let r = x.apply_steps(&set("{a}"), &second, e).unwrap();
            assert_eq!(l, r);
            assert_eq!(apply_injection(&x, &u, e).unwrap(), l);
        }
    }

    #[test]
    fn delta_of_empty_and_representable() {
        let u = NameSet::first_n(3);
        let empty = constant(&u, 0);
        let d = delta(&empty).unwrap();
        assert!(d.presheaf().sorts().iter().all(|s| d.presheaf().size(s).unwrap() == 0));

        let y = representable(&u, &NameSet::new());
        let d = delta(&y).unwrap();
        assert_eq!(d.presheaf().universe(), &set("{a,b}"));
        for s in d.presheaf().sorts() {
            assert_eq!(d.presheaf().size(&s).unwrap(), 1);
        }
        assert!(validate_presheaf(d.presheaf()).unwrap().is_clean());
        assert_eq!(d.bound_name(&set("{a}")), Some(n("b")));
    }

    #[test]
    fn delta_of_one_name_universe_has_single_sort() {
        let x = constant(&set("{a}"), 2);
        let d = delta(&x).unwrap();
        assert_eq!(d.presheaf().sorts(), vec![NameSet::new()]);
        let none = constant(&NameSet::new(), 1);
        assert!(matches!(delta(&none), Err(PresheafError::HeadroomExhausted { .. })));
    }

    #[test]
    fn nominal_examples() {
        let u = set("{a,b}");
        let x = nominal_to_presheaf(&[v("a"), v("b")], &u).unwrap();
        assert_eq!(x.presheaf.size(&NameSet::new()).unwrap(), 0);
        assert_eq!(x.presheaf.carrier(&set("{a}")).unwrap(), ["a".to_string()]);
        assert!(validate_presheaf(&x.presheaf).unwrap().is_clean());

        let x = nominal_to_presheaf(&[v("[a]a")], &u).unwrap();
        for s in u.subsets() {
            assert_eq!(x.presheaf.size(&s).unwrap(), 1);
        }
        assert!(matches!(
            nominal_to_presheaf(&[v("a")], &u),
            Err(PresheafError::NotClosed { .. })
        ));
        assert!(matches!(
            nominal_to_presheaf(&[v("c")], &u),
            Err(PresheafError::SupportOutsideUniverse { .. })
        ));
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let x = representable(&NameSet::first_n(3), &set("{a}"));
        let text = presheaf_to_json(&x);
        let back = presheaf_from_json(&text).unwrap();
        assert_eq!(back, x);
        assert_eq!(presheaf_to_json(&back), text);
    }

    #[test]
    fn json_rejects_unknown_element() {
        let x = constant(&set("{a}"), 1);
        let text = presheaf_to_json(&x).replace("\"0\": \"0\"", "\"0\": \"9\"");
        assert!(matches!(
            presheaf_from_json(&text),
            Err(PresheafError::NotInCarrier { .. })
        ));
    }
}
