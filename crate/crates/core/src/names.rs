//! Atoms, finite name sets, finitely supported permutations and injections
//! between finite name sets.
//!
//! Names are drawn from a countable, totally ordered alphabet. The n-th name
//! prints as the n-th lowercase letter for `n < 26` and as `a<n>` beyond
//! that; both spellings parse.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NameError {
    #[error("invalid name `{0}`")]
    InvalidName(String),
    #[error("invalid name set `{0}`")]
    InvalidSet(String),
    #[error("permutation data is not a bijection: {0}")]
    NotBijective(String),
    #[error("injection data rejected: {0}")]
    BadInjection(String),
}

/// An atom. The numeric id fixes the total order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Name(pub u32);

impl Name {
    pub const fn new(id: u32) -> Self {
        Name(id)
    }

    pub fn id(self) -> u32 {
        self.0
    }

    /// The least name not contained in `avoid`.
    pub fn least_fresh(avoid: &NameSet) -> Name {
        let mut i = 0;
        while avoid.contains(Name(i)) {
            i += 1;
        }
        Name(i)
    }

    /// True if `s` is a syntactically valid name.
    pub fn is_name_token(s: &str) -> bool {
        s.parse::<Name>().is_ok()
    }
}

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 < 26 {
            write!(f, "{}", (b'a' + self.0 as u8) as char)
        } else {
            write!(f, "a{}", self.0)
        }
    }
}

impl FromStr for Name {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bytes = s.as_bytes();
        match bytes {
            [c] if c.is_ascii_lowercase() => Ok(Name((c - b'a') as u32)),
            [b'a', rest @ ..] if !rest.is_empty() && rest.iter().all(u8::is_ascii_digit) => s[1..]
                .parse::<u32>()
                .map(Name)
                .map_err(|_| NameError::InvalidName(s.to_string())),
            _ => Err(NameError::InvalidName(s.to_string())),
        }
    }
}

/// A finite set of names, kept sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NameSet(BTreeSet<Name>);

impl NameSet {
    pub fn new() -> Self {
        NameSet(BTreeSet::new())
    }

    pub fn singleton(a: Name) -> Self {
        let mut s = NameSet::new();
        s.insert(a);
        s
    }

    /// The first `n` names of the canonical enumeration.
    pub fn first_n(n: usize) -> Self {
        (0..n as u32).map(Name).collect()
    }

    pub fn contains(&self, a: Name) -> bool {
        self.0.contains(&a)
    }

    pub fn insert(&mut self, a: Name) -> bool {
        self.0.insert(a)
    }

    pub fn remove(&mut self, a: Name) -> bool {
        self.0.remove(&a)
    }

    pub fn with(&self, a: Name) -> Self {
        let mut s = self.clone();
        s.insert(a);
        s
    }

    pub fn without(&self, a: Name) -> Self {
        let mut s = self.clone();
        s.remove(a);
        s
    }

    pub fn union(&self, other: &NameSet) -> Self {
        NameSet(self.0.union(&other.0).copied().collect())
    }

    pub fn difference(&self, other: &NameSet) -> Self {
        NameSet(self.0.difference(&other.0).copied().collect())
    }

    pub fn intersection(&self, other: &NameSet) -> Self {
        NameSet(self.0.intersection(&other.0).copied().collect())
    }

    pub fn is_subset(&self, other: &NameSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &NameSet) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl DoubleEndedIterator<Item = Name> + '_ {
        self.0.iter().copied()
    }

    pub fn first(&self) -> Option<Name> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Name> {
        self.0.last().copied()
    }

    /// Direct image under a name map.
    pub fn image(&self, f: impl Fn(Name) -> Name) -> Self {
        self.iter().map(f).collect()
    }

    /// All subsets, ordered by size and then lexicographically.
    pub fn subsets(&self) -> Vec<NameSet> {
        let items: Vec<Name> = self.iter().collect();
        let mut out: Vec<NameSet> = (0u64..(1u64 << items.len()))
            .map(|mask| {
                items
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask & (1 << i) != 0)
                    .map(|(_, a)| *a)
                    .collect()
            })
            .collect();
        out.sort_by(|a: &NameSet, b: &NameSet| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }

    /// The least name not in this set.
    pub fn least_fresh(&self) -> Name {
        Name::least_fresh(self)
    }
}

impl FromIterator<Name> for NameSet {
    fn from_iter<I: IntoIterator<Item = Name>>(iter: I) -> Self {
        NameSet(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a NameSet {
    type Item = Name;
    type IntoIter = std::iter::Copied<std::collections::btree_set::Iter<'a, Name>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Display for NameSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

impl FromStr for NameSet {
    type Err = NameError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('{')
            .and_then(|r| r.strip_suffix('}'))
            .ok_or_else(|| NameError::InvalidSet(s.to_string()))?;
        if inner.trim().is_empty() {
            return Ok(NameSet::new());
        }
        let mut set = NameSet::new();
        for part in inner.split(',') {
            let a: Name = part.trim().parse()?;
            if !set.insert(a) {
                return Err(NameError::InvalidSet(s.to_string()));
            }
        }
        Ok(set)
    }
}

/// A finitely supported permutation, stored as the map on moved names only.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    moved: BTreeMap<Name, Name>,
}

impl Permutation {
    pub fn identity() -> Self {
        Permutation::default()
    }

    /// The transposition `(a b)`; the identity when `a == b`.
    pub fn swap(a: Name, b: Name) -> Self {
        let mut moved = BTreeMap::new();
        if a != b {
            moved.insert(a, b);
            moved.insert(b, a);
        }
        Permutation { moved }
    }

    /// Builds a permutation from explicit `x ↦ y` pairs. Fixed points are
    /// dropped; the remaining pairs must form a bijection of their domain.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Name, Name)>) -> Result<Self, NameError> {
        let mut moved = BTreeMap::new();
        for (x, y) in pairs {
            if let Some(prev) = moved.insert(x, y) {
                if prev != y {
                    return Err(NameError::NotBijective(format!("{x} mapped twice")));
                }
            }
        }
        moved.retain(|x, y| x != y);
        let domain: BTreeSet<Name> = moved.keys().copied().collect();
        let codomain: BTreeSet<Name> = moved.values().copied().collect();
        if codomain.len() != moved.len() || domain != codomain {
            return Err(NameError::NotBijective(
                "domain and image of moved names differ".to_string(),
            ));
        }
        Ok(Permutation { moved })
    }

    pub fn apply(&self, a: Name) -> Name {
        self.moved.get(&a).copied().unwrap_or(a)
    }

    /// `self ∘ other`: applies `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let mut moved = BTreeMap::new();
        for x in self.moved.keys().chain(other.moved.keys()) {
            let y = self.apply(other.apply(*x));
            if y != *x {
                moved.insert(*x, y);
            }
        }
        Permutation { moved }
    }

    pub fn inverse(&self) -> Permutation {
        Permutation {
            moved: self.moved.iter().map(|(x, y)| (*y, *x)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.moved.is_empty()
    }

    /// The set of moved names.
    pub fn support(&self) -> NameSet {
        self.moved.keys().copied().collect()
    }

    /// Every permutation of `names` (and fixing everything else).
    pub fn all_on(names: &NameSet) -> Vec<Permutation> {
        let items: Vec<Name> = names.iter().collect();
        let mut out = Vec::new();
        let mut perm = items.clone();
        permutations_rec(&items, &mut perm, 0, &mut out);
        out
    }
}

fn permutations_rec(items: &[Name], perm: &mut Vec<Name>, k: usize, out: &mut Vec<Permutation>) {
    if k == perm.len() {
        let p = Permutation::from_pairs(items.iter().copied().zip(perm.iter().copied()))
            .expect("rearrangement is a bijection");
        out.push(p);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permutations_rec(items, perm, k + 1, out);
        perm.swap(k, i);
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moved.is_empty() {
            return write!(f, "id");
        }
        // cycle notation, each cycle starting at its least name
        let mut seen = BTreeSet::new();
        for &start in self.moved.keys() {
            if seen.contains(&start) {
                continue;
            }
            write!(f, "(")?;
            let mut x = start;
            let mut first = true;
            loop {
                seen.insert(x);
                if !first {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.apply(x);
                if x == start {
                    break;
                }
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

/// An injective map between finite name sets: a morphism of the category of
/// finite name sets and injections.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Injection {
    source: NameSet,
    target: NameSet,
    map: BTreeMap<Name, Name>,
}

impl Injection {
    pub fn new(
        source: NameSet,
        target: NameSet,
        map: impl IntoIterator<Item = (Name, Name)>,
    ) -> Result<Self, NameError> {
        let map: BTreeMap<Name, Name> = map.into_iter().collect();
        let domain: NameSet = map.keys().copied().collect();
        if domain != source {
            return Err(NameError::BadInjection(format!(
                "map domain {domain} differs from source {source}"
            )));
        }
        let image: NameSet = map.values().copied().collect();
        if image.len() != map.len() {
            return Err(NameError::BadInjection("map is not injective".to_string()));
        }
        if !image.is_subset(&target) {
            return Err(NameError::BadInjection(format!(
                "image {image} is not contained in target {target}"
            )));
        }
        Ok(Injection { source, target, map })
    }

    pub fn identity(s: &NameSet) -> Self {
        Injection {
            source: s.clone(),
            target: s.clone(),
            map: s.iter().map(|a| (a, a)).collect(),
        }
    }

    /// The inclusion `s ↪ t`. Panics unless `s ⊆ t`.
    pub fn inclusion(s: &NameSet, t: &NameSet) -> Self {
        assert!(s.is_subset(t), "inclusion requires {s} ⊆ {t}");
        Injection {
            source: s.clone(),
            target: t.clone(),
            map: s.iter().map(|a| (a, a)).collect(),
        }
    }

    pub fn source(&self) -> &NameSet {
        &self.source
    }

    pub fn target(&self) -> &NameSet {
        &self.target
    }

    pub fn apply(&self, a: Name) -> Option<Name> {
        self.map.get(&a).copied()
    }

    pub fn image(&self) -> NameSet {
        self.map.values().copied().collect()
    }

    /// `next ∘ self`. Panics if the target of `self` is not the source of `next`.
    pub fn then(&self, next: &Injection) -> Injection {
        assert_eq!(self.target, next.source, "injections are not composable");
        Injection {
            source: self.source.clone(),
            target: next.target.clone(),
            map: self
                .map
                .iter()
                .map(|(x, y)| (*x, next.apply(*y).expect("composable")))
                .collect(),
        }
    }

    /// Every injection from `source` into `target`.
    pub fn enumerate(source: &NameSet, target: &NameSet) -> Vec<Injection> {
        let src: Vec<Name> = source.iter().collect();
        let tgt: Vec<Name> = target.iter().collect();
        let mut out = Vec::new();
        let mut chosen = Vec::new();
        enumerate_rec(&src, &tgt, &mut chosen, &mut out, source, target);
        out
    }

    /// The injection obtained by composing generator steps as set maps.
    pub fn from_steps(source: &NameSet, steps: &[GeneratorStep]) -> Option<Injection> {
        let mut map: BTreeMap<Name, Name> = source.iter().map(|a| (a, a)).collect();
        let mut current = source.clone();
        for step in steps {
            if step.source() != current || !step.is_valid() {
                return None;
            }
            for v in map.values_mut() {
                *v = step.apply_name(*v);
            }
            current = step.target();
        }
        Some(Injection {
            source: source.clone(),
            target: current,
            map,
        })
    }
}

fn enumerate_rec(
    src: &[Name],
    tgt: &[Name],
    chosen: &mut Vec<Name>,
    out: &mut Vec<Injection>,
    source: &NameSet,
    target: &NameSet,
) {
    if chosen.len() == src.len() {
        out.push(Injection {
            source: source.clone(),
            target: target.clone(),
            map: src.iter().copied().zip(chosen.iter().copied()).collect(),
        });
        return;
    }
    for &b in tgt {
        if !chosen.contains(&b) {
            chosen.push(b);
            enumerate_rec(src, tgt, chosen, out, source, target);
            chosen.pop();
        }
    }
}

impl fmt::Display for Injection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} [", self.source, self.target)?;
        for (i, (x, y)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}>{y}")?;
        }
        write!(f, "]")
    }
}

/// One of the generating morphisms: a weakening `w_{S,a}: S → S∪{a}` or a
/// renaming `(b/a)_S: S∪{a} → S∪{b}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorStep {
    Weaken { base: NameSet, name: Name },
    Rename { base: NameSet, from: Name, to: Name },
}

impl GeneratorStep {
    pub fn weaken(base: NameSet, name: Name) -> Self {
        GeneratorStep::Weaken { base, name }
    }

    pub fn rename(base: NameSet, from: Name, to: Name) -> Self {
        GeneratorStep::Rename { base, from, to }
    }

    /// Side conditions: `a ∉ S` for weakenings; `a ≠ b`, `a,b ∉ S` for renamings.
    pub fn is_valid(&self) -> bool {
        match self {
            GeneratorStep::Weaken { base, name } => !base.contains(*name),
            GeneratorStep::Rename { base, from, to } => from != to && !base.contains(*from) && !base.contains(*to),
        }
    }

    pub fn source(&self) -> NameSet {
        match self {
            GeneratorStep::Weaken { base, .. } => base.clone(),
            GeneratorStep::Rename { base, from, .. } => base.with(*from),
        }
    }

    pub fn target(&self) -> NameSet {
        match self {
            GeneratorStep::Weaken { base, name } => base.with(*name),
            GeneratorStep::Rename { base, to, .. } => base.with(*to),
        }
    }

    pub fn apply_name(&self, a: Name) -> Name {
        match self {
            GeneratorStep::Rename { from, to, .. } if a == *from => *to,
            _ => a,
        }
    }

    /// The generators leaving `s` whose target stays inside `universe`.
    pub fn out_of(s: &NameSet, universe: &NameSet) -> Vec<GeneratorStep> {
        let mut out = Vec::new();
        for a in universe.difference(s).iter() {
            out.push(GeneratorStep::weaken(s.clone(), a));
        }
        for a in s.iter() {
            let base = s.without(a);
            for b in universe.difference(s).iter() {
                out.push(GeneratorStep::rename(base.clone(), a, b));
            }
        }
        out
    }
}

impl fmt::Display for GeneratorStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorStep::Weaken { base, name } => write!(f, "w_{{{base},{name}}}"),
            GeneratorStep::Rename { base, from, to } => write!(f, "({to}/{from})_{base}"),
        }
    }
}

/// Factors an injection into generator steps.
///
/// Renamings come first: moved source names are processed in increasing
/// order, each going directly to its target when that target is free and
/// otherwise (a cycle) through the least name not currently occupied. The
/// names of the target outside the image are then added by weakenings in
/// alphabet order.
pub fn injection_factor(u: &Injection) -> Vec<GeneratorStep> {
    let mut steps = Vec::new();
    let mut current = u.source().clone();
    // original source name -> where it currently sits
    let mut position: BTreeMap<Name, Name> = u.source().iter().map(|a| (a, a)).collect();
    let mut pending: Vec<Name> = u.source().iter().filter(|&a| u.apply(a) != Some(a)).collect();

    while !pending.is_empty() {
        let direct = pending
            .iter()
            .position(|x| !current.contains(u.apply(*x).expect("source name")));
        let (idx, to) = match direct {
            Some(i) => (i, u.apply(pending[i]).expect("source name")),
            None => (0, current.least_fresh()),
        };
        let x = pending[idx];
        let from = position[&x];
        let base = current.without(from);
        steps.push(GeneratorStep::rename(base.clone(), from, to));
        current = base.with(to);
        position.insert(x, to);
        if direct.is_some() {
            pending.remove(idx);
        }
    }

    for a in u.target().difference(&u.image()).iter() {
        steps.push(GeneratorStep::weaken(current.clone(), a));
        current.insert(a);
    }
    steps
}

macro_rules! serde_via_string {
    ($t:ty) => {
        impl Serialize for $t {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $t {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let text = String::deserialize(d)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_via_string!(Name);
serde_via_string!(NameSet);

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    fn set(s: &str) -> NameSet {
        s.parse().unwrap()
    }

    #[test]
    fn name_spellings() {
        assert_eq!(n("a"), Name(0));
        assert_eq!(n("a0"), Name(0));
        assert_eq!(n("c"), Name(2));
        assert_eq!(n("a30"), Name(30));
        assert_eq!(Name(30).to_string(), "a30");
        assert!("ab".parse::<Name>().is_err());
        assert!("A".parse::<Name>().is_err());
        assert_eq!(set("{b, a}").to_string(), "{a,b}");
        assert!("{a,a}".parse::<NameSet>().is_err());
    }

    #[test]
    fn perm_apply_examples() {
        let (a, b, c) = (n("a"), n("b"), n("c"));
        assert_eq!(Permutation::identity().apply(a), a);
        assert_eq!(Permutation::swap(a, b).apply(a), b);
        let p = Permutation::swap(a, b).compose(&Permutation::swap(b, c));
        // (b c) sends a to a, then (a b) sends a to b
        assert_eq!(p.apply(a), b);
    }

    #[test]
    fn perm_compose_examples() {
        let (a, b, c) = (n("a"), n("b"), n("c"));
        let ab = Permutation::swap(a, b);
        assert!(ab.compose(&ab).is_identity());
        assert_eq!(Permutation::identity().compose(&ab), ab);
        let cycle = ab.compose(&Permutation::swap(b, c));
        // pointwise, (b c) first: a -> a -> b, b -> c -> c, c -> b -> a
        let expected = Permutation::from_pairs([(a, b), (b, c), (c, a)]).unwrap();
        assert_eq!(cycle, expected);
    }

    #[test]
    fn perm_inverse_examples() {
        let (a, b, c) = (n("a"), n("b"), n("c"));
        assert!(Permutation::identity().inverse().is_identity());
        assert_eq!(Permutation::swap(a, b).inverse(), Permutation::swap(a, b));
        let cycle = Permutation::from_pairs([(a, b), (b, c), (c, a)]).unwrap();
        let inv = Permutation::from_pairs([(a, c), (c, b), (b, a)]).unwrap();
        assert_eq!(cycle.inverse(), inv);
        assert!(cycle.compose(&inv).is_identity());
    }

    #[test]
    fn perm_rejects_non_bijection() {
        let (a, b, c) = (n("a"), n("b"), n("c"));
        assert!(Permutation::from_pairs([(a, b), (c, b)]).is_err());
        assert!(Permutation::from_pairs([(a, b)]).is_err());
        assert!(Permutation::from_pairs([(a, a)]).unwrap().is_identity());
    }

    #[test]
    fn group_laws_exhaustive_on_four_names() {
        let perms = Permutation::all_on(&NameSet::first_n(4));
        assert_eq!(perms.len(), 24);
        let id = Permutation::identity();
        for p in &perms {
            assert_eq!(id.compose(p), *p);
            assert_eq!(p.compose(&id), *p);
            assert!(p.compose(&p.inverse()).is_identity());
            for q in &perms {
                for r in &perms {
                    assert_eq!(p.compose(&q.compose(r)), p.compose(q).compose(r));
                }
            }
        }
    }

    #[test]
    fn injection_rejects_bad_data() {
        let (a, b) = (n("a"), n("b"));
        assert!(Injection::new(set("{a,b}"), set("{a}"), [(a, a), (b, a)]).is_err());
        assert!(Injection::new(set("{a}"), set("{b}"), [(a, a)]).is_err());
        assert!(Injection::new(set("{a,b}"), set("{a,b}"), [(a, a)]).is_err());
    }

    #[test]
    fn factor_examples() {
        let (a, b) = (n("a"), n("b"));
        assert!(injection_factor(&Injection::identity(&set("{a}"))).is_empty());
        let incl = Injection::inclusion(&set("{a}"), &set("{a,b}"));
        assert_eq!(injection_factor(&incl), vec![GeneratorStep::weaken(set("{a}"), b)]);
        let ren = Injection::new(set("{a}"), set("{b}"), [(a, b)]).unwrap();
        assert_eq!(
            injection_factor(&ren),
            vec![GeneratorStep::rename(NameSet::new(), a, b)]
        );
    }

    #[test]
    fn factor_swap_routes_through_fresh_name() {
        let (a, b) = (n("a"), n("b"));
        let swap = Injection::new(set("{a,b}"), set("{a,b}"), [(a, b), (b, a)]).unwrap();
        let steps = injection_factor(&swap);
        assert_eq!(steps.len(), 3);
        assert_eq!(steps[0], GeneratorStep::rename(set("{b}"), a, n("c")));
        assert_eq!(Injection::from_steps(swap.source(), &steps).unwrap(), swap);
    }

    #[test]
    fn factor_composes_back_exhaustively_in_five_names() {
        let universe = NameSet::first_n(5);
        let subsets = universe.subsets();
        for s in &subsets {
            for t in &subsets {
                if t.len() < s.len() {
                    continue;
                }
                for u in Injection::enumerate(s, t) {
                    let steps = injection_factor(&u);
                    for step in &steps {
                        assert!(step.is_valid(), "{step} invalid for {u}");
                    }
                    assert_eq!(Injection::from_steps(s, &steps).as_ref(), Some(&u));
                }
            }
        }
    }
}
