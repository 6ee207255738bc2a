//! Nominal values: a closed universe of atoms, unit, pairs, tagged values and
//! name-abstractions, with the permutation action, support, freshness and
//! α-equivalence.
//!
//! Equality, ordering and hashing of [`NominalValue`] are taken up to
//! α-equivalence: two values compare equal iff their canonical forms are
//! structurally identical. The canonical form renames every abstracted name
//! to the least name outside the support of the abstraction.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use thiserror::Error;

use crate::names::{Name, NameSet, Permutation};

#[derive(Debug, Clone)]
pub enum NominalValue {
    Atom(Name),
    Unit,
    Pair(Box<NominalValue>, Box<NominalValue>),
    Tag(String, Box<NominalValue>),
    Abs(Name, Box<NominalValue>),
}

use NominalValue::*;

impl NominalValue {
    pub fn atom(a: Name) -> Self {
        Atom(a)
    }

    pub fn pair(v: NominalValue, w: NominalValue) -> Self {
        Pair(Box::new(v), Box::new(w))
    }

    pub fn tag(label: impl Into<String>, v: NominalValue) -> Self {
        Tag(label.into(), Box::new(v))
    }

    /// The raw pair `(a, v)` as an abstraction node, without canonicalizing.
    pub fn abs_raw(a: Name, v: NominalValue) -> Self {
        Abs(a, Box::new(v))
    }

    /// Structural permutation action. Abstracted names are moved too.
    pub fn act(&self, p: &Permutation) -> NominalValue {
        match self {
            Atom(a) => Atom(p.apply(*a)),
            Unit => Unit,
            Pair(v, w) => NominalValue::pair(v.act(p), w.act(p)),
            Tag(l, v) => NominalValue::tag(l.clone(), v.act(p)),
            Abs(a, v) => NominalValue::abs_raw(p.apply(*a), v.act(p)),
        }
    }

    /// The least supporting set: atoms not captured by an enclosing abstraction.
    pub fn support(&self) -> NameSet {
        let mut out = NameSet::new();
        self.collect_support(&mut Vec::new(), &mut out);
        out
    }

    fn collect_support(&self, bound: &mut Vec<Name>, out: &mut NameSet) {
        match self {
            Atom(a) => {
                if !bound.contains(a) {
                    out.insert(*a);
                }
            }
            Unit => {}
            Pair(v, w) => {
                v.collect_support(bound, out);
                w.collect_support(bound, out);
            }
            Tag(_, v) => v.collect_support(bound, out),
            Abs(a, v) => {
                bound.push(*a);
                v.collect_support(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_fresh(&self, a: Name) -> bool {
        !self.support().contains(a)
    }

    /// Every name occurring in the value, free or abstracted.
    pub fn all_names(&self) -> NameSet {
        let mut out = NameSet::new();
        self.collect_all_names(&mut out);
        out
    }

    fn collect_all_names(&self, out: &mut NameSet) {
        match self {
            Atom(a) => {
                out.insert(*a);
            }
            Unit => {}
            Pair(v, w) => {
                v.collect_all_names(out);
                w.collect_all_names(out);
            }
            Tag(_, v) => v.collect_all_names(out),
            Abs(a, v) => {
                out.insert(*a);
                v.collect_all_names(out);
            }
        }
    }

    /// The canonical representative of the α-class.
    pub fn canonical(&self) -> NominalValue {
        match self {
            Atom(a) => Atom(*a),
            Unit => Unit,
            Pair(v, w) => NominalValue::pair(v.canonical(), w.canonical()),
            Tag(l, v) => NominalValue::tag(l.clone(), v.canonical()),
            Abs(a, v) => {
                let c = v.support().without(*a).least_fresh();
                let body = if c == *a {
                    v.canonical()
                } else {
                    v.act(&Permutation::swap(*a, c)).canonical()
                };
                NominalValue::abs_raw(c, body)
            }
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.structurally_eq(&self.canonical())
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            Atom(_) | Unit => 1,
            Pair(v, w) => 1 + v.size() + w.size(),
            Tag(_, v) | Abs(_, v) => 1 + v.size(),
        }
    }

    /// Equality of representatives, not of α-classes.
    pub fn structurally_eq(&self, other: &NominalValue) -> bool {
        self.structural_cmp(other) == Ordering::Equal
    }

    fn structural_cmp(&self, other: &NominalValue) -> Ordering {
        fn rank(v: &NominalValue) -> u8 {
            match v {
                Atom(_) => 0,
                Unit => 1,
                Pair(..) => 2,
                Tag(..) => 3,
                Abs(..) => 4,
            }
        }
        match (self, other) {
            (Atom(a), Atom(b)) => a.cmp(b),
            (Unit, Unit) => Ordering::Equal,
            (Pair(v1, w1), Pair(v2, w2)) => v1.structural_cmp(v2).then_with(|| w1.structural_cmp(w2)),
            (Tag(l1, v1), Tag(l2, v2)) => l1.cmp(l2).then_with(|| v1.structural_cmp(v2)),
            (Abs(a1, v1), Abs(a2, v2)) => a1.cmp(a2).then_with(|| v1.structural_cmp(v2)),
            _ => rank(self).cmp(&rank(other)),
        }
    }

    fn structural_hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Atom(a) => {
                0u8.hash(state);
                a.hash(state);
            }
            Unit => 1u8.hash(state),
            Pair(v, w) => {
                2u8.hash(state);
                v.structural_hash(state);
                w.structural_hash(state);
            }
            Tag(l, v) => {
                3u8.hash(state);
                l.hash(state);
                v.structural_hash(state);
            }
            Abs(a, v) => {
                4u8.hash(state);
                a.hash(state);
                v.structural_hash(state);
            }
        }
    }
}

/// Decides α-equivalence by comparing canonical forms.
pub fn alpha_eq(v: &NominalValue, w: &NominalValue) -> bool {
    v.canonical().structurally_eq(&w.canonical())
}

/// The canonical representative of `[a]v`.
pub fn make_abstraction(a: Name, v: NominalValue) -> NominalValue {
    NominalValue::abs_raw(a, v).canonical()
}

pub fn act(p: &Permutation, v: &NominalValue) -> NominalValue {
    v.act(p)
}

pub fn support(v: &NominalValue) -> NameSet {
    v.support()
}

pub fn is_fresh(a: Name, v: &NominalValue) -> bool {
    v.is_fresh(a)
}

impl PartialEq for NominalValue {
    fn eq(&self, other: &Self) -> bool {
        self.structurally_eq(other) || alpha_eq(self, other)
    }
}

impl Eq for NominalValue {}

impl PartialOrd for NominalValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NominalValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.canonical().structural_cmp(&other.canonical())
    }
}

impl Hash for NominalValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().structural_hash(state)
    }
}

impl fmt::Display for NominalValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom(a) => write!(f, "{a}"),
            Unit => write!(f, "()"),
            Pair(v, w) => write!(f, "({v}, {w})"),
            Tag(l, v) => write!(f, "{l}:{v}"),
            Abs(a, v) => write!(f, "[{a}]{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("value syntax error at column {column}: {message}")]
pub struct ValueParseError {
    pub column: usize,
    pub message: String,
}

impl FromStr for NominalValue {
    type Err = ValueParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut p = ValueParser {
            src: s.as_bytes(),
            pos: 0,
        };
        let v = p.value()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.error("trailing input"));
        }
        Ok(v)
    }
}

struct ValueParser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl ValueParser<'_> {
    fn error(&self, message: &str) -> ValueParseError {
        ValueParseError {
            column: self.pos + 1,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expect(&mut self, c: u8) -> Result<(), ValueParseError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn ident(&mut self) -> Result<String, ValueParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_') {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected identifier"));
        }
        Ok(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned())
    }

    fn name(&mut self) -> Result<Name, ValueParseError> {
        let start = self.pos;
        let id = self.ident()?;
        id.parse().map_err(|_| ValueParseError {
            column: start + 1,
            message: format!("`{id}` is not a name"),
        })
    }

    fn value(&mut self) -> Result<NominalValue, ValueParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                if self.peek() == Some(b')') {
                    self.pos += 1;
                    return Ok(Unit);
                }
                let v = self.value()?;
                self.expect(b',')?;
                let w = self.value()?;
                self.expect(b')')?;
                Ok(NominalValue::pair(v, w))
            }
            Some(b'[') => {
                self.pos += 1;
                let a = self.name()?;
                self.expect(b']')?;
                let v = self.value()?;
                Ok(NominalValue::abs_raw(a, v))
            }
            Some(_) => {
                let start = self.pos;
                let id = self.ident()?;
                if self.peek() == Some(b':') {
                    self.pos += 1;
                    let v = self.value()?;
                    Ok(NominalValue::tag(id, v))
                } else {
                    id.parse().map(Atom).map_err(|_| ValueParseError {
                        column: start + 1,
                        message: format!("`{id}` is neither a name nor a tag label"),
                    })
                }
            }
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Name {
        s.parse().unwrap()
    }

    fn v(s: &str) -> NominalValue {
        s.parse().unwrap()
    }

    fn set(s: &str) -> NameSet {
        s.parse().unwrap()
    }

    #[test]
    fn act_examples() {
        let ab = Permutation::swap(n("a"), n("b"));
        let x = v("(a, b)");
        assert!(x.act(&Permutation::identity()).structurally_eq(&x));
        assert!(v("a").act(&ab).structurally_eq(&v("b")));
        assert!(v("[a](a, c)").act(&ab).structurally_eq(&v("[b](b, c)")));
    }

    #[test]
    fn support_examples() {
        assert_eq!(v("a").support(), set("{a}"));
        assert_eq!(v("[a]a").support(), set("{}"));
        assert_eq!(v("(a, [a]b)").support(), set("{a,b}"));
        assert_eq!(v("t:[b](b, [c]c)").support(), set("{}"));
    }

    #[test]
    fn freshness_examples() {
        assert!(is_fresh(n("b"), &v("a")));
        assert!(!is_fresh(n("a"), &v("a")));
        assert!(is_fresh(n("a"), &v("[a]a")));
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq(&v("[a]a"), &v("[b]b")));
        assert!(!alpha_eq(&v("[a]b"), &v("[b]a")));
        let x = v("(t:[a](a, b), ())");
        assert!(alpha_eq(&x, &x));
        assert_eq!(v("[c][d](c, d)"), v("[a][b](a, b)"));
        assert_ne!(v("[a][b](a, b)"), v("[a][b](b, a)"));
    }

    #[test]
    fn make_abstraction_examples() {
        let (a, b, c) = (n("a"), n("b"), n("c"));
        assert!(make_abstraction(a, v("a")).structurally_eq(&make_abstraction(b, v("b"))));
        assert_eq!(make_abstraction(a, v("(a, b)")).support(), set("{b}"));
        let x = make_abstraction(a, v("b"));
        assert!(alpha_eq(&x.act(&Permutation::swap(a, c)), &x));
    }

    #[test]
    fn canonical_is_idempotent_and_least() {
        let x = v("[d](d, [e](e, a))").canonical();
        assert!(x.is_canonical());
        assert_eq!(x.to_string(), "[b](b, [b](b, a))");
        assert_eq!(v("[a][b]b").canonical().to_string(), "[a][a]a");
    }

    #[test]
    fn equality_hash_consistency() {
        use std::collections::HashSet;
        let mut set = HashSet::new();
        set.insert(v("[a]a"));
        assert!(set.contains(&v("[q]q")));
        assert!(!set.contains(&v("[q]a")));
    }

    #[test]
    fn parse_print_examples() {
        for s in [
            "a",
            "()",
            "(a, b)",
            "lam:[a]app:(var:a, var:b)",
            "[a30]a30",
            "(a, (b, ()))",
        ] {
            assert_eq!(v(s).to_string(), s);
        }
        assert!("lam:".parse::<NominalValue>().is_err());
        assert!("(a b)".parse::<NominalValue>().is_err());
        let err = "(a, Q)".parse::<NominalValue>().unwrap_err();
        assert_eq!(err.column, 5);
    }
}
