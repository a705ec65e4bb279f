use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::Bound;

use super::{Iri, Term, Triple};

type Id = u32;
type Key = [Id; 3];

/// In-memory triple set with subject, predicate and object indexes.
///
/// Terms are interned once; each index is an ordered set of id triples rotated
/// so the bound positions of a pattern form a key prefix.
#[derive(Clone, Default)]
pub struct Graph {
    terms: Vec<Term>,
    ids: HashMap<Term, Id>,
    spo: BTreeSet<Key>,
    pos: BTreeSet<Key>,
    osp: BTreeSet<Key>,
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.spo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spo.is_empty()
    }

    fn intern(&mut self, term: &Term) -> Id {
        if let Some(&id) = self.ids.get(term) {
            return id;
        }
        let id = Id::try_from(self.terms.len()).expect("term table overflow");
        self.terms.push(term.clone());
        self.ids.insert(term.clone(), id);
        id
    }

    fn lookup(&self, term: &Term) -> Option<Id> {
        self.ids.get(term).copied()
    }

    fn predicate_term(p: &Iri) -> Term {
        Term::Iri(p.clone())
    }

    /// Adds a triple. Returns `true` iff it was not already present.
    pub fn insert(&mut self, triple: &Triple) -> bool {
        let s = self.intern(triple.subject());
        let p = self.intern(&Self::predicate_term(triple.predicate()));
        let o = self.intern(triple.object());
        if !self.spo.insert([s, p, o]) {
            return false;
        }
        self.pos.insert([p, o, s]);
        self.osp.insert([o, s, p]);
        true
    }

    /// Removes a triple. Returns `true` iff it was present.
    pub fn remove(&mut self, triple: &Triple) -> bool {
        let (Some(s), Some(p), Some(o)) = (
            self.lookup(triple.subject()),
            self.lookup(&Self::predicate_term(triple.predicate())),
            self.lookup(triple.object()),
        ) else {
            return false;
        };
        if !self.spo.remove(&[s, p, o]) {
            return false;
        }
        self.pos.remove(&[p, o, s]);
        self.osp.remove(&[o, s, p]);
        true
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        match (
            self.lookup(triple.subject()),
            self.lookup(&Self::predicate_term(triple.predicate())),
            self.lookup(triple.object()),
        ) {
            (Some(s), Some(p), Some(o)) => self.spo.contains(&[s, p, o]),
            _ => false,
        }
    }

    pub fn extend<'a>(&mut self, triples: impl IntoIterator<Item = &'a Triple>) -> usize {
        triples.into_iter().filter(|t| self.insert(t)).count()
    }

    fn build(&self, [s, p, o]: Key) -> Triple {
        let Term::Iri(pred) = &self.terms[p as usize] else {
            unreachable!("predicate ids always name IRIs")
        };
        Triple::new(
            self.terms[s as usize].clone(),
            pred.clone(),
            self.terms[o as usize].clone(),
        )
        .expect("stored triples are well-formed")
    }

    /// All triples in unspecified order.
    pub fn iter(&self) -> impl Iterator<Item = Triple> + '_ {
        self.spo.iter().map(|&k| self.build(k))
    }

    /// All triples sorted by their N-Triples rendering.
    pub fn sorted_triples(&self) -> Vec<Triple> {
        let mut out: Vec<Triple> = self.iter().collect();
        out.sort();
        out
    }

    fn range<'g>(index: &'g BTreeSet<Key>, prefix: &[Id]) -> impl Iterator<Item = Key> + 'g {
        let mut lo = [0; 3];
        let mut hi = [Id::MAX; 3];
        lo[..prefix.len()].copy_from_slice(prefix);
        hi[..prefix.len()].copy_from_slice(prefix);
        index
            .range((Bound::Included(lo), Bound::Included(hi)))
            .copied()
    }

    /// Index-backed lookup with optional fixed positions, unsorted.
    pub(crate) fn lookup_raw(
        &self,
        subject: Option<&Term>,
        predicate: Option<&Term>,
        object: Option<&Term>,
    ) -> Vec<Triple> {
        let resolve = |t: Option<&Term>| -> Result<Option<Id>, ()> {
            match t {
                None => Ok(None),
                Some(t) => self.lookup(t).map(Some).ok_or(()),
            }
        };
        let (Ok(s), Ok(p), Ok(o)) = (resolve(subject), resolve(predicate), resolve(object)) else {
            return Vec::new();
        };
        let keys: Vec<Key> = match (s, p, o) {
            (Some(s), Some(p), Some(o)) => {
                if self.spo.contains(&[s, p, o]) {
                    vec![[s, p, o]]
                } else {
                    vec![]
                }
            }
            (Some(s), Some(p), None) => Self::range(&self.spo, &[s, p]).collect(),
            (Some(s), None, None) => Self::range(&self.spo, &[s]).collect(),
            (None, Some(p), Some(o)) => Self::range(&self.pos, &[p, o])
                .map(|[p, o, s]| [s, p, o])
                .collect(),
            (None, Some(p), None) => Self::range(&self.pos, &[p])
                .map(|[p, o, s]| [s, p, o])
                .collect(),
            (Some(s), None, Some(o)) => Self::range(&self.osp, &[o, s])
                .map(|[o, s, p]| [s, p, o])
                .collect(),
            (None, None, Some(o)) => Self::range(&self.osp, &[o])
                .map(|[o, s, p]| [s, p, o])
                .collect(),
            (None, None, None) => self.spo.iter().copied().collect(),
        };
        keys.into_iter().map(|k| self.build(k)).collect()
    }

    /// Triples unifying with `pattern`, sorted by (subject, predicate, object).
    ///
    /// A variable used in several positions only matches equal terms.
    pub fn matches(&self, pattern: &TriplePattern) -> Vec<Triple> {
        let mut out: Vec<Triple> = self
            .lookup_raw(
                pattern.subject.as_term(),
                pattern.predicate.as_term(),
                pattern.object.as_term(),
            )
            .into_iter()
            .filter(|t| pattern.unifies(t))
            .collect();
        out.sort();
        out
    }

    /// Objects of `(subject, predicate, ?)`, sorted.
    pub fn objects(&self, subject: &Term, predicate: &Iri) -> Vec<Term> {
        let mut out: Vec<Term> = self
            .lookup_raw(Some(subject), Some(&Self::predicate_term(predicate)), None)
            .into_iter()
            .map(|t| t.object().clone())
            .collect();
        out.sort();
        out
    }

    /// Subjects of `(?, predicate, object)`, sorted.
    pub fn subjects(&self, predicate: &Iri, object: &Term) -> Vec<Term> {
        let mut out: Vec<Term> = self
            .lookup_raw(None, Some(&Self::predicate_term(predicate)), Some(object))
            .into_iter()
            .map(|t| t.subject().clone())
            .collect();
        out.sort();
        out
    }

    /// Checks that every index holds exactly the same triple set.
    pub fn indexes_consistent(&self) -> bool {
        let from_pos: BTreeSet<Key> = self.pos.iter().map(|&[p, o, s]| [s, p, o]).collect();
        let from_osp: BTreeSet<Key> = self.osp.iter().map(|&[o, s, p]| [s, p, o]).collect();
        from_pos == self.spo && from_osp == self.spo
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len() && self.iter().all(|t| other.contains(&t))
    }
}

impl Eq for Graph {}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.sorted_triples().iter().map(|t| t.to_string())).finish()
    }
}

impl FromIterator<Triple> for Graph {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut g = Graph::new();
        for t in iter {
            g.insert(&t);
        }
        g
    }
}

/// A named query variable (without the leading `?`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variable(String);

impl Variable {
    /// Returns `None` for an empty name.
    pub fn new(name: impl Into<String>) -> Option<Self> {
        let name = name.into();
        (!name.is_empty()).then_some(Variable(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "?{}", self.0)
    }
}

/// One position of a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PatternTerm {
    Var(Variable),
    Term(Term),
}

impl PatternTerm {
    pub fn as_term(&self) -> Option<&Term> {
        match self {
            PatternTerm::Term(t) => Some(t),
            PatternTerm::Var(_) => None,
        }
    }

    pub fn as_var(&self) -> Option<&Variable> {
        match self {
            PatternTerm::Var(v) => Some(v),
            PatternTerm::Term(_) => None,
        }
    }
}

impl From<Term> for PatternTerm {
    fn from(t: Term) -> Self {
        PatternTerm::Term(t)
    }
}

impl From<Iri> for PatternTerm {
    fn from(i: Iri) -> Self {
        PatternTerm::Term(Term::Iri(i))
    }
}

impl From<Variable> for PatternTerm {
    fn from(v: Variable) -> Self {
        PatternTerm::Var(v)
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => v.fmt(f),
            PatternTerm::Term(t) => t.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(
        subject: impl Into<PatternTerm>,
        predicate: impl Into<PatternTerm>,
        object: impl Into<PatternTerm>,
    ) -> Self {
        TriplePattern {
            subject: subject.into(),
            predicate: predicate.into(),
            object: object.into(),
        }
    }

    pub fn positions(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &Variable> {
        self.positions().into_iter().filter_map(PatternTerm::as_var)
    }

    /// Whether `triple` matches, with repeated variables bound consistently.
    pub fn unifies(&self, triple: &Triple) -> bool {
        let pred = Term::Iri(triple.predicate().clone());
        let values = [triple.subject(), &pred, triple.object()];
        let mut seen: Vec<(&Variable, &Term)> = Vec::with_capacity(3);
        for (pos, value) in self.positions().into_iter().zip(values) {
            match pos {
                PatternTerm::Term(t) => {
                    if t != value {
                        return false;
                    }
                }
                PatternTerm::Var(v) => match seen.iter().find(|(sv, _)| *sv == v) {
                    Some((_, bound)) if *bound != value => return false,
                    Some(_) => {}
                    None => seen.push((v, value)),
                },
            }
        }
        true
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.subject, self.predicate, self.object)
    }
}
