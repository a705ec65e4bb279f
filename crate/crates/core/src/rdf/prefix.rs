use std::collections::BTreeMap;

use thiserror::Error;

use super::{Iri, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PrefixError {
    #[error("unknown prefix {0:?}")]
    UnknownPrefix(String),
    #[error("{0:?} is not a prefixed name")]
    NotPrefixed(String),
    #[error("expansion of {0:?} is not a valid IRI")]
    InvalidExpansion(String),
}

/// Prefix label → namespace bindings. Rebinding a label replaces the old namespace.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PrefixMap {
    bindings: BTreeMap<String, Iri>,
}

impl PrefixMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&mut self, label: impl Into<String>, namespace: Iri) -> Option<Iri> {
        self.bindings.insert(label.into(), namespace)
    }

    pub fn get(&self, label: &str) -> Option<&Iri> {
        self.bindings.get(label)
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// Bindings sorted by label.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &Iri)> {
        self.bindings.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Expands `label:local` against the bound namespace.
    pub fn expand(&self, qname: &str) -> Result<Iri, PrefixError> {
        let (label, local) = qname
            .split_once(':')
            .ok_or_else(|| PrefixError::NotPrefixed(qname.to_string()))?;
        self.expand_parts(label, local)
    }

    pub fn expand_parts(&self, label: &str, local: &str) -> Result<Iri, PrefixError> {
        let ns = self
            .bindings
            .get(label)
            .ok_or_else(|| PrefixError::UnknownPrefix(label.to_string()))?;
        Iri::new(format!("{}{}", ns.as_str(), local))
            .map_err(|_| PrefixError::InvalidExpansion(format!("{label}:{local}")))
    }

    /// Shortest prefixed form of `iri` whose local part is writable without escapes.
    ///
    /// Prefers the longest matching namespace, then the smallest label.
    pub fn compact(&self, iri: &Iri) -> Option<String> {
        let mut best: Option<(&str, &str)> = None;
        for (label, ns) in &self.bindings {
            let Some(local) = iri.as_str().strip_prefix(ns.as_str()) else {
                continue;
            };
            if !is_writable_local(local) {
                continue;
            }
            match best {
                Some((_, best_local)) if best_local.len() <= local.len() => {}
                _ => best = Some((label, local)),
            }
        }
        best.map(|(label, local)| format!("{label}:{local}"))
    }

    /// Prefixed name when possible, otherwise the N-Triples form.
    pub fn render(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.compact(iri).unwrap_or_else(|| iri.to_string()),
            other => other.to_string(),
        }
    }
}

/// Local names the Turtle reader accepts: alphanumerics and `_` to start, then
/// also `-` and `.`, with no trailing `.`.
pub(crate) fn is_writable_local(local: &str) -> bool {
    let mut chars = local.chars();
    let Some(first) = chars.next() else {
        return true;
    };
    if !(first.is_alphanumeric() || first == '_') {
        return false;
    }
    if local.ends_with('.') {
        return false;
    }
    chars.all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model() -> PrefixMap {
        crate::vocab::model_prefixes()
    }

    #[test]
    fn expands_model_names() {
        let p = model();
        assert_eq!(
            p.expand("sec:RBAC").unwrap().as_str(),
            "http://example.org/security#RBAC"
        );
        assert_eq!(
            p.expand("iso27001:A.9.4.1").unwrap().as_str(),
            "https://www.iso.org/standard/27001#A.9.4.1"
        );
        assert_eq!(
            p.expand("nosuch:x"),
            Err(PrefixError::UnknownPrefix("nosuch".into()))
        );
    }

    #[test]
    fn rebinding_is_last_write_wins() {
        let mut p = PrefixMap::new();
        p.bind("ex", Iri::new("http://a/").unwrap());
        p.bind("ex", Iri::new("http://b/").unwrap());
        assert_eq!(p.expand("ex:x").unwrap().as_str(), "http://b/x");
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn compact_skips_unwritable_locals() {
        let p = model();
        let iri = Iri::new("http://example.org/security#a/b").unwrap();
        assert_eq!(p.compact(&iri), None);
        let iri = Iri::new("http://example.org/security#x.").unwrap();
        assert_eq!(p.compact(&iri), None);
        let iri = Iri::new("https://www.iso.org/standard/27001#A.12.4.1").unwrap();
        assert_eq!(p.compact(&iri).as_deref(), Some("iso27001:A.12.4.1"));
    }

    #[test]
    fn compact_prefers_longest_namespace() {
        let mut p = PrefixMap::new();
        p.bind("a", Iri::new("http://x/").unwrap());
        p.bind("b", Iri::new("http://x/y#").unwrap());
        let iri = Iri::new("http://x/y#z").unwrap();
        assert_eq!(p.compact(&iri).as_deref(), Some("b:z"));
    }
}
