//! RDF data model: terms, triples, an indexed in-memory graph and prefix maps.

mod graph;
mod iso;
mod prefix;
mod term;

pub use graph::{Graph, PatternTerm, TriplePattern, Variable};
pub use iso::isomorphic;
pub use prefix::{PrefixError, PrefixMap};
pub use term::{BlankNode, Iri, Literal, Term, TermError, Triple};

pub(crate) use prefix::is_writable_local;
pub(crate) use term::escape_string;
