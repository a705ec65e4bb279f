//! SPARQL subset: `PREFIX`, `SELECT` over a basic graph pattern, and
//! `FILTER EXISTS` / `FILTER NOT EXISTS` with nested patterns.

mod eval;
mod parse;
mod results;

use crate::rdf::{PrefixMap, TriplePattern, Variable};

pub use eval::{evaluate, evaluate_pattern, Bindings};
pub use parse::parse_query;
pub use results::{term_json, SolutionTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Exists,
    NotExists,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Filter {
    pub polarity: Polarity,
    pub inner: GraphPattern,
}

/// A conjunction of triple patterns plus existence filters.
///
/// Filters see the bindings of the enclosing pattern (correlated semantics).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GraphPattern {
    pub triples: Vec<TriplePattern>,
    pub filters: Vec<Filter>,
}

impl GraphPattern {
    /// Variables of the top-level triples in order of first appearance.
    pub fn variables(&self) -> Vec<Variable> {
        let mut out: Vec<Variable> = Vec::new();
        for v in self.triples.iter().flat_map(TriplePattern::variables) {
            if !out.contains(v) {
                out.push(v.clone());
            }
        }
        out
    }

    /// Variables anywhere in the pattern, including inside filters.
    pub fn all_variables(&self) -> Vec<Variable> {
        let mut out = self.variables();
        for f in &self.filters {
            for v in f.inner.all_variables() {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    All,
    Vars(Vec<Variable>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub prefixes: PrefixMap,
    pub projection: Projection,
    pub pattern: GraphPattern,
}

impl Query {
    /// The variables the result table will carry, in column order.
    pub fn projected_variables(&self) -> Vec<Variable> {
        match &self.projection {
            Projection::All => self.pattern.variables(),
            Projection::Vars(vars) => vars.clone(),
        }
    }
}
