use std::collections::BTreeMap;

use crate::rdf::{Graph, PatternTerm, Term, TriplePattern, Variable};

use super::{GraphPattern, Polarity, Query, SolutionTable};

/// One solution mapping.
pub type Bindings = BTreeMap<Variable, Term>;

pub fn evaluate(query: &Query, graph: &Graph) -> SolutionTable {
    let variables = query.projected_variables();
    let rows = evaluate_pattern(&query.pattern, graph, &Bindings::new())
        .into_iter()
        .map(|b| {
            variables
                .iter()
                .map(|v| b.get(v).cloned().expect("projected variables are bound by the pattern"))
                .collect()
        })
        .collect();
    SolutionTable::new(variables, rows)
}

/// Solutions of `pattern` extending `seed`.
///
/// Triple patterns are joined left to right; each step substitutes the current
/// bindings and asks the graph indexes for the remaining positions. Filters run
/// on the joined solutions with their bindings substituted into the inner pattern.
pub fn evaluate_pattern(pattern: &GraphPattern, graph: &Graph, seed: &Bindings) -> Vec<Bindings> {
    let mut solutions = vec![seed.clone()];
    for tp in &pattern.triples {
        let mut next = Vec::new();
        for sol in &solutions {
            extend_with(tp, graph, sol, &mut next);
        }
        solutions = next;
        if solutions.is_empty() {
            break;
        }
    }
    solutions.retain(|sol| {
        pattern.filters.iter().all(|f| {
            let found = !evaluate_pattern(&f.inner, graph, sol).is_empty();
            match f.polarity {
                Polarity::Exists => found,
                Polarity::NotExists => !found,
            }
        })
    });
    solutions
}

fn resolve<'a>(pos: &'a PatternTerm, sol: &'a Bindings) -> Option<&'a Term> {
    match pos {
        PatternTerm::Term(t) => Some(t),
        PatternTerm::Var(v) => sol.get(v),
    }
}

fn extend_with(tp: &TriplePattern, graph: &Graph, sol: &Bindings, out: &mut Vec<Bindings>) {
    let s = resolve(&tp.subject, sol);
    let p = resolve(&tp.predicate, sol);
    let o = resolve(&tp.object, sol);
    // predicates are always IRIs and subjects never literals
    if p.is_some_and(|p| p.as_iri().is_none()) || s.is_some_and(Term::is_literal) {
        return;
    }
    for triple in graph.lookup_raw(s, p, o) {
        let pred = Term::Iri(triple.predicate().clone());
        let values = [triple.subject(), &pred, triple.object()];
        let mut extended = sol.clone();
        let mut ok = true;
        for (pos, value) in tp.positions().into_iter().zip(values) {
            if let PatternTerm::Var(v) = pos {
                match extended.get(v) {
                    Some(bound) if bound != value => {
                        ok = false;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        extended.insert(v.clone(), value.clone());
                    }
                }
            }
        }
        if ok {
            out.push(extended);
        }
    }
}
