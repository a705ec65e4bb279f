//! RDFS materialization restricted to the class hierarchy.
//!
//! Rules applied to a fixpoint:
//!
//! | Rule | Pattern                          | Inference          |
//! |------|----------------------------------|--------------------|
//! | R1   | `x ⊑ y`, `y ⊑ z`                 | `x ⊑ z`            |
//! | R2   | `i a C`, `C ⊑ D`                 | `i a D`            |
//!
//! Reflexive `C ⊑ C` is never written to the graph; [`subclasses_of`] answers
//! it. Domain and range axioms are left alone.

use std::collections::{BTreeSet, VecDeque};

use crate::rdf::{Graph, Iri, Term, Triple};
use crate::vocab::{rdf, rdfs};

#[derive(Debug, Clone)]
pub struct ClosureResult {
    pub graph: Graph,
    pub inferred_count: usize,
    /// Rule passes run, including the final pass that added nothing.
    pub iterations: usize,
}

pub fn materialize(asserted: &Graph) -> ClosureResult {
    let mut graph = asserted.clone();
    let sub = rdfs::sub_class_of();
    let ty = rdf::type_();
    let mut iterations = 0;
    loop {
        iterations += 1;
        let axioms: Vec<Triple> = graph.lookup_raw(None, Some(&Term::Iri(sub.clone())), None);
        let mut fresh: Vec<Triple> = Vec::new();
        for axiom in &axioms {
            let (lower, upper) = (axiom.subject(), axiom.object());
            if upper.is_literal() {
                continue;
            }
            // R1
            for next in graph.objects(upper, &sub) {
                if next.is_literal() {
                    continue;
                }
                fresh.push(Triple::new(lower.clone(), sub.clone(), next).expect("non-literal subject"));
            }
            // R2
            for instance in graph.subjects(&ty, lower) {
                fresh.push(Triple::new(instance, ty.clone(), upper.clone()).expect("non-literal subject"));
            }
        }
        let added = fresh.iter().filter(|t| graph.insert(t)).count();
        if added == 0 {
            break;
        }
    }
    ClosureResult {
        inferred_count: graph.len() - asserted.len(),
        graph,
        iterations,
    }
}

/// `class` plus every class reachable through inverse `rdfs:subClassOf` edges.
pub fn subclasses_of(graph: &Graph, class: &Iri) -> BTreeSet<Iri> {
    let sub = rdfs::sub_class_of();
    let mut seen = BTreeSet::from([class.clone()]);
    let mut queue = VecDeque::from([Term::Iri(class.clone())]);
    while let Some(current) = queue.pop_front() {
        for child in graph.subjects(&sub, &current) {
            if let Term::Iri(iri) = &child {
                if seen.insert(iri.clone()) {
                    queue.push_back(child);
                }
            }
        }
    }
    seen
}
