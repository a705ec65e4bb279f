//! SHACL subset: node shapes with `sh:targetClass` and property constraints
//! (`sh:path`, `sh:minCount`, `sh:maxCount`, `sh:class`, `sh:message`).
//! Every result has severity Violation.

use std::collections::BTreeSet;

use serde_json::{json, Value};
use thiserror::Error;

use crate::rdf::{Graph, Iri, PrefixMap, Term};
use crate::rdfs::subclasses_of;
use crate::turtle::Document;
use crate::vocab::{rdf, sh, xsd};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShapeError {
    #[error("shape {0} must be named by an IRI")]
    AnonymousShape(String),
    #[error("shape {0} has no sh:targetClass")]
    MissingTarget(String),
    #[error("sh:targetClass of {shape} must be an IRI, found {found}")]
    BadTarget { shape: String, found: String },
    #[error("property constraint {node} of {shape} has no sh:path")]
    MissingPath { shape: String, node: String },
    #[error("property constraint {node} of {shape}: {detail}")]
    BadConstraint {
        shape: String,
        node: String,
        detail: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyConstraintSpec {
    pub path: Iri,
    pub min_count: Option<u64>,
    pub max_count: Option<u64>,
    pub class_constraint: Option<Iri>,
    pub message: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeShapeSpec {
    pub shape_iri: Iri,
    pub target_classes: BTreeSet<Iri>,
    pub property_constraints: Vec<PropertyConstraintSpec>,
}

/// Decodes every `sh:NodeShape` in the document, sorted by shape IRI.
pub fn parse_shapes(doc: &Document) -> Result<Vec<NodeShapeSpec>, ShapeError> {
    let g = &doc.graph;
    let mut shapes = Vec::new();
    for node in g.subjects(&rdf::type_(), &Term::Iri(sh::node_shape())) {
        let Term::Iri(shape_iri) = &node else {
            return Err(ShapeError::AnonymousShape(node.to_string()));
        };
        let mut target_classes = BTreeSet::new();
        for t in g.objects(&node, &sh::target_class()) {
            match t {
                Term::Iri(iri) => {
                    target_classes.insert(iri);
                }
                other => {
                    return Err(ShapeError::BadTarget {
                        shape: shape_iri.to_string(),
                        found: other.to_string(),
                    })
                }
            }
        }
        if target_classes.is_empty() {
            return Err(ShapeError::MissingTarget(shape_iri.to_string()));
        }
        let property_constraints = g
            .objects(&node, &sh::property())
            .iter()
            .map(|p| property_constraint(g, shape_iri, p))
            .collect::<Result<Vec<_>, _>>()?;
        shapes.push(NodeShapeSpec {
            shape_iri: shape_iri.clone(),
            target_classes,
            property_constraints,
        });
    }
    shapes.sort_by(|a, b| a.shape_iri.cmp(&b.shape_iri));
    Ok(shapes)
}

fn property_constraint(g: &Graph, shape: &Iri, node: &Term) -> Result<PropertyConstraintSpec, ShapeError> {
    let bad = |detail: String| ShapeError::BadConstraint {
        shape: shape.to_string(),
        node: node.to_string(),
        detail,
    };
    let single = |pred: Iri| -> Result<Option<Term>, ShapeError> {
        let mut values = g.objects(node, &pred);
        match values.len() {
            0 => Ok(None),
            1 => Ok(values.pop()),
            n => Err(bad(format!("{n} values for {pred}, expected one"))),
        }
    };
    let count = |pred: Iri| -> Result<Option<u64>, ShapeError> {
        match single(pred.clone())? {
            None => Ok(None),
            Some(Term::Literal(lit)) if *lit.datatype() == xsd::integer() => lit
                .lexical()
                .trim_start_matches('+')
                .parse::<u64>()
                .map(Some)
                .map_err(|_| bad(format!("{pred} must be a non-negative integer, found {lit}"))),
            Some(other) => Err(bad(format!("{pred} must be a non-negative integer, found {other}"))),
        }
    };

    let path = match single(sh::path())? {
        Some(Term::Iri(iri)) => iri,
        Some(other) => return Err(bad(format!("sh:path must be a predicate IRI, found {other}"))),
        None => {
            return Err(ShapeError::MissingPath {
                shape: shape.to_string(),
                node: node.to_string(),
            })
        }
    };
    let min_count = count(sh::min_count())?;
    let max_count = count(sh::max_count())?;
    if let (Some(min), Some(max)) = (min_count, max_count) {
        if min > max {
            return Err(bad(format!("sh:minCount {min} exceeds sh:maxCount {max}")));
        }
    }
    let class_constraint = match single(sh::class())? {
        None => None,
        Some(Term::Iri(iri)) => Some(iri),
        Some(other) => return Err(bad(format!("sh:class must be an IRI, found {other}"))),
    };
    let message = match single(sh::message())? {
        None => None,
        Some(Term::Literal(lit)) => Some(lit.lexical().to_string()),
        Some(other) => return Err(bad(format!("sh:message must be a literal, found {other}"))),
    };
    Ok(PropertyConstraintSpec {
        path,
        min_count,
        max_count,
        class_constraint,
        message,
    })
}

/// Supplies the set of classes counted as instances of a given class.
pub trait ClassExpander {
    fn expand(&self, class: &Iri) -> BTreeSet<Iri>;
}

impl<F> ClassExpander for F
where
    F: Fn(&Iri) -> BTreeSet<Iri>,
{
    fn expand(&self, class: &Iri) -> BTreeSet<Iri> {
        self(class)
    }
}

/// Expands through `rdfs:subClassOf` axioms of a graph.
pub struct SubclassExpander<'a>(pub &'a Graph);

impl ClassExpander for SubclassExpander<'_> {
    fn expand(&self, class: &Iri) -> BTreeSet<Iri> {
        subclasses_of(self.0, class)
    }
}

/// Only the class itself.
pub struct ExactClass;

impl ClassExpander for ExactClass {
    fn expand(&self, class: &Iri) -> BTreeSet<Iri> {
        BTreeSet::from([class.clone()])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    MinCount,
    MaxCount,
    Class,
}

impl ConstraintKind {
    pub fn name(self) -> &'static str {
        match self {
            ConstraintKind::MinCount => "MinCount",
            ConstraintKind::MaxCount => "MaxCount",
            ConstraintKind::Class => "Class",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Observed {
    Count(usize),
    Value(Term),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ValidationResult {
    pub shape: Iri,
    pub focus: Term,
    pub path: Iri,
    pub constraint: ConstraintKind,
    pub observed: Observed,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub conforms: bool,
    pub results: Vec<ValidationResult>,
}

impl ValidationReport {
    fn from_results(mut results: Vec<ValidationResult>) -> Self {
        results.sort();
        results.dedup();
        ValidationReport {
            conforms: results.is_empty(),
            results,
        }
    }

    pub fn to_json(&self) -> Value {
        let results: Vec<Value> = self
            .results
            .iter()
            .map(|r| {
                let mut obj = json!({
                    "focusNode": crate::sparql::term_json(&r.focus),
                    "resultPath": r.path.as_str(),
                    "sourceShape": r.shape.as_str(),
                    "message": r.message,
                    "constraint": r.constraint.name(),
                });
                match &r.observed {
                    Observed::Count(n) => obj["valueCount"] = json!(n),
                    Observed::Value(t) => obj["value"] = crate::sparql::term_json(t),
                }
                obj
            })
            .collect();
        json!({"conforms": self.conforms, "results": results})
    }

    /// One line per result, IRIs compacted with `prefixes`.
    pub fn to_text(&self, prefixes: &PrefixMap) -> String {
        let mut out = format!("Conforms: {}\n", self.conforms);
        for r in &self.results {
            out.push_str(&format!(
                "Violation [{}] focus={} path={} shape={}: {}\n",
                r.constraint.name(),
                prefixes.render(&r.focus),
                prefixes.render(&Term::Iri(r.path.clone())),
                prefixes.render(&Term::Iri(r.shape.clone())),
                r.message
            ));
        }
        out
    }
}

/// Checks `data` against `shapes`. Focus nodes are the subjects typed with a
/// target class or any class the expander returns for it.
pub fn validate(data: &Graph, shapes: &[NodeShapeSpec], classes: &dyn ClassExpander) -> ValidationReport {
    let ty = rdf::type_();
    let mut results = Vec::new();
    for shape in shapes {
        let mut focus_nodes: BTreeSet<Term> = BTreeSet::new();
        for target in &shape.target_classes {
            for class in classes.expand(target) {
                focus_nodes.extend(data.subjects(&ty, &Term::Iri(class)));
            }
        }
        for focus in &focus_nodes {
            for c in &shape.property_constraints {
                check_constraint(data, shape, c, focus, classes, &mut results);
            }
        }
    }
    ValidationReport::from_results(results)
}

fn check_constraint(
    data: &Graph,
    shape: &NodeShapeSpec,
    c: &PropertyConstraintSpec,
    focus: &Term,
    classes: &dyn ClassExpander,
    results: &mut Vec<ValidationResult>,
) {
    let values = data.objects(focus, &c.path);
    let mut push = |constraint, observed, default: String| {
        results.push(ValidationResult {
            shape: shape.shape_iri.clone(),
            focus: focus.clone(),
            path: c.path.clone(),
            constraint,
            observed,
            message: c.message.clone().unwrap_or(default),
        })
    };
    if let Some(min) = c.min_count {
        if (values.len() as u64) < min {
            push(
                ConstraintKind::MinCount,
                Observed::Count(values.len()),
                format!("Expected at least {min} value(s) for {}, found {}", c.path, values.len()),
            );
        }
    }
    if let Some(max) = c.max_count {
        if values.len() as u64 > max {
            push(
                ConstraintKind::MaxCount,
                Observed::Count(values.len()),
                format!("Expected at most {max} value(s) for {}, found {}", c.path, values.len()),
            );
        }
    }
    if let Some(class) = &c.class_constraint {
        let accepted = classes.expand(class);
        for v in &values {
            let ok = data
                .objects(v, &rdf::type_())
                .iter()
                .any(|t| t.as_iri().is_some_and(|i| accepted.contains(i)));
            if !ok {
                push(
                    ConstraintKind::Class,
                    Observed::Value(v.clone()),
                    format!("Value {v} of {} is not an instance of {class}", c.path),
                );
            }
        }
    }
}
