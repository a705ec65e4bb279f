//! Standards coverage for cloud engines.
//!
//! A standard named by the engine's security policy is covered when an
//! interface attached to the engine implements it, or when a mechanism one
//! hop away from such an interface does. Standards match by exact IRI.

use std::collections::BTreeSet;

use serde_json::{json, Value};
use thiserror::Error;

use crate::rdf::{Graph, Iri, PrefixMap, Term, Triple};
use crate::vocab::{cloudeng, rdfs, sec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplianceError {
    #[error("engine {0} has no sec:hasSecurityPolicy")]
    NoPolicy(Iri),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Via {
    Direct,
    Mechanism,
}

/// One chain showing why a standard counts as covered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CoverageEvidence {
    pub standard: Iri,
    pub interface: Iri,
    /// Which `has*Interface` property attaches the interface to the engine.
    pub attachment: Iri,
    pub via: Via,
    pub mechanism: Option<Iri>,
    pub linking_property: Option<Iri>,
}

impl CoverageEvidence {
    /// The graph triples this chain relies on.
    pub fn cited_triples(&self, engine: &Iri) -> Vec<Triple> {
        let t = |s: &Iri, p: &Iri, o: &Iri| {
            Triple::new(Term::Iri(s.clone()), p.clone(), Term::Iri(o.clone())).expect("IRI subject")
        };
        let mut out = vec![t(engine, &self.attachment, &self.interface)];
        match (&self.mechanism, &self.linking_property) {
            (Some(m), Some(p)) => {
                out.push(t(&self.interface, p, m));
                out.push(t(m, &sec::implements_standard(), &self.standard));
            }
            _ => out.push(t(&self.interface, &sec::implements_standard(), &self.standard)),
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoverageState {
    Covered,
    Gap,
}

impl CoverageState {
    pub fn name(self) -> &'static str {
        match self {
            CoverageState::Covered => "Covered",
            CoverageState::Gap => "Gap",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardStatus {
    pub standard: Iri,
    pub label: Option<String>,
    pub state: CoverageState,
    pub evidence: Vec<CoverageEvidence>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplianceReport {
    pub engine: Iri,
    /// Every security policy of the engine, sorted. Never empty.
    pub policies: Vec<Term>,
    pub statuses: Vec<StandardStatus>,
    pub gap_count: usize,
    pub warnings: Vec<String>,
}

/// Interfaces reachable from `engine` through the four `has*Interface` properties.
pub fn attached_interfaces(graph: &Graph, engine: &Iri) -> BTreeSet<Iri> {
    attachments(graph, engine).into_iter().map(|(_, i)| i).collect()
}

fn attachments(graph: &Graph, engine: &Iri) -> Vec<(Iri, Iri)> {
    let subject = Term::Iri(engine.clone());
    let mut out = Vec::new();
    for prop in cloudeng::interface_properties() {
        for obj in graph.objects(&subject, &prop) {
            if let Term::Iri(i) = obj {
                out.push((prop.clone(), i));
            }
        }
    }
    out
}

pub fn standards_of(graph: &Graph, node: &Iri) -> BTreeSet<Iri> {
    iri_objects(graph, &Term::Iri(node.clone()), &sec::implements_standard())
}

fn iri_objects(graph: &Graph, subject: &Term, predicate: &Iri) -> BTreeSet<Iri> {
    graph
        .objects(subject, predicate)
        .into_iter()
        .filter_map(|t| match t {
            Term::Iri(i) => Some(i),
            _ => None,
        })
        .collect()
}

fn label_of(graph: &Graph, node: &Iri) -> Option<String> {
    graph
        .objects(&Term::Iri(node.clone()), &rdfs::label())
        .into_iter()
        .find_map(|t| t.as_literal().map(|l| l.lexical().to_string()))
}

/// Per-standard coverage of `engine` against the union of its policies' `sec:compliesWith`.
pub fn coverage(graph: &Graph, engine: &Iri) -> Result<ComplianceReport, ComplianceError> {
    let policies = graph.objects(&Term::Iri(engine.clone()), &sec::has_security_policy());
    if policies.is_empty() {
        return Err(ComplianceError::NoPolicy(engine.clone()));
    }
    let mut warnings = Vec::new();
    if policies.len() > 1 {
        let names: Vec<String> = policies.iter().map(Term::to_string).collect();
        warnings.push(format!(
            "engine {engine} has {} security policies ({}); using the union of their standards",
            policies.len(),
            names.join(", ")
        ));
    }
    let required: BTreeSet<Iri> = policies
        .iter()
        .flat_map(|p| iri_objects(graph, p, &sec::complies_with()))
        .collect();

    // every (attachment, interface, via, mechanism, property, standard) chain available to the engine
    let mut chains: Vec<CoverageEvidence> = Vec::new();
    for (attachment, interface) in attachments(graph, engine) {
        for standard in standards_of(graph, &interface) {
            chains.push(CoverageEvidence {
                standard,
                interface: interface.clone(),
                attachment: attachment.clone(),
                via: Via::Direct,
                mechanism: None,
                linking_property: None,
            });
        }
        for prop in sec::mechanism_properties() {
            for mechanism in iri_objects(graph, &Term::Iri(interface.clone()), &prop) {
                for standard in standards_of(graph, &mechanism) {
                    chains.push(CoverageEvidence {
                        standard,
                        interface: interface.clone(),
                        attachment: attachment.clone(),
                        via: Via::Mechanism,
                        mechanism: Some(mechanism.clone()),
                        linking_property: Some(prop.clone()),
                    });
                }
            }
        }
    }
    chains.sort();
    chains.dedup();

    let statuses: Vec<StandardStatus> = required
        .into_iter()
        .map(|standard| {
            let evidence: Vec<CoverageEvidence> =
                chains.iter().filter(|c| c.standard == standard).cloned().collect();
            StandardStatus {
                label: label_of(graph, &standard),
                state: if evidence.is_empty() {
                    CoverageState::Gap
                } else {
                    CoverageState::Covered
                },
                standard,
                evidence,
            }
        })
        .collect();
    let gap_count = statuses.iter().filter(|s| s.state == CoverageState::Gap).count();
    Ok(ComplianceReport {
        engine: engine.clone(),
        policies,
        statuses,
        gap_count,
        warnings,
    })
}

impl ComplianceReport {
    pub fn gaps(&self) -> Vec<&Iri> {
        self.statuses
            .iter()
            .filter(|s| s.state == CoverageState::Gap)
            .map(|s| &s.standard)
            .collect()
    }

    pub fn to_json(&self, hints: &[RemediationHint]) -> Value {
        let standards: Vec<Value> = self
            .statuses
            .iter()
            .map(|s| {
                let evidence: Vec<Value> = s
                    .evidence
                    .iter()
                    .map(|e| {
                        json!({
                            "interface": e.interface.as_str(),
                            "attachment": e.attachment.as_str(),
                            "via": match e.via { Via::Direct => "direct", Via::Mechanism => "mechanism" },
                            "mechanism": e.mechanism.as_ref().map(Iri::as_str),
                            "linkingProperty": e.linking_property.as_ref().map(Iri::as_str),
                        })
                    })
                    .collect();
                json!({
                    "iri": s.standard.as_str(),
                    "label": s.label,
                    "state": s.state.name(),
                    "evidence": evidence,
                })
            })
            .collect();
        let policy = |t: &Term| match t {
            Term::Iri(i) => Value::from(i.as_str()),
            other => Value::from(other.to_string()),
        };
        json!({
            "engine": self.engine.as_str(),
            "policy": policy(&self.policies[0]),
            "policies": self.policies.iter().map(policy).collect::<Vec<_>>(),
            "standards": standards,
            "gaps": self.gaps().iter().map(|g| g.as_str()).collect::<Vec<_>>(),
            "hints": hints.iter().map(|h| json!({
                "standard": h.standard.as_str(),
                "implementers": h.implementers.iter().map(&policy).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "warnings": self.warnings,
        })
    }

    /// Status table, evidence lines and remediation hints.
    pub fn to_text(&self, prefixes: &PrefixMap, hints: &[RemediationHint]) -> String {
        let r = |i: &Iri| prefixes.render(&Term::Iri(i.clone()));
        let mut out = format!("Engine: {}\n", r(&self.engine));
        let policies: Vec<String> = self.policies.iter().map(|p| prefixes.render(p)).collect();
        out.push_str(&format!("Policy: {}\n", policies.join(", ")));
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        let width = self.statuses.iter().map(|s| r(&s.standard).chars().count()).max().unwrap_or(0);
        for s in &self.statuses {
            let name = r(&s.standard);
            out.push_str(&format!("  {:<7}  {name:<width$}", s.state.name()));
            if let Some(label) = &s.label {
                out.push_str(&format!("  {label}"));
            }
            out.push('\n');
            for e in &s.evidence {
                match (&e.mechanism, &e.linking_property) {
                    (Some(m), Some(p)) => out.push_str(&format!(
                        "           via {} {} {}\n",
                        r(&e.interface),
                        r(p),
                        r(m)
                    )),
                    _ => out.push_str(&format!("           via {} (direct)\n", r(&e.interface))),
                }
            }
        }
        out.push_str(&format!("{} of {} standards uncovered\n", self.gap_count, self.statuses.len()));
        for h in hints {
            out.push_str(&format!("hint: {}\n", h.render(prefixes)));
        }
        out
    }
}

/// Nodes that implement a gap standard and could be attached to close it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RemediationHint {
    pub standard: Iri,
    pub implementers: Vec<Term>,
}

impl RemediationHint {
    pub fn render(&self, prefixes: &PrefixMap) -> String {
        let standard = prefixes.render(&Term::Iri(self.standard.clone()));
        if self.implementers.is_empty() {
            format!("{standard}: no node in the model implements this standard")
        } else {
            let names: Vec<String> = self.implementers.iter().map(|t| prefixes.render(t)).collect();
            format!("{standard}: implemented by {}", names.join(", "))
        }
    }
}

pub fn remediation_hints(report: &ComplianceReport, graph: &Graph) -> Vec<RemediationHint> {
    report
        .gaps()
        .into_iter()
        .map(|standard| RemediationHint {
            standard: standard.clone(),
            implementers: graph.subjects(&sec::implements_standard(), &Term::Iri(standard.clone())),
        })
        .collect()
}

/// SPARQL-subset queries whose union of rows is non-empty exactly when
/// `standard` is covered for `engine`: one query per attachment property and
/// route (direct or through each mechanism property).
pub fn coverage_queries(engine: &Iri, standard: &Iri) -> Vec<String> {
    let implements = sec::implements_standard();
    let mut out = Vec::new();
    for attach in cloudeng::interface_properties() {
        out.push(format!(
            "SELECT ?i WHERE {{ <{engine}> <{attach}> ?i . FILTER EXISTS {{ ?i <{implements}> <{standard}> }} }}",
            engine = engine.as_str(),
            attach = attach.as_str(),
            implements = implements.as_str(),
            standard = standard.as_str(),
        ));
        for link in sec::mechanism_properties() {
            out.push(format!(
                "SELECT ?i ?m WHERE {{ <{engine}> <{attach}> ?i . ?i <{link}> ?m . FILTER EXISTS {{ ?m <{implements}> <{standard}> }} }}",
                engine = engine.as_str(),
                attach = attach.as_str(),
                link = link.as_str(),
                implements = implements.as_str(),
                standard = standard.as_str(),
            ));
        }
    }
    out
}
