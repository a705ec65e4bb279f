//! Semantic compliance toolchain for the Cloud Engine security model.
//!
//! Loads the model and instance data from Turtle, materializes the class
//! hierarchy, answers SPARQL-subset queries, validates SHACL-subset shapes,
//! computes per-engine standards coverage and converts OpenStack CLI exports
//! into instance data.

pub mod compliance;
pub mod openstack;
pub mod rdf;
pub mod rdfs;
pub mod shacl;
pub mod sparql;
pub mod syntax;
pub mod turtle;
pub mod vocab;

pub use syntax::{ParseError, ParseErrorKind};
pub use turtle::{parse_turtle, serialize_turtle, Document};
