use std::path::PathBuf;

use cloudeng_core::openstack::{
    ingest, parse_cli_json, parse_versions_json, EndpointRecord, IngestConfig, IngestInputs, ProjectRecord,
    RoleAssignmentRecord,
};
use cloudeng_core::rdf::{Iri, Literal, Term};
use cloudeng_core::vocab::cloudeng;
use cloudeng_core::{parse_turtle, serialize_turtle};

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/openstack_sample").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(sample(name)).unwrap()
}

// `sha256sum keystone_policy.yaml`, cross-checked with Python's hashlib.
const POLICY_SHA256: &str = "d3e05bd868c0b09bd07612f26f8b9b7861438c4a48e4d54649b7eeaf85524e71";

fn sample_inputs() -> IngestInputs {
    IngestInputs {
        endpoints: parse_cli_json::<EndpointRecord>(&read("endpoints.json")).unwrap(),
        projects: parse_cli_json::<ProjectRecord>(&read("projects.json")).unwrap(),
        users: parse_cli_json::<ProjectRecord>(&read("users.json")).unwrap(),
        assignments: parse_cli_json::<RoleAssignmentRecord>(&read("assignments.json")).unwrap(),
    }
}

fn sample_config() -> IngestConfig {
    let mut config = IngestConfig {
        version_metadata: parse_versions_json(&read("versions.json")).unwrap(),
        ..IngestConfig::default()
    };
    config.policy_files.insert("keystone".into(), sample("keystone_policy.yaml"));
    config
}

#[test]
fn sample_matches_hand_written_golden_file() {
    let doc = ingest(&sample_inputs(), &sample_config()).unwrap();
    let expected = read("expected.ttl");
    assert_eq!(serialize_turtle(&doc), expected);
    // 47 triples per rdflib over expected.ttl
    assert_eq!(doc.graph.len(), 47);
    assert_eq!(parse_turtle(&expected).unwrap().graph, doc.graph);
}

#[test]
fn policy_hash_matches_reference_digest() {
    let doc = ingest(&sample_inputs(), &sample_config()).unwrap();
    let keystone = Term::Iri(Iri::new("urn:cloudeng:inst:service/keystone").unwrap());
    assert_eq!(
        doc.graph.objects(&keystone, &cloudeng::policy_file_hash()),
        vec![Term::Literal(Literal::string(POLICY_SHA256))]
    );
}

#[test]
fn sample_record_shapes() {
    let inputs = sample_inputs();
    assert_eq!(inputs.endpoints.len(), 3);
    assert_eq!(inputs.projects.len(), 2);
    assert_eq!(inputs.users.len(), 2);
    assert_eq!(inputs.assignments.len(), 2);
    assert!(!inputs.endpoints[2].enabled);
    // empty "Group" is absent, not an empty id
    assert_eq!(inputs.assignments[0].group_id, None);
    assert_eq!(inputs.assignments[0].user_id.as_deref(), Some("u-1001"));
}

#[test]
fn serialization_is_byte_stable() {
    let a = serialize_turtle(&ingest(&sample_inputs(), &sample_config()).unwrap());
    let b = serialize_turtle(&ingest(&sample_inputs(), &sample_config()).unwrap());
    assert_eq!(a, b);
}
