//! IRI constants for every term the toolchain reads or writes.
//!
//! Namespaces match the prefix block of the bundled Cloud Engine model.

macro_rules! terms {
    ($ns:expr; $($fn_name:ident => $local:literal),* $(,)?) => {
        $(
            pub fn $fn_name() -> $crate::rdf::Iri {
                $crate::rdf::Iri::new_unchecked(concat!($ns, $local))
            }
        )*
    };
}

pub mod rdf {
    pub const NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
    terms!("http://www.w3.org/1999/02/22-rdf-syntax-ns#";
        type_ => "type",
        property => "Property",
    );
}

pub mod rdfs {
    pub const NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
    terms!("http://www.w3.org/2000/01/rdf-schema#";
        class => "Class",
        sub_class_of => "subClassOf",
        label => "label",
        comment => "comment",
        domain => "domain",
        range => "range",
        resource => "Resource",
    );
}

pub mod xsd {
    pub const NS: &str = "http://www.w3.org/2001/XMLSchema#";
    terms!("http://www.w3.org/2001/XMLSchema#";
        string => "string",
        integer => "integer",
    );
}

pub mod cloudeng {
    pub const NS: &str = "http://example.org/cloudengine#";
    terms!("http://example.org/cloudengine#";
        cloud_engine => "CloudEngine",
        interface => "Interface",
        control_interface => "ControlInterface",
        business_interface => "BusinessInterface",
        audit_interface => "AuditInterface",
        data_interface => "DataInterface",
        has_control_interface => "hasControlInterface",
        has_business_interface => "hasBusinessInterface",
        has_audit_interface => "hasAuditInterface",
        has_data_interface => "hasDataInterface",
        service_version => "serviceVersion",
        policy_file_hash => "policyFileHash",
        // inventory terms minted by the OpenStack ingest
        service_type => "serviceType",
        endpoint => "Endpoint",
        has_endpoint => "hasEndpoint",
        endpoint_url => "endpointUrl",
        endpoint_interface => "endpointInterface",
        region => "region",
        enabled => "enabled",
        project => "Project",
        user => "User",
        group => "Group",
        domain_id => "domainId",
        role_assignment => "RoleAssignment",
        role_name => "roleName",
        assignee => "assignee",
        in_project => "inProject",
    );

    /// The four engine→interface properties, in declaration order.
    pub fn interface_properties() -> [crate::rdf::Iri; 4] {
        [
            has_control_interface(),
            has_business_interface(),
            has_audit_interface(),
            has_data_interface(),
        ]
    }
}

pub mod sec {
    pub const NS: &str = "http://example.org/security#";
    terms!("http://example.org/security#";
        security_policy => "SecurityPolicy",
        identity_provider => "IdentityProvider",
        authentication_mechanism => "AuthenticationMechanism",
        authorization_mechanism => "AuthorizationMechanism",
        encryption_method => "EncryptionMethod",
        encryption_scope_class => "EncryptionScope",
        transport_security_protocol => "TransportSecurityProtocol",
        compliance_standard => "ComplianceStandard",
        key_management => "KeyManagement",
        has_security_policy => "hasSecurityPolicy",
        uses_identity_provider => "usesIdentityProvider",
        supports_authentication => "supportsAuthentication",
        enforces_authorization => "enforcesAuthorization",
        encrypts_data => "encryptsData",
        encryption_scope => "encryptionScope",
        uses_transport_security => "usesTransportSecurity",
        complies_with => "compliesWith",
        implements_standard => "implementsStandard",
        uses_kms => "usesKMS",
    );

    /// Interface→mechanism properties that can carry standards coverage.
    pub fn mechanism_properties() -> [crate::rdf::Iri; 5] {
        [
            supports_authentication(),
            enforces_authorization(),
            encrypts_data(),
            uses_transport_security(),
            uses_identity_provider(),
        ]
    }
}

pub mod sh {
    pub const NS: &str = "http://www.w3.org/ns/shacl#";
    terms!("http://www.w3.org/ns/shacl#";
        node_shape => "NodeShape",
        target_class => "targetClass",
        property => "property",
        path => "path",
        min_count => "minCount",
        max_count => "maxCount",
        class => "class",
        message => "message",
    );
}

/// Prefix bindings of the bundled model, used as defaults for emitted documents.
pub fn model_prefixes() -> crate::rdf::PrefixMap {
    let mut map = crate::rdf::PrefixMap::new();
    for (label, ns) in [
        ("rdf", rdf::NS),
        ("rdfs", rdfs::NS),
        ("xsd", xsd::NS),
        ("cloudeng", cloudeng::NS),
        ("sec", sec::NS),
        ("iso27001", "https://www.iso.org/standard/27001#"),
        ("nist80053", "https://csrc.nist.gov/publications/detail/sp/800-53/rev-5/final#"),
        ("aws", "https://aws.amazon.com/architecture/well-architected#"),
        ("openstack", "https://docs.openstack.org/#"),
        ("gdpr", "https://eur-lex.europa.eu/legal-content/EN/TXT/?uri=CELEX:32016R0679#"),
        ("csa", "https://cloudsecurityalliance.org/artifacts/cloud-controls-matrix/#"),
    ] {
        map.bind(label, crate::rdf::Iri::new_unchecked(ns));
    }
    map
}
