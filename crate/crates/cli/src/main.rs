//! `cloudeng`: parse, infer, query, validate, check compliance and ingest
//! OpenStack exports from the command line.
//!
//! Exit codes: 0 success, 1 usage/I-O/parse error, 2 SHACL violations,
//! 3 compliance gaps.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cloudeng_core::compliance::{coverage, remediation_hints};
use cloudeng_core::openstack::{self, parse_cli_json, IngestConfig, IngestInputs};
use cloudeng_core::rdf::{Graph, Iri};
use cloudeng_core::rdfs::materialize;
use cloudeng_core::shacl::{parse_shapes, validate, SubclassExpander};
use cloudeng_core::sparql::{evaluate, parse_query};
use cloudeng_core::{parse_turtle, serialize_turtle, Document};

#[derive(Parser, Debug)]
#[command(name = "cloudeng", version, about = "Cloud Engine security model toolchain")]
struct Cli {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Work on the asserted triples only (query, validate, compliance).
    #[arg(long, global = true)]
    no_inference: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Syntax-check a Turtle file and print triple and prefix counts.
    Parse { file: PathBuf },
    /// Write the RDFS-materialized graph as Turtle.
    Infer {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a SELECT query.
    Query { file: PathBuf, query: PathBuf },
    /// Validate data against SHACL shapes. Exits 2 on violations.
    Validate { file: PathBuf, shapes: PathBuf },
    /// Standards coverage for one engine. Exits 3 on gaps.
    Compliance {
        file: PathBuf,
        /// Engine IRI, either `prefix:local` or a full IRI.
        #[arg(long)]
        engine: String,
    },
    /// Convert inventory exports to Turtle.
    #[command(subcommand)]
    Ingest(IngestSource),
}

#[derive(Subcommand, Debug)]
enum IngestSource {
    /// OpenStack CLI `-f json` exports.
    Openstack(OpenstackArgs),
}

#[derive(Args, Debug)]
struct OpenstackArgs {
    #[arg(long)]
    endpoints: PathBuf,
    #[arg(long)]
    projects: Option<PathBuf>,
    #[arg(long)]
    users: Option<PathBuf>,
    #[arg(long)]
    assignments: Option<PathBuf>,
    /// JSON object mapping service name to version.
    #[arg(long)]
    versions: Option<PathBuf>,
    /// `service=path`; the file's SHA-256 is recorded. Repeatable.
    #[arg(long = "policy-file", value_name = "SERVICE=PATH")]
    policy_files: Vec<String>,
    /// Extra hand-written Turtle merged into the output.
    #[arg(long)]
    metadata: Option<PathBuf>,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Instance namespace for minted IRIs.
    #[arg(long, default_value = openstack::DEFAULT_NAMESPACE)]
    namespace: String,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_turtle(path: &Path) -> Result<Document> {
    let text = read(path)?;
    parse_turtle(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

fn working_graph(doc: &Document, no_inference: bool) -> Graph {
    if no_inference {
        doc.graph.clone()
    } else {
        materialize(&doc.graph).graph
    }
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_json(value: &serde_json::Value) {
    println!("{}", serde_json::to_string_pretty(value).expect("JSON values serialize"));
}

/// Accepts `<iri>`, `prefix:local` with a bound prefix, or an absolute IRI.
fn resolve_iri(arg: &str, doc: &Document) -> Result<Iri> {
    let bare = arg.strip_prefix('<').and_then(|s| s.strip_suffix('>')).unwrap_or(arg);
    if let Some((label, local)) = bare.split_once(':') {
        if doc.prefixes.get(label).is_some() {
            return doc.prefixes.expand_parts(label, local).map_err(|e| anyhow!("{arg}: {e}"));
        }
    }
    if !bare.contains(':') {
        bail!("{arg}: not a prefixed name with a known prefix or an absolute IRI");
    }
    Iri::new(bare).map_err(|e| anyhow!("{arg}: {e}"))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Parse { file } => {
            let doc = load_turtle(&file)?;
            match cli.format {
                Format::Text => println!(
                    "{}: {} triples, {} prefixes",
                    file.display(),
                    doc.graph.len(),
                    doc.prefixes.len()
                ),
                Format::Json => print_json(&serde_json::json!({
                    "file": file.display().to_string(),
                    "triples": doc.graph.len(),
                    "prefixes": doc.prefixes.len(),
                })),
            }
            Ok(0)
        }
        Command::Infer { file, output } => {
            let doc = load_turtle(&file)?;
            let closure = materialize(&doc.graph);
            eprintln!(
                "{}: {} asserted, {} inferred",
                file.display(),
                doc.graph.len(),
                closure.inferred_count
            );
            let out = Document::new(closure.graph, doc.prefixes);
            emit(&serialize_turtle(&out), output.as_deref())?;
            Ok(0)
        }
        Command::Query { file, query } => {
            let doc = load_turtle(&file)?;
            let q = parse_query(&read(&query)?).map_err(|e| anyhow!("{}:{e}", query.display()))?;
            let table = evaluate(&q, &working_graph(&doc, cli.no_inference));
            match cli.format {
                Format::Text => print!("{}", table.to_text_with(&doc.prefixes)),
                Format::Json => print_json(&table.to_json()),
            }
            Ok(0)
        }
        Command::Validate { file, shapes } => {
            let doc = load_turtle(&file)?;
            let shapes_doc = load_turtle(&shapes)?;
            let specs = parse_shapes(&shapes_doc).map_err(|e| anyhow!("{}: {e}", shapes.display()))?;
            let graph = working_graph(&doc, cli.no_inference);
            let report = validate(&graph, &specs, &SubclassExpander(&graph));
            match cli.format {
                Format::Text => print!("{}", report.to_text(&doc.prefixes)),
                Format::Json => print_json(&report.to_json()),
            }
            Ok(if report.conforms { 0 } else { 2 })
        }
        Command::Compliance { file, engine } => {
            let doc = load_turtle(&file)?;
            let engine = resolve_iri(&engine, &doc)?;
            let graph = working_graph(&doc, cli.no_inference);
            let report = coverage(&graph, &engine)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let hints = remediation_hints(&report, &graph);
            match cli.format {
                Format::Text => print!("{}", report.to_text(&doc.prefixes, &hints)),
                Format::Json => print_json(&report.to_json(&hints)),
            }
            Ok(if report.gap_count == 0 { 0 } else { 3 })
        }
        Command::Ingest(IngestSource::Openstack(args)) => {
            ingest_openstack(args)?;
            Ok(0)
        }
    }
}

fn load_records<R: openstack::CliRecord>(path: Option<&Path>) -> Result<Vec<R>> {
    match path {
        None => Ok(Vec::new()),
        Some(p) => parse_cli_json(&read(p)?).map_err(|e| anyhow!("{}: {e}", p.display())),
    }
}

fn ingest_openstack(args: OpenstackArgs) -> Result<()> {
    let inputs = IngestInputs {
        endpoints: load_records(Some(&args.endpoints))?,
        projects: load_records(args.projects.as_deref())?,
        users: load_records(args.users.as_deref())?,
        assignments: load_records(args.assignments.as_deref())?,
    };
    let mut config = IngestConfig {
        instance_namespace: Iri::new(args.namespace.clone()).map_err(|e| anyhow!("--namespace: {e}"))?,
        ..IngestConfig::default()
    };
    if let Some(path) = &args.versions {
        config.version_metadata =
            openstack::parse_versions_json(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    }
    let mut policy_files = BTreeMap::new();
    for spec in &args.policy_files {
        let (service, path) = spec
            .split_once('=')
            .filter(|(s, p)| !s.is_empty() && !p.is_empty())
            .ok_or_else(|| anyhow!("--policy-file expects SERVICE=PATH, got {spec:?}"))?;
        policy_files.insert(service.to_string(), PathBuf::from(path));
    }
    config.policy_files = policy_files;

    let mut doc = openstack::ingest(&inputs, &config)?;
    if let Some(path) = &args.metadata {
        let extra = load_turtle(path)?;
        doc.graph.extend(extra.graph.iter().collect::<Vec<_>>().iter());
        for (label, ns) in extra.prefixes.iter() {
            if doc.prefixes.get(label).is_none() {
                doc.prefixes.bind(label, ns.clone());
            }
        }
    }
    emit(&serialize_turtle(&doc), args.output.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
