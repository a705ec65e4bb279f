//! Reader and writer for the Turtle subset used by the Cloud Engine model and its shapes.
//!
//! Supported: `@prefix`, absolute IRIs, prefixed names (dots allowed inside
//! local names), `a`, `;` and `,` lists, `[ ... ]` property lists, `_:label`
//! blank nodes, double-quoted strings and integer literals. Anything else
//! (`@base`, language tags, `^^` datatypes, collections, long strings) is a
//! [`ParseError`] of kind `UnexpectedToken`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::rdf::{escape_string, is_writable_local, BlankNode, Graph, Iri, Literal, PrefixMap, Term, Triple};
use crate::syntax::{Lexer, ParseError, ParseErrorKind, Pos, Tok, Token};
use crate::vocab::{rdf, xsd};

/// A parsed Turtle file: its triples plus the prefix bindings it declared.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub graph: Graph,
    pub prefixes: PrefixMap,
}

impl Document {
    pub fn new(graph: Graph, prefixes: PrefixMap) -> Self {
        Document { graph, prefixes }
    }
}

pub fn parse_turtle(input: &str) -> Result<Document, ParseError> {
    TurtleParser {
        lexer: Lexer::new(input),
        doc: Document::default(),
        labels: HashMap::new(),
        next_blank: 0,
    }
    .run()
}

struct TurtleParser<'a> {
    lexer: Lexer<'a>,
    doc: Document,
    labels: HashMap<String, BlankNode>,
    next_blank: usize,
}

fn unexpected(tok: &Token, wanted: &str) -> ParseError {
    ParseError::at(
        tok.pos,
        ParseErrorKind::UnexpectedToken,
        format!("expected {wanted}, found {}", tok.tok),
    )
}

pub(crate) fn has_scheme(iri: &str) -> bool {
    let Some((scheme, _)) = iri.split_once(':') else {
        return false;
    };
    let mut chars = scheme.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// Resolves an IRI token, requiring an absolute IRI.
pub(crate) fn absolute_iri(value: &str, pos: Pos) -> Result<Iri, ParseError> {
    if !has_scheme(value) {
        return Err(ParseError::at(
            pos,
            ParseErrorKind::UnexpectedToken,
            format!("relative IRI <{value}> is not supported"),
        ));
    }
    Iri::new(value).map_err(|e| ParseError::at(pos, ParseErrorKind::UnexpectedToken, e.to_string()))
}

pub(crate) fn expand_pname(prefixes: &PrefixMap, prefix: &str, local: &str, pos: Pos) -> Result<Iri, ParseError> {
    match prefixes.get(prefix) {
        None => Err(ParseError::at(
            pos,
            ParseErrorKind::UnknownPrefix,
            format!("prefix {prefix:?} is not declared"),
        )),
        Some(_) => prefixes
            .expand_parts(prefix, local)
            .map_err(|e| ParseError::at(pos, ParseErrorKind::BadLocalName, e.to_string())),
    }
}

impl<'a> TurtleParser<'a> {
    fn run(mut self) -> Result<Document, ParseError> {
        loop {
            let tok = self.lexer.next_token()?;
            match tok.tok {
                Tok::Eof => return Ok(self.doc),
                Tok::AtPrefix => self.prefix_directive()?,
                _ => {
                    self.triples(tok)?;
                    self.expect_punct('.', "'.' ending the statement")?;
                }
            }
        }
    }

    fn expect_punct(&mut self, c: char, wanted: &str) -> Result<Token, ParseError> {
        let tok = self.lexer.next_token()?;
        if tok.tok == Tok::Punct(c) {
            Ok(tok)
        } else {
            Err(unexpected(&tok, wanted))
        }
    }

    fn prefix_directive(&mut self) -> Result<(), ParseError> {
        let tok = self.lexer.next_token()?;
        let label = match &tok.tok {
            Tok::PName { prefix, local } if local.is_empty() => prefix.clone(),
            _ => return Err(unexpected(&tok, "a prefix label like 'ex:'")),
        };
        let tok = self.lexer.next_token()?;
        let Tok::Iri(ns) = &tok.tok else {
            return Err(unexpected(&tok, "a namespace IRI"));
        };
        let ns = absolute_iri(ns, tok.pos)?;
        self.expect_punct('.', "'.' after @prefix")?;
        self.doc.prefixes.bind(label, ns);
        Ok(())
    }

    fn fresh_blank(&mut self) -> BlankNode {
        self.next_blank += 1;
        BlankNode::new(format!("b{}", self.next_blank)).expect("non-empty label")
    }

    fn labelled_blank(&mut self, label: &str) -> BlankNode {
        if let Some(b) = self.labels.get(label) {
            return b.clone();
        }
        let b = self.fresh_blank();
        self.labels.insert(label.to_string(), b.clone());
        b
    }

    fn iri_of(&self, tok: &Token) -> Result<Option<Iri>, ParseError> {
        match &tok.tok {
            Tok::Iri(value) => absolute_iri(value, tok.pos).map(Some),
            Tok::PName { prefix, local } => expand_pname(&self.doc.prefixes, prefix, local, tok.pos).map(Some),
            _ => Ok(None),
        }
    }

    fn emit(&mut self, s: &Term, p: &Iri, o: Term) {
        let triple = Triple::new(s.clone(), p.clone(), o).expect("subjects are never literals here");
        self.doc.graph.insert(&triple);
    }

    /// `subject predicateObjectList` or `[ ... ] predicateObjectList?`
    fn triples(&mut self, first: Token) -> Result<(), ParseError> {
        if first.tok == Tok::Punct('[') {
            let node = self.property_list_body()?;
            if matches!(self.lexer.peek()?.tok, Tok::Punct('.')) {
                return Ok(());
            }
            return self.predicate_object_list(&node);
        }
        let subject = match &first.tok {
            Tok::BlankLabel(label) => {
                let label = label.clone();
                Term::Blank(self.labelled_blank(&label))
            }
            _ => match self.iri_of(&first)? {
                Some(iri) => Term::Iri(iri),
                None => return Err(unexpected(&first, "a subject")),
            },
        };
        self.predicate_object_list(&subject)
    }

    /// Parses after an opening `[`, through the closing `]`.
    fn property_list_body(&mut self) -> Result<Term, ParseError> {
        let node = Term::Blank(self.fresh_blank());
        if matches!(self.lexer.peek()?.tok, Tok::Punct(']')) {
            self.lexer.next_token()?;
            return Ok(node);
        }
        self.predicate_object_list(&node)?;
        self.expect_punct(']', "']' closing the property list")?;
        Ok(node)
    }

    fn predicate_object_list(&mut self, subject: &Term) -> Result<(), ParseError> {
        loop {
            let verb_tok = self.lexer.next_token()?;
            let verb = match &verb_tok.tok {
                Tok::Word(w) if w == "a" => rdf::type_(),
                _ => match self.iri_of(&verb_tok)? {
                    Some(iri) => iri,
                    None => return Err(unexpected(&verb_tok, "a predicate")),
                },
            };
            loop {
                let obj = self.object()?;
                self.emit(subject, &verb, obj);
                if matches!(self.lexer.peek()?.tok, Tok::Punct(',')) {
                    self.lexer.next_token()?;
                } else {
                    break;
                }
            }
            // one or more ';', optionally trailing before '.' or ']'
            if !matches!(self.lexer.peek()?.tok, Tok::Punct(';')) {
                return Ok(());
            }
            while matches!(self.lexer.peek()?.tok, Tok::Punct(';')) {
                self.lexer.next_token()?;
            }
            if matches!(self.lexer.peek()?.tok, Tok::Punct('.') | Tok::Punct(']')) {
                return Ok(());
            }
        }
    }

    fn object(&mut self) -> Result<Term, ParseError> {
        let tok = self.lexer.next_token()?;
        match &tok.tok {
            Tok::Str(s) => Ok(Term::Literal(Literal::string(s.clone()))),
            Tok::Integer(i) => Ok(Term::Literal(Literal::typed(i.clone(), xsd::integer()))),
            Tok::BlankLabel(label) => {
                let label = label.clone();
                Ok(Term::Blank(self.labelled_blank(&label)))
            }
            Tok::Punct('[') => self.property_list_body(),
            _ => match self.iri_of(&tok)? {
                Some(iri) => Ok(Term::Iri(iri)),
                None => Err(unexpected(&tok, "an object")),
            },
        }
    }
}

/// Writes a document as Turtle.
///
/// Prefixes come first sorted by label, then one block per subject. Subjects,
/// predicates within a subject and objects within a predicate are all sorted by
/// their N-Triples rendering, so equal documents always produce equal text.
pub fn serialize_turtle(doc: &Document) -> String {
    let mut out = String::new();
    for (label, ns) in doc.prefixes.iter() {
        writeln!(out, "@prefix {label}: {ns} .").expect("write to String");
    }

    let mut blocks: BTreeMap<&Term, BTreeMap<&Iri, Vec<&Term>>> = BTreeMap::new();
    let triples = doc.graph.sorted_triples();
    for t in &triples {
        blocks
            .entry(t.subject())
            .or_default()
            .entry(t.predicate())
            .or_default()
            .push(t.object());
    }

    let writer = TermWriter { prefixes: &doc.prefixes };
    for (subject, predicates) in blocks {
        if !out.is_empty() {
            out.push('\n');
        }
        out.push_str(&writer.term(subject));
        let count = predicates.len();
        for (i, (predicate, mut objects)) in predicates.into_iter().enumerate() {
            objects.sort();
            let rendered: Vec<String> = objects.iter().map(|o| writer.term(o)).collect();
            let terminator = if i + 1 == count { " ." } else { " ;" };
            write!(
                out,
                "\n    {} {}{}",
                writer.predicate(predicate),
                rendered.join(", "),
                terminator
            )
            .expect("write to String");
        }
        out.push('\n');
    }
    out
}

struct TermWriter<'a> {
    prefixes: &'a PrefixMap,
}

impl TermWriter<'_> {
    fn iri(&self, iri: &Iri) -> String {
        self.prefixes.compact(iri).unwrap_or_else(|| iri.to_string())
    }

    fn predicate(&self, iri: &Iri) -> String {
        if *iri == rdf::type_() {
            "a".to_string()
        } else {
            self.iri(iri)
        }
    }

    fn term(&self, term: &Term) -> String {
        match term {
            Term::Iri(iri) => self.iri(iri),
            Term::Blank(b) => blank_label(b),
            Term::Literal(lit) => self.literal(lit),
        }
    }

    fn literal(&self, lit: &Literal) -> String {
        if lit.is_plain_string() {
            return format!("\"{}\"", escape_string(lit.lexical()));
        }
        if *lit.datatype() == xsd::integer() && is_integer_lexical(lit.lexical()) {
            return lit.lexical().to_string();
        }
        format!("\"{}\"^^{}", escape_string(lit.lexical()), self.iri(lit.datatype()))
    }
}

fn is_integer_lexical(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

fn blank_label(b: &BlankNode) -> String {
    let label = b.label();
    if is_writable_local(label) && !label.contains(':') {
        format!("_:{label}")
    } else {
        format!("_:x{}", hex::encode(label.as_bytes()))
    }
}
