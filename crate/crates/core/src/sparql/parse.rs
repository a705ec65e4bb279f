use crate::rdf::{Literal, PatternTerm, PrefixMap, Term, TriplePattern, Variable};
use crate::syntax::{Lexer, ParseError, ParseErrorKind, Tok, Token};
use crate::turtle::{absolute_iri, expand_pname};
use crate::vocab::{rdf, xsd};

use super::{Filter, GraphPattern, Polarity, Projection, Query};

/// Parses a query in the supported subset. Prefixed names are expanded here.
pub fn parse_query(input: &str) -> Result<Query, ParseError> {
    let mut parser = QueryParser {
        lexer: Lexer::new(input),
        prefixes: PrefixMap::new(),
    };
    parser.query()
}

struct QueryParser<'a> {
    lexer: Lexer<'a>,
    prefixes: PrefixMap,
}

fn unexpected(tok: &Token, wanted: &str) -> ParseError {
    let detail = match &tok.tok {
        Tok::Word(w) => format!("expected {wanted}, found unsupported keyword {w}"),
        other => format!("expected {wanted}, found {other}"),
    };
    ParseError::at(tok.pos, ParseErrorKind::UnexpectedToken, detail)
}

fn is_keyword(tok: &Tok, kw: &str) -> bool {
    matches!(tok, Tok::Word(w) if w.eq_ignore_ascii_case(kw))
}

impl QueryParser<'_> {
    fn query(&mut self) -> Result<Query, ParseError> {
        loop {
            let tok = self.lexer.next_token()?;
            if is_keyword(&tok.tok, "PREFIX") {
                self.prefix_decl()?;
            } else if is_keyword(&tok.tok, "SELECT") {
                break;
            } else {
                return Err(unexpected(&tok, "PREFIX or SELECT"));
            }
        }

        let mut projected: Vec<(Variable, Token)> = Vec::new();
        let projection = if matches!(self.lexer.peek()?.tok, Tok::Punct('*')) {
            self.lexer.next_token()?;
            Projection::All
        } else {
            while let Tok::Var(name) = &self.lexer.peek()?.tok {
                let var = Variable::new(name.clone()).expect("lexer rejects empty names");
                let tok = self.lexer.next_token()?;
                if !projected.iter().any(|(v, _)| *v == var) {
                    projected.push((var, tok));
                }
            }
            if projected.is_empty() {
                let tok = self.lexer.next_token()?;
                return Err(unexpected(&tok, "'*' or a variable"));
            }
            Projection::Vars(projected.iter().map(|(v, _)| v.clone()).collect())
        };

        if is_keyword(&self.lexer.peek()?.tok, "WHERE") {
            self.lexer.next_token()?;
        }
        self.expect_punct('{', "'{'")?;
        let pattern = self.group()?;
        let tok = self.lexer.next_token()?;
        if tok.tok != Tok::Eof {
            return Err(unexpected(&tok, "end of query"));
        }

        // every projected column must be bound by the top-level pattern
        let in_scope = pattern.variables();
        for (var, tok) in &projected {
            if !in_scope.contains(var) {
                return Err(ParseError::at(
                    tok.pos,
                    ParseErrorKind::UnexpectedToken,
                    format!("projected variable {var} is not bound by the WHERE pattern"),
                ));
            }
        }

        Ok(Query {
            prefixes: self.prefixes.clone(),
            projection,
            pattern,
        })
    }

    fn expect_punct(&mut self, c: char, wanted: &str) -> Result<Token, ParseError> {
        let tok = self.lexer.next_token()?;
        if tok.tok == Tok::Punct(c) {
            Ok(tok)
        } else {
            Err(unexpected(&tok, wanted))
        }
    }

    fn prefix_decl(&mut self) -> Result<(), ParseError> {
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
        self.prefixes.bind(label, ns);
        Ok(())
    }

    /// Group body after `{`, consuming the closing `}`.
    fn group(&mut self) -> Result<GraphPattern, ParseError> {
        let mut pattern = GraphPattern::default();
        loop {
            let tok = self.lexer.next_token()?;
            match &tok.tok {
                Tok::Punct('}') => return Ok(pattern),
                Tok::Punct('.') => {}
                t if is_keyword(t, "FILTER") => pattern.filters.push(self.filter()?),
                _ => self.triples_same_subject(tok, &mut pattern.triples)?,
            }
        }
    }

    fn filter(&mut self) -> Result<Filter, ParseError> {
        let tok = self.lexer.next_token()?;
        let polarity = if is_keyword(&tok.tok, "NOT") {
            let tok = self.lexer.next_token()?;
            if !is_keyword(&tok.tok, "EXISTS") {
                return Err(unexpected(&tok, "EXISTS"));
            }
            Polarity::NotExists
        } else if is_keyword(&tok.tok, "EXISTS") {
            Polarity::Exists
        } else {
            return Err(unexpected(&tok, "EXISTS or NOT EXISTS"));
        };
        self.expect_punct('{', "'{'")?;
        let inner = self.group()?;
        Ok(Filter { polarity, inner })
    }

    fn term(&self, tok: &Token, allow_literal: bool) -> Result<Option<PatternTerm>, ParseError> {
        Ok(Some(match &tok.tok {
            Tok::Var(name) => PatternTerm::Var(Variable::new(name.clone()).expect("non-empty")),
            Tok::Iri(value) => PatternTerm::Term(Term::Iri(absolute_iri(value, tok.pos)?)),
            Tok::PName { prefix, local } => {
                PatternTerm::Term(Term::Iri(expand_pname(&self.prefixes, prefix, local, tok.pos)?))
            }
            Tok::Str(s) if allow_literal => PatternTerm::Term(Term::Literal(Literal::string(s.clone()))),
            Tok::Integer(i) if allow_literal => {
                PatternTerm::Term(Term::Literal(Literal::typed(i.clone(), xsd::integer())))
            }
            _ => return Ok(None),
        }))
    }

    fn triples_same_subject(&mut self, first: Token, out: &mut Vec<TriplePattern>) -> Result<(), ParseError> {
        let subject = self
            .term(&first, false)?
            .ok_or_else(|| unexpected(&first, "a triple pattern, FILTER or '}'"))?;
        loop {
            let verb_tok = self.lexer.next_token()?;
            let predicate = if matches!(&verb_tok.tok, Tok::Word(w) if w == "a") {
                PatternTerm::Term(Term::Iri(rdf::type_()))
            } else {
                self.term(&verb_tok, false)?
                    .ok_or_else(|| unexpected(&verb_tok, "a predicate"))?
            };
            loop {
                let obj_tok = self.lexer.next_token()?;
                let object = self
                    .term(&obj_tok, true)?
                    .ok_or_else(|| unexpected(&obj_tok, "an object"))?;
                out.push(TriplePattern {
                    subject: subject.clone(),
                    predicate: predicate.clone(),
                    object,
                });
                if matches!(self.lexer.peek()?.tok, Tok::Punct(',')) {
                    self.lexer.next_token()?;
                } else {
                    break;
                }
            }
            if !matches!(self.lexer.peek()?.tok, Tok::Punct(';')) {
                return Ok(());
            }
            while matches!(self.lexer.peek()?.tok, Tok::Punct(';')) {
                self.lexer.next_token()?;
            }
            if matches!(self.lexer.peek()?.tok, Tok::Punct('.') | Tok::Punct('}')) {
                return Ok(());
            }
        }
    }
}
